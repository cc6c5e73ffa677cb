use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use citefarm::report::{manifest_without_timestamp, parse_beneficiaries_csv};

fn citefarm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_citefarm")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TOY: &str = "# Directed graph\n# Nodes: 6 Edges: 9\n1\t10\n1\t11\n2\t10\n2\t11\n3\t10\n3\t11\n4\t10\n5\t11\n5\t5\n";

#[test]
fn detect_writes_bundle_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("toy.txt");
    fs::write(&input, TOY).unwrap();
    let out = tmp.path().join("out");
    let o = citefarm(&["detect", "--input", s(&input), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "7 papers, 1 groups, largest group 3 citers");
    for f in ["summary.json", "groups.json", "beneficiaries.csv", "scatter.csv", "histogram.csv", "timeline.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["ingest"]["self_loops_dropped"], 1);
}

#[test]
fn gzip_input_is_read_transparently() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("toy.txt.gz");
    let mut gz = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
    gz.write_all(TOY.as_bytes()).unwrap();
    fs::write(&input, gz.finish().unwrap()).unwrap();
    let o = citefarm(&["detect", "--input", s(&input), "--out", s(&tmp.path().join("out"))]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1 groups"));
}

#[test]
fn malformed_input_exits_one_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("bad.txt");
    fs::write(&input, "1 2\n3 x\n").unwrap();
    let out = tmp.path().join("out");
    let o = citefarm(&["detect", "--input", s(&input), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 1);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("toy.txt");
    fs::write(&input, TOY).unwrap();
    let out = tmp.path().join("out");
    let near_without_tau = citefarm(&["detect", "--input", s(&input), "--out", s(&out), "--mode", "near-dup"]);
    assert_eq!(near_without_tau.status.code(), Some(1));
    let strict_without_authors =
        citefarm(&["detect", "--input", s(&input), "--out", s(&out), "--strict-distinct-authors"]);
    assert_eq!(strict_without_authors.status.code(), Some(1));
    let missing = citefarm(&["detect", "--input", s(&tmp.path().join("nope.txt")), "--out", s(&out)]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(citefarm(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(citefarm(&["--help"]).status.code(), Some(0));
}

#[test]
fn foreign_bundle_needs_force() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("toy.txt");
    fs::write(&input, TOY).unwrap();
    let out = tmp.path().join("out");
    fs::create_dir(&out).unwrap();
    fs::write(out.join("manifest.json"), r#"{"tool":"other","version":"9"}"#).unwrap();
    let refused = citefarm(&["detect", "--input", s(&input), "--out", s(&out)]);
    assert_eq!(refused.status.code(), Some(1));
    let forced = citefarm(&["detect", "--input", s(&input), "--out", s(&out), "--force"]);
    assert!(forced.status.success());
}

#[test]
fn synth_then_detect_finds_the_farm() {
    let tmp = tempfile::tempdir().unwrap();
    let synth = tmp.path().join("synth");
    let o = citefarm(&["synth", "--seed", "7", "--out", s(&synth)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let truth: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(synth.join("ground_truth.json")).unwrap()).unwrap();
    assert_eq!(truth["injected_groups"].as_array().unwrap().len(), 10);

    let out = tmp.path().join("report");
    let corpus = synth.join("corpus.jsonl");
    let o = citefarm(&["detect", "--input", s(&corpus), "--out", s(&out), "--strict-distinct-authors"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains(", 10 groups,"));

    let table = fs::read_to_string(out.join("beneficiaries.csv")).unwrap();
    assert!(!table.contains("beneficiary-"), "real ids leaked");
    let rows = parse_beneficiaries_csv(&table).unwrap();
    assert!(rows.iter().all(|r| r.author.is_none()));

    let revealed = tmp.path().join("revealed");
    citefarm(&["detect", "--input", s(&corpus), "--out", s(&revealed), "--reveal"]);
    let mut rows = parse_beneficiaries_csv(&fs::read_to_string(revealed.join("beneficiaries.csv")).unwrap()).unwrap();
    rows.sort_by_key(|r| std::cmp::Reverse(r.motif_citations));
    let top: Vec<_> = rows.iter().take(5).filter_map(|r| r.author.clone()).collect();
    assert_eq!(top.len(), 5);
    assert!(top.iter().all(|a| a.starts_with("beneficiary-")), "{top:?}");
}

#[test]
fn detect_is_deterministic_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let synth = tmp.path().join("synth");
    citefarm(&["synth", "--out", s(&synth)]);
    let corpus = synth.join("corpus.jsonl");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = citefarm(&["detect", "--input", s(&corpus), "--out", s(out), "--mode", "near-dup", "--tau", "0.7"]);
        assert!(o.status.success());
    }
    for f in ["summary.json", "groups.json", "beneficiaries.csv", "scatter.csv", "histogram.csv", "timeline.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(
        manifest_without_timestamp(&a.join("manifest.json")).unwrap(),
        manifest_without_timestamp(&b.join("manifest.json")).unwrap()
    );
}

fn ratio_rows(path: &Path) -> Vec<(usize, f64, f64, Option<f64>)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            let ratio = rec.get(3).filter(|v| !v.is_empty()).map(|v| v.parse().unwrap());
            (rec[0].parse().unwrap(), rec[1].parse().unwrap(), rec[2].parse().unwrap(), ratio)
        })
        .collect()
}

#[test]
fn compare_identical_inputs_gives_unit_ratios() {
    let tmp = tempfile::tempdir().unwrap();
    let synth = tmp.path().join("synth");
    citefarm(&["synth", "--out", s(&synth)]);
    let corpus = synth.join("corpus.jsonl");
    let out = tmp.path().join("cmp");
    let o = citefarm(&["compare", "--input", s(&corpus), "--input", s(&corpus), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = ratio_rows(&out.join("ratios.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.3 == Some(1.0)), "{rows:?}");
}

#[test]
fn farm_outnumbers_background_in_larger_buckets() {
    let tmp = tempfile::tempdir().unwrap();
    let (farm, bg) = (tmp.path().join("farm"), tmp.path().join("bg"));
    citefarm(&["synth", "--out", s(&farm), "--groups", "40", "--citers-per-group", "2", "--citers-per-group-max", "6"]);
    citefarm(&["synth", "--out", s(&bg), "--groups", "0"]);
    let out = tmp.path().join("cmp");
    let o = citefarm(&[
        "compare",
        "--input",
        s(&farm.join("corpus.jsonl")),
        "--input",
        s(&bg.join("corpus.jsonl")),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = ratio_rows(&out.join("ratios.csv"));
    assert!(rows.iter().filter(|r| r.0 >= 3).all(|r| r.1 > r.2), "{rows:?}");
}

#[test]
fn validate_reports_scores_and_sweep() {
    let o = citefarm(&["validate", "--groups", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0 groups detected, vacuous precision/recall 1.0");

    let o = citefarm(&["validate"]);
    assert!(stdout(&o).contains("precision 1.000000, recall 1.000000"), "{}", stdout(&o));

    let tmp = tempfile::tempdir().unwrap();
    let csv_path = tmp.path().join("sweep.csv");
    let o = citefarm(&["validate", "--perturbation-sweep", "--max-k", "2", "--perturbation", "append", "--out", s(&csv_path)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,perturbation,mode,tau,precision,recall");
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert!(lines.contains(&"1,append,exact,1,1,0"));
}

#[test]
fn timeline_filters_by_author() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("meta.jsonl");
    fs::write(
        &input,
        concat!(
            r#"{"kind":"author","id":"u1","display_name":"Una","has_profile":true}"#, "\n",
            r#"{"kind":"paper","id":"a","authors":["u1"],"upload_date":"2020-02-10"}"#, "\n",
            r#"{"kind":"paper","id":"b","authors":["u1","Someone Else"],"upload_date":"2020-08-01"}"#, "\n",
            r#"{"kind":"paper","id":"c","authors":["Someone Else"],"upload_date":"2021-01-01"}"#, "\n",
            r#"{"kind":"paper","id":"d","authors":["u1"],"upload_date":"1999-12-31"}"#, "\n",
        ),
    )
    .unwrap();
    let all = tmp.path().join("all");
    let o = citefarm(&["timeline", "--input", s(&input), "--out", s(&all)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(all.join("timeline.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 5);

    let one = tmp.path().join("one");
    citefarm(&["timeline", "--input", s(&input), "--out", s(&one), "--author", "u1"]);
    let text = fs::read_to_string(one.join("timeline.csv")).unwrap();
    let counts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(counts, ["1", "0", "1"]);
}
