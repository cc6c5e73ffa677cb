//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero when any criterion fails.
//!
//! Criteria that need the public cit-HepPh edge list read it from
//! `HEPPH_PATH` or `tests/data/cit-HepPh.txt[.gz]`. The optional platform
//! export check reads `RG_EXPORT_PATH`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use citefarm::cli::{cmd_detect, load_corpus, DetectArgs, DetectionArgs, ModeArg};
use citefarm::graph::build_paper_graph;
use citefarm::ingest::{AuthorId, AuthorRecord, Corpus, PaperId, PaperRecord};
use citefarm::metrics::{beneficiary_stats, compare_histograms, group_size_histogram, GroupSize};
use citefarm::motif::clique::maximal_cliques;
use citefarm::motif::{detect_exact_groups, detect_near_duplicate_groups, DetectParams, DEFAULT_CLIQUE_CAP};
use citefarm::report::{manifest_without_timestamp, parse_beneficiaries_csv, render_beneficiaries_csv, MANIFEST_FILE};
use citefarm::synth::{ablation_sweep, generate, score_detection, AblationRow, FarmConfig, Perturbation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

type Criterion = (&'static str, fn() -> Outcome);

fn pid(s: impl AsRef<str>) -> PaperId {
    PaperId::new(s).unwrap()
}

fn aid(s: &str) -> AuthorId {
    AuthorId::from_profile(s).unwrap()
}

fn within(limit: Duration, elapsed: Duration, detail: String) -> Outcome {
    if elapsed <= limit {
        Pass(format!("{detail} in {elapsed:.2?}"))
    } else {
        Fail(format!("{detail} but took {elapsed:.2?} (limit {limit:?})"))
    }
}

fn beneficiary_shares() -> Outcome {
    let start = Instant::now();
    let table = [("b1", 27, 22), ("b2", 90, 52), ("b3", 42, 24), ("b4", 436, 224), ("b5", 110, 49)];
    let mut papers = Vec::new();
    let mut authors = Vec::new();
    for (name, total, motif) in table {
        let cited = format!("{name}-work");
        let mut work = PaperRecord::new(pid(&cited));
        work.authors = vec![aid(name)];
        papers.push(work);
        for c in 0..motif {
            let mut citer = PaperRecord::new(pid(format!("{name}-citer-{c}")));
            citer.references = [pid(&cited), pid(format!("{name}-filler"))].into();
            papers.push(citer);
        }
        authors.push(AuthorRecord {
            id: aid(name),
            display_name: None,
            has_profile: true,
            total_citations: Some(total),
        });
    }
    let corpus = Corpus::from_records("shares", papers, authors);
    let groups = detect_exact_groups(&build_paper_graph(&corpus), &DetectParams::default()).unwrap();
    let stats = beneficiary_stats(&corpus, &groups);
    let rows = parse_beneficiaries_csv(&render_beneficiaries_csv(&stats, true)).unwrap();
    let shares: Vec<Option<u64>> = rows.iter().map(|r| r.motif_share_pct).collect();
    let elapsed = start.elapsed();
    let expected = [81, 58, 57, 51, 45].map(Some);
    if shares != expected {
        return Fail(format!("shares {shares:?}, expected {expected:?}"));
    }
    within(Duration::from_secs(1), elapsed, format!("shares {:?}", [81, 58, 57, 51, 45]))
}

fn hepph_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("HEPPH_PATH") {
        return Some(PathBuf::from(p));
    }
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    ["cit-HepPh.txt", "cit-HepPh.txt.gz"]
        .iter()
        .map(|n| data.join(n))
        .find(|p| p.exists())
}

fn load_hepph() -> Result<Corpus, String> {
    let path = hepph_path().ok_or_else(|| {
        "BLOCKED: cit-HepPh edge list not present (set HEPPH_PATH or add tests/data/cit-HepPh.txt)".to_owned()
    })?;
    load_corpus(&path, None).map(|(c, _)| c).map_err(|e| e.to_string())
}

fn hepph_replication() -> Outcome {
    let start = Instant::now();
    let corpus = match load_hepph() {
        Ok(c) => c,
        Err(e) => return Fail(e),
    };
    let graph = build_paper_graph(&corpus);
    let mut counts = BTreeMap::new();
    for min_refs in 1..=3 {
        let params = DetectParams { min_citers: 2, min_refs, clique_cap: DEFAULT_CLIQUE_CAP };
        counts.insert(min_refs, detect_exact_groups(&graph, &params).unwrap().len());
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "{} papers; groups by min_refs {counts:?}; canonical (min_citers=2, min_refs=1) = {}",
        corpus.captured_paper_count(),
        counts[&1]
    );
    if !counts.values().any(|&c| (240..=380).contains(&c)) {
        return Fail(format!("{detail}; none within 240..=380"));
    }
    within(Duration::from_secs(60), elapsed, detail)
}

fn farm_mimic_config() -> FarmConfig {
    FarmConfig {
        background_papers: 1_500,
        group_count: 240,
        citers_per_group: 2,
        citers_per_group_max: Some(10),
        ..FarmConfig::default()
    }
}

fn farm_vs_hepph() -> Outcome {
    let hepph = match load_hepph() {
        Ok(c) => c,
        Err(e) => return Fail(e),
    };
    let (farm, _) = generate(&farm_mimic_config()).unwrap();
    let params = DetectParams::default();
    let hist = |c: &Corpus| {
        let groups = detect_exact_groups(&build_paper_graph(c), &params).unwrap();
        group_size_histogram(&groups, c, GroupSize::Citers)
    };
    let (farm_h, hepph_h) = (hist(&farm), hist(&hepph));
    let mut losing = Vec::new();
    for row in compare_histograms(&farm_h, &hepph_h) {
        if row.group_size >= 3 && row.left <= row.right {
            losing.push((row.group_size, row.left, row.right));
        }
    }
    if losing.is_empty() {
        Pass(format!("farm ({} papers) exceeds cit-HepPh in every bucket >= 3", farm.captured_paper_count()))
    } else {
        Fail(format!("buckets (size, farm, cit-HepPh) not exceeded: {losing:?}"))
    }
}

fn random_corpus(rng: &mut ChaCha8Rng) -> Corpus {
    let n = rng.gen_range(1..=300);
    let pool = rng.gen_range(4..=30);
    let mut papers: Vec<PaperRecord> = Vec::with_capacity(n);
    for i in 0..n {
        let mut p = PaperRecord::new(pid(format!("p{i}")));
        if i > 0 && rng.gen_bool(0.3) {
            p.references = papers[rng.gen_range(0..i)].references.clone();
        } else {
            let k = rng.gen_range(0..=12);
            p.references = (0..k).map(|_| pid(format!("r{}", rng.gen_range(0..pool)))).collect();
        }
        papers.push(p);
    }
    Corpus::from_records("random", papers, [])
}

type Motif = (BTreeSet<PaperId>, BTreeSet<PaperId>);

fn pairwise_grouping(corpus: &Corpus, params: &DetectParams) -> BTreeSet<Motif> {
    let eligible: Vec<&PaperRecord> = corpus
        .papers
        .values()
        .filter(|p| p.references.len() >= params.min_refs)
        .collect();
    let mut assigned = vec![false; eligible.len()];
    let mut out = BTreeSet::new();
    for i in 0..eligible.len() {
        if assigned[i] {
            continue;
        }
        let mut class = BTreeSet::from([eligible[i].id.clone()]);
        for j in i + 1..eligible.len() {
            if !assigned[j] && eligible[j].references == eligible[i].references {
                assigned[j] = true;
                class.insert(eligible[j].id.clone());
            }
        }
        if class.len() >= params.min_citers {
            out.insert((class, eligible[i].references.clone()));
        }
    }
    out
}

fn grouping_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100 {
        let corpus = random_corpus(&mut rng);
        let params = DetectParams {
            min_citers: rng.gen_range(2..=3),
            min_refs: rng.gen_range(1..=3),
            clique_cap: DEFAULT_CLIQUE_CAP,
        };
        let found: BTreeSet<Motif> = detect_exact_groups(&build_paper_graph(&corpus), &params)
            .unwrap()
            .into_iter()
            .map(|g| (g.citers, g.cited))
            .collect();
        if found != pairwise_grouping(&corpus, &params) {
            return Fail(format!("corpus {case} differs from pairwise grouping"));
        }
    }
    within(Duration::from_secs(10), start.elapsed(), "100 corpora match pairwise grouping".into())
}

fn brute_force_cliques(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let connected = |a: usize, b: usize| adj[a].contains(&b);
    let is_clique = |mask: u32| {
        (0..n).all(|a| mask & (1 << a) == 0 || (a + 1..n).all(|b| mask & (1 << b) == 0 || connected(a, b)))
    };
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if !is_clique(mask) {
            continue;
        }
        let maximal = (0..n).all(|v| mask & (1 << v) != 0 || !is_clique(mask | (1 << v)));
        if maximal {
            out.push((0..n).filter(|&v| mask & (1 << v) != 0).collect());
        }
    }
    out.sort();
    out
}

fn clique_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let n = rng.gen_range(0..=15);
        let density = rng.gen_range(0.0..=1.0);
        let mut adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(density) {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        if maximal_cliques(&adj, 1) != brute_force_cliques(&adj) {
            return Fail(format!("graph {case} ({n} nodes) differs from subset enumeration"));
        }
    }
    within(Duration::from_secs(10), start.elapsed(), "200 graphs match subset enumeration".into())
}

fn tau_one_collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let params = DetectParams::default();
    for case in 0..50 {
        let corpus = random_corpus(&mut rng);
        let graph = build_paper_graph(&corpus);
        let exact = detect_exact_groups(&graph, &params).unwrap();
        let near = detect_near_duplicate_groups(&graph, 1.0, &params).unwrap();
        let equal = exact.len() == near.len()
            && exact.iter().zip(&near).all(|(a, b)| a.group_id == b.group_id && a.same_motif(b));
        if !equal {
            return Fail(format!("corpus {case}: {} exact vs {} near-duplicate groups", exact.len(), near.len()));
        }
    }
    Pass("50 corpora identical at tau = 1.0".into())
}

fn recall_at(rows: &[AblationRow], k: usize, mode: &str) -> f64 {
    rows.iter().find(|r| r.k == k && r.mode == mode).map(|r| r.recall).unwrap()
}

fn sweep(kind: Perturbation) -> Vec<AblationRow> {
    ablation_sweep(&FarmConfig::default(), &[0, 1, 2, 3, 4], &[0.8], kind, &DetectParams::default()).unwrap()
}

fn describe(rows: &[AblationRow]) -> String {
    (0..=4)
        .map(|k| format!("k={k} exact={:.2} near={:.2}", recall_at(rows, k, "exact"), recall_at(rows, k, "near-duplicate")))
        .collect::<Vec<_>>()
        .join("; ")
}

fn synthetic_recovery_exact() -> Outcome {
    let config = FarmConfig::default();
    let (corpus, truth) = generate(&config).unwrap();
    let groups = detect_exact_groups(&build_paper_graph(&corpus), &DetectParams::default()).unwrap();
    let score = score_detection(&truth, &groups);
    if score.precision != 1.0 || score.recall != 1.0 {
        return Fail(format!("unperturbed precision {} recall {}", score.precision, score.recall));
    }
    for kind in [Perturbation::Substitute, Perturbation::Append] {
        let rows = sweep(kind);
        if let Some(k) = (1..=4).find(|&k| recall_at(&rows, k, "exact") != 0.0) {
            return Fail(format!("{kind}: exact recall {} at k={k}", recall_at(&rows, k, "exact")));
        }
    }
    Pass(format!("seed {}: precision 1.0, recall 1.0; exact recall 0 for k=1..4", config.seed))
}

fn synthetic_recovery_near_duplicate() -> Outcome {
    let substitute = sweep(Perturbation::Substitute);
    let append = sweep(Perturbation::Append);
    let detail = format!("substitute [{}]; append [{}]", describe(&substitute), describe(&append));
    let holds = (1..=2).all(|k| recall_at(&substitute, k, "near-duplicate") > recall_at(&substitute, k, "exact"));
    if holds {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn bundle_snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let bytes = if name == MANIFEST_FILE {
            manifest_without_timestamp(&path).unwrap().to_string().into_bytes()
        } else {
            std::fs::read(&path).unwrap()
        };
        out.insert(name, bytes);
    }
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let (corpus, _) = generate(&FarmConfig::default()).unwrap();
    let input = tmp.path().join("farm.jsonl");
    std::fs::write(&input, corpus.to_jsonl_string()).unwrap();
    let args = DetectArgs {
        input,
        format: None,
        detection: DetectionArgs {
            mode: ModeArg::NearDup,
            tau: Some(0.8),
            min_citers: 2,
            min_refs: 1,
            strict_distinct_authors: true,
            clique_cap: DEFAULT_CLIQUE_CAP,
        },
        out: tmp.path().join("bundle"),
        force: false,
        reveal: false,
    };
    let first = cmd_detect(&args).unwrap();
    let a = bundle_snapshot(&args.out);
    let second = cmd_detect(&args).unwrap();
    let b = bundle_snapshot(&args.out);
    if a != b || first.bundle.bundle_digest != second.bundle.bundle_digest {
        let differing: Vec<_> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
        return Fail(format!("bundles differ in {differing:?}"));
    }
    Pass(format!("{} files byte-identical", a.len()))
}

fn platform_export() -> Outcome {
    let Ok(path) = std::env::var("RG_EXPORT_PATH") else {
        return Skip("RG_EXPORT_PATH not set; platform export not supplied".into());
    };
    let corpus = match load_corpus(Path::new(&path), None) {
        Ok((c, _)) => c,
        Err(e) => return Fail(e.to_string()),
    };
    let groups = detect_exact_groups(&build_paper_graph(&corpus), &DetectParams::default()).unwrap();
    let detail = format!("{} papers, {} groups", corpus.captured_paper_count(), groups.len());
    if groups.len() == 240 {
        Pass(detail)
    } else {
        Fail(format!("{detail}, expected 240"))
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 beneficiary shares", beneficiary_shares),
        ("2 cit-HepPh replication", hepph_replication),
        ("3 farm vs cit-HepPh histogram", farm_vs_hepph),
        ("4 grouping oracle", grouping_oracle),
        ("5 clique oracle", clique_oracle),
        ("6 tau=1 collapse", tau_one_collapse),
        ("7a synthetic recovery, exact mode", synthetic_recovery_exact),
        ("7b synthetic recovery, near-duplicate tau=0.8", synthetic_recovery_near_duplicate),
        ("8 report determinism", determinism),
        ("platform export group count", platform_export),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let line = match check() {
            Pass(d) => format!("PASS  {name}: {d}"),
            Fail(d) => {
                failed += 1;
                format!("FAIL  {name}: {d}")
            }
            Skip(d) => format!("SKIP  {name}: {d}"),
        };
        println!("{line}");
    }
    println!("{} of {} criteria failed", failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
