//! Report bundle emission.
//!
//! A bundle is a directory with fixed file names:
//!
//! | file               | content                                          |
//! |--------------------|--------------------------------------------------|
//! | `summary.json`     | corpus and run summary                           |
//! | `groups.json`      | detected groups, ids sorted                      |
//! | `beneficiaries.csv`| per-author motif benefit, in ranking order       |
//! | `scatter.csv`      | distinct cited papers vs. groups per author      |
//! | `histogram.csv`    | group-size histogram, raw and normalized         |
//! | `timeline.csv`     | quarterly publication counts                     |
//! | `manifest.json`    | tool version, settings, input and file digests   |
//!
//! CSV files are UTF-8, comma separated, minimally quoted, LF terminated and
//! always carry a header row. Everything except the manifest's `created_at`
//! is a pure function of the inputs.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingest::{anonymize_author, AuthorId, Corpus, PaperId};
use crate::metrics::{
    group_size_histogram, pseudonym_collisions, scatter_points, BeneficiaryStats, BucketRatio, GroupSize,
    GroupSizeHistogram, TimelineHistogram,
};
use crate::motif::{DetectionMode, EqualReferencesGroup};

pub const TOOL_NAME: &str = "citefarm";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SUMMARY_FILE: &str = "summary.json";
pub const GROUPS_FILE: &str = "groups.json";
pub const BENEFICIARIES_FILE: &str = "beneficiaries.csv";
pub const SCATTER_FILE: &str = "scatter.csv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const TIMELINE_FILE: &str = "timeline.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const BENEFICIARY_COLUMNS: [&str; 6] = [
    "pseudonym",
    "total_citations",
    "motif_citations",
    "motif_share_pct",
    "motif_share_raw",
    "flags",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(
        "{path} holds a bundle from {found} {found_version}; refusing to overwrite without --force"
    )]
    ForeignBundle {
        path: PathBuf,
        found: String,
        found_version: String,
    },
    #[error("malformed beneficiary table: {0}")]
    Table(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Detection settings recorded in the summary and manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub mode: DetectionMode,
    pub tau: Option<f64>,
    pub min_citers: usize,
    pub min_refs: usize,
    pub strict_distinct_authors: bool,
    pub anonymize: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_bytes(path: impl Into<String>, bytes: &[u8]) -> Self {
        Self {
            path: path.into(),
            sha256: sha256_hex(bytes),
        }
    }
}

pub struct ReportInputs<'a> {
    pub corpus: &'a Corpus,
    pub groups: &'a [EqualReferencesGroup],
    pub stats: &'a [BeneficiaryStats],
    pub timeline: &'a TimelineHistogram,
    pub settings: RunSettings,
    pub inputs: Vec<InputDigest>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EmitOptions {
    /// Overwrite a bundle written by a different tool version.
    pub force: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportBundle {
    pub dir: PathBuf,
    /// File name → SHA-256 of its contents, manifest excluded.
    pub files: BTreeMap<String, String>,
    pub bundle_digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer cannot fail");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn author_label(id: &AuthorId, anonymize: bool) -> String {
    if anonymize {
        anonymize_author(id)
    } else {
        id.as_str().to_owned()
    }
}

/// Beneficiary table. With `anonymize` off, an `author` column holding the
/// real id is appended.
pub fn render_beneficiaries_csv(stats: &[BeneficiaryStats], anonymize: bool) -> String {
    let mut w = csv_writer();
    let mut header: Vec<&str> = BENEFICIARY_COLUMNS.to_vec();
    if !anonymize {
        header.push("author");
    }
    w.write_record(&header).expect("in-memory");
    for s in stats {
        let flags: Vec<String> = s.flags.iter().map(ToString::to_string).collect();
        let mut row = vec![
            s.pseudonym.clone(),
            opt(s.total_citations),
            s.motif_citations.to_string(),
            opt(s.motif_share_percent()),
            opt(s.motif_share),
            flags.join(";"),
        ];
        if !anonymize {
            row.push(s.author.as_str().to_owned());
        }
        w.write_record(&row).expect("in-memory");
    }
    finish(w)
}

/// One parsed row of `beneficiaries.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeneficiaryRow {
    pub pseudonym: String,
    pub total_citations: Option<u64>,
    pub motif_citations: u64,
    pub motif_share_pct: Option<u64>,
    pub motif_share_raw: Option<f64>,
    pub flags: Vec<String>,
    pub author: Option<String>,
}

impl BeneficiaryRow {
    /// True when this row encodes `stats` faithfully.
    pub fn encodes(&self, stats: &BeneficiaryStats) -> bool {
        let flags: Vec<String> = stats.flags.iter().map(ToString::to_string).collect();
        self.pseudonym == stats.pseudonym
            && self.total_citations == stats.total_citations
            && self.motif_citations == stats.motif_citations
            && self.motif_share_pct == stats.motif_share_percent()
            && self.motif_share_raw == stats.motif_share
            && self.flags == flags
            && self.author.as_ref().is_none_or(|a| a == stats.author.as_str())
    }
}

pub fn parse_beneficiaries_csv(text: &str) -> Result<Vec<BeneficiaryRow>, ReportError> {
    let bad = |m: String| ReportError::Table(m);
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().take(6).ne(BENEFICIARY_COLUMNS.iter().copied()) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let with_author = header.get(6) == Some("author");
    let num = |s: &str| -> Result<Option<u64>, ReportError> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| bad(format!("not an integer: {s:?}")))
        }
    };
    let mut rows = Vec::new();
    for record in r.records() {
        let rec = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        rows.push(BeneficiaryRow {
            pseudonym: field(0).to_owned(),
            total_citations: num(field(1))?,
            motif_citations: num(field(2))?.ok_or_else(|| bad("missing motif_citations".into()))?,
            motif_share_pct: num(field(3))?,
            motif_share_raw: match field(4) {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(format!("not a number: {s:?}")))?),
            },
            flags: field(5)
                .split(';')
                .filter(|f| !f.is_empty())
                .map(str::to_owned)
                .collect(),
            author: with_author.then(|| field(6).to_owned()),
        });
    }
    Ok(rows)
}

pub fn render_scatter_csv(stats: &[BeneficiaryStats]) -> String {
    let mut w = csv_writer();
    w.write_record(["distinct_cited_papers", "groups_as_cited", "pseudonym"])
        .expect("in-memory");
    for p in scatter_points(stats) {
        w.write_record([
            p.distinct_cited_papers.to_string(),
            p.groups_as_cited.to_string(),
            p.pseudonym,
        ])
        .expect("in-memory");
    }
    finish(w)
}

pub fn render_histogram_csv(histograms: &[GroupSizeHistogram]) -> String {
    let mut w = csv_writer();
    w.write_record([
        "dataset",
        "size_kind",
        "group_size",
        "raw_count",
        "normalized_count",
        "paper_count",
    ])
    .expect("in-memory");
    for h in histograms {
        for (size, b) in &h.buckets {
            w.write_record([
                h.dataset_label.clone(),
                h.size_kind.to_string(),
                size.to_string(),
                b.raw.to_string(),
                b.normalized.to_string(),
                h.paper_count.to_string(),
            ])
            .expect("in-memory");
        }
    }
    finish(w)
}

pub fn render_ratio_csv(left: &str, right: &str, rows: &[BucketRatio]) -> String {
    let mut w = csv_writer();
    w.write_record([
        "group_size".to_owned(),
        format!("{left}_normalized"),
        format!("{right}_normalized"),
        "ratio".to_owned(),
    ])
    .expect("in-memory");
    for r in rows {
        w.write_record([
            r.group_size.to_string(),
            r.left.to_string(),
            r.right.to_string(),
            opt(r.ratio),
        ])
        .expect("in-memory");
    }
    finish(w)
}

pub fn render_timeline_csv(timeline: &TimelineHistogram) -> String {
    let mut w = csv_writer();
    w.write_record(["quarter_start", "publication_count", "mean_author_count"])
        .expect("in-memory");
    for b in &timeline.buckets {
        w.write_record([
            b.quarter_start.to_string(),
            b.publication_count.to_string(),
            opt(b.mean_author_count),
        ])
        .expect("in-memory");
    }
    finish(w)
}

fn sorted_ids<'a, I: IntoIterator<Item = &'a PaperId>>(ids: I) -> Vec<&'a str> {
    let mut v: Vec<&str> = ids.into_iter().map(PaperId::as_str).collect();
    v.sort_unstable();
    v
}

fn author_labels<'a, I>(ids: I, anonymize: bool) -> Vec<String>
where
    I: IntoIterator<Item = &'a AuthorId>,
{
    let mut v: Vec<String> = ids.into_iter().map(|a| author_label(a, anonymize)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn render_groups_json(groups: &[EqualReferencesGroup], anonymize: bool) -> String {
    let records: Vec<serde_json::Value> = groups
        .iter()
        .map(|g| {
            json!({
                "group_id": g.group_id,
                "mode": g.mode,
                "tau": g.tau,
                "citers": sorted_ids(&g.citers),
                "cited": sorted_ids(&g.cited),
                "shared": sorted_ids(&g.shared),
                "citer_authors": author_labels(&g.citer_authors, anonymize),
                "cited_authors": author_labels(&g.cited_authors, anonymize),
            })
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("json") + "\n"
}

pub fn render_summary_json(inputs: &ReportInputs<'_>) -> String {
    let corpus = inputs.corpus;
    let collisions = pseudonym_collisions(inputs.stats);
    let mut limitations = Vec::new();
    let name_keyed = corpus.name_keyed_author_count();
    if name_keyed > 0 {
        limitations.push(format!(
            "{name_keyed} authors have no profile link and were merged by normalized display name"
        ));
    }
    if !corpus.has_authorship() {
        limitations.push("corpus carries no authorship; author-level results are empty".to_owned());
    }
    if corpus.external_paper_count() > 0 {
        limitations.push(format!(
            "{} cited papers are external stubs without captured reference lists",
            corpus.external_paper_count()
        ));
    }
    if !collisions.is_empty() {
        limitations.push(format!("{} pseudonyms are shared by more than one author", collisions.len()));
    }
    let summary = json!({
        "label": corpus.label,
        "papers": corpus.captured_paper_count(),
        "external_stubs": corpus.external_paper_count(),
        "authors": corpus.authors.len(),
        "name_keyed_authors": name_keyed,
        "citations": corpus.edge_count(),
        "groups": inputs.groups.len(),
        "largest_group": inputs.groups.iter().map(|g| g.citers.len()).max().unwrap_or(0),
        "papers_in_groups": inputs.groups.iter().map(|g| g.citers.len()).sum::<usize>(),
        "beneficiaries": inputs.stats.len(),
        "pseudonym_collisions": collisions.keys().collect::<Vec<_>>(),
        "timeline_undated_excluded": inputs.timeline.undated_excluded,
        "timeline_pre_2000_excluded": inputs.timeline.pre_2000_excluded,
        "ingest": corpus.diagnostics,
        "settings": inputs.settings,
        "limitations": limitations,
    });
    serde_json::to_string_pretty(&summary).expect("json") + "\n"
}

/// Renders every bundle file except the manifest.
pub fn render_files(inputs: &ReportInputs<'_>) -> BTreeMap<&'static str, String> {
    let anonymize = inputs.settings.anonymize;
    let histograms = [
        group_size_histogram(inputs.groups, inputs.corpus, GroupSize::Citers),
        group_size_histogram(inputs.groups, inputs.corpus, GroupSize::AllNodes),
    ];
    BTreeMap::from([
        (SUMMARY_FILE, render_summary_json(inputs)),
        (GROUPS_FILE, render_groups_json(inputs.groups, anonymize)),
        (BENEFICIARIES_FILE, render_beneficiaries_csv(inputs.stats, anonymize)),
        (SCATTER_FILE, render_scatter_csv(inputs.stats)),
        (HISTOGRAM_FILE, render_histogram_csv(&histograms)),
        (TIMELINE_FILE, render_timeline_csv(inputs.timeline)),
    ])
}

pub fn emit(inputs: &ReportInputs<'_>, out_dir: &Path, options: EmitOptions) -> Result<ReportBundle, ReportError> {
    let files = render_files(inputs);
    let manifest_extra = json!({
        "settings": inputs.settings,
        "inputs": inputs.inputs,
    });
    write_bundle(out_dir, files, manifest_extra, options)
}

/// Writes `files` plus a manifest into `out_dir` atomically: everything is
/// staged in a sibling temporary directory, then renamed into place.
pub fn write_bundle(
    out_dir: &Path,
    files: BTreeMap<&str, String>,
    manifest_extra: serde_json::Value,
    options: EmitOptions,
) -> Result<ReportBundle, ReportError> {
    check_existing(out_dir, options)?;
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(io_err(&parent))?;
    let staging = tempfile::Builder::new()
        .prefix(".citefarm-staging-")
        .tempdir_in(&parent)
        .map_err(io_err(&parent))?;

    let mut digests = BTreeMap::new();
    for (name, content) in &files {
        let path = staging.path().join(name);
        fs::write(&path, content).map_err(io_err(&path))?;
        digests.insert((*name).to_owned(), sha256_hex(content.as_bytes()));
    }
    let bundle_digest = sha256_hex(
        digests
            .iter()
            .map(|(n, d)| format!("{n}\0{d}\n"))
            .collect::<String>()
            .as_bytes(),
    );
    let mut manifest = json!({
        "tool": TOOL_NAME,
        "tool_version": TOOL_VERSION,
        "created_at": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "files": digests,
        "bundle_digest": bundle_digest,
    });
    if let (Some(m), serde_json::Value::Object(extra)) = (manifest.as_object_mut(), manifest_extra) {
        for (k, v) in extra {
            m.insert(k, v);
        }
    }
    let manifest_path = staging.path().join(MANIFEST_FILE);
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).expect("json") + "\n")
        .map_err(io_err(&manifest_path))?;

    if out_dir.exists() {
        for name in files.keys().copied().chain([MANIFEST_FILE]) {
            let from = staging.path().join(name);
            let to = out_dir.join(name);
            fs::rename(&from, &to).map_err(io_err(&to))?;
        }
    } else {
        let staged = staging.keep();
        if let Err(source) = fs::rename(&staged, out_dir) {
            let _ = fs::remove_dir_all(&staged);
            return Err(ReportError::Io {
                path: out_dir.to_owned(),
                source,
            });
        }
    }
    Ok(ReportBundle {
        dir: out_dir.to_owned(),
        files: digests,
        bundle_digest,
    })
}

fn check_existing(out_dir: &Path, options: EmitOptions) -> Result<(), ReportError> {
    if !out_dir.exists() {
        return Ok(());
    }
    if !out_dir.is_dir() {
        return Err(ReportError::Io {
            path: out_dir.to_owned(),
            source: io::Error::new(io::ErrorKind::AlreadyExists, "not a directory"),
        });
    }
    let manifest = out_dir.join(MANIFEST_FILE);
    if options.force || !manifest.exists() {
        return Ok(());
    }
    let text = fs::read_to_string(&manifest).map_err(io_err(&manifest))?;
    let value: serde_json::Value = serde_json::from_str(&text).unwrap_or_default();
    let tool = value["tool"].as_str().unwrap_or("unknown tool");
    let version = value["tool_version"].as_str().unwrap_or("unknown version");
    if tool == TOOL_NAME && version == TOOL_VERSION {
        return Ok(());
    }
    Err(ReportError::ForeignBundle {
        path: out_dir.to_owned(),
        found: tool.to_owned(),
        found_version: version.to_owned(),
    })
}

/// Reads a manifest and drops its timestamp, leaving only content that is
/// determined by the inputs.
pub fn manifest_without_timestamp(path: &Path) -> Result<serde_json::Value, ReportError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ReportError::Table(e.to_string()))?;
    if let Some(m) = value.as_object_mut() {
        m.remove("created_at");
    }
    Ok(value)
}
