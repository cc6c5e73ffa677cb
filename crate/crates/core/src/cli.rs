//! Batch command-line front end.
//!
//! Subcommands: `detect`, `compare`, `synth`, `validate`, `timeline`.
//!
//! Exit codes: 0 success, 1 parse or configuration error, 2 I/O error,
//! 3 internal invariant violation.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use flate2::read::GzDecoder;
use thiserror::Error;

use crate::graph::build_paper_graph;
use crate::ingest::{parse_edge_list, parse_metadata_corpus, AuthorId, Corpus, IngestError};
use crate::metrics::{beneficiary_stats, compare_histograms, group_size_histogram, timeline_histogram, GroupSize};
use crate::motif::{
    annotate_authors, check_exact_invariants, detect_exact_groups, detect_near_duplicate_groups,
    retain_distinct_author_groups, validate_tau, DetectParams, DetectionMode, EqualReferencesGroup, MotifError,
    DEFAULT_CLIQUE_CAP,
};
use crate::report::{
    emit, render_histogram_csv, render_ratio_csv, render_timeline_csv, write_bundle, EmitOptions, InputDigest,
    ReportBundle, ReportError, ReportInputs, RunSettings,
};
use crate::synth::{ablation_sweep, generate, score_detection, FarmConfig, Perturbation, SynthError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: IngestError,
    },
    #[error("{0}")]
    Io(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parse { .. } => 1,
            CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<MotifError> for CliError {
    fn from(e: MotifError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::ForeignBundle { .. } => CliError::Config(e.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "citefarm", version, about = "Detect equal-references groups in citation networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline on one corpus and write a report bundle.
    Detect(DetectArgs),
    /// Compare normalized group-size histograms of two corpora.
    Compare(CompareArgs),
    /// Generate a synthetic corpus with injected motifs.
    Synth(SynthArgs),
    /// Generate, detect and score against the injected ground truth.
    Validate(ValidateArgs),
    /// Quarterly publication timeline of a metadata corpus.
    Timeline(TimelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    EdgeList,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    NearDup,
}

#[derive(Debug, Clone, Args)]
pub struct DetectionArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Jaccard threshold in (0, 1]; required with --mode near-dup.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub min_citers: usize,
    #[arg(long, default_value_t = 1)]
    pub min_refs: usize,
    /// Require citers of a group to span at least two distinct author lists.
    #[arg(long)]
    pub strict_distinct_authors: bool,
    #[arg(long, default_value_t = DEFAULT_CLIQUE_CAP)]
    pub clique_cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to jsonl for .jsonl/.json/.ndjson files, edge-list otherwise.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    #[command(flatten)]
    pub detection: DetectionArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
    /// Write real author ids instead of pseudonyms.
    #[arg(long)]
    pub reveal: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Exactly two inputs.
    #[arg(long, num_args = 1, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    #[command(flatten)]
    pub detection: DetectionArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FarmArgs {
    #[arg(long, default_value_t = 1_000)]
    pub background_papers: usize,
    #[arg(long, default_value_t = 10.0)]
    pub background_refs_mean: f64,
    #[arg(long, default_value_t = 10)]
    pub groups: usize,
    #[arg(long, default_value_t = 3)]
    pub citers_per_group: usize,
    #[arg(long)]
    pub citers_per_group_max: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub shared_refs: usize,
    #[arg(long, default_value_t = 5)]
    pub beneficiaries: usize,
    #[arg(long, default_value_t = 4)]
    pub papers_per_beneficiary: usize,
    #[arg(long, default_value_t = 0.5)]
    pub concentration: f64,
    #[arg(long, default_value_t = 2)]
    pub camouflage_authors: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl FarmArgs {
    pub fn to_config(&self) -> FarmConfig {
        FarmConfig {
            background_papers: self.background_papers,
            background_refs_mean: self.background_refs_mean,
            group_count: self.groups,
            citers_per_group: self.citers_per_group,
            citers_per_group_max: self.citers_per_group_max,
            shared_refs_per_group: self.shared_refs,
            beneficiary_count: self.beneficiaries,
            papers_per_beneficiary: self.papers_per_beneficiary,
            beneficiary_concentration: self.concentration,
            camouflage_authors: self.camouflage_authors,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub farm: FarmArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub farm: FarmArgs,
    #[command(flatten)]
    pub detection: DetectionArgs,
    /// Also sweep reference perturbations k = 0..=max-k and emit a CSV.
    #[arg(long)]
    pub perturbation_sweep: bool,
    #[arg(long, default_value_t = 4)]
    pub max_k: usize,
    #[arg(long, value_enum, default_value = "substitute")]
    pub perturbation: PerturbationArg,
    /// Near-duplicate thresholds used by the sweep.
    #[arg(long, value_delimiter = ',', default_value = "0.8")]
    pub sweep_tau: Vec<f64>,
    /// Sweep CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PerturbationArg {
    Substitute,
    Append,
}

#[derive(Debug, Clone, Args)]
pub struct TimelineArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Restrict to papers listing this author (repeatable).
    #[arg(long)]
    pub author: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

/// Validated detection configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: DetectionMode,
    pub tau: Option<f64>,
    pub params: DetectParams,
    pub strict_distinct_authors: bool,
    pub anonymize: bool,
}

impl RunConfig {
    pub fn from_args(args: &DetectionArgs, reveal: bool) -> Result<Self, CliError> {
        let mode = match args.mode {
            ModeArg::Exact => DetectionMode::Exact,
            ModeArg::NearDup => DetectionMode::NearDuplicate,
        };
        match (mode, args.tau) {
            (DetectionMode::NearDuplicate, None) => {
                return Err(CliError::Config("--tau is required with --mode near-dup".into()))
            }
            (DetectionMode::Exact, Some(_)) => {
                return Err(CliError::Config("--tau only applies to --mode near-dup".into()))
            }
            (_, Some(tau)) => validate_tau(tau)?,
            _ => {}
        }
        let params = DetectParams {
            min_citers: args.min_citers,
            min_refs: args.min_refs,
            clique_cap: args.clique_cap,
        };
        params.validate()?;
        Ok(Self {
            mode,
            tau: args.tau,
            params,
            strict_distinct_authors: args.strict_distinct_authors,
            anonymize: !reveal,
        })
    }

    pub fn settings(&self) -> RunSettings {
        RunSettings {
            mode: self.mode,
            tau: self.tau,
            min_citers: self.params.min_citers,
            min_refs: self.params.min_refs,
            strict_distinct_authors: self.strict_distinct_authors,
            anonymize: self.anonymize,
        }
    }
}

pub fn infer_format(path: &Path) -> InputFormat {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("").to_lowercase();
    let name = name.strip_suffix(".gz").unwrap_or(&name);
    if [".jsonl", ".json", ".ndjson"].iter().any(|ext| name.ends_with(ext)) {
        InputFormat::Jsonl
    } else {
        InputFormat::EdgeList
    }
}

fn label_for(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("corpus");
    let name = name.strip_suffix(".gz").unwrap_or(name);
    match name.rsplit_once('.') {
        Some((stem, _)) if !stem.is_empty() => stem.to_owned(),
        _ => name.to_owned(),
    }
}

/// Reads and parses a corpus file, returning it with the digest of the raw
/// bytes. `.gz` files are decompressed transparently.
pub fn load_corpus(path: &Path, format: Option<InputFormat>) -> Result<(Corpus, InputDigest), CliError> {
    let raw = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let digest = InputDigest::of_bytes(path.display().to_string(), &raw);
    let bytes = if path.extension().is_some_and(|e| e == "gz") {
        let mut out = Vec::new();
        GzDecoder::new(&raw[..])
            .read_to_end(&mut out)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        out
    } else {
        raw
    };
    let label = label_for(path);
    let parsed = match format.unwrap_or_else(|| infer_format(path)) {
        InputFormat::EdgeList => parse_edge_list(&bytes[..], &label),
        InputFormat::Jsonl => parse_metadata_corpus(&bytes[..], &label),
    };
    let corpus = parsed.map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok((corpus, digest))
}

/// Detection stage shared by `detect` and `compare`.
pub fn run_detection(corpus: &Corpus, config: &RunConfig) -> Result<Vec<EqualReferencesGroup>, CliError> {
    if config.strict_distinct_authors && !corpus.has_authorship() {
        return Err(CliError::Config(format!(
            "--strict-distinct-authors needs authorship, but {} has none",
            corpus.label
        )));
    }
    let graph = build_paper_graph(corpus);
    let mut groups = match config.mode {
        DetectionMode::Exact => detect_exact_groups(&graph, &config.params)?,
        DetectionMode::NearDuplicate => {
            let tau = config.tau.expect("validated: near-dup carries tau");
            detect_near_duplicate_groups(&graph, tau, &config.params)?
        }
    };
    check_exact_invariants(&graph, &groups).map_err(CliError::Invariant)?;
    annotate_authors(&mut groups, corpus);
    if config.strict_distinct_authors {
        groups = retain_distinct_author_groups(groups, corpus);
    }
    Ok(groups)
}

#[derive(Debug, Clone)]
pub struct DetectOutcome {
    pub papers: usize,
    pub groups: usize,
    pub largest_group: usize,
    pub bundle: ReportBundle,
}

impl DetectOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "{} papers, {} groups, largest group {} citers",
            self.papers, self.groups, self.largest_group
        )
    }
}

pub fn cmd_detect(args: &DetectArgs) -> Result<DetectOutcome, CliError> {
    let config = RunConfig::from_args(&args.detection, args.reveal)?;
    let (corpus, digest) = load_corpus(&args.input, args.format)?;
    let groups = run_detection(&corpus, &config)?;
    let stats = beneficiary_stats(&corpus, &groups);
    let timeline = timeline_histogram(&corpus, |_| true);
    let inputs = ReportInputs {
        corpus: &corpus,
        groups: &groups,
        stats: &stats,
        timeline: &timeline,
        settings: config.settings(),
        inputs: vec![digest],
    };
    let bundle = emit(&inputs, &args.out, EmitOptions { force: args.force })?;
    Ok(DetectOutcome {
        papers: corpus.captured_paper_count(),
        groups: groups.len(),
        largest_group: groups.iter().map(|g| g.citers.len()).max().unwrap_or(0),
        bundle,
    })
}

pub fn cmd_compare(args: &CompareArgs) -> Result<ReportBundle, CliError> {
    if args.input.len() != 2 {
        return Err(CliError::Config(format!("compare takes exactly two --input, got {}", args.input.len())));
    }
    let config = RunConfig::from_args(&args.detection, false)?;
    let mut histograms = Vec::new();
    let mut digests = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for path in &args.input {
        let (mut corpus, digest) = load_corpus(path, args.format)?;
        if labels.contains(&corpus.label) {
            corpus.label = format!("{}-{}", corpus.label, labels.len() + 1);
        }
        labels.push(corpus.label.clone());
        let groups = run_detection(&corpus, &config)?;
        histograms.push([
            group_size_histogram(&groups, &corpus, GroupSize::Citers),
            group_size_histogram(&groups, &corpus, GroupSize::AllNodes),
        ]);
        digests.push(digest);
    }
    let [left, right] = [&histograms[0], &histograms[1]];
    let all: Vec<_> = histograms.iter().flat_map(|h| h.iter().cloned()).collect();
    let files = std::collections::BTreeMap::from([
        ("histogram.csv", render_histogram_csv(&all)),
        (
            "ratios.csv",
            render_ratio_csv(&labels[0], &labels[1], &compare_histograms(&left[0], &right[0])),
        ),
        (
            "ratios_all_nodes.csv",
            render_ratio_csv(&labels[0], &labels[1], &compare_histograms(&left[1], &right[1])),
        ),
    ]);
    let extra = serde_json::json!({ "settings": config.settings(), "inputs": digests });
    Ok(write_bundle(&args.out, files, extra, EmitOptions { force: args.force })?)
}

pub fn cmd_synth(args: &SynthArgs) -> Result<ReportBundle, CliError> {
    let config = args.farm.to_config();
    let (corpus, truth) = generate(&config)?;
    let files = std::collections::BTreeMap::from([
        ("corpus.jsonl", corpus.to_jsonl_string()),
        ("ground_truth.json", truth.to_json()),
    ]);
    let extra = serde_json::json!({ "farm_config": config });
    Ok(write_bundle(&args.out, files, extra, EmitOptions { force: args.force })?)
}

/// Returns the lines to print.
pub fn cmd_validate(args: &ValidateArgs) -> Result<Vec<String>, CliError> {
    let config = args.farm.to_config();
    let run = RunConfig::from_args(&args.detection, false)?;
    let (corpus, truth) = generate(&config)?;
    let groups = run_detection(&corpus, &run)?;
    let score = score_detection(&truth, &groups);
    let mut lines = Vec::new();
    if score.truth == 0 && score.detected == 0 {
        lines.push("0 groups detected, vacuous precision/recall 1.0".to_owned());
    } else {
        lines.push(format!(
            "{} groups detected, {} injected, {} matched: precision {:.6}, recall {:.6}",
            score.detected, score.truth, score.matched_truth, score.precision, score.recall
        ));
    }
    if args.perturbation_sweep {
        for &tau in &args.sweep_tau {
            validate_tau(tau)?;
        }
        let kind = match args.perturbation {
            PerturbationArg::Substitute => Perturbation::Substitute,
            PerturbationArg::Append => Perturbation::Append,
        };
        let ks: Vec<usize> = (0..=args.max_k).collect();
        let rows = ablation_sweep(&config, &ks, &args.sweep_tau, kind, &run.params)?;
        let mut csv = String::from("k,perturbation,mode,tau,precision,recall\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.k, r.perturbation, r.mode, r.tau, r.precision, r.recall
            ));
        }
        match &args.out {
            Some(path) => {
                fs::write(path, &csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                lines.push(format!("perturbation sweep written to {}", path.display()));
            }
            None => lines.extend(csv.lines().map(str::to_owned)),
        }
    }
    Ok(lines)
}

pub fn cmd_timeline(args: &TimelineArgs) -> Result<ReportBundle, CliError> {
    let (corpus, digest) = load_corpus(&args.input, args.format)?;
    let wanted: Vec<AuthorId> = args
        .author
        .iter()
        .map(|a| AuthorId::from_profile(a).map_err(|e| CliError::Config(e.to_string())))
        .collect::<Result<_, _>>()?;
    let wanted_names: Vec<AuthorId> = args.author.iter().filter_map(|a| AuthorId::from_name(a).ok()).collect();
    let timeline = timeline_histogram(&corpus, |p| {
        wanted.is_empty() || p.authors.iter().any(|a| wanted.contains(a) || wanted_names.contains(a))
    });
    let files = std::collections::BTreeMap::from([("timeline.csv", render_timeline_csv(&timeline))]);
    let extra = serde_json::json!({
        "inputs": [digest],
        "undated_excluded": timeline.undated_excluded,
        "pre_2000_excluded": timeline.pre_2000_excluded,
    });
    Ok(write_bundle(&args.out, files, extra, EmitOptions { force: args.force })?)
}

pub fn execute(cli: &Cli) -> Result<Vec<String>, CliError> {
    match &cli.command {
        Command::Detect(args) => Ok(vec![cmd_detect(args)?.summary_line()]),
        Command::Compare(args) => {
            let bundle = cmd_compare(args)?;
            Ok(vec![format!("comparison written to {}", bundle.dir.display())])
        }
        Command::Synth(args) => {
            let bundle = cmd_synth(args)?;
            Ok(vec![format!("synthetic corpus written to {}", bundle.dir.display())])
        }
        Command::Validate(args) => cmd_validate(args),
        Command::Timeline(args) => {
            let bundle = cmd_timeline(args)?;
            Ok(vec![format!("timeline written to {}", bundle.dir.display())])
        }
    }
}

/// Parses `args`, runs the command, prints its output, and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
