//! Synthetic corpora with injected citation-farming motifs.
//!
//! The background is a recency-biased preferential-attachment citation
//! process: paper `i` cites earlier papers with probability proportional to
//! `(in_degree + 1) / (1 + age / window)`. It is a test harness for the
//! detectors, not a model of any real discipline.
//!
//! Injected groups follow the observed farm shape: several citing papers
//! with one shared reference list, part of it pointing at beneficiary
//! papers and the rest at uninvolved background papers as camouflage.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::build_paper_graph;
use crate::ingest::{AuthorId, AuthorRecord, Corpus, PaperId, PaperRecord};
use crate::motif::{detect_exact_groups, detect_near_duplicate_groups, DetectParams, EqualReferencesGroup, MotifError};

/// Number of uploading accounts the farmed papers are attributed to.
pub const FARM_ACCOUNTS: usize = 5;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid farm config: {0}")]
    Config(String),
    #[error("{needed} beneficiary papers requested but only {available} background papers exist")]
    NotEnoughPapers { needed: usize, available: usize },
    #[error("could not build a reference list for group {group} distinct from every other list")]
    Uniqueness { group: usize },
    #[error(transparent)]
    Motif(#[from] MotifError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarmConfig {
    pub background_papers: usize,
    pub background_refs_mean: f64,
    pub group_count: usize,
    /// Citers per injected group; with `citers_per_group_max` set, sizes are
    /// drawn uniformly from `citers_per_group..=citers_per_group_max`.
    pub citers_per_group: usize,
    pub citers_per_group_max: Option<usize>,
    pub shared_refs_per_group: usize,
    pub beneficiary_count: usize,
    pub papers_per_beneficiary: usize,
    /// Share of each shared list pointing at beneficiary papers.
    pub beneficiary_concentration: f64,
    /// Fabricated co-authors added to each farmed paper.
    pub camouflage_authors: usize,
    pub seed: u64,
}

impl Default for FarmConfig {
    fn default() -> Self {
        Self {
            background_papers: 1_000,
            background_refs_mean: 10.0,
            group_count: 10,
            citers_per_group: 3,
            citers_per_group_max: None,
            shared_refs_per_group: 8,
            beneficiary_count: 5,
            papers_per_beneficiary: 4,
            beneficiary_concentration: 0.5,
            camouflage_authors: 2,
            seed: 42,
        }
    }
}

impl FarmConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |m: &str| Err(SynthError::Config(m.to_owned()));
        if self.background_papers == 0 {
            return fail("background_papers must be positive");
        }
        if !(self.background_refs_mean.is_finite() && self.background_refs_mean > 0.0) {
            return fail("background_refs_mean must be positive");
        }
        if self.citers_per_group < 2 {
            return fail("citers_per_group must be at least 2");
        }
        if self.citers_per_group_max.is_some_and(|m| m < self.citers_per_group) {
            return fail("citers_per_group_max must not be below citers_per_group");
        }
        if self.shared_refs_per_group == 0 {
            return fail("shared_refs_per_group must be positive");
        }
        if self.beneficiary_count == 0 || self.papers_per_beneficiary == 0 {
            return fail("beneficiary_count and papers_per_beneficiary must be positive");
        }
        if !(self.beneficiary_concentration > 0.0 && self.beneficiary_concentration <= 1.0) {
            return fail("beneficiary_concentration must lie in (0, 1]");
        }
        let pool = self.beneficiary_count * self.papers_per_beneficiary;
        if pool > self.background_papers {
            return Err(SynthError::NotEnoughPapers {
                needed: pool,
                available: self.background_papers,
            });
        }
        let per_list = self.beneficiary_refs_per_list();
        if per_list > pool {
            return Err(SynthError::NotEnoughPapers {
                needed: per_list,
                available: pool,
            });
        }
        let camouflage = self.shared_refs_per_group - per_list;
        if camouflage > self.background_papers - pool {
            return Err(SynthError::Config(format!(
                "{camouflage} camouflage references per list but only {} non-beneficiary papers",
                self.background_papers - pool
            )));
        }
        Ok(())
    }

    /// Beneficiary references in each shared list (at least one).
    pub fn beneficiary_refs_per_list(&self) -> usize {
        let n = (self.beneficiary_concentration * self.shared_refs_per_group as f64).round() as usize;
        n.clamp(1, self.shared_refs_per_group)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectedGroup {
    pub citers: BTreeSet<PaperId>,
    pub cited: BTreeSet<PaperId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub injected_groups: Vec<InjectedGroup>,
    #[serde(rename = "beneficiaries")]
    pub beneficiary_ids: BTreeSet<AuthorId>,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ground truth serializes") + "\n"
    }
}

fn paper_id(s: String) -> PaperId {
    PaperId::new(s).expect("generated ids are non-empty")
}

fn profile(s: String) -> AuthorId {
    AuthorId::from_profile(s).expect("generated ids are non-empty")
}

fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

pub fn generate(config: &FarmConfig) -> Result<(Corpus, GroundTruth), SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.background_papers;

    let author_pool: Vec<AuthorId> = (0..(n / 2).max(1))
        .map(|i| profile(format!("bg-author-{i:05}")))
        .collect();
    let background_ids: Vec<PaperId> = (0..n).map(|i| paper_id(format!("bg-{i:05}"))).collect();
    let start = day(2000, 1, 1);
    let span = (day(2021, 12, 31) - start).num_days() as u64;

    let mut papers: Vec<PaperRecord> = Vec::with_capacity(n);
    let mut in_degree = vec![0u64; n];
    let window = (n as f64 / 10.0).max(10.0);
    let lo = (config.background_refs_mean / 2.0).ceil().max(1.0) as usize;
    let hi = (config.background_refs_mean * 1.5).floor().max(lo as f64) as usize;

    for i in 0..n {
        let mut paper = PaperRecord::new(background_ids[i].clone());
        paper.title = Some(format!("Background paper {i}"));
        paper.publication_date = start.checked_add_days(Days::new(span * i as u64 / n as u64));
        let author_count = rng.gen_range(1..=3);
        while paper.authors.len() < author_count.min(author_pool.len()) {
            let a = author_pool[rng.gen_range(0..author_pool.len())].clone();
            if !paper.authors.contains(&a) {
                paper.authors.push(a);
            }
        }
        // The first 2·hi papers are roots whose references lie outside the
        // corpus; later papers cite at most half of the earlier literature.
        let k = if i < 2 * hi { 0 } else { rng.gen_range(lo..=hi).min(i / 2) };
        if k > 0 {
            let weights: Vec<f64> = (0..i)
                .map(|j| (in_degree[j] + 1) as f64 / (1.0 + (i - j) as f64 / window))
                .collect();
            for j in weighted_sample_distinct(&mut rng, &weights, k) {
                paper.references.insert(background_ids[j].clone());
                in_degree[j] += 1;
            }
        }
        papers.push(paper);
    }

    // Beneficiaries join the author lists of randomly chosen background papers.
    let beneficiaries: Vec<AuthorId> = (0..config.beneficiary_count)
        .map(|i| profile(format!("beneficiary-{i:03}")))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let pool_size = config.beneficiary_count * config.papers_per_beneficiary;
    let beneficiary_pool: Vec<usize> = order[..pool_size].to_vec();
    for (slot, &idx) in beneficiary_pool.iter().enumerate() {
        let b = &beneficiaries[slot / config.papers_per_beneficiary];
        papers[idx].authors.push(b.clone());
    }
    let pool_set: HashSet<usize> = beneficiary_pool.iter().copied().collect();
    let camouflage_pool: Vec<usize> = (0..n).filter(|i| !pool_set.contains(i)).collect();

    let mut taken_lists: HashSet<BTreeSet<PaperId>> =
        papers.iter().map(|p| p.references.clone()).filter(|r| !r.is_empty()).collect();

    let accounts: Vec<AuthorId> = (0..FARM_ACCOUNTS).map(|i| profile(format!("sspa-{i}"))).collect();
    let per_list = config.beneficiary_refs_per_list();
    let mut truth = GroundTruth::default();
    let mut fabricated: Vec<AuthorId> = Vec::new();
    let farm_start = day(2022, 1, 1);

    for g in 0..config.group_count {
        let mut shared = None;
        for _ in 0..100 {
            let mut list: BTreeSet<PaperId> = beneficiary_pool
                .choose_multiple(&mut rng, per_list)
                .map(|&i| background_ids[i].clone())
                .collect();
            list.extend(
                camouflage_pool
                    .choose_multiple(&mut rng, config.shared_refs_per_group - per_list)
                    .map(|&i| background_ids[i].clone()),
            );
            if taken_lists.insert(list.clone()) {
                shared = Some(list);
                break;
            }
        }
        let shared = shared.ok_or(SynthError::Uniqueness { group: g })?;

        let size = match config.citers_per_group_max {
            Some(max) => rng.gen_range(config.citers_per_group..=max),
            None => config.citers_per_group,
        };
        let mut citers = BTreeSet::new();
        for c in 0..size {
            let id = paper_id(format!("farm-{g:04}-{c:02}"));
            let mut paper = PaperRecord::new(id.clone());
            paper.title = Some(format!("Farmed paper {g}-{c}"));
            paper.authors.push(accounts[rng.gen_range(0..accounts.len())].clone());
            for j in 0..config.camouflage_authors {
                let fake = AuthorId::from_name(format!("Fabricated Author {g:04} {c:02} {j:02}")).expect("non-empty");
                fabricated.push(fake.clone());
                paper.authors.push(fake);
            }
            paper.references = shared.clone();
            paper.upload_date = farm_start.checked_add_days(Days::new(rng.gen_range(0..1096)));
            citers.insert(id);
            papers.push(paper);
        }
        truth.injected_groups.push(InjectedGroup { citers, cited: shared });
    }
    truth.beneficiary_ids = beneficiaries.iter().cloned().collect();

    // Platform-reported totals: observed citations plus unobserved extras.
    let mut observed: BTreeMap<&AuthorId, u64> = BTreeMap::new();
    let mut cited_count: BTreeMap<&PaperId, u64> = BTreeMap::new();
    for p in &papers {
        for r in &p.references {
            *cited_count.entry(r).or_default() += 1;
        }
    }
    for p in &papers {
        let c = cited_count.get(&p.id).copied().unwrap_or(0);
        for a in &p.authors {
            *observed.entry(a).or_default() += c;
        }
    }
    let mut authors: Vec<AuthorRecord> = Vec::new();
    for id in author_pool.iter().chain(&beneficiaries).chain(&accounts) {
        let seen = observed.get(id).copied().unwrap_or(0);
        authors.push(AuthorRecord {
            id: id.clone(),
            display_name: None,
            has_profile: true,
            total_citations: Some(seen + rng.gen_range(0..=seen)),
        });
    }
    for id in fabricated {
        authors.push(AuthorRecord {
            display_name: Some(id.as_str().to_owned()),
            id,
            has_profile: false,
            total_citations: None,
        });
    }

    let label = format!("synthetic-farm-seed{}", config.seed);
    let corpus = Corpus::from_records(label, papers, authors);
    verify_injection(&corpus, &truth)?;
    Ok((corpus, truth))
}

/// `k` distinct indices drawn with probability proportional to `weights`.
fn weighted_sample_distinct(rng: &mut ChaCha8Rng, weights: &[f64], k: usize) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cumulative.push(acc);
    }
    let mut chosen = BTreeSet::new();
    let mut attempts = 0;
    while chosen.len() < k && attempts < 50 * k {
        let x = rng.gen::<f64>() * acc;
        let j = cumulative.partition_point(|&c| c <= x).min(weights.len() - 1);
        chosen.insert(j);
        attempts += 1;
    }
    // Heavy hubs can starve the rejection loop; top up uniformly.
    while chosen.len() < k {
        chosen.insert(rng.gen_range(0..weights.len()));
    }
    chosen.into_iter().collect()
}

fn verify_injection(corpus: &Corpus, truth: &GroundTruth) -> Result<(), SynthError> {
    let injected: HashSet<&PaperId> = truth.injected_groups.iter().flat_map(|g| g.citers.iter()).collect();
    for (g, group) in truth.injected_groups.iter().enumerate() {
        let clash = corpus
            .papers
            .values()
            .filter(|p| !injected.contains(&p.id))
            .any(|p| p.references == group.cited);
        if clash {
            return Err(SynthError::Uniqueness { group: g });
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectionScore {
    pub detected: usize,
    pub truth: usize,
    pub matched_detected: usize,
    pub matched_truth: usize,
    pub precision: f64,
    pub recall: f64,
}

/// A detected group matches an injected one when their citer sets are equal.
/// Empty denominators score 1.0.
pub fn score_detection(truth: &GroundTruth, detected: &[EqualReferencesGroup]) -> DetectionScore {
    let truth_sets: HashSet<&BTreeSet<PaperId>> = truth.injected_groups.iter().map(|g| &g.citers).collect();
    let detected_sets: HashSet<&BTreeSet<PaperId>> = detected.iter().map(|g| &g.citers).collect();
    let matched_detected = detected.iter().filter(|g| truth_sets.contains(&g.citers)).count();
    let matched_truth = truth
        .injected_groups
        .iter()
        .filter(|g| detected_sets.contains(&g.citers))
        .count();
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    DetectionScore {
        detected: detected.len(),
        truth: truth.injected_groups.len(),
        matched_detected,
        matched_truth,
        precision: ratio(matched_detected, detected.len()),
        recall: ratio(matched_truth, truth.injected_groups.len()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perturbation {
    /// Replace `k` references of each citer with other background papers.
    Substitute,
    /// Add `k` further background references to each citer.
    Append,
}

impl std::fmt::Display for Perturbation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Perturbation::Substitute => "substitute",
            Perturbation::Append => "append",
        })
    }
}

/// Applies `k` random reference edits to every injected citer. Candidate
/// replacements are captured background papers not already cited.
pub fn perturb(corpus: &Corpus, truth: &GroundTruth, k: usize, kind: Perturbation, seed: u64) -> Corpus {
    let mut out = corpus.clone();
    if k == 0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates: Vec<PaperId> = corpus
        .papers
        .values()
        .filter(|p| !p.external && p.id.as_str().starts_with("bg-"))
        .map(|p| p.id.clone())
        .collect();
    for group in &truth.injected_groups {
        for citer in &group.citers {
            let paper = out.papers.get_mut(citer).expect("injected citer exists");
            if kind == Perturbation::Substitute {
                let current: Vec<PaperId> = paper.references.iter().cloned().collect();
                for r in current.choose_multiple(&mut rng, k.min(current.len())) {
                    paper.references.remove(r);
                }
            }
            let mut added = 0;
            while added < k {
                let c = &candidates[rng.gen_range(0..candidates.len())];
                if c != citer && !group.cited.contains(c) && paper.references.insert(c.clone()) {
                    added += 1;
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationRow {
    pub k: usize,
    pub perturbation: Perturbation,
    pub mode: String,
    pub tau: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Sweeps the perturbation size and scores exact mode and near-duplicate
/// mode at every τ in `taus`.
pub fn ablation_sweep(
    config: &FarmConfig,
    ks: &[usize],
    taus: &[f64],
    kind: Perturbation,
    params: &DetectParams,
) -> Result<Vec<AblationRow>, SynthError> {
    let (corpus, truth) = generate(config)?;
    let mut rows = Vec::new();
    for &k in ks {
        let perturbed = perturb(&corpus, &truth, k, kind, config.seed.wrapping_add(k as u64));
        let graph = build_paper_graph(&perturbed);
        let exact = detect_exact_groups(&graph, params)?;
        let s = score_detection(&truth, &exact);
        rows.push(AblationRow {
            k,
            perturbation: kind,
            mode: "exact".into(),
            tau: 1.0,
            precision: s.precision,
            recall: s.recall,
        });
        for &tau in taus {
            let near = detect_near_duplicate_groups(&graph, tau, params)?;
            let s = score_detection(&truth, &near);
            rows.push(AblationRow {
                k,
                perturbation: kind,
                mode: "near-duplicate".into(),
                tau,
                precision: s.precision,
                recall: s.recall,
            });
        }
    }
    Ok(rows)
}
