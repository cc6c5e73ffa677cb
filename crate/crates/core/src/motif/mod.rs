//! Equal-references group detection.
//!
//! Exact mode partitions papers by [`ReferenceFingerprint`]: equality of
//! reference sets is transitive, so its maximal cliques are simply the
//! equivalence classes. Near-duplicate mode builds a Jaccard
//! [`SimilarityGraph`] at threshold τ and enumerates its maximal cliques.
//! At τ = 1 both modes yield the same groups.

pub mod clique;
mod fingerprint;
mod similarity;

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::CitationGraph;
use crate::ingest::{AuthorId, Corpus, PaperId};

pub use fingerprint::{fingerprint, ReferenceFingerprint};
pub use similarity::SimilarityGraph;

pub const DEFAULT_MIN_CITERS: usize = 2;
pub const DEFAULT_MIN_REFS: usize = 1;
pub const DEFAULT_CLIQUE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum MotifError {
    #[error("min_citers must be at least 2, got {0}")]
    MinCiters(usize),
    #[error("min_refs must be at least 1, got {0}")]
    MinRefs(usize),
    #[error("tau must lie in (0, 1], got {0}")]
    Tau(f64),
    #[error("clique enumeration exceeded the safety cap of {cap} cliques")]
    CliqueCap { cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionMode {
    Exact,
    NearDuplicate,
}

impl fmt::Display for DetectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectionMode::Exact => "exact",
            DetectionMode::NearDuplicate => "near-duplicate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectParams {
    pub min_citers: usize,
    pub min_refs: usize,
    /// Upper bound on enumerated cliques in near-duplicate mode.
    pub clique_cap: usize,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self {
            min_citers: DEFAULT_MIN_CITERS,
            min_refs: DEFAULT_MIN_REFS,
            clique_cap: DEFAULT_CLIQUE_CAP,
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<(), MotifError> {
        if self.min_citers < 2 {
            return Err(MotifError::MinCiters(self.min_citers));
        }
        if self.min_refs < 1 {
            return Err(MotifError::MinRefs(self.min_refs));
        }
        Ok(())
    }
}

pub fn validate_tau(tau: f64) -> Result<(), MotifError> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(MotifError::Tau(tau))
    }
}

/// One detected motif: citing papers and the papers they cite.
#[derive(Clone, Debug, PartialEq)]
pub struct EqualReferencesGroup {
    /// 1-based position in canonical order.
    pub group_id: usize,
    pub mode: DetectionMode,
    pub tau: f64,
    pub citers: BTreeSet<PaperId>,
    /// Union of the citers' reference sets (identical to each of them in
    /// exact mode).
    pub cited: BTreeSet<PaperId>,
    /// Intersection of the citers' reference sets.
    pub shared: BTreeSet<PaperId>,
    pub citer_authors: BTreeSet<AuthorId>,
    pub cited_authors: BTreeSet<AuthorId>,
}

impl EqualReferencesGroup {
    /// Number of distinct papers in the motif, citers and cited together.
    pub fn node_count(&self) -> usize {
        self.citers.union(&self.cited).count()
    }

    /// A paper acting as citer and cited within one group. Possible only in
    /// near-duplicate mode.
    pub fn roles_overlap(&self) -> bool {
        !self.citers.is_disjoint(&self.cited)
    }

    /// Everything except mode, τ and the group id.
    pub fn same_motif(&self, other: &Self) -> bool {
        self.citers == other.citers
            && self.cited == other.cited
            && self.shared == other.shared
            && self.citer_authors == other.citer_authors
            && self.cited_authors == other.cited_authors
    }

    fn new(mode: DetectionMode, tau: f64, citers: BTreeSet<PaperId>, graph: &CitationGraph) -> Self {
        let mut cited = BTreeSet::new();
        let mut shared: Option<BTreeSet<PaperId>> = None;
        for c in &citers {
            let refs = graph.references(c);
            cited.extend(refs.iter().cloned());
            shared = Some(match shared {
                None => refs.clone(),
                Some(s) => s.intersection(refs).cloned().collect(),
            });
        }
        Self {
            group_id: 0,
            mode,
            tau,
            citers,
            cited,
            shared: shared.unwrap_or_default(),
            citer_authors: BTreeSet::new(),
            cited_authors: BTreeSet::new(),
        }
    }
}

/// Sorts by descending citer count, then by the citer list itself, and
/// assigns group ids 1..=n.
pub fn canonicalize(groups: &mut [EqualReferencesGroup]) {
    groups.sort_by(|a, b| {
        (Reverse(a.citers.len()), &a.citers, &a.cited)
            .cmp(&(Reverse(b.citers.len()), &b.citers, &b.cited))
    });
    for (i, g) in groups.iter_mut().enumerate() {
        g.group_id = i + 1;
    }
}

/// A reference set and the papers citing exactly it.
type RefClass<'a> = (&'a BTreeSet<PaperId>, Vec<PaperId>);

/// Groups papers whose reference sets are identical. Papers with fewer than
/// `min_refs` references (or none) never participate.
pub fn detect_exact_groups(
    graph: &CitationGraph,
    params: &DetectParams,
) -> Result<Vec<EqualReferencesGroup>, MotifError> {
    params.validate()?;
    // Fingerprint → classes; a class is verified against its representative
    // set so a digest collision cannot merge distinct sets.
    let mut classes: HashMap<ReferenceFingerprint, Vec<RefClass<'_>>> = HashMap::new();
    for (paper, refs) in &graph.out_edges {
        if refs.is_empty() || refs.len() < params.min_refs {
            continue;
        }
        let bucket = classes.entry(fingerprint(refs)).or_default();
        match bucket.iter_mut().find(|(repr, _)| *repr == refs) {
            Some((_, members)) => members.push(paper.clone()),
            None => bucket.push((refs, vec![paper.clone()])),
        }
    }
    let mut groups: Vec<EqualReferencesGroup> = classes
        .into_values()
        .flatten()
        .filter(|(_, members)| members.len() >= params.min_citers)
        .map(|(_, members)| {
            EqualReferencesGroup::new(DetectionMode::Exact, 1.0, members.into_iter().collect(), graph)
        })
        .collect();
    canonicalize(&mut groups);
    Ok(groups)
}

pub fn build_similarity_graph(
    graph: &CitationGraph,
    tau: f64,
    min_refs: usize,
) -> Result<SimilarityGraph, MotifError> {
    validate_tau(tau)?;
    Ok(similarity::build(graph, tau, min_refs.max(1)))
}

/// Maximal cliques of the τ-similarity graph with at least `min_citers`
/// members. `cited` is the union of member reference sets and `shared` the
/// intersection.
pub fn detect_near_duplicate_groups(
    graph: &CitationGraph,
    tau: f64,
    params: &DetectParams,
) -> Result<Vec<EqualReferencesGroup>, MotifError> {
    params.validate()?;
    let similarity = build_similarity_graph(graph, tau, params.min_refs)?;
    let cliques =
        clique::maximal_cliques_capped(&similarity.adjacency, params.min_citers, params.clique_cap)
            .map_err(|e| MotifError::CliqueCap { cap: e.cap })?;
    let mut groups: Vec<EqualReferencesGroup> = cliques
        .into_iter()
        .map(|members| {
            let citers = members.iter().map(|&i| similarity.nodes[i].clone()).collect();
            EqualReferencesGroup::new(DetectionMode::NearDuplicate, tau, citers, graph)
        })
        .collect();
    canonicalize(&mut groups);
    Ok(groups)
}

/// Fills `citer_authors` and `cited_authors` from corpus authorship.
pub fn annotate_authors(groups: &mut [EqualReferencesGroup], corpus: &Corpus) {
    let authors_of = |ids: &BTreeSet<PaperId>| -> BTreeSet<AuthorId> {
        ids.iter()
            .filter_map(|id| corpus.paper(id))
            .flat_map(|p| p.authors.iter().cloned())
            .collect()
    };
    for g in groups.iter_mut() {
        g.citer_authors = authors_of(&g.citers);
        g.cited_authors = authors_of(&g.cited);
    }
}

/// The strict reading of a group: its citers must span at least two
/// distinct author lists. Surviving groups are renumbered.
pub fn retain_distinct_author_groups(
    mut groups: Vec<EqualReferencesGroup>,
    corpus: &Corpus,
) -> Vec<EqualReferencesGroup> {
    groups.retain(|g| {
        let author_sets: BTreeSet<BTreeSet<&AuthorId>> = g
            .citers
            .iter()
            .map(|c| {
                corpus
                    .paper(c)
                    .map(|p| p.authors.iter().collect())
                    .unwrap_or_default()
            })
            .collect();
        author_sets.len() >= 2
    });
    canonicalize(&mut groups);
    groups
}

/// Checks exact-mode soundness: every citer's out-edges equal the group's
/// cited set, and citer sets are pairwise disjoint. Returns a description of
/// the first violation.
pub fn check_exact_invariants(
    graph: &CitationGraph,
    groups: &[EqualReferencesGroup],
) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    for g in groups.iter().filter(|g| g.mode == DetectionMode::Exact) {
        if g.citers.len() < 2 || g.cited.is_empty() {
            return Err(format!("group {} is degenerate", g.group_id));
        }
        for c in &g.citers {
            if graph.references(c) != &g.cited {
                return Err(format!("group {}: citer {c} has a different reference set", g.group_id));
            }
            if !seen.insert(c) {
                return Err(format!("citer {c} appears in more than one exact group"));
            }
        }
    }
    Ok(())
}
