//! Paper-level citation graph and its author-level projection.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ingest::{AuthorId, Corpus, PaperId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("author projection unavailable: corpus {0:?} carries no authorship")]
    NoAuthorship(String),
}

/// Directed citer → cited graph. `in_edges` is the exact transpose of
/// `out_edges`; every node has an entry in both maps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CitationGraph {
    pub nodes: BTreeSet<PaperId>,
    pub out_edges: BTreeMap<PaperId, BTreeSet<PaperId>>,
    pub in_edges: BTreeMap<PaperId, BTreeSet<PaperId>>,
}

impl CitationGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.values().map(BTreeSet::len).sum()
    }

    pub fn references(&self, id: &PaperId) -> &BTreeSet<PaperId> {
        static EMPTY: BTreeSet<PaperId> = BTreeSet::new();
        self.out_edges.get(id).unwrap_or(&EMPTY)
    }

    pub fn citers(&self, id: &PaperId) -> &BTreeSet<PaperId> {
        static EMPTY: BTreeSet<PaperId> = BTreeSet::new();
        self.in_edges.get(id).unwrap_or(&EMPTY)
    }

    pub fn contains_edge(&self, from: &PaperId, to: &PaperId) -> bool {
        self.references(from).contains(to)
    }
}

pub fn build_paper_graph(corpus: &Corpus) -> CitationGraph {
    let mut graph = CitationGraph::default();
    for id in corpus.papers.keys() {
        graph.nodes.insert(id.clone());
        graph.out_edges.insert(id.clone(), BTreeSet::new());
        graph.in_edges.insert(id.clone(), BTreeSet::new());
    }
    for paper in corpus.papers.values() {
        for cited in &paper.references {
            // References always resolve: ingest synthesizes stubs.
            graph
                .out_edges
                .get_mut(&paper.id)
                .expect("citer is a node")
                .insert(cited.clone());
            graph
                .in_edges
                .entry(cited.clone())
                .or_default()
                .insert(paper.id.clone());
            graph.nodes.insert(cited.clone());
            graph.out_edges.entry(cited.clone()).or_default();
        }
    }
    graph
}

/// Weighted author → author citation graph. A weight counts the distinct
/// (citing paper, cited paper) pairs connecting the two authors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuthorGraph {
    pub nodes: BTreeSet<AuthorId>,
    pub weighted_edges: BTreeMap<(AuthorId, AuthorId), u64>,
}

impl AuthorGraph {
    pub fn total_weight(&self) -> u64 {
        self.weighted_edges.values().sum()
    }

    pub fn weight(&self, from: &AuthorId, to: &AuthorId) -> u64 {
        self.weighted_edges
            .get(&(from.clone(), to.clone()))
            .copied()
            .unwrap_or(0)
    }

    /// Edges whose endpoints are the same author.
    pub fn self_citation_edges(&self) -> impl Iterator<Item = (&AuthorId, u64)> + '_ {
        self.weighted_edges
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|((a, _), w)| (a, *w))
    }
}

pub fn build_author_graph(
    corpus: &Corpus,
    paper_graph: &CitationGraph,
) -> Result<AuthorGraph, GraphError> {
    if !corpus.has_authorship() {
        return Err(GraphError::NoAuthorship(corpus.label.clone()));
    }
    let mut graph = AuthorGraph {
        nodes: corpus.authors.keys().cloned().collect(),
        weighted_edges: BTreeMap::new(),
    };
    let authors_of = |id: &PaperId| -> BTreeSet<&AuthorId> {
        corpus
            .paper(id)
            .map(|p| p.authors.iter().collect())
            .unwrap_or_default()
    };
    for (citer, cited_set) in &paper_graph.out_edges {
        let citing_authors = authors_of(citer);
        if citing_authors.is_empty() {
            continue;
        }
        for cited in cited_set {
            for cited_author in authors_of(cited) {
                for citing_author in &citing_authors {
                    *graph
                        .weighted_edges
                        .entry(((*citing_author).clone(), cited_author.clone()))
                        .or_insert(0) += 1;
                }
            }
        }
    }
    Ok(graph)
}
