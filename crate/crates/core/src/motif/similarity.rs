use std::collections::HashMap;

use rayon::prelude::*;

use crate::graph::CitationGraph;
use crate::ingest::PaperId;

/// Undirected graph over papers whose reference sets have Jaccard
/// similarity ≥ τ. Vertices are the papers with at least `min_refs`
/// references, indexed in id order.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityGraph {
    pub tau: f64,
    pub nodes: Vec<PaperId>,
    /// Sorted neighbour lists, symmetric, no self-loops.
    pub adjacency: Vec<Vec<usize>>,
}

impl SimilarityGraph {
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (&PaperId, &PaperId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(move |(i, ns)| {
            ns.iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (&self.nodes[i], &self.nodes[j]))
        })
    }
}

/// `|a ∩ b| / |a ∪ b| ≥ tau`, with a correctly rounded division so that a
/// ratio exactly equal to a decimal τ (3/5 vs 0.6) passes.
pub(crate) fn meets_threshold(intersection: usize, len_a: usize, len_b: usize, tau: f64) -> bool {
    let union = len_a + len_b - intersection;
    union > 0 && intersection as f64 / union as f64 >= tau
}

/// Callers validate `tau ∈ (0, 1]`.
pub(crate) fn build(graph: &CitationGraph, tau: f64, min_refs: usize) -> SimilarityGraph {
    let nodes: Vec<PaperId> = graph
        .out_edges
        .iter()
        .filter(|(_, refs)| !refs.is_empty() && refs.len() >= min_refs)
        .map(|(id, _)| id.clone())
        .collect();
    let index: HashMap<&PaperId, usize> = nodes.iter().enumerate().map(|(i, p)| (p, i)).collect();

    // Only papers sharing at least one reference can reach τ > 0, so
    // candidates come from the citers of each reference.
    let upper: Vec<Vec<usize>> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let refs_i = graph.references(&nodes[i]);
            let mut shared: HashMap<usize, usize> = HashMap::new();
            for r in refs_i {
                for citer in graph.citers(r) {
                    if let Some(&j) = index.get(citer) {
                        if j > i {
                            *shared.entry(j).or_insert(0) += 1;
                        }
                    }
                }
            }
            let mut out: Vec<usize> = shared
                .into_iter()
                .filter(|&(j, n)| {
                    meets_threshold(n, refs_i.len(), graph.references(&nodes[j]).len(), tau)
                })
                .map(|(j, _)| j)
                .collect();
            out.sort_unstable();
            out
        })
        .collect();

    let mut adjacency = vec![Vec::new(); nodes.len()];
    for (i, ns) in upper.iter().enumerate() {
        for &j in ns {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    SimilarityGraph {
        tau,
        nodes,
        adjacency,
    }
}
