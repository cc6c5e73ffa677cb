//! Detection of equal-references citation motifs.
//!
//! An equal-references group is a set of citing papers whose reference
//! lists are identical (exact mode) or pairwise Jaccard-similar above a
//! threshold (near-duplicate mode). The pipeline ingests a corpus, builds the
//! citation graph, finds groups, attributes motif citations to the authors of
//! cited papers, and writes a reproducible report bundle.
//!
//! ```
//! use citefarm::graph::build_paper_graph;
//! use citefarm::ingest::parse_edge_list;
//! use citefarm::motif::{detect_exact_groups, DetectParams};
//!
//! let corpus = parse_edge_list("1 10\n1 11\n2 10\n2 11\n3 10\n".as_bytes(), "toy").unwrap();
//! let graph = build_paper_graph(&corpus);
//! let groups = detect_exact_groups(&graph, &DetectParams::default()).unwrap();
//! assert_eq!(groups.len(), 1);
//! assert_eq!(groups[0].citers.len(), 2);
//! ```

pub mod cli;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod motif;
pub mod report;
pub mod synth;
