//! Exact equal-references groups on a hand-built corpus.

use citefarm::graph::build_paper_graph;
use citefarm::ingest::parse_edge_list;
use citefarm::motif::{detect_exact_groups, DetectParams};

// Papers 1-3 share {10, 11, 12}; 4 and 5 share {10, 11}; 6 is unique.
const EDGES: &str = "1 10\n1 11\n1 12\n2 10\n2 11\n2 12\n3 10\n3 11\n3 12\n4 10\n4 11\n5 10\n5 11\n6 12\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = parse_edge_list(EDGES.as_bytes(), "toy")?;
    let graph = build_paper_graph(&corpus);
    for min_refs in [1, 3] {
        let params = DetectParams { min_refs, ..DetectParams::default() };
        println!("min_refs = {min_refs}");
        for g in detect_exact_groups(&graph, &params)? {
            let citers: Vec<&str> = g.citers.iter().map(|p| p.as_str()).collect();
            let cited: Vec<&str> = g.cited.iter().map(|p| p.as_str()).collect();
            println!("  group {}: citers {citers:?} -> cited {cited:?}", g.group_id);
        }
    }
    Ok(())
}
