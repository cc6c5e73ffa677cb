//! Parse a SNAP-style edge list and print ingest diagnostics.
//!
//! `cargo run --example parse_edge_list [-- path/to/cit-HepPh.txt]`

use citefarm::graph::build_paper_graph;
use citefarm::ingest::parse_edge_list;

const SAMPLE: &str = "\
# Directed graph (each unordered pair of nodes is saved once): Cit-HepPh.txt
# Nodes: 4 Edges: 7
# FromNodeId\tToNodeId
9907233\t9301253
9907233\t9504304
9907233\t9907233
9907234\t9301253
9907234\t9504304
9907234\t9504304
9504304\t9301253
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = match std::env::args().nth(1) {
        Some(path) => citefarm::cli::load_corpus(path.as_ref(), None)?.0,
        None => parse_edge_list(SAMPLE.as_bytes(), "sample")?,
    };
    let graph = build_paper_graph(&corpus);
    let d = &corpus.diagnostics;
    println!("label:             {}", corpus.label);
    println!("papers:            {}", graph.node_count());
    println!("edges:             {}", graph.edge_count());
    println!("declared:          {:?} nodes, {:?} edges", d.declared_nodes, d.declared_edges);
    println!("self-loops:        {}", d.self_loops_dropped);
    println!("duplicate edges:   {}", d.duplicate_references_collapsed);
    let most_cited = graph
        .nodes
        .iter()
        .max_by_key(|p| (graph.citers(p).len(), std::cmp::Reverse(*p)))
        .expect("non-empty corpus");
    println!("most cited:        {} ({} citers)", most_cited, graph.citers(most_cited).len());
    Ok(())
}
