//! Near-duplicate detection: how τ trades exactness for robustness.
//!
//! Three citers share eight references, but one of them swapped a reference.
//! Exact mode finds only the untouched pair; lowering τ recovers the trio.

use citefarm::graph::build_paper_graph;
use citefarm::ingest::{Corpus, PaperId, PaperRecord};
use citefarm::motif::{build_similarity_graph, detect_exact_groups, detect_near_duplicate_groups, DetectParams};

fn paper(id: &str, refs: &[&str]) -> PaperRecord {
    let mut p = PaperRecord::new(PaperId::new(id).unwrap());
    p.references = refs.iter().map(|r| PaperId::new(r).unwrap()).collect();
    p
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shared = ["r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8"];
    let mut edited = shared;
    edited[7] = "r9";
    let corpus = Corpus::from_records(
        "near",
        vec![paper("a", &shared), paper("b", &shared), paper("c", &edited), paper("d", &["r1", "x"])],
        [],
    );
    let graph = build_paper_graph(&corpus);
    let params = DetectParams::default();

    let show = |label: String, groups: Vec<citefarm::motif::EqualReferencesGroup>| {
        let sets: Vec<Vec<&str>> = groups
            .iter()
            .map(|g| g.citers.iter().map(|p| p.as_str()).collect())
            .collect::<Vec<_>>();
        println!("{label:<12} {sets:?}");
    };
    show("exact".into(), detect_exact_groups(&graph, &params)?);
    for tau in [1.0, 0.8, 0.75] {
        let sim = build_similarity_graph(&graph, tau, params.min_refs)?;
        show(format!("tau={tau} ({} edges)", sim.edge_count()), detect_near_duplicate_groups(&graph, tau, &params)?);
    }
    Ok(())
}
