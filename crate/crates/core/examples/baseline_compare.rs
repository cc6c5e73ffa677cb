//! Normalized group-size histograms: farmed corpus against organic background.

use citefarm::graph::build_paper_graph;
use citefarm::ingest::Corpus;
use citefarm::metrics::{compare_histograms, group_size_histogram, GroupSize, GroupSizeHistogram};
use citefarm::motif::{detect_exact_groups, DetectParams};
use citefarm::synth::{generate, FarmConfig};

fn histogram(corpus: &Corpus) -> GroupSizeHistogram {
    let groups = detect_exact_groups(&build_paper_graph(corpus), &DetectParams::default()).expect("valid params");
    group_size_histogram(&groups, corpus, GroupSize::Citers)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let farm_config = FarmConfig {
        background_papers: 1_500,
        group_count: 120,
        citers_per_group: 2,
        citers_per_group_max: Some(8),
        ..FarmConfig::default()
    };
    let (farm, _) = generate(&farm_config)?;
    let (organic, _) = generate(&FarmConfig { background_papers: 5_000, group_count: 0, seed: 7, ..FarmConfig::default() })?;

    let (left, right) = (histogram(&farm), histogram(&organic));
    println!("size  farm/1k papers  organic/1k papers  ratio");
    for row in compare_histograms(&left, &right) {
        let ratio = row.ratio.map_or("-".to_owned(), |r| format!("{r:.2}"));
        println!("{:<5} {:<15.3} {:<18.3} {ratio}", row.group_size, row.left * 1e3, row.right * 1e3);
    }
    Ok(())
}
