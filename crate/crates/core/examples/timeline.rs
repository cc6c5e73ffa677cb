//! Quarterly timeline of papers uploaded by one account, with mean author count.

use citefarm::ingest::AuthorId;
use citefarm::metrics::timeline_histogram;
use citefarm::synth::{generate, FarmConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (corpus, _) = generate(&FarmConfig { group_count: 40, ..FarmConfig::default() })?;
    let account = AuthorId::from_profile("sspa-0")?;
    let timeline = timeline_histogram(&corpus, |p| p.authors.contains(&account));
    println!("quarter     papers  mean authors");
    for b in &timeline.buckets {
        let mean = b.mean_author_count.map_or("-".to_owned(), |m| format!("{m:.2}"));
        println!("{}  {:<7} {mean}", b.quarter_start, b.publication_count);
    }
    println!("undated: {}, before 2000: {}", timeline.undated_excluded, timeline.pre_2000_excluded);
    Ok(())
}
