//! Who benefits: motif citations and motif share per cited author.

use citefarm::graph::build_paper_graph;
use citefarm::ingest::{AuthorId, AuthorRecord, Corpus, PaperId, PaperRecord};
use citefarm::metrics::beneficiary_stats;
use citefarm::motif::{detect_exact_groups, DetectParams};
use citefarm::report::render_beneficiaries_csv;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // (author, platform total, papers citing their work from farmed lists)
    let profile = [("ada", 27, 22), ("grace", 90, 52), ("alan", 42, 24), ("edsger", 436, 224), ("barbara", 110, 49)];
    let mut papers = Vec::new();
    let mut authors = Vec::new();
    for (name, total, farmed) in profile {
        let id = AuthorId::from_profile(name)?;
        let mut work = PaperRecord::new(PaperId::new(format!("{name}-work"))?);
        work.authors = vec![id.clone()];
        papers.push(work);
        for c in 0..farmed {
            let mut citer = PaperRecord::new(PaperId::new(format!("{name}-farm-{c}"))?);
            citer.references = [PaperId::new(format!("{name}-work"))?, PaperId::new("camouflage")?].into();
            papers.push(citer);
        }
        authors.push(AuthorRecord { id, display_name: None, has_profile: true, total_citations: Some(total) });
    }
    let corpus = Corpus::from_records("beneficiaries", papers, authors);
    let groups = detect_exact_groups(&build_paper_graph(&corpus), &DetectParams::default())?;
    let stats = beneficiary_stats(&corpus, &groups);
    print!("{}", render_beneficiaries_csv(&stats, false));
    Ok(())
}
