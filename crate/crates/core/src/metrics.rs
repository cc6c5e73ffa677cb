//! Beneficiary statistics, group-size histograms and publication timelines.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use crate::ingest::{anonymize_author, AuthorId, Corpus, PaperId, PaperRecord};
use crate::motif::EqualReferencesGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatFlag {
    /// More motif citations than the platform-reported total.
    InconsistentTotals,
    /// Identity resolved from a display name, not a profile link.
    NameKeyed,
}

impl fmt::Display for StatFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatFlag::InconsistentTotals => "inconsistent-totals",
            StatFlag::NameKeyed => "name-keyed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeneficiaryStats {
    pub author: AuthorId,
    pub pseudonym: String,
    pub distinct_cited_papers: u64,
    pub groups_as_cited: u64,
    pub motif_citations: u64,
    pub total_citations: Option<u64>,
    pub motif_share: Option<f64>,
    pub flags: BTreeSet<StatFlag>,
}

impl BeneficiaryStats {
    /// Motif share in whole percent, rounded half up.
    pub fn motif_share_percent(&self) -> Option<u64> {
        share_percent(self.motif_citations, self.total_citations?)
    }

    pub fn is_flagged(&self, flag: StatFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// `round_half_up(100 · part / total)` in exact integer arithmetic.
pub fn share_percent(part: u64, total: u64) -> Option<u64> {
    if total == 0 {
        return None;
    }
    let (part, total) = (part as u128, total as u128);
    Some(((200 * part + total) / (2 * total)) as u64)
}

/// Per-author benefit from the detected groups.
///
/// A motif citation is a distinct (citer, cited paper) pair inside some group
/// where the citer actually references the cited paper; it is credited to
/// every author of the cited paper. Authors never cited by a group are
/// omitted.
pub fn beneficiary_stats(corpus: &Corpus, groups: &[EqualReferencesGroup]) -> Vec<BeneficiaryStats> {
    let authors_of = |id: &PaperId| -> BTreeSet<&AuthorId> {
        corpus
            .paper(id)
            .map(|p| p.authors.iter().collect())
            .unwrap_or_default()
    };

    let mut pairs: BTreeSet<(&PaperId, &PaperId)> = BTreeSet::new();
    let mut groups_as_cited: BTreeMap<&AuthorId, u64> = BTreeMap::new();
    let mut cited_papers: BTreeMap<&AuthorId, BTreeSet<&PaperId>> = BTreeMap::new();

    for group in groups {
        let mut in_group: BTreeSet<&AuthorId> = BTreeSet::new();
        for cited in &group.cited {
            for author in authors_of(cited) {
                in_group.insert(author);
                cited_papers.entry(author).or_default().insert(cited);
            }
            for citer in &group.citers {
                if corpus.references(citer).is_some_and(|r| r.contains(cited)) {
                    pairs.insert((citer, cited));
                }
            }
        }
        for author in in_group {
            *groups_as_cited.entry(author).or_default() += 1;
        }
    }

    let mut motif_citations: BTreeMap<&AuthorId, u64> = BTreeMap::new();
    for (_, cited) in &pairs {
        for author in authors_of(cited) {
            *motif_citations.entry(author).or_default() += 1;
        }
    }

    let mut stats: Vec<BeneficiaryStats> = groups_as_cited
        .into_iter()
        .map(|(author, groups_as_cited)| {
            let record = corpus.authors.get(author);
            let total_citations = record.and_then(|r| r.total_citations);
            let motif = motif_citations.get(author).copied().unwrap_or(0);
            let mut flags = BTreeSet::new();
            if total_citations.is_some_and(|t| motif > t) {
                flags.insert(StatFlag::InconsistentTotals);
            }
            if !record.is_some_and(|r| r.has_profile) {
                flags.insert(StatFlag::NameKeyed);
            }
            BeneficiaryStats {
                author: author.clone(),
                pseudonym: anonymize_author(author),
                distinct_cited_papers: cited_papers.get(author).map_or(0, |s| s.len() as u64),
                groups_as_cited,
                motif_citations: motif,
                total_citations,
                motif_share: total_citations
                    .filter(|&t| t > 0)
                    .map(|t| motif as f64 / t as f64),
                flags,
            }
        })
        .collect();

    stats.sort_by(|a, b| {
        desc_option_f64(a.motif_share, b.motif_share)
            .then_with(|| desc_option(a.total_citations, b.total_citations))
            .then_with(|| a.author.cmp(&b.author))
    });
    stats
}

// Descending, with absent values last.
fn desc_option_f64(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

fn desc_option(a: Option<u64>, b: Option<u64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => y.cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Authors whose six-character pseudonyms coincide.
pub fn pseudonym_collisions(stats: &[BeneficiaryStats]) -> BTreeMap<String, Vec<AuthorId>> {
    let mut by_pseudonym: BTreeMap<String, Vec<AuthorId>> = BTreeMap::new();
    for s in stats {
        by_pseudonym.entry(s.pseudonym.clone()).or_default().push(s.author.clone());
    }
    by_pseudonym.retain(|_, ids| ids.len() > 1);
    by_pseudonym
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub distinct_cited_papers: u64,
    pub groups_as_cited: u64,
    pub pseudonym: String,
}

pub fn scatter_points(stats: &[BeneficiaryStats]) -> Vec<ScatterPoint> {
    let mut points: Vec<ScatterPoint> = stats
        .iter()
        .filter(|s| s.groups_as_cited > 0)
        .map(|s| ScatterPoint {
            distinct_cited_papers: s.distinct_cited_papers,
            groups_as_cited: s.groups_as_cited,
            pseudonym: s.pseudonym.clone(),
        })
        .collect();
    points.sort_by(|a, b| {
        (Reverse(a.groups_as_cited), &a.pseudonym, Reverse(a.distinct_cited_papers)).cmp(&(
            Reverse(b.groups_as_cited),
            &b.pseudonym,
            Reverse(b.distinct_cited_papers),
        ))
    });
    points
}

/// How a group's size is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSize {
    #[default]
    Citers,
    /// Citers and cited papers together.
    AllNodes,
}

impl GroupSize {
    pub fn of(self, group: &EqualReferencesGroup) -> usize {
        match self {
            GroupSize::Citers => group.citers.len(),
            GroupSize::AllNodes => group.node_count(),
        }
    }
}

impl fmt::Display for GroupSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupSize::Citers => "citers",
            GroupSize::AllNodes => "all-nodes",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SizeBucket {
    pub raw: u64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupSizeHistogram {
    pub dataset_label: String,
    pub size_kind: GroupSize,
    /// Captured (non-stub) papers in the corpus.
    pub paper_count: u64,
    pub buckets: BTreeMap<usize, SizeBucket>,
}

impl GroupSizeHistogram {
    pub fn normalized(&self, size: usize) -> f64 {
        self.buckets.get(&size).map_or(0.0, |b| b.normalized)
    }

    pub fn group_count(&self) -> u64 {
        self.buckets.values().map(|b| b.raw).sum()
    }
}

pub fn group_size_histogram(
    groups: &[EqualReferencesGroup],
    corpus: &Corpus,
    size_kind: GroupSize,
) -> GroupSizeHistogram {
    let paper_count = corpus.captured_paper_count() as u64;
    let mut raw: BTreeMap<usize, u64> = BTreeMap::new();
    for g in groups {
        *raw.entry(size_kind.of(g)).or_default() += 1;
    }
    let buckets = raw
        .into_iter()
        .map(|(size, n)| {
            let normalized = if paper_count == 0 { 0.0 } else { n as f64 / paper_count as f64 };
            (size, SizeBucket { raw: n, normalized })
        })
        .collect();
    GroupSizeHistogram {
        dataset_label: corpus.label.clone(),
        size_kind,
        paper_count,
        buckets,
    }
}

/// Per-size comparison of two normalized histograms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BucketRatio {
    pub group_size: usize,
    pub left: f64,
    pub right: f64,
    /// `left / right`; absent when the right side has no groups of this size.
    pub ratio: Option<f64>,
}

pub fn compare_histograms(left: &GroupSizeHistogram, right: &GroupSizeHistogram) -> Vec<BucketRatio> {
    let sizes: BTreeSet<usize> = left.buckets.keys().chain(right.buckets.keys()).copied().collect();
    sizes
        .into_iter()
        .map(|size| {
            let (l, r) = (left.normalized(size), right.normalized(size));
            BucketRatio {
                group_size: size,
                left: l,
                right: r,
                ratio: (r > 0.0).then(|| l / r),
            }
        })
        .collect()
}

pub const TIMELINE_START: NaiveDate = match NaiveDate::from_ymd_opt(2000, 1, 1) {
    Some(d) => d,
    None => panic!("valid date"),
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimelineBucket {
    pub quarter_start: NaiveDate,
    pub publication_count: u64,
    /// Over papers in the bucket that list at least one author.
    pub mean_author_count: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TimelineHistogram {
    /// Contiguous quarters from the first to the last dated publication.
    pub buckets: Vec<TimelineBucket>,
    pub undated_excluded: u64,
    pub pre_2000_excluded: u64,
}

pub fn quarter_start(date: NaiveDate) -> NaiveDate {
    let month = (date.month0() / 3) * 3 + 1;
    NaiveDate::from_ymd_opt(date.year(), month, 1).expect("first day of a quarter exists")
}

fn next_quarter(q: NaiveDate) -> NaiveDate {
    let (y, m) = if q.month() >= 10 { (q.year() + 1, 1) } else { (q.year(), q.month() + 3) };
    NaiveDate::from_ymd_opt(y, m, 1).expect("first day of a quarter exists")
}

/// Quarterly publication counts for the papers accepted by `paper_filter`,
/// dated by publication date or else upload date.
pub fn timeline_histogram<F>(corpus: &Corpus, paper_filter: F) -> TimelineHistogram
where
    F: Fn(&PaperRecord) -> bool,
{
    let mut histogram = TimelineHistogram::default();
    // quarter → (count, papers with authors, author total)
    let mut tally: BTreeMap<NaiveDate, (u64, u64, u64)> = BTreeMap::new();
    for paper in corpus.papers.values().filter(|p| !p.external && paper_filter(p)) {
        let Some(date) = paper.effective_date() else {
            histogram.undated_excluded += 1;
            continue;
        };
        if date < TIMELINE_START {
            histogram.pre_2000_excluded += 1;
            continue;
        }
        let entry = tally.entry(quarter_start(date)).or_default();
        entry.0 += 1;
        if !paper.authors.is_empty() {
            entry.1 += 1;
            entry.2 += paper.authors.len() as u64;
        }
    }
    let (Some(&first), Some(&last)) = (tally.keys().next(), tally.keys().next_back()) else {
        return histogram;
    };
    let mut q = first;
    while q <= last {
        let (count, with_authors, author_total) = tally.get(&q).copied().unwrap_or_default();
        histogram.buckets.push(TimelineBucket {
            quarter_start: q,
            publication_count: count,
            mean_author_count: (with_authors > 0).then(|| author_total as f64 / with_authors as f64),
        });
        q = next_quarter(q);
    }
    histogram
}
