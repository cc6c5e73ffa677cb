//! Corpus ingestion.
//!
//! Two on-disk formats are understood:
//!
//! * SNAP-style edge lists (`FromNodeId<TAB>ToNodeId`, `#` comments), which
//!   carry no authorship;
//! * a JSON Lines metadata export with one `paper` or `author` object per line.
//!
//! Both produce a [`Corpus`] whose reference sets are canonical: deduplicated,
//! without self-references, and with every referenced-but-unknown paper kept
//! as an external stub.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: invalid JSON: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: missing \"id\"")]
    MissingId { line: usize },
    #[error("line {line}: paper {id} appears twice with conflicting reference sets")]
    ConflictingPaper { line: usize, id: String },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("identifier must be non-empty")]
    EmptyId,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Paper identity: profile-link slug, DOI, or dataset node id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaperId(String);

impl PaperId {
    pub fn new(raw: impl AsRef<str>) -> Result<Self, IngestError> {
        let trimmed = raw.as_ref().trim();
        if trimmed.is_empty() {
            return Err(IngestError::EmptyId);
        }
        Ok(Self(trimmed.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PaperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Author identity. Either a profile-link slug (kept verbatim) or a
/// normalized display-name key.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AuthorId(String);

impl AuthorId {
    /// A profile-link slug. Only surrounding whitespace is removed.
    pub fn from_profile(raw: impl AsRef<str>) -> Result<Self, IngestError> {
        let trimmed = raw.as_ref().trim();
        if trimmed.is_empty() {
            return Err(IngestError::EmptyId);
        }
        Ok(Self(trimmed.to_owned()))
    }

    /// A display-name key: lowercase, internal whitespace collapsed.
    pub fn from_name(raw: impl AsRef<str>) -> Result<Self, IngestError> {
        let key = normalize_name(raw.as_ref());
        if key.is_empty() {
            return Err(IngestError::EmptyId);
        }
        Ok(Self(key))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AuthorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn normalize_name(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Six-hex-character pseudonym: the leading bytes of SHA-256 over the UTF-8
/// author id.
pub fn anonymize_author(id: &AuthorId) -> String {
    let digest = Sha256::digest(id.as_str().as_bytes());
    let mut out = hex::encode(&digest[..3]);
    out.truncate(6);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaperRecord {
    pub id: PaperId,
    pub title: Option<String>,
    pub authors: Vec<AuthorId>,
    pub references: BTreeSet<PaperId>,
    pub upload_date: Option<NaiveDate>,
    pub publication_date: Option<NaiveDate>,
    pub venue: Option<String>,
    /// Known only as a reference target; no metadata was captured.
    pub external: bool,
}

impl PaperRecord {
    pub fn new(id: PaperId) -> Self {
        Self {
            id,
            title: None,
            authors: Vec::new(),
            references: BTreeSet::new(),
            upload_date: None,
            publication_date: None,
            venue: None,
            external: false,
        }
    }

    fn stub(id: PaperId) -> Self {
        Self {
            external: true,
            ..Self::new(id)
        }
    }

    /// Publication date, falling back to the upload date.
    pub fn effective_date(&self) -> Option<NaiveDate> {
        self.publication_date.or(self.upload_date)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthorRecord {
    pub id: AuthorId,
    pub display_name: Option<String>,
    pub has_profile: bool,
    pub total_citations: Option<u64>,
}

impl AuthorRecord {
    fn stub(id: AuthorId) -> Self {
        Self {
            id,
            display_name: None,
            has_profile: false,
            total_citations: None,
        }
    }
}

/// Counters collected while parsing. Not part of corpus equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestDiagnostics {
    pub self_loops_dropped: u64,
    pub duplicate_references_collapsed: u64,
    pub unparseable_dates: u64,
    /// `Nodes:` / `Edges:` values from a SNAP header comment, when present.
    pub declared_nodes: Option<u64>,
    pub declared_edges: Option<u64>,
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub label: String,
    pub papers: BTreeMap<PaperId, PaperRecord>,
    pub authors: BTreeMap<AuthorId, AuthorRecord>,
    pub diagnostics: IngestDiagnostics,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.papers == other.papers && self.authors == other.authors
    }
}

impl Eq for Corpus {}

impl Corpus {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Self::default()
        }
    }

    /// Builds a corpus from records, canonicalizing references and
    /// synthesizing stubs for unknown papers and authors.
    pub fn from_records(
        label: impl Into<String>,
        papers: impl IntoIterator<Item = PaperRecord>,
        authors: impl IntoIterator<Item = AuthorRecord>,
    ) -> Self {
        let mut corpus = Self::new(label);
        for author in authors {
            corpus.authors.insert(author.id.clone(), author);
        }
        for mut paper in papers {
            if paper.references.remove(&paper.id) {
                corpus.diagnostics.self_loops_dropped += 1;
            }
            corpus.papers.insert(paper.id.clone(), paper);
        }
        corpus.close_over_references();
        corpus
    }

    fn close_over_references(&mut self) {
        let mut missing_papers = BTreeSet::new();
        let mut missing_authors = BTreeSet::new();
        for paper in self.papers.values() {
            for r in &paper.references {
                if !self.papers.contains_key(r) {
                    missing_papers.insert(r.clone());
                }
            }
            for a in &paper.authors {
                if !self.authors.contains_key(a) {
                    missing_authors.insert(a.clone());
                }
            }
        }
        for id in missing_papers {
            self.papers.insert(id.clone(), PaperRecord::stub(id));
        }
        for id in missing_authors {
            self.authors.insert(id.clone(), AuthorRecord::stub(id));
        }
    }

    pub fn paper(&self, id: &PaperId) -> Option<&PaperRecord> {
        self.papers.get(id)
    }

    pub fn references(&self, id: &PaperId) -> Option<&BTreeSet<PaperId>> {
        self.papers.get(id).map(|p| &p.references)
    }

    /// Papers with captured metadata, i.e. excluding external stubs.
    pub fn captured_paper_count(&self) -> usize {
        self.papers.values().filter(|p| !p.external).count()
    }

    pub fn external_paper_count(&self) -> usize {
        self.papers.len() - self.captured_paper_count()
    }

    pub fn edge_count(&self) -> usize {
        self.papers.values().map(|p| p.references.len()).sum()
    }

    pub fn has_authorship(&self) -> bool {
        self.papers.values().any(|p| !p.authors.is_empty())
    }

    /// Authors resolved by display name rather than by profile link.
    pub fn name_keyed_author_count(&self) -> usize {
        self.authors.values().filter(|a| !a.has_profile).count()
    }

    /// Distinct papers cited by at least one captured paper.
    pub fn cited_paper_count(&self) -> usize {
        self.papers
            .values()
            .flat_map(|p| p.references.iter())
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Writes the metadata JSON Lines form: authors first, then captured
    /// papers, both in id order. External stubs are implied by references.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for author in self.authors.values() {
            let line = AuthorLine {
                id: Some(author.id.as_str().to_owned()),
                display_name: author.display_name.clone(),
                has_profile: author.has_profile,
                total_citations: author.total_citations,
            };
            write_line(&mut out, &Line::Author(line))?;
        }
        for paper in self.papers.values().filter(|p| !p.external) {
            let line = PaperLine {
                id: Some(paper.id.as_str().to_owned()),
                title: paper.title.clone(),
                authors: paper.authors.iter().map(|a| a.as_str().to_owned()).collect(),
                references: paper
                    .references
                    .iter()
                    .map(|r| r.as_str().to_owned())
                    .collect(),
                upload_date: paper.upload_date.map(|d| d.to_string()),
                publication_date: paper.publication_date.map(|d| d.to_string()),
                venue: paper.venue.clone(),
            };
            write_line(&mut out, &Line::Paper(line))?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

fn write_line<W: Write>(out: &mut W, line: &Line) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, line)?;
    out.write_all(b"\n")
}

/// Parses a SNAP edge list. Every node id becomes a captured paper; there is
/// no authorship.
pub fn parse_edge_list<R: Read>(input: R, label: &str) -> Result<Corpus, IngestError> {
    let reader = BufReader::new(input);
    let mut corpus = Corpus::new(label);
    let mut data_lines = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            read_snap_header(comment, &mut corpus.diagnostics);
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (from, to) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(IngestError::Malformed {
                    line: line_no,
                    message: format!("expected two node ids, got {trimmed:?}"),
                })
            }
        };
        let from = parse_node_id(from, line_no)?;
        let to = parse_node_id(to, line_no)?;
        data_lines += 1;

        if !corpus.papers.contains_key(&to) {
            corpus.papers.insert(to.clone(), PaperRecord::new(to.clone()));
        }
        let citer = corpus
            .papers
            .entry(from.clone())
            .or_insert_with(|| PaperRecord::new(from.clone()));
        if from == to {
            corpus.diagnostics.self_loops_dropped += 1;
            log::warn!("line {line_no}: self-citation {from} dropped");
            continue;
        }
        if !citer.references.insert(to) {
            corpus.diagnostics.duplicate_references_collapsed += 1;
        }
    }

    if data_lines == 0 {
        return Err(IngestError::EmptyCorpus);
    }
    Ok(corpus)
}

fn parse_node_id(token: &str, line: usize) -> Result<PaperId, IngestError> {
    token
        .parse::<u64>()
        .map_err(|_| IngestError::Malformed {
            line,
            message: format!("node id {token:?} is not a non-negative integer"),
        })
        .map(|n| PaperId(n.to_string()))
}

// "# Nodes: 34546 Edges: 421578"
fn read_snap_header(comment: &str, diagnostics: &mut IngestDiagnostics) {
    let tokens: Vec<&str> = comment.split_whitespace().collect();
    for pair in tokens.windows(2) {
        let value = pair[1].parse::<u64>().ok();
        match pair[0] {
            "Nodes:" => diagnostics.declared_nodes = value.or(diagnostics.declared_nodes),
            "Edges:" => diagnostics.declared_edges = value.or(diagnostics.declared_edges),
            _ => {}
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line {
    Paper(PaperLine),
    Author(AuthorLine),
}

#[derive(Debug, Serialize, Deserialize)]
struct PaperLine {
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    #[serde(default)]
    authors: Vec<String>,
    #[serde(default)]
    references: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upload_date: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    publication_date: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    venue: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AuthorLine {
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    display_name: Option<String>,
    #[serde(default)]
    has_profile: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    total_citations: Option<u64>,
}

/// Parses the JSON Lines metadata export.
///
/// Author strings inside paper objects resolve to a declared profile id when
/// one matches exactly; otherwise they are treated as display names and
/// keyed by their normalized form. Declared authors without a profile are
/// keyed the same way.
pub fn parse_metadata_corpus<R: Read>(input: R, label: &str) -> Result<Corpus, IngestError> {
    let reader = BufReader::new(input);
    let mut papers: Vec<(usize, PaperLine)> = Vec::new();
    let mut authors = BTreeMap::new();
    let mut diagnostics = IngestDiagnostics::default();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|source| IngestError::Json {
            line: line_no,
            source,
        })?;
        match parsed {
            Line::Paper(p) => {
                if p.id.as_deref().is_none_or(|s| s.trim().is_empty()) {
                    return Err(IngestError::MissingId { line: line_no });
                }
                papers.push((line_no, p));
            }
            Line::Author(a) => {
                let raw = match a.id.as_deref() {
                    Some(s) if !s.trim().is_empty() => s,
                    _ => return Err(IngestError::MissingId { line: line_no }),
                };
                let id = if a.has_profile {
                    AuthorId::from_profile(raw)?
                } else {
                    AuthorId::from_name(raw)?
                };
                let record = AuthorRecord {
                    id: id.clone(),
                    display_name: a.display_name,
                    has_profile: a.has_profile,
                    total_citations: a.total_citations,
                };
                // Later declarations of the same author refine earlier ones.
                authors.insert(id, record);
            }
        }
    }

    let mut records: BTreeMap<PaperId, PaperRecord> = BTreeMap::new();
    for (line_no, p) in papers {
        let id = PaperId::new(p.id.as_deref().unwrap_or_default())?;
        let mut references = BTreeSet::new();
        for raw in &p.references {
            let r = match PaperId::new(raw) {
                Ok(r) => r,
                Err(_) => continue,
            };
            if r == id {
                diagnostics.self_loops_dropped += 1;
            } else if !references.insert(r) {
                diagnostics.duplicate_references_collapsed += 1;
            }
        }
        let mut paper_authors = Vec::with_capacity(p.authors.len());
        for raw in &p.authors {
            let resolved = resolve_author(raw, &authors);
            if let Some(a) = resolved {
                if !paper_authors.contains(&a) {
                    paper_authors.push(a);
                }
            }
        }
        let record = PaperRecord {
            id: id.clone(),
            title: p.title,
            authors: paper_authors,
            references,
            upload_date: parse_date(p.upload_date.as_deref(), &mut diagnostics),
            publication_date: parse_date(p.publication_date.as_deref(), &mut diagnostics),
            venue: p.venue,
            external: false,
        };
        match records.get(&id) {
            Some(existing) if existing.references != record.references => {
                return Err(IngestError::ConflictingPaper {
                    line: line_no,
                    id: id.as_str().to_owned(),
                })
            }
            _ => {
                records.insert(id, record);
            }
        }
    }

    if records.is_empty() && authors.is_empty() {
        return Err(IngestError::EmptyCorpus);
    }

    let mut corpus = Corpus {
        label: label.to_owned(),
        papers: records,
        authors,
        diagnostics,
    };
    corpus.close_over_references();
    Ok(corpus)
}

fn resolve_author(raw: &str, declared: &BTreeMap<AuthorId, AuthorRecord>) -> Option<AuthorId> {
    let exact = AuthorId::from_profile(raw).ok()?;
    if declared.get(&exact).is_some_and(|a| a.has_profile) {
        return Some(exact);
    }
    AuthorId::from_name(raw).ok()
}

fn parse_date(raw: Option<&str>, diagnostics: &mut IngestDiagnostics) -> Option<NaiveDate> {
    let raw = raw?.trim();
    if raw.is_empty() {
        return None;
    }
    match NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        Ok(d) => Some(d),
        Err(_) => {
            diagnostics.unparseable_dates += 1;
            None
        }
    }
}
