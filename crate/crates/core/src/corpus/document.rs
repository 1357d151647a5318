use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Activity, AuthorRole, Issue, TweetType};
use crate::{Error, Result};

/// One social-media message with its collection metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(serialize_with = "ser_ts", deserialize_with = "de_ts")]
    pub timestamp: DateTime<Utc>,
    pub issue: Issue,
    pub activity: Activity,
    pub author_role: AuthorRole,
    pub tweet_type: TweetType,
}

impl Document {
    /// Calendar day of the message, with UTC day boundaries.
    pub fn date(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }
}

fn ser_ts<S: Serializer>(ts: &DateTime<Utc>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ts.to_rfc3339_opts(SecondsFormat::AutoSi, true))
}

fn de_ts<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DateTime<Utc>, D::Error> {
    let raw = String::deserialize(d)?;
    parse_timestamp(&raw).map_err(serde::de::Error::custom)
}

/// ISO-8601 with an offset, or without one (read as UTC).
pub(crate) fn parse_timestamp(raw: &str) -> std::result::Result<DateTime<Utc>, String> {
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Ok(ts.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Ok(naive.and_utc());
        }
    }
    Err(format!("unparseable timestamp `{raw}`"))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Skip malformed records instead of failing; they are listed in the report.
    pub lenient: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejected {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: Vec<Rejected>,
}

impl IngestReport {
    pub fn rejected_lines(&self) -> Vec<usize> {
        self.rejected.iter().map(|r| r.line).collect()
    }
}

/// An immutable, id-indexed collection of documents in file order.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    docs: Vec<Document>,
    index: HashMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids.
    pub fn new(docs: Vec<Document>) -> Result<Self> {
        let mut index = HashMap::with_capacity(docs.len());
        for (i, d) in docs.iter().enumerate() {
            if let Some(prev) = index.insert(d.id.clone(), i) {
                return Err(Error::DuplicateId {
                    path: "<memory>".into(),
                    id: d.id.clone(),
                    first: prev + 1,
                    second: i + 1,
                });
            }
        }
        Ok(Corpus { docs, index })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.index.get(id).map(|&i| &self.docs[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.docs.iter()
    }
}

pub fn ingest_documents(path: &Path, options: IngestOptions) -> Result<(Corpus, IngestReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_documents(BufReader::new(file), path, options)
}

/// Parses JSONL documents. Blank lines are ignored; line numbers are 1-based.
pub fn parse_documents<R: BufRead>(
    reader: R,
    path: &Path,
    options: IngestOptions,
) -> Result<(Corpus, IngestReport)> {
    let mut docs = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut report = IngestReport::default();

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = match serde_json::from_str(&line) {
            Ok(d) => d,
            Err(e) => {
                let reason = e.to_string();
                if options.lenient {
                    report.rejected.push(Rejected {
                        line: lineno,
                        reason,
                    });
                    continue;
                }
                return Err(Error::Malformed {
                    path: path.into(),
                    line: lineno,
                    message: reason,
                });
            }
        };
        if let Some(&first) = seen.get(&doc.id) {
            return Err(Error::DuplicateId {
                path: path.into(),
                id: doc.id,
                first,
                second: lineno,
            });
        }
        seen.insert(doc.id.clone(), lineno);
        docs.push(doc);
    }
    report.accepted = docs.len();
    let corpus = Corpus::new(docs)?;
    Ok((corpus, report))
}

/// Writes documents as JSONL in corpus order.
pub fn write_documents<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for doc in corpus.iter() {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}
