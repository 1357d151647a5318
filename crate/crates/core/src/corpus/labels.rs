use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Corpus, Document, Stance};
use crate::{Error, Result};

pub const LABEL_HEADER: [&str; 13] = [
    "doc_id",
    "relevant",
    "stance",
    "diagnostic",
    "prognostic",
    "motivational",
    "problem_id",
    "blame",
    "solution",
    "tactics",
    "solidarity",
    "counterframing",
    "motivational_elem",
];

/// Boolean framing columns in file order.
pub const FRAME_FIELDS: [&str; 10] = [
    "diagnostic",
    "prognostic",
    "motivational",
    "problem_id",
    "blame",
    "solution",
    "tactics",
    "solidarity",
    "counterframing",
    "motivational_elem",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    /// Human annotations: coding logic is enforced.
    Gold,
    /// Classifier output: coding logic is only checked and counted.
    Inferred,
}

/// Relevance, stance, the three core framing tasks and the seven frame
/// elements of one message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelSet {
    pub relevant: bool,
    pub stance: Option<Stance>,
    pub diagnostic: bool,
    pub prognostic: bool,
    pub motivational: bool,
    pub problem_id: bool,
    pub blame: bool,
    pub solution: bool,
    pub tactics: bool,
    pub solidarity: bool,
    pub counterframing: bool,
    pub motivational_elem: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    StanceOnIrrelevant,
    FrameOnIrrelevant(&'static str),
    MissingStance,
    /// A core task disagrees with the disjunction of its elements.
    CoreTask {
        task: &'static str,
        coded: bool,
        implied: bool,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::StanceOnIrrelevant => write!(f, "irrelevant message carries a stance"),
            Violation::FrameOnIrrelevant(field) => {
                write!(f, "irrelevant message carries frame label `{field}`")
            }
            Violation::MissingStance => write!(f, "relevant message has no stance"),
            Violation::CoreTask {
                task,
                coded,
                implied,
            } => write!(
                f,
                "`{task}` is {} but its frame elements imply {}",
                u8::from(*coded),
                u8::from(*implied)
            ),
        }
    }
}

impl LabelSet {
    pub fn flag(&self, field: &str) -> Option<bool> {
        Some(match field {
            "relevant" => self.relevant,
            "diagnostic" => self.diagnostic,
            "prognostic" => self.prognostic,
            "motivational" => self.motivational,
            "problem_id" => self.problem_id,
            "blame" => self.blame,
            "solution" => self.solution,
            "tactics" => self.tactics,
            "solidarity" => self.solidarity,
            "counterframing" => self.counterframing,
            "motivational_elem" => self.motivational_elem,
            _ => return None,
        })
    }

    pub fn set_flag(&mut self, field: &str, value: bool) -> bool {
        let slot = match field {
            "relevant" => &mut self.relevant,
            "diagnostic" => &mut self.diagnostic,
            "prognostic" => &mut self.prognostic,
            "motivational" => &mut self.motivational,
            "problem_id" => &mut self.problem_id,
            "blame" => &mut self.blame,
            "solution" => &mut self.solution,
            "tactics" => &mut self.tactics,
            "solidarity" => &mut self.solidarity,
            "counterframing" => &mut self.counterframing,
            "motivational_elem" => &mut self.motivational_elem,
            _ => return false,
        };
        *slot = value;
        true
    }

    /// Number of core framing tasks present (0 to 3).
    pub fn core_task_count(&self) -> usize {
        usize::from(self.diagnostic) + usize::from(self.prognostic) + usize::from(self.motivational)
    }

    /// Fills the core tasks from the frame elements, the way the codebook
    /// derives them.
    pub fn with_derived_tasks(mut self) -> Self {
        self.diagnostic = self.problem_id || self.blame;
        self.prognostic = self.solution || self.tactics || self.solidarity || self.counterframing;
        self.motivational = self.motivational_elem;
        self
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.relevant {
            if self.stance.is_some() {
                out.push(Violation::StanceOnIrrelevant);
            }
            for field in FRAME_FIELDS {
                if self.flag(field) == Some(true) {
                    out.push(Violation::FrameOnIrrelevant(field));
                }
            }
            return out;
        }
        if self.stance.is_none() {
            out.push(Violation::MissingStance);
        }
        let checks = [
            ("diagnostic", self.diagnostic, self.problem_id || self.blame),
            (
                "prognostic",
                self.prognostic,
                self.solution || self.tactics || self.solidarity || self.counterframing,
            ),
            ("motivational", self.motivational, self.motivational_elem),
        ];
        for (task, coded, implied) in checks {
            if coded != implied {
                out.push(Violation::CoreTask {
                    task,
                    coded,
                    implied,
                });
            }
        }
        out
    }

    /// CSV fields after `doc_id`, in [`LABEL_HEADER`] order. Absent values
    /// (stance, and unset flags of irrelevant rows) are empty strings.
    pub fn csv_fields(&self) -> Vec<String> {
        let mut fields = Vec::with_capacity(12);
        fields.push(bool01(self.relevant).to_string());
        fields.push(self.stance.map(|s| s.to_string()).unwrap_or_default());
        for field in FRAME_FIELDS {
            let v = self.flag(field).unwrap();
            fields.push(if !self.relevant && !v {
                String::new()
            } else {
                bool01(v).to_string()
            });
        }
        fields
    }
}

fn bool01(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

#[derive(Debug, Clone)]
pub struct LabeledDoc {
    pub doc: Document,
    pub labels: LabelSet,
}

/// Documents paired with one label set each, in corpus order.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    pub kind: LabelKind,
    pub records: Vec<LabeledDoc>,
}

impl LabeledCorpus {
    pub fn new(kind: LabelKind, records: Vec<LabeledDoc>) -> Self {
        LabeledCorpus { kind, records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LabeledDoc> {
        self.records.iter()
    }

    pub fn relevant(&self) -> impl Iterator<Item = &LabeledDoc> {
        self.records.iter().filter(|r| r.labels.relevant)
    }

    pub fn filter(&self, mut keep: impl FnMut(&LabeledDoc) -> bool) -> LabeledCorpus {
        LabeledCorpus {
            kind: self.kind,
            records: self.records.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LabelReport {
    pub rows: usize,
    /// Coding-logic violations tolerated for inferred labels, by line.
    pub warnings: Vec<(usize, String, Violation)>,
}

pub fn ingest_labels(path: &Path, kind: LabelKind, corpus: &Corpus) -> Result<(LabeledCorpus, LabelReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_labels(file, path, kind, corpus)
}

pub fn parse_labels<R: Read>(
    reader: R,
    path: &Path,
    kind: LabelKind,
    corpus: &Corpus,
) -> Result<(LabeledCorpus, LabelReport)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut col = HashMap::new();
    for name in LABEL_HEADER {
        match headers.iter().position(|h| h.trim() == name) {
            Some(i) => {
                col.insert(name, i);
            }
            None => {
                return Err(Error::Malformed {
                    path: path.into(),
                    line: 1,
                    message: format!("missing column `{name}`"),
                })
            }
        }
    }

    let mut by_id: HashMap<String, (usize, LabelSet)> = HashMap::new();
    let mut report = LabelReport::default();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record?;
        let malformed = |message: String| Error::Malformed {
            path: path.into(),
            line,
            message,
        };
        let get = |name: &str| record.get(col[name]).unwrap_or("").trim();

        let id = get("doc_id").to_string();
        if !corpus.contains(&id) {
            return Err(Error::UnknownDocId {
                path: path.into(),
                line,
                id,
            });
        }
        let relevant = match get("relevant") {
            "1" => true,
            "0" => false,
            other => return Err(malformed(format!("`relevant` must be 0 or 1, got `{other}`"))),
        };
        let mut labels = LabelSet {
            relevant,
            ..LabelSet::default()
        };
        labels.stance = match get("stance") {
            "" => None,
            s => Some(s.parse::<Stance>().map_err(malformed)?),
        };
        for field in FRAME_FIELDS {
            let value = match get(field) {
                "1" => true,
                "0" => false,
                "" if !relevant || kind == LabelKind::Inferred => false,
                "" => return Err(malformed(format!("relevant row is missing `{field}`"))),
                other => return Err(malformed(format!("`{field}` must be 0 or 1, got `{other}`"))),
            };
            labels.set_flag(field, value);
        }

        let violations = labels.violations();
        match kind {
            LabelKind::Gold => {
                if let Some(v) = violations.first() {
                    return Err(Error::GoldConsistency {
                        path: path.into(),
                        line,
                        id,
                        violation: v.to_string(),
                    });
                }
            }
            LabelKind::Inferred => {
                report
                    .warnings
                    .extend(violations.into_iter().map(|v| (line, id.clone(), v)));
            }
        }

        if let Some((first, _)) = by_id.get(&id) {
            return Err(Error::DuplicateId {
                path: path.into(),
                id,
                first: *first,
                second: line,
            });
        }
        by_id.insert(id, (line, labels));
        report.rows += 1;
    }

    let records = corpus
        .iter()
        .filter_map(|doc| {
            by_id.get(&doc.id).map(|(_, labels)| LabeledDoc {
                doc: doc.clone(),
                labels: *labels,
            })
        })
        .collect();
    Ok((LabeledCorpus::new(kind, records), report))
}

pub fn write_labels<W: Write>(out: W, rows: &[(String, LabelSet)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LABEL_HEADER)?;
    for (id, labels) in rows {
        let mut rec = vec![id.clone()];
        rec.extend(labels.csv_fields());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}
