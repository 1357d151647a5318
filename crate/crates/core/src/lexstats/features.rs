use std::collections::BTreeMap;

use rayon::prelude::*;

use super::tokenize::tokenize_cased;
use super::Counts;
use crate::corpus::{string_enum, Document, TokenStore};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

string_enum!(
    /// The five feature classes.
    FeatureKind {
        Word => "word",
        Verb => "verb",
        Adjective => "adjective",
        SubjVerb => "subj_verb",
        VerbObj => "verb_obj",
    }
);

impl FeatureKind {
    pub fn needs_parse(self) -> bool {
        !matches!(self, FeatureKind::Word)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub kind: FeatureKind,
    pub lowercase: bool,
    /// Minimum background count for a feature to be ranked.
    pub min_count: u64,
    /// UPOS tags counted as verbs. `AUX` is included so modals such as
    /// `should` and `must` are counted.
    pub verb_tags: Vec<String>,
    pub adjective_tags: Vec<String>,
    pub subject_relations: Vec<String>,
    pub object_relations: Vec<String>,
}

impl FeatureSpec {
    pub fn new(kind: FeatureKind) -> Self {
        let strings = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        FeatureSpec {
            kind,
            lowercase: true,
            min_count: 5,
            verb_tags: strings(&["VERB", "AUX"]),
            adjective_tags: strings(&["ADJ"]),
            subject_relations: strings(&["nsubj", "nsubj:pass"]),
            object_relations: strings(&["obj", "dobj"]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_count < 1 {
            return Err(Error::InvalidInput("min_count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-document feature counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    pub rows: BTreeMap<String, Counts>,
    /// Documents skipped because they have no parse.
    pub excluded: Vec<String>,
}

impl FeatureTable {
    /// Sums the rows of the given documents; ids without a row add nothing.
    pub fn totals<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Counts {
        let mut out = Counts::new();
        for id in ids {
            if let Some(row) = self.rows.get(id) {
                for (f, c) in row {
                    *out.entry(f.clone()).or_default() += c;
                }
            }
        }
        out
    }
}

fn norm(s: &str, lowercase: bool) -> String {
    if lowercase {
        s.to_lowercase()
    } else {
        s.to_string()
    }
}

fn doc_features(doc: &Document, tokens: &TokenStore, spec: &FeatureSpec) -> Option<Counts> {
    let mut counts = Counts::new();
    let mut bump = |f: String| *counts.entry(f).or_default() += 1;
    if spec.kind == FeatureKind::Word {
        for t in tokenize_cased(&doc.text, spec.lowercase) {
            bump(t);
        }
        return Some(counts);
    }
    let sentences = tokens.sentences(&doc.id)?;
    let has = |set: &[String], v: &str| set.iter().any(|s| s == v);
    for sentence in sentences {
        for tok in &sentence.tokens {
            match spec.kind {
                FeatureKind::Word => unreachable!(),
                FeatureKind::Verb if has(&spec.verb_tags, &tok.upos) => {
                    bump(norm(&tok.lemma, spec.lowercase))
                }
                FeatureKind::Adjective if has(&spec.adjective_tags, &tok.upos) => {
                    bump(norm(&tok.lemma, spec.lowercase))
                }
                FeatureKind::SubjVerb if has(&spec.subject_relations, &tok.deprel) => {
                    if let Some(verb) = sentence.head_of(tok) {
                        bump(format!(
                            "{}_{}",
                            norm(&tok.lemma, spec.lowercase),
                            norm(&verb.lemma, spec.lowercase)
                        ));
                    }
                }
                FeatureKind::VerbObj if has(&spec.object_relations, &tok.deprel) => {
                    if let Some(verb) = sentence.head_of(tok) {
                        bump(format!(
                            "{}_{}",
                            norm(&verb.lemma, spec.lowercase),
                            norm(&tok.lemma, spec.lowercase)
                        ));
                    }
                }
                _ => {}
            }
        }
    }
    Some(counts)
}

/// Counts features per document. Word features come from the message text;
/// the other kinds need a parse and skip unparsed documents (listed in
/// [`FeatureTable::excluded`]).
pub fn extract_features<'a, I>(docs: I, tokens: &TokenStore, spec: &FeatureSpec) -> Result<FeatureTable>
where
    I: IntoIterator<Item = &'a Document>,
{
    spec.validate()?;
    if spec.kind.needs_parse() && tokens.is_empty() {
        return Err(Error::Empty("token store".into()));
    }
    let docs: Vec<&Document> = docs.into_iter().collect();
    let per_doc: Vec<(String, Option<Counts>)> = docs
        .par_iter()
        .map(|d| (d.id.clone(), doc_features(d, tokens, spec)))
        .collect();
    let mut table = FeatureTable::default();
    for (id, counts) in per_doc {
        match counts {
            Some(c) => {
                table.rows.insert(id, c);
            }
            None => table.excluded.push(id),
        }
    }
    Ok(table)
}
