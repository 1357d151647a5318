use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::Corpus;
use crate::{Error, Result};

/// One word line of a CoNLL-U sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenAnnotation {
    pub doc_id: String,
    /// 1-based position within the sentence.
    pub index: u32,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    /// Index of the syntactic head, 0 for the root.
    pub head: u32,
    pub deprel: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<TokenAnnotation>,
}

impl Sentence {
    /// Head token of `token`, or `None` for the root.
    pub fn head_of(&self, token: &TokenAnnotation) -> Option<&TokenAnnotation> {
        match token.head {
            0 => None,
            h => self.tokens.get(h as usize - 1),
        }
    }
}

/// Parsed sentences grouped by document id.
#[derive(Debug, Clone, Default)]
pub struct TokenStore {
    by_doc: BTreeMap<String, Vec<Sentence>>,
}

impl TokenStore {
    pub fn is_empty(&self) -> bool {
        self.by_doc.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.by_doc.keys().map(String::as_str)
    }

    pub fn n_docs(&self) -> usize {
        self.by_doc.len()
    }

    pub fn sentences(&self, doc_id: &str) -> Option<&[Sentence]> {
        self.by_doc.get(doc_id).map(Vec::as_slice)
    }

    pub fn tokens(&self, doc_id: &str) -> impl Iterator<Item = &TokenAnnotation> {
        self.by_doc
            .get(doc_id)
            .into_iter()
            .flatten()
            .flat_map(|s| s.tokens.iter())
    }

    pub fn insert(&mut self, doc_id: impl Into<String>, sentence: Sentence) {
        self.by_doc.entry(doc_id.into()).or_default().push(sentence);
    }

    /// Corpus documents with no parse, in corpus order.
    pub fn unparsed(&self, corpus: &Corpus) -> Vec<String> {
        corpus
            .iter()
            .filter(|d| !self.by_doc.contains_key(&d.id))
            .map(|d| d.id.clone())
            .collect()
    }
}

pub fn ingest_token_annotations(path: &Path) -> Result<TokenStore> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(BufReader::new(file), path)
}

struct Pending {
    doc_id: Option<String>,
    tokens: Vec<(usize, TokenAnnotation)>,
}

/// Reads CoNLL-U. Multiword ranges (`3-4`) and empty nodes (`5.1`) are
/// skipped; an unspecified lemma (`_`) falls back to the lowercased form.
pub fn parse_conllu<R: BufRead>(reader: R, path: &Path) -> Result<TokenStore> {
    let mut store = TokenStore::default();
    let mut ordinal = 0usize;
    let mut pending = Pending {
        doc_id: None,
        tokens: Vec::new(),
    };
    let mut started = false;

    let finish = |p: &mut Pending, ordinal: usize, store: &mut TokenStore| -> Result<()> {
        let tokens = std::mem::take(&mut p.tokens);
        let doc_id = p.doc_id.take();
        if tokens.is_empty() {
            return Ok(());
        }
        let doc_id = doc_id.ok_or_else(|| Error::MissingDocId {
            path: path.into(),
            sentence: ordinal,
        })?;
        let len = tokens.len();
        let mut sentence = Sentence::default();
        for (line, mut tok) in tokens {
            if tok.head as usize > len {
                return Err(Error::HeadOutOfRange {
                    path: path.into(),
                    line,
                    sentence: ordinal,
                    token: tok.index,
                    head: tok.head,
                    len,
                });
            }
            tok.doc_id = doc_id.clone();
            sentence.tokens.push(tok);
        }
        store.insert(doc_id, sentence);
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if started {
                finish(&mut pending, ordinal, &mut store)?;
                started = false;
            }
            continue;
        }
        if !started {
            started = true;
            ordinal += 1;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "doc_id" {
                    pending.doc_id = Some(value.trim().to_string());
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::ColumnCount {
                path: path.into(),
                line: lineno,
                found: cols.len(),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let malformed = |message: String| Error::Malformed {
            path: path.into(),
            line: lineno,
            message,
        };
        let index: u32 = cols[0]
            .parse()
            .map_err(|_| malformed(format!("bad token id `{}`", cols[0])))?;
        let expected = pending.tokens.len() as u32 + 1;
        if index != expected {
            return Err(malformed(format!(
                "token id {index} out of sequence (expected {expected})"
            )));
        }
        let head: u32 = cols[6]
            .parse()
            .map_err(|_| malformed(format!("bad head `{}`", cols[6])))?;
        let form = cols[1].to_string();
        if form.is_empty() {
            return Err(malformed("empty form".into()));
        }
        let lemma = match cols[2] {
            "" | "_" => form.to_lowercase(),
            l => l.to_string(),
        };
        pending.tokens.push((
            lineno,
            TokenAnnotation {
                doc_id: String::new(),
                index,
                form,
                lemma,
                upos: cols[3].to_string(),
                head,
                deprel: cols[7].to_string(),
            },
        ));
    }
    if started {
        finish(&mut pending, ordinal, &mut store)?;
    }
    Ok(store)
}
