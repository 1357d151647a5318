use serde::Serialize;

use super::tokenize;
use crate::corpus::{string_enum, Issue, LabeledCorpus, TokenStore};
use crate::{Error, Result};

string_enum!(Person { First => "first", Second => "second", Third => "third" });

/// Personal pronoun forms by grammatical person.
pub const LEXICON: [(Person, &[&str]); 3] = [
    (Person::First, &["i", "me", "my", "mine", "we", "us", "our", "ours"]),
    (Person::Second, &["you", "your", "yours"]),
    (
        Person::Third,
        &["he", "him", "his", "she", "her", "hers", "they", "them", "their", "theirs", "it", "its"],
    ),
];

pub fn person_of(form: &str) -> Option<Person> {
    let lower = form.to_lowercase();
    LEXICON
        .iter()
        .find(|(_, forms)| forms.contains(&lower.as_str()))
        .map(|(p, _)| *p)
}

/// Fails if any form is listed under more than one person.
pub fn check_lexicons() -> Result<()> {
    for (i, (p, forms)) in LEXICON.iter().enumerate() {
        for (q, other) in &LEXICON[i + 1..] {
            if let Some(f) = forms.iter().find(|f| other.contains(f)) {
                return Err(Error::InvalidInput(format!(
                    "pronoun `{f}` is listed as both {p} and {q} person"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PronounRecord {
    pub doc_id: String,
    pub form: String,
    pub person: Person,
    pub issue: Issue,
    pub diagnostic: bool,
    pub prognostic: bool,
    pub motivational: bool,
}

/// One record per pronoun token in relevant tweets. Parsed documents use
/// their token forms; unparsed ones fall back to the text tokenizer.
pub fn build_pronoun_dataset(corpus: &LabeledCorpus, tokens: &TokenStore) -> Vec<PronounRecord> {
    let mut out = Vec::new();
    for r in corpus.relevant() {
        let forms: Vec<String> = if tokens.sentences(&r.doc.id).is_some() {
            tokens.tokens(&r.doc.id).map(|t| t.form.to_lowercase()).collect()
        } else {
            tokenize(&r.doc.text)
        };
        for form in forms {
            if let Some(person) = person_of(&form) {
                out.push(PronounRecord {
                    doc_id: r.doc.id.clone(),
                    form,
                    person,
                    issue: r.doc.issue,
                    diagnostic: r.labels.diagnostic,
                    prognostic: r.labels.prognostic,
                    motivational: r.labels.motivational,
                });
            }
        }
    }
    out
}
