//! Lexical contrast statistics: feature extraction from text and parses,
//! log-odds ratios with an informative Dirichlet prior, and pronoun-person
//! datasets.

mod features;
mod logodds;
mod pronouns;
mod tokenize;

pub use features::{extract_features, FeatureKind, FeatureSpec, FeatureTable};
pub use logodds::{
    log_odds_idp, log_odds_with_prior, rank_features, top_k, Comparison, LogOddsOutput,
    LogOddsResult, DEFAULT_KAPPA,
};
pub use pronouns::{build_pronoun_dataset, check_lexicons, person_of, Person, PronounRecord, LEXICON};
pub use tokenize::tokenize;

use std::collections::BTreeMap;

/// Feature counts keyed by feature string.
pub type Counts = BTreeMap<String, u64>;
