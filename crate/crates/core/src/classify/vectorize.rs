use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::lexstats::tokenize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Longest n-gram (1 = unigrams only).
    pub max_ngram: usize,
    /// Minimum number of training documents a feature must occur in.
    pub min_df: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            max_ngram: 2,
            min_df: 2,
        }
    }
}

/// Explicit n-gram vocabulary with binary presence features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vectorizer {
    pub config: FeatureConfig,
    pub vocabulary: Vec<String>,
    #[serde(skip)]
    index: BTreeMap<String, u32>,
}

fn ngrams(text: &str, max_n: usize) -> BTreeSet<String> {
    let toks = tokenize(text);
    let mut out = BTreeSet::new();
    for n in 1..=max_n {
        for w in toks.windows(n) {
            out.insert(w.join(" "));
        }
    }
    out
}

impl Vectorizer {
    pub fn fit<'a>(texts: impl IntoIterator<Item = &'a str>, config: FeatureConfig) -> Self {
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for t in texts {
            for g in ngrams(t, config.max_ngram) {
                *df.entry(g).or_default() += 1;
            }
        }
        let vocabulary = df
            .into_iter()
            .filter(|(_, c)| *c >= config.min_df)
            .map(|(g, _)| g)
            .collect();
        Self::from_vocabulary(vocabulary, config)
    }

    pub fn from_vocabulary(vocabulary: Vec<String>, config: FeatureConfig) -> Self {
        let index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i as u32))
            .collect();
        Vectorizer {
            config,
            vocabulary,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    /// Sorted indices of the vocabulary features present in `text`.
    pub fn transform(&self, text: &str) -> Vec<u32> {
        ngrams(text, self.config.max_ngram)
            .iter()
            .filter_map(|g| self.index.get(g).copied())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_df_and_bigrams() {
        let v = Vectorizer::fit(["gun control now", "gun control", "hello"], FeatureConfig::default());
        assert_eq!(v.vocabulary, vec!["control", "gun", "gun control"]);
        assert_eq!(v.transform("Gun control!"), vec![0, 1, 2]);
        assert!(v.transform("").is_empty());
    }
}
