//! Log-odds ratio with an informative Dirichlet prior.
//!
//! For a feature `w` with counts `y1` in the group (total `n1`) and `y2` in
//! the comparison corpus (total `n2`), and prior pseudo-counts
//! `a = kappa * y_prior / n_prior`:
//!
//! ```text
//! delta  = ln((y1 + a) / (n1 + kappa - y1 - a)) - ln((y2 + a) / (n2 + kappa - y2 - a))
//! sigma2 = 1 / (y1 + a) + 1 / (y2 + a)
//! z      = delta / sqrt(sigma2)
//! ```

use std::cmp::Ordering;

use serde::Serialize;

use super::Counts;
use crate::{Error, Result};

pub const DEFAULT_KAPPA: f64 = 500.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogOddsResult {
    pub feature: String,
    pub y_group: u64,
    /// Count in the comparison corpus.
    pub y_bg: u64,
    pub delta: f64,
    pub sigma2: f64,
    pub z: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogOddsOutput {
    /// Sorted by z descending, ties by feature; `rank` is 1-based.
    pub results: Vec<LogOddsResult>,
    /// Features dropped because the prior (or `min_count` filter) excluded them.
    pub excluded: Vec<String>,
}

/// What the framing subset is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// All tweets, including the subset itself.
    #[default]
    Superset,
    /// All tweets outside the subset.
    Complement,
}

fn by_z_then_feature(a: &LogOddsResult, b: &LogOddsResult) -> Ordering {
    b.z.partial_cmp(&a.z)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.feature.cmp(&b.feature))
}

/// Log-odds of `group` against `comparison` with prior counts `prior`.
///
/// Features absent from the prior are excluded and listed.
pub fn log_odds_with_prior(group: &Counts, comparison: &Counts, prior: &Counts, kappa: f64) -> Result<LogOddsOutput> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidInput(format!("prior strength must be positive, got {kappa}")));
    }
    let n_prior: u64 = prior.values().sum();
    if n_prior == 0 {
        return Err(Error::Empty("background counts".into()));
    }
    if prior.values().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::InvalidInput(
            "the prior needs at least two features with non-zero counts".into(),
        ));
    }
    let n1 = group.values().sum::<u64>() as f64;
    let n2 = comparison.values().sum::<u64>() as f64;

    let mut vocab: Vec<&String> = group.keys().chain(comparison.keys()).collect();
    vocab.sort();
    vocab.dedup();

    let mut out = LogOddsOutput::default();
    for w in vocab {
        let y_prior = prior.get(w).copied().unwrap_or(0);
        if y_prior == 0 {
            out.excluded.push(w.clone());
            continue;
        }
        let a = kappa * (y_prior as f64 / n_prior as f64);
        let y1c = group.get(w).copied().unwrap_or(0);
        let y2c = comparison.get(w).copied().unwrap_or(0);
        let (y1, y2) = (y1c as f64, y2c as f64);
        let l1 = ((y1 + a) / (n1 + kappa - y1 - a)).ln();
        let l2 = ((y2 + a) / (n2 + kappa - y2 - a)).ln();
        let delta = l1 - l2;
        let sigma2 = 1.0 / (y1 + a) + 1.0 / (y2 + a);
        out.results.push(LogOddsResult {
            feature: w.clone(),
            y_group: y1c,
            y_bg: y2c,
            delta,
            sigma2,
            z: delta / sigma2.sqrt(),
            rank: 0,
        });
    }
    out.results.sort_by(by_z_then_feature);
    for (i, r) in out.results.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(out)
}

/// Log-odds of `group` against `background`, which also supplies the prior.
pub fn log_odds_idp(group: &Counts, background: &Counts, kappa: f64) -> Result<LogOddsOutput> {
    log_odds_with_prior(group, background, background, kappa)
}

/// Full ranking pipeline for a framing subset inside a background corpus
/// that contains it: drops features seen fewer than `min_count` times in the
/// background, then compares against the background (or its complement),
/// always using the background as the prior.
pub fn rank_features(
    group: &Counts,
    background: &Counts,
    comparison: Comparison,
    kappa: f64,
    min_count: u64,
) -> Result<LogOddsOutput> {
    for (w, &y) in group {
        let bg = background.get(w).copied().unwrap_or(0);
        if y > bg {
            return Err(Error::InvalidInput(format!(
                "group count for `{w}` ({y}) exceeds its background count ({bg})"
            )));
        }
    }
    let mut dropped = Vec::new();
    let prior: Counts = background
        .iter()
        .filter(|(w, &c)| {
            let keep = c >= min_count;
            if !keep {
                dropped.push((*w).clone());
            }
            keep
        })
        .map(|(w, &c)| (w.clone(), c))
        .collect();
    let keep = |counts: &Counts| -> Counts {
        counts
            .iter()
            .filter(|(w, _)| prior.contains_key(*w))
            .map(|(w, &c)| (w.clone(), c))
            .collect()
    };
    let group_kept = keep(group);
    let compared = match comparison {
        Comparison::Superset => prior.clone(),
        Comparison::Complement => prior
            .iter()
            .map(|(w, &c)| (w.clone(), c - group_kept.get(w).copied().unwrap_or(0)))
            .collect(),
    };
    let mut out = log_odds_with_prior(&group_kept, &compared, &prior, kappa)?;
    out.excluded.extend(dropped);
    out.excluded.sort();
    Ok(out)
}

/// The `k` highest-z features, ties broken by feature string.
pub fn top_k(results: &[LogOddsResult], k: usize) -> Vec<LogOddsResult> {
    let mut sorted = results.to_vec();
    sorted.sort_by(by_z_then_feature);
    sorted.truncate(k);
    for (i, r) in sorted.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    sorted
}
