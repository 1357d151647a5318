//! Frame alignment between message groups as relative entropy of their
//! framing-strategy distributions.
//!
//! A distribution counts, for each of the eight strategies, the messages
//! carrying it, adds one to every count and normalizes. Strategies are not
//! mutually exclusive, so this is a distribution over strategy mentions
//! rather than over messages.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Issue, LabelSet, LabeledCorpus, Stance};
use crate::seed::{substream, ALIGN};
use crate::stats::{mean, quantile_sorted};
use crate::{Error, Result};

/// Strategy categories in distribution order.
pub const STRATEGIES: [&str; 8] = [
    "diagnostic",
    "prognostic",
    "motivational",
    "problem_id",
    "blame",
    "solution",
    "tactics",
    "solidarity",
];

type Mask = u8;

fn mask_of(labels: &LabelSet) -> Mask {
    STRATEGIES
        .iter()
        .enumerate()
        .filter(|(_, s)| labels.flag(s).unwrap_or(false))
        .fold(0, |m, (i, _)| m | (1 << i))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyDistribution {
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
}

impl StrategyDistribution {
    /// Add-one smoothed distribution from raw per-category counts.
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total: f64 = counts.iter().map(|&c| (c + 1) as f64).sum();
        let probabilities = counts.iter().map(|&c| (c + 1) as f64 / total).collect();
        StrategyDistribution {
            counts,
            probabilities,
        }
    }

    fn from_masks<'a>(masks: impl IntoIterator<Item = &'a Mask>) -> Self {
        let mut counts = vec![0u64; STRATEGIES.len()];
        for m in masks {
            for (i, c) in counts.iter_mut().enumerate() {
                *c += u64::from(m >> i & 1);
            }
        }
        Self::from_counts(counts)
    }
}

pub fn strategy_distribution<'a>(
    group: impl IntoIterator<Item = &'a LabelSet>,
) -> Result<StrategyDistribution> {
    let masks: Vec<Mask> = group.into_iter().map(mask_of).collect();
    if masks.is_empty() {
        return Err(Error::Empty("strategy distribution of an empty group".into()));
    }
    Ok(StrategyDistribution::from_masks(&masks))
}

/// `sum_i p_i ln(p_i / q_i)`; terms with `p_i = 0` contribute nothing.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch(p.len(), q.len()));
    }
    if let Some(bad) = q.iter().zip(p).find(|(q, p)| **q <= 0.0 && **p > 0.0) {
        return Err(Error::InvalidInput(format!(
            "reference distribution has zero mass ({}) where the other has {}",
            bad.0, bad.1
        )));
    }
    let kl: f64 = p
        .iter()
        .zip(q)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, q)| p * (p / q).ln())
        .sum();
    // Rounding can leave a tiny negative sum for near-identical inputs.
    Ok(kl.max(0.0))
}

/// A named slice of the corpus: relevant messages matching the filters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub name: String,
    pub issue: Option<Issue>,
    pub stance: Option<Stance>,
}

impl GroupSpec {
    pub fn new(issue: Option<Issue>, stance: Option<Stance>) -> Self {
        let name = match (stance, issue) {
            (Some(s), Some(i)) => format!("{s}-{i}"),
            (Some(s), None) => s.to_string(),
            (None, Some(i)) => i.to_string(),
            (None, None) => "all".to_string(),
        };
        GroupSpec {
            name,
            issue,
            stance,
        }
    }

    pub fn select<'a>(&self, corpus: &'a LabeledCorpus) -> Vec<&'a LabelSet> {
        corpus
            .relevant()
            .filter(|r| self.issue.is_none_or(|i| r.doc.issue == i))
            .filter(|r| self.stance.is_none_or(|s| r.labels.stance == Some(s)))
            .map(|r| &r.labels)
            .collect()
    }
}

/// Cross-issue comparisons within each stance, then cross-stance
/// comparisons within each issue, over guns and immigration.
pub fn default_pairs() -> Vec<(GroupSpec, GroupSpec)> {
    let g = |i, s| GroupSpec::new(Some(i), Some(s));
    use Issue::{Guns, Immigration};
    use Stance::{Conservative, Progressive};
    vec![
        (g(Guns, Progressive), g(Immigration, Progressive)),
        (g(Guns, Conservative), g(Immigration, Conservative)),
        (g(Guns, Progressive), g(Guns, Conservative)),
        (g(Immigration, Progressive), g(Immigration, Conservative)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BootstrapOptions {
    pub n_replicates: usize,
    pub sample_size: usize,
    /// Average `KL(a||b)` and `KL(b||a)` instead of using `KL(a||b)`.
    pub symmetric: bool,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            n_replicates: 1000,
            sample_size: 10_000,
            symmetric: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentResult {
    pub group_a: String,
    pub group_b: String,
    pub kl_mean: f64,
    pub kl_ci_low: f64,
    pub kl_ci_high: f64,
    pub n_replicates: usize,
    pub sample_size: usize,
    pub seed: u64,
}

/// Resamples both groups with replacement in every replicate. Replicate `r`
/// draws from its own stream, so results depend on the seed and on group row
/// order, but not on thread count.
pub fn bootstrap_alignment(
    names: (&str, &str),
    group_a: &[&LabelSet],
    group_b: &[&LabelSet],
    opts: &BootstrapOptions,
    seed: u64,
) -> Result<AlignmentResult> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::Empty(format!(
            "alignment needs non-empty groups ({} has {}, {} has {})",
            names.0,
            group_a.len(),
            names.1,
            group_b.len()
        )));
    }
    if opts.n_replicates == 0 || opts.sample_size == 0 {
        return Err(Error::InvalidInput(
            "replicates and sample size must be positive".into(),
        ));
    }
    let a: Vec<Mask> = group_a.iter().map(|l| mask_of(l)).collect();
    let b: Vec<Mask> = group_b.iter().map(|l| mask_of(l)).collect();
    let draws: Vec<f64> = (0..opts.n_replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, ALIGN, r as u64);
            let mut sample = |pool: &[Mask]| {
                let picked: Vec<Mask> = (0..opts.sample_size)
                    .map(|_| pool[rng.gen_range(0..pool.len())])
                    .collect();
                StrategyDistribution::from_masks(&picked)
            };
            let p = sample(&a);
            let q = sample(&b);
            let forward = kl_divergence(&p.probabilities, &q.probabilities).expect("same support");
            if opts.symmetric {
                let back = kl_divergence(&q.probabilities, &p.probabilities).expect("same support");
                0.5 * (forward + back)
            } else {
                forward
            }
        })
        .collect();
    let kl_mean = mean(&draws);
    let mut sorted = draws;
    sorted.sort_by(f64::total_cmp);
    Ok(AlignmentResult {
        group_a: names.0.to_string(),
        group_b: names.1.to_string(),
        kl_mean,
        kl_ci_low: quantile_sorted(&sorted, 0.025).min(kl_mean),
        kl_ci_high: quantile_sorted(&sorted, 0.975).max(kl_mean),
        n_replicates: opts.n_replicates,
        sample_size: opts.sample_size,
        seed,
    })
}

/// Orders labelled divergences from most aligned (smallest) to least; ties
/// keep input order.
pub fn rank_by_divergence<T: Clone>(items: &[(T, f64)]) -> Vec<(T, f64)> {
    let mut out = items.to_vec();
    out.sort_by(|x, y| x.1.total_cmp(&y.1));
    out
}
