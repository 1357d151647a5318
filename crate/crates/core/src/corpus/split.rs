use rand::seq::SliceRandom;
use serde::Serialize;

use crate::seed;
use crate::{Error, Result};

/// A held-out test set plus `k` cross-validation folds over the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub test: Vec<String>,
    pub folds: Vec<Vec<String>>,
}

impl SplitPlan {
    pub fn train(&self) -> Vec<String> {
        self.folds.iter().flatten().cloned().collect()
    }

    /// `(train, dev)` ids for fold `i`.
    pub fn fold(&self, i: usize) -> (Vec<String>, Vec<String>) {
        let train = self
            .folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().cloned())
            .collect();
        (train, self.folds[i].clone())
    }

    pub fn partition_of(&self, id: &str) -> Option<(&'static str, Option<usize>)> {
        if self.test.iter().any(|t| t == id) {
            return Some(("test", None));
        }
        self.folds
            .iter()
            .position(|f| f.iter().any(|t| t == id))
            .map(|i| ("train", Some(i)))
    }
}

/// Shuffles ids (sorted first, so input order does not matter), takes
/// `round(n * test_fraction)` as the test set and deals the rest round-robin
/// into `k` folds whose sizes differ by at most one.
pub fn split_and_fold(ids: &[String], test_fraction: f64, k: usize, seed_value: u64) -> Result<SplitPlan> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::InvalidInput(format!(
            "test fraction must be in [0, 1), got {test_fraction}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("number of folds must be at least 1".into()));
    }
    let n = ids.len();
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n < n_test + k || (n as f64) < k as f64 / (1.0 - test_fraction) {
        return Err(Error::CorpusTooSmall {
            size: n,
            k,
            test_fraction,
        });
    }
    let mut order: Vec<String> = ids.to_vec();
    order.sort();
    if order.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("split ids must be unique".into()));
    }
    let mut rng = seed::substream(seed_value, seed::SPLIT, 0);
    order.shuffle(&mut rng);

    let rest = order.split_off(n_test);
    let mut test = order;
    test.sort();
    let mut folds = vec![Vec::new(); k];
    for (i, id) in rest.into_iter().enumerate() {
        folds[i % k].push(id);
    }
    for f in &mut folds {
        f.sort();
    }
    Ok(SplitPlan {
        seed: seed_value,
        test,
        folds,
    })
}
