use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::Task;
use crate::corpus::{LabelSet, LabeledCorpus};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn add(&mut self, gold: bool, pred: bool) {
        match (gold, pred) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }

    fn nothing_to_find(&self) -> bool {
        self.tp + self.fp + self.fn_ == 0
    }

    /// `tp / (tp + fp)`; 0 when nothing was predicted but something was missed.
    pub fn precision(&self) -> f64 {
        if self.nothing_to_find() {
            return 1.0;
        }
        if self.tp + self.fp == 0 {
            return 0.0;
        }
        self.tp as f64 / (self.tp + self.fp) as f64
    }

    pub fn recall(&self) -> f64 {
        if self.nothing_to_find() {
            return 1.0;
        }
        if self.tp + self.fn_ == 0 {
            return 0.0;
        }
        self.tp as f64 / (self.tp + self.fn_) as f64
    }

    /// `2tp / (2tp + fp + fn)`. This is 0 whenever `tp = 0` and there were
    /// errors, and 1 when the label is absent from both gold and predictions.
    pub fn f1(&self) -> f64 {
        if self.nothing_to_find() {
            return 1.0;
        }
        (2 * self.tp) as f64 / (2 * self.tp + self.fp + self.fn_) as f64
    }

    pub fn support(&self) -> u64 {
        self.tp + self.fn_
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelMetrics {
    pub label: String,
    pub confusion: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub labels: Vec<LabelMetrics>,
    /// Unweighted mean of per-label F1.
    pub macro_f1: f64,
    /// F1 of the pooled confusion counts.
    pub micro_f1: f64,
    pub n_items: usize,
}

impl MetricsReport {
    pub fn f1_by_label(&self) -> BTreeMap<String, f64> {
        self.labels.iter().map(|l| (l.label.clone(), l.f1)).collect()
    }
}

/// Metrics for row-aligned gold and predicted indicator vectors.
pub fn metrics_from_matrix(label_names: &[&str], gold: &[Vec<bool>], pred: &[Vec<bool>]) -> Result<MetricsReport> {
    if gold.len() != pred.len() {
        return Err(Error::InvalidInput(format!(
            "{} gold rows but {} predicted rows",
            gold.len(),
            pred.len()
        )));
    }
    let k = label_names.len();
    if k == 0 {
        return Err(Error::InvalidInput("no labels to evaluate".into()));
    }
    let mut conf = vec![Confusion::default(); k];
    for (g, p) in gold.iter().zip(pred) {
        if g.len() != k || p.len() != k {
            return Err(Error::InvalidInput("indicator width does not match labels".into()));
        }
        for j in 0..k {
            conf[j].add(g[j], p[j]);
        }
    }
    let mut pooled = Confusion::default();
    let labels: Vec<LabelMetrics> = label_names
        .iter()
        .zip(&conf)
        .map(|(name, c)| {
            pooled.merge(c);
            LabelMetrics {
                label: name.to_string(),
                confusion: *c,
                precision: c.precision(),
                recall: c.recall(),
                f1: c.f1(),
                support: c.support(),
            }
        })
        .collect();
    let macro_f1 = labels.iter().map(|l| l.f1).sum::<f64>() / k as f64;
    Ok(MetricsReport {
        labels,
        macro_f1,
        micro_f1: pooled.f1(),
        n_items: gold.len(),
    })
}

fn id_sets_match(gold: &LabeledCorpus, predicted: &LabeledCorpus) -> Result<()> {
    let g: BTreeSet<&str> = gold.iter().map(|r| r.doc.id.as_str()).collect();
    let p: BTreeSet<&str> = predicted.iter().map(|r| r.doc.id.as_str()).collect();
    if g == p {
        return Ok(());
    }
    let only_gold: Vec<&str> = g.difference(&p).take(5).copied().collect();
    let only_pred: Vec<&str> = p.difference(&g).take(5).copied().collect();
    Err(Error::IdMismatch(format!(
        "only in gold: [{}]; only in predictions: [{}]",
        only_gold.join(", "),
        only_pred.join(", ")
    )))
}

/// Scores predictions for one task. Stance is scored as three one-vs-rest
/// labels. Non-relevance tasks are scored on the documents the gold labels
/// mark as eligible (relevant, and stance-coded for stance).
pub fn evaluate(gold: &LabeledCorpus, predicted: &LabeledCorpus, task: Task) -> Result<MetricsReport> {
    id_sets_match(gold, predicted)?;
    let pred_by_id: HashMap<&str, &LabelSet> =
        predicted.iter().map(|r| (r.doc.id.as_str(), &r.labels)).collect();
    let mut g = Vec::new();
    let mut p = Vec::new();
    for r in gold.iter().filter(|r| task.is_eligible(&r.labels)) {
        g.push(task.indicators(&r.labels));
        p.push(task.indicators(pred_by_id[r.doc.id.as_str()]));
    }
    metrics_from_matrix(task.labels(), &g, &p)
}

/// Labels whose F1 falls strictly below `threshold`.
pub fn apply_exclusion_rule(f1: &BTreeMap<String, f64>, threshold: f64) -> BTreeSet<String> {
    f1.iter()
        .filter(|(_, &v)| v < threshold)
        .map(|(k, _)| k.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let rows = vec![vec![true, false], vec![false, true], vec![false, false]];
        let m = metrics_from_matrix(&["a", "b"], &rows, &rows).unwrap();
        assert!(m.labels.iter().all(|l| l.f1 == 1.0));
        assert_eq!((m.macro_f1, m.micro_f1), (1.0, 1.0));
    }

    #[test]
    fn two_one_one() {
        let c = Confusion { tp: 2, fp: 1, fn_: 1, tn: 0 };
        for v in [c.precision(), c.recall(), c.f1()] {
            assert!((v - 2.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn macro_and_micro() {
        // label a: tp 2 -> F1 1.0; label b: tp 1, fp 1, fn 1 -> F1 0.5; equal support 2.
        let gold = vec![vec![true, true], vec![true, true], vec![false, false]];
        let pred = vec![vec![true, true], vec![true, false], vec![false, true]];
        let m = metrics_from_matrix(&["a", "b"], &gold, &pred).unwrap();
        assert_eq!(m.labels[0].f1, 1.0);
        assert_eq!(m.labels[1].f1, 0.5);
        assert_eq!(m.labels[0].support, m.labels[1].support);
        assert_eq!(m.macro_f1, 0.75);
        // pooled tp 3, fp 1, fn 1
        assert_eq!(m.micro_f1, 6.0 / 8.0);
    }

    #[test]
    fn zero_division() {
        let c = Confusion { tp: 0, fp: 3, fn_: 0, tn: 1 };
        assert_eq!((c.precision(), c.recall(), c.f1()), (0.0, 0.0, 0.0));
        let c = Confusion { tp: 0, fp: 0, fn_: 2, tn: 1 };
        assert_eq!((c.precision(), c.f1()), (0.0, 0.0));
    }

    #[test]
    fn exclusion_rule() {
        let f1: BTreeMap<String, f64> = [("a", 0.5), ("b", 0.49), ("c", 0.9)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        assert_eq!(apply_exclusion_rule(&f1, 0.5), BTreeSet::from(["b".to_string()]));
        assert!(apply_exclusion_rule(&f1, 0.1).is_empty());
    }
}
