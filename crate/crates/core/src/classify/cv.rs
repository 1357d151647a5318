use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate, predict, train, MetricsReport, Model, Task, TrainConfig};
use crate::corpus::{split_and_fold, LabelKind, LabelSet, LabeledCorpus, LabeledDoc, SplitPlan};
use crate::stats::{mean, sample_stdev};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train: MetricsReport,
    pub dev: MetricsReport,
    pub warnings: Vec<String>,
}

/// Mean and sample standard deviation across folds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvSummary {
    pub f1_mean: BTreeMap<String, f64>,
    pub f1_stdev: BTreeMap<String, f64>,
    pub macro_f1_mean: f64,
    pub macro_f1_stdev: f64,
    pub micro_f1_mean: f64,
    pub micro_f1_stdev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub task: Task,
    pub plan: SplitPlan,
    pub folds: Vec<FoldReport>,
    pub summary: CvSummary,
    /// Model trained on all training folds, scored on the held-out test set.
    pub test: Option<MetricsReport>,
}

fn subset(records: &[&LabeledDoc], ids: &[String]) -> Vec<LabeledDoc> {
    let keep: HashSet<&str> = ids.iter().map(String::as_str).collect();
    records
        .iter()
        .filter(|r| keep.contains(r.doc.id.as_str()))
        .map(|r| (*r).clone())
        .collect()
}

fn score(model: &Model, records: &[LabeledDoc], task: Task, threshold: f64) -> Result<MetricsReport> {
    let preds = predict(model, records.iter().map(|r| (r.doc.id.as_str(), r.doc.text.as_str())), threshold);
    let gold = LabeledCorpus::new(LabelKind::Gold, records.to_vec());
    let predicted = LabeledCorpus::new(
        LabelKind::Inferred,
        records
            .iter()
            .zip(&preds)
            .map(|(r, p)| {
                let mut labels = LabelSet {
                    relevant: true,
                    ..LabelSet::default()
                };
                match task {
                    Task::Stance => {
                        labels.stance = p
                            .values
                            .iter()
                            .position(|v| *v)
                            .map(|c| crate::corpus::Stance::ALL[c]);
                    }
                    _ => {
                        for (name, &v) in task.labels().iter().zip(&p.values) {
                            labels.set_flag(name, v);
                        }
                    }
                }
                LabeledDoc {
                    doc: r.doc.clone(),
                    labels,
                }
            })
            .collect(),
    );
    evaluate(&gold, &predicted, task)
}

/// k-fold cross-validation on the training portion of a seeded split, plus a
/// final test-set score. Folds run in parallel on the current rayon pool and
/// are reported in fold order.
pub fn cross_validate(
    corpus: &LabeledCorpus,
    task: Task,
    config: &TrainConfig,
    k: usize,
    test_fraction: f64,
    seed_value: u64,
    threshold: f64,
) -> Result<CvReport> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "cross-validation needs at least 2 folds, got {k}"
        )));
    }
    let eligible = task.eligible(&corpus.records);
    let ids: Vec<String> = eligible.iter().map(|r| r.doc.id.clone()).collect();
    let plan = split_and_fold(&ids, test_fraction, k, seed_value)?;
    let train_seed = seed::derive(seed_value, seed::TRAIN, 0);

    let folds: Vec<FoldReport> = (0..k)
        .into_par_iter()
        .map(|i| -> Result<FoldReport> {
            let (train_ids, dev_ids) = plan.fold(i);
            let train_set = subset(&eligible, &train_ids);
            let dev_set = subset(&eligible, &dev_ids);
            let (model, report) = train(&train_set, task, config, train_seed)?;
            let mut warnings: Vec<String> = report.warnings;
            for (li, name) in task.labels().iter().enumerate() {
                if !dev_set.iter().any(|r| task.indicators(&r.labels)[li]) {
                    warnings.push(format!("label `{name}` has no positive examples in dev fold {i}"));
                }
            }
            Ok(FoldReport {
                fold: i,
                train: score(&model, &train_set, task, threshold)?,
                dev: score(&model, &dev_set, task, threshold)?,
                warnings,
            })
        })
        .collect::<Result<_>>()?;

    let test = if plan.test.is_empty() {
        None
    } else {
        let train_set = subset(&eligible, &plan.train());
        let test_set = subset(&eligible, &plan.test);
        let (model, _) = train(&train_set, task, config, train_seed)?;
        Some(score(&model, &test_set, task, threshold)?)
    };

    let per_label = |f: &dyn Fn(&[f64]) -> f64| -> BTreeMap<String, f64> {
        task.labels()
            .iter()
            .enumerate()
            .map(|(li, name)| {
                let xs: Vec<f64> = folds.iter().map(|r| r.dev.labels[li].f1).collect();
                (name.to_string(), f(&xs))
            })
            .collect()
    };
    let macros: Vec<f64> = folds.iter().map(|r| r.dev.macro_f1).collect();
    let micros: Vec<f64> = folds.iter().map(|r| r.dev.micro_f1).collect();
    let summary = CvSummary {
        f1_mean: per_label(&|x| mean(x)),
        f1_stdev: per_label(&|x| sample_stdev(x)),
        macro_f1_mean: mean(&macros),
        macro_f1_stdev: sample_stdev(&macros),
        micro_f1_mean: mean(&micros),
        micro_f1_stdev: sample_stdev(&micros),
    };
    Ok(CvReport {
        task,
        plan,
        folds,
        summary,
        test,
    })
}
