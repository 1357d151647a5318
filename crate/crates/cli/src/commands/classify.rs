use std::collections::BTreeSet;
use std::fs::File;

use anyhow::{bail, Context, Result};
use frameforge_core::classify::{
    apply_exclusion_rule, cross_validate, evaluate as score, merge_predictions, predict as apply,
    train as fit, FeatureConfig, HyperParams, MetricsReport, Model, Task, TrainConfig,
};
use frameforge_core::corpus::{ingest_labels, write_labels, LabelKind};

use super::{csv_bytes, load_docs, load_labeled};
use crate::args::{CrossvalArgs, EvaluateArgs, ModelArgs, PredictArgs, TrainArgs};
use crate::run::Run;

pub const METRICS_HEADER: [&str; 8] = ["task", "label", "precision", "recall", "f1", "support", "split", "fold"];

fn config(m: &ModelArgs) -> TrainConfig {
    TrainConfig {
        features: FeatureConfig {
            max_ngram: m.max_ngram,
            min_df: m.min_df,
        },
        hyper: HyperParams {
            l2: m.l2,
            epochs: m.epochs,
            step: m.step,
        },
    }
}

pub fn model_file_name(task: Task) -> String {
    format!("model_{task}.json")
}

pub fn train(run: &mut Run, args: &TrainArgs) -> Result<()> {
    run.seed(args.seed);
    let labeled = load_labeled(run, &args.data, LabelKind::Gold)?;
    let (model, report) = fit(&labeled.records, args.task, &config(&args.model), args.seed)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut bytes = Vec::new();
    model.write_json(&mut bytes)?;
    run.emit(&model_file_name(args.task), &bytes)
}

pub fn predict(run: &mut Run, args: &PredictArgs) -> Result<()> {
    let corpus = load_docs(run, &args.docs)?;
    let mut models = Vec::new();
    for path in &args.models {
        let file = File::open(run.input(path)?).with_context(|| format!("opening {}", path.display()))?;
        let model = Model::read_json(file).with_context(|| format!("loading model {}", path.display()))?;
        if models.iter().any(|m: &Model| m.task == model.task) {
            bail!("two models given for task `{}`", model.task);
        }
        models.push(model);
    }
    // Relevance first, so later tasks see which documents it cleared.
    models.sort_by_key(|m| m.task.index());
    let ids: Vec<String> = corpus.iter().map(|d| d.id.clone()).collect();
    let predictions: Vec<_> = models
        .iter()
        .map(|m| apply(m, corpus.iter().map(|d| (d.id.as_str(), d.text.as_str())), args.threshold))
        .collect();
    let per_task: Vec<_> = models.iter().zip(&predictions).map(|(m, p)| (m.task, p.as_slice())).collect();
    let merged = merge_predictions(&ids, &per_task)?;

    let mut labels = Vec::new();
    write_labels(
        &mut labels,
        &merged.iter().map(|(id, l, _)| (id.clone(), *l)).collect::<Vec<_>>(),
    )?;
    run.emit("predictions.csv", &labels)?;

    let columns: BTreeSet<&String> = merged.iter().flat_map(|(_, _, p)| p.keys()).collect();
    let mut header = vec!["doc_id"];
    header.extend(columns.iter().map(|c| c.as_str()));
    let rows = merged.iter().map(|(id, _, p)| {
        std::iter::once(id.clone())
            .chain(columns.iter().map(|c| p.get(*c).map(|v| v.to_string()).unwrap_or_default()))
            .collect::<Vec<_>>()
    });
    run.emit("probabilities.csv", &csv_bytes(&header, rows)?)
}

fn metric_rows(task: Task, m: &MetricsReport, split: &str, fold: Option<usize>) -> Vec<[String; 8]> {
    let fold = fold.map(|f| f.to_string()).unwrap_or_default();
    let mut rows: Vec<[String; 8]> = m
        .labels
        .iter()
        .map(|l| {
            [
                task.to_string(),
                l.label.clone(),
                l.precision.to_string(),
                l.recall.to_string(),
                l.f1.to_string(),
                l.support.to_string(),
                split.to_string(),
                fold.clone(),
            ]
        })
        .collect();
    let support: u64 = m.labels.iter().map(|l| l.support).sum();
    for (name, f1) in [("macro", m.macro_f1), ("micro", m.micro_f1)] {
        rows.push([
            task.to_string(),
            name.to_string(),
            String::new(),
            String::new(),
            f1.to_string(),
            support.to_string(),
            split.to_string(),
            fold.clone(),
        ]);
    }
    rows
}

pub fn evaluate(run: &mut Run, args: &EvaluateArgs) -> Result<()> {
    let corpus = load_docs(run, &args.docs)?;
    let (gold, _) = ingest_labels(run.input(&args.gold)?, LabelKind::Gold, &corpus)?;
    let (pred, _) = ingest_labels(run.input(&args.pred)?, LabelKind::Inferred, &corpus)?;
    let tasks: Vec<Task> = if args.task.is_empty() {
        Task::ALL.to_vec()
    } else {
        args.task.clone()
    };
    let mut rows = Vec::new();
    let mut exclusions = Vec::new();
    for task in tasks {
        let m = score(&gold, &pred, task)?;
        rows.extend(metric_rows(task, &m, &args.split, None));
        let f1 = m.f1_by_label();
        let excluded = apply_exclusion_rule(&f1, args.exclude_below);
        for (label, v) in &f1 {
            exclusions.push([
                task.to_string(),
                label.clone(),
                v.to_string(),
                excluded.contains(label).to_string(),
            ]);
        }
    }
    run.emit("metrics.csv", &csv_bytes(&METRICS_HEADER, rows)?)?;
    run.emit("exclusions.csv", &csv_bytes(&["task", "label", "f1", "excluded"], exclusions)?)
}

pub fn crossval(run: &mut Run, args: &CrossvalArgs) -> Result<()> {
    run.seed(args.seed);
    let labeled = load_labeled(run, &args.data, LabelKind::Gold)?;
    let report = cross_validate(
        &labeled,
        args.task,
        &config(&args.model),
        args.folds,
        args.test_fraction,
        args.seed,
        args.threshold,
    )?;
    let mut rows = Vec::new();
    for f in &report.folds {
        for w in &f.warnings {
            eprintln!("warning: fold {}: {w}", f.fold);
        }
        rows.extend(metric_rows(args.task, &f.dev, "dev", Some(f.fold)));
    }
    if let Some(test) = &report.test {
        rows.extend(metric_rows(args.task, test, "test", None));
    }
    run.emit("crossval.csv", &csv_bytes(&METRICS_HEADER, rows)?)?;

    let s = &report.summary;
    let summary = args
        .task
        .labels()
        .iter()
        .map(|l| (l.to_string(), s.f1_mean[*l], s.f1_stdev[*l]))
        .chain([
            ("macro".to_string(), s.macro_f1_mean, s.macro_f1_stdev),
            ("micro".to_string(), s.micro_f1_mean, s.micro_f1_stdev),
        ])
        .map(|(label, mean, sd)| [args.task.to_string(), label, mean.to_string(), sd.to_string()]);
    run.emit(
        "crossval_summary.csv",
        &csv_bytes(&["task", "label", "f1_mean", "f1_stdev"], summary)?,
    )?;

    let plan = &report.plan;
    let split_rows = plan
        .test
        .iter()
        .map(|id| [id.clone(), "test".to_string(), String::new()])
        .chain(plan.folds.iter().enumerate().flat_map(|(i, f)| {
            f.iter().map(move |id| [id.clone(), "train".to_string(), i.to_string()])
        }));
    run.emit("split.csv", &csv_bytes(&["doc_id", "partition", "fold"], split_rows)?)
}
