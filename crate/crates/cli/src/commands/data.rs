use std::collections::BTreeSet;

use anyhow::{bail, Context, Result};
use frameforge_core::agreement::{krippendorff_alpha, read_wide_csv, Metric};
use frameforge_core::corpus::{
    dataset_stats, ingest_documents, ingest_labels, ingest_manifest, ingest_token_annotations,
    write_documents, IngestOptions, LabelKind,
};

use super::{csv_bytes, load_labeled};
use crate::args::{AgreementArgs, IngestArgs, LabeledArgs, StatsArgs, ValidateArgs};
use crate::run::Run;

pub fn ingest(run: &mut Run, args: &IngestArgs) -> Result<()> {
    let (corpus, report) = ingest_documents(
        run.input(&args.docs.docs)?,
        IngestOptions {
            lenient: args.docs.lenient,
        },
    )?;
    let mut normalized = Vec::new();
    write_documents(&corpus, &mut normalized)?;
    run.emit("documents.jsonl", &normalized)?;
    run.emit(
        "rejected.csv",
        &csv_bytes(
            &["line", "reason"],
            report.rejected.iter().map(|r| [r.line.to_string(), r.reason.clone()]),
        )?,
    )?;
    eprintln!("{} documents accepted, {} rejected", report.accepted, report.rejected.len());
    Ok(())
}

pub fn validate(run: &mut Run, args: &ValidateArgs) -> Result<()> {
    let mut issues: Vec<[String; 5]> = Vec::new();
    let (corpus, report) = ingest_documents(
        run.input(&args.docs.docs)?,
        IngestOptions {
            lenient: args.docs.lenient,
        },
    )?;
    let docs_name = args.docs.docs.display().to_string();
    for r in &report.rejected {
        issues.push([docs_name.clone(), r.line.to_string(), String::new(), "warning".into(), r.reason.clone()]);
    }
    if let Some(labels) = &args.labels {
        let kind = args.label_kind.map(LabelKind::from).unwrap_or(LabelKind::Gold);
        // Read leniently so every violation is listed, then grade by kind.
        let (_, report) = ingest_labels(run.input(labels)?, LabelKind::Inferred, &corpus)?;
        let severity = if kind == LabelKind::Gold { "error" } else { "warning" };
        for (line, id, v) in &report.warnings {
            issues.push([labels.display().to_string(), line.to_string(), id.clone(), severity.into(), v.to_string()]);
        }
    }
    if let Some(tokens) = &args.tokens {
        let store = ingest_token_annotations(run.input(tokens)?)?;
        for id in store.unparsed(&corpus) {
            issues.push([tokens.display().to_string(), String::new(), id, "warning".into(), "document has no parse".into()]);
        }
        let known: BTreeSet<&str> = corpus.iter().map(|d| d.id.as_str()).collect();
        for id in store.doc_ids().filter(|id| !known.contains(id)) {
            issues.push([tokens.display().to_string(), String::new(), id.to_string(), "warning".into(), "parse for unknown document".into()]);
        }
    }
    if let Some(manifest) = &args.manifest {
        let m = ingest_manifest(run.input(manifest)?)?;
        for d in corpus.iter().filter(|d| !m.covers(d.issue, d.date())) {
            issues.push([
                manifest.display().to_string(),
                String::new(),
                d.id.clone(),
                "warning".into(),
                format!("{} document dated {} is outside the declared months", d.issue, d.date()),
            ]);
        }
    }
    let errors = issues.iter().filter(|i| i[3] == "error").count();
    eprintln!("{} documents checked, {} issues", corpus.len(), issues.len());
    run.emit(
        "validation.csv",
        &csv_bytes(&["source", "line", "id", "severity", "message"], issues)?,
    )?;
    if errors > 0 {
        bail!("{errors} gold label rows violate the coding logic");
    }
    Ok(())
}

pub fn stats(run: &mut Run, args: &StatsArgs) -> Result<()> {
    if args.docs.is_none() && args.manifest.is_none() {
        bail!("stats needs --docs with --labels, or --manifest");
    }
    if let (Some(docs), Some(labels)) = (&args.docs, &args.labels) {
        let labeled = load_labeled(
            run,
            &LabeledArgs {
                docs: crate::args::DocsArgs {
                    docs: docs.clone(),
                    lenient: args.lenient,
                },
                labels: labels.clone(),
                label_kind: args.label_kind,
            },
            LabelKind::Gold,
        )?;
        let report = dataset_stats(&labeled)?;
        let mut rows = Vec::new();
        let groups = report
            .per_issue
            .iter()
            .map(|(i, s)| (i.to_string(), s))
            .chain(std::iter::once(("all".to_string(), &report.overall)));
        for (issue, s) in groups {
            for (metric, value) in s.metrics() {
                rows.push([issue.clone(), metric, value.to_string()]);
            }
        }
        run.emit("stats.csv", &csv_bytes(&["issue", "metric", "value"], rows)?)?;
    }
    if let Some(path) = &args.manifest {
        let summary = ingest_manifest(run.input(path)?)?.summarize();
        let rows = summary
            .per_issue
            .iter()
            .map(|(i, c)| [i.to_string(), c.to_string()])
            .chain(std::iter::once(["all".to_string(), summary.total.to_string()]));
        run.emit("manifest_summary.csv", &csv_bytes(&["issue", "count"], rows)?)?;
    }
    Ok(())
}

pub fn agreement(run: &mut Run, args: &AgreementArgs) -> Result<()> {
    let mut rows = Vec::new();
    for path in &args.inputs {
        let category = path
            .file_stem()
            .and_then(|s| s.to_str())
            .with_context(|| format!("cannot name a category after {}", path.display()))?
            .to_string();
        let matrix = read_wide_csv(run.input(path)?)?;
        let r = krippendorff_alpha(&matrix, Metric::Nominal).with_context(|| format!("category `{category}`"))?;
        rows.push([
            category,
            r.alpha.to_string(),
            r.observed_disagreement.to_string(),
            r.expected_disagreement.to_string(),
            r.n_pairable.to_string(),
            matrix.items.len().to_string(),
            matrix.annotators.len().to_string(),
        ]);
    }
    run.emit(
        "agreement.csv",
        &csv_bytes(
            &[
                "category",
                "alpha",
                "observed_disagreement",
                "expected_disagreement",
                "n_pairable",
                "n_items",
                "n_annotators",
            ],
            rows,
        )?,
    )
}
