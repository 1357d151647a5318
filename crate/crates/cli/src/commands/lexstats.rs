use std::collections::BTreeSet;

use anyhow::{bail, Context, Result};
use frameforge_core::corpus::{ingest_token_annotations, Issue, LabelKind, TokenStore, FRAME_FIELDS};
use frameforge_core::lexstats::{extract_features, rank_features, top_k, Comparison, FeatureSpec};

use super::{csv_bytes, load_labeled};
use crate::args::LexstatsArgs;
use crate::run::Run;

pub const HEADER: [&str; 10] = [
    "issue",
    "task",
    "feature_kind",
    "feature",
    "y_group",
    "y_bg",
    "delta",
    "sigma2",
    "z",
    "rank",
];

/// For each issue, framing field and feature kind: the top-k features of
/// messages carrying the field against all messages on the issue.
pub fn lexstats(run: &mut Run, args: &LexstatsArgs) -> Result<()> {
    for t in &args.task {
        if !FRAME_FIELDS.contains(&t.as_str()) {
            bail!("unknown framing field `{t}` (expected one of: {})", FRAME_FIELDS.join(", "));
        }
    }
    let labeled = load_labeled(run, &args.data, LabelKind::Inferred)?;
    let tokens = match &args.tokens {
        Some(p) => ingest_token_annotations(run.input(p)?)?,
        None => TokenStore::default(),
    };
    let issues: Vec<Issue> = if args.issue.is_empty() {
        labeled.iter().map(|r| r.doc.issue).collect::<BTreeSet<_>>().into_iter().collect()
    } else {
        args.issue.clone()
    };
    let comparison = if args.complement {
        Comparison::Complement
    } else {
        Comparison::Superset
    };

    let mut rows = Vec::new();
    for &kind in &args.kind {
        let mut spec = FeatureSpec::new(kind);
        spec.min_count = args.min_count;
        if kind.needs_parse() && args.tokens.is_none() {
            bail!("`{kind}` features need dependency parses (--tokens)");
        }
        let table = extract_features(labeled.iter().map(|r| &r.doc), &tokens, &spec)?;
        if !table.excluded.is_empty() {
            eprintln!("warning: {} documents without a parse skipped for {kind} features", table.excluded.len());
        }
        for &issue in &issues {
            let in_scope: Vec<_> = labeled
                .iter()
                .filter(|r| r.doc.issue == issue)
                .filter(|r| args.stance.is_none_or(|s| r.labels.stance == Some(s)))
                .collect();
            let background = table.totals(in_scope.iter().map(|r| r.doc.id.as_str()));
            for task in &args.task {
                let group = table.totals(
                    in_scope
                        .iter()
                        .filter(|r| r.labels.flag(task) == Some(true))
                        .map(|r| r.doc.id.as_str()),
                );
                let out = rank_features(&group, &background, comparison, args.kappa, args.min_count)
                    .with_context(|| format!("{issue} / {task} / {kind}"))?;
                for r in top_k(&out.results, args.k) {
                    rows.push([
                        issue.to_string(),
                        task.clone(),
                        kind.to_string(),
                        r.feature,
                        r.y_group.to_string(),
                        r.y_bg.to_string(),
                        r.delta.to_string(),
                        r.sigma2.to_string(),
                        r.z.to_string(),
                        r.rank.to_string(),
                    ]);
                }
            }
        }
    }
    run.emit("lexstats.csv", &csv_bytes(&HEADER, rows)?)
}
