use anyhow::{bail, Result};
use frameforge_core::alignment::{bootstrap_alignment, default_pairs, BootstrapOptions, GroupSpec};
use frameforge_core::corpus::{Issue, LabelKind, Stance};

use super::{csv_bytes, load_labeled};
use crate::args::AlignArgs;
use crate::run::Run;

pub const HEADER: [&str; 8] = [
    "group_a",
    "group_b",
    "kl_mean",
    "kl_ci_low",
    "kl_ci_high",
    "n_replicates",
    "sample_size",
    "seed",
];

/// `progressive`, `guns`, `progressive-guns` or `guns-progressive`.
pub fn parse_group(s: &str) -> Result<GroupSpec> {
    let mut issue = None;
    let mut stance = None;
    for part in s.split('-') {
        if let Ok(i) = part.parse::<Issue>() {
            if issue.replace(i).is_some() {
                bail!("group `{s}` names two issues");
            }
        } else if let Ok(st) = part.parse::<Stance>() {
            if stance.replace(st).is_some() {
                bail!("group `{s}` names two stances");
            }
        } else {
            bail!("`{part}` in group `{s}` is neither an issue nor a stance");
        }
    }
    Ok(GroupSpec::new(issue, stance))
}

pub fn align(run: &mut Run, args: &AlignArgs) -> Result<()> {
    run.seed(args.seed);
    let labeled = load_labeled(run, &args.data, LabelKind::Inferred)?;
    let pairs = if args.pairs.is_empty() {
        default_pairs()
    } else {
        args.pairs
            .iter()
            .map(|p| {
                let Some((a, b)) = p.split_once(':') else {
                    bail!("pair `{p}` should look like `a:b`");
                };
                Ok((parse_group(a)?, parse_group(b)?))
            })
            .collect::<Result<_>>()?
    };
    let opts = BootstrapOptions {
        n_replicates: args.replicates,
        sample_size: args.sample_size,
        symmetric: args.symmetric,
    };
    let mut rows = Vec::new();
    for (a, b) in &pairs {
        let r = bootstrap_alignment(
            (&a.name, &b.name),
            &a.select(&labeled),
            &b.select(&labeled),
            &opts,
            args.seed,
        )?;
        rows.push([
            r.group_a,
            r.group_b,
            r.kl_mean.to_string(),
            r.kl_ci_low.to_string(),
            r.kl_ci_high.to_string(),
            r.n_replicates.to_string(),
            r.sample_size.to_string(),
            r.seed.to_string(),
        ]);
    }
    run.emit("alignment.csv", &csv_bytes(&HEADER, rows)?)
}
