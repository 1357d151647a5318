use anyhow::{bail, Context, Result};
use frameforge_core::corpus::{ingest_token_annotations, LabelKind, TokenStore};
use frameforge_core::lexstats::build_pronoun_dataset;
use frameforge_core::regress::{
    apply_holm_jointly, average_marginal_effects, fit_logistic, fit_pronoun_models, pronoun_dataset,
    socio_dataset, socio_design, AmeResult, Dataset, FitOptions, RegressionResult, OUTCOMES,
};
use rayon::prelude::*;

use super::{csv_bytes, load_labeled};
use crate::args::RegressArgs;
use crate::run::Run;

pub const HEADER: [&str; 12] = [
    "outcome",
    "factor",
    "level",
    "beta",
    "se",
    "z",
    "p_raw",
    "p_holm",
    "significant",
    "ame",
    "ame_ci_low",
    "ame_ci_high",
];

pub const MODELS_HEADER: [&str; 7] = ["outcome", "n_obs", "n_positive", "loglik", "iterations", "converged", "grad_norm"];

fn coefficient_rows(fits: &[(RegressionResult, Vec<AmeResult>)]) -> Vec<[String; 12]> {
    let mut rows = Vec::new();
    for (r, ames) in fits {
        for c in &r.coefficients {
            let ame = ames
                .iter()
                .find(|a| a.factor == c.factor && a.level == c.level)
                .expect("one AME per coefficient");
            rows.push([
                r.outcome.clone(),
                c.factor.clone(),
                c.level.clone(),
                c.beta.to_string(),
                c.se.to_string(),
                c.z.to_string(),
                c.p_raw.to_string(),
                c.p_holm.to_string(),
                c.significant.to_string(),
                ame.ame.to_string(),
                ame.ci_low.to_string(),
                ame.ci_high.to_string(),
            ]);
        }
    }
    rows
}

fn model_rows(fits: &[(RegressionResult, Vec<AmeResult>)]) -> Vec<[String; 7]> {
    fits.iter()
        .map(|(r, _)| {
            [
                r.outcome.clone(),
                r.n_obs.to_string(),
                r.n_positive.to_string(),
                r.loglik.to_string(),
                r.iterations.to_string(),
                r.converged.to_string(),
                r.grad_norm.to_string(),
            ]
        })
        .collect()
}

fn with_ames(
    fits: Vec<RegressionResult>,
    data: &Dataset,
    opts: &FitOptions,
    args: &RegressArgs,
) -> Result<Vec<(RegressionResult, Vec<AmeResult>)>> {
    fits.into_par_iter()
        .map(|r| {
            let ames = average_marginal_effects(&r.fitted, data, opts, args.bootstrap, args.seed)
                .with_context(|| format!("marginal effects for `{}`", r.outcome))?;
            Ok((r, ames))
        })
        .collect()
}

pub fn regress(run: &mut Run, args: &RegressArgs) -> Result<()> {
    run.seed(args.seed);
    let labeled = load_labeled(run, &args.data, LabelKind::Inferred)?;
    let opts = FitOptions {
        tol: args.tol,
        max_iter: args.max_iter,
        alpha: args.alpha,
        ..FitOptions::default()
    };

    let (name, data, mut fits) = if args.pronouns {
        let tokens = match &args.tokens {
            Some(p) => ingest_token_annotations(run.input(p)?)?,
            None => TokenStore::default(),
        };
        let records = build_pronoun_dataset(&labeled, &tokens);
        eprintln!("{} pronoun tokens", records.len());
        let fits = fit_pronoun_models(&records, &opts).context("pronoun models")?;
        let data = pronoun_dataset(&records)?;
        ("pronoun_regress", data, fits.into_iter().map(|(_, r)| r).collect::<Vec<_>>())
    } else {
        let outcomes: Vec<String> = if args.outcome.is_empty() {
            OUTCOMES.iter().map(|s| s.to_string()).collect()
        } else {
            args.outcome.clone()
        };
        for o in &outcomes {
            if !OUTCOMES.contains(&o.as_str()) {
                bail!("unknown outcome `{o}` (expected one of: {})", OUTCOMES.join(", "));
            }
        }
        let include_stance = !args.no_stance;
        let data = socio_dataset(&labeled, include_stance)?;
        let fits = outcomes
            .par_iter()
            .map(|o| {
                fit_logistic(&data, &socio_design(o, include_stance), &opts)
                    .with_context(|| format!("outcome `{o}`"))
            })
            .collect::<Result<Vec<_>>>()?;
        ("regress", data, fits)
    };
    if args.joint_holm {
        apply_holm_jointly(&mut fits, args.alpha)?;
    }
    let fits = with_ames(fits, &data, &opts, args)?;
    run.emit(&format!("{name}.csv"), &csv_bytes(&HEADER, coefficient_rows(&fits))?)?;
    run.emit(&format!("{name}_models.csv"), &csv_bytes(&MODELS_HEADER, model_rows(&fits))?)
}
