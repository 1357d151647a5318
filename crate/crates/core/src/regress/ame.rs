use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::design::Dataset;
use super::logit::{fit_logit_matrix, FitOptions, FittedModel};
use crate::seed::{substream, BOOTSTRAP};
use crate::stats::{quantile_sorted, sigmoid};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmeResult {
    pub outcome: String,
    pub factor: String,
    pub level: String,
    pub ame: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Bootstrap replicates that produced a fit.
    pub n_bootstrap: usize,
}

/// Linear predictors for every row, and the design matrix's factor columns.
fn linear_predictors(beta: &[f64], x: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    (0..x.nrows())
        .map(|i| (0..x.ncols()).map(|j| x[(i, j)] * beta[j]).sum())
        .collect()
}

/// Mean over rows of P(y | factor = level) - P(y | factor = reference),
/// holding each row's other covariates fixed.
fn ame_on(
    beta: &[f64],
    x: &nalgebra::DMatrix<f64>,
    eta: &[f64],
    columns: &[(usize, &str)],
    level: &str,
) -> Result<f64> {
    let target = columns
        .iter()
        .find(|(_, l)| *l == level)
        .map(|(c, _)| *c)
        .ok_or_else(|| Error::InvalidInput(format!("level `{level}` is not in the design")))?;
    let n = eta.len();
    let total: f64 = (0..n)
        .map(|i| {
            let own: f64 = columns.iter().map(|&(c, _)| x[(i, c)] * beta[c]).sum();
            let base = eta[i] - own;
            sigmoid(base + beta[target]) - sigmoid(base)
        })
        .sum();
    Ok(total / n as f64)
}

fn check(model: &FittedModel) -> Result<()> {
    if !model.converged {
        return Err(Error::InvalidInput("model has not converged".into()));
    }
    if model.beta.len() != model.layout.n_columns() {
        return Err(Error::InvalidInput("coefficients do not match the design".into()));
    }
    Ok(())
}

/// Average marginal effect of switching `factor` from its reference to `level`.
pub fn ame_point(model: &FittedModel, data: &Dataset, factor: &str, level: &str) -> Result<f64> {
    check(model)?;
    let x = model.layout.matrix(data)?;
    let eta = linear_predictors(&model.beta, &x);
    let columns = model
        .layout
        .columns_of(factor)
        .ok_or_else(|| Error::InvalidInput(format!("factor `{factor}` is not in the design")))?;
    ame_on(&model.beta, &x, &eta, &columns, level)
}

/// AMEs for every non-reference level, with percentile bootstrap intervals.
/// Replicate `r` resamples rows with its own seeded stream and refits on the
/// original column layout; replicates whose fit fails are dropped.
pub fn average_marginal_effects(
    model: &FittedModel,
    data: &Dataset,
    opts: &FitOptions,
    n_bootstrap: usize,
    seed: u64,
) -> Result<Vec<AmeResult>> {
    check(model)?;
    let layout = &model.layout;
    let targets: Vec<(String, String)> = layout.column_names().into_iter().skip(1).collect();
    let estimate = |beta: &[f64], d: &Dataset| -> Result<Vec<f64>> {
        let x = layout.matrix(d)?;
        let eta = linear_predictors(beta, &x);
        targets
            .iter()
            .map(|(f, l)| {
                let cols = layout.columns_of(f).expect("layout column");
                ame_on(beta, &x, &eta, &cols, l)
            })
            .collect()
    };
    let point = estimate(&model.beta, data)?;

    let names: Vec<String> = layout
        .column_names()
        .iter()
        .map(|(f, l)| format!("{f}:{l}"))
        .collect();
    let n = data.len();
    let replicates: Vec<Option<Vec<f64>>> = (0..n_bootstrap)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, BOOTSTRAP, r as u64);
            let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let sample = data.resample(&idx);
            let x = layout.matrix(&sample).ok()?;
            let y = sample.outcome(&model.spec.outcome).ok()?;
            let fit = fit_logit_matrix(&x, y, &names, opts).ok()?;
            estimate(&fit.beta, &sample).ok()
        })
        .collect();
    let ok: Vec<&Vec<f64>> = replicates.iter().flatten().collect();

    Ok(targets
        .into_iter()
        .enumerate()
        .map(|(k, (factor, level))| {
            let ame = point[k];
            let (ci_low, ci_high) = if ok.is_empty() {
                (ame, ame)
            } else {
                let mut draws: Vec<f64> = ok.iter().map(|v| v[k]).collect();
                draws.sort_by(f64::total_cmp);
                // A skewed bootstrap can leave the point estimate outside the
                // percentile band; widen rather than report an interval that
                // excludes it.
                (
                    quantile_sorted(&draws, 0.025).min(ame),
                    quantile_sorted(&draws, 0.975).max(ame),
                )
            };
            AmeResult {
                outcome: model.spec.outcome.clone(),
                factor,
                level,
                ame,
                ci_low,
                ci_high,
                n_bootstrap: ok.len(),
            }
        })
        .collect())
}
