use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::design::{Dataset, DesignLayout, DesignSpec};
use super::holm::holm_bonferroni;
use crate::stats::{sigmoid, two_sided_p};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions {
    /// Convergence threshold on the max-norm of the mean score vector.
    pub tol: f64,
    pub max_iter: usize,
    /// Any |beta| beyond this is reported as quasi-separation.
    pub separation_limit: f64,
    /// Family-wise level for the Holm step-down.
    pub alpha: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-8,
            max_iter: 100,
            separation_limit: 15.0,
            alpha: 0.05,
        }
    }
}

/// Raw Newton-Raphson output on a numeric design.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitFit {
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub z: Vec<f64>,
    pub p: Vec<f64>,
    pub loglik: f64,
    /// Log-likelihood after each accepted step, starting from beta = 0.
    pub loglik_trace: Vec<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn loglik(x: &DMatrix<f64>, y: &[bool], beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter()
        .zip(y)
        .map(|(&e, &yi)| if yi { e } else { 0.0 } - softplus(e))
        .sum()
}

/// Score vector and Fisher information at `beta`.
fn score_and_information(
    x: &DMatrix<f64>,
    y: &[bool],
    beta: &DVector<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let (n, p) = x.shape();
    let eta = x * beta;
    let mut grad = DVector::zeros(p);
    let mut info = DMatrix::zeros(p, p);
    let mut row = vec![0.0; p];
    for i in 0..n {
        let mu = sigmoid(eta[i]);
        let w = mu * (1.0 - mu);
        let r = if y[i] { 1.0 } else { 0.0 } - mu;
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = x[(i, j)];
        }
        for j in 0..p {
            if row[j] == 0.0 {
                continue;
            }
            grad[j] += row[j] * r;
            let wj = w * row[j];
            for k in j..p {
                info[(j, k)] += wj * row[k];
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            info[(j, k)] = info[(k, j)];
        }
    }
    (grad, info)
}

/// Maximum-likelihood logistic fit. Each Newton step is halved until the
/// log-likelihood does not decrease.
pub fn fit_logit_matrix(
    x: &DMatrix<f64>,
    y: &[bool],
    names: &[String],
    opts: &FitOptions,
) -> Result<LogitFit> {
    let (n, p) = x.shape();
    if n != y.len() || names.len() != p {
        return Err(Error::InvalidInput(format!(
            "design is {n}x{p} but {} outcomes and {} names were given",
            y.len(),
            names.len()
        )));
    }
    if n == 0 {
        return Err(Error::Empty("no observations to fit".into()));
    }
    let positives = y.iter().filter(|v| **v).count();
    if positives == 0 || positives == n {
        return Err(Error::SingleClass(format!(
            "outcome has {positives} positives in {n} observations"
        )));
    }
    let mut beta = DVector::zeros(p);
    let mut ll = loglik(x, y, &beta);
    let mut trace = vec![ll];
    let mut iterations = 0;
    loop {
        let (grad, info) = score_and_information(x, y, &beta);
        let grad_norm = grad.amax() / n as f64;
        if grad_norm < opts.tol {
            // One more Newton step costs little and takes the estimate from
            // about tol / curvature to near machine precision.
            let chol = info.clone().cholesky().ok_or(Error::Singular)?;
            let polished = &beta + chol.solve(&grad);
            let polished_ll = loglik(x, y, &polished);
            let (grad, info) = if polished_ll >= ll {
                let (g, i) = score_and_information(x, y, &polished);
                if g.amax() / (n as f64) <= grad_norm {
                    beta = polished;
                    ll = polished_ll;
                    trace.push(ll);
                    (g, i)
                } else {
                    (grad, info)
                }
            } else {
                (grad, info)
            };
            let grad_norm = grad.amax() / n as f64;
            let inv = info.cholesky().ok_or(Error::Singular)?.inverse();
            let beta: Vec<f64> = beta.iter().copied().collect();
            let se: Vec<f64> = (0..p).map(|j| inv[(j, j)].max(0.0).sqrt()).collect();
            let z: Vec<f64> = beta.iter().zip(&se).map(|(b, s)| b / s).collect();
            let pv = z.iter().map(|&z| two_sided_p(z)).collect();
            return Ok(LogitFit {
                beta,
                se,
                z,
                p: pv,
                loglik: ll,
                loglik_trace: trace,
                iterations,
                grad_norm,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NotConverged {
                iterations,
                grad_norm,
            });
        }
        let step = info.cholesky().ok_or(Error::Singular)?.solve(&grad);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = &beta + &step * t;
            let cand_ll = loglik(x, y, &candidate);
            if cand_ll >= ll {
                accepted = Some((candidate, cand_ll));
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        let Some((next, next_ll)) = accepted else {
            // No ascent direction left at machine precision.
            return Err(Error::NotConverged {
                iterations,
                grad_norm,
            });
        };
        beta = next;
        ll = next_ll;
        trace.push(ll);
        if let Some(j) = (0..p).find(|&j| beta[j].abs() > opts.separation_limit) {
            return Err(Error::QuasiSeparation {
                column: names[j].clone(),
                limit: opts.separation_limit,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub factor: String,
    pub level: String,
    pub beta: f64,
    pub se: f64,
    pub z: f64,
    pub p_raw: f64,
    /// Holm-adjusted p; equals `p_raw` for the intercept.
    pub p_holm: f64,
    pub significant: bool,
}

/// Everything needed to re-evaluate a fitted model on new rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedModel {
    pub spec: DesignSpec,
    pub layout: DesignLayout,
    pub beta: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    pub outcome: String,
    pub intercept: Coefficient,
    pub coefficients: Vec<Coefficient>,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub n_obs: usize,
    pub n_positive: usize,
    #[serde(skip)]
    pub fitted: FittedModel,
}

impl RegressionResult {
    pub fn coefficient(&self, factor: &str, level: &str) -> Option<&Coefficient> {
        self.coefficients
            .iter()
            .find(|c| c.factor == factor && c.level == level)
    }
}

fn column_label(factor: &str, level: &str) -> String {
    if level.is_empty() {
        factor.to_string()
    } else {
        format!("{factor}:{level}")
    }
}

/// Fits `spec.outcome ~ factors` on `data`, with Holm adjustment over the
/// non-intercept coefficients of this model.
pub fn fit_logistic(data: &Dataset, spec: &DesignSpec, opts: &FitOptions) -> Result<RegressionResult> {
    let layout = DesignLayout::from_data(data, &spec.factors)?;
    let x = layout.matrix(data)?;
    let y = data.outcome(&spec.outcome)?;
    let columns = layout.column_names();
    let names: Vec<String> = columns.iter().map(|(f, l)| column_label(f, l)).collect();
    let fit = fit_logit_matrix(&x, y, &names, opts)?;
    let holm = holm_bonferroni(&fit.p[1..], opts.alpha)?;
    let coef = |j: usize, p_holm: f64, significant: bool| Coefficient {
        factor: columns[j].0.clone(),
        level: columns[j].1.clone(),
        beta: fit.beta[j],
        se: fit.se[j],
        z: fit.z[j],
        p_raw: fit.p[j],
        p_holm,
        significant,
    };
    let intercept = coef(0, fit.p[0], fit.p[0] <= opts.alpha);
    let coefficients = (1..columns.len())
        .map(|j| coef(j, holm.adjusted[j - 1], holm.reject[j - 1]))
        .collect();
    Ok(RegressionResult {
        outcome: spec.outcome.clone(),
        intercept,
        coefficients,
        loglik: fit.loglik,
        iterations: fit.iterations,
        converged: true,
        grad_norm: fit.grad_norm,
        n_obs: data.len(),
        n_positive: y.iter().filter(|v| **v).count(),
        fitted: FittedModel {
            spec: spec.clone(),
            layout,
            beta: fit.beta,
            converged: true,
        },
    })
}

/// Re-runs Holm over the coefficients of several models as one family.
pub fn apply_holm_jointly(results: &mut [RegressionResult], alpha: f64) -> Result<()> {
    let p: Vec<f64> = results
        .iter()
        .flat_map(|r| r.coefficients.iter().map(|c| c.p_raw))
        .collect();
    let holm = holm_bonferroni(&p, alpha)?;
    let mut k = 0;
    for r in results.iter_mut() {
        for c in r.coefficients.iter_mut() {
            c.p_holm = holm.adjusted[k];
            c.significant = holm.reject[k];
            k += 1;
        }
    }
    Ok(())
}
