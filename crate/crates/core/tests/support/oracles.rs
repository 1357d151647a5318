//! Reference computations written directly from the textbook definitions,
//! sharing no code with the library.

#![allow(dead_code)]

/// Nominal alpha from ordered value pairs: within-unit pairs weighted by
/// 1/(m_u - 1) for D_o, all pairs of the pooled pairable values for D_e.
pub fn alpha_nominal(units: &[Vec<Option<u32>>]) -> Option<f64> {
    let mut pool = Vec::new();
    let mut observed = 0.0;
    for unit in units {
        let vals: Vec<u32> = unit.iter().flatten().copied().collect();
        let m = vals.len();
        if m < 2 {
            continue;
        }
        let mut unequal = 0usize;
        for i in 0..m {
            for j in 0..m {
                if i != j && vals[i] != vals[j] {
                    unequal += 1;
                }
            }
        }
        observed += unequal as f64 / (m - 1) as f64;
        pool.extend(vals);
    }
    let n = pool.len();
    if n == 0 {
        return None;
    }
    let mut expected_pairs = 0usize;
    for a in 0..n {
        for b in 0..n {
            if a != b && pool[a] != pool[b] {
                expected_pairs += 1;
            }
        }
    }
    if expected_pairs == 0 {
        return None;
    }
    let d_o = observed / n as f64;
    let d_e = expected_pairs as f64 / (n * (n - 1)) as f64;
    Some(1.0 - d_o / d_e)
}

/// `(delta, sigma2, z)` for one feature.
pub fn log_odds(y1: f64, n1: f64, y2: f64, n2: f64, y_prior: f64, n_prior: f64, kappa: f64) -> (f64, f64, f64) {
    let a = kappa * y_prior / n_prior;
    let l1 = ((y1 + a) / (n1 + kappa - y1 - a)).ln();
    let l2 = ((y2 + a) / (n2 + kappa - y2 - a)).ln();
    let delta = l1 - l2;
    let sigma2 = 1.0 / (y1 + a) + 1.0 / (y2 + a);
    (delta, sigma2, delta / sigma2.sqrt())
}

/// `(tp, fp, fn)` by direct counting.
pub fn confusion(gold: &[bool], pred: &[bool]) -> (u64, u64, u64) {
    let mut c = (0, 0, 0);
    for (g, p) in gold.iter().zip(pred) {
        match (g, p) {
            (true, true) => c.0 += 1,
            (false, true) => c.1 += 1,
            (true, false) => c.2 += 1,
            _ => {}
        }
    }
    c
}

/// Harmonic mean of precision and recall, with the conventions that an
/// empty label scores 1 and an undefined ratio alongside errors scores 0.
pub fn f1_via_pr(tp: u64, fp: u64, fn_: u64) -> f64 {
    if tp + fp + fn_ == 0 {
        return 1.0;
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Holm adjusted p-values by enumerating each hypothesis's step-down chain,
/// and rejections by the sequential procedure.
pub fn holm_enumerate(p: &[f64], alpha: f64) -> (Vec<f64>, Vec<bool>) {
    let m = p.len();
    // rank[i]: position of i in ascending order, ties by index.
    let rank: Vec<usize> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| p[j] < p[i] || (p[j] == p[i] && j < i))
                .count()
        })
        .collect();
    let adjusted = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| rank[j] <= rank[i])
                .map(|j| ((m - rank[j]) as f64 * p[j]).min(1.0))
                .fold(0.0, f64::max)
        })
        .collect();
    let mut by_rank: Vec<usize> = (0..m).collect();
    by_rank.sort_by_key(|&i| rank[i]);
    let mut reject = vec![false; m];
    for (k, &i) in by_rank.iter().enumerate() {
        if p[i] <= alpha / (m - k) as f64 {
            reject[i] = true;
        } else {
            break;
        }
    }
    (adjusted, reject)
}

fn sigma(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Logistic MLE by accelerated gradient ascent on the mean log-likelihood,
/// with a fixed 1/L step and gradient-based restarts.
pub fn logistic_gd(x: &[Vec<f64>], y: &[bool]) -> Vec<f64> {
    let n = x.len() as f64;
    let p = x[0].len();
    let lipschitz = 0.25 * x.iter().flatten().map(|v| v * v).sum::<f64>() / n;
    let step = 1.0 / lipschitz;
    let grad = |b: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; p];
        for (row, &yi) in x.iter().zip(y) {
            let eta: f64 = row.iter().zip(b).map(|(a, c)| a * c).sum();
            let r = if yi { 1.0 } else { 0.0 } - sigma(eta);
            for j in 0..p {
                g[j] += row[j] * r / n;
            }
        }
        g
    };
    let mut beta = vec![0.0; p];
    let mut prev = beta.clone();
    let mut t = 1.0f64;
    for _ in 0..2_000_000 {
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let mom = (t - 1.0) / t_next;
        let look: Vec<f64> = (0..p).map(|j| beta[j] + mom * (beta[j] - prev[j])).collect();
        let g = grad(&look);
        let next: Vec<f64> = (0..p).map(|j| look[j] + step * g[j]).collect();
        // Restart momentum when it points against the gradient.
        let against: f64 = (0..p).map(|j| g[j] * (next[j] - beta[j])).sum();
        prev = beta;
        beta = next;
        t = if against < 0.0 { 1.0 } else { t_next };
        if grad(&beta).iter().all(|v| v.abs() < 1e-13) {
            break;
        }
    }
    beta
}

/// Mean of sigma(b0 + b_level) - sigma(b0) over rows: the marginal effect in
/// a model whose only predictor is the factor itself.
pub fn single_factor_ame(b0: f64, b_level: f64) -> f64 {
    sigma(b0 + b_level) - sigma(b0)
}
