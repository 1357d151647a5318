use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HolmResult {
    pub adjusted: Vec<f64>,
    pub reject: Vec<bool>,
}

/// Holm's step-down adjustment. With p-values sorted ascending
/// (ties in input order), `adj_(i) = max_{j <= i} min(1, (m - j + 1) p_(j))`,
/// and a hypothesis is rejected when its adjusted p is at most `alpha`.
pub fn holm_bonferroni(p: &[f64], alpha: f64) -> Result<HolmResult> {
    if let Some(bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidInput(format!("p-value {bad} outside [0, 1]")));
    }
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        let scaled = ((m - rank) as f64 * p[i]).min(1.0);
        running = running.max(scaled);
        adjusted[i] = running;
    }
    let reject = adjusted.iter().map(|&a| a <= alpha).collect();
    Ok(HolmResult { adjusted, reject })
}
