use serde::Serialize;

use super::profile::{OscillatingProfile, ProfileDifference, ProfileFunction};
use super::trig::sup_abs_periodic;
use crate::error::{arg_err, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Stable,
    Critical,
    Degenerate,
    CriterionInapplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub regime: Regime,
    pub threshold: f64,
    pub details: String,
}

const ALPHA_TOL: f64 = 1e-12;

/// Regime of `(-Δ)^m + I` on `W^{m,2} ∩ W^{k,2}_0` under perturbations
/// `ε^α b(x̄/ε)`. Stability holds above `m - k + 1/2`; for `k = m - 1` the
/// threshold `3/2` separates degeneration to Dirichlet conditions from the
/// critical strange-term regime.
pub fn classify_stability(m: usize, k: usize, alpha: f64) -> Result<StabilityVerdict> {
    if m < 2 {
        return Err(arg_err!("m = {m}: intermediate conditions need m >= 2"));
    }
    if k == 0 || k >= m {
        return Err(arg_err!("k = {k} must satisfy 1 <= k <= m - 1 = {}", m - 1));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(arg_err!("alpha = {alpha} must be positive"));
    }
    let threshold = m as f64 - k as f64 + 0.5;
    let (regime, details) = if alpha > threshold + ALPHA_TOL {
        (Regime::Stable, format!("alpha = {alpha} > {threshold}: spectra converge to the unperturbed problem"))
    } else if k + 1 == m {
        if (alpha - threshold).abs() <= ALPHA_TOL {
            (
                Regime::Critical,
                "alpha = 3/2: limit has the boundary condition d^m u + K d^(m-1) u = 0".to_string(),
            )
        } else {
            (Regime::Degenerate, format!("alpha = {alpha} < 3/2: limit has Dirichlet conditions on the oscillating part"))
        }
    } else {
        (
            Regime::CriterionInapplicable,
            format!("alpha = {alpha} <= {threshold} with k < m - 1: no limit is identified"),
        )
    };
    Ok(StabilityVerdict { regime, threshold, details })
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 || pts.len() != xs.len() {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Quotients of one derivative order across the family.
#[derive(Clone, Debug, Serialize)]
pub struct RateRow {
    pub order: usize,
    /// `κ_ε` exponent `m - |β| - k + 1/2`.
    pub kappa_power: f64,
    pub quotients: Vec<f64>,
    /// Fitted slope of the quotients against `ε`; `None` when all vanish.
    pub slope: Option<f64>,
    pub vanishing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatesReport {
    pub epsilons: Vec<f64>,
    pub rows: Vec<RateRow>,
    pub satisfied: bool,
}

/// Exponent of `ε` in `‖D^β g_ε‖_∞ / κ_ε^{m-|β|-k+1/2}` for the family
/// `g_ε = ε^α b(·/ε)` and `κ_ε = ε^{αθ}‖b‖_∞`.
pub fn predicted_rate(alpha: f64, theta: f64, m: usize, k: usize, order: usize) -> f64 {
    alpha - order as f64 - alpha * theta * (m as f64 - order as f64 - k as f64 + 0.5)
}

/// Limit quotients `‖D^β(g_ε - g)‖_∞ / κ_ε^{m-|β|-k+1/2}` for every order in
/// `orders`, with fitted log-log slopes. The criterion holds when all
/// quotients tend to zero (positive slopes or identically zero).
pub fn criterion_rates(
    family: &[OscillatingProfile],
    limit: &dyn ProfileFunction,
    kappa: &[f64],
    m: usize,
    k: usize,
    orders: &[usize],
) -> Result<RatesReport> {
    if family.len() != kappa.len() || family.is_empty() {
        return Err(arg_err!("need one kappa per family member"));
    }
    if let Some(&o) = orders.iter().find(|&&o| o > m) {
        return Err(arg_err!("derivative order {o} exceeds m = {m}"));
    }
    let sup_of = |g: &OscillatingProfile, n: usize| {
        let diff = ProfileDifference(g, limit);
        let per = diff.period().unwrap_or(g.epsilon);
        sup_abs_periodic(|x| diff.derivative(x, n), -0.5 * g.epsilon, 0.5 * g.epsilon, (64.0 * g.epsilon / per) as usize)
    };
    for (g, &kap) in family.iter().zip(kappa) {
        let s0 = sup_of(g, 0);
        if !(kap > s0) {
            return Err(Error::Precondition(format!(
                "kappa = {kap} does not exceed sup|g_eps - g| = {s0} at eps = {}",
                g.epsilon
            )));
        }
    }
    let epsilons: Vec<f64> = family.iter().map(|g| g.epsilon).collect();
    let rows: Vec<RateRow> = orders
        .iter()
        .map(|&order| {
            let kappa_power = m as f64 - order as f64 - k as f64 + 0.5;
            let quotients: Vec<f64> = family
                .iter()
                .zip(kappa)
                .map(|(g, &kap)| sup_of(g, order) / kap.powf(kappa_power))
                .collect();
            let vanishing = quotients.iter().all(|&q| q == 0.0);
            let slope = fit_loglog_slope(&epsilons, &quotients);
            RateRow { order, kappa_power, quotients, slope, vanishing }
        })
        .collect();
    let satisfied = rows.iter().all(|r| r.vanishing || r.slope.is_some_and(|s| s > 0.0));
    Ok(RatesReport { epsilons, rows, satisfied })
}
