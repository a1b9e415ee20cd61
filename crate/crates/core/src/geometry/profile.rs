use serde::{Deserialize, Serialize};

use super::trig::{sup_abs_periodic, TrigPolynomial};
use crate::error::{Error, Result};
use crate::tensor_calculus::DerivativeTable;

/// A boundary profile `x̄ ↦ g(x̄)` over a one-dimensional chart.
pub trait ProfileFunction {
    /// `g^{(n)}(x̄)`.
    fn derivative(&self, x: f64, n: usize) -> f64;

    /// Length of the shortest oscillation, if the profile oscillates.
    fn period(&self) -> Option<f64> {
        None
    }
}

/// A constant profile `g ≡ c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatProfile(pub f64);

impl ProfileFunction for FlatProfile {
    fn derivative(&self, _x: f64, n: usize) -> f64 {
        if n == 0 {
            self.0
        } else {
            0.0
        }
    }
}

/// The family `g_ε(x̄) = ε^α b(x̄/ε)` for a positive periodic trigonometric
/// polynomial `b` (planar case: `x̄` is scalar).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatingProfile {
    pub alpha: f64,
    pub epsilon: f64,
    #[serde(rename = "fourier")]
    pub b: TrigPolynomial,
}

impl OscillatingProfile {
    /// Validated constructor. `b ≡ 0` is accepted and describes the
    /// unperturbed domain; otherwise `b` must be positive.
    pub fn new(alpha: f64, epsilon: f64, b: TrigPolynomial) -> Result<Self> {
        let p = OscillatingProfile { alpha, epsilon, b };
        p.validate()?;
        Ok(p)
    }

    pub fn flat() -> Self {
        OscillatingProfile { alpha: 1.0, epsilon: 1.0, b: TrigPolynomial::zero() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Argument(format!("alpha = {} must be positive", self.alpha)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Argument(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !self.b.is_zero() {
            let min = self.b.min_value();
            if min <= 0.0 {
                return Err(Error::Argument(format!("profile b must be positive, min b = {min}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: OscillatingProfile = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }

    pub fn is_flat(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_nonconstant(&self) -> bool {
        self.b.is_nonconstant()
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        OscillatingProfile { epsilon, ..self.clone() }
    }

    /// `g_ε(x̄)`.
    pub fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// One-variable jet of `g_ε` at `x̄`.
    pub fn profile_jet(&self, x: f64, order_cap: usize) -> DerivativeTable {
        DerivativeTable::from_fn(1, order_cap, |beta| self.derivative(x, beta.order()))
    }

    /// `sup |D^n g_ε| = ε^{α-n} sup |b^{(n)}|`.
    pub fn sup_derivative(&self, n: usize) -> f64 {
        self.epsilon.powf(self.alpha - n as f64) * self.b.sup_abs_derivative(n)
    }

    /// Sampled `sup |D^n g_ε|` over one period (independent of the closed form).
    pub fn sampled_sup_derivative(&self, n: usize) -> f64 {
        let per = self.epsilon;
        let samples = 64 * self.b.max_mode().max(1) as usize;
        sup_abs_periodic(|x| self.derivative(x, n), -0.5 * per, 0.5 * per, samples)
    }
}

impl ProfileFunction for OscillatingProfile {
    fn derivative(&self, x: f64, n: usize) -> f64 {
        if self.b.is_zero() {
            return 0.0;
        }
        let e = self.epsilon;
        e.powf(self.alpha - n as f64) * self.b.derivative(x / e, n)
    }

    fn period(&self) -> Option<f64> {
        (self.b.max_mode() > 0).then(|| self.epsilon / self.b.max_mode() as f64)
    }
}

/// Profile difference `g_1 - g_2`.
pub struct ProfileDifference<'a>(pub &'a dyn ProfileFunction, pub &'a dyn ProfileFunction);

impl ProfileFunction for ProfileDifference<'_> {
    fn derivative(&self, x: f64, n: usize) -> f64 {
        self.0.derivative(x, n) - self.1.derivative(x, n)
    }

    fn period(&self) -> Option<f64> {
        match (self.0.period(), self.1.period()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// `max_{|β| <= h} sup_W |D^β (g_1 - g_2)|` on the chart `W = [a, b]`,
/// sampled with at least 64 points per oscillation and locally refined.
pub fn atlas_profile_distance(
    g1: &dyn ProfileFunction,
    g2: &dyn ProfileFunction,
    h: usize,
    m: usize,
    chart: (f64, f64),
) -> Result<f64> {
    if h > m {
        return Err(Error::Argument(format!("derivative order h = {h} exceeds m = {m}")));
    }
    let (a, b) = chart;
    if !(b > a) {
        return Err(Error::Argument(format!("empty chart [{a}, {b}]")));
    }
    let diff = ProfileDifference(g1, g2);
    let per = diff.period().unwrap_or(b - a);
    let samples = ((b - a) / per * 64.0).ceil().max(64.0) as usize;
    Ok((0..=h)
        .map(|n| sup_abs_periodic(|x| diff.derivative(x, n), a, b, samples))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let p = OscillatingProfile::new(1.5, 0.125, TrigPolynomial::parse("2+cos+0.3sin2").unwrap()).unwrap();
        let text = p.to_json();
        assert_eq!(text, r#"{"alpha":1.5,"epsilon":0.125,"fourier":[[0,2.0,0.0],[1,1.0,0.0],[2,0.0,0.3]]}"#);
        assert_eq!(OscillatingProfile::from_json(&text).unwrap(), p);
    }

    #[test]
    fn rejects_nonpositive_b() {
        assert!(OscillatingProfile::new(1.0, 0.1, TrigPolynomial::parse("cos").unwrap()).is_err());
        assert!(OscillatingProfile::new(1.0, 0.1, TrigPolynomial::zero()).is_ok());
    }

    #[test]
    fn sampled_sup_matches_closed_form() {
        let p = OscillatingProfile::new(2.0, 0.125, TrigPolynomial::parse("2+cos-0.4sin3").unwrap()).unwrap();
        for n in 0..=4 {
            let exact = p.sup_derivative(n);
            assert!((p.sampled_sup_derivative(n) - exact).abs() <= 1e-12 * exact);
        }
    }
}
