use super::profile::{OscillatingProfile, ProfileFunction};
use crate::error::{Error, Result};
use crate::tensor_calculus::{compose_scalar, factorial, product_jets, DerivativeTable};

/// The flattening function
/// `h_ε(x̄, x_N) = g_ε(x̄) ((x_N + ε) / (g_ε(x̄) + ε))^{m+1}` for `x_N >= -ε`,
/// zero below; `x ↦ (x̄, x_N - h_ε(x))` maps the perturbed domain near the
/// top onto the flat one.
#[derive(Clone, Debug)]
pub struct HEpsMap {
    pub profile: OscillatingProfile,
    pub m: usize,
}

impl HEpsMap {
    pub fn new(profile: OscillatingProfile, m: usize) -> Self {
        HEpsMap { profile, m }
    }

    fn lift_x(&self, x: f64, cap: usize, shift: f64) -> DerivativeTable {
        DerivativeTable::from_fn(2, cap, |beta| {
            let (a, b) = (beta.exponents()[0], beta.exponents()[1]);
            if b > 0 {
                return 0.0;
            }
            self.profile.derivative(x, a) + if a == 0 { shift } else { 0.0 }
        })
    }

    /// Jets of `h_ε` at `(x̄, x_N)` with `-1 <= x_N <= g_ε(x̄)`.
    pub fn h_eps_jet(&self, point: [f64; 2], order_cap: usize) -> Result<DerivativeTable> {
        let [x, xn] = point;
        let eps = self.profile.epsilon;
        let g = self.profile.value(x);
        let tol = 1e-12 * (1.0 + g.abs());
        if !(xn >= -1.0 - tol && xn <= g + tol) {
            return Err(Error::Domain(format!("({x}, {xn}) lies outside the closed domain")));
        }
        if xn <= -eps {
            return Ok(DerivativeTable::zeros(2, order_cap));
        }
        let cap = order_cap;
        let gj = self.lift_x(x, cap, 0.0);
        let denom = self.lift_x(x, cap, eps);
        let u = denom.value();
        let recip: Vec<f64> = (0..=cap)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(k) / u.powi(k as i32 + 1)
            })
            .collect();
        let r = compose_scalar(&recip, &denom)?;
        let mut num = DerivativeTable::coordinate(&[x, xn], cap, 1);
        num.values_mut()[0] += eps;
        let s = product_jets(&num, &r)?;
        let q = self.m + 1;
        let sv = s.value();
        let power: Vec<f64> = (0..=cap)
            .map(|k| {
                if k > q {
                    0.0
                } else {
                    factorial(q) / factorial(q - k) * sv.powi((q - k) as i32)
                }
            })
            .collect();
        let sp = compose_scalar(&power, &s)?;
        product_jets(&gj, &sp)
    }

    /// `sup |D^l h_ε|` (largest entry among `|β| = l`) sampled over one
    /// period in `x̄` and the layer `-ε <= x_N <= g_ε(x̄)`.
    pub fn sampled_sup(&self, l: usize, samples: usize) -> Result<f64> {
        let eps = self.profile.epsilon;
        let mut sup: f64 = 0.0;
        for i in 0..samples {
            let x = eps * (i as f64 / samples as f64 - 0.5);
            let top = self.profile.value(x);
            for j in 0..=samples {
                let xn = -eps + (top + eps) * j as f64 / samples as f64;
                let jet = self.h_eps_jet([x, xn], l)?;
                for (beta, v) in jet.iter() {
                    if beta.order() == l {
                        sup = sup.max(v.abs());
                    }
                }
            }
        }
        Ok(sup)
    }
}
