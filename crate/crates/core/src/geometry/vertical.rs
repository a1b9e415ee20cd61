use super::profile::{OscillatingProfile, ProfileFunction};
use crate::error::{arg_err, Error, Result};
use crate::tensor_calculus::{
    compose_scalar, faa_di_bruno_coefficients, faa_di_bruno_compose, factorial, jet_layout, product_jets,
    DerivativeTable, MultiIndex,
};

/// The graph map `ℓ(x̄, t) = t (1 + g(x̄)) + g(x̄)` taking the reference strip
/// `t ∈ (-1, 0)` onto `-1 < x_N < g(x̄)`, with inverse
/// `τ(x̄, x_N) = (x_N - g(x̄)) / (1 + g(x̄))`.
#[derive(Clone, Debug)]
pub struct VerticalMap {
    profile: OscillatingProfile,
}

/// Jets of both directions of the map at corresponding points.
#[derive(Clone, Debug)]
pub struct VerticalJets {
    /// Components `(x̄, ℓ)` as functions of `(x̄, t)`.
    pub forward: [DerivativeTable; 2],
    /// Components `(x̄, τ)` as functions of `(x̄, x_N)`.
    pub inverse: [DerivativeTable; 2],
}

impl VerticalMap {
    pub fn new(profile: OscillatingProfile) -> Self {
        VerticalMap { profile }
    }

    pub fn identity() -> Self {
        VerticalMap { profile: OscillatingProfile::flat() }
    }

    pub fn profile(&self) -> &OscillatingProfile {
        &self.profile
    }

    fn lift(&self, x: f64) -> Result<f64> {
        let g = self.profile.value(x);
        if 1.0 + g <= 0.0 {
            return Err(Error::Geometry(format!("1 + g = {} at x = {x}", 1.0 + g)));
        }
        Ok(g)
    }

    pub fn ell(&self, x: f64, t: f64) -> Result<f64> {
        let g = self.lift(x)?;
        Ok(t * (1.0 + g) + g)
    }

    pub fn tau(&self, x: f64, xn: f64) -> Result<f64> {
        let g = self.lift(x)?;
        Ok((xn - g) / (1.0 + g))
    }

    /// `∂ℓ/∂t = 1 + g(x̄)`, the Jacobian determinant.
    pub fn jacobian(&self, x: f64) -> Result<f64> {
        Ok(1.0 + self.lift(x)?)
    }

    pub fn forward_jets(&self, x: f64, t: f64, cap: usize) -> Result<[DerivativeTable; 2]> {
        self.lift(x)?;
        let p = &self.profile;
        let ell = DerivativeTable::from_fn(2, cap, |beta| {
            let (a, b) = (beta.exponents()[0], beta.exponents()[1]);
            match (a, b) {
                (0, 0) => t + (t + 1.0) * p.derivative(x, 0),
                (a, 0) => (t + 1.0) * p.derivative(x, a),
                (0, 1) => 1.0 + p.derivative(x, 0),
                (a, 1) => p.derivative(x, a),
                _ => 0.0,
            }
        });
        Ok([DerivativeTable::coordinate(&[x, t], cap, 0), ell])
    }

    pub fn inverse_jets(&self, x: f64, xn: f64, cap: usize) -> Result<[DerivativeTable; 2]> {
        self.lift(x)?;
        let p = &self.profile;
        let one_plus_g = DerivativeTable::from_fn(1, cap, |beta| {
            let n = beta.order();
            p.derivative(x, n) + if n == 0 { 1.0 } else { 0.0 }
        });
        let u = one_plus_g.value();
        // derivatives of s ↦ 1/s
        let recip: Vec<f64> = (0..=cap)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(k) / u.powi(k as i32 + 1)
            })
            .collect();
        let r1 = compose_scalar(&recip, &one_plus_g)?;
        let r = DerivativeTable::from_fn(2, cap, |beta| {
            if beta.exponents()[1] == 0 {
                r1.get_exps(&[beta.exponents()[0]])
            } else {
                0.0
            }
        });
        let num = DerivativeTable::from_fn(2, cap, |beta| match (beta.exponents()[0], beta.exponents()[1]) {
            (0, 0) => xn - p.derivative(x, 0),
            (a, 0) => -p.derivative(x, a),
            (0, 1) => 1.0,
            _ => 0.0,
        });
        let tau = product_jets(&num, &r)?;
        Ok([DerivativeTable::coordinate(&[x, xn], cap, 0), tau])
    }

    /// Jets of `ℓ` at `(x̄, t)` and of `τ` at the image point.
    pub fn vertical_map_jet(&self, x: f64, t: f64, cap: usize) -> Result<VerticalJets> {
        let forward = self.forward_jets(x, t, cap)?;
        let xn = self.ell(x, t)?;
        let inverse = self.inverse_jets(x, xn, cap)?;
        Ok(VerticalJets { forward, inverse })
    }
}

/// `D^α (φ∘Φ)(x)` from the jets of `φ` at `Φ(x)` and of the components of `Φ` at `x`.
pub fn pullback_jet(phi_jets: &DerivativeTable, map_jets: &[DerivativeTable], alpha: &MultiIndex) -> Result<f64> {
    let n = alpha.order();
    if phi_jets.order_cap() < n || map_jets.iter().any(|t| t.order_cap() < n) {
        return Err(arg_err!("pullback of order {n} needs jets of at least that order"));
    }
    faa_di_bruno_compose(&alpha.to_tuple(), phi_jets, map_jets)
}

/// Linear map from reference jets to physical jets of `φ̂ ∘ Ψ`, where the
/// components of `Ψ` are given by `map_jets`. Row `i` belongs to the
/// `i`-th multi-index of the output layout.
#[derive(Clone, Debug)]
pub struct ChainMatrix {
    cap: usize,
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl ChainMatrix {
    pub fn new(map_jets: &[DerivativeTable], cap: usize) -> Result<Self> {
        let dim = map_jets.first().map(|t| t.dim()).ok_or_else(|| arg_err!("empty map"))?;
        let layout = jet_layout(dim, cap);
        let rows = layout
            .indices()
            .iter()
            .map(|alpha| faa_di_bruno_coefficients(&alpha.to_tuple(), map_jets))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChainMatrix { cap, dim, rows })
    }

    pub fn apply(&self, reference: &DerivativeTable) -> DerivativeTable {
        let mut out = DerivativeTable::zeros(self.dim, self.cap);
        let r = reference.values();
        for (o, row) in out.values_mut().iter_mut().zip(&self.rows) {
            *o = row.iter().zip(r).map(|(c, v)| c * v).sum();
        }
        out
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}
