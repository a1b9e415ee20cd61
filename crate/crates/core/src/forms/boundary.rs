use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::tensor_calculus::{binomial, DerivativeTable, JetField, MultiIndex, Polynomial};

/// A constant-coefficient differential operator `Σ c_γ ∂^γ`, stored as its
/// symbol (a polynomial in `ξ`). Composition is multiplication of symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOperator {
    symbol: Polynomial,
}

impl DiffOperator {
    pub fn identity(dim: usize) -> Self {
        DiffOperator { symbol: Polynomial::constant(dim, 1.0) }
    }

    pub fn partial(dim: usize, axis: usize, order: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = order;
        DiffOperator { symbol: Polynomial::new(dim, vec![(MultiIndex::new(e), 1.0)]) }
    }

    /// Laplacian in the first `dims` coordinates of `R^dim`.
    pub fn laplacian_in(dim: usize, dims: usize) -> Self {
        let terms = (0..dims)
            .map(|k| {
                let mut e = vec![0; dim];
                e[k] = 2;
                (MultiIndex::new(e), 1.0)
            })
            .collect();
        DiffOperator { symbol: Polynomial::new(dim, terms) }
    }

    pub fn laplacian(dim: usize) -> Self {
        Self::laplacian_in(dim, dim)
    }

    /// Laplacian in the tangential variables `x_1 … x_{N-1}`.
    pub fn tangential_laplacian(dim: usize) -> Self {
        Self::laplacian_in(dim, dim - 1)
    }

    pub fn compose(&self, other: &DiffOperator) -> Self {
        DiffOperator { symbol: self.symbol.mul(&other.symbol) }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(JetField::dim(&self.symbol));
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        DiffOperator { symbol: self.symbol.scaled(s) }
    }

    pub fn add(&self, other: &DiffOperator) -> Self {
        DiffOperator { symbol: self.symbol.add(&other.symbol) }
    }

    pub fn order(&self) -> usize {
        self.symbol.degree()
    }

    pub fn terms(&self) -> &[(MultiIndex, f64)] {
        self.symbol.terms()
    }

    pub fn apply(&self, jet: &DerivativeTable) -> Result<f64> {
        if jet.order_cap() < self.order() {
            return Err(arg_err!(
                "operator of order {} applied to a jet of order {}",
                self.order(),
                jet.order_cap()
            ));
        }
        Ok(self.symbol.terms().iter().map(|(g, c)| c * jet.get(g)).sum())
    }
}

/// One term `c · Δ_{N-1}^a ∂_N^{t+1} Δ^b` of a flat-boundary Green operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryTerm {
    pub coefficient: i64,
    pub tangential_laplacian_power: usize,
    pub full_laplacian_power: usize,
    pub normal_derivative_order: usize,
}

/// The boundary operator `B_t` of order `2m - t - 1` pairing with `∂_N^t φ`
/// on the flat boundary `{x_N = 0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryOperatorSpec {
    pub m: usize,
    pub t: usize,
    pub terms: Vec<BoundaryTerm>,
}

pub fn boundary_operator_bt(m: usize, t: usize) -> Result<BoundaryOperatorSpec> {
    if m == 0 || t >= m {
        return Err(arg_err!("boundary operator B_t needs 0 <= t < m, got t = {t}, m = {m}"));
    }
    let sign = if (m - t - 1) % 2 == 0 { 1 } else { -1 };
    let terms = (t..m)
        .map(|l| BoundaryTerm {
            coefficient: sign * binomial(l, t).round() as i64,
            tangential_laplacian_power: l - t,
            full_laplacian_power: m - l - 1,
            normal_derivative_order: t + 1,
        })
        .collect();
    Ok(BoundaryOperatorSpec { m, t, terms })
}

impl BoundaryOperatorSpec {
    /// Expanded operator in `R^dim`, the normal being the last axis.
    pub fn expand(&self, dim: usize) -> DiffOperator {
        let lt = DiffOperator::tangential_laplacian(dim);
        let lf = DiffOperator::laplacian(dim);
        let mut out = DiffOperator::identity(dim).scaled(0.0);
        for term in &self.terms {
            let op = lt
                .pow(term.tangential_laplacian_power)
                .compose(&DiffOperator::partial(dim, dim - 1, term.normal_derivative_order))
                .compose(&lf.pow(term.full_laplacian_power))
                .scaled(term.coefficient as f64);
            out = out.add(&op);
        }
        out
    }

    /// Plain-text form: a header line `B m=<m> t=<t>` followed by one line
    /// per term, `coefficient tangential_power laplacian_power normal_order`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| arg_err!("empty operator text"))?;
        let mut m = None;
        let mut t = None;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("B") {
            return Err(arg_err!("operator text must start with `B`, got `{header}`"));
        }
        for kv in parts {
            let (k, v) = kv.split_once('=').ok_or_else(|| arg_err!("bad header field `{kv}`"))?;
            let v: usize = v.parse().map_err(|_| arg_err!("bad number in `{kv}`"))?;
            match k {
                "m" => m = Some(v),
                "t" => t = Some(v),
                _ => return Err(arg_err!("unknown header field `{k}`")),
            }
        }
        let (m, t) = (m.ok_or_else(|| arg_err!("missing m"))?, t.ok_or_else(|| arg_err!("missing t"))?);
        let mut terms = Vec::new();
        for line in lines {
            let nums: Vec<&str> = line.split_whitespace().collect();
            if nums.len() != 4 {
                return Err(arg_err!("term line needs 4 fields: `{line}`"));
            }
            let bad = || arg_err!("bad term line `{line}`");
            terms.push(BoundaryTerm {
                coefficient: nums[0].parse().map_err(|_| bad())?,
                tangential_laplacian_power: nums[1].parse().map_err(|_| bad())?,
                full_laplacian_power: nums[2].parse().map_err(|_| bad())?,
                normal_derivative_order: nums[3].parse().map_err(|_| bad())?,
            });
        }
        Ok(BoundaryOperatorSpec { m, t, terms })
    }
}

impl fmt::Display for BoundaryOperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "B m={} t={}", self.m, self.t)?;
        for term in &self.terms {
            writeln!(
                f,
                "{} {} {} {}",
                term.coefficient,
                term.tangential_laplacian_power,
                term.full_laplacian_power,
                term.normal_derivative_order
            )?;
        }
        Ok(())
    }
}
