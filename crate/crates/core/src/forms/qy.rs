use serde::Serialize;

use super::weights::frobenius_weights;
use crate::error::{arg_err, Result};
use crate::spline::TensorQuadrature;
use crate::tensor_calculus::{binomial, factorial, JetField, MultiIndex};

/// One summand `C(m, l+1) · y_N^{l-1}/(l-1)! · D^{l+1}(∂_N^{m-l-1} f) : D^{l+1} g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QYTerm {
    pub l: usize,
    pub binomial: f64,
    pub weight_power: usize,
    pub weight_factorial: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QYSpec {
    pub m: usize,
    pub terms: Vec<QYTerm>,
}

pub fn qy_spec(m: usize) -> QYSpec {
    let terms = (1..m)
        .map(|l| QYTerm {
            l,
            binomial: binomial(m, l + 1),
            weight_power: l - 1,
            weight_factorial: factorial(l - 1),
        })
        .collect();
    QYSpec { m, terms }
}

/// `q_Y(f, g)` integrated with `quad` over `Y × (-1, 0)` (last axis is `y_N`).
pub fn qy_evaluate(m: usize, f: &dyn JetField, g: &dyn JetField, quad: &TensorQuadrature) -> Result<f64> {
    let d = quad.dim();
    if f.dim() != d || g.dim() != d {
        return Err(arg_err!("q_Y: fields and quadrature disagree on the dimension"));
    }
    for (name, field) in [("f", f), ("g", g)] {
        if let Some(cap) = field.max_order() {
            if cap < m {
                return Err(arg_err!("q_Y: {name} provides jets up to order {cap}, need {m}"));
            }
        }
    }
    let spec = qy_spec(m);
    let tables: Vec<_> = spec
        .terms
        .iter()
        .map(|t| {
            let w = frobenius_weights(t.l + 1, d);
            let shift = MultiIndex::unit(d, d - 1);
            let shifted: Vec<(MultiIndex, MultiIndex, f64)> = w
                .weights
                .iter()
                .map(|(g, wt)| {
                    let mut s = g.clone();
                    for _ in 0..(m - t.l - 1) {
                        s = s.add(&shift);
                    }
                    (s, g.clone(), *wt)
                })
                .collect();
            (t, shifted)
        })
        .collect();
    let mut total = 0.0;
    quad.for_each(|x, w| {
        if tables.is_empty() {
            return;
        }
        let fj = f.jet(x, m);
        let gj = g.jet(x, m);
        let yn = x[d - 1];
        for (t, shifted) in &tables {
            let weight = t.binomial * yn.powi(t.weight_power as i32) / t.weight_factorial;
            let contraction: f64 = shifted.iter().map(|(fs, gs, wt)| wt * fj.get(fs) * gj.get(gs)).sum();
            total += w * weight * contraction;
        }
    });
    Ok(total)
}
