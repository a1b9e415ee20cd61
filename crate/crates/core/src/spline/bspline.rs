use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KnotKind {
    /// Open knot vector with `p + 1` repeated end knots.
    Clamped,
    /// Uniform knots continued periodically; coefficients wrap around.
    Periodic,
}

/// Univariate B-spline basis of degree `p` on `[a, b]`.
#[derive(Clone, Debug, Serialize)]
pub struct BSplineBasis1D {
    degree: usize,
    kind: KnotKind,
    /// Element boundaries `a = x_0 < … < x_E = b`.
    breakpoints: Vec<f64>,
    /// Clamped: the full open knot vector. Periodic: unused.
    knots: Vec<f64>,
}

/// Nonzero basis functions at one point and their derivatives.
#[derive(Clone, Debug)]
pub struct BasisEval {
    /// Global indices of the `p + 1` active functions.
    pub indices: Vec<usize>,
    /// `ders[k][j]`: `k`-th derivative of active function `j`.
    pub ders: Vec<Vec<f64>>,
}

impl BSplineBasis1D {
    pub fn clamped(degree: usize, breakpoints: Vec<f64>) -> Result<Self> {
        check_breaks(&breakpoints)?;
        let (a, b) = (breakpoints[0], *breakpoints.last().unwrap());
        let mut knots = vec![a; degree + 1];
        knots.extend_from_slice(&breakpoints[1..breakpoints.len() - 1]);
        knots.extend(std::iter::repeat_n(b, degree + 1));
        Ok(BSplineBasis1D { degree, kind: KnotKind::Clamped, breakpoints, knots })
    }

    pub fn clamped_uniform(a: f64, b: f64, degree: usize, elements: usize) -> Result<Self> {
        Self::clamped(degree, uniform_breaks(a, b, elements)?)
    }

    /// Clamped basis whose element sizes shrink geometrically by `ratio`
    /// toward `b` (`ratio < 1`) or toward `a` (`ratio > 1`).
    pub fn clamped_graded(a: f64, b: f64, degree: usize, elements: usize, ratio: f64) -> Result<Self> {
        Self::clamped(degree, graded_breaks(a, b, elements, ratio)?)
    }

    pub fn periodic_uniform(a: f64, b: f64, degree: usize, elements: usize) -> Result<Self> {
        if elements < degree + 1 {
            return Err(Error::Configuration(format!(
                "periodic basis of degree {degree} needs at least {} elements",
                degree + 1
            )));
        }
        let breakpoints = uniform_breaks(a, b, elements)?;
        Ok(BSplineBasis1D { degree, kind: KnotKind::Periodic, breakpoints, knots: Vec::new() })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> KnotKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn n_elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn len(&self) -> usize {
        match self.kind {
            KnotKind::Clamped => self.n_elements() + self.degree,
            KnotKind::Periodic => self.n_elements(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Index of the element containing `x` (right end belongs to the last).
    pub fn element_of(&self, x: f64) -> usize {
        let e = self.n_elements();
        let pos = self.breakpoints.partition_point(|&t| t <= x);
        pos.clamp(1, e) - 1
    }

    /// Knot `j` of the (infinitely extended, for periodic) knot sequence,
    /// indexed so that element `s` is `[knot(s + p), knot(s + p + 1)]`.
    fn knot(&self, j: i64) -> f64 {
        match self.kind {
            KnotKind::Clamped => self.knots[j as usize],
            KnotKind::Periodic => {
                let (a, b) = self.interval();
                let h = (b - a) / self.n_elements() as f64;
                a + (j - self.degree as i64) as f64 * h
            }
        }
    }

    /// Values and derivatives up to `max_order` of the `p + 1` basis
    /// functions active at `x` (Cox–de Boor with derivative recursion).
    pub fn basis_derivatives(&self, x: f64, max_order: usize) -> Result<BasisEval> {
        let p = self.degree;
        let (a, b) = self.interval();
        let tol = 1e-12 * (b - a).abs().max(1.0);
        let x = match self.kind {
            KnotKind::Clamped => {
                if !(x >= a - tol && x <= b + tol) {
                    return Err(Error::Domain(format!("x = {x} outside knot range [{a}, {b}]")));
                }
                x.clamp(a, b)
            }
            KnotKind::Periodic => {
                if !x.is_finite() {
                    return Err(Error::Domain(format!("x = {x} is not finite")));
                }
                a + (x - a).rem_euclid(b - a)
            }
        };
        let s = self.element_of(x);
        let span = (s + p) as i64;
        let n = max_order.min(p);
        let ders = ders_basis_funs(span, x, p, n, |j| self.knot(j));
        let mut ders = ders;
        for _ in n..max_order {
            ders.push(vec![0.0; p + 1]);
        }
        let indices = (0..=p)
            .map(|j| match self.kind {
                KnotKind::Clamped => s + j,
                KnotKind::Periodic => (s + j + self.len() - p) % self.len(),
            })
            .collect();
        Ok(BasisEval { indices, ders })
    }

    /// Derivatives up to `max_order` of the spline `Σ c_i B_i` at `x`.
    pub fn evaluate(&self, coeffs: &[f64], x: f64, max_order: usize) -> Result<Vec<f64>> {
        let ev = self.basis_derivatives(x, max_order)?;
        Ok(ev
            .ders
            .iter()
            .map(|row| row.iter().zip(&ev.indices).map(|(v, &i)| v * coeffs[i]).sum())
            .collect())
    }

    /// Basis on the same interval with every element split in two.
    pub fn refined(&self) -> Result<Self> {
        let mut br = Vec::with_capacity(2 * self.breakpoints.len());
        for w in self.breakpoints.windows(2) {
            br.push(w[0]);
            br.push(0.5 * (w[0] + w[1]));
        }
        br.push(*self.breakpoints.last().unwrap());
        match self.kind {
            KnotKind::Clamped => Self::clamped(self.degree, br),
            KnotKind::Periodic => {
                let (a, b) = self.interval();
                Self::periodic_uniform(a, b, self.degree, 2 * self.n_elements())
            }
        }
    }
}

fn check_breaks(br: &[f64]) -> Result<()> {
    if br.len() < 2 {
        return Err(Error::Configuration("need at least one element".into()));
    }
    if br.iter().any(|x| !x.is_finite()) || br.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Configuration("breakpoints must be finite and strictly increasing".into()));
    }
    Ok(())
}

pub fn uniform_breaks(a: f64, b: f64, elements: usize) -> Result<Vec<f64>> {
    if elements == 0 || b <= a {
        return Err(Error::Configuration(format!("bad uniform partition of [{a}, {b}] into {elements}")));
    }
    Ok((0..=elements)
        .map(|i| if i == elements { b } else { a + (b - a) * i as f64 / elements as f64 })
        .collect())
}

/// Breakpoints with element lengths in geometric progression (`h_{i+1} = ratio · h_i`).
pub fn graded_breaks(a: f64, b: f64, elements: usize, ratio: f64) -> Result<Vec<f64>> {
    if !(ratio > 0.0) {
        return Err(Error::Configuration(format!("grading ratio {ratio} must be positive")));
    }
    if (ratio - 1.0).abs() < 1e-14 {
        return uniform_breaks(a, b, elements);
    }
    if elements == 0 || b <= a {
        return Err(Error::Configuration(format!("bad graded partition of [{a}, {b}] into {elements}")));
    }
    let total: f64 = (0..elements).map(|i| ratio.powi(i as i32)).sum();
    let h0 = (b - a) / total;
    let mut br = vec![a];
    let mut x = a;
    for i in 0..elements {
        x += h0 * ratio.powi(i as i32);
        br.push(if i + 1 == elements { b } else { x });
    }
    Ok(br)
}

/// Piegl–Tiller derivative recursion. `knot(j)` is the extended knot
/// sequence, `span` satisfies `knot(span) <= x < knot(span + 1)`.
fn ders_basis_funs(span: i64, x: f64, p: usize, n: usize, knot: impl Fn(i64) -> f64) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = x - knot(span + 1 - j as i64);
        right[j] = knot(span + j as i64) - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = vec![vec![0.0; p + 1]; n + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=n {
            let mut d = 0.0;
            let rk = r as i64 - k as i64;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if (r as i64 - 1) <= pk as i64 { k - 1 } else { p - r };
            for j in j1..=j2 {
                let idx = (rk + j as i64) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut fac = p as f64;
    for k in 1..=n {
        for v in ders[k].iter_mut() {
            *v *= fac;
        }
        fac *= (p - k) as f64;
    }
    ders
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clamped_counts_and_unity() {
        let b = BSplineBasis1D::clamped_uniform(0.0, 1.0, 3, 7).unwrap();
        assert_eq!(b.len(), 10);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x: f64 = rng.gen();
            let ev = b.basis_derivatives(x, 2).unwrap();
            assert_eq!(ev.indices.len(), 4);
            assert!((ev.ders[0].iter().sum::<f64>() - 1.0).abs() < 1e-13);
            assert!(ev.ders[1].iter().sum::<f64>().abs() < 1e-12);
            assert!(ev.ders[0].iter().all(|&v| v >= -1e-15));
        }
        assert!(b.basis_derivatives(1.5, 0).is_err());
        let end = b.basis_derivatives(1.0, 0).unwrap();
        assert!((end.ders[0][3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_wraps() {
        let b = BSplineBasis1D::periodic_uniform(-0.5, 0.5, 3, 8).unwrap();
        assert_eq!(b.len(), 8);
        let c: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let lo = b.evaluate(&c, -0.5, 3).unwrap();
        let hi = b.evaluate(&c, 0.5 - 1e-15, 3).unwrap();
        for k in 0..3 {
            assert!((lo[k] - hi[k]).abs() < 1e-9, "derivative {k}");
        }
        let ev = b.basis_derivatives(0.1, 0).unwrap();
        assert!((ev.ders[0].iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = BSplineBasis1D::clamped_graded(0.0, 2.0, 4, 6, 0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c: Vec<f64> = (0..b.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..20 {
            let x = rng.gen_range(0.05..1.95);
            let d = b.evaluate(&c, x, 2).unwrap();
            let h = 1e-5;
            let f = |y: f64| b.evaluate(&c, y, 0).unwrap()[0];
            let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
            assert!((d[1] - d1).abs() < 1e-6 * (1.0 + d1.abs()));
        }
    }

    #[test]
    fn graded_breaks_shrink() {
        let br = graded_breaks(-1.0, 0.0, 5, 0.5).unwrap();
        assert_eq!(br.len(), 6);
        assert!((br[5] - 0.0).abs() < 1e-15);
        assert!(br[1] - br[0] > br[5] - br[4]);
    }
}
