use serde::Serialize;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss rule needs at least one point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n == 1 {
        w[0] = 2.0;
    }
    (x, w)
}

/// One-dimensional composite Gauss rule.
#[derive(Clone, Debug, Serialize)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Gauss rule with `order` points on every interval between consecutive
    /// breakpoints; exact for piecewise polynomials of degree `2 order - 1`.
    pub fn composite(breakpoints: &[f64], order: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let mut points = Vec::with_capacity(order * breakpoints.len());
        let mut weights = Vec::with_capacity(order * breakpoints.len());
        for w in breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, wt) in gx.iter().zip(&gw) {
                points.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        QuadratureRule { points, weights }
    }

    pub fn interval(a: f64, b: f64, order: usize) -> Self {
        Self::composite(&[a, b], order)
    }

    pub fn uniform(a: f64, b: f64, elements: usize, order: usize) -> Self {
        let breaks: Vec<f64> = (0..=elements)
            .map(|i| a + (b - a) * i as f64 / elements as f64)
            .collect();
        Self::composite(&breaks, order)
    }

    /// Composite rule on `[a, b]` that additionally splits at every
    /// breakpoint lying strictly inside.
    pub fn split_at(a: f64, b: f64, cuts: &[f64], order: usize) -> Self {
        let mut breaks = vec![a];
        let mut inner: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
        inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
        inner.dedup_by(|x, y| (*x - *y).abs() < 1e-14 * (1.0 + y.abs()));
        breaks.extend(inner);
        breaks.push(b);
        Self::composite(&breaks, order)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `quadrature_rule` for an interval split into elements.
pub fn quadrature_rule(breakpoints: &[f64], order: usize) -> QuadratureRule {
    QuadratureRule::composite(breakpoints, order.max(1))
}

/// Tensor product of one-dimensional rules.
#[derive(Clone, Debug)]
pub struct TensorQuadrature {
    pub axes: Vec<QuadratureRule>,
}

impl TensorQuadrature {
    pub fn new(axes: Vec<QuadratureRule>) -> Self {
        TensorQuadrature { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Calls `f(x, w)` for every tensor point.
    pub fn for_each(&self, mut f: impl FnMut(&[f64], f64)) {
        let d = self.axes.len();
        if self.axes.iter().any(|a| a.is_empty()) {
            return;
        }
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        loop {
            let mut w = 1.0;
            for k in 0..d {
                x[k] = self.axes[k].points[idx[k]];
                w *= self.axes[k].weights[idx[k]];
            }
            f(&x, w);
            let mut k = d;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Rule on the face `x_axis = value`, points reported in full dimension.
    pub fn for_each_on_face(&self, axis: usize, value: f64, mut f: impl FnMut(&[f64], f64)) {
        let mut rest = self.axes.clone();
        rest.remove(axis);
        let face = TensorQuadrature::new(rest);
        let mut full = vec![0.0; self.dim()];
        if face.dim() == 0 {
            full[axis] = value;
            f(&full, 1.0);
            return;
        }
        face.for_each(|y, w| {
            let mut j = 0;
            for (k, slot) in full.iter_mut().enumerate() {
                if k == axis {
                    *slot = value;
                } else {
                    *slot = y[j];
                    j += 1;
                }
            }
            f(&full, w);
        });
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let mut s = 0.0;
        self.for_each(|x, w| s += w * f(x));
        s
    }
}
