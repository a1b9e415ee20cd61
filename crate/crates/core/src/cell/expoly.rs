use crate::tensor_calculus::factorial;

/// `e^{μ y} Σ_j c_j y^j` on `y <= 0` with `μ > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly {
    pub mu: f64,
    pub coeffs: Vec<f64>,
}

impl ExpPoly {
    pub fn new(mu: f64, coeffs: Vec<f64>) -> Self {
        ExpPoly { mu, coeffs }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c);
        (self.mu * y).exp() * poly
    }

    /// `n`-th derivative, again of the same form.
    pub fn derivative(&self, n: usize) -> ExpPoly {
        let mut c = self.coeffs.clone();
        for _ in 0..n {
            let next: Vec<f64> = (0..c.len())
                .map(|j| self.mu * c[j] + c.get(j + 1).map_or(0.0, |d| (j + 1) as f64 * d))
                .collect();
            c = next;
        }
        ExpPoly { mu: self.mu, coeffs: c }
    }

    /// `∫_{-∞}^0 f(y)² dy` from `∫ y^p e^{2μy} = (-1)^p p! / (2μ)^{p+1}`.
    pub fn square_integral(&self) -> f64 {
        let two_mu = 2.0 * self.mu;
        let mut total = 0.0;
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in self.coeffs.iter().enumerate() {
                let p = i + j;
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                total += a * b * sign * factorial(p) / two_mu.powi(p as i32 + 1);
            }
        }
        total
    }

    /// Coefficients of `(∂² - μ²)^n` applied to the polynomial part, which
    /// vanish when `n` exceeds the polynomial degree.
    pub fn apply_mode_operator(&self, n: usize) -> ExpPoly {
        let mu2 = self.mu * self.mu;
        let mut f = self.clone();
        for _ in 0..n {
            let d2 = f.derivative(2);
            let coeffs = d2.coeffs.iter().zip(&f.coeffs).map(|(a, b)| a - mu2 * b).collect();
            f = ExpPoly { mu: self.mu, coeffs };
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_integral() {
        let f = ExpPoly::new(2.0, vec![1.0, -3.0]);
        let h = 1e-5;
        let fd = (f.eval(-0.3 + h) - f.eval(-0.3 - h)) / (2.0 * h);
        assert!((f.derivative(1).eval(-0.3) - fd).abs() < 1e-8);
        // ∫ e^{4y}(1 - 3y)² = 1/4 + 6/16 + 18/64
        assert!((f.square_integral() - (0.25 + 0.375 + 0.28125)).abs() < 1e-14);
        let z = f.apply_mode_operator(2);
        assert!(z.coeffs.iter().all(|c| c.abs() < 1e-12));
    }
}
