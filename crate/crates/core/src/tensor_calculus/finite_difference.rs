use super::jet::DerivativeTable;

/// Base step of the central-difference oracle.
pub const FD_STEP: f64 = 6e-2;

/// Second-order central stencil for the `k`-th derivative: (offset, weight)
/// in units of the step, weights already divided by `h^k` for `h = 1`.
fn stencil(k: usize) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("finite-difference oracle supports order <= 4"),
    }
}

fn central(f: &dyn Fn(&[f64]) -> f64, point: &[f64], exps: &[usize], h: f64) -> f64 {
    let stencils: Vec<_> = exps.iter().map(|&k| stencil(k)).collect();
    let mut idx = vec![0usize; exps.len()];
    let mut x = point.to_vec();
    let mut sum = 0.0;
    loop {
        let mut w = 1.0;
        for (d, s) in stencils.iter().enumerate() {
            let (off, wt) = s[idx[d]];
            x[d] = point[d] + off as f64 * h;
            w *= wt;
        }
        sum += w * f(&x);
        let mut d = 0;
        while d < idx.len() {
            idx[d] += 1;
            if idx[d] < stencils[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == idx.len() {
            break;
        }
    }
    let order: usize = exps.iter().sum();
    sum / h.powi(order as i32)
}

/// Jets of `f` at `point` by tensor-product central differences with steps
/// `h, h/2, h/4` (`h =` [`FD_STEP`]) and two Richardson levels, leaving an
/// `O(h^6)` truncation error.
///
/// Only meant as an independent oracle in tests; `order_cap <= 4`.
pub fn finite_difference_jet(f: &dyn Fn(&[f64]) -> f64, point: &[f64], order_cap: usize) -> DerivativeTable {
    assert!(order_cap <= 4, "finite-difference oracle supports order <= 4");
    DerivativeTable::from_fn(point.len(), order_cap, |beta| {
        if beta.order() == 0 {
            return f(point);
        }
        let d = |h: f64| central(f, point, beta.exponents(), h);
        let (d1, d2, d4) = (d(FD_STEP), d(FD_STEP / 2.0), d(FD_STEP / 4.0));
        let r1 = (4.0 * d2 - d1) / 3.0;
        let r2 = (4.0 * d4 - d2) / 3.0;
        (16.0 * r2 - r1) / 15.0
    })
}
