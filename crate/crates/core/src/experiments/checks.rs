use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cell::{strange_constant, truncation_study, verify_identities, CellConfig, TruncationMesh};
use crate::error::{Error, Result};
use crate::forms::{boundary_operator_bt, flat_box, green_flat_terms, green_strong_terms};
use crate::geometry::{
    classify_stability, criterion_rates, fit_loglog_slope, predicted_rate, FlatProfile, HEpsMap, OscillatingProfile,
    Regime, TrigPolynomial,
};
use crate::spline::{build_constrained_space, uniform_breaks, ConstrainedSpace, ConstraintSet, Rect, Side, SplineFunction};
use crate::tensor_calculus::{
    compose_jets, finite_difference_jet, multi_indices_of_order, product_jets, DerivativeTable, JetField, Polynomial, RidgeKind, RidgeSum,
};
use crate::unfolding::{integration_identity_residual, moment_projector, y_rule, UnfoldGrid};

/// Registered suites, in the order `all` runs them.
pub const SUITES: [&str; 6] = ["fdb", "green", "unfolding", "heps", "classify", "cell"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRecord {
    fn at_most(suite: &'static str, check: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckRecord { suite, check: check.into(), value, tolerance, passed: value <= tolerance }
    }

    fn holds(suite: &'static str, check: impl Into<String>, ok: bool) -> Self {
        CheckRecord { suite, check: check.into(), value: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, passed: ok }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckTable {
    pub records: Vec<CheckRecord>,
}

impl CheckTable {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn suite(&self, name: &str) -> impl Iterator<Item = &CheckRecord> + '_ {
        let name = name.to_string();
        self.records.iter().filter(move |r| r.suite == name)
    }

    /// `suite,check,value,tolerance,status` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,value,tolerance,status\n");
        for r in &self.records {
            let status = if r.passed { "pass" } else { "fail" };
            let _ = writeln!(out, "{},{},{:.6e},{:.1e},{}", r.suite, r.check, r.value, r.tolerance, status);
        }
        out
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run_checks(selector: &str) -> Result<CheckTable> {
    let names: Vec<&str> = match selector {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => {
            return Err(Error::Usage(format!(
                "unknown check suite `{s}`; expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    };
    let mut table = CheckTable::default();
    for name in names {
        let records = match name {
            "fdb" => fdb_suite()?,
            "green" => green_suite()?,
            "unfolding" => unfolding_suite()?,
            "heps" => heps_suite()?,
            "classify" => classify_suite()?,
            "cell" => cell_suite()?,
            _ => unreachable!(),
        };
        table.records.extend(records);
    }
    Ok(table)
}

fn random_polynomial(dim: usize, degree: usize, scale: f64, rng: &mut ChaCha8Rng) -> Polynomial {
    let terms = (0..=degree)
        .flat_map(|k| multi_indices_of_order(dim, k))
        .map(|g| (g, rng.gen_range(-scale..scale)))
        .collect();
    Polynomial::new(dim, terms)
}

fn random_ridges(dim: usize, rng: &mut ChaCha8Rng) -> RidgeSum {
    let dir = |rng: &mut ChaCha8Rng| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    let a = dir(rng);
    let b = dir(rng);
    let phase = rng.gen_range(0.0..2.0 * PI);
    RidgeSum::new(dim)
        .with(RidgeKind::Exp, rng.gen_range(-1.0..1.0), a)
        .with(RidgeKind::Sin { phase }, rng.gen_range(-1.0..1.0), b)
}

/// `max |a - b| / max |b|` over a whole jet table.
pub fn table_relative_error(a: &DerivativeTable, b: &DerivativeTable) -> f64 {
    let scale = b.values().iter().fold(0.0f64, |s, v| s.max(v.abs()));
    a.max_abs_diff(b) / scale.max(f64::MIN_POSITIVE)
}

/// `p ∘ (q_1, …, q_r)` by expansion.
pub fn substitute(p: &Polynomial, inner: &[Polynomial]) -> Polynomial {
    let dim = inner[0].dim();
    p.terms().iter().fold(Polynomial::zero(dim), |acc, (g, c)| {
        let mono = g
            .exponents()
            .iter()
            .zip(inner)
            .fold(Polynomial::constant(dim, *c), |m, (&e, q)| (0..e).fold(m, |m, _| m.mul(q)));
        acc.add(&mono)
    })
}

/// Outcome of the randomized chain-rule and product-rule comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DerivativeAudit {
    pub evaluations: usize,
    pub worst_fd_relative: f64,
    pub worst_polynomial_abs: f64,
}

/// Compares exact composite and product jets up to order 4 with a
/// finite-difference oracle on `2 * half` random inputs, and with expanded
/// polynomials on `poly_cases` polynomial inputs.
pub fn derivative_audit(seed: u64, half: usize, poly_cases: usize) -> Result<DerivativeAudit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = 4;
    let mut worst_fd: f64 = 0.0;
    for i in 0..half {
        let n = 1 + i % 3;
        let r = 1 + (i / 3) % 3;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        // composite f∘Φ
        let inner: Vec<Polynomial> = (0..r).map(|_| random_polynomial(n, 3, 0.5, &mut rng)).collect();
        let outer = random_ridges(r, &mut rng);
        let phi: Vec<f64> = inner.iter().map(|q| q.eval(&x)).collect();
        let inner_jets: Vec<DerivativeTable> = inner.iter().map(|q| q.jet(&x, order)).collect();
        let exact = compose_jets(&outer.jet(&phi, order), &inner_jets)?;
        let composite = |y: &[f64]| {
            let p: Vec<f64> = inner.iter().map(|q| q.eval(y)).collect();
            outer.value(&p)
        };
        worst_fd = worst_fd.max(table_relative_error(&exact, &finite_difference_jet(&composite, &x, order)));
        // product u v
        let u = random_ridges(n, &mut rng);
        let v = random_ridges(n, &mut rng);
        let exact = product_jets(&u.jet(&x, order), &v.jet(&x, order))?;
        let product = |y: &[f64]| u.value(y) * v.value(y);
        worst_fd = worst_fd.max(table_relative_error(&exact, &finite_difference_jet(&product, &x, order)));
    }
    let mut worst_poly: f64 = 0.0;
    for i in 0..poly_cases {
        let n = 1 + i % 3;
        let r = 1 + (i / 3) % 3;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let inner: Vec<Polynomial> = (0..r).map(|_| random_polynomial(n, 2, 1.0, &mut rng)).collect();
        let outer = random_polynomial(r, 3, 1.0, &mut rng);
        let phi: Vec<f64> = inner.iter().map(|q| q.eval(&x)).collect();
        let inner_jets: Vec<DerivativeTable> = inner.iter().map(|q| q.jet(&x, order)).collect();
        let exact = compose_jets(&outer.jet(&phi, order), &inner_jets)?;
        let expanded = substitute(&outer, &inner).jet(&x, order);
        worst_poly = worst_poly.max(exact.max_abs_diff(&expanded));
        let (p, q) = (random_polynomial(n, 3, 1.0, &mut rng), random_polynomial(n, 3, 1.0, &mut rng));
        let exact = product_jets(&p.jet(&x, order), &q.jet(&x, order))?;
        worst_poly = worst_poly.max(exact.max_abs_diff(&p.mul(&q).jet(&x, order)));
    }
    Ok(DerivativeAudit { evaluations: 2 * half, worst_fd_relative: worst_fd, worst_polynomial_abs: worst_poly })
}

fn fdb_suite() -> Result<Vec<CheckRecord>> {
    let audit = derivative_audit(20_240_601, 100, 30)?;
    Ok(vec![
        CheckRecord::at_most("fdb", format!("fd_oracle_{}_cases", audit.evaluations), audit.worst_fd_relative, 1e-6),
        CheckRecord::at_most("fdb", "polynomial_exact", audit.worst_polynomial_abs, 1e-12),
    ])
}

fn random_spline(space: &ConstrainedSpace, rng: &mut ChaCha8Rng) -> SplineFunction {
    let c: Vec<f64> = (0..space.free_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    space.function(&c)
}

/// Relative Green residuals for polynomial `f` against a spline `φ`
/// supported away from all faces but the top (flat case), and for two
/// splines with strong intermediate conditions on the unit box.
pub fn green_residuals(m: usize, dim: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rect = flat_box(dim, 1.0);
    let f = random_polynomial(dim, 2 * m + 1, 1.0, &mut rng);
    let p = m + 1;
    let cons = ConstraintSet::all_sides(dim, m).with(dim - 1, Side::High, 0);
    let phi = random_spline(&build_constrained_space(&rect, p, &vec![3; dim], cons)?, &mut rng);
    let quad = phi.space().quadrature((2 * m + 1 + p) / 2 + 1);
    let flat = green_flat_terms(m, &f, &phi, &rect, &quad)?;

    let unit = Rect::new(vec![0.0; dim], vec![1.0; dim]);
    let elements = vec![if dim == 3 { 2 } else { 3 }; dim];
    let strong = |p: usize| build_constrained_space(&unit, p, &elements, ConstraintSet::all_sides(dim, m - 1));
    let f = random_spline(&strong(2 * m)?, &mut rng);
    let phi = random_spline(&strong(m + 1)?, &mut rng);
    let quad = f.space().quadrature((3 * m + 1) / 2 + 1);
    let rep = green_strong_terms(m, &f, &phi, &unit, &quad)?;
    Ok((flat.residual / flat.lhs.abs().max(1.0), rep.residual / rep.lhs.abs().max(1.0)))
}

fn green_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for m in [2, 3] {
        for dim in [2, 3] {
            let (flat, strong) = green_residuals(m, dim, (10 * m + dim) as u64)?;
            out.push(CheckRecord::at_most("green", format!("flat_m{m}_n{dim}"), flat, 1e-10));
            out.push(CheckRecord::at_most("green", format!("strong_m{m}_n{dim}"), strong, 1e-10));
        }
    }
    let b1 = boundary_operator_bt(2, 1)?.to_text();
    let b0 = boundary_operator_bt(2, 0)?.to_text();
    out.push(CheckRecord::holds("green", "biharmonic_b1", b1 == "B m=2 t=1\n1 0 0 2\n"));
    out.push(CheckRecord::holds("green", "biharmonic_b0", b0 == "B m=2 t=0\n-1 0 1 1\n-1 1 0 1\n"));
    Ok(out)
}

/// Worst relative integration-identity residual over `ε ∈ {1/4, 1/8}` and
/// `l ∈ {0, m}` for a random cubic spline on `(0,1) × (-1,0)`.
pub fn unfolding_identity_worst(m: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rect = Rect::new(vec![0.0, -1.0], vec![1.0, 0.0]);
    let (nx, ny) = (5, 3);
    let space = build_constrained_space(&rect, m.max(3), &[nx, ny], ConstraintSet::none(2))?;
    let u = random_spline(&space, &mut rng);
    let (bx, by) = (uniform_breaks(0.0, 1.0, nx)?, uniform_breaks(-1.0, 0.0, ny)?);
    let mut worst: f64 = 0.0;
    for n in [4, 8] {
        let grid = UnfoldGrid::unit(n)?;
        for l in [0, m] {
            let r = integration_identity_residual(&u, &grid, -1.0, l, [&bx, &by], m.max(3) + 1)?;
            worst = worst.max(r.residual);
        }
    }
    Ok(worst)
}

/// Largest `|∫_Y D^β(ψ - 𝒫ψ)(ȳ, 0)|` over `|β| < m`.
pub fn averaged_moment_defect(psi: &dyn JetField, m: usize) -> Result<f64> {
    let proj = moment_projector(psi, m, &y_rule())?;
    let rule = y_rule();
    let mut worst: f64 = 0.0;
    for d in 0..m {
        for beta in multi_indices_of_order(2, d) {
            let s = rule.integrate(|y| psi.jet(&[y, 0.0], d).get(&beta) - proj.jet(&[y, 0.0], d).get(&beta));
            worst = worst.max(s.abs());
        }
    }
    Ok(worst)
}

/// `max |𝒫𝒫ψ - 𝒫ψ|` at a few points.
pub fn projector_idempotence_defect(psi: &dyn JetField, m: usize) -> Result<f64> {
    let once = moment_projector(psi, m, &y_rule())?;
    let twice = moment_projector(&once, m, &y_rule())?;
    Ok([[0.1, -0.2], [-0.45, -1.5], [0.3, 0.0]]
        .iter()
        .map(|x| (once.eval(x) - twice.eval(x)).abs())
        .fold(0.0, f64::max))
}

/// Periodic oscillation plus polynomial: the projector test field.
pub fn projector_test_field(seed: u64) -> (RidgeSum, Polynomial) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ridges = RidgeSum::new(2)
        .with(RidgeKind::Sin { phase: rng.gen_range(0.0..6.0) }, rng.gen_range(0.5..1.5), vec![2.0 * PI, 0.7])
        .with(RidgeKind::Sin { phase: rng.gen_range(0.0..6.0) }, rng.gen_range(0.5..1.5), vec![-4.0 * PI, 1.3]);
    (ridges, random_polynomial(2, 4, 1.0, &mut rng))
}

struct Sum<'a>(&'a dyn JetField, &'a dyn JetField);

impl JetField for Sum<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn jet(&self, x: &[f64], order: usize) -> DerivativeTable {
        let mut j = self.0.jet(x, order);
        j.axpy(1.0, &self.1.jet(x, order));
        j
    }
}

fn unfolding_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for m in [2, 3] {
        let r = unfolding_identity_worst(m, 40 + m as u64)?;
        out.push(CheckRecord::at_most("unfolding", format!("integration_identity_m{m}"), r, 1e-10));
        let (ridges, poly) = projector_test_field(m as u64);
        let psi = Sum(&ridges, &poly);
        out.push(CheckRecord::at_most(
            "unfolding",
            format!("projector_idempotent_m{m}"),
            projector_idempotence_defect(&psi, m)?,
            1e-12,
        ));
        out.push(CheckRecord::at_most(
            "unfolding",
            format!("projector_moments_m{m}"),
            averaged_moment_defect(&psi, m)?,
            1e-12,
        ));
    }
    Ok(out)
}

/// Fitted slope of `sup |D^l h_ε|` against `ε` for `b = 2 + cos`, `m = 2`.
pub fn h_eps_slope(alpha: f64, l: usize, epsilons: &[f64]) -> Result<f64> {
    let sups = epsilons
        .iter()
        .map(|&e| HEpsMap::new(OscillatingProfile::new(alpha, e, TrigPolynomial::two_plus_cos())?, 2).sampled_sup(l, 64))
        .collect::<Result<Vec<f64>>>()?;
    fit_loglog_slope(epsilons, &sups).ok_or_else(|| Error::Numerical("degenerate h_eps samples".into()))
}

/// Finest family used for the rate fits; coarser values are still
/// dominated by the `(1 + ε^{α-1} b)` factor.
pub const H_EPS_FAMILY: [f64; 3] = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];

fn heps_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for alpha in [1.0, 2.0] {
        for l in 0..=2 {
            let slope = h_eps_slope(alpha, l, &H_EPS_FAMILY)?;
            out.push(CheckRecord::at_most(
                "heps",
                format!("slope_alpha{alpha}_l{l}"),
                (slope - (alpha - l as f64)).abs(),
                0.1,
            ));
        }
    }
    Ok(out)
}

/// Mismatches between the classifier and the threshold rule on a grid of
/// `α` straddling every threshold, `2 <= m <= 5`, `1 <= k < m`.
pub fn classifier_mismatches() -> Result<usize> {
    let mut bad = 0;
    for m in 2..=5usize {
        for k in 1..m {
            let th = (m - k) as f64 + 0.5;
            for da in [-1.0, -0.25, -1e-6, 0.0, 1e-6, 0.25, 1.0] {
                let alpha = th + da;
                if alpha <= 0.0 {
                    continue;
                }
                let v = classify_stability(m, k, alpha)?;
                let expect = if alpha > th {
                    Regime::Stable
                } else if k + 1 < m {
                    Regime::CriterionInapplicable
                } else if da == 0.0 {
                    Regime::Critical
                } else {
                    Regime::Degenerate
                };
                if v.regime != expect || v.threshold != th {
                    bad += 1;
                }
            }
        }
    }
    Ok(bad)
}

/// Largest deviation of fitted criterion exponents from the closed form for
/// `α = 2, θ = 0.55, m = 2, k = 1`, and whether the verdict agrees.
pub fn rate_exponent_deviation() -> Result<(f64, bool)> {
    let theta = 0.55;
    let family = [0.25, 0.125, 0.0625, 0.03125]
        .iter()
        .map(|&e| OscillatingProfile::new(2.0, e, TrigPolynomial::two_plus_cos()))
        .collect::<Result<Vec<_>>>()?;
    let kappa: Vec<f64> = family.iter().map(|g| g.epsilon.powf(2.0 * theta) * 3.0).collect();
    let rep = criterion_rates(&family, &FlatProfile(0.0), &kappa, 2, 1, &[0, 1, 2])?;
    let mut worst: f64 = 0.0;
    for row in &rep.rows {
        let slope = row.slope.ok_or_else(|| Error::Numerical("vanishing quotients".into()))?;
        worst = worst.max((slope - predicted_rate(2.0, theta, 2, 1, row.order)).abs());
    }
    Ok((worst, rep.satisfied))
}

fn classify_suite() -> Result<Vec<CheckRecord>> {
    let (dev, satisfied) = rate_exponent_deviation()?;
    Ok(vec![
        CheckRecord::at_most("classify", "threshold_table", classifier_mismatches()? as f64, 0.0),
        CheckRecord::at_most("classify", "rate_exponents", dev, 1e-9),
        CheckRecord::holds("classify", "rate_verdict", satisfied),
    ])
}

fn cell_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let b = TrigPolynomial::two_plus_cos();
    for m in [2, 3] {
        let s = strange_constant(&CellConfig::new(m, b.clone()))?;
        let r = verify_identities(&s)?;
        out.push(CheckRecord::holds("cell", format!("positive_m{m}"), s.k_value > 0.0));
        out.push(CheckRecord::at_most("cell", format!("qy_m{m}"), r.qy_residual, 1e-8));
        out.push(CheckRecord::at_most("cell", format!("trace_m{m}"), r.trace_residual, 1e-8));
        let g = verify_identities(&s.with_gauge(1.0))?;
        out.push(CheckRecord::at_most("cell", format!("gauge_m{m}"), (g.qy - r.qy).abs(), 1e-10));
        let t = truncation_study(m, &b, &TruncationMesh::default_for(m))?;
        out.push(CheckRecord::at_most("cell", format!("truncated_oracle_m{m}"), t.relative_error, 0.01));
        let c = strange_constant(&CellConfig::new(m, TrigPolynomial::constant(2.0)))?;
        out.push(CheckRecord::holds("cell", format!("constant_datum_m{m}"), c.k_value == 0.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_selector_is_a_usage_error() {
        assert!(matches!(run_checks("nope"), Err(Error::Usage(_))));
    }

    #[test]
    fn substitution_matches_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_polynomial(2, 3, 1.0, &mut rng);
        let q = [random_polynomial(3, 2, 1.0, &mut rng), random_polynomial(3, 2, 1.0, &mut rng)];
        let x = [0.3, -0.2, 0.5];
        let direct = p.eval(&[q[0].eval(&x), q[1].eval(&x)]);
        assert!((substitute(&p, &q).eval(&x) - direct).abs() < 1e-13);
    }

    #[test]
    fn csv_layout() {
        let t = CheckTable {
            records: vec![CheckRecord::at_most("fdb", "x", 2e-7, 1e-6), CheckRecord::holds("fdb", "y", false)],
        };
        assert_eq!(t.to_csv(), "suite,check,value,tolerance,status\nfdb,x,2.000000e-7,1.0e-6,pass\nfdb,y,1.000000e0,0.0e0,fail\n");
        assert!(!t.all_passed());
        assert_eq!(t.failures().count(), 1);
    }
}
