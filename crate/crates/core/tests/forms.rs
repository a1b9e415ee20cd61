use polylab::forms::*;
use polylab::spline::{
    build_constrained_space, BSplineBasis1D, ConstrainedSpace, ConstraintSet, QuadratureRule, Rect, Side,
    SplineFunction, TensorQuadrature, TensorSplineSpace,
};
use polylab::tensor_calculus::{multi_indices_of_order, DerivativeTable, MultiIndex, Polynomial};
use polylab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_polynomial(dim: usize, degree: usize, rng: &mut ChaCha8Rng) -> Polynomial {
    let terms = (0..=degree)
        .flat_map(|k| multi_indices_of_order(dim, k))
        .map(|g| (g, rng.gen_range(-1.0..1.0)))
        .collect();
    Polynomial::new(dim, terms)
}

fn random_spline(space: &ConstrainedSpace, rng: &mut ChaCha8Rng) -> SplineFunction {
    let c: Vec<f64> = (0..space.free_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    space.function(&c)
}

/// Spline on the flat box vanishing to order `m - 1` on every face but the top.
fn bump_spline(m: usize, dim: usize, p: usize, elements: usize, rng: &mut ChaCha8Rng) -> SplineFunction {
    let rect = flat_box(dim, 1.0);
    let mut cons = ConstraintSet::all_sides(dim, m).with(dim - 1, Side::High, 0);
    cons = cons.with(dim - 1, Side::Low, m);
    let space = build_constrained_space(&rect, p, &vec![elements; dim], cons).unwrap();
    random_spline(&space, rng)
}

fn flat_case(m: usize, dim: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(10 * m as u64 + dim as u64);
    let rect = flat_box(dim, 1.0);
    let f = random_polynomial(dim, 2 * m + 1, &mut rng);
    let p = m + 1;
    let phi = bump_spline(m, dim, p, 3, &mut rng);
    let quad = phi.space().quadrature((2 * m + 1 + p) / 2 + 1);
    let rep = green_flat_terms(m, &f, &phi, &rect, &quad).unwrap();
    assert!(rep.lhs.abs() > 1e-3, "degenerate test data {rep:?}");
    assert!(rep.boundary.abs() > 1e-6, "boundary term should be active {rep:?}");
    assert!(rep.residual <= 1e-10, "m={m} N={dim}: {rep:?}");
}

#[test]
fn flat_green_identity_m2_n2() {
    flat_case(2, 2);
}

#[test]
fn flat_green_identity_m2_n3() {
    flat_case(2, 3);
}

#[test]
fn flat_green_identity_m3_n2() {
    flat_case(3, 2);
}

#[test]
fn flat_green_identity_m3_n3() {
    flat_case(3, 3);
}

#[test]
fn flat_green_trivial_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rect = flat_box(2, 1.0);
    let phi = bump_spline(2, 2, 3, 3, &mut rng);
    let quad = phi.space().quadrature(5);
    let zero = Polynomial::zero(2);
    assert_eq!(green_flat_residual(2, &zero, &phi, &rect, &quad).unwrap(), 0.0);
    let f = random_polynomial(2, 5, &mut rng);
    assert_eq!(green_flat_residual(2, &f, &zero, &rect, &quad).unwrap(), 0.0);
}

#[test]
fn flat_green_rejects_support_violation() {
    let rect = flat_box(2, 1.0);
    let quad = TensorQuadrature::new(vec![QuadratureRule::interval(-1.0, 1.0, 4); 2]);
    let phi = Polynomial::constant(2, 1.0);
    let f = Polynomial::univariate(2, 0, &[0.0, 0.0, 0.0, 1.0]);
    assert!(matches!(green_flat_residual(2, &f, &phi, &rect, &quad), Err(Error::Precondition(_))));
}

fn strong_space(m: usize, dim: usize, p: usize, elements: usize) -> ConstrainedSpace {
    let rect = Rect::new(vec![0.0; dim], vec![1.0; dim]);
    build_constrained_space(&rect, p, &vec![elements; dim], ConstraintSet::all_sides(dim, m - 1)).unwrap()
}

fn strong_case(m: usize, dim: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(100 + 10 * m as u64 + dim as u64);
    let rect = Rect::new(vec![0.0; dim], vec![1.0; dim]);
    let elements = if dim == 3 { 2 } else { 3 };
    let f = random_spline(&strong_space(m, dim, 2 * m, elements), &mut rng);
    let phi = random_spline(&strong_space(m, dim, m + 1, elements), &mut rng);
    let quad = f.space().quadrature((2 * m + m + 1) / 2 + 1);
    let rep = green_strong_terms(m, &f, &phi, &rect, &quad).unwrap();
    assert!(rep.boundary.abs() > 1e-6, "second normal traces should be active {rep:?}");
    let scale = rep.lhs.abs().max(1.0);
    assert!(rep.residual <= 1e-10 * scale, "m={m} N={dim}: {rep:?}");
}

#[test]
fn strong_green_identity_m2_n2() {
    strong_case(2, 2);
}

#[test]
fn strong_green_identity_m3_n2() {
    strong_case(3, 2);
}

#[test]
fn strong_green_identity_m2_n3() {
    strong_case(2, 3);
}

#[test]
fn strong_green_identity_m3_n3() {
    strong_case(3, 3);
}

#[test]
fn strong_green_with_dirichlet_products_has_no_boundary_term() {
    // w vanishes to order m - 1 at both ends
    let m = 2;
    let w = Polynomial::univariate(1, 0, &[0.0, 0.0, 1.0, -2.0, 1.0]);
    let terms: Vec<(MultiIndex, f64)> = w
        .terms()
        .iter()
        .flat_map(|(a, ca)| {
            w.terms()
                .iter()
                .map(move |(b, cb)| (MultiIndex::new(vec![a.exponents()[0], b.exponents()[0]]), ca * cb))
        })
        .collect();
    let f = Polynomial::new(2, terms);
    let rect = Rect::unit_square();
    let quad = TensorQuadrature::new(vec![QuadratureRule::interval(0.0, 1.0, 6); 2]);
    let rep = green_strong_terms(m, &f, &f, &rect, &quad).unwrap();
    assert!(rep.boundary.abs() < 1e-14);
    assert!(rep.residual <= 1e-10);
}

#[test]
fn strong_green_rejects_constants() {
    let rect = Rect::unit_square();
    let quad = TensorQuadrature::new(vec![QuadratureRule::interval(0.0, 1.0, 4); 2]);
    let one = Polynomial::constant(2, 1.0);
    assert!(matches!(green_strong_residual(2, &one, &one, &rect, &quad), Err(Error::Precondition(_))));
}

#[test]
fn biharmonic_operators_term_for_term() {
    let b1 = boundary_operator_bt(2, 1).unwrap();
    assert_eq!(b1.to_text(), "B m=2 t=1\n1 0 0 2\n");
    let b0 = boundary_operator_bt(2, 0).unwrap();
    // -Δ_{N-1} ∂_N - ∂_N Δ, in that order of l
    assert_eq!(b0.to_text(), "B m=2 t=0\n-1 0 1 1\n-1 1 0 1\n");
    let b = boundary_operator_bt(3, 2).unwrap();
    assert_eq!(b.to_text(), "B m=3 t=2\n1 0 0 3\n");
}

#[test]
fn boundary_operator_coefficients() {
    for m in 1..=6 {
        for t in 0..m {
            let b = boundary_operator_bt(m, t).unwrap();
            assert_eq!(b.terms.len(), m - t);
            for (i, term) in b.terms.iter().enumerate() {
                let l = t + i;
                let sign = if (m - t - 1) % 2 == 0 { 1 } else { -1 };
                let binom = (0..t).fold(1i64, |acc, j| acc * (l - j) as i64 / (j + 1) as i64);
                assert_eq!(term.coefficient, sign * binom);
                assert_eq!(term.tangential_laplacian_power, l - t);
                assert_eq!(term.full_laplacian_power, m - l - 1);
                assert_eq!(term.normal_derivative_order, t + 1);
            }
        }
    }
}

fn jet_strategy(dim: usize, order: usize) -> impl Strategy<Value = DerivativeTable> {
    let len = DerivativeTable::zeros(dim, order).values().len();
    prop::collection::vec(-10.0f64..10.0, len).prop_map(move |v| {
        let mut t = DerivativeTable::zeros(dim, order);
        t.values_mut().copy_from_slice(&v);
        t
    })
}

proptest! {
    #[test]
    fn frobenius_weights_reproduce_repeated_sum(
        (m, dim, u, v) in (1usize..=4, 1usize..=3).prop_flat_map(|(m, d)| (Just(m), Just(d), jet_strategy(d, m), jet_strategy(d, m)))
    ) {
        let w = frobenius_weights(m, dim);
        let a = w.contract(&u, &v);
        let b = repeated_index_sum(m, &u, &v);
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn qy_is_bilinear(a in -3.0f64..3.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 3;
        let f1 = random_polynomial(2, 5, &mut rng);
        let f2 = random_polynomial(2, 5, &mut rng);
        let g = random_polynomial(2, 4, &mut rng);
        let quad = TensorQuadrature::new(vec![
            QuadratureRule::interval(-0.5, 0.5, 4),
            QuadratureRule::interval(-1.0, 0.0, 5),
        ]);
        let lhs = qy_evaluate(m, &f1.scaled(a).add(&f2), &g, &quad).unwrap();
        let rhs = a * qy_evaluate(m, &f1, &g, &quad).unwrap() + qy_evaluate(m, &f2, &g, &quad).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }
}

#[test]
fn qy_trivial_inputs() {
    let quad = TensorQuadrature::new(vec![
        QuadratureRule::interval(-0.5, 0.5, 4),
        QuadratureRule::interval(-1.0, 0.0, 4),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = random_polynomial(2, 3, &mut rng);
    assert_eq!(qy_evaluate(2, &Polynomial::zero(2), &g, &quad).unwrap(), 0.0);
    assert_eq!(qy_evaluate(2, &g, &Polynomial::zero(2), &quad).unwrap(), 0.0);
}

#[test]
fn spline_space_is_reusable_as_tensor() {
    // guard against silently changing the global numbering convention
    let sp = TensorSplineSpace::new(vec![
        BSplineBasis1D::clamped_uniform(0.0, 1.0, 2, 2).unwrap(),
        BSplineBasis1D::clamped_uniform(0.0, 1.0, 2, 3).unwrap(),
    ]);
    assert_eq!(sp.linear_index(&[1, 2]), 7);
    assert_eq!(sp.multi_index(7), vec![1, 2]);
}
