use polylab::experiments::{derivative_audit, substitute};
use polylab::tensor_calculus::*;
use polylab::Error;
use proptest::prelude::*;

fn poly_strategy(dim: usize, degree: usize) -> impl Strategy<Value = Polynomial> {
    let count: usize = (0..=degree).map(|k| multi_indices_of_order(dim, k).len()).sum();
    proptest::collection::vec(-1.0f64..1.0, count).prop_map(move |c| {
        let idx: Vec<MultiIndex> = (0..=degree).flat_map(|k| multi_indices_of_order(dim, k)).collect();
        Polynomial::new(dim, idx.into_iter().zip(c).collect())
    })
}

fn ridge_strategy(dim: usize) -> impl Strategy<Value = RidgeSum> {
    (
        proptest::collection::vec(-1.0f64..1.0, dim),
        proptest::collection::vec(-1.0f64..1.0, dim),
        -1.0f64..1.0,
        -1.0f64..1.0,
        0.0f64..6.3,
    )
        .prop_map(move |(a, b, wa, wb, phase)| {
            RidgeSum::new(dim).with(RidgeKind::Exp, wa, a).with(RidgeKind::Sin { phase }, wb, b)
        })
}

#[test]
fn randomized_chain_and_product_rules_match_finite_differences() {
    for seed in [1u64, 2] {
        let audit = derivative_audit(seed, 100, 30).unwrap();
        assert_eq!(audit.evaluations, 200);
        assert!(audit.worst_fd_relative <= 1e-6, "{audit:?}");
        assert!(audit.worst_polynomial_abs <= 1e-12, "{audit:?}");
    }
}

#[test]
fn ridge_jets_are_consistent() {
    let f = RidgeSum::new(2)
        .with(RidgeKind::Exp, 0.5, vec![1.0, -2.0])
        .with(RidgeKind::Sin { phase: 0.3 }, 1.5, vec![0.7, 0.2]);
    let x = [0.1, -0.3];
    let jet = f.jet(&x, 4);
    let fd = finite_difference_jet(&|y| f.value(y), &x, 4);
    assert!(jet.max_abs_diff(&fd) < 1e-7);
    let v = 0.5 * (0.1f64 + 0.6).exp() + 1.5 * (0.07f64 - 0.06 + 0.3).sin();
    assert!((jet.value() - v).abs() < 1e-15);
}

#[test]
fn formula_errors() {
    let u = DerivativeTable::zeros(2, 2);
    let v = DerivativeTable::zeros(3, 2);
    assert!(matches!(leibniz_product(&[0], &u, &v), Err(Error::Argument(_))));
    assert!(matches!(leibniz_product(&[0, 0, 0], &u, &u), Err(Error::Argument(_))));
    assert!(matches!(leibniz_product(&[2], &u, &u), Err(Error::Argument(_))));
    assert!(faa_di_bruno_compose(&[0], &u, std::slice::from_ref(&u)).is_err());
    assert!(faa_di_bruno_coefficients(&[0], &[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_rule_is_symmetric_in_the_index_order(
        outer in ridge_strategy(2),
        inner in proptest::collection::vec(poly_strategy(3, 2), 2),
        x in proptest::collection::vec(-0.5f64..0.5, 3),
        tuple in proptest::collection::vec(0usize..3, 1..=4),
        rot in 0usize..4,
    ) {
        let order = tuple.len();
        let phi: Vec<f64> = inner.iter().map(|q| q.eval(&x)).collect();
        let oj = outer.jet(&phi, order);
        let ij: Vec<DerivativeTable> = inner.iter().map(|q| q.jet(&x, order)).collect();
        let a = faa_di_bruno_compose(&tuple, &oj, &ij).unwrap();
        let mut perm = tuple.clone();
        perm.rotate_left(rot % order);
        perm.reverse();
        let b = faa_di_bruno_compose(&perm, &oj, &ij).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn polynomial_compositions_are_exact(
        outer in poly_strategy(2, 3),
        inner in proptest::collection::vec(poly_strategy(2, 2), 2),
        x in proptest::collection::vec(-1.0f64..1.0, 2),
    ) {
        let phi: Vec<f64> = inner.iter().map(|q| q.eval(&x)).collect();
        let ij: Vec<DerivativeTable> = inner.iter().map(|q| q.jet(&x, 4)).collect();
        let exact = compose_jets(&outer.jet(&phi, 4), &ij).unwrap();
        let expanded = substitute(&outer, &inner).jet(&x, 4);
        prop_assert!(exact.max_abs_diff(&expanded) <= 1e-12);
    }

    #[test]
    fn product_rule_on_polynomials_is_exact(
        p in poly_strategy(3, 3),
        q in poly_strategy(3, 2),
        x in proptest::collection::vec(-1.0f64..1.0, 3),
    ) {
        let exact = product_jets(&p.jet(&x, 4), &q.jet(&x, 4)).unwrap();
        prop_assert!(exact.max_abs_diff(&p.mul(&q).jet(&x, 4)) <= 1e-12);
        let swapped = product_jets(&q.jet(&x, 4), &p.jet(&x, 4)).unwrap();
        prop_assert!(exact.max_abs_diff(&swapped) <= 1e-13);
    }

    #[test]
    fn identity_map_leaves_jets_unchanged(outer in ridge_strategy(3), x in proptest::collection::vec(-0.5f64..0.5, 3)) {
        let oj = outer.jet(&x, 4);
        let c = compose_jets(&oj, &identity_jets(&x, 4)).unwrap();
        prop_assert!(c.max_abs_diff(&oj) <= 1e-13 * (1.0 + oj.values().iter().fold(0.0f64, |a, v| a.max(v.abs()))));
    }
}
