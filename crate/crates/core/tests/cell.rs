use std::f64::consts::PI;

use polylab::cell::*;
use polylab::geometry::TrigPolynomial;
use polylab::Error;
use proptest::prelude::*;

fn solve(b: &str, m: usize) -> CellSolution {
    strange_constant(&CellConfig::new(m, TrigPolynomial::parse(b).unwrap())).unwrap()
}

#[test]
fn mode_boundary_systems() {
    let zero = solve_mode(3, 2, 0.0).unwrap();
    assert!(zero.coeffs.iter().all(|c| *c == 0.0));

    let s = solve_mode(2, 1, 0.7).unwrap();
    assert!((s.coeffs[0] - 0.7).abs() < 1e-14);
    assert!((s.coeffs[1] + PI * 0.7).abs() < 1e-12);

    let s = solve_mode(3, 1, 1.3).unwrap();
    let p = s.profile();
    assert!(p.eval(0.0).abs() < 1e-12);
    assert!((p.derivative(1).eval(0.0) - 1.3).abs() < 1e-12);
    assert!(p.derivative(3).eval(0.0).abs() < 1e-12);
    assert!(s.boundary_residual(3, 1.3) < 1e-12);
    assert!(matches!(solve_mode(2, 0, 1.0), Err(Error::Argument(_))));
}

#[test]
fn modes_solve_the_ode() {
    for m in 2..=4 {
        for k in 1..=3 {
            let s = solve_mode(m, k, 1.0).unwrap();
            let r = s.profile().apply_mode_operator(m);
            let scale = s.mu.powi(2 * m as i32);
            assert!(r.coeffs.iter().all(|c| c.abs() < 1e-12 * scale), "m={m} k={k}: {:?}", r.coeffs);
            assert!(s.profile().eval(-20.0).abs() < 1e-40);
        }
    }
}

#[test]
fn constant_datum_has_no_energy() {
    for m in [2, 3] {
        let s = solve("1.7", m);
        assert_eq!(s.k_value, 0.0);
        assert_eq!(s.trace_constant(), 0.0);
        assert_eq!(s.qy_value().unwrap(), 0.0);
    }
}

#[test]
fn biharmonic_constant_closed_form() {
    let s = solve("2+cos", 2);
    assert!(((s.k_value - 6.0 * PI.powi(3)) / s.k_value).abs() < 1e-12);
}

#[test]
fn three_characterizations_agree() {
    for m in [2, 3] {
        for b in ["2+cos", "cos+0.3sin2+2"] {
            let s = solve(b, m);
            assert!(s.k_value > 0.0);
            let r = verify_identities(&s).unwrap();
            assert!(r.qy_residual <= 1e-8, "m={m} {b}: {r:?}");
            assert!(r.trace_residual <= 1e-8, "m={m} {b}: {r:?}");
        }
    }
}

#[test]
fn scaling_and_mode_additivity() {
    let one = solve("2+cos+0.3sin2", 3);
    let two = solve("4+2cos+0.6sin2", 3);
    assert!((two.k_value - 4.0 * one.k_value).abs() < 1e-10 * two.k_value);
    let b = TrigPolynomial::parse("2+cos+0.3sin2").unwrap();
    let parts: f64 = [1u32, 2]
        .iter()
        .map(|&k| {
            strange_constant(&CellConfig { m: 3, b: b.clone(), modes: Some(vec![k]) })
                .unwrap()
                .k_value
        })
        .sum();
    assert!((parts - one.k_value).abs() < 1e-10 * one.k_value);
}

#[test]
fn combined_quadrature_matches_mode_sum() {
    for m in [2, 3] {
        let s = solve("cos+0.3sin2+2", m);
        let q = s.energy_by_quadrature(-40.0).unwrap();
        assert!((q - s.k_value).abs() <= 1e-8 * s.k_value, "{q} vs {}", s.k_value);
    }
}

#[test]
fn gauge_monomial_is_invisible() {
    for m in [2, 3] {
        let s = solve("2+cos", m);
        let g = s.with_gauge(1.0);
        let (a, b) = (verify_identities(&s).unwrap(), verify_identities(&g).unwrap());
        assert!((a.qy - b.qy).abs() < 1e-10);
        assert!((a.trace - b.trace).abs() < 1e-10);
        let qa = s.energy_by_quadrature(-10.0).unwrap();
        let qb = g.energy_by_quadrature(-10.0).unwrap();
        assert!((qa - qb).abs() < 1e-10);
        // the monomial is really there
        let j = evaluate_v(&g, &[[0.1, -0.5]], m - 1).unwrap();
        let j0 = evaluate_v(&s, &[[0.1, -0.5]], m - 1).unwrap();
        assert!((j[0].get_exps(&[0, m - 1]) - j0[0].get_exps(&[0, m - 1]) - polylab::tensor_calculus::factorial(m - 1)).abs() < 1e-12);
    }
}

#[test]
fn field_boundary_values_and_decay() {
    for m in [2, 3] {
        let b = TrigPolynomial::parse("cos+0.3sin2+2").unwrap();
        let s = strange_constant(&CellConfig::new(m, b.clone())).unwrap();
        let pts: Vec<[f64; 2]> = (0..64).map(|i| [-0.5 + i as f64 / 64.0, 0.0]).collect();
        let jets = evaluate_v(&s, &pts, m).unwrap();
        for (p, j) in pts.iter().zip(&jets) {
            assert!((j.get_exps(&[0, m - 2]) - b.eval(p[0])).abs() < 1e-12);
            assert!(j.get_exps(&[0, m]).abs() < 1e-12 * s.modes[0].solution.mu.powi(m as i32));
            for l in 0..m.saturating_sub(2) {
                assert!(j.get_exps(&[0, l]).abs() < 1e-12);
            }
        }
        // only the zero mode survives deep down
        let deep = evaluate_v(&s, &[[0.2, -20.0]], 0).unwrap()[0].value();
        let zero_mode = b.mean() * (-20.0f64).powi(m as i32 - 2) / polylab::tensor_calculus::factorial(m - 2);
        assert!((deep - zero_mode).abs() <= 1e-12 * 2.0);
        assert!(matches!(evaluate_v(&s, &pts, 2 * m + 1), Err(Error::Argument(_))));
        assert!(evaluate_v(&s, &pts, 2 * m).is_ok());
        assert!(evaluate_v(&s, &[[0.0, 0.5]], 1).is_err());
    }
}

#[test]
fn truncated_strip_oracle() {
    for m in [2, 3] {
        let b = TrigPolynomial::two_plus_cos();
        let r = truncation_study(m, &b, &TruncationMesh::default_for(m)).unwrap();
        assert!(r.relative_error < 0.01, "{r:?}");
        // conforming Galerkin values sit above the exact energy
        assert!(r.deep >= r.deep_refined && r.deep_refined >= r.semi_analytic * (1.0 - 1e-9));
        assert!(r.depth_sensitivity < 1e-3, "{r:?}");
    }
    assert!(truncated_cell_constant(2, &TrigPolynomial::two_plus_cos(), -1.0, &TruncationMesh::default_for(2)).is_err());
}

#[test]
fn json_report_layout() {
    let s = solve("2+cos", 2).with_identities().unwrap();
    let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
    assert_eq!(v["m"], 2);
    assert!((v["K"].as_f64().unwrap() - 6.0 * PI.powi(3)).abs() < 1e-9);
    let mode = &v["modes"][0];
    assert_eq!(mode["k"], 1);
    assert!((mode["mu"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-15);
    assert_eq!(mode["coeffs"].as_array().unwrap().len(), 2);
    assert!(v["residuals"]["qy"].as_f64().unwrap() < 1e-8);
    assert!(v["residuals"]["trace"].as_f64().unwrap() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonconstant_data_give_positive_constants(
        m in 2usize..=4,
        c1 in -1.0f64..1.0,
        s2 in -1.0f64..1.0,
        c3 in -0.5f64..0.5,
    ) {
        prop_assume!(c1.abs() + s2.abs() + c3.abs() > 1e-3);
        let b = TrigPolynomial::new(vec![(0, 3.0, 0.0), (1, c1, 0.0), (2, 0.0, s2), (3, c3, 0.0)]);
        let s = strange_constant(&CellConfig::new(m, b)).unwrap();
        prop_assert!(s.k_value > 0.0);
        let r = verify_identities(&s).unwrap();
        prop_assert!(r.trace_residual < 1e-8);
        prop_assert!(r.qy_residual < 1e-8);
    }
}
