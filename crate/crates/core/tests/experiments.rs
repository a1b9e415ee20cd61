use polylab::experiments::*;
use polylab::Error;

fn small(b: &str) -> ExperimentConfig {
    ExperimentConfig {
        alphas: vec![1.5, 2.0],
        epsilons: vec![0.25, 0.125],
        b: b.into(),
        elements: [8, 8],
        elements_per_period: 4,
        n_eigs: 3,
        threads: 1,
        ..ExperimentConfig::default()
    }
}

#[test]
fn flat_profile_reproduces_the_limit() {
    let r = run_trichotomy(&small("0")).unwrap();
    assert_eq!(r.k_value, 0.0);
    // with K = 0 the critical problem is the SIBC problem
    assert_eq!(r.limits.sibc, r.limits.critical);
    for row in &r.rows {
        assert!(row.error.is_none());
        assert!((row.lambda - row.limit_sibc).abs() <= 1e-10 * row.limit_sibc, "{row:?}");
    }
}

#[test]
fn rows_layout_and_invariants() {
    let c = small("2+cos");
    let r = run_trichotomy(&c).unwrap();
    assert!(r.invariants_hold());
    assert_eq!(r.rows.len(), 2 * 2 * 3);
    assert_eq!(r.gaps.len(), 4);
    assert_eq!(r.diagnostics.len(), 2);
    assert!((r.k_value - 6.0 * std::f64::consts::PI.powi(3)).abs() < 1e-9);
    // strict first-eigenvalue ordering of the limits
    assert!(r.limits.sibc[0] + 1e-8 < r.limits.critical[0] && r.limits.critical[0] + 1e-8 < r.limits.dirichlet[0]);
    // Ω_ε meshes follow the oscillation: 4 elements per period
    let dofs: Vec<usize> = r.rows.iter().filter(|row| row.n == 1).map(|row| row.dofs).collect();
    assert!(dofs[1] > dofs[0] && dofs[0] > r.limit_dofs);

    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    for (line, row) in lines.zip(&r.rows) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 13);
        assert_eq!(f[0], "trichotomy");
        assert_eq!(f[5].parse::<usize>().unwrap(), row.n);
        let lambda: f64 = f[6].parse().unwrap();
        assert!((lambda - row.lambda).abs() <= 1e-9 * row.lambda);
    }
    let script = gnuplot_script(&r, "out.csv");
    assert!(script.contains("'out.csv'") && script.contains("\"1.5 2\""));
    assert!(r.gap_table().lines().count() == 5);
}

#[test]
fn reruns_are_byte_identical() {
    let mut c = small("2+cos+0.3sin2");
    c.alphas = vec![2.0];
    let a = run_trichotomy(&c).unwrap().to_csv();
    c.threads = 2;
    let b = run_trichotomy(&c).unwrap().to_csv();
    assert_eq!(a, b);
}

#[test]
fn failing_rows_are_recorded() {
    // b changes sign, so Ω_ε is not a graph domain above Ω
    let mut c = small("cos");
    c.alphas = vec![2.0];
    let r = run_trichotomy(&c).unwrap();
    assert!(r.rows.iter().all(|row| row.error.is_some() && row.lambda.is_nan()));
    assert!(r.to_csv().contains("NaN"));
    assert!(r.diagnostics[0].nearest_at_finest.is_none());
}

#[test]
fn invalid_config_is_rejected_up_front() {
    let mut c = small("2+cos");
    c.k = 2;
    assert!(matches!(run_trichotomy(&c), Err(Error::Configuration(_))));
}

#[test]
fn gap_nearest_needs_a_strict_winner() {
    let g = GapRow { alpha: 2.0, epsilon: 0.1, sibc: 1.0, dirichlet: 3.0, critical: 2.0 };
    assert_eq!(g.nearest(), Some(LimitKind::Sibc));
    let tie = GapRow { critical: 1.0, ..g.clone() };
    assert_eq!(tie.nearest(), None);
}

#[test]
fn cell_reports() {
    let flat = run_cell_report(2, "1.5").unwrap();
    assert_eq!(flat.k_value, 0.0);
    assert!(flat.modes.is_empty() && flat.identities.is_none() && flat.truncation.is_none());
    assert_eq!(flat.to_csv(), "m,mode,mu,cos,sin,energy\n2,total,,,,0.000000000000e0\n");

    for m in [2, 3] {
        let r = run_cell_report(m, "2+cos").unwrap();
        assert!(r.k_value > 0.0);
        let id = r.identities.as_ref().unwrap();
        assert!(id.qy_residual <= 1e-8 && id.trace_residual <= 1e-8);
        assert!(r.truncation.as_ref().unwrap().relative_error < 0.01);
        let sum: f64 = r.modes.iter().map(|md| md.energy).sum();
        assert!((sum - r.k_value).abs() <= 1e-12 * r.k_value);
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["m"], m);
        assert!(v["K"].as_f64().unwrap() > 0.0);
    }
    assert!(run_cell_report(2, "2+").is_err());
}

#[test]
fn check_suites() {
    assert!(matches!(run_checks("everything"), Err(Error::Usage(_))));
    for s in ["green", "classify", "unfolding", "fdb"] {
        let t = run_checks(s).unwrap();
        assert!(t.all_passed(), "{}", t.to_csv());
        assert!(t.records.iter().all(|r| r.suite == s));
    }
}
