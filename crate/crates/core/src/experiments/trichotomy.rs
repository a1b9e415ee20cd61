use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use super::ExperimentConfig;
use crate::assembly::{assemble_pencil, build_space, solve_generalized_eigen, Discretization, ProblemVariant};
use crate::cell::{strange_constant, CellConfig};
use crate::error::Result;
use crate::geometry::{OscillatingProfile, TrigPolynomial};

pub const CSV_HEADER: &str =
    "experiment,m,k,alpha,epsilon,n,lambda,limit_SIBC,limit_dirichlet,limit_critical,K,dofs,residual";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LimitKind {
    Sibc,
    Dirichlet,
    Critical,
}

/// The three candidate limit spectra on the unperturbed rectangle, all on
/// the same mesh.
#[derive(Clone, Debug, Serialize)]
pub struct LimitSpectra {
    pub sibc: Vec<f64>,
    pub dirichlet: Vec<f64>,
    pub critical: Vec<f64>,
    #[serde(rename = "K")]
    pub k_value: f64,
    pub max_residual: f64,
}

impl LimitSpectra {
    pub fn get(&self, kind: LimitKind) -> &[f64] {
        match kind {
            LimitKind::Sibc => &self.sibc,
            LimitKind::Dirichlet => &self.dirichlet,
            LimitKind::Critical => &self.critical,
        }
    }

    /// `λ_SIBC ≤ λ_Critical ≤ λ_Dirichlet` entrywise, all at least 1.
    pub fn ordered(&self) -> bool {
        self.sibc
            .iter()
            .zip(&self.critical)
            .zip(&self.dirichlet)
            .all(|((s, c), d)| *s >= 1.0 && s <= c && c <= d)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrichotomyRow {
    pub alpha: f64,
    pub epsilon: f64,
    pub n: usize,
    pub lambda: f64,
    pub limit_sibc: f64,
    pub limit_dirichlet: f64,
    pub limit_critical: f64,
    pub dofs: usize,
    pub residual: f64,
    /// Set when the `(α, ε)` solve failed; the numeric fields are then NaN.
    pub error: Option<String>,
}

/// First-eigenvalue gaps `|λ_1^ε - λ_1^limit|`.
#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub alpha: f64,
    pub epsilon: f64,
    pub sibc: f64,
    pub dirichlet: f64,
    pub critical: f64,
}

impl GapRow {
    pub fn gap(&self, kind: LimitKind) -> f64 {
        match kind {
            LimitKind::Sibc => self.sibc,
            LimitKind::Dirichlet => self.dirichlet,
            LimitKind::Critical => self.critical,
        }
    }

    /// The limit with the strictly smallest gap, if any.
    pub fn nearest(&self) -> Option<LimitKind> {
        let all = [LimitKind::Sibc, LimitKind::Dirichlet, LimitKind::Critical];
        let best = all.iter().copied().min_by(|a, b| self.gap(*a).total_cmp(&self.gap(*b)))?;
        let strict = all.iter().all(|&k| k == best || self.gap(k) > self.gap(best));
        (strict && self.gap(best).is_finite()).then_some(best)
    }
}

/// Convergence diagnostics for one `α` across the `ε` list.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaDiagnostics {
    pub alpha: f64,
    pub sibc_gap_decreasing: bool,
    pub dirichlet_gap_decreasing: bool,
    pub critical_gap_decreasing: bool,
    pub nearest_at_finest: Option<LimitKind>,
}

impl AlphaDiagnostics {
    pub fn decreasing(&self, kind: LimitKind) -> bool {
        match kind {
            LimitKind::Sibc => self.sibc_gap_decreasing,
            LimitKind::Dirichlet => self.dirichlet_gap_decreasing,
            LimitKind::Critical => self.critical_gap_decreasing,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrichotomyReport {
    pub config: ExperimentConfig,
    #[serde(rename = "K")]
    pub k_value: f64,
    pub limits: LimitSpectra,
    pub limit_dofs: usize,
    pub rows: Vec<TrichotomyRow>,
    pub gaps: Vec<GapRow>,
    pub diagnostics: Vec<AlphaDiagnostics>,
}

fn limit_discretization(config: &ExperimentConfig) -> Discretization {
    Discretization { degree: config.degree, elements: config.elements, vertical_grading: config.vertical_grading }
}

/// Horizontal elements on `Ω_ε`: at least the limit mesh, and at least
/// `elements_per_period` per period of the fastest mode of `b`.
fn oscillating_discretization(config: &ExperimentConfig, b: &TrigPolynomial, epsilon: f64) -> Discretization {
    let periods = (b.max_mode() as f64 / epsilon).round() as usize;
    let nx = config.elements[0].max(config.elements_per_period * periods);
    Discretization { elements: [nx, config.elements[1]], ..limit_discretization(config) }
}

/// Lowest `n_eigs` eigenvalues of the three limit problems, with `K` from
/// the cell problem.
pub fn compute_limits(config: &ExperimentConfig) -> Result<(LimitSpectra, usize)> {
    let b = config.profile()?;
    let k_value = strange_constant(&CellConfig::new(config.m, b))?.k_value;
    let disc = limit_discretization(config);
    let mut max_residual: f64 = 0.0;
    let mut dofs = 0;
    let mut solve = |variant: ProblemVariant| -> Result<Vec<f64>> {
        let space = build_space(&variant, &disc)?;
        let pencil = assemble_pencil(&variant, &space, disc.degree + 2)?;
        let sol = solve_generalized_eigen(&pencil, config.n_eigs, config.tol)?;
        max_residual = sol.residuals.iter().fold(max_residual, |a, &r| a.max(r));
        dofs = dofs.max(space.free_dim());
        Ok(sol.values)
    };
    let sibc = solve(ProblemVariant::sibc_limit(config.m))?;
    let dirichlet = solve(ProblemVariant::dirichlet_on_w(config.m))?;
    let critical = solve(ProblemVariant::critical(config.m, k_value)?)?;
    Ok((LimitSpectra { sibc, dirichlet, critical, k_value, max_residual }, dofs))
}

struct Solved {
    values: Vec<f64>,
    residuals: Vec<f64>,
    dofs: usize,
}

fn solve_perturbed(config: &ExperimentConfig, b: &TrigPolynomial, alpha: f64, epsilon: f64) -> Result<Solved> {
    let profile = OscillatingProfile::new(alpha, epsilon, b.clone())?;
    let variant = ProblemVariant::sibc_on(profile, config.m);
    let disc = oscillating_discretization(config, b, epsilon);
    let space = build_space(&variant, &disc)?;
    let pencil = assemble_pencil(&variant, &space, disc.degree + 2)?;
    let sol = solve_generalized_eigen(&pencil, config.n_eigs, config.tol)?;
    Ok(Solved { values: sol.values, residuals: sol.residuals, dofs: space.free_dim() })
}

fn run_jobs<T: Send>(jobs: &[(f64, f64)], threads: usize, work: impl Fn(f64, f64) -> T + Sync) -> Vec<T> {
    let threads = if threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        threads
    }
    .min(jobs.len())
    .max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<T>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(a, e)) = jobs.get(i) else { break };
                let r = work(a, e);
                results.lock().expect("result slots")[i] = Some(r);
            });
        }
    });
    results.into_inner().expect("result slots").into_iter().map(|r| r.expect("every job ran")).collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] < w[0])
}

/// Solves the strong intermediate problem on every `Ω_ε` of the config and
/// compares with the three limits. A failing `(α, ε)` solve is recorded in
/// its rows and the run continues.
pub fn run_trichotomy(config: &ExperimentConfig) -> Result<TrichotomyReport> {
    config.validate()?;
    let b = config.profile()?;
    let (limits, limit_dofs) = compute_limits(config)?;
    let jobs: Vec<(f64, f64)> =
        config.alphas.iter().flat_map(|&a| config.epsilons.iter().map(move |&e| (a, e))).collect();
    let solved = run_jobs(&jobs, config.threads, |a, e| solve_perturbed(config, &b, a, e));

    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    for (&(alpha, epsilon), result) in jobs.iter().zip(solved) {
        let limit_row = |n: usize| (limits.sibc[n - 1], limits.dirichlet[n - 1], limits.critical[n - 1]);
        match result {
            Ok(s) => {
                for n in 1..=config.n_eigs {
                    let (ls, ld, lc) = limit_row(n);
                    rows.push(TrichotomyRow {
                        alpha,
                        epsilon,
                        n,
                        lambda: s.values[n - 1],
                        limit_sibc: ls,
                        limit_dirichlet: ld,
                        limit_critical: lc,
                        dofs: s.dofs,
                        residual: s.residuals[n - 1],
                        error: None,
                    });
                }
                let l1 = s.values[0];
                gaps.push(GapRow {
                    alpha,
                    epsilon,
                    sibc: (l1 - limits.sibc[0]).abs(),
                    dirichlet: (l1 - limits.dirichlet[0]).abs(),
                    critical: (l1 - limits.critical[0]).abs(),
                });
            }
            Err(err) => {
                for n in 1..=config.n_eigs {
                    let (ls, ld, lc) = limit_row(n);
                    rows.push(TrichotomyRow {
                        alpha,
                        epsilon,
                        n,
                        lambda: f64::NAN,
                        limit_sibc: ls,
                        limit_dirichlet: ld,
                        limit_critical: lc,
                        dofs: 0,
                        residual: f64::NAN,
                        error: Some(err.to_string()),
                    });
                }
                gaps.push(GapRow { alpha, epsilon, sibc: f64::NAN, dirichlet: f64::NAN, critical: f64::NAN });
            }
        }
    }

    let diagnostics = config
        .alphas
        .iter()
        .map(|&alpha| {
            let mine: Vec<&GapRow> = gaps.iter().filter(|g| g.alpha == alpha).collect();
            let series = |k: LimitKind| mine.iter().map(|g| g.gap(k)).collect::<Vec<f64>>();
            AlphaDiagnostics {
                alpha,
                sibc_gap_decreasing: strictly_decreasing(&series(LimitKind::Sibc)),
                dirichlet_gap_decreasing: strictly_decreasing(&series(LimitKind::Dirichlet)),
                critical_gap_decreasing: strictly_decreasing(&series(LimitKind::Critical)),
                nearest_at_finest: mine.last().and_then(|g| g.nearest()),
            }
        })
        .collect();

    Ok(TrichotomyReport {
        config: config.clone(),
        k_value: limits.k_value,
        limits,
        limit_dofs,
        rows,
        gaps,
        diagnostics,
    })
}

impl TrichotomyReport {
    /// Rows in `(α, ε, n)` order with a fixed number format.
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "trichotomy,{},{},{},{},{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{},{:.3e}",
                c.m,
                c.k,
                r.alpha,
                r.epsilon,
                r.n,
                r.lambda,
                r.limit_sibc,
                r.limit_dirichlet,
                r.limit_critical,
                self.k_value,
                r.dofs,
                r.residual
            );
        }
        out
    }

    /// Every row with a finite eigenvalue is at least 1, and the limits are ordered.
    pub fn invariants_hold(&self) -> bool {
        self.limits.ordered() && self.rows.iter().filter(|r| r.error.is_none()).all(|r| r.lambda >= 1.0)
    }

    pub fn gap_table(&self) -> String {
        let mut out = String::from("alpha,epsilon,gap_SIBC,gap_dirichlet,gap_critical,nearest\n");
        for g in &self.gaps {
            let nearest = g.nearest().map_or("tie".to_string(), |k| format!("{k:?}"));
            let _ = writeln!(
                out,
                "{},{},{:.6e},{:.6e},{:.6e},{}",
                g.alpha, g.epsilon, g.sibc, g.dirichlet, g.critical, nearest
            );
        }
        out
    }
}

/// Gnuplot script plotting `λ_1` against `ε` per `α` from `csv_path`, with
/// the three limits as horizontal lines.
pub fn gnuplot_script(report: &TrichotomyReport, csv_path: &str) -> String {
    let alphas: Vec<String> = report.config.alphas.iter().map(|a| a.to_string()).collect();
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set logscale x 2");
    let _ = writeln!(out, "set xlabel 'epsilon'");
    let _ = writeln!(out, "set ylabel 'lambda_1'");
    let _ = writeln!(out, "set key outside right");
    let _ = writeln!(out, "set title 'm = {}, K = {:.6}'", report.config.m, report.k_value);
    let _ = writeln!(out, "sibc = {:.10e}", report.limits.sibc[0]);
    let _ = writeln!(out, "crit = {:.10e}", report.limits.critical[0]);
    let _ = writeln!(out, "diri = {:.10e}", report.limits.dirichlet[0]);
    let _ = writeln!(out, "plot for [a in \"{}\"] '{}' using (strcol(4) eq a && $6 == 1 ? $5 : 1/0):7 \\", alphas.join(" "), csv_path);
    let _ = writeln!(out, "    with linespoints title 'alpha = '.a, \\");
    let _ = writeln!(out, "  sibc title 'SIBC' dashtype 2, crit title 'critical' dashtype 3, diri title 'Dirichlet on W' dashtype 4");
    out
}
