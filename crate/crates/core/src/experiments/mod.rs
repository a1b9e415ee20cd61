//! Batch drivers: the trichotomy study, the cell-constant report and the
//! identity check suites, with CSV and plot-script output.

mod cell_report;
mod checks;
mod trichotomy;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TrigPolynomial;

pub use cell_report::{run_cell_report, CellReport, ModeEnergy};
pub use checks::{
    averaged_moment_defect, classifier_mismatches, derivative_audit, green_residuals, h_eps_slope,
    projector_idempotence_defect, projector_test_field, rate_exponent_deviation, run_checks, substitute,
    table_relative_error, unfolding_identity_worst, CheckRecord, CheckTable, DerivativeAudit, H_EPS_FAMILY, SUITES,
};
pub use trichotomy::{
    compute_limits, gnuplot_script, run_trichotomy, AlphaDiagnostics, GapRow, LimitKind, LimitSpectra, TrichotomyReport,
    TrichotomyRow, CSV_HEADER,
};

/// Parameters of a trichotomy or cell-constant run. JSON field names match
/// the struct fields; omitted fields take the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub k: usize,
    pub alphas: Vec<f64>,
    /// Strictly decreasing, each `1/n` for an integer `n`.
    pub epsilons: Vec<f64>,
    /// Profile expression such as `2+cos` or `2+cos+0.3sin2`.
    pub b: String,
    pub degree: usize,
    /// Elements on the limit rectangle, `[horizontal, vertical]`.
    pub elements: [usize; 2],
    /// Horizontal elements per oscillation period on `Ω_ε`.
    pub elements_per_period: usize,
    pub vertical_grading: f64,
    pub n_eigs: usize,
    /// Relative eigen-residual tolerance.
    pub tol: f64,
    /// Worker threads for independent `(α, ε)` rows; `0` uses all cores.
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            m: 2,
            k: 1,
            alphas: vec![1.0, 1.5, 2.0],
            epsilons: vec![0.25, 0.125, 0.0625],
            b: "2+cos".into(),
            degree: 3,
            elements: [16, 16],
            elements_per_period: 8,
            vertical_grading: 0.75,
            n_eigs: 5,
            tol: 1e-8,
            threads: 0,
            output: None,
        }
    }
}

/// Smallest horizontal resolution accepted on `Ω_ε`.
pub const MIN_ELEMENTS_PER_PERIOD: usize = 4;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn profile(&self) -> Result<TrigPolynomial> {
        TrigPolynomial::parse(&self.b)
    }

    /// Checks everything a trichotomy run needs.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Configuration(msg));
        if self.m < 2 {
            return bad(format!("m = {} but intermediate conditions need m >= 2", self.m));
        }
        if self.k + 1 != self.m {
            return bad(format!("trichotomy runs need k = m - 1 = {}, got {}", self.m - 1, self.k));
        }
        if self.alphas.is_empty() || self.epsilons.is_empty() {
            return bad("empty alpha or epsilon list".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a <= 4.0)) {
            return bad(format!("alpha = {a} outside (0, 4]"));
        }
        for e in &self.epsilons {
            let n = 1.0 / e;
            if !(*e > 0.0 && *e < 1.0) || (n - n.round()).abs() > 1e-9 * n {
                return bad(format!("epsilon = {e} is not 1/n for an integer n >= 2"));
            }
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("epsilon list {:?} is not strictly decreasing", self.epsilons));
        }
        if self.degree < self.m {
            return bad(format!("degree {} below m = {}", self.degree, self.m));
        }
        if self.elements.iter().any(|&n| n == 0) || self.n_eigs == 0 {
            return bad("need at least one element per direction and one eigenvalue".into());
        }
        if self.elements_per_period < MIN_ELEMENTS_PER_PERIOD {
            return bad(format!(
                "{} elements per period do not resolve the oscillation (minimum {MIN_ELEMENTS_PER_PERIOD})",
                self.elements_per_period
            ));
        }
        if !(self.vertical_grading > 0.0 && self.vertical_grading <= 1.0) {
            return bad(format!("vertical grading {} outside (0, 1]", self.vertical_grading));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tolerance {} must be positive", self.tol));
        }
        self.profile().map(|_| ())
    }
}
