use std::fmt::Write as _;

use serde::Serialize;

use crate::cell::{strange_constant, truncation_study, verify_identities, CellConfig, IdentityReport, TruncationMesh, TruncationReport};
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct ModeEnergy {
    pub k: u32,
    pub mu: f64,
    pub cos: f64,
    pub sin: f64,
    pub energy: f64,
}

/// `K` with its mode split, the identity residuals and, for non-constant
/// data, the truncated-strip comparison.
#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub m: usize,
    pub b: String,
    #[serde(rename = "K")]
    pub k_value: f64,
    pub modes: Vec<ModeEnergy>,
    /// Absent for constant data, where every route gives zero.
    pub identities: Option<IdentityReport>,
    pub truncation: Option<TruncationReport>,
}

pub fn run_cell_report(m: usize, b: &str) -> Result<CellReport> {
    let profile = crate::geometry::TrigPolynomial::parse(b)?;
    let solution = strange_constant(&CellConfig::new(m, profile.clone()))?;
    let energies = solution.mode_energies();
    let modes = solution
        .modes
        .iter()
        .zip(&energies)
        .map(|(md, &(k, energy))| ModeEnergy { k, mu: md.solution.mu, cos: md.cos, sin: md.sin, energy })
        .collect();
    let (identities, truncation) = if profile.is_nonconstant() {
        (
            Some(verify_identities(&solution)?),
            Some(truncation_study(m, &profile, &TruncationMesh::default_for(m))?),
        )
    } else {
        (None, None)
    };
    Ok(CellReport { m, b: b.to_string(), k_value: solution.k_value, modes, identities, truncation })
}

impl CellReport {
    /// `m,mode,mu,cos,sin,energy` per mode, then a `total` row carrying `K`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,mode,mu,cos,sin,energy\n");
        for md in &self.modes {
            let _ = writeln!(out, "{},{},{:.12e},{},{},{:.12e}", self.m, md.k, md.mu, md.cos, md.sin, md.energy);
        }
        let _ = writeln!(out, "{},total,,,,{:.12e}", self.m, self.k_value);
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
