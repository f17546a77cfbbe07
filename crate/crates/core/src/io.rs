//! Versioned JSON documents for stationary states and stability reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::stability::StabilityReport;
use crate::stationary::StationaryState;

pub const FORMAT_VERSION: u32 = 1;

/// Identifies the algorithm that produced a cached document.
pub const SOLVER_VERSION: &str = concat!("snewton-", env!("CARGO_PKG_VERSION"), "/shoot-rk4-bisect");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDiagnostics {
    #[serde(rename = "T")]
    pub kinetic: f64,
    #[serde(rename = "V")]
    pub potential: f64,
    pub conserved_energy: f64,
    #[serde(rename = "I")]
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingRecord {
    pub trust_radius: f64,
    pub tail_coefficient: f64,
    pub fit_residual: f64,
    pub psi0: f64,
    pub u0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub format_version: u32,
    pub solver_version: String,
    pub n: usize,
    #[serde(rename = "E")]
    pub energy: f64,
    pub grid: Vec<f64>,
    #[serde(rename = "R0_values")]
    pub r0_values: Vec<f64>,
    #[serde(rename = "U0_values")]
    pub u0_values: Vec<f64>,
    pub diagnostics: StateDiagnostics,
    pub shooting: ShootingRecord,
}

impl From<&StationaryState> for StateDocument {
    fn from(s: &StationaryState) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            solver_version: SOLVER_VERSION.to_string(),
            n: s.n,
            energy: s.energy,
            grid: s.r0.grid().to_vec(),
            r0_values: s.r0.values().to_vec(),
            u0_values: s.u0.values().to_vec(),
            diagnostics: StateDiagnostics {
                kinetic: s.kinetic,
                potential: s.potential,
                conserved_energy: s.conserved_energy,
                norm: s.norm,
            },
            shooting: ShootingRecord {
                trust_radius: s.trust_radius,
                tail_coefficient: s.tail_coefficient,
                fit_residual: s.fit_residual,
                psi0: s.shooting_psi0,
                u0: s.shooting_u0,
            },
        }
    }
}

impl StateDocument {
    /// Rebuilds the state, rejecting documents from another format or solver version.
    pub fn into_state(self) -> Result<StationaryState> {
        if self.format_version != FORMAT_VERSION || self.solver_version != SOLVER_VERSION {
            return Err(Error::StaleDocument {
                expected: format!("{SOLVER_VERSION} (format {FORMAT_VERSION})"),
                found: format!("{} (format {})", self.solver_version, self.format_version),
            });
        }
        Ok(StationaryState {
            n: self.n,
            energy: self.energy,
            r0: RadialProfile::new(self.grid.clone(), self.r0_values)?,
            u0: RadialProfile::new(self.grid, self.u0_values)?,
            norm: self.diagnostics.norm,
            kinetic: self.diagnostics.kinetic,
            potential: self.diagnostics.potential,
            conserved_energy: self.diagnostics.conserved_energy,
            trust_radius: self.shooting.trust_radius,
            tail_coefficient: self.shooting.tail_coefficient,
            fit_residual: self.shooting.fit_residual,
            shooting_psi0: self.shooting.psi0,
            shooting_u0: self.shooting.u0,
        })
    }
}

pub fn state_to_json(state: &StationaryState) -> String {
    serde_json::to_string(&StateDocument::from(state)).expect("state document serializes")
}

pub fn state_from_json(text: &str) -> Result<StationaryState> {
    let doc: StateDocument = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    doc.into_state()
}

pub fn report_to_json(report: &StabilityReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn report_from_json(text: &str) -> Result<StabilityReport> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}
