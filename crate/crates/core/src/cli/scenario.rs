//! The JSON scenario schema read by `check --scenario`.

use serde::{Deserialize, Serialize};

use crate::quantum::{Observable, QuantumState, UnitsConfig, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexEntry {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for C64 {
    fn from(z: ComplexEntry) -> Self {
        C64::new(z.re, z.im)
    }
}

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub hamiltonian: Vec<Vec<ComplexEntry>>,
    pub observable: Vec<Vec<ComplexEntry>>,
    pub state: Vec<ComplexEntry>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub t_max: f64,
    pub steps: usize,
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub hamiltonian: Observable,
    pub observable: Observable,
    pub state: QuantumState,
    pub units: UnitsConfig,
    pub t_max: f64,
    pub steps: usize,
}

fn rows(m: &[Vec<ComplexEntry>]) -> Vec<Vec<C64>> {
    m.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect()
}

fn entries(o: &Observable) -> Vec<Vec<ComplexEntry>> {
    let m = o.matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect()).collect()
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("scenario: {e}")))
    }

    pub fn to_json(&self) -> String {
        super::format::to_json(self)
    }

    pub fn into_scenario(&self) -> Result<Scenario> {
        if self.steps < 2 {
            return Err(Error::InvalidArgument(format!("scenario steps must be >= 2, got {}", self.steps)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidArgument(format!("scenario t_max must be positive, got {}", self.t_max)));
        }
        let hamiltonian = Observable::from_rows(&rows(&self.hamiltonian))?;
        let observable = Observable::from_rows(&rows(&self.observable))?;
        let state = QuantumState::new(self.state.iter().map(|&z| z.into()).collect())?;
        if hamiltonian.dim() != state.dim() || observable.dim() != state.dim() {
            return Err(Error::DimensionMismatch { expected: state.dim(), got: hamiltonian.dim().max(observable.dim()) });
        }
        Ok(Scenario {
            hamiltonian,
            observable,
            state,
            units: UnitsConfig::new(self.hbar)?,
            t_max: self.t_max,
            steps: self.steps,
        })
    }
}

impl Scenario {
    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile {
            hamiltonian: entries(&self.hamiltonian),
            observable: entries(&self.observable),
            state: self.state.amplitudes().iter().map(|&z| z.into()).collect(),
            hbar: self.units.hbar(),
            t_max: self.t_max,
            steps: self.steps,
        }
    }
}
