//! Pure-state kinematics and exact spectral dynamics.

mod observable;
mod spectral;
mod split;
mod state;

pub use observable::{
    commutator, expectation, moments, shift_observable, uncertainty, validate_hermitian,
    Moments, Observable,
};
pub use spectral::{evolve, spectral_decompose, Propagator, SpectralDecomposition};
pub use split::{two_level_decompose, TwoLevelSplit};
pub use state::{fidelity, QuantumState};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Physical units. Only `ħ` is configurable; times are measured in units of
/// `ħ / energy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitsConfig {
    hbar: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        Self { hbar: 1.0 }
    }
}

impl UnitsConfig {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Physical time to the dimensionless phase time `t/ħ`.
    pub fn to_natural_time(&self, t: f64) -> f64 {
        t / self.hbar
    }

    pub fn from_natural_time(&self, t: f64) -> f64 {
        t * self.hbar
    }
}
