use nalgebra::DVector;

use super::C64;
use crate::{Error, Result};

/// A normalized pure state in a `d`-dimensional Hilbert space, `d ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<C64>,
}

impl QuantumState {
    /// Allowed deviation of `Σ|aᵢ|²` from one.
    pub const NORM_TOLERANCE: f64 = 1e-12;

    /// Wraps amplitudes that are already normalized. Amplitudes are stored
    /// unmodified.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: DVector<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm_sq = amplitudes.norm_squared();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector onto the unit sphere.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self { amplitudes: v.unscale(norm) })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return Err(Error::BadDimension(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    /// Output of a unitary map applied to a normalized state; norm drift is
    /// round-off only.
    pub(crate) fn from_unitary_image(amplitudes: DVector<C64>) -> Self {
        debug_assert!((amplitudes.norm_squared() - 1.0).abs() < 1e-9);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        check_same(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// `|⟨a|b⟩|`.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::BadDimension(format!("dimension must be at least 2, got {dim}")));
    }
    Ok(())
}

pub(crate) fn check_same(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
