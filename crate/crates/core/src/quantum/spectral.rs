use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::observable::raw_moments;
use super::state::check_same;
use super::{Observable, QuantumState, UnitsConfig, C64};
use crate::{Error, Result};

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

/// Diagonalizes `obs`. Within a degenerate eigenspace the basis is whatever
/// the solver produces, which is fixed for a fixed input.
pub fn spectral_decompose(obs: &Observable) -> Result<SpectralDecomposition> {
    let eig = SymmetricEigen::try_new(obs.matrix().clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or(Error::EigensolverFailure)?;
    if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::EigensolverFailure);
    }
    let d = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let eigenvalues = DVector::from_iterator(d, order.iter().map(|&k| eig.eigenvalues[k]));
    let eigenvectors = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    /// The `k`-th eigenvector as a state.
    pub fn eigenstate(&self, k: usize) -> QuantumState {
        QuantumState::from_unitary_image(self.eigenvectors.column(k).into_owned())
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.eigenvectors[(i, j)] * self.eigenvalues[j]
        });
        scaled * self.eigenvectors.adjoint()
    }

    /// Largest eigenvalue magnitude, floor 1.
    pub fn scale(&self) -> f64 {
        self.eigenvalues.iter().fold(1.0_f64, |m, l| m.max(l.abs()))
    }
}

/// `e^{−iHt/ħ}|ψ⟩`, evaluated through the spectrum of `H`.
pub fn evolve(
    spec: &SpectralDecomposition,
    state: &QuantumState,
    t: f64,
    units: UnitsConfig,
) -> Result<QuantumState> {
    let prop = Propagator::new(spec.clone(), state)?;
    Ok(prop.state_at(units.to_natural_time(t)))
}

/// A fixed initial state expanded once in the eigenbasis of `H`, so that the
/// state at any time costs one phase multiplication and one basis change.
#[derive(Debug, Clone)]
pub struct Propagator {
    spec: SpectralDecomposition,
    coeffs: DVector<C64>,
}

impl Propagator {
    pub fn new(spec: SpectralDecomposition, initial: &QuantumState) -> Result<Self> {
        check_same(spec.dim(), initial.dim())?;
        let coeffs = spec.eigenvectors.adjoint() * initial.amplitudes();
        Ok(Self { spec, coeffs })
    }

    pub fn from_hamiltonian(h: &Observable, initial: &QuantumState) -> Result<Self> {
        Self::new(spectral_decompose(h)?, initial)
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Amplitudes at natural time `t` (phase `e^{−iλt}`).
    pub fn amplitudes_at(&self, t: f64) -> DVector<C64> {
        let phased = DVector::from_iterator(
            self.dim(),
            self.coeffs
                .iter()
                .zip(self.spec.eigenvalues.iter())
                .map(|(c, &l)| c * C64::from_polar(1.0, -l * t)),
        );
        &self.spec.eigenvectors * phased
    }

    pub fn state_at(&self, t: f64) -> QuantumState {
        QuantumState::from_unitary_image(self.amplitudes_at(t))
    }

    /// Moments of `q` and the overlap with the initial state at natural time `t`.
    pub(crate) fn observe(&self, q: &Observable, t: f64) -> Observation {
        let psi = self.amplitudes_at(t);
        let (mean, spread) = raw_moments(q.matrix(), &psi);
        let phases: Vec<C64> =
            self.spec.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect();
        // ⟨ψ(0)|ψ(t)⟩ = Σ |cₖ|² e^{−iλₖt}
        let overlap: C64 =
            self.coeffs.iter().zip(&phases).map(|(c, p)| p * c.norm_sqr()).sum();
        // β = ‖ψ(t) − ⟨ψ(0)|ψ(t)⟩ψ(0)‖, summed in the eigenbasis to avoid the
        // cancellation in √(1 − |⟨ψ(0)|ψ(t)⟩|²).
        let beta = self
            .coeffs
            .iter()
            .zip(&phases)
            .map(|(c, p)| c.norm_sqr() * (p - overlap).norm_sqr())
            .sum::<f64>()
            .sqrt();
        Observation { mean: mean.re, spread, overlap, beta }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Observation {
    pub mean: f64,
    pub spread: f64,
    pub overlap: C64,
    pub beta: f64,
}
