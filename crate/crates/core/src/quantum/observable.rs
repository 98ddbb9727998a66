use nalgebra::{DMatrix, DVector};

use super::state::check_same;
use super::{QuantumState, C64};
use crate::{Error, Result};

/// Hermitian operator. Used both as a measured observable `Q` and, by role, as
/// a Hamiltonian `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: DMatrix<C64>,
}

/// Relative Hermiticity tolerance (scaled by the largest entry, floor 1).
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Imaginary residue of `⟨ψ|Q|ψ⟩` tolerated before the value is rejected.
pub const NONREAL_TOLERANCE: f64 = 1e-10;

/// Checks `A = A†` and wraps the matrix unmodified.
pub fn validate_hermitian(matrix: DMatrix<C64>) -> Result<Observable> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(Error::BadDimension(format!("matrix is {rows}x{cols}, not square")));
    }
    if rows < 2 {
        return Err(Error::BadDimension(format!("dimension must be at least 2, got {rows}")));
    }
    let mut scale: f64 = 1.0;
    let mut deviation: f64 = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let a = matrix[(i, j)];
            scale = scale.max(a.norm());
            deviation = deviation.max((a - matrix[(j, i)].conj()).norm());
        }
    }
    let tolerance = HERMITIAN_TOLERANCE * scale;
    if !(deviation <= tolerance) {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    Ok(Observable { matrix })
}

impl Observable {
    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&d| C64::new(d, 0.0)));
        validate_hermitian(DMatrix::from_diagonal(&v))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadDimension("ragged or non-square matrix".into()));
        }
        validate_hermitian(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        validate_hermitian(DMatrix::identity(dim, dim))
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self { matrix: DMatrix::from_row_slice(2, 2, &[o, l, l, o]) }
    }

    pub fn pauli_y() -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
        Self { matrix: DMatrix::from_row_slice(2, 2, &[o, -i, i, o]) }
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self { matrix: DMatrix::from_row_slice(2, 2, &[l, o, o, -l]) }
    }

    /// Wraps a matrix already known to be Hermitian up to round-off, forcing
    /// exact symmetry.
    pub(crate) fn from_hermitian_part(m: DMatrix<C64>) -> Self {
        let adj = m.adjoint();
        Self { matrix: (m + adj).scale(0.5) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { matrix: self.matrix.scale(factor) }
    }

    /// `A − c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in 0..matrix.nrows() {
            matrix[(i, i)] -= C64::new(c, 0.0);
        }
        Self { matrix }
    }

    /// Largest entry magnitude.
    pub fn max_entry(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, a| m.max(a.norm()))
    }
}

/// Mean and spread of an observable in a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    std_dev: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    pub fn variance(&self) -> f64 {
        self.std_dev * self.std_dev
    }

    /// `⟨A²⟩ = Var + ⟨A⟩²`.
    pub fn mean_square(&self) -> f64 {
        self.variance() + self.mean * self.mean
    }
}

/// `(⟨ψ|A|ψ⟩, ‖(A − ⟨A⟩)ψ‖)` for raw normalized amplitudes, without validation.
///
/// The spread is taken as a residual norm rather than `√(⟨A²⟩ − ⟨A⟩²)`: the
/// latter cancels catastrophically near eigenstates and leaves `~1e-8` noise.
pub(crate) fn raw_moments(a: &DMatrix<C64>, psi: &DVector<C64>) -> (C64, f64) {
    let mut a_psi = a * psi;
    let mean = psi.dotc(&a_psi);
    a_psi.axpy(-C64::new(mean.re, 0.0), psi, C64::new(1.0, 0.0));
    (mean, a_psi.norm())
}

pub fn moments(state: &QuantumState, obs: &Observable) -> Result<Moments> {
    check_same(obs.dim(), state.dim())?;
    let (mean, std_dev) = raw_moments(&obs.matrix, state.amplitudes());
    if mean.im.abs() > NONREAL_TOLERANCE {
        return Err(Error::NonrealExpectation(mean.im));
    }
    Ok(Moments { mean: mean.re, std_dev })
}

/// `⟨ψ|Q|ψ⟩`.
pub fn expectation(state: &QuantumState, obs: &Observable) -> Result<f64> {
    moments(state, obs).map(|m| m.mean)
}

/// `ΔQ = √(⟨Q²⟩ − ⟨Q⟩²)`.
pub fn uncertainty(state: &QuantumState, obs: &Observable) -> Result<f64> {
    moments(state, obs).map(|m| m.std_dev())
}

/// Shifts `Q` so that `state` has zero mean: `Q − ⟨Q⟩·I`.
pub fn shift_observable(obs: &Observable, state: &QuantumState) -> Result<Observable> {
    let mean = expectation(state, obs)?;
    Ok(obs.shifted(mean))
}

/// `[A, B] = AB − BA` (anti-Hermitian for Hermitian inputs).
pub fn commutator(a: &Observable, b: &Observable) -> Result<DMatrix<C64>> {
    check_same(a.dim(), b.dim())?;
    Ok(&a.matrix * &b.matrix - &b.matrix * &a.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validates_paulis_and_rejects_nilpotent() {
        let z = Observable::from_rows(&[vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]]);
        assert_eq!(z.unwrap(), Observable::pauli_z());
        let y = Observable::from_rows(&[vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]]);
        assert_eq!(y.unwrap(), Observable::pauli_y());
        let bad = Observable::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(0., 0.), c(0., 0.)]]);
        assert!(matches!(bad, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(validate_hermitian(DMatrix::zeros(2, 3)), Err(Error::BadDimension(_))));
        assert!(matches!(validate_hermitian(DMatrix::zeros(1, 1)), Err(Error::BadDimension(_))));
    }

    #[test]
    fn hermitian_tolerance_scales_with_entries() {
        let mut m = DMatrix::from_element(2, 2, c(1e6, 0.0));
        m[(0, 1)] += c(1e-7, 0.0);
        assert!(validate_hermitian(m.clone()).is_ok());
        m[(0, 1)] += c(1e-5, 0.0);
        assert!(validate_hermitian(m).is_err());
    }

    #[test]
    fn expectation_and_uncertainty_examples() {
        let z = Observable::pauli_z();
        let up = QuantumState::basis(2, 0).unwrap();
        assert_eq!(expectation(&up, &z).unwrap(), 1.0);
        assert_eq!(uncertainty(&up, &z).unwrap(), 0.0);

        let plus = QuantumState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!(expectation(&plus, &z).unwrap().abs() < 1e-15);
        assert!((uncertainty(&plus, &z).unwrap() - 1.0).abs() < 1e-15);

        // ⟨σ_z⟩ = cos 2θ and Δσ_z = sin 2θ; compared with a hand contraction.
        let (s, co) = FRAC_PI_8.sin_cos();
        let tilted = QuantumState::from_real(&[co, s]).unwrap();
        let manual_mean = co * co - s * s;
        let manual_var = (co * co + s * s) - manual_mean * manual_mean;
        assert!((expectation(&tilted, &z).unwrap() - manual_mean).abs() < 1e-15);
        assert!((expectation(&tilted, &z).unwrap() - FRAC_PI_4.cos()).abs() < 1e-15);
        assert!((uncertainty(&tilted, &z).unwrap() - manual_var.sqrt()).abs() < 1e-15);
        assert!((uncertainty(&tilted, &z).unwrap() - FRAC_PI_4.sin()).abs() < 1e-15);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let three = QuantumState::basis(3, 0).unwrap();
        assert!(matches!(
            expectation(&three, &Observable::pauli_z()),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn shift_examples() {
        let z = Observable::pauli_z();
        let up = QuantumState::basis(2, 0).unwrap();
        let shifted = shift_observable(&z, &up).unwrap();
        assert_eq!(shifted, Observable::from_real_diagonal(&[0.0, -2.0]).unwrap());

        let plus = QuantumState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let same = shift_observable(&z, &plus).unwrap();
        assert!((same.matrix() - z.matrix()).camax() < 1e-15);

        let (s, co) = FRAC_PI_8.sin_cos();
        let tilted = QuantumState::from_real(&[co, s]).unwrap();
        let q = shift_observable(&z, &tilted).unwrap();
        let expected = z.shifted(FRAC_PI_4.cos());
        assert!((q.matrix() - expected.matrix()).camax() < 1e-15);
        assert!(expectation(&tilted, &q).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pauli_commutator() {
        // [σ_y, σ_z] = 2iσ_x
        let comm = commutator(&Observable::pauli_y(), &Observable::pauli_z()).unwrap();
        let expected = Observable::pauli_x().matrix().map(|a| a * c(0.0, 2.0));
        assert!((comm - expected).camax() < 1e-15);
    }
}
