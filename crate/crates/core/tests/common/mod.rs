//! Independent oracles shared by the integration suites. Nothing here goes
//! through the crate's eigensolver.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qslb::{Observable, QuantumState, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{−iHt}` by scaling and squaring with a 50-term Taylor series.
pub fn taylor_propagator(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let d = h.nrows();
    let a = h.map(|x| x * c(0.0, -t));
    let norm: f64 = a.iter().map(|x| x.norm()).sum::<f64>().max(1e-300);
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.5 {
        squarings += 1;
    }
    let a = a.unscale(2f64.powi(squarings));
    let mut term = DMatrix::<C64>::identity(d, d);
    let mut sum = term.clone();
    for k in 1..=50 {
        term = &term * &a / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn taylor_evolve(h: &Observable, psi: &QuantumState, t: f64) -> DVector<C64> {
    taylor_propagator(h.matrix(), t) * psi.amplitudes()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> Observable {
    let a = DMatrix::from_fn(d, d, |_, _| c(gaussian(rng), gaussian(rng)));
    let h = (&a + a.adjoint()).scale(0.5);
    Observable::from_rows(
        &(0..d).map(|i| (0..d).map(|j| h[(i, j)]).collect()).collect::<Vec<_>>(),
    )
    .unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, d: usize) -> QuantumState {
    QuantumState::normalized((0..d).map(|_| c(gaussian(rng), gaussian(rng))).collect()).unwrap()
}

/// Global-phase-insensitive overlap magnitude of raw vectors.
pub fn overlap(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.dotc(b).norm()
}

/// Moments of a raw vector: `(⟨A⟩, ΔA)`.
pub fn raw_mean_std(a: &DMatrix<C64>, psi: &DVector<C64>) -> (f64, f64) {
    let ap = a * psi;
    let mean = psi.dotc(&ap).re;
    (mean, (ap - psi * c(mean, 0.0)).norm())
}

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    DMatrix::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

/// `Σᵢ opᵢ` acting on spin `i` of an `n`-spin register (spin 0 is the most
/// significant factor).
pub fn collective_sum(op: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(2, 2);
    let dim = 1 << n;
    let mut total = DMatrix::<C64>::zeros(dim, dim);
    for site in 0..n {
        let mut m = DMatrix::<C64>::identity(1, 1);
        for k in 0..n {
            m = kron(&m, if k == site { op } else { &id });
        }
        total += m;
    }
    total
}

/// `⟨ΣQ⟩(t)` and `Δ(ΣQ)(t)` for `n` spins under `H = b Σ σ_y`, evolved in the
/// full `2ⁿ` space by the Taylor propagator from all spins up.
pub fn tensor_collective_trajectory(n: usize, b: f64, times: &[f64]) -> Vec<(f64, f64)> {
    let sy = Observable::pauli_y().matrix().clone();
    let sz = Observable::pauli_z().matrix().clone();
    let h = collective_sum(&sy, n).scale(b);
    let q = collective_sum(&sz, n);
    let mut psi0 = DVector::<C64>::zeros(1 << n);
    psi0[0] = c(1.0, 0.0);
    times
        .iter()
        .map(|&t| raw_mean_std(&q, &(taylor_propagator(&h, t) * &psi0)))
        .collect()
}
