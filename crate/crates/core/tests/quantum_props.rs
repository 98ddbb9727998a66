mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use qslb::quantum::moments;
use qslb::{
    evolve, fidelity, spectral_decompose, two_level_decompose, uncertainty, Observable,
    QuantumState, UnitsConfig, C64,
};

fn instance(seed: u64, d: usize) -> (Observable, QuantumState, QuantumState) {
    let mut r = rng(seed);
    let h = random_hermitian(&mut r, d);
    let a = random_state(&mut r, d);
    let b = random_state(&mut r, d);
    (h, a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>(), d in 2usize..=12) {
        let (h, _, _) = instance(seed, d);
        let s = spectral_decompose(&h).unwrap();
        prop_assert!((s.reconstruct() - h.matrix()).camax() <= 1e-10 * s.scale());
        let gram = s.eigenvectors().adjoint() * s.eigenvectors();
        prop_assert!((gram - DMatrix::<C64>::identity(d, d)).camax() <= 1e-10);
        prop_assert!(s.eigenvalues().as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn evolution_is_unitary(seed in any::<u64>(), d in 2usize..=8, t in -5.0f64..5.0) {
        let (h, a, b) = instance(seed, d);
        let s = spectral_decompose(&h).unwrap();
        let u = UnitsConfig::default();
        let at = evolve(&s, &a, t, u).unwrap();
        let bt = evolve(&s, &b, t, u).unwrap();
        prop_assert!((at.amplitudes().norm() - 1.0).abs() <= 1e-10);
        prop_assert!((fidelity(&at, &bt).unwrap() - fidelity(&a, &b).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn energy_is_conserved(seed in any::<u64>(), d in 2usize..=8, t in 0.0f64..10.0) {
        let (h, a, _) = instance(seed, d);
        let s = spectral_decompose(&h).unwrap();
        let at = evolve(&s, &a, t, UnitsConfig::default()).unwrap();
        let m0 = moments(&a, &h).unwrap();
        let mt = moments(&at, &h).unwrap();
        prop_assert!((m0.mean - mt.mean).abs() <= 1e-9);
        prop_assert!((m0.std_dev() - mt.std_dev()).abs() <= 1e-9);
    }

    #[test]
    fn evolution_composes(seed in any::<u64>(), d in 2usize..=8, t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let (h, a, _) = instance(seed, d);
        let s = spectral_decompose(&h).unwrap();
        let u = UnitsConfig::default();
        let two_step = evolve(&s, &evolve(&s, &a, t1, u).unwrap(), t2, u).unwrap();
        let one_step = evolve(&s, &a, t1 + t2, u).unwrap();
        prop_assert!(fidelity(&two_step, &one_step).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn matches_taylor_oracle(seed in any::<u64>(), d in 2usize..=4, t in -4.0f64..4.0) {
        let (h, a, _) = instance(seed, d);
        let s = spectral_decompose(&h).unwrap();
        let spectral = evolve(&s, &a, t, UnitsConfig::default()).unwrap();
        let oracle = taylor_evolve(&h, &a, t);
        prop_assert!((spectral.amplitudes() - oracle).camax() <= 1e-8);
    }

    #[test]
    fn two_level_split_reconstructs(seed in any::<u64>(), d in 2usize..=8) {
        let (_, a, b) = instance(seed, d);
        let split = two_level_decompose(&a, &b).unwrap();
        prop_assert!((split.alpha.norm_sqr() + split.beta * split.beta - 1.0).abs() <= 1e-10);
        let orth = split.orth_state.unwrap();
        prop_assert!(a.inner(&orth).unwrap().norm() <= 1e-10);
        let rebuilt = a.amplitudes() * split.alpha + orth.amplitudes() * C64::new(split.beta, 0.0);
        prop_assert!(overlap(&rebuilt, b.amplitudes()) >= 1.0 - 1e-9);
        prop_assert!((rebuilt - b.amplitudes()).camax() <= 1e-9);
    }
}

#[test]
fn eigenvector_start_has_no_uncertainty() {
    let (h, _, _) = instance(3, 5);
    let s = spectral_decompose(&h).unwrap();
    for k in 0..5 {
        assert!(uncertainty(&s.eigenstate(k), &h).unwrap() <= 1e-10);
    }
}

#[test]
fn degenerate_spectrum_is_deterministic() {
    let h = Observable::from_real_diagonal(&[2.0, 1.0, 2.0, 1.0]).unwrap();
    let a = spectral_decompose(&h).unwrap();
    let b = spectral_decompose(&h).unwrap();
    assert_eq!(a, b);
    assert!((a.reconstruct() - h.matrix()).camax() < 1e-14);
}
