//! Characteristic times and trajectory-level checks of the speed-limit
//! inequalities.
//!
//! All free functions work in natural units (`ħ = 1`): times are `t·ΔE/ħ`
//! scaled back by `1/ΔE` only. [`TauCatalog`] and [`evaluate_trajectory`]
//! accept a [`UnitsConfig`] and report physical times.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;

use rayon::prelude::*;

use crate::quantum::{commutator, moments, Observable, Propagator, QuantumState, UnitsConfig, C64};
use crate::{Error, Result};

/// Absolute slack on every dimensionless inequality.
pub const SLACK: f64 = 1e-9;
/// `ΔQ` at or below this makes `|δ⟨Q⟩|/ΔQ` undefined.
pub const UNDEFINED_SPREAD: f64 = 1e-10;
/// `ΔQ(0)` at or below this counts as an eigenstate start.
pub const EIGENSTATE_SPREAD: f64 = 1e-10;
/// `ΔE` at or below this is a stationary state.
pub const STATIONARY_DELTA_E: f64 = 1e-12;
/// Step of the centered finite difference used to cross-check `d⟨Q⟩/dt`.
pub const RATE_FD_STEP: f64 = 1e-6;

const WINDOW_EDGE: f64 = 1e-12;
const FIRST_MOMENT_FLOOR: f64 = 1e-10;

fn check_delta_e(delta_e: f64) -> Result<()> {
    if !(delta_e.is_finite() && delta_e > 0.0) {
        return Err(Error::NonpositiveDeltaE(delta_e));
    }
    Ok(())
}

/// Franson's window `ħ/(√2 ΔE)`.
pub fn tau_franson(delta_e: f64) -> Result<f64> {
    check_delta_e(delta_e)?;
    Ok(1.0 / (SQRT_2 * delta_e))
}

/// Strict window for eigenstate starts, `πħ/(4ΔE)`.
pub fn tau_eigenstate_strict(delta_e: f64) -> Result<f64> {
    check_delta_e(delta_e)?;
    Ok(FRAC_PI_4 / delta_e)
}

/// Number of precessing spins in the relaxed problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinCount {
    Finite(u64),
    Infinite,
}

/// Minimal time for `|δ⟨Q⟩|` to reach the largest `ΔQ` seen so far:
/// `πħ/(6ΔE)` for one spin, `√N·arcsin(1/(2√N))·ħ/ΔE` for `N`, and `ħ/(2ΔE)`
/// in the limit.
pub fn tau_relaxed(delta_e: f64, n: SpinCount) -> Result<f64> {
    check_delta_e(delta_e)?;
    match n {
        SpinCount::Finite(0) => Err(Error::BadN("spin count must be at least 1".into())),
        SpinCount::Finite(1) => Ok(PI / 6.0 / delta_e),
        SpinCount::Finite(n) => {
            let root = (n as f64).sqrt();
            Ok(root * (0.5 / root).asin() / delta_e)
        }
        SpinCount::Infinite => Ok(0.5 / delta_e),
    }
}

/// Mandelstam–Tamm orthogonalization time `h/(4ΔE) = πħ/(2ΔE)`.
pub fn orthogonality_time_floor(delta_e: f64) -> Result<f64> {
    check_delta_e(delta_e)?;
    Ok(FRAC_PI_2 / delta_e)
}

/// Returns the phase `ΔE·t` after checking `0 ≤ t ≤ π/(2ΔE)`.
fn window_phase(delta_e: f64, t: f64) -> Result<f64> {
    check_delta_e(delta_e)?;
    let end = FRAC_PI_2 / delta_e;
    if !(t >= 0.0 && t <= end * (1.0 + WINDOW_EDGE)) {
        return Err(Error::OutOfValidityWindow { t, end });
    }
    Ok((delta_e * t).min(FRAC_PI_2))
}

/// Lower bound `cos(ΔE t/ħ)` on `|⟨ψ(0)|ψ(t)⟩|`.
pub fn fidelity_floor(delta_e: f64, t: f64) -> Result<f64> {
    window_phase(delta_e, t).map(f64::cos)
}

/// Upper bound `sin(ΔE t/ħ)` on the orthogonal weight `β`.
pub fn beta_ceiling(delta_e: f64, t: f64) -> Result<f64> {
    window_phase(delta_e, t).map(f64::sin)
}

/// `tan(ΔE t/ħ)` ceiling on `|δ⟨Q⟩|/ΔQ`; `f64::INFINITY` marks the pole at
/// the end of the window. Defined for `t > 0` only.
pub fn tan_ratio_ceiling(delta_e: f64, t: f64) -> Result<f64> {
    let phase = window_phase(delta_e, t)?;
    if t <= 0.0 {
        return Err(Error::OutOfValidityWindow { t, end: FRAC_PI_2 / delta_e });
    }
    Ok(tan_or_pole(phase))
}

fn tan_or_pole(phase: f64) -> f64 {
    if (FRAC_PI_2 - phase) <= WINDOW_EDGE * FRAC_PI_2 {
        f64::INFINITY
    } else {
        phase.tan()
    }
}

/// Every characteristic time for one `ΔE`, in physical time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauCatalog {
    pub delta_e: f64,
    pub hbar: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub tau5: f64,
    pub t_orth: f64,
}

impl TauCatalog {
    pub fn new(delta_e: f64, units: UnitsConfig) -> Result<Self> {
        let hbar = units.hbar();
        Ok(Self {
            delta_e,
            hbar,
            tau1: hbar * tau_franson(delta_e)?,
            tau2: hbar * tau_eigenstate_strict(delta_e)?,
            tau3: hbar * tau_relaxed(delta_e, SpinCount::Finite(1))?,
            tau5: hbar * tau_relaxed(delta_e, SpinCount::Infinite)?,
            t_orth: hbar * orthogonality_time_floor(delta_e)?,
        })
    }

    pub fn tau4(&self, n: u64) -> Result<f64> {
        Ok(self.hbar * tau_relaxed(self.delta_e, SpinCount::Finite(n))?)
    }
}

/// `⟨1|Q′|1⟩` and `⟨1|Q′²|1⟩`.
fn orth_moments(q_shifted: &Observable, orth_state: &QuantumState) -> Result<(f64, f64)> {
    let m = moments(orth_state, q_shifted)?;
    Ok((m.mean, m.mean_square()))
}

/// Orthogonal weight at which `|δ⟨Q⟩| = ΔQ` for a given orthogonal direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualityBeta {
    pub beta: f64,
    pub beta_squared: f64,
    /// `β² ≤ 1`: the equality point exists on the unit sphere.
    pub reachable: bool,
}

/// `β² = ½ ⟨1|Q′²|1⟩ / ⟨1|Q′|1⟩²` for `Q′` shifted so that `Q′|ψ₀⟩ = 0`.
pub fn equality_beta(q_shifted: &Observable, orth_state: &QuantumState) -> Result<EqualityBeta> {
    let (first, second) = orth_moments(q_shifted, orth_state)?;
    if first.abs() <= FIRST_MOMENT_FLOOR {
        return Err(Error::ZeroFirstMoment);
    }
    let beta_squared = 0.5 * second / (first * first);
    Ok(EqualityBeta { beta: beta_squared.sqrt(), beta_squared, reachable: beta_squared <= 1.0 })
}

/// `|δ⟨Q⟩|/ΔQ = 1/√(⟨1|Q′²|1⟩/(β²⟨1|Q′|1⟩²) − 1)` for the state `α|0⟩ + β|1⟩`.
pub fn ratio_from_components(
    beta: f64,
    q_shifted: &Observable,
    orth_state: &QuantumState,
) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1], got {beta}")));
    }
    let (first, second) = orth_moments(q_shifted, orth_state)?;
    if first.abs() <= FIRST_MOMENT_FLOOR {
        return Err(Error::ZeroFirstMoment);
    }
    let arg = second / (beta * beta * first * first) - 1.0;
    if !(arg > f64::EPSILON) {
        return Err(Error::DegenerateDenominator(arg));
    }
    Ok(1.0 / arg.sqrt())
}

/// Both sides of `ΔE·ΔQ ≥ ½|⟨[H,Q]⟩|` at one state, plus the finite-difference
/// cross-check of the rate `d⟨Q⟩/dt = i⟨[H,Q]⟩/ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBound {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
    /// `d⟨Q⟩/dt` from the commutator.
    pub commutator_rate: f64,
    /// `d⟨Q⟩/dt` from a centered difference with step [`RATE_FD_STEP`].
    pub finite_difference_rate: f64,
    pub rate_agrees: bool,
}

pub fn rate_bound_check(h: &Observable, q: &Observable, psi: &QuantumState) -> Result<RateBound> {
    let energy = moments(psi, h)?;
    let spread = moments(psi, q)?;
    let comm = commutator(h, q)?;
    let comm_mean: C64 = psi.amplitudes().dotc(&(&comm * psi.amplitudes()));
    let lhs = energy.std_dev() * spread.std_dev();
    let rhs = 0.5 * comm_mean.norm();
    // ⟨[H,Q]⟩ is imaginary: d⟨Q⟩/dt = i·⟨[H,Q]⟩ = −Im⟨[H,Q]⟩.
    let commutator_rate = -comm_mean.im;

    let prop = Propagator::from_hamiltonian(h, psi)?;
    let mean_at = |t: f64| prop.observe(q, t).mean;
    let finite_difference_rate =
        (mean_at(RATE_FD_STEP) - mean_at(-RATE_FD_STEP)) / (2.0 * RATE_FD_STEP);
    // Relative to the rate itself or its natural scale ΔE·ΔQ, with a floor for
    // the O(ε‖Q‖/h) cancellation error of the difference quotient.
    let tolerance = 1e-6 * commutator_rate.abs().max(lhs) + 1e-9 * q.max_entry().max(1.0);
    Ok(RateBound {
        lhs,
        rhs,
        ok: lhs >= rhs - SLACK,
        commutator_rate,
        finite_difference_rate,
        rate_agrees: (finite_difference_rate - commutator_rate).abs() <= tolerance,
    })
}

/// `|δ⟨Q⟩|/ΔQ`, or a marker when `ΔQ` is numerically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Defined(f64),
    Undefined,
}

impl Ratio {
    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Defined(r) => Some(r),
            Ratio::Undefined => None,
        }
    }
}

/// The inequality a [`BoundPoint`] flag refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundLaw {
    Franson,
    FidelityFloor,
    BetaCeiling,
    TanCeiling,
}

impl fmt::Display for BoundLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundLaw::Franson => "franson inequality |d<Q>| <= dQ",
            BoundLaw::FidelityFloor => "fidelity floor |<psi0|psi(t)>| >= cos(dE t/hbar)",
            BoundLaw::BetaCeiling => "beta ceiling beta <= sin(dE t/hbar)",
            BoundLaw::TanCeiling => "tan law |d<Q>|/dQ <= tan(dE t/hbar)",
        })
    }
}

/// One grid point of a [`BoundReport`]. A flag is `None` where its inequality
/// makes no claim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub t: f64,
    pub q_mean: f64,
    pub delta_q: f64,
    pub dq: f64,
    pub fid: f64,
    pub beta: f64,
    pub ratio: Ratio,
    pub fid_floor: Option<f64>,
    pub beta_ceiling: Option<f64>,
    /// `f64::INFINITY` at the pole.
    pub tan_ceiling: Option<f64>,
    pub franson_ok: Option<bool>,
    pub fidelity_ok: Option<bool>,
    pub beta_ok: Option<bool>,
    pub tan_ok: Option<bool>,
}

impl BoundPoint {
    pub fn first_failure(&self) -> Option<BoundLaw> {
        [
            (self.franson_ok, BoundLaw::Franson),
            (self.fidelity_ok, BoundLaw::FidelityFloor),
            (self.beta_ok, BoundLaw::BetaCeiling),
            (self.tan_ok, BoundLaw::TanCeiling),
        ]
        .into_iter()
        .find_map(|(flag, law)| (flag == Some(false)).then_some(law))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub law: BoundLaw,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub points: Vec<BoundPoint>,
    /// `ΔE` of the initial state, energy units.
    pub delta_e: f64,
    pub eigenstate_start: bool,
    /// `πħ/(4ΔE)`.
    pub tau2: f64,
    /// End of the fidelity-floor validity window, `πħ/(2ΔE)`.
    pub validity_end: f64,
    /// The whole grid lies inside `[0, τ₂]`.
    pub window_respected: bool,
}

impl BoundReport {
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    pub fn first_violation(&self) -> Option<Violation> {
        self.points.iter().find_map(|p| p.first_failure().map(|law| Violation { law, t: p.t }))
    }
}

/// Evolves `psi0` under `h` and evaluates every inequality at each grid time.
///
/// The Franson flag is evaluated at every time for eigenstate starts (so a run
/// past `τ₂` reports the breakdown); the fidelity, `β` and tangent flags only
/// inside `[0, πħ/(2ΔE)]`, the tangent one again only for eigenstate starts.
pub fn evaluate_trajectory(
    h: &Observable,
    psi0: &QuantumState,
    q: &Observable,
    grid: &[f64],
    units: UnitsConfig,
) -> Result<BoundReport> {
    if grid.first() != Some(&0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridNotAscending);
    }
    let delta_e = moments(psi0, h)?.std_dev();
    if delta_e <= STATIONARY_DELTA_E {
        return Err(Error::ZeroDeltaE);
    }
    moments(psi0, q)?;
    let prop = Propagator::from_hamiltonian(h, psi0)?;
    let phase_end = FRAC_PI_2;

    let start = prop.observe(q, 0.0);
    let q_ref = start.mean;
    let eigenstate_start = start.spread <= EIGENSTATE_SPREAD;

    let points = grid
        .par_iter()
        .map(|&t| {
            let tn = units.to_natural_time(t);
            let obs = prop.observe(q, tn);
            let (q_mean, dq, beta) = (obs.mean, obs.spread, obs.beta);
            let delta_q = if t == 0.0 { 0.0 } else { q_mean - q_ref };
            let fid = obs.overlap.norm();
            let ratio = if t == 0.0 {
                Ratio::Defined(0.0)
            } else if dq <= UNDEFINED_SPREAD {
                Ratio::Undefined
            } else {
                Ratio::Defined(delta_q.abs() / dq)
            };
            let phase = delta_e * tn;
            let in_window = phase <= phase_end * (1.0 + WINDOW_EDGE);
            let phase = phase.min(phase_end);
            let fid_floor = in_window.then(|| phase.cos());
            let beta_ceiling = in_window.then(|| phase.sin());
            let tan_ceiling = in_window.then(|| if t == 0.0 { 0.0 } else { tan_or_pole(phase) });

            let franson_ok = eigenstate_start.then(|| dq - delta_q.abs() >= -SLACK);
            let fidelity_ok = fid_floor.map(|floor| fid - floor >= -SLACK);
            let beta_ok = beta_ceiling.map(|ceil| ceil - beta >= -SLACK);
            let tan_ok = match (eigenstate_start, tan_ceiling, ratio) {
                (true, Some(ceil), Ratio::Defined(r)) => Some(ceil - r >= -SLACK),
                _ => None,
            };
            BoundPoint {
                t,
                q_mean,
                delta_q,
                dq,
                fid,
                beta,
                ratio,
                fid_floor,
                beta_ceiling,
                tan_ceiling,
                franson_ok,
                fidelity_ok,
                beta_ok,
                tan_ok,
            }
        })
        .collect::<Vec<_>>();

    let tau2 = units.from_natural_time(FRAC_PI_4 / delta_e);
    Ok(BoundReport {
        window_respected: grid.last().is_some_and(|&t| t <= tau2 * (1.0 + WINDOW_EDGE)),
        points,
        delta_e,
        eigenstate_start,
        tau2,
        validity_end: units.from_natural_time(phase_end / delta_e),
    })
}

/// `n + 1` equally spaced times on `[0, t_max]`, last point exactly `t_max`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) || steps == 0 {
        return Err(Error::InvalidArgument(format!(
            "grid needs t_max > 0 and steps >= 1 (got {t_max}, {steps})"
        )));
    }
    Ok((0..=steps)
        .map(|i| if i == steps { t_max } else { t_max * i as f64 / steps as f64 })
        .collect())
}

#[cfg(test)]
// decimal literals are the published values, checked against the consts
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spin() -> (Observable, QuantumState, Observable) {
        (Observable::pauli_y(), QuantumState::basis(2, 0).unwrap(), Observable::pauli_z())
    }

    #[test]
    fn characteristic_times() {
        assert_abs_diff_eq!(tau_franson(1.0).unwrap(), 0.70710678, epsilon = 1e-8);
        assert_abs_diff_eq!(tau_franson(2.0).unwrap(), 0.35355339, epsilon = 1e-8);
        assert_abs_diff_eq!(tau_franson(1.0 / SQRT_2).unwrap(), 1.0, epsilon = 1e-15);

        assert_abs_diff_eq!(tau_eigenstate_strict(1.0).unwrap(), 0.78539816, epsilon = 1e-8);
        assert_abs_diff_eq!(tau_eigenstate_strict(FRAC_PI_4).unwrap(), 1.0, epsilon = 1e-15);
        assert!(tau_eigenstate_strict(1.0).unwrap() > tau_franson(1.0).unwrap());

        let one = SpinCount::Finite(1);
        assert_abs_diff_eq!(tau_relaxed(1.0, one).unwrap(), 0.52359878, epsilon = 1e-8);
        assert_eq!(tau_relaxed(1.0, SpinCount::Infinite).unwrap(), 0.5);
        assert_abs_diff_eq!(
            tau_relaxed(1.0, SpinCount::Finite(4)).unwrap(),
            2.0 * 0.25f64.asin(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(tau_relaxed(1.0, SpinCount::Finite(4)).unwrap(), 0.50536051, epsilon = 1e-8);

        assert_abs_diff_eq!(orthogonality_time_floor(1.0).unwrap(), FRAC_PI_2);
        assert_abs_diff_eq!(orthogonality_time_floor(FRAC_PI_2).unwrap(), 1.0);
        assert_abs_diff_eq!(
            orthogonality_time_floor(3.0).unwrap(),
            2.0 * tau_eigenstate_strict(3.0).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn characteristic_time_errors() {
        assert!(matches!(tau_franson(0.0), Err(Error::NonpositiveDeltaE(_))));
        assert!(matches!(tau_eigenstate_strict(-1.0), Err(Error::NonpositiveDeltaE(_))));
        assert!(matches!(tau_relaxed(1.0, SpinCount::Finite(0)), Err(Error::BadN(_))));
        assert!(matches!(orthogonality_time_floor(f64::NAN), Err(Error::NonpositiveDeltaE(_))));
    }

    #[test]
    fn catalog_ordering() {
        let cat = TauCatalog::new(1.0, UnitsConfig::default()).unwrap();
        assert!(cat.tau1 < cat.tau2);
        assert!(cat.tau5 < cat.tau3 && cat.tau3 < cat.tau2 && cat.tau2 < cat.t_orth);
        assert!((cat.tau4(1).unwrap() - cat.tau3).abs() <= 1e-12);
        let mut prev = cat.tau4(1).unwrap();
        for n in 2..200 {
            let next = cat.tau4(n).unwrap();
            assert!(next < prev && next > cat.tau5);
            prev = next;
        }
        assert!(cat.tau4(1_000_000).unwrap() - 0.5 < 1e-6);

        let scaled = TauCatalog::new(1.0, UnitsConfig::new(3.0).unwrap()).unwrap();
        assert_abs_diff_eq!(scaled.tau2, 3.0 * cat.tau2, epsilon = 1e-15);
    }

    #[test]
    fn window_functions() {
        assert_eq!(fidelity_floor(1.0, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(fidelity_floor(1.0, FRAC_PI_4).unwrap(), 0.70710678, epsilon = 1e-8);
        assert_abs_diff_eq!(fidelity_floor(1.0, FRAC_PI_2).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(fidelity_floor(1.0, 1.6), Err(Error::OutOfValidityWindow { .. })));
        assert!(matches!(fidelity_floor(1.0, -0.1), Err(Error::OutOfValidityWindow { .. })));

        assert_eq!(beta_ceiling(1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(beta_ceiling(1.0, FRAC_PI_4).unwrap(), FRAC_PI_4.sin());

        assert_abs_diff_eq!(tan_ratio_ceiling(1.0, FRAC_PI_4).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tan_ratio_ceiling(1.0, PI / 6.0).unwrap(), 0.57735027, epsilon = 1e-8);
        assert_eq!(tan_ratio_ceiling(1.0, FRAC_PI_2).unwrap(), f64::INFINITY);
        assert!(tan_ratio_ceiling(1.0, 0.0).is_err());
        assert!(matches!(tan_ratio_ceiling(0.0, 0.1), Err(Error::NonpositiveDeltaE(_))));
    }

    #[test]
    fn equality_beta_examples() {
        let q = Observable::pauli_z().shifted(1.0);
        let down = QuantumState::basis(2, 1).unwrap();
        let eb = equality_beta(&q, &down).unwrap();
        assert_abs_diff_eq!(eb.beta, FRAC_PI_4.cos(), epsilon = 1e-15);
        assert!(eb.reachable);

        // eigenstate of Q′ with nonzero eigenvalue sits at the minimum β² = ½
        let q3 = Observable::from_real_diagonal(&[0.0, 1.0, 3.0]).unwrap();
        let e3 = QuantumState::basis(3, 2).unwrap();
        assert_abs_diff_eq!(equality_beta(&q3, &e3).unwrap().beta_squared, 0.5, epsilon = 1e-15);

        // ⟨1|Q′|1⟩ = (1+3)/2 = 2, ⟨1|Q′²|1⟩ = (1+9)/2 = 5
        let mixed = QuantumState::from_real(&[0.0, 0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap();
        let eb = equality_beta(&q3, &mixed).unwrap();
        assert_abs_diff_eq!(eb.beta_squared, 0.625, epsilon = 1e-14);

        let zero = QuantumState::basis(3, 0).unwrap();
        assert!(matches!(equality_beta(&q3, &zero), Err(Error::ZeroFirstMoment)));
    }

    #[test]
    fn ratio_components() {
        let q = Observable::pauli_z().shifted(1.0);
        let down = QuantumState::basis(2, 1).unwrap();
        for &t in &[0.05, 0.3, FRAC_PI_4, 1.2, 1.5] {
            let r = ratio_from_components(t.sin(), &q, &down).unwrap();
            assert_abs_diff_eq!(r, t.tan(), epsilon = 1e-12 * t.tan().max(1.0));
        }
        assert!(ratio_from_components(1e-9, &q, &down).unwrap() < 1e-8);
        // β = 1 with |1⟩ a Q′ eigenstate leaves no spread: the root argument is 0
        assert!(matches!(
            ratio_from_components(1.0, &q, &down),
            Err(Error::DegenerateDenominator(_))
        ));
        assert!(ratio_from_components(0.0, &q, &down).is_err());
    }

    #[test]
    fn ratio_at_equality_beta_is_one() {
        let q3 = Observable::from_real_diagonal(&[0.0, 1.0, 3.0]).unwrap();
        let mixed = QuantumState::from_real(&[0.0, 0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap();
        let eb = equality_beta(&q3, &mixed).unwrap();
        let r = ratio_from_components(eb.beta, &q3, &mixed).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);

        // direct evaluation on α|0⟩ + β|1⟩
        let alpha = (1.0 - eb.beta_squared).sqrt();
        let s = QuantumState::from_real(&[alpha, eb.beta * 0.5f64.sqrt(), eb.beta * 0.5f64.sqrt()])
            .unwrap();
        let m = moments(&s, &q3).unwrap();
        assert_abs_diff_eq!(m.mean.abs(), m.std_dev(), epsilon = 1e-12);
    }

    #[test]
    fn rate_bound_spin_equality() {
        let (h, up, q) = spin();
        let prop = Propagator::from_hamiltonian(&h, &up).unwrap();
        for &t in &[0.1, 0.4, 0.9, 1.3] {
            let psi = prop.state_at(t);
            let rb = rate_bound_check(&h, &q, &psi).unwrap();
            assert_abs_diff_eq!(rb.lhs, (2.0 * t).sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(rb.rhs, (2.0 * t).sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(rb.commutator_rate, -2.0 * (2.0 * t).sin(), epsilon = 1e-12);
            assert!(rb.ok && rb.rate_agrees);
        }
    }

    #[test]
    fn rate_bound_commuting() {
        let h = Observable::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let q = Observable::from_real_diagonal(&[3.0, -1.0, 0.5]).unwrap();
        let psi = QuantumState::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let rb = rate_bound_check(&h, &q, &psi).unwrap();
        assert_eq!(rb.rhs, 0.0);
        assert!(rb.ok && rb.rate_agrees);
    }

    #[test]
    fn spin_trajectory_to_tau2() {
        let (h, up, q) = spin();
        let grid = uniform_grid(FRAC_PI_4, 200).unwrap();
        let report = evaluate_trajectory(&h, &up, &q, &grid, UnitsConfig::default()).unwrap();
        assert!(report.eigenstate_start && report.window_respected);
        assert_eq!(report.points[0].delta_q, 0.0);
        assert!(report.first_violation().is_none());
        let last = report.points.last().unwrap();
        assert_abs_diff_eq!(last.ratio.value().unwrap(), 1.0, epsilon = 1e-9);
        for p in &report.points {
            assert_abs_diff_eq!(p.beta * p.beta + p.fid * p.fid, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn spin_trajectory_past_tau2_violates_franson() {
        let (h, up, q) = spin();
        let grid = [0.0, FRAC_PI_4 + 0.01];
        let report = evaluate_trajectory(&h, &up, &q, &grid, UnitsConfig::default()).unwrap();
        let v = report.first_violation().unwrap();
        assert_eq!(v.law, BoundLaw::Franson);
        assert_eq!(v.t, FRAC_PI_4 + 0.01);
        assert!(!report.window_respected);
        let p = report.points[1];
        assert!(p.delta_q.abs() > p.dq);
        // the tangent law still holds there, with equality
        assert_eq!(p.tan_ok, Some(true));
    }

    #[test]
    fn trajectory_errors() {
        let (h, up, q) = spin();
        let u = UnitsConfig::default();
        assert!(matches!(evaluate_trajectory(&h, &up, &q, &[0.0, 0.2, 0.1], u), Err(Error::GridNotAscending)));
        assert!(matches!(evaluate_trajectory(&h, &up, &q, &[0.1, 0.2], u), Err(Error::GridNotAscending)));
        // an H eigenstate is stationary
        let eig = QuantumState::from_real(&[FRAC_PI_4.cos(), FRAC_PI_4.sin()]).unwrap();
        assert!(matches!(
            evaluate_trajectory(&Observable::pauli_x(), &eig, &q, &[0.0, 0.1], u),
            Err(Error::ZeroDeltaE)
        ));
    }

    #[test]
    fn trajectory_with_hbar() {
        let (h, up, q) = spin();
        let units = UnitsConfig::new(2.0).unwrap();
        let report = evaluate_trajectory(&h, &up, &q, &[0.0, FRAC_PI_2], units).unwrap();
        assert_abs_diff_eq!(report.tau2, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(report.points[1].ratio.value().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_helper() {
        let g = uniform_grid(0.8, 400).unwrap();
        assert_eq!(g.len(), 401);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 0.8);
        assert!(uniform_grid(0.0, 10).is_err());
    }
}
