//! The analytic systems: spin-½ precession, the relaxed two-level pair, `N`
//! collectively precessing spins and the free Gaussian packet.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::quantum::{moments, Observable, QuantumState, UnitsConfig, C64};
use crate::roots::bisect;
use crate::{Error, Result};

/// A Hamiltonian, a measured observable and an initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInstance {
    pub hamiltonian: Observable,
    pub observable_q: Observable,
    pub initial_state: QuantumState,
    /// `ΔE` of the initial state.
    pub delta_e: f64,
    pub label: String,
}

impl ModelInstance {
    pub fn new(
        hamiltonian: Observable,
        observable_q: Observable,
        initial_state: QuantumState,
        label: impl Into<String>,
    ) -> Result<Self> {
        moments(&initial_state, &observable_q)?;
        let delta_e = moments(&initial_state, &hamiltonian)?.std_dev();
        Ok(Self { hamiltonian, observable_q, initial_state, delta_e, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.initial_state.dim()
    }

    /// Same dynamics, different starting point.
    pub fn with_initial_state(&self, state: QuantumState, label: impl Into<String>) -> Result<Self> {
        Self::new(self.hamiltonian.clone(), self.observable_q.clone(), state, label)
    }
}

fn check_delta_e(delta_e: f64) -> Result<()> {
    if !(delta_e.is_finite() && delta_e > 0.0) {
        return Err(Error::NonpositiveDeltaE(delta_e));
    }
    Ok(())
}

/// `H = ΔE·σ_y`, `Q = σ_z`, start `|↑⟩`, so that
/// `ψ(t) = cos(ΔE t)|↑⟩ + sin(ΔE t)|↓⟩`.
pub fn spin_half_model(delta_e: f64) -> Result<ModelInstance> {
    check_delta_e(delta_e)?;
    ModelInstance::new(
        Observable::pauli_y().scaled(delta_e),
        Observable::pauli_z(),
        QuantumState::basis(2, 0)?,
        "spin-half",
    )
}

/// Closed-form spin-½ state at natural time `t`.
pub fn spin_half_state(delta_e: f64, t: f64) -> [f64; 2] {
    let (s, c) = (delta_e * t).sin_cos();
    [c, s]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedPair {
    pub psi_in: QuantumState,
    pub psi_f: QuantumState,
    pub transit_time: f64,
}

/// The two-level path from `cos(π/6)|↑⟩ + sin(π/6)|↓⟩` to
/// `cos(π/3)|↑⟩ + sin(π/3)|↓⟩`, which takes `π/(6ΔE)` under
/// [`spin_half_model`].
pub fn relaxed_pair(delta_e: f64) -> Result<RelaxedPair> {
    check_delta_e(delta_e)?;
    let (s_in, c_in) = (PI / 6.0).sin_cos();
    let (s_f, c_f) = (PI / 3.0).sin_cos();
    Ok(RelaxedPair {
        psi_in: QuantumState::normalized(vec![C64::new(c_in, 0.0), C64::new(s_in, 0.0)])?,
        psi_f: QuantumState::normalized(vec![C64::new(c_f, 0.0), C64::new(s_f, 0.0)])?,
        transit_time: PI / (6.0 * delta_e),
    })
}

/// [`spin_half_model`] started from the relaxed pair's initial state.
pub fn relaxed_pair_instance(delta_e: f64) -> Result<ModelInstance> {
    let pair = relaxed_pair(delta_e)?;
    spin_half_model(delta_e)?.with_initial_state(pair.psi_in, "relaxed-pair")
}

/// `(J_y, J_z)` for spin `J = n/2` in the basis `|J, m⟩`, `m = J, J−1, …, −J`.
pub fn spin_j_operators(n: usize) -> Result<(Observable, Observable)> {
    if n == 0 {
        return Err(Error::BadN("spin count must be at least 1".into()));
    }
    let j = n as f64 / 2.0;
    let d = n + 1;
    let m_of = |k: usize| j - k as f64;
    let mut jy = DMatrix::<C64>::zeros(d, d);
    for k in 1..d {
        // ⟨m+1|J₊|m⟩ for m = m_of(k)
        let m = m_of(k);
        let a = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        jy[(k - 1, k)] = C64::new(0.0, -0.5 * a);
        jy[(k, k - 1)] = C64::new(0.0, 0.5 * a);
    }
    let jz: Vec<f64> = (0..d).map(m_of).collect();
    Ok((crate::quantum::validate_hermitian(jy)?, Observable::from_real_diagonal(&jz)?))
}

/// Symmetric-subspace amplitudes of the product state with every spin at
/// polar angle `theta` in the x–z plane: `√C(n,k) cos^{n−k}(θ/2) sin^k(θ/2)`.
pub fn spin_coherent_state(n: usize, theta: f64) -> Result<QuantumState> {
    if n == 0 {
        return Err(Error::BadN("spin count must be at least 1".into()));
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let mut binom = 1.0_f64;
    let mut amps = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            binom = binom * (n - k + 1) as f64 / k as f64;
        }
        amps.push(C64::new(binom.sqrt() * c.powi((n - k) as i32) * s.powi(k as i32), 0.0));
    }
    QuantumState::normalized(amps)
}

/// `N` spin-½ particles precessing about `y` with a common rate, in the
/// `(N+1)`-dimensional symmetric subspace: `Q = 2J_z = Σσ_z`,
/// `H = 2b·J_y = bΣσ_y` with `b = ΔE/√N` so that the all-up start has the
/// requested total `ΔE`.
pub fn collective_spin_model(n: usize, delta_e_total: f64) -> Result<ModelInstance> {
    collective_spin_tilted(n, delta_e_total, 0.0)
}

/// [`collective_spin_model`] started from the product state with every spin
/// tilted to polar angle `theta`. `ΔE` does not depend on the tilt, since
/// `J_y` is transverse to every spin direction in the x–z plane.
pub fn collective_spin_tilted(n: usize, delta_e_total: f64, theta: f64) -> Result<ModelInstance> {
    check_delta_e(delta_e_total)?;
    let (jy, jz) = spin_j_operators(n)?;
    let rate = delta_e_total / (n as f64).sqrt();
    let label = if theta == 0.0 { format!("nspin-{n}") } else { format!("nspin-{n}-tilt-{theta}") };
    ModelInstance::new(jy.scaled(2.0 * rate), jz.scaled(2.0), spin_coherent_state(n, theta)?, label)
}

/// Free minimal-uncertainty Gaussian packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacketParams {
    pub mass: f64,
    /// `⟨p⟩`.
    pub p0: f64,
    /// `Δp`.
    pub dp: f64,
    pub x0: f64,
    pub units: UnitsConfig,
}

impl GaussianPacketParams {
    pub fn new(mass: f64, p0: f64, dp: f64, x0: f64, units: UnitsConfig) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) || !(dp.is_finite() && dp > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mass and dp must be positive (got {mass}, {dp})"
            )));
        }
        if !p0.is_finite() || !x0.is_finite() {
            return Err(Error::InvalidArgument("p0 and x0 must be finite".into()));
        }
        Ok(Self { mass, p0, dp, x0, units })
    }

    /// `Δx₀ = ħ/(2Δp)`.
    pub fn dx0(&self) -> f64 {
        self.units.hbar() / (2.0 * self.dp)
    }

    pub fn velocity(&self) -> f64 {
        self.p0 / self.mass
    }

    pub fn x_mean(&self, t: f64) -> f64 {
        self.x0 + self.velocity() * t
    }

    /// `Δx(t) = Δx₀√(1 + (ħt/(2mΔx₀²))²)`.
    pub fn dx(&self, t: f64) -> f64 {
        let dx0 = self.dx0();
        let spread = self.units.hbar() * t / (2.0 * self.mass * dx0 * dx0);
        dx0 * spread.hypot(1.0)
    }

    /// Exact energy spread for `p ~ N(p0, Δp²)`: `(Δp/m)√(p0² + Δp²/2)`.
    pub fn de_exact(&self) -> f64 {
        self.dp / self.mass * (self.p0 * self.p0 + 0.5 * self.dp * self.dp).sqrt()
    }

    /// Fast-packet approximation `⟨p⟩Δp/m`.
    pub fn de_approx(&self) -> f64 {
        self.p0.abs() * self.dp / self.mass
    }

    /// Smallest `t > 0` with `|x_mean(t) − x0| = Δx(t)`, by bisection.
    pub fn crossing_time(&self) -> Result<f64> {
        let v = self.velocity().abs();
        if v == 0.0 {
            return Err(Error::NoCrossing);
        }
        // v t − Δx(t) = ((v² − c²)t² − Δx₀²)/(v t + Δx(t)), with c the late-time
        // spreading speed; this form keeps the sign exact when v ≈ c.
        let dx0 = self.dx0();
        let c = self.units.hbar() / (2.0 * self.mass * dx0);
        let excess = (v - c) * (v + c);
        let gap = |t: f64| (excess * t * t - dx0 * dx0) / (v * t + self.dx(t));
        let mut lo = 0.0;
        let mut hi = dx0 / v;
        let mut found = false;
        while hi.is_finite() {
            if gap(hi) > 0.0 {
                found = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !found {
            return Err(Error::NoCrossing);
        }
        Ok(bisect(lo, hi, 4.0 * f64::EPSILON * hi, |t| gap(t) > 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianObservables {
    pub x_mean: f64,
    pub dx: f64,
    pub de_exact: f64,
    pub de_approx: f64,
    pub crossing_time_exact: f64,
    /// `ħ/(2ΔE)` with the exact `ΔE`.
    pub crossing_time_bound: f64,
}

pub fn gaussian_packet_observables(p: &GaussianPacketParams, t: f64) -> Result<GaussianObservables> {
    let de_exact = p.de_exact();
    Ok(GaussianObservables {
        x_mean: p.x_mean(t),
        dx: p.dx(t),
        de_exact,
        de_approx: p.de_approx(),
        crossing_time_exact: p.crossing_time()?,
        crossing_time_bound: p.units.hbar() / (2.0 * de_exact),
    })
}
