//! Crossing-time root finding and randomized searches for instances that
//! would beat `τ₂` (eigenstate starts) or `τ₅` (relaxed problem).
//!
//! Trials are independent and run on the rayon pool; every aggregation is an
//! ordered fold over trial indices, so reports do not depend on scheduling.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bounds::{EIGENSTATE_SPREAD, STATIONARY_DELTA_E};
use crate::models::{collective_spin_tilted, ModelInstance};
use crate::quantum::{moments, spectral_decompose, Observable, Propagator, QuantumState, C64};
use crate::roots::{bisect, golden_min};
use crate::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 2048;
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;
pub const DEFAULT_WINDOW_END: f64 = 2.0;
/// A refined crossing this far below the compared bound is a violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-6;
pub const REFINE_ITERATIONS: usize = 200;
pub const REFINE_CANDIDATES: usize = 5;
pub const MAX_REDRAWS: usize = 100;
/// Smallest raw `ΔE` accepted before rescaling to 1.
pub const DEGENERATE_DELTA_E: f64 = 1e-8;
/// Minimum samples per unit of `ΔE·t/ħ` on the scan grid.
pub const SAMPLES_PER_PHASE: f64 = 64.0;

const MIN_GRID_POINTS: usize = 64;
// Scanned values below this magnitude are round-off, not a sign change.
const SCAN_NOISE: f64 = 1e-12;
const INITIAL_STEP: f64 = 0.1;

/// `[start, end]` in natural time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if start != 0.0 || !(end.is_finite() && end > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "window must be [0, end] with end > 0, got [{start}, {end}]"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn up_to(end: f64) -> Result<Self> {
        Self::new(0.0, end)
    }
}

/// Evenly spaced scan times, refusing grids that could skip a first crossing.
fn scan_grid(delta_e: f64, window: TimeWindow, grid_points: usize) -> Result<Vec<f64>> {
    TimeWindow::new(window.start, window.end)?;
    let required = ((SAMPLES_PER_PHASE * window.end * delta_e).ceil() as usize).max(MIN_GRID_POINTS);
    if grid_points < required {
        return Err(Error::GridTooCoarse { points: grid_points, required });
    }
    let last = grid_points - 1;
    Ok((0..grid_points)
        .map(|i| if i == last { window.end } else { window.end * i as f64 / last as f64 })
        .collect())
}

fn check_active(instance: &ModelInstance) -> Result<Propagator> {
    if instance.delta_e <= STATIONARY_DELTA_E {
        return Err(Error::ZeroDeltaE);
    }
    Propagator::from_hamiltonian(&instance.hamiltonian, &instance.initial_state)
}

/// First `t > 0` with `|δ⟨Q⟩(t)| = ΔQ(t)` for an eigenstate start.
///
/// Scans `f(t) = ΔQ(t) − |δ⟨Q⟩(t)|` (nonnegative at first) and bisects the
/// first sign change to `refine_tol`.
pub fn first_crossing_time(
    instance: &ModelInstance,
    window: TimeWindow,
    grid_points: usize,
    refine_tol: f64,
) -> Result<Option<f64>> {
    let prop = check_active(instance)?;
    let q = &instance.observable_q;
    let start = prop.observe(q, 0.0);
    if start.spread > EIGENSTATE_SPREAD {
        return Err(Error::NotEigenstateStart(start.spread));
    }
    let grid = scan_grid(instance.delta_e, window, grid_points)?;
    let gap = |t: f64| {
        let o = prop.observe(q, t);
        o.spread - (o.mean - start.mean).abs()
    };
    for pair in grid.windows(2) {
        if gap(pair[1]) < -SCAN_NOISE {
            return Ok(Some(bisect(pair[0], pair[1], refine_tol, |s| gap(s) < 0.0)));
        }
    }
    Ok(None)
}

/// Smallest `t` with `|δ⟨Q⟩(t)| ≥ max_{s≤t} ΔQ(s)`; no eigenstate start needed.
///
/// Interior maxima of `ΔQ` on the scan grid are polished by golden-section
/// search so that the running maximum is not biased low by the grid.
pub fn relaxed_crossing_time(
    instance: &ModelInstance,
    window: TimeWindow,
    grid_points: usize,
    refine_tol: f64,
) -> Result<Option<f64>> {
    let prop = check_active(instance)?;
    let q = &instance.observable_q;
    let q0 = prop.observe(q, 0.0).mean;
    let grid = scan_grid(instance.delta_e, window, grid_points)?;
    let sample = |t: f64| {
        let o = prop.observe(q, t);
        ((o.mean - q0).abs(), o.spread)
    };
    let spread_at = |t: f64| prop.observe(q, t).spread;
    let samples: Vec<(f64, f64)> = grid.iter().map(|&t| sample(t)).collect();

    // running max of ΔQ over [0, grid[i-1]]
    let mut running = samples[0].1;
    for i in 1..grid.len() {
        let mut pending: Option<(f64, f64)> = None;
        if i >= 2 {
            let (a, b, c) = (samples[i - 2].1, samples[i - 1].1, samples[i].1);
            if b >= a && b >= c && (b > a || b > c) {
                let (at, neg) = golden_min(grid[i - 2], grid[i], 1e-12, |t| -spread_at(t));
                let peak = (-neg).max(b);
                if at <= grid[i - 1] {
                    running = running.max(peak);
                } else {
                    pending = Some((at, peak));
                }
            }
        }
        let (delta, spread) = samples[i];
        let reference = running.max(spread).max(pending.map_or(0.0, |p| p.1));
        if delta - reference > SCAN_NOISE {
            let frozen = running;
            let lo = grid[i - 1];
            let crossed = |s: f64| {
                let (d, sp) = sample(s);
                let peak = pending.filter(|p| p.0 <= s).map_or(0.0, |p| p.1);
                d >= frozen.max(sp).max(peak)
            };
            return Ok(Some(bisect(lo, grid[i], refine_tol, crossed)));
        }
        running = reference;
    }
    Ok(None)
}

/// Which crossing a search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Start in an eigenstate of `Q`; compared with `τ₂ = π/4`.
    Eigenstate,
    /// Arbitrary start; compared with `τ₅ = 1/2`.
    Relaxed,
}

impl SearchMode {
    pub fn bound(self) -> f64 {
        match self {
            SearchMode::Eigenstate => FRAC_PI_4,
            SearchMode::Relaxed => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SearchMode::Eigenstate => "eigenstate",
            SearchMode::Relaxed => "relaxed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub window: TimeWindow,
    pub grid_points: usize,
    pub refine_tol: f64,
    /// Named instances evaluated alongside the random ensemble.
    pub candidates: Vec<ModelInstance>,
}

impl SearchConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        Self {
            dim,
            trials,
            seed,
            window: TimeWindow { start: 0.0, end: DEFAULT_WINDOW_END },
            grid_points: DEFAULT_GRID_POINTS,
            refine_tol: DEFAULT_REFINE_TOL,
            candidates: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::BadDimension(format!("search dimension must be >= 2, got {}", self.dim)));
        }
        TimeWindow::new(self.window.start, self.window.end)?;
        if self.grid_points < MIN_GRID_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid_points must be >= {MIN_GRID_POINTS}, got {}",
                self.grid_points
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidArgument("refine_tol must be positive".into()));
        }
        Ok(())
    }

    fn crossing(&self, mode: SearchMode, instance: &ModelInstance) -> Result<Option<f64>> {
        match mode {
            SearchMode::Eigenstate => {
                first_crossing_time(instance, self.window, self.grid_points, self.refine_tol)
            }
            SearchMode::Relaxed => {
                relaxed_crossing_time(instance, self.window, self.grid_points, self.refine_tol)
            }
        }
    }
}

/// Raw ensemble parameters of one trial. The Hamiltonian and (for relaxed
/// searches) the initial state are the coordinates refined by local search;
/// `Q` stays fixed.
#[derive(Debug, Clone)]
struct Draw {
    dim: usize,
    hamiltonian: Vec<f64>,
    observable: Vec<f64>,
    start: Start,
}

#[derive(Debug, Clone)]
enum Start {
    QEigenvector(usize),
    Amplitudes(Vec<f64>),
}

/// `d²` real coordinates of a Hermitian matrix `(A + A†)/2` with `A` having
/// independent standard normal real and imaginary parts.
fn draw_hermitian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = (&a + a.adjoint()).scale(0.5);
    let mut params = Vec::with_capacity(d * d);
    for i in 0..d {
        params.push(h[(i, i)].re);
        for j in i + 1..d {
            params.push(h[(i, j)].re);
            params.push(h[(i, j)].im);
        }
    }
    params
}

fn hermitian_from(params: &[f64], d: usize) -> Observable {
    let mut m = DMatrix::<C64>::zeros(d, d);
    let mut it = params.iter().copied();
    for i in 0..d {
        m[(i, i)] = C64::new(it.next().unwrap_or(0.0), 0.0);
        for j in i + 1..d {
            let z = C64::new(it.next().unwrap_or(0.0), it.next().unwrap_or(0.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    Observable::from_hermitian_part(m)
}

impl Draw {
    fn sample(mode: SearchMode, rng: &mut ChaCha8Rng, dim: usize) -> Self {
        let hamiltonian = draw_hermitian(rng, dim);
        let observable = draw_hermitian(rng, dim);
        let start = match mode {
            SearchMode::Eigenstate => Start::QEigenvector(rng.random_range(0..dim)),
            SearchMode::Relaxed => {
                Start::Amplitudes((0..2 * dim).map(|_| rng.sample(StandardNormal)).collect())
            }
        };
        Self { dim, hamiltonian, observable, start }
    }

    fn build(&self, label: &str) -> Result<ModelInstance> {
        let d = self.dim;
        let q = hermitian_from(&self.observable, d);
        let state = match &self.start {
            Start::QEigenvector(k) => spectral_decompose(&q)?.eigenstate(*k),
            Start::Amplitudes(raw) => QuantumState::normalized(
                (0..d).map(|i| C64::new(raw[2 * i], raw[2 * i + 1])).collect(),
            )?,
        };
        let raw_h = hermitian_from(&self.hamiltonian, d);
        let energy = moments(&state, &raw_h)?;
        if !(energy.std_dev() >= DEGENERATE_DELTA_E) {
            return Err(Error::DegenerateDraw(1));
        }
        let h = raw_h.shifted(energy.mean).scaled(1.0 / energy.std_dev());
        ModelInstance::new(h, q, state, label)
    }

    fn coordinates(&self) -> usize {
        self.hamiltonian.len()
            + match &self.start {
                Start::QEigenvector(_) => 0,
                Start::Amplitudes(a) => a.len(),
            }
    }

    fn coordinate_mut(&mut self, k: usize) -> &mut f64 {
        let nh = self.hamiltonian.len();
        if k < nh {
            return &mut self.hamiltonian[k];
        }
        match &mut self.start {
            Start::Amplitudes(a) => &mut a[k - nh],
            Start::QEigenvector(_) => unreachable!("no state coordinates for eigenvector starts"),
        }
    }
}

fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

fn sample_draw(mode: SearchMode, dim: usize, seed: u64, trial_index: u64) -> Result<(Draw, ModelInstance)> {
    if dim < 2 {
        return Err(Error::BadDimension(format!("dimension must be >= 2, got {dim}")));
    }
    let mut rng = trial_rng(seed, trial_index);
    let label = format!("random-{}-d{dim}-seed{seed}-trial{trial_index}", mode.name());
    for _ in 0..MAX_REDRAWS {
        let draw = Draw::sample(mode, &mut rng, dim);
        match draw.build(&label) {
            Ok(instance) => return Ok((draw, instance)),
            Err(Error::DegenerateDraw(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateDraw(MAX_REDRAWS))
}

/// Random instance with `H`, `Q` from the Gaussian Hermitian ensemble, the
/// start a uniformly chosen eigenvector of `Q`, and `H` shifted and scaled so
/// that `ΔE = 1`. Deterministic in `(seed, trial_index)`.
pub fn sample_instance(dim: usize, seed: u64, trial_index: u64) -> Result<ModelInstance> {
    sample_draw(SearchMode::Eigenstate, dim, seed, trial_index).map(|(_, m)| m)
}

/// As [`sample_instance`] but with a Gaussian random initial state.
pub fn sample_relaxed_instance(dim: usize, seed: u64, trial_index: u64) -> Result<ModelInstance> {
    sample_draw(SearchMode::Relaxed, dim, seed, trial_index).map(|(_, m)| m)
}

/// Where a recorded crossing time came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Trial(usize),
    Refined(usize),
    Candidate(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedTrial {
    pub trial_index: usize,
    pub sampled: f64,
    pub refined: f64,
    pub iterations: usize,
    pub instance: ModelInstance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    NoViolation,
    Violation { source: Source, crossing: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub mode: SearchMode,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub bound_compared: f64,
    pub min_crossing: Option<f64>,
    pub argmin: Option<Source>,
    pub argmin_instance: Option<ModelInstance>,
    /// Sampled crossing per trial, `None` when no crossing in the window.
    pub per_trial: Vec<Option<f64>>,
    pub refined: Vec<RefinedTrial>,
    pub candidates: Vec<Option<f64>>,
    pub verdict: Verdict,
}

/// Derivative-free coordinate descent on the draw's coordinates, one
/// coordinate probe (both directions) per iteration, step halved after a full
/// sweep without improvement.
fn refine_draw(
    config: &SearchConfig,
    mode: SearchMode,
    draw: &Draw,
    sampled: f64,
    label: &str,
) -> (f64, Draw, usize) {
    let eval = |d: &Draw| {
        d.build(label)
            .and_then(|m| config.crossing(mode, &m))
            .ok()
            .flatten()
            .unwrap_or(f64::INFINITY)
    };
    let mut best = draw.clone();
    let mut best_time = sampled;
    let n = draw.coordinates();
    let mut step = INITIAL_STEP;
    let mut improved_this_sweep = false;
    let mut iterations = 0;
    for it in 0..REFINE_ITERATIONS {
        iterations = it + 1;
        let k = it % n;
        for sign in [1.0, -1.0] {
            let mut probe = best.clone();
            *probe.coordinate_mut(k) += sign * step;
            let time = eval(&probe);
            if time < best_time {
                best = probe;
                best_time = time;
                improved_this_sweep = true;
                break;
            }
        }
        if k == n - 1 {
            if !improved_this_sweep {
                step *= 0.5;
            }
            improved_this_sweep = false;
        }
    }
    (best_time, best, iterations)
}

fn run_search(config: &SearchConfig, mode: SearchMode) -> Result<SearchReport> {
    config.validate()?;
    let sampled: Vec<(Draw, ModelInstance, Option<f64>)> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let (draw, instance) = sample_draw(mode, config.dim, config.seed, i as u64)?;
            let crossing = config.crossing(mode, &instance)?;
            Ok((draw, instance, crossing))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ranked: Vec<(f64, usize)> =
        sampled.iter().enumerate().filter_map(|(i, s)| s.2.map(|t| (t, i))).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ranked.truncate(REFINE_CANDIDATES);

    let refined: Vec<RefinedTrial> = ranked
        .par_iter()
        .map(|&(time, i)| {
            let label = format!("{}-refined", sampled[i].1.label);
            let (refined, draw, iterations) = refine_draw(config, mode, &sampled[i].0, time, &label);
            let instance =
                if refined < time { draw.build(&label)? } else { sampled[i].1.clone() };
            Ok(RefinedTrial { trial_index: i, sampled: time, refined, iterations, instance })
        })
        .collect::<Result<Vec<_>>>()?;

    let candidates: Vec<Option<f64>> = config
        .candidates
        .par_iter()
        .map(|m| config.crossing(mode, m))
        .collect::<Result<Vec<_>>>()?;

    let recorded = sampled
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.2.map(|t| (t, Source::Trial(i))))
        .chain(refined.iter().enumerate().map(|(k, r)| (r.refined, Source::Refined(k))))
        .chain(candidates.iter().enumerate().filter_map(|(k, t)| t.map(|t| (t, Source::Candidate(k)))));
    // strict comparison keeps the earliest source on ties
    let best = recorded.fold(None::<(f64, Source)>, |acc, (t, s)| match acc {
        Some((bt, _)) if bt <= t => acc,
        _ => Some((t, s)),
    });

    let bound = mode.bound();
    let verdict = match best {
        Some((t, source)) if t < bound - VIOLATION_TOLERANCE => Verdict::Violation { source, crossing: t },
        _ => Verdict::NoViolation,
    };
    let argmin_instance = best.map(|(_, source)| match source {
        Source::Trial(i) => sampled[i].1.clone(),
        Source::Refined(k) => refined[k].instance.clone(),
        Source::Candidate(k) => config.candidates[k].clone(),
    });
    Ok(SearchReport {
        mode,
        dim: config.dim,
        trials: config.trials,
        seed: config.seed,
        bound_compared: bound,
        min_crossing: best.map(|b| b.0),
        argmin: best.map(|b| b.1),
        argmin_instance,
        per_trial: sampled.into_iter().map(|s| s.2).collect(),
        refined,
        candidates,
        verdict,
    })
}

/// Randomized evidence that no eigenstate start reaches `|δ⟨Q⟩| = ΔQ` before
/// `π/4` (at `ΔE = 1`).
pub fn min_crossing_search(config: &SearchConfig) -> Result<SearchReport> {
    run_search(config, SearchMode::Eigenstate)
}

/// Randomized evidence that the relaxed crossing never beats `1/2`.
pub fn min_relaxed_search(config: &SearchConfig) -> Result<SearchReport> {
    run_search(config, SearchMode::Relaxed)
}

pub fn search(config: &SearchConfig, mode: SearchMode) -> Result<SearchReport> {
    run_search(config, mode)
}

/// Best tilt of the collective spin start for the relaxed crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltOptimum {
    /// Polar angle of every spin at `t = 0`.
    pub theta: f64,
    pub crossing: f64,
    pub instance: ModelInstance,
}

/// Minimizes the relaxed crossing of [`collective_spin_tilted`] over the
/// initial polar angle in `[0, π/2]` by golden-section search.
pub fn optimize_collective_tilt(
    n: usize,
    delta_e: f64,
    window: TimeWindow,
    grid_points: usize,
    refine_tol: f64,
) -> Result<TiltOptimum> {
    // surface construction errors before the search swallows them
    collective_spin_tilted(n, delta_e, 0.0)?;
    let crossing_at = |theta: f64| {
        collective_spin_tilted(n, delta_e, theta)
            .and_then(|m| relaxed_crossing_time(&m, window, grid_points, refine_tol))
            .ok()
            .flatten()
            .unwrap_or(f64::INFINITY)
    };
    let (theta, crossing) = golden_min(0.0, FRAC_PI_2, 1e-9, crossing_at);
    if !crossing.is_finite() {
        return Err(Error::InvalidArgument(format!("no relaxed crossing within window for n = {n}")));
    }
    let instance = collective_spin_tilted(n, delta_e, theta)?;
    Ok(TiltOptimum { theta, crossing, instance })
}

/// Amplitudes `e^{−iHt}|ψ₀⟩` as a plain vector, for reporting.
pub fn trajectory_state(instance: &ModelInstance, t: f64) -> Result<DVector<C64>> {
    Ok(Propagator::from_hamiltonian(&instance.hamiltonian, &instance.initial_state)?.amplitudes_at(t))
}
