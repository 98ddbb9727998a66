use super::{QuantumState, C64};
use crate::Result;

/// Below this `β` the orthogonal component is treated as absent.
pub const BETA_FLOOR: f64 = 1e-8;

/// `|ψ(t)⟩ = α|ψ₀⟩ + β|1⟩` with `β ≥ 0` real and `|1⟩ ⊥ |ψ₀⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelSplit {
    pub alpha: C64,
    pub beta: f64,
    pub orth_state: Option<QuantumState>,
}

pub fn two_level_decompose(psi0: &QuantumState, psit: &QuantumState) -> Result<TwoLevelSplit> {
    let alpha = psi0.inner(psit)?;
    let residual = psit.amplitudes() - psi0.amplitudes() * alpha;
    // The residual norm equals √(1 − |α|²) for normalized inputs and keeps its
    // accuracy when β is small.
    let beta = residual.norm();
    if beta <= BETA_FLOOR {
        return Ok(TwoLevelSplit { alpha, beta, orth_state: None });
    }
    // ⟨1|ψ(t)⟩ = (1 − |α|²)/β = β is already real and positive with this
    // normalization, so no extra phase is needed.
    let orth = QuantumState::from_unitary_image(residual.unscale(beta));
    Ok(TwoLevelSplit { alpha, beta, orth_state: Some(orth) })
}
