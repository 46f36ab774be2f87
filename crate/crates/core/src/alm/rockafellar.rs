use serde::{Deserialize, Serialize};

use crate::error::{AlmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RockafellarCriterion {
    /// `dist ≤ √(α/ρ) ε_k`
    A,
    /// `dist ≤ √(α/ρ) δ_k ‖Λ⁺ − Λ‖²`
    B,
    /// `dist ≤ (δ'_k/ρ) ‖Λ⁺ − Λ‖`
    C,
}

/// Inexactness predicate on `dist(0, ∂_x𝕃)`. `sched` is `ε_k` for A and
/// `δ_k` (or `δ'_k`) for B and C; its summability is the caller's concern.
pub fn rockafellar_stop(
    which: RockafellarCriterion,
    alpha_sc: f64,
    rho: f64,
    dist: f64,
    mult_step: f64,
    sched: f64,
) -> Result<bool> {
    if !(rho > 0.0) {
        return Err(AlmError::InvalidInput(format!("penalty must be positive, got {rho}")));
    }
    if which != RockafellarCriterion::C && !(alpha_sc > 0.0) {
        return Err(AlmError::InvalidInput(format!(
            "strong convexity modulus must be positive, got {alpha_sc}"
        )));
    }
    if dist == 0.0 {
        return Ok(true);
    }
    let bound = match which {
        RockafellarCriterion::A => (alpha_sc / rho).sqrt() * sched,
        RockafellarCriterion::B => (alpha_sc / rho).sqrt() * sched * mult_step * mult_step,
        RockafellarCriterion::C => sched / rho * mult_step,
    };
    Ok(dist <= bound)
}
