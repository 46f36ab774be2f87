use serde::{Deserialize, Serialize};

use crate::alfn::{ip_al_value, IpProblem};
use crate::error::{AlmError, Result};
use crate::numcore::vecops;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcdUpdate {
    /// Exact block minimization of the AL by enumeration.
    Classical,
    /// `x_j⁺ = Π_{X_j}(x_j − τ g_j)`.
    ProxLinear { tau: f64 },
}

/// Outcome of one Gauss-Seidel sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStats {
    /// `‖x_after − x_before‖`
    pub moved: f64,
    pub al_before: f64,
    pub al_after: f64,
    /// Every block step kept its own model value at or below the current one.
    pub block_monotone: bool,
}

/// Enumerated block sets, computed once per problem.
pub struct BlockCache {
    points: Vec<Vec<Vec<f64>>>,
}

impl BlockCache {
    pub fn new(p: &IpProblem, update: BcdUpdate) -> Result<Self> {
        let points = match update {
            BcdUpdate::Classical => p.blocks.iter().map(|b| b.enumerate()).collect::<Result<_>>()?,
            BcdUpdate::ProxLinear { tau } => {
                if !(tau > 0.0) {
                    return Err(AlmError::InvalidInput(format!("prox-linear step must be positive, got {tau}")));
                }
                Vec::new()
            }
        };
        Ok(Self { points })
    }
}

fn al_at(p: &IpProblem, x: &[f64], mu: &[f64], rho: f64) -> f64 {
    ip_al_value(p, &p.a.matvec(x), vecops::dot(&p.c, x), mu, rho)
}

/// One cyclic sweep over the blocks with `μ`, `ρ` fixed. Ties keep the
/// current block value.
pub fn bcd_sweep(
    p: &IpProblem,
    x: &mut [f64],
    mu: &[f64],
    rho: f64,
    update: BcdUpdate,
    cache: &BlockCache,
) -> Result<SweepStats> {
    let before = x.to_vec();
    let al_before = al_at(p, x, mu, rho);
    let mut ax = p.a.matvec(x);
    let mut cx = vecops::dot(&p.c, x);
    let mut block_monotone = true;
    let m = p.m();
    for (j, range) in p.block_ranges().into_iter().enumerate() {
        let cur: Vec<f64> = x[range.clone()].to_vec();
        let shift = |u: &[f64], ax: &[f64]| -> (Vec<f64>, f64) {
            let mut axn = ax.to_vec();
            let mut dc = 0.0;
            for (off, (ui, ci)) in u.iter().zip(&cur).enumerate() {
                let d = ui - ci;
                if d != 0.0 {
                    let col = range.start + off;
                    dc += p.c[col] * d;
                    for (r, a) in axn.iter_mut().enumerate().take(m) {
                        *a += p.a[(r, col)] * d;
                    }
                }
            }
            (axn, dc)
        };
        match update {
            BcdUpdate::Classical => {
                let mut best = ip_al_value(p, &ax, cx, mu, rho);
                let mut best_u: Option<(&Vec<f64>, Vec<f64>, f64)> = None;
                for u in &cache.points[j] {
                    let (axn, dc) = shift(u, &ax);
                    let v = ip_al_value(p, &axn, cx + dc, mu, rho);
                    if v < best {
                        best = v;
                        best_u = Some((u, axn, dc));
                    }
                }
                if let Some((u, axn, dc)) = best_u {
                    x[range.clone()].copy_from_slice(u);
                    ax = axn;
                    cx += dc;
                }
            }
            BcdUpdate::ProxLinear { tau } => {
                let w: Vec<f64> = ax
                    .iter()
                    .zip(&p.b)
                    .zip(mu)
                    .map(|((a, b), m)| m + rho * (a - b).max(0.0))
                    .collect();
                let g: Vec<f64> = range
                    .clone()
                    .map(|col| p.c[col] + (0..m).map(|r| p.a[(r, col)] * w[r]).sum::<f64>())
                    .collect();
                let trial = vecops::add_scaled(&cur, -tau, &g);
                let u = p.blocks[j].project(&trial);
                let d = vecops::sub(&u, &cur);
                let model = vecops::dot(&g, &d) + vecops::norm_sq(&d) / (2.0 * tau);
                if model > 1e-12 * (1.0 + vecops::norm(&g)) {
                    block_monotone = false;
                }
                let (axn, dc) = shift(&u, &ax);
                x[range.clone()].copy_from_slice(&u);
                ax = axn;
                cx += dc;
            }
        }
    }
    let al_after = ip_al_value(p, &ax, cx, mu, rho);
    Ok(SweepStats {
        moved: vecops::dist(x, &before),
        al_before,
        al_after,
        block_monotone,
    })
}

/// Sweeps until a sweep leaves `x` unchanged or `max_sweeps` is reached.
/// Returns the number of sweeps, the last movement and whether every
/// sweep kept its monotonicity guarantee.
pub(crate) fn bcd_until_still(
    p: &IpProblem,
    x: &mut [f64],
    mu: &[f64],
    rho: f64,
    update: BcdUpdate,
    cache: &BlockCache,
    max_sweeps: usize,
) -> Result<(usize, f64, bool)> {
    let mut ok = true;
    let mut moved = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        let s = bcd_sweep(p, x, mu, rho, update, cache)?;
        sweeps += 1;
        moved = s.moved;
        match update {
            BcdUpdate::Classical => ok &= s.al_after <= s.al_before + 1e-12 * (1.0 + s.al_before.abs()),
            BcdUpdate::ProxLinear { .. } => ok &= s.block_monotone,
        }
        if moved == 0.0 {
            break;
        }
    }
    Ok((sweeps, moved, ok))
}
