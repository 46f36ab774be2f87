use super::{rel_change, InnerOpts, InnerReport, InnerStatus};
use crate::alfn::SmoothFn;
use crate::error::{check_dim, Result};
use crate::numcore::vecops;
use crate::prox::ProxFn;

/// `‖x − prox_{s·h}(x − s∇f(x))‖ / s`
pub fn prox_grad_residual(f: &dyn SmoothFn, h: &ProxFn, x: &[f64], step: f64) -> Result<f64> {
    let (_, g) = f.value_grad(x)?;
    let p = h.prox(1.0 / step, &vecops::add_scaled(x, -step, &g))?;
    Ok(vecops::dist(x, &p) / step)
}

/// Proximal gradient on `f + h`. The step is accepted when the local
/// Lipschitz test `s‖∇f(x⁺) − ∇f(y)‖ ≤ ‖x⁺ − y‖` holds, otherwise shrunk.
/// The reported residual belongs to the returned iterate.
pub fn prox_grad(f: &dyn SmoothFn, h: &ProxFn, x0: &[f64], opts: &InnerOpts) -> Result<InnerReport> {
    opts.validate()?;
    check_dim("prox_grad x0", f.dim(), x0.len())?;
    let cap = opts.step_cap.unwrap_or(f64::INFINITY);
    let mut step = opts.lipschitz.map_or(1.0, |l| 1.0 / l).min(cap);
    let adaptive = opts.lipschitz.is_none();
    let bt = opts.armijo.backtrack;

    let mut x = x0.to_vec();
    let mut y = x.clone();
    let mut gy = f.value_grad(&y)?.1;
    let mut t = 1.0f64;
    let mut rep = InnerReport::new(x.clone());
    let mut iter = 0;
    let mut last_res = f64::INFINITY;
    loop {
        let mut tries = 0;
        let accepted = loop {
            let xn = h.prox(1.0 / step, &vecops::add_scaled(&y, -step, &gy))?;
            let d = vecops::sub(&xn, &y);
            let (fxn, gxn) = f.value_grad(&xn)?;
            let dn = vecops::norm(&d);
            if fxn.is_finite() && step * vecops::dist(&gxn, &gy) <= dn * (1.0 + 1e-12) {
                break Some((xn, gxn, dn));
            }
            step *= bt;
            tries += 1;
            if tries > opts.armijo.max_backtracks {
                break None;
            }
        };
        let Some((xn, gxn, dn)) = accepted else {
            rep.status = InnerStatus::Stalled;
            break;
        };
        if !opts.accelerate {
            // residual of y at the accepted step
            let res = dn / step;
            rep.trace.push(res);
            last_res = res;
            if res <= opts.tol {
                rep.status = InnerStatus::Converged;
                break;
            }
            if iter >= opts.max_iter {
                rep.status = InnerStatus::MaxIter;
                break;
            }
            let rc = rel_change(&xn, &y);
            y = xn;
            gy = gxn;
            iter += 1;
            if opts.rel_change_tol.is_some_and(|tol| rc <= tol) {
                rep.status = InnerStatus::RelChange;
                break;
            }
        } else {
            let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / tn;
            let rc = rel_change(&xn, &x);
            let fx_old = f.value(&x)? + h.value(&x)?;
            let fx_new = f.value(&xn)? + h.value(&xn)?;
            if opts.nag_restart && fx_new > fx_old {
                t = 1.0;
                y = x.clone();
            } else {
                y = xn.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
                x = xn;
                t = tn;
            }
            gy = f.value_grad(&y)?.1;
            iter += 1;
            let r = prox_grad_residual(f, h, &x, step)?;
            rep.trace.push(r);
            last_res = r;
            if r <= opts.tol {
                rep.status = InnerStatus::Converged;
                break;
            }
            if iter >= opts.max_iter {
                rep.status = InnerStatus::MaxIter;
                break;
            }
            if opts.rel_change_tol.is_some_and(|tol| rc <= tol) {
                rep.status = InnerStatus::RelChange;
                break;
            }
        }
        if adaptive {
            step = (step * 1.2).min(cap);
        }
    }
    rep.x = if opts.accelerate { x } else { y };
    rep.residual = last_res;
    rep.iters = iter;
    Ok(rep)
}
