use super::{rel_change, InnerOpts, InnerReport, InnerStatus};
use crate::alfn::SmoothFn;
use crate::error::{check_dim, AlmError, Result};
use crate::numcore::vecops;

/// Nesterov accelerated gradient. With `m > 0` uses the constant momentum
/// `(√L − √m)/(√L + √m)`; with `m = 0` the `t_k` sequence with optional
/// function-value restart. `L` comes from `opts.lipschitz` or is found by
/// step-doubling backtracking.
pub fn nag(f: &dyn SmoothFn, x0: &[f64], opts: &InnerOpts, m: f64) -> Result<InnerReport> {
    opts.validate()?;
    check_dim("nag x0", f.dim(), x0.len())?;
    if !(m >= 0.0) {
        return Err(AlmError::InvalidInput(format!("strong convexity must be >= 0, got {m}")));
    }
    let fixed_l = opts.lipschitz;
    let mut l = fixed_l.unwrap_or(1.0);
    let mut x = x0.to_vec();
    let (mut fx, mut gx) = f.value_grad(&x)?;
    let mut gn = vecops::norm(&gx);
    let mut rep = InnerReport::new(x.clone());
    rep.trace.push(gn);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut iter = 0;
    loop {
        if gn <= opts.tol {
            rep.status = InnerStatus::Converged;
            break;
        }
        if iter >= opts.max_iter {
            rep.status = InnerStatus::MaxIter;
            break;
        }
        let (fy, gy) = f.value_grad(&y)?;
        let gy2 = vecops::norm_sq(&gy);
        let mut xn;
        let mut tries = 0;
        loop {
            xn = vecops::add_scaled(&y, -1.0 / l, &gy);
            if fixed_l.is_some() {
                break;
            }
            let fxn = f.value(&xn)?;
            if fxn.is_finite() && fxn <= fy - 0.5 * gy2 / l + 1e-12 * fy.abs() {
                break;
            }
            l *= 2.0;
            tries += 1;
            if tries > opts.armijo.max_backtracks {
                rep.status = InnerStatus::Stalled;
                rep.x = x;
                rep.residual = gn;
                rep.iters = iter;
                return Ok(rep);
            }
        }
        let (fxn, gxn) = f.value_grad(&xn)?;
        let beta;
        if m > 0.0 {
            let q = (m / l).min(1.0).sqrt();
            beta = (1.0 - q) / (1.0 + q);
        } else {
            let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            beta = (t - 1.0) / tn;
            t = tn;
        }
        let restart = opts.nag_restart && fxn > fx;
        if restart {
            t = 1.0;
            y = xn.clone();
        } else {
            y = xn
                .iter()
                .zip(&x)
                .map(|(a, b)| a + beta * (a - b))
                .collect();
        }
        let rc = rel_change(&xn, &x);
        x = xn;
        fx = fxn;
        gx = gxn;
        gn = vecops::norm(&gx);
        rep.trace.push(gn);
        iter += 1;
        if !gn.is_finite() || !fx.is_finite() {
            rep.status = InnerStatus::Stalled;
            break;
        }
        if fixed_l.is_none() && iter % 10 == 0 {
            // let the estimate relax so one bad region does not pin a tiny step
            l *= 0.9;
        }
        if gn > opts.tol && opts.rel_change_tol.is_some_and(|tol| rc <= tol) {
            rep.status = InnerStatus::RelChange;
            break;
        }
    }
    rep.x = x;
    rep.residual = gn;
    rep.iters = iter;
    Ok(rep)
}
