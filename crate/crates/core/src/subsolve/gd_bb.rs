use std::collections::VecDeque;

use super::{rel_change, ArmijoRecord, InnerOpts, InnerReport, InnerStatus};
use crate::alfn::SmoothFn;
use crate::error::{check_dim, Result};
use crate::numcore::vecops;

const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 1e12;

/// Gradient descent with alternating BB1/BB2 steps and a nonmonotone Armijo
/// safeguard over the last `bb_memory` values.
pub fn gd_bb(f: &dyn SmoothFn, x0: &[f64], opts: &InnerOpts) -> Result<InnerReport> {
    opts.validate()?;
    check_dim("gd_bb x0", f.dim(), x0.len())?;
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f.value_grad(&x)?;
    let mut rep = InnerReport::new(x.clone());
    let mut gn = vecops::norm(&g);
    rep.trace.push(gn);
    let mut hist: VecDeque<f64> = VecDeque::from([fx]);
    let mut step = if gn > 0.0 { (1.0 / gn).clamp(STEP_MIN, 1.0) } else { 1.0 };
    let a = opts.armijo;

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
        let f_ref = hist.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let slope = -gn * gn;
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..=a.max_backtracks {
            let xn = vecops::add_scaled(&x, -alpha, &g);
            let fnew = f.value(&xn)?;
            if fnew.is_finite() && fnew <= f_ref + a.sigma * alpha * slope {
                accepted = Some((xn, fnew));
                break;
            }
            alpha *= a.backtrack;
        }
        let Some((xn, fnew)) = accepted else {
            rep.status = InnerStatus::Stalled;
            break;
        };
        rep.armijo.push(ArmijoRecord { f_ref, f_new: fnew, alpha, slope, sigma: a.sigma });
        let (_, gnew) = f.value_grad(&xn)?;
        let s = vecops::sub(&xn, &x);
        let y = vecops::sub(&gnew, &g);
        let sy = vecops::dot(&s, &y);
        step = if sy > 0.0 {
            if iter % 2 == 0 {
                vecops::norm_sq(&s) / sy
            } else {
                sy / vecops::norm_sq(&y)
            }
        } else {
            STEP_MAX
        }
        .clamp(STEP_MIN, STEP_MAX);
        let rc = rel_change(&xn, &x);
        x = xn;
        fx = fnew;
        g = gnew;
        gn = vecops::norm(&g);
        rep.trace.push(gn);
        hist.push_back(fx);
        if hist.len() > opts.bb_memory.max(1) {
            hist.pop_front();
        }
        iter += 1;
        if !gn.is_finite() || !fx.is_finite() {
            rep.status = InnerStatus::Stalled;
            break;
        }
        if gn > opts.tol && opts.rel_change_tol.is_some_and(|t| rc <= t) {
            rep.status = InnerStatus::RelChange;
            break;
        }
    }
    rep.x = x;
    rep.residual = gn;
    rep.iters = iter;
    Ok(rep)
}
