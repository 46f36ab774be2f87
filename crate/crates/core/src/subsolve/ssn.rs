use super::cg::cg;
use super::{rel_change, ArmijoRecord, InnerOpts, InnerReport, InnerStatus};
use crate::alfn::SmoothFn;
use crate::error::{check_dim, AlmError, Result};
use crate::numcore::vecops;

/// Semismooth Newton on `F = ∇φ`: solve `(J + μ_k I) d = −F` by CG with
/// `μ_k = reg_scale · min(reg_cap, ‖F‖)`, fall back to `−F` when the CG
/// direction is not a descent direction, then Armijo backtracking on `φ`.
pub fn ssn(f: &dyn SmoothFn, x0: &[f64], opts: &InnerOpts) -> Result<InnerReport> {
    opts.validate()?;
    check_dim("ssn x0", f.dim(), x0.len())?;
    let so = opts.ssn;
    let a = opts.armijo;
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f.value_grad(&x)?;
    let mut gn = vecops::norm(&g);
    let mut rep = InnerReport::new(x.clone());
    rep.trace.push(gn);
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
        let jac = f
            .hessian(&x)?
            .ok_or_else(|| AlmError::Capability("semismooth Newton needs a Hessian oracle".into()))?;
        let reg = so.reg_scale * so.reg_cap.min(gn);
        let neg_g = vecops::scale(-1.0, &g);
        let sol = cg(jac.as_ref(), reg, &neg_g, so.cg_tol.min(gn), so.cg_max);
        drop(jac);
        rep.cg_iters += sol.iters;
        let mut d = sol.x;
        let mut slope = vecops::dot(&g, &d);
        let newton = slope < -1e-14 * gn * vecops::norm(&d) && vecops::norm(&d) > 0.0;
        if newton {
            rep.newton_steps += 1;
        } else {
            d = neg_g;
            slope = -gn * gn;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=a.max_backtracks {
            let xn = vecops::add_scaled(&x, alpha, &d);
            let fnew = f.value(&xn)?;
            if fnew.is_finite() && fnew <= fx + a.sigma * alpha * slope {
                accepted = Some((xn, fnew));
                break;
            }
            alpha *= a.backtrack;
        }
        let Some((xn, fnew)) = accepted else {
            rep.status = InnerStatus::Stalled;
            break;
        };
        rep.armijo.push(ArmijoRecord { f_ref: fx, f_new: fnew, alpha, slope, sigma: a.sigma });
        let rc = rel_change(&xn, &x);
        x = xn;
        let (fv, gv) = f.value_grad(&x)?;
        fx = fv;
        g = gv;
        gn = vecops::norm(&g);
        rep.trace.push(gn);
        iter += 1;
        if !gn.is_finite() {
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
