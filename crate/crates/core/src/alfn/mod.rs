//! Augmented Lagrangian assemblers for four problem classes: box-form NLP,
//! convex composite (fully smooth and retained-`h` forms), nonconvex
//! composite with a retained slack, and block integer programs.
//!
//! Every value includes the `−‖Λ‖²/(2ρ)` constant, so at a feasible point
//! with consistent multipliers the AL equals the original objective.

mod assemble;
mod oracle;
mod problem;

pub use assemble::{
    al_composite_retained, al_composite_smooth, al_ip, al_nlp, al_nlp_dual, al_nonconvex,
    gen_hessian_composite, gen_hessian_nlp, AlEval, CompositeAl, CompositeHessian, IpAl, NcAl,
    NcEval, NlpAl, NlpDual, NlpHessian, RetainedAl, RetainedEval,
};
pub(crate) use assemble::ip_al_value;
pub use oracle::{
    check_gradient, check_jacobian, AffineMap, FnMap, FnSmooth, LeastSquares, Linear, Quadratic,
    SharedFn, SharedMap, SmoothFn, VectorMap,
};
pub use problem::{
    multiplier_sign, BlockSet, CompositeProblem, IpProblem, Multipliers, NcCompositeProblem,
    NlpProblem, Penalty, Problem,
};
