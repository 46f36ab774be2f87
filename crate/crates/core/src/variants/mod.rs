//! ALM variants: linearized and proximal ALM, accelerated dual ALM,
//! two-block ADMM, the unified primal-dual iteration and ALM-BCD for
//! block integer programs.

mod accel;
mod admm;
mod bcd;
mod ip;
mod linearized;
mod proximal;
mod updf;

pub use accel::{accel_dual_alm, momentum, t_next};
pub use admm::{admm2, AdmmBlock, AdmmParams, AdmmReport, ProxBlock, QuadBlock};
pub use bcd::{bcd_sweep, BcdUpdate, BlockCache, SweepStats};
pub use ip::{alm_bcd_ip, BcdConfig, IpOutcome};
pub use linearized::{linearized_alm, linearized_alm_step, LoopConfig};
pub use proximal::{proximal_alm, proximal_alm_step};
pub use updf::{updf, CompositeSaddle, Monitor, PdParams, PdResult, SaddleOracle};
pub(crate) use bcd::bcd_until_still;
