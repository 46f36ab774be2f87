//! Augmented Lagrangian toolkit.
//!
//! Proximal operators and Moreau envelopes ([`prox`]), AL assemblers for four
//! problem classes ([`alfn`]), inner solvers ([`subsolve`]), the practical ALM
//! outer loop ([`alm`]), method variants ([`variants`]) and instance
//! generators ([`problems`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numcore;
pub mod prox;
pub mod alfn;
pub mod subsolve;
pub mod alm;
pub mod variants;
pub mod problems;

pub use error::{AlmError, Result};
