//! Reductions from the Positivity problem for linear recurrence sequences
//! to threshold problems on weighted MDPs, in exact rational arithmetic.
//!
//! - [`lrs`]: sequences, evaluation, normalization.
//! - [`mdp`]: weighted MDPs, schedulers, transient analysis, weight unfolding, export.
//! - [`gadgets`]: the MDP fragments the reductions are glued from.
//! - [`threshold`]: block recursion, transfer matrix and closed-form thresholds.
//! - [`reductions`]: one entry point per target objective.
//! - [`verify`]: exact checks of an instance against its sequence.
//!
//! ```
//! use positivity::lrs::reference_negative;
//! use positivity::reductions::{reduce, ReductionTarget};
//!
//! let out = reduce(&reference_negative(), ReductionTarget::MaxTermination).unwrap();
//! assert_eq!(positivity::rat::fmt(&out.theta), "1434561/8128000");
//! ```

pub mod gadgets;
pub mod lrs;
pub mod mdp;
pub mod rat;
pub mod reductions;
pub mod threshold;
pub mod verify;
