//! Matrix recursion, closed-form thresholds and value tables.

pub mod chain;
pub mod matrix;
pub mod theta;

pub use chain::{build_chain_c, reach_probs, transfer_matrices, ChainC, Node};
pub use matrix::{mat_inverse, neumann, RatMatrix};
pub use theta::{
    scheduler_values, theta_cvar_aux, theta_partial, theta_termination, Anchor, Kind, Recursion, ThresholdError, ValueTable,
};
