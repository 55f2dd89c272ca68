//! Finite weighted MDPs with exact rational data, plus the analysis engines.

mod model;
pub mod prism;
pub mod sched;
pub mod simulate;
pub mod transform;
pub mod transient;
pub mod unfold;

pub use model::{Action, Mdp, MdpError, StateId, Violation};
pub use sched::{FnScheduler, HashScheduler, Scheduler, WeightScheduler, WindowRule};
