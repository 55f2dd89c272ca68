//! Run the full verification suite on one instance.
//!
//! cargo run --example verify_suite [target]

use positivity::lrs::reference_negative;
use positivity::reductions::{reduce, ReductionTarget};
use positivity::verify::{run_suite, VerifyConfig};

fn main() {
    let target: ReductionTarget = std::env::args().nth(1).as_deref().unwrap_or("partial-sspp-max").parse().unwrap();
    let lrs = reference_negative();
    let out = reduce(&lrs, target).unwrap();
    let rep = run_suite(&out, &lrs, &VerifyConfig::default());
    for c in &rep.checks {
        println!("{:?} {}: {}", c.status, c.name, c.detail);
    }
    println!("passed: {}", rep.passed());
}
