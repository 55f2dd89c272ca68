//! Export instances as PRISM text, with integer scaling or unary expansion.
//!
//! cargo run --example export_models

use positivity::lrs::reference_negative;
use positivity::mdp::prism::to_prism;
use positivity::mdp::transform::{integerize_weights, unary_expand};
use positivity::rat;
use positivity::reductions::{reduce, ReductionTarget};

fn main() {
    let lrs = reference_negative();

    let cond = reduce(&lrs, ReductionTarget::ConditionalSsppMax).unwrap();
    println!("conditional, raw: {}", to_prism(&cond.mdp).unwrap_err());
    let (m, theta, scale) = integerize_weights(&cond.mdp, &cond.theta);
    println!("scaled by {scale}, theta -> {}", rat::fmt(&theta));
    println!("{} lines of PRISM", to_prism(&m).unwrap().lines().count());

    let oc = reduce(&lrs, ReductionTarget::OneCounterMaxTermination).unwrap();
    let unary = unary_expand(&oc.mdp).unwrap();
    println!("one-counter: {} states, weights {:?}", unary.num_states(), unary.weights().map(rat::fmt).collect::<std::collections::BTreeSet<_>>());
    print!("{}", to_prism(&unary).unwrap().lines().take(12).collect::<Vec<_>>().join("\n"));
    println!();
}
