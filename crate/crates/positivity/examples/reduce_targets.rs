//! Build every threshold instance from one sequence.
//!
//! cargo run --example reduce_targets

use positivity::lrs::reference_negative;
use positivity::rat;
use positivity::reductions::{reduce, ReductionTarget};

fn main() {
    let lrs = reference_negative();
    for t in ReductionTarget::ALL {
        let out = reduce(&lrs, t).unwrap();
        println!(
            "{:<28} optimum {} {:<12.9} {:>3} states {:>3} actions{}",
            t.name(),
            out.direction.symbol(),
            rat::approx(&out.theta),
            out.mdp.num_states(),
            out.mdp.num_transitions(),
            out.cvar_p.as_ref().map(|p| format!("  p = {}", rat::fmt(p))).unwrap_or_default()
        );
    }
    let bad = positivity::lrs::Lrs::from_pairs(&[(1, 32), (-1, 32)], &[(-1, 1), (1, 1)]).unwrap();
    println!("{}", reduce(&bad, ReductionTarget::MaxTermination).unwrap_err());
}
