//! Bracket the optimal termination probability by unfolding weights into
//! a finite window and clamping outside it.
//!
//! cargo run --example certify_intervals

use positivity::lrs::{reference_negative, reference_nonnegative};
use positivity::mdp::unfold::Mode;
use positivity::rat;
use positivity::reductions::{reduce, ReductionTarget};
use positivity::verify::termination_intervals;

fn main() {
    for (label, lrs) in [("negative", reference_negative()), ("nonnegative", reference_nonnegative())] {
        let out = reduce(&lrs, ReductionTarget::MaxTermination).unwrap();
        let ivs = termination_intervals(&out.mdp, Mode::Max, -3, &[10, 20, 40], 10_000).unwrap();
        println!("{label}: theta ~{:.12}", rat::approx(&out.theta));
        for iv in ivs {
            println!("  w_hi {:>2}: [{:.12}, {:.12}]", iv.w_hi, rat::approx(&iv.lower), rat::approx(&iv.upper));
        }
    }
}
