//! The prescribed scheduler reaches exactly theta; switching to sigma at the
//! choice state with weight w moves the value by 2^-w·d(w).
//!
//! cargo run --example deviation

use positivity::lrs::reference_negative;
use positivity::mdp::sched::Deviation;
use positivity::mdp::transient::{transient_distribution, TransientConfig};
use positivity::mdp::Scheduler;
use positivity::rat::{self, Q};
use positivity::reductions::{reduce, Prescribed, ReductionTarget};

fn termination(out: &positivity::reductions::ReductionOutput, s: &dyn Scheduler) -> (Q, Q) {
    let cfg = TransientConfig::budget(10_000).stop_below(Q::from_integer(0.into())).tail_target(rat::half_pow(40));
    let r = transient_distribution(&out.mdp, s, &cfg).unwrap();
    (r.mass_where(|_, w| w < &Q::from_integer(0.into())), r.tail)
}

fn main() {
    let out = reduce(&reference_negative(), ReductionTarget::MaxTermination).unwrap();
    let p = Prescribed::for_output(&out);
    let (v, tail) = termination(&out, &p);
    println!("theta      {:.12}", rat::approx(&out.theta));
    println!("prescribed {:.12} (tail {:.1e})", rat::approx(&v), rat::approx(&tail));
    for w in 1..=4 {
        let dev = Deviation { base: &p, state: "choice".into(), weight: rat::qi(w), action: "sigma".into() };
        let (v, _) = termination(&out, &dev);
        println!("sigma at {w}  {:.12}  beats theta: {}", rat::approx(&v), out.direction.beats(&v, &out.theta));
    }
}
