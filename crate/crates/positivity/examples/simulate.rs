//! Seeded Monte Carlo runs under the prescribed scheduler.
//!
//! cargo run --example simulate

use positivity::lrs::reference_negative;
use positivity::mdp::simulate::{simulate, SimConfig};
use positivity::rat;
use positivity::reductions::{reduce, Prescribed, ReductionTarget};

fn main() {
    let out = reduce(&reference_negative(), ReductionTarget::MaxTermination).unwrap();
    let mut cfg = SimConfig::new(20_000, 7, 2_000);
    cfg.stop_on_termination = true;
    let stats = simulate(&out.mdp, &Prescribed::for_output(&out), &cfg);
    println!("episodes {} capped {}", stats.episodes, stats.capped);
    println!("termination frequency {:.4} vs theta {:.4}", rat::approx(&stats.termination_frequency()), rat::approx(&out.theta));
    println!("mean steps {:.3}", rat::approx(&stats.mean_steps));
}
