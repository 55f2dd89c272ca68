//! Closed-form thresholds and the block recursion behind them.
//!
//! cargo run --example thresholds

use positivity::lrs::reference_negative;
use positivity::rat;
use positivity::threshold::{scheduler_values, theta_cvar_aux, theta_partial, theta_termination, Kind};

fn main() {
    let lrs = reference_negative();
    let (a, b) = (lrs.coefficients(), lrs.initials());
    let (tmax, _) = theta_termination(a, b, false).unwrap();
    let (tmin, _) = theta_termination(a, b, true).unwrap();
    let (tpe, _) = theta_partial(a, b).unwrap();
    let tcv = theta_cvar_aux(a, b).unwrap();
    for (name, t) in [("termination-max", &tmax), ("termination-min", &tmin), ("partial", &tpe), ("cvar-aux", &tcv)] {
        println!("{name:<16} {:<40} ~{:.9}", rat::fmt(t), rat::approx(t));
    }

    // d(w) = t-value minus s-value reproduces the sequence on the base window onward.
    let table = scheduler_values(Kind::TerminationMax, a, b, 3).unwrap();
    for w in 0..4 {
        println!("d({w}) = {:<14} u_{w} = {}", rat::fmt(&table.d(w).unwrap()), rat::fmt(&lrs.eval(w as usize)));
    }
}
