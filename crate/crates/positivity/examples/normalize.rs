//! Rescale a sequence so the gadget probabilities fit, without changing signs.
//!
//! cargo run --example normalize

use positivity::lrs::{reference_nonnegative, Profile};
use positivity::rat;

fn main() {
    let lrs = reference_nonnegative();
    for v in lrs.check_assumption(Profile::General) {
        println!("before: {v}");
    }
    let norm = lrs.normalize();
    println!("lambda = {}, mu = {}", rat::fmt(&norm.lambda), rat::fmt(&norm.mu));
    println!("coefficients {:?}", norm.normalized.coefficients().iter().map(rat::fmt).collect::<Vec<_>>());
    println!("initials     {:?}", norm.normalized.initials().iter().map(rat::fmt).collect::<Vec<_>>());
    println!("violations after: {}", norm.normalized.check_assumption(Profile::General).len());

    // v_n = mu·lambda^n·u_n
    let (u, v) = (lrs.terms(5), norm.normalized.terms(5));
    for n in 0..=5 {
        let want = &norm.mu * rat::pow(&norm.lambda, n as u32) * &u[n];
        assert_eq!(v[n], want);
    }
    println!("v_n = mu·lambda^n·u_n checked for n <= 5");
}
