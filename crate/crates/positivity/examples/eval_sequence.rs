//! Evaluate a recurrence exactly and look for its first negative term.
//!
//! cargo run --example eval_sequence

use positivity::lrs::{reference_negative, Lrs};
use positivity::rat;

fn main() {
    let fib = Lrs::from_pairs(&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]).unwrap();
    let terms: Vec<String> = fib.terms(10).iter().map(rat::fmt).collect();
    println!("fibonacci: {}", terms.join(" "));

    let neg = reference_negative();
    for (n, u) in neg.terms(6).iter().enumerate() {
        println!("u_{n} = {}", rat::fmt(u));
    }
    println!("first negative within 50 terms: {:?}", neg.first_negative(50));
}
