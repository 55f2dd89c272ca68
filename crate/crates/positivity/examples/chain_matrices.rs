//! The gadget for the recurrence and the absorbing chain that yields the
//! transfer matrix A of the block recursion.
//!
//! cargo run --example chain_matrices

use positivity::gadgets::{build_recurrence, Sink};
use positivity::lrs::reference_negative;
use positivity::rat;
use positivity::threshold::{build_chain_c, neumann, transfer_matrices};

fn main() {
    let lrs = reference_negative();
    let g = build_recurrence(lrs.coefficients(), Sink::Trap).unwrap();
    println!("gadget: {} states, ports {:?}", g.fragment.num_states(), g.ports);
    let c = build_chain_c(lrs.coefficients());
    println!("chain: {} states", c.num_states());
    let (a, _) = transfer_matrices(lrs.coefficients());
    for r in 0..a.rows() {
        println!("  [{}]", a.row(r).iter().map(|x| format!("{:>12}", rat::fmt(x))).collect::<Vec<_>>().join(" "));
    }
    let scale = rat::half_pow(lrs.order() as u32);
    let n = neumann(&a, &scale).unwrap();
    println!("(I - A/2^k)^-1 has max row sum {}", rat::fmt(&n.norm_inf()));
}
