//! Weight-level rewrites: unary expansion and integerization.

use super::{Mdp, MdpError};
use crate::rat::{self, Q};
use num_bigint::BigInt;
use num_traits::One;

/// Rewrites every action of weight ±w (|w| ≥ 2) into a chain of |w|−1 fresh
/// states so that all weights lie in {−1, 0, +1}. The chain comes first and
/// the original distribution is taken on its last step, so the accumulated
/// weight moves monotonically within the chain.
pub fn unary_expand(mdp: &Mdp) -> Result<Mdp, MdpError> {
    let mut out = Mdp::new(mdp.name(mdp.initial()));
    for name in mdp.names() {
        out.state(name);
    }
    for s in 0..mdp.num_states() {
        let from = mdp.name(s);
        for a in mdp.actions(s) {
            let w = rat::to_i64(&a.weight)
                .ok_or_else(|| MdpError::Shape(format!("weight {} of {from}/{} is not an integer", rat::fmt(&a.weight), a.name)))?;
            let branches: Vec<(Q, &str)> = a.branches.iter().map(|(p, t)| (p.clone(), mdp.name(*t))).collect();
            if w.abs() < 2 {
                out.add_action(from, &a.name, a.weight.clone(), &branches)?;
                continue;
            }
            let unit = rat::qi(w.signum());
            let chain: Vec<String> = (1..w.abs()).map(|i| format!("{from}.{}.u{i}", a.name)).collect();
            for c in &chain {
                if mdp.id(c).is_some() {
                    return Err(MdpError::DuplicateState(c.clone()));
                }
            }
            out.add_action(from, &a.name, unit.clone(), &[(Q::one(), &chain[0])])?;
            for pair in chain.windows(2) {
                out.add_action(&pair[0], "unit", unit.clone(), &[(Q::one(), &pair[1])])?;
            }
            out.add_action(chain.last().expect("|w| >= 2"), "unit", unit, &branches)?;
        }
    }
    for (m, set) in mdp.marks() {
        for &s in set {
            out.mark(m, mdp.name(s));
        }
    }
    Ok(out)
}

/// Scales all weights by the lcm `L` of their denominators; returns the
/// scaled MDP, `theta·L` and `L`.
pub fn integerize_weights(mdp: &Mdp, theta: &Q) -> (Mdp, Q, BigInt) {
    let l = rat::lcm_denoms(mdp.weights());
    let lq = Q::from_integer(l.clone());
    if l.is_one() {
        return (mdp.clone(), theta.clone(), l);
    }
    let mut out = Mdp::new(mdp.name(mdp.initial()));
    for name in mdp.names() {
        out.state(name);
    }
    for s in 0..mdp.num_states() {
        for a in mdp.actions(s) {
            let br: Vec<(Q, &str)> = a.branches.iter().map(|(p, t)| (p.clone(), mdp.name(*t))).collect();
            out.add_action(mdp.name(s), &a.name, &a.weight * &lq, &br).expect("names copied from a valid mdp");
        }
    }
    for (m, set) in mdp.marks() {
        for &s in set {
            out.mark(m, mdp.name(s));
        }
    }
    (out, theta * lq, l)
}
