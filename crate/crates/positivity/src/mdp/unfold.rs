//! Weight-unfolded finite MDP over a clamped window and exact value iteration on it.

use super::{Mdp, StateId};
use crate::rat::{self, Q};
use num_traits::{One, Signed, Zero};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnfoldError {
    #[error("weight {weight} of {state}/{action} is not an integer")]
    NonInteger { state: String, action: String, weight: String },
    #[error("window must satisfy w_lo < 0 <= w_hi, got [{0}, {1}]")]
    BadWindow(i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Probability that the accumulated weight ever drops below 0.
    Termination,
}

/// Value assigned to the sink entered when the weight exceeds `w_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Optimistic,
    Pessimistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Max,
    Min,
}

#[derive(Debug, Clone)]
pub struct Unfolded {
    pub w_lo: i64,
    pub w_hi: i64,
    states: usize,
    /// Per node: the successor distribution of each enabled action.
    succ: Vec<Vec<Vec<(Q, usize)>>>,
    fixed: Vec<Option<Q>>,
}

impl Unfolded {
    fn width(&self) -> usize {
        (self.w_hi - self.w_lo + 1) as usize
    }

    pub fn node(&self, s: StateId, w: i64) -> Option<usize> {
        (self.w_lo..=self.w_hi).contains(&w).then(|| s * self.width() + (w - self.w_lo) as usize)
    }

    pub fn low_sink(&self) -> usize {
        self.states * self.width()
    }

    pub fn high_sink(&self) -> usize {
        self.low_sink() + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.fixed.len()
    }
}

pub fn weight_unfold(mdp: &Mdp, objective: Objective, w_lo: i64, w_hi: i64, boundary: Boundary) -> Result<Unfolded, UnfoldError> {
    let Objective::Termination = objective;
    if !(w_lo < 0 && 0 <= w_hi) {
        return Err(UnfoldError::BadWindow(w_lo, w_hi));
    }
    let n = mdp.num_states();
    let mut u = Unfolded { w_lo, w_hi, states: n, succ: Vec::new(), fixed: Vec::new() };
    let width = u.width();
    let high = match boundary {
        Boundary::Optimistic => Q::one(),
        Boundary::Pessimistic => Q::zero(),
    };
    let mut iw = Vec::with_capacity(n);
    for s in 0..n {
        let mut v = Vec::new();
        for a in mdp.actions(s) {
            let w = rat::to_i64(&a.weight).ok_or_else(|| UnfoldError::NonInteger {
                state: mdp.name(s).to_string(),
                action: a.name.clone(),
                weight: rat::fmt(&a.weight),
            })?;
            v.push(w);
        }
        iw.push(v);
    }
    for s in 0..n {
        for i in 0..width {
            let w = w_lo + i as i64;
            if w < 0 {
                u.fixed.push(Some(Q::one()));
                u.succ.push(Vec::new());
            } else if mdp.is_terminal(s) || mdp.is_absorbing(s) {
                u.fixed.push(Some(Q::zero()));
                u.succ.push(Vec::new());
            } else {
                u.fixed.push(None);
                let acts = mdp
                    .actions(s)
                    .iter()
                    .zip(&iw[s])
                    .map(|(a, dw)| {
                        a.branches
                            .iter()
                            .map(|(p, t)| {
                                let w2 = w + dw;
                                let node = if w2 < w_lo {
                                    n * width
                                } else if w2 > w_hi {
                                    n * width + 1
                                } else {
                                    t * width + (w2 - w_lo) as usize
                                };
                                (p.clone(), node)
                            })
                            .collect()
                    })
                    .collect();
                u.succ.push(acts);
            }
        }
    }
    u.fixed.push(Some(Q::one()));
    u.succ.push(Vec::new());
    u.fixed.push(Some(high));
    u.succ.push(Vec::new());
    Ok(u)
}

#[derive(Debug, Clone)]
pub struct Values {
    pub values: Vec<Q>,
    /// True when solved by one backward pass over an acyclic unfolding.
    pub exact: bool,
    /// Largest change in the final round of fallback iteration (zero when exact).
    pub residual: Q,
}

fn bellman(u: &Unfolded, v: &[Q], i: usize, mode: Mode) -> Q {
    let vals = u.succ[i].iter().map(|a| a.iter().fold(Q::zero(), |acc, (p, t)| acc + p * &v[*t]));
    let best = match mode {
        Mode::Max => vals.max(),
        Mode::Min => vals.min(),
    };
    best.unwrap_or_else(Q::zero)
}

/// Exact optimal values on the unfolding. Falls back to `budget` rounds of
/// iteration from 0 when the unfolding has cycles.
pub fn value_iteration(u: &Unfolded, mode: Mode, budget: usize) -> Values {
    let n = u.num_nodes();
    let mut v: Vec<Q> = u.fixed.iter().map(|f| f.clone().unwrap_or_else(Q::zero)).collect();
    // Kahn over reversed edges: a node is ready once all its successors are.
    let mut pending = vec![0usize; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        if u.fixed[i].is_some() {
            continue;
        }
        let mut succ: Vec<usize> = u.succ[i].iter().flatten().map(|&(_, t)| t).filter(|&t| u.fixed[t].is_none()).collect();
        succ.sort_unstable();
        succ.dedup();
        pending[i] = succ.len();
        for t in succ {
            preds[t].push(i);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| u.fixed[i].is_none() && pending[i] == 0).collect();
    let mut done = 0;
    let free = u.fixed.iter().filter(|f| f.is_none()).count();
    while let Some(i) = queue.pop_front() {
        v[i] = bellman(u, &v, i, mode);
        done += 1;
        for &p in &preds[i] {
            pending[p] -= 1;
            if pending[p] == 0 {
                queue.push_back(p);
            }
        }
    }
    if done == free {
        return Values { values: v, exact: true, residual: Q::zero() };
    }
    let mut residual = Q::zero();
    for _ in 0..budget {
        residual = Q::zero();
        for i in 0..n {
            if u.fixed[i].is_some() || pending[i] == 0 {
                continue;
            }
            let nv = bellman(u, &v, i, mode);
            let d = (&nv - &v[i]).abs();
            if d > residual {
                residual = d;
            }
            v[i] = nv;
        }
        if residual.is_zero() {
            break;
        }
    }
    Values { values: v, exact: false, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qi;

    #[test]
    fn one_step_down() {
        let mut m = Mdp::new("init");
        m.add_action("init", "down", qi(-1), &[(qi(1), "sink")]).unwrap();
        m.add_absorbing("sink").unwrap();
        let u = weight_unfold(&m, Objective::Termination, -1, 3, Boundary::Pessimistic).unwrap();
        assert_eq!(u.num_nodes(), 2 * 5 + 2);
        let v = value_iteration(&u, Mode::Max, 10);
        assert!(v.exact);
        assert_eq!(v.values[u.node(0, 0).unwrap()], qi(1));
        assert_eq!(v.values[u.node(1, 0).unwrap()], qi(0));
    }

    #[test]
    fn boundary_sinks() {
        let mut m = Mdp::new("up");
        m.add_action("up", "inc", qi(1), &[(qi(1), "up")]).unwrap();
        let o = weight_unfold(&m, Objective::Termination, -1, 4, Boundary::Optimistic).unwrap();
        let p = weight_unfold(&m, Objective::Termination, -1, 4, Boundary::Pessimistic).unwrap();
        assert_eq!(value_iteration(&o, Mode::Max, 1).values[o.node(0, 0).unwrap()], qi(1));
        assert_eq!(value_iteration(&p, Mode::Max, 1).values[p.node(0, 0).unwrap()], qi(0));
    }

    #[test]
    fn rejects_fractional_weight() {
        let mut m = Mdp::new("a");
        m.add_action("a", "x", rat::q(1, 2), &[(qi(1), "a")]).unwrap();
        assert!(weight_unfold(&m, Objective::Termination, -1, 3, Boundary::Optimistic).is_err());
    }

    #[test]
    fn zero_weight_cycle_falls_back() {
        let mut m = Mdp::new("a");
        m.add_action("a", "go", qi(0), &[(rat::q(1, 2), "b"), (rat::q(1, 2), "a")]).unwrap();
        m.add_action("b", "down", qi(-1), &[(qi(1), "a")]).unwrap();
        let u = weight_unfold(&m, Objective::Termination, -1, 2, Boundary::Pessimistic).unwrap();
        let v = value_iteration(&u, Mode::Max, 200);
        assert!(!v.exact);
        assert!(v.residual < rat::half_pow(40));
    }
}
