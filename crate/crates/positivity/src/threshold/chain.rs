//! The absorbing Markov chain that drives the block recursion `v_n = A v_{n−1} (+ affine terms)`.

use super::matrix::RatMatrix;
use crate::rat::{self, Q};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// Chain state; the integer is the weight offset relative to the current block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Node {
    T(i64),
    S(i64),
    Goal(i64),
}

impl Node {
    pub fn is_absorbing(&self) -> bool {
        match *self {
            Node::T(i) | Node::S(i) => i <= 0,
            Node::Goal(_) => true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainC {
    pub k: usize,
    pub transitions: BTreeMap<Node, Vec<(Q, Node)>>,
}

impl ChainC {
    pub fn num_states(&self) -> usize {
        5 * self.k
    }

    pub fn states(&self) -> Vec<Node> {
        let k = self.k as i64;
        let mut v = Vec::new();
        for i in (1 - k)..=k {
            v.push(Node::T(i));
            v.push(Node::S(i));
        }
        v.extend((1..=k).map(Node::Goal));
        v
    }
}

pub fn build_chain_c(alphas: &[Q]) -> ChainC {
    let k = alphas.len() as i64;
    let rest = Q::one() - rat::sum_abs(alphas);
    let mut transitions = BTreeMap::new();
    for i in 1..=k {
        for (from, same, other) in [(Node::T(i), Node::T as fn(i64) -> Node, Node::S as fn(i64) -> Node), (Node::S(i), Node::S, Node::T)] {
            let mut out = Vec::new();
            for (j, a) in alphas.iter().enumerate() {
                let to = i - (j as i64 + 1);
                if a.is_positive() {
                    out.push((a.clone(), same(to)));
                } else if a.is_negative() {
                    out.push((a.abs(), other(to)));
                }
            }
            if !rest.is_zero() {
                out.push((rest.clone(), Node::Goal(i)));
            }
            transitions.insert(from, out);
        }
    }
    ChainC { k: k as usize, transitions }
}

/// Absorption probabilities from each positive-index state, by dynamic
/// programming in increasing index (every step lowers the index).
pub fn reach_probs(chain: &ChainC) -> BTreeMap<Node, BTreeMap<Node, Q>> {
    let mut out: BTreeMap<Node, BTreeMap<Node, Q>> = BTreeMap::new();
    for i in 1..=chain.k as i64 {
        for from in [Node::T(i), Node::S(i)] {
            let mut dist: BTreeMap<Node, Q> = BTreeMap::new();
            for (p, to) in &chain.transitions[&from] {
                if to.is_absorbing() {
                    *dist.entry(*to).or_insert_with(Q::zero) += p;
                } else {
                    for (t2, p2) in &out[to] {
                        *dist.entry(*t2).or_insert_with(Q::zero) += p * p2;
                    }
                }
            }
            out.insert(from, dist);
        }
    }
    out
}

/// Row/column position of a chain node in `A`.
///
/// Rows: t_{+k}..t_{+1}, s_{+k}..s_{+1}. Columns: t_0, t_{−1}..t_{−k+1}, then s likewise.
pub fn row_of(k: usize, n: Node) -> usize {
    match n {
        Node::T(i) => k - i as usize,
        Node::S(i) => 2 * k - i as usize,
        Node::Goal(_) => unreachable!("goal has no row"),
    }
}

pub fn col_of(k: usize, n: Node) -> usize {
    match n {
        Node::T(i) => (-i) as usize,
        Node::S(i) => k + (-i) as usize,
        Node::Goal(_) => unreachable!("goal has no column"),
    }
}

/// `A` (2k×2k) and the goal matrix `G` (2k×k, column i−1 = Pr(◊goal_{+i})).
pub fn transfer_matrices(alphas: &[Q]) -> (RatMatrix, RatMatrix) {
    let k = alphas.len();
    let chain = build_chain_c(alphas);
    let reach = reach_probs(&chain);
    let mut a = RatMatrix::zeros(2 * k, 2 * k);
    let mut g = RatMatrix::zeros(2 * k, k);
    for (from, dist) in &reach {
        let r = row_of(k, *from);
        for (to, p) in dist {
            match to {
                Node::Goal(i) => g.set(r, *i as usize - 1, p.clone()),
                _ => a.set(r, col_of(k, *to), p.clone()),
            }
        }
    }
    (a, g)
}
