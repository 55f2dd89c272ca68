//! Deterministic weight-based schedulers.

use super::{Mdp, StateId};
use crate::rat::{self, Q};
use std::collections::BTreeMap;

/// Chooses an action index for a (state, accumulated weight) pair.
///
/// Engines only ask at states with more than one enabled action.
pub trait Scheduler {
    fn choose(&self, mdp: &Mdp, s: StateId, w: &Q) -> Option<usize>;
}

impl<S: Scheduler + ?Sized> Scheduler for &S {
    fn choose(&self, mdp: &Mdp, s: StateId, w: &Q) -> Option<usize> {
        (**self).choose(mdp, s, w)
    }
}

/// Action index to use at `s`, consulting the scheduler only when there is a choice.
pub fn pick(mdp: &Mdp, sched: &dyn Scheduler, s: StateId, w: &Q) -> Option<usize> {
    match mdp.actions(s).len() {
        0 => None,
        1 => Some(0),
        n => sched.choose(mdp, s, w).filter(|&a| a < n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowRule {
    Fixed(usize),
    /// Reuse the table entry at the nearest window edge.
    Clamp,
}

/// Finite table over an integer weight window with per-state fallbacks.
#[derive(Debug, Clone, Default)]
pub struct WeightScheduler {
    pub window: (i64, i64),
    pub table: BTreeMap<(StateId, i64), usize>,
    pub default: BTreeMap<StateId, WindowRule>,
}

impl WeightScheduler {
    pub fn new(lo: i64, hi: i64) -> Self {
        WeightScheduler { window: (lo, hi), ..Default::default() }
    }

    /// Entries naming actions that do not exist.
    pub fn check(&self, mdp: &Mdp) -> Vec<String> {
        let n = |s: StateId| mdp.actions(s).len();
        let mut bad = Vec::new();
        for (&(s, w), &a) in &self.table {
            if a >= n(s) {
                bad.push(format!("{} at {w}: action {a}", mdp.name(s)));
            }
        }
        for (&s, r) in &self.default {
            if let WindowRule::Fixed(a) = r {
                if *a >= n(s) {
                    bad.push(format!("{} default: action {a}", mdp.name(s)));
                }
            }
        }
        bad
    }
}

impl Scheduler for WeightScheduler {
    fn choose(&self, _mdp: &Mdp, s: StateId, w: &Q) -> Option<usize> {
        let (lo, hi) = self.window;
        if let Some(w) = rat::to_i64(w) {
            if (lo..=hi).contains(&w) {
                if let Some(&a) = self.table.get(&(s, w)) {
                    return Some(a);
                }
            }
            match self.default.get(&s)? {
                WindowRule::Fixed(a) => Some(*a),
                WindowRule::Clamp => self.table.get(&(s, w.clamp(lo, hi))).copied(),
            }
        } else {
            match self.default.get(&s)? {
                WindowRule::Fixed(a) => Some(*a),
                WindowRule::Clamp => None,
            }
        }
    }
}

/// Scheduler given by a closure.
pub struct FnScheduler<F>(pub F);

impl<F: Fn(&Mdp, StateId, &Q) -> Option<usize>> Scheduler for FnScheduler<F> {
    fn choose(&self, mdp: &Mdp, s: StateId, w: &Q) -> Option<usize> {
        (self.0)(mdp, s, w)
    }
}

/// Pseudo-random but deterministic choice keyed on (seed, state name, weight).
///
/// Keyed on names so that the same seed drives the same choices in
/// different MDPs that share state names.
#[derive(Debug, Clone, Copy)]
pub struct HashScheduler {
    pub seed: u64,
}

impl Scheduler for HashScheduler {
    fn choose(&self, mdp: &Mdp, s: StateId, w: &Q) -> Option<usize> {
        let n = mdp.actions(s).len();
        if n == 0 {
            return None;
        }
        let mut h = fnv(0xcbf2_9ce4_8422_2325 ^ self.seed, mdp.name(s).as_bytes());
        h = fnv(h, b"|");
        h = fnv(h, rat::fmt(w).as_bytes());
        Some((mix(h) % n as u64) as usize)
    }
}

fn fnv(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `base` everywhere except one (state, weight) pair.
pub struct Deviation<'a> {
    pub base: &'a dyn Scheduler,
    pub state: String,
    pub weight: Q,
    pub action: String,
}

impl Scheduler for Deviation<'_> {
    fn choose(&self, mdp: &Mdp, s: StateId, w: &Q) -> Option<usize> {
        if mdp.name(s) == self.state && *w == self.weight {
            return mdp.action_index(s, &self.action);
        }
        self.base.choose(mdp, s, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qi};
    use num_traits::Zero;

    fn two_choice() -> Mdp {
        let mut m = Mdp::new("c");
        m.add_action("c", "a", Q::zero(), &[(qi(1), "x")]).unwrap();
        m.add_action("c", "b", Q::zero(), &[(qi(1), "y")]).unwrap();
        m
    }

    #[test]
    fn window_table_and_defaults() {
        let m = two_choice();
        let mut s = WeightScheduler::new(0, 3);
        s.table.insert((0, 1), 1);
        s.table.insert((0, 3), 1);
        s.default.insert(0, WindowRule::Fixed(0));
        assert_eq!(s.choose(&m, 0, &qi(1)), Some(1));
        assert_eq!(s.choose(&m, 0, &qi(2)), Some(0));
        assert_eq!(s.choose(&m, 0, &qi(9)), Some(0));
        s.default.insert(0, WindowRule::Clamp);
        assert_eq!(s.choose(&m, 0, &qi(9)), Some(1));
        assert_eq!(s.choose(&m, 0, &q(1, 2)), None);
        assert!(s.check(&m).is_empty());
        s.table.insert((0, 2), 7);
        assert_eq!(s.check(&m).len(), 1);
    }

    #[test]
    fn hash_scheduler_is_stable() {
        let m = two_choice();
        let h = HashScheduler { seed: 7 };
        let a: Vec<_> = (0..20).map(|w| h.choose(&m, 0, &qi(w)).unwrap()).collect();
        let b: Vec<_> = (0..20).map(|w| h.choose(&m, 0, &qi(w)).unwrap()).collect();
        assert_eq!(a, b);
        assert!(a.contains(&0) && a.contains(&1));
    }
}
