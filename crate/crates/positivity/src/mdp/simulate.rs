//! Seeded Monte Carlo runs. Sampling compares a uniform 64-bit draw exactly
//! against cumulative branch probabilities, so no floating point is involved.

use super::sched::pick;
use super::{Mdp, Scheduler, StateId};
use crate::rat::{self, Q};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub episodes: u64,
    pub seed: u64,
    pub step_cap: usize,
    pub stop_states: BTreeSet<StateId>,
    /// End an episode at the first step whose accumulated weight is below 0.
    pub stop_on_termination: bool,
}

impl SimConfig {
    pub fn new(episodes: u64, seed: u64, step_cap: usize) -> Self {
        SimConfig { episodes, seed, step_cap, stop_states: BTreeSet::new(), stop_on_termination: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Episode {
    pub steps: usize,
    pub final_state: StateId,
    pub final_weight: Q,
    /// First step at which the accumulated weight was negative.
    pub terminated_at: Option<usize>,
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimStats {
    pub episodes: u64,
    pub capped: u64,
    pub terminated: u64,
    /// Episode count per final state.
    pub ends: BTreeMap<StateId, u64>,
    /// Mean accumulated weight over episodes ending in a `goal`-marked state.
    pub mean_goal_weight: Option<Q>,
    pub mean_steps: Q,
}

impl SimStats {
    pub fn termination_frequency(&self) -> Q {
        rat::q(self.terminated as i64, self.episodes.max(1) as i64)
    }
}

pub fn simulate(mdp: &Mdp, sched: &dyn Scheduler, cfg: &SimConfig) -> SimStats {
    simulate_with(mdp, sched, cfg, |_| {})
}

/// Like [`simulate`], handing every finished episode to `observe`.
pub fn simulate_with(mdp: &Mdp, sched: &dyn Scheduler, cfg: &SimConfig, mut observe: impl FnMut(&Episode)) -> SimStats {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let goal = mdp.marked("goal");
    let scale = Q::from_integer(BigInt::from(1u8) << 64);
    let mut st = SimStats {
        episodes: cfg.episodes,
        capped: 0,
        terminated: 0,
        ends: BTreeMap::new(),
        mean_goal_weight: None,
        mean_steps: Q::zero(),
    };
    let (mut goal_n, mut goal_sum, mut steps_sum) = (0i64, Q::zero(), 0usize);
    for _ in 0..cfg.episodes {
        let mut s = mdp.initial();
        let mut w = Q::zero();
        let mut ep = Episode { steps: 0, final_state: s, final_weight: Q::zero(), terminated_at: None, capped: false };
        loop {
            if mdp.is_terminal(s) || mdp.is_absorbing(s) || cfg.stop_states.contains(&s) {
                break;
            }
            if ep.terminated_at.is_some() && cfg.stop_on_termination {
                break;
            }
            if ep.steps >= cfg.step_cap {
                ep.capped = true;
                break;
            }
            let Some(a) = pick(mdp, sched, s, &w) else {
                ep.capped = true;
                break;
            };
            let act = &mdp.actions(s)[a];
            let u = Q::from_integer(BigInt::from(rng.next_u64())) / &scale;
            let mut cum = Q::zero();
            let mut next = act.branches.last().expect("validated action").1;
            for (p, t) in &act.branches {
                cum += p;
                if u < cum {
                    next = *t;
                    break;
                }
            }
            w += &act.weight;
            s = next;
            ep.steps += 1;
            if ep.terminated_at.is_none() && w < Q::zero() {
                ep.terminated_at = Some(ep.steps);
            }
        }
        ep.final_state = s;
        ep.final_weight = w;
        st.capped += ep.capped as u64;
        st.terminated += ep.terminated_at.is_some() as u64;
        *st.ends.entry(s).or_default() += 1;
        if goal.contains(&s) {
            goal_n += 1;
            goal_sum += &ep.final_weight;
        }
        steps_sum += ep.steps;
        observe(&ep);
    }
    if goal_n > 0 {
        st.mean_goal_weight = Some(goal_sum / rat::qi(goal_n));
    }
    st.mean_steps = rat::q(steps_sum as i64, cfg.episodes.max(1) as i64);
    st
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::FnScheduler;
    use crate::rat::qi;

    #[test]
    fn one_step_termination() {
        let mut m = Mdp::new("a");
        m.add_action("a", "down", qi(-1), &[(qi(1), "b")]).unwrap();
        let none = FnScheduler(|_: &Mdp, _, _: &Q| None);
        let st = simulate(&m, &none, &SimConfig::new(100, 1, 10));
        assert_eq!(st.termination_frequency(), qi(1));
        assert_eq!(st.mean_steps, qi(1));
    }

    #[test]
    fn same_seed_same_stats() {
        let mut m = Mdp::new("a");
        m.add_action("a", "flip", qi(1), &[(rat::q(1, 2), "a"), (rat::q(1, 2), "b")]).unwrap();
        let none = FnScheduler(|_: &Mdp, _, _: &Q| None);
        let cfg = SimConfig::new(500, 42, 100);
        assert_eq!(simulate(&m, &none, &cfg), simulate(&m, &none, &cfg));
    }
}
