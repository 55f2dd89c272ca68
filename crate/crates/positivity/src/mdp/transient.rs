//! Exact finite-horizon distribution of a weighted MDP under a fixed scheduler.

use super::sched::pick;
use super::{Mdp, Scheduler, StateId};
use crate::rat::{self, Q};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("scheduler undefined at {state} with weight {weight}")]
pub struct SchedulerUndefined {
    pub state: String,
    pub weight: String,
}

#[derive(Debug, Clone)]
pub struct TransientConfig {
    pub step_budget: usize,
    /// Extra states at which mass is absorbed (terminal and absorbing states always are).
    pub stop_states: BTreeSet<StateId>,
    /// Absorb as soon as the accumulated weight drops below this value.
    pub stop_below: Option<Q>,
    /// Stop early once the unabsorbed mass is at most this.
    pub tail_target: Option<Q>,
}

impl TransientConfig {
    pub fn budget(step_budget: usize) -> Self {
        TransientConfig { step_budget, stop_states: BTreeSet::new(), stop_below: None, tail_target: None }
    }

    pub fn stop_below(mut self, w: Q) -> Self {
        self.stop_below = Some(w);
        self
    }

    pub fn tail_target(mut self, t: Q) -> Self {
        self.tail_target = Some(t);
        self
    }

    pub fn stop_at(mut self, states: impl IntoIterator<Item = StateId>) -> Self {
        self.stop_states.extend(states);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub mass: Q,
    /// Σ mass·steps over the paths absorbed here.
    pub step_mass: Q,
}

#[derive(Debug, Clone)]
pub struct TransientResult {
    pub outcomes: BTreeMap<(StateId, Q), Outcome>,
    pub tail: Q,
    pub steps: usize,
}

impl TransientResult {
    pub fn mass_where(&self, f: impl Fn(StateId, &Q) -> bool) -> Q {
        self.outcomes.iter().filter(|((s, w), _)| f(*s, w)).fold(Q::zero(), |a, (_, o)| a + &o.mass)
    }

    /// Σ mass·f(state, weight).
    pub fn expect(&self, f: impl Fn(StateId, &Q) -> Q) -> Q {
        self.outcomes.iter().fold(Q::zero(), |a, ((s, w), o)| a + &o.mass * f(*s, w))
    }

    pub fn step_mass_where(&self, f: impl Fn(StateId, &Q) -> bool) -> Q {
        self.outcomes.iter().filter(|((s, w), _)| f(*s, w)).fold(Q::zero(), |a, (_, o)| a + &o.step_mass)
    }

    pub fn absorbed(&self) -> Q {
        self.mass_where(|_, _| true)
    }
}

pub fn transient_distribution(
    mdp: &Mdp,
    sched: &dyn Scheduler,
    cfg: &TransientConfig,
) -> Result<TransientResult, SchedulerUndefined> {
    let stops = |s: StateId, w: &Q| {
        cfg.stop_below.as_ref().is_some_and(|b| w < b)
            || mdp.is_terminal(s)
            || mdp.is_absorbing(s)
            || cfg.stop_states.contains(&s)
    };
    let mut outcomes: BTreeMap<(StateId, Q), Outcome> = BTreeMap::new();
    let mut frontier: BTreeMap<(StateId, Q), Q> = BTreeMap::new();
    let start = (mdp.initial(), Q::zero());
    if stops(start.0, &start.1) {
        outcomes.insert(start, Outcome { mass: Q::one(), step_mass: Q::zero() });
    } else {
        frontier.insert(start, Q::one());
    }
    let mut tail = Q::one() - outcomes.values().fold(Q::zero(), |a, o| a + &o.mass);
    let mut steps = 0;
    while !frontier.is_empty() && steps < cfg.step_budget {
        if cfg.tail_target.as_ref().is_some_and(|t| &tail <= t) {
            break;
        }
        steps += 1;
        let n = rat::qi(steps as i64);
        let mut next: BTreeMap<(StateId, Q), Q> = BTreeMap::new();
        for ((s, w), m) in frontier {
            let a = pick(mdp, sched, s, &w).ok_or_else(|| SchedulerUndefined {
                state: mdp.name(s).to_string(),
                weight: rat::fmt(&w),
            })?;
            let act = &mdp.actions(s)[a];
            let w2 = &w + &act.weight;
            for (p, t) in &act.branches {
                let pm = &m * p;
                if stops(*t, &w2) {
                    tail -= &pm;
                    let o = outcomes.entry((*t, w2.clone())).or_default();
                    o.step_mass += &pm * &n;
                    o.mass += pm;
                } else {
                    *next.entry((*t, w2.clone())).or_insert_with(Q::zero) += pm;
                }
            }
        }
        frontier = next;
    }
    Ok(TransientResult { outcomes, tail, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::FnScheduler;
    use crate::rat::{q, qi};

    fn geometric() -> Mdp {
        let mut m = Mdp::new("s_init");
        m.add_action("s_init", "step", qi(1), &[(q(1, 2), "s_init"), (q(1, 2), "choice")]).unwrap();
        m
    }

    #[test]
    fn absorbing_initial() {
        let mut m = Mdp::new("a");
        m.add_absorbing("a").unwrap();
        let none = FnScheduler(|_: &Mdp, _, _: &Q| None);
        let r = transient_distribution(&m, &none, &TransientConfig::budget(5)).unwrap();
        assert_eq!(r.outcomes[&(0, Q::zero())].mass, qi(1));
        assert_eq!(r.tail, Q::zero());
    }

    #[test]
    fn geometric_loop_budget_three() {
        let m = geometric();
        let none = FnScheduler(|_: &Mdp, _, _: &Q| None);
        let r = transient_distribution(&m, &none, &TransientConfig::budget(3)).unwrap();
        let c = m.id("choice").unwrap();
        assert_eq!(r.outcomes[&(c, qi(1))].mass, q(1, 2));
        assert_eq!(r.outcomes[&(c, qi(2))].mass, q(1, 4));
        assert_eq!(r.outcomes[&(c, qi(3))].mass, q(1, 8));
        assert_eq!(r.tail, q(1, 8));
        assert_eq!(r.absorbed() + &r.tail, qi(1));
        assert_eq!(r.outcomes[&(c, qi(3))].step_mass, q(3, 8));
    }

    #[test]
    fn undefined_scheduler_is_an_error() {
        let mut m = Mdp::new("c");
        m.add_action("c", "a", qi(0), &[(qi(1), "x")]).unwrap();
        m.add_action("c", "b", qi(0), &[(qi(1), "y")]).unwrap();
        let none = FnScheduler(|_: &Mdp, _, _: &Q| None);
        assert!(transient_distribution(&m, &none, &TransientConfig::budget(2)).is_err());
    }
}
