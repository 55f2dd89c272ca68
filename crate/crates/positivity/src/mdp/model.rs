use crate::rat::{self, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

pub type StateId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdpError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("state {state:?} already has an action named {action:?}")]
    DuplicateAction { state: String, action: String },
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("{0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub weight: Q,
    pub branches: Vec<(Q, StateId)>,
}

/// A weighted MDP. States without actions are terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdp {
    names: Vec<String>,
    index: HashMap<String, StateId>,
    actions: Vec<Vec<Action>>,
    initial: StateId,
    marks: BTreeMap<String, BTreeSet<StateId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl Mdp {
    pub fn new(initial: &str) -> Self {
        let mut m = Mdp {
            names: Vec::new(),
            index: HashMap::new(),
            actions: Vec::new(),
            initial: 0,
            marks: BTreeMap::new(),
        };
        m.initial = m.state(initial);
        m
    }

    /// Id of `name`, creating the state if needed.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.actions.push(Vec::new());
        i
    }

    pub fn id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn expect_id(&self, name: &str) -> Result<StateId, MdpError> {
        self.id(name).ok_or_else(|| MdpError::UnknownState(name.to_string()))
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn set_initial(&mut self, name: &str) {
        self.initial = self.state(name);
    }

    pub fn actions(&self, s: StateId) -> &[Action] {
        &self.actions[s]
    }

    pub fn action_index(&self, s: StateId, name: &str) -> Option<usize> {
        self.actions[s].iter().position(|a| a.name == name)
    }

    pub fn add_action(&mut self, from: &str, name: &str, weight: Q, branches: &[(Q, &str)]) -> Result<(), MdpError> {
        let f = self.state(from);
        if self.action_index(f, name).is_some() {
            return Err(MdpError::DuplicateAction { state: from.to_string(), action: name.to_string() });
        }
        let branches = branches.iter().map(|(p, to)| (p.clone(), self.state(to))).collect();
        self.actions[f].push(Action { name: name.to_string(), weight, branches });
        Ok(())
    }

    /// Self-loop with probability 1 and weight 0.
    pub fn add_absorbing(&mut self, name: &str) -> Result<(), MdpError> {
        self.add_action(name, "stay", Q::zero(), &[(Q::one(), name)])
    }

    pub fn mark(&mut self, mark: &str, name: &str) {
        let s = self.state(name);
        self.marks.entry(mark.to_string()).or_default().insert(s);
    }

    pub fn clear_mark(&mut self, mark: &str) {
        self.marks.remove(mark);
    }

    pub fn marked(&self, mark: &str) -> BTreeSet<StateId> {
        self.marks.get(mark).cloned().unwrap_or_default()
    }

    pub fn marks(&self) -> &BTreeMap<String, BTreeSet<StateId>> {
        &self.marks
    }

    pub fn is_terminal(&self, s: StateId) -> bool {
        self.actions[s].is_empty()
    }

    /// Single weight-0 self-loop.
    pub fn is_absorbing(&self, s: StateId) -> bool {
        matches!(self.actions[s].as_slice(), [a] if a.weight.is_zero() && a.branches.len() == 1 && a.branches[0].1 == s)
    }

    pub fn weights(&self) -> impl Iterator<Item = &Q> {
        self.actions.iter().flatten().map(|a| &a.weight)
    }

    pub fn has_integer_weights(&self) -> bool {
        self.weights().all(|w| w.is_integer())
    }

    pub fn num_transitions(&self) -> usize {
        self.actions.iter().map(|a| a.len()).sum()
    }

    /// Adds all states, actions and marks of `other`, matching states by name.
    pub fn merge(&mut self, other: &Mdp) -> Result<(), MdpError> {
        for s in 0..other.num_states() {
            let from = other.name(s).to_string();
            self.state(&from);
            for a in other.actions(s) {
                let br: Vec<(Q, &str)> = a.branches.iter().map(|(p, t)| (p.clone(), other.name(*t))).collect();
                self.add_action(&from, &a.name, a.weight.clone(), &br)?;
            }
        }
        for (m, set) in &other.marks {
            for &s in set {
                self.mark(m, other.name(s));
            }
        }
        Ok(())
    }

    pub fn reachable(&self) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for a in &self.actions[s] {
                for &(_, t) in &a.branches {
                    if seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
        }
        seen
    }

    /// Structural problems: bad probabilities, unreachable states. Empty iff valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (s, acts) in self.actions.iter().enumerate() {
            for a in acts {
                let loc = format!("{}/{}", self.names[s], a.name);
                if a.branches.is_empty() {
                    out.push(Violation { location: loc.clone(), message: "no branches".into() });
                }
                let mut sum = Q::zero();
                for (p, t) in &a.branches {
                    if !p.is_positive() || p > &Q::one() {
                        out.push(Violation {
                            location: loc.clone(),
                            message: format!("probability {} to {} outside (0,1]", rat::fmt(p), self.names[*t]),
                        });
                    }
                    sum += p;
                }
                if !sum.is_one() {
                    out.push(Violation { location: loc, message: format!("sum = {} ≠ 1", rat::fmt(&sum)) });
                }
            }
        }
        let r = self.reachable();
        for s in 0..self.num_states() {
            if !r.contains(&s) {
                out.push(Violation { location: self.names[s].clone(), message: "unreachable from initial".into() });
            }
        }
        out
    }
}

// JSON form

#[derive(Serialize, Deserialize)]
pub(crate) struct BranchWire {
    #[serde(with = "rat::serde_q")]
    prob: Q,
    to: String,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct TransitionWire {
    from: String,
    action: String,
    #[serde(with = "rat::serde_q")]
    weight: Q,
    branches: Vec<BranchWire>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MdpWire {
    states: Vec<String>,
    initial: String,
    marks: BTreeMap<String, Vec<String>>,
    transitions: Vec<TransitionWire>,
}

impl From<&Mdp> for MdpWire {
    fn from(m: &Mdp) -> Self {
        let mut transitions = Vec::new();
        for s in 0..m.num_states() {
            for a in m.actions(s) {
                transitions.push(TransitionWire {
                    from: m.name(s).to_string(),
                    action: a.name.clone(),
                    weight: a.weight.clone(),
                    branches: a.branches.iter().map(|(p, t)| BranchWire { prob: p.clone(), to: m.name(*t).to_string() }).collect(),
                });
            }
        }
        MdpWire {
            states: m.names.clone(),
            initial: m.name(m.initial).to_string(),
            marks: m.marks.iter().map(|(k, v)| (k.clone(), v.iter().map(|&s| m.name(s).to_string()).collect())).collect(),
            transitions,
        }
    }
}

impl TryFrom<MdpWire> for Mdp {
    type Error = MdpError;
    fn try_from(w: MdpWire) -> Result<Self, MdpError> {
        let mut m = Mdp { names: Vec::new(), index: HashMap::new(), actions: Vec::new(), initial: 0, marks: BTreeMap::new() };
        for s in &w.states {
            if m.id(s).is_some() {
                return Err(MdpError::DuplicateState(s.clone()));
            }
            m.state(s);
        }
        let known = |m: &Mdp, s: &str| m.expect_id(s).map(|_| ());
        known(&m, &w.initial)?;
        m.initial = m.state(&w.initial);
        for t in &w.transitions {
            known(&m, &t.from)?;
            for b in &t.branches {
                known(&m, &b.to)?;
            }
            let br: Vec<(Q, &str)> = t.branches.iter().map(|b| (b.prob.clone(), b.to.as_str())).collect();
            m.add_action(&t.from, &t.action, t.weight.clone(), &br)?;
        }
        for (k, v) in &w.marks {
            for s in v {
                known(&m, s)?;
                m.mark(k, s);
            }
            // keep empty marks distinguishable from absent ones
            m.marks.entry(k.clone()).or_default();
        }
        Ok(m)
    }
}

impl Serialize for Mdp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MdpWire::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mdp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = MdpWire::deserialize(d)?;
        Mdp::try_from(w).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn absorbing_state_is_valid() {
        let mut m = Mdp::new("a");
        m.add_absorbing("a").unwrap();
        assert!(m.validate().is_empty());
        assert!(m.is_absorbing(0));
    }

    #[test]
    fn bad_sum_is_reported() {
        let mut m = Mdp::new("a");
        m.add_action("a", "go", Q::zero(), &[(q(1, 2), "b"), (q(1, 3), "c")]).unwrap();
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "sum = 5/6 ≠ 1");
        assert_eq!(v[0].location, "a/go");
    }

    #[test]
    fn unreachable_and_duplicate() {
        let mut m = Mdp::new("a");
        m.state("lost");
        assert_eq!(m.validate()[0].location, "lost");
        m.add_absorbing("a").unwrap();
        assert!(m.add_absorbing("a").is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut m = Mdp::new("a");
        m.add_action("a", "go", q(-3, 2), &[(q(1, 2), "a"), (q(1, 2), "b")]).unwrap();
        m.mark("goal", "b");
        let s = serde_json::to_string(&m).unwrap();
        let back: Mdp = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn json_rejects_unknown_successor() {
        let s = r#"{"states":["a"],"initial":"a","marks":{},"transitions":[{"from":"a","action":"x","weight":"0","branches":[{"prob":"1","to":"zz"}]}]}"#;
        assert!(serde_json::from_str::<Mdp>(s).is_err());
    }
}
