//! From a recurrence to threshold instances for every supported objective.

use crate::gadgets::{self, GadgetError, Sink, CHOICE, FAIL, GOAL, S, S_INIT, T, TRAP};
use crate::lrs::{Lrs, Normalization, Profile};
use crate::mdp::transform::unary_expand;
use crate::mdp::{Mdp, MdpError, Scheduler, StateId};
use crate::rat::{self, Q};
use crate::threshold::theta::{build_recursion, Kind, Recursion, ThresholdError};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionTarget {
    MaxTermination,
    MinTermination,
    OneCounterMaxTermination,
    OneCounterMinTermination,
    EnergyMax,
    EnergyMin,
    CostMax,
    CostMin,
    MaxTerminationTime,
    MinTerminationTime,
    PartialSsppMax,
    ConditionalSsppMax,
    TwoSidedPartial,
    #[serde(rename = "cvar-max")]
    CVaRMax,
}

impl ReductionTarget {
    pub const ALL: [ReductionTarget; 14] = [
        ReductionTarget::MaxTermination,
        ReductionTarget::MinTermination,
        ReductionTarget::OneCounterMaxTermination,
        ReductionTarget::OneCounterMinTermination,
        ReductionTarget::EnergyMax,
        ReductionTarget::EnergyMin,
        ReductionTarget::CostMax,
        ReductionTarget::CostMin,
        ReductionTarget::MaxTerminationTime,
        ReductionTarget::MinTerminationTime,
        ReductionTarget::PartialSsppMax,
        ReductionTarget::ConditionalSsppMax,
        ReductionTarget::TwoSidedPartial,
        ReductionTarget::CVaRMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionTarget::MaxTermination => "max-termination",
            ReductionTarget::MinTermination => "min-termination",
            ReductionTarget::OneCounterMaxTermination => "one-counter-max-termination",
            ReductionTarget::OneCounterMinTermination => "one-counter-min-termination",
            ReductionTarget::EnergyMax => "energy-max",
            ReductionTarget::EnergyMin => "energy-min",
            ReductionTarget::CostMax => "cost-max",
            ReductionTarget::CostMin => "cost-min",
            ReductionTarget::MaxTerminationTime => "max-termination-time",
            ReductionTarget::MinTerminationTime => "min-termination-time",
            ReductionTarget::PartialSsppMax => "partial-sspp-max",
            ReductionTarget::ConditionalSsppMax => "conditional-sspp-max",
            ReductionTarget::TwoSidedPartial => "two-sided-partial",
            ReductionTarget::CVaRMax => "cvar-max",
        }
    }

    /// The directly constructed objective this target is derived from.
    pub fn kind(self) -> Kind {
        use ReductionTarget::*;
        match self {
            MaxTermination | OneCounterMaxTermination | EnergyMin | CostMax | MinTerminationTime => Kind::TerminationMax,
            MinTermination | OneCounterMinTermination | EnergyMax | CostMin | MaxTerminationTime => Kind::TerminationMin,
            PartialSsppMax | ConditionalSsppMax | TwoSidedPartial => Kind::Partial,
            CVaRMax => Kind::CvarAux,
        }
    }
}

impl FromStr for ReductionTarget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = if s == "cvar" { "cvar-max" } else { s };
        ReductionTarget::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ReductionTarget::ALL.iter().map(|t| t.name()).collect();
            format!("unknown target {s:?}; expected one of {}", names.join(", "))
        })
    }
}

impl std::fmt::Display for ReductionTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    StrictGreater,
    StrictLess,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::StrictGreater => ">",
            Direction::StrictLess => "<",
        }
    }

    /// Whether `value` beats `theta` in this direction.
    pub fn beats(self, value: &Q, theta: &Q) -> bool {
        match self {
            Direction::StrictGreater => value > theta,
            Direction::StrictLess => value < theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub k: usize,
    #[serde(with = "rat::serde_q")]
    pub lambda: Q,
    #[serde(with = "rat::serde_q")]
    pub mu: Q,
    /// False when the input already met the bounds and was used unscaled.
    pub rescaled: bool,
    /// The sequence actually encoded (after rescaling).
    pub lrs: Lrs,
    pub kind: Kind,
    pub objective: String,
    pub d_offset: i64,
    pub ports: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionOutput {
    pub target: ReductionTarget,
    pub direction: Direction,
    #[serde(with = "rat::serde_q")]
    pub theta: Q,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rat::serde_q_opt")]
    pub cvar_p: Option<Q>,
    pub mdp: Mdp,
    pub meta: Meta,
}

impl ReductionOutput {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn extra(&self, key: &str) -> Option<Q> {
        self.meta.extra.get(key).and_then(|s| rat::parse(s).ok())
    }
}

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("trivially negative at n={index}: u_{index} = {value} < 0")]
    TriviallyNegative { index: usize, value: String },
    #[error("bounds not met after rescaling: {0}")]
    Assumption(String),
    #[error("{target} expects a {expected} instance")]
    WrongTarget { target: ReductionTarget, expected: &'static str },
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizeMode {
    /// Rescale only when the input misses the bounds.
    #[default]
    Auto,
    Always,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceOptions {
    pub normalize: NormalizeMode,
    /// Realize the steep ⨁min entry as one step instead of +2k then −2k+i.
    pub cvar_collapsed: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { normalize: NormalizeMode::Auto, cvar_collapsed: true }
    }
}

pub fn normalization_for(lrs: &Lrs, mode: NormalizeMode) -> Normalization {
    match mode {
        NormalizeMode::Auto if lrs.check_assumption(Profile::General).is_empty() => Normalization::identity(lrs),
        _ => lrs.normalize(),
    }
}

/// A directly constructed instance: its MDP, recursion data and threshold.
#[derive(Debug, Clone)]
pub struct Direct {
    pub mdp: Mdp,
    pub recursion: Recursion,
    pub theta: Q,
    pub norm: Normalization,
    pub two_sided: bool,
}

pub fn build_direct(lrs: &Lrs, kind: Kind, two_sided: bool, opts: &ReduceOptions) -> Result<Direct, ReduceError> {
    if let Some(i) = lrs.first_negative_initial() {
        return Err(ReduceError::TriviallyNegative { index: i, value: rat::fmt(&lrs.initials()[i]) });
    }
    let norm = normalization_for(lrs, opts.normalize);
    let profile = if kind == Kind::CvarAux { Profile::Cvar } else { Profile::General };
    let v = norm.normalized.check_assumption(profile);
    if !v.is_empty() && !(kind != Kind::CvarAux && norm.degenerate) {
        let msg: Vec<String> = v.iter().map(|v| v.to_string()).collect();
        return Err(ReduceError::Assumption(msg.join("; ")));
    }
    let alphas = norm.normalized.coefficients();
    let betas = norm.normalized.initials();
    let alpha = rat::sum_abs(alphas);
    let init = gadgets::build_initial();
    let mdp = match kind {
        Kind::TerminationMax => {
            let rec = gadgets::build_recurrence(alphas, Sink::Trap)?;
            gadgets::assemble(&[&init, &rec, &gadgets::build_termination_init_values(betas)?])?
        }
        Kind::TerminationMin => {
            let rec = gadgets::build_recurrence(alphas, Sink::Relay(gadgets::TRAP_RELAY.into()))?;
            gadgets::assemble(&[&init, &rec, &gadgets::build_min_termination_init_values(betas)?])?
        }
        Kind::Partial => {
            let rec = gadgets::build_recurrence(alphas, Sink::Goal)?;
            let vals = if two_sided {
                gadgets::build_two_sided_init_values(betas, &alpha)?
            } else {
                gadgets::build_partial_init_values(betas)?
            };
            gadgets::assemble(&[&init, &rec, &vals])?
        }
        Kind::CvarAux => {
            let rec = gadgets::build_recurrence(alphas, Sink::Goal)?;
            gadgets::assemble(&[&init, &rec, &gadgets::build_cvar_init_values(betas, &alpha, opts.cvar_collapsed)?])?
        }
    };
    let recursion = build_recursion(kind, alphas, betas)?;
    let theta = recursion.theta()?;
    Ok(Direct { mdp, recursion, theta, norm, two_sided })
}

fn objective(kind: Kind) -> &'static str {
    match kind {
        Kind::TerminationMax | Kind::TerminationMin => "Pr(accumulated weight < 0 at some point)",
        Kind::Partial => "PE(⨁goal)",
        Kind::CvarAux => "E(min(⨁goal, 0))",
    }
}

fn ports(kind: Kind) -> BTreeMap<String, String> {
    let sink = match kind {
        Kind::TerminationMax | Kind::TerminationMin => TRAP,
        _ => GOAL,
    };
    [("s_init", S_INIT), ("choice", CHOICE), ("t", T), ("s", S), ("sink", sink)]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn output(target: ReductionTarget, direction: Direction, d: Direct) -> ReductionOutput {
    let kind = d.recursion.kind;
    let k = d.recursion.k;
    let meta = Meta {
        k,
        lambda: d.norm.lambda.clone(),
        mu: d.norm.mu.clone(),
        rescaled: !(d.norm.lambda.is_one() && d.norm.mu.is_one()),
        lrs: d.norm.normalized.clone(),
        kind,
        objective: objective(kind).to_string(),
        d_offset: kind.base_lo(k),
        ports: ports(kind),
        extra: BTreeMap::new(),
    };
    ReductionOutput { target, direction, theta: d.theta, cvar_p: None, mdp: d.mdp, meta }
}

pub fn reduce(lrs: &Lrs, target: ReductionTarget) -> Result<ReductionOutput, ReduceError> {
    reduce_with(lrs, target, &ReduceOptions::default())
}

pub fn reduce_with(lrs: &Lrs, target: ReductionTarget, opts: &ReduceOptions) -> Result<ReductionOutput, ReduceError> {
    use ReductionTarget::*;
    let direct = |kind: Kind| build_direct(lrs, kind, false, opts);
    match target {
        MaxTermination => Ok(output(target, Direction::StrictGreater, direct(Kind::TerminationMax)?)),
        MinTermination => Ok(output(target, Direction::StrictLess, direct(Kind::TerminationMin)?)),
        OneCounterMaxTermination => derive_one_counter(&reduce_with(lrs, MaxTermination, opts)?),
        OneCounterMinTermination => derive_one_counter(&reduce_with(lrs, MinTermination, opts)?),
        EnergyMax => derive_energy(&reduce_with(lrs, MinTermination, opts)?),
        EnergyMin => derive_energy(&reduce_with(lrs, MaxTermination, opts)?),
        CostMax => derive_cost(&reduce_with(lrs, MaxTermination, opts)?),
        CostMin => derive_cost(&reduce_with(lrs, MinTermination, opts)?),
        MaxTerminationTime => derive_time(lrs, true, opts),
        MinTerminationTime => derive_time(lrs, false, opts),
        PartialSsppMax => Ok(output(target, Direction::StrictGreater, direct(Kind::Partial)?)),
        ConditionalSsppMax => wrap_conditional(&reduce_with(lrs, PartialSsppMax, opts)?),
        TwoSidedPartial => wrap_two_sided(lrs, opts),
        CVaRMax => wrap_cvar(lrs, opts),
    }
}

/// Copy of `mdp` with a fresh initial state `start` and states renamed by `rename`.
fn rebuild(mdp: &Mdp, start: &str, rename: impl Fn(&str) -> String) -> Result<Mdp, MdpError> {
    let mut out = Mdp::new(start);
    for n in mdp.names() {
        out.state(&rename(n));
    }
    for s in 0..mdp.num_states() {
        for a in mdp.actions(s) {
            let br: Vec<(Q, String)> = a.branches.iter().map(|(p, t)| (p.clone(), rename(mdp.name(*t)))).collect();
            let br: Vec<(Q, &str)> = br.iter().map(|(p, n)| (p.clone(), n.as_str())).collect();
            out.add_action(&rename(mdp.name(s)), &a.name, a.weight.clone(), &br)?;
        }
    }
    for (m, set) in mdp.marks() {
        for &s in set {
            out.mark(m, &rename(mdp.name(s)));
        }
    }
    Ok(out)
}

pub const S_INIT_WRAP: &str = "s_init'";
pub const GOAL_RELAY: &str = "goal'";

/// Conditional-expectation wrapper: a fresh start that goes to `goal` or the
/// old start with probability 1/2 each; the old goal pays ϑ before reaching
/// the new goal.
pub fn wrap_conditional(out: &ReductionOutput) -> Result<ReductionOutput, ReduceError> {
    if out.target != ReductionTarget::PartialSsppMax {
        return Err(ReduceError::WrongTarget { target: ReductionTarget::ConditionalSsppMax, expected: "partial-sspp-max" });
    }
    let mut m = rebuild(&out.mdp, S_INIT_WRAP, |n| if n == GOAL { GOAL_RELAY.to_string() } else { n.to_string() })?;
    m.clear_mark("goal");
    let h = rat::q(1, 2);
    m.add_action(S_INIT_WRAP, "start", Q::zero(), &[(h.clone(), S_INIT), (h, GOAL)])?;
    m.add_action(GOAL_RELAY, "bonus", out.theta.clone(), &[(Q::one(), GOAL)])?;
    m.mark("goal", GOAL);
    let mut meta = out.meta.clone();
    meta.objective = "CE(⨁goal | ◊goal)".into();
    meta.ports.insert("s_init".into(), S_INIT_WRAP.into());
    Ok(ReductionOutput {
        target: ReductionTarget::ConditionalSsppMax,
        direction: Direction::StrictGreater,
        theta: out.theta.clone(),
        cvar_p: None,
        mdp: m,
        meta,
    })
}

/// Two-sided variant: the partial instance with scheduler-independent step
/// count T = 2 + 2/(1−α), goal weights shifted by +k and fail weight +k per step.
pub fn wrap_two_sided(lrs: &Lrs, opts: &ReduceOptions) -> Result<ReductionOutput, ReduceError> {
    let d = build_direct(lrs, Kind::Partial, true, opts)?;
    let k = d.recursion.k;
    let kq = rat::qi(k as i64);
    let alpha = d.norm.normalized.alpha_sum();
    let t_steps = rat::qi(2) + rat::qi(2) / (Q::one() - &alpha);
    let base_theta = d.theta.clone();
    let mut out = output(ReductionTarget::TwoSidedPartial, Direction::StrictGreater, d);
    let mut m = Mdp::new(out.mdp.name(out.mdp.initial()));
    for s in 0..out.mdp.num_states() {
        for a in out.mdp.actions(s) {
            let br: Vec<(Q, &str)> = a.branches.iter().map(|(p, t)| (p.clone(), out.mdp.name(*t))).collect();
            m.add_action(out.mdp.name(s), &a.name, &a.weight + &kq, &br)?;
        }
    }
    for (mk, set) in out.mdp.marks() {
        for &s in set {
            m.mark(mk, out.mdp.name(s));
        }
    }
    out.mdp = m;
    out.theta = &base_theta + &kq * &t_steps;
    out.meta.objective = "E(X): ⨁(wgt+k) on goal paths, k per step on fail paths".into();
    out.meta.extra.insert("theta_partial".into(), rat::fmt(&base_theta));
    out.meta.extra.insert("expected_steps".into(), rat::fmt(&t_steps));
    out.meta.extra.insert("fail_weight_per_step".into(), k.to_string());
    out.meta.extra.insert("alpha_sum".into(), rat::fmt(&alpha));
    Ok(out)
}

/// CVaR wrapper: a fresh start moving to the ⨁min instance with probability
/// 1/3 and straight to `goal` with 2/3. Then VaR_{1/2} = 0 and
/// CVaR_{1/2} = (2/3)·E(min(⨁goal, 0)) under every scheduler.
pub fn wrap_cvar(lrs: &Lrs, opts: &ReduceOptions) -> Result<ReductionOutput, ReduceError> {
    let d = build_direct(lrs, Kind::CvarAux, false, opts)?;
    let aux = d.theta.clone();
    let mut out = output(ReductionTarget::CVaRMax, Direction::StrictGreater, d);
    let mut m = rebuild(&out.mdp, S_INIT_WRAP, |n| n.to_string())?;
    m.add_action(S_INIT_WRAP, "start", Q::zero(), &[(rat::q(1, 3), S_INIT), (rat::q(2, 3), GOAL)])?;
    out.mdp = m;
    out.theta = rat::q(2, 3) * &aux;
    out.cvar_p = Some(rat::q(1, 2));
    out.meta.objective = "CVaR_p(⨁goal)".into();
    out.meta.ports.insert("s_init".into(), S_INIT_WRAP.into());
    out.meta.extra.insert("theta_aux".into(), rat::fmt(&aux));
    Ok(out)
}

fn expect_termination(out: &ReductionOutput, target: ReductionTarget) -> Result<(), ReduceError> {
    match out.target {
        ReductionTarget::MaxTermination | ReductionTarget::MinTermination => Ok(()),
        _ => Err(ReduceError::WrongTarget { target, expected: "max- or min-termination" }),
    }
}

/// Energy objectives are complements of termination.
pub fn derive_energy(out: &ReductionOutput) -> Result<ReductionOutput, ReduceError> {
    expect_termination(out, ReductionTarget::EnergyMax)?;
    let (target, direction) = if out.target == ReductionTarget::MinTermination {
        (ReductionTarget::EnergyMax, Direction::StrictGreater)
    } else {
        (ReductionTarget::EnergyMin, Direction::StrictLess)
    };
    let mut o = out.clone();
    o.target = target;
    o.direction = direction;
    o.theta = Q::one() - &out.theta;
    o.meta.objective = "Pr(accumulated weight >= 0 forever)".into();
    Ok(o)
}

/// Cost problems: `Goal := {trap}` and the event ⨁Goal < 0.
pub fn derive_cost(out: &ReductionOutput) -> Result<ReductionOutput, ReduceError> {
    expect_termination(out, ReductionTarget::CostMax)?;
    let mut o = out.clone();
    o.target = if out.target == ReductionTarget::MaxTermination { ReductionTarget::CostMax } else { ReductionTarget::CostMin };
    o.mdp.clear_mark("goal");
    o.mdp.mark("goal", TRAP);
    o.meta.objective = "Pr(⨁goal < 0)".into();
    Ok(o)
}

/// Expected termination time 8 + 3p, so ϑ_time = 11 − 3ϑ.
/// `maximize` builds on the min-termination instance, otherwise on max-termination.
pub fn derive_time(lrs: &Lrs, maximize: bool, opts: &ReduceOptions) -> Result<ReductionOutput, ReduceError> {
    let (kind, target, direction) = if maximize {
        (Kind::TerminationMin, ReductionTarget::MaxTerminationTime, Direction::StrictGreater)
    } else {
        (Kind::TerminationMax, ReductionTarget::MinTerminationTime, Direction::StrictLess)
    };
    let d = build_direct(lrs, kind, false, opts)?;
    let term_theta = d.theta.clone();
    let mut out = output(target, direction, d);
    out.mdp = gadgets::build_time_variant(&out.mdp)?;
    out.theta = rat::qi(11) - rat::qi(3) * &term_theta;
    out.meta.objective = "E(steps until accumulated weight < 0)".into();
    out.meta.ports.remove("choice");
    out.meta.extra.insert("theta_termination".into(), rat::fmt(&term_theta));
    Ok(out)
}

/// Unary expansion: all weights in {−1, 0, +1}, threshold unchanged.
pub fn derive_one_counter(out: &ReductionOutput) -> Result<ReductionOutput, ReduceError> {
    expect_termination(out, ReductionTarget::OneCounterMaxTermination)?;
    let mut o = out.clone();
    o.target = if out.target == ReductionTarget::MaxTermination {
        ReductionTarget::OneCounterMaxTermination
    } else {
        ReductionTarget::OneCounterMinTermination
    };
    o.mdp = unary_expand(&out.mdp)?;
    Ok(o)
}

/// The scheduler whose value is ϑ: `tau` at the choice, `gamma_j`/`delta_j`
/// on the base window, `gamma`/`delta` elsewhere.
#[derive(Debug, Clone, Copy)]
pub struct Prescribed {
    pub kind: Kind,
    pub k: usize,
}

impl Prescribed {
    pub fn for_output(out: &ReductionOutput) -> Self {
        Prescribed { kind: out.meta.kind, k: out.meta.k }
    }

    /// Action name at an anchor (`t` or `s`) with integer weight `w`.
    pub fn anchor_action(&self, at_t: bool, w: i64) -> String {
        let lo = self.kind.base_lo(self.k);
        let idx = w - lo;
        match (at_t, (0..self.k as i64).contains(&idx)) {
            (true, true) => gadgets::gamma(idx as usize),
            (false, true) => gadgets::delta(idx as usize),
            (true, false) => "gamma".into(),
            (false, false) => "delta".into(),
        }
    }
}

impl Scheduler for Prescribed {
    fn choose(&self, mdp: &Mdp, s: StateId, w: &Q) -> Option<usize> {
        let name = mdp.name(s);
        let act = match name {
            CHOICE | S_INIT => "tau".to_string(),
            T | S => self.anchor_action(name == T, rat::to_i64(w)?),
            _ => return None,
        };
        mdp.action_index(s, &act)
    }
}

/// All weights nonnegative (two-sided instances) and goal/fail marks present.
pub fn two_sided_weights_ok(out: &ReductionOutput) -> bool {
    out.mdp.weights().all(|w| !w.is_negative()) && !out.mdp.marked("goal").is_empty() && out.mdp.id(FAIL).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    fn neg() -> Lrs {
        Lrs::from_pairs(&[(1, 32), (-1, 32)], &[(1, 512), (1, 1024)]).unwrap()
    }

    #[test]
    fn every_target_builds_valid_mdp() {
        for t in ReductionTarget::ALL {
            let o = reduce(&neg(), t).unwrap_or_else(|e| panic!("{t}: {e}"));
            assert!(o.mdp.validate().is_empty(), "{t}: {:?}", o.mdp.validate());
            assert_eq!(o.target, t);
            assert_eq!(t.name().parse::<ReductionTarget>().unwrap(), t);
        }
    }

    #[test]
    fn negative_initial_is_trivial() {
        let l = Lrs::from_pairs(&[(1, 32), (-1, 32)], &[(-1, 1), (0, 1)]).unwrap();
        let e = reduce(&l, ReductionTarget::MaxTermination).unwrap_err();
        assert_eq!(e.to_string(), "trivially negative at n=0: u_0 = -1 < 0");
    }

    #[test]
    fn derived_thresholds() {
        let min = reduce(&neg(), ReductionTarget::MinTermination).unwrap();
        let en = derive_energy(&min).unwrap();
        assert_eq!(en.theta, Q::one() - &min.theta);
        assert_eq!(en.direction, Direction::StrictGreater);
        let time = reduce(&neg(), ReductionTarget::MaxTerminationTime).unwrap();
        assert_eq!(time.theta, rat::qi(11) - rat::qi(3) * &min.theta);
        let cv = reduce(&neg(), ReductionTarget::CVaRMax).unwrap();
        assert_eq!(cv.cvar_p, Some(q(1, 2)));
        assert_eq!(cv.theta, q(2, 3) * cv.extra("theta_aux").unwrap());
        assert!(derive_cost(&cv).is_err());
        let p = reduce(&neg(), ReductionTarget::PartialSsppMax).unwrap();
        assert_eq!(p.meta.d_offset, -1);
        let ts = reduce(&neg(), ReductionTarget::TwoSidedPartial).unwrap();
        assert!(two_sided_weights_ok(&ts));
        assert_eq!(ts.extra("expected_steps").unwrap(), q(62, 15));
    }

    #[test]
    fn output_round_trip_and_determinism() {
        for t in ReductionTarget::ALL {
            let a = reduce(&neg(), t).unwrap().to_json();
            let b = reduce(&neg(), t).unwrap().to_json();
            assert_eq!(a, b);
            let back: ReductionOutput = serde_json::from_str(&a).unwrap();
            assert_eq!(back.to_json(), a);
        }
    }
}
