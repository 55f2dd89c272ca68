//! MDP fragments for the reductions and the gluing that assembles them.
//!
//! State names are fixed: `s_init`, `choice`, `t`, `s`, `t{i}`/`s{i}` for the
//! recurrence gadget, `x{j}`/`y{j}` (plus helpers) for the initial-value
//! gadgets, and the sinks `trap`, `trap'`, `goal`, `fail`.

use crate::mdp::{Mdp, MdpError};
use crate::rat::{self, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const S_INIT: &str = "s_init";
pub const CHOICE: &str = "choice";
pub const T: &str = "t";
pub const S: &str = "s";
pub const TRAP: &str = "trap";
pub const TRAP_RELAY: &str = "trap'";
pub const GOAL: &str = "goal";
pub const FAIL: &str = "fail";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("coefficient mass {0} must be below 1")]
    AlphaTooLarge(String),
    #[error("initial value {index} = {value} violates {bound}")]
    BetaBound { index: usize, value: String, bound: String },
    #[error("state {0:?} appears in two gadgets but is not a port of both")]
    NameCollision(String),
    #[error("assembled mdp is invalid: {0}")]
    Invalid(String),
    #[error("unexpected shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

/// An MDP fragment with named port states used for gluing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    #[serde(flatten)]
    pub fragment: Mdp,
    pub ports: BTreeSet<String>,
}

impl Gadget {
    fn new(first: &str, ports: &[&str]) -> Self {
        Gadget { fragment: Mdp::new(first), ports: ports.iter().map(|s| s.to_string()).collect() }
    }
}

/// What the probability mass not spent on the recurrence goes to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sink {
    /// Absorbing `trap`.
    Trap,
    /// Terminal `goal`, marked `goal`.
    Goal,
    /// A state whose actions another gadget supplies.
    Relay(String),
}

impl Sink {
    pub fn name(&self) -> &str {
        match self {
            Sink::Trap => TRAP,
            Sink::Goal => GOAL,
            Sink::Relay(n) => n,
        }
    }
}

pub fn xi(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}

pub fn gamma(j: usize) -> String {
    format!("gamma_{j}")
}

pub fn delta(j: usize) -> String {
    format!("delta_{j}")
}

/// `s_init` adds +1 per step and moves on to `choice` with probability 1/2;
/// `choice` picks `t` (tau) or `s` (sigma).
pub fn build_initial() -> Gadget {
    let mut g = Gadget::new(S_INIT, &[S_INIT, CHOICE, T, S]);
    let h = rat::q(1, 2);
    let m = &mut g.fragment;
    m.add_action(S_INIT, "step", Q::one(), &[(h.clone(), S_INIT), (h, CHOICE)]).expect("fresh");
    m.add_action(CHOICE, "tau", Q::zero(), &[(Q::one(), T)]).expect("fresh");
    m.add_action(CHOICE, "sigma", Q::zero(), &[(Q::one(), S)]).expect("fresh");
    g
}

/// Actions `gamma` at `t` and `delta` at `s` realising the recurrence step.
pub fn build_recurrence(alphas: &[Q], sink: Sink) -> Result<Gadget, GadgetError> {
    let a = rat::sum_abs(alphas);
    if a >= Q::one() {
        return Err(GadgetError::AlphaTooLarge(rat::fmt(&a)));
    }
    let mut g = Gadget::new(T, &[T, S, sink.name()]);
    let rest = Q::one() - &a;
    for (anchor, act, same, other) in [(T, "gamma", "t", "s"), (S, "delta", "s", "t")] {
        let mut br: Vec<(Q, String)> = Vec::new();
        for (i, x) in alphas.iter().enumerate() {
            if x.is_positive() {
                br.push((x.clone(), xi(same, i + 1)));
            } else if x.is_negative() {
                br.push((x.abs(), xi(other, i + 1)));
            }
        }
        if !rest.is_zero() {
            br.push((rest.clone(), sink.name().to_string()));
        }
        let br: Vec<(Q, &str)> = br.iter().map(|(p, n)| (p.clone(), n.as_str())).collect();
        g.fragment.add_action(anchor, act, Q::zero(), &br)?;
    }
    for (i, x) in alphas.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let w = -rat::qi(i as i64 + 1);
        g.fragment.add_action(&xi("t", i + 1), "down", w.clone(), &[(Q::one(), T)])?;
        g.fragment.add_action(&xi("s", i + 1), "down", w, &[(Q::one(), S)])?;
    }
    match sink {
        Sink::Trap => g.fragment.add_absorbing(TRAP)?,
        Sink::Goal => g.fragment.mark("goal", GOAL),
        Sink::Relay(_) => {}
    }
    Ok(g)
}

fn check_betas(betas: &[Q], bound: &Q, what: &str) -> Result<(), GadgetError> {
    for (j, b) in betas.iter().enumerate() {
        if b.is_negative() || b >= bound {
            return Err(GadgetError::BetaBound { index: j, value: rat::fmt(b), bound: format!("0 <= beta < {} ({what})", rat::fmt(bound)) });
        }
    }
    Ok(())
}

/// Branch list `[(p, to), (1 - p, rest)]`, dropping a zero remainder.
fn split(p: Q, to: &str, rest: &str) -> Vec<(Q, String)> {
    let r = Q::one() - &p;
    let mut v = vec![(p, to.to_string())];
    if !r.is_zero() {
        v.push((r, rest.to_string()));
    }
    v
}

fn add(m: &mut Mdp, from: &str, act: &str, w: Q, br: &[(Q, String)]) -> Result<(), MdpError> {
    let br: Vec<(Q, &str)> = br.iter().map(|(p, n)| (p.clone(), n.as_str())).collect();
    m.add_action(from, act, w, &br)
}

/// Base values for maximal termination: from weight j, `gamma_j` terminates
/// with probability (k−j)/(k+1)+β_j.
pub fn build_termination_init_values(betas: &[Q]) -> Result<Gadget, GadgetError> {
    let k = betas.len();
    check_betas(betas, &rat::q(1, k as i64 + 1), "termination")?;
    let mut g = Gadget::new(T, &[T, S, TRAP]);
    let m = &mut g.fragment;
    for (j, b) in betas.iter().enumerate() {
        let p = rat::q((k - j) as i64, k as i64 + 1);
        add(m, T, &gamma(j), Q::zero(), &split(&p + b, &xi("x", j), TRAP))?;
        add(m, S, &delta(j), Q::zero(), &split(p, &xi("y", j), TRAP))?;
        let w = -rat::qi(j as i64 + 1);
        m.add_action(&xi("x", j), "down", w.clone(), &[(Q::one(), TRAP)])?;
        m.add_action(&xi("y", j), "down", w, &[(Q::one(), TRAP)])?;
    }
    Ok(g)
}

/// Base values for minimal termination. Expects the recurrence sink to be
/// the relay `trap'`, which this gadget connects to `trap` with weight −k.
pub fn build_min_termination_init_values(betas: &[Q]) -> Result<Gadget, GadgetError> {
    let k = betas.len();
    check_betas(betas, &rat::q(1, k as i64 + 1), "min termination")?;
    let mut g = Gadget::new(T, &[T, S, TRAP_RELAY]);
    let m = &mut g.fragment;
    for (j, b) in betas.iter().enumerate() {
        let p = rat::q(j as i64 + 1, k as i64 + 1);
        add(m, T, &gamma(j), Q::zero(), &split(&p + b, &xi("x", j), TRAP_RELAY))?;
        add(m, S, &delta(j), Q::zero(), &split(p, &xi("y", j), TRAP_RELAY))?;
        let w = -rat::qi(j as i64);
        m.add_action(&xi("x", j), "down", w.clone(), &[(Q::one(), TRAP)])?;
        m.add_action(&xi("y", j), "down", w, &[(Q::one(), TRAP)])?;
    }
    m.add_action(TRAP_RELAY, "down", -rat::qi(k as i64), &[(Q::one(), TRAP)])?;
    m.add_absorbing(TRAP)?;
    Ok(g)
}

/// 1/(2k^{2(k−j)}): the base goal probability of index j.
pub fn partial_base(k: usize, j: usize) -> Q {
    Q::one() / (rat::qi(2) * rat::pow(&rat::qi(k as i64), 2 * (k - j) as u32))
}

pub fn partial_beta_bound(k: usize) -> Q {
    Q::one() / (rat::qi(4) * rat::pow(&rat::qi(k as i64), 2 * k as u32 + 2))
}

fn goal_fail_sinks(m: &mut Mdp) {
    m.mark("goal", GOAL);
    m.mark("fail", FAIL);
}

/// Base values for partial expectations: `gamma_j` adds k−j and reaches
/// `goal` with probability 1/(2k^{2(k−j)})+β_j.
pub fn build_partial_init_values(betas: &[Q]) -> Result<Gadget, GadgetError> {
    let k = betas.len();
    check_betas(betas, &partial_beta_bound(k), "partial")?;
    let mut g = Gadget::new(T, &[T, S, GOAL]);
    let m = &mut g.fragment;
    for (j, b) in betas.iter().enumerate() {
        let w = rat::qi((k - j) as i64);
        let p = partial_base(k, j);
        m.add_action(T, &gamma(j), w.clone(), &[(Q::one(), &xi("x", j))])?;
        m.add_action(S, &delta(j), w, &[(Q::one(), &xi("y", j))])?;
        add(m, &xi("x", j), "exit", Q::zero(), &split(&p + b, GOAL, FAIL))?;
        add(m, &xi("y", j), "exit", Q::zero(), &split(p, GOAL, FAIL))?;
    }
    goal_fail_sinks(m);
    Ok(g)
}

/// Like [`build_partial_init_values`], but every exit happens with
/// probability 1−α per attempt and a weight-0 echo state sits between
/// attempts, so that the expected step count does not depend on the scheduler.
pub fn build_two_sided_init_values(betas: &[Q], alpha_sum: &Q) -> Result<Gadget, GadgetError> {
    let k = betas.len();
    if alpha_sum >= &Q::one() || alpha_sum.is_negative() {
        return Err(GadgetError::AlphaTooLarge(rat::fmt(alpha_sum)));
    }
    check_betas(betas, &partial_beta_bound(k), "two-sided")?;
    let mut g = Gadget::new(T, &[T, S, GOAL]);
    let m = &mut g.fragment;
    let stay = Q::one() - alpha_sum;
    for (j, b) in betas.iter().enumerate() {
        let w = rat::qi((k - j) as i64);
        for (anchor, act, x, pg) in [(T, gamma(j), "x", partial_base(k, j) + b), (S, delta(j), "y", partial_base(k, j))] {
            let x = xi(x, j);
            let echo = format!("{x}e");
            let mut br = Vec::new();
            br.push((&stay * &pg, GOAL.to_string()));
            let pf = &stay * (Q::one() - &pg);
            if !pf.is_zero() {
                br.push((pf, FAIL.to_string()));
            }
            if !alpha_sum.is_zero() {
                br.push((alpha_sum.clone(), echo.clone()));
                m.add_action(&echo, "echo", Q::zero(), &[(Q::one(), &x)])?;
                add(m, &x, "exit", Q::zero(), &br)?;
            }
            add(m, anchor, &act, w.clone(), &br)?;
        }
    }
    goal_fail_sinks(m);
    Ok(g)
}

/// Base values for the ⨁min objective. `delta_i` at `s` reaches `goal` with
/// weight k−i (prob 1−α), enters the geometric `y{i}` after −k+i (prob α−β_i),
/// or enters the steeper `y{i}'` after +i (prob β_i). With `collapsed = false`
/// the +i entry is split into +2k and −2k+i steps. `gamma_i` at `t` is the
/// same without the β branch.
pub fn build_cvar_init_values(betas: &[Q], alpha_sum: &Q, collapsed: bool) -> Result<Gadget, GadgetError> {
    let k = betas.len();
    let ki = k as i64;
    if alpha_sum > &rat::q(1, 5 * (ki + 1)) || !alpha_sum.is_positive() {
        return Err(GadgetError::AlphaTooLarge(format!("{} (need 0 < alpha <= 1/(5(k+1)))", rat::fmt(alpha_sum))));
    }
    for (j, b) in betas.iter().enumerate() {
        if b.is_negative() || b > &(alpha_sum / rat::qi(3)) {
            return Err(GadgetError::BetaBound { index: j, value: rat::fmt(b), bound: "0 <= beta <= alpha/3".into() });
        }
    }
    let mut g = Gadget::new(T, &[T, S, GOAL]);
    let m = &mut g.fragment;
    let stay = Q::one() - alpha_sum;
    let exit = rat::q(ki, ki + 1);
    let again = rat::q(1, ki + 1);
    for (i, b) in betas.iter().enumerate() {
        let i64_ = i as i64;
        for (anchor, act, p, beta) in [(T, gamma(i), "x", Q::zero()), (S, delta(i), "y", b.clone())] {
            let direct = format!("{p}{i}g");
            let entry = format!("{p}{i}e");
            let geo = xi(p, i);
            let mut br = vec![(stay.clone(), direct.clone()), (alpha_sum - &beta, entry.clone())];
            if beta.is_positive() {
                let steep_entry = format!("{p}{i}pe");
                let steep = format!("{geo}'");
                br.push((beta.clone(), steep_entry.clone()));
                if collapsed {
                    m.add_action(&steep_entry, "down", rat::qi(i64_), &[(Q::one(), &steep)])?;
                } else {
                    let mid = format!("{p}{i}pm");
                    m.add_action(&steep_entry, "up", rat::qi(2 * ki), &[(Q::one(), &mid)])?;
                    m.add_action(&mid, "down", rat::qi(i64_ - 2 * ki), &[(Q::one(), &steep)])?;
                }
                m.add_action(&steep, "loop", rat::qi(-2 * ki), &[(exit.clone(), GOAL), (again.clone(), &steep)])?;
            }
            add(m, anchor, &act, Q::zero(), &br)?;
            m.add_action(&direct, "down", rat::qi(ki - i64_), &[(Q::one(), GOAL)])?;
            m.add_action(&entry, "down", rat::qi(i64_ - ki), &[(Q::one(), &geo)])?;
            m.add_action(&geo, "loop", rat::qi(-ki), &[(exit.clone(), GOAL), (again.clone(), &geo)])?;
        }
    }
    m.mark("goal", GOAL);
    Ok(g)
}

/// Glues gadgets at shared port names. The result starts in `s_init`.
pub fn assemble(parts: &[&Gadget]) -> Result<Mdp, GadgetError> {
    let mut owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (gi, g) in parts.iter().enumerate() {
        for n in g.fragment.names() {
            if let Some(&o) = owner.get(n.as_str()) {
                if o != gi && !(g.ports.contains(n) && parts[o].ports.contains(n)) {
                    return Err(GadgetError::NameCollision(n.clone()));
                }
            } else {
                owner.insert(n, gi);
            }
        }
    }
    let mut m = Mdp::new(S_INIT);
    for g in parts {
        m.merge(&g.fragment)?;
    }
    let v = m.validate();
    if !v.is_empty() {
        let msg: Vec<String> = v.iter().map(|v| v.to_string()).collect();
        return Err(GadgetError::Invalid(msg.join("; ")));
    }
    Ok(m)
}

pub const TRAP_N: &str = "trap_n";
pub const TRAP_Z: &str = "trap_z";

/// Termination-time variant of an assembled termination MDP.
///
/// `choice` is folded into `s_init` (actions `tau`/`sigma` of weight +1), every
/// weight −m action becomes the step pattern −1, (0, −1)^{m−1}, states whose
/// only move is a weight-0 step into `trap` are bypassed, and `trap` is
/// replaced by a counter that goes up once and then alternates down. Every
/// path from `t`/`s` then alternates 0 and −1 steps, and reaching `trap`
/// costs exactly 3 extra steps before termination.
pub fn build_time_variant(mdp: &Mdp) -> Result<Mdp, GadgetError> {
    let id = |n: &str| mdp.expect_id(n).map_err(GadgetError::from);
    let (si, ch, trap) = (id(S_INIT)?, id(CHOICE)?, id(TRAP)?);
    let shape = |msg: &str| GadgetError::Shape(msg.to_string());
    match mdp.actions(si) {
        [a] if a.weight.is_one() && a.branches.len() == 2 => {}
        _ => return Err(shape("s_init must have one +1 action")),
    }
    let tau = mdp.action_index(ch, "tau").ok_or_else(|| shape("choice lacks tau"))?;
    let sigma = mdp.action_index(ch, "sigma").ok_or_else(|| shape("choice lacks sigma"))?;
    if !mdp.is_absorbing(trap) {
        return Err(shape("trap must be absorbing"));
    }
    let bypass: BTreeSet<usize> = (0..mdp.num_states())
        .filter(|&q| q != trap && matches!(mdp.actions(q), [a] if a.weight.is_zero() && a.branches == vec![(Q::one(), trap)]))
        .collect();
    let h = rat::q(1, 2);
    let mut out = Mdp::new(S_INIT);
    for (act, ai) in [("tau", tau), ("sigma", sigma)] {
        let to = mdp.name(mdp.actions(ch)[ai].branches[0].1);
        out.add_action(S_INIT, act, Q::one(), &[(h.clone(), S_INIT), (h.clone(), to)])?;
    }
    let mut used = BTreeSet::new();
    for q in 0..mdp.num_states() {
        if q == si || q == ch || q == trap || bypass.contains(&q) {
            continue;
        }
        let from = mdp.name(q).to_string();
        for a in mdp.actions(q) {
            let entry = if a.weight.is_zero() { TRAP_Z } else { TRAP_N };
            let br: Vec<(Q, String)> = a
                .branches
                .iter()
                .map(|(p, t)| {
                    if *t == trap || bypass.contains(t) {
                        used.insert(entry);
                        (p.clone(), entry.to_string())
                    } else {
                        (p.clone(), mdp.name(*t).to_string())
                    }
                })
                .collect();
            let m = rat::to_i64(&a.weight).ok_or_else(|| shape("non-integer weight"))?;
            if m > 0 {
                return Err(GadgetError::Shape(format!("positive weight at {from}/{}", a.name)));
            }
            if m >= -1 {
                add(&mut out, &from, &a.name, a.weight.clone(), &br)?;
                continue;
            }
            let steps: Vec<i64> = std::iter::once(-1).chain((1..-m).flat_map(|_| [0, -1])).collect();
            let mids: Vec<String> = (1..steps.len()).map(|i| format!("{from}.{}.c{i}", a.name)).collect();
            out.add_action(&from, &a.name, rat::qi(steps[0]), &[(Q::one(), &mids[0])])?;
            for i in 1..steps.len() {
                let w = rat::qi(steps[i]);
                if i + 1 < steps.len() {
                    out.add_action(&mids[i - 1], "step", w, &[(Q::one(), &mids[i])])?;
                } else {
                    add(&mut out, &mids[i - 1], "step", w, &br)?;
                }
            }
        }
    }
    if used.contains(TRAP_Z) {
        out.add_action(TRAP_Z, "up", Q::one(), &[(Q::one(), "trap_z1")])?;
        out.add_action("trap_z1", "step", -Q::one(), &[(Q::one(), "trap_n1")])?;
        out.mark("trap", TRAP_Z);
    }
    if used.contains(TRAP_N) {
        out.add_action(TRAP_N, "up", Q::one(), &[(Q::one(), "trap_n1")])?;
        out.mark("trap", TRAP_N);
    }
    if !used.is_empty() {
        out.add_action("trap_n1", "step", Q::zero(), &[(Q::one(), "trap_n2")])?;
        out.add_action("trap_n2", "step", -Q::one(), &[(Q::one(), "trap_n1")])?;
    }
    let v = out.validate();
    if !v.is_empty() {
        let msg: Vec<String> = v.iter().map(|v| v.to_string()).collect();
        return Err(GadgetError::Invalid(msg.join("; ")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::transient::{transient_distribution, TransientConfig};
    use crate::mdp::FnScheduler;
    use crate::rat::{q, qi};

    fn branch(m: &Mdp, from: &str, act: &str, to: &str) -> Q {
        let s = m.id(from).unwrap();
        let a = &m.actions(s)[m.action_index(s, act).unwrap()];
        a.branches.iter().filter(|(_, t)| m.name(*t) == to).map(|(p, _)| p.clone()).sum()
    }

    #[test]
    fn initial_gadget_geometric() {
        let g = build_initial();
        let tau = FnScheduler(|m: &Mdp, s, _: &Q| m.action_index(s, "tau"));
        let cfg = TransientConfig::budget(2).stop_at([g.fragment.id(CHOICE).unwrap()]);
        let r = transient_distribution(&g.fragment, &tau, &cfg).unwrap();
        let c = g.fragment.id(CHOICE).unwrap();
        assert_eq!(r.outcomes[&(c, qi(1))].mass, q(1, 2));
        assert!(r.outcomes.keys().all(|(_, w)| !w.is_zero()));
    }

    #[test]
    fn recurrence_branches() {
        let g = build_recurrence(&[q(1, 32), q(-1, 32)], Sink::Trap).unwrap();
        let m = &g.fragment;
        assert_eq!(branch(m, T, "gamma", "t1"), q(1, 32));
        assert_eq!(branch(m, T, "gamma", "s2"), q(1, 32));
        assert_eq!(branch(m, T, "gamma", TRAP), q(15, 16));
        assert_eq!(branch(m, S, "delta", "s1"), q(1, 32));
        assert_eq!(branch(m, S, "delta", "t2"), q(1, 32));
        let z = build_recurrence(&[qi(0), qi(0)], Sink::Trap).unwrap();
        assert_eq!(branch(&z.fragment, T, "gamma", TRAP), qi(1));
        assert!(build_recurrence(&[q(1, 2), q(-1, 2)], Sink::Trap).is_err());
    }

    #[test]
    fn termination_values_branches() {
        let b = [q(1, 512), q(1, 1024)];
        let g = build_termination_init_values(&b).unwrap();
        assert_eq!(branch(&g.fragment, T, "gamma_0", "x0"), q(2, 3) + q(1, 512));
        assert_eq!(branch(&g.fragment, S, "delta_0", "y0"), q(2, 3));
        let g = build_min_termination_init_values(&b).unwrap();
        assert_eq!(branch(&g.fragment, T, "gamma_1", "x1"), q(2, 3) + q(1, 1024));
        let tr = g.fragment.id(TRAP_RELAY).unwrap();
        assert_eq!(g.fragment.actions(tr)[0].weight, qi(-2));
    }

    #[test]
    fn partial_values() {
        let g = build_partial_init_values(&[qi(0), q(1, 1024)]).unwrap();
        assert_eq!(branch(&g.fragment, "x1", "exit", GOAL), q(1, 8) + q(1, 1024));
        let t = g.fragment.id(T).unwrap();
        let a = g.fragment.action_index(t, "gamma_1").unwrap();
        assert_eq!(g.fragment.actions(t)[a].weight, qi(1));
    }

    #[test]
    fn two_sided_goal_probability_matches_partial() {
        let alpha = q(1, 16);
        let g = build_two_sided_init_values(&[q(1, 4096), q(1, 1024)], &alpha).unwrap();
        let p1 = branch(&g.fragment, "x1", "exit", GOAL);
        assert_eq!(p1 / (Q::one() - &alpha), q(1, 8) + q(1, 1024));
        assert_eq!(branch(&g.fragment, T, "gamma_1", "x1e"), alpha);
    }

    #[test]
    fn assemble_counts_and_collisions() {
        let a = [q(1, 32), q(-1, 32)];
        let b = [q(1, 512), q(1, 1024)];
        let parts = [build_initial(), build_recurrence(&a, Sink::Trap).unwrap(), build_termination_init_values(&b).unwrap()];
        let m = assemble(&[&parts[0], &parts[1], &parts[2]]).unwrap();
        assert_eq!(m.num_states(), 2 + (2 + 2 * 2 + 1) + 2 * 2);
        let r = assemble(&[&parts[2], &parts[0], &parts[1]]).unwrap();
        let mut n1: Vec<_> = m.names().to_vec();
        let mut n2: Vec<_> = r.names().to_vec();
        n1.sort();
        n2.sort();
        assert_eq!(n1, n2);
        let mut clash = build_initial();
        clash.fragment.add_absorbing("x0").unwrap();
        assert!(matches!(assemble(&[&clash, &parts[1], &parts[2]]), Err(GadgetError::NameCollision(_))));
    }
}
