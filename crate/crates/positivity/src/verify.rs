//! Desk-scale checks of reduction outputs with exact arithmetic.
//!
//! Every check either holds exactly or holds within a tail bound that is
//! itself reported as an exact rational.

use crate::gadgets::{FAIL, GOAL, S, S_INIT, T, TRAP};
use crate::lrs::{Lrs, Normalization, Profile};
use crate::mdp::transient::{transient_distribution, TransientConfig, TransientResult};
use crate::mdp::unfold::{value_iteration, weight_unfold, Boundary, Mode, Objective};
use crate::mdp::{HashScheduler, Mdp, Scheduler, StateId};
use crate::rat::{self, Q};
use crate::reductions::{
    build_direct, normalization_for, reduce_with, two_sided_weights_ok, NormalizeMode, Prescribed, ReduceOptions, ReductionOutput,
    ReductionTarget,
};
use crate::threshold::{Anchor, Kind, RatMatrix, Recursion, ValueTable};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

/// Residual allowed in identities evaluated on truncated transient distributions.
pub const TRANSIENT_TOL_EXP: u32 = 30;
/// Transient analysis stops once the unabsorbed mass is at most 2^-48.
pub const TAIL_TARGET_EXP: u32 = 48;
/// Certified intervals must be narrower than 2^-20.
pub const INTERVAL_WIDTH_EXP: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub witness: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
}

fn wit(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

impl Check {
    pub fn pass(name: &str, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, detail: detail.into(), witness: BTreeMap::new(), tolerance: None }
    }

    pub fn warn(name: &str, detail: impl Into<String>, witness: &[(&str, String)]) -> Self {
        Check { name: name.into(), status: Status::Warn, detail: detail.into(), witness: wit(witness), tolerance: None }
    }

    /// A failure always names a witness.
    pub fn fail(name: &str, detail: impl Into<String>, witness: &[(&str, String)]) -> Self {
        assert!(!witness.is_empty(), "failing check {name} needs a witness");
        Check { name: name.into(), status: Status::Fail, detail: detail.into(), witness: wit(witness), tolerance: None }
    }

    pub fn with_tolerance(mut self, t: impl Into<String>) -> Self {
        self.tolerance = Some(t.into());
        self
    }

    fn error(name: &str, e: impl std::fmt::Display) -> Self {
        Check::fail(name, "could not run", &[("error", e.to_string())])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Stable order by check name.
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Terms of the difference sequence and range of deviation weights.
    pub window: usize,
    /// Truncation point of the threshold series.
    pub truncation: u32,
    pub budget: usize,
    /// Anchor weights for local optimality, as multiples of k: [−lo·k, hi·k].
    pub optimality: (i64, i64),
    pub seeds: Vec<u64>,
    /// Upper clamps for certified intervals, increasing.
    pub w_hi: Vec<i64>,
    /// Lower clamp; `None` means −(k+1).
    pub w_lo: Option<i64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            window: 50,
            truncation: 64,
            budget: 10_000,
            optimality: (1, 10),
            seeds: vec![1, 2, 3, 4, 5],
            w_hi: vec![20, 40],
            w_lo: None,
        }
    }
}

fn tol() -> Q {
    rat::half_pow(TRANSIENT_TOL_EXP)
}

// Instance data shared by the checks.

/// Recursion, value table and an MDP realising the direct objective.
#[derive(Debug, Clone)]
pub struct Instance {
    pub kind: Kind,
    pub k: usize,
    pub lrs: Lrs,
    pub rec: Recursion,
    pub table: ValueTable,
    pub theta: Q,
    pub mdp: Mdp,
}

impl Instance {
    /// Covers weights up to `hi`.
    pub fn new(kind: Kind, lrs: &Lrs, mdp: Mdp, hi: i64) -> Result<Self, String> {
        let rec = crate::threshold::theta::build_recursion(kind, lrs.coefficients(), lrs.initials()).map_err(|e| e.to_string())?;
        let k = rec.k;
        let n_max = hi.div_euclid(k as i64) + 1;
        let table = rec.table(n_max);
        let theta = rec.theta().map_err(|e| e.to_string())?;
        Ok(Instance { kind, k, lrs: lrs.clone(), rec, table, theta, mdp })
    }

    /// The direct instance behind a reduction output.
    pub fn from_output(out: &ReductionOutput, cfg: &VerifyConfig) -> Result<Self, String> {
        let k = out.meta.k as i64;
        let hi = (cfg.optimality.1 * k + 2 * k).max(cfg.truncation as i64).max(out.meta.d_offset + cfg.window as i64) + k;
        Instance::new(out.meta.kind, &out.meta.lrs, direct_mdp(out)?, hi)
    }

    fn sched(&self) -> Prescribed {
        Prescribed { kind: self.kind, k: self.k }
    }

    fn maximizing(&self) -> bool {
        !self.kind.minimizing()
    }

    fn evaluator(&self) -> Evaluator<'_> {
        Evaluator::new(&self.mdp, self.kind, self.k, &self.lrs.alpha_sum(), self.table.lo)
    }
}

fn shift_weights(mdp: &Mdp, by: &Q) -> Mdp {
    let mut m = Mdp::new(mdp.name(mdp.initial()));
    for n in mdp.names() {
        m.state(n);
    }
    for s in 0..mdp.num_states() {
        for a in mdp.actions(s) {
            let br: Vec<(Q, &str)> = a.branches.iter().map(|(p, t)| (p.clone(), mdp.name(*t))).collect();
            m.add_action(mdp.name(s), &a.name, &a.weight + by, &br).expect("copy of a valid mdp");
        }
    }
    for (mk, set) in mdp.marks() {
        for &s in set {
            m.mark(mk, mdp.name(s));
        }
    }
    m
}

/// The MDP of the underlying direct objective (rebuilt when the target wraps it).
pub fn direct_mdp(out: &ReductionOutput) -> Result<Mdp, String> {
    use ReductionTarget::*;
    let opts = ReduceOptions { normalize: NormalizeMode::Auto, ..Default::default() };
    match out.target {
        MaxTermination | MinTermination | PartialSsppMax | EnergyMax | EnergyMin | CostMax | CostMin => Ok(out.mdp.clone()),
        TwoSidedPartial => Ok(shift_weights(&out.mdp, &-rat::qi(out.meta.k as i64))),
        _ => build_direct(&out.meta.lrs, out.meta.kind, false, &opts).map(|d| d.mdp).map_err(|e| e.to_string()),
    }
}

// Values under the prescribed scheduler.

/// Closed interval of rationals; exact when `lo == hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iv {
    pub lo: Q,
    pub hi: Q,
}

impl Iv {
    pub fn exact(v: Q) -> Self {
        Iv { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    fn add_scaled(&mut self, p: &Q, o: &Iv) {
        self.lo += p * &o.lo;
        self.hi += p * &o.hi;
    }

    fn show(&self) -> String {
        if self.is_exact() {
            rat::fmt(&self.lo)
        } else {
            format!("[{}, {}]", rat::fmt(&self.lo), rat::fmt(&self.hi))
        }
    }
}

/// Memoized Bellman unrolling of the direct MDP under the prescribed
/// scheduler. Below the base window, anchor values are only bounded:
/// the weight never rises again, so the value lies in [w − kα/(1−α), w].
pub struct Evaluator<'a> {
    mdp: &'a Mdp,
    kind: Kind,
    sched: Prescribed,
    below: Q,
    lo: i64,
    memo: RefCell<HashMap<(StateId, i64), Iv>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(mdp: &'a Mdp, kind: Kind, k: usize, alpha: &Q, lo: i64) -> Self {
        let below = rat::qi(k as i64) * alpha / (Q::one() - alpha);
        Evaluator { mdp, kind, sched: Prescribed { kind, k }, below, lo, memo: RefCell::new(HashMap::new()) }
    }

    fn termination(&self) -> bool {
        matches!(self.kind, Kind::TerminationMax | Kind::TerminationMin)
    }

    pub fn value(&self, s: StateId, w: i64) -> Result<Iv, String> {
        if self.termination() && w < 0 {
            return Ok(Iv::exact(Q::one()));
        }
        if let Some(v) = self.memo.borrow().get(&(s, w)) {
            return Ok(v.clone());
        }
        let name = self.mdp.name(s);
        let wq = rat::qi(w);
        let v = if self.termination() && (self.mdp.is_terminal(s) || self.mdp.is_absorbing(s)) {
            Iv::exact(Q::zero())
        } else if !self.termination() && name == GOAL {
            Iv::exact(if self.kind == Kind::CvarAux { rat::min(wq, Q::zero()) } else { wq })
        } else if !self.termination() && name == FAIL {
            Iv::exact(Q::zero())
        } else if !self.termination() && (name == T || name == S) && w < self.lo {
            Iv { lo: &wq - &self.below, hi: wq }
        } else if let Some(v) = self.geometric_loop(s, w) {
            Iv::exact(v)
        } else {
            let n = self.mdp.actions(s).len();
            let a = match n {
                0 => return Err(format!("no value at terminal state {name}")),
                1 => 0,
                _ => self.sched.choose(self.mdp, s, &wq).ok_or_else(|| format!("no prescribed action at {name}, weight {w}"))?,
            };
            let act = &self.mdp.actions(s)[a];
            if !act.weight.is_zero() && act.branches.iter().any(|(_, t)| *t == s) {
                return Err(format!("unsupported self-loop at {name}"));
            }
            self.action_value(s, a, w)?
        };
        self.memo.borrow_mut().insert((s, w), v.clone());
        Ok(v)
    }

    /// Σ p·V(successor) for action `a` at `(s, w)`.
    pub fn action_value(&self, s: StateId, a: usize, w: i64) -> Result<Iv, String> {
        let act = &self.mdp.actions(s)[a];
        let dw = rat::to_i64(&act.weight).ok_or_else(|| format!("non-integer weight at {}", self.mdp.name(s)))?;
        let mut acc = Iv::exact(Q::zero());
        let mut back = Q::zero();
        for (p, t) in &act.branches {
            if dw == 0 && self.returns_to(*t, s) {
                back += p;
            } else {
                acc.add_scaled(p, &self.value(*t, w + dw)?);
            }
        }
        if back.is_zero() {
            return Ok(acc);
        }
        // V = acc + back·V
        let f = Q::one() / (Q::one() - &back);
        Ok(Iv { lo: acc.lo * &f, hi: acc.hi * &f })
    }

    /// Whether `from` leads back to `to` through single weight-0 moves.
    fn returns_to(&self, mut from: StateId, to: StateId) -> bool {
        for _ in 0..8 {
            if from == to {
                return true;
            }
            match self.mdp.actions(from) {
                [a] if a.weight.is_zero() && a.branches.len() == 1 => from = a.branches[0].1,
                _ => return false,
            }
        }
        false
    }

    /// E[min(⨁goal, 0)] of a loop of weight −m that exits to goal with p and
    /// stays with q = 1 − p: q^{n0−1}·((w − n0·m) − m·q/p), n0 the first
    /// iteration at which the weight is no longer positive.
    fn geometric_loop(&self, s: StateId, w: i64) -> Option<Q> {
        if self.kind != Kind::CvarAux {
            return None;
        }
        let [a] = self.mdp.actions(s) else { return None };
        let m = -rat::to_i64(&a.weight)?;
        if m <= 0 || a.branches.len() != 2 {
            return None;
        }
        let stay = a.branches.iter().find(|(_, t)| *t == s)?.0.clone();
        let (p, g) = a.branches.iter().find(|(_, t)| *t != s)?;
        if self.mdp.name(*g) != GOAL {
            return None;
        }
        let n0 = if w <= 0 { 1 } else { (w + m - 1) / m }.max(1);
        let qpow = rat::pow(&stay, (n0 - 1) as u32);
        let mq = rat::qi(m);
        Some(qpow * (rat::qi(w - n0 * m) - &mq * &stay / p))
    }
}

// Checks on the normalized sequence and the recursion.

pub fn check_normalization(lrs: &Lrs, norm: &Normalization, terms: usize, profile: Profile) -> Check {
    const NAME: &str = "normalization";
    let u = lrs.terms(terms);
    let v = norm.normalized.terms(terms);
    let mut scale = norm.mu.clone();
    for n in 0..=terms {
        if v[n] != &scale * &u[n] {
            return Check::fail(
                NAME,
                "v_n differs from mu·lambda^n·u_n",
                &[("n", n.to_string()), ("v_n", rat::fmt(&v[n])), ("expected", rat::fmt(&(&scale * &u[n])))],
            );
        }
        scale *= &norm.lambda;
    }
    let viol = norm.normalized.check_assumption(profile);
    if let Some(x) = viol.first() {
        if !norm.degenerate {
            return Check::fail(NAME, "bounds violated after rescaling", &[("bound", x.bound.to_string()), ("value", rat::fmt(&x.value))]);
        }
    }
    Check::pass(
        NAME,
        format!("v_n = mu·lambda^n·u_n for n <= {terms}; lambda = {}, mu = {}", rat::fmt(&norm.lambda), rat::fmt(&norm.mu)),
    )
    .with_tolerance("0")
}

/// d(offset + n) = u_n for n = 0..=window, `lrs` being the encoded sequence.
pub fn check_difference_sequence(inst: &Instance, window: usize) -> Check {
    let name = format!("difference-sequence[{}]", inst.kind.name());
    let off = inst.kind.base_lo(inst.k);
    let u = inst.lrs.terms(window);
    for (n, un) in u.iter().enumerate() {
        let w = off + n as i64;
        match inst.table.d(w) {
            Some(d) if &d == un => {}
            Some(d) => {
                return Check::fail(&name, "d(offset + n) != u_n", &[("n", n.to_string()), ("weight", w.to_string()), ("d", rat::fmt(&d)), ("u", rat::fmt(un))])
            }
            None => return Check::fail(&name, "value table too short", &[("weight", w.to_string())]),
        }
    }
    Check::pass(&name, format!("d({off} + n) = u_n exactly for n <= {window}")).with_tolerance("0")
}

/// One-step comparison of every action at `t` and `s` against the
/// prescribed one, for anchor weights in [max(lo, base window), hi].
pub fn check_local_optimality(inst: &Instance, lo: i64, hi: i64) -> Check {
    let name = format!("local-optimality[{}]", inst.kind.name());
    let ev = inst.evaluator();
    let sched = inst.sched();
    let start = lo.max(inst.table.lo);
    let (mut ties, mut open, mut anchors) = (0usize, 0usize, 0usize);
    let mut first_warn: Vec<(&str, String)> = Vec::new();
    for (anchor, which) in [(T, Anchor::T), (S, Anchor::S)] {
        let Some(s) = inst.mdp.id(anchor) else {
            return Check::fail(&name, "anchor missing", &[("state", anchor.to_string())]);
        };
        for w in start..=hi {
            anchors += 1;
            let pa = match sched.choose(&inst.mdp, s, &rat::qi(w)) {
                Some(a) => a,
                None => return Check::fail(&name, "no prescribed action", &[("state", anchor.into()), ("weight", w.to_string())]),
            };
            let pv = match ev.action_value(s, pa, w) {
                Ok(v) => v,
                Err(e) => return Check::error(&name, e),
            };
            let tv = inst.table.get(which.clone(), w).cloned();
            if !pv.is_exact() || tv.as_ref() != Some(&pv.lo) {
                return Check::fail(
                    &name,
                    "prescribed action value differs from the value table",
                    &[("state", anchor.into()), ("weight", w.to_string()), ("bellman", pv.show()), ("table", tv.map(|v| rat::fmt(&v)).unwrap_or_default())],
                );
            }
            if inst.kind == Kind::Partial && anchor == T && w >= 1 && pv.lo < rat::q(3, 4) * rat::qi(w) {
                return Check::fail(&name, "value at t below 3w/4", &[("weight", w.to_string()), ("value", pv.show())]);
            }
            for (b, act) in inst.mdp.actions(s).iter().enumerate() {
                if b == pa {
                    continue;
                }
                let bv = match ev.action_value(s, b, w) {
                    Ok(v) => v,
                    Err(e) => return Check::error(&name, e),
                };
                // better(x, y): x strictly preferred over y
                let (beats, can_beat) = if inst.maximizing() { (bv.lo > pv.hi, bv.hi >= pv.lo) } else { (bv.hi < pv.lo, bv.lo <= pv.hi) };
                let witness = [
                    ("state", anchor.to_string()),
                    ("weight", w.to_string()),
                    ("prescribed", inst.mdp.actions(s)[pa].name.clone()),
                    ("prescribed_value", pv.show()),
                    ("better_action", act.name.clone()),
                    ("better_value", bv.show()),
                ];
                if beats {
                    return Check::fail(&name, "a non-prescribed action is strictly better", &witness);
                }
                if can_beat {
                    if bv.is_exact() && bv.lo == pv.lo {
                        ties += 1;
                    } else {
                        open += 1;
                    }
                    if first_warn.is_empty() {
                        first_warn = witness.to_vec();
                    }
                }
            }
        }
    }
    let detail = format!("{anchors} anchor points in [{start}, {hi}]; {ties} ties, {open} undecided");
    if ties + open > 0 {
        Check::warn(&name, detail, &first_warn)
    } else {
        Check::pass(&name, detail).with_tolerance("0")
    }
}

/// |ϑ − Σ_{w=1}^{T} 2^{-w}·V(t, w)| against the geometric tail bound.
pub fn check_theta_series(inst: &Instance, truncation: u32) -> Check {
    let name = format!("theta-series[{}]", inst.kind.name());
    let a_norm = inst.rec.a.norm_inf();
    if a_norm > Q::one() {
        return Check::fail(&name, "transfer matrix norm above 1", &[("norm", rat::fmt(&a_norm))]);
    }
    let mut sum = Q::zero();
    for w in 1..=truncation as i64 {
        match inst.table.get(Anchor::T, w) {
            Some(v) => sum += rat::half_pow(w as u32) * v,
            None => return Check::fail(&name, "value table too short", &[("weight", w.to_string())]),
        }
    }
    let tail = rat::half_pow(truncation);
    let bound = match inst.kind {
        Kind::Partial => rat::qi(truncation as i64 + 2 + inst.k as i64) * &tail,
        _ => rat::max_abs(&inst.rec.base) * &tail,
    };
    let residual = (&inst.theta - &sum).abs();
    let w = [("theta", rat::fmt(&inst.theta)), ("partial_sum", rat::fmt(&sum)), ("residual", rat::fmt(&residual)), ("bound", rat::fmt(&bound))];
    if residual <= bound {
        Check::pass(&name, format!("residual {} <= tail bound {} at T = {truncation}", rat::fmt(&residual), rat::fmt(&bound))).with_tolerance(rat::fmt(&bound))
    } else {
        Check::fail(&name, "closed form and truncated series disagree beyond the tail bound", &w)
    }
}

/// (I − A/2^k)·N = I for the Neumann inverse N.
pub fn check_neumann_inverse(inst: &Instance) -> Check {
    let name = format!("neumann-inverse[{}]", inst.kind.name());
    let a = &inst.rec.a;
    let r = inst.rec.scale();
    match crate::threshold::neumann(a, &r) {
        Ok(n) => {
            let prod = RatMatrix::identity(a.rows()).sub(&a.scale(&r)).mul(&n);
            if prod.is_identity() {
                Check::pass(&name, "(I - A/2^k)·N = I").with_tolerance("0")
            } else {
                Check::fail(&name, "product is not the identity", &[("product", format!("{:?}", Vec::<Vec<String>>::from(prod)))])
            }
        }
        Err(e) => Check::error(&name, e),
    }
}

/// Σ_{i≤n} Aⁱ = (I−A)⁻¹(I − Aⁿ⁺¹) and Σ_{i≤n}(n−i)Aⁱ = (I−A)⁻²(Aⁿ⁺¹ − A + n(I−A)).
pub fn check_series_identities(a: &RatMatrix, n_max: u32) -> Check {
    const NAME: &str = "series-identities";
    let m = a.rows();
    let id = RatMatrix::identity(m);
    let i_a = id.sub(a);
    let inv = match i_a.inverse() {
        Ok(v) => v,
        Err(e) => return Check::error(NAME, e),
    };
    let inv2 = inv.mul(&inv);
    for n in 1..=n_max {
        let mut s1 = RatMatrix::zeros(m, m);
        let mut s2 = RatMatrix::zeros(m, m);
        let mut p = id.clone();
        for i in 0..=n {
            s1 = s1.add(&p);
            s2 = s2.add(&p.scale(&rat::qi((n - i) as i64)));
            p = p.mul(a);
        }
        // p = A^{n+1}
        if s1 != inv.mul(&id.sub(&p)) {
            return Check::fail(NAME, "sum of powers identity fails", &[("n", n.to_string())]);
        }
        if s2 != inv2.mul(&p.sub(a).add(&i_a.scale(&rat::qi(n as i64)))) {
            return Check::fail(NAME, "weighted sum of powers identity fails", &[("n", n.to_string())]);
        }
    }
    Check::pass(NAME, format!("both identities hold exactly for n = 1..={n_max}")).with_tolerance("0")
}

/// Table blocks against Bellman unrolling of the MDP, including v₁ = A·v₀ (+ affine part).
pub fn check_bellman_unrolling(inst: &Instance, blocks: i64) -> Check {
    let name = format!("bellman-unrolling[{}]", inst.kind.name());
    let ev = inst.evaluator();
    let (Some(t), Some(s)) = (inst.mdp.id(T), inst.mdp.id(S)) else {
        return Check::fail(&name, "anchor missing", &[("state", "t/s".into())]);
    };
    let k = inst.k;
    let b0 = inst.kind.base_block();
    let block = |n: i64| -> Result<Vec<Q>, String> {
        let lo = inst.kind.block_lo(k, n);
        let mut v = vec![Q::zero(); 2 * k];
        for r in 0..k {
            let w = lo + (k - 1 - r) as i64;
            for (idx, st) in [(r, t), (k + r, s)] {
                let x = ev.value(st, w)?;
                if !x.is_exact() {
                    return Err(format!("inexact value at weight {w}"));
                }
                v[idx] = x.lo;
            }
        }
        Ok(v)
    };
    let mut prev = inst.rec.base.clone();
    for n in (b0 + 1)..=(b0 + blocks) {
        let want = inst.rec.step(&prev, n);
        let got = match block(n) {
            Ok(v) => v,
            Err(e) => return Check::error(&name, e),
        };
        if got != want {
            let r = (0..2 * k).find(|&r| got[r] != want[r]).unwrap_or(0);
            return Check::fail(
                &name,
                "recursion step differs from MDP unrolling",
                &[("block", n.to_string()), ("row", r.to_string()), ("mdp", rat::fmt(&got[r])), ("recursion", rat::fmt(&want[r]))],
            );
        }
        prev = want;
    }
    Check::pass(&name, format!("v_n = A·v_(n-1) (+ affine part) matches the MDP for {blocks} blocks")).with_tolerance("0")
}

/// Single deviation at `choice`: σ instead of τ at weight w changes the value
/// by ∓2^{-w}·d(w).
pub fn check_deviation(inst: &Instance, bound: usize) -> Check {
    let name = format!("deviation[{}]", inst.kind.name());
    let off = inst.kind.base_lo(inst.k);
    let u = inst.lrs.terms(bound);
    let neg = (0..=bound).find(|&n| u[n].is_negative() && off + n as i64 >= 1);
    let beyond = |gain: &Q| if inst.maximizing() { &inst.theta + gain } else { &inst.theta - gain };
    if let Some(n) = neg {
        let w = off + n as i64;
        let Some(d) = inst.table.d(w) else {
            return Check::fail(&name, "value table too short", &[("weight", w.to_string())]);
        };
        let gain = rat::half_pow(w as u32) * d.abs();
        let witness = [("n", n.to_string()), ("choice_weight", w.to_string()), ("d", rat::fmt(&d)), ("margin", rat::fmt(&gain)), ("deviation_value", rat::fmt(&beyond(&gain)))];
        if d.is_negative() && gain.is_positive() {
            let mut c = Check::pass(&name, format!("sigma at weight {w} beats theta by {}", rat::fmt(&gain))).with_tolerance("0");
            c.witness = wit(&witness);
            c
        } else {
            Check::fail(&name, "deviation at the first negative term does not improve", &witness)
        }
    } else {
        let mut ties = 0;
        for w in 1..=bound as i64 {
            let Some(d) = inst.table.d(w) else {
                return Check::fail(&name, "value table too short", &[("weight", w.to_string())]);
            };
            if d.is_negative() {
                return Check::fail(&name, "a deviation beats theta on a sequence without negative terms", &[("choice_weight", w.to_string()), ("d", rat::fmt(&d))]);
            }
            if d.is_zero() {
                ties += 1;
            }
        }
        let detail = format!("no deviation at choice weights 1..={bound} beats theta ({ties} neutral)");
        if ties > 0 {
            Check::warn(&name, detail, &[("neutral", ties.to_string())])
        } else {
            Check::pass(&name, detail).with_tolerance("0")
        }
    }
}

// Wrapper identities on truncated transient distributions.

fn schedulers<'a>(p: &'a Prescribed, seeds: &[u64]) -> Vec<(String, Box<dyn Scheduler + 'a>)> {
    let mut v: Vec<(String, Box<dyn Scheduler + 'a>)> = vec![("prescribed".into(), Box::new(*p))];
    for &s in seeds {
        v.push((format!("hash-{s}"), Box::new(HashScheduler { seed: s })));
    }
    v
}

fn transient(mdp: &Mdp, sched: &dyn Scheduler, cfg: TransientConfig) -> Result<TransientResult, String> {
    let r = transient_distribution(mdp, sched, &cfg.tail_target(rat::half_pow(TAIL_TARGET_EXP))).map_err(|e| e.to_string())?;
    if r.tail > tol() {
        return Err(format!("tail mass {} above 2^-{TRANSIENT_TOL_EXP} after {} steps", rat::approx(&r.tail), r.steps));
    }
    Ok(r)
}

fn at(mdp: &Mdp, name: &str) -> Option<StateId> {
    mdp.id(name)
}

/// Runs `f` under the prescribed and the seeded schedulers; `f` returns
/// (lhs, rhs, tail) and the identity must hold up to 2^-30.
fn identity_check(
    name: &str,
    what: &str,
    p: &Prescribed,
    seeds: &[u64],
    mut f: impl FnMut(&dyn Scheduler) -> Result<(Q, Q, Q), String>,
) -> Check {
    let mut worst = Q::zero();
    let mut worst_tail = Q::zero();
    for (label, s) in schedulers(p, seeds) {
        let (lhs, rhs, tail) = match f(s.as_ref()) {
            Ok(x) => x,
            Err(e) => return Check::fail(name, format!("{what}: {e}"), &[("scheduler", label)]),
        };
        let r = (&lhs - &rhs).abs();
        if r > tol() {
            return Check::fail(
                name,
                format!("{what} fails"),
                &[("scheduler", label), ("lhs", rat::fmt(&lhs)), ("rhs", rat::fmt(&rhs)), ("residual", rat::fmt(&r))],
            );
        }
        worst = worst.max(r);
        worst_tail = worst_tail.max(tail);
    }
    Check::pass(
        name,
        format!(
            "{what} under prescribed + {} seeded schedulers; max residual ~{:.3e}, max tail ~{:.3e}",
            seeds.len(),
            rat::approx(&worst),
            rat::approx(&worst_tail)
        ),
    )
    .with_tolerance(format!("2^-{TRANSIENT_TOL_EXP}"))
}

/// CE_𝒩 = (PE_ℳ + Pr(◊goal)·ϑ) / (1 + Pr(◊goal)).
pub fn check_conditional_identity(out: &ReductionOutput, partial: &Mdp, cfg: &VerifyConfig) -> Check {
    let p = Prescribed::for_output(out);
    let theta = out.theta.clone();
    identity_check("wrapper-conditional", "CE identity", &p, &cfg.seeds, |s| {
        let rn = transient(&out.mdp, s, TransientConfig::budget(cfg.budget))?;
        let rm = transient(partial, s, TransientConfig::budget(cfg.budget))?;
        let gn = at(&out.mdp, GOAL).ok_or("no goal")?;
        let gm = at(partial, GOAL).ok_or("no goal")?;
        let num = rn.expect(|st, w| if st == gn { w.clone() } else { Q::zero() });
        let den = rn.mass_where(|st, _| st == gn);
        let pe = rm.expect(|st, w| if st == gm { w.clone() } else { Q::zero() });
        let pg = rm.mass_where(|st, _| st == gm);
        let ce = num / den;
        let rhs = (pe + &pg * &theta) / (Q::one() + &pg);
        Ok((ce, rhs, rn.tail.max(rm.tail)))
    })
}

/// E(X) = PE + k·T with T = 2 + 2/(1−α), evaluated on the unshifted MDP.
pub fn check_two_sided_identity(out: &ReductionOutput, cfg: &VerifyConfig) -> Vec<Check> {
    let k = rat::qi(out.meta.k as i64);
    let base = shift_weights(&out.mdp, &-k.clone());
    let alpha = out.meta.lrs.alpha_sum();
    let t_closed = rat::qi(2) + rat::qi(2) / (Q::one() - &alpha);
    let p = Prescribed::for_output(out);
    let mut v = Vec::new();
    if two_sided_weights_ok(out) {
        v.push(Check::pass("wrapper-two-sided-weights", "all weights nonnegative").with_tolerance("0"));
    } else {
        let w = out.mdp.weights().find(|w| w.is_negative()).cloned().unwrap_or_default();
        v.push(Check::fail("wrapper-two-sided-weights", "negative weight", &[("weight", rat::fmt(&w))]));
    }
    let (g, f) = (at(&base, GOAL), at(&base, FAIL));
    v.push(identity_check("wrapper-two-sided", "E(X) = PE + k·T", &p, &cfg.seeds, |s| {
        let r = transient(&base, s, TransientConfig::budget(cfg.budget))?;
        let g = g.ok_or("no goal")?;
        let f = f.ok_or("no fail")?;
        let pe = r.expect(|st, w| if st == g { w.clone() } else { Q::zero() });
        let steps_goal = r.step_mass_where(|st, _| st == g);
        let steps_fail = r.step_mass_where(|st, _| st == f);
        let ex = &pe + &k * (&steps_goal + &steps_fail);
        Ok((ex, pe + &k * &t_closed, r.tail))
    }));
    v
}

/// Value-at-risk `sup{r : Pr(X < r) <= p}` of a finite distribution.
pub fn value_at_risk(dist: &BTreeMap<Q, Q>, p: &Q) -> Option<Q> {
    let mut cum = Q::zero();
    for (x, m) in dist {
        cum += m;
        if &cum > p {
            return Some(x.clone());
        }
    }
    None
}

/// CVaR_p from the lower tail, splitting mass at the value-at-risk.
pub fn conditional_value_at_risk(dist: &BTreeMap<Q, Q>, p: &Q) -> Option<Q> {
    let var = value_at_risk(dist, p)?;
    let mut below = Q::zero();
    let mut acc = Q::zero();
    for (x, m) in dist.range(..var.clone()) {
        acc += x * m;
        below += m;
    }
    Some((acc + (p - below) * &var) / p)
}

/// VaR_{1/2} = 0 and CVaR_{1/2} = (2/3)·E_ℳ(min(⨁goal, 0)).
pub fn check_cvar_identity(out: &ReductionOutput, aux: &Mdp, cfg: &VerifyConfig) -> Vec<Check> {
    let p = Prescribed::for_output(out);
    let half = rat::q(1, 2);
    let mut var_bad: Option<(String, String)> = None;
    let mut zero_mass_bad: Option<(String, String)> = None;
    let mut label_idx = 0usize;
    let labels: Vec<String> = schedulers(&p, &cfg.seeds).into_iter().map(|(l, _)| l).collect();
    let id = identity_check("wrapper-cvar", "CVaR_1/2 = (2/3)·E(min(goal weight, 0))", &p, &cfg.seeds, |s| {
        let label = labels[label_idx].clone();
        label_idx += 1;
        let rn = transient(&out.mdp, s, TransientConfig::budget(cfg.budget))?;
        let rm = transient(aux, s, TransientConfig::budget(cfg.budget))?;
        let gn = at(&out.mdp, GOAL).ok_or("no goal")?;
        let gm = at(aux, GOAL).ok_or("no goal")?;
        let mut dist: BTreeMap<Q, Q> = BTreeMap::new();
        for ((st, w), o) in &rn.outcomes {
            if *st == gn {
                *dist.entry(w.clone()).or_insert_with(Q::zero) += &o.mass;
            }
        }
        let zero = dist.get(&Q::zero()).cloned().unwrap_or_default();
        if zero < rat::q(2, 3) && zero_mass_bad.is_none() {
            zero_mass_bad = Some((label.clone(), rat::fmt(&zero)));
        }
        let var = value_at_risk(&dist, &half).ok_or("empty distribution")?;
        if !var.is_zero() && var_bad.is_none() {
            var_bad = Some((label, rat::fmt(&var)));
        }
        let cvar = conditional_value_at_risk(&dist, &half).ok_or("empty distribution")?;
        let e_min = rm.expect(|st, w| if st == gm { rat::min(w.clone(), Q::zero()) } else { Q::zero() });
        Ok((cvar, rat::q(2, 3) * e_min, rn.tail.max(rm.tail)))
    });
    let var = match var_bad {
        None => Check::pass("wrapper-var", "VaR_1/2 = 0 under every tested scheduler").with_tolerance("0"),
        Some((l, v)) => Check::fail("wrapper-var", "VaR_1/2 is not 0", &[("scheduler", l), ("var", v)]),
    };
    let zero = match zero_mass_bad {
        None => Check::pass("wrapper-cvar-zero-mass", "at least 2/3 of the mass ends at weight 0").with_tolerance("0"),
        Some((l, v)) => Check::fail("wrapper-cvar-zero-mass", "mass at weight 0 below 2/3", &[("scheduler", l), ("mass", v)]),
    };
    vec![id, var, zero]
}

/// E(time) = 8 + 3·Pr(◊trap with weight >= 0), and = 11 − 3ϑ under the prescribed scheduler.
pub fn check_time_identity(out: &ReductionOutput, cfg: &VerifyConfig) -> Vec<Check> {
    let p = Prescribed::for_output(out);
    let traps: Vec<StateId> = out.mdp.marked("trap").into_iter().collect();
    let run = |s: &dyn Scheduler| -> Result<(Q, Q, Q), String> {
        let r = transient(&out.mdp, s, TransientConfig::budget(cfg.budget).stop_below(Q::zero()))?;
        let et = r.step_mass_where(|_, _| true);
        let r2 = transient(&out.mdp, s, TransientConfig::budget(cfg.budget).stop_below(Q::zero()).stop_at(traps.iter().copied()))?;
        let pt = r2.mass_where(|st, w| traps.contains(&st) && !w.is_negative());
        Ok((et, pt, r.tail.max(r2.tail)))
    };
    let id = identity_check("wrapper-time", "E(time) = 8 + 3p", &p, &cfg.seeds, |s| {
        let (et, pt, tail) = run(s)?;
        Ok((et, rat::qi(8) + rat::qi(3) * pt, tail))
    });
    let th = match run(&p) {
        Ok((et, _, _)) => {
            let r = (&et - &out.theta).abs();
            if r <= tol() {
                Check::pass("wrapper-time-threshold", format!("prescribed expected time matches 11 - 3·theta (residual ~{:.3e})", rat::approx(&r)))
                    .with_tolerance(format!("2^-{TRANSIENT_TOL_EXP}"))
            } else {
                Check::fail("wrapper-time-threshold", "prescribed expected time differs from theta", &[("time", rat::fmt(&et)), ("theta", rat::fmt(&out.theta))])
            }
        }
        Err(e) => Check::error("wrapper-time-threshold", e),
    };
    vec![id, th]
}

/// Goal := {trap} is reached almost surely and ⨁trap < 0 coincides with termination.
pub fn check_cost_identity(out: &ReductionOutput, cfg: &VerifyConfig) -> Check {
    let p = Prescribed::for_output(out);
    let Some(trap) = at(&out.mdp, TRAP) else {
        return Check::fail("wrapper-cost", "no trap state", &[("state", TRAP.into())]);
    };
    identity_check("wrapper-cost", "Pr(goal weight < 0) = Pr(termination), goal reached a.s.", &p, &cfg.seeds, |s| {
        let r = transient(&out.mdp, s, TransientConfig::budget(cfg.budget))?;
        let at_trap = r.mass_where(|st, _| st == trap);
        if at_trap != r.absorbed() {
            return Err("mass absorbed outside trap".into());
        }
        let neg = r.mass_where(|st, w| st == trap && w.is_negative());
        let rt = transient(&out.mdp, s, TransientConfig::budget(cfg.budget).stop_below(Q::zero()))?;
        let term = rt.mass_where(|_, w| w.is_negative());
        Ok((neg, term, r.tail.max(rt.tail)))
    })
}

pub fn check_one_counter(out: &ReductionOutput, original: &Mdp) -> Check {
    const NAME: &str = "one-counter-weights";
    if let Some(w) = out.mdp.weights().find(|w| w.abs() > Q::one() || !w.is_integer()) {
        return Check::fail(NAME, "weight outside {-1, 0, 1}", &[("weight", rat::fmt(w))]);
    }
    let extra: usize = original.weights().filter_map(rat::to_i64).map(|w| (w.unsigned_abs() as usize).saturating_sub(1)).sum();
    if out.mdp.num_states() != original.num_states() + extra {
        return Check::fail(
            NAME,
            "state count is not |S| + Σ(|w| - 1)",
            &[("states", out.mdp.num_states().to_string()), ("expected", (original.num_states() + extra).to_string())],
        );
    }
    Check::pass(NAME, format!("all weights in {{-1, 0, 1}}; {extra} chain states")).with_tolerance("0")
}

// Certified intervals via weight unfolding.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub w_hi: i64,
    pub lower: Q,
    pub upper: Q,
}

/// Optimal termination probability at the initial state, bounded by
/// clamping weights above `w_hi` to 0 (lower) and 1 (upper).
pub fn termination_intervals(mdp: &Mdp, mode: Mode, w_lo: i64, w_hi: &[i64], budget: usize) -> Result<Vec<Interval>, String> {
    let mut out = Vec::new();
    for &hi in w_hi {
        let mut vals = Vec::new();
        for b in [Boundary::Pessimistic, Boundary::Optimistic] {
            let u = weight_unfold(mdp, Objective::Termination, w_lo, hi, b).map_err(|e| e.to_string())?;
            let v = value_iteration(&u, mode, budget);
            if !v.exact {
                return Err(format!("unfolding at w_hi = {hi} has cycles; residual {}", rat::fmt(&v.residual)));
            }
            vals.push(v.values[u.node(mdp.initial(), 0).expect("0 in window")].clone());
        }
        let upper = vals.pop().expect("two");
        let lower = vals.pop().expect("two");
        out.push(Interval { w_hi: hi, lower, upper });
    }
    Ok(out)
}

/// Termination-level threshold and optimisation mode of a termination-based output.
pub fn termination_view(out: &ReductionOutput) -> Option<(Q, Mode)> {
    use ReductionTarget::*;
    let mode = if out.meta.kind == Kind::TerminationMin { Mode::Min } else { Mode::Max };
    match out.target {
        MaxTermination | MinTermination | OneCounterMaxTermination | OneCounterMinTermination | CostMax | CostMin => Some((out.theta.clone(), mode)),
        EnergyMax | EnergyMin => Some((Q::one() - &out.theta, mode)),
        _ => None,
    }
}

/// Checks that the interval contains ϑ when `negative` is false, and lies
/// strictly beyond ϑ in the optimisation direction when it is true.
pub fn certify_interval(out: &ReductionOutput, negative: bool, cfg: &VerifyConfig) -> Check {
    let name = format!("certify-interval[{}]", out.target);
    let Some((theta, mode)) = termination_view(out) else {
        return Check::fail(&name, "not a termination-probability target", &[("target", out.target.to_string())]);
    };
    let w_lo = cfg.w_lo.unwrap_or(-(out.meta.k as i64 + 1));
    let ivs = match termination_intervals(&out.mdp, mode, w_lo, &cfg.w_hi, cfg.budget) {
        Ok(v) => v,
        Err(e) => return Check::error(&name, e),
    };
    for pair in ivs.windows(2) {
        if pair[1].lower < pair[0].lower || pair[1].upper > pair[0].upper {
            return Check::fail(&name, "intervals do not shrink as w_hi grows", &[("w_hi", pair[1].w_hi.to_string())]);
        }
    }
    let last = ivs.last().expect("nonempty w_hi list");
    let width = &last.upper - &last.lower;
    let witness = [
        ("w_hi", last.w_hi.to_string()),
        ("lower", rat::fmt(&last.lower)),
        ("upper", rat::fmt(&last.upper)),
        ("theta", rat::fmt(&theta)),
    ];
    if width >= rat::half_pow(INTERVAL_WIDTH_EXP) {
        return Check::fail(&name, "interval too wide", &witness);
    }
    let ok = match (negative, mode) {
        (false, _) => last.lower <= theta && theta <= last.upper,
        (true, Mode::Max) => last.lower > theta,
        (true, Mode::Min) => last.upper < theta,
    };
    let detail = format!(
        "[{:.12}, {:.12}] at w_hi = {}, width ~{:.3e}, theta ~{:.12}",
        rat::approx(&last.lower),
        rat::approx(&last.upper),
        last.w_hi,
        rat::approx(&width),
        rat::approx(&theta)
    );
    if ok {
        let mut c = Check::pass(&name, detail).with_tolerance(format!("width < 2^-{INTERVAL_WIDTH_EXP}"));
        c.witness = wit(&witness);
        c
    } else if negative {
        Check::fail(&name, format!("optimum not certified beyond theta: {detail}"), &witness)
    } else {
        Check::fail(&name, format!("theta outside the certified interval: {detail}"), &witness)
    }
}

// Suite.

/// Rebuilds the output from `lrs` and compares.
pub fn check_instance(out: &ReductionOutput, lrs: &Lrs) -> Check {
    const NAME: &str = "instance-matches-lrs";
    let mode = if out.meta.rescaled { NormalizeMode::Always } else { NormalizeMode::Auto };
    let mut last = String::new();
    for collapsed in [true, false] {
        let opts = ReduceOptions { normalize: mode, cvar_collapsed: collapsed };
        match reduce_with(lrs, out.target, &opts) {
            Ok(r) if &r == out => return Check::pass(NAME, "rebuilding from the sequence reproduces the instance").with_tolerance("0"),
            Ok(r) => {
                last = if r.theta != out.theta {
                    format!("theta {} != {}", rat::fmt(&r.theta), rat::fmt(&out.theta))
                } else if r.meta != out.meta {
                    "meta differs".into()
                } else {
                    first_mdp_difference(&r.mdp, &out.mdp)
                };
            }
            Err(e) => return Check::error(NAME, e),
        }
    }
    Check::fail(NAME, "instance and sequence do not match", &[("difference", last)])
}

fn first_mdp_difference(a: &Mdp, b: &Mdp) -> String {
    for s in 0..a.num_states() {
        let n = a.name(s);
        let Some(t) = b.id(n) else { return format!("state {n} missing") };
        let (x, y) = (a.actions(s), b.actions(t));
        for act in x {
            match y.iter().find(|c| c.name == act.name) {
                None => return format!("{n}/{} missing", act.name),
                Some(c) if c.weight != act.weight => return format!("{n}/{} weight", act.name),
                Some(c) => {
                    let bx: Vec<(Q, &str)> = act.branches.iter().map(|(p, t)| (p.clone(), a.name(*t))).collect();
                    let by: Vec<(Q, &str)> = c.branches.iter().map(|(p, t)| (p.clone(), b.name(*t))).collect();
                    if bx != by {
                        return format!("{n}/{} branches", act.name);
                    }
                }
            }
        }
        if x.len() != y.len() {
            return format!("{n}: action count");
        }
    }
    if a.num_states() != b.num_states() {
        return "state count".into();
    }
    "marks or initial state".into()
}

pub fn check_valid(mdp: &Mdp) -> Check {
    const NAME: &str = "mdp-valid";
    match mdp.validate().first() {
        None => Check::pass(NAME, format!("{} states, {} actions", mdp.num_states(), mdp.num_transitions())).with_tolerance("0"),
        Some(v) => Check::fail(NAME, v.message.clone(), &[("location", v.location.clone())]),
    }
}

/// All direct checks on one instance.
pub fn direct_checks(inst: &Instance, cfg: &VerifyConfig) -> Vec<Check> {
    let k = inst.k as i64;
    vec![
        check_difference_sequence(inst, cfg.window),
        check_local_optimality(inst, -cfg.optimality.0 * k, cfg.optimality.1 * k),
        check_theta_series(inst, cfg.truncation),
        check_neumann_inverse(inst),
        check_series_identities(&inst.rec.a, 8),
        check_bellman_unrolling(inst, 2),
        check_deviation(inst, cfg.window),
    ]
}

/// Every check that applies to `out`, given the sequence it was built from.
pub fn run_suite(out: &ReductionOutput, lrs: &Lrs, cfg: &VerifyConfig) -> VerifyReport {
    use ReductionTarget::*;
    let mut rep = VerifyReport::default();
    rep.push(check_valid(&out.mdp));
    rep.push(check_instance(out, lrs));
    let profile = if out.target == CVaRMax { Profile::Cvar } else { Profile::General };
    let mode = if out.meta.rescaled { NormalizeMode::Always } else { NormalizeMode::Auto };
    rep.push(check_normalization(lrs, &normalization_for(lrs, mode), cfg.window, profile));
    let inst = match Instance::from_output(out, cfg) {
        Ok(i) => i,
        Err(e) => {
            rep.push(Check::error("instance", e));
            rep.sort();
            return rep;
        }
    };
    for c in direct_checks(&inst, cfg) {
        rep.push(c);
    }
    match out.target {
        ConditionalSsppMax => rep.push(check_conditional_identity(out, &inst.mdp, cfg)),
        TwoSidedPartial => rep.checks.extend(check_two_sided_identity(out, cfg)),
        CVaRMax => rep.checks.extend(check_cvar_identity(out, &inst.mdp, cfg)),
        MaxTerminationTime | MinTerminationTime => rep.checks.extend(check_time_identity(out, cfg)),
        CostMax | CostMin => rep.push(check_cost_identity(out, cfg)),
        OneCounterMaxTermination | OneCounterMinTermination => rep.push(check_one_counter(out, &inst.mdp)),
        _ => {}
    }
    if termination_view(out).is_some() {
        let negative = lrs.first_negative(cfg.window).is_some();
        rep.push(certify_interval(out, negative, cfg));
    }
    if out.mdp.id(S_INIT).is_none() {
        rep.push(Check::fail("mdp-valid", "no s_init state", &[("state", S_INIT.into())]));
    }
    rep.sort();
    rep
}
