//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Criterion 5 is a known failure (see README); the test asserts that it
//! fails exactly where expected and that everything else passes.

use num_traits::{One, Signed, Zero};
use positivity::lrs::{reference_negative, reference_nonnegative, Lrs, Profile};
use positivity::mdp::unfold::Mode;
use positivity::mdp::Mdp;
use positivity::rat::{self, Q};
use positivity::reductions::{normalization_for, reduce, NormalizeMode, ReductionOutput, ReductionTarget};
use positivity::threshold::theta::Kind;
use positivity::verify::{self, Check, Instance, Status, VerifyConfig, VerifyReport};
use std::time::{Duration, Instant};

// Pinned tolerances and budgets.
const WINDOW: usize = 50;
const TRUNCATION: u32 = 64;
const SERIES_N: u32 = 8;
const OPT_LO_K: i64 = 1;
const OPT_HI_K: i64 = 10;
const TRANSIENT_BUDGET: usize = 10_000;
const TRANSIENT_TOL_EXP: u32 = 30;
const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const W_HI: [i64; 2] = [20, 40];
const INTERVAL_WIDTH_EXP: u32 = 20;
const TIME_LIMIT_S: [u64; 10] = [1, 10, 10, 5, 30, 10, 60, 60, 30, 5];

/// Criteria expected to fail, with the reason printed next to them.
const KNOWN_FAILURES: &[usize] = &[5];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn from(checks: &[Check]) -> Self {
        let bad: Vec<&Check> = checks.iter().filter(|c| c.status == Status::Fail).collect();
        let warns = checks.iter().filter(|c| c.status == Status::Warn).count();
        if bad.is_empty() {
            Outcome { pass: true, detail: format!("{} checks, {} warnings", checks.len(), warns) }
        } else {
            let first = bad[0];
            Outcome { pass: false, detail: format!("{} of {} failed; first {}: {} {:?}", bad.len(), checks.len(), first.name, first.detail, first.witness) }
        }
    }
}

fn cfg() -> VerifyConfig {
    VerifyConfig {
        window: WINDOW,
        truncation: TRUNCATION,
        budget: TRANSIENT_BUDGET,
        optimality: (OPT_LO_K, OPT_HI_K),
        seeds: SEEDS.to_vec(),
        w_hi: W_HI.to_vec(),
        w_lo: None,
    }
}

fn instances() -> [(&'static str, Lrs); 2] {
    [("negative", reference_negative()), ("nonnegative", reference_nonnegative())]
}

const DIRECT: [ReductionTarget; 4] =
    [ReductionTarget::MaxTermination, ReductionTarget::MinTermination, ReductionTarget::PartialSsppMax, ReductionTarget::CVaRMax];

fn direct_instances() -> Vec<(&'static str, Lrs, Instance)> {
    let mut v = Vec::new();
    for (label, lrs) in instances() {
        for t in DIRECT {
            let out = reduce(&lrs, t).expect("reduce");
            v.push((label, lrs.clone(), Instance::from_output(&out, &cfg()).expect("instance")));
        }
    }
    v
}

/// Plain forward evaluation of u_0..u_n, written independently of the library.
fn oracle_terms(lrs: &Lrs, n: usize) -> Vec<Q> {
    let a = lrs.coefficients();
    let mut u: Vec<Q> = lrs.initials().to_vec();
    while u.len() <= n {
        let m = u.len();
        let mut x = Q::zero();
        for (i, ai) in a.iter().enumerate() {
            x += ai * &u[m - 1 - i];
        }
        u.push(x);
    }
    u.truncate(n + 1);
    u
}

fn half_pow(e: u32) -> Q {
    Q::one() / Q::from_integer(num_bigint::BigInt::from(2).pow(e))
}

// 1. Normalization.
fn criterion_1() -> Outcome {
    let mut checks = Vec::new();
    for (label, lrs) in instances() {
        for mode in [NormalizeMode::Auto, NormalizeMode::Always] {
            let norm = normalization_for(&lrs, mode);
            let u = oracle_terms(&lrs, WINDOW);
            let v = oracle_terms(&norm.normalized, WINDOW);
            let mut lp = Q::one();
            for n in 0..=WINDOW {
                if v[n] != &norm.mu * &lp * &u[n] {
                    return Outcome { pass: false, detail: format!("{label} {mode:?}: v_{n} != mu·lambda^n·u_{n}") };
                }
                lp *= &norm.lambda;
            }
            let viol = norm.normalized.check_assumption(Profile::General);
            if !viol.is_empty() {
                return Outcome { pass: false, detail: format!("{label} {mode:?}: {}", viol[0]) };
            }
            checks.push(verify::check_normalization(&lrs, &norm, WINDOW, Profile::General));
        }
        let cv = reduce(&lrs, ReductionTarget::CVaRMax).expect("cvar");
        let viol = cv.meta.lrs.check_assumption(Profile::Cvar);
        if !viol.is_empty() {
            return Outcome { pass: false, detail: format!("{label} cvar profile: {}", viol[0]) };
        }
    }
    Outcome::from(&checks)
}

// 2. Difference-sequence encoding.
fn criterion_2(direct: &[(&str, Lrs, Instance)]) -> Outcome {
    let mut checks = Vec::new();
    for (label, _, inst) in direct {
        let off = inst.kind.base_lo(inst.k);
        let u = oracle_terms(&inst.lrs, WINDOW);
        for (n, un) in u.iter().enumerate() {
            if inst.table.d(off + n as i64).as_ref() != Some(un) {
                return Outcome { pass: false, detail: format!("{label} {}: d({off}+{n}) != u'_{n}", inst.kind.name()) };
            }
        }
        checks.push(verify::check_difference_sequence(inst, WINDOW));
    }
    Outcome::from(&checks)
}

// 3. Closed-form thresholds against the truncated series.
fn criterion_3(direct: &[(&str, Lrs, Instance)]) -> Outcome {
    let mut checks = Vec::new();
    for (label, _, inst) in direct {
        // Oracle: partial sum from the value table and our own tail bound.
        let mut sum = Q::zero();
        for w in 1..=TRUNCATION as i64 {
            sum += half_pow(w as u32) * inst.table.get(positivity::threshold::theta::Anchor::T, w).expect("table covers T");
        }
        let tail = half_pow(TRUNCATION);
        let bound = match inst.kind {
            // values at t grow at most linearly: |V(t, w)| <= w + k + 1
            Kind::Partial => Q::from_integer((TRUNCATION as i64 + 2 + inst.k as i64).into()) * &tail,
            _ => rat::max_abs(&inst.rec.base) * &tail,
        };
        let residual = (&inst.theta - &sum).abs();
        if residual > bound {
            return Outcome { pass: false, detail: format!("{label} {}: residual {} > bound {}", inst.kind.name(), rat::fmt(&residual), rat::fmt(&bound)) };
        }
        checks.push(verify::check_theta_series(inst, TRUNCATION));
    }
    Outcome::from(&checks)
}

// 4. Matrix identities.
fn criterion_4(direct: &[(&str, Lrs, Instance)]) -> Outcome {
    let mut checks = Vec::new();
    for (_, _, inst) in direct {
        checks.push(verify::check_bellman_unrolling(inst, 2));
        checks.push(verify::check_neumann_inverse(inst));
        checks.push(verify::check_series_identities(&inst.rec.a, SERIES_N));
    }
    Outcome::from(&checks)
}

// 5. Local optimality of the prescribed actions.
fn criterion_5(direct: &[(&str, Lrs, Instance)]) -> (Outcome, Vec<(String, Check)>) {
    let mut checks = Vec::new();
    let mut failed = Vec::new();
    for (label, _, inst) in direct {
        let k = inst.k as i64;
        let c = verify::check_local_optimality(inst, -OPT_LO_K * k, OPT_HI_K * k);
        if c.status == Status::Fail {
            failed.push((label.to_string(), c.clone()));
        }
        checks.push(c);
    }
    (Outcome::from(&checks), failed)
}

// 6. Sign equivalence via single deviations.
fn criterion_6(direct: &[(&str, Lrs, Instance)]) -> Outcome {
    let mut checks = Vec::new();
    for (label, _, inst) in direct {
        let c = verify::check_deviation(inst, WINDOW);
        if *label == "negative" {
            // Oracle: margin = 2^-w·|u'_(w - offset)|.
            let Some(w) = c.witness.get("choice_weight").and_then(|s| s.parse::<i64>().ok()) else {
                return Outcome { pass: false, detail: format!("{}: no deviation witness", c.name) };
            };
            let off = inst.kind.base_lo(inst.k);
            let u = oracle_terms(&inst.lrs, (w - off) as usize);
            let want = half_pow(w as u32) * u[(w - off) as usize].abs();
            let got = c.witness.get("margin").map(|s| rat::parse(s).expect("rational"));
            if got.as_ref() != Some(&want) || !want.is_positive() {
                return Outcome { pass: false, detail: format!("{}: margin {:?}, oracle {}", c.name, got.map(|g| rat::fmt(&g)), rat::fmt(&want)) };
            }
            println!("    {} margin {} at weight {w}", c.name, rat::fmt(&want));
        } else if c.status != Status::Pass {
            return Outcome { pass: false, detail: format!("{}: {}", c.name, c.detail) };
        }
        checks.push(c);
    }
    Outcome::from(&checks)
}

// 7. Wrapper identities.
fn criterion_7() -> Outcome {
    let cfg = cfg();
    let mut checks = Vec::new();
    for (_, lrs) in instances() {
        let cond = reduce(&lrs, ReductionTarget::ConditionalSsppMax).expect("conditional");
        let partial = Instance::from_output(&cond, &cfg).expect("partial").mdp;
        checks.push(verify::check_conditional_identity(&cond, &partial, &cfg));

        let two = reduce(&lrs, ReductionTarget::TwoSidedPartial).expect("two-sided");
        let alpha = two.meta.lrs.alpha_sum();
        let t_closed = Q::from_integer(2.into()) + Q::from_integer(2.into()) / (Q::one() - alpha);
        if two.extra("expected_steps") != Some(t_closed.clone()) {
            return Outcome { pass: false, detail: format!("two-sided expected_steps != 2 + 2/(1 - alpha) = {}", rat::fmt(&t_closed)) };
        }
        checks.extend(verify::check_two_sided_identity(&two, &cfg));

        let cv = reduce(&lrs, ReductionTarget::CVaRMax).expect("cvar");
        if cv.cvar_p != Some(rat::q(1, 2)) || Some(&cv.theta * rat::q(3, 2)) != cv.extra("theta_aux") {
            return Outcome { pass: false, detail: "cvar wrapper: p != 1/2 or theta != (2/3)·theta_aux".into() };
        }
        let aux = Instance::from_output(&cv, &cfg).expect("aux").mdp;
        checks.extend(verify::check_cvar_identity(&cv, &aux, &cfg));

        for t in [ReductionTarget::MaxTerminationTime, ReductionTarget::MinTerminationTime] {
            let out = reduce(&lrs, t).expect("time");
            let th = out.extra("theta_termination").expect("theta_termination");
            if out.theta != rat::qi(11) - rat::qi(3) * th {
                return Outcome { pass: false, detail: format!("{t}: theta != 11 - 3·theta_termination") };
            }
            checks.extend(verify::check_time_identity(&out, &cfg));
        }
    }
    for c in &checks {
        if c.status == Status::Pass && c.name.starts_with("wrapper-") && !c.detail.contains("weights") && c.tolerance.as_deref() != Some(&format!("2^-{TRANSIENT_TOL_EXP}")) && c.tolerance.as_deref() != Some("0") {
            return Outcome { pass: false, detail: format!("{}: unexpected tolerance {:?}", c.name, c.tolerance) };
        }
    }
    Outcome::from(&checks)
}

// 8. Certified intervals from weight unfolding.
fn criterion_8() -> Outcome {
    let cfg = cfg();
    let mut checks = Vec::new();
    for (label, lrs) in instances() {
        for t in [ReductionTarget::MaxTermination, ReductionTarget::EnergyMin, ReductionTarget::CostMax] {
            let out = reduce(&lrs, t).expect("reduce");
            let c = verify::certify_interval(&out, label == "negative", &cfg);
            if c.status == Status::Pass {
                let lo = rat::parse(&c.witness["lower"]).expect("lower");
                let hi = rat::parse(&c.witness["upper"]).expect("upper");
                if &hi - &lo >= half_pow(INTERVAL_WIDTH_EXP) {
                    return Outcome { pass: false, detail: format!("{label} {t}: width not below 2^-{INTERVAL_WIDTH_EXP}") };
                }
            }
            checks.push(c);
        }
    }
    Outcome::from(&checks)
}

// 9. One-counter conversion.
fn criterion_9() -> Outcome {
    let mut checks = Vec::new();
    for (label, lrs) in instances() {
        for (src, oc, mode) in [
            (ReductionTarget::MaxTermination, ReductionTarget::OneCounterMaxTermination, Mode::Max),
            (ReductionTarget::MinTermination, ReductionTarget::OneCounterMinTermination, Mode::Min),
        ] {
            let a = reduce(&lrs, src).expect("reduce");
            let b = reduce(&lrs, oc).expect("reduce");
            if let Some(w) = b.mdp.weights().find(|w| !(w.is_zero() || w.abs() == Q::one())) {
                return Outcome { pass: false, detail: format!("{label} {oc}: weight {}", rat::fmt(w)) };
            }
            checks.push(verify::check_one_counter(&b, &a.mdp));
            let w_lo = -(a.meta.k as i64 + 1);
            let ia = verify::termination_intervals(&a.mdp, mode, w_lo, &W_HI, TRANSIENT_BUDGET);
            let ib = verify::termination_intervals(&b.mdp, mode, w_lo, &W_HI, TRANSIENT_BUDGET);
            let (Ok(ia), Ok(ib)) = (ia, ib) else {
                return Outcome { pass: false, detail: format!("{label} {oc}: unfolding failed") };
            };
            let (x, y) = (ia.last().expect("w_hi"), ib.last().expect("w_hi"));
            if x.lower.clone().max(y.lower.clone()) > x.upper.clone().min(y.upper.clone()) {
                return Outcome { pass: false, detail: format!("{label} {oc}: intervals disjoint") };
            }
        }
    }
    Outcome::from(&checks)
}

// 10. Determinism and JSON round trips.
fn criterion_10() -> Outcome {
    for (label, lrs) in instances() {
        let j: String = serde_json::to_string(&lrs).expect("lrs json");
        if serde_json::from_str::<Lrs>(&j).ok().as_ref() != Some(&lrs) {
            return Outcome { pass: false, detail: format!("{label}: Lrs round trip") };
        }
        for t in ReductionTarget::ALL {
            let a = reduce(&lrs, t).expect("reduce");
            let b = reduce(&lrs, t).expect("reduce");
            if a.to_json() != b.to_json() {
                return Outcome { pass: false, detail: format!("{label} {t}: outputs differ between runs") };
            }
            if serde_json::from_str::<ReductionOutput>(&a.to_json()).ok().as_ref() != Some(&a) {
                return Outcome { pass: false, detail: format!("{label} {t}: ReductionOutput round trip") };
            }
            let m = serde_json::to_string(&a.mdp).expect("mdp json");
            if serde_json::from_str::<Mdp>(&m).ok().as_ref() != Some(&a.mdp) {
                return Outcome { pass: false, detail: format!("{label} {t}: Mdp round trip") };
            }
        }
    }
    let out = reduce(&reference_negative(), ReductionTarget::MaxTermination).expect("reduce");
    let inst = Instance::from_output(&out, &cfg()).expect("instance");
    let mut rep = VerifyReport::default();
    rep.push(verify::check_valid(&out.mdp));
    rep.push(verify::check_deviation(&inst, WINDOW));
    rep.push(verify::check_local_optimality(&inst, -2, 4));
    let j = rep.to_json();
    if serde_json::from_str::<VerifyReport>(&j).ok().as_ref() != Some(&rep) {
        return Outcome { pass: false, detail: "VerifyReport round trip".into() };
    }
    Outcome { pass: true, detail: format!("{} targets x 2 instances byte-identical; all types round-trip", ReductionTarget::ALL.len()) }
}

fn report(i: usize, what: &str, o: &Outcome, took: Duration) -> bool {
    let limit = Duration::from_secs(TIME_LIMIT_S[i - 1]);
    let in_time = took <= limit;
    let ok = o.pass && in_time;
    let timing = if in_time { String::new() } else { format!(" (over {}s limit)", limit.as_secs()) };
    let known = if !ok && KNOWN_FAILURES.contains(&i) { " [known]" } else { "" };
    println!("{} criterion {i:>2} {what}: {}{timing} [{:.2}s]{known}", if ok { "PASS" } else { "FAIL" }, o.detail, took.as_secs_f64());
    ok
}

#[test]
fn acceptance_criteria() {
    let mut results = Vec::new();
    let mut run = |i: usize, what: &str, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let o = f();
        results.push((i, report(i, what, &o, t0.elapsed())));
    };
    run(1, "normalization", &mut criterion_1);
    let direct = direct_instances();
    run(2, "difference sequence", &mut || criterion_2(&direct));
    run(3, "closed-form thresholds", &mut || criterion_3(&direct));
    run(4, "matrix identities", &mut || criterion_4(&direct));
    let mut c5_failed = Vec::new();
    run(5, "local optimality", &mut || {
        let (o, f) = criterion_5(&direct);
        c5_failed = f;
        o
    });
    run(6, "sign equivalence", &mut || criterion_6(&direct));
    run(7, "wrapper identities", &mut criterion_7);
    run(8, "certified intervals", &mut criterion_8);
    run(9, "one-counter conversion", &mut criterion_9);
    run(10, "determinism and round trips", &mut criterion_10);

    // The known failure must be the documented one: only termination-min,
    // where gamma at t beats the prescribed action.
    for (label, c) in &c5_failed {
        println!("    known: {label} {} {:?}", c.name, c.witness);
        assert_eq!(c.name, "local-optimality[termination-min]", "unexpected local-optimality failure on {label}");
        assert_eq!(c.witness.get("state").map(String::as_str), Some("t"));
        assert!(c.witness.get("better_action").is_some_and(|a| a.starts_with("gamma")));
    }
    for (i, ok) in results {
        assert_eq!(ok, !KNOWN_FAILURES.contains(&i), "criterion {i} {}", if ok { "unexpectedly passed" } else { "failed" });
    }
}
