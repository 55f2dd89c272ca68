//! Closed-form thresholds and exact value tables along the prescribed scheduler.

use super::chain::transfer_matrices;
use super::matrix::{dot, neumann, vec_add, vec_scale, MatrixError, RatMatrix};
use crate::gadgets::{partial_base, partial_beta_bound};
use crate::rat::{self, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("bound violated: {0}")]
    Bound(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// The four objectives whose values are driven directly by the recurrence gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    TerminationMax,
    TerminationMin,
    Partial,
    CvarAux,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::TerminationMax, Kind::TerminationMin, Kind::Partial, Kind::CvarAux];

    /// Lowest weight of the base window; also the offset of the difference sequence.
    pub fn base_lo(self, k: usize) -> i64 {
        match self {
            Kind::TerminationMax | Kind::TerminationMin => 0,
            Kind::Partial => 1 - k as i64,
            Kind::CvarAux => -(k as i64),
        }
    }

    /// Lowest weight of block `n` (blocks are k consecutive weights).
    pub fn block_lo(self, k: usize, n: i64) -> i64 {
        let shift = if self == Kind::Partial { 1 } else { 0 };
        n * k as i64 + shift
    }

    /// Index of the base block.
    pub fn base_block(self) -> i64 {
        match self {
            Kind::TerminationMax | Kind::TerminationMin => 0,
            Kind::Partial | Kind::CvarAux => -1,
        }
    }

    pub fn minimizing(self) -> bool {
        self == Kind::TerminationMin
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::TerminationMax => "termination-max",
            Kind::TerminationMin => "termination-min",
            Kind::Partial => "partial",
            Kind::CvarAux => "cvar-aux",
        }
    }
}

pub fn check_bounds(kind: Kind, alphas: &[Q], betas: &[Q]) -> Result<(), ThresholdError> {
    let k = alphas.len() as i64;
    let a = rat::sum_abs(alphas);
    let bad = |s: String| Err(ThresholdError::Bound(s));
    let (a_ok, b_lim, b_strict) = match kind {
        Kind::TerminationMax | Kind::TerminationMin => (a < Q::one(), rat::q(1, k + 1), true),
        Kind::Partial => (a < rat::q(1, 4), partial_beta_bound(k as usize), true),
        Kind::CvarAux => (a.is_positive() && a <= rat::q(1, 5 * (k + 1)), &a / rat::qi(3), false),
    };
    if !a_ok {
        return bad(format!("coefficient mass {} out of range for {}", rat::fmt(&a), kind.name()));
    }
    for (j, b) in betas.iter().enumerate() {
        if b.is_negative() || (b_strict && b >= &b_lim) || (!b_strict && b > &b_lim) {
            return bad(format!("initial value {j} = {} outside [0, {}]", rat::fmt(b), rat::fmt(&b_lim)));
        }
    }
    Ok(())
}

/// Base block values (t entries by descending weight, then s entries).
pub fn base_vector(kind: Kind, alphas: &[Q], betas: &[Q]) -> Vec<Q> {
    let k = betas.len();
    let alpha = rat::sum_abs(alphas);
    let mut t = vec![Q::zero(); k];
    let mut s = vec![Q::zero(); k];
    for (j, b) in betas.iter().enumerate() {
        // position of weight base_lo + j inside the descending block
        let r = k - 1 - j;
        match kind {
            Kind::TerminationMax | Kind::TerminationMin => {
                let p = rat::q((k - j) as i64, k as i64 + 1);
                t[r] = if kind == Kind::TerminationMax { &p + b } else { &p - b };
                s[r] = p;
            }
            Kind::Partial => {
                let p = partial_base(k, j);
                t[r] = &p + b;
                s[r] = p;
            }
            Kind::CvarAux => {
                let e = &alpha * rat::qi(-3 * k as i64 + 2 * j as i64 - 1);
                s[r] = &e - b;
                t[r] = e;
            }
        }
    }
    t.extend(s);
    t
}

/// Everything needed to run the block recursion for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recursion {
    pub kind: Kind,
    pub k: usize,
    pub a: RatMatrix,
    /// Coefficient of n in the affine term (zero unless partial).
    pub a_vec: Vec<Q>,
    /// Constant affine term (zero unless partial).
    pub b_vec: Vec<Q>,
    pub c: Vec<Q>,
    pub base: Vec<Q>,
}

pub fn build_recursion(kind: Kind, alphas: &[Q], betas: &[Q]) -> Result<Recursion, ThresholdError> {
    check_bounds(kind, alphas, betas)?;
    let k = alphas.len();
    let (a, g) = transfer_matrices(alphas);
    let mut a_vec = vec![Q::zero(); 2 * k];
    let mut b_vec = vec![Q::zero(); 2 * k];
    if kind == Kind::Partial {
        for r in 0..2 * k {
            for i in 0..k {
                let p = g.get(r, i);
                a_vec[r] += p * rat::qi(k as i64);
                b_vec[r] += p * rat::qi(i as i64 + 1);
            }
        }
    }
    let c = (0..2 * k)
        .map(|r| match (kind, r < k) {
            (_, false) => Q::zero(),
            (Kind::Partial, true) => rat::half_pow((k - r) as u32),
            (_, true) => rat::half_pow((k - 1 - r) as u32),
        })
        .collect();
    Ok(Recursion { kind, k, a, a_vec, b_vec, c, base: base_vector(kind, alphas, betas) })
}

impl Recursion {
    /// `v_n` from `v_{n−1}`.
    pub fn step(&self, prev: &[Q], n: i64) -> Vec<Q> {
        let mut v = self.a.mul_vec(prev);
        if self.kind == Kind::Partial {
            v = vec_add(&v, &vec_add(&vec_scale(&self.a_vec, &rat::qi(n)), &self.b_vec));
        }
        v
    }

    pub fn scale(&self) -> Q {
        rat::half_pow(self.k as u32)
    }

    pub fn theta(&self) -> Result<Q, ThresholdError> {
        let k = self.k;
        let n = neumann(&self.a, &self.scale())?;
        Ok(match self.kind {
            Kind::TerminationMax | Kind::TerminationMin => dot(&self.c, &n.mul_vec(&self.base)) - &self.base[k - 1],
            Kind::CvarAux => {
                let v0 = self.a.mul_vec(&self.base);
                dot(&self.c, &n.mul_vec(&v0)) - &v0[k - 1]
            }
            Kind::Partial => {
                let (s2, s3) = partial_series(&self.a, k)?;
                let main = self.a.mul(&n).mul_vec(&self.base);
                let total = vec_add(&main, &vec_add(&s2.mul_vec(&self.a_vec), &s3.mul_vec(&self.b_vec)));
                dot(&self.c, &total)
            }
        })
    }

    /// Exact values at `t` and `s` from the base window up to block `n_max`.
    pub fn table(&self, n_max: i64) -> ValueTable {
        let k = self.k;
        let b0 = self.kind.base_block();
        let mut blocks = vec![self.base.clone()];
        for n in (b0 + 1)..=n_max {
            let next = self.step(blocks.last().expect("nonempty"), n);
            blocks.push(next);
        }
        let mut t = Vec::new();
        let mut s = Vec::new();
        for v in &blocks {
            for r in (0..k).rev() {
                t.push(v[r].clone());
                s.push(v[k + r].clone());
            }
        }
        ValueTable { kind: self.kind, lo: self.kind.block_lo(k, b0), t, s }
    }
}

/// `(S₂, S₃)` for the partial-expectation threshold with r = 2^{−k}:
/// S₃ = Σ_n rⁿ Σ_{i≤n} Aⁱ and S₂ = Σ_n rⁿ Σ_{i≤n} (n−i) Aⁱ.
pub fn partial_series(a: &RatMatrix, k: usize) -> Result<(RatMatrix, RatMatrix), ThresholdError> {
    let m = a.rows();
    let id = RatMatrix::identity(m);
    let r = rat::half_pow(k as u32);
    let q = rat::two_pow(k as u32) / (rat::two_pow(k as u32) - Q::one());
    let an = a.mul(&neumann(a, &r)?);
    let i_a = id.sub(a);
    let inv = i_a.inverse()?;
    let s3 = inv.mul(&id.scale(&q).sub(&an));
    let s2 = inv.mul(&inv).mul(&an.sub(&a.scale(&q)).add(&i_a.scale(&(&q * &q * &r))));
    Ok((s2, s3))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Anchor {
    T,
    S,
}

/// Values at `t` and `s` for consecutive weights starting at `lo`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueTable {
    pub kind: Kind,
    pub lo: i64,
    pub t: Vec<Q>,
    pub s: Vec<Q>,
}

impl ValueTable {
    pub fn hi(&self) -> i64 {
        self.lo + self.t.len() as i64 - 1
    }

    pub fn get(&self, a: Anchor, w: i64) -> Option<&Q> {
        if w < self.lo {
            return None;
        }
        let v = match a {
            Anchor::T => &self.t,
            Anchor::S => &self.s,
        };
        v.get((w - self.lo) as usize)
    }

    /// Signed difference that reproduces the normalized sequence.
    pub fn d(&self, w: i64) -> Option<Q> {
        let (t, s) = (self.get(Anchor::T, w)?, self.get(Anchor::S, w)?);
        Some(if self.kind.minimizing() { s - t } else { t - s })
    }
}

pub fn theta_termination(alphas: &[Q], betas: &[Q], minimize: bool) -> Result<(Q, Vec<Q>), ThresholdError> {
    let kind = if minimize { Kind::TerminationMin } else { Kind::TerminationMax };
    let r = build_recursion(kind, alphas, betas)?;
    Ok((r.theta()?, r.base))
}

pub fn theta_partial(alphas: &[Q], betas: &[Q]) -> Result<(Q, Vec<Q>), ThresholdError> {
    let r = build_recursion(Kind::Partial, alphas, betas)?;
    Ok((r.theta()?, r.base))
}

pub fn theta_cvar_aux(alphas: &[Q], betas: &[Q]) -> Result<Q, ThresholdError> {
    build_recursion(Kind::CvarAux, alphas, betas)?.theta()
}

pub fn scheduler_values(kind: Kind, alphas: &[Q], betas: &[Q], n_max: i64) -> Result<ValueTable, ThresholdError> {
    Ok(build_recursion(kind, alphas, betas)?.table(n_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qi};

    fn ex() -> (Vec<Q>, Vec<Q>) {
        (vec![q(1, 32), q(-1, 32)], vec![q(1, 512), q(1, 1024)])
    }

    #[test]
    fn termination_base_and_zero_instance() {
        let (a, b) = ex();
        let (_, v0) = theta_termination(&a, &b, false).unwrap();
        assert_eq!(v0[1], q(2, 3) + q(1, 512));
        let z = vec![qi(0), qi(0)];
        let (th, _) = theta_termination(&z, &z, false).unwrap();
        // only w = 1 contributes: (1/2)·(1/3)
        assert_eq!(th, q(1, 6));
    }

    #[test]
    fn table_matches_base_window() {
        let (a, b) = ex();
        let t = scheduler_values(Kind::TerminationMax, &a, &b, 3).unwrap();
        assert_eq!(t.lo, 0);
        assert_eq!(t.get(Anchor::T, 0), Some(&(q(2, 3) + q(1, 512))));
        assert_eq!(t.d(0), Some(q(1, 512)));
        assert_eq!(t.d(1), Some(q(1, 1024)));
        assert_eq!(t.d(2), Some(q(-1, 32768)));
        let p = scheduler_values(Kind::Partial, &a, &b, 3).unwrap();
        assert_eq!(p.lo, -1);
        assert_eq!(p.d(-1), Some(q(1, 512)));
        let c = scheduler_values(Kind::CvarAux, &a, &b, 3).unwrap();
        assert_eq!(c.lo, -2);
        assert_eq!(c.d(0), Some(q(-1, 32768)));
    }

    #[test]
    fn series_identities_small() {
        let (a, _) = ex();
        let (m, _) = transfer_matrices(&a);
        let (s2, s3) = partial_series(&m, 2).unwrap();
        // truncate the defining double series far enough that it is visibly close
        let r = rat::half_pow(2);
        let mut acc2 = RatMatrix::zeros(4, 4);
        let mut acc3 = RatMatrix::zeros(4, 4);
        for n in 0..12u32 {
            let mut in2 = RatMatrix::zeros(4, 4);
            let mut in3 = RatMatrix::zeros(4, 4);
            for i in 0..=n {
                in2 = in2.add(&m.pow(i).scale(&qi((n - i) as i64)));
                in3 = in3.add(&m.pow(i));
            }
            acc2 = acc2.add(&in2.scale(&rat::pow(&r, n)));
            acc3 = acc3.add(&in3.scale(&rat::pow(&r, n)));
        }
        assert!(s3.sub(&acc3).norm_inf() < rat::half_pow(18));
        assert!(s2.sub(&acc2).norm_inf() < rat::half_pow(16));
    }
}
