//! Rational linear recurrence sequences and their sign-preserving rescaling.

use crate::rat::{self, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LrsError {
    #[error("order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("order {order} but {what} has length {len}")]
    LengthMismatch { order: usize, what: &'static str, len: usize },
}

/// `u_{n+k} = α₁ u_{n+k-1} + ... + α_k u_n` with `u_j = β_j` for `j < k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LrsWire", into = "LrsWire")]
pub struct Lrs {
    coefficients: Vec<Q>,
    initials: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct LrsWire {
    order: usize,
    #[serde(with = "rat::serde_qvec")]
    coefficients: Vec<Q>,
    #[serde(with = "rat::serde_qvec")]
    initials: Vec<Q>,
}

impl TryFrom<LrsWire> for Lrs {
    type Error = LrsError;
    fn try_from(w: LrsWire) -> Result<Self, LrsError> {
        let l = Lrs::new(w.coefficients, w.initials)?;
        if l.order() != w.order {
            return Err(LrsError::LengthMismatch { order: w.order, what: "coefficients", len: l.order() });
        }
        Ok(l)
    }
}

impl From<Lrs> for LrsWire {
    fn from(l: Lrs) -> Self {
        LrsWire { order: l.order(), coefficients: l.coefficients, initials: l.initials }
    }
}

impl Lrs {
    pub fn new(coefficients: Vec<Q>, initials: Vec<Q>) -> Result<Self, LrsError> {
        let k = coefficients.len();
        if k < 2 {
            return Err(LrsError::OrderTooSmall(k));
        }
        if initials.len() != k {
            return Err(LrsError::LengthMismatch { order: k, what: "initials", len: initials.len() });
        }
        Ok(Lrs { coefficients, initials })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_pairs(alphas: &[(i64, i64)], betas: &[(i64, i64)]) -> Result<Self, LrsError> {
        let f = |v: &[(i64, i64)]| v.iter().map(|&(n, d)| rat::q(n, d)).collect();
        Lrs::new(f(alphas), f(betas))
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// α₁..α_k.
    pub fn coefficients(&self) -> &[Q] {
        &self.coefficients
    }

    /// β₀..β_{k-1}.
    pub fn initials(&self) -> &[Q] {
        &self.initials
    }

    /// Σ|αᵢ|.
    pub fn alpha_sum(&self) -> Q {
        rat::sum_abs(&self.coefficients)
    }

    pub fn beta_max(&self) -> Q {
        rat::max_abs(&self.initials)
    }

    pub fn eval(&self, n: usize) -> Q {
        self.terms(n).pop().expect("terms is never empty")
    }

    /// `u_0..=u_n`.
    pub fn terms(&self, n: usize) -> Vec<Q> {
        let k = self.order();
        let mut u: Vec<Q> = self.initials.iter().take(n + 1).cloned().collect();
        while u.len() <= n {
            let m = u.len();
            let next = (1..=k).fold(Q::zero(), |acc, i| acc + &self.coefficients[i - 1] * &u[m - i]);
            u.push(next);
        }
        u
    }

    /// Smallest `n <= bound` with `u_n < 0`.
    pub fn first_negative(&self, bound: usize) -> Option<usize> {
        self.terms(bound).iter().position(|x| x.is_negative())
    }

    pub fn first_negative_initial(&self) -> Option<usize> {
        self.initials.iter().position(|x| x.is_negative())
    }

    pub fn check_assumption(&self, profile: Profile) -> Vec<Violation> {
        let k = self.order() as i64;
        let a = self.alpha_sum();
        let b = self.beta_max();
        let mut out = Vec::new();
        let a_bound = rat::q(1, 5 * k + 5);
        let a_ok = match profile {
            Profile::General => a < a_bound,
            Profile::Cvar => a <= a_bound,
        };
        if !a_ok {
            out.push(Violation { bound: "alpha_sum", value: a.clone(), limit: a_bound });
        }
        let b_abs = Q::one() / (rat::qi(4) * k_pow(k, 2 * k + 2));
        if !(b < b_abs) {
            out.push(Violation { bound: "beta_absolute", value: b.clone(), limit: b_abs });
        }
        let (b_rel, ok) = match profile {
            Profile::General => {
                let l = &a / rat::qi(4);
                (l.clone(), b < l)
            }
            Profile::Cvar => {
                let l = &a / rat::qi(3);
                (l.clone(), b <= l)
            }
        };
        // all-zero input: nothing to scale against
        if !ok && !(a.is_zero() && b.is_zero()) {
            out.push(Violation { bound: "beta_relative", value: b, limit: b_rel });
        }
        out
    }

    pub fn normalize(&self) -> Normalization {
        let k = self.order() as i64;
        let base = rat::q(1, 5 * k + 5);
        let a = self.alpha_sum();
        let mut lambda = if a > Q::one() { &base / &a } else { base.clone() };
        let scaled = |lambda: &Q| -> Vec<Q> {
            let mut p = Q::one();
            self.coefficients
                .iter()
                .map(|x| {
                    p *= lambda;
                    x * &p
                })
                .collect()
        };
        let mut alphas = scaled(&lambda);
        while rat::sum_abs(&alphas) >= base {
            lambda /= rat::qi(2);
            alphas = scaled(&lambda);
        }
        let a2 = rat::sum_abs(&alphas);
        let b = self.beta_max();
        let kp = rat::qi(4) * k_pow(k, 2 * k + 2);
        let mut degenerate = a.is_zero() && b.is_zero();
        let mu = if b.is_zero() {
            Q::one()
        } else if a2.is_zero() {
            degenerate = true;
            Q::one() / (kp * rat::qi(2) * &b)
        } else {
            rat::min(a2, Q::one()) / (kp * &b)
        };
        let mut p = mu.clone();
        let betas = self
            .initials
            .iter()
            .map(|x| {
                let v = x * &p;
                p *= &lambda;
                v
            })
            .collect();
        Normalization { lambda, mu, normalized: Lrs { coefficients: alphas, initials: betas }, degenerate }
    }
}

fn k_pow(k: i64, e: i64) -> Q {
    rat::pow(&rat::qi(k), e as u32)
}

/// Which set of bounds `check_assumption` tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    General,
    Cvar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub bound: &'static str,
    pub value: Q,
    pub limit: Q,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} not below {}", self.bound, rat::fmt(&self.value), rat::fmt(&self.limit))
    }
}

/// Result of [`Lrs::normalize`]: `normalized` evaluates to `μ·λⁿ·u_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    pub lambda: Q,
    pub mu: Q,
    pub normalized: Lrs,
    /// All-zero input, or zero coefficients with nonzero initials (no μ meets the relative bound).
    pub degenerate: bool,
}

impl Normalization {
    pub fn identity(lrs: &Lrs) -> Self {
        Normalization { lambda: Q::one(), mu: Q::one(), normalized: lrs.clone(), degenerate: false }
    }
}

/// k = 2, α = (1/32, −1/32), β = (1/512, 1/1024); first negative at n = 2.
pub fn reference_negative() -> Lrs {
    Lrs::from_pairs(&[(1, 32), (-1, 32)], &[(1, 512), (1, 1024)]).expect("order 2")
}

/// u_n = u_{n−1}/2 + u_{n−2}/4 with u_0 = u_1 = 1; positive forever.
/// Needs rescaling before use.
pub fn reference_nonnegative() -> Lrs {
    Lrs::from_pairs(&[(1, 2), (1, 4)], &[(1, 1), (1, 1)]).expect("order 2")
}
