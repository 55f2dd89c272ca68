//! Dense exact rational matrices.

use crate::rat::{self, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("scaled norm {0} is not below 1")]
    NormTooLarge(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<String>>", into = "Vec<Vec<String>>")]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl TryFrom<Vec<Vec<String>>> for RatMatrix {
    type Error = String;
    fn try_from(v: Vec<Vec<String>>) -> Result<Self, String> {
        let rows: Result<Vec<Vec<Q>>, _> = v.iter().map(|r| r.iter().map(|s| rat::parse(s)).collect()).collect();
        RatMatrix::from_rows(rows.map_err(|e| e.to_string())?).ok_or_else(|| "ragged matrix".to_string())
    }
}

impl From<RatMatrix> for Vec<Vec<String>> {
    fn from(m: RatMatrix) -> Self {
        (0..m.rows).map(|i| m.row(i).iter().map(rat::fmt).collect()).collect()
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    /// `None` for ragged input.
    pub fn from_rows(rows: Vec<Vec<Q>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return None;
        }
        Some(RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(l, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, o: &RatMatrix) -> RatMatrix {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &RatMatrix) -> RatMatrix {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &RatMatrix, f: impl Fn(&Q, &Q) -> Q) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "dimension mismatch");
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn scale(&self, c: &Q) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, e: u32) -> RatMatrix {
        (0..e).fold(Self::identity(self.rows), |acc, _| acc.mul(self))
    }

    /// Maximal absolute row sum.
    pub fn norm_inf(&self) -> Q {
        (0..self.rows).map(|i| rat::sum_abs(self.row(i))).max().unwrap_or_else(Q::zero)
    }

    /// Gauss-Jordan elimination; pivots are chosen to keep entries small.
    pub fn inverse(&self) -> Result<RatMatrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let size = |x: &Q| x.numer().bits() + x.denom().bits();
            let p = (c..n).filter(|&r| !a.get(r, c).is_zero()).min_by_key(|&r| size(a.get(r, c))).ok_or(MatrixError::Singular)?;
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                    inv.data.swap(p * n + j, c * n + j);
                }
            }
            let pv = a.get(c, c).clone();
            for j in 0..n {
                a.data[c * n + j] /= &pv;
                inv.data[c * n + j] /= &pv;
            }
            for r in 0..n {
                if r == c || a.get(r, c).is_zero() {
                    continue;
                }
                let f = a.get(r, c).clone();
                for j in 0..n {
                    let (x, y) = (a.get(c, j) * &f, inv.get(c, j) * &f);
                    a.data[r * n + j] -= x;
                    inv.data[r * n + j] -= y;
                }
            }
        }
        Ok(inv)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn vec_add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[Q], c: &Q) -> Vec<Q> {
    a.iter().map(|x| x * c).collect()
}

/// `(I − scale·A)⁻¹`, the sum of the Neumann series, after checking ‖scale·A‖∞ < 1.
pub fn neumann(a: &RatMatrix, scale: &Q) -> Result<RatMatrix, MatrixError> {
    let s = a.scale(scale);
    let norm = s.norm_inf();
    if norm >= Q::one() {
        return Err(MatrixError::NormTooLarge(rat::fmt(&norm)));
    }
    RatMatrix::identity(a.rows()).sub(&s).inverse()
}

/// Partial sum Σ_{n=0}^{T} (scale·A)ⁿ.
pub fn neumann_partial(a: &RatMatrix, scale: &Q, t: u32) -> RatMatrix {
    let s = a.scale(scale);
    let mut term = RatMatrix::identity(a.rows());
    let mut acc = term.clone();
    for _ in 0..t {
        term = term.mul(&s);
        acc = acc.add(&term);
    }
    acc
}

pub fn mat_inverse(m: &RatMatrix) -> Result<RatMatrix, MatrixError> {
    m.inverse()
}

pub fn is_nonnegative(v: &[Q]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qi};

    #[test]
    fn inverse_examples() {
        assert!(RatMatrix::identity(3).inverse().unwrap().is_identity());
        let m = RatMatrix::from_rows(vec![vec![qi(1), q(1, 2)], vec![qi(0), qi(1)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(inv, RatMatrix::from_rows(vec![vec![qi(1), q(-1, 2)], vec![qi(0), qi(1)]]).unwrap());
        let s = RatMatrix::from_rows(vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]]).unwrap();
        assert_eq!(s.inverse(), Err(MatrixError::Singular));
        let p = RatMatrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]]).unwrap();
        assert!(p.mul(&p.inverse().unwrap()).is_identity());
    }

    #[test]
    fn neumann_examples() {
        let a = RatMatrix::from_rows(vec![vec![q(1, 4)]]).unwrap();
        assert_eq!(*neumann(&a, &q(1, 4)).unwrap().get(0, 0), q(16, 15));
        assert!(neumann(&RatMatrix::zeros(2, 2), &qi(1)).unwrap().is_identity());
        assert!(neumann(&RatMatrix::identity(2), &qi(1)).is_err());
    }

    #[test]
    fn partial_sum_tail_bound() {
        let a = RatMatrix::from_rows(vec![vec![q(1, 3), q(1, 5)], vec![q(-1, 7), q(1, 2)]]).unwrap();
        let sc = q(1, 2);
        let full = neumann(&a, &sc).unwrap();
        let r = a.scale(&sc).norm_inf();
        for t in [4u32, 8, 16] {
            let part = neumann_partial(&a, &sc, t);
            let bound = rat::pow(&r, t + 1) / (Q::one() - &r);
            assert!(full.sub(&part).norm_inf() <= bound);
        }
    }

    #[test]
    fn json_round_trip() {
        let m = RatMatrix::from_rows(vec![vec![q(1, 3), qi(-2)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/3","-2"]]"#);
        assert_eq!(serde_json::from_str::<RatMatrix>(&s).unwrap(), m);
    }
}
