//! Dense tableau simplex for packing programs
//! `max 1·y  s.t.  Bᵀy ≤ c, y ≥ 0` with a nonnegative 0/1 matrix and
//! nonnegative costs, so the slack basis is feasible from the start.
//! Bland's rule (lowest index enters, lowest basic index breaks ratio ties)
//! rules out cycling. The optimal tableau also yields the solution of the
//! dual covering program `min c·g  s.t.  B g ≥ 1, g ≥ 0` as the objective
//! row entries of the slack columns.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_f64(&self) -> f64;
}

const FLOAT_EPS: f64 = 1e-11;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_positive(&self) -> bool {
        *self > FLOAT_EPS
    }
    fn is_negative(&self) -> bool {
        *self < -FLOAT_EPS
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// The exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Numerical(format!("{x} has no rational value")))
}

pub fn rational_pow(base: &BigRational, exp: usize) -> BigRational {
    let mut out = BigRational::from_integer(BigInt::one());
    for _ in 0..exp {
        out = &out * base;
    }
    out
}

#[derive(Debug, Clone)]
pub struct PackingSolution<T> {
    pub objective: T,
    /// Packing variables, one per column of `B` (per covering row).
    pub y: Vec<T>,
    /// Covering variables, one per row of `Bᵀ` (per cost entry).
    pub g: Vec<T>,
    pub pivots: usize,
}

/// `rows[s]` lists the packing variables present in constraint `s`
/// (`Σ_{t ∈ rows[s]} y_t ≤ costs[s]`); there are `vars` packing variables.
pub fn solve_packing<T: Scalar>(rows: &[Vec<usize>], costs: &[T], vars: usize, max_pivots: usize) -> Result<PackingSolution<T>> {
    let m = rows.len();
    if costs.len() != m {
        return Err(Error::InvalidInput("cost vector does not match the constraint count".into()));
    }
    if costs.iter().any(|c| c.is_negative()) {
        return Err(Error::InvalidInput("packing costs must be nonnegative".into()));
    }
    let width = vars + m;
    // tableau rows: coefficients over [y_0..y_vars, slack_0..slack_m], rhs
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m);
    for (s, row) in rows.iter().enumerate() {
        let mut r = vec![T::zero(); width];
        for &t in row {
            if t >= vars {
                return Err(Error::InvalidInput(format!("variable {t} out of range")));
            }
            r[t] = T::one();
        }
        r[vars + s] = T::one();
        tab.push(r);
    }
    let mut rhs: Vec<T> = costs.to_vec();
    let mut basis: Vec<usize> = (vars..width).collect();
    // objective row holds z_j - c_j for max Σ y
    let mut obj: Vec<T> = (0..width).map(|j| if j < vars { -T::one() } else { T::zero() }).collect();
    let mut value = T::zero();
    let mut pivots = 0;
    loop {
        let Some(enter) = (0..width).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<T> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = rhs[i].clone() / tab[i][enter].clone();
            let take = match (&best, leave) {
                (None, _) => true,
                (Some(b), Some(l)) => ratio < *b || (ratio == *b && basis[i] < basis[l]),
                (Some(_), None) => unreachable!(),
            };
            if take {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        let Some(pr) = leave else {
            return Err(Error::Numerical("packing program is unbounded".into()));
        };
        if pivots >= max_pivots {
            return Err(Error::Numerical(format!("simplex exceeded {max_pivots} pivots")));
        }
        pivots += 1;
        let piv = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        rhs[pr] = rhs[pr].clone() / piv;
        let pivot_row = tab[pr].clone();
        let pivot_rhs = rhs[pr].clone();
        for i in 0..m {
            if i == pr {
                continue;
            }
            let f = tab[i][enter].clone();
            if !(f.is_positive() || f.is_negative()) {
                tab[i][enter] = T::zero();
                continue;
            }
            for (v, pv) in tab[i].iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
            tab[i][enter] = T::zero();
            rhs[i] = rhs[i].clone() - f * pivot_rhs.clone();
        }
        let f = obj[enter].clone();
        for (v, pv) in obj.iter_mut().zip(&pivot_row) {
            *v = v.clone() - f.clone() * pv.clone();
        }
        obj[enter] = T::zero();
        value = value - f * pivot_rhs;
        basis[pr] = enter;
    }
    let mut y = vec![T::zero(); vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < vars {
            y[b] = rhs[i].clone();
        }
    }
    let g = obj[vars..].to_vec();
    Ok(PackingSolution {
        objective: value,
        y,
        g,
        pivots,
    })
}
