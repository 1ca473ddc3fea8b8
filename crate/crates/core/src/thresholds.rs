//! Bisection solvers for `p_c(F)` and the rainbow threshold `p_c^k(F)`.

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::family::IncreasingFamily;
use crate::measures::{ColoredMeasure, ProductMeasure};

pub const DEFAULT_EXACT_TOL: f64 = 1e-9;
pub const MAX_BISECTION_STEPS: usize = 60;
/// `|μ(1) - 1/2|` at or below this counts as attaining 1/2 at the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attainment {
    Interior,
    Boundary,
    NotAttained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ProductMeasure,
    RainbowMeasure,
    IntegerCover,
    FractionalCover,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ProductMeasure => "product-measure",
            Method::RainbowMeasure => "rainbow-measure",
            Method::IntegerCover => "integer-cover",
            Method::FractionalCover => "fractional-cover",
        }
    }
}

impl Attainment {
    pub fn as_str(self) -> &'static str {
        match self {
            Attainment::Interior => "interior",
            Attainment::Boundary => "boundary",
            Attainment::NotAttained => "not-attained",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub value: f64,
    pub bracket: (f64, f64),
    pub tol: f64,
    pub attained: Attainment,
    pub method: Method,
    pub iterations: usize,
}

impl ThresholdResult {
    fn at_one(tol: f64, attained: Attainment, method: Method) -> Self {
        Self {
            value: 1.0,
            bracket: (1.0, 1.0),
            tol,
            attained,
            method,
            iterations: 0,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 0.5) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// Shrinks `(0, 1)` around the switch point of a monotone predicate:
/// `at_or_above(p)` must be false below the threshold and true above it.
/// Stops once the bracket is at most `2 tol` wide, or after
/// [`MAX_BISECTION_STEPS`] halvings.
pub fn bisect<P>(mut at_or_above: P, tol: f64, method: Method) -> Result<ThresholdResult>
where
    P: FnMut(f64) -> Result<bool>,
{
    check_tol(tol)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iterations = 0;
    while hi - lo > 2.0 * tol && iterations < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if at_or_above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdResult {
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        tol,
        attained: Attainment::Interior,
        method,
        iterations,
    })
}

/// `p` with `μ_p(F) = 1/2`.
pub fn solve_pc(f: &IncreasingFamily, tol: f64) -> Result<ThresholdResult> {
    let measure = ProductMeasure::new(f)?;
    bisect(|p| Ok(measure.eval_uniform(p)? >= 0.5), tol, Method::ProductMeasure)
}

/// `p` with `μ_p^k(F^rb) = 1/2`, or value 1 flagged as boundary or
/// not-attained when the rainbow measure at `p = 1` is `1/2` or below it.
pub fn solve_pc_k(f: &IncreasingFamily, k: u32, tol: f64) -> Result<ThresholdResult> {
    check_tol(tol)?;
    let ell = f.ell()?;
    if (k as usize) < ell {
        return precondition(format!("k = {k} is smaller than the largest minimal edge ({ell})"));
    }
    let measure = ColoredMeasure::rainbow(f, k)?;
    let top = measure.eval_uniform(1.0)?;
    if (top - 0.5).abs() <= BOUNDARY_TOL {
        return Ok(ThresholdResult::at_one(tol, Attainment::Boundary, Method::RainbowMeasure));
    }
    if top < 0.5 {
        return Ok(ThresholdResult::at_one(tol, Attainment::NotAttained, Method::RainbowMeasure));
    }
    bisect(|p| Ok(measure.eval_uniform(p)? >= 0.5), tol, Method::RainbowMeasure)
}
