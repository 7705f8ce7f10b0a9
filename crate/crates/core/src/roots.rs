//! Bracket scan and bisection for scalar mismatch functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Samples `f` at `points` uniform nodes on [lo, hi] and returns the first
/// interval over which it changes sign.
pub fn scan_first_bracket<F>(f: F, lo: f64, hi: f64, points: usize) -> Option<Bracket>
where
    F: Fn(f64) -> f64,
{
    assert!(points >= 2);
    let step = (hi - lo) / (points - 1) as f64;
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..points {
        let x = if i + 1 == points { hi } else { lo + i as f64 * step };
        let fx = f(x);
        if f_prev == 0.0 || f_prev.signum() != fx.signum() {
            return Some(Bracket { lo: x_prev, hi: x, f_lo: f_prev, f_hi: fx });
        }
        x_prev = x;
        f_prev = fx;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Bisection until the bracket is narrower than `abs_tol` or can no longer
/// be split in floating point.
pub fn bisect<F>(f: F, bracket: Bracket, abs_tol: f64, max_iter: usize) -> Result<Root>
where
    F: Fn(f64) -> f64,
{
    let Bracket { mut lo, mut hi, mut f_lo, .. } = bracket;
    if f_lo == 0.0 {
        return Ok(Root { x: lo, iterations: 0 });
    }
    if bracket.f_hi == 0.0 {
        return Ok(Root { x: hi, iterations: 0 });
    }
    if f_lo.signum() == bracket.f_hi.signum() {
        return Err(Error::InvalidInput("bisection needs a sign change".into()));
    }
    for iterations in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= abs_tol || mid <= lo || mid >= hi {
            return Ok(Root { x: mid, iterations });
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(Root { x: mid, iterations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence { iterations: max_iter })
}
