//! Means from intersections of two Taylor polynomials of odd order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcmodel::{factorial, FunctionModel};
use crate::mean::{bracketed_root, mean_power, power_model};

/// `P_c(u)`, the order-`r` Taylor polynomial of `model` at `c`.
fn taylor_poly(derivs: &[f64], c: f64, u: f64) -> f64 {
    let h = u - c;
    derivs.iter().enumerate().rev().fold(0.0, |acc, (j, d)| acc * h + d / factorial(j))
}

/// The unique `u` in `(a, b)` with `P_a(u) = P_b(u)`.
pub fn taylor_mean(model: &FunctionModel, r: usize, a: f64, b: f64) -> Result<f64> {
    if r % 2 == 0 {
        return Err(Error::InvalidParam(format!("Taylor order r = {r} must be odd and positive")));
    }
    for (what, v) in [("a", a), ("b", b)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain { what, value: v });
        }
    }
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a == b {
        return Ok(a);
    }
    let sign = model.check_nonvanishing(r, a, b)? as f64;
    let da: Vec<f64> = (0..=r).map(|j| model.eval_deriv(a, j)).collect::<Result<_>>()?;
    let db: Vec<f64> = (0..=r).map(|j| model.eval_deriv(b, j)).collect::<Result<_>>()?;
    // near a, P_a - P_b = f - P_b, the remainder of even order r + 1
    let root = bracketed_root(|u| Ok(taylor_poly(&da, a, u) - taylor_poly(&db, b, u)), a, b, Some(sign))?;
    Ok(root.x)
}

/// Intersection of the two tangent lines.
pub fn tangent_intersection(model: &FunctionModel, a: f64, b: f64) -> Result<f64> {
    let (fa, fb) = (model.eval_deriv(a, 0)?, model.eval_deriv(b, 0)?);
    let (da, db) = (model.eval_deriv(a, 1)?, model.eval_deriv(b, 1)?);
    Ok((fb - fa + a * da - b * db) / (da - db))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorComparison {
    pub p: f64,
    pub r: usize,
    pub m1: usize,
    pub m2: usize,
    pub a: f64,
    pub b: f64,
    pub taylor: f64,
    pub hermite: f64,
    pub difference: f64,
}

/// The Taylor mean of order `r` next to `M_{p,m1,m2}` for the same power model.
pub fn taylor_compare(p: f64, r: usize, m1: usize, m2: usize, a: f64, b: f64) -> Result<TaylorComparison> {
    let taylor = taylor_mean(&power_model(p, r)?, r, a, b)?;
    let hermite = mean_power(p, m1, m2, a, b)?.value;
    Ok(TaylorComparison { p, r, m1, m2, a, b, taylor, hermite, difference: hermite - taylor })
}
