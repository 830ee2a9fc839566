//! Behaviour of `M_{p,m1,m2}` as `n = m1 + m2 + 1` grows, and dependence on `(m1, m2)`.

use serde::Serialize;

use super::{PrecisionConfig, SweepResult};
use crate::divdiff::spitzbart_power;
use crate::error::{Error, Result};
use crate::funcmodel::{falling, FunctionModel, ModelKind};
use crate::mean::{mean_of, mean_power, MeanSpec};
use crate::real::{HiFloat, Real};

pub const MAX_SCAN_ORDER: usize = 40;
const MAX_ITER: usize = 300;

/// `(m1, m2)` on the two ladders `m2 = m1 - 1` (even `n`) and `m2 = m1 - 2` (odd `n`).
pub fn ladder_pair(n: usize) -> (usize, usize) {
    if n % 2 == 0 {
        (n / 2, n / 2 - 1)
    } else {
        ((n + 1) / 2, (n + 1) / 2 - 2)
    }
}

fn defining(p: &HiFloat, m1: usize, m2: usize, a: &HiFloat, b: &HiFloat, x: &HiFloat) -> Result<HiFloat> {
    let d = (m1 - m2) as i32;
    let lhs = (x.clone() - a.clone()).powi(d) * spitzbart_power(x, a, b, m1, m2, p)?;
    let rhs = (b.clone() - x.clone()).powi(d) * spitzbart_power(x, a, b, m2, m1, p)?;
    Ok(lhs - rhs)
}

fn sign(v: &HiFloat) -> i8 {
    let z = v.zero_like();
    if *v > z {
        1
    } else if *v < z {
        -1
    } else {
        0
    }
}

/// Root of the defining equation at extended precision, started from a binary64 estimate.
pub fn mean_extended(p: f64, m1: usize, m2: usize, a: f64, b: f64, precision: PrecisionConfig) -> Result<HiFloat> {
    let bits = precision.bits();
    let (ah, bh, ph) = (HiFloat::new(a, bits), HiFloat::new(b, bits), HiFloat::new(p, bits));
    let w = b - a;
    let g = |x: &HiFloat| defining(&ph, m1, m2, &ah, &bh, x);

    let guess = mean_power(p, m1, m2, a, b).map(|r| r.value).unwrap_or(0.5 * (a + b));
    let mut bracket = None;
    for delta in [1e-12, 1e-9, 1e-6, 1e-3] {
        let (lo, hi) = ((guess - delta * w).max(a + 1e-9 * w), (guess + delta * w).min(b - 1e-9 * w));
        let (lo, hi) = (HiFloat::new(lo, bits), HiFloat::new(hi, bits));
        let (glo, ghi) = (g(&lo)?, g(&hi)?);
        if sign(&glo) * sign(&ghi) < 0 {
            bracket = Some((lo, glo, hi, ghi));
            break;
        }
    }
    let (mut lo, mut glo, mut hi, mut ghi) = bracket.ok_or_else(|| {
        Error::Contract(format!("no sign change around the binary64 mean {guess} for ({m1},{m2})"))
    })?;

    let tol = HiFloat::new(10.0, bits).powi(-(precision.digits as i32 - 6)) * HiFloat::new(w, bits);
    let mut prev = lo.clone();
    let mut side = 0i8;
    for _ in 0..MAX_ITER {
        // Illinois variant of regula falsi
        let x = (lo.clone() * ghi.clone() - hi.clone() * glo.clone()) / (ghi.clone() - glo.clone());
        let gx = g(&x)?;
        let s = sign(&gx);
        if s == 0 {
            return Ok(x);
        }
        if s == sign(&ghi) {
            hi = x.clone();
            ghi = gx;
            if side == 1 {
                glo = glo * HiFloat::new(0.5, bits);
            }
            side = 1;
        } else {
            lo = x.clone();
            glo = gx;
            if side == -1 {
                ghi = ghi * HiFloat::new(0.5, bits);
            }
            side = -1;
        }
        if (x.clone() - prev).abs() < tol {
            return Ok(x);
        }
        prev = x;
    }
    Err(Error::Contract(format!("extended-precision root did not converge for ({m1},{m2})")))
}

/// Gap `|M_{p,m1,m2}(a,b) - H(a,b)|` along `n = 2..=n_max`, alternating the two ladders.
pub fn conjecture1_scan(p: f64, a: f64, b: f64, n_max: usize, precision: PrecisionConfig) -> Result<SweepResult> {
    if !(a > 0.0 && a < b) {
        return Err(Error::InvalidParam(format!("need 0 < a < b, got ({a}, {b})")));
    }
    if !(2..=MAX_SCAN_ORDER).contains(&n_max) {
        return Err(Error::InvalidParam(format!("n_max = {n_max} must lie in 2..={MAX_SCAN_ORDER}")));
    }
    if p.fract() == 0.0 && p >= 0.0 && p <= n_max as f64 {
        return Err(Error::InvalidParam(format!("p = {p} is an integer in 0..={n_max}; the power model has vanishing derivatives")));
    }
    precision.check_order(n_max)?;
    let bits = precision.bits();
    let (ah, bh) = (HiFloat::new(a, bits), HiFloat::new(b, bits));
    let h = HiFloat::new(2.0, bits) * ah.clone() * bh.clone() / (ah + bh);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut means = Vec::new();
    let mut gaps = Vec::new();
    for n in 2..=n_max {
        let (m1, m2) = ladder_pair(n);
        if falling(p, n + 1) == 0.0 {
            return Err(Error::UndefinedMean { model: format!("power:{p}"), order: n + 1, p: Some(p) });
        }
        let m = mean_extended(p, m1, m2, a, b, precision)?;
        values.push(n as f64);
        labels.push(format!("({m1},{m2})"));
        means.push(m.to_f64());
        gaps.push((m - h.clone()).abs().to_f64());
    }
    SweepResult::toward_limit("n", values, labels, means, h.to_f64(), gaps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conjecture2Row {
    pub model: String,
    pub means: Vec<f64>,
    pub spread: f64,
    pub reciprocal: bool,
    /// Asserted only for reciprocal models: spread within `1e-10`.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conjecture2Report {
    pub a: f64,
    pub b: f64,
    pub pairs: Vec<(usize, usize)>,
    pub rows: Vec<Conjecture2Row>,
}

pub const RECIPROCAL_SPREAD: f64 = 1e-10;

fn is_reciprocal(model: &FunctionModel) -> bool {
    matches!(model.kind(), ModelKind::Power { p, .. } if *p == -1.0)
}

/// Spread of `M_{f,m1,m2}(1, 2)` across `pairs` for each model.
pub fn conjecture2_probe(models: &[FunctionModel], pairs: &[(usize, usize)]) -> Result<Conjecture2Report> {
    let (a, b) = (1.0, 2.0);
    let mut rows = Vec::with_capacity(models.len());
    for model in models {
        let means = pairs
            .iter()
            .map(|&(m1, m2)| mean_of(&MeanSpec::new(model.clone(), m1, m2)?, a, b).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?;
        let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = means.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = max - min;
        let reciprocal = is_reciprocal(model);
        rows.push(Conjecture2Row {
            model: model.to_string(),
            means,
            spread,
            reciprocal,
            pass: reciprocal.then_some(spread <= RECIPROCAL_SPREAD),
        });
    }
    Ok(Conjecture2Report { a, b, pairs: pairs.to_vec(), rows })
}
