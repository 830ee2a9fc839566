//! The mean `M_{f,m1,m2}(a,b)`: the point where the Hermite interpolants `P` and `Q` meet
//! in the sense of the defining root equation.

use std::fmt;

use serde::Serialize;

use crate::divdiff::{binom_int, divided_difference_stable, ConfluentNodes};
use crate::error::{Error, Result};
use crate::funcmodel::{factorial, FunctionModel};
use crate::real::{HiFloat, Real};

/// Half-width of the clipped bracket, relative to `b - a`.
const CLIP: f64 = 1e-9;
/// Bracket width at which bisection stops, relative to `b - a`.
const BRACKET_TOL: f64 = 1e-13;
const MAX_ITER: usize = 200;
/// Agreement required between redundant closed forms.
const CLOSED_FORM_TOL: f64 = 1e-9;
const GAP2_DIGITS: u32 = 40;
/// `|p|` above which power models are normalized to avoid overflow.
const NORMALIZE_ABOVE: f64 = 30.0;
/// Distance from an integer below which `p` is treated as that integer.
const INTEGER_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RootSolve,
    ClosedGap2,
    Closed10,
    TheoremShortcut,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::RootSolve => "root_solve",
            Method::ClosedGap2 => "closed_gap2",
            Method::Closed10 => "closed_10",
            Method::TheoremShortcut => "theorem_shortcut",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanSpec {
    pub model: FunctionModel,
    pub m1: usize,
    pub m2: usize,
}

impl MeanSpec {
    pub fn new(model: FunctionModel, m1: usize, m2: usize) -> Result<Self> {
        if m2 >= m1 {
            return Err(Error::InvalidParam(format!("need 0 <= m2 < m1, got m1 = {m1}, m2 = {m2}")));
        }
        Ok(MeanSpec { model, m1, m2 })
    }

    /// `n = m1 + m2 + 1`.
    pub fn n(&self) -> usize {
        self.m1 + self.m2 + 1
    }

    /// `m1 - m2`.
    pub fn gap(&self) -> usize {
        self.m1 - self.m2
    }

    pub fn odd_gap(&self) -> bool {
        self.gap() % 2 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanResult {
    pub value: f64,
    /// `|LHS - RHS| / max(|LHS|, |RHS|)` of the defining equation at `value`.
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
}

fn check_interval(a: f64, b: f64) -> Result<(f64, f64)> {
    for (what, v) in [("a", a), ("b", b)] {
        if !v.is_finite() || !(v > 0.0) {
            return Err(Error::Domain { what, value: v });
        }
    }
    Ok(if a > b { (b, a) } else { (a, b) })
}

fn degenerate(a: f64) -> MeanResult {
    MeanResult { value: a, residual: 0.0, iterations: 0, method: Method::TheoremShortcut }
}

/// Both sides of the defining equation:
/// `(x-a)^g f[x, a^{m1+1}, b^{m2+1}]` and `(b-x)^g f[x, a^{m2+1}, b^{m1+1}]` with `g = m1 - m2`.
pub fn defining_sides(spec: &MeanSpec, a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    let g = spec.gap() as i32;
    let lhs_nodes = ConfluentNodes::point_and_two_blocks(x, a, spec.m1 + 1, b, spec.m2 + 1)?;
    let rhs_nodes = ConfluentNodes::point_and_two_blocks(x, a, spec.m2 + 1, b, spec.m1 + 1)?;
    let lhs = (x - a).powi(g) * divided_difference_stable(&spec.model, &lhs_nodes)?;
    let rhs = (b - x).powi(g) * divided_difference_stable(&spec.model, &rhs_nodes)?;
    Ok((lhs, rhs))
}

fn relative_residual(spec: &MeanSpec, a: f64, b: f64, x: f64) -> Result<f64> {
    let (l, r) = defining_sides(spec, a, b, x)?;
    let scale = l.abs().max(r.abs());
    Ok(if scale == 0.0 { 0.0 } else { (l - r).abs() / scale })
}

pub(crate) struct Root {
    pub x: f64,
    pub iterations: usize,
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Finds `a + d` with `sgn(g) == want`, trying the nominal clip first, then smaller
/// clips, then larger ones.
fn clipped_end<G>(g: &mut G, a: f64, b: f64, from_left: bool, want: f64) -> Result<Option<(f64, f64)>>
where
    G: FnMut(f64) -> Result<f64>,
{
    let w = b - a;
    let candidates = [CLIP, 1e-11, 1e-13, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.25];
    for c in candidates {
        let x = if from_left { a + c * w } else { b - c * w };
        if !(x > a && x < b) {
            continue;
        }
        let v = g(x)?;
        if sgn(v) == want {
            return Ok(Some((x, v)));
        }
    }
    Ok(None)
}

/// Bisection for the unique sign change of `g` in `(a, b)`. With `left_sign` given, `g` is
/// expected to carry that sign just right of `a` and the opposite sign just left of `b`.
pub(crate) fn bracketed_root<G>(mut g: G, a: f64, b: f64, left_sign: Option<f64>) -> Result<Root>
where
    G: FnMut(f64) -> Result<f64>,
{
    let w = b - a;
    let want_lo = match left_sign {
        Some(s) => s,
        None => {
            // probe a coarse grid for the sign near the left end
            let mut s = 0.0;
            for c in [CLIP, 1e-7, 1e-5, 1e-3, 1e-2] {
                s = sgn(g(a + c * w)?);
                if s != 0.0 {
                    break;
                }
            }
            s
        }
    };
    if want_lo == 0.0 {
        return Err(Error::Contract("defining function vanishes next to the interval end".into()));
    }
    let lo = clipped_end(&mut g, a, b, true, want_lo)?;
    let hi = clipped_end(&mut g, a, b, false, -want_lo)?;
    let ((mut lo, mut glo), (mut hi, mut ghi)) = match (lo, hi) {
        (Some(l), Some(h)) if l.0 < h.0 => (l, h),
        _ => {
            return Err(Error::Contract(format!(
                "no sign change of the defining function on ({a}, {b}); divided differences are inconsistent"
            )))
        }
    };
    let mut iterations = 0;
    while hi - lo > BRACKET_TOL * w && iterations < MAX_ITER {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(Root { x: mid, iterations });
        }
        if sgn(gm) == sgn(glo) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    let secant = lo - glo * (hi - lo) / (ghi - glo);
    let x = if secant.is_finite() && secant >= lo && secant <= hi { secant } else { 0.5 * (lo + hi) };
    Ok(Root { x, iterations })
}

fn ensure_strict(x: f64, a: f64, b: f64) -> Result<f64> {
    if x > a && x < b {
        Ok(x)
    } else {
        Err(Error::Contract(format!("mean {x} escaped the open interval ({a}, {b})")))
    }
}

/// Root of the defining equation in `(a, b)`.
pub fn mean_of(spec: &MeanSpec, a: f64, b: f64) -> Result<MeanResult> {
    let (a, b) = check_interval(a, b)?;
    if a == b {
        return Ok(degenerate(a));
    }
    let sign = spec.model.check_nonvanishing(spec.n(), a, b)? as f64;
    let root = bracketed_root(
        |x| {
            let (l, r) = defining_sides(spec, a, b, x)?;
            Ok(l - r)
        },
        a,
        b,
        Some(-sign),
    )?;
    let value = ensure_strict(root.x, a, b)?;
    Ok(MeanResult {
        value,
        residual: relative_residual(spec, a, b, value)?,
        iterations: root.iterations,
        method: Method::RootSolve,
    })
}

/// The model used for exponent `p` with `n = m1 + m2 + 1`: `x^k log x` when `p` is an integer
/// `k` in `0..=n`, otherwise `x^p`, normalized when `|p|` is large.
pub fn power_model(p: f64, n: usize) -> Result<FunctionModel> {
    if !p.is_finite() {
        return Err(Error::InvalidParam(format!("exponent {p} is not finite")));
    }
    let k = p.round();
    if k >= 0.0 && k <= n as f64 && (p - k).abs() <= INTEGER_SNAP {
        if p != k {
            log::warn!("exponent {p} treated as the integer {k}");
        }
        return Ok(FunctionModel::log_power(k as u32));
    }
    Ok(FunctionModel::power(p))
}

fn normalized(model: FunctionModel, a: f64, b: f64) -> FunctionModel {
    match model.exponent() {
        Some(p) if p.abs() > NORMALIZE_ABOVE => {
            // divide by the largest value of x^p on [a, b]
            let unit = if p > 0.0 { b } else { a };
            FunctionModel::power_normalized(p, unit)
        }
        _ => model,
    }
}

/// `M_{p,m1,m2}(a, b)`.
pub fn mean_power(p: f64, m1: usize, m2: usize, a: f64, b: f64) -> Result<MeanResult> {
    let (lo, hi) = check_interval(a, b)?;
    let model = normalized(power_model(p, m1 + m2 + 1)?, lo, hi);
    mean_of(&MeanSpec::new(model, m1, m2)?, a, b)
}

fn derivs(model: &FunctionModel, x: f64, upto: usize) -> Result<Vec<f64>> {
    (0..=upto).map(|j| model.eval_deriv(x, j)).collect()
}

fn derivs_hp(model: &FunctionModel, x: &HiFloat, upto: usize) -> Result<Vec<HiFloat>> {
    (0..=upto).map(|j| model.eval_deriv_hp(x, j)).collect()
}

fn neg1(e: usize) -> f64 {
    if e % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(d, c)` from derivative values `fa[j] = f^{(j)}(a)`, `fb[j] = f^{(j)}(b)`, `j <= m2 + 2`.
fn gap2_sums<R: Real>(fa: &[R], fb: &[R], m2: usize, a: &R, b: &R) -> (R, R) {
    let c_ = |v: f64| a.lift(v);
    let h = b.clone() - a.clone();
    let mut d = a.zero_like();
    for k in 0..=m2 {
        for l in 0..=(m2 - k) {
            let e = k as i32 + l as i32 - m2 as i32 - 1;
            let inner = b.powi(2) * a.powi(e) * fa[k].clone() + c_(neg1(m2 + l)) * a.powi(2) * b.powi(e) * fb[k].clone();
            d = d + c_(neg1(m2 + k) * binom_int(m2 + l + 2, m2 + 2)) / c_(factorial(k))
                * (-h.clone()).powi(-(m2 as i32) - 3 - l as i32)
                * inner;
        }
    }
    for k in 0..=(m2 + 2) {
        for l in 0..=(m2 + 2 - k) {
            let e = k as i32 + l as i32 - m2 as i32 - 1;
            let inner = b.powi(e) * fb[k].clone() + c_(neg1(m2 + l)) * a.powi(e) * fa[k].clone();
            d = d + c_(neg1(m2 + k) * binom_int(m2 + l, m2)) / c_(factorial(k)) * h.powi(-(m2 as i32) - 1 - l as i32) * inner;
        }
    }
    let mut c = a.zero_like();
    for j in 0..=(m2 + 2) {
        c = c + c_(binom_int(2 * m2 + 2 - j, m2)) / c_(factorial(j))
            * h.powi(j as i32)
            * (c_(neg1(j + 1)) * fb[j].clone() - fa[j].clone());
    }
    for j in 0..=m2 {
        c = c + c_(binom_int(2 * m2 + 2 - j, m2 + 2)) / c_(factorial(j))
            * h.powi(j as i32)
            * (c_(neg1(j)) * fb[j].clone() + fa[j].clone());
    }
    c = c * c_(neg1(m2)) / h.powi(2 * m2 as i32 + 3);
    (d, c)
}

/// Numerator and denominator of the gap-two mean, `M = -d / c`.
pub fn gap2_coefficients(model: &FunctionModel, m2: usize, a: f64, b: f64) -> Result<(f64, f64)> {
    let fa = derivs(model, a, m2 + 2)?;
    let fb = derivs(model, b, m2 + 2)?;
    Ok(gap2_sums(&fa, &fb, m2, &a, &b))
}

fn gap2_expanded_sums<R: Real>(fa: &[R], fb: &[R], m2: usize, a: &R, b: &R) -> Option<R> {
    let k = |v: f64| a.lift(v);
    let (a, b) = (a.clone(), b.clone());
    let h = b.clone() - a.clone();
    let (fa, fb) = (|j: usize| fa[j].clone(), |j: usize| fb[j].clone());
    let v = match m2 {
        0 => {
            let num = h.clone() * (b.clone() * fb(2) + a.clone() * fa(2))
                + k(2.0) * (a.clone() - k(2.0) * b.clone()) * fb(1)
                + k(2.0) * (k(2.0) * a.clone() - b.clone()) * fa(1)
                + k(6.0) * (fb(0) - fa(0));
            let den = h * (fb(2) + fa(2)) - k(2.0) * (fb(1) - fa(1));
            num / den
        }
        1 => {
            let num = k(-60.0) * (fb(0) - fa(0))
                + k(12.0) * (k(3.0) * b.clone() - k(2.0) * a.clone()) * fb(1)
                - k(12.0) * (k(3.0) * a.clone() - k(2.0) * b.clone()) * fa(1)
                + k(3.0) * h.clone() * ((a.clone() - k(3.0) * b.clone()) * fb(2) + (b.clone() - k(3.0) * a.clone()) * fa(2))
                + h.powi(2) * (b.clone() * fb(3) - a.clone() * fa(3));
            let den = k(12.0) * (fb(1) - fa(1)) - k(6.0) * h.clone() * (fb(2) + fa(2)) + h.powi(2) * (fb(3) - fa(3));
            num / den
        }
        2 => {
            let num = k(840.0) * (fb(0) - fa(0))
                + k(120.0) * (k(3.0) * a.clone() - k(4.0) * b.clone()) * fb(1)
                + k(120.0) * (k(4.0) * a.clone() - k(3.0) * b.clone()) * fa(1)
                + k(60.0) * h.clone() * ((k(2.0) * b.clone() - a.clone()) * fb(2) - (b.clone() - k(2.0) * a.clone()) * fa(2))
                - k(4.0) * h.powi(2) * ((b.clone() - k(4.0) * a.clone()) * fa(3) + (k(4.0) * b.clone() - a.clone()) * fb(3))
                + h.powi(3) * (a.clone() * fa(4) + b.clone() * fb(4));
            let den = k(-120.0) * (fb(1) - fa(1)) + k(60.0) * h.clone() * (fb(2) + fa(2))
                - k(12.0) * h.powi(2) * (fb(3) - fa(3))
                + h.powi(3) * (fb(4) + fa(4));
            num / den
        }
        _ => return None,
    };
    Some(v)
}

/// The fully expanded gap-two means for `m2 = 0, 1, 2`.
pub fn gap2_expanded(model: &FunctionModel, m2: usize, a: f64, b: f64) -> Result<Option<f64>> {
    if m2 > 2 {
        return Ok(None);
    }
    let fa = derivs(model, a, m2 + 2)?;
    let fb = derivs(model, b, m2 + 2)?;
    Ok(gap2_expanded_sums(&fa, &fb, m2, &a, &b))
}

fn rel_diff(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

/// `M_{f, m2+2, m2}(a, b)` in closed form.
pub fn mean_closed_gap2(model: &FunctionModel, m2: usize, a: f64, b: f64) -> Result<MeanResult> {
    let (a, b) = check_interval(a, b)?;
    if a == b {
        return Ok(degenerate(a));
    }
    let spec = MeanSpec::new(model.clone(), m2 + 2, m2)?;
    model.check_nonvanishing(spec.n(), a, b)?;
    // both forms cancel heavily on narrow intervals; evaluate them at extended precision
    let bits = HiFloat::bits_for_digits(GAP2_DIGITS);
    let (ah, bh) = (HiFloat::new(a, bits), HiFloat::new(b, bits));
    let fa = derivs_hp(model, &ah, m2 + 2)?;
    let fb = derivs_hp(model, &bh, m2 + 2)?;
    let (d, c) = gap2_sums(&fa, &fb, m2, &ah, &bh);
    if c.to_f64() == 0.0 {
        return Err(Error::Degenerate(format!("gap-two denominator c = {c:?}")));
    }
    let value = (-d / c).to_f64();
    if !value.is_finite() {
        return Err(Error::NonFinite { what: "gap-two closed form".into(), x: a, order: m2 + 2 });
    }
    if let Some(expanded) = gap2_expanded_sums(&fa, &fb, m2, &ah, &bh) {
        let expanded = expanded.to_f64();
        if rel_diff(value, expanded) > CLOSED_FORM_TOL {
            return Err(Error::Contract(format!(
                "gap-two closed forms disagree: {value} vs expanded {expanded}"
            )));
        }
    }
    let value = ensure_strict(value, a, b)?;
    Ok(MeanResult {
        value,
        residual: relative_residual(&spec, a, b, value)?,
        iterations: 0,
        method: Method::ClosedGap2,
    })
}

/// `M_{x^p, 2, 0}` for `p` outside `{0, 1, 2, 3}`.
pub fn power_20_closed(p: f64, a: f64, b: f64) -> f64 {
    let side = |t: f64| t.powf(p - 2.0) * (p * (p - 5.0) * t * t + p * (3.0 - p) * a * b + 6.0 * t * t);
    let num = side(b) - side(a);
    let den = b.powf(p - 2.0) * ((p - 1.0) * (b - a) - 2.0 * b) + a.powf(p - 2.0) * ((p - 1.0) * (b - a) + 2.0 * a);
    num / den / p
}

/// `M_{x^k log x, 2, 0}` for `k` in `0..=3`.
pub fn log_power_20_closed(k: u32, a: f64, b: f64) -> Option<f64> {
    let l = (b / a).ln();
    let q = b * b - a * a - 2.0 * a * b * l;
    let r = (a + b) * l - 2.0 * (b - a);
    match k {
        0 => Some(3.0 * a * b * q / (b - a).powi(3)),
        1 => Some(2.0 * a * b * r / q),
        2 => Some(0.5 * q / r),
        3 => Some((b - a).powi(3) / (3.0 * q)),
        _ => None,
    }
}

/// `M_{4,1,0}(a, b)`.
pub fn mean_410_closed(a: f64, b: f64) -> f64 {
    0.5 * (5.0 * b * b + 6.0 * a * b + 5.0 * a * a).sqrt() - 0.5 * (a + b)
}

/// `M_{5,1,0}(a, b)` by the cubic radical.
pub fn mean_510_closed(a: f64, b: f64) -> f64 {
    let s = 10.0 * (a + b) * (19.0 * a * a + 2.0 * a * b + 19.0 * b * b);
    let t = 1017.0 * b.powi(6)
        + 2238.0 * b.powi(5) * a
        + 3495.0 * b.powi(4) * a * a
        + 4500.0 * b.powi(3) * a.powi(3)
        + 3495.0 * b * b * a.powi(4)
        + 2238.0 * a.powi(5) * b
        + 1017.0 * a.powi(6);
    let cr = (s + 6.0 * t.sqrt()).cbrt();
    cr / 6.0 - 2.0 / 3.0 * (2.0 * b * b + a * b + 2.0 * a * a) / cr - (a + b) / 3.0
}

/// `L_p(x) / ((x-a)(b-x))`, whose root in `(a, b)` is `M_{p,1,0}(a, b)`.
pub fn l_family(p: f64, a: f64, b: f64, x: f64) -> f64 {
    let lp = 2.0 * (x.powf(p) - a.powf(p)) * (b - a)
        - 2.0 * (b.powf(p) - a.powf(p)) * (x - a)
        - p * (b.powf(p - 1.0) - a.powf(p - 1.0)) * (x - b) * (x - a);
    lp / ((x - a) * (b - x))
}

/// `M_{p,1,0}(a, b)` as the root of `L_p`.
pub fn mean_10_family(p: f64, a: f64, b: f64) -> Result<MeanResult> {
    let (a, b) = check_interval(a, b)?;
    if !p.is_finite() || [0.0, 1.0, 2.0].contains(&p) {
        return Err(Error::UndefinedMean { model: format!("power:{p}"), order: 2, p: Some(p) });
    }
    if a == b {
        return Ok(degenerate(a));
    }
    let root = bracketed_root(|x| Ok(l_family(p, a, b, x)), a, b, None)?;
    let value = ensure_strict(root.x, a, b)?;
    let check = if p == 4.0 {
        Some(mean_410_closed(a, b))
    } else if p == 5.0 {
        Some(mean_510_closed(a, b))
    } else {
        None
    };
    if let Some(closed) = check {
        if rel_diff(value, closed) > CLOSED_FORM_TOL {
            return Err(Error::Contract(format!("root {value} disagrees with closed form {closed} at p = {p}")));
        }
    }
    let spec = MeanSpec::new(FunctionModel::power(p), 1, 0)?;
    Ok(MeanResult {
        value,
        residual: relative_residual(&spec, a, b, value)?,
        iterations: root.iterations,
        method: Method::Closed10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{build_interpolant, InterpolantSpec, Side};
    use proptest::prelude::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        rel_diff(x, y) <= tol
    }

    fn spec(model: FunctionModel, m1: usize, m2: usize) -> MeanSpec {
        MeanSpec::new(model, m1, m2).unwrap()
    }

    #[test]
    fn mean_of_examples() {
        let r = mean_of(&spec(FunctionModel::power(4.0), 2, 0), 1.0, 2.0).unwrap();
        assert!(close(r.value, 1.5, 1e-12), "{r:?}");
        assert_eq!(r.method, Method::RootSolve);
        let r = mean_of(&spec(FunctionModel::reciprocal(), 3, 1), 1.0, 2.0).unwrap();
        assert!(close(r.value, 4.0 / 3.0, 1e-12));
        let r = mean_of(&spec(FunctionModel::power(1.5), 2, 0), 1.0, 2.0).unwrap();
        assert!(close(r.value, 2f64.sqrt(), 1e-12));
        let r = mean_of(&spec(FunctionModel::power(4.0), 2, 0), 1.7, 1.7).unwrap();
        assert_eq!(r.value, 1.7);
        assert_eq!(r.method, Method::TheoremShortcut);
    }

    #[test]
    fn mean_of_errors() {
        assert!(MeanSpec::new(FunctionModel::exp(), 1, 1).is_err());
        let s = spec(FunctionModel::power(2.0), 2, 0);
        assert!(matches!(mean_of(&s, 1.0, 2.0), Err(Error::UndefinedMean { .. })));
        assert!(matches!(mean_of(&s, -1.0, 2.0), Err(Error::Domain { .. })));
        assert!(matches!(mean_of(&s, 1.0, f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn mean_power_examples() {
        let (a, b) = (1.0f64, 2.0f64);
        let r = mean_power(2.0, 2, 0, a, b).unwrap();
        let l = (b / a).ln();
        let want = 0.5 * (b * b - a * a - 2.0 * a * b * l) / ((a + b) * l - 2.0 * (b - a));
        assert!(close(r.value, want, 1e-10), "{} vs {want}", r.value);
        assert!(close(mean_power(-1.0, 4, 2, 3.0, 5.0).unwrap().value, 3.75, 1e-10));
        let r = mean_power(4.0, 1, 0, 1.0, 2.0).unwrap();
        assert!(close(r.value, (37f64.sqrt() - 3.0) / 2.0, 1e-12));
        assert!((r.value - 1.5413813).abs() < 1e-7);
    }

    #[test]
    fn near_integer_exponent_snaps_to_log_power() {
        assert_eq!(power_model(2.0 + 1e-13, 3).unwrap(), FunctionModel::log_power(2));
        assert_eq!(power_model(4.0, 3).unwrap(), FunctionModel::power(4.0));
        assert_eq!(power_model(-0.0, 3).unwrap(), FunctionModel::log_power(0));
        assert_eq!(power_model(2.001, 3).unwrap(), FunctionModel::power(2.001));
    }

    #[test]
    fn continuity_across_integer_exponents() {
        for (k, m1, m2) in [(0.0, 2, 0), (1.0, 1, 0), (2.0, 2, 0), (3.0, 3, 1)] {
            let at = mean_power(k, m1, m2, 1.0, 2.0).unwrap().value;
            for d in [-1e-4, 1e-4] {
                let near = mean_power(k + d, m1, m2, 1.0, 2.0).unwrap().value;
                assert!((near - at).abs() < 1e-4, "k={k} d={d}: {near} vs {at}");
            }
        }
    }

    #[test]
    fn large_exponents_are_normalized() {
        for p in [100.0, -100.0, 300.0, -300.0] {
            let r = mean_power(p, 2, 0, 1.0, 2.0).unwrap();
            assert!(r.value > 1.0 && r.value < 2.0);
            assert!(r.residual < 1e-10, "p={p}: {r:?}");
        }
        let r = mean_power(-300.0, 2, 0, 0.1, 10.0).unwrap();
        assert!(r.value > 0.1 && r.value < 10.0);
    }

    #[test]
    fn gap2_examples() {
        let r = mean_closed_gap2(&FunctionModel::log_power(0), 0, 1.0, 2.0).unwrap();
        assert!(close(r.value, 18.0 - 24.0 * 2f64.ln(), 1e-12), "{r:?}");
        assert!((r.value - 1.3644677).abs() < 1e-7);
        let closed = mean_closed_gap2(&FunctionModel::power(5.0), 0, 1.0, 2.0).unwrap().value;
        let solved = mean_of(&spec(FunctionModel::power(5.0), 2, 0), 1.0, 2.0).unwrap().value;
        assert!(close(closed, solved, 1e-10));
        let r = mean_closed_gap2(&FunctionModel::reciprocal(), 1, 1.0, 2.0).unwrap();
        assert!(close(r.value, 4.0 / 3.0, 1e-12));
        assert!(matches!(
            mean_closed_gap2(&FunctionModel::power(5.0), 2, 1.0, 2.0),
            Err(Error::UndefinedMean { .. })
        ));
    }

    #[test]
    fn gap2_expanded_m20_on_quartic() {
        let v = gap2_expanded(&FunctionModel::power(4.0), 0, 1.0, 2.0).unwrap().unwrap();
        assert!(close(v, 1.5, 1e-14));
    }

    #[test]
    fn power_and_log_closed_forms_match_solver() {
        for p in [-2.5, -0.5, 1.5, 2.5, 4.0, 7.0] {
            let solved = mean_power(p, 2, 0, 1.3, 3.1).unwrap().value;
            assert!(close(power_20_closed(p, 1.3, 3.1), solved, 1e-10), "p={p}");
        }
        for k in 0..=3 {
            let solved = mean_power(k as f64, 2, 0, 1.3, 3.1).unwrap().value;
            assert!(close(log_power_20_closed(k, 1.3, 3.1).unwrap(), solved, 1e-10), "k={k}");
        }
    }

    #[test]
    fn family_10_examples() {
        let r = mean_10_family(4.0, 1.0, 2.0).unwrap();
        assert!(close(r.value, (37f64.sqrt() - 3.0) / 2.0, 1e-12));
        assert_eq!(r.method, Method::Closed10);

        let r = mean_10_family(5.0, 1.0, 2.0).unwrap();
        // root of 2x^3 + 6x^2 + 14x - 45 on (1, 2), bisected independently
        let cubic = |x: f64| ((2.0 * x + 6.0) * x + 14.0) * x - 45.0;
        let (mut lo, mut hi) = (1.0, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cubic(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!(close(r.value, lo, 1e-12), "{} vs {lo}", r.value);
        assert!(close(mean_510_closed(1.0, 2.0), lo, 1e-12));

        let r = mean_10_family(3.0, 1.0, 2.0).unwrap();
        let s = mean_of(&spec(FunctionModel::power(3.0), 1, 0), 1.0, 2.0).unwrap();
        assert!(close(r.value, s.value, 1e-12));
        assert!(mean_10_family(2.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn symmetry_is_exact() {
        let s = spec(FunctionModel::power(2.5), 3, 1);
        assert_eq!(mean_of(&s, 1.2, 4.5).unwrap(), mean_of(&s, 4.5, 1.2).unwrap());
    }

    fn model_strategy() -> impl Strategy<Value = FunctionModel> {
        prop_oneof![
            (-3.0f64..6.0)
                .prop_filter("non-integer", |p| (p - p.round()).abs() > 0.05)
                .prop_map(FunctionModel::power),
            (0u32..3).prop_map(FunctionModel::log_power),
            Just(FunctionModel::exp()),
        ]
    }

    fn orders() -> impl Strategy<Value = (usize, usize)> {
        (1usize..=4).prop_flat_map(|m1| (Just(m1), 0..m1))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn strict_and_consistent(model in model_strategy(), (m1, m2) in orders(), a in 0.2f64..3.0, w in 0.3f64..3.0) {
            let b = a + w;
            let s = MeanSpec::new(model.clone(), m1, m2).unwrap();
            let r = mean_of(&s, a, b).unwrap();
            prop_assert!(r.value > a && r.value < b);
            prop_assert!(r.residual <= 1e-10, "residual {}", r.residual);

            let is = InterpolantSpec::new(m1, m2, a, b, Side::P).unwrap();
            let p = build_interpolant(&model, &is).unwrap().eval(r.value);
            let q = build_interpolant(&model, &is.with_side(Side::Q)).unwrap().eval(r.value);
            let f = model.eval_deriv(r.value, 0).unwrap();
            let scale = f.abs().max(1.0);
            if s.odd_gap() {
                prop_assert!((f - 0.5 * (p + q)).abs() <= 1e-9 * scale, "f={} P={} Q={}", f, p, q);
            } else {
                prop_assert!((p - q).abs() <= 1e-9 * scale, "P={} Q={}", p, q);
            }
        }

        #[test]
        fn homogeneity(p in (-3.0f64..6.0).prop_filter("non-integer", |p| (p - p.round()).abs() > 0.05),
                       (m1, m2) in orders(), a in 0.2f64..3.0, w in 0.3f64..3.0) {
            let b = a + w;
            let base = mean_power(p, m1, m2, a, b).unwrap().value;
            for k in [0.1, 3.0, 17.0] {
                let scaled = mean_power(p, m1, m2, k * a, k * b).unwrap().value;
                prop_assert!((scaled - k * base).abs() <= 1e-9 * k * base);
            }
        }

        #[test]
        fn polynomial_offset_invariance(model in model_strategy(), (m1, m2) in orders(),
                                         a in 0.2f64..3.0, w in 0.3f64..3.0,
                                         coeffs in prop::collection::vec(-2.0f64..2.0, 1..=5)) {
            let b = a + w;
            let n = m1 + m2 + 1;
            let poly: Vec<f64> = coeffs.into_iter().take(n + 1).collect();
            let plain = mean_of(&MeanSpec::new(model.clone(), m1, m2).unwrap(), a, b).unwrap().value;
            let shifted = mean_of(&MeanSpec::new(FunctionModel::shifted(model, poly), m1, m2).unwrap(), a, b).unwrap().value;
            prop_assert!(close(plain, shifted, 1e-9), "{} vs {}", plain, shifted);
        }
    }
}
