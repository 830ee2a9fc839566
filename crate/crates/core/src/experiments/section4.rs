//! Why `M_{log x,2,0}` is not a Taylor-polynomial mean: derivatives of
//! `h(b) = M_{log x,2,0}(1, b)` at `b = 1` against the power-family constraints.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::{rational, Rational};

/// Coefficient of `u^i` in `h(1 + u) / (3 (1 + u))`.
fn series_coeff(i: usize) -> f64 {
    let s = if i % 2 == 0 { 2.0 } else { -2.0 };
    s / ((i + 3) * (i + 2)) as f64
}

const SERIES_BELOW: f64 = 0.1;
const SERIES_TERMS: usize = 40;

/// `h(b) = 3b (b^2 - 1 - 2b ln b) / (b - 1)^3`, with a series branch near `b = 1`.
pub fn h_log20(b: f64) -> f64 {
    let u = b - 1.0;
    if u.abs() < SERIES_BELOW {
        h_series(u)
    } else {
        h_direct(u)
    }
}

fn h_series(u: f64) -> f64 {
    let s: f64 = (0..SERIES_TERMS).rev().fold(0.0, |acc, i| acc * u + series_coeff(i));
    3.0 * (1.0 + u) * s
}

fn h_direct(u: f64) -> f64 {
    let b = 1.0 + u;
    let num = u * (2.0 + u) - 2.0 * b * u.ln_1p();
    3.0 * b * num / (u * u * u)
}

/// Exact `h^{(k)}(1)` for `k = 1..=4` from the series of `h(1 + u)`.
pub fn h_derivatives_exact() -> [Rational; 4] {
    let c = |i: i64| -> Rational {
        if i < 0 {
            return Rational::zero();
        }
        let s = if i % 2 == 0 { 2 } else { -2 };
        rational(s, (i + 3) * (i + 2))
    };
    let mut out: [Rational; 4] = Default::default();
    let mut fact = Rational::one();
    for k in 1..=4i64 {
        fact *= rational(k, 1);
        out[(k - 1) as usize] = (c(k) + c(k - 1)) * rational(3, 1) * &fact;
    }
    out
}

/// Central-difference estimates of `h^{(k)}(1)`, `k = 1..=4`, with one Richardson step.
pub fn h_derivatives_numeric(step: f64) -> [f64; 4] {
    let stencil = |s: f64| -> [f64; 4] {
        let f = |k: f64| h_log20(1.0 + k * s);
        let (m2, m1, z, p1, p2) = (f(-2.0), f(-1.0), f(0.0), f(1.0), f(2.0));
        [
            (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * s),
            (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * s * s),
            (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * s * s * s),
            (p2 - 4.0 * p1 + 6.0 * z - 4.0 * m1 + m2) / (s * s * s * s),
        ]
    };
    let coarse = stencil(step);
    let fine = stencil(step / 2.0);
    // leading error orders of the four stencils: s^4, s^4, s^2, s^2
    let orders = [4, 4, 2, 2];
    let mut out = [0.0; 4];
    for k in 0..4 {
        let w = 2f64.powi(orders[k]);
        out[k] = (w * fine[k] - coarse[k]) / (w - 1.0);
    }
    out
}

type Poly = Vec<Rational>;

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(Rational::zero) + b.get(i).cloned().unwrap_or_else(Rational::zero))
        .collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_scale(a: &Poly, c: &Rational) -> Poly {
    a.iter().map(|x| x * c).collect()
}

fn poly_eval(a: &Poly, x: &Rational) -> Rational {
    a.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn is_zero_poly(a: &Poly) -> bool {
    a.iter().all(Zero::is_zero)
}

fn q(n: i64) -> Rational {
    rational(n, 1)
}

/// Exact solution of the matching conditions `k''(1) = h''(1)`, `k'''(1) = h'''(1)`,
/// `k''''(1) = h''''(1)` for the order-`r` Taylor mean of `x^p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSolution {
    /// `r = r_slope p + r_intercept` from the second-derivative condition.
    pub r_slope: String,
    pub r_intercept: String,
    /// The third-derivative condition holds identically on that line.
    pub third_consistent: bool,
    /// `k''''(1)` on the line equals `-12/125 (70p + 99)/(5p + 7)`.
    pub fourth_reduction_holds: bool,
    pub p: String,
    pub r: String,
    pub r_is_positive_odd_integer: bool,
}

pub fn solve_constraints(targets: &[Rational; 4]) -> Result<ConstraintSolution> {
    let [_, t2, t3, t4] = targets;
    // (p - r - 1) / (2 (r + 2)) = t2  =>  r (1 + 2 t2) = p - 1 - 4 t2
    let denom = Rational::one() + t2 * q(2);
    if denom.is_zero() {
        return Err(Error::Degenerate("second-derivative condition does not determine r".into()));
    }
    let slope = denom.recip();
    let intercept = -(Rational::one() + t2 * q(4)) / &denom;
    // on that line (p - r - 1) / (r + 2) = 2 t2, so k''' = -3/4 * 2 t2
    let third_consistent = rational(-3, 2) * t2 == *t3;

    let p: Poly = vec![Rational::zero(), Rational::one()];
    let r: Poly = vec![intercept.clone(), slope.clone()];
    let konst = |v: i64| -> Poly { vec![q(v)] };
    let r2 = poly_mul(&r, &r);
    let r3 = poly_mul(&r2, &r);
    let pr1 = poly_add(&poly_add(&p, &poly_scale(&r, &q(-1))), &konst(-1));
    let p_sq = poly_mul(&p, &p);
    // 12r^3 + 8(p+13)r^2 - 4(p^2 - 12p - 73)r - 16(2p^2 - p - 15)
    let t_a = poly_scale(&r3, &q(12));
    let t_b = poly_scale(&poly_mul(&poly_add(&p, &konst(13)), &r2), &q(8));
    let quad = poly_add(&poly_add(&p_sq, &poly_scale(&p, &q(-12))), &konst(-73));
    let t_c = poly_scale(&poly_mul(&quad, &r), &q(-4));
    let quad2 = poly_add(&poly_add(&poly_scale(&p_sq, &q(2)), &poly_scale(&p, &q(-1))), &konst(-15));
    let t_d = poly_scale(&quad2, &q(-16));
    let bracket = poly_add(&poly_add(&t_a, &t_b), &poly_add(&t_c, &t_d));
    let numer = poly_mul(&pr1, &bracket);
    let r_plus2 = poly_add(&r, &konst(2));
    let r_plus4 = poly_add(&r, &konst(4));
    let denom4 = poly_scale(&poly_mul(&poly_mul(&poly_mul(&r_plus2, &r_plus2), &r_plus2), &r_plus4), &q(8));

    // 125 N (5p + 7) + 12 (70p + 99) D == 0
    let lin_a: Poly = vec![q(7), q(5)];
    let lin_b: Poly = vec![q(99), q(70)];
    let reduction = poly_add(
        &poly_scale(&poly_mul(&numer, &lin_a), &q(125)),
        &poly_scale(&poly_mul(&lin_b, &denom4), &q(12)),
    );
    let fourth_reduction_holds = is_zero_poly(&reduction);

    // -12/125 (70p + 99) = t4 (5p + 7)
    let k = rational(-12, 125);
    let coef = &k * q(70) - t4 * q(5);
    let rhs = t4 * q(7) - &k * q(99);
    if coef.is_zero() {
        return Err(Error::Degenerate("fourth-derivative condition is independent of p".into()));
    }
    let p_sol = rhs / coef;
    let d_at = poly_eval(&denom4, &p_sol);
    if d_at.is_zero() || poly_eval(&numer, &p_sol) / d_at != *t4 {
        return Err(Error::Contract("reduced fourth-derivative equation disagrees with the full one".into()));
    }
    let r_sol = &slope * &p_sol + &intercept;
    let r_is_positive_odd_integer =
        r_sol.is_integer() && r_sol.is_positive() && (r_sol.to_integer() % 2u32) == 1u32.into();
    Ok(ConstraintSolution {
        r_slope: slope.to_string(),
        r_intercept: intercept.to_string(),
        third_consistent,
        fourth_reduction_holds,
        p: p_sol.to_string(),
        r: r_sol.to_string(),
        r_is_positive_odd_integer,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section4Report {
    pub exact: [String; 4],
    pub estimates: [f64; 4],
    pub tolerances: [f64; 4],
    pub estimates_pass: bool,
    pub solution: ConstraintSolution,
    /// The log mean is not a Taylor mean of any power.
    pub not_representable: bool,
}

pub const DERIVATIVE_TOLERANCES: [f64; 4] = [1e-4, 1e-3, 1e-2, 1e-2];
const STEP: f64 = 0.05;

pub fn section4_nonrepresentability() -> Result<Section4Report> {
    let exact = h_derivatives_exact();
    let estimates = h_derivatives_numeric(STEP);
    let estimates_pass = (0..4).all(|k| {
        let e = exact[k].to_f64().unwrap_or(f64::NAN);
        (estimates[k] - e).abs() <= DERIVATIVE_TOLERANCES[k]
    });
    let solution = solve_constraints(&exact)?;
    let not_representable = solution.third_consistent && solution.fourth_reduction_holds && !solution.r_is_positive_odd_integer;
    Ok(Section4Report {
        exact: exact.map(|v| v.to_string()),
        estimates,
        tolerances: DERIVATIVE_TOLERANCES,
        estimates_pass,
        solution,
        not_representable,
    })
}
