//! Two-point Hermite interpolants `P` and `Q`, their error forms and leading coefficients.

use std::fmt;

use crate::divdiff::{binom_int, divided_difference, ConfluentNodes, DividedDifferenceTable};
use crate::error::{Error, Result};
use crate::funcmodel::{factorial, FunctionModel};

/// Which interpolant: `P` matches `m1+1` conditions at `a`, `Q` matches `m2+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    P,
    Q,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::P => "P",
            Side::Q => "Q",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolantSpec {
    pub m1: usize,
    pub m2: usize,
    pub a: f64,
    pub b: f64,
    pub side: Side,
}

impl InterpolantSpec {
    pub fn new(m1: usize, m2: usize, a: f64, b: f64, side: Side) -> Result<Self> {
        if m2 > m1 {
            return Err(Error::InvalidParam(format!("need m2 <= m1, got m1 = {m1}, m2 = {m2}")));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain { what: "a", value: a });
        }
        if !(b > a) || !b.is_finite() {
            return Err(Error::InvalidParam(format!("need a < b, got a = {a}, b = {b}")));
        }
        Ok(InterpolantSpec { m1, m2, a, b, side })
    }

    /// Nominal degree `n = m1 + m2 + 1`.
    pub fn degree(&self) -> usize {
        self.m1 + self.m2 + 1
    }

    /// Number of conditions imposed at `a` and at `b`.
    pub fn multiplicities(&self) -> (usize, usize) {
        match self.side {
            Side::P => (self.m1 + 1, self.m2 + 1),
            Side::Q => (self.m2 + 1, self.m1 + 1),
        }
    }

    pub fn with_side(self, side: Side) -> Self {
        InterpolantSpec { side, ..self }
    }
}

/// Polynomial in Newton form `c0 + c1 (x-z0) + c2 (x-z0)(x-z1) + ...`.
/// A monomial polynomial is the special case with every node at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialRep {
    nodes: Vec<f64>,
    coeffs: Vec<f64>,
}

impl PolynomialRep {
    /// `nodes` must hold at least `coeffs.len() - 1` entries; extras are ignored.
    pub fn newton(nodes: Vec<f64>, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        assert!(nodes.len() + 1 >= coeffs.len(), "too few Newton nodes");
        PolynomialRep { nodes, coeffs }
    }

    /// From monomial coefficients, constant term first.
    pub fn monomial(coeffs: Vec<f64>) -> Self {
        let nodes = vec![0.0; coeffs.len().saturating_sub(1)];
        Self::newton(nodes, coeffs)
    }

    pub fn newton_nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn newton_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of the top Newton basis element, i.e. of `x^degree`.
    pub fn leading_coeff(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let d = self.degree();
        let mut acc = self.coeffs[d];
        for i in (0..d).rev() {
            acc = acc * (x - self.nodes[i]) + self.coeffs[i];
        }
        acc
    }

    /// Coefficients `t_j` with `p(x) = sum t_j (x - t)^j`, by repeated synthetic division.
    pub fn taylor_at(&self, t: f64) -> Vec<f64> {
        let deg = self.degree();
        let mut d = vec![self.coeffs[deg]];
        for i in (0..deg).rev() {
            let shift = t - self.nodes[i];
            let mut next = vec![0.0; d.len() + 1];
            for (j, &dj) in d.iter().enumerate() {
                next[j] += shift * dj;
                next[j + 1] += dj;
            }
            next[0] += self.coeffs[i];
            d = next;
        }
        d
    }

    /// `p^{(j)}(t)`.
    pub fn derivative_at(&self, t: f64, j: usize) -> f64 {
        self.taylor_at(t).get(j).copied().unwrap_or(0.0) * factorial(j)
    }

    /// Monomial coefficients, constant term first.
    pub fn to_monomial(&self) -> Vec<f64> {
        self.taylor_at(0.0)
    }
}

/// Monomial-basis helpers; coefficient vectors are constant term first.
pub mod mono {
    pub fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len() + q.len() - 1];
        for (i, &pi) in p.iter().enumerate() {
            for (j, &qj) in q.iter().enumerate() {
                out[i + j] += pi * qj;
            }
        }
        out
    }

    /// `(c0 + c1 x)^k`.
    pub fn linear_pow(c0: f64, c1: f64, k: usize) -> Vec<f64> {
        (0..k).fold(vec![1.0], |acc, _| mul(&acc, &[c0, c1]))
    }

    /// `acc += s * p`, growing `acc` as needed.
    pub fn add_scaled(acc: &mut Vec<f64>, p: &[f64], s: f64) {
        if acc.len() < p.len() {
            acc.resize(p.len(), 0.0);
        }
        for (a, &c) in acc.iter_mut().zip(p) {
            *a += s * c;
        }
    }

    pub fn eval(p: &[f64], x: f64) -> f64 {
        p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Quotient and remainder of `num / den`; `den` must have a nonzero top coefficient.
    pub fn divrem(num: &[f64], den: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let dd = den.len() - 1;
        let lead = den[dd];
        let mut rem = num.to_vec();
        if num.len() <= dd {
            return (vec![0.0], rem);
        }
        let mut quot = vec![0.0; num.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= q * dj;
            }
        }
        rem.truncate(dd.max(1));
        (quot, rem)
    }
}

fn nodes_for(spec: &InterpolantSpec) -> Result<ConfluentNodes> {
    let (ma, mb) = spec.multiplicities();
    ConfluentNodes::new([(spec.a, ma), (spec.b, mb)])
}

/// Hermite interpolant in Newton form over `a^{ma} b^{mb}`.
pub fn build_interpolant(model: &FunctionModel, spec: &InterpolantSpec) -> Result<PolynomialRep> {
    let table = DividedDifferenceTable::build(model, &nodes_for(spec)?)?;
    Ok(PolynomialRep::newton(table.nodes().to_vec(), table.newton_coeffs()))
}

/// The same interpolant from the two-point Hermite double-sum formula, in monomial form.
pub fn explicit_interpolant(model: &FunctionModel, spec: &InterpolantSpec) -> Result<PolynomialRep> {
    let (ma, mb) = spec.multiplicities();
    let (al, be) = (ma - 1, mb - 1);
    let (a, b) = (spec.a, spec.b);
    let h = b - a;
    let mut out = vec![0.0];

    // a-block: ((x-b)/(a-b))^{be+1} sum (x-a)^j/j! C(be+k,k) ((x-a)/(b-a))^k f^{(j)}(a)
    let mut inner = vec![0.0];
    for j in 0..=al {
        let fa = model.eval_deriv(a, j)? / factorial(j);
        for k in 0..=(al - j) {
            let term = mono::linear_pow(-a, 1.0, j + k);
            mono::add_scaled(&mut inner, &term, fa * binom_int(be + k, k) / h.powi(k as i32));
        }
    }
    let weight = mono::linear_pow(b / h, -1.0 / h, be + 1);
    mono::add_scaled(&mut out, &mono::mul(&weight, &inner), 1.0);

    // b-block: ((x-a)/(b-a))^{al+1} sum (x-b)^j/j! C(al+k,k) ((x-b)/(a-b))^k f^{(j)}(b)
    let mut inner = vec![0.0];
    for j in 0..=be {
        let fb = model.eval_deriv(b, j)? / factorial(j);
        for k in 0..=(be - j) {
            let term = mono::linear_pow(-b, 1.0, j + k);
            mono::add_scaled(&mut inner, &term, fb * binom_int(al + k, k) / (-h).powi(k as i32));
        }
    }
    let weight = mono::linear_pow(-a / h, 1.0 / h, al + 1);
    mono::add_scaled(&mut out, &mono::mul(&weight, &inner), 1.0);

    out.resize(spec.degree() + 1, 0.0);
    Ok(PolynomialRep::monomial(out))
}

/// `f(x) - P(x)` in product form `(x-a)^{ma} (x-b)^{mb} f[x, a^{ma}, b^{mb}]`.
pub fn error_at(model: &FunctionModel, spec: &InterpolantSpec, x: f64) -> Result<f64> {
    if !(x > spec.a && x < spec.b) {
        return Err(Error::InvalidParam(format!(
            "error_at needs a < x < b, got x = {x} on ({}, {})",
            spec.a, spec.b
        )));
    }
    let (ma, mb) = spec.multiplicities();
    let nodes = ConfluentNodes::point_and_two_blocks(x, spec.a, ma, spec.b, mb)?;
    let dd = divided_difference(model, &nodes)?;
    Ok((x - spec.a).powi(ma as i32) * (x - spec.b).powi(mb as i32) * dd)
}

/// Leading coefficient of the interpolant from endpoint derivative data alone.
pub fn leading_coeff(model: &FunctionModel, spec: &InterpolantSpec) -> Result<f64> {
    let (ma, mb) = spec.multiplicities();
    let (al, be) = (ma - 1, mb - 1);
    let (a, b) = (spec.a, spec.b);
    let h = b - a;
    let mut at_b = 0.0;
    for j in 0..=be {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        at_b += sign * binom_int(al + be - j, al) * h.powi(j as i32) * model.eval_deriv(b, j)? / factorial(j);
    }
    let mut at_a = 0.0;
    for j in 0..=al {
        at_a += binom_int(al + be - j, be) * h.powi(j as i32) * model.eval_deriv(a, j)? / factorial(j);
    }
    let sign = if be % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * (at_b - at_a) / h.powi(spec.degree() as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divdiff::confluent_columns;
    use crate::real::{HiFloat, Real};
    use proptest::prelude::*;

    fn spec(m1: usize, m2: usize, a: f64, b: f64, side: Side) -> InterpolantSpec {
        InterpolantSpec::new(m1, m2, a, b, side).unwrap()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
    }

    #[test]
    fn spec_validation() {
        assert!(InterpolantSpec::new(1, 2, 1.0, 2.0, Side::P).is_err());
        assert!(InterpolantSpec::new(1, 0, 0.0, 2.0, Side::P).is_err());
        assert!(InterpolantSpec::new(1, 0, 2.0, 1.0, Side::P).is_err());
        assert!(InterpolantSpec::new(2, 2, 1.0, 2.0, Side::Q).is_ok());
        assert_eq!(spec(3, 1, 1.0, 2.0, Side::Q).multiplicities(), (2, 4));
    }

    #[test]
    fn build_examples() {
        let p = build_interpolant(&FunctionModel::power(4.0), &spec(2, 0, 1.0, 2.0, Side::P)).unwrap();
        assert_eq!(p.degree(), 3);
        assert!(close(p.eval(1.0), 1.0, 1e-14));
        assert!(close(p.derivative_at(1.0, 1), 4.0, 1e-14));
        assert!(close(p.derivative_at(1.0, 2), 12.0, 1e-14));
        assert!(close(p.eval(2.0), 16.0, 1e-14));

        let m = FunctionModel::exp();
        let s = spec(0, 0, 0.5, 1.5, Side::P);
        let line = build_interpolant(&m, &s).unwrap();
        let slope = (1.5f64.exp() - 0.5f64.exp()) / 1.0;
        for x in [0.5, 0.8, 1.5] {
            assert!(close(line.eval(x), 0.5f64.exp() + slope * (x - 0.5), 1e-14));
        }

        let q = build_interpolant(&FunctionModel::reciprocal(), &spec(1, 0, 1.0, 2.0, Side::Q)).unwrap();
        assert_eq!(q.degree(), 2);
        assert!(close(q.eval(1.0), 1.0, 1e-15));
        assert!(close(q.eval(2.0), 0.5, 1e-15));
        assert!(close(q.derivative_at(2.0, 1), -0.25, 1e-15));
    }

    #[test]
    fn explicit_examples() {
        let m = FunctionModel::power(4.0);
        let s = spec(2, 0, 1.0, 2.0, Side::P);
        assert!(close(explicit_interpolant(&m, &s).unwrap().eval(2.0), 16.0, 1e-13));
        let s = spec(1, 0, 1.0, 2.0, Side::P);
        assert!(explicit_interpolant(&FunctionModel::log_power(0), &s).unwrap().eval(1.0).abs() < 1e-15);
    }

    #[test]
    fn explicit_agrees_with_newton() {
        let m = FunctionModel::power(2.5);
        for side in [Side::P, Side::Q] {
            let s = spec(3, 1, 1.0, 2.0, side);
            let e = explicit_interpolant(&m, &s).unwrap();
            let n = build_interpolant(&m, &s).unwrap();
            for i in 0..=10 {
                let x = 1.0 + i as f64 / 10.0;
                let (pe, pn) = (e.eval(x), n.eval(x));
                assert!((pe - pn).abs() <= 1e-9 * pn.abs().max(1.0), "{side} x={x}: {pe} vs {pn}");
            }
        }
    }

    #[test]
    fn error_examples() {
        let m = FunctionModel::power(4.0);
        let s = spec(2, 0, 1.0, 2.0, Side::P);
        let p = build_interpolant(&m, &s).unwrap();
        let e = error_at(&m, &s, 1.5).unwrap();
        let direct = 1.5f64.powi(4) - p.eval(1.5);
        assert!(close(e, direct, 1e-10));
        // top divided difference of x^{n+1} is 1
        assert!(close(e, 0.5f64.powi(3) * -0.5, 1e-14));

        let near = |h: f64| error_at(&m, &s, 1.0 + h).unwrap();
        let ratio = near(1e-3) / near(2e-3);
        assert!((ratio - 0.125).abs() < 1e-2);
        assert!(error_at(&m, &s, 1.0).is_err());
        assert!(error_at(&m, &s, 2.5).is_err());
    }

    #[test]
    fn leading_coeff_examples() {
        let m = FunctionModel::power(4.0);
        let s = spec(2, 0, 1.0, 2.0, Side::P);
        assert!(close(leading_coeff(&m, &s).unwrap(), 5.0, 1e-14));
        assert!(close(build_interpolant(&m, &s).unwrap().leading_coeff(), 5.0, 1e-14));
        // brute force: complete homogeneous sum of {1,1,1,2} in degree 1
        let h1: f64 = [1.0, 1.0, 1.0, 2.0].iter().sum();
        assert_eq!(h1, 5.0);

        let r = FunctionModel::reciprocal();
        let s = spec(1, 0, 1.0, 2.0, Side::P);
        assert!(close(leading_coeff(&r, &s).unwrap(), 0.5, 1e-15));

        // a cubic is reproduced exactly by a degree-3 interpolant
        let cubic = FunctionModel::shifted(FunctionModel::power(0.5), vec![0.0, 0.0, 0.0, 2.0]);
        let pure = FunctionModel::power(0.5);
        let s = spec(2, 0, 1.0, 3.0, Side::Q);
        let d = leading_coeff(&cubic, &s).unwrap() - leading_coeff(&pure, &s).unwrap();
        assert!(close(d, 2.0, 1e-12));
    }

    #[test]
    fn monomial_round_trip() {
        let m = FunctionModel::log_power(1);
        let p = build_interpolant(&m, &spec(3, 2, 1.0, 2.5, Side::P)).unwrap();
        let mono_p = PolynomialRep::monomial(p.to_monomial());
        assert_eq!(mono_p.degree(), p.degree());
        for x in [0.9, 1.3, 1.77, 2.2, 2.6] {
            assert!(close(mono_p.eval(x), p.eval(x), 1e-9));
        }
    }

    #[test]
    fn divrem_exact() {
        // (x^2 - 1) = (x - 1)(x + 1)
        let (q, r) = mono::divrem(&[-1.0, 0.0, 1.0], &[-1.0, 1.0]);
        assert_eq!(q, vec![1.0, 1.0]);
        assert_eq!(r, vec![0.0]);
    }

    fn leading_coeff_reference(model: &FunctionModel, s: &InterpolantSpec) -> f64 {
        let (ma, mb) = s.multiplicities();
        let blocks = [(HiFloat::new(s.a, 200), ma), (HiFloat::new(s.b, 200), mb)];
        let cols = confluent_columns(&blocks, |x, j| model.eval_deriv_hp(x, j)).unwrap();
        cols.last().unwrap()[0].to_f64()
    }

    fn leading_coeff_magnitude(model: &FunctionModel, s: &InterpolantSpec) -> f64 {
        let (ma, mb) = s.multiplicities();
        let h = s.b - s.a;
        let side = |x: f64, m: usize| -> f64 {
            (0..m).map(|j| h.powi(j as i32) * model.eval_deriv(x, j).unwrap().abs() / factorial(j)).sum()
        };
        let weight = binom_int(ma + mb - 2, ma - 1).max(1.0);
        weight * (side(s.a, ma) + side(s.b, mb)) / h.powi(s.degree() as i32)
    }

    fn model_strategy() -> impl Strategy<Value = FunctionModel> {
        prop_oneof![
            (-3.0f64..6.0).prop_map(FunctionModel::power),
            (0u32..4).prop_map(FunctionModel::log_power),
            Just(FunctionModel::exp()),
        ]
    }

    fn spec_strategy() -> impl Strategy<Value = InterpolantSpec> {
        (0usize..=4, 0usize..=4, 0.5f64..2.0, 0.5f64..2.0, any::<bool>()).prop_map(|(i, j, a, w, q)| {
            let (m1, m2) = (i.max(j), i.min(j));
            InterpolantSpec::new(m1, m2, a, a + w, if q { Side::Q } else { Side::P }).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn interpolation_conditions(model in model_strategy(), s in spec_strategy()) {
            let p = build_interpolant(&model, &s).unwrap();
            let (ma, mb) = s.multiplicities();
            for (x, m) in [(s.a, ma), (s.b, mb)] {
                let taylor = p.taylor_at(x);
                for j in 0..m {
                    let want = model.eval_deriv(x, j).unwrap();
                    let got = taylor[j] * factorial(j);
                    prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "j={} at {}: {} vs {}", j, x, got, want);
                }
            }
        }

        #[test]
        fn error_form_matches_subtraction(model in model_strategy(), s in spec_strategy()) {
            let p = build_interpolant(&model, &s).unwrap();
            for i in 1..=25 {
                let x = s.a + (s.b - s.a) * i as f64 / 26.0;
                let e = error_at(&model, &s, x).unwrap();
                let fx = model.eval_deriv(x, 0).unwrap();
                let direct = fx - p.eval(x);
                // the subtraction oracle is itself only good to a few ulps of f(x)
                let tol = 1e-9 * e.abs() + 1e-13 * fx.abs().max(1.0);
                prop_assert!((e - direct).abs() <= tol, "x={}: {} vs {}", x, e, direct);
            }
        }

        #[test]
        fn leading_coeff_matches_newton(model in model_strategy(), s in spec_strategy()) {
            let want = leading_coeff_reference(&model, &s);
            // both binary64 routes sum terms of size `magnitude` before the cancellation
            let tol = 1e-9 * want.abs() + 64.0 * f64::EPSILON * leading_coeff_magnitude(&model, &s);
            let c = leading_coeff(&model, &s).unwrap();
            let t = build_interpolant(&model, &s).unwrap().leading_coeff();
            prop_assert!((c - want).abs() <= tol, "closed {} vs {}", c, want);
            prop_assert!((t - want).abs() <= tol, "newton {} vs {}", t, want);
        }

        #[test]
        fn p_minus_q_factor_structure(model in model_strategy(), s in spec_strategy()) {
            let p = build_interpolant(&model, &s.with_side(Side::P)).unwrap().to_monomial();
            let q = build_interpolant(&model, &s.with_side(Side::Q)).unwrap().to_monomial();
            let diff: Vec<f64> = p.iter().zip(&q).map(|(x, y)| x - y).collect();
            let factor = mono::mul(
                &mono::linear_pow(-s.a, 1.0, s.m2 + 1),
                &mono::linear_pow(-s.b, 1.0, s.m2 + 1),
            );
            let (_, rem) = mono::divrem(&diff, &factor);
            let biggest = p.iter().chain(&q).fold(0.0f64, |m, c| m.max(c.abs()));
            for r in rem {
                prop_assert!(r.abs() <= 1e-8 * biggest.max(1.0), "remainder {} vs {}", r, biggest);
            }
        }
    }
}
