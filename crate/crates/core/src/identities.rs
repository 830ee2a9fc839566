//! Exact verification of the binomial-sum identities behind the geometric-mean theorem.
//!
//! Every sum is evaluated term by term in arbitrary-precision rationals; an identity
//! instance passes only if both sides are identical.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// `q (q-1) ... (q-k+1) / k!`; zero for negative `k`.
pub fn binom_general(q: &Rational, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * (q - int(i)) / int(i + 1);
    }
    acc
}

fn binom_int(n: i64, k: i64) -> Rational {
    binom_general(&int(n), k)
}

fn pow(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        (0..e).fold(Rational::one(), |acc, _| acc * x)
    } else {
        let inv = x.recip();
        (0..-e).fold(Rational::one(), |acc, _| acc * &inv)
    }
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Identity {
    L0,
    L1,
    L2,
    Lid,
    Rid,
    Lid2,
    Rid2,
    Lrid,
    Claim6,
    Claim7,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::L0,
        Identity::L1,
        Identity::L2,
        Identity::Lid,
        Identity::Rid,
        Identity::Lid2,
        Identity::Rid2,
        Identity::Lrid,
        Identity::Claim6,
        Identity::Claim7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::L0 => "L0",
            Identity::L1 => "L1",
            Identity::L2 => "L2",
            Identity::Lid => "lid",
            Identity::Rid => "rid",
            Identity::Lid2 => "lid2",
            Identity::Rid2 => "rid2",
            Identity::Lrid => "lrid",
            Identity::Claim6 => "claim6",
            Identity::Claim7 => "claim7",
        }
    }

    /// Name of the rational parameter: `y` for L1, `b` otherwise.
    pub fn param_name(self) -> &'static str {
        if self == Identity::L1 {
            "y"
        } else {
            "b"
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown identity {s:?}")))
    }
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub m1: i64,
    /// Absent for identities that involve `m1` only.
    pub m2: Option<i64>,
    pub param_name: &'static str,
    #[serde(serialize_with = "ser_rational")]
    pub param: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: Rational,
    /// Both sides carry this extra factor `sqrt(b)` when set.
    pub sqrt_factor: bool,
    pub equal: bool,
}

impl IdentityReport {
    fn new(name: &str, m1: i64, m2: Option<i64>, param_name: &'static str, param: &Rational, lhs: Rational, rhs: Rational) -> Self {
        let equal = lhs == rhs;
        IdentityReport {
            name: name.to_string(),
            m1,
            m2,
            param_name,
            param: param.clone(),
            lhs,
            rhs,
            sqrt_factor: false,
            equal,
        }
    }

    /// `name m1 m2 param lhs rhs equal`, with `-` for an absent `m2`.
    pub fn line(&self) -> String {
        let m2 = self.m2.map_or("-".to_string(), |m| m.to_string());
        let root = if self.sqrt_factor { "*sqrt(b)" } else { "" };
        format!(
            "{} {} {} {}={} {}{root} {}{root} {}",
            self.name, self.m1, m2, self.param_name, self.param, self.lhs, self.rhs, self.equal
        )
    }
}

fn reject(id: &str, what: &str) -> Error {
    Error::InvalidParam(format!("{id}: {what}"))
}

fn half(n: i64) -> Rational {
    rational(n, 2)
}

/// `sum_{k<=m1} sum_{l<=m1-k} w(l) C(p,k) s_k (1-b)^k (1+b)^{-l} t(l, k)` with the two
/// sides of the second lemma as special cases.
fn lemma2_sum(m1: i64, m2: i64, b: &Rational, alternate: bool, right: bool, weight_top_m2: bool) -> Rational {
    if m1 < 0 {
        return Rational::zero();
    }
    let p = half(m1 + m2 + 1);
    let one_minus = Rational::one() - b;
    let one_plus = Rational::one() + b;
    let mut acc = Rational::zero();
    for k in 0..=m1 {
        for l in 0..=(m1 - k) {
            let w = if weight_top_m2 { binom_int(m2 + l, m2) } else { binom_int(m2 + l, l) };
            let mut term = w * binom_general(&p, k) * pow(&one_minus, k) * pow(&one_plus, -l);
            if alternate {
                term *= sign(k);
            }
            if right {
                term *= pow(b, l - k);
            }
            acc += term;
        }
    }
    if right {
        acc * pow(b, m1)
    } else {
        acc
    }
}

/// `L_{m1,m2}(b)`.
pub fn l_sum(m1: i64, m2: i64, b: &Rational) -> Rational {
    lemma2_sum(m1, m2, b, true, false, false)
}

/// `R_{m1,m2}(b)`.
pub fn r_sum(m1: i64, m2: i64, b: &Rational) -> Rational {
    lemma2_sum(m1, m2, b, false, true, false)
}

/// `L_{m1+1,m2-1}(b)` from `L_{m1,m2}(b)` by the raising recursion.
pub fn lid_step(m1: i64, m2: i64, b: &Rational, l: &Rational) -> Rational {
    let p = half(m1 + m2 + 1);
    let one_plus = Rational::one() + b;
    let mut tail = Rational::zero();
    for k in 0..=(m1 + 1) {
        tail += binom_int(m2 + m1 + 1 - k, m2)
            * binom_general(&p, k)
            * sign(k)
            * pow(&(Rational::one() - b), k)
            * pow(&one_plus, -m1 - 1 + k);
    }
    b / &one_plus * l + tail
}

/// `R_{m1+1,m2-1}(b)` from `R_{m1,m2}(b)`.
pub fn rid_step(m1: i64, m2: i64, b: &Rational, r: &Rational) -> Rational {
    let p = half(m1 + m2 + 1);
    let one_plus = Rational::one() + b;
    let mut tail = Rational::zero();
    for k in 0..=(m1 + 1) {
        tail += binom_int(m2 + m1 + 1 - k, m2)
            * binom_general(&p, k)
            * pow(&(Rational::one() - b), k)
            * pow(&one_plus, -m1 - 1 + k)
            * pow(b, 2 * m1 + 2 - 2 * k);
    }
    b / &one_plus * r + tail
}

/// `L_{m1-1,m2+1}(b)` from `L_{m1,m2}(b)` by the lowering recursion.
pub fn lid2_step(m1: i64, m2: i64, b: &Rational, l: &Rational) -> Rational {
    let p = half(m1 + m2 + 1);
    let one_minus = Rational::one() - b;
    let one_plus = Rational::one() + b;
    let factor = &one_plus / b;
    let mut tail = Rational::zero();
    for k in 0..m1 {
        tail += sign(k)
            * binom_int(m1 + m2 - k + 1, m2 + 1)
            * binom_general(&p, k)
            * pow(&one_minus, k)
            * pow(&one_plus, -(m1 - k));
    }
    let edge = sign(m1) * binom_general(&p, m1) * pow(&one_minus, m1);
    &factor * l - &factor * edge - &factor * tail
}

/// `R_{m1-1,m2+1}(b)` from `R_{m1,m2}(b)`.
pub fn rid2_step(m1: i64, m2: i64, b: &Rational, r: &Rational) -> Rational {
    let p = half(m1 + m2 + 1);
    let b_minus = b - Rational::one();
    let one_plus = Rational::one() + b;
    let factor = &one_plus / b;
    let mut tail = Rational::zero();
    for k in 0..m1 {
        tail += sign(k)
            * binom_int(m1 + m2 - k + 1, m2 + 1)
            * binom_general(&p, k)
            * pow(&b_minus, k)
            * pow(&one_plus, -m1 + k)
            * pow(b, 2 * m1 - 2 * k);
    }
    let edge = sign(m1) * binom_general(&p, m1) * pow(&b_minus, m1);
    &factor * r - &factor * edge - &factor * tail
}

fn l0_sides(m1: i64, b: &Rational) -> (Rational, Rational) {
    let q = half(m1);
    let one_minus = Rational::one() - b;
    let mut lhs = Rational::zero();
    let mut rhs = Rational::zero();
    for k in 0..=m1 {
        let c = binom_general(&q, k) * pow(&one_minus, k);
        lhs += sign(k) * &c;
        rhs += c * pow(b, -k);
    }
    (lhs, rhs * pow(b, m1))
}

fn l1_sides(m1: i64, m2: i64, y: &Rational) -> (Rational, Rational) {
    let q = half(m1 + m2);
    let one_minus = Rational::one() - y;
    let mut lhs = Rational::zero();
    let mut rhs = Rational::zero();
    for k in 0..=m1 {
        let c = binom_int(m2 + m1 - k, m2) * binom_general(&q, k) * pow(&one_minus, k);
        lhs += sign(k) * &c;
        rhs += c * pow(y, -k);
    }
    (lhs, rhs * pow(y, m1))
}

fn claim7_sides(m1: i64, m2: i64, b: &Rational) -> (Rational, Rational) {
    let p = half(m1 + m2 + 1);
    let one_minus = Rational::one() - b;
    let one_plus = Rational::one() + b;
    let mut lhs = Rational::zero();
    let mut rhs = Rational::zero();
    for k in 0..=m2 {
        for l in 0..=(m2 - k) {
            let c = binom_int(m1 + l, m1) * binom_general(&p, k) * pow(&one_minus, k) * pow(&one_plus, -l);
            lhs += sign(k) * &c;
            rhs += c * pow(b, l - k);
        }
    }
    (lhs, rhs * pow(b, m2))
}

fn check_domain(id: Identity, m1: i64, m2: i64, param: &Rational) -> Result<()> {
    let name = id.name();
    if m1 < 0 {
        return Err(reject(name, "m1 >= 0 required"));
    }
    let one = Rational::one();
    match id {
        Identity::L0 => {
            if param.is_zero() {
                return Err(reject(name, "b != 0 required"));
            }
        }
        Identity::L1 => {
            if !param.is_positive() {
                return Err(reject(name, "y > 0 required"));
            }
        }
        _ => {
            if param.is_zero() {
                return Err(reject(name, "b != 0 required"));
            }
            if *param == -one.clone() {
                return Err(reject(name, "b != -1 required"));
            }
        }
    }
    match id {
        Identity::L2 | Identity::Lrid if m2 < -1 => Err(reject(name, "m2 >= -1 required")),
        Identity::Lid | Identity::Rid if m2 < 0 => Err(reject(name, "m2 >= 0 required (lowers m2 by one)")),
        Identity::Lid2 | Identity::Rid2 if m1 < 1 || m2 < -1 => {
            Err(reject(name, "m1 >= 1 and m2 >= -1 required (lowers m1 by one)"))
        }
        Identity::Claim6 | Identity::Claim7 if m2 < 0 => Err(reject(name, "m2 >= 0 required")),
        _ => Ok(()),
    }
}

/// Evaluates both sides of one identity instance. `m2` is ignored by `L0`.
pub fn check_identity(id: Identity, m1: i64, m2: i64, param: &Rational) -> Result<IdentityReport> {
    check_domain(id, m1, m2, param)?;
    let b = param;
    let (lhs, rhs) = match id {
        Identity::L0 => l0_sides(m1, b),
        Identity::L1 => l1_sides(m1, m2, b),
        Identity::L2 => (l_sum(m1, m2, b), r_sum(m1, m2, b)),
        Identity::Lid => (l_sum(m1 + 1, m2 - 1, b), lid_step(m1, m2, b, &l_sum(m1, m2, b))),
        Identity::Rid => (r_sum(m1 + 1, m2 - 1, b), rid_step(m1, m2, b, &r_sum(m1, m2, b))),
        Identity::Lid2 => (l_sum(m1 - 1, m2 + 1, b), lid2_step(m1, m2, b, &l_sum(m1, m2, b))),
        Identity::Rid2 => (r_sum(m1 - 1, m2 + 1, b), rid2_step(m1, m2, b, &r_sum(m1, m2, b))),
        Identity::Lrid => (pow(b, m1) * l_sum(m1, m2, &b.recip()), r_sum(m1, m2, b)),
        Identity::Claim6 => (
            lemma2_sum(m1, m2, b, true, false, true),
            lemma2_sum(m1, m2, b, false, true, true),
        ),
        Identity::Claim7 => claim7_sides(m1, m2, b),
    };
    let m2 = (id != Identity::L0).then_some(m2);
    Ok(IdentityReport::new(id.name(), m1, m2, id.param_name(), b, lhs, rhs))
}

/// `coeff * b^{twice_exp / 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPower {
    pub coeff: Rational,
    pub twice_exp: i64,
}

impl HalfPower {
    /// Value as `f64` for a given `b`.
    pub fn to_f64(&self, b: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeff.to_f64().unwrap_or(f64::NAN) * b.powf(self.twice_exp as f64 / 2.0)
    }
}

/// The six simplified terms `b^{m2}A1, b^{m2}B1, b^{m2}C1, b^{m1}A2, b^{m1}B2, b^{m1}C2`
/// of the geometric-mean proof, at `x = 1`, `a = 1/b`, `f = x^p`, `p = (m1+m2+1)/2`.
pub fn claim5_terms(m1: i64, m2: i64, b: &Rational) -> [HalfPower; 6] {
    let p2 = m1 + m2 + 1;
    let p = half(p2);
    let one_minus = Rational::one() - b;
    let one_plus = Rational::one() + b;
    let base = pow(&one_minus, -m1 - m2 - 2);

    // alternating sum with outer order `mo` and weights C(mi+l, mi)
    let alt = |mo: i64, mi: i64| -> Rational {
        let mut acc = Rational::zero();
        for k in 0..=mo {
            for l in 0..=(mo - k) {
                acc += binom_int(mi + l, mi) * sign(k) * binom_general(&p, k) * pow(&one_minus, k) * pow(&one_plus, -l);
            }
        }
        acc
    };
    let weighted = |mo: i64, mi: i64| -> Rational {
        let mut acc = Rational::zero();
        for k in 0..=mo {
            for l in 0..=(mo - k) {
                acc += binom_int(mi + l, mi) * binom_general(&p, k) * pow(&one_minus, k) * pow(&one_plus, -l) * pow(b, l - k);
            }
        }
        acc
    };

    let a1 = HalfPower {
        coeff: sign(m1) * &base * pow(&one_plus, -m2 - 1) * alt(m1, m2),
        twice_exp: 2 * (m1 + 2 * m2 + 2) - p2,
    };
    let b1 = HalfPower {
        coeff: sign(m1) * &base * pow(&one_plus, -m1 - 1) * weighted(m2, m1),
        twice_exp: 2 * (m1 + m2 + 1) + p2,
    };
    let c1 = HalfPower { coeff: sign(m1 + 1) * &base, twice_exp: 2 * (m1 + m2 + 1) };
    let a2 = HalfPower {
        coeff: sign(m2) * &base * pow(&one_plus, -m1 - 1) * alt(m2, m1),
        twice_exp: 2 * (m2 + 2 * m1 + 2) - p2,
    };
    let b2 = HalfPower {
        coeff: sign(m2) * &base * pow(&one_plus, -m2 - 1) * weighted(m1, m2),
        twice_exp: 2 * (m1 + m2 + 1) + p2,
    };
    let c2 = HalfPower { coeff: sign(m2 + 1) * &base, twice_exp: 2 * (m1 + m2 + 1) };
    [a1, b1, c1, a2, b2, c2]
}

fn compare_half_powers(name: &str, m1: i64, m2: i64, b: &Rational, l: &HalfPower, r: &HalfPower) -> IdentityReport {
    if (l.twice_exp - r.twice_exp).rem_euclid(2) != 0 {
        // different irrational factors; equal only if both vanish
        let mut rep = IdentityReport::new(name, m1, Some(m2), "b", b, l.coeff.clone(), r.coeff.clone());
        rep.equal = l.coeff.is_zero() && r.coeff.is_zero();
        return rep;
    }
    let odd = l.twice_exp.rem_euclid(2);
    let lhs = &l.coeff * pow(b, (l.twice_exp - odd) / 2);
    let rhs = &r.coeff * pow(b, (r.twice_exp - odd) / 2);
    let mut rep = IdentityReport::new(name, m1, Some(m2), "b", b, lhs, rhs);
    rep.sqrt_factor = odd == 1;
    rep
}

/// The three equalities `b^{m2}A1 = b^{m1}B2`, `b^{m1}A2 = b^{m2}B1`, `b^{m2}C1 = b^{m1}C2`.
pub fn verify_claim5(m1: i64, m2: i64, b: &Rational) -> Result<Vec<IdentityReport>> {
    if m1 < 0 || m2 < 0 {
        return Err(reject("claim5", "m1, m2 >= 0 required"));
    }
    if (m1 + m2) % 2 != 0 {
        return Err(reject("claim5", "m1 + m2 even required"));
    }
    if !b.is_positive() {
        return Err(reject("claim5", "b > 0 required"));
    }
    if b.is_one() {
        return Err(reject("claim5", "b != 1 required"));
    }
    let [a1, b1, c1, a2, b2, c2] = claim5_terms(m1, m2, b);
    Ok(vec![
        compare_half_powers("claim5_A1B2", m1, m2, b, &a1, &b2),
        compare_half_powers("claim5_A2B1", m1, m2, b, &a2, &b1),
        compare_half_powers("claim5_C1C2", m1, m2, b, &c1, &c2),
    ])
}

pub fn default_b_values() -> Vec<Rational> {
    vec![rational(1, 3), rational(2, 5), rational(3, 2), rational(7, 2)]
}

pub fn default_y_values() -> Vec<Rational> {
    vec![rational(1, 4), rational(9, 4)]
}

/// All identity instances with `0 <= m2 < m1 <= max_m` over the default parameter values,
/// plus `m2 = -1` for the second lemma and its mirror.
pub fn identity_grid(max_m: i64) -> Vec<IdentityReport> {
    let bs = default_b_values();
    let ys = default_y_values();
    let mut out = Vec::new();
    for m1 in 0..=max_m {
        for b in &bs {
            out.push(check_identity(Identity::L0, m1, 0, b).expect("grid point in domain"));
        }
        let lowest_m2 = -1;
        for m2 in lowest_m2..m1 {
            for id in Identity::ALL {
                let params = if id == Identity::L1 { &ys } else { &bs };
                for q in params {
                    if id == Identity::L0 || check_domain(id, m1, m2, q).is_err() {
                        continue;
                    }
                    if m2 < 0 && !matches!(id, Identity::L2 | Identity::Lrid | Identity::Lid2 | Identity::Rid2) {
                        continue;
                    }
                    out.push(check_identity(id, m1, m2, q).expect("grid point in domain"));
                }
            }
            if m2 >= 0 && (m1 + m2) % 2 == 0 {
                for b in &bs {
                    out.extend(verify_claim5(m1, m2, b).expect("grid point in domain"));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tally {
    pub total: usize,
    pub equal: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub total: usize,
    pub equal: usize,
    pub by_name: BTreeMap<String, Tally>,
    /// Lines of the instances that failed.
    pub failures: Vec<String>,
}

pub fn summarize(reports: &[IdentityReport]) -> IdentitySummary {
    let mut by_name: BTreeMap<String, Tally> = BTreeMap::new();
    let mut failures = Vec::new();
    for r in reports {
        let t = by_name.entry(r.name.clone()).or_default();
        t.total += 1;
        if r.equal {
            t.equal += 1;
        } else {
            failures.push(r.line());
        }
    }
    IdentitySummary {
        total: reports.len(),
        equal: reports.iter().filter(|r| r.equal).count(),
        by_name,
        failures,
    }
}
