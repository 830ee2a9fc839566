//! Ordering of the two Cauchy mean values behind the comparability theorem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::divdiff::{divided_difference_stable, ConfluentNodes};
use crate::error::{Error, Result};
use crate::funcmodel::{falling, FunctionModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L3Case {
    pub p1: f64,
    pub p2: f64,
    pub m1: usize,
    pub m2: usize,
    pub a: f64,
    pub b: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaPair {
    pub zeta_p: f64,
    pub zeta_q: f64,
}

/// `zeta` with `phi(zeta) = ratio` for `phi(t) = c t^e`.
fn invert_phi(ratio: f64, c: f64, e: f64, lo: f64, hi: f64) -> Result<f64> {
    let base = ratio / c;
    if !(base > 0.0) {
        return Err(Error::Contract(format!("divided-difference ratio {ratio} outside the range of phi")));
    }
    let z = base.powf(1.0 / e);
    // the Cauchy mean value lies in the node hull
    let slack = 1e-9 * hi;
    if !(z >= lo - slack && z <= hi + slack) {
        return Err(Error::Contract(format!("phi^-1 = {z} outside the node range [{lo}, {hi}]")));
    }
    Ok(z)
}

/// `(zeta_P, zeta_Q)` for `f = x^{p1}`, `g = x^{p2}` at the point `x`.
pub fn lemma_l3_probe(case: &L3Case) -> Result<ZetaPair> {
    let L3Case { p1, p2, m1, m2, a, b, x } = *case;
    if p1 == p2 {
        return Err(Error::InvalidParam("p1 = p2 makes phi constant".into()));
    }
    if m2 >= m1 {
        return Err(Error::InvalidParam(format!("m2 = {m2} must be < m1 = {m1}")));
    }
    if !(a > 0.0 && a < b) {
        return Err(Error::InvalidParam(format!("need 0 < a < b, got ({a}, {b})")));
    }
    if !(x > a && x < b) {
        return Err(Error::InvalidParam(format!("x = {x} must lie in ({a}, {b})")));
    }
    let order = m1 + m2 + 2;
    let (c1, c2) = (falling(p1, order), falling(p2, order));
    if c1 == 0.0 || c2 == 0.0 {
        return Err(Error::InvalidParam(format!("derivative of order {order} vanishes for p1 = {p1} or p2 = {p2}")));
    }
    let f = FunctionModel::power(p1);
    let g = FunctionModel::power(p2);
    let side = |ma: usize, mb: usize| -> Result<f64> {
        let nodes = ConfluentNodes::point_and_two_blocks(x, a, ma + 1, b, mb + 1)?;
        let ratio = divided_difference_stable(&f, &nodes)? / divided_difference_stable(&g, &nodes)?;
        invert_phi(ratio, c1 / c2, p1 - p2, a, b)
    };
    Ok(ZetaPair { zeta_p: side(m1, m2)?, zeta_q: side(m2, m1)? })
}

fn random_case(rng: &mut ChaCha8Rng) -> L3Case {
    let exponent = |rng: &mut ChaCha8Rng| loop {
        let p: f64 = rng.gen_range(-4.0..6.0);
        if (p - p.round()).abs() > 0.05 {
            return p;
        }
    };
    let p1 = exponent(rng);
    let p2 = loop {
        let p = exponent(rng);
        if (p - p1).abs() > 0.25 {
            break p;
        }
    };
    let m1 = rng.gen_range(1..=4);
    let m2 = rng.gen_range(0..m1);
    let a = rng.gen_range(0.5..2.0);
    let b = a + rng.gen_range(0.2..3.0);
    let x = a + (b - a) * rng.gen_range(0.05..0.95);
    L3Case { p1, p2, m1, m2, a, b, x }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L3Sweep {
    pub cases: usize,
    pub violations: usize,
    pub errors: Vec<String>,
    pub rows: Vec<(L3Case, ZetaPair)>,
}

/// `count` random admissible cases; a violation is `zeta_P >= zeta_Q`.
pub fn lemma_l3_sweep(count: usize, seed: u64) -> L3Sweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = L3Sweep { cases: count, violations: 0, errors: Vec::new(), rows: Vec::new() };
    for _ in 0..count {
        let case = random_case(&mut rng);
        match lemma_l3_probe(&case) {
            Ok(z) => {
                if z.zeta_p >= z.zeta_q {
                    out.violations += 1;
                }
                out.rows.push((case, z));
            }
            Err(e) => {
                out.violations += 1;
                out.errors.push(format!("{case:?}: {e}"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_ordering() {
        let c = L3Case { p1: 2.5, p2: 4.5, m1: 2, m2: 0, a: 1.0, b: 2.0, x: 1.5 };
        let z = lemma_l3_probe(&c).unwrap();
        assert!(z.zeta_p < z.zeta_q, "{z:?}");
        assert!(z.zeta_p >= 1.0 && z.zeta_q <= 2.0);
    }

    #[test]
    fn rejects_equal_exponents() {
        let c = L3Case { p1: 2.5, p2: 2.5, m1: 2, m2: 0, a: 1.0, b: 2.0, x: 1.5 };
        assert!(matches!(lemma_l3_probe(&c), Err(Error::InvalidParam(_))));
        let c = L3Case { p1: 2.0, p2: 2.5, m1: 2, m2: 0, a: 1.0, b: 2.0, x: 1.5 };
        assert!(lemma_l3_probe(&c).is_err());
    }

    #[test]
    fn random_sweep_has_no_violations() {
        let s = lemma_l3_sweep(100, 7);
        assert_eq!(s.violations, 0, "{:?}", s.errors);
        assert_eq!(s.rows.len(), 100);
    }
}
