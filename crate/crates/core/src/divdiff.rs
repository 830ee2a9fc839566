//! Divided differences over confluent (repeated) nodes.
//!
//! Three independent routes are provided: the confluent Newton table for any
//! [`FunctionModel`], the closed form for `1/x`, and Spitzbart's expansion for
//! `x^p` over nodes `x, a^{m1+1}, b^{m2+1}`.

use crate::error::{Error, Result};
use crate::funcmodel::FunctionModel;
use crate::real::Real;

/// Distinct nodes with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfluentNodes {
    entries: Vec<(f64, usize)>,
}

impl ConfluentNodes {
    /// Builds the node set, merging entries with equal values.
    pub fn new<I: IntoIterator<Item = (f64, usize)>>(entries: I) -> Result<Self> {
        let mut merged: Vec<(f64, usize)> = Vec::new();
        for (x, m) in entries {
            if !x.is_finite() {
                return Err(Error::InvalidParam(format!("node {x} is not finite")));
            }
            if m == 0 {
                return Err(Error::InvalidParam(format!("node {x} has multiplicity 0")));
            }
            match merged.iter_mut().find(|(y, _)| *y == x) {
                Some(slot) => slot.1 += m,
                None => merged.push((x, m)),
            }
        }
        if merged.is_empty() {
            return Err(Error::InvalidParam("empty node set".into()));
        }
        Ok(ConfluentNodes { entries: merged })
    }

    /// Nodes `x, a^{ma}, b^{mb}`; `x` may coincide with `a` or `b`.
    pub fn point_and_two_blocks(x: f64, a: f64, ma: usize, b: f64, mb: usize) -> Result<Self> {
        Self::new([(x, 1), (a, ma), (b, mb)].into_iter().filter(|e| e.1 > 0))
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Order of the divided difference: total multiplicity minus one.
    pub fn order(&self) -> usize {
        self.total_multiplicity() - 1
    }

    /// Entries sorted ascending by value.
    pub fn sorted_entries(&self) -> Vec<(f64, usize)> {
        let mut s = self.entries.clone();
        s.sort_by(|l, r| l.0.total_cmp(&r.0));
        s
    }

    /// Each node repeated by its multiplicity, ascending.
    pub fn flattened(&self) -> Vec<f64> {
        self.sorted_entries()
            .into_iter()
            .flat_map(|(x, m)| std::iter::repeat(x).take(m))
            .collect()
    }
}

/// Triangular confluent Newton table. `columns[j][i]` holds `f[z_i, ..., z_{i+j}]`.
#[derive(Debug, Clone)]
pub struct DividedDifferenceTable {
    nodes: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

impl DividedDifferenceTable {
    pub fn build(model: &FunctionModel, nodes: &ConfluentNodes) -> Result<Self> {
        Self::build_with(nodes, |x, k| model.eval_deriv(*x, k))
    }

    /// Builds the table from a derivative oracle `deriv(x, k) = f^{(k)}(x)`.
    pub fn build_with<F>(nodes: &ConfluentNodes, deriv: F) -> Result<Self>
    where
        F: FnMut(&f64, usize) -> Result<f64>,
    {
        let columns = confluent_columns(&nodes.sorted_entries(), deriv)?;
        Ok(DividedDifferenceTable { nodes: nodes.flattened(), columns })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `f[z_i, ..., z_j]` for `i <= j`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.columns[j - i][i]
    }

    /// The full-order divided difference.
    pub fn top(&self) -> f64 {
        self.columns[self.nodes.len() - 1][0]
    }

    /// Coefficients `f[z_0], f[z_0,z_1], ...` of the Newton form.
    pub fn newton_coeffs(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c[0]).collect()
    }
}

/// Confluent Newton recurrence over ascending distinct `blocks` of `(node, multiplicity)`.
/// Returns the columns `c[j][i] = f[z_i, ..., z_{i+j}]`.
pub fn confluent_columns<R, F>(blocks: &[(R, usize)], mut deriv: F) -> Result<Vec<Vec<R>>>
where
    R: Real,
    F: FnMut(&R, usize) -> Result<R>,
{
    if blocks.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::InvalidParam("confluent blocks must be strictly ascending".into()));
    }
    // Taylor data f^{(k)}(x)/k!, divided before any subtraction happens.
    let mut taylor: Vec<Vec<R>> = Vec::with_capacity(blocks.len());
    let mut z: Vec<R> = Vec::new();
    let mut block_of: Vec<usize> = Vec::new();
    for (bi, (x, m)) in blocks.iter().enumerate() {
        let mut t = Vec::with_capacity(*m);
        let mut fact = x.one_like();
        for k in 0..*m {
            if k > 0 {
                fact = fact * x.lift(k as f64);
            }
            t.push(deriv(x, k)? / fact.clone());
        }
        taylor.push(t);
        z.extend(std::iter::repeat(x.clone()).take(*m));
        block_of.extend(std::iter::repeat(bi).take(*m));
    }
    let n = z.len();
    let mut columns: Vec<Vec<R>> = Vec::with_capacity(n);
    columns.push((0..n).map(|i| taylor[block_of[i]][0].clone()).collect());
    for j in 1..n {
        let prev = &columns[j - 1];
        let col: Vec<R> = (0..n - j)
            .map(|i| {
                if block_of[i] == block_of[i + j] {
                    taylor[block_of[i]][j].clone()
                } else {
                    (prev[i + 1].clone() - prev[i].clone()) / (z[i + j].clone() - z[i].clone())
                }
            })
            .collect();
        columns.push(col);
    }
    Ok(columns)
}

/// Top entry of the confluent Newton table of `model` over `nodes`.
pub fn divided_difference(model: &FunctionModel, nodes: &ConfluentNodes) -> Result<f64> {
    Ok(DividedDifferenceTable::build(model, nodes)?.top())
}

/// Relative half-spread `(max - min) / (max + min)` of the nodes.
pub fn relative_spread(nodes: &ConfluentNodes) -> f64 {
    let z = nodes.flattened();
    let (lo, hi) = (z[0], z[z.len() - 1]);
    (hi - lo) / (hi + lo)
}

/// Divided difference from the Taylor series of `model` about the midpoint `c` of the nodes:
/// `f[z_0..z_k] = c^{-k} sum_m s_{k+m} h_m(v)`, where `s_j = f^{(j)}(c) c^j / j!`,
/// `v_i = (z_i - c) / c` and `h_m` is the complete homogeneous symmetric polynomial.
///
/// Free of subtractive cancellation for tightly clustered nodes. Requires a relative spread
/// below one, the radius of convergence for models singular at zero.
pub fn divided_difference_series(model: &FunctionModel, nodes: &ConfluentNodes) -> Result<f64> {
    let z = nodes.flattened();
    let k = z.len() - 1;
    let (lo, hi) = (z[0], z[k]);
    if !(lo > 0.0) {
        return Err(Error::Domain { what: "node", value: lo });
    }
    let c = 0.5 * (lo + hi);
    let rho = (hi - lo) / (hi + lo);
    if rho >= 0.9 {
        return Err(Error::InvalidParam(format!("node spread {rho} too wide for the series route")));
    }
    let v: Vec<f64> = z.iter().map(|zi| (zi - c) / c).collect();
    let p = model.exponent().unwrap_or(0.0).abs();
    let peak = ((k as f64 + p + 2.0) * rho / (1.0 - rho)).ceil() as usize + 4;
    let mut coeffs = model.scaled_taylor_coeffs(c, k + peak + 64)?;
    let mut col = vec![1.0; k + 1];
    let mut sum = coeffs[k];
    let mut abs_sum = sum.abs();
    let mut quiet = 0;
    for m in 1..20_000 {
        if k + m >= coeffs.len() {
            coeffs = model.scaled_taylor_coeffs(c, 2 * coeffs.len())?;
        }
        // h_m over v_0..v_i from h_{m-1}: H_i(m) = H_{i-1}(m) + v_i H_i(m-1)
        col[0] *= v[0];
        for i in 1..=k {
            col[i] = col[i - 1] + v[i] * col[i];
        }
        let term = coeffs[k + m] * col[k];
        sum += term;
        abs_sum += term.abs();
        if m > peak && term.abs() <= 1e-18 * abs_sum {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum * c.powi(-(k as i32)));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Contract("Taylor series for the divided difference did not converge".into()))
}

/// Relative spread below which [`divided_difference_stable`] uses the series route.
pub const SERIES_SPREAD: f64 = 0.8;

/// Newton table for spread-out nodes, Taylor series for clustered ones.
pub fn divided_difference_stable(model: &FunctionModel, nodes: &ConfluentNodes) -> Result<f64> {
    if nodes.order() > 0 && relative_spread(nodes) < SERIES_SPREAD {
        divided_difference_series(model, nodes)
    } else {
        divided_difference(model, nodes)
    }
}

/// `(1/x)[nodes] = (-1)^order / prod(x^mult)`.
pub fn divdiff_reciprocal_closed(nodes: &ConfluentNodes) -> Result<f64> {
    let mut prod = 1.0;
    for &(x, m) in nodes.entries() {
        if !(x > 0.0) {
            return Err(Error::Domain { what: "node", value: x });
        }
        prod *= x.powi(m as i32);
    }
    let sign = if nodes.order() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign / prod)
}

/// Generalized binomial `C(p, 0..=kmax)` by the falling-factorial product.
pub(crate) fn binomials_real<R: Real>(p: &R, kmax: usize) -> Vec<R> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut c = p.one_like();
    out.push(c.clone());
    for k in 1..=kmax {
        c = c * (p.clone() - p.lift((k - 1) as f64)) / p.lift(k as f64);
        out.push(c.clone());
    }
    out
}

/// `C(n, k)` for small nonnegative integers, exact in binary64 for the ranges used here.
pub(crate) fn binom_int(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

fn inv_powers<R: Real>(base: &R, max: usize) -> Vec<R> {
    let inv = base.one_like() / base.clone();
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = base.one_like();
    out.push(acc.clone());
    for _ in 0..max {
        acc = acc * inv.clone();
        out.push(acc.clone());
    }
    out
}

/// `t^p`, exact repeated multiplication when `p` is an integer.
pub(crate) fn real_pow<R: Real>(t: &R, p: &R) -> R {
    let pf = p.to_f64();
    if pf.fract() == 0.0 && pf.abs() < 1e9 && p.lift(pf) == *p {
        t.powi(pf as i32)
    } else {
        t.powf(p)
    }
}

fn sign(e: usize) -> f64 {
    if e % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The three terms `(A, B, C)` of Spitzbart's expansion of
/// `f[x, a^{m1+1}, b^{m2+1}]` for `f(t) = t^p`.
pub fn spitzbart_terms<R: Real>(x: &R, a: &R, b: &R, m1: usize, m2: usize, p: &R) -> Result<(R, R, R)> {
    let zero = x.zero_like();
    for (name, v) in [("x", x), ("a", a), ("b", b)] {
        if !(*v > zero) {
            return Err(Error::Domain { what: name, value: v.to_f64() });
        }
    }
    if x == a || x == b || a == b {
        return Err(Error::InvalidParam(format!(
            "spitzbart_power needs pairwise distinct x, a, b; got {}, {}, {}",
            x.to_f64(),
            a.to_f64(),
            b.to_f64()
        )));
    }
    let binp = binomials_real(p, m1.max(m2));

    // A: the a-block, weights C(m2+l, m2) over powers of (a-b) and (a-x).
    let inv_ab = inv_powers(&(a.clone() - b.clone()), m1 + m2 + 1);
    let inv_ax = inv_powers(&(a.clone() - x.clone()), m1 + 1);
    let inv_a = inv_powers(a, m1);
    let mut sum_a = x.zero_like();
    for k in 0..=m1 {
        for l in 0..=(m1 - k) {
            let w = binom_int(m2 + l, m2) * sign(m1 + k);
            sum_a = sum_a
                + x.lift(w)
                    * binp[k].clone()
                    * inv_ab[m2 + 1 + l].clone()
                    * inv_ax[m1 + 1 - k - l].clone()
                    * inv_a[k].clone();
        }
    }
    let term_a = real_pow(a, p) * sum_a;

    let inv_ba = inv_powers(&(b.clone() - a.clone()), m1 + m2 + 1);
    let inv_bx = inv_powers(&(b.clone() - x.clone()), m2 + 1);
    let inv_b = inv_powers(b, m2);
    let mut sum_b = x.zero_like();
    for k in 0..=m2 {
        for l in 0..=(m2 - k) {
            let w = binom_int(m1 + l, m1) * sign(m2 + k);
            sum_b = sum_b
                + x.lift(w)
                    * binp[k].clone()
                    * inv_ba[m1 + 1 + l].clone()
                    * inv_bx[m2 + 1 - k - l].clone()
                    * inv_b[k].clone();
        }
    }
    let term_b = real_pow(b, p) * sum_b;

    let term_c = inv_powers(&(x.clone() - a.clone()), m1 + 1)[m1 + 1].clone()
        * inv_powers(&(x.clone() - b.clone()), m2 + 1)[m2 + 1].clone()
        * real_pow(x, p);
    Ok((term_a, term_b, term_c))
}

/// `f[x, a^{m1+1}, b^{m2+1}]` for `f(t) = t^p` via Spitzbart's closed form.
/// Swapping `m1` and `m2` gives `f[x, a^{m2+1}, b^{m1+1}]`.
pub fn spitzbart_power<R: Real>(x: &R, a: &R, b: &R, m1: usize, m2: usize, p: &R) -> Result<R> {
    let (ta, tb, tc) = spitzbart_terms(x, a, b, m1, m2, p)?;
    Ok(ta + tb + tc)
}
