use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{CaseRow, SuiteReport, SweepResult};
use crate::error::{Error, Result};
use crate::funcmodel::FunctionModel;
use crate::mean::{mean_of, mean_power, MeanSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    T3,
    T4,
    T5,
    T7,
    T8,
    T10,
    T11,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [Theorem::T3, Theorem::T4, Theorem::T5, Theorem::T7, Theorem::T8, Theorem::T10, Theorem::T11];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
            Theorem::T5 => "T5",
            Theorem::T7 => "T7",
            Theorem::T8 => "T8",
            Theorem::T10 => "T10",
            Theorem::T11 => "T11",
        }
    }

    fn seed(self) -> u64 {
        0x5eed_0000 + self as u64
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown theorem {s:?}; expected one of T3 T4 T5 T7 T8 T10 T11")))
    }
}

const RANDOM_INTERVALS: usize = 20;
const COMPARISON_INTERVALS: usize = 50;
const GRID_MAX_M1: usize = 5;

/// Random `(a, b)` drawn independently from `(lo, hi)`, at least `min_width` apart.
pub fn random_intervals(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64, min_width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = rng.gen_range(lo..hi);
        let b = rng.gen_range(lo..hi);
        if (a - b).abs() >= min_width {
            out.push((a, b));
        }
    }
    out
}

fn strictly_inside(v: f64, a: f64, b: f64) -> bool {
    v > a.min(b) && v < a.max(b)
}

struct Check<'a> {
    case: &'a str,
    m1: usize,
    m2: usize,
    a: f64,
    b: f64,
    param: Option<f64>,
}

impl Check<'_> {
    /// Records `value` against `target` with `|value - target| <= tol * scale`.
    fn against(&self, report: &mut SuiteReport, value: Result<f64>, target: f64, scale: f64, tol: f64) {
        match value {
            Ok(v) => {
                let error = (v - target).abs() / scale;
                report.push(CaseRow {
                    case: self.case.to_string(),
                    m1: self.m1,
                    m2: self.m2,
                    a: self.a,
                    b: self.b,
                    param: self.param,
                    value: v,
                    target: Some(target),
                    error,
                    pass: error <= tol && strictly_inside(v, self.a, self.b),
                });
            }
            Err(e) => self.error(report, e),
        }
    }

    fn error(&self, report: &mut SuiteReport, e: Error) {
        report.cases += 1;
        report.fail(format!("{} m=({},{}) (a,b)=({},{}): {e}", self.case, self.m1, self.m2, self.a, self.b));
    }

    fn row(&self, value: f64, pass: bool) -> CaseRow {
        CaseRow {
            case: self.case.to_string(),
            m1: self.m1,
            m2: self.m2,
            a: self.a,
            b: self.b,
            param: self.param,
            value,
            target: None,
            error: 0.0,
            pass,
        }
    }
}

fn pairs(max_m1: usize) -> Vec<(usize, usize)> {
    (1..=max_m1).flat_map(|m1| (0..m1).map(move |m2| (m1, m2))).collect()
}

fn mean_value(p: f64, m1: usize, m2: usize, a: f64, b: f64) -> Result<f64> {
    mean_power(p, m1, m2, a, b).map(|r| r.value)
}

fn model_mean(model: &FunctionModel, m1: usize, m2: usize, a: f64, b: f64) -> Result<f64> {
    mean_of(&MeanSpec::new(model.clone(), m1, m2)?, a, b).map(|r| r.value)
}

/// Runs the named theorem's grid. Computation errors are recorded as failures.
pub fn theorem_suite(theorem: Theorem) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(theorem.seed());
    let mut report = SuiteReport::new(theorem.name());
    match theorem {
        Theorem::T3 => arithmetic(&mut rng, &mut report),
        Theorem::T4 => harmonic(&mut rng, &mut report),
        Theorem::T5 => geometric(&mut rng, &mut report),
        Theorem::T7 => comparable(&mut rng, &mut report),
        Theorem::T8 => invariance(&mut rng, &mut report),
        Theorem::T10 => increasing_in_p(&mut report),
        Theorem::T11 => limits(&mut report),
    }
    report
}

fn arithmetic(rng: &mut ChaCha8Rng, report: &mut SuiteReport) {
    let intervals = random_intervals(rng, RANDOM_INTERVALS, 0.1, 10.0, 1e-3);
    for (m1, m2) in pairs(GRID_MAX_M1) {
        let p = (m1 + m2 + 2) as f64;
        for &(a, b) in &intervals {
            let c = Check { case: "arithmetic", m1, m2, a, b, param: Some(p) };
            c.against(report, mean_value(p, m1, m2, a, b), 0.5 * (a + b), a + b, 1e-9);
        }
    }
}

pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

fn harmonic(rng: &mut ChaCha8Rng, report: &mut SuiteReport) {
    let intervals = random_intervals(rng, RANDOM_INTERVALS, 0.1, 10.0, 1e-3);
    for (m1, m2) in pairs(GRID_MAX_M1) {
        for &(a, b) in &intervals {
            let c = Check { case: "harmonic", m1, m2, a, b, param: Some(-1.0) };
            let h = harmonic_mean(a, b);
            c.against(report, mean_value(-1.0, m1, m2, a, b), h, h, 1e-9);
        }
    }
    for (m1, m2) in [(1, 0), (2, 0), (3, 1), (4, 2), (5, 0)] {
        let c = Check { case: "harmonic H(2,8)", m1, m2, a: 2.0, b: 8.0, param: Some(-1.0) };
        c.against(report, mean_value(-1.0, m1, m2, 2.0, 8.0), 3.2, 3.2, 1e-9);
    }
}

fn geometric(rng: &mut ChaCha8Rng, report: &mut SuiteReport) {
    let intervals = random_intervals(rng, RANDOM_INTERVALS, 0.1, 10.0, 1e-3);
    let even: Vec<_> = pairs(6).into_iter().filter(|(m1, m2)| (m1 + m2) % 2 == 0).collect();
    for &(m1, m2) in &even {
        let p = (m1 + m2 + 1) as f64 / 2.0;
        for &(a, b) in &intervals {
            let c = Check { case: "geometric", m1, m2, a, b, param: Some(p) };
            let g = (a * b).sqrt();
            c.against(report, mean_value(p, m1, m2, a, b), g, g, 1e-8);
        }
    }
    let c = Check { case: "geometric G(1,4)", m1: 3, m2: 1, a: 1.0, b: 4.0, param: Some(2.5) };
    c.against(report, mean_value(2.5, 3, 1, 1.0, 4.0), 2.0, 2.0, 1e-8);
}

/// Model pairs whose derivative ratio is strictly monotone for the orders used.
fn comparable_models() -> Vec<(&'static str, FunctionModel, FunctionModel)> {
    vec![
        ("x^-2.5 vs x^1.5", FunctionModel::power(-2.5), FunctionModel::power(1.5)),
        ("log vs x^2.5", FunctionModel::log_power(0), FunctionModel::power(2.5)),
        ("exp vs x^3.5", FunctionModel::exp(), FunctionModel::power(3.5)),
    ]
}

fn comparable(rng: &mut ChaCha8Rng, report: &mut SuiteReport) {
    let intervals = random_intervals(rng, COMPARISON_INTERVALS, 0.1, 10.0, 0.05);
    for (label, f, g) in comparable_models() {
        for (m1, m2) in [(2, 0), (3, 1)] {
            let mut first_sign = 0.0;
            for &(a, b) in &intervals {
                let c = Check { case: label, m1, m2, a, b, param: None };
                let (mf, mg) = match (model_mean(&f, m1, m2, a, b), model_mean(&g, m1, m2, a, b)) {
                    (Ok(x), Ok(y)) => (x, y),
                    (Err(e), _) | (_, Err(e)) => {
                        c.error(report, e);
                        continue;
                    }
                };
                let d = mf - mg;
                let s = d.signum();
                if first_sign == 0.0 {
                    first_sign = s;
                }
                let pass = d != 0.0 && s == first_sign && strictly_inside(mf, a, b) && strictly_inside(mg, a, b);
                report.push(c.row(d, pass));
            }
        }
    }
}

fn invariance(rng: &mut ChaCha8Rng, report: &mut SuiteReport) {
    let intervals = random_intervals(rng, RANDOM_INTERVALS, 0.1, 10.0, 1e-2);
    let base = FunctionModel::power(2.5);
    for (m1, m2) in [(2, 0), (3, 1)] {
        let n = m1 + m2 + 1;
        let poly: Vec<f64> = (0..=n).map(|i| [2.0, -1.0, 0.5, 0.25, -3.0, 1.5, 0.125][i % 7]).collect();
        let g = FunctionModel::shifted(base.clone().with_scale(3.0), poly);
        for &(a, b) in &intervals {
            let c = Check { case: "3f + poly", m1, m2, a, b, param: Some(2.5) };
            match model_mean(&base, m1, m2, a, b) {
                Ok(mf) => c.against(report, model_mean(&g, m1, m2, a, b), mf, mf, 1e-9),
                Err(e) => c.error(report, e),
            }
        }
    }
    // log against a power: never equal
    let log = FunctionModel::log_power(0);
    let root = FunctionModel::power(0.5);
    let wide: Vec<(f64, f64)> = (0..RANDOM_INTERVALS)
        .map(|_| {
            let a = rng.gen_range(0.1..5.0);
            (a, a * rng.gen_range(1.5..4.0))
        })
        .collect();
    for (m1, m2) in [(2, 0), (3, 1)] {
        for &(a, b) in &wide {
            let c = Check { case: "log vs x^0.5", m1, m2, a, b, param: None };
            match (model_mean(&log, m1, m2, a, b), model_mean(&root, m1, m2, a, b)) {
                (Ok(x), Ok(y)) => {
                    let rel = (x - y).abs() / x;
                    let mut row = c.row(x - y, rel > 1e-6);
                    row.error = rel;
                    report.cases += 1;
                    if !row.pass {
                        report.fail(format!("log vs x^0.5 m=({m1},{m2}) (a,b)=({a},{b}): means agree to {rel:e}"));
                    }
                    report.rows.push(row);
                }
                (Err(e), _) | (_, Err(e)) => c.error(report, e),
            }
        }
    }
}

/// Means over a p-grid, recorded as a sweep and as cases.
pub fn p_sweep(report: &mut SuiteReport, grid: &[f64], m1: usize, m2: usize, a: f64, b: f64) -> Option<SweepResult> {
    let mut means = Vec::with_capacity(grid.len());
    for &p in grid {
        let c = Check { case: "p-sweep", m1, m2, a, b, param: Some(p) };
        match mean_value(p, m1, m2, a, b) {
            Ok(v) => {
                report.push(c.row(v, strictly_inside(v, a, b)));
                means.push(v);
            }
            Err(e) => {
                c.error(report, e);
                return None;
            }
        }
    }
    let labels = vec![format!("({m1},{m2})"); grid.len()];
    SweepResult::increasing_means("p", grid.to_vec(), labels, means).ok()
}

pub const T10_GRID: [f64; 7] = [-4.0, -2.0, -0.5, 1.5, 3.5, 6.0, 9.0];

fn increasing_in_p(report: &mut SuiteReport) {
    let mut runs: Vec<(&[f64], usize, usize)> = [(1, 0), (2, 0), (3, 1)].into_iter().map(|(m1, m2)| (&T10_GRID[..], m1, m2)).collect();
    let example = [-3.0, -1.0, 1.5, 4.0, 7.0];
    runs.push((&example, 2, 0));
    for (grid, m1, m2) in runs {
        if let Some(s) = p_sweep(report, grid, m1, m2, 1.0, 2.0) {
            if !s.monotone {
                report.fail(format!("means not strictly increasing in p for ({m1},{m2}): min step {:e}", s.min_step));
            }
            report.sweeps.push(s);
        }
    }
}

pub const T11_GRID: [f64; 4] = [10.0, 30.0, 100.0, 300.0];

fn limits(report: &mut SuiteReport) {
    let (a, b) = (1.0, 2.0);
    for (m1, m2) in [(2, 0), (3, 1)] {
        for sign in [1.0, -1.0] {
            let grid: Vec<f64> = T11_GRID.iter().map(|p| sign * p).collect();
            let target = if sign > 0.0 { b } else { a };
            let mut means = Vec::new();
            for &p in &grid {
                let c = Check { case: "large p", m1, m2, a, b, param: Some(p) };
                match mean_value(p, m1, m2, a, b) {
                    Ok(v) => {
                        report.push(c.row(v, strictly_inside(v, a, b)));
                        means.push(v);
                    }
                    Err(e) => c.error(report, e),
                }
            }
            if means.len() != grid.len() {
                continue;
            }
            let gaps = means.iter().map(|m| (target - m).abs()).collect();
            let labels = vec![format!("({m1},{m2})"); grid.len()];
            match SweepResult::toward_limit("p", grid, labels, means, target, gaps) {
                Ok(s) => {
                    if !s.monotone {
                        report.fail(format!("distance to {target} not strictly decreasing for ({m1},{m2})"));
                    }
                    report.sweeps.push(s);
                }
                Err(e) => report.fail(e.to_string()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("t10".parse::<Theorem>().unwrap(), Theorem::T10);
        assert!("T6".parse::<Theorem>().is_err());
    }

    #[test]
    fn harmonic_example() {
        for (m1, m2) in [(1, 0), (2, 0), (3, 1), (4, 2), (5, 0)] {
            let v = mean_value(-1.0, m1, m2, 2.0, 8.0).unwrap();
            assert!((v - 3.2).abs() <= 1e-9 * 3.2, "({m1},{m2}) -> {v}");
        }
    }

    #[test]
    fn geometric_example() {
        let v = mean_value(2.5, 3, 1, 1.0, 4.0).unwrap();
        assert!((v - 2.0).abs() <= 1e-8 * 2.0, "{v}");
    }

    #[test]
    fn t10_example_strictly_increasing() {
        let mut r = SuiteReport::new("t");
        let s = p_sweep(&mut r, &[-3.0, -1.0, 1.5, 4.0, 7.0], 2, 0, 1.0, 2.0).unwrap();
        assert!(s.monotone, "{:?}", s.means);
        assert!(r.passed());
    }

    #[test]
    fn suites_pass() {
        for t in [Theorem::T3, Theorem::T8, Theorem::T11] {
            let r = theorem_suite(t);
            assert!(r.passed(), "{t}: {:?}", r.failures);
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        assert_eq!(theorem_suite(Theorem::T7), theorem_suite(Theorem::T7));
    }
}
