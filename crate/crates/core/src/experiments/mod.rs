//! Theorem suites, the Taylor-mean comparison, probes and conjecture scans.

pub mod conjecture;
pub mod probes;
pub mod section4;
pub mod taylor;
pub mod theorems;

use serde::Serialize;

use crate::error::{Error, Result};

pub use conjecture::{conjecture1_scan, conjecture2_probe, Conjecture2Report};
pub use probes::{lemma_l3_probe, lemma_l3_sweep, L3Sweep};
pub use section4::{section4_nonrepresentability, Section4Report};
pub use taylor::{taylor_compare, taylor_mean, TaylorComparison};
pub use theorems::{theorem_suite, Theorem};

/// Working precision of the extended-precision scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrecisionConfig {
    pub digits: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig { digits: 60 }
    }
}

impl PrecisionConfig {
    pub const MIN_DIGITS_HIGH_ORDER: u32 = 30;
    pub const HIGH_ORDER: usize = 12;

    pub fn new(digits: u32) -> Self {
        PrecisionConfig { digits }
    }

    /// Rejects precisions too low for confluent tables of order `n`.
    pub fn check_order(&self, n: usize) -> Result<()> {
        if self.digits < 16 {
            return Err(Error::InvalidParam(format!("digits = {} is below binary64", self.digits)));
        }
        if n > Self::HIGH_ORDER && self.digits < Self::MIN_DIGITS_HIGH_ORDER {
            return Err(Error::InvalidParam(format!(
                "digits = {} too low: n = {n} > {} needs at least {} digits",
                self.digits,
                Self::HIGH_ORDER,
                Self::MIN_DIGITS_HIGH_ORDER
            )));
        }
        Ok(())
    }

    pub fn bits(&self) -> usize {
        crate::real::HiFloat::bits_for_digits(self.digits)
    }
}

/// Means along one parameter axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: String,
    pub values: Vec<f64>,
    /// Per-value annotation, e.g. the `(m1, m2)` pair behind an `n`.
    pub labels: Vec<String>,
    pub means: Vec<f64>,
    /// What `monotone` asserts about the sequence.
    pub verdict_kind: String,
    pub monotone: bool,
    pub limit_target: Option<f64>,
    pub gaps: Vec<f64>,
    /// Smallest consecutive step of the monitored sequence, signed by the expected direction.
    pub min_step: f64,
}

impl SweepResult {
    /// Sweep whose monitored sequence is the means themselves, expected strictly increasing.
    pub fn increasing_means(axis: &str, values: Vec<f64>, labels: Vec<String>, means: Vec<f64>) -> Result<Self> {
        check_axis(&values, &means)?;
        let min_step = min_step(&means, 1.0);
        Ok(SweepResult {
            axis: axis.to_string(),
            values,
            labels,
            means,
            verdict_kind: "means strictly increasing".into(),
            monotone: min_step > 0.0,
            limit_target: None,
            gaps: Vec::new(),
            min_step,
        })
    }

    /// Sweep monitoring `|mean - target|`, expected strictly decreasing.
    pub fn toward_limit(axis: &str, values: Vec<f64>, labels: Vec<String>, means: Vec<f64>, target: f64, gaps: Vec<f64>) -> Result<Self> {
        check_axis(&values, &means)?;
        if gaps.len() != means.len() {
            return Err(Error::Contract("gap and mean arrays differ in length".into()));
        }
        let min_step = min_step(&gaps, -1.0);
        Ok(SweepResult {
            axis: axis.to_string(),
            values,
            labels,
            means,
            verdict_kind: "gap strictly decreasing".into(),
            monotone: min_step > 0.0,
            limit_target: Some(target),
            gaps,
            min_step,
        })
    }

    /// `axis,label,mean,gap` rows.
    pub fn to_csv(&self) -> String {
        let rows = (0..self.values.len()).map(|i| {
            let gap = self.gaps.get(i).map(|g| num(*g)).unwrap_or_default();
            vec![num(self.values[i]), self.labels[i].clone(), num(self.means[i]), gap]
        });
        csv_table(&[self.axis.as_str(), "label", "mean", "gap"], rows)
    }
}

fn check_axis(values: &[f64], means: &[f64]) -> Result<()> {
    if values.len() != means.len() {
        return Err(Error::Contract("sweep axis and means differ in length".into()));
    }
    let up = values.windows(2).all(|w| w[0] < w[1]);
    let down = values.windows(2).all(|w| w[0] > w[1]);
    if !(up || down) {
        return Err(Error::InvalidParam("sweep values must be strictly ordered".into()));
    }
    Ok(())
}

fn min_step(seq: &[f64], direction: f64) -> f64 {
    seq.windows(2)
        .map(|w| direction * (w[1] - w[0]))
        .fold(f64::INFINITY, f64::min)
}

/// One checked case of a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRow {
    pub case: String,
    pub m1: usize,
    pub m2: usize,
    pub a: f64,
    pub b: f64,
    pub param: Option<f64>,
    pub value: f64,
    pub target: Option<f64>,
    /// Error normalized by the case's tolerance scale.
    pub error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
    pub worst_residual: f64,
    pub rows: Vec<CaseRow>,
    pub sweeps: Vec<SweepResult>,
}

impl SuiteReport {
    pub fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            cases: 0,
            failures: Vec::new(),
            worst_residual: 0.0,
            rows: Vec::new(),
            sweeps: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn push(&mut self, row: CaseRow) {
        self.cases += 1;
        if row.error.is_finite() {
            self.worst_residual = self.worst_residual.max(row.error);
        }
        if !row.pass {
            self.failures.push(format!(
                "{} m=({},{}) (a,b)=({},{}) value={}",
                row.case, row.m1, row.m2, row.a, row.b, row.value
            ));
        }
        self.rows.push(row);
    }

    pub fn fail(&mut self, message: String) {
        self.failures.push(message);
    }

    pub const CSV_HEADER: [&'static str; 11] = ["suite", "case", "m1", "m2", "a", "b", "param", "value", "target", "error", "pass"];

    pub fn csv_rows(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        self.rows.iter().map(|r| {
            vec![
                self.name.clone(),
                r.case.clone(),
                r.m1.to_string(),
                r.m2.to_string(),
                num(r.a),
                num(r.b),
                r.param.map(num).unwrap_or_default(),
                num(r.value),
                r.target.map(num).unwrap_or_default(),
                num(r.error),
                r.pass.to_string(),
            ]
        })
    }

    pub fn to_csv(&self) -> String {
        csv_table(&Self::CSV_HEADER, self.csv_rows())
    }
}

/// Shortest decimal that reads back as the same binary64.
/// CSV text with a header row; fields are quoted where needed.
pub fn csv_table<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        v.to_string()
    }
}
