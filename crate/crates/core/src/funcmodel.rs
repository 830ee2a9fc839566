//! Functions with closed-form derivatives of every order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::real::{HiFloat, Real};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// `(x / unit)^p`. `unit` is 1 except for overflow-normalized models.
    Power { p: f64, unit: f64 },
    /// `x^k log x`.
    LogPower { k: u32 },
    Exp,
    /// `base(x) + poly(x)`, `poly` as monomial coefficients, lowest degree first.
    Shifted {
        base: Box<FunctionModel>,
        poly: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionModel {
    kind: ModelKind,
    scale: f64,
}

/// Falling factorial `p (p-1) ... (p-j+1)`.
pub fn falling(p: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (p - i as f64))
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn binom(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn harmonic(n: u32) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

impl FunctionModel {
    pub fn new(kind: ModelKind) -> Self {
        FunctionModel { kind, scale: 1.0 }
    }

    pub fn power(p: f64) -> Self {
        Self::new(ModelKind::Power { p, unit: 1.0 })
    }

    /// `(x/unit)^p`, which differs from `x^p` by the constant factor `unit^{-p}`.
    pub fn power_normalized(p: f64, unit: f64) -> Self {
        Self::new(ModelKind::Power { p, unit })
    }

    pub fn reciprocal() -> Self {
        Self::power(-1.0)
    }

    pub fn log_power(k: u32) -> Self {
        Self::new(ModelKind::LogPower { k })
    }

    pub fn exp() -> Self {
        Self::new(ModelKind::Exp)
    }

    pub fn shifted(base: FunctionModel, poly: Vec<f64>) -> Self {
        Self::new(ModelKind::Shifted {
            base: Box::new(base),
            poly,
        })
    }

    /// Same function multiplied by `c`. Panics unless `c` is positive and finite.
    pub fn with_scale(mut self, c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "scale must be positive, got {c}");
        self.scale *= c;
        self
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Exponent of a power model.
    pub fn exponent(&self) -> Option<f64> {
        match &self.kind {
            ModelKind::Power { p, .. } => Some(*p),
            ModelKind::LogPower { k } => Some(*k as f64),
            ModelKind::Shifted { base, .. } => base.exponent(),
            ModelKind::Exp => None,
        }
    }

    /// `f^{(j)}(x)` for `x > 0`.
    pub fn eval_deriv(&self, x: f64, j: usize) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain { what: "x", value: x });
        }
        let raw = match &self.kind {
            ModelKind::Power { p, unit } => {
                let c = falling(*p, j);
                if c == 0.0 {
                    0.0
                } else {
                    c * (x / unit).powf(*p) * x.powi(-(j as i32))
                }
            }
            ModelKind::LogPower { k } => {
                let k = *k;
                if j as u32 <= k {
                    let kj = k - j as u32;
                    falling(k as f64, j)
                        * x.powi(kj as i32)
                        * (x.ln() + harmonic(k) - harmonic(kj))
                } else {
                    let e = j - k as usize - 1;
                    let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
                    sign * factorial(k as usize) * factorial(e) * x.powi(k as i32 - j as i32)
                }
            }
            ModelKind::Exp => x.exp(),
            ModelKind::Shifted { base, poly } => {
                let mut acc = base.eval_deriv(x, j)?;
                // coefficient of x^i contributes falling(i, j) x^{i-j}
                for (i, c) in poly.iter().enumerate().skip(j) {
                    acc += c * falling(i as f64, j) * x.powi((i - j) as i32);
                }
                acc
            }
        };
        let v = self.scale * raw;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: self.to_string(),
                x,
                order: j,
            })
        }
    }

    /// `f^{(j)}(x)` at extended precision.
    pub fn eval_deriv_hp(&self, x: &HiFloat, j: usize) -> Result<HiFloat> {
        if !(x.to_f64() > 0.0) {
            return Err(Error::Domain { what: "x", value: x.to_f64() });
        }
        let bits = x.precision_bits();
        let raw = match &self.kind {
            ModelKind::Power { p, unit } => {
                let c = (0..j).fold(x.one_like(), |acc, i| acc * x.lift(p - i as f64));
                let base = x.clone() / x.lift(*unit);
                c * base.powf(&x.lift(*p)) * x.powi(-(j as i32))
            }
            ModelKind::LogPower { k } => {
                let k = *k as usize;
                if j <= k {
                    let c = (0..j).fold(x.one_like(), |acc, i| acc * x.lift((k - i) as f64));
                    let tail = (k - j + 1..=k).fold(x.zero_like(), |acc, i| acc + HiFloat::ratio(1, i as i64, bits));
                    c * x.powi((k - j) as i32) * (x.ln() + tail)
                } else {
                    let e = j - k - 1;
                    let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
                    x.lift(sign * factorial(k) * factorial(e)) * x.powi(k as i32 - j as i32)
                }
            }
            ModelKind::Exp => x.exp(),
            ModelKind::Shifted { base, poly } => {
                let mut acc = base.eval_deriv_hp(x, j)?;
                for (i, c) in poly.iter().enumerate().skip(j) {
                    acc = acc + x.lift(c * falling(i as f64, j)) * x.powi((i - j) as i32);
                }
                acc
            }
        };
        Ok(raw * x.lift(self.scale))
    }

    /// `f^{(j)}(c) c^j / j!` for `j < count`: Taylor coefficients in the variable `(x - c) / c`.
    pub fn scaled_taylor_coeffs(&self, c: f64, count: usize) -> Result<Vec<f64>> {
        if !(c > 0.0) {
            return Err(Error::Domain { what: "x", value: c });
        }
        let raw: Vec<f64> = match &self.kind {
            ModelKind::Power { p, unit } => {
                let mut t = (c / unit).powf(*p);
                (0..count)
                    .map(|j| {
                        if j > 0 {
                            t *= (p - (j - 1) as f64) / j as f64;
                        }
                        t
                    })
                    .collect()
            }
            ModelKind::LogPower { k } => {
                let k = *k as usize;
                let ck = c.powi(k as i32);
                (0..count)
                    .map(|j| {
                        if j <= k {
                            binom(k, j) * ck * (c.ln() + harmonic(k as u32) - harmonic((k - j) as u32))
                        } else {
                            let sign = if (j - k - 1) % 2 == 0 { 1.0 } else { -1.0 };
                            sign * ck / (binom(j, k) * (j - k) as f64)
                        }
                    })
                    .collect()
            }
            ModelKind::Exp => {
                let mut t = c.exp();
                (0..count)
                    .map(|j| {
                        if j > 0 {
                            t *= c / j as f64;
                        }
                        t
                    })
                    .collect()
            }
            ModelKind::Shifted { base, poly } => {
                let mut out = base.scaled_taylor_coeffs(c, count)?;
                for (j, slot) in out.iter_mut().enumerate() {
                    for (i, a) in poly.iter().enumerate().skip(j) {
                        *slot += a * binom(i, j) * c.powi(i as i32);
                    }
                }
                out
            }
        };
        let out: Vec<f64> = raw.into_iter().map(|v| v * self.scale).collect();
        match out.iter().position(|v| !v.is_finite()) {
            Some(j) => Err(Error::NonFinite {
                what: self.to_string(),
                x: c,
                order: j,
            }),
            None => Ok(out),
        }
    }

    /// Constant sign of `f^{(n+1)}` on `(a, b)`.
    ///
    /// Decided analytically where the kind allows it, otherwise by sampling a
    /// 64-point grid.
    pub fn check_nonvanishing(&self, n: usize, a: f64, b: f64) -> Result<i8> {
        if !(a > 0.0) {
            return Err(Error::Domain { what: "a", value: a });
        }
        if !(b > 0.0) {
            return Err(Error::Domain { what: "b", value: b });
        }
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let order = n + 1;
        let undefined = || Error::UndefinedMean {
            model: self.to_string(),
            order,
            p: self.exponent(),
        };
        let analytic: Option<i8> = match &self.kind {
            ModelKind::Power { p, .. } => {
                let c = falling(*p, order);
                if c == 0.0 {
                    return Err(undefined());
                }
                Some(if c > 0.0 { 1 } else { -1 })
            }
            ModelKind::LogPower { k } if (*k as usize) <= n => {
                Some(if (n - *k as usize) % 2 == 0 { 1 } else { -1 })
            }
            ModelKind::Exp => Some(1),
            ModelKind::Shifted { base, poly } if poly.len() <= order => {
                match base.check_nonvanishing(n, lo, hi) {
                    Ok(s) => Some(s),
                    Err(Error::UndefinedMean { .. }) => return Err(undefined()),
                    Err(e) => return Err(e),
                }
            }
            _ => None,
        };
        if let Some(s) = analytic {
            return Ok(s);
        }
        self.sample_sign(order, lo, hi).ok_or_else(undefined)
    }

    fn sample_sign(&self, order: usize, lo: f64, hi: f64) -> Option<i8> {
        const GRID: usize = 64;
        let mut sign = 0i8;
        for i in 0..GRID {
            let x = lo + (hi - lo) * (i as f64 + 0.5) / GRID as f64;
            let v = self.eval_deriv(x, order).ok()?;
            let s = if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                return None;
            };
            if sign != 0 && s != sign {
                return None;
            }
            sign = s;
        }
        Some(sign)
    }
}

impl fmt::Display for FunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Power { p, unit } if *unit == 1.0 => write!(f, "power:{p}")?,
            ModelKind::Power { p, unit } => write!(f, "power:{p}@{unit}")?,
            ModelKind::LogPower { k } => write!(f, "logpower:{k}")?,
            ModelKind::Exp => write!(f, "exp")?,
            ModelKind::Shifted { base, poly } => write!(f, "shifted({base};{poly:?})")?,
        }
        if self.scale != 1.0 {
            write!(f, "*{}", self.scale)?;
        }
        Ok(())
    }
}

impl FromStr for FunctionModel {
    type Err = Error;

    /// Accepts `power:<p>`, `logpower:<k>` and `exp`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized model literal {s:?}"));
        if s == "exp" {
            return Ok(FunctionModel::exp());
        }
        let (head, arg) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "power" => {
                let p: f64 = arg.parse().map_err(|_| bad())?;
                if !p.is_finite() {
                    return Err(bad());
                }
                Ok(FunctionModel::power(p))
            }
            "logpower" => {
                let k: u32 = arg.parse().map_err(|_| bad())?;
                Ok(FunctionModel::log_power(k))
            }
            _ => Err(bad()),
        }
    }
}
