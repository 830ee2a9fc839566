//! Scalar abstraction shared by the binary64 and extended-precision paths.
//!
//! Only the closed-form routines (Spitzbart expansion, bisection) are generic;
//! the Newton table stays on `f64`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Lift an `f64` into the same precision context as `self`.
    fn lift(&self, v: f64) -> Self;
    fn powi(&self, n: i32) -> Self;
    /// Real power of a positive base.
    fn powf(&self, e: &Self) -> Self;
    fn sqrt(&self) -> Self;
    fn to_f64(&self) -> f64;

    fn zero_like(&self) -> Self {
        self.lift(0.0)
    }
    fn one_like(&self) -> Self {
        self.lift(1.0)
    }
    fn abs(&self) -> Self {
        if *self < self.zero_like() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn is_negative(&self) -> bool {
        *self < self.zero_like()
    }
}

impl Real for f64 {
    fn lift(&self, v: f64) -> Self {
        v
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

type Big = FBig<HalfEven>;

/// Binary floating point with a fixed working precision in bits.
#[derive(Clone)]
pub struct HiFloat {
    v: Big,
    bits: usize,
}

impl HiFloat {
    pub fn new(v: f64, bits: usize) -> Self {
        let big = Big::try_from(v).expect("finite f64");
        HiFloat {
            v: big.with_precision(bits).value(),
            bits,
        }
    }

    /// Working precision matching `digits` significant decimal digits plus guard bits.
    pub fn bits_for_digits(digits: u32) -> usize {
        (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
    }

    pub fn precision_bits(&self) -> usize {
        self.bits
    }

    pub fn ratio(num: i64, den: i64, bits: usize) -> Self {
        let n = HiFloat::new(num as f64, bits);
        let d = HiFloat::new(den as f64, bits);
        n / d
    }

    fn wrap(&self, v: Big) -> Self {
        HiFloat {
            v: v.with_precision(self.bits).value(),
            bits: self.bits,
        }
    }

    pub fn ln(&self) -> Self {
        self.wrap(self.v.ln())
    }

    pub fn exp(&self) -> Self {
        self.wrap(self.v.exp())
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let dec = self.v.clone().with_base_and_precision::<10>(digits).value();
        format!("{dec}")
    }
}

impl fmt::Debug for HiFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HiFloat({:e}, {} bits)", self.to_f64(), self.bits)
    }
}

impl PartialEq for HiFloat {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v
    }
}

impl PartialOrd for HiFloat {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

macro_rules! hifloat_binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for HiFloat {
            type Output = HiFloat;
            fn $f(self, rhs: HiFloat) -> HiFloat {
                let bits = self.bits.max(rhs.bits);
                HiFloat { v: (self.v $op rhs.v).with_precision(bits).value(), bits }
            }
        }
    };
}
hifloat_binop!(Add, add, +);
hifloat_binop!(Sub, sub, -);
hifloat_binop!(Mul, mul, *);
hifloat_binop!(Div, div, /);

impl Neg for HiFloat {
    type Output = HiFloat;
    fn neg(self) -> HiFloat {
        HiFloat {
            v: -self.v,
            bits: self.bits,
        }
    }
}

impl Real for HiFloat {
    fn lift(&self, v: f64) -> Self {
        HiFloat::new(v, self.bits)
    }
    fn powi(&self, n: i32) -> Self {
        let one = self.one_like();
        if n == 0 {
            return one;
        }
        let mut base = if n < 0 { one / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
    fn powf(&self, e: &Self) -> Self {
        self.wrap(self.v.powf(&e.v))
    }
    fn sqrt(&self) -> Self {
        self.wrap(self.v.sqrt())
    }
    fn to_f64(&self) -> f64 {
        self.v.to_f64().value()
    }
}
