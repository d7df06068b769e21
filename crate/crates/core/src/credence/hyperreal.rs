//! First-order hyperreals `a + b·ε` over exact rationals.
//!
//! Products drop the `ε²` term. Ordering is lexicographic on
//! (standard part, infinitesimal coefficient), which makes `ε` positive
//! and smaller than every positive rational.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub(crate) fn rat_pow(r: &Rational, e: u64) -> Rational {
    Rational::new_raw(Pow::pow(r.numer(), e), Pow::pow(r.denom(), e))
}

/// `2^-e` as an exact rational.
pub fn pow2_inv(e: u64) -> Rational {
    Rational::new_raw(BigInt::one(), Pow::pow(BigInt::from(2), e))
}

pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `standard + infinitesimal·ε`. Field order matters: the derived `Ord`
/// is the lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HyperReal {
    standard: Rational,
    infinitesimal: Rational,
}

impl HyperReal {
    pub fn new(standard: Rational, infinitesimal: Rational) -> Self {
        HyperReal { standard, infinitesimal }
    }

    pub fn real(standard: Rational) -> Self {
        HyperReal { standard, infinitesimal: Rational::zero() }
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::real(rat(numer, denom))
    }

    /// The positive infinitesimal `ε`.
    pub fn eps() -> Self {
        HyperReal { standard: Rational::zero(), infinitesimal: Rational::one() }
    }

    pub fn standard_part(&self) -> &Rational {
        &self.standard
    }

    pub fn infinitesimal_part(&self) -> &Rational {
        &self.infinitesimal
    }

    pub fn is_real(&self) -> bool {
        self.infinitesimal.is_zero()
    }

    /// Nonzero with zero standard part.
    pub fn is_infinitesimal(&self) -> bool {
        self.standard.is_zero() && !self.infinitesimal.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    pub fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        HyperReal { standard: &self.standard * k, infinitesimal: &self.infinitesimal * k }
    }

    /// `self / rhs`, truncated at first order.
    pub fn checked_div(&self, rhs: &HyperReal) -> Result<HyperReal> {
        if rhs.standard.is_zero() {
            return Err(Error::DivisionByInfinitesimal);
        }
        let c = &rhs.standard;
        let standard = &self.standard / c;
        let infinitesimal =
            (&self.infinitesimal * c - &self.standard * &rhs.infinitesimal) / (c * c);
        Ok(HyperReal { standard, infinitesimal })
    }

    /// Standard part as `f64`, for plotting only.
    pub fn standard_f64(&self) -> f64 {
        rational_to_f64(&self.standard)
    }

    /// Canonical text form `a/b + c/d*eps`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Zero for HyperReal {
    fn zero() -> Self {
        HyperReal { standard: Rational::zero(), infinitesimal: Rational::zero() }
    }

    fn is_zero(&self) -> bool {
        self.standard.is_zero() && self.infinitesimal.is_zero()
    }
}

impl One for HyperReal {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<Rational> for HyperReal {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl From<i64> for HyperReal {
    fn from(v: i64) -> Self {
        Self::real(Rational::from_integer(BigInt::from(v)))
    }
}

impl<'a> Add<&'a HyperReal> for &'a HyperReal {
    type Output = HyperReal;
    fn add(self, rhs: &HyperReal) -> HyperReal {
        HyperReal {
            standard: &self.standard + &rhs.standard,
            infinitesimal: &self.infinitesimal + &rhs.infinitesimal,
        }
    }
}

impl<'a> Sub<&'a HyperReal> for &'a HyperReal {
    type Output = HyperReal;
    fn sub(self, rhs: &HyperReal) -> HyperReal {
        HyperReal {
            standard: &self.standard - &rhs.standard,
            infinitesimal: &self.infinitesimal - &rhs.infinitesimal,
        }
    }
}

impl<'a> Mul<&'a HyperReal> for &'a HyperReal {
    type Output = HyperReal;
    fn mul(self, rhs: &HyperReal) -> HyperReal {
        HyperReal {
            standard: &self.standard * &rhs.standard,
            infinitesimal: &self.standard * &rhs.infinitesimal
                + &self.infinitesimal * &rhs.standard,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for HyperReal {
            type Output = HyperReal;
            fn $m(self, rhs: HyperReal) -> HyperReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a HyperReal> for HyperReal {
            type Output = HyperReal;
            fn $m(self, rhs: &HyperReal) -> HyperReal {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for HyperReal {
    type Output = HyperReal;
    fn neg(self) -> HyperReal {
        HyperReal { standard: -self.standard, infinitesimal: -self.infinitesimal }
    }
}

impl<'a> core::iter::Sum<&'a HyperReal> for HyperReal {
    fn sum<I: Iterator<Item = &'a HyperReal>>(iter: I) -> Self {
        iter.fold(HyperReal::zero(), |acc, x| &acc + x)
    }
}

/// Binary operation selector for callers that dispatch on data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyperOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn hyper_arith(x: &HyperReal, y: &HyperReal, op: HyperOp) -> Result<HyperReal> {
    Ok(match op {
        HyperOp::Add => x + y,
        HyperOp::Sub => x - y,
        HyperOp::Mul => x * y,
        HyperOp::Div => return x.checked_div(y),
    })
}

impl fmt::Display for HyperReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}*eps",
            fmt_rational(&self.standard),
            fmt_rational(&self.infinitesimal)
        )
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    if s.is_empty() {
        return None;
    }
    match s.split_once('.') {
        // decimals are read exactly: 0.9 is 9/10
        Some((int, frac)) => {
            let (neg, int) = match int.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int.strip_prefix('+').unwrap_or(int)),
            };
            let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
            if (int.is_empty() && frac.is_empty()) || !all_digits(int) || !all_digits(frac) {
                return None;
            }
            let digits = BigInt::from_str(&format!("0{int}{frac}")).ok()?;
            let value = Rational::new(digits, Pow::pow(BigInt::from(10), frac.len()));
            Some(if neg { -value } else { value })
        }
        None => Rational::from_str(s).ok(),
    }
}

impl FromStr for HyperReal {
    type Err = Error;

    /// Accepts the canonical form plus shorthands such as `1/2`, `eps`,
    /// `3*eps`, `1/2 - eps`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        // split into signed terms; a sign directly after an operator is part of the term
        let bytes = compact.as_bytes();
        let mut terms: Vec<(bool, &str)> = Vec::new();
        let mut start = 0;
        let mut negate = false;
        let mut i = 0;
        while i <= bytes.len() {
            let at_end = i == bytes.len();
            let is_op = !at_end && (bytes[i] == b'+' || bytes[i] == b'-');
            let leading = i == start;
            if at_end || (is_op && !leading) {
                terms.push((negate, &compact[start..i]));
                if at_end {
                    break;
                }
                negate = bytes[i] == b'-';
                start = i + 1;
            }
            i += 1;
        }
        let mut out = HyperReal::zero();
        for (neg, term) in terms {
            let (coef, is_eps) = if let Some(c) = term.strip_suffix("*eps") {
                (parse_rational(c).ok_or_else(bad)?, true)
            } else if let Some(c) = term.strip_suffix("eps") {
                let c = match c {
                    "" | "+" => Rational::one(),
                    "-" => -Rational::one(),
                    other => parse_rational(other).ok_or_else(bad)?,
                };
                (c, true)
            } else {
                (parse_rational(term).ok_or_else(bad)?, false)
            };
            let coef = if neg { -coef } else { coef };
            if is_eps {
                out.infinitesimal += coef;
            } else {
                out.standard += coef;
            }
        }
        Ok(out)
    }
}

impl HyperReal {
    pub fn abs(&self) -> HyperReal {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn min_of(a: HyperReal, b: HyperReal) -> HyperReal {
        match a.cmp(&b) {
            Ordering::Greater => b,
            _ => a,
        }
    }
}
