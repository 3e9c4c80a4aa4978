//! Numbers given either as decimals or as exact fractions `a/b`.
//!
//! Both notations denote rationals, so every parsed number keeps an exact
//! value next to its `f64` approximation. Exact values feed the rational
//! cylinder and cube products.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Number {
    exact: BigRational,
    value: f64,
}

impl Number {
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Number::from_exact(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn from_exact(exact: BigRational) -> Self {
        let value = ratio_to_f64(&exact);
        Number { exact, value }
    }

    /// The shortest decimal expansion of `x`, kept exactly.
    pub fn from_f64(x: f64) -> Result<Self> {
        format!("{x:?}").parse()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }
}

pub fn ratio_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fallback for numerators/denominators outside f64 range.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all.parse().ok()?;
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(q)
}

impl FromStr for Number {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse number {s:?}"));
        let exact = match s.split_once('/') {
            Some((a, b)) => {
                let a = parse_decimal(a.trim()).ok_or_else(bad)?;
                let b = parse_decimal(b.trim()).ok_or_else(bad)?;
                if b.is_zero() {
                    return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
                }
                a / b
            }
            None => parse_decimal(s).ok_or_else(bad)?,
        };
        Ok(Number::from_exact(exact))
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact.denom().is_one() {
            write!(f, "{}", self.exact.numer())
        } else {
            write!(f, "{}/{}", self.exact.numer(), self.exact.denom())
        }
    }
}

/// Exact sum of a list of numbers.
pub fn exact_sum<'a>(xs: impl IntoIterator<Item = &'a Number>) -> BigRational {
    xs.into_iter().fold(BigRational::zero(), |acc, x| acc + x.exact())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_decimals_agree() {
        let a: Number = "7/10".parse().unwrap();
        let b: Number = "0.7".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value(), 0.7);
    }

    #[test]
    fn exponent_notation() {
        let a: Number = "2.5e-3".parse().unwrap();
        assert_eq!(a.exact(), &BigRational::new(BigInt::from(1), BigInt::from(400)));
    }

    #[test]
    fn rejects_garbage() {
        assert!("abc".parse::<Number>().is_err());
        assert!("1/0".parse::<Number>().is_err());
        assert!("".parse::<Number>().is_err());
    }

    #[test]
    fn thirds_sum_to_one_exactly() {
        let xs: Vec<Number> = ["1/3", "1/3", "1/3"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(exact_sum(&xs).is_one());
    }

    #[test]
    fn display_round_trips() {
        let a: Number = "-3/12".parse().unwrap();
        assert_eq!(a.to_string(), "-1/4");
        assert_eq!(a.to_string().parse::<Number>().unwrap(), a);
    }
}
