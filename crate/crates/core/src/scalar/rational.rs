use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::{Regime, ScalarError};

impl super::Field for BigRational {
    const REGIME: Regime = Regime::Rational;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn pow_rational(base: u64, alpha: &BigRational) -> Result<Self, ScalarError> {
        if !alpha.is_integer() {
            return Err(ScalarError::Unsupported {
                op: format!("{base}^({alpha})"),
                regime: Regime::Rational,
            });
        }
        integer_power(base, alpha.numer())
    }

    fn recip(&self) -> Result<Self, ScalarError> {
        if Zero::is_zero(self) {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(Ratio::recip(self))
        }
    }

    fn sqrt(&self) -> Result<Self, ScalarError> {
        if Signed::is_negative(self) {
            return Err(ScalarError::NegativeSqrt);
        }
        exact_sqrt(self).ok_or_else(|| ScalarError::Unsupported {
            op: format!("sqrt({self})"),
            regime: Regime::Rational,
        })
    }

    fn sign(&self) -> Option<Ordering> {
        Some(self.numer().sign().cmp_zero())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn from_json(v: &serde_json::Value) -> Result<Self, ScalarError> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(ScalarError::Parse(other.to_string())),
        }
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

trait CmpZero {
    fn cmp_zero(self) -> Ordering;
}

impl CmpZero for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

/// `base^n` for an integer exponent, exact.
pub(crate) fn integer_power(base: u64, n: &BigInt) -> Result<BigRational, ScalarError> {
    if base == 0 {
        return if n.is_positive() {
            Ok(BigRational::zero())
        } else {
            Err(ScalarError::DivisionByZero)
        };
    }
    let e = n
        .abs()
        .to_u32()
        .ok_or_else(|| ScalarError::Parse(format!("exponent {n} too large")))?;
    let p = BigInt::from(base).pow(e);
    if n.is_negative() {
        Ok(BigRational::new(BigInt::one(), p))
    } else {
        Ok(BigRational::from_integer(p))
    }
}

pub(crate) fn exact_sqrt(q: &BigRational) -> Option<BigRational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// `p` for integers, `p/q` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, integers and decimal literals such as `-4.999` or `2.5e13`.
pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::Parse(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if negative {
        q = -q;
    }
    Ok(q)
}

/// The decimal number printed by the shortest round-trip representation of `x`.
pub fn rational_from_f64(x: f64) -> Result<BigRational, ScalarError> {
    if !x.is_finite() {
        return Err(ScalarError::Parse(x.to_string()));
    }
    parse_rational(&format!("{x:e}"))
}

/// `x` rounded to `digits` significant decimal digits, as an exact rational.
pub fn rationalize(x: f64, digits: usize) -> Result<BigRational, ScalarError> {
    if !x.is_finite() {
        return Err(ScalarError::Parse(x.to_string()));
    }
    parse_rational(&format!("{:.*e}", digits.max(1) - 1, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-16").unwrap(), q(-16, 1));
        assert_eq!(parse_rational("-4.999").unwrap(), q(-4999, 1000));
        assert_eq!(parse_rational("2.5e3").unwrap(), q(2500, 1));
        assert_eq!(parse_rational("1E-2").unwrap(), q(1, 100));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for x in [q(1, 3), q(-7, 2), q(5, 1), q(0, 1)] {
            assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }

    #[test]
    fn decimal_reading_of_floats() {
        assert_eq!(rational_from_f64(-4.2).unwrap(), q(-21, 5));
        assert_eq!(rationalize(1.23456789, 3).unwrap(), q(123, 100));
        assert_eq!(rationalize(2.0e13, 1).unwrap(), q(20_000_000_000_000, 1));
    }

    #[test]
    fn powers_are_exact() {
        let w = BigRational::pow_rational(7, &q(-16, 1)).unwrap();
        assert_eq!(w * BigRational::from_integer(BigInt::from(7).pow(16u32)), q(1, 1));
        assert!(BigRational::pow_rational(7, &q(-1, 2)).is_err());
    }

    #[test]
    fn sqrt_of_squares_only() {
        assert_eq!(Field::sqrt(&q(9, 4)).unwrap(), q(3, 2));
        assert!(Field::sqrt(&q(2, 1)).is_err());
        assert_eq!(Field::sqrt(&q(-1, 1)), Err(ScalarError::NegativeSqrt));
    }
}
