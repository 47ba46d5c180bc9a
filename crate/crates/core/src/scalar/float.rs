use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{Regime, ScalarError};

/// Relative size below which a float determinant counts as singular.
const SINGULAR_RELATIVE: f64 = 1e-12;

impl super::Field for f64 {
    const REGIME: Regime = Regime::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn pow_rational(base: u64, alpha: &BigRational) -> Result<Self, ScalarError> {
        let b = base as f64;
        if alpha.is_integer() {
            if let Some(n) = alpha.numer().to_i32() {
                return Ok(b.powi(n));
            }
        }
        Ok(b.powf(ToPrimitive::to_f64(alpha).unwrap_or(f64::NAN)))
    }

    fn recip(&self) -> Result<Self, ScalarError> {
        if *self == 0.0 {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        if *rhs == 0.0 {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(self / rhs)
        }
    }

    fn sqrt(&self) -> Result<Self, ScalarError> {
        if *self < 0.0 {
            Err(ScalarError::NegativeSqrt)
        } else {
            Ok(f64::sqrt(*self))
        }
    }

    fn sign(&self) -> Option<Ordering> {
        self.partial_cmp(&0.0)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(self.to_string()))
    }

    fn from_json(v: &serde_json::Value) -> Result<Self, ScalarError> {
        match v {
            serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| ScalarError::Parse(n.to_string())),
            serde_json::Value::String(s) => s
                .parse::<f64>()
                .or_else(|_| super::parse_rational(s).map(|q| ToPrimitive::to_f64(&q).unwrap_or(f64::NAN)))
                .or_else(|_| s.parse::<super::Surd>().map(|x| x.to_f64()))
                .map_err(|_| ScalarError::Parse(s.clone())),
            other => Err(ScalarError::Parse(other.to_string())),
        }
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn vanishes_within(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }

    fn is_degenerate(&self, scale: f64) -> bool {
        !self.is_finite() || f64::abs(*self) <= SINGULAR_RELATIVE * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    #[test]
    fn basic_operations() {
        assert_eq!(f64::pow_rational(7, &BigRational::from_integer((-2).into())).unwrap(), 1.0 / 49.0);
        assert_eq!(Field::sqrt(&4.0f64).unwrap(), 2.0);
        assert!(Field::recip(&0.0f64).is_err());
        assert!(1e-20f64.is_degenerate(1.0));
        assert!(!1e-20f64.is_degenerate(1e-15));
    }
}
