//! Scalar regimes and the small dense linear algebra used by the reduction.
//!
//! Three regimes share one [`Field`] interface:
//!
//! * exact: [`num_rational::BigRational`], and [`Surd`] which extends it with
//!   fourth roots of rationals,
//! * [`Interval`]: `f64` enclosures with outward rounding,
//! * plain `f64` for fast exploration.

mod complex;
mod float;
mod interval;
mod linalg;
mod rational;
mod roots;
mod surd;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use complex::Cplx;
pub use interval::Interval;
pub use linalg::{cramer_solve3, det2, det3, det4, Mat3, Mat4};
pub use rational::{format_rational, parse_rational, rational_from_f64, rationalize};
pub use roots::{fourth_root_bounds, nth_root_enclosure};
pub use surd::Surd;

/// Arithmetic regime of a scalar type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Rational,
    Interval,
    Float,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Rational => "rational",
            Regime::Interval => "interval",
            Regime::Float => "float",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" | "exact" => Ok(Regime::Rational),
            "interval" => Ok(Regime::Interval),
            "float" => Ok(Regime::Float),
            other => Err(ScalarError::Parse(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by an enclosure that contains zero")]
    PossiblyZero,
    #[error("singular system")]
    Singular,
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("{op} is not representable in the {regime} regime")]
    Unsupported { op: String, regime: Regime },
    #[error("cannot parse scalar: {0}")]
    Parse(String),
}

/// The operations every scalar regime provides.
///
/// Arithmetic is by value; callers clone where they need to keep operands.
pub trait Field:
    Clone
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const REGIME: Regime;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }

    /// `base^alpha` for a positive integer base.
    fn pow_rational(base: u64, alpha: &BigRational) -> Result<Self, ScalarError>;

    fn recip(&self) -> Result<Self, ScalarError>;

    fn sqrt(&self) -> Result<Self, ScalarError>;

    /// Sign when it is decidable. Enclosures straddling zero give `None`.
    fn sign(&self) -> Option<Ordering>;

    fn to_f64(&self) -> f64;

    fn to_json(&self) -> serde_json::Value;

    fn from_json(v: &serde_json::Value) -> Result<Self, ScalarError>;

    fn abs(&self) -> Self {
        match self.sign() {
            Some(Ordering::Less) => -self.clone(),
            _ => self.clone(),
        }
    }

    /// Width of the enclosure; zero for point values.
    fn width(&self) -> f64 {
        0.0
    }

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self.clone() * rhs.recip()?)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn is_positive(&self) -> bool {
        self.sign() == Some(Ordering::Greater)
    }

    fn is_negative(&self) -> bool {
        self.sign() == Some(Ordering::Less)
    }

    /// Exactly zero for point regimes; enclosure of zero for intervals.
    fn is_zero(&self) -> bool {
        self.sign() == Some(Ordering::Equal)
    }

    /// Zero up to `tol` in regimes that cannot decide equality exactly.
    ///
    /// Exact regimes ignore `tol`.
    fn vanishes_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    /// Whether a determinant should be treated as singular given the
    /// Hadamard bound `scale` of its matrix.
    fn is_degenerate(&self, _scale: f64) -> bool {
        !matches!(self.sign(), Some(Ordering::Less | Ordering::Greater))
    }

    /// Strict comparison `self < rhs` when decidable.
    fn lt(&self, rhs: &Self) -> Option<bool> {
        match (rhs.clone() - self.clone()).sign()? {
            Ordering::Greater => Some(true),
            _ => Some(false),
        }
    }
}

/// Sum of a sequence of scalars.
pub fn sum<T: Field>(items: impl IntoIterator<Item = T>) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x)
}
