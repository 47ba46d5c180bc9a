use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::rational::integer_power;
use super::roots::nth_root_enclosure;
use super::{Regime, ScalarError};

/// Closed interval `[lo, hi]` guaranteed to contain the true value.
///
/// Every operation rounds outward: the float result is widened by one ulp
/// in each direction unless an error-free transformation proves it exact
/// or pins the side on which the true value lies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

// Below this magnitude FMA residuals may themselves underflow.
const RESIDUAL_FLOOR: f64 = 1.0e-290;

/// Bounds for a rounded result `p` given the sign of `true - p`.
fn widen(p: f64, side: Option<Ordering>) -> (f64, f64) {
    if p.is_nan() {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    if p == f64::INFINITY {
        return (f64::MAX, f64::INFINITY);
    }
    if p == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, -f64::MAX);
    }
    match side {
        Some(Ordering::Equal) => (p, p),
        Some(Ordering::Greater) => (p, p.next_up()),
        Some(Ordering::Less) => (p.next_down(), p),
        None => (p.next_down(), p.next_up()),
    }
}

fn sign_of(x: f64) -> Ordering {
    x.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
}

fn add_bounds(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    if !s.is_finite() {
        return widen(s, None);
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    widen(s, Some(sign_of(err)))
}

fn mul_bounds(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if !p.is_finite() {
        return widen(p, None);
    }
    if a == 0.0 || b == 0.0 {
        return (0.0, 0.0);
    }
    if p.abs() < RESIDUAL_FLOOR {
        return widen(p, None);
    }
    let err = a.mul_add(b, -p);
    widen(p, Some(sign_of(err)))
}

fn div_bounds(a: f64, b: f64) -> (f64, f64) {
    let q = a / b;
    if !q.is_finite() {
        return widen(q, None);
    }
    if a == 0.0 {
        return (0.0, 0.0);
    }
    if a.abs() < RESIDUAL_FLOOR || q.abs() < RESIDUAL_FLOOR {
        return widen(q, None);
    }
    let r = (-q).mul_add(b, a);
    let side = match sign_of(b) {
        Ordering::Less => sign_of(r).reverse(),
        _ => sign_of(r),
    };
    widen(q, Some(side))
}

fn sqrt_bounds(x: f64) -> (f64, f64) {
    let s = x.sqrt();
    if x == 0.0 {
        return (0.0, 0.0);
    }
    if x < RESIDUAL_FLOOR || !s.is_finite() {
        let (lo, hi) = widen(s, None);
        return (lo.max(0.0), hi);
    }
    let r = (-s).mul_add(s, x);
    let (lo, hi) = widen(s, Some(sign_of(r)));
    (lo.max(0.0), hi)
}

/// Tightest f64 interval containing the rational `q`.
fn enclose_rational(q: &BigRational) -> (f64, f64) {
    if q.is_zero() {
        return (0.0, 0.0);
    }
    let f = q.to_f64().unwrap_or(if q.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    });
    if f.is_infinite() {
        return widen(f, None);
    }
    let exact = |x: f64| BigRational::from_float(x).expect("finite float");
    let fq = exact(f);
    match fq.cmp(q) {
        Ordering::Equal => (f, f),
        Ordering::Greater => {
            let mut lo = f.next_down();
            while exact(lo) > *q {
                lo = lo.next_down();
            }
            (lo, f)
        }
        Ordering::Less => {
            let mut hi = f.next_up();
            while hi.is_finite() && exact(hi) < *q {
                hi = hi.next_up();
            }
            (f, hi)
        }
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// The smallest interval with float bounds containing `q`.
    pub fn enclose(q: &BigRational) -> Self {
        let (lo, hi) = enclose_rational(q);
        Interval { lo, hi }
    }

    /// Enclosure of `[lo, hi]` given by rational bounds.
    pub fn enclose_range(lo: &BigRational, hi: &BigRational) -> Self {
        Interval {
            lo: enclose_rational(lo).0,
            hi: enclose_rational(hi).1,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn midpoint(&self) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            self.lo / 2.0 + self.hi / 2.0
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let lo = BigRational::from_float(self.lo);
        let hi = BigRational::from_float(self.hi);
        lo.is_none_or(|lo| lo <= *q) && hi.is_none_or(|hi| *q <= hi)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    fn combine(pairs: [(f64, f64); 4]) -> Interval {
        let lo = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: add_bounds(self.lo, rhs.lo).0,
            hi: add_bounds(self.hi, rhs.hi).1,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        self + (-rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        if self.lo == self.hi && rhs.lo == rhs.hi {
            let (lo, hi) = mul_bounds(self.lo, rhs.lo);
            return Interval { lo, hi };
        }
        Interval::combine([
            mul_bounds(self.lo, rhs.lo),
            mul_bounds(self.lo, rhs.hi),
            mul_bounds(self.hi, rhs.lo),
            mul_bounds(self.hi, rhs.hi),
        ])
    }
}

impl super::Field for Interval {
    const REGIME: Regime = Regime::Interval;

    fn zero() -> Self {
        Interval::point(0.0)
    }

    fn one() -> Self {
        Interval::point(1.0)
    }

    fn from_rational(q: &BigRational) -> Self {
        Interval::enclose(q)
    }

    fn pow_rational(base: u64, alpha: &BigRational) -> Result<Self, ScalarError> {
        if alpha.is_integer() {
            return Ok(Interval::enclose(&integer_power(base, alpha.numer())?));
        }
        let denom = alpha
            .denom()
            .to_u32()
            .ok_or_else(|| ScalarError::Parse(format!("exponent {alpha} too fine")))?;
        let power = integer_power(base, alpha.numer())?;
        // Enough bits to resolve the root to well below one ulp.
        let magnitude = ToPrimitive::to_f64(alpha).unwrap_or(0.0) * (base as f64).log2();
        let bits = 96 + (-magnitude).max(0.0).ceil() as u32;
        let (lo, hi) = nth_root_enclosure(&power, denom, bits);
        Ok(Interval::enclose_range(&lo, &hi))
    }

    fn recip(&self) -> Result<Self, ScalarError> {
        Interval::one().div(self)
    }

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        if rhs.contains_zero() {
            return Err(if rhs.lo == 0.0 && rhs.hi == 0.0 {
                ScalarError::DivisionByZero
            } else {
                ScalarError::PossiblyZero
            });
        }
        Ok(Interval::combine([
            div_bounds(self.lo, rhs.lo),
            div_bounds(self.lo, rhs.hi),
            div_bounds(self.hi, rhs.lo),
            div_bounds(self.hi, rhs.hi),
        ]))
    }

    fn sqrt(&self) -> Result<Self, ScalarError> {
        if self.hi < 0.0 {
            return Err(ScalarError::NegativeSqrt);
        }
        Ok(Interval {
            lo: sqrt_bounds(self.lo.max(0.0)).0,
            hi: sqrt_bounds(self.hi).1,
        })
    }

    fn sign(&self) -> Option<Ordering> {
        if self.lo > 0.0 {
            Some(Ordering::Greater)
        } else if self.hi < 0.0 {
            Some(Ordering::Less)
        } else if self.lo == 0.0 && self.hi == 0.0 {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    fn to_f64(&self) -> f64 {
        self.midpoint()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!([self.lo, self.hi])
    }

    fn from_json(v: &serde_json::Value) -> Result<Self, ScalarError> {
        let bad = || ScalarError::Parse(v.to_string());
        // Exact values are enclosed.
        let Some(pair) = v.as_array() else {
            return Ok(super::Surd::from_json(v)?.to_interval());
        };
        if pair.len() != 2 {
            return Err(bad());
        }
        let lo = pair[0].as_f64().ok_or_else(bad)?;
        let hi = pair[1].as_f64().ok_or_else(bad)?;
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(bad());
        }
        Ok(Interval { lo, hi })
    }

    fn abs(&self) -> Self {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval {
                lo: 0.0,
                hi: self.hi.max(-self.lo),
            }
        }
    }

    fn width(&self) -> f64 {
        add_bounds(self.hi, -self.lo).1
    }

    fn is_zero(&self) -> bool {
        self.contains_zero()
    }

    fn vanishes_within(&self, tol: f64) -> bool {
        self.contains_zero() && self.width() <= tol
    }

    fn is_degenerate(&self, _scale: f64) -> bool {
        self.contains_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn third_is_enclosed_tightly() {
        let x = Interval::enclose(&q(1, 3));
        assert!(x.contains_rational(&q(1, 3)));
        assert_eq!(x.hi(), x.lo().next_up());
        assert!(x.lo() < x.hi());
    }

    #[test]
    fn exact_operations_stay_points() {
        let a = Interval::point(1.5);
        let b = Interval::point(0.25);
        assert_eq!(a + b, Interval::point(1.75));
        assert_eq!(a * b, Interval::point(0.375));
        assert_eq!(a.div(&b).unwrap(), Interval::point(6.0));
        assert_eq!(Interval::point(2.25).sqrt().unwrap(), Interval::point(1.5));
    }

    #[test]
    fn inexact_operations_contain_truth() {
        let third = Interval::enclose(&q(1, 3));
        let sum = third + third + third;
        assert!(sum.contains(1.0));
        let tenth = Interval::point(1.0).div(&Interval::point(10.0)).unwrap();
        assert!(tenth.contains_rational(&q(1, 10)));
        let r = Interval::point(2.0).sqrt().unwrap();
        let sq = r * r;
        assert!(sq.contains(2.0));
    }

    #[test]
    fn fractional_power_encloses() {
        let x = Interval::pow_rational(22, &q(-33, 2)).unwrap();
        let target = integer_power(22, &(-33).into()).unwrap();
        let lo = BigRational::from_float(x.lo()).unwrap();
        let hi = BigRational::from_float(x.hi()).unwrap();
        assert!(&lo * &lo <= target && target <= &hi * &hi);
        assert!(x.width() < x.hi() * 1e-15);
        let s = Interval::pow_rational(4, &q(1, 2)).unwrap();
        assert_eq!(s, Interval::point(2.0));
    }

    #[test]
    fn division_by_straddling_interval_fails() {
        let z = Interval::new(-1.0, 1.0);
        assert_eq!(Interval::one().div(&z), Err(ScalarError::PossiblyZero));
        assert_eq!(z.sign(), None);
    }

    #[test]
    fn json_round_trip() {
        let x = Interval::enclose(&q(2, 7));
        assert_eq!(Interval::from_json(&x.to_json()).unwrap(), x);
    }
}
