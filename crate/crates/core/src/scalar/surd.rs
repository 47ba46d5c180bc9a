use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{exact_sqrt, format_rational, integer_power, parse_rational};
use super::roots::{exact_nth_root, fourth_root_bounds, is_power_residue};
use super::{Interval, Regime, ScalarError};

/// Exact real number of the form `sum_j c_j * r_j^(1/4)`.
///
/// `c_j` are rationals and `r_j` positive integers with no two ratios
/// `r_i / r_j` a rational fourth power. Real fourth roots with that property
/// are linearly independent over the rationals, so a value is zero exactly
/// when it has no terms and its sign is decided by refining enclosures.
///
/// Division and square roots are only available for single-term values.
#[derive(Clone, Debug, Default)]
pub struct Surd {
    terms: Vec<(BigRational, BigInt)>,
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Writes a positive rational radicand as `m^4 * r` with `r` an integer.
fn normalize_radicand(q: &BigRational) -> (BigRational, BigInt) {
    debug_assert!(q.is_positive());
    let d = q.denom();
    let mut rad = q.numer() * d * d * d;
    let mut mult = BigRational::new(BigInt::one(), d.clone());
    for p in SMALL_PRIMES {
        let p4 = BigInt::from(p).pow(4);
        while (&rad % &p4).is_zero() {
            rad /= &p4;
            mult *= BigRational::from_integer(p.into());
        }
    }
    if let Some(root) = exact_nth_root(&rad, 4) {
        mult *= BigRational::from_integer(root);
        rad = BigInt::one();
    }
    (mult, rad)
}

/// `t` with `a^(1/4) = t * b^(1/4)` when `a / b` is a rational fourth power.
fn fourth_power_ratio(a: &BigInt, b: &BigInt) -> Option<BigRational> {
    // a / b is a fourth power exactly when a * b^3 is one.
    let sieved = [16u32, 5, 13, 17, 29].iter().all(|&m| {
        let ra = (a % m).to_u32().unwrap_or(0) as u64;
        let rb = (b % m).to_u32().unwrap_or(0) as u64;
        let r = (ra * rb % m as u64 * rb % m as u64 * rb % m as u64) as u32;
        is_power_residue(r, 4, m)
    });
    if !sieved {
        return None;
    }
    let q = BigRational::new(a.clone(), b.clone());
    let n = exact_nth_root(q.numer(), 4)?;
    let d = exact_nth_root(q.denom(), 4)?;
    Some(BigRational::new(n, d))
}

/// Approximates `q` as `m * 2^e` with `m` a float near 2^60.
fn split_f64(q: &BigRational) -> (f64, i64) {
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let e = nb - db - 60;
    let m = if e >= 0 {
        q.numer() / (q.denom() << (e as usize))
    } else {
        (q.numer() << ((-e) as usize)) / q.denom()
    };
    (m.to_f64().unwrap_or(f64::NAN), e)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl Surd {
    /// `coef * rad^(1/4)` for a positive rational radicand.
    pub fn term(coef: BigRational, rad: &BigRational) -> Result<Self, ScalarError> {
        if !rad.is_positive() {
            return Err(ScalarError::Parse(format!("radicand {rad} must be positive")));
        }
        let mut s = Surd::default();
        s.insert(coef, rad);
        Ok(s)
    }

    pub fn rational(q: &BigRational) -> Self {
        let mut s = Surd::default();
        s.insert_normalized(q.clone(), BigInt::one());
        s
    }

    pub fn from_integer(n: i64) -> Self {
        Surd::rational(&BigRational::from_integer(n.into()))
    }

    fn insert(&mut self, coef: BigRational, rad: &BigRational) {
        if coef.is_zero() {
            return;
        }
        let (mult, rad) = normalize_radicand(rad);
        self.insert_normalized(coef * mult, rad);
    }

    fn insert_normalized(&mut self, coef: BigRational, rad: BigInt) {
        if coef.is_zero() {
            return;
        }
        for i in 0..self.terms.len() {
            let scale = if self.terms[i].1 == rad {
                Some(BigRational::one())
            } else {
                fourth_power_ratio(&rad, &self.terms[i].1)
            };
            if let Some(t) = scale {
                self.terms[i].0 += coef * t;
                if self.terms[i].0.is_zero() {
                    self.terms.remove(i);
                }
                return;
            }
        }
        let at = self.terms.partition_point(|(_, r)| *r < rad);
        self.terms.insert(at, (coef, rad));
    }

    pub fn terms(&self) -> &[(BigRational, BigInt)] {
        &self.terms
    }

    /// The value as a rational, when it is one.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(c, r)] if r.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// Rational bounds on the value, each root resolved to `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (c, r) in &self.terms {
            let (rl, rh) = if r.is_one() {
                (BigRational::one(), BigRational::one())
            } else {
                fourth_root_bounds(r, bits)
            };
            if c.is_positive() {
                lo += c * rl;
                hi += c * rh;
            } else {
                lo += c * rh;
                hi += c * rl;
            }
        }
        (lo, hi)
    }

    /// Rigorous float enclosure of the value.
    pub fn to_interval(&self) -> Interval {
        if let Some(q) = self.to_rational() {
            return Interval::enclose(&q);
        }
        let bits = 64 + self.magnitude_bits();
        let (lo, hi) = self.enclosure(bits);
        Interval::enclose_range(&lo, &hi)
    }

    /// Bits needed so root enclosures resolve below the smallest term.
    fn magnitude_bits(&self) -> u32 {
        self.terms
            .iter()
            .map(|(c, _)| {
                let (_, e) = split_f64(c);
                (-(e + 60)).max(0) as u32
            })
            .max()
            .unwrap_or(0)
    }

    fn single(&self) -> Option<(&BigRational, &BigInt)> {
        match self.terms.as_slice() {
            [(c, r)] => Some((c, r)),
            _ => None,
        }
    }

    fn multi_term(&self, op: &str) -> ScalarError {
        ScalarError::Unsupported {
            op: format!("{op} of the multi-term value {self}"),
            regime: Regime::Rational,
        }
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).terms.is_empty()
    }
}

impl Eq for Surd {}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, r)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if r.is_one() {
                f.write_str(&format_rational(c))?;
            } else {
                write!(f, "{}*root4({})", format_rational(c), r)?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Surd {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Surd::default();
        for part in s.split(" + ") {
            let part = part.trim();
            match part.split_once("*root4(") {
                Some((c, r)) => {
                    let r = r
                        .strip_suffix(')')
                        .ok_or_else(|| ScalarError::Parse(part.to_string()))?;
                    let rad = parse_rational(r)?;
                    if !rad.is_positive() {
                        return Err(ScalarError::Parse(part.to_string()));
                    }
                    out.insert(parse_rational(c)?, &rad);
                }
                None => out.insert(parse_rational(part)?, &BigRational::one()),
            }
        }
        Ok(out)
    }
}

impl Add for Surd {
    type Output = Surd;

    fn add(mut self, rhs: Surd) -> Surd {
        for (c, r) in rhs.terms {
            self.insert_normalized(c, r);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;

    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;

    fn neg(mut self) -> Surd {
        for t in &mut self.terms {
            t.0 = -t.0.clone();
        }
        self
    }
}

impl Mul for Surd {
    type Output = Surd;

    fn mul(self, rhs: Surd) -> Surd {
        let mut out = Surd::default();
        for (c1, r1) in &self.terms {
            for (c2, r2) in &rhs.terms {
                let coef = c1 * c2;
                if r1.is_one() {
                    out.insert_normalized(coef, r2.clone());
                } else if r2.is_one() {
                    out.insert_normalized(coef, r1.clone());
                } else {
                    out.insert(coef, &BigRational::from_integer(r1 * r2));
                }
            }
        }
        out
    }
}

impl super::Field for Surd {
    const REGIME: Regime = Regime::Rational;

    fn zero() -> Self {
        Surd::default()
    }

    fn one() -> Self {
        Surd::rational(&<BigRational as One>::one())
    }

    fn from_rational(q: &BigRational) -> Self {
        Surd::rational(q)
    }

    fn pow_rational(base: u64, alpha: &BigRational) -> Result<Self, ScalarError> {
        let quarter = alpha * BigRational::from_integer(4.into());
        if !quarter.is_integer() {
            return Err(ScalarError::Unsupported {
                op: format!("{base}^({alpha})"),
                regime: Regime::Rational,
            });
        }
        // base^(q/4) = base^floor(q/4) * (base^(q mod 4))^(1/4)
        let q = quarter.numer();
        let four = BigInt::from(4);
        let whole = num_integer::Integer::div_floor(q, &four);
        let rest = q - &whole * &four;
        let coef = integer_power(base, &whole)?;
        let rad = integer_power(base, &rest)?;
        Surd::term(coef, &rad)
    }

    fn recip(&self) -> Result<Self, ScalarError> {
        if self.terms.is_empty() {
            return Err(ScalarError::DivisionByZero);
        }
        let (c, r) = self.single().ok_or_else(|| self.multi_term("reciprocal"))?;
        Surd::term(c.recip(), &BigRational::new(BigInt::one(), r.clone()))
    }

    fn sqrt(&self) -> Result<Self, ScalarError> {
        if self.terms.is_empty() {
            return Ok(Surd::zero());
        }
        let (c, r) = self.single().ok_or_else(|| self.multi_term("square root"))?;
        if Signed::is_negative(c) {
            return Err(ScalarError::NegativeSqrt);
        }
        // sqrt(c * r^(1/4)) = (c^2 * sqrt(r))^(1/4)
        let root = exact_sqrt(&BigRational::from_integer(r.clone())).ok_or_else(|| ScalarError::Unsupported {
            op: format!("square root of {self}"),
            regime: Regime::Rational,
        })?;
        Surd::term(<BigRational as One>::one(), &(c * c * root))
    }

    fn sign(&self) -> Option<Ordering> {
        if self.terms.is_empty() {
            return Some(Ordering::Equal);
        }
        if let Some((c, _)) = self.single() {
            return Some(if Signed::is_positive(c) { Ordering::Greater } else { Ordering::Less });
        }
        let mut bits = 64 + self.magnitude_bits();
        while bits <= 1 << 16 {
            let (lo, hi) = self.enclosure(bits);
            if Signed::is_positive(&lo) {
                return Some(Ordering::Greater);
            }
            if Signed::is_negative(&hi) {
                return Some(Ordering::Less);
            }
            bits *= 2;
        }
        None
    }

    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, r)| {
                let (m, e) = split_f64(c);
                if r.is_one() {
                    return ldexp(m, e);
                }
                let shift = ((r.bits() as i64 - 120).max(0) / 4) * 4;
                let rm = (r >> (shift as usize)).to_f64().unwrap_or(f64::NAN);
                ldexp(m * rm.powf(0.25), e + shift / 4)
            })
            .sum()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn from_json(v: &serde_json::Value) -> Result<Self, ScalarError> {
        match v {
            serde_json::Value::String(s) => s.parse(),
            serde_json::Value::Number(n) => Ok(Surd::rational(&parse_rational(&n.to_string())?)),
            other => Err(ScalarError::Parse(other.to_string())),
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn root4(n: i64) -> Surd {
        Surd::term(q(1, 1), &q(n, 1)).unwrap()
    }

    #[test]
    fn rationals_stay_rational() {
        let a = Surd::from_rational(&q(1, 3));
        let b = Surd::from_rational(&q(2, 5));
        assert_eq!((a.clone() * b.clone()).to_rational(), Some(q(2, 15)));
        assert_eq!((a - b).to_rational(), Some(q(-1, 15)));
    }

    #[test]
    fn roots_square_back() {
        let two = Surd::from_integer(2);
        let s = two.sqrt().unwrap();
        assert_eq!((s.clone() * s).to_rational(), Some(q(2, 1)));
        let r = root4(3);
        let r4 = r.clone() * r.clone() * r.clone() * r;
        assert_eq!(r4.to_rational(), Some(q(3, 1)));
    }

    #[test]
    fn like_terms_merge() {
        // 48^(1/4) = 2 * 3^(1/4)
        let x = root4(48) - Surd::from_integer(2) * root4(3);
        assert!(x.is_zero());
        // (3/16)^(1/4) = 3^(1/4) / 2
        let y = Surd::term(q(1, 1), &q(3, 16)).unwrap();
        assert_eq!(y * Surd::from_integer(2), root4(3));
    }

    #[test]
    fn sign_of_close_difference() {
        // 2^(1/4) - 1.189207 > 0 (2^(1/4) = 1.18920711...)
        let x = root4(2) - Surd::from_rational(&q(1_189_207, 1_000_000));
        assert_eq!(x.sign(), Some(Ordering::Greater));
        let y = root4(2) - Surd::from_rational(&q(1_189_208, 1_000_000));
        assert_eq!(y.sign(), Some(Ordering::Less));
    }

    #[test]
    fn reciprocal_and_sqrt_of_single_terms() {
        let r = Surd::from_integer(3) * root4(5);
        let inv = r.recip().unwrap();
        assert_eq!((inv * r).to_rational(), Some(q(1, 1)));
        let s = Surd::from_rational(&q(9, 4)).sqrt().unwrap();
        assert_eq!(s.to_rational(), Some(q(3, 2)));
        let sq = Surd::from_integer(6).sqrt().unwrap();
        assert!((sq.to_f64() - 6f64.sqrt()).abs() < 1e-14);
        let t = sq.sqrt().unwrap();
        assert!((t.to_f64() - 6f64.powf(0.25)).abs() < 1e-14);
        assert!(root4(2).sqrt().is_err());
        assert!((root4(2) + Surd::one()).recip().is_err());
    }

    #[test]
    fn text_round_trip() {
        let x = Surd::from_rational(&q(-7, 3)) + Surd::from_rational(&q(1, 2)) * root4(6) + root4(10);
        let back: Surd = x.to_string().parse().unwrap();
        assert_eq!(back, x);
        assert_eq!(Surd::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn float_value_of_large_radicands() {
        let big = Surd::term(q(1, 1), &BigRational::from_integer(BigInt::from(10).pow(400u32) * 7)).unwrap();
        let expected = 7f64.powf(0.25) * 1e100;
        assert!((big.to_f64() / expected - 1.0).abs() < 1e-12);
        let interval = big.to_interval();
        assert!(interval.lo() <= expected * (1.0 + 1e-12) && interval.hi() >= expected * (1.0 - 1e-12));
    }
}
