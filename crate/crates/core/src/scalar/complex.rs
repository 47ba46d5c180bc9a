use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use super::{Field, ScalarError};

/// Complex number over a scalar regime.
#[derive(Clone, Debug, PartialEq)]
pub struct Cplx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Field> Cplx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cplx { re, im }
    }

    pub fn real(re: T) -> Self {
        Cplx { re, im: T::zero() }
    }

    pub fn zero() -> Self {
        Cplx::real(T::zero())
    }

    pub fn one() -> Self {
        Cplx::real(T::one())
    }

    pub fn from_rational(re: &BigRational) -> Self {
        Cplx::real(T::from_rational(re))
    }

    pub fn conj(&self) -> Self {
        Cplx {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> T {
        if self.im.is_zero() && self.im.width() == 0.0 {
            return self.re.square();
        }
        self.re.square() + self.im.square()
    }

    /// `|z|`; real values avoid the square root.
    pub fn abs(&self) -> Result<T, ScalarError> {
        if self.is_real() {
            return Ok(self.re.abs());
        }
        self.norm_sqr().sqrt()
    }

    /// Imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.im.is_zero() && self.im.width() == 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn vanishes_within(&self, tol: f64) -> bool {
        self.re.vanishes_within(tol) && self.im.vanishes_within(tol)
    }

    pub fn scale(&self, k: &T) -> Self {
        Cplx {
            re: self.re.clone() * k.clone(),
            im: self.im.clone() * k.clone(),
        }
    }

    pub fn recip(&self) -> Result<Self, ScalarError> {
        if self.is_real() {
            return Ok(Cplx::real(self.re.recip()?));
        }
        let n = self.norm_sqr().recip()?;
        Ok(self.conj().scale(&n))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        if rhs.is_real() {
            let r = rhs.re.recip()?;
            return Ok(self.scale(&r));
        }
        Ok(self.clone() * rhs.recip()?)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// `{"re": .., "im": ..}`, or the bare real part when real.
    pub fn to_json(&self) -> serde_json::Value {
        if self.is_real() {
            self.re.to_json()
        } else {
            serde_json::json!({ "re": self.re.to_json(), "im": self.im.to_json() })
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ScalarError> {
        match v.as_object() {
            Some(obj) if obj.contains_key("re") => {
                let re = T::from_json(&obj["re"])?;
                let im = match obj.get("im") {
                    Some(im) => T::from_json(im)?,
                    None => T::zero(),
                };
                Ok(Cplx { re, im })
            }
            _ => Ok(Cplx::real(T::from_json(v)?)),
        }
    }
}

impl<T: Field> fmt::Display for Cplx<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({}) + ({})i", self.re, self.im)
        }
    }
}

impl<T: Field> Add for Cplx<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Cplx {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<T: Field> Sub for Cplx<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Cplx {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl<T: Field> Neg for Cplx<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Cplx {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<T: Field> Mul for Cplx<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        match (self.is_real(), rhs.is_real()) {
            (true, true) => Cplx::real(self.re * rhs.re),
            (true, false) => rhs.scale(&self.re),
            (false, true) => self.scale(&rhs.re),
            (false, false) => Cplx {
                re: self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
                im: self.re * rhs.im + self.im * rhs.re,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn arithmetic_matches_hand_values() {
        let a = Cplx::new(q(1), q(2));
        let b = Cplx::new(q(3), q(-1));
        let p = a.clone() * b.clone();
        assert_eq!((p.re.clone(), p.im.clone()), (q(5), q(5)));
        assert_eq!(a.norm_sqr(), q(5));
        let back = p.div(&b).unwrap();
        assert_eq!((back.re, back.im), (q(1), q(2)));
        assert_eq!(a.conj().im, q(-2));
    }

    #[test]
    fn json_forms() {
        let r: Cplx<BigRational> = Cplx::real(q(3));
        assert_eq!(r.to_json(), serde_json::json!("3"));
        let z = Cplx::new(q(1), q(-1));
        let back = Cplx::<BigRational>::from_json(&z.to_json()).unwrap();
        assert_eq!((back.re, back.im), (q(1), q(-1)));
    }
}
