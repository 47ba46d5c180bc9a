use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rational bounds `lo <= q^(1/n) <= hi` with `hi - lo = 2^-bits`.
///
/// `q` must be nonnegative.
pub fn nth_root_enclosure(q: &BigRational, n: u32, bits: u32) -> (BigRational, BigRational) {
    assert!(!q.is_negative(), "root of a negative rational");
    assert!(n >= 1);
    if q.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let scale = BigInt::one() << (bits as usize);
    let scaled = (q.numer() << (n as usize * bits as usize)) / q.denom();
    let r = scaled.nth_root(n);
    let lo = BigRational::new(r.clone(), scale.clone());
    let exact = num_traits::Pow::pow(&r, n) == scaled
        && (q.numer() << (n as usize * bits as usize)) % q.denom() == BigInt::zero();
    if exact {
        return (lo.clone(), lo);
    }
    (lo, BigRational::new(r + 1u32, scale))
}

/// Rational bounds on `r^(1/4)` for a positive integer `r`.
pub fn fourth_root_bounds(r: &BigInt, bits: u32) -> (BigRational, BigRational) {
    nth_root_enclosure(&BigRational::from_integer(r.clone()), 4, bits)
}

/// Small moduli used to rule out perfect powers before taking a root.
const SIEVE_MODULI: [u32; 7] = [16, 9, 5, 13, 17, 29, 37];

/// Whether `r` is an `n`-th power residue modulo `m`.
pub(crate) fn is_power_residue(r: u32, n: u32, m: u32) -> bool {
    (0..m).any(|y| (y as u64).pow(n) % m as u64 == r as u64)
}

/// Cheap necessary test for `x` being a perfect `n`-th power.
pub(crate) fn may_be_power(x: &BigInt, n: u32) -> bool {
    SIEVE_MODULI.iter().all(|&m| {
        let r = (x % m).to_u32().unwrap_or(0);
        is_power_residue(r, n, m)
    })
}

/// Exact `n`-th root of a nonnegative integer when it exists.
pub(crate) fn exact_nth_root(x: &BigInt, n: u32) -> Option<BigInt> {
    if x.is_negative() || !may_be_power(x, n) {
        return None;
    }
    let r = x.nth_root(n);
    (num_traits::Pow::pow(&r, n) == *x).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclosure_brackets_root() {
        let q = BigRational::new(2.into(), 3.into());
        let (lo, hi) = nth_root_enclosure(&q, 3, 40);
        assert!(lo < hi);
        let cube = |x: &BigRational| x * x * x;
        assert!(cube(&lo) <= q && cube(&hi) >= q);
    }

    #[test]
    fn perfect_powers_are_points() {
        let q = BigRational::new(81.into(), 16.into());
        let (lo, hi) = nth_root_enclosure(&q, 4, 8);
        assert_eq!(lo, hi);
        assert_eq!(lo, BigRational::new(3.into(), 2.into()));
        assert_eq!(exact_nth_root(&BigInt::from(625), 4), Some(BigInt::from(5)));
        assert_eq!(exact_nth_root(&BigInt::from(626), 4), None);
    }
}
