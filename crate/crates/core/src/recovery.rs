//! Explicit generator coefficients from a point of the reduced problem.

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::model::{compute_a, GeneratorPair, ModelError};
use crate::pattern::DegreePattern;
use crate::reduction::{
    b1_from, compute_c, objective_b0, objective_b2, optimal_z1, split_e, z3_denominator, Constants, ReducedSystem,
    ReductionError,
};
use crate::scalar::{rationalize, Cplx, Field, ScalarError};
use crate::weights::{WeightError, WeightSource};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecoveryError {
    #[error("degenerate recovery: {0}")]
    Degenerate(String),
    #[error("registers too large: condition fails, admissible |a_4| = |b_5| below {max_register:e}")]
    RegisterTooLarge { max_register: f64 },
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Free parameters of the reduced problem.
#[derive(Clone, Debug)]
pub struct SearchPoint<T> {
    /// `d_i = |a_i|^2`.
    pub d: [T; 4],
    pub z3: Cplx<T>,
    pub z1: T,
    pub a15: Cplx<T>,
}

/// Derived values at a search point.
#[derive(Clone, Debug)]
pub struct PointSummary<T> {
    pub constants: Constants<T>,
    pub z3_denominator: T,
    pub e0: T,
    pub e1: T,
    pub b0: T,
    pub b1: T,
    pub b2: T,
}

/// `|A_15| = sqrt(Z_1 / |C_1 Z_3 - C_3/2|)`, which makes `|A_15 A_12| = 1`.
pub fn choose_a15<T: Field>(c: &Constants<T>, z3: &Cplx<T>, z1: &T) -> Result<T, RecoveryError> {
    let den = z3_denominator(c, z3)?;
    Ok(z1.div(&den)?.sqrt()?)
}

/// The point with `Z_1` at the minimiser of `B_0` and `A_15` normalised.
pub fn optimal_point<T: Field>(
    rs: &ReducedSystem<T>,
    d: [T; 4],
    z3: Cplx<T>,
) -> Result<(SearchPoint<T>, PointSummary<T>), RecoveryError> {
    build_point(rs, d, z3, None)
}

/// `optimal_point` with `A_15` rounded to `digits` significant digits and
/// `Z_1 = |C_1 Z_3 - C_3/2| A_15^2` next to the minimiser.
///
/// `B_0` is flat near its minimiser, so rounding costs almost nothing while
/// keeping `Z_1` and `A_15` rational and `|A_15 A_12| = 1` exact.
pub fn rounded_point<T: Field>(
    rs: &ReducedSystem<T>,
    d: [T; 4],
    z3: Cplx<T>,
    digits: usize,
) -> Result<(SearchPoint<T>, PointSummary<T>), RecoveryError> {
    build_point(rs, d, z3, Some(digits))
}

fn build_point<T: Field>(
    rs: &ReducedSystem<T>,
    d: [T; 4],
    z3: Cplx<T>,
    digits: Option<usize>,
) -> Result<(SearchPoint<T>, PointSummary<T>), RecoveryError> {
    let round_float = |x: f64| -> Result<T, RecoveryError> {
        Ok(T::from_rational(&rationalize(x, digits.unwrap_or(17))?))
    };
    let c = compute_c(rs, &d)?;
    let (e0, e1) = split_e(&c, &z3)?;
    let den = z3_denominator(&c, &z3)?;
    // Roots are taken in floats when the result is rounded anyway.
    let (z1, a15) = match digits {
        None => {
            let z1 = optimal_z1(&e0, &e1)?;
            let a15 = choose_a15(&c, &z3, &z1)?;
            (z1, a15)
        }
        Some(_) => {
            // Z_1 = den * A_15^2 keeps |A_15 A_12| = 1 with a rational A_15.
            let z1 = (e0.to_f64() / e1.to_f64()).sqrt();
            let a15 = round_float((z1 / den.to_f64()).sqrt())?;
            (den.clone() * a15.square(), a15)
        }
    };
    let b0 = objective_b0(&c, &z3, &z1)?;
    let b1 = b1_from(&c)?;
    let b2 = objective_b2(rs, &d)?;
    let summary = PointSummary {
        z3_denominator: den,
        constants: c,
        e0,
        e1,
        b0,
        b1,
        b2,
    };
    let point = SearchPoint {
        d,
        z3,
        z1,
        a15: Cplx::real(a15),
    };
    Ok((point, summary))
}

/// Real `Z_3 = -sign(C_3) m` with `C_5 / |C_1 Z_3 - C_3/2|^2 < (1 - B_1)/2`.
///
/// `m` is rounded up to one significant digit. With `B_1 < 1` this keeps
/// `B_0 = sqrt(B_1 (1 + C_5/|C_1 Z_3 - C_3/2|^2)) < 1` at the optimal `Z_1`.
pub fn default_z3<T: Field>(c: &Constants<T>) -> Result<BigRational, RecoveryError> {
    let b1 = b1_from(c)?.to_f64();
    let (c1, c3, c5) = (c.c1.to_f64(), c.c3.to_f64(), c.c5.to_f64());
    let slack = if b1 < 1.0 { 1.0 - b1 } else { 1.0 };
    let needed = ((2.0 * c5 / slack).sqrt() - c3.abs() / 2.0) / c1;
    let m = needed.max(c3.abs() / (2.0 * c1)).max(f64::MIN_POSITIVE);
    let rounded = round_up_one_digit(m);
    let m = rationalize(rounded, 1)?;
    Ok(if c3 > 0.0 { -m } else { m })
}

fn round_up_one_digit(x: f64) -> f64 {
    let scale = 10f64.powi(x.log10().floor() as i32);
    let lead = (x / scale).ceil();
    // Guard against the division landing just below an integer.
    let v = lead * scale;
    if v < x {
        (lead + 1.0) * scale
    } else {
        v
    }
}

/// All generator coefficients.
#[derive(Clone, Debug)]
pub struct RecoveredParameters<T> {
    pub point: SearchPoint<T>,
    pub a_low: [Cplx<T>; 4],
    pub a_high: [Cplx<T>; 4],
    pub b_low: [Cplx<T>; 4],
    pub a_reg: Cplx<T>,
    pub b_reg: Cplx<T>,
}

impl<T: Field> RecoveredParameters<T> {
    pub fn generator_pair(&self) -> GeneratorPair<T> {
        GeneratorPair {
            a_low: self.a_low.clone(),
            a_reg: self.a_reg.clone(),
            a_high: self.a_high.clone(),
            b_low: self.b_low.clone(),
            b_reg: self.b_reg.clone(),
        }
    }

    /// Divides `F_2` by the power of ten at or below its largest coefficient
    /// magnitude. The spanned subspace and `c` are unchanged, while interval
    /// enclosures of the `F_2` inner products shrink by the same factor.
    pub fn with_unit_f2(&self) -> Result<(Self, i32), RecoveryError> {
        let largest = self
            .b_low
            .iter()
            .chain(std::iter::once(&self.b_reg))
            .map(|b| {
                let (re, im) = b.to_f64_pair();
                re.hypot(im)
            })
            .fold(0.0, f64::max);
        if !(largest > 0.0 && largest.is_finite()) {
            return Err(RecoveryError::Degenerate("F_2 has no finite nonzero coefficient".into()));
        }
        let exponent = largest.log10().floor() as i32;
        let ten = BigRational::from_integer(10.into());
        let factor = T::from_rational(&num_traits::pow::Pow::pow(ten, -exponent));
        let mut scaled = self.clone();
        for b in scaled.b_low.iter_mut().chain(std::iter::once(&mut scaled.b_reg)) {
            *b = b.scale(&factor);
        }
        Ok((scaled, exponent))
    }
}

/// Solves the inverse system for `a_{k+i}` and `b_i`, registers left at zero.
pub fn recover<T: Field>(point: &SearchPoint<T>, rs: &ReducedSystem<T>) -> Result<RecoveredParameters<T>, RecoveryError> {
    for (i, di) in point.d.iter().enumerate() {
        if !di.is_positive() {
            return Err(RecoveryError::Degenerate(format!("d_{i} is not positive")));
        }
    }
    if !point.z1.is_positive() {
        return Err(RecoveryError::Degenerate("Z_1 is not positive".into()));
    }
    if point.a15.is_zero() {
        return Err(RecoveryError::Degenerate("A_15 vanishes".into()));
    }
    let a: Vec<T> = point.d.iter().map(|d| d.sqrt()).collect::<Result<_, _>>()?;
    let z1 = Cplx::real(point.z1.clone());
    let scale = point.a15.conj().div(&z1)?;
    let mut a_high = Vec::with_capacity(4);
    let mut b_low = Vec::with_capacity(4);
    a_high.push(z1.div(&Cplx::real(a[0].clone()))?);
    b_low.push((point.a15.clone() * point.z3.clone()).conj().div(&z1)?.scale(&a[0]));
    for i in 1..4 {
        let e = &rs.e[i - 1];
        if !(e.is_positive() || e.is_negative()) {
            return Err(ReductionError::DegenerateReduction { index: i }.into());
        }
        a_high.push(Cplx::real(e.clone() * point.z1.clone()).div(&Cplx::real(a[i].clone()))?);
        let ratio = rs.g[i - 1].div(e)?;
        let shifted = point.z3.conj() + Cplx::real(ratio);
        b_low.push((scale.clone() * shifted).scale(&a[i]));
    }
    let arr = |v: Vec<Cplx<T>>| -> [Cplx<T>; 4] { v.try_into().unwrap_or_else(|_| unreachable!()) };
    Ok(RecoveredParameters {
        point: point.clone(),
        a_low: std::array::from_fn(|i| Cplx::real(a[i].clone())),
        a_high: arr(a_high),
        b_low: arr(b_low),
        a_reg: Cplx::zero(),
        b_reg: Cplx::zero(),
    })
}

/// Outcome of attaching the register coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct RegisterReport {
    /// `|A_15 A_12| - (A_13 A_14 - |A_12|^2)` after attachment, as a float.
    pub margin: f64,
    /// Largest common `|a_4| = |b_5|` keeping the strict inequality.
    pub max_register: f64,
}

/// Strict `A_13 A_14 - |A_12|^2 < |A_15 A_12|`, decided without square roots.
pub fn gap_below_product<T: Field>(a13: &T, a14: &T, a12: &Cplx<T>, a15: &Cplx<T>) -> Option<bool> {
    let lhs = a13.clone() * a14.clone() - a12.norm_sqr();
    if lhs.is_negative() {
        return Some(true);
    }
    let rhs_sq = a15.norm_sqr() * a12.norm_sqr();
    match lhs.sign()? {
        std::cmp::Ordering::Less => Some(true),
        _ => lhs.square().lt(&rhs_sq),
    }
}

/// Sets `a_4`, `b_5` and re-checks the strict inequality.
pub fn attach_register<T: Field, W: WeightSource<T> + ?Sized>(
    params: &RecoveredParameters<T>,
    a4: Cplx<T>,
    b5: Cplx<T>,
    weights: &W,
    pattern: &DegreePattern,
) -> Result<(RecoveredParameters<T>, RegisterReport), RecoveryError> {
    if a4.is_zero() || b5.is_zero() {
        return Err(RecoveryError::Degenerate("registers must be nonzero".into()));
    }
    let bare = compute_a(&params.generator_pair(), pattern, weights, 1)?;
    let mut out = params.clone();
    out.a_reg = a4;
    out.b_reg = b5;
    let with = compute_a(&out.generator_pair(), pattern, weights, 1)?;
    let w4: T = weights.weight_at(pattern.k() + pattern.gamma()[4])?;
    let w5: T = weights.weight_at(pattern.k() + pattern.gamma()[5])?;
    let max_register = register_bound(
        bare.a3.to_f64(),
        bare.a4.to_f64(),
        bare.a2.norm_sqr().to_f64(),
        bare.a5.norm_sqr().to_f64(),
        w4.to_f64(),
        w5.to_f64(),
    );
    let gap = with.a3.to_f64() * with.a4.to_f64() - with.a2.norm_sqr().to_f64();
    let product = (with.a5.norm_sqr().to_f64() * with.a2.norm_sqr().to_f64()).sqrt();
    let report = RegisterReport {
        margin: product - gap,
        max_register,
    };
    match gap_below_product(&with.a3, &with.a4, &with.a2, &with.a5) {
        Some(true) => Ok((out, report)),
        _ => Err(RecoveryError::RegisterTooLarge { max_register }),
    }
}

/// Largest `rho` with `a_4 = b_5 = rho` keeping the strict inequality.
///
/// With `u = rho^2` the condition reads
/// `w4 w5 u^2 + (A13 w5 + A14 w4) u + (A13 A14 - |A12|^2 - |A15 A12|) < 0`.
fn register_bound(a13: f64, a14: f64, a12_sq: f64, a15_sq: f64, w4: f64, w5: f64) -> f64 {
    let qa = w4 * w5;
    let qb = a13 * w5 + a14 * w4;
    let qc = a13 * a14 - a12_sq - (a15_sq * a12_sq).sqrt();
    if qc >= 0.0 {
        return 0.0;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    // Stable positive root of the quadratic.
    let u = -2.0 * qc / (qb + disc.sqrt());
    u.sqrt()
}

/// One line of the parameter table.
#[derive(Clone, Debug, Serialize)]
pub struct ParameterRow {
    pub name: String,
    pub computed: f64,
}

/// Named float values of every recovered quantity, in bootstrap order.
pub fn parameter_rows<T: Field>(summary: &PointSummary<T>, params: &RecoveredParameters<T>) -> Vec<ParameterRow> {
    let c = &summary.constants;
    let den = summary.z3_denominator.to_f64();
    let mut rows = vec![
        ("C_4", c.c4.to_f64()),
        ("C_2", c.c2.to_f64()),
        ("C_1", c.c1.to_f64()),
        ("C_3", c.c3.to_f64()),
        ("Z_3", params.point.z3.re.to_f64()),
        ("|C_1 Z_3 - C_3/2|", den),
        ("C_5", c.c5.to_f64()),
        ("C_5/|C_1 Z_3 - C_3/2|^2", c.c5.to_f64() / (den * den)),
        ("B_0^2", summary.b0.to_f64().powi(2)),
        ("B_0", summary.b0.to_f64()),
        ("e_0", summary.e0.to_f64()),
        ("e_1", summary.e1.to_f64()),
        ("Z_1", params.point.z1.to_f64()),
        ("A_15", params.point.a15.re.to_f64()),
    ]
    .into_iter()
    .map(|(n, v)| (n.to_string(), v))
    .collect::<Vec<_>>();
    let labels = ["a_k", "a_{k+1}", "a_{k+2}", "a_{k+3}"];
    for (label, a) in labels.iter().zip(&params.a_high) {
        rows.push((label.to_string(), a.re.to_f64()));
    }
    for (i, b) in params.b_low.iter().enumerate() {
        rows.push((format!("b_{i}"), b.re.to_f64()));
    }
    rows.into_iter().map(|(name, computed)| ParameterRow { name, computed }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{reduce, with_unit_d0};
    use crate::scalar::Surd;
    use crate::weights::WeightSequence;

    fn reference_point(digits: Option<usize>) -> (ReducedSystem<Surd>, SearchPoint<Surd>, PointSummary<Surd>) {
        let seq = WeightSequence::dirichlet_int(-16);
        let rs: ReducedSystem<Surd> = reduce(&seq, &DegreePattern::standard(6).unwrap()).unwrap();
        let d = with_unit_d0([Surd::one(), Surd::from_integer(4), Surd::from_integer(6)]);
        let z3 = Cplx::real(Surd::from_integer(-20_000_000_000_000));
        let (point, summary) = match digits {
            Some(n) => rounded_point(&rs, d, z3, n).unwrap(),
            None => optimal_point(&rs, d, z3).unwrap(),
        };
        (rs, point, summary)
    }

    #[test]
    fn recovered_values_match_reference() {
        let (rs, point, _) = reference_point(None);
        let params = recover(&point, &rs).unwrap();
        let high: Vec<f64> = params.a_high.iter().map(|a| a.re.to_f64()).collect();
        let expect = [6.1296, -100.371, 201.157, -183.575];
        for (h, e) in high.iter().zip(expect) {
            assert!((h / e - 1.0).abs() < 1e-4, "{h} vs {e}");
        }
        assert!((point.a15.re.to_f64() - 2.378137597620704).abs() < 1e-9);
        let (_, rounded, _) = reference_point(Some(8));
        assert!((rounded.z1.to_f64() / point.z1.to_f64() - 1.0).abs() < 1e-7);
        let b0 = params.b_low[0].re.to_f64();
        assert!((b0 / -7.7595e12 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn recovered_pair_satisfies_equalities() {
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let (rs, point, summary) = reference_point(Some(8));
        let params = recover(&point, &rs).unwrap();
        let pair = params.generator_pair();
        let a1 = compute_a(&pair, &p, &seq, 1).unwrap();
        let a2 = compute_a(&pair, &p, &seq, 2).unwrap();
        let a3 = compute_a(&pair, &p, &seq, 3).unwrap();
        assert!(a1.a1.is_zero() && a2.a1.is_zero() && a3.a1.is_zero());
        assert!(a2.a5.is_zero() && a3.a5.is_zero());
        assert_eq!(a1.a5.re, point.a15.re);
        let c = &summary.constants;
        let z1 = &point.z1;
        assert_eq!(a1.a3, c.c1.clone() + z1.square() * c.c2.clone());
        assert_eq!((a1.a5.clone() * a1.a2.clone()).norm_sqr(), Surd::one());
        assert_eq!(a1.a3.clone() * a1.a4.clone() - a1.a2.norm_sqr(), summary.b0);
        assert!(summary.b0.lt(&Surd::one()).unwrap());
    }

    #[test]
    fn registers_keep_the_inequality() {
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let (rs, point, _) = reference_point(Some(8));
        let params = recover(&point, &rs).unwrap();
        let one = Cplx::real(Surd::one());
        let (attached, report) = attach_register(&params, one.clone(), one, &seq, &p).unwrap();
        assert!(attached.generator_pair().is_register_attached());
        assert!(report.margin > 0.0);
        assert!(report.max_register > 1.0);
        let huge = Cplx::real(Surd::from_integer(10_000_000_000_000_000));
        assert!(matches!(
            attach_register(&params, huge.clone(), huge, &seq, &p),
            Err(RecoveryError::RegisterTooLarge { .. })
        ));
    }

    #[test]
    fn margin_rule_rounds_up() {
        let (_, _, summary) = reference_point(Some(8));
        let z3 = default_z3(&summary.constants).unwrap();
        assert_eq!(z3, BigRational::from_integer((-30_000_000_000_000i64).into()));
        assert_eq!(round_up_one_digit(2.01e13), 3e13);
        assert_eq!(round_up_one_digit(7.0), 7.0);
    }

    #[test]
    fn zero_a15_is_rejected() {
        let (rs, mut point, _) = reference_point(Some(8));
        point.a15 = Cplx::zero();
        assert!(matches!(recover(&point, &rs), Err(RecoveryError::Degenerate(_))));
    }
}
