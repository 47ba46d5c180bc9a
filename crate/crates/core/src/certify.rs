//! Reduction-independent verification of the four sufficient conditions.
//!
//! A certificate is computed from raw coefficients and weights only. It
//! embeds every weight it used, so it can be re-checked from its own data.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::model::{compute_a, construct_f3, orthogonality_residuals, AQuantities, GeneratorPair, ModelError};
use crate::pattern::{DegreePattern, PatternError};
use crate::recovery::{gap_below_product, RecoveredParameters, SearchPoint};
use crate::reduction::{compute_c, objective_b0, z3_denominator, ReducedSystem, ReductionError};
use crate::scalar::{Cplx, Field, Interval, Regime, ScalarError, Surd};
use crate::weights::{WeightError, WeightSequence, WeightSource, WeightSpec};

pub const CERTIFICATE_VERSION: u32 = 1;

/// Relative width below which an interval enclosing zero counts as zero.
pub const EQUALITY_TOLERANCE: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("unsupported certificate version {0}")]
    Version(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Every condition held but the arithmetic cannot certify, or a strict
    /// inequality could not be decided.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// The four conditions. `None` means undecided in the chosen arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conditions {
    /// `A_21 = A_31 = A_25 = A_35 = 0`.
    pub shifted_orthogonal: Option<bool>,
    /// `A_11 = 0`.
    pub first_orthogonal: Option<bool>,
    /// `A_15 A_12 != 0`.
    pub nondegenerate: Option<bool>,
    /// `A_13 A_14 - |A_12|^2 < |A_15 A_12|`.
    pub gap_bounded: Option<bool>,
}

impl Conditions {
    fn all(&self) -> [Option<bool>; 4] {
        [self.shifted_orthogonal, self.first_orthogonal, self.nondegenerate, self.gap_bounded]
    }
}

/// One equality test with the evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityCheck {
    pub quantity: String,
    pub value: Value,
    /// Enclosure width, zero for point arithmetic.
    pub width: f64,
    pub contains_zero: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AEntry {
    #[serde(rename = "A1")]
    pub a1: Value,
    #[serde(rename = "A2")]
    pub a2: Value,
    #[serde(rename = "A3")]
    pub a3: Value,
    #[serde(rename = "A4")]
    pub a4: Value,
    #[serde(rename = "A5")]
    pub a5: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub weights: WeightSpec,
    pub k: u64,
    pub gamma: [u64; 6],
    pub regime: Regime,
    /// Registers not attached; the generators may be dependent.
    pub core_only: bool,
    pub s_max: u64,
    /// `{"a": {degree: value}, "b": {degree: value}}`.
    pub coefficients: Value,
    /// Every weight that entered a computation, by index.
    pub weights_used: BTreeMap<u64, Value>,
    #[serde(rename = "A")]
    pub a: BTreeMap<u64, AEntry>,
    pub conditions: Conditions,
    pub equalities: Vec<EqualityCheck>,
    /// `(A_13 A_14 - |A_12|^2) / |A_15 A_12|`; absent when the arithmetic
    /// cannot form the square root exactly.
    pub c: Option<Value>,
    pub c_float: f64,
    /// `F_3` orthogonal to `z^{ks} F_1`, `z^{ks} F_2` for `s = 1..s_max`.
    pub f3_orthogonal: Option<bool>,
    pub tolerance: f64,
    pub warnings: Vec<String>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn pattern(&self) -> Result<DegreePattern, CertifyError> {
        Ok(DegreePattern::new(self.k, self.gamma)?)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }

    pub fn from_json(v: &Value) -> Result<Self, CertifyError> {
        let cert: Certificate = serde_json::from_value(v.clone()).map_err(|e| CertifyError::Malformed(e.to_string()))?;
        if cert.version != CERTIFICATE_VERSION {
            return Err(CertifyError::Version(cert.version));
        }
        Ok(cert)
    }
}

fn equality<T: Field>(quantity: &str, x: &Cplx<T>, tol: f64) -> EqualityCheck {
    let width = x.re.width().max(x.im.width());
    EqualityCheck {
        quantity: quantity.to_string(),
        value: x.to_json(),
        width,
        contains_zero: x.is_zero(),
        holds: x.vanishes_within(tol) && (width == 0.0 || width < tol),
    }
}

/// Weight indices touched by `A_{s,r}` for `s <= s_max` and by `F_3`.
fn used_indices(pair_degrees: &[u64], k: u64, s_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..=s_max + 1)
        .flat_map(|s| pair_degrees.iter().map(move |d| d + k * s))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn pair_degrees(pattern: &DegreePattern) -> Vec<u64> {
    let g = pattern.gamma();
    let k = pattern.k();
    let mut d: Vec<u64> = g.to_vec();
    d.extend((0..4).map(|i| k + g[i]));
    d
}

/// Recomputes every `A_{s,r}` and decides the four conditions.
pub fn verify<T: Field, W: WeightSource<T> + ?Sized>(
    pair: &GeneratorPair<T>,
    pattern: &DegreePattern,
    weights: &W,
    spec: &WeightSpec,
    s_max: u64,
) -> Result<Certificate, CertifyError> {
    let s_max = s_max.max(3);
    let quantities: Vec<AQuantities<T>> = (1..=s_max)
        .map(|s| compute_a(pair, pattern, weights, s))
        .collect::<Result<_, _>>()?;
    let q1 = &quantities[0];
    let tol = EQUALITY_TOLERANCE * q1.a3.to_f64().abs().max(1.0);

    let mut warnings = Vec::new();
    let core_only = !pair.is_register_attached();
    if core_only {
        warnings.push("registers a_4, b_5 are not both attached; certificate is core-only".to_string());
    }

    let named = |name: &str, s: usize, x: &Cplx<T>| equality(&format!("A_{{{s},{name}}}"), x, tol);
    let shifted = vec![
        named("1", 2, &quantities[1].a1),
        named("1", 3, &quantities[2].a1),
        named("5", 2, &quantities[1].a5),
        named("5", 3, &quantities[2].a5),
    ];
    let first = named("1", 1, &q1.a1);
    let shifted_orthogonal = Some(shifted.iter().all(|c| c.holds));
    let first_orthogonal = Some(first.holds);

    let product_sq = (q1.a5.clone() * q1.a2.clone()).norm_sqr();
    let nondegenerate = match product_sq.sign() {
        Some(std::cmp::Ordering::Greater) => Some(true),
        Some(_) => Some(false),
        None => None,
    };
    let gap_bounded = gap_below_product(&q1.a3, &q1.a4, &q1.a2, &q1.a5);

    let gap = q1.a3.clone() * q1.a4.clone() - q1.a2.norm_sqr();
    let c = product_sq.sqrt().ok().and_then(|p| gap.div(&p).ok());
    let c_float = gap.to_f64() / product_sq.to_f64().sqrt();
    if !gap.is_positive() {
        warnings.push("A_13 A_14 - |A_12|^2 is not positive; the generators are dependent".to_string());
    }

    for q in quantities.iter().skip(3) {
        for (name, x) in [("1", &q.a1), ("5", &q.a5)] {
            if !x.vanishes_within(tol) {
                warnings.push(format!("A_{{{},{name}}} = {:.6e} is nonzero", q.s, x.re.to_f64()));
            }
        }
    }

    let mut equalities = shifted;
    equalities.insert(0, first);

    let conditions = Conditions { shifted_orthogonal, first_orthogonal, nondegenerate, gap_bounded };
    let f3_orthogonal = if conditions.all().iter().all(|c| *c == Some(true)) {
        let f3 = construct_f3(pair, pattern, weights, tol)?;
        let residuals = orthogonality_residuals(&f3, pair, pattern, weights, s_max)?;
        let ok = residuals.iter().all(|(_, _, r)| r.vanishes_within(tol));
        if !ok {
            warnings.push("F_3 is not orthogonal to every shifted generator".to_string());
        }
        Some(ok)
    } else {
        None
    };

    let verdict = decide(T::REGIME, &conditions, f3_orthogonal);
    if T::REGIME == Regime::Float && verdict == Verdict::Inconclusive {
        warnings.push("floating-point arithmetic cannot certify".to_string());
    }

    let mut weights_used = BTreeMap::new();
    for t in used_indices(&pair_degrees(pattern), pattern.k(), s_max) {
        weights_used.insert(t, weights.weight_at(t)?.to_json());
    }
    let coefficients = {
        let full = pair.to_json(pattern);
        serde_json::json!({ "a": full["a"], "b": full["b"] })
    };
    let a = quantities
        .iter()
        .map(|q| {
            let entry = AEntry {
                a1: q.a1.to_json(),
                a2: q.a2.to_json(),
                a3: q.a3.to_json(),
                a4: q.a4.to_json(),
                a5: q.a5.to_json(),
            };
            (q.s, entry)
        })
        .collect();

    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        weights: spec.clone(),
        k: pattern.k(),
        gamma: pattern.gamma(),
        regime: T::REGIME,
        core_only,
        s_max,
        coefficients,
        weights_used,
        a,
        conditions,
        equalities,
        c: c.map(|c| c.to_json()),
        c_float,
        f3_orthogonal,
        tolerance: tol,
        warnings,
        verdict,
    })
}

fn decide(regime: Regime, conditions: &Conditions, f3_orthogonal: Option<bool>) -> Verdict {
    let all = conditions.all();
    if all.contains(&Some(false)) || f3_orthogonal == Some(false) {
        return Verdict::Fail;
    }
    if all.contains(&None) || regime == Regime::Float {
        return Verdict::Inconclusive;
    }
    Verdict::Pass
}

/// `verify` with weights taken from a sequence.
pub fn verify_sequence<T: Field>(
    pair: &GeneratorPair<T>,
    pattern: &DegreePattern,
    seq: &WeightSequence,
    s_max: Option<u64>,
) -> Result<Certificate, CertifyError> {
    let s_max = s_max.unwrap_or_else(|| pattern.default_s_max());
    verify(pair, pattern, seq, seq.spec(), s_max)
}

/// Certificate for recovered parameters, registers included.
pub fn verify_recovered<T: Field>(
    params: &RecoveredParameters<T>,
    pattern: &DegreePattern,
    seq: &WeightSequence,
) -> Result<Certificate, CertifyError> {
    verify_sequence(&params.generator_pair(), pattern, seq, None)
}

/// Outcome of re-checking a stored certificate.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub recorded: Verdict,
    /// Verdict recomputed with weights from the stored weight description.
    pub from_spec: Verdict,
    /// Verdict recomputed with the embedded weight table only.
    pub from_embedded: Verdict,
    pub mismatches: Vec<String>,
}

impl CheckReport {
    pub fn consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-derives a certificate twice and compares against what it records.
pub fn check_certificate(v: &Value) -> Result<CheckReport, CertifyError> {
    let cert = Certificate::from_json(v)?;
    match cert.regime {
        Regime::Rational => check_in::<Surd>(&cert),
        Regime::Interval => check_in::<Interval>(&cert),
        Regime::Float => check_in::<f64>(&cert),
    }
}

fn check_in<T: Field>(cert: &Certificate) -> Result<CheckReport, CertifyError> {
    let pattern = cert.pattern()?;
    let seq = WeightSequence::from_spec(cert.weights.clone())?;
    let mut pair_json = cert.coefficients.clone();
    if let Value::Object(m) = &mut pair_json {
        m.insert("k".into(), cert.k.into());
        m.insert("gamma".into(), serde_json::to_value(cert.gamma).unwrap_or(Value::Null));
    }
    let (_, pair) = GeneratorPair::<T>::from_json(&pair_json)?;
    let embedded: BTreeMap<u64, T> = cert
        .weights_used
        .iter()
        .map(|(t, w)| Ok((*t, T::from_json(w)?)))
        .collect::<Result<_, ScalarError>>()?;

    let mut mismatches = Vec::new();
    for (t, w) in &embedded {
        let fresh: T = seq.weight(*t)?;
        if fresh.to_json() != w.to_json() {
            mismatches.push(format!("embedded weight {t} differs from the weight description"));
        }
    }
    let from_spec = verify(&pair, &pattern, &seq, &cert.weights, cert.s_max)?;
    let from_embedded = verify(&pair, &pattern, &embedded, &cert.weights, cert.s_max)?;
    for (label, fresh) in [("weight description", &from_spec), ("embedded weights", &from_embedded)] {
        if fresh.verdict != cert.verdict {
            mismatches.push(format!("{label}: verdict {} but recorded {}", fresh.verdict, cert.verdict));
        }
        if fresh.conditions != cert.conditions {
            mismatches.push(format!("{label}: conditions differ from the recorded ones"));
        }
        if fresh.a != cert.a {
            mismatches.push(format!("{label}: A quantities differ from the recorded ones"));
        }
        if fresh.c != cert.c {
            mismatches.push(format!("{label}: c differs from the recorded value"));
        }
    }
    Ok(CheckReport {
        recorded: cert.verdict,
        from_spec: from_spec.verdict,
        from_embedded: from_embedded.verdict,
        mismatches,
    })
}

/// A reduction-path value that disagrees with its direct computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub identity: String,
    pub magnitude: f64,
}

/// Compares reduction-path values with direct recomputation.
///
/// Registers are removed first since the reduced formulas describe the
/// core generators.
pub fn cross_check<T: Field, W: WeightSource<T> + ?Sized>(
    point: &SearchPoint<T>,
    rs: &ReducedSystem<T>,
    params: &RecoveredParameters<T>,
    weights: &W,
    pattern: &DegreePattern,
) -> Result<Vec<Discrepancy>, CertifyError> {
    let mut core = params.generator_pair();
    core.a_reg = Cplx::zero();
    core.b_reg = Cplx::zero();
    let q: Vec<AQuantities<T>> = (1..=3)
        .map(|s| compute_a(&core, pattern, weights, s))
        .collect::<Result<_, _>>()?;
    let tol = EQUALITY_TOLERANCE * q[0].a3.to_f64().abs().max(1.0);
    let c = compute_c(rs, &point.d)?;
    let z1 = &point.z1;
    let z1_sq = z1.square();
    let a15_sq = point.a15.norm_sqr();
    let den = z3_denominator(&c, &point.z3)?;
    let quad = c.c1.clone() * point.z3.norm_sqr() - c.c3.clone() * point.z3.re.clone() + c.c4.clone();
    let scale = a15_sq.div(&z1_sq)?;

    let mut out = Vec::new();
    let mut compare = |identity: &str, diff: Cplx<T>| {
        if !diff.vanishes_within(tol) {
            let (re, im) = diff.to_f64_pair();
            out.push(Discrepancy {
                identity: identity.to_string(),
                magnitude: re.hypot(im),
            });
        }
    };
    compare("A_{1,1} = 0", q[0].a1.clone());
    compare("A_{2,1} = 0", q[1].a1.clone());
    compare("A_{3,1} = 0", q[2].a1.clone());
    compare("A_{2,5} = 0", q[1].a5.clone());
    compare("A_{3,5} = 0", q[2].a5.clone());
    compare("A_{1,5} as requested", q[0].a5.clone() - point.a15.clone());
    compare(
        "A_{1,3} = C_1 + Z_1^2 C_2",
        Cplx::real(q[0].a3.clone() - (c.c1.clone() + z1_sq.clone() * c.c2.clone())),
    );
    compare("A_{1,4} from the reduction", Cplx::real(q[0].a4.clone() - scale.clone() * quad));
    compare(
        "|A_{1,2}|^2 from the reduction",
        Cplx::real(q[0].a2.norm_sqr() - scale * den.square()),
    );
    let b0 = objective_b0(&c, &point.z3, z1)?;
    let gap = q[0].a3.clone() * q[0].a4.clone() - q[0].a2.norm_sqr();
    let product_sq = (q[0].a5.clone() * q[0].a2.clone()).norm_sqr();
    // c = B_0 compared through squares: gap^2 = B_0^2 |A_15 A_12|^2, same signs.
    let same_sign = gap.sign() == b0.sign();
    let diff = gap.square() - b0.square() * product_sq;
    if !same_sign {
        out.push(Discrepancy {
            identity: "c = B_0".into(),
            magnitude: f64::INFINITY,
        });
    } else {
        compare("c = B_0", Cplx::real(diff));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::{attach_register, recover, rounded_point};
    use crate::reduction::{reduce, with_unit_d0};

    fn reference_parameters() -> (SearchPoint<Surd>, ReducedSystem<Surd>, RecoveredParameters<Surd>) {
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let rs: ReducedSystem<Surd> = reduce(&seq, &p).unwrap();
        let d = with_unit_d0([Surd::one(), Surd::from_integer(4), Surd::from_integer(6)]);
        let z3 = Cplx::real(Surd::from_integer(-20_000_000_000_000));
        let (point, _) = rounded_point(&rs, d, z3, 8).unwrap();
        let params = recover(&point, &rs).unwrap();
        (point, rs, params)
    }

    #[test]
    fn reference_point_passes() {
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let (_, _, params) = reference_parameters();
        let one = Cplx::real(Surd::one());
        let (registered, _) = attach_register(&params, one.clone(), one, &seq, &p).unwrap();
        let cert = verify_recovered(&registered, &p, &seq).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass, "{:?}", cert.warnings);
        assert!(!cert.core_only);
        assert_eq!(cert.f3_orthogonal, Some(true));
        assert!(cert.c_float > 0.0 && cert.c_float < 0.216);
        for t in p.matrix_indices() {
            assert!(cert.weights_used.contains_key(&t));
        }
        let report = check_certificate(&cert.to_json()).unwrap();
        assert!(report.consistent(), "{:?}", report.mismatches);
        assert_eq!(report.from_embedded, Verdict::Pass);
    }

    #[test]
    fn cross_check_is_clean_and_detects_perturbation() {
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let (point, rs, params) = reference_parameters();
        assert!(cross_check(&point, &rs, &params, &seq, &p).unwrap().is_empty());
        let mut bent = params.clone();
        bent.a_high[1] = bent.a_high[1].clone() + Cplx::real(Surd::one());
        let found = cross_check(&point, &rs, &bent, &seq, &p).unwrap();
        let names: Vec<&str> = found.iter().map(|d| d.identity.as_str()).collect();
        assert!(names.contains(&"A_{1,1} = 0") && names.contains(&"A_{2,1} = 0"), "{names:?}");
        let cert = verify_recovered(&bent, &p, &seq).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        assert_eq!(cert.conditions.shifted_orthogonal, Some(false));
    }

    #[test]
    fn naive_pair_fails_on_first_shift() {
        // F_1 = 1 + z^k, F_2 = z
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let one = || Cplx::real(Surd::one());
        let z = || Cplx::<Surd>::zero();
        let pair = GeneratorPair::core([one(), z(), z(), z()], [one(), z(), z(), z()], [z(), one(), z(), z()]);
        let cert = verify_sequence(&pair, &p, &seq, None).unwrap();
        assert_eq!(cert.conditions.first_orthogonal, Some(false));
        assert_eq!(cert.verdict, Verdict::Fail);
        assert!(cert.core_only);
    }

    #[test]
    fn no_high_part_is_degenerate() {
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let (_, _, mut params) = reference_parameters();
        params.a_high = std::array::from_fn(|_| Cplx::zero());
        let cert = verify_recovered(&params, &p, &seq).unwrap();
        assert_eq!(cert.conditions.nondegenerate, Some(false));
        assert_eq!(cert.verdict, Verdict::Fail);
    }

    #[test]
    fn float_never_passes() {
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let (_, _, params) = reference_parameters();
        let one = Cplx::real(Surd::one());
        let (registered, _) = attach_register(&params, one.clone(), one, &seq, &p).unwrap();
        let floats = registered.generator_pair().map(|x| x.to_f64());
        let cert = verify_sequence(&floats, &p, &seq, None).unwrap();
        assert_ne!(cert.verdict, Verdict::Pass);
    }

    #[test]
    fn tampered_certificate_is_caught() {
        let seq = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let (_, _, params) = reference_parameters();
        let one = Cplx::real(Surd::one());
        let (registered, _) = attach_register(&params, one.clone(), one, &seq, &p).unwrap();
        let mut v = verify_recovered(&registered, &p, &seq).unwrap().to_json();
        v["weights_used"]["7"] = Value::String("1/2".into());
        let report = check_certificate(&v).unwrap();
        assert!(!report.consistent());
        assert_ne!(report.from_embedded, Verdict::Pass);
    }
}
