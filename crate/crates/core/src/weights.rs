//! Weight sequences `omega_t` of weighted Hardy spaces.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::pattern::DegreePattern;
use crate::scalar::{format_rational, parse_rational, rational_from_f64, Field, Regime, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("exponent {alpha} cannot be evaluated in the {regime} regime")]
    ModeUnsupported { alpha: String, regime: Regime },
    #[error("weight {what} must be positive, got {value}")]
    NonPositive { what: String, value: String },
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("no weight recorded at index {0}")]
    Missing(u64),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Rational number read from a JSON number or a `p/q` string.
///
/// Integers are written back as JSON numbers, everything else as strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rational(pub BigRational);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Ok(n) = i64::try_from(self.0.numer()) {
                return s.serialize_i64(n);
            }
        }
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let q = match &v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(BigRational::from_integer(i.into())),
                None => rational_from_f64(n.as_f64().unwrap_or(f64::NAN)),
            },
            other => Err(ScalarError::Parse(other.to_string())),
        };
        q.map(Rational).map_err(D::Error::custom)
    }
}

/// Rational always written as a `p/q` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalText(pub BigRational);

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Rational::deserialize(d).map(|r| RationalText(r.0))
    }
}

// Tagged enums buffer their content, which loses integer map keys.
mod index_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::RationalText;

    pub fn serialize<S: Serializer>(map: &BTreeMap<u64, RationalText>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, RationalText>, D::Error> {
        let raw = BTreeMap::<String, RationalText>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| k.parse::<u64>().map(|k| (k, v)).map_err(D::Error::custom))
            .collect()
    }
}

/// Closed form used beyond the explicit prefix of a custom sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum Tail {
    /// `scale * (t + 1)^alpha`.
    Power { alpha: Rational, scale: RationalText },
    Constant { value: RationalText },
}

/// Serializable description of a weight sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    /// `omega_t = (t + 1)^alpha`.
    Dirichlet { alpha: Rational },
    /// A base sequence with finitely many values replaced.
    Perturbed {
        base: Box<WeightSpec>,
        #[serde(with = "index_keys")]
        overrides: BTreeMap<u64, RationalText>,
    },
    /// Explicit `omega_0..omega_{n-1}` followed by a tail rule.
    Custom { prefix: Vec<RationalText>, tail: Tail },
}

/// A validated, immutable weight sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub struct WeightSequence {
    spec: WeightSpec,
}

impl TryFrom<WeightSpec> for WeightSequence {
    type Error = WeightError;

    fn try_from(spec: WeightSpec) -> Result<Self, Self::Error> {
        WeightSequence::from_spec(spec)
    }
}

impl From<WeightSequence> for WeightSpec {
    fn from(seq: WeightSequence) -> Self {
        seq.spec
    }
}

fn check_positive(what: impl Into<String>, q: &BigRational) -> Result<(), WeightError> {
    if Signed::is_positive(q) {
        Ok(())
    } else {
        Err(WeightError::NonPositive {
            what: what.into(),
            value: format_rational(q),
        })
    }
}

fn validate(spec: &WeightSpec) -> Result<(), WeightError> {
    match spec {
        WeightSpec::Dirichlet { .. } => Ok(()),
        WeightSpec::Perturbed { base, overrides } => {
            for (t, v) in overrides {
                check_positive(format!("override at {t}"), &v.0)?;
            }
            validate(base)
        }
        WeightSpec::Custom { prefix, tail } => {
            for (t, v) in prefix.iter().enumerate() {
                check_positive(format!("prefix entry {t}"), &v.0)?;
            }
            match tail {
                Tail::Power { scale, .. } => check_positive("tail scale", &scale.0),
                Tail::Constant { value } => check_positive("tail value", &value.0),
            }
        }
    }
}

fn power<T: Field>(base: u64, alpha: &BigRational) -> Result<T, WeightError> {
    T::pow_rational(base, alpha).map_err(|e| match e {
        ScalarError::Unsupported { .. } => WeightError::ModeUnsupported {
            alpha: format_rational(alpha),
            regime: T::REGIME,
        },
        other => WeightError::Scalar(other),
    })
}

fn evaluate<T: Field>(spec: &WeightSpec, t: u64) -> Result<T, WeightError> {
    match spec {
        WeightSpec::Dirichlet { alpha } => power(t + 1, &alpha.0),
        WeightSpec::Perturbed { base, overrides } => match overrides.get(&t) {
            Some(v) => Ok(T::from_rational(&v.0)),
            None => evaluate(base, t),
        },
        WeightSpec::Custom { prefix, tail } => match prefix.get(t as usize) {
            Some(v) => Ok(T::from_rational(&v.0)),
            None => match tail {
                Tail::Power { alpha, scale } => Ok(T::from_rational(&scale.0) * power::<T>(t + 1, &alpha.0)?),
                Tail::Constant { value } => Ok(T::from_rational(&value.0)),
            },
        },
    }
}

fn exponents(spec: &WeightSpec, out: &mut Vec<BigRational>) {
    match spec {
        WeightSpec::Dirichlet { alpha } => out.push(alpha.0.clone()),
        WeightSpec::Perturbed { base, .. } => exponents(base, out),
        WeightSpec::Custom { tail, .. } => {
            if let Tail::Power { alpha, .. } = tail {
                out.push(alpha.0.clone());
            }
        }
    }
}

impl WeightSequence {
    pub fn from_spec(spec: WeightSpec) -> Result<Self, WeightError> {
        validate(&spec)?;
        Ok(WeightSequence { spec })
    }

    pub fn dirichlet(alpha: BigRational) -> Self {
        WeightSequence {
            spec: WeightSpec::Dirichlet { alpha: Rational(alpha) },
        }
    }

    pub fn dirichlet_int(alpha: i64) -> Self {
        Self::dirichlet(BigRational::from_integer(alpha.into()))
    }

    pub fn perturbed(base: &WeightSequence, overrides: BTreeMap<u64, BigRational>) -> Result<Self, WeightError> {
        let mut merged = BTreeMap::new();
        let base_spec = match &base.spec {
            WeightSpec::Perturbed { base, overrides } => {
                merged.extend(overrides.iter().map(|(t, v)| (*t, v.clone())));
                (**base).clone()
            }
            other => other.clone(),
        };
        merged.extend(overrides.into_iter().map(|(t, v)| (t, RationalText(v))));
        Self::from_spec(WeightSpec::Perturbed {
            base: Box::new(base_spec),
            overrides: merged,
        })
    }

    pub fn custom(prefix: Vec<BigRational>, tail: Tail) -> Result<Self, WeightError> {
        Self::from_spec(WeightSpec::Custom {
            prefix: prefix.into_iter().map(RationalText).collect(),
            tail,
        })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    /// `omega_t` in the regime of `T`.
    pub fn weight<T: Field>(&self, t: u64) -> Result<T, WeightError> {
        evaluate(&self.spec, t)
    }

    /// The Dirichlet exponent when the sequence is a plain `(t+1)^alpha`.
    pub fn dirichlet_alpha(&self) -> Option<&BigRational> {
        match &self.spec {
            WeightSpec::Dirichlet { alpha } => Some(&alpha.0),
            _ => None,
        }
    }

    /// Exact when every closed-form exponent is an integer, interval otherwise.
    pub fn natural_regime(&self) -> Regime {
        let mut alphas = Vec::new();
        exponents(&self.spec, &mut alphas);
        if alphas.iter().all(|a| a.is_integer()) {
            Regime::Rational
        } else {
            Regime::Interval
        }
    }

    /// Admissibility remarks that do not prevent computation.
    pub fn lint(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self.weight::<BigRational>(0) {
            Ok(w0) if w0 != BigRational::from_integer(1.into()) => {
                out.push(format!("omega_0 = {} differs from 1", format_rational(&w0)));
            }
            Err(_) => {
                if let Ok(w0) = self.weight::<crate::scalar::Interval>(0) {
                    if !w0.contains(1.0) {
                        out.push(format!("omega_0 = {w0} differs from 1"));
                    }
                }
            }
            _ => {}
        }
        out
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.spec).map_err(|_| fmt::Error)?)
    }
}

/// Replaces the twelve weight-matrix entries of `base` with those of `donor`.
pub fn override_block(
    base: &WeightSequence,
    donor: &WeightSequence,
    pattern: &DegreePattern,
) -> Result<WeightSequence, WeightError> {
    let indices = pattern.matrix_indices();
    for (n, t) in indices.iter().enumerate() {
        if indices[..n].contains(t) {
            return Err(WeightError::InvalidPattern(format!("weight index {t} occurs twice")));
        }
    }
    let overrides = indices
        .iter()
        .map(|&t| Ok((t, donor.weight::<BigRational>(t)?)))
        .collect::<Result<BTreeMap<_, _>, WeightError>>()?;
    WeightSequence::perturbed(base, overrides)
}

/// Anything that yields `omega_t` in a given regime.
pub trait WeightSource<T> {
    fn weight_at(&self, t: u64) -> Result<T, WeightError>;
}

impl<T: Field> WeightSource<T> for WeightSequence {
    fn weight_at(&self, t: u64) -> Result<T, WeightError> {
        self.weight(t)
    }
}

/// Finite table of weights, as embedded in a certificate.
impl<T: Field> WeightSource<T> for BTreeMap<u64, T> {
    fn weight_at(&self, t: u64) -> Result<T, WeightError> {
        self.get(&t).cloned().ok_or(WeightError::Missing(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Interval, Surd};
    use num_bigint::BigInt;
    use num_traits::Pow;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn dirichlet_values() {
        let seq = WeightSequence::dirichlet_int(-16);
        let w6: BigRational = seq.weight(6).unwrap();
        assert_eq!(w6, BigRational::new(1.into(), BigInt::from(7).pow(16u32)));
        let w7: f64 = seq.weight(7).unwrap();
        assert!((w7 * 7f64.powi(16) - 0.11806708702).abs() < 1e-11);
        assert_eq!(seq.weight::<BigRational>(0).unwrap(), q(1, 1));
        assert_eq!(seq.natural_regime(), Regime::Rational);
        assert!(seq.lint().is_empty());
    }

    #[test]
    fn fractional_exponent_needs_intervals() {
        let seq = WeightSequence::dirichlet(q(-21, 5));
        assert!(matches!(seq.weight::<BigRational>(3), Err(WeightError::ModeUnsupported { .. })));
        assert!(matches!(seq.weight::<Surd>(3), Err(WeightError::ModeUnsupported { .. })));
        let w: Interval = seq.weight(3).unwrap();
        assert!(w.contains(4f64.powf(-4.2)) || w.width() < 1e-15);
        assert_eq!(seq.natural_regime(), Regime::Interval);
    }

    #[test]
    fn override_block_changes_exactly_twelve_indices() {
        let base = WeightSequence::dirichlet_int(-2);
        let donor = WeightSequence::dirichlet_int(-16);
        let p = DegreePattern::standard(6).unwrap();
        let seq = override_block(&base, &donor, &p).unwrap();
        let changed: Vec<u64> = (0..=4 * 6 + 4)
            .filter(|&t| seq.weight::<BigRational>(t).unwrap() != base.weight::<BigRational>(t).unwrap())
            .collect();
        assert_eq!(changed, vec![6, 7, 8, 9, 12, 13, 14, 15, 18, 19, 20, 21]);
        let identity = override_block(&donor, &donor, &p).unwrap();
        for t in 0..30 {
            assert_eq!(identity.weight::<BigRational>(t).unwrap(), donor.weight::<BigRational>(t).unwrap());
        }
    }

    #[test]
    fn json_forms() {
        let seq: WeightSequence = serde_json::from_str(r#"{"kind":"dirichlet","alpha":-16}"#).unwrap();
        assert_eq!(seq, WeightSequence::dirichlet_int(-16));
        assert_eq!(serde_json::to_string(&seq).unwrap(), r#"{"kind":"dirichlet","alpha":-16}"#);
        let frac: WeightSequence = serde_json::from_str(r#"{"kind":"dirichlet","alpha":-4.2}"#).unwrap();
        assert_eq!(frac.dirichlet_alpha(), Some(&q(-21, 5)));
        let pert: WeightSequence = serde_json::from_str(
            r#"{"kind":"perturbed","base":{"kind":"dirichlet","alpha":-1},"overrides":{"6":"1/33232930569601"}}"#,
        )
        .unwrap();
        assert_eq!(pert.weight::<BigRational>(6).unwrap(), q(1, 33232930569601));
        assert_eq!(pert.weight::<BigRational>(5).unwrap(), q(1, 6));
        let back: WeightSequence = serde_json::from_str(&serde_json::to_string(&pert).unwrap()).unwrap();
        assert_eq!(back, pert);
        assert!(serde_json::from_str::<WeightSequence>(
            r#"{"kind":"perturbed","base":{"kind":"dirichlet","alpha":0},"overrides":{"2":"-1"}}"#
        )
        .is_err());
    }

    #[test]
    fn custom_tail_rules() {
        let seq = WeightSequence::custom(
            vec![q(1, 1), q(1, 2)],
            Tail::Power {
                alpha: Rational(q(-2, 1)),
                scale: RationalText(q(3, 1)),
            },
        )
        .unwrap();
        assert_eq!(seq.weight::<BigRational>(1).unwrap(), q(1, 2));
        assert_eq!(seq.weight::<BigRational>(3).unwrap(), q(3, 16));
        let flat = WeightSequence::custom(vec![q(2, 1)], Tail::Constant { value: RationalText(q(1, 1)) }).unwrap();
        assert_eq!(flat.lint().len(), 1);
        assert_eq!(flat.weight::<BigRational>(9).unwrap(), q(1, 1));
    }
}
