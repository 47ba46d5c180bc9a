//! Generator polynomials and the inner-product quantities `A_{s,r}`.
//!
//! Everything here is computed straight from coefficients and weights, so it
//! serves as the reference against which the reduced formulas are checked.

use std::collections::BTreeMap;
use std::ops::Add;

use serde_json::{json, Value};
use thiserror::Error;

use crate::pattern::{DegreePattern, PatternError};
use crate::scalar::{Cplx, Field, ScalarError};
use crate::weights::{WeightError, WeightSource};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{quantity} does not vanish: {value}")]
    NotOrthogonal { quantity: String, value: String },
    #[error("A_13*A_14 - |A_12|^2 is not positive; the generators are degenerate")]
    DegeneratePair,
    #[error("coefficient at degree {degree} does not belong to generator {generator} for this pattern")]
    UnexpectedDegree { generator: &'static str, degree: u64 },
    #[error("malformed generator pair: {0}")]
    Malformed(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Finitely supported power series `sum_t c_t z^t`.
#[derive(Clone, Debug)]
pub struct Poly<T> {
    coeffs: BTreeMap<u64, Cplx<T>>,
}

impl<T: Field> Default for Poly<T> {
    fn default() -> Self {
        Poly { coeffs: BTreeMap::new() }
    }
}

impl<T: Field> Poly<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(degree: u64, c: Cplx<T>) -> Self {
        let mut p = Self::new();
        p.add_term(degree, c);
        p
    }

    /// Adds `c z^degree`, dropping terms that become exactly zero.
    pub fn add_term(&mut self, degree: u64, c: Cplx<T>) {
        let sum = match self.coeffs.remove(&degree) {
            Some(old) => old + c,
            None => c,
        };
        if !(sum.is_real() && sum.re.is_zero() && sum.re.width() == 0.0) {
            self.coeffs.insert(degree, sum);
        }
    }

    pub fn coeff(&self, degree: u64) -> Option<&Cplx<T>> {
        self.coeffs.get(&degree)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Cplx<T>)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    pub fn degree(&self) -> Option<u64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `z^m * self`.
    pub fn shifted(&self, m: u64) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|(d, c)| (d + m, c.clone())).collect(),
        }
    }

    pub fn scaled(&self, k: &Cplx<T>) -> Self {
        let mut out = Self::new();
        for (d, c) in &self.coeffs {
            out.add_term(*d, c.clone() * k.clone());
        }
        out
    }
}

impl<T: Field> Add for Poly<T> {
    type Output = Poly<T>;

    fn add(mut self, rhs: Poly<T>) -> Poly<T> {
        for (d, c) in rhs.coeffs {
            self.add_term(d, c);
        }
        self
    }
}

/// `<f, g> = sum_t f_t conj(g_t) omega_t`.
pub fn inner_product<T: Field, W: WeightSource<T> + ?Sized>(
    f: &Poly<T>,
    g: &Poly<T>,
    weights: &W,
) -> Result<Cplx<T>, WeightError> {
    let mut acc = Cplx::zero();
    for (t, a) in f.iter() {
        if let Some(b) = g.coeff(t) {
            let w = weights.weight_at(t)?;
            acc = acc + (a.clone() * b.conj()).scale(&w);
        }
    }
    Ok(acc)
}

/// `||f||^2`.
pub fn norm_sqr<T: Field, W: WeightSource<T> + ?Sized>(f: &Poly<T>, weights: &W) -> Result<T, WeightError> {
    let mut acc = T::zero();
    for (t, a) in f.iter() {
        acc = acc + a.norm_sqr() * weights.weight_at(t)?;
    }
    Ok(acc)
}

/// Coefficients of the two generators.
///
/// `F_1 = sum_{i<4} a_i z^{g_i} + a_4 z^{g_4} + sum_{i<4} a_{k+i} z^{k+g_i}` and
/// `F_2 = sum_{i<4} b_i z^{g_i} + b_5 z^{g_5}`.
#[derive(Clone, Debug)]
pub struct GeneratorPair<T> {
    pub a_low: [Cplx<T>; 4],
    pub a_reg: Cplx<T>,
    pub a_high: [Cplx<T>; 4],
    pub b_low: [Cplx<T>; 4],
    pub b_reg: Cplx<T>,
}

impl<T: Field> GeneratorPair<T> {
    /// Pair with registers set to zero.
    pub fn core(a_low: [Cplx<T>; 4], a_high: [Cplx<T>; 4], b_low: [Cplx<T>; 4]) -> Self {
        GeneratorPair {
            a_low,
            a_reg: Cplx::zero(),
            a_high,
            b_low,
            b_reg: Cplx::zero(),
        }
    }

    pub fn with_registers(mut self, a_reg: Cplx<T>, b_reg: Cplx<T>) -> Self {
        self.a_reg = a_reg;
        self.b_reg = b_reg;
        self
    }

    /// Both registers are nonzero.
    pub fn is_register_attached(&self) -> bool {
        !self.a_reg.is_zero() && !self.b_reg.is_zero()
    }

    pub fn f1(&self, pattern: &DegreePattern) -> Poly<T> {
        let g = pattern.gamma();
        let mut p = Poly::new();
        for i in 0..4 {
            p.add_term(g[i], self.a_low[i].clone());
            p.add_term(pattern.k() + g[i], self.a_high[i].clone());
        }
        p.add_term(g[4], self.a_reg.clone());
        p
    }

    pub fn f2(&self, pattern: &DegreePattern) -> Poly<T> {
        let g = pattern.gamma();
        let mut p = Poly::new();
        for i in 0..4 {
            p.add_term(g[i], self.b_low[i].clone());
        }
        p.add_term(g[5], self.b_reg.clone());
        p
    }

    /// Applies `f` to every real and imaginary part.
    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> GeneratorPair<U> {
        let m = |c: &Cplx<T>| Cplx::new(f(&c.re), f(&c.im));
        GeneratorPair {
            a_low: std::array::from_fn(|i| m(&self.a_low[i])),
            a_reg: m(&self.a_reg),
            a_high: std::array::from_fn(|i| m(&self.a_high[i])),
            b_low: std::array::from_fn(|i| m(&self.b_low[i])),
            b_reg: m(&self.b_reg),
        }
    }

    /// `{"k":..,"gamma":[..],"a":{degree: value},"b":{..}}`.
    pub fn to_json(&self, pattern: &DegreePattern) -> Value {
        let encode = |p: &Poly<T>| {
            let mut m = serde_json::Map::new();
            for (d, c) in p.iter() {
                m.insert(d.to_string(), c.to_json());
            }
            Value::Object(m)
        };
        json!({
            "k": pattern.k(),
            "gamma": pattern.gamma(),
            "a": encode(&self.f1(pattern)),
            "b": encode(&self.f2(pattern)),
        })
    }

    pub fn from_json(v: &Value) -> Result<(DegreePattern, Self), ModelError> {
        let bad = |what: &str| ModelError::Malformed(what.to_string());
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| bad("missing k"))?;
        let gamma: [u64; 6] = serde_json::from_value(v.get("gamma").cloned().ok_or_else(|| bad("missing gamma"))?)
            .map_err(|e| ModelError::Malformed(e.to_string()))?;
        let pattern = DegreePattern::new(k, gamma)?;
        let mut pair = GeneratorPair::core(
            std::array::from_fn(|_| Cplx::zero()),
            std::array::from_fn(|_| Cplx::zero()),
            std::array::from_fn(|_| Cplx::zero()),
        );
        for (generator, key) in [("F_1", "a"), ("F_2", "b")] {
            let Some(obj) = v.get(key) else { continue };
            let obj = obj.as_object().ok_or_else(|| bad("coefficients must be an object"))?;
            for (deg, val) in obj {
                let degree: u64 = deg.parse().map_err(|_| bad("degree keys must be integers"))?;
                let c = Cplx::<T>::from_json(val)?;
                let slot = match key {
                    "a" => (0..4)
                        .find(|&i| gamma[i] == degree)
                        .map(|i| &mut pair.a_low[i])
                        .or_else(|| (0..4).find(|&i| k + gamma[i] == degree).map(|i| &mut pair.a_high[i]))
                        .or_else(|| (gamma[4] == degree).then_some(&mut pair.a_reg)),
                    _ => (0..4)
                        .find(|&i| gamma[i] == degree)
                        .map(|i| &mut pair.b_low[i])
                        .or_else(|| (gamma[5] == degree).then_some(&mut pair.b_reg)),
                };
                *slot.ok_or(ModelError::UnexpectedDegree { generator, degree })? = c;
            }
        }
        Ok((pattern, pair))
    }
}

/// The five quantities for one shift count `s`.
#[derive(Clone, Debug)]
pub struct AQuantities<T> {
    pub s: u64,
    /// `<z^{k(s-1)} F_1, z^{ks} F_1>`
    pub a1: Cplx<T>,
    /// `<z^{ks} F_1, z^{ks} F_2>`
    pub a2: Cplx<T>,
    /// `||z^{ks} F_1||^2`
    pub a3: T,
    /// `||z^{ks} F_2||^2`
    pub a4: T,
    /// `<z^{k(s-1)} F_1, z^{ks} F_2>`
    pub a5: Cplx<T>,
}

pub fn compute_a<T: Field, W: WeightSource<T> + ?Sized>(
    pair: &GeneratorPair<T>,
    pattern: &DegreePattern,
    weights: &W,
    s: u64,
) -> Result<AQuantities<T>, ModelError> {
    assert!(s >= 1, "shift count starts at 1");
    let k = pattern.k();
    let f1 = pair.f1(pattern);
    let f2 = pair.f2(pattern);
    let f1_prev = f1.shifted(k * (s - 1));
    let f1_s = f1.shifted(k * s);
    let f2_s = f2.shifted(k * s);
    Ok(AQuantities {
        s,
        a1: inner_product(&f1_prev, &f1_s, weights)?,
        a2: inner_product(&f1_s, &f2_s, weights)?,
        a3: norm_sqr(&f1_s, weights)?,
        a4: norm_sqr(&f2_s, weights)?,
        a5: inner_product(&f1_prev, &f2_s, weights)?,
    })
}

fn require_zero<T: Field>(name: &str, x: &Cplx<T>, tol: f64) -> Result<(), ModelError> {
    if x.vanishes_within(tol) {
        Ok(())
    } else {
        Err(ModelError::NotOrthogonal {
            quantity: name.to_string(),
            value: x.to_string(),
        })
    }
}

/// The element `F_3` which together with `F_2` spans the wandering part.
///
/// `F_3 = F_1 + z^k * A_15 / (|A_12|^2 - A_13 A_14) * (A_13 F_2 - conj(A_12) F_1)`.
pub fn construct_f3<T: Field, W: WeightSource<T> + ?Sized>(
    pair: &GeneratorPair<T>,
    pattern: &DegreePattern,
    weights: &W,
    tol: f64,
) -> Result<Poly<T>, ModelError> {
    let q1 = compute_a(pair, pattern, weights, 1)?;
    let q2 = compute_a(pair, pattern, weights, 2)?;
    let q3 = compute_a(pair, pattern, weights, 3)?;
    require_zero("A_11", &q1.a1, tol)?;
    require_zero("A_21", &q2.a1, tol)?;
    require_zero("A_31", &q3.a1, tol)?;
    require_zero("A_25", &q2.a5, tol)?;
    require_zero("A_35", &q3.a5, tol)?;
    let denom = q1.a2.norm_sqr() - q1.a3.clone() * q1.a4.clone();
    if !denom.is_negative() {
        return Err(ModelError::DegeneratePair);
    }
    let lambda = q1.a5.scale(&denom.recip()?);
    let f1 = pair.f1(pattern);
    let f2 = pair.f2(pattern);
    let mix = f2.scaled(&Cplx::real(q1.a3)) + f1.scaled(&-q1.a2.conj());
    Ok(f1 + mix.scaled(&lambda).shifted(pattern.k()))
}

/// `<f, z^{ks} F_j>` for `s = 1..=s_max` and `j = 1, 2`.
pub fn orthogonality_residuals<T: Field, W: WeightSource<T> + ?Sized>(
    f: &Poly<T>,
    pair: &GeneratorPair<T>,
    pattern: &DegreePattern,
    weights: &W,
    s_max: u64,
) -> Result<Vec<(u64, u8, Cplx<T>)>, ModelError> {
    let f1 = pair.f1(pattern);
    let f2 = pair.f2(pattern);
    let mut out = Vec::new();
    for s in 1..=s_max {
        let shift = pattern.k() * s;
        out.push((s, 1, inner_product(f, &f1.shifted(shift), weights)?));
        out.push((s, 2, inner_product(f, &f2.shifted(shift), weights)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Surd;
    use crate::weights::WeightSequence;
    use num_rational::BigRational;

    fn r(n: i64) -> Cplx<Surd> {
        Cplx::real(Surd::from_integer(n))
    }

    fn z() -> Cplx<Surd> {
        Cplx::zero()
    }

    #[test]
    fn monomial_products() {
        let seq = WeightSequence::dirichlet_int(-16);
        let one = Poly::monomial(0, r(1));
        assert_eq!(inner_product(&one, &one, &seq).unwrap().re, Surd::one());
        let z6 = Poly::monomial(6, r(1));
        let w6: Surd = seq.weight(6).unwrap();
        assert_eq!(inner_product(&z6, &z6, &seq).unwrap().re, w6);
        let z2 = Poly::monomial(2, r(1));
        let z3 = Poly::monomial(3, r(1));
        assert!(inner_product(&z2, &z3, &seq).unwrap().is_zero());
    }

    #[test]
    fn constant_and_z_generators() {
        let p = DegreePattern::standard(6).unwrap();
        let seq = WeightSequence::dirichlet_int(-16);
        let pair = GeneratorPair::core([r(1), z(), z(), z()], [z(), z(), z(), z()], [z(), r(1), z(), z()]);
        let q = compute_a(&pair, &p, &seq, 1).unwrap();
        assert!(q.a2.is_zero());
        assert_eq!(q.a3, seq.weight::<Surd>(6).unwrap());
        assert_eq!(q.a4, seq.weight::<Surd>(7).unwrap());
        assert!(q.a1.is_zero() && q.a5.is_zero());
    }

    #[test]
    fn f3_reduces_to_f1_without_a15() {
        let p = DegreePattern::standard(6).unwrap();
        let seq = WeightSequence::dirichlet_int(-2);
        let pair = GeneratorPair::core([r(1), r(2), z(), z()], std::array::from_fn(|_| z()), [z(), z(), r(1), r(3)])
            .with_registers(r(1), r(1));
        let f3 = construct_f3(&pair, &p, &seq, 0.0).unwrap();
        let f1 = pair.f1(&p);
        assert_eq!(f3.iter().count(), f1.iter().count());
        for (d, c) in f1.iter() {
            assert_eq!(f3.coeff(d).unwrap().re, c.re);
        }
    }

    #[test]
    fn json_round_trip() {
        let p = DegreePattern::standard(6).unwrap();
        let pair = GeneratorPair::core(
            [r(1), r(2), r(3), r(4)],
            [r(5), r(6), r(7), r(8)],
            [r(9), r(10), r(11), r(12)],
        )
        .with_registers(r(1), Cplx::new(Surd::from_integer(0), Surd::one()));
        let v = pair.to_json(&p);
        assert_eq!(v["a"]["6"], json!("5"));
        assert_eq!(v["b"]["5"], json!({"re": "0", "im": "1"}));
        let (p2, back) = GeneratorPair::<Surd>::from_json(&v).unwrap();
        assert_eq!(p2, p);
        assert_eq!(back.to_json(&p), v);
        let bad = json!({"k": 6, "gamma": [0,1,2,3,4,5], "a": {"11": "1"}});
        assert!(matches!(
            GeneratorPair::<BigRational>::from_json(&bad),
            Err(ModelError::UnexpectedDegree { degree: 11, .. })
        ));
    }
}
