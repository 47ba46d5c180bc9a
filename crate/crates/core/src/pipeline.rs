//! Search, recovery, register attachment and certification in one pass.

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::certify::{cross_check, verify_recovered, Certificate, CertifyError, Discrepancy};
use crate::pattern::DegreePattern;
use crate::recovery::{
    attach_register, default_z3, parameter_rows, recover, rounded_point, ParameterRow, RecoveryError, RegisterReport,
};
use crate::reduction::{compute_c, reduce, with_unit_d0, ReducedSystem, ReductionError};
use crate::scalar::{format_rational, rationalize, Cplx, Field, Interval, Regime, ScalarError, Surd};
use crate::search::{objective::MiddleObjective, DSpace, Evaluator, SearchStrategy, REPORT_DIGITS};
use crate::weights::WeightSequence;

/// Significant digits of the rounded `A_15`.
pub const POINT_DIGITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("search found no point with B_1 below 1 (best {0})")]
    NotFound(f64),
    #[error("the float regime cannot produce a certificate")]
    FloatRegime,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub weights: WeightSequence,
    pub pattern: DegreePattern,
    /// `(d_1, d_2, d_3)`; searched when absent.
    pub d: Option<[BigRational; 3]>,
    /// Real `Z_3`; the margin rule when absent.
    pub z3: Option<BigRational>,
    /// Initial `a_4 = b_5`.
    pub register: BigRational,
    pub regime: Option<Regime>,
    /// Grid of the `d` search.
    pub space: DSpace,
}

impl PipelineConfig {
    pub fn new(weights: WeightSequence, pattern: DegreePattern) -> Self {
        PipelineConfig {
            weights,
            pattern,
            d: None,
            z3: None,
            register: BigRational::from_integer(1.into()),
            regime: None,
            space: DSpace::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineOutcome {
    pub regime: Regime,
    pub d: [String; 3],
    pub z3: String,
    pub z1: f64,
    pub a15: f64,
    pub b1: f64,
    pub b0: f64,
    pub register: String,
    /// `F_2` was divided by `10^f2_scale_exponent` before the registers were attached.
    pub f2_scale_exponent: i32,
    pub register_report: RegisterReport,
    pub parameters: Vec<ParameterRow>,
    pub discrepancies: Vec<Discrepancy>,
    pub certificate: Certificate,
}

/// Minimises `B_1` over `d` by the default strategy on an arbitrary sequence.
pub fn search_d(
    weights: &WeightSequence,
    pattern: &DegreePattern,
    space: &DSpace,
) -> Result<([BigRational; 3], f64), PipelineError> {
    let rs: ReducedSystem<f64> = reduce(weights, pattern)?;
    let eval = Evaluator::new(&rs, &MiddleObjective);
    let found = crate::search::strategy::CoordinateDescent.run(&eval, space, None);
    let d = found
        .d
        .map(|x| rationalize(x, REPORT_DIGITS).unwrap_or_else(|_| BigRational::from_integer(1.into())));
    Ok((d, found.value))
}

pub fn run(config: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    let d = match &config.d {
        Some(d) => d.clone(),
        None => {
            let (d, value) = search_d(&config.weights, &config.pattern, &config.space)?;
            if value.is_nan() || value >= 1.0 {
                return Err(PipelineError::NotFound(value));
            }
            d
        }
    };
    match config.regime.unwrap_or_else(|| config.weights.natural_regime()) {
        Regime::Rational => run_in::<Surd>(config, d),
        Regime::Interval => run_in::<Interval>(config, d),
        Regime::Float => Err(PipelineError::FloatRegime),
    }
}

fn run_in<T: Field>(config: &PipelineConfig, d: [BigRational; 3]) -> Result<PipelineOutcome, PipelineError> {
    let seq = &config.weights;
    let pattern = &config.pattern;
    let rs: ReducedSystem<T> = reduce(seq, pattern)?;
    let dt = with_unit_d0(d.clone().map(|q| T::from_rational(&q)));
    let z3 = match &config.z3 {
        Some(z) => z.clone(),
        None => default_z3(&compute_c(&rs, &dt)?)?,
    };
    let (point, summary) = rounded_point(&rs, dt, Cplx::real(T::from_rational(&z3)), POINT_DIGITS)?;
    let params = recover(&point, &rs)?;
    let discrepancies = cross_check(&point, &rs, &params, seq, pattern)?;
    // Rounding widths grow with the coefficient scale; exact arithmetic has none.
    let (params, f2_scale_exponent) = match T::REGIME {
        Regime::Interval => params.with_unit_f2()?,
        _ => (params, 0),
    };

    let mut register = config.register.clone();
    let attach = |r: &BigRational| {
        let c = Cplx::real(T::from_rational(r));
        attach_register(&params, c.clone(), c, seq, pattern)
    };
    let (registered, register_report) = match attach(&register) {
        Err(RecoveryError::RegisterTooLarge { max_register }) if max_register > 0.0 => {
            // Largest power of ten strictly below the admissible bound.
            let mut exponent = max_register.log10().floor() as i32;
            if 10f64.powi(exponent) >= max_register {
                exponent -= 1;
            }
            register = rationalize(10f64.powi(exponent), 1)?;
            attach(&register)?
        }
        other => other?,
    };
    let certificate = verify_recovered(&registered, pattern, seq)?;
    Ok(PipelineOutcome {
        regime: T::REGIME,
        d: d.map(|q| format_rational(&q)),
        z3: format_rational(&z3),
        z1: point.z1.to_f64(),
        a15: point.a15.re.to_f64(),
        b1: summary.b1.to_f64(),
        b0: summary.b0.to_f64(),
        register: format_rational(&register),
        f2_scale_exponent,
        register_report,
        parameters: parameter_rows(&summary, &registered),
        discrepancies,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::Verdict;
    use crate::scalar::parse_rational;
    use crate::weights::override_block;

    #[test]
    fn searched_point_certifies() {
        let seq = WeightSequence::dirichlet_int(-16);
        let config = PipelineConfig::new(seq, DegreePattern::standard(6).unwrap());
        let out = run(&config).unwrap();
        assert_eq!(out.certificate.verdict, Verdict::Pass);
        assert!(out.discrepancies.is_empty());
        assert!(out.b0 < 1.0);
    }

    #[test]
    fn overridden_bergman_norm_certifies_with_small_registers() {
        let pattern = DegreePattern::standard(6).unwrap();
        let base = WeightSequence::dirichlet_int(-1);
        let donor = WeightSequence::dirichlet_int(-16);
        let seq = override_block(&base, &donor, &pattern).unwrap();
        let mut config = PipelineConfig::new(seq, pattern);
        config.d = Some(["1", "4", "6"].map(|s| parse_rational(s).unwrap()));
        let out = run(&config).unwrap();
        assert_eq!(out.certificate.verdict, Verdict::Pass);
        assert!(parse_rational(&out.register).unwrap() < BigRational::from_integer(1.into()));
    }

    #[test]
    fn non_integer_exponent_certifies_in_intervals() {
        let seq = WeightSequence::dirichlet(parse_rational("-33/2").unwrap());
        let out = run(&PipelineConfig::new(seq, DegreePattern::standard(6).unwrap())).unwrap();
        assert_eq!(out.regime, Regime::Interval);
        assert!(out.f2_scale_exponent > 10);
        assert_eq!(out.certificate.verdict, Verdict::Pass, "{:?}", out.certificate.equalities);
    }
}
