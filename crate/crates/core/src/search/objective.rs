//! Objective functions over the reduced system, registered by name.

use num_rational::BigRational;

use crate::recovery::default_z3;
use crate::reduction::{b1_from, compute_c, objective_b0, objective_b2, optimal_z1, split_e, ReducedSystem, ReductionError};
use crate::scalar::{rationalize, Cplx, Field, Interval, ScalarError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObjectiveError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("objective is not finite at this point")]
    NotFinite,
}

/// A function of `d = (d_0, .., d_3)` for a fixed reduced system.
///
/// Float evaluation drives the search; rational and interval evaluation
/// re-check the reported point.
pub trait Objective: Send + Sync {
    fn name(&self) -> &'static str;

    fn describe(&self) -> &'static str;

    fn float(&self, rs: &ReducedSystem<f64>, d: &[f64; 4]) -> Result<f64, ObjectiveError>;

    fn rational(&self, rs: &ReducedSystem<BigRational>, d: &[BigRational; 4]) -> Result<BigRational, ObjectiveError>;

    fn interval(&self, rs: &ReducedSystem<Interval>, d: &[Interval; 4]) -> Result<Interval, ObjectiveError>;
}

/// `4 C_2 C_4`.
pub struct UpperObjective;

/// `4 C_2 C_5 / C_1`.
pub struct MiddleObjective;

/// `B_0` at the default `Z_3` and `Z_1` rounded to eight digits next to its
/// minimiser, so every regime evaluates at the same rational point.
pub struct FinalObjective;

fn finite(x: f64) -> Result<f64, ObjectiveError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ObjectiveError::NotFinite)
    }
}

fn b0_at_default<T: Field>(rs: &ReducedSystem<T>, d: &[T; 4]) -> Result<T, ObjectiveError> {
    let c = compute_c(rs, d)?;
    let z3 = Cplx::real(T::from_rational(&default_z3(&c).map_err(|_| ObjectiveError::NotFinite)?));
    let (e0, e1) = split_e(&c, &z3)?;
    let z1_float = optimal_z1(&e0.to_f64(), &e1.to_f64())?;
    let z1 = T::from_rational(&rationalize(z1_float, 8)?);
    Ok(objective_b0(&c, &z3, &z1)?)
}

impl Objective for UpperObjective {
    fn name(&self) -> &'static str {
        "b2"
    }

    fn describe(&self) -> &'static str {
        "4 C_2 C_4, the coarsest bound"
    }

    fn float(&self, rs: &ReducedSystem<f64>, d: &[f64; 4]) -> Result<f64, ObjectiveError> {
        finite(objective_b2(rs, d)?)
    }

    fn rational(&self, rs: &ReducedSystem<BigRational>, d: &[BigRational; 4]) -> Result<BigRational, ObjectiveError> {
        Ok(objective_b2(rs, d)?)
    }

    fn interval(&self, rs: &ReducedSystem<Interval>, d: &[Interval; 4]) -> Result<Interval, ObjectiveError> {
        Ok(objective_b2(rs, d)?)
    }
}

impl Objective for MiddleObjective {
    fn name(&self) -> &'static str {
        "b1"
    }

    fn describe(&self) -> &'static str {
        "4 C_2 C_5 / C_1, the infimum of B_0 over Z_1 and Z_3"
    }

    fn float(&self, rs: &ReducedSystem<f64>, d: &[f64; 4]) -> Result<f64, ObjectiveError> {
        finite(b1_from(&compute_c(rs, d)?)?)
    }

    fn rational(&self, rs: &ReducedSystem<BigRational>, d: &[BigRational; 4]) -> Result<BigRational, ObjectiveError> {
        Ok(b1_from(&compute_c(rs, d)?)?)
    }

    fn interval(&self, rs: &ReducedSystem<Interval>, d: &[Interval; 4]) -> Result<Interval, ObjectiveError> {
        Ok(b1_from(&compute_c(rs, d)?)?)
    }
}

impl Objective for FinalObjective {
    fn name(&self) -> &'static str {
        "b0"
    }

    fn describe(&self) -> &'static str {
        "B_0 at the margin-rule Z_3 and near-optimal Z_1"
    }

    fn float(&self, rs: &ReducedSystem<f64>, d: &[f64; 4]) -> Result<f64, ObjectiveError> {
        finite(b0_at_default(rs, d)?)
    }

    fn rational(&self, rs: &ReducedSystem<BigRational>, d: &[BigRational; 4]) -> Result<BigRational, ObjectiveError> {
        b0_at_default(rs, d)
    }

    fn interval(&self, rs: &ReducedSystem<Interval>, d: &[Interval; 4]) -> Result<Interval, ObjectiveError> {
        b0_at_default(rs, d)
    }
}

/// Every objective, in registry order.
pub fn objectives() -> Vec<Box<dyn Objective>> {
    vec![Box::new(MiddleObjective), Box::new(UpperObjective), Box::new(FinalObjective)]
}

pub fn objective(name: &str) -> Option<Box<dyn Objective>> {
    objectives().into_iter().find(|o| o.name() == name.to_ascii_lowercase())
}
