//! Reduction of the orthogonality system to a small number of constants.
//!
//! The twelve weights `omega_{s k + gamma_i}` (`s = 1..3`, `i = 0..3`) form
//! the 3x4 matrix `N`. Solving against its last three columns gives `E` and
//! `G`, from which the free parameters `d_i = |a_i|^2` enter the objectives
//! only through `C_1..C_5`.

use thiserror::Error;

use crate::pattern::DegreePattern;
use crate::scalar::{cramer_solve3, det3, det4, Cplx, Field, Mat3, Mat4, ScalarError};
use crate::weights::{WeightError, WeightSource};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("the 3x3 weight block is singular")]
    Singular,
    #[error("E_{index} vanishes, so D_{index} is undefined")]
    DegenerateReduction { index: usize },
    #[error("d_{index} must be positive")]
    NonPositiveD { index: usize },
    #[error("C_1 Z_3 - C_3/2 vanishes")]
    DegenerateZ3,
    #[error("Z_1 must be positive")]
    NonPositiveZ1,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `N[s-1][i] = omega_{s k + gamma_i}`.
pub fn build_n<T: Field, W: WeightSource<T> + ?Sized>(
    weights: &W,
    pattern: &DegreePattern,
) -> Result<[[T; 4]; 3], WeightError> {
    let mut rows: Vec<[T; 4]> = Vec::with_capacity(3);
    for s in 1..=3u64 {
        let mut row: Vec<T> = Vec::with_capacity(4);
        for i in 0..4 {
            row.push(weights.weight_at(pattern.matrix_index(s, i))?);
        }
        rows.push(row.try_into().unwrap_or_else(|_| unreachable!()));
    }
    Ok(rows.try_into().unwrap_or_else(|_| unreachable!()))
}

/// `N` bordered by the row `(1, 0, 0, 0)`.
pub fn build_n0<T: Field>(n: &[[T; 4]; 3]) -> Mat4<T> {
    std::array::from_fn(|r| {
        if r == 0 {
            std::array::from_fn(|c| if c == 0 { T::one() } else { T::zero() })
        } else {
            n[r - 1].clone()
        }
    })
}

/// `N` without its first column.
pub fn n1<T: Field>(n: &[[T; 4]; 3]) -> Mat3<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| n[r][c + 1].clone()))
}

/// Solved form of the weight system.
#[derive(Clone, Debug)]
pub struct ReducedSystem<T> {
    pub n: [[T; 4]; 3],
    pub det_n1: T,
    pub e: [T; 3],
    pub g: [T; 3],
    /// `H_0 = 1`, `H_i = E_i^2`.
    pub h: [T; 4],
    /// `D_i = -G_i / E_i`, absent when `E_i` vanishes.
    pub d: [Option<T>; 3],
}

impl<T: Field> ReducedSystem<T> {
    /// `omega_{k + gamma_i}`.
    pub fn omega_k(&self, i: usize) -> &T {
        &self.n[0][i]
    }

    /// `omega_{2k + gamma_i}`.
    pub fn omega_2k(&self, i: usize) -> &T {
        &self.n[1][i]
    }

    pub fn det_n0(&self) -> T {
        det4(&build_n0(&self.n))
    }

    pub fn d_ratio(&self, i: usize) -> Result<&T, ReductionError> {
        self.d[i].as_ref().ok_or(ReductionError::DegenerateReduction { index: i + 1 })
    }
}

pub fn reduce<T: Field, W: WeightSource<T> + ?Sized>(
    weights: &W,
    pattern: &DegreePattern,
) -> Result<ReducedSystem<T>, ReductionError> {
    let n = build_n(weights, pattern)?;
    reduce_matrix(n)
}

/// `reduce` for an already assembled weight matrix.
pub fn reduce_matrix<T: Field>(n: [[T; 4]; 3]) -> Result<ReducedSystem<T>, ReductionError> {
    let block = n1(&n);
    let det_n1 = det3(&block);
    let minus_first = [-n[0][0].clone(), -n[1][0].clone(), -n[2][0].clone()];
    let unit = [T::one(), T::zero(), T::zero()];
    let solve = |rhs: &[T; 3]| {
        cramer_solve3(&block, rhs).map_err(|e| match e {
            ScalarError::Singular => ReductionError::Singular,
            other => ReductionError::Scalar(other),
        })
    };
    let e = solve(&minus_first)?;
    let g = solve(&unit)?;
    let h = [T::one(), e[0].square(), e[1].square(), e[2].square()];
    let d = std::array::from_fn(|i| {
        if matches!(e[i].sign(), Some(std::cmp::Ordering::Less | std::cmp::Ordering::Greater)) {
            g[i].div(&e[i]).ok().map(|x| -x)
        } else {
            None
        }
    });
    Ok(ReducedSystem { n, det_n1, e, g, h, d })
}

/// The constants `C_1..C_5` at one choice of `d`.
#[derive(Clone, Debug)]
pub struct Constants<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub c4: T,
    pub c5: T,
}

/// `(1, d_1, d_2, d_3)`.
pub fn with_unit_d0<T: Field>(d: [T; 3]) -> [T; 4] {
    let [d1, d2, d3] = d;
    [T::one(), d1, d2, d3]
}

pub fn compute_c<T: Field>(rs: &ReducedSystem<T>, d: &[T; 4]) -> Result<Constants<T>, ReductionError> {
    for (index, di) in d.iter().enumerate() {
        if !di.is_positive() {
            return Err(ReductionError::NonPositiveD { index });
        }
    }
    let dr: Vec<&T> = (0..3).map(|i| rs.d_ratio(i)).collect::<Result<_, _>>()?;
    let mut c1 = T::zero();
    let mut c2 = T::zero();
    for i in 0..4 {
        c1 = c1 + d[i].clone() * rs.omega_k(i).clone();
        c2 = c2 + (rs.h[i].clone() * rs.omega_2k(i).clone()).div(&d[i])?;
    }
    let mut half_c3 = T::zero();
    let mut c4 = T::zero();
    for i in 1..4 {
        let dw = d[i].clone() * rs.omega_k(i).clone();
        half_c3 = half_c3 + dr[i - 1].clone() * dw.clone();
        c4 = c4 + dr[i - 1].square() * dw;
    }
    let c5 = c1.clone() * c4.clone() - half_c3.square();
    let c3 = half_c3.clone() + half_c3;
    Ok(Constants { c1, c2, c3, c4, c5 })
}

/// `4 C_2 C_4`.
pub fn objective_b2<T: Field>(rs: &ReducedSystem<T>, d: &[T; 4]) -> Result<T, ReductionError> {
    let c = compute_c(rs, d)?;
    Ok(T::from_i64(4) * c.c2 * c.c4)
}

/// `4 C_2 C_5 / C_1`.
pub fn objective_b1<T: Field>(rs: &ReducedSystem<T>, d: &[T; 4]) -> Result<T, ReductionError> {
    let c = compute_c(rs, d)?;
    b1_from(&c)
}

pub fn b1_from<T: Field>(c: &Constants<T>) -> Result<T, ReductionError> {
    Ok((T::from_i64(4) * c.c2.clone() * c.c5.clone()).div(&c.c1)?)
}

/// `|C_1 Z_3 - C_3/2|` and `C_1 |Z_3|^2 - C_3 x + C_4`.
fn z3_terms<T: Field>(c: &Constants<T>, z3: &Cplx<T>) -> Result<(T, T), ReductionError> {
    let half = T::from_rational(&num_rational::BigRational::new(1.into(), 2.into()));
    let shifted = z3.scale(&c.c1) - Cplx::real(c.c3.clone() * half);
    let den = shifted.abs()?;
    if den.is_degenerate(0.0) {
        return Err(ReductionError::DegenerateZ3);
    }
    let quad = c.c1.clone() * z3.norm_sqr() - c.c3.clone() * z3.re.clone() + c.c4.clone();
    Ok((den, quad))
}

/// `(e_0, e_1)` with `B_0(Z_1) = e_0 / Z_1 + e_1 Z_1`.
pub fn split_e<T: Field>(c: &Constants<T>, z3: &Cplx<T>) -> Result<(T, T), ReductionError> {
    let (den, quad) = z3_terms(c, z3)?;
    let e0 = c.c5.div(&den)?;
    let e1 = (c.c2.clone() * quad).div(&den)?;
    Ok((e0, e1))
}

/// `|C_1 Z_3 - C_3/2|`.
pub fn z3_denominator<T: Field>(c: &Constants<T>, z3: &Cplx<T>) -> Result<T, ReductionError> {
    Ok(z3_terms(c, z3)?.0)
}

pub fn objective_b0<T: Field>(c: &Constants<T>, z3: &Cplx<T>, z1: &T) -> Result<T, ReductionError> {
    if !z1.is_positive() {
        return Err(ReductionError::NonPositiveZ1);
    }
    let (den, quad) = z3_terms(c, z3)?;
    let num = z1.square() * c.c2.clone() * quad + c.c5.clone();
    Ok(num.div(&(z1.clone() * den))?)
}

/// Minimiser `sqrt(e_0 / e_1)` of `B_0` in `Z_1`.
pub fn optimal_z1<T: Field>(e0: &T, e1: &T) -> Result<T, ReductionError> {
    Ok(e0.div(e1)?.sqrt()?)
}

/// `4 C_2 C_4` evaluated with upper bounds on `H_i` and `D_i^2`.
pub fn b2_upper_bound<T: Field>(
    n: &[[T; 4]; 3],
    h_upper: &[T; 4],
    d_sq_upper: &[T; 3],
    d: &[T; 4],
) -> Result<T, ReductionError> {
    let mut c2 = T::zero();
    let mut c4 = T::zero();
    for i in 0..4 {
        c2 = c2 + (h_upper[i].clone() * n[1][i].clone()).div(&d[i])?;
    }
    for i in 1..4 {
        c4 = c4 + d_sq_upper[i - 1].clone() * d[i].clone() * n[0][i].clone();
    }
    Ok(T::from_i64(4) * c2 * c4)
}
