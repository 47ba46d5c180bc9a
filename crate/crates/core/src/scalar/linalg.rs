use super::{Field, ScalarError};

pub type Mat3<T> = [[T; 3]; 3];
pub type Mat4<T> = [[T; 4]; 4];

pub fn det2<T: Field>(a: &T, b: &T, c: &T, d: &T) -> T {
    a.clone() * d.clone() - b.clone() * c.clone()
}

/// Cofactor expansion along the first row.
pub fn det3<T: Field>(m: &Mat3<T>) -> T {
    let minor = |c0: usize, c1: usize| det2(&m[1][c0], &m[1][c1], &m[2][c0], &m[2][c1]);
    m[0][0].clone() * minor(1, 2) - m[0][1].clone() * minor(0, 2) + m[0][2].clone() * minor(0, 1)
}

/// Laplace expansion along the first row; zero entries are skipped.
pub fn det4<T: Field>(m: &Mat4<T>) -> T {
    let mut acc = T::zero();
    for col in 0..4 {
        let entry = &m[0][col];
        if entry.is_zero() && entry.width() == 0.0 {
            continue;
        }
        let minor: Mat3<T> = std::array::from_fn(|r| {
            let row = &m[r + 1];
            let cols: Vec<usize> = (0..4).filter(|&c| c != col).collect();
            std::array::from_fn(|c| row[cols[c]].clone())
        });
        let term = entry.clone() * det3(&minor);
        acc = if col % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Product of the Euclidean row norms, an upper bound on `|det m|`.
fn hadamard_bound<T: Field>(m: &Mat3<T>) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt())
        .product()
}

/// Solves `m x = rhs` by Cramer's rule.
pub fn cramer_solve3<T: Field>(m: &Mat3<T>, rhs: &[T; 3]) -> Result<[T; 3], ScalarError> {
    let det = det3(m);
    if det.is_degenerate(hadamard_bound(m)) {
        return Err(ScalarError::Singular);
    }
    let inv = det.recip().map_err(|_| ScalarError::Singular)?;
    Ok(std::array::from_fn(|j| {
        let replaced: Mat3<T> =
            std::array::from_fn(|r| std::array::from_fn(|c| if c == j { rhs[r].clone() } else { m[r][c].clone() }));
        det3(&replaced) * inv.clone()
    }))
}
