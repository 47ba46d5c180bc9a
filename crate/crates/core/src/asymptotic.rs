//! Closed-form bounds for large `|alpha|` and every `k >= 10`.
//!
//! `beta = -alpha > 0`. `sigma` in `(0, 1)` is the slack in the lower bound
//! on the solved coefficients `E_i`.

use serde::Serialize;

/// Relative slack absorbed into float comparisons.
const SLACK: f64 = 1e-12;
/// Comparisons this close to the boundary are flagged.
const MARGINAL: f64 = 1e-6;

/// A float comparison with its distance to the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Check {
    pub holds: bool,
    pub marginal: bool,
}

impl Check {
    /// `lhs <= rhs` up to the float slack.
    fn at_most(lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        Check {
            holds: lhs <= rhs + SLACK * scale,
            marginal: (lhs - rhs).abs() <= MARGINAL * scale,
        }
    }
}

/// `6 (k+1)/k (k+2) log(2/sigma)`, the least `beta` for the slack `sigma`.
pub fn sigma_threshold(k: u64, sigma: f64) -> f64 {
    let k = k as f64;
    6.0 * (k + 1.0) / k * (k + 2.0) * (2.0 / sigma).ln()
}

pub fn sigma_condition(k: u64, beta: f64, sigma: f64) -> Check {
    Check::at_most(sigma_threshold(k, sigma), beta)
}

/// The base whose `beta`-th power drives the bound. Decreasing in `k`
/// with limit `1/2`.
pub fn a_factor(k: u64) -> f64 {
    let k = k as f64;
    let k1 = k + 1.0;
    (0.5 + 3.0 / (2.0 * (2.0 * k + 1.0)))
        * (1.0 + 1.0 / k1).powi(2)
        * (1.0 + 1.0 / (2.0 * k1)).powi(4)
        * (1.0 + 1.0 / (3.0 * k1)).powi(2)
        * (1.0 + 2.0 / (3.0 * k + 2.0)).powi(2)
}

/// `432 beta^2 / ((1 - sigma)^4 k^2) * a(k)^beta`.
pub fn objective_bound(k: u64, beta: f64, sigma: f64) -> f64 {
    let kf = k as f64;
    // Logs keep a(k)^beta finite for large beta.
    let log = (432.0 * beta * beta).ln() - 4.0 * (1.0 - sigma).ln() - 2.0 * kf.ln() + beta * a_factor(k).ln();
    log.exp()
}

/// Both conditions at once.
pub fn admissible(k: u64, beta: f64, sigma: f64) -> bool {
    sigma_condition(k, beta, sigma).holds && objective_bound(k, beta, sigma) < 1.0
}

/// `5k + 700/(k-9)^2`.
pub fn beta_cap(k: u64) -> f64 {
    let k = k as f64;
    5.0 * k + 700.0 / ((k - 9.0) * (k - 9.0))
}

/// The default slack grid: 0.01, 0.05, 0.10, ..., 0.95, 0.985, 0.99.
pub fn default_sigma_grid() -> Vec<f64> {
    let mut grid = vec![0.01];
    grid.extend((1..=19).map(|i| (5 * i) as f64 / 100.0));
    grid.extend([0.985, 0.99]);
    grid
}

/// Smallest integer `beta` for which some grid `sigma` satisfies both
/// conditions, scanning `1..=beta_limit`.
pub fn minimal_beta(k: u64, sigma_grid: &[f64], beta_limit: u64) -> Option<(u64, f64)> {
    (1..=beta_limit).find_map(|beta| {
        sigma_grid
            .iter()
            .copied()
            .filter(|&s| admissible(k, beta as f64, s))
            .min_by(|a, b| {
                objective_bound(k, beta as f64, *a)
                    .partial_cmp(&objective_bound(k, beta as f64, *b))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|s| (beta, s))
    })
}

/// `prod_{s=1..3} (s k + o_s + 1)` for increasing offsets `o`.
fn offset_product(k: u64, offsets: [u64; 3]) -> u128 {
    offsets
        .iter()
        .enumerate()
        .map(|(s, &o)| (s as u128 + 1) * k as u128 + o as u128 + 1)
        .product()
}

/// Product for the column set `{0,1,2,3}` without `column`:
/// `(k+1)(2k+3)(3k+4)` for column 1 and `(k+2)(2k+3)(3k+4)` for column 0.
pub fn leading_product(k: u64, column: usize) -> u128 {
    let offsets: Vec<u64> = (0..4u64).filter(|&o| o as usize != column).collect();
    offset_product(k, [offsets[0], offsets[1], offsets[2]])
}

/// `(k+1)(2k+4)(3k+3)`, the runner-up product for column 1.
pub fn runner_up_product(k: u64) -> u128 {
    let k = k as u128;
    (k + 1) * (2 * k + 4) * (3 * k + 3)
}

/// `(k+1)^4 (k + 2/3)`.
pub fn q1(k: u64) -> f64 {
    let k = k as f64;
    (k + 1.0).powi(4) * (k + 2.0 / 3.0)
}

/// `(k+2)(k+3/2)^2(k+4/3)^2`.
pub fn q2(k: u64) -> f64 {
    let k = k as f64;
    (k + 2.0) * (k + 1.5).powi(2) * (k + 4.0 / 3.0).powi(2)
}

/// `log` of the bracket `[(1-sigma)/3, 3/(1-sigma) (p_3/p_0)^{-beta}]`
/// on `|E_i|`, with `p_3`, `p_0` the leading products of columns 3 and 0.
pub fn e_bracket_log(k: u64, beta: f64, sigma: f64) -> (f64, f64) {
    let ratio = leading_product(k, 3) as f64 / leading_product(k, 0) as f64;
    let lo = ((1.0 - sigma) / 3.0).ln();
    let hi = (3.0 / (1.0 - sigma)).ln() - beta * ratio.ln();
    (lo, hi)
}

/// One published row: `k`, `beta`, `sigma`, printed bound, printed threshold.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PublishedRow {
    pub k: u64,
    pub beta: f64,
    pub sigma: f64,
    pub bound: f64,
    pub threshold: f64,
}

pub const PUBLISHED_BOUNDS: [PublishedRow; 8] = [
    PublishedRow { k: 10, beta: 530.0, sigma: 0.05, bound: 0.994, threshold: 293.0 },
    PublishedRow { k: 11, beta: 165.0, sigma: 0.3, bound: 0.612, threshold: 162.0 },
    PublishedRow { k: 12, beta: 120.0, sigma: 0.6, bound: 0.387, threshold: 110.0 },
    PublishedRow { k: 13, beta: 104.0, sigma: 0.8, bound: 0.490, threshold: 89.0 },
    PublishedRow { k: 14, beta: 98.0, sigma: 0.9, bound: 0.556, threshold: 83.0 },
    PublishedRow { k: 15, beta: 90.0, sigma: 0.93, bound: 0.562, threshold: 84.0 },
    PublishedRow { k: 16, beta: 87.0, sigma: 0.94, bound: 0.864, threshold: 87.0 },
    PublishedRow { k: 17, beta: 88.0, sigma: 0.97, bound: 0.502, threshold: 88.0 },
];

/// Recomputed values for one published row.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub k: u64,
    pub beta: f64,
    pub sigma: f64,
    pub sigma_condition: Check,
    pub threshold: f64,
    pub printed_threshold: f64,
    pub threshold_within_2: bool,
    pub bound: f64,
    pub printed_bound: f64,
    pub bound_below_1: bool,
    pub cap: f64,
    pub beta_within_cap: bool,
}

impl BoundRow {
    pub fn ok(&self) -> bool {
        self.sigma_condition.holds && self.threshold_within_2 && self.bound_below_1 && self.beta_within_cap
    }
}

pub fn evaluate_row(row: &PublishedRow) -> BoundRow {
    let threshold = sigma_threshold(row.k, row.sigma);
    let bound = objective_bound(row.k, row.beta, row.sigma);
    let cap = beta_cap(row.k);
    BoundRow {
        k: row.k,
        beta: row.beta,
        sigma: row.sigma,
        sigma_condition: sigma_condition(row.k, row.beta, row.sigma),
        threshold,
        printed_threshold: row.threshold,
        threshold_within_2: (threshold - row.threshold).abs() <= 2.0,
        bound,
        printed_bound: row.bound,
        bound_below_1: bound < 1.0,
        cap,
        beta_within_cap: row.beta <= cap,
    }
}

pub fn reproduce_bounds() -> Vec<BoundRow> {
    PUBLISHED_BOUNDS.iter().map(evaluate_row).collect()
}

/// Whether `sigma = 0.985`, `beta = 5k` satisfies both conditions at `k`.
pub fn five_k_choice(k: u64) -> bool {
    admissible(k, 5.0 * k as f64, 0.985)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_match_printed_columns() {
        assert!((sigma_threshold(10, 0.05) - 292.159).abs() < 1e-3);
        assert!((sigma_threshold(17, 0.97) - 87.344).abs() < 1e-3);
        for row in reproduce_bounds() {
            assert!(row.ok(), "{row:?}");
        }
    }

    #[test]
    fn a_factor_limits() {
        assert!(a_factor(10) < 1.0);
        assert!((a_factor(10) - 0.97353).abs() < 1e-5);
        assert!((a_factor(1_000_000) - 0.5).abs() < 1e-4);
        for k in 1..100 {
            assert!(a_factor(k + 1) < a_factor(k));
        }
    }

    #[test]
    fn polynomials_expand() {
        for k in 0..50u64 {
            let k128 = k as u128;
            assert_eq!(leading_product(k, 1), 6 * k128.pow(3) + 23 * k128.pow(2) + 29 * k128 + 12);
            assert_eq!(leading_product(k, 0), 6 * k128.pow(3) + 29 * k128.pow(2) + 46 * k128 + 24);
            assert_eq!(runner_up_product(k), 6 * k128.pow(3) + 24 * k128.pow(2) + 30 * k128 + 12);
        }
        assert!((q1(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((q2(0) - 2.0 * 2.25 * 16.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn bound_decays_in_beta() {
        assert!(objective_bound(12, 2000.0, 0.6) < 1e-30);
        assert!(objective_bound(12, 120.0, 0.6) < 1.0);
    }

    #[test]
    fn minimal_beta_within_cap() {
        let grid = default_sigma_grid();
        for k in 10..=60 {
            let (beta, _) = minimal_beta(k, &grid, 2000).unwrap();
            assert!((beta as f64) <= beta_cap(k), "k={k} beta={beta}");
        }
        assert!(minimal_beta(10, &grid, 2000).unwrap().0 <= 530);
        assert!(minimal_beta(11, &grid, 2000).unwrap().0 <= 165);
    }

    #[test]
    fn five_k_rule_for_large_k() {
        assert!((18..=60).all(five_k_choice));
        assert!(!five_k_choice(10));
    }
}
