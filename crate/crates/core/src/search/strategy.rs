//! Minimisation strategies over `(d_1, d_2, d_3)`, registered by name.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::Objective;
use crate::reduction::ReducedSystem;

/// The box searched for `(d_1, d_2, d_3)`; `d_0 = 1` throughout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DSpace {
    #[serde(default = "DSpace::default_lo")]
    pub lo: f64,
    #[serde(default = "DSpace::default_hi")]
    pub hi: f64,
    /// Points per axis of the log-spaced grid.
    #[serde(default = "DSpace::default_points")]
    pub points: usize,
    /// Explicit per-axis grids, replacing the log-spaced ones.
    #[serde(default)]
    pub axes: Option<[Vec<f64>; 3]>,
}

impl Default for DSpace {
    fn default() -> Self {
        DSpace {
            lo: Self::default_lo(),
            hi: Self::default_hi(),
            points: Self::default_points(),
            axes: None,
        }
    }
}

impl DSpace {
    fn default_lo() -> f64 {
        1e-2
    }

    fn default_hi() -> f64 {
        1e6
    }

    fn default_points() -> usize {
        17
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(format!("d bounds must satisfy 0 < lo <= hi, got [{}, {}]", self.lo, self.hi));
        }
        match &self.axes {
            Some(axes) => {
                if axes.iter().any(|a| a.is_empty()) {
                    return Err("explicit d grids must be nonempty".into());
                }
                if axes.iter().flatten().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err("explicit d grid values must be positive".into());
                }
            }
            None if self.points == 0 => return Err("d grid needs at least one point".into()),
            None => {}
        }
        Ok(())
    }

    pub fn axis(&self, i: usize) -> Vec<f64> {
        if let Some(axes) = &self.axes {
            return axes[i].clone();
        }
        if self.points == 1 {
            return vec![(self.lo * self.hi).sqrt()];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..self.points)
            .map(|j| (a + (b - a) * j as f64 / (self.points - 1) as f64).exp())
            .collect()
    }

    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

/// Counts evaluations of one objective on one reduced system.
pub struct Evaluator<'a> {
    rs: &'a ReducedSystem<f64>,
    objective: &'a dyn Objective,
    count: AtomicU64,
}

impl<'a> Evaluator<'a> {
    pub fn new(rs: &'a ReducedSystem<f64>, objective: &'a dyn Objective) -> Self {
        Evaluator {
            rs,
            objective,
            count: AtomicU64::new(0),
        }
    }

    /// Objective value, `+inf` where it is undefined.
    pub fn value(&self, d: &[f64; 3]) -> f64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.objective
            .float(self.rs, &[1.0, d[0], d[1], d[2]])
            .unwrap_or(f64::INFINITY)
    }

    pub fn evaluations(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Found {
    pub d: [f64; 3],
    pub value: f64,
}

pub trait SearchStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn describe(&self) -> &'static str;

    fn run(&self, eval: &Evaluator<'_>, space: &DSpace, start: Option<[f64; 3]>) -> Found;
}

/// Exhaustive evaluation of the grid.
pub struct GridSearch;

/// Grid start, then multiplicative coordinate steps of 2, 1.1 and 1.01.
pub struct CoordinateDescent;

/// Grid start, then Nelder-Mead in `log d`.
pub struct Simplex;

fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    // Ties go to the earlier grid point so parallel reduction is deterministic.
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal if a.1 <= b.1 => a,
        std::cmp::Ordering::Equal => b,
    }
}

fn grid_minimum(eval: &Evaluator<'_>, space: &DSpace) -> Found {
    let axes = [space.axis(0), space.axis(1), space.axis(2)];
    let (n0, n1, n2) = (axes[0].len(), axes[1].len(), axes[2].len());
    let point = |idx: usize| [axes[0][idx / (n1 * n2)], axes[1][(idx / n2) % n1], axes[2][idx % n2]];
    let (value, idx) = (0..n0 * n1 * n2)
        .into_par_iter()
        .map(|idx| (eval.value(&point(idx)), idx))
        .reduce(|| (f64::INFINITY, usize::MAX), better);
    let d = if idx == usize::MAX { point(0) } else { point(idx) };
    Found { d, value }
}

fn starting_point(eval: &Evaluator<'_>, space: &DSpace, start: Option<[f64; 3]>) -> Found {
    match start {
        Some(d) => Found { d, value: eval.value(&d) },
        None => grid_minimum(eval, space),
    }
}

impl SearchStrategy for GridSearch {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn describe(&self) -> &'static str {
        "every point of the log-spaced grid"
    }

    fn run(&self, eval: &Evaluator<'_>, space: &DSpace, start: Option<[f64; 3]>) -> Found {
        let found = grid_minimum(eval, space);
        match start {
            Some(d) => {
                let v = eval.value(&d);
                if v < found.value {
                    Found { d, value: v }
                } else {
                    found
                }
            }
            None => found,
        }
    }
}

impl SearchStrategy for CoordinateDescent {
    fn name(&self) -> &'static str {
        "coordinate-descent"
    }

    fn describe(&self) -> &'static str {
        "grid start refined by multiplicative coordinate steps"
    }

    fn run(&self, eval: &Evaluator<'_>, space: &DSpace, start: Option<[f64; 3]>) -> Found {
        let mut best = starting_point(eval, space, start);
        for factor in [2.0, 1.1, 1.01] {
            for _ in 0..10_000 {
                let mut improved = false;
                for i in 0..3 {
                    for step in [factor, 1.0 / factor] {
                        let mut d = best.d;
                        d[i] = space.clamp(d[i] * step);
                        if d[i] == best.d[i] {
                            continue;
                        }
                        let v = eval.value(&d);
                        if v < best.value {
                            best = Found { d, value: v };
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
        }
        best
    }
}

impl SearchStrategy for Simplex {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn describe(&self) -> &'static str {
        "grid start refined by Nelder-Mead in log coordinates"
    }

    fn run(&self, eval: &Evaluator<'_>, space: &DSpace, start: Option<[f64; 3]>) -> Found {
        let origin = starting_point(eval, space, start);
        let (lo, hi) = (space.lo.ln(), space.hi.ln());
        let f = |x: &[f64; 3]| -> f64 {
            let d = x.map(|v| v.clamp(lo, hi).exp());
            eval.value(&d)
        };
        let x0 = origin.d.map(f64::ln);
        let mut simplex: Vec<([f64; 3], f64)> = vec![(x0, origin.value)];
        for i in 0..3 {
            let mut x = x0;
            x[i] += std::f64::consts::LN_2;
            simplex.push((x, f(&x)));
        }
        for _ in 0..2_000 {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[3].1 - simplex[0].1;
            if spread.abs() <= 1e-14 * simplex[0].1.abs().max(1e-300) {
                break;
            }
            let centroid: [f64; 3] = std::array::from_fn(|j| simplex[..3].iter().map(|p| p.0[j]).sum::<f64>() / 3.0);
            let along = |t: f64| -> [f64; 3] { std::array::from_fn(|j| centroid[j] + t * (simplex[3].0[j] - centroid[j])) };
            let reflected = along(-1.0);
            let fr = f(&reflected);
            if fr < simplex[0].1 {
                let expanded = along(-2.0);
                let fe = f(&expanded);
                simplex[3] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            } else if fr < simplex[2].1 {
                simplex[3] = (reflected, fr);
            } else {
                let contracted = along(0.5);
                let fc = f(&contracted);
                if fc < simplex[3].1 {
                    simplex[3] = (contracted, fc);
                } else {
                    let best = simplex[0].0;
                    for p in simplex.iter_mut().skip(1) {
                        p.0 = std::array::from_fn(|j| best[j] + 0.5 * (p.0[j] - best[j]));
                        p.1 = f(&p.0);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex[0];
        Found {
            d: x.map(|v| v.clamp(lo, hi).exp()),
            value,
        }
    }
}

/// Every strategy, in registry order.
pub fn strategies() -> Vec<Box<dyn SearchStrategy>> {
    vec![Box::new(CoordinateDescent), Box::new(GridSearch), Box::new(Simplex)]
}

pub fn strategy(name: &str) -> Option<Box<dyn SearchStrategy>> {
    strategies().into_iter().find(|s| s.name() == name.to_ascii_lowercase())
}
