//! Dykstra's alternating projection onto an intersection of halfspaces.
//!
//! For a halfspace the Dykstra increment is always a nonnegative multiple of
//! the normal, so each increment is stored as a scalar `μ_j` with
//! `p_j = μ_j a_j`. At convergence `x − Π(x) = Σ_j μ_j a_j`, i.e. the `μ_j`
//! are the KKT multipliers of the projection problem.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    /// `b − ⟨a, x⟩`; nonnegative inside.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }

    /// Closed-form projection `x − max(⟨a,x⟩ − b, 0) a / ‖a‖²`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let viol = -self.slack(x);
        let nn = dot(&self.normal, &self.normal);
        if viol <= 0.0 {
            return x.to_vec();
        }
        x.iter()
            .zip(&self.normal)
            .map(|(xi, ai)| xi - viol / nn * ai)
            .collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DykstraOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DykstraOptions {
    fn default() -> Self {
        DykstraOptions {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DykstraSolution {
    pub point: Vec<f64>,
    /// `μ_j ≥ 0` with `x − point = Σ μ_j a_j`.
    pub multipliers: Vec<f64>,
    /// Full sweeps over the halfspaces (0 when `x` was already feasible).
    pub cycles: usize,
}

/// Projects `x` onto `∩ halfspaces`, returning only the point.
pub fn dykstra_project(halfspaces: &[Halfspace], x: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    dykstra_solve(halfspaces, x, DykstraOptions { tol, max_iter }).map(|s| s.point)
}

const DIVERGENCE_WINDOW: usize = 256;

pub fn dykstra_solve(halfspaces: &[Halfspace], x0: &[f64], opts: DykstraOptions) -> Result<DykstraSolution> {
    if halfspaces.is_empty() {
        return Err(Error::input("halfspace list is empty"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::input("tol must be positive"));
    }
    let d = x0.len();
    let norms2: Vec<f64> = halfspaces
        .iter()
        .map(|h| {
            if h.normal.len() != d {
                Err(Error::input(format!("halfspace normal has length {}, point has {d}", h.normal.len())))
            } else {
                Ok(dot(&h.normal, &h.normal))
            }
        })
        .collect::<Result<_>>()?;
    if norms2.iter().any(|&n| !(n > 0.0)) {
        return Err(Error::input("halfspace normal is zero"));
    }
    let m = halfspaces.len();
    let mut mu = vec![0.0; m];
    if halfspaces.iter().all(|h| h.slack(x0) >= 0.0) {
        return Ok(DykstraSolution {
            point: x0.to_vec(),
            multipliers: mu,
            cycles: 0,
        });
    }

    let mut x = x0.to_vec();
    let mut last_total = 0.0;
    let mut last_growth = f64::INFINITY;
    let mut last_violation = f64::INFINITY;
    let mut stalled_checks = 0;
    let mut change = f64::INFINITY;
    for cycle in 1..=opts.max_iter {
        change = 0.0;
        for (j, h) in halfspaces.iter().enumerate() {
            let viol = dot(&h.normal, &x) + mu[j] * norms2[j] - h.offset;
            let new_mu = viol.max(0.0) / norms2[j];
            let step = mu[j] - new_mu;
            if step != 0.0 {
                for (xi, ai) in x.iter_mut().zip(&h.normal) {
                    *xi += step * ai;
                }
            }
            change += step * step * norms2[j];
            mu[j] = new_mu;
        }
        if change <= opts.tol * opts.tol {
            return Ok(DykstraSolution {
                point: x,
                multipliers: mu,
                cycles: cycle,
            });
        }
        if cycle % DIVERGENCE_WINDOW == 0 {
            // Increments of an empty intersection grow linearly while the
            // iterate keeps violating some constraint by a fixed gap.
            let total: f64 = mu.iter().zip(&norms2).map(|(u, n)| u * n.sqrt()).sum();
            let growth = total - last_total;
            let violation = halfspaces
                .iter()
                .map(|h| -h.slack(&x))
                .fold(0.0, f64::max);
            if growth > 0.99 * last_growth
                && growth > 1e3 * opts.tol
                && violation > 0.99 * last_violation
                && violation > 1e3 * opts.tol
            {
                stalled_checks += 1;
                if stalled_checks >= 4 {
                    return Err(Error::Infeasible(format!(
                        "halfspace intersection appears empty (increments grow by {growth:.3e} per {DIVERGENCE_WINDOW} cycles, violation {violation:.3e})"
                    )));
                }
            } else {
                stalled_checks = 0;
            }
            last_total = total;
            last_growth = growth;
            last_violation = violation;
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        residual: change.sqrt(),
    })
}
