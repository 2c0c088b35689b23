//! Derivative-free minimization (Nelder–Mead via `argmin`).

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;

use crate::error::{param, Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    /// Initial edge length along each coordinate axis.
    pub step: f64,
    /// Stop once the standard deviation of the vertex values drops below this.
    pub sd_tolerance: f64,
    pub max_iters: u64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { step: 0.25, sd_tolerance: 1e-15, max_iters: 2000 }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Objective<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let v = (self.0)(x);
        // NaN would stall the simplex ordering
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

/// Minimize `f` from `x0` with an axis-aligned starting simplex.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &SimplexOptions) -> Result<Minimum> {
    if x0.is_empty() {
        return param("cannot minimize over zero coordinates");
    }
    if !(opts.step > 0.0) {
        return param("simplex step must be positive");
    }
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += opts.step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(opts.sd_tolerance)
        .map_err(|e| Error::Configuration(e.to_string()))?;
    let res = Executor::new(Objective(f), solver)
        .configure(|s| s.max_iters(opts.max_iters))
        .run()
        .map_err(|e| Error::Configuration(e.to_string()))?;
    let state = res.state();
    let x = state.get_best_param().cloned().unwrap_or_else(|| x0.to_vec());
    let evaluations = state.get_func_counts().get("cost_count").copied().unwrap_or(0) as usize;
    Ok(Minimum {
        x,
        value: state.get_best_cost(),
        evaluations,
        converged: matches!(
            state.get_termination_status(),
            TerminationStatus::Terminated(TerminationReason::SolverConverged)
        ),
    })
}
