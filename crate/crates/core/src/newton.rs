//! Damped Newton iteration for square nonlinear systems with analytic
//! Jacobians.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{equilibrated_condition, Lu, Matrix};

/// A square system `F(x) = 0`.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;

    /// Writes `F(x)` into `f` and, when given, the row-major Jacobian into
    /// `jac`.
    fn eval(&self, x: &[f64], f: &mut [f64], jac: Option<&mut Matrix>);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    pub max_iterations: usize,
    /// Step halvings tried when the residual does not decrease.
    pub max_halvings: usize,
    /// Equilibrated 1-norm condition number above which the Jacobian counts
    /// as degenerate.
    pub max_condition: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { max_iterations: 50, max_halvings: 8, max_condition: 1e12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub x: Vec<f64>,
    /// Max-norm of `F` at `x`.
    pub residual: f64,
    pub iterations: usize,
    /// Condition estimate of the Jacobian at the last factorisation.
    pub condition: f64,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(libm::fabs(*x)) })
}

/// Runs damped Newton from `x0` until `‖F‖∞ <= tol`.
pub fn solve<S: NonlinearSystem>(system: &S, x0: &[f64], tol: f64, cfg: &NewtonConfig) -> Result<NewtonSolution> {
    let n = system.dim();
    assert_eq!(x0.len(), n);
    let mut x = x0.to_vec();
    let mut f = vec![0.0; n];
    let mut jac = Matrix::zeros(n);
    let mut trial = vec![0.0; n];
    let mut f_trial = vec![0.0; n];
    system.eval(&x, &mut f, Some(&mut jac));
    let mut res = max_norm(&f);
    let mut condition = f64::NAN;
    for it in 0..=cfg.max_iterations {
        if res <= tol {
            if condition.is_nan() {
                condition = equilibrated_condition(&jac);
            }
            return Ok(NewtonSolution { x, residual: res, iterations: it, condition });
        }
        if it == cfg.max_iterations || !res.is_finite() {
            break;
        }
        condition = equilibrated_condition(&jac);
        if !(condition <= cfg.max_condition) {
            return Err(Error::DegenerateJacobian { condition });
        }
        let lu = Lu::factor(&jac).ok_or(Error::DegenerateJacobian { condition: f64::INFINITY })?;
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = lu.solve(&neg);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            for i in 0..n {
                trial[i] = x[i] + lambda * step[i];
            }
            system.eval(&trial, &mut f_trial, None);
            if max_norm(&f_trial) < res {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // keep the smallest damped step; the next iteration decides
            for i in 0..n {
                trial[i] = x[i] + lambda * 2.0 * step[i];
            }
        }
        x.copy_from_slice(&trial);
        system.eval(&x, &mut f, Some(&mut jac));
        res = max_norm(&f);
        condition = f64::NAN;
    }
    Err(Error::NoConvergence { iterations: cfg.max_iterations, residual: res })
}
