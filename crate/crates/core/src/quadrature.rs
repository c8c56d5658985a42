//! Periodic trapezoidal rule.
//!
//! For smooth periodic integrands the equally weighted node sum converges
//! geometrically in the number of nodes, so the rule is run at a fixed node
//! count and doubled until two successive estimates agree.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicTrapezoid {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
}

impl Default for PeriodicTrapezoid {
    fn default() -> Self {
        Self {
            initial_nodes: 2048,
            max_nodes: 1 << 22,
            rel_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    /// Mean of the integrand over one period.
    pub mean: f64,
    pub nodes: usize,
    /// `|last − previous|` at termination.
    pub last_change: f64,
}

impl PeriodicTrapezoid {
    /// Mean of `f(θ)` over `θ ∈ [0, 2π)`.
    pub fn mean<F>(&self, f: F) -> Result<QuadratureEstimate>
    where
        F: Fn(f64) -> f64,
    {
        let mut n = self.initial_nodes.max(1);
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for k in 0..n {
            let v = f(TAU * k as f64 / n as f64);
            sum += v;
            abs_sum += v.abs();
        }
        let mut mean = sum / n as f64;
        if !mean.is_finite() {
            return Err(Error::Numerical {
                message: "integrand is not finite".into(),
                last_estimate: mean,
                nodes: n,
            });
        }
        loop {
            if 2 * n > self.max_nodes {
                return Err(Error::Numerical {
                    message: format!(
                        "periodic trapezoid did not reach relative tolerance {:e}",
                        self.rel_tol
                    ),
                    last_estimate: mean,
                    nodes: n,
                });
            }
            // new nodes sit halfway between the old ones
            let step = TAU / n as f64;
            for k in 0..n {
                let v = f(step * (k as f64 + 0.5));
                sum += v;
                abs_sum += v.abs();
            }
            n *= 2;
            let refined = sum / n as f64;
            let change = (refined - mean).abs();
            if !refined.is_finite() {
                return Err(Error::Numerical {
                    message: "integrand is not finite".into(),
                    last_estimate: refined,
                    nodes: n,
                });
            }
            mean = refined;
            // integrands that cancel to zero can only converge to rounding level
            let floor = 64.0 * f64::EPSILON * abs_sum / n as f64;
            if change <= self.rel_tol * refined.abs() || change <= floor {
                return Ok(QuadratureEstimate {
                    mean,
                    nodes: n,
                    last_change: change,
                });
            }
        }
    }

    /// Mean of `f(x)` over `x ∈ [0, period)`.
    pub fn mean_over_period<F>(&self, period: f64, f: F) -> Result<QuadratureEstimate>
    where
        F: Fn(f64) -> f64,
    {
        self.mean(|theta| f(theta * period / TAU))
    }
}
