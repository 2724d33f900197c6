//! Trapping efficiency by exact linear solves and by time propagation.
//!
//! The efficiency is `eta = 2 kappa sum_t int_0^inf rho_tt(t) dt`. Because every
//! trajectory eventually leaves the network, `x = int_0^inf vec(rho) dt` solves
//! `L x = -vec(rho0)` and the integral is a single linear solve.

mod propagate;
mod steady;

use std::fmt;

pub use propagate::{
    efficiency_propagation, propagate, propagate_with, survival_probability, PropagateOptions,
    StoreStates, Trajectory, DEFAULT_TOLERANCE,
};
pub use steady::{
    efficiency_accumulator, efficiency_direct, efficiency_regularized, DARK_STATE_MU,
    PIVOT_RATIO_LIMIT, RESIDUAL_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Accumulator,
    Propagation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Accumulator => "accumulator",
            Method::Propagation => "propagation",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Branching ratios of one transport problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    /// Probability of ever being trapped.
    pub eta: f64,
    /// Probability of ever being lost.
    pub eta_loss: f64,
    pub method: Method,
    /// Relative residual of the linear solve; for propagation, the survival
    /// probability left at the end of the run (a bound on the tail).
    pub residual: f64,
}
