//! Quantifying environment-assisted transport: dephasing optimization, searches
//! over trapping and loss rates, closed forms and weak-attenuation limits.

mod closed_form;
mod dephasing;
mod infinite;
mod limits;
mod search;
mod symmetry;

pub use closed_form::{eta3_closed_form, no_enaqt_polynomial, no_enaqt_region};
pub use dephasing::{
    efficiency_curve, optimize_dephasing, optimize_dephasing_from, DephasingSearch, GAMMA_GRID_MAX,
    GAMMA_GRID_MIN, GAMMA_GRID_POINTS,
};
pub use infinite::{
    infinite_chain_enaqt, infinite_chain_enaqt_with, InfiniteChain, InfiniteOptions,
    INFINITE_MU_CUTOFF,
};
pub use limits::{
    average_population, chain_amplitude, circle_max_enaqt, dephased_efficiency_estimate,
    enaqt_estimate, AveragePopulation,
};
pub use search::{
    log_grid, max_enaqt, max_enaqt_with, plane_sweep, MaxEnaqt, MaxEnaqtOptions, PlaneMap,
    SweepTarget,
};
pub use symmetry::{symmetry_split, SymmetrySplit};

/// Gain in efficiency from the best dephasing rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnaqtResult {
    /// Efficiency without dephasing.
    pub eta0: f64,
    pub eta_max: f64,
    /// Maximizing dephasing rate; 0 when no dephasing helps.
    pub gamma_opt: f64,
    /// `eta_max - eta0`, never negative.
    pub xi: f64,
}

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always follows input order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}
