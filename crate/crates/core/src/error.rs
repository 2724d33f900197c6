use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size {size}: at least {min} sites required")]
    InvalidSize { size: usize, min: usize },

    #[error("invalid rate {name} = {value}: rates must be finite and non-negative")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("site index {index} out of range for {sites} sites")]
    InvalidSite { index: usize, sites: usize },

    #[error("initial site {site} coincides with a trap site")]
    CoincidentSites { site: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "singular Liouvillian (pivot ratio {pivot_ratio:.3e}, residual {residual:.3e}); \
         a dark state is likely present, use a small positive loss rate mu"
    )]
    Singular { pivot_ratio: f64, residual: f64 },

    #[error("{quantity} has imaginary part {imag:.3e}; expected a real probability")]
    NonReal { quantity: &'static str, imag: f64 },

    #[error("step size underflow at t = {time} (h = {step:.3e}); reduce dephasing or tolerance")]
    Stiffness { time: f64, step: f64 },

    #[error("time {time} outside trajectory range [0, {horizon}]")]
    OutOfRange { time: f64, horizon: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("symmetry violation: {0}")]
    SymmetryViolation(&'static str),

    #[error(
        "truncation did not converge: |delta eta| = {achieved_delta:.3e} with {sites} sites \
         (cap {cap})"
    )]
    Truncation {
        achieved_delta: f64,
        sites: usize,
        cap: usize,
    },

    #[error("solver failed at gamma = {gamma}: {source}")]
    AtDephasing {
        gamma: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips `AtDephasing` context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtDephasing { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn at_gamma(self, gamma: f64) -> Error {
        match self {
            e @ Error::AtDephasing { .. } => e,
            e => Error::AtDephasing {
                gamma,
                source: Box::new(e),
            },
        }
    }
}
