//! Environment-assisted transport on ordered tight-binding networks.
//!
//! A single excitation hops along a chain or ring, is lost everywhere at rate
//! `mu`, is trapped at designated sites at rate `kappa`, and dephases at rate
//! `gamma`. The crate computes the trapping efficiency exactly (linear solves of
//! the Liouvillian), by time propagation, and through closed-form limits, and
//! searches for the dephasing rate that maximizes it.
//!
//! ```
//! use enaqt_core::{analysis, SystemSpec};
//!
//! let spec = SystemSpec::chain(3, 0, 1).with_kappa_mu(0.1, 0.01);
//! let result = analysis::optimize_dephasing(&spec).unwrap();
//! assert!((result.gamma_opt - 0.319).abs() < 2e-3);
//! assert!((result.xi - 0.038).abs() < 1e-3);
//! ```

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod model;
pub mod solver;

pub use error::{Error, Result};
pub use model::{DensityState, SystemSpec, Topology};
