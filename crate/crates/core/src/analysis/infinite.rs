//! Dephasing gain on an infinite chain whose left half traps.
//!
//! The chain is truncated to `left` trapping sites and `right` free sites
//! (the particle starts on free site `offset`, counted from the trap edge).
//! Each side is doubled until doing so moves the efficiency by less than the
//! tolerance, both at zero dephasing and at the optimum.

use super::dephasing::{optimize_dephasing_from, DephasingSearch};
use super::EnaqtResult;
use crate::error::{Error, Result};
use crate::model::{DensityState, SystemSpec};
use crate::solver::{efficiency_direct, efficiency_propagation};

/// Smallest loss rate accepted; below it the truncated chain grows too long.
pub const INFINITE_MU_CUTOFF: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteOptions {
    /// Largest accepted change of the efficiency under doubling either side.
    pub tolerance: f64,
    /// Initial size of each side, in units of `1 / mu`.
    pub sites_per_inverse_mu: f64,
    /// Cap on the total site count of any evaluated truncation.
    pub max_sites: usize,
    /// Also propagate the final truncation at the optimum and report the gap.
    pub cross_check: bool,
    pub propagation_tol: f64,
    pub dephasing: DephasingSearch,
}

impl Default for InfiniteOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            sites_per_inverse_mu: 4.0,
            max_sites: 256,
            cross_check: true,
            propagation_tol: 1e-10,
            dephasing: DephasingSearch::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteChain {
    pub result: EnaqtResult,
    pub left: usize,
    pub right: usize,
    /// Largest efficiency change seen under the final doubling checks.
    pub truncation_delta: f64,
    /// `|eta_propagated - eta_direct|` at the optimum, when cross-checked.
    pub propagation_delta: Option<f64>,
}

struct Truncation<'a> {
    kappa: f64,
    mu: f64,
    offset: usize,
    opts: &'a InfiniteOptions,
}

impl Truncation<'_> {
    fn spec(&self, left: usize, right: usize, gamma: f64) -> SystemSpec {
        SystemSpec::semi_infinite(left, right, self.offset).with_rates(self.kappa, self.mu, gamma)
    }

    fn eta(&self, left: usize, right: usize, gamma: f64) -> Result<f64> {
        let spec = self.spec(left, right, gamma);
        let rho0 = DensityState::localized(spec.sites, spec.initial_site)?;
        efficiency_direct(&spec, &rho0)
            .map(|r| r.eta)
            .map_err(|e| e.at_gamma(gamma))
    }

    /// Grows `(left, right)` until doubling either side changes eta at `gamma`
    /// by less than the tolerance. Returns the sizes and the final change.
    fn converge(
        &self,
        mut left: usize,
        mut right: usize,
        gamma: f64,
    ) -> Result<(usize, usize, f64)> {
        let cap = self.opts.max_sites;
        loop {
            if (2 * left + right).max(left + 2 * right) > cap {
                return Err(Error::Truncation {
                    achieved_delta: f64::INFINITY,
                    sites: left + right,
                    cap,
                });
            }
            let base = self.eta(left, right, gamma)?;
            let dl = (self.eta(2 * left, right, gamma)? - base).abs();
            let dr = (self.eta(left, 2 * right, gamma)? - base).abs();
            let tol = self.opts.tolerance;
            if dl < tol && dr < tol {
                return Ok((left, right, dl.max(dr)));
            }
            let next_left = if dl >= tol { 2 * left } else { left };
            let next_right = if dr >= tol { 2 * right } else { right };
            if (2 * next_left + next_right).max(next_left + 2 * next_right) > cap {
                return Err(Error::Truncation {
                    achieved_delta: dl.max(dr),
                    sites: left + right,
                    cap,
                });
            }
            left = next_left;
            right = next_right;
        }
    }
}

/// [`infinite_chain_enaqt_with`] with default options.
pub fn infinite_chain_enaqt(kappa: f64, mu: f64, offset: usize) -> Result<InfiniteChain> {
    infinite_chain_enaqt_with(kappa, mu, offset, &InfiniteOptions::default())
}

pub fn infinite_chain_enaqt_with(
    kappa: f64,
    mu: f64,
    offset: usize,
    opts: &InfiniteOptions,
) -> Result<InfiniteChain> {
    if !(mu >= INFINITE_MU_CUTOFF && mu.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "the infinite-chain protocol needs mu >= 0.1",
        });
    }
    crate::model::spec::check_rate("kappa", kappa)?;
    if offset == 0 {
        return Err(Error::InvalidParameter {
            name: "offset",
            value: 0.0,
            reason: "offset must be at least 1",
        });
    }
    let trunc = Truncation {
        kappa,
        mu,
        offset,
        opts,
    };
    let side = ((opts.sites_per_inverse_mu / mu).ceil() as usize).max(2);
    let (mut left, mut right, mut delta) = trunc.converge(side, side.max(offset + 1), 0.0)?;

    let result = loop {
        let spec = trunc.spec(left, right, 0.0);
        let rho0 = DensityState::localized(spec.sites, spec.initial_site)?;
        let result = optimize_dephasing_from(&spec, &rho0, &opts.dephasing)?;
        if result.gamma_opt == 0.0 {
            break result;
        }
        let (l, r, d) = trunc.converge(left, right, result.gamma_opt)?;
        delta = delta.max(d);
        if (l, r) == (left, right) {
            break result;
        }
        // The optimum moved to a regime that needs a longer chain; re-check the
        // coherent baseline there as well.
        let (l0, r0, d0) = trunc.converge(l, r, 0.0)?;
        left = l0;
        right = r0;
        delta = d0;
    };

    let propagation_delta = if opts.cross_check {
        let spec = trunc.spec(left, right, result.gamma_opt);
        let rho0 = DensityState::localized(spec.sites, spec.initial_site)?;
        let prop = efficiency_propagation(&spec, &rho0, opts.propagation_tol)
            .map_err(|e| e.at_gamma(result.gamma_opt))?;
        Some((prop.eta - result.eta_max).abs())
    } else {
        None
    };

    Ok(InfiniteChain {
        result,
        left,
        right,
        truncation_delta: delta,
        propagation_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_trapping_no_efficiency() {
        let opts = InfiniteOptions {
            cross_check: false,
            ..InfiniteOptions::default()
        };
        let r = infinite_chain_enaqt_with(0.0, 0.5, 1, &opts).unwrap();
        assert_eq!(r.result.eta0, 0.0);
        assert_eq!(r.result.xi, 0.0);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(infinite_chain_enaqt(1.0, 0.05, 1).is_err());
        assert!(infinite_chain_enaqt(1.0, 0.5, 0).is_err());
        assert!(infinite_chain_enaqt(-1.0, 0.5, 1).is_err());
    }

    #[test]
    fn small_cap_reports_truncation_failure() {
        let opts = InfiniteOptions {
            max_sites: 20,
            cross_check: false,
            ..InfiniteOptions::default()
        };
        assert!(matches!(
            infinite_chain_enaqt_with(1.0, 0.5, 1, &opts),
            Err(Error::Truncation { cap: 20, .. })
        ));
    }
}
