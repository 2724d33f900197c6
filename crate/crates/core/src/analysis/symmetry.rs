use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DensityState, SystemSpec, Topology};
use crate::solver::efficiency_regularized;

/// Efficiencies of the mirror-symmetric and antisymmetric combinations of the
/// initial site and its mirror image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrySplit {
    pub eta_s: f64,
    pub eta_a: f64,
    /// Efficiency of the site-localized start, `(eta_s + eta_a) / 2`.
    pub eta_site: f64,
}

/// Splits transport on an odd chain with the trap in the middle into its
/// inversion-symmetric and antisymmetric sectors.
///
/// The antisymmetric combination has a node on the trap and, without
/// dephasing, never reaches it. `mu = 0` is taken as the `mu -> 0+` limit.
pub fn symmetry_split(spec: &SystemSpec) -> Result<SymmetrySplit> {
    spec.validate()?;
    let n = spec.sites;
    if spec.topology != Topology::Chain {
        return Err(Error::SymmetryViolation(
            "the inversion split needs an open chain",
        ));
    }
    if n.is_multiple_of(2) {
        return Err(Error::SymmetryViolation("an even chain has no middle site"));
    }
    if spec.trap_sites != [n / 2] {
        return Err(Error::SymmetryViolation(
            "the trap must be the single middle site",
        ));
    }
    let site = spec.initial_site;
    let mirror = n - 1 - site;
    let combination = |sign: f64| {
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[site] = Complex64::new(1.0, 0.0);
        amps[mirror] = Complex64::new(sign, 0.0);
        DensityState::pure(&amps)
    };
    let eta_s = efficiency_regularized(spec, &combination(1.0)?)?.eta;
    let eta_a = efficiency_regularized(spec, &combination(-1.0)?)?.eta;
    let eta_site = efficiency_regularized(spec, &DensityState::localized(n, site)?)?.eta;
    Ok(SymmetrySplit {
        eta_s,
        eta_a,
        eta_site,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_site_split() {
        let spec = SystemSpec::chain(3, 1, 0).with_kappa_mu(0.1, 1e-6);
        let s = symmetry_split(&spec).unwrap();
        assert!(s.eta_a < 1e-3);
        assert!((s.eta_site - 0.5).abs() < 1e-3);
        assert!((s.eta_site - 0.5 * (s.eta_s + s.eta_a)).abs() < 1e-10);
    }

    #[test]
    fn dephasing_opens_the_dark_sector() {
        let spec = SystemSpec::chain(5, 2, 0).with_rates(1.0, 1e-6, 1.0);
        let s = symmetry_split(&spec).unwrap();
        assert!(s.eta_site > 0.99);
    }

    #[test]
    fn rejects_asymmetric_geometry() {
        assert!(matches!(
            symmetry_split(&SystemSpec::chain(4, 1, 0).with_kappa_mu(0.1, 0.1)),
            Err(Error::SymmetryViolation(_))
        ));
        assert!(matches!(
            symmetry_split(&SystemSpec::chain(5, 1, 0).with_kappa_mu(0.1, 0.1)),
            Err(Error::SymmetryViolation(_))
        ));
        assert!(matches!(
            symmetry_split(&SystemSpec::ring(5, 2, 0).with_kappa_mu(0.1, 0.1)),
            Err(Error::SymmetryViolation(_))
        ));
    }
}
