use std::fmt;

use crate::error::{Error, Result};

/// Network geometry of a model instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Open chain with nearest-neighbour coupling.
    Chain,
    /// Chain closed by an extra bond between the first and last site.
    Ring,
    /// Truncated infinite chain: a trap region on the left, a free region on the right.
    SemiInfinite,
}

impl Topology {
    pub fn min_sites(self) -> usize {
        match self {
            Topology::Chain | Topology::SemiInfinite => 2,
            Topology::Ring => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Chain => "chain",
            Topology::Ring => "ring",
            Topology::SemiInfinite => "semi-infinite",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Complete description of one transport problem.
///
/// Sites are 0-based. Rates are in units of the coupling `coupling` (ħ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub topology: Topology,
    pub sites: usize,
    pub coupling: f64,
    pub trap_sites: Vec<usize>,
    pub initial_site: usize,
    pub kappa: f64,
    pub mu: f64,
    pub gamma: f64,
    /// Distance of the initial site from the trap-region edge (semi-infinite only).
    pub offset: Option<usize>,
}

impl SystemSpec {
    /// Chain with a single trap. Rates start at zero.
    pub fn chain(sites: usize, trap: usize, initial: usize) -> Self {
        Self::single_trap(Topology::Chain, sites, trap, initial)
    }

    pub fn ring(sites: usize, trap: usize, initial: usize) -> Self {
        Self::single_trap(Topology::Ring, sites, trap, initial)
    }

    fn single_trap(topology: Topology, sites: usize, trap: usize, initial: usize) -> Self {
        Self {
            topology,
            sites,
            coupling: 1.0,
            trap_sites: vec![trap],
            initial_site: initial,
            kappa: 0.0,
            mu: 0.0,
            gamma: 0.0,
            offset: None,
        }
    }

    /// Truncated infinite chain: sites `0..left` trap, the particle starts `offset`
    /// sites to the right of the last trap site, `right` free sites follow.
    pub fn semi_infinite(left: usize, right: usize, offset: usize) -> Self {
        Self {
            topology: Topology::SemiInfinite,
            sites: left + right,
            coupling: 1.0,
            trap_sites: (0..left).collect(),
            initial_site: (left + offset).saturating_sub(1),
            kappa: 0.0,
            mu: 0.0,
            gamma: 0.0,
            offset: Some(offset),
        }
    }

    pub fn with_rates(mut self, kappa: f64, mu: f64, gamma: f64) -> Self {
        self.kappa = kappa;
        self.mu = mu;
        self.gamma = gamma;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_kappa_mu(mut self, kappa: f64, mu: f64) -> Self {
        self.kappa = kappa;
        self.mu = mu;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_initial(mut self, initial: usize) -> Self {
        self.initial_site = initial;
        self
    }

    pub fn is_trap(&self, site: usize) -> bool {
        self.trap_sites.contains(&site)
    }

    pub fn validate(&self) -> Result<()> {
        let min = self.topology.min_sites();
        if self.sites < min {
            return Err(Error::InvalidSize {
                size: self.sites,
                min,
            });
        }
        if !self.coupling.is_finite() {
            return Err(Error::InvalidParameter {
                name: "coupling",
                value: self.coupling,
                reason: "coupling must be finite",
            });
        }
        check_rate("kappa", self.kappa)?;
        check_rate("mu", self.mu)?;
        check_rate("gamma", self.gamma)?;
        for &site in self.trap_sites.iter().chain(Some(&self.initial_site)) {
            if site >= self.sites {
                return Err(Error::InvalidSite {
                    index: site,
                    sites: self.sites,
                });
            }
        }
        if self.trap_sites.len() == 1 && self.trap_sites[0] == self.initial_site {
            return Err(Error::CoincidentSites {
                site: self.initial_site,
            });
        }
        if self.topology == Topology::SemiInfinite {
            match self.offset {
                Some(offset) if offset >= 1 => {
                    if self.is_trap(self.initial_site) {
                        return Err(Error::CoincidentSites {
                            site: self.initial_site,
                        });
                    }
                }
                _ => {
                    return Err(Error::InvalidParameter {
                        name: "offset",
                        value: self.offset.unwrap_or(0) as f64,
                        reason: "offset must be at least 1",
                    })
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn check_rate(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate { name, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rules() {
        assert!(SystemSpec::chain(3, 0, 1).validate().is_ok());
        assert_eq!(
            SystemSpec::chain(3, 1, 1).validate(),
            Err(Error::CoincidentSites { site: 1 })
        );
        assert!(matches!(
            SystemSpec::chain(3, 0, 3).validate(),
            Err(Error::InvalidSite { index: 3, .. })
        ));
        assert!(matches!(
            SystemSpec::chain(1, 0, 0).validate(),
            Err(Error::InvalidSize { size: 1, min: 2 })
        ));
        assert!(matches!(
            SystemSpec::ring(2, 0, 1).validate(),
            Err(Error::InvalidSize { min: 3, .. })
        ));
        assert!(matches!(
            SystemSpec::chain(3, 0, 1)
                .with_rates(0.1, -1.0, 0.0)
                .validate(),
            Err(Error::InvalidRate { name: "mu", .. })
        ));
        assert!(matches!(
            SystemSpec::chain(3, 0, 1)
                .with_rates(f64::NAN, 0.0, 0.0)
                .validate(),
            Err(Error::InvalidRate { name: "kappa", .. })
        ));
    }

    #[test]
    fn semi_infinite_layout() {
        let spec = SystemSpec::semi_infinite(4, 6, 1);
        assert_eq!(spec.sites, 10);
        assert_eq!(spec.trap_sites, vec![0, 1, 2, 3]);
        assert_eq!(spec.initial_site, 4);
        assert!(spec.validate().is_ok());
        assert_eq!(SystemSpec::semi_infinite(4, 6, 3).initial_site, 6);
        assert!(SystemSpec::semi_infinite(4, 6, 0).validate().is_err());
    }
}
