//! Tight-binding Hamiltonians with non-hermitian attenuation.
//!
//! The total generator is `H = H0 + H_atten`, where `H0` couples nearest
//! neighbours with strength `V` and `H_atten = -i mu sum |m><m| - i kappa sum |t><t|`
//! removes population uniformly (loss) and at the trap sites (trapping).

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spec::{check_rate, SystemSpec, Topology};
use crate::error::{Error, Result};

/// Dense `N x N` complex matrix.
pub type ComplexMatrix = DMatrix<Complex64>;

/// `H0` of an open chain: `V` on the first off-diagonals, zero elsewhere.
pub fn build_chain_hamiltonian(sites: usize, coupling: f64) -> Result<ComplexMatrix> {
    if sites < 2 {
        return Err(Error::InvalidSize {
            size: sites,
            min: 2,
        });
    }
    let mut h = ComplexMatrix::zeros(sites, sites);
    for m in 0..sites - 1 {
        h[(m, m + 1)] = Complex64::new(coupling, 0.0);
        h[(m + 1, m)] = Complex64::new(coupling, 0.0);
    }
    Ok(h)
}

/// Chain Hamiltonian plus the bond closing site `N-1` back onto site `0`.
pub fn build_ring_hamiltonian(sites: usize, coupling: f64) -> Result<ComplexMatrix> {
    if sites < 3 {
        return Err(Error::InvalidSize {
            size: sites,
            min: 3,
        });
    }
    let mut h = build_chain_hamiltonian(sites, coupling)?;
    h[(0, sites - 1)] = Complex64::new(coupling, 0.0);
    h[(sites - 1, 0)] = Complex64::new(coupling, 0.0);
    Ok(h)
}

/// Diagonal `-i(mu + kappa)` on trap sites and `-i mu` elsewhere.
pub fn build_attenuation(
    sites: usize,
    trap_sites: &[usize],
    kappa: f64,
    mu: f64,
) -> Result<ComplexMatrix> {
    check_rate("kappa", kappa)?;
    check_rate("mu", mu)?;
    if let Some(&bad) = trap_sites.iter().find(|&&t| t >= sites) {
        return Err(Error::InvalidSite { index: bad, sites });
    }
    let mut h = ComplexMatrix::zeros(sites, sites);
    for m in 0..sites {
        h[(m, m)] = Complex64::new(0.0, -mu);
    }
    for &t in trap_sites {
        h[(t, t)] = Complex64::new(0.0, -(mu + kappa));
    }
    Ok(h)
}

/// Sparse form of the full `H`: complex on-site terms plus a uniform real hopping
/// along an adjacency list.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    onsite: Vec<Complex64>,
    coupling: f64,
    neighbors: Vec<Vec<usize>>,
}

impl Hamiltonian {
    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.sites;
        let mut onsite = vec![Complex64::new(0.0, -spec.mu); n];
        for &t in &spec.trap_sites {
            onsite[t] = Complex64::new(0.0, -(spec.mu + spec.kappa));
        }
        let mut neighbors = vec![Vec::with_capacity(2); n];
        for m in 0..n - 1 {
            neighbors[m].push(m + 1);
            neighbors[m + 1].push(m);
        }
        if spec.topology == Topology::Ring {
            neighbors[0].push(n - 1);
            neighbors[n - 1].push(0);
        }
        Ok(Self {
            onsite,
            coupling: spec.coupling,
            neighbors,
        })
    }

    pub fn sites(&self) -> usize {
        self.onsite.len()
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn onsite(&self) -> &[Complex64] {
        &self.onsite
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[site]
    }

    /// Rate at which population is removed from `site` (the anti-hermitian part).
    pub fn attenuation_rate(&self, site: usize) -> f64 {
        -self.onsite[site].im
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.sites();
        let mut h = ComplexMatrix::zeros(n, n);
        for (m, nbrs) in self.neighbors.iter().enumerate() {
            h[(m, m)] = self.onsite[m];
            for &p in nbrs {
                h[(m, p)] += Complex64::new(self.coupling, 0.0);
            }
        }
        h
    }

    /// Site ordering that keeps the hopping bandwidth small (breadth-first from a
    /// lowest-degree site): identity for a chain, zig-zag for a ring.
    pub fn banded_order(&self) -> (Vec<usize>, usize) {
        let n = self.sites();
        let start = (0..n).min_by_key(|&m| self.neighbors[m].len()).unwrap_or(0);
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        while let Some(m) = queue.pop_front() {
            order.push(m);
            for &p in &self.neighbors[m] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        // disconnected sites cannot occur for chain/ring, but keep them anyway
        order.extend((0..n).filter(|&m| !seen[m]));
        let mut position = vec![0; n];
        for (k, &m) in order.iter().enumerate() {
            position[m] = k;
        }
        let bandwidth = self
            .neighbors
            .iter()
            .enumerate()
            .flat_map(|(m, nbrs)| nbrs.iter().map(move |&p| (m, p)))
            .map(|(m, p)| position[m].abs_diff(position[p]))
            .max()
            .unwrap_or(0);
        (position, bandwidth)
    }
}
