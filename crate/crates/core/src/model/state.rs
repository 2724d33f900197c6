use num_complex::Complex64;

use super::hamiltonian::ComplexMatrix;
use crate::error::{Error, Result};

/// Row-major index of `rho[n, m]` in the vectorized density matrix.
#[inline]
pub fn vec_index(sites: usize, n: usize, m: usize) -> usize {
    n * sites + m
}

/// Coordinate of the population of `site`.
#[inline]
pub fn population_index(sites: usize, site: usize) -> usize {
    site * sites + site
}

/// Vectorized density matrix `rho[n, m]` at index `n * N + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    sites: usize,
    vec: Vec<Complex64>,
    time: f64,
}

impl DensityState {
    /// `|site><site|`.
    pub fn localized(sites: usize, site: usize) -> Result<Self> {
        if site >= sites {
            return Err(Error::InvalidSite { index: site, sites });
        }
        let mut vec = vec![Complex64::new(0.0, 0.0); sites * sites];
        vec[population_index(sites, site)] = Complex64::new(1.0, 0.0);
        Ok(Self {
            sites,
            vec,
            time: 0.0,
        })
    }

    /// `|psi><psi|` for the normalized `amplitudes`.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let sites = amplitudes.len();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if sites == 0 || norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateInput(
                "pure state needs a nonzero amplitude vector",
            ));
        }
        let psi: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        let mut vec = Vec::with_capacity(sites * sites);
        for n in 0..sites {
            for m in 0..sites {
                vec.push(psi[n] * psi[m].conj());
            }
        }
        Ok(Self {
            sites,
            vec,
            time: 0.0,
        })
    }

    pub fn from_vec(sites: usize, vec: Vec<Complex64>, time: f64) -> Result<Self> {
        if vec.len() != sites * sites {
            return Err(Error::InvalidSize {
                size: vec.len(),
                min: sites * sites,
            });
        }
        Ok(Self { sites, vec, time })
    }

    pub fn from_matrix(rho: &ComplexMatrix) -> Result<Self> {
        let sites = rho.nrows();
        if rho.ncols() != sites {
            return Err(Error::DegenerateInput("density matrix must be square"));
        }
        let mut vec = Vec::with_capacity(sites * sites);
        for n in 0..sites {
            for m in 0..sites {
                vec.push(rho[(n, m)]);
            }
        }
        Ok(Self {
            sites,
            vec,
            time: 0.0,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.vec
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.vec[vec_index(self.sites, n, m)]
    }

    pub fn population(&self, site: usize) -> f64 {
        self.vec[population_index(self.sites, site)].re
    }

    pub fn trace(&self) -> f64 {
        (0..self.sites).map(|m| self.population(m)).sum()
    }

    /// Imaginary part of the trace; zero for a hermitian state.
    pub fn trace_imag(&self) -> f64 {
        (0..self.sites)
            .map(|m| self.vec[population_index(self.sites, m)].im)
            .sum()
    }

    /// `max |rho - rho^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..self.sites {
            for m in n..self.sites {
                worst = worst.max((self.get(n, m) - self.get(m, n).conj()).norm());
            }
        }
        worst
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let mut total = 0.0;
        for n in 0..self.sites {
            for m in 0..self.sites {
                total += (self.get(n, m) * self.get(m, n)).re;
            }
        }
        total
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(self.sites, self.sites, &self.vec)
    }

    /// Checks that this is a usable initial state: hermitian, trace in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let trace = self.trace();
        if !(trace.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&trace)) {
            return Err(Error::InvalidParameter {
                name: "trace",
                value: trace,
                reason: "density matrix trace must lie in [0, 1]",
            });
        }
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "hermiticity",
                value: herm,
                reason: "density matrix must be hermitian",
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn localized_state() {
        let rho = DensityState::localized(3, 1).unwrap();
        assert_eq!(rho.trace(), 1.0);
        assert_eq!(rho.population(1), 1.0);
        assert_eq!(rho.as_slice()[4], Complex64::new(1.0, 0.0));
        assert!(DensityState::localized(3, 3).is_err());
    }

    #[test]
    fn pure_state_normalizes() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho =
            DensityState::pure(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!((rho.get(0, 1).re - 0.5).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!(rho.hermiticity_error() < 1e-15);
        let plus = DensityState::pure(&[Complex64::new(s, 0.0), Complex64::new(0.0, s)]).unwrap();
        assert!((plus.get(0, 1) - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!(plus.validate().is_ok());
    }

    #[test]
    fn matrix_round_trip() {
        let rho = DensityState::pure(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-1.0, 1.0),
        ])
        .unwrap();
        let back = DensityState::from_matrix(&rho.to_matrix()).unwrap();
        assert_eq!(back, rho);
    }
}
