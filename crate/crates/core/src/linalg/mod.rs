//! Linear solves for Liouvillian systems.

pub mod banded;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

pub use banded::{BandedLu, BandedMatrix};

use crate::model::Superoperator;

/// LU factors of a Liouvillian system, kept so the caller can refine.
#[derive(Debug, Clone)]
pub enum Factorization {
    Dense(LU<Complex64, Dyn, Dyn>),
    /// Banded factors of the site-permuted state sector; `order[k]` is the
    /// permuted position of coordinate `k`.
    Banded {
        lu: BandedLu,
        order: Vec<usize>,
    },
}

impl Factorization {
    pub fn dense(matrix: DMatrix<Complex64>) -> Self {
        Factorization::Dense(matrix.lu())
    }

    /// Factors the state sector of `op` in banded form.
    pub fn banded(op: &Superoperator) -> Self {
        let (band, order) = assemble_banded(op);
        Factorization::Banded {
            lu: band.factor(),
            order,
        }
    }

    /// `max |u_jj| / min |u_jj|`, infinite when a pivot vanishes.
    pub fn pivot_ratio(&self) -> f64 {
        match self {
            Factorization::Dense(lu) => {
                let u = lu.u();
                let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
                for d in u.diagonal().iter() {
                    pmin = pmin.min(d.norm());
                    pmax = pmax.max(d.norm());
                }
                if pmin == 0.0 {
                    f64::INFINITY
                } else {
                    pmax / pmin
                }
            }
            Factorization::Banded { lu, .. } => lu.pivot_ratio(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Factorization::Dense(lu) => lu.l().nrows(),
            Factorization::Banded { order, .. } => order.len(),
        }
    }

    /// `A^{-1} rhs`, or `None` for an exactly singular factorization.
    pub fn solve(&self, rhs: &[Complex64]) -> Option<Vec<Complex64>> {
        match self {
            Factorization::Dense(lu) => lu
                .solve(&DVector::from_column_slice(rhs))
                .map(|x| x.as_slice().to_vec()),
            Factorization::Banded { lu, order } => {
                if lu.is_singular() {
                    return None;
                }
                let mut b = vec![Complex64::new(0.0, 0.0); rhs.len()];
                for (k, &p) in order.iter().enumerate() {
                    b[p] = rhs[k];
                }
                lu.solve_in_place(&mut b);
                Some(order.iter().map(|&p| b[p]).collect())
            }
        }
    }
}

/// Banded form of the state sector of `op`, with sites renumbered so the
/// hopping bandwidth stays small.
pub fn assemble_banded(op: &Superoperator) -> (BandedMatrix, Vec<usize>) {
    let n = op.sites();
    let (position, bandwidth) = op.hamiltonian().banded_order();
    let permuted = |k: usize| position[k / n] * n + position[k % n];
    let half = bandwidth.max(1) * n;
    let mut band = BandedMatrix::zeros(n * n, half, half);
    op.for_each_entry(|r, c, v| {
        if r < n * n && c < n * n {
            band.add(permuted(r), permuted(c), v);
        }
    });
    let order = (0..n * n).map(permuted).collect();
    (band, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_liouvillian, SystemSpec};

    #[test]
    fn banded_and_dense_factorizations_agree() {
        for spec in [
            SystemSpec::chain(6, 2, 4).with_rates(0.3, 0.05, 0.7),
            SystemSpec::ring(5, 0, 2).with_rates(1.1, 0.2, 0.1),
        ] {
            let op = build_liouvillian(&spec).unwrap();
            let dim = op.dim();
            let rhs: Vec<Complex64> = (0..dim)
                .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
                .collect();
            let dense = Factorization::dense(op.to_dense()).solve(&rhs).unwrap();
            let banded = Factorization::banded(&op);
            assert_eq!(banded.dim(), dim);
            let banded = banded.solve(&rhs).unwrap();
            for (a, b) in dense.iter().zip(&banded) {
                assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn conserved_trace_is_singular() {
        let spec = SystemSpec::chain(3, 0, 1).with_rates(0.0, 0.0, 0.5);
        let op = build_liouvillian(&spec).unwrap();
        let f = Factorization::banded(&op);
        assert!(f.pivot_ratio() > 1e12);
    }
}
