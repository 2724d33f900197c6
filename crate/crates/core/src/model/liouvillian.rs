//! Liouvillian superoperator of the dephased, attenuated master equation
//!
//! ```text
//! d rho / dt = -i (H rho - rho H^dagger) + D rho,   (D rho)_nm = -2 gamma (1 - delta_nm) rho_nm
//! ```
//!
//! acting on row-major vectorized density matrices. Small systems get an explicit
//! dense matrix; larger ones apply the stencil directly to the `N x N` form.
//!
//! The augmented operator adds one accumulator coordinate that collects
//! `2 kappa rho_tt` from each trap population and never feeds back into the
//! state sector. Its diagonal entry is `epsilon`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::hamiltonian::Hamiltonian;
use super::spec::SystemSpec;
use super::state::{population_index, vec_index};
use crate::error::{Error, Result};

/// Largest site count stored as an explicit dense superoperator.
pub const DENSE_SITE_LIMIT: usize = 16;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Dense(DMatrix<Complex64>),
    MatrixFree,
}

/// Extra accumulator row of the augmented operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    /// `(population coordinate, 2 kappa)` pairs feeding the accumulator.
    pub couplings: Vec<(usize, f64)>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    hamiltonian: Hamiltonian,
    gamma: f64,
    accumulator: Option<Accumulator>,
    repr: Representation,
}

/// Liouvillian of `spec`, dense up to [`DENSE_SITE_LIMIT`] sites.
pub fn build_liouvillian(spec: &SystemSpec) -> Result<Superoperator> {
    if spec.sites <= DENSE_SITE_LIMIT {
        Superoperator::dense(spec)
    } else {
        Superoperator::matrix_free(spec)
    }
}

/// `(N^2 + 1)`-dimensional operator with the accumulator in the last coordinate.
pub fn build_augmented_liouvillian(spec: &SystemSpec, epsilon: f64) -> Result<Superoperator> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "epsilon must be positive and finite",
        });
    }
    let base = build_liouvillian(spec)?;
    Ok(base.augmented(trap_couplings(spec), epsilon))
}

pub(crate) fn trap_couplings(spec: &SystemSpec) -> Vec<(usize, f64)> {
    spec.trap_sites
        .iter()
        .map(|&t| (population_index(spec.sites, t), 2.0 * spec.kappa))
        .collect()
}

impl Superoperator {
    pub fn dense(spec: &SystemSpec) -> Result<Self> {
        let mut op = Self::matrix_free(spec)?;
        op.repr = Representation::Dense(op.assemble());
        Ok(op)
    }

    pub fn matrix_free(spec: &SystemSpec) -> Result<Self> {
        Ok(Self {
            hamiltonian: Hamiltonian::from_spec(spec)?,
            gamma: spec.gamma,
            accumulator: None,
            repr: Representation::MatrixFree,
        })
    }

    /// Attaches the accumulator row. Any `epsilon >= 0` is accepted here; a zero
    /// diagonal gives the generator used for time propagation.
    pub(crate) fn augmented(mut self, couplings: Vec<(usize, f64)>, epsilon: f64) -> Self {
        self.accumulator = Some(Accumulator { couplings, epsilon });
        if let Representation::Dense(_) = self.repr {
            self.repr = Representation::Dense(self.assemble());
        }
        self
    }

    pub fn sites(&self) -> usize {
        self.hamiltonian.sites()
    }

    /// `N^2`, or `N^2 + 1` with an accumulator.
    pub fn dim(&self) -> usize {
        let n = self.sites();
        n * n + usize::from(self.accumulator.is_some())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn accumulator(&self) -> Option<&Accumulator> {
        self.accumulator.as_ref()
    }

    pub fn accumulator_index(&self) -> Option<usize> {
        self.accumulator
            .as_ref()
            .map(|_| self.sites() * self.sites())
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Representation::Dense(_))
    }

    /// Diagonal of the state sector at `(n, m)`.
    #[inline]
    pub(crate) fn diagonal(&self, n: usize, m: usize) -> Complex64 {
        let h = self.hamiltonian.onsite();
        let dephasing = if n == m { 0.0 } else { 2.0 * self.gamma };
        -I * h[n] + I * h[m].conj() - dephasing
    }

    /// Explicit matrix, regardless of the stored representation.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match &self.repr {
            Representation::Dense(m) => m.clone(),
            Representation::MatrixFree => self.assemble(),
        }
    }

    fn assemble(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        self.for_each_entry(|r, c, v| out[(r, c)] += v);
        out
    }

    /// Visits every structurally nonzero entry `(row, col, value)`.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, Complex64)) {
        let n = self.sites();
        let v = Complex64::new(self.hamiltonian.coupling(), 0.0);
        for a in 0..n {
            for b in 0..n {
                let row = vec_index(n, a, b);
                f(row, row, self.diagonal(a, b));
                // -i H rho: rho[p, b] for p adjacent to a
                for &p in self.hamiltonian.neighbors(a) {
                    f(row, vec_index(n, p, b), -I * v);
                }
                // +i rho H^dagger: rho[a, q] for q adjacent to b
                for &q in self.hamiltonian.neighbors(b) {
                    f(row, vec_index(n, a, q), I * v);
                }
            }
        }
        if let Some(acc) = &self.accumulator {
            let row = n * n;
            for &(col, value) in &acc.couplings {
                f(row, col, Complex64::new(value, 0.0));
            }
            f(row, row, Complex64::new(acc.epsilon, 0.0));
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    /// `y = L x`.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(
            x.len(),
            self.dim(),
            "operand length must match operator dimension"
        );
        assert_eq!(
            y.len(),
            self.dim(),
            "output length must match operator dimension"
        );
        match &self.repr {
            Representation::Dense(m) => {
                for (r, out) in y.iter_mut().enumerate() {
                    *out = m.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            Representation::MatrixFree => self.apply_stencil(x, y),
        }
    }

    fn apply_stencil(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.sites();
        let iv = I * self.hamiltonian.coupling();
        for a in 0..n {
            let row_a = &x[a * n..(a + 1) * n];
            for b in 0..n {
                let mut acc = self.diagonal(a, b) * row_a[b];
                let mut hop = ZERO;
                for &p in self.hamiltonian.neighbors(a) {
                    hop -= x[p * n + b];
                }
                for &q in self.hamiltonian.neighbors(b) {
                    hop += row_a[q];
                }
                acc += iv * hop;
                y[a * n + b] = acc;
            }
        }
        if let Some(accum) = &self.accumulator {
            let idx = n * n;
            let mut total = Complex64::new(accum.epsilon, 0.0) * x[idx];
            for &(col, value) in &accum.couplings {
                total += x[col] * value;
            }
            y[idx] = total;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hamiltonian::ComplexMatrix;

    fn kronecker_delta(a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            0.0
        }
    }

    /// Entry formula written out from the master equation on basis matrices.
    fn element(h: &ComplexMatrix, gamma: f64, n: usize, m: usize, p: usize, q: usize) -> Complex64 {
        -I * h[(n, p)] * kronecker_delta(m, q) + I * h[(m, q)].conj() * kronecker_delta(n, p)
            - 2.0
                * gamma
                * (1.0 - kronecker_delta(n, m))
                * kronecker_delta(n, p)
                * kronecker_delta(m, q)
    }

    fn three_site() -> SystemSpec {
        SystemSpec::chain(3, 0, 1).with_rates(0.1, 0.01, 0.319)
    }

    #[test]
    fn entries_match_element_formula() {
        for spec in [
            three_site(),
            SystemSpec::ring(4, 1, 3).with_rates(0.7, 0.2, 1.3),
            SystemSpec::chain(2, 1, 0).with_rates(2.0, 0.0, 0.5),
        ] {
            let n = spec.sites;
            let h = Hamiltonian::from_spec(&spec).unwrap().to_dense();
            let l = build_liouvillian(&spec).unwrap().to_dense();
            for a in 0..n {
                for b in 0..n {
                    for p in 0..n {
                        for q in 0..n {
                            let want = element(&h, spec.gamma, a, b, p, q);
                            let got = l[(a * n + b, p * n + q)];
                            assert!((want - got).norm() < 1e-14, "({a},{b}),({p},{q})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_free_matches_dense() {
        let spec = SystemSpec::ring(5, 2, 0).with_rates(0.4, 0.05, 0.8);
        let dense = Superoperator::dense(&spec).unwrap();
        let free = Superoperator::matrix_free(&spec).unwrap();
        let x: Vec<Complex64> = (0..25)
            .map(|k| Complex64::new((k as f64).sin(), (0.3 * k as f64).cos()))
            .collect();
        let yd = dense.apply(&x);
        let yf = free.apply(&x);
        for (a, b) in yd.iter().zip(&yf) {
            assert!((a - b).norm() < 1e-13);
        }
        assert_eq!(dense.to_dense(), free.to_dense());
    }

    #[test]
    fn action_is_master_equation() {
        let spec = three_site();
        let h = Hamiltonian::from_spec(&spec).unwrap().to_dense();
        let rho = ComplexMatrix::from_fn(3, 3, |r, c| {
            Complex64::new((r + 2 * c) as f64 * 0.1, r as f64 - c as f64)
        });
        let mut expect = (&h * &rho - &rho * h.adjoint()) * (-I);
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    expect[(r, c)] -= 2.0 * spec.gamma * rho[(r, c)];
                }
            }
        }
        let x: Vec<Complex64> = (0..9).map(|k| rho[(k / 3, k % 3)]).collect();
        let y = build_liouvillian(&spec).unwrap().apply(&x);
        for k in 0..9 {
            assert!((y[k] - expect[(k / 3, k % 3)]).norm() < 1e-14);
        }
    }

    #[test]
    fn augmented_structure() {
        let spec = SystemSpec::chain(3, 0, 1).with_rates(0.1, 0.01, 0.0);
        let aug = build_augmented_liouvillian(&spec, 0.5).unwrap();
        assert_eq!(aug.dim(), 10);
        assert_eq!(aug.accumulator_index(), Some(9));
        let m = aug.to_dense();
        let base = build_liouvillian(&spec).unwrap().to_dense();
        assert_eq!(m.view((0, 0), (9, 9)), base.view((0, 0), (9, 9)));
        for r in 0..9 {
            assert_eq!(
                m[(r, 9)],
                ZERO,
                "accumulator must not feed the state sector"
            );
        }
        assert_eq!(m[(9, 9)], Complex64::new(0.5, 0.0));
        assert!((m[(9, 0)] - Complex64::new(0.2, 0.0)).norm() < 1e-15);
        let off: usize = (0..9).filter(|&c| m[(9, c)] != ZERO).count();
        assert_eq!(off, 1);
    }

    #[test]
    fn augmented_two_sites() {
        let spec = SystemSpec::chain(2, 0, 1).with_rates(1.0, 0.1, 0.0);
        let m = build_augmented_liouvillian(&spec, 1.0).unwrap().to_dense();
        let entries: Vec<(usize, Complex64)> = (0..4)
            .map(|c| (c, m[(4, c)]))
            .filter(|(_, v)| *v != ZERO)
            .collect();
        assert_eq!(entries, vec![(0, Complex64::new(2.0, 0.0))]);
        assert!(build_augmented_liouvillian(&spec, 0.0).is_err());
        assert!(build_augmented_liouvillian(&spec, -1.0).is_err());
    }

    #[test]
    fn representation_threshold() {
        let small = SystemSpec::chain(DENSE_SITE_LIMIT, 0, 1);
        let large = SystemSpec::chain(DENSE_SITE_LIMIT + 1, 0, 1);
        assert!(build_liouvillian(&small).unwrap().is_dense());
        assert!(!build_liouvillian(&large).unwrap().is_dense());
    }
}
