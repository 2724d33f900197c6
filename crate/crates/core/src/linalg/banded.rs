//! Banded LU factorization with partial pivoting (the `gbtrf`/`gbtrs` scheme).
//!
//! Column-major band storage with `kl` extra rows reserved for fill-in from row
//! interchanges: entry `(i, j)` lives at `data[j * ldab + kl + ku + i - j]` and is
//! addressable for `-(kl + ku) <= i - j <= kl`.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![ZERO; n * ldab],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    /// Adds `value` to entry `(i, j)`.
    ///
    /// # Panics
    ///
    /// If `(i, j)` lies outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(
            i <= j + self.kl && j <= i + self.ku,
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.offset(i, j);
        self.data[k] += value;
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i > j + self.kl || j > i + self.ku {
            ZERO
        } else {
            self.data[self.offset(i, j)]
        }
    }

    /// Infinity norm of the stored matrix.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    // Column `j` drives the pivot search, the swap and the update at once.
    #[allow(clippy::needless_range_loop)]
    pub fn factor(mut self) -> BandedLu {
        let n = self.n;
        let kl = self.kl;
        let kv = self.kl + self.ku;
        let ldab = self.ldab;
        let data = &mut self.data;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        let mut zero_pivot = false;

        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let diag = j * ldab + kv;
            let mut jp = 0;
            let mut best = data[diag].l1_norm();
            for i in 1..=km {
                let v = data[diag + i].l1_norm();
                if v > best {
                    best = v;
                    jp = i;
                }
            }
            ipiv[j] = j + jp;
            if best == 0.0 {
                zero_pivot = true;
                continue;
            }
            ju = ju.max((j + self.ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let k = c * ldab + (kv + j - c);
                    data.swap(k, k + jp);
                }
            }
            if km == 0 {
                continue;
            }
            let inv = data[diag].inv();
            for v in &mut data[diag + 1..=diag + km] {
                *v *= inv;
            }
            for c in j + 1..=ju {
                let (left, right) = data.split_at_mut(c * ldab);
                let multipliers = &left[diag + 1..=diag + km];
                let top = kv + j - c;
                let factor = right[top];
                if factor == ZERO {
                    continue;
                }
                for (dst, &l) in right[top + 1..=top + km].iter_mut().zip(multipliers) {
                    *dst -= l * factor;
                }
            }
        }

        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
        for j in 0..n {
            let p = data[j * ldab + kv].norm();
            pmin = pmin.min(p);
            pmax = pmax.max(p);
        }
        let pivot_ratio = if zero_pivot || pmin == 0.0 {
            f64::INFINITY
        } else {
            pmax / pmin
        };

        BandedLu {
            matrix: self,
            ipiv,
            pivot_ratio,
        }
    }
}

/// Factors produced by [`BandedMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandedLu {
    matrix: BandedMatrix,
    ipiv: Vec<usize>,
    pivot_ratio: f64,
}

impl BandedLu {
    /// `max |u_jj| / min |u_jj|`; infinite for an exactly singular matrix.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    pub fn is_singular(&self) -> bool {
        !self.pivot_ratio.is_finite()
    }

    /// Overwrites `b` with `A^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let m = &self.matrix;
        let n = m.n;
        assert_eq!(b.len(), n);
        let kv = m.kl + m.ku;
        let ldab = m.ldab;
        let data = &m.data;

        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = m.kl.min(n - 1 - j);
            let bj = b[j];
            if km == 0 || bj == ZERO {
                continue;
            }
            let diag = j * ldab + kv;
            for (dst, &l) in b[j + 1..=j + km]
                .iter_mut()
                .zip(&data[diag + 1..=diag + km])
            {
                *dst -= l * bj;
            }
        }
        for j in (0..n).rev() {
            let diag = j * ldab + kv;
            b[j] /= data[diag];
            let bj = b[j];
            if bj == ZERO {
                continue;
            }
            let lo = j.saturating_sub(kv);
            let start = j * ldab + kv + lo - j;
            for (dst, &u) in b[lo..j].iter_mut().zip(&data[start..diag]) {
                *dst -= u * bj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }

    fn random_banded(n: usize, kl: usize, ku: usize, seed: u64, weak_diag: bool) -> BandedMatrix {
        let mut s = seed;
        let mut a = BandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                let mut v = Complex64::new(lcg(&mut s), lcg(&mut s));
                if i == j && weak_diag {
                    v *= 1e-3;
                }
                a.add(i, j, v);
            }
        }
        a
    }

    fn to_dense(a: &BandedMatrix) -> DMatrix<Complex64> {
        DMatrix::from_fn(a.dim(), a.dim(), |i, j| a.get(i, j))
    }

    #[test]
    fn agrees_with_dense_lu() {
        for &(n, kl, ku, weak) in &[
            (1, 0, 0, false),
            (7, 1, 1, true),
            (30, 4, 2, true),
            (40, 3, 7, false),
            (25, 5, 5, true),
        ] {
            let a = random_banded(n, kl, ku, 42 + n as u64, weak);
            let dense = to_dense(&a);
            let mut s = 7u64;
            let b: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(lcg(&mut s), lcg(&mut s)))
                .collect();
            let expect = dense
                .clone()
                .lu()
                .solve(&DVector::from_vec(b.clone()))
                .unwrap();
            let lu = a.factor();
            let mut x = b.clone();
            lu.solve_in_place(&mut x);
            for (got, want) in x.iter().zip(expect.iter()) {
                assert!((got - want).norm() < 1e-9 * (1.0 + want.norm()), "n={n}");
            }
            let residual = &dense * DVector::from_vec(x) - DVector::from_vec(b);
            assert!(residual.norm() < 1e-10);
        }
    }

    #[test]
    fn zero_pivot_flags_singularity() {
        let mut a = BandedMatrix::zeros(3, 1, 1);
        a.add(0, 0, Complex64::new(1.0, 0.0));
        a.add(1, 1, Complex64::new(1.0, 0.0));
        let lu = a.factor();
        assert!(lu.is_singular());
    }

    #[test]
    #[should_panic(expected = "outside band")]
    fn rejects_out_of_band() {
        let mut a = BandedMatrix::zeros(5, 1, 1);
        a.add(0, 3, Complex64::new(1.0, 0.0));
    }
}
