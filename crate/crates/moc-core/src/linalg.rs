//! Small dense complex matrices.
//!
//! Sized for the handful of antennas/RIS columns this crate works with;
//! nothing here is tuned for large dimensions.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Float;

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds from row slices; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self {
            rows: rows.len(),
            cols: ncols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        Self::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).map(|k| self[(r, k)] * rhs[(k, c)]).sum()
        })
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    fn off_diagonal_norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c {
                    acc += self[(r, c)].norm_sqr();
                }
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the unitary matrix whose
/// columns are the matching eigenvectors. Panics on non-square input.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    assert_eq!(a.rows(), a.cols(), "hermitian_eigen needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut v = CMat::identity(n);
    let scale: f64 = m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300);

    for _sweep in 0..60 {
        if m.off_diagonal_norm_sq() <= 1e-28 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let theta = 0.5 * f64::atan2(2.0 * mag, m[(p, p)].re - m[(q, q)].re);
                let (s, c) = theta.sin_cos();
                // Unitary rotation zeroing m[(p, q)].
                let mut rot = CMat::identity(n);
                rot[(p, p)] = Complex64::new(c, 0.0);
                rot[(p, q)] = -phase * s;
                rot[(q, p)] = phase.conj() * s;
                rot[(q, q)] = Complex64::new(c, 0.0);
                m = rot.adjoint().mul(&m).mul(&rot);
                v = v.mul(&rot);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let raw = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let mut h = raw.adjoint().mul(&raw);
        for i in 0..n {
            h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        }
        h
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        for seed in 0..5 {
            let a = random_hermitian(4, seed);
            let (vals, vecs) = hermitian_eigen(&a);
            // A V = V diag(vals)
            let av = a.mul(&vecs);
            for c in 0..4 {
                for r in 0..4 {
                    let lhs = av[(r, c)];
                    let rhs = vecs[(r, c)] * vals[c];
                    assert!((lhs - rhs).norm() < 1e-9, "seed {seed} entry ({r},{c})");
                }
            }
            // descending order
            for w in vals.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn eigenvectors_are_unitary() {
        let a = random_hermitian(3, 9);
        let (_, vecs) = hermitian_eigen(&a);
        let gram = vecs.adjoint().mul(&vecs);
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { Complex64::ONE } else { Complex64::ZERO };
                assert!((gram[(r, c)] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_matrix_is_fixed_point() {
        let mut d = CMat::zeros(3, 3);
        d[(0, 0)] = Complex64::new(1.0, 0.0);
        d[(1, 1)] = Complex64::new(5.0, 0.0);
        d[(2, 2)] = Complex64::new(-2.0, 0.0);
        let (vals, _) = hermitian_eigen(&d);
        assert_eq!(vals, alloc::vec![5.0, 1.0, -2.0]);
    }

    #[test]
    fn mul_vec_matches_mul() {
        let a = random_hermitian(4, 3);
        let v: Vec<Complex64> = (0..4).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let as_mat = CMat::from_fn(4, 1, |r, _| v[r]);
        let prod = a.mul(&as_mat);
        let direct = a.mul_vec(&v);
        for r in 0..4 {
            assert!((prod[(r, 0)] - direct[r]).norm() < 1e-12);
        }
    }
}
