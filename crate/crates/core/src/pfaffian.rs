//! Pfaffians of complex skew-symmetric matrices.
//!
//! The kernel is a Parlett–Reid skew tridiagonalization with partial
//! pivoting: at step `k` the largest entry of column `k` below the
//! diagonal is swapped into position `(k + 1, k)`, the trailing block is
//! updated by a skew rank-2 correction, and the Pfaffian accumulates as the
//! product of the super-diagonal pivots times the sign of the row/column
//! interchanges. Cost is `O(n^3)`.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Relative antisymmetry tolerance accepted by [`SkewMatrix::new`].
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Pivots smaller than this fraction of the largest input magnitude are
/// treated as exact zeros.
pub const PIVOT_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PfaffianError {
    #[error("skew matrix dimension must be even and at least 2, got {0}")]
    Dimension(usize),
    #[error("entry buffer has {got} elements, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("matrix is not antisymmetric: max |a_ij + a_ji| = {asymmetry:e} exceeds {tol:e} relative to {scale:e}")]
    NotSkew { asymmetry: f64, scale: f64, tol: f64 },
}

/// Even-dimensional complex antisymmetric matrix, stored dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    dim: usize,
    data: Vec<C64>,
    asymmetry: f64,
}

impl SkewMatrix {
    /// Validates and stores `(entries - entries^T) / 2`.
    ///
    /// The largest violation `|a_ij + a_ji|` is recorded and available via
    /// [`SkewMatrix::asymmetry`].
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self, PfaffianError> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(PfaffianError::Shape { expected: dim * dim, got: entries.len() });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut asymmetry: f64 = 0.0;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            asymmetry = asymmetry.max(entries[i * dim + i].norm() * 2.0);
            for j in (i + 1)..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i];
                asymmetry = asymmetry.max((a + b).norm());
                let s = (a - b) * 0.5;
                data[i * dim + j] = s;
                data[j * dim + i] = -s;
            }
        }
        if asymmetry > ANTISYMMETRY_TOL * scale {
            return Err(PfaffianError::NotSkew { asymmetry, scale, tol: ANTISYMMETRY_TOL });
        }
        Ok(Self { dim, data, asymmetry })
    }

    /// Builds the matrix from its strict upper triangle; `upper(i, j)` is
    /// called once for every `i < j`.
    pub fn from_upper<F>(dim: usize, mut upper: F) -> Result<Self, PfaffianError>
    where
        F: FnMut(usize, usize) -> C64,
    {
        check_dim(dim)?;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = upper(i, j);
                data[i * dim + j] = a;
                data[j * dim + i] = -a;
            }
        }
        Ok(Self { dim, data, asymmetry: 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    /// Largest `|a_ij + a_ji|` seen at construction.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

fn check_dim(dim: usize) -> Result<(), PfaffianError> {
    if dim < 2 || dim % 2 != 0 {
        Err(PfaffianError::Dimension(dim))
    } else {
        Ok(())
    }
}

/// Pfaffian of `a`.
pub fn pfaffian(a: &SkewMatrix) -> C64 {
    let n = a.dim;
    let mut m = a.data.clone();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let cutoff = PIVOT_THRESHOLD * scale;
    let mut pf = C64::new(1.0, 0.0);

    for k in (0..n - 1).step_by(2) {
        // pivot search in column k, rows k+1..n
        let mut kp = k + 1;
        let mut best = m[kp * n + k].norm();
        for r in (k + 2)..n {
            let v = m[r * n + k].norm();
            if v > best {
                best = v;
                kp = r;
            }
        }
        if best < cutoff {
            return C64::new(0.0, 0.0);
        }
        if kp != k + 1 {
            swap_rows_cols(&mut m, n, k + 1, kp);
            pf = -pf;
        }

        let pivot = m[k * n + k + 1];
        pf *= pivot;

        if k + 2 < n {
            let inv = pivot.inv();
            let tau: Vec<C64> = ((k + 2)..n).map(|j| m[k * n + j] * inv).collect();
            let col: Vec<C64> = ((k + 2)..n).map(|i| m[i * n + k + 1]).collect();
            let w = n - k - 2;
            for ii in 0..w {
                let i = k + 2 + ii;
                let row = &mut m[i * n + k + 2..i * n + n];
                let (ti, ci) = (tau[ii], col[ii]);
                for jj in 0..w {
                    row[jj] += ti * col[jj] - ci * tau[jj];
                }
            }
        }
    }
    pf
}

fn swap_rows_cols(m: &mut [C64], n: usize, a: usize, b: usize) {
    for j in 0..n {
        m.swap(a * n + j, b * n + j);
    }
    for i in 0..n {
        m.swap(i * n + a, i * n + b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_skew(dim: usize, rng: &mut impl Rng) -> SkewMatrix {
        SkewMatrix::from_upper(dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .unwrap()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    fn lu_det(dim: usize, entries: &[C64]) -> C64 {
        let mut a = entries.to_vec();
        let mut det = c(1.0, 0.0);
        for k in 0..dim {
            let p = (k..dim)
                .max_by(|&x, &y| a[x * dim + k].norm().total_cmp(&a[y * dim + k].norm()))
                .unwrap();
            if p != k {
                for j in 0..dim {
                    a.swap(k * dim + j, p * dim + j);
                }
                det = -det;
            }
            let piv = a[k * dim + k];
            det *= piv;
            for i in (k + 1)..dim {
                let f = a[i * dim + k] / piv;
                for j in k..dim {
                    let akj = a[k * dim + j];
                    a[i * dim + j] -= f * akj;
                }
            }
        }
        det
    }

    fn permuted(a: &SkewMatrix, perm: &[usize]) -> SkewMatrix {
        SkewMatrix::from_upper(a.dim(), |i, j| a.get(perm[i], perm[j])).unwrap()
    }

    #[test]
    fn two_by_two_is_the_upper_entry() {
        let z = c(3.0, 4.0);
        let a = SkewMatrix::new(2, vec![c(0.0, 0.0), z, -z, c(0.0, 0.0)]).unwrap();
        assert_eq!(pfaffian(&a), z);
    }

    #[test]
    fn four_by_four_cofactor_expansion() {
        let up = [[0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 4.0, 5.0], [0.0, 0.0, 0.0, 6.0]];
        let a = SkewMatrix::from_upper(4, |i, j| c(up[i][j], 0.0)).unwrap();
        assert_relative_eq!(pfaffian(&a).re, 8.0, epsilon = 1e-14);
        assert_relative_eq!(pfaffian(&a).im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn square_matches_lu_determinant_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_skew(8, &mut rng);
        let pf = pfaffian(&a);
        let det = lu_det(8, a.as_slice());
        assert!((pf * pf - det).norm() / det.norm() < 1e-9);
    }

    #[test]
    fn rejects_odd_dimension() {
        assert_eq!(SkewMatrix::new(3, vec![c(0.0, 0.0); 9]), Err(PfaffianError::Dimension(3)));
        assert!(matches!(SkewMatrix::from_upper(5, |_, _| c(1.0, 0.0)), Err(PfaffianError::Dimension(5))));
        assert!(matches!(SkewMatrix::new(0, vec![]), Err(PfaffianError::Dimension(0))));
    }

    #[test]
    fn rejects_symmetric_input() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let err = SkewMatrix::new(2, vec![zero, one, one, zero]).unwrap_err();
        assert!(matches!(err, PfaffianError::NotSkew { .. }));
    }

    #[test]
    fn symmetrizes_small_asymmetry() {
        let a = c(2.0, -1.0);
        let eps = c(1e-14, 0.0);
        let m = SkewMatrix::new(2, vec![c(0.0, 0.0), a + eps, -a, c(0.0, 0.0)]).unwrap();
        assert!(m.asymmetry() > 0.0);
        assert_eq!(m.get(0, 1), -m.get(1, 0));
        assert!((pfaffian(&m) - a).norm() < 1e-13);
    }

    #[test]
    fn structurally_singular_returns_exact_zero() {
        // row/column 0 entirely zero
        let a = SkewMatrix::from_upper(4, |i, j| if i == 0 { c(0.0, 0.0) } else { c((i + j) as f64, 1.0) })
            .unwrap();
        assert_eq!(pfaffian(&a), c(0.0, 0.0));
        let z = SkewMatrix::from_upper(6, |_, _| c(0.0, 0.0)).unwrap();
        assert_eq!(pfaffian(&z), c(0.0, 0.0));
    }

    #[test]
    fn direct_sum_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b1 = random_skew(4, &mut rng);
        let b2 = random_skew(6, &mut rng);
        let sum = SkewMatrix::from_upper(10, |i, j| match (i < 4, j < 4) {
            (true, true) => b1.get(i, j),
            (false, false) => b2.get(i - 4, j - 4),
            _ => c(0.0, 0.0),
        })
        .unwrap();
        let expect = pfaffian(&b1) * pfaffian(&b2);
        assert!((pfaffian(&sum) - expect).norm() < 1e-12 * expect.norm().max(1.0));
    }

    proptest! {
        #[test]
        fn square_equals_determinant(half in 1usize..=8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_skew(2 * half, &mut rng);
            let pf = pfaffian(&a);
            let det = lu_det(2 * half, a.as_slice());
            prop_assert!((pf * pf - det).norm() <= 1e-9 * det.norm());
        }

        #[test]
        fn transposition_flips_sign(half in 1usize..=6, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 2 * half;
            let a = random_skew(n, &mut rng);
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n);
            while j == i { j = rng.gen_range(0..n); }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(i, j);
            let pf = pfaffian(&a);
            let pp = pfaffian(&permuted(&a, &perm));
            prop_assert!((pp + pf).norm() <= 1e-10 * pf.norm().max(1e-300));
        }

        #[test]
        fn row_column_scaling(half in 1usize..=6, seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 2 * half;
            let a = random_skew(n, &mut rng);
            let k = rng.gen_range(0..n);
            let lambda = c(re, im);
            let scaled = SkewMatrix::from_upper(n, |i, j| {
                let f = if i == k || j == k { lambda } else { c(1.0, 0.0) };
                a.get(i, j) * f
            }).unwrap();
            let expect = pfaffian(&a) * lambda;
            prop_assert!((pfaffian(&scaled) - expect).norm() <= 1e-10 * expect.norm().max(1e-12));
        }
    }
}
