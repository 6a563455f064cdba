//! Dense complex LU with partial pivoting, determinant and a 1-norm
//! condition estimate. Sized for the reconstruction systems (a few dozen
//! unknowns at most).

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivots below this magnitude mark the matrix as singular.
pub const PIVOT_UNDERFLOW: f64 = 1e-300;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_square_finite(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if let Some(k) = self.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: k / self.cols,
                col: k % self.cols,
            });
        }
        Ok(())
    }

    /// Factorizes `PA = LU`. A tiny pivot does not abort the factorization;
    /// it is recorded so that `det` can return zero while `solve` fails.
    pub fn lu(&self) -> Result<LuFactorization> {
        self.check_square_finite()?;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = None;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, a[i * n + k].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            if pmax < PIVOT_UNDERFLOW {
                singular.get_or_insert(k);
                continue;
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let l = a[i * n + k] / pivot;
                a[i * n + k] = l;
                if l != ZERO {
                    for j in (k + 1)..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= l * u;
                    }
                }
            }
        }
        Ok(LuFactorization {
            n,
            lu: a,
            perm,
            sign,
            singular,
            norm_one: self.norm_one(),
        })
    }
}

impl Index<(usize, usize)> for DenseComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Packed `PA = LU` factors (unit lower `L` below the diagonal).
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
    singular: Option<usize>,
    norm_one: f64,
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_singular(&self) -> bool {
        self.singular.is_some()
    }

    pub fn det(&self) -> Complex64 {
        if self.singular.is_some() {
            return ZERO;
        }
        (0..self.n).fold(Complex64::new(self.sign, 0.0), |acc, i| {
            acc * self.lu[i * self.n + i]
        })
    }

    fn check(&self, b: &[Complex64]) -> Result<()> {
        if let Some(column) = self.singular {
            return Err(Error::SingularMatrix { column });
        }
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        Ok(())
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(b)?;
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Solves `A^H y = b` from the same factors.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(b)?;
        let n = self.n;
        // U^H w = b
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[j * n + i].conj() * w[j];
            }
            w[i] = s / self.lu[i * n + i].conj();
        }
        // L^H v = w
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in (i + 1)..n {
                s -= self.lu[j * n + i].conj() * w[j];
            }
            w[i] = s;
        }
        let mut y = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = w[i];
        }
        Ok(y)
    }

    /// Hager/Higham estimate of `||A||_1 ||A^-1||_1`.
    pub fn cond_estimate(&self) -> Result<f64> {
        if let Some(column) = self.singular {
            return Err(Error::SingularMatrix { column });
        }
        let n = self.n;
        if n == 0 {
            return Ok(0.0);
        }
        let norm1 = |v: &[Complex64]| v.iter().map(|c| c.norm()).sum::<f64>();
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x)?;
            let ny = norm1(&y);
            if iter > 0 && ny <= est {
                break;
            }
            est = ny;
            let xi: Vec<Complex64> = y
                .iter()
                .map(|v| if v.norm() > 0.0 { v / v.norm() } else { ONE })
                .collect();
            let z = self.solve_adjoint(&xi)?;
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if iter > 0 && (zmax <= ztx || j == last_j) {
                break;
            }
            last_j = j;
            x = vec![ZERO; n];
            x[j] = ONE;
        }
        // Alternating probe guards against the classic failure cases.
        if n > 1 {
            let alt: Vec<Complex64> = (0..n)
                .map(|i| {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    Complex64::new(s * (1.0 + i as f64 / (n - 1) as f64), 0.0)
                })
                .collect();
            let y = self.solve(&alt)?;
            est = est.max(2.0 * norm1(&y) / (3.0 * n as f64));
        }
        Ok(est * self.norm_one)
    }
}

pub fn lu_solve(a: &DenseComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    a.lu()?.solve(b)
}

/// Determinant via LU. Singular matrices give exactly zero.
pub fn det(a: &DenseComplexMatrix) -> Result<Complex64> {
    Ok(a.lu()?.det())
}

pub fn cond_estimate(a: &DenseComplexMatrix) -> Result<f64> {
    a.lu()?.cond_estimate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DenseComplexMatrix {
        let data = (0..n * n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        DenseComplexMatrix::from_row_major(n, n, data).unwrap()
    }

    fn to_nalgebra(a: &DenseComplexMatrix) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
    }

    fn inf_norm(v: &[Complex64]) -> f64 {
        v.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_solve() {
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 0.0), c(7.0, -1.0)];
        assert_eq!(lu_solve(&DenseComplexMatrix::identity(4), &b).unwrap(), b);
    }

    #[test]
    fn diagonal_solve() {
        let a = DenseComplexMatrix::from_diag(&[c(2.0, 0.0), c(0.0, 1.0)]);
        let x = lu_solve(&a, &[c(2.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(x, vec![c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn known_solution_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(&mut rng, 8);
        let ones = vec![c(1.0, 0.0); 8];
        let b = a.mul_vec(&ones).unwrap();
        let x = lu_solve(&a, &b).unwrap();
        for v in x {
            assert!((v - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&DenseComplexMatrix::identity(5)).unwrap(), c(1.0, 0.0));
        let d = det(&DenseComplexMatrix::from_diag(&[c(0.0, 2.0), c(3.0, 0.0)])).unwrap();
        assert!((d - c(0.0, 6.0)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let a = random_matrix(&mut rng, 2);
            let closed = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            let d = det(&a).unwrap();
            assert!((d - closed).norm() <= 1e-12 * closed.norm());
        }
    }

    #[test]
    fn permutation_sign() {
        let a = DenseComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(det(&a).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn shape_and_singularity_errors() {
        let rect = DenseComplexMatrix::zeros(2, 3);
        assert!(matches!(
            rect.lu(),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
        assert!(matches!(det(&rect), Err(Error::NonSquare { .. })));
        let sing = DenseComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(det(&sing).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            lu_solve(&sing, &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::SingularMatrix { column: 1 })
        ));
        assert!(matches!(
            cond_estimate(&sing),
            Err(Error::SingularMatrix { .. })
        ));
        let mut nan = DenseComplexMatrix::identity(2);
        nan[(1, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(
            nan.lu(),
            Err(Error::NonFiniteEntry { row: 1, col: 0 })
        ));
    }

    #[test]
    fn condition_estimates() {
        assert_eq!(
            cond_estimate(&DenseComplexMatrix::identity(6)).unwrap(),
            1.0
        );
        let k =
            cond_estimate(&DenseComplexMatrix::from_diag(&[c(1.0, 0.0), c(1e-8, 0.0)])).unwrap();
        assert!((1e7..=1e9).contains(&k), "{k}");
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 16);
            let inv = to_nalgebra(&a).try_inverse().unwrap();
            let inv_norm = (0..16)
                .map(|j| (0..16).map(|i| inv[(i, j)].norm()).sum::<f64>())
                .fold(0.0, f64::max);
            let exact = a.norm_one() * inv_norm;
            let est = cond_estimate(&a).unwrap();
            assert!(
                est <= exact * (1.0 + 1e-10) && est >= exact / 10.0,
                "{est} vs {exact}"
            );
        }
    }

    #[test]
    fn adjoint_solve_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 7);
        let b: Vec<Complex64> = (0..7).map(|i| c(i as f64, 1.0)).collect();
        let y = a.lu().unwrap().solve_adjoint(&b).unwrap();
        let ah = to_nalgebra(&a).adjoint();
        let r = &ah * nalgebra::DVector::from_vec(y) - nalgebra::DVector::from_vec(b);
        assert!(r.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn det_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..12 {
            let a = random_matrix(&mut rng, n);
            let d = det(&a).unwrap();
            let oracle = to_nalgebra(&a).determinant();
            assert!((d - oracle).norm() <= 1e-11 * oracle.norm(), "n = {n}");
        }
    }

    // Solve-then-multiply residual over 1000 seeded instances.
    #[test]
    fn residual_bound_over_seeded_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        let mut checked = 0;
        for _ in 0..1000 {
            let n = rng.random_range(2..=32);
            let a = random_matrix(&mut rng, n);
            let b: Vec<Complex64> = (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let lu = a.lu().unwrap();
            if lu.cond_estimate().unwrap() > 1e8 {
                continue;
            }
            let x = lu.solve(&b).unwrap();
            let ax = a.mul_vec(&x).unwrap();
            let r: Vec<Complex64> = ax.iter().zip(&b).map(|(p, q)| p - q).collect();
            assert!(inf_norm(&r) <= 1e-10 * a.norm_inf() * inf_norm(&x));
            checked += 1;
        }
        assert!(checked > 990);
    }

    fn bordered(g: &DenseComplexMatrix, v: &[Complex64], w: &[Complex64]) -> DenseComplexMatrix {
        let n = g.rows();
        let mut b = DenseComplexMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = g[(i, j)];
            }
            b[(i, n)] = v[i];
            b[(n, i)] = w[i];
        }
        b
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn det_of_inverse_is_reciprocal(seed in any::<u64>(), n in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n);
            let lu = a.lu().unwrap();
            let mut inv = DenseComplexMatrix::zeros(n, n);
            for j in 0..n {
                let mut e = vec![ZERO; n];
                e[j] = ONE;
                let col = lu.solve(&e).unwrap();
                for i in 0..n {
                    inv[(i, j)] = col[i];
                }
            }
            let p = lu.det() * det(&inv).unwrap();
            prop_assert!((p - 1.0).norm() <= 1e-8);
        }

        #[test]
        fn bordered_determinant_identity(seed in any::<u64>(), n in 1usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_matrix(&mut rng, n);
            let v: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let w: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let lu = g.lu().unwrap();
            prop_assume!(lu.cond_estimate().unwrap() < 1e6);
            let y = lu.solve(&v).unwrap();
            let wy: Complex64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
            let lhs = det(&bordered(&g, &v, &w)).unwrap();
            let rhs = -wy * lu.det();
            prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(lhs.norm()).max(1e-300) + 1e-13 * lu.det().norm());
        }
    }
}
