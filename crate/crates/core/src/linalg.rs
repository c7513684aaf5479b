//! Small dense linear algebra kernels: row-major matrices, LU with partial
//! pivoting (optionally band-limited), Householder least squares, and
//! singular values by one-sided Jacobi rotations.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn fill(&mut self, v: T) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    /// `out = self * x`
    pub fn mul_vec(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.cols);
        for (i, o) in out.iter_mut().enumerate().take(self.rows) {
            *o = self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Band limits used to skip structurally zero work during elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Band {
    pub lower: usize,
    pub upper: usize,
}

/// In-place LU factorization `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    pivots: Vec<usize>,
    band: Option<Band>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularMatrix {
    pub column: usize,
}

impl<T: Real> Lu<T> {
    /// Factorizes a square matrix. With `band`, the matrix must have no
    /// entries outside `lower` sub- and `upper` super-diagonals; pivoting
    /// then widens the upper band to `lower + upper`.
    pub fn factor(mut a: Matrix<T>, band: Option<Band>) -> Result<Self, SingularMatrix> {
        let n = a.rows();
        assert_eq!(n, a.cols(), "LU needs a square matrix");
        let mut pivots = vec![0; n];
        for k in 0..n {
            let row_end = match band {
                Some(b) => (k + b.lower + 1).min(n),
                None => n,
            };
            let col_end = match band {
                Some(b) => (k + b.lower + b.upper + 1).min(n),
                None => n,
            };
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in (k + 1)..row_end {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return Err(SingularMatrix { column: k });
            }
            pivots[k] = p;
            if p != k {
                // Multipliers left of column k stay in place; the solve
                // replays the interchanges step by step.
                for j in k..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
            }
            let pivot = a[(k, k)];
            for i in (k + 1)..row_end {
                let l = a[(i, k)] / pivot;
                a[(i, k)] = l;
                if l == T::zero() {
                    continue;
                }
                for j in (k + 1)..col_end {
                    let u = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - l * u;
                }
            }
        }
        Ok(Self { lu: a, pivots, band })
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.lu.rows();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let row_end = match self.band {
                Some(bd) => (k + bd.lower + 1).min(n),
                None => n,
            };
            let bk = b[k];
            if bk == T::zero() {
                continue;
            }
            for i in (k + 1)..row_end {
                b[i] = b[i] - self.lu[(i, k)] * bk;
            }
        }
        for i in (0..n).rev() {
            let end = match self.band {
                Some(bd) => (i + bd.lower + bd.upper + 1).min(n),
                None => n,
            };
            let row = self.lu.row(i);
            let mut s = b[i];
            for j in (i + 1)..end {
                s = s - row[j] * b[j];
            }
            b[i] = s / row[i];
        }
    }
}

/// Least-squares solution of `A X = B` (A is m x n, m >= n, full rank)
/// by Householder QR. Returns X (n x k) and the R factor.
pub fn least_squares<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "least squares needs at least as many rows as columns");
    assert_eq!(b.rows(), m);
    let k = b.cols();
    let mut r = a.clone();
    let mut qtb = b.clone();
    let mut v = vec![T::zero(); m];
    for j in 0..n {
        let norm = (j..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if r[(j, j)] > T::zero() { -norm } else { norm };
        for i in j..m {
            v[i] = r[(i, j)];
        }
        v[j] = v[j] - alpha;
        let vnorm2 = (j..m).map(|i| v[i] * v[i]).sum::<T>();
        if vnorm2 == T::zero() {
            continue;
        }
        for c in j..n {
            let dot = (j..m).map(|i| v[i] * r[(i, c)]).sum::<T>();
            let f = T::two() * dot / vnorm2;
            for i in j..m {
                r[(i, c)] = r[(i, c)] - f * v[i];
            }
        }
        for c in 0..k {
            let dot = (j..m).map(|i| v[i] * qtb[(i, c)]).sum::<T>();
            let f = T::two() * dot / vnorm2;
            for i in j..m {
                qtb[(i, c)] = qtb[(i, c)] - f * v[i];
            }
        }
    }
    let mut x = Matrix::zeros(n, k);
    for c in 0..k {
        for i in (0..n).rev() {
            let mut s = qtb[(i, c)];
            for j in (i + 1)..n {
                s = s - r[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = s / r[(i, i)];
        }
    }
    let mut rr = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            rr[(i, j)] = r[(i, j)];
        }
    }
    (x, rr)
}

/// Singular values of a small matrix via one-sided Jacobi, sorted descending.
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let (m, n) = (a.rows(), a.cols());
    // Work on columns of A (m x n); rotations orthogonalize them.
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: T = cols[p].iter().map(|&x| x * x).sum();
                let beta: T = cols[q].iter().map(|&x| x * x).sum();
                let gamma: T = cols[p].iter().zip(&cols[q]).map(|(&x, &y)| x * y).sum();
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::two() * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let x = cols[p][i];
                    let y = cols[q][i];
                    cols[p][i] = c * x - s * y;
                    cols[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols.iter().map(|c| c.iter().map(|&x| x * x).sum::<T>().sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}
