//! Small dense complex matrices.
//!
//! Everything in this crate reduces to dense linear algebra on blocks of a
//! few rows, so the kernel here is deliberately plain: row-major storage, a
//! cyclic Jacobi eigensolver for Hermitian matrices and Gaussian elimination
//! with either partial or complete pivoting.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Pivoting strategy for [`CMatrix::solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivoting {
    Partial,
    Complete,
}

impl CMatrix {
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds the matrix whose columns are `cols` (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<C64>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(
            self.cols,
            v.len(),
            "vector length differs from column count"
        );
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|a| a * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm of `a - a*`.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(a + a*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Unitary diagonalization of a Hermitian matrix by cyclic Jacobi
    /// rotations. Only the Hermitian part of `self` is used.
    ///
    /// Returns eigenvalues sorted in descending order together with the
    /// matrix whose columns are the matching orthonormal eigenvectors.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMatrix) {
        let n = self.rows;
        let mut a = self.hermitian_part();
        let mut v = CMatrix::identity(n);
        let scale = a.frobenius_norm();
        if n > 1 && scale > 0.0 {
            for _ in 0..JACOBI_MAX_SWEEPS {
                let off: f64 = (0..n)
                    .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                    .map(|(i, j)| a[(i, j)].norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if off <= f64::EPSILON * 1e-2 * scale {
                    break;
                }
                for p in 0..n - 1 {
                    for q in p + 1..n {
                        jacobi_rotate(&mut a, &mut v, p, q);
                    }
                }
            }
        }
        let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
        pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
        let values = pairs.iter().map(|p| p.0).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, pairs[j].1)]);
        (values, vectors)
    }

    /// Solves `self * x = rhs` for square `self`, followed by one step of
    /// iterative refinement. Returns `None` when a pivot underflows the
    /// singularity threshold.
    pub fn solve(&self, rhs: &[C64], pivoting: Pivoting) -> Option<Vec<C64>> {
        let lu = LuFactors::factor(self, pivoting)?;
        let mut x = lu.solve(rhs);
        let ax = self.matvec(&x);
        let r: Vec<C64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = lu.solve(&r);
        for (xi, di) in x.iter_mut().zip(dx) {
            *xi += di;
        }
        Some(x)
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Option<CMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let lu = LuFactors::factor(self, Pivoting::Partial)?;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            cols.push(lu.solve(&e));
        }
        Some(CMatrix::from_columns(n, &cols))
    }

    /// Singular values (descending, `min(rows, cols)` of them) with left and
    /// right singular vectors, read off the Hermitian dilation
    /// `[[0, M], [M*, 0]]` so that small singular values keep full relative
    /// accuracy. Vectors belonging to zero singular values are not
    /// meaningful and are returned as zero columns.
    pub fn singular_triplets(&self) -> SingularTriplets {
        let (r, c) = (self.rows, self.cols);
        let k = r.min(c);
        let dil = CMatrix::from_fn(r + c, r + c, |i, j| match (i < r, j < r) {
            (true, false) => self[(i, j - r)],
            (false, true) => self[(j, i - r)].conj(),
            _ => ZERO,
        });
        let (vals, vecs) = dil.hermitian_eigen();
        let mut left = CMatrix::zeros(r, k);
        let mut right = CMatrix::zeros(c, k);
        let mut values = Vec::with_capacity(k);
        for j in 0..k {
            let sigma = vals[j].max(0.0);
            values.push(sigma);
            let col = vecs.column(j);
            let (u, v) = col.split_at(r);
            let (un, vn) = (vec_norm(u), vec_norm(v));
            if sigma > 0.0 && un > 0.0 && vn > 0.0 {
                for i in 0..r {
                    left[(i, j)] = u[i] / un;
                }
                for i in 0..c {
                    right[(i, j)] = v[i] / vn;
                }
            }
        }
        SingularTriplets {
            values,
            left,
            right,
        }
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.singular_triplets().values[0]
    }
}

/// Result of [`CMatrix::singular_triplets`].
#[derive(Clone, Debug)]
pub struct SingularTriplets {
    pub values: Vec<f64>,
    pub left: CMatrix,
    pub right: CMatrix,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

// One complex Jacobi rotation zeroing a[p][q]. With a_pq = |b| e^{iφ}, the
// phase matrix diag(1, e^{-iφ}) makes the pivot real, after which the usual
// real rotation applies.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let diag_scale = a[(p, p)].re.abs() + a[(q, q)].re.abs();
    if mag <= f64::EPSILON * 1e-3 * diag_scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = D R with D = diag(1, conj(phase)) on the (p,q) plane.
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = phase.conj() * (-s);
    let jqq = phase.conj() * c;
    let n = a.rows;
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * jpp + aiq * jqp;
        a[(i, q)] = aip * jpq + aiq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
}

struct LuFactors {
    n: usize,
    lu: CMatrix,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
}

impl LuFactors {
    fn factor(m: &CMatrix, pivoting: Pivoting) -> Option<Self> {
        assert!(m.is_square(), "LU needs a square matrix");
        let n = m.rows;
        let mut lu = m.clone();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        let threshold = f64::EPSILON * (n.max(1) as f64) * m.max_abs();
        for k in 0..n {
            let (pr, pc) = match pivoting {
                Pivoting::Partial => {
                    let pr = (k..n)
                        .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
                        .unwrap();
                    (pr, k)
                }
                Pivoting::Complete => {
                    let mut best = (k, k);
                    let mut best_val = -1.0;
                    for i in k..n {
                        for j in k..n {
                            let v = lu[(i, j)].norm();
                            if v > best_val {
                                best_val = v;
                                best = (i, j);
                            }
                        }
                    }
                    best
                }
            };
            if lu[(pr, pc)].norm() <= threshold || m.max_abs() == 0.0 {
                return None;
            }
            if pr != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pr, j)];
                    lu[(pr, j)] = tmp;
                }
                row_perm.swap(k, pr);
            }
            if pc != k {
                for i in 0..n {
                    let tmp = lu[(i, k)];
                    lu[(i, k)] = lu[(i, pc)];
                    lu[(i, pc)] = tmp;
                }
                col_perm.swap(k, pc);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Some(Self {
            n,
            lu,
            row_perm,
            col_perm,
        })
    }

    fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y: Vec<C64> = self.row_perm.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        let mut x = vec![ZERO; n];
        for (k, &c) in self.col_perm.iter().enumerate() {
            x[c] = y[k];
        }
        x
    }
}

/// Standard inner product `Σ conj(a_i) b_i`.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of the span of `vectors` by modified Gram-Schmidt with
/// one reorthogonalization pass. A candidate is dropped when its residual
/// falls below `rel_tol` times its original norm.
pub fn orthonormal_basis(vectors: &[Vec<C64>], rel_tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let original = vec_norm(v);
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let r = vec_norm(&w);
        if r > rel_tol * original {
            basis.push(w.into_iter().map(|z| z / r).collect());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn jacobi_two_by_two_real() {
        let a = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let (vals, vecs) = a.hermitian_eigen();
        assert!((vals[0] - 3.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        let recon = vecs
            .matmul(&CMatrix::diagonal(&[c(vals[0], 0.0), c(vals[1], 0.0)]))
            .matmul(&vecs.adjoint());
        assert!(recon.sub(&a).frobenius_norm() < 1e-14);
    }

    #[test]
    fn jacobi_complex_hermitian() {
        let a = CMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(3.0, 0.0), c(-2.0, 0.0)],
            vec![c(0.0, -0.5), c(-2.0, 0.0), c(-1.0, 0.0)],
        ]);
        let (vals, vecs) = a.hermitian_eigen();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let d = CMatrix::diagonal(&vals.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let recon = vecs.matmul(&d).matmul(&vecs.adjoint());
        assert!(recon.sub(&a).frobenius_norm() < 1e-13);
        let gram = vecs.adjoint().matmul(&vecs);
        assert!(gram.sub(&CMatrix::identity(3)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn solve_both_pivotings_agree() {
        let a = CMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 2.0), c(3.0, 0.0)],
            vec![c(4.0, -1.0), c(0.5, 0.0), c(0.0, 1.0)],
            vec![c(1.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)],
        ]);
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let x1 = a.solve(&b, Pivoting::Partial).unwrap();
        let x2 = a.solve(&b, Pivoting::Complete).unwrap();
        let r = a.matvec(&x1);
        for i in 0..3 {
            assert!((r[i] - b[i]).norm() < 1e-13);
            assert!((x1[i] - x2[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(a.solve(&[ONE, ONE], Pivoting::Partial).is_none());
        assert!(a.solve(&[ONE, ONE], Pivoting::Complete).is_none());
        assert!(a.inverse().is_none());
    }

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let v1 = vec![ONE, ZERO, ONE];
        let v2 = vec![c(2.0, 0.0), ZERO, c(2.0, 0.0)];
        let v3 = vec![ZERO, c(0.0, 1.0), ZERO];
        let b = orthonormal_basis(&[v1, v2, v3], 1e-10);
        assert_eq!(b.len(), 2);
        assert!(dot(&b[0], &b[1]).norm() < 1e-15);
    }

    #[test]
    fn singular_triplets_rectangular() {
        let m = CMatrix::from_rows(vec![
            vec![c(3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 1e-7)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let t = m.singular_triplets();
        assert!((t.values[0] - 3.0).abs() < 1e-14);
        assert!((t.values[1] - 1e-7).abs() < 1e-20);
        for j in 0..2 {
            let mv = m.matvec(&t.right.column(j));
            for (a, b) in mv.iter().zip(t.left.column(j)) {
                assert!((a - b * t.values[j]).norm() < 1e-14);
            }
        }
        assert!((m.spectral_norm() - 3.0).abs() < 1e-14);
    }
}
