//! Finite-dimensional C*-algebras `A = M_{n_1}(C) ⊕ … ⊕ M_{n_m}(C)`.
//!
//! Elements are stored block by block. Functional calculus (square roots,
//! absolute values, range projections) goes through the Jacobi
//! eigensolver in [`crate::dense`]; singular values needed for polar
//! decompositions come from the Hermitian dilation `[[0, a], [a*, 0]]`,
//! whose spectrum is `±σ_i` with absolute accuracy `ε‖a‖`.

use serde::{Deserialize, Serialize};

use crate::dense::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Numerical tolerances. All values are relative to the norm of the
/// element being examined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity and positivity slack.
    pub hermitian: f64,
    /// Eigenvalues at or below `rank * ‖a‖` count as zero.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            rank: 1e-8,
        }
    }
}

/// Block dimensions `(n_1, …, n_m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraShape(Vec<usize>);

impl AlgebraShape {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidShape("at least one block is required".into()));
        }
        if let Some(i) = block_dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("block {i} has dimension 0")));
        }
        Ok(Self(block_dims))
    }

    /// The scalar algebra `C`.
    pub fn scalar() -> Self {
        Self(vec![1])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    /// Complex dimension of the algebra, `Σ n_i²`.
    pub fn dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }
}

impl TryFrom<Vec<usize>> for AlgebraShape {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AlgebraShape> for Vec<usize> {
    fn from(s: AlgebraShape) -> Self {
        s.0
    }
}

/// An element of `A`, one square complex matrix per block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementWire", into = "ElementWire")]
pub struct AlgebraElement {
    shape: AlgebraShape,
    blocks: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementWire {
    shape: AlgebraShape,
    blocks: Vec<Vec<Vec<C64>>>,
}

impl TryFrom<ElementWire> for AlgebraElement {
    type Error = Error;

    fn try_from(w: ElementWire) -> Result<Self> {
        if w.blocks.len() != w.shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks given for a shape with {}",
                w.blocks.len(),
                w.shape.num_blocks()
            )));
        }
        let mut blocks = Vec::with_capacity(w.blocks.len());
        for (i, (rows, &n)) in w.blocks.into_iter().zip(w.shape.block_dims()).enumerate() {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::ShapeMismatch(format!("block {i} is not {n}x{n}")));
            }
            blocks.push(CMatrix::from_rows(rows));
        }
        Ok(Self {
            shape: w.shape,
            blocks,
        })
    }
}

impl From<AlgebraElement> for ElementWire {
    fn from(a: AlgebraElement) -> Self {
        let blocks = a
            .blocks
            .iter()
            .map(|b| (0..b.rows()).map(|i| b.row(i).to_vec()).collect())
            .collect();
        Self {
            shape: a.shape,
            blocks,
        }
    }
}

/// Per-block spectral data of a Hermitian element.
#[derive(Clone, Debug)]
pub struct HermitianEigensystem {
    /// Eigenvalues per block, descending.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Unitary per block; column `j` belongs to `eigenvalues[block][j]`.
    pub eigenvectors: Vec<CMatrix>,
}

impl HermitianEigensystem {
    /// Rebuilds `Σ_j g(λ_j) u_j u_j*` per block.
    pub fn apply(&self, shape: &AlgebraShape, g: impl Fn(f64) -> f64) -> AlgebraElement {
        let blocks = self
            .eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(vals, u)| {
                let d: Vec<C64> = vals.iter().map(|&x| C64::new(g(x), 0.0)).collect();
                u.matmul(&CMatrix::diagonal(&d)).matmul(&u.adjoint())
            })
            .collect();
        AlgebraElement {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .filter_map(|v| v.first().copied())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .filter_map(|v| v.last().copied())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .flatten()
            .fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Result of [`AlgebraElement::polar_decompose`].
#[derive(Clone, Debug)]
pub struct PolarDecomposition {
    /// Unitary, or a partial isometry with initial projection equal to the
    /// range projection of `h` when `singular` is set.
    pub u: AlgebraElement,
    pub h: AlgebraElement,
    pub singular: bool,
}

/// Result of [`AlgebraElement::invert`].
#[derive(Clone, Debug)]
pub struct Inverse {
    pub inverse: AlgebraElement,
    /// `‖a⁻¹‖`.
    pub norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Positivity {
    pub positive: bool,
    /// Smallest eigenvalue of the Hermitian part.
    pub margin: f64,
}

impl AlgebraElement {
    /// Wraps `blocks`; each must be square and non-empty.
    pub fn from_blocks(blocks: Vec<CMatrix>) -> Result<Self> {
        let mut dims = Vec::with_capacity(blocks.len());
        for (i, b) in blocks.iter().enumerate() {
            if !b.is_square() {
                return Err(Error::ShapeMismatch(format!("block {i} is not square")));
            }
            dims.push(b.rows());
        }
        Ok(Self {
            shape: AlgebraShape::new(dims)?,
            blocks,
        })
    }

    /// Element of `M_n` from real rows.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        Self::from_blocks(vec![CMatrix::from_real_rows(rows)]).expect("square rows")
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self {
            shape: shape.clone(),
            blocks: shape
                .block_dims()
                .iter()
                .map(|&n| CMatrix::zeros(n, n))
                .collect(),
        }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::scalar(shape, ONE)
    }

    pub fn scalar(shape: &AlgebraShape, s: C64) -> Self {
        Self {
            shape: shape.clone(),
            blocks: shape
                .block_dims()
                .iter()
                .map(|&n| CMatrix::identity(n).scale(s))
                .collect(),
        }
    }

    /// Matrix unit `E_{st}` in block `block`.
    pub fn matrix_unit(shape: &AlgebraShape, block: usize, s: usize, t: usize) -> Self {
        let mut a = Self::zero(shape);
        a.blocks[block][(s, t)] = ONE;
        a
    }

    /// Block-diagonal element with the given diagonals (one slice per block).
    pub fn from_diagonals(diags: &[&[f64]]) -> Self {
        Self::from_blocks(
            diags
                .iter()
                .map(|d| {
                    CMatrix::diagonal(&d.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
                })
                .collect(),
        )
        .expect("diagonal blocks are square")
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut CMatrix {
        &mut self.blocks[i]
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape.block_dims(),
                other.shape.block_dims()
            )));
        }
        Ok(())
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        assert_eq!(self.shape, other.shape, "algebra shapes differ");
        Self {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    /// Product `self · other`. Panics if the shapes differ.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_blocks(other, CMatrix::matmul)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_blocks(other, CMatrix::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_blocks(other, CMatrix::sub)
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_blocks(|b| b.scale(s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(CMatrix::adjoint)
    }

    pub fn hermitian_part(&self) -> Self {
        self.map_blocks(CMatrix::hermitian_part)
    }

    /// `a* a`, symmetrized against round-off.
    pub fn gram(&self) -> Self {
        self.adjoint().mul(self).hermitian_part()
    }

    /// Hilbert-Schmidt norm over all blocks.
    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Sum of block traces.
    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(CMatrix::trace).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.frobenius_norm()
    }

    fn hermitian_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.hermitian_defect().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let fro = b.frobenius_norm();
                if fro == 0.0 {
                    0.0
                } else if b.hermitian_defect() <= 1e-14 * fro {
                    let (vals, _) = b.hermitian_eigen();
                    vals.iter().fold(0.0f64, |m, x| m.max(x.abs()))
                } else {
                    let (vals, _) = b.adjoint().matmul(b).hermitian_eigen();
                    vals[0].max(0.0).sqrt()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn hermitian_eigensystem(&self) -> Result<HermitianEigensystem> {
        self.hermitian_eigensystem_with(&Tolerances::default())
    }

    pub fn hermitian_eigensystem_with(&self, tol: &Tolerances) -> Result<HermitianEigensystem> {
        let defect = self.hermitian_defect();
        let limit = tol.hermitian * self.frobenius_norm();
        if defect > limit {
            return Err(Error::NotHermitian { defect, tol: limit });
        }
        Ok(self.eigensystem_unchecked())
    }

    fn eigensystem_unchecked(&self) -> HermitianEigensystem {
        let (eigenvalues, eigenvectors) = self.blocks.iter().map(CMatrix::hermitian_eigen).unzip();
        HermitianEigensystem {
            eigenvalues,
            eigenvectors,
        }
    }

    fn positive_spectrum(&self, tol: &Tolerances) -> Result<HermitianEigensystem> {
        let eig = self.hermitian_eigensystem_with(tol)?;
        let norm = eig.spectral_radius();
        let min = eig.min_eigenvalue();
        if min < -tol.hermitian * norm {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(eig)
    }

    /// Positive square root; eigenvalues within the positivity slack below
    /// zero are clipped to zero first.
    pub fn positive_sqrt(&self) -> Result<Self> {
        self.positive_sqrt_with(&Tolerances::default())
    }

    pub fn positive_sqrt_with(&self, tol: &Tolerances) -> Result<Self> {
        let eig = self.positive_spectrum(tol)?;
        Ok(eig.apply(&self.shape, |x| x.max(0.0).sqrt()))
    }

    /// `|a| = (a* a)^{1/2}`.
    pub fn abs(&self) -> Self {
        self.gram()
            .eigensystem_unchecked()
            .apply(&self.shape, |x| x.max(0.0).sqrt())
    }

    /// Inverse square root of a positive invertible element.
    pub fn inverse_sqrt(&self, tol: &Tolerances) -> Result<Self> {
        let eig = self.positive_spectrum(tol)?;
        let norm = eig.spectral_radius();
        for (block, vals) in eig.eigenvalues.iter().enumerate() {
            if vals.last().is_some_and(|&m| m <= tol.rank * norm) {
                return Err(Error::Singular { block });
            }
        }
        Ok(eig.apply(&self.shape, |x| 1.0 / x.sqrt()))
    }

    /// Applies a real function to the spectrum of a Hermitian element.
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> Result<Self> {
        Ok(self.hermitian_eigensystem()?.apply(&self.shape, g))
    }

    /// Singular values per block, descending.
    pub fn singular_values(&self) -> Vec<Vec<f64>> {
        self.blocks
            .iter()
            .map(|b| {
                let n = b.rows();
                let (vals, _) = dilation(b).hermitian_eigen();
                vals[..n].iter().map(|x| x.max(0.0)).collect()
            })
            .collect()
    }

    /// Polar decomposition `a = u h` with `h = |a|`.
    pub fn polar_decompose(&self) -> PolarDecomposition {
        self.polar_decompose_with(&Tolerances::default())
    }

    pub fn polar_decompose_with(&self, tol: &Tolerances) -> PolarDecomposition {
        let h = self.abs();
        let mut singular = false;
        let mut u_blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let n = b.rows();
            let (vals, vecs) = dilation(b).hermitian_eigen();
            let sigma_max = vals[0].max(0.0);
            let cutoff = tol.rank * sigma_max;
            let mut u = CMatrix::zeros(n, n);
            let mut rank = 0;
            if sigma_max > 0.0 {
                for j in 0..n {
                    if vals[j] <= cutoff {
                        break;
                    }
                    rank += 1;
                    let col = vecs.column(j);
                    let (w, v) = col.split_at(n);
                    let wn = crate::dense::vec_norm(w);
                    let vn = crate::dense::vec_norm(v);
                    for r in 0..n {
                        for c in 0..n {
                            u[(r, c)] += (w[r] / wn) * (v[c] / vn).conj();
                        }
                    }
                }
            }
            if rank < n {
                singular = true;
            }
            u_blocks.push(u);
        }
        PolarDecomposition {
            u: Self {
                shape: self.shape.clone(),
                blocks: u_blocks,
            },
            h,
            singular,
        }
    }

    /// Smallest projection `p` with `p a = a`, for positive `a`.
    pub fn range_projection(&self) -> Result<Self> {
        self.range_projection_with(&Tolerances::default())
    }

    pub fn range_projection_with(&self, tol: &Tolerances) -> Result<Self> {
        let eig = self.positive_spectrum(tol)?;
        let cutoff = tol.rank * eig.spectral_radius();
        Ok(eig.apply(&self.shape, |x| if x > cutoff { 1.0 } else { 0.0 }))
    }

    /// Blockwise inverse together with `‖a⁻¹‖`.
    pub fn invert(&self) -> Result<Inverse> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (block, b) in self.blocks.iter().enumerate() {
            blocks.push(b.inverse().ok_or(Error::Singular { block })?);
        }
        let inverse = Self {
            shape: self.shape.clone(),
            blocks,
        };
        let norm = inverse.operator_norm();
        Ok(Inverse { inverse, norm })
    }

    pub fn is_positive(&self) -> Positivity {
        self.is_positive_with(&Tolerances::default())
    }

    pub fn is_positive_with(&self, tol: &Tolerances) -> Positivity {
        let hermitian = self.is_hermitian(tol.hermitian);
        let eig = self.hermitian_part().eigensystem_unchecked();
        let margin = eig.min_eigenvalue();
        let positive = hermitian && margin >= -tol.hermitian * eig.spectral_radius();
        Positivity { positive, margin }
    }
}

// [[0, b], [b*, 0]]
fn dilation(b: &CMatrix) -> CMatrix {
    let n = b.rows();
    CMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => b[(i, j - n)],
        (false, true) => b[(j, i - n)].conj(),
        _ => ZERO,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(rows: &[&[f64]]) -> AlgebraElement {
        AlgebraElement::from_real(rows)
    }

    fn close(a: &AlgebraElement, b: &AlgebraElement, tol: f64) -> bool {
        a.sub(b).frobenius_norm() <= tol
    }

    #[test]
    fn shape_validation() {
        assert!(AlgebraShape::new(vec![]).is_err());
        assert!(AlgebraShape::new(vec![2, 0]).is_err());
        assert_eq!(AlgebraShape::new(vec![2, 1]).unwrap().dim(), 5);
    }

    #[test]
    fn norm_examples() {
        let s2 = AlgebraShape::new(vec![2]).unwrap();
        assert!((AlgebraElement::identity(&s2).operator_norm() - 1.0).abs() < 1e-15);
        let p = m2(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!((p.operator_norm() - 1.0).abs() < 1e-14);
        let d = AlgebraElement::from_diagonals(&[&[3.0], &[-4.0]]);
        assert!((d.operator_norm() - 4.0).abs() < 1e-15);
        // non-Hermitian route
        let n = m2(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((n.operator_norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eigensystem_examples() {
        let d = AlgebraElement::from_diagonals(&[&[4.0, 9.0]]);
        let e = d.hermitian_eigensystem().unwrap();
        assert_eq!(e.eigenvalues[0], vec![9.0, 4.0]);
        assert!((e.eigenvectors[0][(1, 0)].norm() - 1.0).abs() < 1e-15);

        let a = m2(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = a.hermitian_eigensystem().unwrap();
        assert!((e.eigenvalues[0][0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues[0][1] - 1.0).abs() < 1e-14);

        let z = AlgebraElement::zero(&AlgebraShape::new(vec![2, 1]).unwrap());
        let e = z.hermitian_eigensystem().unwrap();
        assert!(e.eigenvalues.iter().flatten().all(|&x| x == 0.0));

        let nh = m2(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            nh.hermitian_eigensystem(),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn sqrt_examples() {
        let s2 = AlgebraShape::new(vec![2]).unwrap();
        let id = AlgebraElement::identity(&s2);
        assert!(close(&id.positive_sqrt().unwrap(), &id, 1e-14));
        let d = AlgebraElement::from_diagonals(&[&[4.0, 9.0]]);
        let expect = AlgebraElement::from_diagonals(&[&[2.0, 3.0]]);
        assert!(close(&d.positive_sqrt().unwrap(), &expect, 1e-14));
        let a = m2(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let r3 = 3f64.sqrt();
        let expect = m2(&[
            &[(r3 + 1.0) / 2.0, (r3 - 1.0) / 2.0],
            &[(r3 - 1.0) / 2.0, (r3 + 1.0) / 2.0],
        ]);
        assert!(close(&a.positive_sqrt().unwrap(), &expect, 1e-14));
        let neg = AlgebraElement::from_diagonals(&[&[1.0, -1.0]]);
        assert!(matches!(
            neg.positive_sqrt(),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn polar_examples() {
        let swap = m2(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let pd = swap.polar_decompose();
        assert!(!pd.singular);
        assert!(close(&pd.u, &swap, 1e-13));
        assert!(close(&pd.h, &AlgebraElement::identity(swap.shape()), 1e-13));

        let d = AlgebraElement::from_diagonals(&[&[2.0, -3.0]]);
        let pd = d.polar_decompose();
        assert!(close(
            &pd.u,
            &AlgebraElement::from_diagonals(&[&[1.0, -1.0]]),
            1e-13
        ));
        assert!(close(
            &pd.h,
            &AlgebraElement::from_diagonals(&[&[2.0, 3.0]]),
            1e-13
        ));

        let p = m2(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let pd = p.polar_decompose();
        assert!(pd.singular);
        assert!(close(&pd.u, &p, 1e-12));
        assert!(close(&pd.h, &p, 1e-12));
    }

    #[test]
    fn range_projection_examples() {
        let a = m2(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!(close(
            &a.range_projection().unwrap(),
            &AlgebraElement::identity(a.shape()),
            1e-13
        ));
        let p = m2(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(close(&p.range_projection().unwrap(), &p, 1e-13));
        let z = AlgebraElement::zero(a.shape());
        assert!(close(&z.range_projection().unwrap(), &z, 0.0));
    }

    #[test]
    fn invert_examples() {
        let s2 = AlgebraShape::new(vec![2]).unwrap();
        let inv = AlgebraElement::identity(&s2).invert().unwrap();
        assert!((inv.norm - 1.0).abs() < 1e-15);
        let inv = AlgebraElement::from_diagonals(&[&[2.0, 4.0]])
            .invert()
            .unwrap();
        assert!(close(
            &inv.inverse,
            &AlgebraElement::from_diagonals(&[&[0.5, 0.25]]),
            1e-15
        ));
        assert!((inv.norm - 0.5).abs() < 1e-15);
        let inv = m2(&[&[2.0, 1.0], &[1.0, 2.0]]).invert().unwrap();
        let expect = m2(&[&[2.0, -1.0], &[-1.0, 2.0]]).scale_real(1.0 / 3.0);
        assert!(close(&inv.inverse, &expect, 1e-15));
        let sing = AlgebraElement::from_diagonals(&[&[1.0], &[0.0]]);
        assert_eq!(sing.invert().unwrap_err(), Error::Singular { block: 1 });
    }

    #[test]
    fn positivity_examples() {
        let s2 = AlgebraShape::new(vec![2]).unwrap();
        let p = AlgebraElement::identity(&s2).is_positive();
        assert!(p.positive);
        assert!((p.margin - 1.0).abs() < 1e-15);
        assert!(!m2(&[&[0.0, 1.0], &[0.0, 0.0]]).is_positive().positive);
        let a = m2(&[&[2.0, 1.0], &[1.0, 2.0]]).sub(&AlgebraElement::identity(&s2));
        let p = a.is_positive();
        assert!(p.positive);
        assert!(p.margin.abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let a = AlgebraElement::from_blocks(vec![
            CMatrix::from_rows(vec![
                vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)],
                vec![C64::new(3.0, 0.0), C64::new(0.5, 0.5)],
            ]),
            CMatrix::from_real_rows(&[&[7.0]]),
        ])
        .unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with(r#"{"shape":[2,1],"blocks":[[[[1.0,2.0],"#));
        let back: AlgebraElement = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
        let bad = r#"{"shape":[2],"blocks":[[[[1,0]]]]}"#;
        assert!(serde_json::from_str::<AlgebraElement>(bad).is_err());
    }
}
