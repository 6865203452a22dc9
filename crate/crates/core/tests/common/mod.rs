//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use laxmod::forms::SesquilinearForm;
use laxmod::{CMatrix, C64};
use nalgebra::DMatrix;

pub fn to_na(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Flattened matrix of `T` assembled directly from the Kronecker picture:
/// entry `(r, c)` of `T` on block `i` contributes `T_{rc,i} ⊗ I_{n_i}`.
pub fn kronecker_matrix(form: &SesquilinearForm) -> DMatrix<C64> {
    let shape = &form.domain().shape;
    let dims = shape.block_dims();
    let d: usize = dims.iter().map(|n| n * n).sum();
    let (q, p) = (form.codomain().rank, form.domain().rank);
    let mut m = DMatrix::from_element(q * d, p * d, C64::new(0.0, 0.0));
    for r in 0..q {
        for c in 0..p {
            let mut offset = 0;
            for (i, &n) in dims.iter().enumerate() {
                let t = form.operator()[r][c].block(i);
                let tn = DMatrix::from_fn(n, n, |a, b| t[(a, b)]);
                let kron = tn.kronecker(&DMatrix::<C64>::identity(n, n));
                m.view_mut((r * d + offset, c * d + offset), (n * n, n * n))
                    .copy_from(&kron);
                offset += n * n;
            }
        }
    }
    m
}

pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    diff / scale.max(1e-300)
}
