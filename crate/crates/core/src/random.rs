//! Seeded random elements for probes, sampling and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::dense::{CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-uniform unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gaussian_c64(rng)).collect();
        let norm = crate::dense::vec_norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Element with i.i.d. standard complex Gaussian entries.
pub fn element<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> AlgebraElement {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| CMatrix::from_fn(n, n, |_, _| gaussian_c64(rng)))
        .collect();
    AlgebraElement::from_blocks(blocks).expect("square blocks")
}

/// Random Hermitian element.
pub fn hermitian<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> AlgebraElement {
    element(shape, rng).hermitian_part()
}

/// Random positive element `g* g`.
pub fn positive<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> AlgebraElement {
    element(shape, rng).gram()
}
