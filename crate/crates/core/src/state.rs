//! Pure states on `A = ⊕ M_{n_i}(C)`.
//!
//! Every pure state is a vector state `a ↦ v* a_i v` supported on a single
//! block `i`. Universal statements over the state space are finitized in
//! two ways: exact eigenvector states where a construction calls for one,
//! and seeded samples everywhere else.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraShape, Tolerances};
use crate::dense::{dot, vec_norm, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::random;

const UNIT_TOL: f64 = 1e-12;

/// Vector state on block `block` (zero-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateWire", into = "StateWire")]
pub struct PureState {
    block: usize,
    vector: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateWire {
    block: usize,
    vector: Vec<C64>,
}

impl TryFrom<StateWire> for PureState {
    type Error = Error;

    fn try_from(w: StateWire) -> Result<Self> {
        Self::new(w.block, w.vector)
    }
}

impl From<PureState> for StateWire {
    fn from(s: PureState) -> Self {
        Self {
            block: s.block,
            vector: s.vector,
        }
    }
}

impl PureState {
    /// Requires a unit vector.
    pub fn new(block: usize, vector: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&vector);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Validation {
                path: "vector".into(),
                message: format!("state vector has norm {norm}, expected 1"),
            });
        }
        Ok(Self { block, vector })
    }

    /// Normalizes `vector` first.
    pub fn from_vector(block: usize, vector: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&vector);
        if norm == 0.0 {
            return Err(Error::ZeroElement);
        }
        Ok(Self {
            block,
            vector: vector.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// The state `a ↦ (a_block)_{ii}`.
    pub fn basis(shape: &AlgebraShape, block: usize, i: usize) -> Self {
        let n = shape.block_dims()[block];
        let mut v = vec![ZERO; n];
        v[i] = ONE;
        Self { block, vector: v }
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn check_shape(&self, shape: &AlgebraShape) -> Result<()> {
        match shape.block_dims().get(self.block) {
            Some(&n) if n == self.vector.len() => Ok(()),
            Some(&n) => Err(Error::ShapeMismatch(format!(
                "state vector has length {} but block {} has dimension {n}",
                self.vector.len(),
                self.block
            ))),
            None => Err(Error::ShapeMismatch(format!(
                "state on block {} but algebra has {} blocks",
                self.block,
                shape.num_blocks()
            ))),
        }
    }

    /// `f(a) = v* a_block v`.
    pub fn evaluate(&self, a: &AlgebraElement) -> Result<C64> {
        self.check_shape(a.shape())?;
        Ok(self.evaluate_unchecked(a))
    }

    pub(crate) fn evaluate_unchecked(&self, a: &AlgebraElement) -> C64 {
        let av = a.block(self.block).matvec(&self.vector);
        dot(&self.vector, &av)
    }

    /// Real part of `f(a)`; exact for Hermitian `a` up to round-off.
    pub fn evaluate_real(&self, a: &AlgebraElement) -> f64 {
        self.evaluate_unchecked(a).re
    }
}

/// Eigenvector state of the top eigenvalue across all blocks, so that
/// `f(a) = ‖a‖` for positive `a`.
pub fn norm_attaining_state(a: &AlgebraElement) -> Result<PureState> {
    let eig = a.hermitian_eigensystem_with(&Tolerances::default())?;
    if eig.spectral_radius() <= Tolerances::default().hermitian {
        return Err(Error::ZeroElement);
    }
    let (block, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v[0]))
        .fold((0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    Ok(PureState {
        block,
        vector: eig.eigenvectors[block].column(0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingStrategy {
    /// Deterministic lattice: Fibonacci points on the Bloch sphere for
    /// 2-dimensional blocks, basis and two-level superpositions otherwise.
    Grid,
    /// Haar-uniform vectors per block.
    Random,
    /// Random states, to be augmented with eigenvector states of
    /// caller-supplied elements via [`StateSample::augment_with_eigenstates`].
    EigenDirected,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateSample {
    pub states: Vec<PureState>,
    pub strategy: SamplingStrategy,
    pub seed: u64,
}

impl StateSample {
    /// Adds every eigenvector state of the Hermitian part of each element.
    pub fn augment_with_eigenstates(&mut self, elements: &[AlgebraElement]) {
        for a in elements {
            let eig = a
                .hermitian_part()
                .hermitian_eigensystem()
                .expect("Hermitian part");
            for (block, u) in eig.eigenvectors.iter().enumerate() {
                for j in 0..u.cols() {
                    self.states.push(PureState {
                        block,
                        vector: u.column(j),
                    });
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Deterministic sample of pure states.
///
/// One-dimensional blocks carry exactly one state, which is emitted once;
/// the rest of `count` is dealt round-robin over the larger blocks.
pub fn sample_pure_states(
    shape: &AlgebraShape,
    strategy: SamplingStrategy,
    count: usize,
    seed: u64,
) -> StateSample {
    let dims = shape.block_dims();
    let mut states = Vec::with_capacity(count);
    for (block, &n) in dims.iter().enumerate() {
        if n == 1 && states.len() < count.max(1) {
            states.push(PureState::basis(shape, block, 0));
        }
    }
    let big: Vec<usize> = (0..dims.len()).filter(|&b| dims[b] > 1).collect();
    if !big.is_empty() {
        let remaining = count.saturating_sub(states.len());
        let mut per_block = vec![0usize; big.len()];
        for k in 0..remaining {
            per_block[k % big.len()] += 1;
        }
        let mut rng = random::rng(seed);
        let mut generated: Vec<Vec<PureState>> = Vec::with_capacity(big.len());
        for (slot, &block) in big.iter().enumerate() {
            let n = dims[block];
            let m = per_block[slot];
            let vecs = match strategy {
                SamplingStrategy::Grid => grid_vectors(n, m, &mut rng),
                SamplingStrategy::Random | SamplingStrategy::EigenDirected => {
                    (0..m).map(|_| random::unit_vector(n, &mut rng)).collect()
                }
            };
            generated.push(
                vecs.into_iter()
                    .map(|vector| PureState { block, vector })
                    .collect(),
            );
        }
        // interleave so that prefixes of the sample cover every block
        let longest = generated.iter().map(Vec::len).max().unwrap_or(0);
        for k in 0..longest {
            for g in &generated {
                if let Some(s) = g.get(k) {
                    states.push(s.clone());
                }
            }
        }
    }
    StateSample {
        states,
        strategy,
        seed,
    }
}

fn grid_vectors(n: usize, m: usize, rng: &mut random::SeededRng) -> Vec<Vec<C64>> {
    if n == 2 {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        return (0..m)
            .map(|k| {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
                let theta = z.clamp(-1.0, 1.0).acos();
                let phi = golden * k as f64;
                vec![
                    C64::new((theta / 2.0).cos(), 0.0),
                    C64::from_polar((theta / 2.0).sin(), phi),
                ]
            })
            .collect();
    }
    let mut lattice: Vec<Vec<C64>> = Vec::new();
    for j in 0..n {
        let mut v = vec![ZERO; n];
        v[j] = ONE;
        lattice.push(v);
    }
    let phases = [
        ONE,
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for l in j + 1..n {
            for ph in phases {
                let mut v = vec![ZERO; n];
                v[j] = C64::new(h, 0.0);
                v[l] = ph * h;
                lattice.push(v);
            }
        }
    }
    let mut out: Vec<Vec<C64>> = lattice.into_iter().take(m).collect();
    while out.len() < m {
        out.push(random::unit_vector(n, rng));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let s2 = AlgebraShape::new(vec![2]).unwrap();
        let f = PureState::basis(&s2, 0, 0);
        let a = AlgebraElement::from_real(&[&[5.0, 1.0], &[2.0, 3.0]]);
        assert_eq!(f.evaluate(&a).unwrap(), C64::new(5.0, 0.0));
        assert_eq!(f.evaluate(&AlgebraElement::identity(&s2)).unwrap(), ONE);
        let x = AlgebraElement::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let y = AlgebraElement::from_real(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        assert_eq!(f.evaluate(&x.adjoint().mul(&y)).unwrap(), ZERO);
    }

    #[test]
    fn evaluate_rejects_bad_shapes() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        let f = PureState::basis(&s, 1, 0);
        let wrong = AlgebraElement::identity(&AlgebraShape::new(vec![2]).unwrap());
        assert!(matches!(f.evaluate(&wrong), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn norm_attaining_examples() {
        let a = AlgebraElement::from_diagonals(&[&[1.0, 3.0]]);
        let f = norm_attaining_state(&a).unwrap();
        assert_eq!(f.block(), 0);
        assert!((f.vector()[1].norm() - 1.0).abs() < 1e-14);
        assert!((f.evaluate_real(&a) - 3.0).abs() < 1e-14);

        let p = AlgebraElement::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let f = norm_attaining_state(&p.abs()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f.vector()[0].norm() - h).abs() < 1e-12);
        assert!((f.vector()[1].norm() - h).abs() < 1e-12);
        assert!((f.evaluate_real(&p) - 1.0).abs() < 1e-12);

        let z = AlgebraElement::zero(p.shape());
        assert_eq!(norm_attaining_state(&z).unwrap_err(), Error::ZeroElement);
    }

    #[test]
    fn sampling_contracts() {
        let s1 = AlgebraShape::scalar();
        for strat in [
            SamplingStrategy::Grid,
            SamplingStrategy::Random,
            SamplingStrategy::EigenDirected,
        ] {
            let s = sample_pure_states(&s1, strat, 10, 3);
            assert_eq!(s.len(), 1);
        }
        let s2 = AlgebraShape::new(vec![2]).unwrap();
        let a = sample_pure_states(&s2, SamplingStrategy::Grid, 8, 0);
        let b = sample_pure_states(&s2, SamplingStrategy::Grid, 8, 0);
        assert_eq!(a.len(), 8);
        assert_eq!(a.states, b.states);
        let s23 = AlgebraShape::new(vec![2, 3]).unwrap();
        let a = sample_pure_states(&s23, SamplingStrategy::Random, 100, 7);
        let b = sample_pure_states(&s23, SamplingStrategy::Random, 100, 7);
        assert_eq!(a.len(), 100);
        assert_eq!(a.states, b.states);
        assert!(a
            .states
            .iter()
            .all(|f| (vec_norm(f.vector()) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn eigen_directed_augmentation() {
        let s2 = AlgebraShape::new(vec![2]).unwrap();
        let mut s = sample_pure_states(&s2, SamplingStrategy::EigenDirected, 4, 1);
        let p = AlgebraElement::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        s.augment_with_eigenstates(&[p.clone()]);
        assert_eq!(s.len(), 6);
        assert!(s
            .states
            .iter()
            .any(|f| (f.evaluate_real(&p) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn state_json() {
        let f = PureState::basis(&AlgebraShape::new(vec![2]).unwrap(), 0, 1);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"block":0,"vector":[[0.0,0.0],[1.0,0.0]]}"#);
        assert!(serde_json::from_str::<PureState>(r#"{"block":0,"vector":[[2.0,0.0]]}"#).is_err());
    }
}
