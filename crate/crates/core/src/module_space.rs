//! Free Hilbert modules `X = A^p` and their submodules.
//!
//! The inner product is `⟨x, y⟩ = Σ_k x_k* y_k`, A-linear in the second
//! slot. A bounded A-linear functional `τ` is represented by the element
//! `z` with `τ(y) = ⟨z, y⟩`, which forces `z_k = τ(e_k)*`.
//!
//! Submodules are handled by flattening: `X` is identified with
//! `C^{p·Σn_i²}` (component, then block, then row-major entries). Under
//! this identification the trace pairing `tr⟨x, y⟩` is the standard scalar
//! product, so for right A-invariant subspaces the module orthogonal
//! complement and the scalar one coincide.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraShape, Tolerances};
use crate::dense::{orthonormal_basis, CMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::random;

/// Relative tolerance for rank decisions in Gram-Schmidt.
pub(crate) const SPAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpace {
    pub shape: AlgebraShape,
    pub rank: usize,
}

impl ModuleSpace {
    pub fn new(shape: AlgebraShape, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Validation {
                path: "rank".into(),
                message: "module rank must be at least 1".into(),
            });
        }
        Ok(Self { shape, rank })
    }

    /// Complex dimension of the flattened space.
    pub fn flat_dim(&self) -> usize {
        self.rank * self.shape.dim()
    }

    /// Standard generators `e_k · 1`.
    pub fn generators(&self) -> Vec<ModuleElement> {
        (0..self.rank)
            .map(|k| ModuleElement::generator(self, k))
            .collect()
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ModuleElement {
        ModuleElement {
            space: self.clone(),
            components: (0..self.rank)
                .map(|_| random::element(&self.shape, rng))
                .collect(),
        }
    }

    /// Random element of module norm one.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> ModuleElement {
        loop {
            let x = self.random_element(rng);
            let n = x.norm();
            if n > 1e-8 {
                return x.scale(C64::new(1.0 / n, 0.0));
            }
        }
    }

    /// Scalar basis `e_k · E^{(i)}_{st}` in flattening order.
    pub fn scalar_basis(&self) -> Vec<ModuleElement> {
        let mut out = Vec::with_capacity(self.flat_dim());
        for k in 0..self.rank {
            for (i, &n) in self.shape.block_dims().iter().enumerate() {
                for s in 0..n {
                    for t in 0..n {
                        let mut components = vec![AlgebraElement::zero(&self.shape); self.rank];
                        components[k] = AlgebraElement::matrix_unit(&self.shape, i, s, t);
                        out.push(ModuleElement {
                            space: self.clone(),
                            components,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Coordinates of an algebra element: blocks in order, row-major.
pub fn algebra_coordinates(a: &AlgebraElement) -> Vec<C64> {
    a.blocks()
        .iter()
        .flat_map(|b| b.as_slice().iter().copied())
        .collect()
}

pub fn algebra_from_coordinates(shape: &AlgebraShape, v: &[C64]) -> AlgebraElement {
    let mut offset = 0;
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let b = CMatrix::from_fn(n, n, |i, j| v[offset + i * n + j]);
            offset += n * n;
            b
        })
        .collect();
    AlgebraElement::from_blocks(blocks).expect("square blocks")
}

/// Element `(x_1, …, x_p)` of `A^p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementWire", into = "ElementWire")]
pub struct ModuleElement {
    space: ModuleSpace,
    components: Vec<AlgebraElement>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementWire {
    rank: usize,
    components: Vec<AlgebraElement>,
}

impl TryFrom<ElementWire> for ModuleElement {
    type Error = Error;

    fn try_from(w: ElementWire) -> Result<Self> {
        if w.rank != w.components.len() {
            return Err(Error::ShapeMismatch(format!(
                "rank {} but {} components",
                w.rank,
                w.components.len()
            )));
        }
        Self::new(w.components)
    }
}

impl From<ModuleElement> for ElementWire {
    fn from(x: ModuleElement) -> Self {
        Self {
            rank: x.space.rank,
            components: x.components,
        }
    }
}

impl ModuleElement {
    pub fn new(components: Vec<AlgebraElement>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::ShapeMismatch("module element needs a component".into()))?;
        let shape = first.shape().clone();
        for c in &components[1..] {
            first.check_same_shape(c)?;
        }
        Ok(Self {
            space: ModuleSpace::new(shape, components.len())?,
            components,
        })
    }

    pub fn zero(space: &ModuleSpace) -> Self {
        Self {
            space: space.clone(),
            components: vec![AlgebraElement::zero(&space.shape); space.rank],
        }
    }

    /// `e_k · 1`.
    pub fn generator(space: &ModuleSpace, k: usize) -> Self {
        let mut x = Self::zero(space);
        x.components[k] = AlgebraElement::identity(&space.shape);
        x
    }

    pub fn space(&self) -> &ModuleSpace {
        &self.space
    }

    pub fn components(&self) -> &[AlgebraElement] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &AlgebraElement {
        &self.components[k]
    }

    pub fn check_space(&self, space: &ModuleSpace) -> Result<()> {
        if &self.space != space {
            return Err(Error::ShapeMismatch(format!(
                "element of rank {} over {:?}, expected rank {} over {:?}",
                self.space.rank,
                self.space.shape.block_dims(),
                space.rank,
                space.shape.block_dims()
            )));
        }
        Ok(())
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(&AlgebraElement, &AlgebraElement) -> AlgebraElement,
    ) -> Self {
        assert_eq!(self.space, other.space, "module spaces differ");
        Self {
            space: self.space.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, AlgebraElement::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, AlgebraElement::sub)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Right action `x · a`.
    pub fn right_mul(&self, a: &AlgebraElement) -> Self {
        Self {
            space: self.space.clone(),
            components: self.components.iter().map(|c| c.mul(a)).collect(),
        }
    }

    /// `⟨self, self⟩`.
    pub fn self_inner(&self) -> AlgebraElement {
        inner_product_unchecked(self, self).hermitian_part()
    }

    /// Module norm `‖⟨x,x⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.self_inner().operator_norm().max(0.0).sqrt()
    }

    /// Euclidean norm of the flattened coordinates.
    pub fn flat_norm(&self) -> f64 {
        crate::dense::vec_norm(&self.flatten())
    }

    pub fn flatten(&self) -> Vec<C64> {
        self.components
            .iter()
            .flat_map(algebra_coordinates)
            .collect()
    }

    pub fn unflatten(space: &ModuleSpace, v: &[C64]) -> Self {
        assert_eq!(
            v.len(),
            space.flat_dim(),
            "coordinate vector has wrong length"
        );
        let d = space.shape.dim();
        Self {
            space: space.clone(),
            components: (0..space.rank)
                .map(|k| algebra_from_coordinates(&space.shape, &v[k * d..(k + 1) * d]))
                .collect(),
        }
    }
}

fn inner_product_unchecked(x: &ModuleElement, y: &ModuleElement) -> AlgebraElement {
    let mut acc = AlgebraElement::zero(&x.space.shape);
    for (a, b) in x.components.iter().zip(&y.components) {
        acc = acc.add(&a.adjoint().mul(b));
    }
    acc
}

/// `⟨x, y⟩ = Σ_k x_k* y_k`.
pub fn inner_product(x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
    y.check_space(&x.space)?;
    Ok(inner_product_unchecked(x, y))
}

/// `|x| = ⟨x, x⟩^{1/2}`.
pub fn abs_module(x: &ModuleElement) -> AlgebraElement {
    x.self_inner()
        .positive_sqrt()
        .expect("inner products are positive")
}

pub type FunctionalFn = dyn Fn(&ModuleElement) -> AlgebraElement + Send + Sync;

/// A bounded A-linear map `X → A`.
#[derive(Clone)]
pub enum DualFunctional {
    /// `y ↦ ⟨z, y⟩`.
    Representer(ModuleElement),
    /// Opaque map, assumed A-linear; checked by probing.
    BlackBox {
        space: ModuleSpace,
        map: Arc<FunctionalFn>,
    },
}

impl fmt::Debug for DualFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Representer(z) => f.debug_tuple("Representer").field(z).finish(),
            Self::BlackBox { space, .. } => {
                f.debug_struct("BlackBox").field("space", space).finish()
            }
        }
    }
}

/// Norm of a functional, exact for representers and a sampled lower bound
/// otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FunctionalNorm {
    pub value: f64,
    pub exact: bool,
}

impl DualFunctional {
    /// `x̂ = ⟨x, ·⟩`.
    pub fn hat(x: &ModuleElement) -> Self {
        Self::Representer(x.clone())
    }

    pub fn black_box(
        space: &ModuleSpace,
        map: impl Fn(&ModuleElement) -> AlgebraElement + Send + Sync + 'static,
    ) -> Self {
        Self::BlackBox {
            space: space.clone(),
            map: Arc::new(map),
        }
    }

    pub fn space(&self) -> &ModuleSpace {
        match self {
            Self::Representer(z) => z.space(),
            Self::BlackBox { space, .. } => space,
        }
    }

    pub fn apply(&self, y: &ModuleElement) -> Result<AlgebraElement> {
        y.check_space(self.space())?;
        Ok(match self {
            Self::Representer(z) => inner_product_unchecked(z, y),
            Self::BlackBox { map, .. } => map(y),
        })
    }

    /// Largest relative defect of A-linearity and additivity over `probes`
    /// random inputs.
    pub fn linearity_defect(&self, probes: usize, seed: u64) -> f64 {
        let space = self.space();
        let mut rng = random::rng(seed);
        let mut worst = 0.0f64;
        for _ in 0..probes {
            let y1 = space.random_element(&mut rng);
            let y2 = space.random_element(&mut rng);
            let b = random::element(&space.shape, &mut rng);
            let t1 = self.apply(&y1).expect("same space");
            let t2 = self.apply(&y2).expect("same space");
            let scale = 1.0 + t1.frobenius_norm() + t2.frobenius_norm();
            let lhs = self.apply(&y1.right_mul(&b)).expect("same space");
            let module_defect =
                lhs.sub(&t1.mul(&b)).frobenius_norm() / (scale * (1.0 + b.frobenius_norm()));
            let sum = self.apply(&y1.add(&y2)).expect("same space");
            let add_defect = sum.sub(&t1.add(&t2)).frobenius_norm() / scale;
            worst = worst.max(module_defect).max(add_defect);
        }
        worst
    }

    pub fn check_linear(&self, probes: usize, seed: u64) -> Result<()> {
        let defect = self.linearity_defect(probes, seed);
        if defect > 1e-10 {
            return Err(Error::NotLinear { defect });
        }
        Ok(())
    }

    pub fn norm(&self, samples: usize, seed: u64) -> FunctionalNorm {
        match self {
            Self::Representer(z) => FunctionalNorm {
                value: z.norm(),
                exact: true,
            },
            Self::BlackBox { space, map } => {
                let mut rng = random::rng(seed);
                let value = (0..samples)
                    .map(|_| map(&space.random_unit(&mut rng)).operator_norm())
                    .fold(0.0, f64::max);
                FunctionalNorm {
                    value,
                    exact: false,
                }
            }
        }
    }
}

/// Self-dual representation: the `z` with `τ(y) = ⟨z, y⟩` for all `y`.
pub fn represent_functional(tau: &DualFunctional) -> Result<ModuleElement> {
    match tau {
        DualFunctional::Representer(z) => Ok(z.clone()),
        DualFunctional::BlackBox { space, map } => {
            tau.check_linear(8, 0x7a11)?;
            Ok(ModuleElement {
                space: space.clone(),
                components: space
                    .generators()
                    .iter()
                    .map(|e| map(e).adjoint())
                    .collect(),
            })
        }
    }
}

/// Submodule generated (over A) by a finite set of elements.
#[derive(Clone, Debug)]
pub struct Submodule {
    ambient: ModuleSpace,
    generators: Vec<ModuleElement>,
    flat_basis: OnceLock<Vec<Vec<C64>>>,
}

#[derive(Serialize)]
struct SubmoduleWire<'a> {
    generators: &'a [ModuleElement],
}

impl Serialize for Submodule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubmoduleWire {
            generators: &self.generators,
        }
        .serialize(s)
    }
}

/// `{"generators": [...]}`; the ambient space comes from context.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmoduleSpec {
    pub generators: Vec<ModuleElement>,
}

impl Submodule {
    pub fn new(ambient: &ModuleSpace, generators: Vec<ModuleElement>) -> Result<Self> {
        for g in &generators {
            g.check_space(ambient)?;
        }
        Ok(Self {
            ambient: ambient.clone(),
            generators,
            flat_basis: OnceLock::new(),
        })
    }

    pub fn from_spec(ambient: &ModuleSpace, spec: &SubmoduleSpec) -> Result<Self> {
        Self::new(ambient, spec.generators.clone())
    }

    pub fn whole(ambient: &ModuleSpace) -> Self {
        Self::new(ambient, ambient.generators()).expect("standard generators")
    }

    pub fn zero(ambient: &ModuleSpace) -> Self {
        Self::new(ambient, Vec::new()).expect("empty generator set")
    }

    /// `span_A{e_k : k ∈ indices}`.
    pub fn coordinate(ambient: &ModuleSpace, indices: &[usize]) -> Self {
        Self::new(
            ambient,
            indices
                .iter()
                .map(|&k| ModuleElement::generator(ambient, k))
                .collect(),
        )
        .expect("standard generators")
    }

    pub fn ambient(&self) -> &ModuleSpace {
        &self.ambient
    }

    pub fn generators(&self) -> &[ModuleElement] {
        &self.generators
    }

    pub fn spec(&self) -> SubmoduleSpec {
        SubmoduleSpec {
            generators: self.generators.clone(),
        }
    }

    /// Orthonormal basis of the flattened submodule, computed once.
    pub fn flat_basis(&self) -> &[Vec<C64>] {
        self.flat_basis.get_or_init(|| {
            let shape = &self.ambient.shape;
            let mut candidates = Vec::new();
            for g in &self.generators {
                for (i, &n) in shape.block_dims().iter().enumerate() {
                    for s in 0..n {
                        for t in 0..n {
                            let unit = AlgebraElement::matrix_unit(shape, i, s, t);
                            candidates.push(g.right_mul(&unit).flatten());
                        }
                    }
                }
            }
            orthonormal_basis(&candidates, SPAN_TOL)
        })
    }

    /// Complex dimension.
    pub fn dim(&self) -> usize {
        self.flat_basis().len()
    }

    /// Orthogonal projection onto the submodule.
    pub fn project(&self, x: &ModuleElement) -> ModuleElement {
        let v = x.flatten();
        let mut out = vec![ZERO; v.len()];
        for q in self.flat_basis() {
            let c = crate::dense::dot(q, &v);
            for (o, qi) in out.iter_mut().zip(q) {
                *o += c * qi;
            }
        }
        ModuleElement::unflatten(&self.ambient, &out)
    }

    /// Projection that errors on elements of a different space.
    pub fn project_checked(&self, x: &ModuleElement) -> Result<ModuleElement> {
        x.check_space(&self.ambient)?;
        Ok(self.project(x))
    }

    pub fn contains(&self, x: &ModuleElement, tol: f64) -> bool {
        x.sub(&self.project(x)).flat_norm() <= tol * (1.0 + x.flat_norm())
    }

    /// Whether every generator of `other` lies in `self`.
    pub fn includes(&self, other: &Submodule, tol: f64) -> bool {
        other.generators.iter().all(|g| self.contains(g, tol))
    }

    pub fn orthogonal_complement(&self) -> Submodule {
        let n = self.ambient.flat_dim();
        let own = self.flat_basis();
        let mut candidates: Vec<Vec<C64>> = own.to_vec();
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            candidates.push(e);
        }
        let full = orthonormal_basis(&candidates, SPAN_TOL);
        let complement: Vec<Vec<C64>> = full[own.len()..].to_vec();
        let generators = complement
            .iter()
            .map(|v| ModuleElement::unflatten(&self.ambient, v))
            .collect();
        let out = Submodule {
            ambient: self.ambient.clone(),
            generators,
            flat_basis: OnceLock::new(),
        };
        let _ = out.flat_basis.set(complement);
        out
    }

    /// Random element of the submodule.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ModuleElement {
        self.project(&self.ambient.random_element(rng))
    }

    /// Representer inside the submodule of a functional defined on it:
    /// `τ(y) = ⟨z, y⟩` for `y` in the submodule, with `z` in the submodule.
    pub fn represent_functional(
        &self,
        tau: impl Fn(&ModuleElement) -> AlgebraElement,
    ) -> ModuleElement {
        let components = self
            .ambient
            .generators()
            .iter()
            .map(|e| tau(&self.project(e)).adjoint())
            .collect();
        let z = ModuleElement {
            space: self.ambient.clone(),
            components,
        };
        self.project(&z)
    }
}

/// Elements `w_i` with `Σ ⟨w_i, w_i⟩ = 1`, obtained as `w_i = x_i s^{-1/2}`
/// where `s = Σ ⟨x_i, x_i⟩`.
///
/// The generators are accepted when the right ideal spanned by
/// `⟨x_i, x_j b⟩` (`b ∈ A`) is all of `A`, which is exactly when `s` is
/// invertible; otherwise the number of missed dimensions is reported.
pub fn fullness_witnesses(
    space: &ModuleSpace,
    generators: &[ModuleElement],
) -> Result<Vec<ModuleElement>> {
    for g in generators {
        g.check_space(space)?;
    }
    let shape = &space.shape;
    let mut candidates = Vec::new();
    for xi in generators {
        for xj in generators {
            let ip = inner_product_unchecked(xi, xj);
            for (b, &n) in shape.block_dims().iter().enumerate() {
                for s in 0..n {
                    for t in 0..n {
                        let unit = AlgebraElement::matrix_unit(shape, b, s, t);
                        candidates.push(algebra_coordinates(&ip.mul(&unit)));
                    }
                }
            }
        }
    }
    let span = orthonormal_basis(&candidates, SPAN_TOL).len();
    if span < shape.dim() {
        return Err(Error::NotFull {
            missing: shape.dim() - span,
        });
    }
    let mut s = AlgebraElement::zero(shape);
    for x in generators {
        s = s.add(&x.self_inner());
    }
    let s_inv_half = s.inverse_sqrt(&Tolerances::default())?;
    let witnesses: Vec<ModuleElement> = generators
        .iter()
        .map(|x| x.right_mul(&s_inv_half))
        .collect();
    let mut total = AlgebraElement::zero(shape);
    for w in &witnesses {
        total = total.add(&w.self_inner());
    }
    let err = total.sub(&AlgebraElement::identity(shape)).operator_norm();
    if err > 1e-8 {
        return Err(Error::NotFull { missing: 0 });
    }
    Ok(witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> AlgebraShape {
        AlgebraShape::new(vec![2]).unwrap()
    }

    fn single(a: AlgebraElement) -> ModuleElement {
        ModuleElement::new(vec![a]).unwrap()
    }

    fn p_plus() -> AlgebraElement {
        AlgebraElement::from_real(&[&[0.5, 0.5], &[0.5, 0.5]])
    }

    fn p_minus() -> AlgebraElement {
        AlgebraElement::from_real(&[&[0.5, -0.5], &[-0.5, 0.5]])
    }

    #[test]
    fn inner_product_examples() {
        let x2 = ModuleSpace::new(m2(), 2).unwrap();
        let e1 = ModuleElement::generator(&x2, 0);
        let e2 = ModuleElement::generator(&x2, 1);
        assert!(inner_product(&e1, &e2).unwrap().frobenius_norm() == 0.0);
        assert_eq!(
            inner_product(&e1, &e1).unwrap(),
            AlgebraElement::identity(&m2())
        );
        let ip = inner_product(&single(p_plus()), &single(p_minus())).unwrap();
        assert!(ip.frobenius_norm() < 1e-16);
        let other = ModuleSpace::new(m2(), 1).unwrap();
        assert!(inner_product(&e1, &ModuleElement::generator(&other, 0)).is_err());
    }

    #[test]
    fn abs_examples() {
        let x1 = ModuleSpace::new(m2(), 1).unwrap();
        let e = ModuleElement::generator(&x1, 0);
        assert!(
            abs_module(&e)
                .sub(&AlgebraElement::identity(&m2()))
                .frobenius_norm()
                < 1e-14
        );
        let ax = abs_module(&single(p_plus()));
        assert!(ax.sub(&p_plus()).frobenius_norm() < 1e-12);
        let f = crate::state::PureState::basis(&m2(), 0, 0);
        assert!((f.evaluate_real(&ax) - 0.5).abs() < 1e-12);
        let d = abs_module(&single(AlgebraElement::from_diagonals(&[&[3.0, -4.0]])));
        assert!(
            d.sub(&AlgebraElement::from_diagonals(&[&[3.0, 4.0]]))
                .frobenius_norm()
                < 1e-13
        );
    }

    #[test]
    fn represent_examples() {
        let space = ModuleSpace::new(m2(), 2).unwrap();
        let mut rng = random::rng(11);
        let y = space.random_element(&mut rng);
        assert_eq!(represent_functional(&DualFunctional::hat(&y)).unwrap(), y);

        let zero = DualFunctional::black_box(&space, {
            let s = space.shape.clone();
            move |_| AlgebraElement::zero(&s)
        });
        assert!(represent_functional(&zero).unwrap().flat_norm() == 0.0);

        let b1 = random::element(&space.shape, &mut rng);
        let b2 = random::element(&space.shape, &mut rng);
        let (c1, c2) = (b1.clone(), b2.clone());
        let tau = DualFunctional::black_box(&space, move |y| {
            c1.adjoint()
                .mul(y.component(0))
                .add(&c2.adjoint().mul(y.component(1)))
        });
        let z = represent_functional(&tau).unwrap();
        assert!(z.component(0).sub(&b1).frobenius_norm() < 1e-13);
        assert!(z.component(1).sub(&b2).frobenius_norm() < 1e-13);
        for _ in 0..50 {
            let y = space.random_element(&mut rng);
            let d = tau.apply(&y).unwrap().sub(&inner_product(&z, &y).unwrap());
            assert!(d.frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn nonlinear_black_box_rejected() {
        let space = ModuleSpace::new(m2(), 1).unwrap();
        let tau = DualFunctional::black_box(&space, |y| y.component(0).adjoint());
        assert!(matches!(
            represent_functional(&tau),
            Err(Error::NotLinear { .. })
        ));
    }

    #[test]
    fn complement_examples() {
        let x2 = ModuleSpace::new(m2(), 2).unwrap();
        let y = Submodule::coordinate(&x2, &[0]);
        let yp = y.orthogonal_complement();
        assert_eq!(yp.dim(), 4);
        assert!(Submodule::coordinate(&x2, &[1]).includes(&yp, 1e-12));
        assert!(yp.includes(&Submodule::coordinate(&x2, &[1]), 1e-12));
        assert_eq!(Submodule::whole(&x2).orthogonal_complement().dim(), 0);

        // z with ⟨z,z⟩ = p a rank-one projection: Y has dimension 2, Y^⊥ the rest
        let x1 = ModuleSpace::new(m2(), 1).unwrap();
        let y = Submodule::new(&x1, vec![single(p_plus())]).unwrap();
        assert_eq!(y.dim(), 2);
        let yp = y.orthogonal_complement();
        assert_eq!(yp.dim(), 2);
        for g in yp.generators() {
            assert!(
                inner_product(g, &single(p_plus()))
                    .unwrap()
                    .frobenius_norm()
                    < 1e-12
            );
            // range in 1 - p
            assert!(p_plus().mul(g.component(0)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn projection_examples() {
        let x2 = ModuleSpace::new(m2(), 2).unwrap();
        let y = Submodule::coordinate(&x2, &[0]);
        let mut rng = random::rng(5);
        let x = x2.random_element(&mut rng);
        let px = y.project(&x);
        assert!(px.component(0).sub(x.component(0)).frobenius_norm() < 1e-13);
        assert!(px.component(1).frobenius_norm() < 1e-13);
        assert!(y.project(&px).sub(&px).flat_norm() < 1e-13);
        let w = y.orthogonal_complement().project(&x);
        assert!(y.project(&w).flat_norm() < 1e-13);
    }

    #[test]
    fn fullness_examples() {
        let x1 = ModuleSpace::new(m2(), 1).unwrap();
        let w = fullness_witnesses(&x1, &[ModuleElement::generator(&x1, 0)]).unwrap();
        assert_eq!(w.len(), 1);
        assert!(
            w[0].component(0)
                .sub(&AlgebraElement::identity(&m2()))
                .frobenius_norm()
                < 1e-13
        );

        let x = single(AlgebraElement::from_diagonals(&[&[2.0, 1.0]]));
        let w = fullness_witnesses(&x1, &[x]).unwrap();
        assert!(
            w[0].self_inner()
                .sub(&AlgebraElement::identity(&m2()))
                .frobenius_norm()
                < 1e-12
        );
        assert!(
            w[0].component(0)
                .sub(&AlgebraElement::from_diagonals(&[&[1.0, 1.0]]))
                .frobenius_norm()
                < 1e-12
        );

        let err = fullness_witnesses(&x1, &[single(p_plus())]).unwrap_err();
        assert_eq!(err, Error::NotFull { missing: 2 });
    }

    #[test]
    fn element_json() {
        let x1 = ModuleSpace::new(m2(), 1).unwrap();
        let e = ModuleElement::generator(&x1, 0);
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.starts_with(r#"{"rank":1,"components":[{"shape":[2]"#));
        assert_eq!(serde_json::from_str::<ModuleElement>(&s).unwrap(), e);
        let bad = s.replace(r#""rank":1"#, r#""rank":2"#);
        assert!(serde_json::from_str::<ModuleElement>(&bad).is_err());
    }
}
