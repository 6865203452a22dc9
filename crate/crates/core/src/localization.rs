//! Localization of a module at a pure state.
//!
//! For a state `f`, the sesquilinear form `(x, y)_f = f(⟨y, x⟩)` is a
//! semi-inner product on `X` with null space `N_f`; the quotient
//! `H_f = X / N_f` is already complete here. It is represented by coset
//! representatives `b_1, …, b_d` chosen by pivoted Cholesky on the
//! flattened form, and the Gram matrix `G_{jk} = f(⟨b_j, b_k⟩) = (b_k, b_j)_f`.
//! A vector with coordinates `c` stands for `Σ_k c_k b_k + N_f`, and
//! `(u, w)_f = d* G c` for coordinates `c` of `u` and `d` of `w`.

use serde::Serialize;

use crate::algebra::Tolerances;
use crate::dense::{dot, CMatrix, Pivoting, C64};
use crate::error::{Error, Result};
use crate::module_space::{
    inner_product, represent_functional, DualFunctional, ModuleElement, ModuleSpace,
};
use crate::random;
use crate::state::PureState;

/// Slot convention under which the three localization identities are
/// checked.
pub const SLOT_CONVENTION: &str = "inner products are A-linear in the second slot; \
functionals are represented as tau(y) = <z_tau, y>; the extended pairing on X' is \
<sigma, rho> := <z_sigma, z_rho>; (x + N_f, y + N_f)_f := f(<y, x>). Under this convention \
(x + N_f, tau_f)_f = f(tau(x)) holds as written, while the pairing identity reads \
<tau, x^> = tau(x) and the state identity reads f(<tau, rho>) = (rho_f, tau_f)_f, \
i.e. both need their arguments swapped relative to a first-slot-linear convention.";

#[derive(Clone, Debug)]
pub struct LocalizedSpace {
    source: ModuleSpace,
    state: PureState,
    basis: Vec<ModuleElement>,
    gram: CMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizedVector {
    pub coordinates: Vec<C64>,
}

impl LocalizedSpace {
    pub fn source(&self) -> &ModuleSpace {
        &self.source
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn basis(&self) -> &[ModuleElement] {
        &self.basis
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `(u, w)_f`.
    pub fn inner(&self, u: &LocalizedVector, w: &LocalizedVector) -> C64 {
        dot(&w.coordinates, &self.gram.matvec(&u.coordinates))
    }

    pub fn norm(&self, u: &LocalizedVector) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    /// The scalar semi-inner product `(x, y)_f = f(⟨y, x⟩)` on `X`.
    pub fn semi_inner(&self, x: &ModuleElement, y: &ModuleElement) -> C64 {
        self.state
            .evaluate_unchecked(&inner_product(y, x).expect("same space"))
    }

    fn solve_gram(&self, rhs: &[C64]) -> Vec<C64> {
        if rhs.is_empty() {
            return Vec::new();
        }
        self.gram
            .solve(rhs, Pivoting::Partial)
            .expect("Gram matrix of a Cholesky-selected basis is nonsingular")
    }

    pub fn zero(&self) -> LocalizedVector {
        LocalizedVector {
            coordinates: vec![C64::new(0.0, 0.0); self.dim()],
        }
    }
}

/// Builds `H_f` for `X` and `f`.
pub fn localize_space(space: &ModuleSpace, f: &PureState) -> Result<LocalizedSpace> {
    f.check_shape(&space.shape)?;
    let candidates = space.scalar_basis();
    let n = candidates.len();
    // M_{ab} = f(⟨c_a, c_b⟩)
    let form = CMatrix::from_fn(n, n, |a, b| {
        f.evaluate_unchecked(&inner_product(&candidates[a], &candidates[b]).expect("same space"))
    });
    let pivots = pivoted_cholesky(&form, Tolerances::default().rank);
    let basis: Vec<ModuleElement> = pivots.iter().map(|&i| candidates[i].clone()).collect();
    let d = basis.len();
    let gram = CMatrix::from_fn(d, d, |j, k| form[(pivots[j], pivots[k])]);
    Ok(LocalizedSpace {
        source: space.clone(),
        state: f.clone(),
        basis,
        gram,
    })
}

// Indices chosen by diagonal-pivoted Cholesky on a positive semidefinite
// Hermitian matrix; stops when the remaining diagonal drops below
// `rel_tol` times the largest initial diagonal entry.
fn pivoted_cholesky(m: &CMatrix, rel_tol: f64) -> Vec<usize> {
    let n = m.rows();
    let mut diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let scale = diag.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut chosen: Vec<usize> = Vec::new();
    let mut factor: Vec<Vec<C64>> = Vec::new();
    if scale <= 0.0 {
        return chosen;
    }
    loop {
        let Some((i, &d)) = diag
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .max_by(|a, b| a.1.total_cmp(b.1))
        else {
            break;
        };
        if d <= rel_tol * scale {
            break;
        }
        let root = d.sqrt();
        let col: Vec<C64> = (0..n)
            .map(|j| {
                let mut v = m[(j, i)];
                for l in &factor {
                    v -= l[j] * l[i].conj();
                }
                v / root
            })
            .collect();
        for j in 0..n {
            diag[j] -= col[j].norm_sqr();
        }
        chosen.push(i);
        factor.push(col);
    }
    chosen
}

/// The coset `x + N_f`.
pub fn localize_vector(space: &LocalizedSpace, x: &ModuleElement) -> Result<LocalizedVector> {
    x.check_space(&space.source)?;
    // r_j = (x, b_j)_f = f(⟨b_j, x⟩) = Σ_k G_{jk} c_k
    let rhs: Vec<C64> = space.basis.iter().map(|b| space.semi_inner(x, b)).collect();
    Ok(LocalizedVector {
        coordinates: space.solve_gram(&rhs),
    })
}

/// The vector `τ_f` with `(x + N_f, τ_f)_f = f(τ(x))` for all `x`.
pub fn localize_functional(
    space: &LocalizedSpace,
    tau: &DualFunctional,
) -> Result<LocalizedVector> {
    if tau.space() != &space.source {
        return Err(Error::ShapeMismatch(
            "functional lives on a different module".into(),
        ));
    }
    if matches!(tau, DualFunctional::BlackBox { .. }) {
        tau.check_linear(8, 0x10ca1)?;
    }
    // (b_m, τ_f)_f = Σ_j conj(d_j) G_{jm}, hence G d = conj(t) with t_m = f(τ(b_m)).
    let rhs: Vec<C64> = space
        .basis
        .iter()
        .map(|b| {
            space
                .state
                .evaluate_unchecked(&tau.apply(b).expect("same space"))
                .conj()
        })
        .collect();
    Ok(LocalizedVector {
        coordinates: space.solve_gram(&rhs),
    })
}

/// Largest deviations of the three localization identities on one
/// (module, state, functional pair) triple.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct PaschkeDefects {
    /// `max |(x + N_f, τ_f)_f − f(τ(x))|` over the basis and random `x`.
    pub pas1: f64,
    /// `max ‖⟨τ, x̂⟩ − τ(x)‖` over random `x`.
    pub pas2: f64,
    /// `|f(⟨τ, ρ⟩) − (ρ_f, τ_f)_f|`.
    pub pas3: f64,
    /// `max ‖⟨x̂, τ⟩ − τ(x)‖`, the unswapped pairing identity.
    pub pas2_unswapped: f64,
    /// `|f(⟨τ, ρ⟩) − (τ_f, ρ_f)_f|`, the unswapped state identity.
    pub pas3_unswapped: f64,
    /// `‖τ_f‖_f − ‖τ‖`; nonpositive up to round-off.
    pub contraction_excess: f64,
}

/// Checks the three identities for `τ` and `ρ` at `f`, using `probes`
/// random elements for the pointwise identities.
pub fn paschke_defects(
    space: &LocalizedSpace,
    tau: &DualFunctional,
    rho: &DualFunctional,
    probes: usize,
    seed: u64,
) -> Result<PaschkeDefects> {
    let f = &space.state;
    let tau_f = localize_functional(space, tau)?;
    let rho_f = localize_functional(space, rho)?;
    let z_tau = represent_functional(tau)?;
    let z_rho = represent_functional(rho)?;
    let mut rng = random::rng(seed);
    let probes_x: Vec<ModuleElement> = space
        .basis
        .iter()
        .cloned()
        .chain((0..probes).map(|_| space.source.random_element(&mut rng)))
        .collect();

    let mut out = PaschkeDefects::default();
    for x in &probes_x {
        let lhs = space.inner(&localize_vector(space, x)?, &tau_f);
        let rhs = f.evaluate_unchecked(&tau.apply(x)?);
        out.pas1 = out.pas1.max((lhs - rhs).norm());

        let tx = tau.apply(x)?;
        let swapped = inner_product(&z_tau, x)?;
        let literal = inner_product(x, &z_tau)?;
        out.pas2 = out.pas2.max(swapped.sub(&tx).operator_norm());
        out.pas2_unswapped = out.pas2_unswapped.max(literal.sub(&tx).operator_norm());
    }
    let pairing = f.evaluate_unchecked(&inner_product(&z_tau, &z_rho)?);
    out.pas3 = (pairing - space.inner(&rho_f, &tau_f)).norm();
    out.pas3_unswapped = (pairing - space.inner(&tau_f, &rho_f)).norm();
    out.contraction_excess = space.norm(&tau_f) - z_tau.norm();
    Ok(out)
}
