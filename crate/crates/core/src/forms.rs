//! A-sesquilinear forms `B(x, y) = ⟨Tx, y⟩` and the coercivity conditions
//! used by the solver.
//!
//! `T: A^p → A^q` is stored as a `q × p` matrix over `A` acting by left
//! multiplication, `(Tx)_r = Σ_c T_{rc} x_c`. On algebra block `i` it acts
//! on the stacked `(p·n_i) × n_i` matrix of `x` as the `(q·n_i) × (p·n_i)`
//! matrix `[T_{rc,i}]`, which is how norms, positivity and witnesses are
//! computed.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Tolerances};
use crate::dense::{dot, orthonormal_basis, vec_norm, CMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::module_space::{
    abs_module, fullness_witnesses, inner_product, ModuleElement, ModuleSpace,
};
use crate::random::{self, SeededRng};
use crate::state::{PureState, StateSample};

/// Slack allowed when checking a recorded witness or bound.
pub const WITNESS_SLACK: f64 = 1e-9;

/// Default tolerance of the uniform-condition search.
pub const FALSIFY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormWire", into = "FormWire")]
pub struct SesquilinearForm {
    domain: ModuleSpace,
    codomain: ModuleSpace,
    operator: Vec<Vec<AlgebraElement>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormWire {
    domain: ModuleSpace,
    codomain: ModuleSpace,
    operator: Vec<Vec<AlgebraElement>>,
}

impl TryFrom<FormWire> for SesquilinearForm {
    type Error = Error;

    fn try_from(w: FormWire) -> Result<Self> {
        Self::new(w.domain, w.codomain, w.operator)
    }
}

impl From<SesquilinearForm> for FormWire {
    fn from(f: SesquilinearForm) -> Self {
        Self {
            domain: f.domain,
            codomain: f.codomain,
            operator: f.operator,
        }
    }
}

impl SesquilinearForm {
    /// `operator[r][c] = T_{rc}`, with `codomain.rank` rows and
    /// `domain.rank` columns.
    pub fn new(
        domain: ModuleSpace,
        codomain: ModuleSpace,
        operator: Vec<Vec<AlgebraElement>>,
    ) -> Result<Self> {
        if domain.shape != codomain.shape {
            return Err(Error::ShapeMismatch(
                "domain and codomain are modules over different algebras".into(),
            ));
        }
        if operator.len() != codomain.rank {
            return Err(Error::Validation {
                path: "operator".into(),
                message: format!("expected {} rows, got {}", codomain.rank, operator.len()),
            });
        }
        for (r, row) in operator.iter().enumerate() {
            if row.len() != domain.rank {
                return Err(Error::Validation {
                    path: format!("operator[{r}]"),
                    message: format!("expected {} entries, got {}", domain.rank, row.len()),
                });
            }
            for (c, a) in row.iter().enumerate() {
                if a.shape() != &domain.shape {
                    return Err(Error::Validation {
                        path: format!("operator[{r}][{c}]"),
                        message: "entry has the wrong algebra shape".into(),
                    });
                }
            }
        }
        Ok(Self {
            domain,
            codomain,
            operator,
        })
    }

    /// `B(x, y) = ⟨x, y⟩`.
    pub fn inner_product(space: &ModuleSpace) -> Self {
        Self::diagonal(space, &AlgebraElement::identity(&space.shape))
    }

    /// `T = a · I`: left multiplication by `a` in every component.
    pub fn diagonal(space: &ModuleSpace, a: &AlgebraElement) -> Self {
        let zero = AlgebraElement::zero(&space.shape);
        let operator = (0..space.rank)
            .map(|r| {
                (0..space.rank)
                    .map(|c| if r == c { a.clone() } else { zero.clone() })
                    .collect()
            })
            .collect();
        Self::new(space.clone(), space.clone(), operator).expect("square operator")
    }

    /// `T = R* R + δ` for a Gaussian `R`, so that `T` is positive with
    /// smallest eigenvalue at least `δ`.
    pub fn random_positive_invertible(
        space: &ModuleSpace,
        delta: f64,
        rng: &mut SeededRng,
    ) -> Self {
        let p = space.rank;
        let r: Vec<Vec<AlgebraElement>> = (0..p)
            .map(|_| (0..p).map(|_| random::element(&space.shape, rng)).collect())
            .collect();
        let shift = AlgebraElement::scalar(&space.shape, C64::new(delta, 0.0));
        let operator = (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| {
                        let mut acc = if i == j {
                            shift.clone()
                        } else {
                            AlgebraElement::zero(&space.shape)
                        };
                        for row in &r {
                            acc = acc.add(&row[i].adjoint().mul(&row[j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Self::new(space.clone(), space.clone(), operator).expect("square operator")
    }

    pub fn domain(&self) -> &ModuleSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &ModuleSpace {
        &self.codomain
    }

    pub fn operator(&self) -> &[Vec<AlgebraElement>] {
        &self.operator
    }

    /// `Tx`.
    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        x.check_space(&self.domain)?;
        let components = self
            .operator
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x.components())
                    .fold(AlgebraElement::zero(&self.domain.shape), |acc, (t, xc)| {
                        acc.add(&t.mul(xc))
                    })
            })
            .collect();
        ModuleElement::new(components)
    }

    /// The form of `T*`, with domain and codomain exchanged.
    pub fn adjoint(&self) -> Self {
        let operator = (0..self.domain.rank)
            .map(|c| {
                (0..self.codomain.rank)
                    .map(|r| self.operator[r][c].adjoint())
                    .collect()
            })
            .collect();
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            operator,
        }
    }

    /// `B(x, y) = ⟨Tx, y⟩`.
    pub fn evaluate(&self, x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
        y.check_space(&self.codomain)?;
        inner_product(&self.apply(x)?, y)
    }

    /// `[T_{rc,i}]` as a `(q·n_i) × (p·n_i)` matrix.
    pub fn block_matrix(&self, block: usize) -> CMatrix {
        let n = self.domain.shape.block_dims()[block];
        let (q, p) = (self.codomain.rank, self.domain.rank);
        CMatrix::from_fn(q * n, p * n, |i, j| {
            self.operator[i / n][j / n].block(block)[(i % n, j % n)]
        })
    }

    /// Matrix of `T` on flattened coordinates.
    pub fn flat_matrix(&self) -> CMatrix {
        let shape = &self.domain.shape;
        let d = shape.dim();
        let mut m = CMatrix::zeros(self.codomain.rank * d, self.domain.rank * d);
        for (r, row) in self.operator.iter().enumerate() {
            for (c, t) in row.iter().enumerate() {
                let mut offset = 0;
                for (i, &n) in shape.block_dims().iter().enumerate() {
                    let b = t.block(i);
                    for s in 0..n {
                        for s2 in 0..n {
                            for col in 0..n {
                                m[(r * d + offset + s * n + col, c * d + offset + s2 * n + col)] =
                                    b[(s, s2)];
                            }
                        }
                    }
                    offset += n * n;
                }
            }
        }
        m
    }

    /// `‖T‖`, equal to the norm of the form.
    pub fn norm(&self) -> f64 {
        (0..self.domain.shape.num_blocks())
            .map(|i| self.block_matrix(i).spectral_norm())
            .fold(0.0, f64::max)
    }

    /// `‖T⁻¹‖⁻¹`, i.e. the smallest singular value over all blocks; zero
    /// when `T` is not invertible.
    pub fn inverse_norm_reciprocal(&self) -> f64 {
        if self.domain.rank != self.codomain.rank {
            return 0.0;
        }
        (0..self.domain.shape.num_blocks())
            .map(|i| {
                let t = self.block_matrix(i).singular_triplets();
                t.values.last().copied().unwrap_or(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest relative defect of `B(xa, yb) = a* B(x,y) b` over random probes.
    pub fn sesquilinearity_defect(&self, probes: usize, seed: u64) -> f64 {
        let bb = BlackBoxForm::from_form(self);
        probe_sesquilinearity(&bb, probes, seed).map_or(f64::INFINITY, |p| p.defect)
    }
}

/// `|f(B(x, y))|`.
pub fn form_value_at(
    form: &SesquilinearForm,
    f: &PureState,
    x: &ModuleElement,
    y: &ModuleElement,
) -> Result<f64> {
    Ok(f.evaluate(&form.evaluate(x, y)?)?.norm())
}

/// Computes `⟨Tx, y⟩`.
pub fn evaluate_form(
    form: &SesquilinearForm,
    x: &ModuleElement,
    y: &ModuleElement,
) -> Result<AlgebraElement> {
    form.evaluate(x, y)
}

pub type FormFn = dyn Fn(&ModuleElement, &ModuleElement) -> AlgebraElement + Send + Sync;

/// A form known only through evaluations.
#[derive(Clone)]
pub struct BlackBoxForm {
    domain: ModuleSpace,
    codomain: ModuleSpace,
    map: Arc<FormFn>,
}

impl fmt::Debug for BlackBoxForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBoxForm")
            .field("domain", &self.domain)
            .field("codomain", &self.codomain)
            .finish_non_exhaustive()
    }
}

impl BlackBoxForm {
    pub fn new(
        domain: &ModuleSpace,
        codomain: &ModuleSpace,
        map: impl Fn(&ModuleElement, &ModuleElement) -> AlgebraElement + Send + Sync + 'static,
    ) -> Self {
        Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            map: Arc::new(map),
        }
    }

    pub fn from_form(form: &SesquilinearForm) -> Self {
        let inner = form.clone();
        Self::new(&form.domain, &form.codomain, move |x, y| {
            inner.evaluate(x, y).expect("probe in the right spaces")
        })
    }

    pub fn domain(&self) -> &ModuleSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &ModuleSpace {
        &self.codomain
    }

    pub fn evaluate(&self, x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
        x.check_space(&self.domain)?;
        y.check_space(&self.codomain)?;
        Ok((self.map)(x, y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SesquilinearityProbe {
    pub probes: usize,
    pub defect: f64,
}

const SESQUILINEAR_TOL: f64 = 1e-10;

/// Probes module (anti)linearity and additivity in both arguments.
pub fn probe_sesquilinearity(
    form: &BlackBoxForm,
    probes: usize,
    seed: u64,
) -> Result<SesquilinearityProbe> {
    let shape = &form.domain.shape;
    let mut rng = random::rng(seed);
    let mut worst = 0.0f64;
    for i in 0..probes {
        let x = form.domain.random_element(&mut rng);
        let x2 = form.domain.random_element(&mut rng);
        let y = form.codomain.random_element(&mut rng);
        let y2 = form.codomain.random_element(&mut rng);
        let a = random::element(shape, &mut rng);
        let b = random::element(shape, &mut rng);
        let bxy = form.evaluate(&x, &y)?;
        let scale = 1.0 + bxy.frobenius_norm();
        let checks = [
            (
                "B(xa, yb) = a* B(x,y) b",
                form.evaluate(&x.right_mul(&a), &y.right_mul(&b))?
                    .sub(&a.adjoint().mul(&bxy).mul(&b))
                    .frobenius_norm()
                    / (scale * (1.0 + a.frobenius_norm()) * (1.0 + b.frobenius_norm())),
            ),
            (
                "B(x + x', y) = B(x,y) + B(x',y)",
                form.evaluate(&x.add(&x2), &y)?
                    .sub(&bxy.add(&form.evaluate(&x2, &y)?))
                    .frobenius_norm()
                    / scale,
            ),
            (
                "B(x, y + y') = B(x,y) + B(x,y')",
                form.evaluate(&x, &y.add(&y2))?
                    .sub(&bxy.add(&form.evaluate(&x, &y2)?))
                    .frobenius_norm()
                    / scale,
            ),
        ];
        for (law, defect) in checks {
            if !(defect <= SESQUILINEAR_TOL) {
                return Err(Error::NotSesquilinear(format!(
                    "probe {i}: {law} fails with relative defect {defect:.3e}"
                )));
            }
            worst = worst.max(defect);
        }
    }
    Ok(SesquilinearityProbe {
        probes,
        defect: worst,
    })
}

/// Result of [`operator_of_form`].
#[derive(Clone, Debug)]
pub struct RecoveredOperator {
    pub form: SesquilinearForm,
    /// Every `T` here is adjointable, with `T*` the conjugate transpose of
    /// block adjoints.
    pub adjointable: bool,
    pub invertible: bool,
    /// Largest relative disagreement with the black box over the probes.
    pub reconstruction_error: f64,
    pub sesquilinearity: SesquilinearityProbe,
}

const RECOVERY_PROBES: usize = 100;
const RECOVERY_TOL: f64 = 1e-9;

/// Recovers `T` with `B(x, y) = ⟨Tx, y⟩` column by column:
/// `T_{rk} = B(e_k, e_r)*`.
pub fn operator_of_form(form: &BlackBoxForm) -> Result<RecoveredOperator> {
    let sesquilinearity = probe_sesquilinearity(form, 16, 0x5e59)?;
    let es = form.domain.generators();
    let fs = form.codomain.generators();
    let operator: Vec<Vec<AlgebraElement>> = fs
        .iter()
        .map(|f| {
            es.iter()
                .map(|e| form.evaluate(e, f).map(|v| v.adjoint()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let recovered = SesquilinearForm::new(form.domain.clone(), form.codomain.clone(), operator)?;
    let mut rng = random::rng(0x0ec0);
    let mut reconstruction_error = 0.0f64;
    for i in 0..RECOVERY_PROBES {
        let x = form.domain.random_element(&mut rng);
        let y = form.codomain.random_element(&mut rng);
        let expect = form.evaluate(&x, &y)?;
        let err = recovered.evaluate(&x, &y)?.sub(&expect).frobenius_norm()
            / (1.0 + expect.frobenius_norm());
        if err > RECOVERY_TOL {
            return Err(Error::NotSesquilinear(format!(
                "probe {i}: reconstruction differs from the black box by {err:.3e}"
            )));
        }
        reconstruction_error = reconstruction_error.max(err);
    }
    let invertible =
        recovered.inverse_norm_reciprocal() > Tolerances::default().rank * recovered.norm();
    Ok(RecoveredOperator {
        form: recovered,
        adjointable: true,
        invertible,
        reconstruction_error,
        sesquilinearity,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    PositiveInvertible,
    InnerProduct,
    Search,
}

/// How a witness was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessRoute {
    /// `y = u` from the polar decomposition `Tx = u|Tx|`.
    Polar,
    /// `y = z + z'` with `Tx = z|Tx|` and `z'` completing `z` to `⟨y,y⟩ = 1`.
    InnerProduct,
    /// Seeded ascent over the unit sphere.
    Ascent,
    /// `f(|x|) = 0`, so the inequality holds for any `y`.
    Vacuous,
}

/// Which argument was given; the witness is the other one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Given {
    X,
    Y,
}

/// A witness for `|f(B(x, y))| ≥ c f(|x|) f(|y|)` with the witness side of
/// norm one and `f(|witness|) ≥ k`.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub given: Given,
    pub state: PureState,
    pub x: ModuleElement,
    pub y: ModuleElement,
    pub lhs: f64,
    pub rhs: f64,
    pub f_abs_x: f64,
    pub f_abs_y: f64,
    pub route: WitnessRoute,
}

impl Witness {
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }

    /// `f(|w|)` for the witness side.
    pub fn witness_weight(&self) -> f64 {
        match self.given {
            Given::X => self.f_abs_y,
            Given::Y => self.f_abs_x,
        }
    }
}

/// A triple with `|f(B(x, y))| < c f(|x|) f(|y|) − tol`.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub state: PureState,
    pub x: ModuleElement,
    pub y: ModuleElement,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoercivityCertificate {
    pub c: f64,
    pub k: f64,
    pub route: Route,
    pub violations: Vec<Violation>,
    /// Set when the claim rests on finitely many samples rather than on an
    /// analytic construction or a counterexample.
    pub sampled: bool,
    pub seed: Option<u64>,
    pub form_norm: f64,
    pub witnesses: Vec<Witness>,
    /// Elements `w_i` with `Σ ⟨w_i, w_i⟩ = 1` behind the choice of `k`.
    pub fullness: Vec<ModuleElement>,
    /// Pairs skipped because `f(|given|) = 0`.
    pub vacuous: usize,
    /// Pairs where the witness search ran out of budget.
    pub inconclusive: usize,
    /// Number of `(f, x, y)` triples or `(f, x)` pairs examined.
    pub checked: usize,
}

impl CoercivityCertificate {
    /// Minimum slack over recorded witnesses, both for the inequality and
    /// for `f(|witness|) ≥ k`.
    pub fn min_witness_slack(&self) -> f64 {
        self.witnesses
            .iter()
            .filter(|w| w.route != WitnessRoute::Vacuous)
            .map(|w| w.slack().min(w.witness_weight() - self.k))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when there is no violation and every witness holds.
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
            && self.inconclusive == 0
            && self.min_witness_slack() >= -WITNESS_SLACK
    }
}

/// Certificate for `B_T` with `T` positive and invertible: `c = ‖T⁻¹‖⁻¹`,
/// `k = 1/m` for the fullness witness family `{e_1}` (`m = 1`).
pub fn certify_positive_invertible(form: &SesquilinearForm) -> Result<CoercivityCertificate> {
    if form.domain != form.codomain {
        return Err(Error::ShapeMismatch(
            "a positive operator needs equal domain and codomain".into(),
        ));
    }
    let tol = Tolerances::default();
    let mut min_eig = f64::INFINITY;
    let mut max_eig = 0.0f64;
    let mut eigs = Vec::new();
    for i in 0..form.domain.shape.num_blocks() {
        let m = form.block_matrix(i);
        let defect = m.hermitian_defect();
        if defect > tol.hermitian * m.frobenius_norm().max(1.0) {
            let (vals, _) = m.hermitian_eigen();
            return Err(Error::NotPositiveOperator {
                min_eigenvalue: vals.last().copied().unwrap_or(0.0).min(-defect),
            });
        }
        let (vals, _) = m.hermitian_eigen();
        let lo = *vals.last().expect("nonempty block");
        max_eig = max_eig.max(vals[0].abs()).max(lo.abs());
        min_eig = min_eig.min(lo);
        eigs.push(lo);
    }
    if min_eig < -tol.hermitian * max_eig.max(1.0) {
        return Err(Error::NotPositiveOperator {
            min_eigenvalue: min_eig,
        });
    }
    if let Some(block) = eigs.iter().position(|&l| l <= tol.rank * max_eig) {
        return Err(Error::Singular { block });
    }
    let fullness = fullness_witnesses(&form.domain, &[ModuleElement::generator(&form.domain, 0)])?;
    Ok(CoercivityCertificate {
        c: min_eig,
        k: 1.0 / fullness.len() as f64,
        route: Route::PositiveInvertible,
        violations: Vec::new(),
        sampled: false,
        seed: None,
        form_norm: max_eig,
        witnesses: Vec::new(),
        fullness,
        vacuous: 0,
        inconclusive: 0,
        checked: 0,
    })
}

/// Smallest eigenvalue of `⟨Tx, Tx⟩ − c² ⟨x, x⟩`; nonnegative when
/// `c ≤ ‖T⁻¹‖⁻¹`.
pub fn lower_bound_margin(form: &SesquilinearForm, c: f64, x: &ModuleElement) -> Result<f64> {
    let tx = form.apply(x)?;
    let diff = tx.self_inner().sub(&x.self_inner().scale_real(c * c));
    Ok(diff.hermitian_eigensystem()?.min_eigenvalue())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub steps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            steps: 200,
            restarts: 20,
            seed: 0,
        }
    }
}

/// Finds `y` with `‖y‖ = 1`, `f(|y|) ≥ k` and
/// `|f(B(x, y))| ≥ c f(|x|) f(|y|)`.
///
/// The analytic construction completes the partial isometry of
/// `Tx = z |Tx|` to an element `y` with `⟨y, y⟩ = 1` and `B(x, y) = |Tx|`;
/// when that does not meet the target a seeded ascent takes over.
pub fn witness_for_state(
    form: &SesquilinearForm,
    f: &PureState,
    x: &ModuleElement,
    k: f64,
    c: f64,
    config: &SearchConfig,
) -> Result<Witness> {
    f.check_shape(&form.domain.shape)?;
    let found = search_witness(form, f, x, k, c, config)?;
    Ok(Witness {
        given: Given::X,
        state: f.clone(),
        x: x.clone(),
        y: found.element,
        lhs: found.lhs,
        rhs: found.rhs,
        f_abs_x: found.f_abs_given,
        f_abs_y: found.f_abs_found,
        route: found.route,
    })
}

/// The symmetric condition: for `y`, finds `x` with `‖x‖ = 1`, `f(|x|) ≥ k`
/// and `|f(B(x, y))| ≥ c f(|x|) f(|y|)`. Uses `|f(B(x,y))| = |f(⟨T*y, x⟩)|`.
pub fn witness_for_state_dual(
    form: &SesquilinearForm,
    f: &PureState,
    y: &ModuleElement,
    k: f64,
    c: f64,
    config: &SearchConfig,
) -> Result<Witness> {
    f.check_shape(&form.domain.shape)?;
    let found = search_witness(&form.adjoint(), f, y, k, c, config)?;
    Ok(Witness {
        given: Given::Y,
        state: f.clone(),
        x: found.element,
        y: y.clone(),
        lhs: found.lhs,
        rhs: found.rhs,
        f_abs_x: found.f_abs_found,
        f_abs_y: found.f_abs_given,
        route: found.route,
    })
}

struct Found {
    element: ModuleElement,
    lhs: f64,
    rhs: f64,
    f_abs_given: f64,
    f_abs_found: f64,
    route: WitnessRoute,
}

fn f_abs(f: &PureState, x: &ModuleElement) -> f64 {
    f.evaluate_real(&abs_module(x))
}

// Searches h in the codomain of `form` for the given g in its domain.
fn search_witness(
    form: &SesquilinearForm,
    f: &PureState,
    g: &ModuleElement,
    k: f64,
    c: f64,
    config: &SearchConfig,
) -> Result<Found> {
    g.check_space(&form.domain)?;
    let g_norm = g.norm();
    if g_norm == 0.0 {
        return Err(Error::ZeroElement);
    }
    let fg = f_abs(f, g);
    let w = form.apply(g)?;
    if fg <= 1e-14 * g_norm {
        let h = isometric_completion(&w);
        let lhs = f.evaluate(&inner_product(&w, &h)?)?.norm();
        let fh = f_abs(f, &h);
        return Ok(Found {
            element: h,
            lhs,
            rhs: 0.0,
            f_abs_given: fg,
            f_abs_found: fh,
            route: WitnessRoute::Vacuous,
        });
    }
    let h = isometric_completion(&w);
    let polar = form.codomain.rank == 1 && !w.component(0).polar_decompose().singular;
    let route = if polar {
        WitnessRoute::Polar
    } else {
        WitnessRoute::InnerProduct
    };
    let score = |h: &ModuleElement| -> (f64, f64, f64) {
        let lhs = f
            .evaluate_unchecked(&inner_product(&w, h).expect("same space"))
            .norm();
        let fh = f_abs(f, h);
        (lhs, fh, lhs - c * fg * fh)
    };
    let (lhs, fh, slack) = score(&h);
    if slack >= -WITNESS_SLACK && fh >= k - WITNESS_SLACK {
        return Ok(Found {
            element: h,
            lhs,
            rhs: c * fg * fh,
            f_abs_given: fg,
            f_abs_found: fh,
            route,
        });
    }
    ascent(form, f, &w, fg, k, c, config, h)
}

#[allow(clippy::too_many_arguments)]
fn ascent(
    form: &SesquilinearForm,
    f: &PureState,
    w: &ModuleElement,
    fg: f64,
    k: f64,
    c: f64,
    config: &SearchConfig,
    start: ModuleElement,
) -> Result<Found> {
    let space = &form.codomain;
    let grad = state_gradient(f, w);
    let evaluate = |v: &[C64]| -> Option<(f64, f64, f64, ModuleElement)> {
        let h = ModuleElement::unflatten(space, v);
        let n = h.norm();
        if n < 1e-12 {
            return None;
        }
        let h = h.scale(C64::new(1.0 / n, 0.0));
        let lhs = dot(&grad, &h.flatten()).norm();
        let fh = f_abs(f, &h);
        let objective = if fh < k {
            -1.0 - (k - fh)
        } else {
            lhs - c * fg * fh
        };
        Some((objective, lhs, fh, h))
    };
    let mut best: Option<(f64, f64, f64, ModuleElement)> = evaluate(&start.flatten());
    let mut best_ratio = best
        .as_ref()
        .map_or(0.0, |b| if b.2 > 0.0 { b.1 / (fg * b.2) } else { 0.0 });
    for restart in 0..config.restarts {
        let mut rng = random::substream(config.seed, restart as u64);
        let mut v: Vec<C64> = if restart == 0 && vec_norm(&grad) > 0.0 {
            grad.clone()
        } else {
            space.random_unit(&mut rng).flatten()
        };
        let Some(mut cur) = evaluate(&v) else {
            continue;
        };
        let mut step = 0.5;
        for _ in 0..config.steps {
            let phase = {
                let val = dot(&grad, &v);
                if val.norm() > 0.0 {
                    val / val.norm()
                } else {
                    C64::new(1.0, 0.0)
                }
            };
            let scale = vec_norm(&v).max(1e-12);
            let proposal: Vec<C64> = v
                .iter()
                .zip(&grad)
                .map(|(vi, gi)| {
                    vi + (gi * phase * 0.5 + random::gaussian_c64(&mut rng) * 0.5) * step * scale
                })
                .collect();
            match evaluate(&proposal) {
                Some(p) if p.0 > cur.0 => {
                    v = proposal;
                    cur = p;
                    step = (step * 1.2).min(2.0);
                }
                _ => step *= 0.7,
            }
            if step < 1e-8 {
                break;
            }
        }
        if cur.2 > 0.0 {
            best_ratio = best_ratio.max(cur.1 / (fg * cur.2));
        }
        if best.as_ref().is_none_or(|b| cur.0 > b.0) {
            best = Some(cur);
        }
    }
    match best {
        Some((objective, lhs, fh, h)) if objective >= -WITNESS_SLACK && fh >= k - WITNESS_SLACK => {
            Ok(Found {
                element: h,
                lhs,
                rhs: c * fg * fh,
                f_abs_given: fg,
                f_abs_found: fh,
                route: WitnessRoute::Ascent,
            })
        }
        _ => Err(Error::NoWitnessFound { best_ratio }),
    }
}

/// An element `y` with `⟨y, y⟩ = 1` and `⟨w, y⟩ = |w|`.
///
/// Blockwise, with `W` the stacked `(q·n) × n` matrix of `w` and
/// `W = Σ σ_j u_j v_j*`, the result is `Σ_j u_j v_j*` where the `u_j` for
/// vanishing `σ_j` are completed to an orthonormal family.
pub fn isometric_completion(w: &ModuleElement) -> ModuleElement {
    let space = w.space();
    let shape = &space.shape;
    let q = space.rank;
    let global = w.norm();
    let mut comps = vec![AlgebraElement::zero(shape); q];
    for (i, &n) in shape.block_dims().iter().enumerate() {
        let stacked = CMatrix::from_fn(q * n, n, |row, col| {
            w.component(row / n).block(i)[(row % n, col)]
        });
        let t = stacked.singular_triplets();
        let cutoff = 1e-10 * global;
        let good: Vec<usize> = (0..n).filter(|&j| t.values[j] > cutoff).collect();
        let mut rights: Vec<Vec<C64>> = good.iter().map(|&j| t.right.column(j)).collect();
        let mut lefts: Vec<Vec<C64>> = good.iter().map(|&j| t.left.column(j)).collect();
        rights.extend(unit_vectors(n));
        lefts.extend(unit_vectors(q * n));
        let rights = orthonormal_basis(&rights, 1e-8);
        let lefts = orthonormal_basis(&lefts, 1e-8);
        for j in 0..n {
            let (u, v) = (&lefts[j], &rights[j]);
            for row in 0..q * n {
                let b = comps[row / n].block_mut(i);
                for col in 0..n {
                    b[(row % n, col)] += u[row] * v[col].conj();
                }
            }
        }
    }
    ModuleElement::new(comps).expect("consistent shapes")
}

fn unit_vectors(n: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|i| {
            let mut e = vec![ZERO; n];
            e[i] = C64::new(1.0, 0.0);
            e
        })
        .collect()
}

/// Samples `(f, x)` and `(f, y)` pairs and certifies both witness
/// conditions on each, `per_state` pairs of each kind per state.
pub fn certify_witnesses(
    form: &SesquilinearForm,
    c: f64,
    k: f64,
    sample: &StateSample,
    per_state: usize,
    seed: u64,
    config: &SearchConfig,
) -> CoercivityCertificate {
    let results: Vec<(Vec<Witness>, usize, usize)> = sample
        .states
        .par_iter()
        .enumerate()
        .map(|(idx, f)| {
            let mut rng = random::substream(seed, idx as u64);
            let cfg = SearchConfig {
                seed: config.seed.wrapping_add(idx as u64),
                ..*config
            };
            let mut out = Vec::new();
            let (mut vacuous, mut inconclusive) = (0, 0);
            for _ in 0..per_state {
                let x = form.domain.random_element(&mut rng);
                let y = form.codomain.random_element(&mut rng);
                for r in [
                    witness_for_state(form, f, &x, k, c, &cfg),
                    witness_for_state_dual(form, f, &y, k, c, &cfg),
                ] {
                    match r {
                        Ok(w) if w.route == WitnessRoute::Vacuous => vacuous += 1,
                        Ok(w) => out.push(w),
                        Err(_) => inconclusive += 1,
                    }
                }
            }
            (out, vacuous, inconclusive)
        })
        .collect();
    let mut witnesses = Vec::new();
    let (mut vacuous, mut inconclusive) = (0, 0);
    for (w, v, i) in results {
        witnesses.extend(w);
        vacuous += v;
        inconclusive += i;
    }
    let analytic = witnesses.iter().all(|w| w.route != WitnessRoute::Ascent);
    let checked = witnesses.len() + vacuous + inconclusive;
    CoercivityCertificate {
        c,
        k,
        route: if analytic {
            Route::InnerProduct
        } else {
            Route::Search
        },
        violations: Vec::new(),
        sampled: true,
        seed: Some(seed),
        form_norm: form.norm(),
        witnesses,
        fullness: Vec::new(),
        vacuous,
        inconclusive,
        checked,
    }
}

/// Searches for `(f, x, y)` with `|f(B(x, y))| < c f(|x|) f(|y|) − tol`.
///
/// Each state gets `probes` random pairs; every random `y` is also tried
/// after projecting out the direction of the scalar functional
/// `y ↦ f(B(x, y))`, which makes the left side vanish. The first violation
/// in state order is returned.
pub fn falsify_uniform(
    form: &SesquilinearForm,
    c: f64,
    sample: &StateSample,
    probes: usize,
    seed: u64,
    tol: f64,
) -> CoercivityCertificate {
    let per_state: Vec<(Option<Violation>, usize)> = sample
        .states
        .par_iter()
        .enumerate()
        .map(|(idx, f)| {
            let mut rng = random::substream(seed, idx as u64);
            let mut checked = 0;
            for _ in 0..probes {
                let x = form.domain.random_element(&mut rng);
                let y = form.codomain.random_element(&mut rng);
                let tx = form.apply(&x).expect("domain element");
                let fx = f_abs(f, &x);
                let grad = state_gradient(f, &tx);
                let gn = dot(&grad, &grad).re;
                let mut candidates = vec![y.clone()];
                if gn > 0.0 {
                    let flat = y.flatten();
                    let coef = dot(&grad, &flat) / gn;
                    let proj: Vec<C64> =
                        flat.iter().zip(&grad).map(|(a, g)| a - g * coef).collect();
                    candidates.push(ModuleElement::unflatten(&form.codomain, &proj));
                }
                for cand in candidates {
                    checked += 1;
                    let lhs = f
                        .evaluate_unchecked(&inner_product(&tx, &cand).expect("codomain"))
                        .norm();
                    let rhs = c * fx * f_abs(f, &cand);
                    if lhs < rhs - tol {
                        return (
                            Some(Violation {
                                state: f.clone(),
                                x: x.clone(),
                                y: cand,
                                lhs,
                                rhs,
                            }),
                            checked,
                        );
                    }
                }
            }
            (None, checked)
        })
        .collect();
    let mut checked = 0;
    let mut violations = Vec::new();
    for (v, n) in per_state {
        checked += n;
        if violations.is_empty() {
            if let Some(v) = v {
                violations.push(v);
            }
        }
    }
    let sampled = violations.is_empty();
    CoercivityCertificate {
        c,
        k: 0.0,
        route: Route::Search,
        violations,
        sampled,
        seed: Some(seed),
        form_norm: form.norm(),
        witnesses: Vec::new(),
        fullness: Vec::new(),
        vacuous: 0,
        inconclusive: 0,
        checked,
    }
}

/// Checks one explicit triple against the uniform condition.
pub fn check_triple(
    form: &SesquilinearForm,
    c: f64,
    f: &PureState,
    x: &ModuleElement,
    y: &ModuleElement,
    tol: f64,
) -> Result<Option<Violation>> {
    let lhs = form_value_at(form, f, x, y)?;
    let rhs = c * f_abs(f, x) * f_abs(f, y);
    Ok((lhs < rhs - tol).then(|| Violation {
        state: f.clone(),
        x: x.clone(),
        y: y.clone(),
        lhs,
        rhs,
    }))
}

// Flattened vector G with f(⟨w, h⟩) = dot(G, flatten(h)):
// G_{r,s,t} = (w_r ξ)_s conj(ξ_t) on the block of f.
fn state_gradient(f: &PureState, w: &ModuleElement) -> Vec<C64> {
    let space = w.space();
    let xi = f.vector();
    let n = xi.len();
    let comps: Vec<AlgebraElement> = w
        .components()
        .iter()
        .map(|wr| {
            let mut out = AlgebraElement::zero(&space.shape);
            let wx = wr.block(f.block()).matvec(xi);
            let b = out.block_mut(f.block());
            for s in 0..n {
                for t in 0..n {
                    b[(s, t)] = wx[s] * xi[t].conj();
                }
            }
            out
        })
        .collect();
    ModuleElement::new(comps)
        .expect("consistent shapes")
        .flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;
    use crate::state::{sample_pure_states, SamplingStrategy};

    fn m2_space(rank: usize) -> ModuleSpace {
        ModuleSpace::new(AlgebraShape::new(vec![2]).unwrap(), rank).unwrap()
    }

    fn single(rows: &[&[f64]]) -> ModuleElement {
        ModuleElement::new(vec![AlgebraElement::from_real(rows)]).unwrap()
    }

    fn gap_pair() -> (ModuleElement, ModuleElement) {
        (
            single(&[&[0.5, 0.5], &[0.5, 0.5]]),
            single(&[&[0.5, -0.5], &[-0.5, 0.5]]),
        )
    }

    #[test]
    fn evaluate_examples() {
        let space = m2_space(2);
        let b = SesquilinearForm::inner_product(&space);
        let mut rng = random::rng(1);
        let (x, y) = (
            space.random_element(&mut rng),
            space.random_element(&mut rng),
        );
        let diff = b
            .evaluate(&x, &y)
            .unwrap()
            .sub(&inner_product(&x, &y).unwrap());
        assert!(diff.frobenius_norm() < 1e-14);
        assert!(
            b.evaluate(&ModuleElement::zero(&space), &y)
                .unwrap()
                .frobenius_norm()
                == 0.0
        );

        let (x, y) = gap_pair();
        let b = SesquilinearForm::inner_product(&m2_space(1));
        assert!(b.evaluate(&x, &y).unwrap().frobenius_norm() < 1e-16);
        assert!(b.evaluate(&x, &ModuleElement::zero(&m2_space(2))).is_err());
    }

    #[test]
    fn recover_operator_examples() {
        let space = m2_space(2);
        let id = operator_of_form(&BlackBoxForm::new(&space, &space, |x, y| {
            inner_product(x, y).unwrap()
        }))
        .unwrap();
        assert_eq!(id.form, SesquilinearForm::inner_product(&space));
        assert!(id.invertible && id.adjointable);

        let two = operator_of_form(&BlackBoxForm::new(&space, &space, |x, y| {
            inner_product(&x.scale(C64::new(2.0, 0.0)), y).unwrap()
        }))
        .unwrap();
        let expect = SesquilinearForm::diagonal(
            &space,
            &AlgebraElement::scalar(&space.shape, C64::new(2.0, 0.0)),
        );
        assert_eq!(two.form, expect);

        let mut rng = random::rng(4);
        let codomain = m2_space(3);
        let op: Vec<Vec<AlgebraElement>> = (0..3)
            .map(|_| {
                (0..2)
                    .map(|_| random::element(&space.shape, &mut rng))
                    .collect()
            })
            .collect();
        let t = SesquilinearForm::new(space.clone(), codomain, op).unwrap();
        let back = operator_of_form(&BlackBoxForm::from_form(&t)).unwrap();
        for (r1, r2) in back.form.operator().iter().zip(t.operator()) {
            for (a, b) in r1.iter().zip(r2) {
                assert!(a.sub(b).frobenius_norm() < 1e-10);
            }
        }
        assert!(!back.invertible);
    }

    #[test]
    fn non_sesquilinear_black_box_is_rejected() {
        let space = m2_space(1);
        // linear rather than conjugate-linear in the first slot
        let bad = BlackBoxForm::new(&space, &space, |x, y| x.component(0).mul(y.component(0)));
        match operator_of_form(&bad) {
            Err(Error::NotSesquilinear(msg)) => assert!(msg.contains("probe")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn positive_invertible_certificates() {
        let space = m2_space(1);
        let id = certify_positive_invertible(&SesquilinearForm::inner_product(&space)).unwrap();
        assert!((id.c - 1.0).abs() < 1e-12 && id.k == 1.0);
        assert_eq!(id.route, Route::PositiveInvertible);
        let two = SesquilinearForm::diagonal(
            &space,
            &AlgebraElement::scalar(&space.shape, C64::new(2.0, 0.0)),
        );
        assert!((certify_positive_invertible(&two).unwrap().c - 2.0).abs() < 1e-12);
        let half =
            SesquilinearForm::diagonal(&space, &AlgebraElement::from_diagonals(&[&[1.0, 0.5]]));
        let cert = certify_positive_invertible(&half).unwrap();
        assert!((cert.c - 0.5).abs() < 1e-12);
        assert!((half.inverse_norm_reciprocal() - 0.5).abs() < 1e-12);

        let neg =
            SesquilinearForm::diagonal(&space, &AlgebraElement::from_diagonals(&[&[1.0, -0.5]]));
        assert!(matches!(
            certify_positive_invertible(&neg),
            Err(Error::NotPositiveOperator { .. })
        ));
        let sing =
            SesquilinearForm::diagonal(&space, &AlgebraElement::from_diagonals(&[&[1.0, 0.0]]));
        assert!(matches!(
            certify_positive_invertible(&sing),
            Err(Error::Singular { block: 0 })
        ));
    }

    #[test]
    fn random_positive_operator_satisfies_lower_bound() {
        let space = ModuleSpace::new(AlgebraShape::new(vec![2, 1]).unwrap(), 2).unwrap();
        let mut rng = random::rng(8);
        let t = SesquilinearForm::random_positive_invertible(&space, 0.1, &mut rng);
        let cert = certify_positive_invertible(&t).unwrap();
        assert!((cert.c - t.inverse_norm_reciprocal()).abs() < 1e-10 * cert.form_norm);
        for _ in 0..20 {
            let x = space.random_element(&mut rng);
            assert!(lower_bound_margin(&t, cert.c, &x).unwrap() >= -1e-9);
        }
        assert!(t.sesquilinearity_defect(5, 1) < 1e-12);
    }

    #[test]
    fn polar_witness_attains_equality() {
        let space = m2_space(1);
        let b = SesquilinearForm::inner_product(&space);
        let mut rng = random::rng(11);
        let x = space.random_element(&mut rng);
        let f = PureState::new(0, random::unit_vector(2, &mut rng)).unwrap();
        let w = witness_for_state(&b, &f, &x, 1.0, 1.0, &SearchConfig::default()).unwrap();
        assert_eq!(w.route, WitnessRoute::Polar);
        assert!((w.f_abs_y - 1.0).abs() < 1e-12);
        assert!((w.lhs - w.f_abs_x).abs() < 1e-12);
        // y = u from x = uh
        let u = x.component(0).polar_decompose().u;
        assert!(w.y.component(0).sub(&u).frobenius_norm() < 1e-10);
    }

    #[test]
    fn inner_product_witness_for_rank_deficient_x() {
        let space = m2_space(2);
        let b = SesquilinearForm::inner_product(&space);
        let (p, _) = gap_pair();
        let x = ModuleElement::new(vec![p.component(0).clone(), p.component(0).scale_real(2.0)])
            .unwrap();
        let mut rng = random::rng(2);
        for _ in 0..10 {
            let f = PureState::new(0, random::unit_vector(2, &mut rng)).unwrap();
            let w = witness_for_state(&b, &f, &x, 1.0, 1.0, &SearchConfig::default()).unwrap();
            if w.route == WitnessRoute::Vacuous {
                continue;
            }
            assert_eq!(w.route, WitnessRoute::InnerProduct);
            let y = &w.y;
            let ip = y.self_inner().sub(&AlgebraElement::identity(&space.shape));
            assert!(ip.frobenius_norm() < 1e-12);
            let bxy = b.evaluate(&x, y).unwrap();
            assert!(bxy.sub(&abs_module(&x)).frobenius_norm() < 1e-12);
            assert!(w.slack() >= -1e-12);
        }
        let e1 = ModuleElement::generator(&space, 0);
        let f = PureState::basis(&space.shape, 0, 0);
        let w = witness_for_state(&b, &f, &e1, 1.0, 1.0, &SearchConfig::default()).unwrap();
        assert!(w.y.sub(&e1).flat_norm() < 1e-12);
    }

    #[test]
    fn vacuous_pairs_are_flagged() {
        let space = m2_space(1);
        let b = SesquilinearForm::inner_product(&space);
        let x = single(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let f = PureState::basis(&space.shape, 0, 0);
        let w = witness_for_state(&b, &f, &x, 1.0, 1.0, &SearchConfig::default()).unwrap();
        assert_eq!(w.route, WitnessRoute::Vacuous);
        assert!(matches!(
            witness_for_state(
                &b,
                &f,
                &ModuleElement::zero(&space),
                1.0,
                1.0,
                &SearchConfig::default()
            ),
            Err(Error::ZeroElement)
        ));
    }

    #[test]
    fn excessive_constant_has_no_witness() {
        let space = ModuleSpace::new(AlgebraShape::scalar(), 2).unwrap();
        let b = SesquilinearForm::inner_product(&space);
        let f = PureState::basis(&space.shape, 0, 0);
        let x = ModuleElement::generator(&space, 0);
        let cfg = SearchConfig {
            steps: 20,
            restarts: 3,
            seed: 1,
        };
        match witness_for_state(&b, &f, &x, 1.0, 1.5, &cfg) {
            Err(Error::NoWitnessFound { best_ratio }) => assert!(best_ratio <= 1.0 + 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gap_example_uniform_violation() {
        let space = m2_space(1);
        let b = SesquilinearForm::inner_product(&space);
        let (x, y) = gap_pair();
        let f = PureState::basis(&space.shape, 0, 0);
        let v = check_triple(&b, 1.0, &f, &x, &y, 1e-12).unwrap().unwrap();
        assert!(v.lhs.abs() < 1e-15);
        assert!((v.rhs - 0.25).abs() < 1e-12);

        let sample = sample_pure_states(&space.shape, SamplingStrategy::Grid, 8, 3);
        for c in [0.01, 0.1, 1.0] {
            let cert = falsify_uniform(&b, c, &sample, 4, 9, FALSIFY_TOL);
            assert_eq!(cert.violations.len(), 1, "c = {c}");
            assert!(!cert.sampled);
        }
    }

    #[test]
    fn scalar_rank_one_has_no_violation() {
        let space = ModuleSpace::new(AlgebraShape::scalar(), 1).unwrap();
        let b = SesquilinearForm::inner_product(&space);
        let sample = sample_pure_states(&space.shape, SamplingStrategy::Random, 1, 0);
        for c in [0.5, 1.0] {
            let cert = falsify_uniform(&b, c, &sample, 50, 2, FALSIFY_TOL);
            assert!(cert.violations.is_empty() && cert.sampled);
            assert_eq!(cert.route, Route::Search);
        }
    }

    #[test]
    fn positive_operator_with_inflated_constant_is_falsified() {
        let space = m2_space(2);
        let mut rng = random::rng(5);
        let t = SesquilinearForm::random_positive_invertible(&space, 0.2, &mut rng);
        let c = certify_positive_invertible(&t).unwrap().c + 0.1;
        let mut sample = sample_pure_states(&space.shape, SamplingStrategy::EigenDirected, 4, 5);
        let diag: Vec<AlgebraElement> = t
            .operator()
            .iter()
            .enumerate()
            .map(|(i, r)| r[i].clone())
            .collect();
        sample.augment_with_eigenstates(&diag);
        let cert = falsify_uniform(&t, c, &sample, 4, 5, FALSIFY_TOL);
        assert!(!cert.violations.is_empty());
    }

    #[test]
    fn witness_certificate_is_deterministic_and_holds() {
        let space = m2_space(1);
        let b = SesquilinearForm::inner_product(&space);
        let sample = sample_pure_states(&space.shape, SamplingStrategy::Random, 10, 4);
        let a = certify_witnesses(&b, 1.0, 1.0, &sample, 3, 17, &SearchConfig::default());
        let again = certify_witnesses(&b, 1.0, 1.0, &sample, 3, 17, &SearchConfig::default());
        assert!(a.holds());
        assert_eq!(a.route, Route::InnerProduct);
        assert_eq!(a.witnesses.len(), 60);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn certificate_key_order() {
        let space = m2_space(1);
        let cert = certify_positive_invertible(&SesquilinearForm::inner_product(&space)).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let keys = [
            "\"c\"",
            "\"k\"",
            "\"route\"",
            "\"violations\"",
            "\"sampled\"",
            "\"seed\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert!(json.contains("\"positive_invertible\""));
    }

    #[test]
    fn form_json_round_trip() {
        let space = m2_space(2);
        let mut rng = random::rng(3);
        let t = SesquilinearForm::random_positive_invertible(&space, 0.1, &mut rng);
        let back: SesquilinearForm =
            serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"domain":{"shape":[1],"rank":1},"codomain":{"shape":[1],"rank":1},"operator":[[]]}"#;
        assert!(serde_json::from_str::<SesquilinearForm>(bad).is_err());
    }
}
