//! Solving `B(x, y) = τ(y)` for all `y`.
//!
//! With `B(x, y) = ⟨Tx, y⟩` and `τ = ⟨z_τ, ·⟩` the problem is `Tx = z_τ`,
//! which is solved on flattened coordinates. The conclusions (residual,
//! uniqueness, the bound `‖x‖ ≤ ‖τ‖/c`) are then checked on the module.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::dense::{dot, vec_norm, CMatrix, Pivoting, C64, ZERO};
use crate::error::{Error, Result};
use crate::forms::{CoercivityCertificate, Route, SesquilinearForm, WITNESS_SLACK};
use crate::module_space::{
    represent_functional, DualFunctional, ModuleElement, ModuleSpace, Submodule,
};
use crate::random;

/// A module operator as a matrix on flattened coordinates.
#[derive(Clone, Debug)]
pub struct FlattenedSystem {
    pub matrix: CMatrix,
    pub domain: ModuleSpace,
    pub codomain: ModuleSpace,
    /// Largest relative defect of `T(xa) = T(x)a` measured on the matrix.
    pub linearity_defect: f64,
}

impl FlattenedSystem {
    pub fn embed(&self, x: &ModuleElement) -> Result<Vec<C64>> {
        x.check_space(&self.domain)?;
        Ok(x.flatten())
    }

    pub fn extract(&self, v: &[C64]) -> ModuleElement {
        ModuleElement::unflatten(&self.domain, v)
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        let v = self.matrix.matvec(&self.embed(x)?);
        Ok(ModuleElement::unflatten(&self.codomain, &v))
    }
}

/// Flattens `T` and re-checks A-linearity of the matrix on random probes.
pub fn flatten(form: &SesquilinearForm) -> FlattenedSystem {
    let matrix = form.flat_matrix();
    let domain = form.domain().clone();
    let codomain = form.codomain().clone();
    let mut rng = random::rng(0xf1a7);
    let mut linearity_defect = 0.0f64;
    for _ in 0..8 {
        let x = domain.random_element(&mut rng);
        let a = random::element(&domain.shape, &mut rng);
        let lhs = ModuleElement::unflatten(&codomain, &matrix.matvec(&x.right_mul(&a).flatten()));
        let rhs = ModuleElement::unflatten(&codomain, &matrix.matvec(&x.flatten())).right_mul(&a);
        let scale = 1.0 + rhs.flat_norm();
        linearity_defect = linearity_defect.max(lhs.sub(&rhs).flat_norm() / scale);
    }
    FlattenedSystem {
        matrix,
        domain,
        codomain,
        linearity_defect,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Relative residual tolerance, scaled by `max(1, ‖τ‖)`.
    pub solver_tol: f64,
    pub probes: usize,
    pub seed: u64,
    /// Samples used to bound `‖τ‖` from below for black-box functionals.
    pub norm_samples: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            solver_tol: 1e-8,
            probes: 100,
            seed: 0,
            norm_samples: 256,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub solution: ModuleElement,
    /// `sup_y ‖B(x, y) − τ(y)‖ / ‖y‖` over the probes.
    pub residual: f64,
    pub norm_bound_ok: bool,
    /// `‖τ‖/c − ‖x‖`.
    pub bound_slack: f64,
    pub solution_norm: f64,
    pub tau_norm: f64,
    /// False when `‖τ‖` is a sampled lower bound, in which case the bound
    /// check is only as good as the sample.
    pub tau_norm_exact: bool,
    pub c: f64,
    pub certificate_route: Route,
    /// Distance between the partially and completely pivoted solutions.
    pub uniqueness_gap: f64,
    pub probes: usize,
}

fn check_functional(form: &SesquilinearForm, tau: &DualFunctional) -> Result<()> {
    if tau.space() != form.codomain() {
        return Err(Error::ShapeMismatch(
            "functional is not defined on the codomain of the form".into(),
        ));
    }
    Ok(())
}

fn check_certificate(cert: &CoercivityCertificate) -> Result<()> {
    if !(cert.c > 0.0) || !cert.violations.is_empty() {
        return Err(Error::Validation {
            path: "certificate".into(),
            message: "a solve needs a certificate with c > 0 and no violations".into(),
        });
    }
    Ok(())
}

/// `sup ‖B(x, y) − τ(y)‖ / ‖y‖` over `ys`.
fn residual_over(
    form: &SesquilinearForm,
    tau: &DualFunctional,
    x: &ModuleElement,
    ys: &[ModuleElement],
) -> Result<f64> {
    let tx = form.apply(x)?;
    let mut worst = 0.0f64;
    for y in ys {
        let n = y.norm();
        if n < 1e-14 {
            continue;
        }
        let lhs = crate::module_space::inner_product(&tx, y)?;
        let r = lhs.sub(&tau.apply(y)?).operator_norm() / n;
        worst = worst.max(r);
    }
    Ok(worst)
}

fn probe_set(space: &Submodule, count: usize, seed: u64) -> Vec<ModuleElement> {
    let mut rng = random::rng(seed);
    let mut ys: Vec<ModuleElement> = space
        .generators()
        .iter()
        .map(|g| space.project(g))
        .collect();
    ys.extend((0..count).map(|_| space.random_element(&mut rng)));
    ys
}

/// Solves `Tx = z_τ`, checks the residual on random probes, uniqueness
/// across two pivoting strategies, and the bound `‖x‖ ≤ ‖τ‖/c`.
pub fn lax_milgram_solve(
    form: &SesquilinearForm,
    tau: &DualFunctional,
    cert: &CoercivityCertificate,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    check_functional(form, tau)?;
    check_certificate(cert)?;
    if form.domain().flat_dim() != form.codomain().flat_dim() {
        return Err(Error::SingularOperator);
    }
    let z = represent_functional(tau)?;
    let system = flatten(form);
    let rhs = z.flatten();
    let x1 = system
        .matrix
        .solve(&rhs, Pivoting::Partial)
        .ok_or(Error::SingularOperator)?;
    let x2 = system
        .matrix
        .solve(&rhs, Pivoting::Complete)
        .ok_or(Error::SingularOperator)?;
    let gap: Vec<C64> = x1.iter().zip(&x2).map(|(a, b)| a - b).collect();
    let uniqueness_gap = vec_norm(&gap) / vec_norm(&x1).max(1.0);
    let x = system.extract(&x1);

    let whole = Submodule::whole(form.codomain());
    let ys = probe_set(&whole, opts.probes, opts.seed);
    finish(form, tau, cert, opts, x, &ys, uniqueness_gap)
}

fn finish(
    form: &SesquilinearForm,
    tau: &DualFunctional,
    cert: &CoercivityCertificate,
    opts: &SolveOptions,
    x: ModuleElement,
    ys: &[ModuleElement],
    uniqueness_gap: f64,
) -> Result<SolveResult> {
    let tau_norm = tau.norm(opts.norm_samples, opts.seed);
    let tol = opts.solver_tol * tau_norm.value.max(1.0);
    let residual = residual_over(form, tau, &x, ys)?;
    if residual > tol {
        return Err(Error::ResidualTooLarge { residual, tol });
    }
    if uniqueness_gap > 1e-9 {
        return Err(Error::ResidualTooLarge {
            residual: uniqueness_gap,
            tol: 1e-9,
        });
    }
    let solution_norm = x.norm();
    let bound_slack = tau_norm.value / cert.c - solution_norm;
    Ok(SolveResult {
        solution: x,
        residual,
        norm_bound_ok: bound_slack >= -WITNESS_SLACK,
        bound_slack,
        solution_norm,
        tau_norm: tau_norm.value,
        tau_norm_exact: tau_norm.exact,
        c: cert.c,
        certificate_route: cert.route,
        uniqueness_gap,
        probes: ys.len(),
    })
}

/// Per-level data of a directed-family solve.
#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub dim_x: usize,
    pub dim_y: usize,
    /// Smallest singular value of the compressed operator.
    pub sigma_min: f64,
    /// Residual of `x_λ` against `τ` on probes from `Y_λ`.
    pub residual: f64,
    pub solution_norm: f64,
    /// `‖x_λ − x_final‖`.
    pub distance_to_final: f64,
    /// `‖x_λ − x_{λ−1}‖`, zero at the first level.
    pub step: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilySolveResult {
    /// The final-level solution, checked against `τ` on every level.
    pub result: SolveResult,
    pub levels: Vec<LevelReport>,
}

struct Level {
    x: ModuleElement,
    sigma_min: f64,
    residual: f64,
    dim_x: usize,
    dim_y: usize,
}

/// Solves the restricted problems `B|_{X_λ × Y_λ}` for a nested family.
///
/// Each level compresses `T` to `Q_Y* M Q_X` on orthonormal bases of the
/// flattened submodules and requires its smallest singular value to be at
/// least `c`. The final-level solution is returned and verified on probes
/// from every `Y_λ`; the Cauchy profile of the levels is reported.
pub fn directed_family_solve(
    form: &SesquilinearForm,
    tau: &DualFunctional,
    x_family: &[Submodule],
    y_family: &[Submodule],
    cert: &CoercivityCertificate,
    opts: &SolveOptions,
) -> Result<FamilySolveResult> {
    check_functional(form, tau)?;
    check_certificate(cert)?;
    if x_family.is_empty() || x_family.len() != y_family.len() {
        return Err(Error::Validation {
            path: "family".into(),
            message: format!(
                "need equally long non-empty families, got {} and {}",
                x_family.len(),
                y_family.len()
            ),
        });
    }
    for (l, (xs, ys)) in x_family.iter().zip(y_family).enumerate() {
        if xs.ambient() != form.domain() || ys.ambient() != form.codomain() {
            return Err(Error::ShapeMismatch(format!(
                "level {l} lives in the wrong module"
            )));
        }
    }
    for l in 1..y_family.len() {
        if !y_family[l].includes(&y_family[l - 1], 1e-9) {
            return Err(Error::NotNested { level: l });
        }
    }
    let system = flatten(form);
    let z = represent_functional(tau)?.flatten();
    let tau_norm = tau.norm(opts.norm_samples, opts.seed);
    let tol = opts.solver_tol * tau_norm.value.max(1.0);

    let levels: Vec<Result<Level>> = x_family
        .par_iter()
        .zip(y_family.par_iter())
        .enumerate()
        .map(|(l, (xs, ys))| {
            let qx = xs.flat_basis();
            let qy = ys.flat_basis();
            if qx.len() != qy.len() {
                return Err(Error::LevelCertificateFailed {
                    level: l,
                    reason: format!(
                        "restricted problem is {}×{}, not square",
                        qy.len(),
                        qx.len()
                    ),
                });
            }
            let mqx: Vec<Vec<C64>> = qx.iter().map(|q| system.matrix.matvec(q)).collect();
            let k = CMatrix::from_fn(qy.len(), qx.len(), |i, j| dot(&qy[i], &mqx[j]));
            let sigma_min = if qx.is_empty() {
                f64::INFINITY
            } else {
                *k.singular_triplets().values.last().expect("nonempty")
            };
            if sigma_min < cert.c - WITNESS_SLACK {
                return Err(Error::LevelCertificateFailed {
                    level: l,
                    reason: format!(
                        "smallest singular value {sigma_min:.6e} is below c = {:.6e}",
                        cert.c
                    ),
                });
            }
            let rhs: Vec<C64> = qy.iter().map(|q| dot(q, &z)).collect();
            let coeffs = if qx.is_empty() {
                Vec::new()
            } else {
                k.solve(&rhs, Pivoting::Partial)
                    .ok_or(Error::SingularOperator)?
            };
            let mut flat = vec![ZERO; system.domain.flat_dim()];
            for (c, q) in coeffs.iter().zip(qx) {
                for (f, qi) in flat.iter_mut().zip(q) {
                    *f += c * qi;
                }
            }
            let x = system.extract(&flat);
            let probes = probe_set(
                ys,
                opts.probes / y_family.len().max(1) + 4,
                opts.seed ^ (l as u64 + 1),
            );
            let residual = residual_over(form, tau, &x, &probes)?;
            if residual > tol {
                return Err(Error::ResidualTooLarge { residual, tol });
            }
            Ok(Level {
                x,
                sigma_min,
                residual,
                dim_x: qx.len(),
                dim_y: qy.len(),
            })
        })
        .collect();
    let levels: Vec<Level> = levels.into_iter().collect::<Result<_>>()?;

    let last = levels.last().expect("nonempty family").x.clone();
    let mut reports = Vec::with_capacity(levels.len());
    for (l, lv) in levels.iter().enumerate() {
        reports.push(LevelReport {
            level: l,
            dim_x: lv.dim_x,
            dim_y: lv.dim_y,
            sigma_min: lv.sigma_min,
            residual: lv.residual,
            solution_norm: lv.x.norm(),
            distance_to_final: lv.x.sub(&last).norm(),
            step: if l == 0 {
                0.0
            } else {
                lv.x.sub(&levels[l - 1].x).norm()
            },
        });
    }
    let mut probes = Vec::new();
    for (l, ys) in y_family.iter().enumerate() {
        probes.extend(probe_set(
            ys,
            opts.probes / y_family.len().max(1) + 4,
            opts.seed ^ (l as u64 + 1),
        ));
    }
    let result = finish(form, tau, cert, opts, last, &probes, 0.0)?;
    Ok(FamilySolveResult {
        result,
        levels: reports,
    })
}

/// The scalar case `A = ℂ`: coercivity is `|B(x, y)| ≥ c‖x‖‖y‖`, checked on
/// each level as `σ_min ≥ c` of the compressed matrix.
pub fn hilbert_space_solve(
    form: &SesquilinearForm,
    tau: &DualFunctional,
    x_family: &[Submodule],
    y_family: &[Submodule],
    c: f64,
    opts: &SolveOptions,
) -> Result<FamilySolveResult> {
    if form.domain().shape != AlgebraShape::scalar() {
        return Err(Error::InvalidShape(format!(
            "the Hilbert-space solver needs the scalar algebra, got blocks {:?}",
            form.domain().shape.block_dims()
        )));
    }
    let cert = CoercivityCertificate {
        c,
        k: 1.0,
        route: Route::InnerProduct,
        violations: Vec::new(),
        sampled: false,
        seed: None,
        form_norm: form.norm(),
        witnesses: Vec::new(),
        fullness: Vec::new(),
        vacuous: 0,
        inconclusive: 0,
        checked: 0,
    };
    directed_family_solve(form, tau, x_family, y_family, &cert, opts)
}

/// `B(x, y) = ⟨Mx, y⟩` on `ℂ^n` for a scalar matrix `M`.
pub fn scalar_form(m: &CMatrix) -> Result<SesquilinearForm> {
    let shape = AlgebraShape::scalar();
    let domain = ModuleSpace::new(shape.clone(), m.cols())?;
    let codomain = ModuleSpace::new(shape.clone(), m.rows())?;
    let operator = (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| AlgebraElement::scalar(&shape, m[(r, c)]))
                .collect()
        })
        .collect();
    SesquilinearForm::new(domain, codomain, operator)
}

/// Element of `ℂ^n` viewed as a module over `ℂ`.
pub fn scalar_vector(v: &[C64]) -> Result<ModuleElement> {
    let space = ModuleSpace::new(AlgebraShape::scalar(), v.len())?;
    Ok(ModuleElement::unflatten(&space, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::certify_positive_invertible;

    fn m2_space(rank: usize) -> ModuleSpace {
        ModuleSpace::new(AlgebraShape::new(vec![2]).unwrap(), rank).unwrap()
    }

    #[test]
    fn flatten_examples() {
        let space = m2_space(1);
        let id = flatten(&SesquilinearForm::inner_product(&space));
        assert_eq!(id.matrix, CMatrix::identity(4));
        let two = flatten(&SesquilinearForm::diagonal(
            &space,
            &AlgebraElement::scalar(&space.shape, C64::new(2.0, 0.0)),
        ));
        assert_eq!(two.matrix, CMatrix::identity(4).scale(C64::new(2.0, 0.0)));

        let a = AlgebraElement::from_real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let sys = flatten(&SesquilinearForm::diagonal(&space, &a));
        // a ⊗ I₂ in row-major coordinates
        let kron = CMatrix::from_fn(4, 4, |i, j| {
            if i % 2 == j % 2 {
                a.block(0)[(i / 2, j / 2)]
            } else {
                ZERO
            }
        });
        assert_eq!(sys.matrix, kron);
        assert!(sys.linearity_defect < 1e-14);
        let mut rng = random::rng(1);
        let x = space.random_element(&mut rng);
        assert_eq!(sys.extract(&sys.embed(&x).unwrap()), x);
    }

    #[test]
    fn riesz_and_scaled_solves() {
        let space = m2_space(2);
        let mut rng = random::rng(2);
        let z = space.random_element(&mut rng);
        let b = SesquilinearForm::inner_product(&space);
        let cert = certify_positive_invertible(&b).unwrap();
        let r = lax_milgram_solve(
            &b,
            &DualFunctional::hat(&z),
            &cert,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(r.solution.sub(&z).flat_norm() < 1e-14);
        assert!(r.residual < 1e-14);
        assert!(r.bound_slack.abs() < 1e-12 && r.norm_bound_ok);

        let two = SesquilinearForm::diagonal(
            &space,
            &AlgebraElement::scalar(&space.shape, C64::new(2.0, 0.0)),
        );
        let cert = certify_positive_invertible(&two).unwrap();
        let r = lax_milgram_solve(
            &two,
            &DualFunctional::hat(&z),
            &cert,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(r.solution.sub(&z.scale(C64::new(0.5, 0.0))).flat_norm() < 1e-14);
        assert!(r.bound_slack.abs() < 1e-12);
    }

    #[test]
    fn singular_operator_is_reported() {
        let space = m2_space(1);
        let b = SesquilinearForm::diagonal(&space, &AlgebraElement::from_diagonals(&[&[1.0, 0.0]]));
        let mut cert =
            certify_positive_invertible(&SesquilinearForm::inner_product(&space)).unwrap();
        cert.c = 1.0;
        let tau = DualFunctional::hat(&ModuleElement::generator(&space, 0));
        assert!(matches!(
            lax_milgram_solve(&b, &tau, &cert, &SolveOptions::default()),
            Err(Error::SingularOperator)
        ));
    }

    #[test]
    fn black_box_functional_uses_sampled_norm() {
        let space = m2_space(1);
        let b = SesquilinearForm::inner_product(&space);
        let cert = certify_positive_invertible(&b).unwrap();
        let a = AlgebraElement::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let tau = DualFunctional::black_box(&space, move |y| a.mul(y.component(0)));
        let r = lax_milgram_solve(&b, &tau, &cert, &SolveOptions::default()).unwrap();
        assert!(!r.tau_norm_exact);
        assert!(r.residual < 1e-12);
        assert!(r.tau_norm <= 1.0 + 1e-12);
    }

    #[test]
    fn coordinate_family_converges_to_representer() {
        let space = ModuleSpace::new(AlgebraShape::scalar(), 4).unwrap();
        let z = scalar_vector(&[
            C64::new(1.0, 0.0),
            C64::new(-2.0, 1.0),
            C64::new(0.5, 0.0),
            C64::new(0.0, 3.0),
        ])
        .unwrap();
        let fam: Vec<Submodule> = (1..=4)
            .map(|l| Submodule::coordinate(&space, &(0..l).collect::<Vec<_>>()))
            .collect();
        let b = SesquilinearForm::inner_product(&space);
        let r = hilbert_space_solve(
            &b,
            &DualFunctional::hat(&z),
            &fam,
            &fam,
            1.0,
            &SolveOptions::default(),
        )
        .unwrap();
        for (l, lv) in r.levels.iter().enumerate() {
            assert_eq!(lv.dim_x, l + 1);
        }
        assert!(r.result.solution.sub(&z).flat_norm() < 1e-14);
        assert!(r.levels[0].distance_to_final > r.levels[2].distance_to_final);
        assert_eq!(r.levels[3].distance_to_final, 0.0);
    }

    #[test]
    fn constant_family_matches_plain_solve() {
        let space = m2_space(2);
        let mut rng = random::rng(6);
        let t = SesquilinearForm::random_positive_invertible(&space, 0.2, &mut rng);
        let cert = certify_positive_invertible(&t).unwrap();
        let tau = DualFunctional::hat(&space.random_element(&mut rng));
        let plain = lax_milgram_solve(&t, &tau, &cert, &SolveOptions::default()).unwrap();
        let whole = vec![Submodule::whole(&space); 3];
        let fam = directed_family_solve(&t, &tau, &whole, &whole, &cert, &SolveOptions::default())
            .unwrap();
        assert!(fam.result.solution.sub(&plain.solution).flat_norm() < 1e-10);
    }

    #[test]
    fn family_errors() {
        let space = m2_space(2);
        let b = SesquilinearForm::inner_product(&space);
        let cert = certify_positive_invertible(&b).unwrap();
        let tau = DualFunctional::hat(&ModuleElement::generator(&space, 0));
        let a = Submodule::coordinate(&space, &[0]);
        let c = Submodule::coordinate(&space, &[1]);
        let opts = SolveOptions::default();
        assert!(matches!(
            directed_family_solve(
                &b,
                &tau,
                &[a.clone(), c.clone()],
                &[a.clone(), c.clone()],
                &cert,
                &opts
            ),
            Err(Error::NotNested { level: 1 })
        ));
        let whole = Submodule::whole(&space);
        assert!(matches!(
            directed_family_solve(&b, &tau, &[whole.clone()], &[a.clone()], &cert, &opts),
            Err(Error::LevelCertificateFailed { level: 0, .. })
        ));
        let mut strict = cert.clone();
        strict.c = 2.0;
        assert!(matches!(
            directed_family_solve(&b, &tau, &[a.clone()], &[a.clone()], &strict, &opts),
            Err(Error::LevelCertificateFailed { level: 0, .. })
        ));
        assert!(matches!(
            hilbert_space_solve(&b, &tau, &[a.clone()], &[a], 1.0, &opts),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn hilbert_examples() {
        let m = CMatrix::from_real_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 0.5], &[0.0, 0.5, 2.0]]);
        let b = scalar_form(&m).unwrap();
        let space = b.domain().clone();
        let whole = vec![Submodule::whole(&space)];
        let (vals, _) = m.hermitian_eigen();
        let c = *vals.last().unwrap();
        let u =
            scalar_vector(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]).unwrap();
        let r = hilbert_space_solve(
            &b,
            &DualFunctional::hat(&u),
            &whole,
            &whole,
            c,
            &SolveOptions::default(),
        )
        .unwrap();
        let expect = m.solve(&u.flatten(), Pivoting::Complete).unwrap();
        assert!(
            vec_norm(
                &r.result
                    .solution
                    .flatten()
                    .iter()
                    .zip(&expect)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>()
            ) < 1e-12
        );
        assert!(r.result.norm_bound_ok);

        let zero = DualFunctional::hat(&ModuleElement::zero(&space));
        let r =
            hilbert_space_solve(&b, &zero, &whole, &whole, c, &SolveOptions::default()).unwrap();
        assert_eq!(r.result.solution_norm, 0.0);
    }
}
