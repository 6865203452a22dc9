//! The two worked counterexamples: the gap between pointwise and uniform
//! coercivity for `B(x, y) = x*y` on `M_2`, and the `sin(1/t)` functional
//! on grid truncations of `C[0, 1]`.

use serde::Serialize;
use serde_json::json;

use super::{Outcome, Overrides, Report, Scenario};
use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::dense::C64;
use crate::error::Result;
use crate::forms::{
    certify_positive_invertible, certify_witnesses, check_triple, falsify_uniform, Given,
    SearchConfig, SesquilinearForm, FALSIFY_TOL,
};
use crate::module_space::{abs_module, DualFunctional, ModuleElement, ModuleSpace, Submodule};
use crate::solver::{directed_family_solve, SolveOptions};
use crate::state::PureState;

const SIN_NOTE: &str =
    "every grid truncation is solvable; the missing solution in C[0,1] shows up \
as oscillation of the grid solutions near t = 0 that does not decay under refinement";

pub(super) fn run_m2_gap(s: &Scenario, constants: &[f64], o: &Overrides) -> Result<Report> {
    let form = s.build_form()?;
    let c = s.constants.c.unwrap_or(1.0);
    let k = s.constants.k.unwrap_or(1.0);
    let tol = o.tol.unwrap_or(FALSIFY_TOL);
    let sample = s.sample();
    let cfg = SearchConfig {
        seed: s.sampling.seed,
        ..SearchConfig::default()
    };

    // the explicit pair x = ½[[1,1],[1,1]], y = ½[[1,-1],[-1,1]] at the e_1 state
    let explicit = if s.shape == AlgebraShape::new(vec![2])? && s.ranks.p == 1 && s.ranks.q == 1 {
        let x = ModuleElement::new(vec![AlgebraElement::from_real(&[&[0.5, 0.5], &[0.5, 0.5]])])?;
        let y = ModuleElement::new(vec![AlgebraElement::from_real(&[
            &[0.5, -0.5],
            &[-0.5, 0.5],
        ])])?;
        let f = PureState::basis(&s.shape, 0, 0);
        let fb = f.evaluate(&form.evaluate(&x, &y)?)?;
        Some((x, y, f, fb))
    } else {
        None
    };

    let witnesses = certify_witnesses(
        &form,
        c,
        k,
        &sample,
        s.sampling.probes,
        s.sampling.seed,
        &cfg,
    );
    let x_pairs = witnesses
        .witnesses
        .iter()
        .filter(|w| w.given == Given::X)
        .count();
    let y_pairs = witnesses.witnesses.len() - x_pairs;
    let witness_ok = witnesses.holds();

    let mut tested = Vec::new();
    let mut uniform = Vec::new();
    for &ct in constants {
        let cert = falsify_uniform(&form, ct, &sample, s.sampling.probes, s.sampling.seed, tol);
        let explicit_violation = match &explicit {
            Some((x, y, f, _)) => check_triple(&form, ct, f, x, y, tol)?.map(|v| (v.lhs, v.rhs)),
            None => None,
        };
        tested.push(json!({
            "c": ct,
            "violated": !cert.violations.is_empty() || explicit_violation.is_some(),
            "search_violation": cert.violations.first().map(|v| json!({"lhs": v.lhs, "rhs": v.rhs})),
            "explicit_violation": explicit_violation.map(|(lhs, rhs)| json!({"lhs": lhs, "rhs": rhs})),
        }));
        uniform.push((ct, cert));
    }
    let all_violated = tested.iter().all(|t| t["violated"] == json!(true));
    let outcome = match (witness_ok, all_violated) {
        (true, true) => Outcome::Dichotomy,
        (true, false) => Outcome::Sampled,
        (false, _) => Outcome::Inconclusive,
    };
    let mut report = Report::new(s, outcome);
    report.details = json!({
        "explicit": explicit.as_ref().map(|(x, y, f, fb)| json!({
            "f_of_b": [fb.re, fb.im],
            "f_abs_x": f.evaluate_real(&abs_module(x)),
            "f_abs_y": f.evaluate_real(&abs_module(y)),
        })),
        "witness": {
            "c": c,
            "k": k,
            "pairs_given_x": x_pairs,
            "pairs_given_y": y_pairs,
            "vacuous": witnesses.vacuous,
            "inconclusive": witnesses.inconclusive,
            "min_slack": witnesses.min_witness_slack(),
            "holds": witness_ok,
        },
        "uniform": tested,
    });
    report.certificate("pointwise", witnesses);
    for (ct, cert) in uniform {
        report.certificate(&format!("uniform c={ct}"), cert);
    }
    Ok(report)
}

/// One grid size of the `sin(1/t)` demo.
#[derive(Clone, Debug, Serialize)]
pub struct SinLevel {
    pub n: usize,
    /// `max_j |u_j − sin(1/t_j)|` over `t_j > 0`.
    pub max_error: f64,
    /// `(δ, max − min of u on (0, δ))`.
    pub oscillation: Vec<(f64, f64)>,
    /// Largest difference to the module solver run on the same problem,
    /// for the grids where that is cheap.
    pub module_solver_difference: Option<f64>,
    /// `u_j` at `t_j = j/n`.
    pub solution: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SinDemo {
    pub levels: Vec<SinLevel>,
    /// Per `δ`, whether the oscillation is non-decreasing in `n`.
    pub non_decreasing: Vec<(f64, bool)>,
}

const MODULE_CHECK_MAX_N: usize = 64;

/// `max − min` of `values[j]` over grid points `0 < j/n < δ`.
pub fn oscillation(values: &[f64], n: usize, delta: f64) -> f64 {
    let inside: Vec<f64> = (1..values.len())
        .filter(|&j| (j as f64) / (n as f64) < delta)
        .map(|j| values[j])
        .collect();
    if inside.is_empty() {
        return 0.0;
    }
    let hi = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = inside.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Grid truncation of the `sin(1/t)` problem.
///
/// `A_n = ℂ^{n+1}` on `t_j = j/n`, `Y_n` the grid functions vanishing at
/// `t_0 = 0`, `B(u, v) = ū v` and `τ(v) = sin(1/t) v`. The problem is
/// diagonal, so it is solved point by point (`u_0` is free and set to 0).
pub fn demo_counterexample(n: usize, deltas: &[f64]) -> Result<SinLevel> {
    assert!(n >= 8, "grid size must be at least 8");
    let tau: Vec<f64> = (0..=n)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                (n as f64 / j as f64).sin()
            }
        })
        .collect();
    // B(e_j, e_j) = 1 on every point of the ideal
    let solution: Vec<f64> = tau
        .iter()
        .enumerate()
        .map(|(j, &t)| if j == 0 { 0.0 } else { t / 1.0 })
        .collect();
    let max_error = (1..=n)
        .map(|j| (solution[j] - (n as f64 / j as f64).sin()).abs())
        .fold(0.0, f64::max);
    let module_solver_difference = if n <= MODULE_CHECK_MAX_N {
        Some(module_solve(n, &tau, &solution)?)
    } else {
        None
    };
    Ok(SinLevel {
        n,
        max_error,
        oscillation: deltas
            .iter()
            .map(|&d| (d, oscillation(&solution, n, d)))
            .collect(),
        module_solver_difference,
        solution,
    })
}

fn module_solve(n: usize, tau: &[f64], expect: &[f64]) -> Result<f64> {
    let shape = AlgebraShape::new(vec![1; n + 1])?;
    let space = ModuleSpace::new(shape.clone(), 1)?;
    let form = SesquilinearForm::inner_product(&space);
    let diag = |vals: &[f64]| -> Result<ModuleElement> {
        let rows: Vec<&[f64]> = vals.iter().map(std::slice::from_ref).collect();
        ModuleElement::new(vec![AlgebraElement::from_diagonals(&rows)])
    };
    let ideal_gen: Vec<f64> = (0..=n).map(|j| if j == 0 { 0.0 } else { 1.0 }).collect();
    let ideal = Submodule::new(&space, vec![diag(&ideal_gen)?])?;
    let functional = DualFunctional::hat(&diag(tau)?);
    let cert = certify_positive_invertible(&form)?;
    let r = directed_family_solve(
        &form,
        &functional,
        std::slice::from_ref(&ideal),
        std::slice::from_ref(&ideal),
        &cert,
        &SolveOptions::default(),
    )?;
    let u = r.result.solution.component(0);
    Ok((0..=n)
        .map(|j| (u.block(j)[(0, 0)] - C64::new(expect[j], 0.0)).norm())
        .fold(0.0, f64::max))
}

pub(super) fn run_sin(s: &Scenario, grids: &[usize], deltas: &[f64]) -> Result<Report> {
    let levels: Vec<SinLevel> = grids
        .iter()
        .map(|&n| demo_counterexample(n, deltas))
        .collect::<Result<_>>()?;
    let non_decreasing = deltas
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let ok = levels
                .windows(2)
                .all(|w| w[1].oscillation[i].1 >= w[0].oscillation[i].1);
            (d, ok)
        })
        .collect();
    let demo = SinDemo {
        levels,
        non_decreasing,
    };
    let persistent = demo
        .levels
        .last()
        .is_some_and(|l| l.oscillation.iter().all(|&(_, o)| o >= 1.0));
    let mut report = Report::new(
        s,
        if persistent {
            Outcome::Obstruction
        } else {
            Outcome::Solved
        },
    );
    report.notes.push(SIN_NOTE.into());
    report.details = serde_json::to_value(&demo)?;
    Ok(report)
}
