//! Scenario files, the builtin registry and the report format.
//!
//! A scenario names an algebra shape, module ranks, a form, a functional,
//! constants and sampling parameters, plus the action to run. Running it
//! yields a [`Report`] whose content is a deterministic function of the
//! scenario and seed; wall-clock time is kept in the separate `timing`
//! field.

mod builtins;
mod demo;

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::dense::C64;
use crate::error::{Error, Result};
use crate::forms::{
    certify_positive_invertible, certify_witnesses, falsify_uniform, CoercivityCertificate,
    SearchConfig, SesquilinearForm, FALSIFY_TOL,
};
use crate::module_space::{DualFunctional, ModuleElement, ModuleSpace, Submodule, SubmoduleSpec};
use crate::random;
use crate::solver::{
    directed_family_solve, flatten, hilbert_space_solve, lax_milgram_solve, SolveOptions,
};
use crate::state::{sample_pure_states, SamplingStrategy, StateSample};

pub use builtins::{builtin, list_builtins, BuiltinInfo};
pub use demo::{demo_counterexample, oscillation, SinDemo, SinLevel};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Certify,
    Solve,
    Falsify,
    Demo,
    FamilySolve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ranks {
    pub p: usize,
    pub q: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FormSpec {
    /// `B(x, y) = ⟨x, y⟩`.
    InnerProduct,
    /// `B(x, y) = s ⟨x, y⟩`.
    ScaledIdentity { scale: f64 },
    /// `T = a · I`.
    Diagonal { element: AlgebraElement },
    /// `T = R*R + δ` with a Gaussian `R` drawn from the scenario seed.
    RandomPositive { delta: f64 },
    /// Explicit `q × p` operator matrix.
    Operator { operator: Vec<Vec<AlgebraElement>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionalSpec {
    /// `τ = ⟨z, ·⟩`.
    Representer {
        element: ModuleElement,
    },
    /// Gaussian representer drawn from the scenario seed.
    Random,
    Zero,
    /// `τ = ⟨e_index, ·⟩`.
    Generator {
        index: usize,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    /// Number of pure states.
    pub states: usize,
    /// Random elements per state.
    pub probes: usize,
    pub seed: u64,
    pub strategy: SamplingStrategy,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            states: 32,
            probes: 4,
            seed: 0,
            strategy: SamplingStrategy::Random,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Explicit levels; `x` and `y` must have the same length.
    Explicit {
        x: Vec<SubmoduleSpec>,
        y: Vec<SubmoduleSpec>,
    },
    /// `X_λ = Y_λ = span_A{e_1, …, e_λ}`.
    CoordinateChain,
    /// `span_A{e_1 E_{11}} ⊂ span_A{e_1} ⊂ span_A{e_1, e_2 E_{11}} ⊂ …`,
    /// using the first matrix unit of block 0.
    RefiningChain,
    /// `levels` copies of the whole module.
    Constant { levels: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DemoSpec {
    /// Pointwise witnesses versus uniform violations for `B(x, y) = x*y`.
    M2Gap { tested_constants: Vec<f64> },
    /// Grid solutions of the `sin(1/t)` problem.
    SinCounterexample { grids: Vec<usize>, deltas: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub action: Action,
    pub shape: AlgebraShape,
    pub ranks: Ranks,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<FunctionalSpec>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demo: Option<DemoSpec>,
}

/// Command-line overrides applied on top of a scenario.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub action: Option<Action>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    /// Search tolerance for `falsify`, residual tolerance for solves.
    pub tol: Option<f64>,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        path: path.into(),
        message: message.into(),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Parse(format!("at `{path}`: {}", e.into_inner()))
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(a) = o.action {
            self.action = a;
        }
        if let Some(s) = o.seed {
            self.sampling.seed = s;
        }
        if let Some(n) = o.samples {
            self.sampling.states = n;
        }
    }

    pub fn domain(&self) -> Result<ModuleSpace> {
        ModuleSpace::new(self.shape.clone(), self.ranks.p)
            .map_err(|_| invalid("ranks.p", "must be at least 1"))
    }

    pub fn codomain(&self) -> Result<ModuleSpace> {
        ModuleSpace::new(self.shape.clone(), self.ranks.q)
            .map_err(|_| invalid("ranks.q", "must be at least 1"))
    }

    /// Structural checks beyond parsing, reported with a field path.
    pub fn validate(&self) -> Result<()> {
        let domain = self.domain()?;
        let codomain = self.codomain()?;
        if let Some(c) = self.constants.c {
            if !(c > 0.0) {
                return Err(invalid("constants.c", "must be positive"));
            }
        }
        if let Some(k) = self.constants.k {
            if !(k > 0.0) {
                return Err(invalid("constants.k", "must be positive"));
            }
        }
        if self.sampling.states == 0 {
            return Err(invalid("sampling.states", "must be at least 1"));
        }
        match &self.form {
            Some(FormSpec::Diagonal { element }) if element.shape() != &self.shape => {
                return Err(invalid(
                    "form.element",
                    "shape differs from the scenario shape",
                ));
            }
            Some(FormSpec::RandomPositive { delta }) if !(*delta > 0.0) => {
                return Err(invalid("form.delta", "must be positive"));
            }
            Some(FormSpec::Operator { operator }) => {
                SesquilinearForm::new(domain.clone(), codomain.clone(), operator.clone()).map_err(
                    |e| match e {
                        Error::Validation { path, message } => {
                            invalid(format!("form.{path}"), message)
                        }
                        other => invalid("form.operator", other.to_string()),
                    },
                )?;
            }
            Some(
                FormSpec::InnerProduct
                | FormSpec::ScaledIdentity { .. }
                | FormSpec::Diagonal { .. }
                | FormSpec::RandomPositive { .. },
            ) if self.ranks.p != self.ranks.q => {
                return Err(invalid("ranks", "this form needs p = q"));
            }
            _ => {}
        }
        match &self.functional {
            Some(FunctionalSpec::Representer { element }) => {
                element
                    .check_space(&codomain)
                    .map_err(|e| invalid("functional.element", e.to_string()))?;
            }
            Some(FunctionalSpec::Generator { index }) if *index >= self.ranks.q => {
                return Err(invalid(
                    "functional.index",
                    format!("must be below q = {}", self.ranks.q),
                ));
            }
            _ => {}
        }
        if let Some(FamilySpec::Explicit { x, y }) = &self.family {
            if x.len() != y.len() || x.is_empty() {
                return Err(invalid(
                    "family",
                    "x and y need the same non-zero number of levels",
                ));
            }
            for (l, s) in x.iter().enumerate() {
                Submodule::from_spec(&domain, s)
                    .map_err(|e| invalid(format!("family.x[{l}]"), e.to_string()))?;
            }
            for (l, s) in y.iter().enumerate() {
                Submodule::from_spec(&codomain, s)
                    .map_err(|e| invalid(format!("family.y[{l}]"), e.to_string()))?;
            }
        }
        if let Some(FamilySpec::Constant { levels: 0 }) = &self.family {
            return Err(invalid("family.levels", "must be at least 1"));
        }
        if let Some(DemoSpec::SinCounterexample { grids, .. }) = &self.demo {
            if let Some(bad) = grids.iter().position(|&n| n < 8) {
                return Err(invalid(
                    format!("demo.grids[{bad}]"),
                    "grid size must be at least 8",
                ));
            }
        }
        self.validate_action()
    }

    fn validate_action(&self) -> Result<()> {
        let need = |present: bool, path: &str| {
            if present {
                Ok(())
            } else {
                Err(invalid(
                    path,
                    format!("required for action {:?}", self.action),
                ))
            }
        };
        match self.action {
            Action::Demo => need(self.demo.is_some(), "demo"),
            Action::Certify => need(self.form.is_some(), "form"),
            Action::Falsify => {
                need(self.form.is_some(), "form")?;
                need(self.constants.c.is_some(), "constants.c")
            }
            Action::Solve => {
                need(self.form.is_some(), "form")?;
                need(self.functional.is_some(), "functional")
            }
            Action::FamilySolve => {
                need(self.form.is_some(), "form")?;
                need(self.functional.is_some(), "functional")?;
                need(self.family.is_some(), "family")
            }
        }
    }

    pub fn build_form(&self) -> Result<SesquilinearForm> {
        let domain = self.domain()?;
        let codomain = self.codomain()?;
        let spec = self
            .form
            .as_ref()
            .ok_or_else(|| invalid("form", "missing"))?;
        Ok(match spec {
            FormSpec::InnerProduct => SesquilinearForm::inner_product(&domain),
            FormSpec::ScaledIdentity { scale } => SesquilinearForm::diagonal(
                &domain,
                &AlgebraElement::scalar(&self.shape, C64::new(*scale, 0.0)),
            ),
            FormSpec::Diagonal { element } => SesquilinearForm::diagonal(&domain, element),
            FormSpec::RandomPositive { delta } => {
                let mut rng = random::substream(self.sampling.seed, 1);
                SesquilinearForm::random_positive_invertible(&domain, *delta, &mut rng)
            }
            FormSpec::Operator { operator } => {
                SesquilinearForm::new(domain, codomain, operator.clone())?
            }
        })
    }

    pub fn build_functional(&self) -> Result<DualFunctional> {
        let codomain = self.codomain()?;
        let spec = self
            .functional
            .as_ref()
            .ok_or_else(|| invalid("functional", "missing"))?;
        Ok(match spec {
            FunctionalSpec::Representer { element } => DualFunctional::hat(element),
            FunctionalSpec::Random => {
                let mut rng = random::substream(self.sampling.seed, 2);
                DualFunctional::hat(&codomain.random_element(&mut rng))
            }
            FunctionalSpec::Zero => DualFunctional::hat(&ModuleElement::zero(&codomain)),
            FunctionalSpec::Generator { index } => {
                DualFunctional::hat(&ModuleElement::generator(&codomain, *index))
            }
        })
    }

    pub fn build_family(&self) -> Result<(Vec<Submodule>, Vec<Submodule>)> {
        let domain = self.domain()?;
        let codomain = self.codomain()?;
        let spec = self
            .family
            .as_ref()
            .ok_or_else(|| invalid("family", "missing"))?;
        let same = |levels: Vec<Vec<ModuleElement>>| -> Result<(Vec<Submodule>, Vec<Submodule>)> {
            if domain != codomain {
                return Err(invalid("family", "chains need p = q"));
            }
            let subs: Vec<Submodule> = levels
                .into_iter()
                .map(|g| Submodule::new(&domain, g))
                .collect::<Result<_>>()?;
            Ok((subs.clone(), subs))
        };
        match spec {
            FamilySpec::Explicit { x, y } => Ok((
                x.iter()
                    .map(|s| Submodule::from_spec(&domain, s))
                    .collect::<Result<_>>()?,
                y.iter()
                    .map(|s| Submodule::from_spec(&codomain, s))
                    .collect::<Result<_>>()?,
            )),
            FamilySpec::CoordinateChain => same(
                (1..=domain.rank)
                    .map(|l| {
                        (0..l)
                            .map(|k| ModuleElement::generator(&domain, k))
                            .collect()
                    })
                    .collect(),
            ),
            FamilySpec::RefiningChain => {
                let unit = AlgebraElement::matrix_unit(&self.shape, 0, 0, 0);
                let mut levels = Vec::new();
                let mut gens: Vec<ModuleElement> = Vec::new();
                for k in 0..domain.rank {
                    let e = ModuleElement::generator(&domain, k);
                    let mut partial = gens.clone();
                    partial.push(e.right_mul(&unit));
                    levels.push(partial);
                    gens.push(e);
                    levels.push(gens.clone());
                }
                same(levels)
            }
            FamilySpec::Constant { levels } => Ok((
                vec![Submodule::whole(&domain); *levels],
                vec![Submodule::whole(&codomain); *levels],
            )),
        }
    }

    fn sample(&self) -> StateSample {
        let s = &self.sampling;
        sample_pure_states(&self.shape, s.strategy, s.states, s.seed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Analytic certificate.
    Certified,
    /// Certificate resting on samples, with no counterexample found.
    Sampled,
    Solved,
    /// A counterexample to the tested inequality was found.
    Falsified,
    /// Pointwise witnesses hold while the uniform condition is violated.
    Dichotomy,
    /// Every finite level is solvable but the solutions do not settle.
    Obstruction,
    /// The witness search ran out of budget.
    Inconclusive,
    /// A solve violated `‖x‖ ≤ ‖τ‖/c`.
    BoundViolated,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Certified | Self::Sampled | Self::Solved | Self::Obstruction => 0,
            Self::Falsified | Self::Dichotomy => 2,
            Self::Inconclusive | Self::BoundViolated => 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedCertificate {
    pub label: String,
    pub certificate: CoercivityCertificate,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub action: Action,
    pub outcome: Outcome,
    pub exit_code: i32,
    pub tool_version: &'static str,
    pub seed: u64,
    pub notes: Vec<String>,
    pub certificates: Vec<NamedCertificate>,
    pub solves: Vec<Value>,
    pub details: Value,
    pub timing: Timing,
}

impl Report {
    fn new(s: &Scenario, outcome: Outcome) -> Self {
        Self {
            scenario: s.name.clone(),
            action: s.action,
            outcome,
            exit_code: outcome.exit_code(),
            tool_version: TOOL_VERSION,
            seed: s.sampling.seed,
            notes: Vec::new(),
            certificates: Vec::new(),
            solves: Vec::new(),
            details: Value::Null,
            timing: Timing::default(),
        }
    }

    fn certificate(&mut self, label: &str, certificate: CoercivityCertificate) {
        self.certificates.push(NamedCertificate {
            label: label.into(),
            certificate,
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its `timing` field, for comparisons.
    pub fn without_timing(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timing");
        }
        v
    }
}

/// Loads, validates and runs a scenario file.
pub fn run_scenario(path: &Path, overrides: &Overrides) -> Result<Report> {
    let mut s = Scenario::load(path)?;
    s.apply(overrides);
    s.validate()?;
    run(&s, overrides)
}

/// Runs the named builtin scenario.
pub fn run_builtin(name: &str, overrides: &Overrides) -> Result<Report> {
    let mut s =
        builtin(name).ok_or_else(|| invalid("builtin", format!("unknown builtin `{name}`")))?;
    s.apply(overrides);
    s.validate()?;
    run(&s, overrides)
}

/// Runs an already validated scenario.
pub fn run(s: &Scenario, overrides: &Overrides) -> Result<Report> {
    let start = Instant::now();
    let mut report = match s.action {
        Action::Certify => run_certify(s)?,
        Action::Solve => run_solve(s, overrides)?,
        Action::Falsify => run_falsify(s, overrides)?,
        Action::FamilySolve => run_family(s, overrides)?,
        Action::Demo => match s.demo.as_ref().expect("validated") {
            DemoSpec::M2Gap { tested_constants } => {
                demo::run_m2_gap(s, tested_constants, overrides)?
            }
            DemoSpec::SinCounterexample { grids, deltas } => demo::run_sin(s, grids, deltas)?,
        },
    };
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn solve_options(s: &Scenario, o: &Overrides) -> SolveOptions {
    let mut opts = SolveOptions {
        seed: s.sampling.seed,
        ..SolveOptions::default()
    };
    if let Some(t) = o.tol {
        opts.solver_tol = t;
    }
    opts
}

/// The analytic positive-invertible certificate when it applies, otherwise
/// sampled witnesses for the scenario constants.
fn certificate_for(s: &Scenario, form: &SesquilinearForm) -> Result<CoercivityCertificate> {
    match certify_positive_invertible(form) {
        Ok(cert) => Ok(cert),
        Err(analytic) => {
            let (Some(c), Some(k)) = (s.constants.c, s.constants.k) else {
                return Err(analytic);
            };
            let cfg = SearchConfig {
                seed: s.sampling.seed,
                ..SearchConfig::default()
            };
            Ok(certify_witnesses(
                form,
                c,
                k,
                &s.sample(),
                s.sampling.probes,
                s.sampling.seed,
                &cfg,
            ))
        }
    }
}

fn run_certify(s: &Scenario) -> Result<Report> {
    let form = s.build_form()?;
    let cert = certificate_for(s, &form)?;
    let outcome = if !cert.sampled {
        Outcome::Certified
    } else if cert.holds() {
        Outcome::Sampled
    } else {
        Outcome::Inconclusive
    };
    let mut report = Report::new(s, outcome);
    report.certificate("coercivity", cert);
    Ok(report)
}

fn run_solve(s: &Scenario, o: &Overrides) -> Result<Report> {
    let form = s.build_form()?;
    let tau = s.build_functional()?;
    let cert = certificate_for(s, &form)?;
    if cert.sampled && !cert.holds() {
        let mut report = Report::new(s, Outcome::Inconclusive);
        report.certificate("coercivity", cert);
        return Ok(report);
    }
    let result = lax_milgram_solve(&form, &tau, &cert, &solve_options(s, o))?;
    let outcome = if result.norm_bound_ok {
        Outcome::Solved
    } else {
        Outcome::BoundViolated
    };
    let mut report = Report::new(s, outcome);
    if !result.tau_norm_exact {
        report
            .notes
            .push("the functional norm is a sampled lower bound".into());
    }
    // independent check of c = ‖T⁻¹‖⁻¹ on the flattened matrix
    if let Some(inv) = flatten(&form).matrix.inverse() {
        let flat_inverse_norm = inv.spectral_norm();
        report.details = json!({
            "flattened_inverse_norm": flat_inverse_norm,
            "c_from_flattened": 1.0 / flat_inverse_norm,
            "c_matches_flattened": (cert.c * flat_inverse_norm - 1.0).abs() <= 1e-9 || cert.sampled,
        });
    }
    report.certificate("coercivity", cert);
    report.solves.push(serde_json::to_value(&result)?);
    Ok(report)
}

fn run_falsify(s: &Scenario, o: &Overrides) -> Result<Report> {
    let form = s.build_form()?;
    let c = s.constants.c.expect("validated");
    let mut sample = s.sample();
    if s.sampling.strategy == SamplingStrategy::EigenDirected {
        let diag: Vec<AlgebraElement> = (0..form.domain().rank.min(form.codomain().rank))
            .map(|i| form.operator()[i][i].clone())
            .collect();
        sample.augment_with_eigenstates(&diag);
    }
    let cert = falsify_uniform(
        &form,
        c,
        &sample,
        s.sampling.probes,
        s.sampling.seed,
        o.tol.unwrap_or(FALSIFY_TOL),
    );
    let outcome = if cert.violations.is_empty() {
        Outcome::Sampled
    } else {
        Outcome::Falsified
    };
    let mut report = Report::new(s, outcome);
    report.certificate("uniform", cert);
    Ok(report)
}

fn run_family(s: &Scenario, o: &Overrides) -> Result<Report> {
    let form = s.build_form()?;
    let tau = s.build_functional()?;
    let (xs, ys) = s.build_family()?;
    let opts = solve_options(s, o);
    let (family, cert_c, route_note) = if s.shape == AlgebraShape::scalar() {
        let c = match s.constants.c {
            Some(c) => c,
            None => certify_positive_invertible(&form)?.c,
        };
        (
            hilbert_space_solve(&form, &tau, &xs, &ys, c, &opts)?,
            c,
            "scalar algebra: |B(x,y)| >= c|x||y| checked per level",
        )
    } else {
        let cert = certificate_for(s, &form)?;
        let c = cert.c;
        (
            directed_family_solve(&form, &tau, &xs, &ys, &cert, &opts)?,
            c,
            "module family: restricted operators checked per level",
        )
    };
    let unrestricted = certify_positive_invertible(&form)
        .ok()
        .and_then(|cert| lax_milgram_solve(&form, &tau, &cert, &opts).ok());
    let mut report = Report::new(
        s,
        if family.result.norm_bound_ok {
            Outcome::Solved
        } else {
            Outcome::BoundViolated
        },
    );
    report.notes.push(route_note.into());
    report.details = json!({
        "c": cert_c,
        "max_level_residual": family.levels.iter().map(|l| l.residual).fold(0.0, f64::max),
        "distance_to_unrestricted": unrestricted
            .as_ref()
            .map(|u| u.solution.sub(&family.result.solution).norm()),
    });
    report.solves.push(serde_json::to_value(&family)?);
    Ok(report)
}
