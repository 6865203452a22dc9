//! The builtin scenario registry.

use serde::Serialize;

use super::{
    Action, Constants, DemoSpec, FamilySpec, FormSpec, FunctionalSpec, Ranks, Sampling, Scenario,
};
use crate::algebra::AlgebraShape;
use crate::state::SamplingStrategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BuiltinInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const BUILTINS: &[BuiltinInfo] = &[
    BuiltinInfo {
        name: "m2-gap",
        description: "B(x,y) = x*y on M2: pointwise witnesses with c = k = 1 exist, the uniform condition fails for every c",
    },
    BuiltinInfo {
        name: "riesz-identity",
        description: "B = inner product on M2^2: the solution is the representer itself",
    },
    BuiltinInfo {
        name: "positive-T",
        description: "random positive invertible T over M2 + M1, rank 2: c = 1/|T^-1| and the norm bound",
    },
    BuiltinInfo {
        name: "nested-family",
        description: "positive T on M2^2 solved along a refining chain of submodules",
    },
    BuiltinInfo {
        name: "hilbert-classic",
        description: "SPD matrix on C^4 solved along the coordinate chain",
    },
    BuiltinInfo {
        name: "sin-counterexample",
        description: "grid solutions of u = sin(1/t) on the ideal vanishing at 0: oscillation near 0 does not decay",
    },
];

pub fn list_builtins() -> &'static [BuiltinInfo] {
    BUILTINS
}

fn shape(dims: &[usize]) -> AlgebraShape {
    AlgebraShape::new(dims.to_vec()).expect("valid builtin shape")
}

pub fn builtin(name: &str) -> Option<Scenario> {
    let base = |action, dims: &[usize], p, q| Scenario {
        name: name.to_string(),
        action,
        shape: shape(dims),
        ranks: Ranks { p, q },
        form: None,
        functional: None,
        constants: Constants::default(),
        sampling: Sampling::default(),
        family: None,
        demo: None,
    };
    let s = match name {
        "m2-gap" => Scenario {
            form: Some(FormSpec::InnerProduct),
            constants: Constants {
                c: Some(1.0),
                k: Some(1.0),
            },
            sampling: Sampling {
                states: 50,
                probes: 2,
                seed: 0,
                strategy: SamplingStrategy::Grid,
            },
            demo: Some(DemoSpec::M2Gap {
                tested_constants: vec![0.01, 0.1, 1.0],
            }),
            ..base(Action::Demo, &[2], 1, 1)
        },
        "riesz-identity" => Scenario {
            form: Some(FormSpec::InnerProduct),
            functional: Some(FunctionalSpec::Random),
            sampling: Sampling {
                seed: 1,
                ..Sampling::default()
            },
            ..base(Action::Solve, &[2], 2, 2)
        },
        "positive-T" => Scenario {
            form: Some(FormSpec::RandomPositive { delta: 0.1 }),
            functional: Some(FunctionalSpec::Random),
            sampling: Sampling {
                seed: 7,
                ..Sampling::default()
            },
            ..base(Action::Solve, &[2, 1], 2, 2)
        },
        "nested-family" => Scenario {
            form: Some(FormSpec::RandomPositive { delta: 0.2 }),
            functional: Some(FunctionalSpec::Random),
            family: Some(FamilySpec::RefiningChain),
            sampling: Sampling {
                seed: 3,
                ..Sampling::default()
            },
            ..base(Action::FamilySolve, &[2], 2, 2)
        },
        "hilbert-classic" => Scenario {
            form: Some(FormSpec::RandomPositive { delta: 0.5 }),
            functional: Some(FunctionalSpec::Random),
            family: Some(FamilySpec::CoordinateChain),
            sampling: Sampling {
                seed: 5,
                ..Sampling::default()
            },
            ..base(Action::FamilySolve, &[1], 4, 4)
        },
        "sin-counterexample" => Scenario {
            demo: Some(DemoSpec::SinCounterexample {
                grids: vec![64, 256, 1024],
                deltas: vec![0.25, 0.125, 0.0625, 0.03125],
            }),
            ..base(Action::Demo, &[1], 1, 1)
        },
        _ => return None,
    };
    Some(s)
}
