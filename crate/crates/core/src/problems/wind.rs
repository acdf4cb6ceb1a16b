//! Morphing-blade rotor design problem.
//!
//! Design variables `[root_twist, tip_twist, root_chord, rotor_speed]`; the tip chord
//! follows from a fixed chord sum. Environment `[blades, tip_radius, root_radius,
//! air_density, wind_speed]`. Objectives are `(-P, F_a)` in W and N, subject to
//! `1 kW <= P <= 25 kW`.

use std::sync::Arc;

use super::bemt::{bemt_evaluate, BemtOptions, BladeDesign, RotorEnvironment};
use super::polar::PolarTable;
use crate::error::Result;
use crate::model::{Bounds, DepVector, Evaluation, NoiseSpec, ProblemDef, ProblemSpec};
use crate::robustness::{Scenario, ScenarioSet};

/// Root chord plus tip chord, in metres.
pub const CHORD_SUM: f64 = 1.095;

pub const POWER_MIN_W: f64 = 1_000.0;
pub const POWER_MAX_W: f64 = 25_000.0;

/// Initial (reference) design: `[22.8 deg, 3.61 deg, 0.737 m, 72 rpm]`.
pub const INITIAL_DESIGN: [f64; 4] = [22.8, 3.61, 0.737, 72.0];

pub const NOMINAL_ENVIRONMENT: [f64; 5] = [2.0, 5.0, 1.27, 1.25, 10.0];

/// Discretised wind speeds (m/s) and their probability masses.
pub const WIND_SPEED_TABLE: [(f64, f64); 9] = [
    (6.0, 0.028),
    (7.0, 0.066),
    (8.0, 0.124),
    (9.0, 0.180),
    (10.0, 0.204),
    (11.0, 0.180),
    (12.0, 0.124),
    (13.0, 0.066),
    (14.0, 0.028),
];

pub fn blade_from_dvs(x: &[f64]) -> BladeDesign {
    BladeDesign {
        root_twist_deg: x[0],
        tip_twist_deg: x[1],
        root_chord: x[2],
        tip_chord: CHORD_SUM - x[2],
        rotor_speed_rpm: x[3],
    }
}

pub fn environment_from_deps(p: &[f64]) -> RotorEnvironment {
    RotorEnvironment {
        blades: p[0],
        tip_radius: p[1],
        root_radius: p[2],
        air_density: p[3],
        wind_speed: p[4],
    }
}

pub fn wind_turbine_problem(polar: PolarTable) -> Result<ProblemDef> {
    wind_turbine_problem_with(polar, BemtOptions::default())
}

pub fn wind_turbine_problem_with(polar: PolarTable, opts: BemtOptions) -> Result<ProblemDef> {
    let spec = ProblemSpec {
        name: "bemt_rotor".into(),
        dv_names: ["root_twist_deg", "tip_twist_deg", "root_chord_m", "rotor_speed_rpm"]
            .map(String::from)
            .to_vec(),
        dep_names: ["blades", "tip_radius_m", "root_radius_m", "air_density", "wind_speed"]
            .map(String::from)
            .to_vec(),
        objective_names: vec!["neg_power_w".into(), "thrust_n".into()],
        constraint_names: vec!["power_min".into(), "power_max".into()],
        dv_bounds: vec![
            Bounds::new(0.0, 35.0),
            Bounds::new(-5.0, 15.0),
            Bounds::new(0.595, 0.895),
            Bounds::new(40.0, 100.0),
        ],
        dep_nominal: NOMINAL_ENVIRONMENT.to_vec(),
        dv_noise: vec![
            NoiseSpec::Uniform { half_width: 1.0 },
            NoiseSpec::Uniform { half_width: 0.5 },
            NoiseSpec::Uniform { half_width: 0.005 },
            NoiseSpec::Uniform { half_width: 2.0 },
        ],
        dep_noise: vec![
            NoiseSpec::None,
            NoiseSpec::Uniform { half_width: 0.05 },
            NoiseSpec::Uniform { half_width: 0.005 },
            NoiseSpec::Uniform { half_width: 0.05 },
            NoiseSpec::Normal { std: 2.0 },
        ],
    };
    let evaluator = move |x: &[f64], p: &[f64]| -> Result<Evaluation> {
        let perf = bemt_evaluate(&blade_from_dvs(x), &environment_from_deps(p), &polar, &opts)?;
        Ok(Evaluation::new(
            vec![-perf.power, perf.thrust],
            vec![POWER_MIN_W - perf.power, perf.power - POWER_MAX_W],
        ))
    };
    ProblemDef::new(spec, Arc::new(evaluator))
}

/// Nine wind-speed scenarios over the nominal environment; `p_0` is the 10 m/s one.
pub fn wind_scenarios() -> ScenarioSet {
    wind_scenarios_around(&DepVector(NOMINAL_ENVIRONMENT.to_vec()))
        .expect("tabulated wind-speed masses are valid")
}

pub fn wind_scenarios_around(template: &DepVector) -> Result<ScenarioSet> {
    ScenarioSet::new(
        WIND_SPEED_TABLE
            .iter()
            .map(|&(v, h)| {
                let mut p = template.clone();
                p.0[4] = v;
                Scenario { p, h }
            })
            .collect(),
    )
}
