//! One design variable, one environment parameter, two objectives:
//! `f1 = x + p/2`, `f2 = (x - p)^2`, subject to `1 <= x <= 10` and `f1 >= 3`.

use std::sync::Arc;

use crate::error::Result;
use crate::model::{Bounds, Evaluation, NoiseSpec, ProblemDef, ProblemSpec};

pub fn numerical_eg1(x: f64, p: f64) -> Evaluation {
    let f1 = x + p / 2.0;
    let f2 = (x - p) * (x - p);
    Evaluation::new(vec![f1, f2], vec![3.0 - f1])
}

/// The numerical example with nominal environment `p_nominal` and uniform noise of
/// half-width `dv_half_width` on `x`.
pub fn numerical_problem(p_nominal: f64, dv_half_width: f64) -> Result<ProblemDef> {
    let spec = ProblemSpec {
        name: "numerical_eg1".into(),
        dv_names: vec!["x".into()],
        dep_names: vec!["p".into()],
        objective_names: vec!["f1".into(), "f2".into()],
        constraint_names: vec!["g1".into()],
        dv_bounds: vec![Bounds::new(1.0, 10.0)],
        dep_nominal: vec![p_nominal],
        dv_noise: vec![NoiseSpec::Uniform { half_width: dv_half_width }],
        dep_noise: vec![NoiseSpec::None],
    };
    ProblemDef::new(spec, Arc::new(|x: &[f64], p: &[f64]| Ok(numerical_eg1(x[0], p[0]))))
}
