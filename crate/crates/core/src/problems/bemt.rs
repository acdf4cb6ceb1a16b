//! Steady blade element momentum model of a horizontal-axis rotor.
//!
//! The span `[r_root, r_tip]` is split into equal annuli evaluated at their midpoints.
//! Twist and chord vary linearly from root to tip. In each annulus the axial and
//! tangential induction factors are found by damped fixed-point iteration with the
//! Prandtl tip-loss factor; above `a = 0.4` the momentum relation is replaced by the
//! empirical Glauert thrust curve (Buhl's form). All internal quantities are SI.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::polar::PolarTable;
use crate::error::{MoropError, Result};

/// Axial induction above which the empirical high-thrust relation is used.
const HIGH_INDUCTION: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BladeDesign {
    pub root_twist_deg: f64,
    pub tip_twist_deg: f64,
    pub root_chord: f64,
    pub tip_chord: f64,
    pub rotor_speed_rpm: f64,
}

impl BladeDesign {
    pub fn omega(&self) -> f64 {
        self.rotor_speed_rpm * 2.0 * PI / 60.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorEnvironment {
    pub blades: f64,
    pub tip_radius: f64,
    pub root_radius: f64,
    pub air_density: f64,
    pub wind_speed: f64,
}

impl RotorEnvironment {
    pub fn validate(&self) -> Result<()> {
        let b = self.blades;
        if !(b >= 1.0 && b.fract() == 0.0) {
            return Err(MoropError::ModelFailure(format!("blade count {b} is not a positive integer")));
        }
        if !(self.root_radius > 0.0 && self.tip_radius > self.root_radius) {
            return Err(MoropError::ModelFailure(format!(
                "need 0 < root radius < tip radius (got {}, {})",
                self.root_radius, self.tip_radius
            )));
        }
        if !(self.air_density > 0.0) || !(self.wind_speed >= 0.0) || !self.wind_speed.is_finite() {
            return Err(MoropError::ModelFailure(format!(
                "need air density > 0 and wind speed >= 0 (got {}, {})",
                self.air_density, self.wind_speed
            )));
        }
        Ok(())
    }

    /// Annulus swept by the modelled span.
    pub fn swept_area(&self) -> f64 {
        PI * (self.tip_radius.powi(2) - self.root_radius.powi(2))
    }
}

/// Mechanical power (W) and axial thrust (N).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorPerformance {
    pub power: f64,
    pub thrust: f64,
    /// Number of elements that used the high-induction thrust relation.
    pub high_induction_elements: usize,
}

impl RotorPerformance {
    pub fn power_coefficient(&self, env: &RotorEnvironment) -> f64 {
        self.power / (0.5 * env.air_density * env.swept_area() * env.wind_speed.powi(3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InductionModel {
    /// Solve for `(a, a')` element by element.
    #[default]
    Solve,
    /// Momentum-only loads for fixed induction factors, bypassing the blade aerodynamics.
    Prescribed { axial: f64, tangential: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BemtOptions {
    pub n_elements: usize,
    pub relaxation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub tip_loss: bool,
    pub drag: bool,
    pub induction: InductionModel,
}

impl Default for BemtOptions {
    fn default() -> Self {
        Self {
            n_elements: 40,
            relaxation: 0.25,
            tolerance: 1e-8,
            max_iterations: 500,
            tip_loss: true,
            drag: true,
            induction: InductionModel::Solve,
        }
    }
}

struct Element {
    r: f64,
    dr: f64,
    chord: f64,
    twist: f64,
}

fn elements(d: &BladeDesign, env: &RotorEnvironment, n: usize) -> impl Iterator<Item = Element> {
    let span = env.tip_radius - env.root_radius;
    let dr = span / n as f64;
    let (d, root) = (*d, env.root_radius);
    (0..n).map(move |k| {
        let s = (k as f64 + 0.5) / n as f64;
        Element {
            r: root + s * span,
            dr,
            chord: d.root_chord + s * (d.tip_chord - d.root_chord),
            twist: (d.root_twist_deg + s * (d.tip_twist_deg - d.root_twist_deg)).to_radians(),
        }
    })
}

fn prandtl_tip_loss(blades: f64, tip_radius: f64, r: f64, phi: f64) -> f64 {
    let s = phi.sin().abs();
    if s < 1e-12 {
        return 1.0;
    }
    let f = blades / 2.0 * (tip_radius - r) / (r * s);
    2.0 / PI * (-f).exp().clamp(0.0, 1.0).acos()
}

/// Maps an angle to (-180, 180].
fn wrap_degrees(a: f64) -> f64 {
    let w = (a + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 {
        180.0
    } else {
        w
    }
}

struct ElementState {
    phi: f64,
    cn: f64,
    ct: f64,
    high_induction: bool,
}

fn solve_element(
    el: &Element,
    omega: f64,
    env: &RotorEnvironment,
    polar: &PolarTable,
    opts: &BemtOptions,
    start: (f64, f64),
) -> Result<(f64, f64, ElementState)> {
    let v = env.wind_speed;
    let b = env.blades;
    let solidity = b * el.chord / (2.0 * PI * el.r);
    let (mut a, mut ap) = start;
    let mut residual = f64::INFINITY;

    for _ in 0..opts.max_iterations {
        let phi = (v * (1.0 - a)).atan2(omega * el.r * (1.0 + ap));
        let (sphi, cphi) = phi.sin_cos();
        let alpha_deg = wrap_degrees((phi - el.twist).to_degrees());
        let (cl, cd) = polar.coefficients(alpha_deg)?;
        let cd = if opts.drag { cd } else { 0.0 };
        let cn = cl * cphi + cd * sphi;
        let ct = cl * sphi - cd * cphi;
        let f = if opts.tip_loss { prandtl_tip_loss(b, env.tip_radius, el.r, phi) } else { 1.0 };

        let mut a_new = 1.0 / (4.0 * f * sphi * sphi / (solidity * cn) + 1.0);
        let mut high_induction = false;
        if a_new > HIGH_INDUCTION {
            high_induction = true;
            let ct_local = solidity * (1.0 - a).powi(2) * cn / (sphi * sphi);
            let disc = (ct_local * (50.0 - 36.0 * f) + 12.0 * f * (3.0 * f - 4.0)).max(0.0);
            a_new = (18.0 * f - 20.0 - 3.0 * disc.sqrt()) / (36.0 * f - 50.0);
        }
        let ap_new = 1.0 / (4.0 * f * sphi * cphi / (solidity * ct) - 1.0);
        if !(a_new.is_finite() && ap_new.is_finite()) {
            return Err(MoropError::ModelFailure(format!(
                "non-finite induction at r = {:.4} m (alpha = {alpha_deg:.3} deg)",
                el.r
            )));
        }

        residual = (a_new - a).abs().max((ap_new - ap).abs());
        if residual < opts.tolerance {
            return Ok((a, ap, ElementState { phi, cn, ct, high_induction }));
        }
        a += opts.relaxation * (a_new - a);
        ap += opts.relaxation * (ap_new - ap);
    }
    Err(MoropError::BemtNoConvergence { residual, iterations: opts.max_iterations })
}

/// Power and thrust of the rotor.
pub fn bemt_evaluate(
    d: &BladeDesign,
    env: &RotorEnvironment,
    polar: &PolarTable,
    opts: &BemtOptions,
) -> Result<RotorPerformance> {
    env.validate()?;
    if opts.n_elements == 0 {
        return Err(MoropError::Config("n_elements must be positive".into()));
    }
    if !(d.root_chord > 0.0 && d.tip_chord > 0.0) {
        return Err(MoropError::ModelFailure(format!(
            "chords must be positive (root {}, tip {})",
            d.root_chord, d.tip_chord
        )));
    }
    if env.wind_speed == 0.0 {
        return Ok(RotorPerformance { power: 0.0, thrust: 0.0, high_induction_elements: 0 });
    }

    let omega = d.omega();
    let v = env.wind_speed;
    let rho = env.air_density;
    let mut torque = 0.0;
    let mut thrust = 0.0;
    let mut power_extra = 0.0;
    let mut flagged = 0;
    // each element starts from its inboard neighbour's converged induction
    let mut start = (0.25, 0.0);

    for el in elements(d, env, opts.n_elements) {
        match opts.induction {
            InductionModel::Prescribed { axial, tangential } => {
                let phi = (v * (1.0 - axial)).atan2(omega * el.r * (1.0 + tangential));
                let f = if opts.tip_loss { prandtl_tip_loss(env.blades, env.tip_radius, el.r, phi) } else { 1.0 };
                let d_thrust = 4.0 * PI * el.r * rho * v * v * axial * (1.0 - axial) * f * el.dr;
                let d_torque = 4.0 * PI * el.r.powi(3) * rho * v * omega * (1.0 - axial) * tangential * f * el.dr;
                thrust += d_thrust;
                torque += d_torque;
                // actuator-disc power of the axial flow
                power_extra += d_thrust * v * (1.0 - axial);
            }
            InductionModel::Solve => {
                let (a, ap, st) = solve_element(&el, omega, env, polar, opts, start)?;
                start = (a, ap);
                let w2 = (v * (1.0 - a)).powi(2) + (omega * el.r * (1.0 + ap)).powi(2);
                let q = 0.5 * rho * w2 * env.blades * el.chord * el.dr;
                thrust += q * st.cn;
                torque += q * st.ct * el.r;
                if st.high_induction {
                    flagged += 1;
                }
                debug_assert!(st.phi.is_finite());
            }
        }
    }

    let power = torque * omega + power_extra;
    if !(power.is_finite() && thrust.is_finite()) {
        return Err(MoropError::ModelFailure("non-finite rotor loads".into()));
    }
    Ok(RotorPerformance { power, thrust, high_induction_elements: flagged })
}
