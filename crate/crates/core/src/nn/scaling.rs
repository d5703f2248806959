//! Compound scaling: coupled depth/width/resolution multipliers.
//!
//! Depth scales as `alpha^phi`, width as `beta^phi`, and input resolution as
//! `gamma^phi`. The base factors are meant to roughly double the compute
//! cost per unit of `phi`, which pins `alpha * beta^2 * gamma^2` near 2.

use alloc::format;

use super::NnError;

pub const CONSTRAINT_TARGET: f64 = 2.0;
pub const CONSTRAINT_TOLERANCE: f64 = 0.1;

/// Base scaling factors plus the compound coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompoundScaling {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

/// Multipliers produced by one scaling configuration. These are always
/// recomputed from the factors, never stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingResult {
    pub depth: f64,
    pub width: f64,
    pub resolution: f64,
    /// `alpha * beta^2 * gamma^2`
    pub constraint_value: f64,
    /// Whether the constraint value lies within 0.1 of 2.
    pub constraint_ok: bool,
}

pub fn compound_scale(cs: &CompoundScaling) -> Result<ScalingResult, NnError> {
    if cs.alpha <= 0.0 || cs.beta <= 0.0 || cs.gamma <= 0.0 {
        return Err(NnError::BadScaling(format!(
            "scaling factors must be positive, got alpha={} beta={} gamma={}",
            cs.alpha, cs.beta, cs.gamma
        )));
    }
    if cs.phi < 0.0 {
        return Err(NnError::BadScaling(format!(
            "compound coefficient must be nonnegative, got {}",
            cs.phi
        )));
    }
    let constraint_value = cs.alpha * cs.beta * cs.beta * cs.gamma * cs.gamma;
    Ok(ScalingResult {
        depth: cs.alpha.powf(cs.phi),
        width: cs.beta.powf(cs.phi),
        resolution: cs.gamma.powf(cs.phi),
        constraint_value,
        constraint_ok: (constraint_value - CONSTRAINT_TARGET).abs() <= CONSTRAINT_TOLERANCE,
    })
}
