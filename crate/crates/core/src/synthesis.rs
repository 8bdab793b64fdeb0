//! Three-stage transformer synthesis from band-pass prototype coefficients.

use std::f64::consts::PI;

use crate::error::{require, Error, Result};

/// Smallest reference impedance treated as a usable design.
const MIN_Z_REF: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrototypeCoefficients {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub eps: f64,
}

impl PrototypeCoefficients {
    /// Two-pole 17-dB-gain prototype.
    pub fn getsinger_17db(eps: f64) -> Self {
        Self { g0: 1.0, g1: 0.408, g2: 0.234, g3: 1.106, eps }
    }

    pub fn validate(&self) -> Result<()> {
        for (n, g) in [("g0", self.g0), ("g1", self.g1), ("g2", self.g2), ("g3", self.g3)] {
            require(g > 0.0 && g.is_finite(), || format!("{n} must be > 0, got {g}"))?;
        }
        require(self.eps > 0.0 && self.eps < 0.5, || format!("eps must be in (0, 0.5), got {}", self.eps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisResult {
    pub z_ref: f64,
    pub z_quarter: f64,
    pub z_parallel: f64,
    pub z_half: f64,
    pub z_nr_primed: f64,
    pub r_nr_primed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedNr {
    pub z_nr_primed: f64,
    pub r_nr_primed: f64,
}

/// Resonator seen through the KI quarter-wave inverter.
pub fn transform_nr(z_ki: f64, z_nr: f64, r_nr: f64) -> Result<TransformedNr> {
    require(z_ki > 0.0 && z_nr > 0.0 && r_nr > 0.0, || "z_ki, z_nr and r_nr must be > 0".into())?;
    Ok(TransformedNr { z_nr_primed: z_ki * z_ki / z_nr, r_nr_primed: z_ki * z_ki / r_nr })
}

/// Coefficients (b, c) of Z^2 + b Z - c = 0 fixing the half-wave impedance.
pub fn half_wave_quadratic(z_quarter: f64, z_parallel: f64, z0: f64) -> (f64, f64) {
    let z0p = z_quarter * z_quarter / z0;
    let b = z_quarter / 2.0 - z_quarter * z0p / (2.0 * z0) + 2.0 * z0p * z0p / (PI * z_parallel);
    (b, z0p * z0p)
}

pub fn synthesize_transformer(proto: &PrototypeCoefficients, z_nr: f64, z_ki: f64, z0: f64) -> Result<SynthesisResult> {
    proto.validate()?;
    require(z_nr > 0.0 && z_ki > 0.0 && z0 > 0.0, || "z_nr, z_ki and z0 must be > 0".into())?;
    let z_nr_primed = z_ki * z_ki / z_nr;
    let z_ref = proto.eps * z_nr_primed / proto.g1;
    if z_ref < MIN_Z_REF {
        return Err(Error::SynthesisInfeasible(format!("reference impedance {z_ref:e} ohm is degenerate")));
    }
    let z_quarter = (proto.g3 * z_ref * z0).sqrt();
    let z_parallel = proto.eps * z_ref / proto.g2;
    let (b, c) = half_wave_quadratic(z_quarter, z_parallel, z0);
    // positive root without cancellation
    let disc = (b * b + 4.0 * c).sqrt();
    let z_half = if b >= 0.0 { 2.0 * c / (b + disc) } else { (disc - b) / 2.0 };
    if !(z_half.is_finite() && z_half > 0.0) {
        return Err(Error::SynthesisInfeasible("no positive root for the half-wave impedance".into()));
    }
    log::debug!(
        "z_parallel = eps*z_ref/g2 = {z_parallel:.4} ohm (the 10x value {:.4} ohm does not reproduce the half-wave root)",
        10.0 * z_parallel
    );
    Ok(SynthesisResult { z_ref, z_quarter, z_parallel, z_half, z_nr_primed, r_nr_primed: proto.g0 * z_ref })
}

/// Fractional bandwidth implied by a transformed resonator, with g0 = 1.
pub fn predict_fractional_bandwidth(g1: f64, z_nr_primed: f64, r_nr_primed: f64) -> Result<f64> {
    require(g1 > 0.0 && z_nr_primed > 0.0 && r_nr_primed > 0.0, || "inputs must be > 0".into())?;
    Ok(g1 * r_nr_primed / z_nr_primed)
}
