//! Pump-amplitude policies and bias/pump-frequency maps.

use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use super::bandwidth::QualifyOptions;
use super::engine::{best_over_ramp, Evaluator, RampBest};
use super::{centred_grid, DesignSpec, EnvironmentModel, PumpDrive};
use crate::error::Result;
use crate::material::PumpOperatingPoint;
use crate::registry::Registry;

/// A geometric pump ramp for one bias point and pump frequency.
pub trait PumpPolicy: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn ramp<'a>(&'a self, design: &'a DesignSpec, i_dc: f64, omega_p: f64) -> Result<Box<dyn Iterator<Item = PumpDrive> + 'a>>;
}

/// Ramps |xi3| directly: start * factor^k up to `ceiling_fraction` of the
/// unpumped resonator frequency (and `cap`, if set).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xi3Ramp {
    pub start: f64,
    pub factor: f64,
    pub ceiling_fraction: f64,
    pub cap: Option<f64>,
}

impl Xi3Ramp {
    /// 0.1-dB pump power steps.
    pub fn power_steps() -> Self {
        Self { start: TAU * 1e6, factor: 10f64.powf(0.1 / 20.0), ceiling_fraction: 0.5, cap: None }
    }

    /// 2 % amplitude steps.
    pub fn percent_steps() -> Self {
        Self { start: TAU * 1e6, factor: 1.02, ceiling_fraction: 0.5, cap: None }
    }
}

impl PumpPolicy for Xi3Ramp {
    fn name(&self) -> &'static str {
        "xi3-ramp"
    }

    fn ramp<'a>(&'a self, design: &'a DesignSpec, i_dc: f64, omega_p: f64) -> Result<Box<dyn Iterator<Item = PumpDrive> + 'a>> {
        let mut limit = self.ceiling_fraction * design.omega_nr(i_dc)?;
        if let Some(c) = self.cap {
            limit = limit.min(c);
        }
        let it = (0..)
            .map(move |k| self.start * self.factor.powi(k))
            .take_while(move |x| *x <= limit)
            .map_while(move |x| PumpDrive::from_xi3(design, i_dc, x, 0.0, omega_p).ok());
        Ok(Box::new(it))
    }
}

/// Ramps the pump current in power steps of `step_db` while
/// i_dc + |I_p| stays below the critical current (and `cap`, if set).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentRamp {
    pub start: f64,
    pub step_db: f64,
    pub cap: Option<f64>,
}

impl Default for CurrentRamp {
    fn default() -> Self {
        Self { start: 1e-6, step_db: 0.1, cap: None }
    }
}

impl PumpPolicy for CurrentRamp {
    fn name(&self) -> &'static str {
        "current-ramp"
    }

    fn ramp<'a>(&'a self, design: &'a DesignSpec, i_dc: f64, omega_p: f64) -> Result<Box<dyn Iterator<Item = PumpDrive> + 'a>> {
        let factor = 10f64.powf(self.step_db / 20.0);
        let i_c = design.ki_model.i_c;
        let cap = self.cap.unwrap_or(f64::INFINITY);
        let it = (0..)
            .map(move |k| self.start * factor.powi(k))
            .take_while(move |ip| i_dc + ip < i_c && *ip <= cap)
            .map_while(move |ip| {
                let op = PumpOperatingPoint { i_dc, i_p_mag: ip, phi_p: 0.0, omega_p };
                PumpDrive::from_operating_point(design, &op).ok()
            });
        Ok(Box::new(it))
    }
}

pub fn pump_policy_registry() -> &'static Registry<dyn PumpPolicy> {
    static REG: OnceLock<Registry<dyn PumpPolicy>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn PumpPolicy> = Registry::new("pump policy");
        r.register("xi3-ramp", Arc::new(Xi3Ramp::power_steps()));
        r.register("xi3-ramp-2pct", Arc::new(Xi3Ramp::percent_steps()));
        r.register("current-ramp", Arc::new(CurrentRamp::default()));
        r
    })
}

pub fn pump_policy(name: &str) -> Result<Arc<dyn PumpPolicy>> {
    pump_policy_registry().get(name)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    pub half_span_hz: f64,
    pub step_hz: f64,
    pub qualify: QualifyOptions,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self { half_span_hz: 1e9, step_hz: 1e6, qualify: QualifyOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapCell {
    pub omega_p: f64,
    pub i_dc: f64,
    /// Widest qualifying profile; `None` reports as zero bandwidth.
    pub best: Option<RampBest>,
}

impl MapCell {
    pub fn bandwidth(&self) -> f64 {
        self.best.as_ref().map_or(0.0, |b| b.report.bandwidth)
    }
}

/// Best qualifying bandwidth per (pump frequency, bias) cell, pump frequency
/// outermost. Cells run in parallel; output order is fixed.
pub fn pump_bias_map(
    design: &DesignSpec,
    env: &EnvironmentModel,
    omega_p_grid: &[f64],
    i_dc_grid: &[f64],
    policy: &dyn PumpPolicy,
    opts: &MapOptions,
) -> Result<Vec<MapCell>> {
    let rows: Vec<Result<Vec<MapCell>>> = omega_p_grid
        .par_iter()
        .map(|&omega_p| {
            let freqs = centred_grid(omega_p, opts.half_span_hz, opts.step_hz)?;
            let eval = Evaluator::new(design, env, omega_p, &freqs)?;
            i_dc_grid
                .iter()
                .map(|&i_dc| {
                    let best = best_over_ramp(&eval, policy.ramp(design, i_dc, omega_p)?, &opts.qualify)?;
                    Ok(MapCell { omega_p, i_dc, best })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(omega_p_grid.len() * i_dc_grid.len());
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}
