//! Pumped reflection simulation of the full amplifier network.

mod bandwidth;
mod engine;
mod map;
mod power_law;
pub mod topology;

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

pub use bandwidth::{bandwidth_report, find_peaks, BandwidthReport, QualifyOptions, Rejection};
pub use engine::{best_over_ramp, Evaluator, RampBest};
pub use map::{pump_bias_map, pump_policy, pump_policy_registry, CurrentRamp, MapCell, MapOptions, PumpPolicy, Xi3Ramp};
pub use power_law::{rnr_power_law, PowerLaw};
pub use topology::{topology, topology_registry, Topology};

use crate::error::{require, Error, Result};
use crate::material::{pump_coefficients, KineticInductorModel, PumpOperatingPoint};
use crate::netcore::TransmissionLineSegment;

#[derive(Debug, Clone)]
pub struct DesignSpec {
    pub topology: Arc<dyn Topology>,
    pub z0: f64,
    pub line_quarter: TransmissionLineSegment,
    pub line_half: TransmissionLineSegment,
    pub line_ki_quarter: Option<TransmissionLineSegment>,
    pub c_shunt: f64,
    pub ki_model: KineticInductorModel,
    /// Design frequency (rad/s) fixing the line lengths.
    pub f0: f64,
}

impl DesignSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        topology_name: &str,
        z0: f64,
        z_quarter: f64,
        z_half: f64,
        z_ki: Option<f64>,
        c_shunt: f64,
        ki_model: KineticInductorModel,
        f0: f64,
    ) -> Result<Self> {
        let topology = topology(topology_name)?;
        require(z0 > 0.0, || format!("z0 must be > 0, got {z0}"))?;
        require(c_shunt > 0.0, || format!("c_shunt must be > 0, got {c_shunt}"))?;
        let line_ki_quarter = if topology.uses_ki_line() {
            let z = z_ki.ok_or_else(|| Error::InvalidParameter("three-stage circuit needs z_ki".into()))?;
            Some(TransmissionLineSegment::quarter(z, f0)?)
        } else {
            None
        };
        topology::check_ki_line(topology.as_ref(), line_ki_quarter.is_some())?;
        ki_model.validate()?;
        Ok(Self {
            topology,
            z0,
            line_quarter: TransmissionLineSegment::quarter(z_quarter, f0)?,
            line_half: TransmissionLineSegment::half(z_half, f0)?,
            line_ki_quarter,
            c_shunt,
            ki_model,
            f0,
        })
    }

    /// Three-stage design with a bias-independent inductor of impedance z_nr.
    pub fn three_stage_from_values(z0: f64, z_quarter: f64, z_half: f64, z_ki: f64, z_nr: f64, c_shunt: f64, f0: f64) -> Result<Self> {
        Self::new("three-stage", z0, z_quarter, z_half, Some(z_ki), c_shunt, fixed_inductor(z_nr * z_nr * c_shunt)?, f0)
    }

    /// Design whose resonator (impedance z_nr) resonates at the design frequency.
    pub fn resonant_at_f0(topology_name: &str, z0: f64, z_quarter: f64, z_half: f64, z_ki: f64, z_nr: f64, f0: f64) -> Result<Self> {
        require(z_nr > 0.0, || format!("z_nr must be > 0, got {z_nr}"))?;
        let c = 1.0 / (f0 * z_nr);
        let l = z_nr / f0;
        Self::new(topology_name, z0, z_quarter, z_half, Some(z_ki), c, fixed_inductor(l)?, f0)
    }

    pub fn ladder(&self) -> Vec<TransmissionLineSegment> {
        self.topology.ladder(self)
    }

    pub fn inductance(&self, i_dc: f64) -> Result<f64> {
        self.ki_model.total_inductance(i_dc)
    }

    /// Unpumped resonator frequency (rad/s) at bias `i_dc`.
    pub fn omega_nr(&self, i_dc: f64) -> Result<f64> {
        Ok(1.0 / (self.inductance(i_dc)? * self.c_shunt).sqrt())
    }
}

/// A linear inductor modelled as a kinetic inductor with negligible nonlinearity.
pub fn fixed_inductor(l: f64) -> Result<KineticInductorModel> {
    KineticInductorModel::parabolic(l, 0.0, 1e6, 1e5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnvCoupling {
    /// Environment on the signal branch; idler sees the flat z0.
    #[default]
    SignalOnly,
    Both,
    IdlerOnly,
}

impl std::str::FromStr for EnvCoupling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "signal" | "signal-only" => Ok(Self::SignalOnly),
            "both" => Ok(Self::Both),
            "idler" | "idler-only" => Ok(Self::IdlerOnly),
            _ => Err(Error::InvalidParameter(format!("unknown environment coupling '{s}' (signal-only, both, idler-only)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvTerm {
    pub z: f64,
    pub tau: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentModel {
    pub z0: f64,
    pub terms: Vec<EnvTerm>,
    pub coupling: EnvCoupling,
}

impl EnvironmentModel {
    pub fn ideal(z0: f64) -> Self {
        Self { z0, terms: Vec::new(), coupling: EnvCoupling::default() }
    }

    pub fn is_ideal(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn impedance(&self, omega: f64) -> Result<Complex64> {
        environment_impedance(self, omega)
    }

    fn source_for_signal(&self, omega: f64) -> Result<Complex64> {
        match self.coupling {
            EnvCoupling::SignalOnly | EnvCoupling::Both => self.impedance(omega),
            EnvCoupling::IdlerOnly => Ok(Complex64::new(self.z0, 0.0)),
        }
    }
}

pub fn environment_impedance(env: &EnvironmentModel, omega: f64) -> Result<Complex64> {
    require(omega >= 0.0, || format!("omega must be >= 0, got {omega}"))?;
    require(env.z0 > 0.0, || format!("environment z0 must be > 0, got {}", env.z0))?;
    let z = env
        .terms
        .iter()
        .fold(Complex64::new(env.z0, 0.0), |acc, t| acc + Complex64::from_polar(t.z, omega * t.tau + t.phi));
    if z.re <= 0.0 {
        return Err(Error::UnphysicalEnvironment { re: z.re, omega });
    }
    Ok(z)
}

/// Pump state as seen by the simulator: total unmodulated inductance and
/// modulation strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpDrive {
    pub l0: f64,
    pub alpha: f64,
    pub phase: f64,
    pub omega_p: f64,
    /// |xi3| referenced to the unpumped resonator frequency.
    pub xi3: f64,
}

impl PumpDrive {
    pub fn from_operating_point(design: &DesignSpec, op: &PumpOperatingPoint) -> Result<Self> {
        let l0 = design.inductance(op.i_dc)?;
        let w_nr = 1.0 / (l0 * design.c_shunt).sqrt();
        let pc = pump_coefficients(&design.ki_model, op, w_nr)?;
        let alpha = pc.delta_l.norm_sqr() / (4.0 * l0 * l0);
        Ok(Self { l0, alpha, phase: pc.delta_l.arg(), omega_p: op.omega_p, xi3: 2.0 * alpha.sqrt() * w_nr })
    }

    pub fn from_xi3(design: &DesignSpec, i_dc: f64, xi3: f64, phase: f64, omega_p: f64) -> Result<Self> {
        require(xi3 >= 0.0, || format!("|xi3| must be >= 0, got {xi3}"))?;
        let l0 = design.inductance(i_dc)?;
        let w_nr = 1.0 / (l0 * design.c_shunt).sqrt();
        let alpha = (xi3 / w_nr).powi(2) / 4.0;
        require(alpha < 1.0, || format!("|xi3| = {xi3:e} rad/s gives alpha = {alpha} >= 1"))?;
        Ok(Self { l0, alpha, phase, omega_p, xi3 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainProfile {
    /// rad/s, strictly increasing.
    pub freqs: Vec<f64>,
    pub s11: Vec<Complex64>,
    /// +inf marks the oscillation threshold.
    pub gain_db: Vec<f64>,
}

impl GainProfile {
    pub fn max_gain_db(&self) -> f64 {
        self.gain_db.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Frequencies start + k*step up to stop (inclusive within half a step), in the input unit.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    require(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite(), || {
        format!("bad grid {start}:{stop}:{step}")
    })?;
    let n = ((stop - start) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// Grid in rad/s centred on omega_p/2, given half-span and step in Hz.
pub fn centred_grid(omega_p: f64, half_span_hz: f64, step_hz: f64) -> Result<Vec<f64>> {
    let fc = omega_p / TAU / 2.0;
    let n = (half_span_hz / step_hz + 0.5).floor() as i64;
    require(step_hz > 0.0 && n >= 1, || "grid step must be > 0 and smaller than the span".into())?;
    Ok((-n..=n).map(|k| TAU * (fc + k as f64 * step_hz)).collect())
}

pub fn gain_spectrum(design: &DesignSpec, op: &PumpOperatingPoint, env: &EnvironmentModel, freqs: &[f64]) -> Result<GainProfile> {
    let drive = PumpDrive::from_operating_point(design, op)?;
    Evaluator::new(design, env, op.omega_p, freqs)?.profile(&drive)
}

pub fn gain_spectrum_xi3(design: &DesignSpec, drive: &PumpDrive, env: &EnvironmentModel, freqs: &[f64]) -> Result<GainProfile> {
    Evaluator::new(design, env, drive.omega_p, freqs)?.profile(drive)
}
