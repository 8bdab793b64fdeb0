//! Named parameter sets.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::material::KineticInductorModel;
use crate::search::SearchRanges;
use crate::simulator::{DesignSpec, EnvCoupling, EnvTerm, EnvironmentModel};
use crate::synthesis::PrototypeCoefficients;

pub const DESIGN_PRESETS: &[&str] = &["paper-device"];
pub const ENV_PRESETS: &[&str] = &["ideal", "paper-env"];
pub const SYNTH_PRESETS: &[&str] = &["appendixB-worked"];
pub const SEARCH_PRESETS: &[&str] = &["appendixE-ranges", "appendixE-conventional"];
pub const PROTOTYPE_PRESETS: &[&str] = &["getsinger-17dB"];

/// A fabricated-device design together with its nominal operating point.
#[derive(Debug, Clone)]
pub struct DevicePreset {
    pub design: DesignSpec,
    pub i_dc: f64,
    pub omega_p: f64,
}

/// Z_NR = 56 ohm, C = 330 fF, lines of 80/30/180 ohm designed at 8 GHz.
///
/// The inductor is an effective parabolic law: 0.2 nH geometric inductance,
/// zero-bias resonance at 9.6 GHz, and I*2 chosen so that the total
/// inductance equals Z_NR^2 C at the nominal 0.57 mA bias.
pub fn paper_device() -> Result<DevicePreset> {
    let (z_nr, c) = (56.0, 330e-15);
    let l_geo = 0.2e-9;
    let i_dc = 0.57e-3;
    let l_zero = 1.0 / ((TAU * 9.6e9).powi(2) * c);
    let l_k0 = l_zero - l_geo;
    let l_nom = z_nr * z_nr * c;
    let i_star2 = i_dc / ((l_nom - l_geo) / l_k0 - 1.0).sqrt();
    let model = KineticInductorModel::parabolic(l_k0, l_geo, i_star2, 0.95e-3)?;
    let design = DesignSpec::new("three-stage", 50.0, 80.0, 30.0, Some(180.0), c, model, TAU * 8e9)?;
    Ok(DevicePreset { design, i_dc, omega_p: TAU * 17.025e9 })
}

/// Two-term environment ripple fitted to the measured pump-off reflection.
pub fn paper_env() -> EnvironmentModel {
    EnvironmentModel {
        z0: 50.0,
        terms: vec![
            EnvTerm { z: 14.2, tau: 10.5e-9 / TAU, phi: -0.7 * PI },
            EnvTerm { z: 1.9, tau: 121e-9 / TAU, phi: 0.0 },
        ],
        coupling: EnvCoupling::SignalOnly,
    }
}

pub fn environment(name: &str) -> Result<EnvironmentModel> {
    match name {
        "ideal" => Ok(EnvironmentModel::ideal(50.0)),
        "paper-env" => Ok(paper_env()),
        _ => Err(unknown("environment", name, ENV_PRESETS)),
    }
}

pub fn design(name: &str) -> Result<DevicePreset> {
    match name {
        "paper-device" => paper_device(),
        _ => Err(unknown("design", name, DESIGN_PRESETS)),
    }
}

pub fn prototype(name: &str, eps: f64) -> Result<PrototypeCoefficients> {
    match name {
        "getsinger-17dB" => Ok(PrototypeCoefficients::getsinger_17db(eps)),
        _ => Err(unknown("prototype", name, PROTOTYPE_PRESETS)),
    }
}

/// Synthesis inputs of the worked example.
#[derive(Debug, Clone, Copy)]
pub struct SynthInputs {
    pub proto: PrototypeCoefficients,
    pub z_nr: f64,
    pub z_ki: f64,
    pub z0: f64,
}

pub fn appendix_b_worked() -> SynthInputs {
    SynthInputs { proto: PrototypeCoefficients::getsinger_17db(500.0 / 8000.0), z_nr: 60.0, z_ki: 180.0, z0: 50.0 }
}

pub fn search_ranges(name: &str) -> Result<SearchRanges> {
    match name {
        "appendixE-ranges" => Ok(SearchRanges::desk_defaults("three-stage")),
        "appendixE-conventional" => Ok(SearchRanges::desk_defaults("conventional")),
        _ => Err(unknown("search ranges", name, SEARCH_PRESETS)),
    }
}

fn unknown(kind: &'static str, name: &str, known: &[&str]) -> Error {
    Error::UnknownStrategy { kind, name: name.to_string(), known: known.join(", ") }
}
