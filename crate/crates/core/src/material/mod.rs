//! Kinetic-inductance material models and pump coefficients.

mod fit;
pub mod laws;

use std::sync::Arc;

use num_complex::Complex64;

pub use fit::{fit_ki_curve, parse_ki_csv, KiFit};
pub use laws::{law, law_registry, InductanceLaw};

use crate::error::{require, Result};
use crate::units::HBAR;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    IStar2,
    IStar4,
    IStarStar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentScales {
    pub i_star2: f64,
    pub i_star4: f64,
    pub i_star_star: f64,
    pub n_exp: f64,
}

impl Default for CurrentScales {
    fn default() -> Self {
        Self { i_star2: f64::INFINITY, i_star4: f64::INFINITY, i_star_star: f64::INFINITY, n_exp: 2.21 }
    }
}

impl CurrentScales {
    pub fn get(&self, s: Scale) -> f64 {
        match s {
            Scale::IStar2 => self.i_star2,
            Scale::IStar4 => self.i_star4,
            Scale::IStarStar => self.i_star_star,
        }
    }

    pub fn set(&mut self, s: Scale, v: f64) {
        match s {
            Scale::IStar2 => self.i_star2 = v,
            Scale::IStar4 => self.i_star4 = v,
            Scale::IStarStar => self.i_star_star = v,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KineticInductorModel {
    pub law: Arc<dyn InductanceLaw>,
    pub l_k0: f64,
    pub l_geo: f64,
    pub scales: CurrentScales,
    pub i_c: f64,
}

impl KineticInductorModel {
    pub fn new(law_name: &str, l_k0: f64, l_geo: f64, scales: CurrentScales, i_c: f64) -> Result<Self> {
        let m = Self { law: law(law_name)?, l_k0, l_geo, scales, i_c };
        m.validate()?;
        Ok(m)
    }

    pub fn parabolic(l_k0: f64, l_geo: f64, i_star2: f64, i_c: f64) -> Result<Self> {
        Self::new("parabolic", l_k0, l_geo, CurrentScales { i_star2, ..Default::default() }, i_c)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.l_k0 >= 0.0 && self.l_geo >= 0.0, || "l_k0 and l_geo must be >= 0".into())?;
        require(self.l_k0 + self.l_geo > 0.0, || "total inductance must be > 0".into())?;
        for s in self.law.free_scales() {
            let v = self.scales.get(*s);
            require(v > 0.0, || format!("current scale {s:?} must be > 0, got {v}"))?;
        }
        require(self.scales.i_star2 > 0.0, || format!("i_star2 must be > 0, got {}", self.scales.i_star2))?;
        require(self.i_c > 0.0, || format!("i_c must be > 0, got {}", self.i_c))?;
        require(self.i_c < self.scales.i_star2, || {
            format!("i_c = {} must be below i_star2 = {}", self.i_c, self.scales.i_star2)
        })
    }

    pub fn total_inductance(&self, i_dc: f64) -> Result<f64> {
        Ok(kinetic_inductance(self, i_dc)? + self.l_geo)
    }
}

/// Kinetic part of the inductance at bias `i_dc` (geometric part excluded).
pub fn kinetic_inductance(model: &KineticInductorModel, i_dc: f64) -> Result<f64> {
    Ok(model.l_k0 * model.law.relative_inductance(&model.scales, i_dc)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpOperatingPoint {
    pub i_dc: f64,
    pub i_p_mag: f64,
    pub phi_p: f64,
    pub omega_p: f64,
}

impl PumpOperatingPoint {
    pub fn validate(&self, model: &KineticInductorModel) -> Result<()> {
        require(self.i_dc >= 0.0 && self.i_p_mag >= 0.0, || "i_dc and |I_p| must be >= 0".into())?;
        require(self.omega_p > 0.0, || format!("omega_p must be > 0, got {}", self.omega_p))?;
        require(self.i_dc + self.i_p_mag < model.i_c, || {
            format!("i_dc + |I_p| = {} A must stay below i_c = {} A", self.i_dc + self.i_p_mag, model.i_c)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpCoefficients {
    pub delta_l: Complex64,
    pub alpha: f64,
    pub xi3: Complex64,
    pub kerr: f64,
    pub pump_shift: f64,
    pub l_i: f64,
}

pub fn pump_coefficients(model: &KineticInductorModel, op: &PumpOperatingPoint, omega0: f64) -> Result<PumpCoefficients> {
    op.validate(model)?;
    let l_i = kinetic_inductance(model, op.i_dc)?;
    let is2 = model.scales.i_star2.powi(2);
    let idc = op.i_dc;
    let ip = op.i_p_mag;
    let den = is2 + idc * idc;
    let r = 1.5 * idc * ip / den;
    let delta_l = Complex64::from_polar(r * l_i, -op.phi_p);
    let xi3 = Complex64::from_polar(r * omega0, -op.phi_p) * -1.0;
    let kerr_factor = (8.0 * idc * idc - is2) / (den * den);
    Ok(PumpCoefficients {
        delta_l,
        alpha: delta_l.norm_sqr() / (4.0 * l_i * l_i),
        xi3,
        kerr: 0.75 * kerr_factor * HBAR * omega0 * omega0 / l_i,
        pump_shift: 1.5 * kerr_factor * omega0 * ip * ip,
        l_i,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xi3Bound {
    pub max_xi3: f64,
    pub optimal_ip_fraction: f64,
}

fn xi3_ratio(x: f64) -> f64 {
    1.5 * (1.0 - x) * x / (5.7 + (1.0 - x).powi(2))
}

/// Largest |xi3| reachable below the critical current.
pub fn xi3_upper_bound(i_c: f64, omega0: f64) -> Result<Xi3Bound> {
    require(i_c > 0.0, || format!("i_c must be > 0, got {i_c}"))?;
    let n = 1000;
    let k = (1..n).max_by(|&a, &b| xi3_ratio(a as f64 / n as f64).total_cmp(&xi3_ratio(b as f64 / n as f64))).unwrap();
    let (mut lo, mut hi) = ((k - 1) as f64 / n as f64, (k + 1) as f64 / n as f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    while hi - lo > 1e-12 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if xi3_ratio(a) > xi3_ratio(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(Xi3Bound { max_xi3: xi3_ratio(x) * omega0, optimal_ip_fraction: x })
}

/// External Q of a resonator loaded through an N-section stepped-impedance filter.
pub fn stepped_filter_qe(n_sections: u32, z_h: f64, z_l: f64, z0: f64, z_nr: f64) -> Result<f64> {
    require(n_sections >= 1, || "n_sections must be >= 1".into())?;
    require(z_h > 0.0 && z_l > 0.0 && z0 > 0.0 && z_nr > 0.0, || "impedances must be > 0".into())?;
    Ok((z_h / z_l).powi(2 * n_sections as i32) * std::f64::consts::PI * z0 / (4.0 * z_nr))
}
