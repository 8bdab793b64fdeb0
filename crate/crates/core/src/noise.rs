//! Noise-cascade algebra and qubit-saturation calibration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{require, Error, Result};
use crate::lsq::{self, Problem};
use crate::units::{HBAR, K_B};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChainModel {
    pub a_in: f64,
    pub a_23: f64,
    pub n_t23: f64,
    pub g_s: f64,
    pub g_sys: f64,
    pub n_sys: f64,
    pub n1: f64,
}

impl NoiseChainModel {
    pub fn validate(&self) -> Result<()> {
        require(self.a_in > 0.0 && self.a_in <= 1.0, || format!("a_in must be in (0, 1], got {}", self.a_in))?;
        require(self.a_23 >= 0.0 && self.a_23 <= 1.0, || format!("a_23 must be in [0, 1], got {}", self.a_23))?;
        require(self.g_s > 0.0 && self.g_sys > 0.0, || "gains must be > 0".into())?;
        require(self.n1 >= 0.5, || format!("n1 must be >= 0.5, got {}", self.n1))?;
        require(self.n_t23 >= 0.0 && self.n_sys >= 0.0, || "noise numbers must be >= 0".into())
    }

    pub fn g_sys_eff(&self) -> f64 {
        self.a_23 * self.g_sys
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeNoise {
    pub n2: f64,
    pub n3: f64,
    pub n4: f64,
}

pub fn cascade_forward(chain: &NoiseChainModel, n_a: f64) -> Result<CascadeNoise> {
    chain.validate()?;
    let n2 = chain.g_s * (chain.n1 + n_a);
    let n3 = chain.a_23 * n2 + (1.0 - chain.a_23) * chain.n_t23;
    let n4 = chain.g_sys * (n3 + chain.n_sys);
    Ok(CascadeNoise { n2, n3, n4 })
}

/// Output noise with the amplifier off (it then reflects n1 unchanged).
pub fn cascade_pump_off(chain: &NoiseChainModel) -> Result<CascadeNoise> {
    cascade_forward(&NoiseChainModel { g_s: 1.0, ..*chain }, 0.0)
}

pub fn added_noise(n4: f64, n4_off: f64, g_s: f64, g_sys_eff: f64, n1: f64) -> Result<f64> {
    if !(g_s > 1.0) {
        return Err(Error::InvalidGain(format!("amplifier gain must exceed 1, got {g_s}")));
    }
    require(g_sys_eff > 0.0, || format!("g_sys_eff must be > 0, got {g_sys_eff}"))?;
    Ok((n4 - n4_off) / (g_s * g_sys_eff) + n1 / g_s - n1)
}

pub fn bose_occupation(temperature: f64, omega: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

pub fn excess_noise(q_e: f64, q_i: f64, g_s: f64, temperature: f64, omega: f64) -> Result<f64> {
    require(q_i > 0.0, || format!("q_i must be > 0, got {q_i}"))?;
    if !(g_s > 1.0) {
        return Err(Error::InvalidGain(format!("amplifier gain must exceed 1, got {g_s}")));
    }
    let n_th = bose_occupation(temperature, omega);
    let root = g_s.sqrt() + 1.0;
    Ok(q_e / (2.0 * q_i) * root * root / (g_s - 1.0) * (2.0 * n_th + 1.0) + n_th)
}

pub fn snr_gain(p_n4: f64, p_n4_off: f64, g_s: f64) -> Result<f64> {
    require(p_n4 > 0.0 && p_n4_off > 0.0, || "noise powers must be > 0".into())?;
    Ok(g_s * p_n4_off / p_n4)
}

pub fn system_noise_temperature(n4_off: f64, omega: f64, g_sys_eff: f64) -> Result<f64> {
    require(n4_off > 0.0 && omega > 0.0 && g_sys_eff > 0.0, || "inputs must be > 0".into())?;
    Ok(n4_off * HBAR * omega / (K_B * g_sys_eff))
}

/// Measured noise power (W) in a resolution bandwidth `b_m` (Hz) as quanta.
pub fn power_to_quanta(power: f64, omega: f64, b_m: f64) -> f64 {
    power / (HBAR * omega * b_m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitCalibration {
    pub omega_q: f64,
    pub gamma1e: f64,
    pub gamma1i: f64,
    pub gamma_phi: f64,
}

impl QubitCalibration {
    pub fn gamma1(&self) -> f64 {
        self.gamma1e + self.gamma1i
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma_phi + self.gamma1() / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        require(self.gamma1e > 0.0, || format!("gamma1e must be > 0, got {}", self.gamma1e))?;
        require(self.gamma1i >= 0.0 && self.gamma_phi >= 0.0, || "rates must be >= 0".into())
    }
}

pub fn qubit_s21(cal: &QubitCalibration, detuning: f64, omega_d: f64) -> Complex64 {
    let g2 = cal.gamma2();
    let x = detuning / g2;
    let num = Complex64::new(1.0, x);
    let den = 1.0 + x * x + omega_d * omega_d / (cal.gamma1() * g2);
    1.0 - cal.gamma1e / (2.0 * g2) * num / den
}

pub fn drive_strength(gamma1e: f64, p_d: f64, omega_q: f64) -> Result<f64> {
    require(gamma1e > 0.0 && p_d >= 0.0 && omega_q > 0.0, || "gamma1e, omega_q must be > 0 and p_d >= 0".into())?;
    Ok((2.0 * gamma1e * p_d / (HBAR * omega_q)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSample {
    pub detuning: f64,
    /// Power at the instrument output, W.
    pub p_vna: f64,
    pub s21: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitFit {
    pub gamma1: f64,
    pub gamma_phi: f64,
    /// Drive strength at `p_ref`.
    pub omega_d_ref: f64,
    pub p_ref: f64,
    /// Input-line attenuation p_d / p_vna (power ratio).
    pub a_in: f64,
    pub rms: f64,
    pub iterations: usize,
}

struct SaturationProblem<'a> {
    data: &'a [QubitSample],
    p_ref: f64,
}

/// S21 and its partial derivatives with respect to (ln g1, ln g_phi, ln W_ref),
/// with g1e = g1 and W^2 = W_ref^2 p/p_ref.
fn s21_with_gradient(g1: f64, gphi: f64, w2: f64, det: f64) -> (Complex64, [Complex64; 3]) {
    let g2 = gphi + g1 / 2.0;
    let u = g1 / (2.0 * g2);
    let n = Complex64::new(1.0, det / g2);
    let d = 1.0 + (det / g2).powi(2) + w2 / (g1 * g2);
    let s = 1.0 - u * n / d;
    // partials in (g1, g2) treated independently, then chained
    let du_dg1 = 1.0 / (2.0 * g2);
    let du_dg2 = -g1 / (2.0 * g2 * g2);
    let dn_dg2 = Complex64::new(0.0, -det / (g2 * g2));
    let dd_dg2 = -2.0 * det * det / g2.powi(3) - w2 / (g1 * g2 * g2);
    let dd_dg1 = -w2 / (g1 * g1 * g2);
    let dd_dw2 = 1.0 / (g1 * g2);
    let ds_du = -n / d;
    let ds_dn = -u / d;
    let ds_dd = u * n / (d * d);
    let ds_dg2 = ds_du * du_dg2 + ds_dn * dn_dg2 + ds_dd * dd_dg2;
    let ds_dg1_explicit = ds_du * du_dg1 + ds_dd * dd_dg1;
    // g2 = gphi + g1/2
    let ds_dg1 = ds_dg1_explicit + ds_dg2 * 0.5;
    let ds_dgphi = ds_dg2;
    let ds_dw2 = ds_dd * dd_dw2;
    (s, [ds_dg1 * g1, ds_dgphi * gphi, ds_dw2 * 2.0 * w2])
}

impl SaturationProblem<'_> {
    fn unpack(&self, p: &[f64], sample: &QubitSample) -> (f64, f64, f64) {
        let w2 = (2.0 * p[2]).exp() * sample.p_vna / self.p_ref;
        (p[0].exp(), p[1].exp(), w2)
    }
}

impl Problem for SaturationProblem<'_> {
    fn n_params(&self) -> usize {
        3
    }

    fn residuals(&self, p: &[f64]) -> Option<Vec<f64>> {
        let mut r = Vec::with_capacity(2 * self.data.len());
        for s in self.data {
            let (g1, gphi, w2) = self.unpack(p, s);
            let (m, _) = s21_with_gradient(g1, gphi, w2, s.detuning);
            let e = m - s.s21;
            r.push(e.re);
            r.push(e.im);
        }
        r.iter().all(|x| x.is_finite()).then_some(r)
    }

    fn jacobian(&self, p: &[f64]) -> Option<DMatrix<f64>> {
        let mut j = DMatrix::zeros(2 * self.data.len(), 3);
        for (k, s) in self.data.iter().enumerate() {
            let (g1, gphi, w2) = self.unpack(p, s);
            let (_, g) = s21_with_gradient(g1, gphi, w2, s.detuning);
            for c in 0..3 {
                j[(2 * k, c)] = g[c].re;
                j[(2 * k + 1, c)] = g[c].im;
            }
        }
        Some(j)
    }
}

/// Joint fit of decay, dephasing and drive strength (Omega^2 proportional to
/// the instrument power) assuming gamma1 = gamma1e.
pub fn fit_qubit_saturation(data: &[QubitSample], omega_q: f64) -> Result<QubitFit> {
    let mut powers: Vec<f64> = data.iter().map(|s| s.p_vna).collect();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    let mut detunings: Vec<f64> = data.iter().map(|s| s.detuning).collect();
    detunings.sort_by(f64::total_cmp);
    detunings.dedup();
    if powers.len() < 2 || detunings.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "need >= 2 powers and >= 5 detunings, got {} and {}",
            powers.len(),
            detunings.len()
        )));
    }
    require(omega_q > 0.0 && powers[0] > 0.0, || "omega_q and powers must be > 0".into())?;
    let contrast = data.iter().map(|s| (1.0 - s.s21).norm()).fold(0.0, f64::max);
    if contrast < 1e-9 {
        return Err(Error::FitFailure { iterations: 0, cost: 0.0, reason: "no resonance contrast: parameters unidentifiable".into() });
    }

    // Starting point from the weakest-power trace: depth and half width.
    let p_ref = powers[0];
    let weak: Vec<&QubitSample> = data.iter().filter(|s| s.p_vna == p_ref).collect();
    let deepest = weak.iter().max_by(|a, b| (1.0 - a.s21).re.total_cmp(&(1.0 - b.s21).re)).unwrap();
    let depth = (1.0 - deepest.s21).re.clamp(0.05, 1.0);
    let half_level = depth / 2.0;
    let width = weak
        .iter()
        .filter(|s| (1.0 - s.s21).re >= half_level)
        .map(|s| (s.detuning - deepest.detuning).abs())
        .fold(0.0, f64::max)
        .max((detunings[1] - detunings[0]).abs());
    // depth = g1/(2 g2) for a weak drive; half width of the absorption ~ g2
    let g2 = width;
    let g1 = (2.0 * g2 * depth).min(2.0 * g2 * 0.999);
    let gphi = (g2 - g1 / 2.0).max(1e-3 * g2);
    let w_ref = 0.1 * (g1 * g2).sqrt();
    let mut best: Option<lsq::Solution> = None;
    let mut last_err = None;
    for scale in [1.0, 10.0, 0.1, 100.0] {
        let p0 = [g1.ln(), gphi.ln(), (w_ref * scale).ln()];
        match lsq::minimize(&SaturationProblem { data, p_ref }, &p0, lsq::Options::default()) {
            Ok(sol) => {
                if best.as_ref().is_none_or(|b| sol.cost < b.cost) {
                    best = Some(sol);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let sol = best.ok_or_else(|| last_err.unwrap())?;
    let gamma1 = sol.params[0].exp();
    let omega_d_ref = sol.params[2].exp();
    let p_d = omega_d_ref * omega_d_ref * HBAR * omega_q / (2.0 * gamma1);
    Ok(QubitFit {
        gamma1,
        gamma_phi: sol.params[1].exp(),
        omega_d_ref,
        p_ref,
        a_in: p_d / p_ref,
        rms: sol.rms,
        iterations: sol.iterations,
    })
}
