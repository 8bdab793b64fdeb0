use super::{DesignSpec, EnvironmentModel, PumpDrive};
use crate::error::{require, Error, Result};
use crate::pump::{effective_admittance, idler_admittance, negative_resistance, ModulatedInductor, SignalIdlerPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub exponent: f64,
    /// R_NR = prefactor * |xi3|^exponent, with |xi3| in rad/s.
    pub prefactor: f64,
    pub points_used: usize,
}

/// Least-squares fit of log R_NR against log |xi3| at the signal frequency
/// `omega_s` (typically omega_p/2).
pub fn rnr_power_law(
    design: &DesignSpec,
    env: &EnvironmentModel,
    xi3_grid: &[f64],
    omega_p: f64,
    omega_s: f64,
    i_dc: f64,
) -> Result<PowerLaw> {
    let (lo, hi) = xi3_grid.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    require(lo > 0.0 && hi / lo >= 10f64.sqrt(), || "xi3 grid must be positive and span at least half a decade".into())?;
    let pair = SignalIdlerPair::new(omega_s, omega_p)?;
    let y_idler = idler_admittance(design, env, pair.omega_i)?;
    let pts: Vec<(f64, f64)> = xi3_grid
        .iter()
        .filter_map(|&x| {
            let d = PumpDrive::from_xi3(design, i_dc, x, 0.0, omega_p).ok()?;
            let ind = ModulatedInductor::from_alpha(d.l0, d.alpha, d.phase).ok()?;
            let r = negative_resistance(effective_admittance(&ind, &pair, y_idler).ok()?).ok()?;
            Some((x.ln(), r.ln()))
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!("{} usable grid points, need 4", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let b = sxy / sxx;
    Ok(PowerLaw { exponent: b, prefactor: (my - b * mx).exp(), points_used: pts.len() })
}
