//! Current-dependent kinetic-inductance laws.

use std::sync::{Arc, OnceLock};

use super::{CurrentScales, Scale};
use crate::error::{Error, Result};
use crate::registry::Registry;

pub trait InductanceLaw: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;

    /// L_k(I) / L_k0.
    fn relative_inductance(&self, scales: &CurrentScales, current: f64) -> Result<f64>;

    /// Scales adjusted when fitting, in parameter order.
    fn free_scales(&self) -> &'static [Scale];

    /// d(L_k/L_k0)/d(ln s) for each free scale s.
    fn log_scale_gradient(&self, scales: &CurrentScales, current: f64) -> Result<Vec<f64>>;

    /// Fit starting point for the free scales, from data `(I, L_k/L_k0 - 1)`.
    fn initial_guess(&self, data: &[(f64, f64)], template: &CurrentScales) -> Vec<f64>;
}

#[derive(Debug)]
pub struct Parabolic;

#[derive(Debug)]
pub struct Quartic;

#[derive(Debug)]
pub struct Clem;

fn linear_lsq_1(data: &[(f64, f64)], feature: impl Fn(f64) -> f64) -> f64 {
    let (num, den) = data.iter().fold((0.0, 0.0), |(n, d), &(i, y)| {
        let f = feature(i);
        (n + f * y, d + f * f)
    });
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

impl InductanceLaw for Parabolic {
    fn name(&self) -> &'static str {
        "parabolic"
    }

    fn relative_inductance(&self, s: &CurrentScales, i: f64) -> Result<f64> {
        Ok(1.0 + (i / s.i_star2).powi(2))
    }

    fn free_scales(&self) -> &'static [Scale] {
        &[Scale::IStar2]
    }

    fn log_scale_gradient(&self, s: &CurrentScales, i: f64) -> Result<Vec<f64>> {
        Ok(vec![-2.0 * (i / s.i_star2).powi(2)])
    }

    fn initial_guess(&self, data: &[(f64, f64)], t: &CurrentScales) -> Vec<f64> {
        let u = linear_lsq_1(data, |i| i * i);
        vec![if u > 0.0 { u.powf(-0.5) } else { t.i_star2 }]
    }
}

impl InductanceLaw for Quartic {
    fn name(&self) -> &'static str {
        "quartic"
    }

    fn relative_inductance(&self, s: &CurrentScales, i: f64) -> Result<f64> {
        Ok(1.0 + (i / s.i_star2).powi(2) + (i / s.i_star4).powi(4))
    }

    fn free_scales(&self) -> &'static [Scale] {
        &[Scale::IStar2, Scale::IStar4]
    }

    fn log_scale_gradient(&self, s: &CurrentScales, i: f64) -> Result<Vec<f64>> {
        Ok(vec![-2.0 * (i / s.i_star2).powi(2), -4.0 * (i / s.i_star4).powi(4)])
    }

    fn initial_guess(&self, data: &[(f64, f64)], t: &CurrentScales) -> Vec<f64> {
        // y = u I^2 + v I^4, solved by 2x2 normal equations
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(i, y) in data {
            let (f1, f2) = (i * i, i.powi(4));
            a11 += f1 * f1;
            a12 += f1 * f2;
            a22 += f2 * f2;
            b1 += f1 * y;
            b2 += f2 * y;
        }
        let det = a11 * a22 - a12 * a12;
        let (u, v) = if det.abs() > 0.0 { ((b1 * a22 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det) } else { (0.0, 0.0) };
        let s2 = if u > 0.0 { u.powf(-0.5) } else { t.i_star2 };
        let s4 = if v > 0.0 { v.powf(-0.25) } else { t.i_star4 };
        vec![s2, s4]
    }
}

impl InductanceLaw for Clem {
    fn name(&self) -> &'static str {
        "clem"
    }

    fn relative_inductance(&self, s: &CurrentScales, i: f64) -> Result<f64> {
        let x = (i.abs() / s.i_star_star).powf(s.n_exp);
        if x >= 1.0 {
            return Err(Error::SuperconductivityBreakdown { current: i.abs(), limit: s.i_star_star });
        }
        Ok((1.0 - x).powf(-1.0 / s.n_exp))
    }

    fn free_scales(&self) -> &'static [Scale] {
        &[Scale::IStarStar]
    }

    fn log_scale_gradient(&self, s: &CurrentScales, i: f64) -> Result<Vec<f64>> {
        let n = s.n_exp;
        let x = (i.abs() / s.i_star_star).powf(n);
        if x >= 1.0 {
            return Err(Error::SuperconductivityBreakdown { current: i.abs(), limit: s.i_star_star });
        }
        Ok(vec![-x * (1.0 - x).powf(-1.0 / n - 1.0)])
    }

    fn initial_guess(&self, data: &[(f64, f64)], t: &CurrentScales) -> Vec<f64> {
        // invert the law at the point with the largest shift; stays inside the pole
        let n = t.n_exp;
        match data.iter().filter(|d| d.1 > 0.0).max_by(|a, b| a.1.total_cmp(&b.1)) {
            Some(&(i, y)) => {
                let x = 1.0 - (1.0 + y).powf(-n);
                vec![i.abs() / x.powf(1.0 / n)]
            }
            None => vec![t.i_star_star],
        }
    }
}

pub fn law_registry() -> &'static Registry<dyn InductanceLaw> {
    static REG: OnceLock<Registry<dyn InductanceLaw>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn InductanceLaw> = Registry::new("inductance law");
        r.register("parabolic", Arc::new(Parabolic));
        r.register("quartic", Arc::new(Quartic));
        r.register("clem", Arc::new(Clem));
        r
    })
}

pub fn law(name: &str) -> Result<Arc<dyn InductanceLaw>> {
    law_registry().get(name)
}
