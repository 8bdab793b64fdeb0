//! Frequency sweeps with the pump-independent parts of the network cached.

use num_complex::Complex64;

use super::bandwidth::{bandwidth_report, BandwidthReport, QualifyOptions};
use super::{DesignSpec, EnvironmentModel, GainProfile, PumpDrive};
use crate::error::{Error, Result};
use crate::netcore::{cascade, line_matrix, TwoPortMatrix};
use crate::pump::{idler_admittance, SignalIdlerPair};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// S11 = (p + q y) / (r + s y) in the node admittance y, folding the
/// port-to-node chain and the source together.
#[derive(Debug, Clone)]
struct Point {
    ws: f64,
    wi: f64,
    /// Conjugated idler admittance.
    y_idler_c: Complex64,
    y_cap: Complex64,
    p: Complex64,
    q: Complex64,
    r: Complex64,
    s: Complex64,
}

impl Point {
    fn new(ws: f64, wi: f64, y_idler_c: Complex64, y_cap: Complex64, m: &TwoPortMatrix, z_src: Complex64) -> Self {
        Self { ws, wi, y_idler_c, y_cap, p: m.a - z_src * m.c, q: m.b - z_src * m.d, r: m.a + z_src * m.c, s: m.b + z_src * m.d }
    }

    /// Node admittance, or None at the oscillation threshold.
    #[inline]
    fn y_node(&self, lp: f64, alpha: f64) -> Option<Complex64> {
        let den = I * self.wi * lp * self.y_idler_c - 1.0;
        let dn = den.norm_sqr();
        if dn == 0.0 {
            return None;
        }
        // (1 + alpha conj(den)/|den|^2) / (i ws lp)
        let num = 1.0 + den.conj() * (alpha / dn);
        Some(self.y_cap + Complex64::new(num.im, -num.re) / (self.ws * lp))
    }

    #[inline]
    fn s11(&self, lp: f64, alpha: f64) -> Complex64 {
        match self.y_node(lp, alpha) {
            None => Complex64::new(f64::INFINITY, 0.0),
            Some(y) => {
                let d = self.r + self.s * y;
                if d.norm_sqr() == 0.0 {
                    Complex64::new(f64::INFINITY, 0.0)
                } else {
                    (self.p + self.q * y) / d
                }
            }
        }
    }

    /// |S11|^2 without divisions by complex numbers.
    #[inline]
    fn power_gain(&self, lp: f64, alpha: f64) -> f64 {
        match self.y_node(lp, alpha) {
            None => f64::INFINITY,
            Some(y) => {
                let d = (self.r + self.s * y).norm_sqr();
                if d == 0.0 {
                    f64::INFINITY
                } else {
                    (self.p + self.q * y).norm_sqr() / d
                }
            }
        }
    }
}

/// Cached evaluation of one design, environment and pump frequency over a
/// frequency grid. Only the modulation strength changes between calls.
#[derive(Debug, Clone)]
pub struct Evaluator {
    freqs: Vec<f64>,
    points: Vec<Point>,
    omega_p: f64,
}

impl Evaluator {
    pub fn new(design: &DesignSpec, env: &EnvironmentModel, omega_p: f64, freqs: &[f64]) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::InvalidParameter("empty frequency grid".into()));
        }
        if freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("frequency grid must be strictly increasing".into()));
        }
        let ladder = design.ladder();
        let points = freqs
            .iter()
            .map(|&ws| {
                let pair = SignalIdlerPair::new(ws, omega_p)?;
                let y_idler = idler_admittance(design, env, pair.omega_i)?;
                let mats: Vec<TwoPortMatrix> = ladder.iter().map(|l| line_matrix(l, ws)).collect();
                let port_to_node = if mats.is_empty() { TwoPortMatrix::identity() } else { cascade(&mats)? };
                Ok(Point::new(ws, pair.omega_i, y_idler.conj(), I * ws * design.c_shunt, &port_to_node, env.source_for_signal(ws)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { freqs: freqs.to_vec(), points, omega_p })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    fn check(&self, drive: &PumpDrive) -> Result<()> {
        if drive.omega_p != self.omega_p {
            return Err(Error::InvalidParameter("drive pump frequency differs from the evaluator's".into()));
        }
        Ok(())
    }

    pub fn profile(&self, drive: &PumpDrive) -> Result<GainProfile> {
        self.check(drive)?;
        let lp = drive.l0 * (1.0 - drive.alpha);
        let s11: Vec<Complex64> = self.points.iter().map(|p| p.s11(lp, drive.alpha)).collect();
        let gain_db = s11.iter().map(|s| 20.0 * s.norm().log10()).collect();
        Ok(GainProfile { freqs: self.freqs.clone(), s11, gain_db })
    }

    /// Gain in dB only, written into `out`.
    pub fn gains_into(&self, drive: &PumpDrive, out: &mut Vec<f64>) -> Result<()> {
        self.power_gains_into(drive, out)?;
        to_db(out);
        Ok(())
    }

    /// Linear power gain |S11|^2, written into `out`.
    pub fn power_gains_into(&self, drive: &PumpDrive, out: &mut Vec<f64>) -> Result<()> {
        self.check(drive)?;
        let lp = drive.l0 * (1.0 - drive.alpha);
        out.clear();
        out.extend(self.points.iter().map(|p| p.power_gain(lp, drive.alpha)));
        Ok(())
    }
}

fn to_db(g: &mut [f64]) {
    for x in g.iter_mut() {
        *x = 10.0 * x.log10();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RampBest {
    pub report: BandwidthReport,
    pub drive: PumpDrive,
}

/// Walks a pump ramp, stopping once the peak gain reaches `opts.stop_gain_db`,
/// and keeps the widest qualifying profile (earliest on ties).
pub fn best_over_ramp(eval: &Evaluator, ramp: impl Iterator<Item = PumpDrive>, opts: &QualifyOptions) -> Result<Option<RampBest>> {
    let mut best: Option<RampBest> = None;
    let mut gains = Vec::with_capacity(eval.freqs.len());
    for drive in ramp {
        eval.power_gains_into(&drive, &mut gains)?;
        let max = 10.0 * gains.iter().copied().fold(f64::NEG_INFINITY, f64::max).log10();
        if max >= opts.threshold_db {
            to_db(&mut gains);
            let report = bandwidth_report(&eval.freqs, &gains, opts);
            if report.qualifies() && best.as_ref().is_none_or(|b| report.bandwidth > b.report.bandwidth) {
                best = Some(RampBest { report, drive });
            }
        }
        if max >= opts.stop_gain_db {
            break;
        }
    }
    Ok(best)
}
