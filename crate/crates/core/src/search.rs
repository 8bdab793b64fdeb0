//! Brute-force design-space search over transformer impedances, resonator
//! impedance and pump frequency.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{require, Result};
use crate::simulator::{best_over_ramp, centred_grid, DesignSpec, EnvironmentModel, Evaluator, PumpPolicy, QualifyOptions, Xi3Ramp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn single(v: f64) -> Self {
        Self { start: v, stop: v, step: 1.0 }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        require(self.step > 0.0 && self.stop >= self.start && self.start.is_finite(), || {
            format!("range {name} = {}:{}:{} is empty or has a non-positive step", self.start, self.stop, self.step)
        })
    }

    /// start + k*step for k = 0.. up to stop.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRanges {
    pub z_quarter: SweepRange,
    pub z_half: SweepRange,
    pub z_nr: SweepRange,
    /// Half the pump frequency, rad/s.
    pub omega_p_half: SweepRange,
    pub z_ki: f64,
    pub omega0: f64,
    pub z0: f64,
    pub circuit: String,
    pub ramp: Xi3Ramp,
    pub half_span_hz: f64,
    pub step_hz: f64,
    pub qualify: QualifyOptions,
}

impl SearchRanges {
    /// Desk-scale defaults: 10-ohm impedance steps, 0.25-GHz pump steps,
    /// 2-MHz frequency grid.
    pub fn desk_defaults(circuit: &str) -> Self {
        let z_nr = if circuit == "conventional" { SweepRange::new(1.0, 20.0, 1.0) } else { SweepRange::new(50.0, 100.0, 10.0) };
        Self {
            z_quarter: SweepRange::new(30.0, 100.0, 10.0),
            z_half: SweepRange::new(30.0, 100.0, 10.0),
            z_nr,
            omega_p_half: SweepRange::new(TAU * 7.5e9, TAU * 8.5e9, TAU * 0.25e9),
            z_ki: 150.0,
            omega0: TAU * 8e9,
            z0: 50.0,
            circuit: circuit.to_string(),
            ramp: Xi3Ramp::percent_steps(),
            half_span_hz: 1e9,
            step_hz: 2e6,
            qualify: QualifyOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.z_quarter.validate("z_quarter")?;
        self.z_half.validate("z_half")?;
        self.z_nr.validate("z_nr")?;
        self.omega_p_half.validate("omega_p_half")?;
        require(self.z_ki > 0.0 && self.omega0 > 0.0 && self.z0 > 0.0, || "z_ki, omega0 and z0 must be > 0".into())?;
        require(self.z_nr.start > 0.0 && self.z_quarter.start > 0.0 && self.z_half.start > 0.0, || "impedances must be > 0".into())?;
        require(self.step_hz > 0.0 && self.half_span_hz > self.step_hz, || "frequency grid step must be > 0 and below the span".into())
    }

    pub fn points(&self) -> Vec<DesignPoint> {
        let mut out = Vec::new();
        for &zq in &self.z_quarter.values() {
            for &zh in &self.z_half.values() {
                for &zn in &self.z_nr.values() {
                    for &wp2 in &self.omega_p_half.values() {
                        out.push(DesignPoint { z_quarter: zq, z_half: zh, z_nr: zn, omega_p_half: wp2 });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub z_quarter: f64,
    pub z_half: f64,
    pub z_nr: f64,
    pub omega_p_half: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRecord {
    pub params: DesignPoint,
    pub max_bandwidth: f64,
    pub optimal_xi3: f64,
    pub eta: f64,
    pub peak_count: usize,
    pub ripple_db: f64,
}

pub fn evaluate_point(ranges: &SearchRanges, p: &DesignPoint) -> Result<Option<DesignRecord>> {
    let design = DesignSpec::resonant_at_f0(&ranges.circuit, ranges.z0, p.z_quarter, p.z_half, ranges.z_ki, p.z_nr, ranges.omega0)?;
    let env = EnvironmentModel::ideal(ranges.z0);
    let omega_p = 2.0 * p.omega_p_half;
    let freqs = centred_grid(omega_p, ranges.half_span_hz, ranges.step_hz)?;
    let eval = Evaluator::new(&design, &env, omega_p, &freqs)?;
    let best = best_over_ramp(&eval, ranges.ramp.ramp(&design, 0.0, omega_p)?, &ranges.qualify)?;
    Ok(best.map(|b| DesignRecord {
        params: *p,
        max_bandwidth: b.report.bandwidth,
        optimal_xi3: b.drive.xi3,
        eta: b.report.bandwidth / b.drive.xi3,
        peak_count: b.report.peak_count,
        ripple_db: b.report.ripple_db,
    }))
}

/// Qualifying designs in lexicographic (z_quarter, z_half, z_nr, pump) order.
pub fn search_designs(ranges: &SearchRanges) -> Result<Vec<DesignRecord>> {
    ranges.validate()?;
    let points = ranges.points();
    let found: Vec<Result<Option<DesignRecord>>> = points.par_iter().map(|p| evaluate_point(ranges, p)).collect();
    let mut out = Vec::new();
    for r in found {
        if let Some(rec) = r? {
            if !(rec.eta > 0.0 && rec.eta < 1.0) {
                log::warn!("pump efficiency {} outside (0, 1) at {:?}", rec.eta, rec.params);
            }
            out.push(rec);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZnrStats {
    pub z_nr: f64,
    pub count: usize,
    pub mean_bandwidth: f64,
    pub std_bandwidth: f64,
    pub max_eta: f64,
    pub min_eta: f64,
    pub capacitance: f64,
}

/// Per-z_nr statistics (population standard deviation), ascending z_nr.
pub fn aggregate_by_znr(records: &[DesignRecord], omega0: f64) -> Vec<ZnrStats> {
    let mut sorted: Vec<&DesignRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.params.z_nr.total_cmp(&b.params.z_nr));
    sorted
        .chunk_by(|a, b| a.params.z_nr == b.params.z_nr)
        .map(|g| {
            let n = g.len() as f64;
            let mean = g.iter().map(|r| r.max_bandwidth).sum::<f64>() / n;
            let var = g.iter().map(|r| (r.max_bandwidth - mean).powi(2)).sum::<f64>() / n;
            let z = g[0].params.z_nr;
            ZnrStats {
                z_nr: z,
                count: g.len(),
                mean_bandwidth: mean,
                std_bandwidth: var.sqrt(),
                max_eta: g.iter().map(|r| r.eta).fold(f64::NEG_INFINITY, f64::max),
                min_eta: g.iter().map(|r| r.eta).fold(f64::INFINITY, f64::min),
                capacitance: 1.0 / (omega0 * z),
            }
        })
        .collect()
}

/// Resonator capacitance needed for a given bandwidth: C = 1/(omega0 Z_NR)
/// at the median Z_NR among records reaching `min_bandwidth` (rad/s).
pub fn capacitance_for_bandwidth(records: &[DesignRecord], omega0: f64, min_bandwidth: f64) -> Option<f64> {
    let mut z: Vec<f64> = records.iter().filter(|r| r.max_bandwidth >= min_bandwidth).map(|r| r.params.z_nr).collect();
    if z.is_empty() {
        return None;
    }
    z.sort_by(f64::total_cmp);
    let m = z.len();
    let median = if m % 2 == 1 { z[m / 2] } else { 0.5 * (z[m / 2 - 1] + z[m / 2]) };
    Some(1.0 / (omega0 * median))
}

/// Smallest and largest z_nr among records reaching `min_bandwidth` (rad/s).
pub fn znr_window(records: &[DesignRecord], min_bandwidth: f64) -> Option<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.max_bandwidth >= min_bandwidth)
        .map(|r| r.params.z_nr)
        .fold(None, |acc, z| Some(acc.map_or((z, z), |(lo, hi): (f64, f64)| (lo.min(z), hi.max(z)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(z_nr: f64, bw: f64, xi: f64) -> DesignRecord {
        DesignRecord {
            params: DesignPoint { z_quarter: 50.0, z_half: 50.0, z_nr, omega_p_half: 1.0 },
            max_bandwidth: bw,
            optimal_xi3: xi,
            eta: bw / xi,
            peak_count: 2,
            ripple_db: 1.0,
        }
    }

    #[test]
    fn range_values() {
        assert_eq!(SweepRange::new(30.0, 100.0, 10.0).values().len(), 8);
        assert_eq!(SweepRange::single(5.0).values(), vec![5.0]);
        assert!(SweepRange::new(1.0, 0.0, 1.0).validate("x").is_err());
        assert!(SweepRange::new(0.0, 1.0, 0.0).validate("x").is_err());
    }

    #[test]
    fn aggregate_single_and_groups() {
        let w0 = TAU * 8e9;
        let s = aggregate_by_znr(&[rec(60.0, 3.0, 10.0)], w0);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean_bandwidth, 3.0);
        assert_eq!(s[0].std_bandwidth, 0.0);
        assert!((s[0].capacitance - 1.0 / (w0 * 60.0)).abs() < 1e-30);
        let s = aggregate_by_znr(&[rec(70.0, 2.0, 10.0), rec(60.0, 1.0, 10.0), rec(70.0, 4.0, 10.0)], w0);
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].mean_bandwidth, 3.0);
        assert_eq!(s[1].std_bandwidth, 1.0);
        assert_eq!(s[1].max_eta, 0.4);
        assert_eq!(s[1].min_eta, 0.2);
        assert!(aggregate_by_znr(&[], w0).is_empty());
    }

    #[test]
    fn capacitance_median() {
        let w0 = 1.0;
        let r = [rec(5.0, 10.0, 1.0), rec(7.0, 10.0, 1.0), rec(9.0, 10.0, 1.0), rec(11.0, 1.0, 1.0)];
        assert_eq!(capacitance_for_bandwidth(&r, w0, 5.0), Some(1.0 / 7.0));
        assert_eq!(capacitance_for_bandwidth(&r, w0, 50.0), None);
        assert_eq!(znr_window(&r, 5.0), Some((5.0, 9.0)));
        assert_eq!(znr_window(&r, 0.0), Some((5.0, 11.0)));
        assert_eq!(znr_window(&r, 50.0), None);
    }

    #[test]
    fn tiny_ramp_cap_gives_no_records() {
        let mut r = SearchRanges::desk_defaults("three-stage");
        r.z_quarter = SweepRange::single(80.0);
        r.z_half = SweepRange::single(30.0);
        r.z_nr = SweepRange::single(60.0);
        r.omega_p_half = SweepRange::single(TAU * 8e9);
        r.ramp.cap = Some(TAU * 1e6);
        assert!(search_designs(&r).unwrap().is_empty());
    }
}
