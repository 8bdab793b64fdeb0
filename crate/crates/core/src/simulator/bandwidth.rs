//! Bandwidth, peak and ripple extraction from gain profiles.

use super::GainProfile;

pub const PEAK_PROMINENCE_DB: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualifyOptions {
    pub threshold_db: f64,
    pub ripple_max_db: f64,
    pub require_two_peaks: bool,
    /// Pump ramps stop once the peak gain reaches this level.
    pub stop_gain_db: f64,
}

impl Default for QualifyOptions {
    fn default() -> Self {
        Self { threshold_db: 17.0, ripple_max_db: 5.0, require_two_peaks: true, stop_gain_db: 40.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    NoSpan,
    TooFewPeaks,
    Ripple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthReport {
    /// Width of the largest contiguous span above threshold, rad/s.
    pub bandwidth: f64,
    pub peak_frequencies: Vec<f64>,
    /// Gain at each entry of `peak_frequencies`.
    pub peak_gains_db: Vec<f64>,
    pub peak_count: usize,
    pub ripple_db: f64,
    pub threshold_db: f64,
    pub contiguous_span: (f64, f64),
    /// Grid points at the oscillation threshold (infinite gain).
    pub oscillation_points: usize,
    pub rejection: Option<Rejection>,
}

impl BandwidthReport {
    pub fn qualifies(&self) -> bool {
        self.rejection.is_none()
    }

    pub fn peaks_above(&self, level_db: f64) -> usize {
        self.peak_gains_db.iter().filter(|g| **g >= level_db).count()
    }
}

impl GainProfile {
    pub fn bandwidth(&self, opts: &QualifyOptions) -> BandwidthReport {
        bandwidth_report(&self.freqs, &self.gain_db, opts)
    }
}

/// Indices of local maxima with prominence >= `min_prominence`. A flat-topped
/// maximum is reported at its middle sample; end points are never peaks.
pub fn find_peaks(x: &[f64], min_prominence: f64) -> Vec<usize> {
    let n = x.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead + 1 < n && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                peaks.push((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    peaks.retain(|&p| prominence(x, p) >= min_prominence);
    peaks
}

/// Heights within this relative tolerance count as equal, so the twin
/// maxima of a symmetric profile get the same prominence whatever the
/// rounding noise.
const HEIGHT_RTOL: f64 = 1e-9;

fn prominence(x: &[f64], p: usize) -> f64 {
    let h = x[p];
    let top = h + HEIGHT_RTOL * h.abs().max(1.0);
    let mut left_min = h;
    for k in (0..=p).rev() {
        if x[k] > top {
            break;
        }
        left_min = left_min.min(x[k]);
    }
    let mut right_min = h;
    for &v in &x[p..] {
        if v > top {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

fn crossing(f0: f64, g0: f64, f1: f64, g1: f64, level: f64) -> f64 {
    if g1 == g0 {
        return f0;
    }
    f0 + (level - g0) * (f1 - f0) / (g1 - g0)
}

pub fn bandwidth_report(freqs: &[f64], gain_db: &[f64], opts: &QualifyOptions) -> BandwidthReport {
    let th = opts.threshold_db;
    let n = gain_db.len().min(freqs.len());
    let oscillation_points = gain_db.iter().filter(|g| **g == f64::INFINITY).count();
    let above = |k: usize| gain_db[k].is_finite() && gain_db[k] >= th;

    // (width, lo, hi, first index, last index)
    let mut best: Option<(f64, f64, f64, usize, usize)> = None;
    let mut k = 0;
    while k < n {
        if !above(k) {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < n && above(k + 1) {
            k += 1;
        }
        let end = k;
        let lo = if start > 0 && gain_db[start - 1].is_finite() {
            crossing(freqs[start - 1], gain_db[start - 1], freqs[start], gain_db[start], th)
        } else {
            freqs[start]
        };
        let hi = if end + 1 < n && gain_db[end + 1].is_finite() {
            crossing(freqs[end], gain_db[end], freqs[end + 1], gain_db[end + 1], th)
        } else {
            freqs[end]
        };
        if best.is_none_or(|b| hi - lo > b.0) {
            best = Some((hi - lo, lo, hi, start, end));
        }
        k += 1;
    }

    let finite: Vec<f64> = gain_db.iter().map(|g| if g.is_finite() { *g } else { f64::MAX }).collect();
    let peaks = find_peaks(&finite[..n], PEAK_PROMINENCE_DB);
    let peak_frequencies: Vec<f64> = peaks.iter().map(|&p| freqs[p]).collect();
    let peak_gains_db: Vec<f64> = peaks.iter().map(|&p| gain_db[p]).collect();

    let (bandwidth, span, ripple_db) = match best {
        Some((w, lo, hi, s, e)) => {
            let seg = &gain_db[s..=e];
            let mx = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mn = seg.iter().copied().fold(f64::INFINITY, f64::min);
            (w, (lo, hi), mx - mn)
        }
        None => (0.0, (0.0, 0.0), 0.0),
    };
    let rejection = if best.is_none() {
        Some(Rejection::NoSpan)
    } else if opts.require_two_peaks && peaks.len() < 2 {
        Some(Rejection::TooFewPeaks)
    } else if ripple_db > opts.ripple_max_db {
        Some(Rejection::Ripple)
    } else {
        None
    };
    BandwidthReport {
        bandwidth,
        peak_count: peaks.len(),
        peak_frequencies,
        peak_gains_db,
        ripple_db,
        threshold_db: th,
        contiguous_span: span,
        oscillation_points,
        rejection,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| k as f64).collect()
    }

    #[test]
    fn plateau() {
        let f = grid(101);
        let g: Vec<f64> = f.iter().map(|&x| if (30.0..=70.0).contains(&x) { 20.0 } else { 0.0 }).collect();
        let r = bandwidth_report(&f, &g, &QualifyOptions { require_two_peaks: false, ..Default::default() });
        // crossings interpolate 3/20 of a step beyond each edge sample
        assert!((r.bandwidth - 40.3).abs() < 1e-12, "{}", r.bandwidth);
        assert_eq!(r.ripple_db, 0.0);
        assert_eq!(r.peak_count, 1);
        assert!(r.qualifies());
    }

    #[test]
    fn lorentzian_rejected_when_two_peaks_required() {
        let f = grid(401);
        let g: Vec<f64> = f.iter().map(|&x| 10.0 * (100.0 / (1.0 + ((x - 200.0) / 30.0).powi(2))).log10()).collect();
        let r = bandwidth_report(&f, &g, &QualifyOptions::default());
        assert_eq!(r.peak_count, 1);
        assert_eq!(r.rejection, Some(Rejection::TooFewPeaks));
        // 17 dB crossing of a 20 dB Lorentzian: |x - 200| = 30 sqrt(100/10^1.7 - 1)
        let half = 30.0 * (100.0 / 10f64.powf(1.7) - 1.0).sqrt();
        assert!((r.bandwidth - 2.0 * half).abs() < 0.05);
    }

    #[test]
    fn two_lobes_and_ripple() {
        let f = grid(401);
        let lor = |x: f64, c: f64| 100.0 / (1.0 + ((x - c) / 20.0).powi(2));
        let g: Vec<f64> = f.iter().map(|&x| 10.0 * (lor(x, 170.0) + lor(x, 230.0)).log10()).collect();
        let r = bandwidth_report(&f, &g, &QualifyOptions::default());
        assert_eq!(r.peak_count, 2);
        assert!(r.ripple_db > 0.5 && r.ripple_db < 5.0, "{}", r.ripple_db);
        assert!(r.qualifies());
        let tight = QualifyOptions { ripple_max_db: 0.1, ..Default::default() };
        assert_eq!(bandwidth_report(&f, &g, &tight).rejection, Some(Rejection::Ripple));
    }

    #[test]
    fn nothing_above_threshold() {
        let f = grid(10);
        let r = bandwidth_report(&f, &[1.0; 10], &QualifyOptions::default());
        assert_eq!(r.bandwidth, 0.0);
        assert_eq!(r.rejection, Some(Rejection::NoSpan));
    }

    #[test]
    fn oscillation_points_split_spans() {
        let f = grid(11);
        let mut g = vec![20.0; 11];
        g[3] = f64::INFINITY;
        let r = bandwidth_report(&f, &g, &QualifyOptions { require_two_peaks: false, ..Default::default() });
        assert_eq!(r.oscillation_points, 1);
        assert_eq!(r.contiguous_span, (4.0, 10.0));
    }

    #[test]
    fn prominence_filter() {
        let x = [0.0, 1.0, 0.8, 1.1, 0.0, 3.0, 0.0];
        assert_eq!(find_peaks(&x, 0.5), vec![3, 5]);
        assert_eq!(find_peaks(&x, 0.1), vec![1, 3, 5]);
        assert_eq!(find_peaks(&[0.0, 2.0, 2.0, 2.0, 0.0], 0.5), vec![2]);
    }

    #[test]
    fn twin_peaks_ignore_rounding() {
        // a shallow dip between equal maxima; either twin may be a hair higher
        let x = [0.0, 5.0, 4.9, 5.0, 0.0];
        assert_eq!(find_peaks(&x, 0.5), vec![1, 3]);
        let y = [0.0, 5.0 + 3e-14, 4.9, 5.0, 0.0];
        assert_eq!(find_peaks(&y, 0.5), vec![1, 3]);
        let z = [0.0, 5.0, 4.9, 5.0 + 3e-14, 0.0];
        assert_eq!(find_peaks(&z, 0.5), vec![1, 3]);
        // a genuinely higher neighbour still limits the prominence
        assert_eq!(find_peaks(&[0.0, 5.0, 4.9, 5.2, 0.0], 0.5), vec![3]);
    }
}
