use nalgebra::DMatrix;

use super::KineticInductorModel;
use crate::error::{Error, Result};
use crate::lsq::{self, Problem};

#[derive(Debug, Clone)]
pub struct KiFit {
    pub model: KineticInductorModel,
    /// RMS of the fractional-frequency residuals.
    pub rms: f64,
    pub iterations: usize,
}

struct ShiftProblem<'a> {
    template: &'a KineticInductorModel,
    data: &'a [(f64, f64)],
    participation: f64,
}

impl ShiftProblem<'_> {
    fn scales(&self, p: &[f64]) -> super::CurrentScales {
        let mut s = self.template.scales;
        for (k, sc) in self.template.law.free_scales().iter().enumerate() {
            s.set(*sc, p[k].exp());
        }
        s
    }
}

impl Problem for ShiftProblem<'_> {
    fn n_params(&self) -> usize {
        self.template.law.free_scales().len()
    }

    fn residuals(&self, p: &[f64]) -> Option<Vec<f64>> {
        let s = self.scales(p);
        self.data
            .iter()
            .map(|&(i, d)| {
                let rel = self.template.law.relative_inductance(&s, i).ok()?;
                Some(-0.5 * self.participation * (rel - 1.0) - d)
            })
            .collect()
    }

    fn jacobian(&self, p: &[f64]) -> Option<DMatrix<f64>> {
        let s = self.scales(p);
        let n = self.n_params();
        let mut j = DMatrix::zeros(self.data.len(), n);
        for (row, &(i, _)) in self.data.iter().enumerate() {
            let g = self.template.law.log_scale_gradient(&s, i).ok()?;
            for k in 0..n {
                j[(row, k)] = -0.5 * self.participation * g[k];
            }
        }
        Some(j)
    }
}

/// Fits the free current scales of `template`'s law to frequency-shift data
/// `(i_dc, dw/w)`, using dw/w = -(1/2) dL_k / (L_k0 + L_geo).
pub fn fit_ki_curve(data: &[(f64, f64)], template: &KineticInductorModel) -> Result<KiFit> {
    if data.len() < 4 {
        return Err(Error::InsufficientData(format!("need >= 4 points, got {}", data.len())));
    }
    if data.iter().any(|(i, d)| !i.is_finite() || !d.is_finite()) {
        return Err(Error::InvalidParameter("non-finite data point".into()));
    }
    let participation = template.l_k0 / (template.l_k0 + template.l_geo);
    if participation <= 0.0 {
        return Err(Error::InvalidParameter("l_k0 must be > 0 to fit".into()));
    }
    let free = template.law.free_scales();
    if data.iter().all(|&(_, d)| d == 0.0) {
        let mut model = template.clone();
        for s in free {
            model.scales.set(*s, f64::INFINITY);
        }
        return Ok(KiFit { model, rms: 0.0, iterations: 0 });
    }

    let rel_data: Vec<(f64, f64)> = data.iter().map(|&(i, d)| (i, -2.0 * d / participation)).collect();
    let guess = template.law.initial_guess(&rel_data, &template.scales);
    let p0: Vec<f64> = guess.iter().map(|g| g.ln()).collect();
    let problem = ShiftProblem { template, data, participation };
    let sol = lsq::minimize(&problem, &p0, lsq::Options::default())?;
    let mut model = template.clone();
    model.scales = problem.scales(&sol.params);
    Ok(KiFit { model, rms: sol.rms, iterations: sol.iterations })
}

/// Parses `i_dc_A,dfrac` text with a header row.
pub fn parse_ki_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::InsufficientData("empty input".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["i_dc_A", "dfrac"] {
        return Err(Error::InvalidParameter(format!("expected header 'i_dc_A,dfrac', got '{header}'")));
    }
    lines
        .enumerate()
        .map(|(k, l)| {
            let mut it = l.split(',').map(|s| s.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(Error::InvalidParameter(format!("line {}: expected two numbers, got '{l}'", k + 2))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{kinetic_inductance, CurrentScales};

    fn synth(model: &KineticInductorModel, currents: &[f64]) -> Vec<(f64, f64)> {
        let p = model.l_k0 / (model.l_k0 + model.l_geo);
        currents
            .iter()
            .map(|&i| (i, -0.5 * p * (kinetic_inductance(model, i).unwrap() / model.l_k0 - 1.0)))
            .collect()
    }

    fn grid(max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| max * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn quartic_round_trip() {
        let truth = KineticInductorModel::new(
            "quartic",
            1e-9,
            0.2e-9,
            CurrentScales { i_star2: 3.25e-3, i_star4: 1.7e-3, ..Default::default() },
            1.2e-3,
        )
        .unwrap();
        let data = synth(&truth, &grid(1.15e-3, 24));
        let mut start = truth.clone();
        start.scales.i_star2 = 5e-3;
        start.scales.i_star4 = 5e-3;
        let fit = fit_ki_curve(&data, &start).unwrap();
        assert!((fit.model.scales.i_star2 / 3.25e-3 - 1.0).abs() < 1e-3);
        assert!((fit.model.scales.i_star4 / 1.7e-3 - 1.0).abs() < 1e-3);
        assert!(fit.rms < 1e-9);
    }

    #[test]
    fn clem_round_trip() {
        let truth = KineticInductorModel::new(
            "clem",
            1e-9,
            0.2e-9,
            CurrentScales { i_star2: 3.25e-3, i_star_star: 1.65e-3, n_exp: 2.21, ..Default::default() },
            1.6e-3,
        )
        .unwrap();
        let data = synth(&truth, &grid(1.15e-3, 24));
        let fit = fit_ki_curve(&data, &truth).unwrap();
        assert!((fit.model.scales.i_star_star / 1.65e-3 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn parabolic_round_trip_from_far_start() {
        let truth = KineticInductorModel::parabolic(0.6e-9, 0.2e-9, 1.0e-3, 0.9e-3).unwrap();
        let data = synth(&truth, &grid(0.8e-3, 10));
        let mut start = truth.clone();
        start.scales.i_star2 = 50e-3;
        start.i_c = 1e-3;
        let fit = fit_ki_curve(&data, &start).unwrap();
        assert!((fit.model.scales.i_star2 / 1.0e-3 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_data_gives_infinite_scale() {
        let m = KineticInductorModel::parabolic(1e-9, 0.0, 3e-3, 1e-3).unwrap();
        let data: Vec<_> = grid(1e-3, 6).into_iter().map(|i| (i, 0.0)).collect();
        let fit = fit_ki_curve(&data, &m).unwrap();
        assert!(fit.model.scales.i_star2.is_infinite());
    }

    #[test]
    fn too_few_points() {
        let m = KineticInductorModel::parabolic(1e-9, 0.0, 3e-3, 1e-3).unwrap();
        assert!(matches!(fit_ki_curve(&[(0.0, 0.0); 3], &m), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn csv_parsing() {
        let d = parse_ki_csv("i_dc_A,dfrac\n0.0,0\n1e-4, -2.5e-4\n").unwrap();
        assert_eq!(d, vec![(0.0, 0.0), (1e-4, -2.5e-4)]);
        assert!(parse_ki_csv("i,d\n0,0\n").is_err());
        assert!(parse_ki_csv("i_dc_A,dfrac\n0,x\n").is_err());
    }
}
