//! Signal/idler linearization of a pumped inductor.

use num_complex::Complex64;

use crate::error::{require, Error, Result};
use crate::netcore::{line_matrix, Impedance, TransmissionLineSegment};
use crate::simulator::{DesignSpec, EnvCoupling, EnvironmentModel};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulatedInductor {
    pub l0: f64,
    pub delta_l: Complex64,
}

impl ModulatedInductor {
    pub fn new(l0: f64, delta_l: Complex64) -> Result<Self> {
        let m = Self { l0, delta_l };
        require(l0 > 0.0 && l0.is_finite(), || format!("l0 must be > 0, got {l0}"))?;
        require(m.alpha() < 1.0, || format!("modulation strength alpha = {} must be < 1", m.alpha()))?;
        Ok(m)
    }

    /// Builds the inductor from a modulation strength and pump phase.
    pub fn from_alpha(l0: f64, alpha: f64, phase: f64) -> Result<Self> {
        require(alpha >= 0.0, || format!("alpha must be >= 0, got {alpha}"))?;
        Self::new(l0, Complex64::from_polar(2.0 * l0 * alpha.sqrt(), phase))
    }

    pub fn alpha(&self) -> f64 {
        self.delta_l.norm_sqr() / (4.0 * self.l0 * self.l0)
    }

    pub fn l0_prime(&self) -> f64 {
        self.l0 * (1.0 - self.alpha())
    }

    pub fn phase(&self) -> f64 {
        self.delta_l.arg()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalIdlerPair {
    pub omega_s: f64,
    pub omega_i: f64,
    pub omega_p: f64,
}

impl SignalIdlerPair {
    pub fn new(omega_s: f64, omega_p: f64) -> Result<Self> {
        let omega_i = omega_p - omega_s;
        require(omega_s > 0.0 && omega_i > 0.0, || {
            format!("need 0 < omega_s < omega_p, got omega_s = {omega_s}, omega_p = {omega_p}")
        })?;
        Ok(Self { omega_s, omega_i, omega_p })
    }
}

/// Impedance matrix in the (I_s, I_i*) basis.
pub fn signal_idler_impedance_matrix(ind: &ModulatedInductor, pair: &SignalIdlerPair) -> [[Complex64; 2]; 2] {
    let (ws, wi) = (pair.omega_s, pair.omega_i);
    [
        [I * ws * ind.l0, I * ws * ind.delta_l / 2.0],
        [-I * wi * ind.delta_l.conj() / 2.0, -I * wi * ind.l0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationInverter {
    pub j_s: Complex64,
    pub j_i: Complex64,
}

pub fn amplification_inverter(ind: &ModulatedInductor, pair: &SignalIdlerPair) -> Result<AmplificationInverter> {
    let alpha = ind.alpha();
    if alpha == 0.0 {
        return Err(Error::DegenerateInverter);
    }
    let lp = ind.l0_prime();
    let k = Complex64::from_polar(alpha.sqrt(), ind.phase());
    Ok(AmplificationInverter { j_s: k / (pair.omega_s * lp), j_i: k / (pair.omega_i * lp) })
}

/// Admittance at `omega` looking from the inductor node into a shunt
/// capacitor `c_shunt` backed by `lines` (ordered port-first) and the source.
pub fn ladder_admittance(lines: &[TransmissionLineSegment], c_shunt: f64, source: Impedance, omega: f64) -> Result<Complex64> {
    require(omega > 0.0, || format!("omega must be > 0, got {omega}"))?;
    let mut z = source;
    for line in lines {
        z = line_matrix(line, omega).input_impedance(z);
    }
    let y_chain = z.admittance()?;
    Ok(I * omega * c_shunt + y_chain)
}

/// Idler-frequency admittance of the mirrored network, excluding the inductor.
pub fn idler_admittance(design: &DesignSpec, env: &EnvironmentModel, omega_i: f64) -> Result<Complex64> {
    let source = match env.coupling {
        EnvCoupling::Both | EnvCoupling::IdlerOnly => env.impedance(omega_i)?,
        EnvCoupling::SignalOnly => Complex64::new(env.z0, 0.0),
    };
    ladder_admittance(&design.ladder(), design.c_shunt, source.into(), omega_i)
}

/// Pumped-inductor admittance at the signal frequency.
pub fn effective_admittance(ind: &ModulatedInductor, pair: &SignalIdlerPair, y_idler: Complex64) -> Result<Complex64> {
    let lp = ind.l0_prime();
    let den = I * pair.omega_i * lp * y_idler.conj() - 1.0;
    if den.norm() == 0.0 {
        return Err(Error::PoleAtOperatingPoint);
    }
    Ok((1.0 + ind.alpha() / den) / (I * pair.omega_s * lp))
}

pub fn negative_resistance(y_eff: Complex64) -> Result<f64> {
    if y_eff.re < 0.0 {
        Ok(-1.0 / y_eff.re)
    } else {
        Err(Error::NoGain(y_eff.re))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::DesignSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    const W8: f64 = TAU * 8e9;

    #[test]
    fn impedance_matrix_examples() {
        let pair = SignalIdlerPair::new(W8, 2.0 * W8).unwrap();
        let plain = ModulatedInductor::new(1e-9, c(0.0, 0.0)).unwrap();
        let z = signal_idler_impedance_matrix(&plain, &pair);
        assert_eq!(z[0][1], c(0.0, 0.0));
        assert_eq!(z[1][0], c(0.0, 0.0));
        assert!(rel(z[0][0], c(0.0, W8 * 1e-9)) < 1e-15);
        assert!(rel(z[1][1], c(0.0, -W8 * 1e-9)) < 1e-15);

        let ind = ModulatedInductor::new(1e-9, c(0.2e-9, 0.0)).unwrap();
        let z = signal_idler_impedance_matrix(&ind, &pair);
        assert!(rel(z[0][1], c(0.0, W8 * 1e-10)) < 1e-14);
        assert!(rel(z[1][0], c(0.0, -W8 * 1e-10)) < 1e-14);
        let det = z[0][0] * z[1][1] - z[0][1] * z[1][0];
        let want = pair.omega_s * pair.omega_i * ind.l0 * ind.l0_prime();
        assert!(rel(det, c(want, 0.0)) < 1e-14);
    }

    #[test]
    fn inverter_examples() {
        let pair = SignalIdlerPair::new(W8, TAU * 17e9).unwrap();
        // l0 (1 - alpha) = 0.99 nH
        let ind = ModulatedInductor::from_alpha(1e-9, 0.01, 0.0).unwrap();
        let j = amplification_inverter(&ind, &pair).unwrap();
        assert!(j.j_s.im.abs() < 1e-18 && j.j_s.re > 0.0 && j.j_i.re > 0.0);
        assert!(rel(j.j_s / j.j_i, c(pair.omega_i / pair.omega_s, 0.0)) < 1e-14);
        assert!((j.j_s.re - 0.1 / (W8 * 0.99e-9)).abs() / j.j_s.re < 1e-12, "{}", j.j_s.re);
        assert!((j.j_s.re - 2.01e-3).abs() < 0.01e-3);
        let plain = ModulatedInductor::new(1e-9, c(0.0, 0.0)).unwrap();
        assert_eq!(amplification_inverter(&plain, &pair), Err(Error::DegenerateInverter));
    }

    #[test]
    fn ladder_trivial_cases() {
        let y = ladder_admittance(&[], 0.0, Impedance::real(50.0), W8).unwrap();
        assert!(rel(y, c(0.02, 0.0)) < 1e-15);
        let y = ladder_admittance(&[], 330e-15, Impedance::Open, W8).unwrap();
        assert!(rel(y, c(0.0, W8 * 330e-15)) < 1e-15);
        assert!(ladder_admittance(&[], 0.0, Impedance::real(0.0), W8).is_err());
    }

    /// Node-elimination oracle: each line becomes its two-port Y parameters
    /// stamped into a nodal matrix; the source is a shunt conductance at the
    /// port node. The admittance seen from the inductor node is the Schur
    /// complement after eliminating every other node.
    fn nodal_admittance(lines: &[TransmissionLineSegment], c_shunt: f64, z_src: Complex64, w: f64) -> Complex64 {
        let n = lines.len() + 1; // node 0 = port, node n-1 = inductor node
        let mut y = vec![vec![c(0.0, 0.0); n]; n];
        y[0][0] += 1.0 / z_src;
        for (k, l) in lines.iter().enumerate() {
            let th = l.electrical_length(w);
            let y11 = -I / (l.z_c * th.tan());
            let y12 = I / (l.z_c * th.sin());
            y[k][k] += y11;
            y[k + 1][k + 1] += y11;
            y[k][k + 1] += y12;
            y[k + 1][k] += y12;
        }
        y[n - 1][n - 1] += I * w * c_shunt;
        // Gaussian elimination of nodes 0..n-1, keeping the last.
        for p in 0..n - 1 {
            let piv = y[p][p];
            for r in p + 1..n {
                let f = y[r][p] / piv;
                for col in p..n {
                    let v = y[p][col];
                    y[r][col] -= f * v;
                }
            }
        }
        y[n - 1][n - 1]
    }

    #[test]
    fn idler_admittance_matches_nodal_oracle() {
        let design = DesignSpec::three_stage_from_values(50.0, 80.0, 30.0, 180.0, 56.0, 330e-15, W8).unwrap();
        let env = EnvironmentModel::ideal(50.0);
        for f in [8.3e9, 7.4e9, 9.1e9] {
            let w = TAU * f;
            let y = idler_admittance(&design, &env, w).unwrap();
            let oracle = nodal_admittance(&design.ladder(), design.c_shunt, c(50.0, 0.0), w);
            assert!(rel(y, oracle) < 1e-10, "{y} vs {oracle}");
        }
    }

    /// Harmonic-balance oracle: solve the two-frequency circuit equations
    /// V = Z I with the idler current set by the idler network,
    /// I_i* = -Y_idler* V_i*, and return I_s / V_s.
    fn harmonic_balance(ind: &ModulatedInductor, pair: &SignalIdlerPair, y_idler: Complex64) -> Complex64 {
        let z = signal_idler_impedance_matrix(ind, pair);
        let yc = y_idler.conj();
        // unknowns x = [I_i*, V_i*] for unit I_s:
        //   V_i* - z22 I_i* = z21
        //   I_i* + yc V_i*  = 0
        let (a11, a12, b1) = (-z[1][1], c(1.0, 0.0), z[1][0]);
        let (a21, a22, b2) = (c(1.0, 0.0), yc, c(0.0, 0.0));
        let det = a11 * a22 - a12 * a21;
        let ii = (b1 * a22 - a12 * b2) / det;
        let vs = z[0][0] + z[0][1] * ii;
        1.0 / vs
    }

    #[test]
    fn effective_admittance_matches_harmonic_balance_on_ladders() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let nl = rng.gen_range(0..4);
            let lines: Vec<_> = (0..nl)
                .map(|_| TransmissionLineSegment::new(rng.gen_range(20.0..200.0), rng.gen_range(0.05..0.6), W8).unwrap())
                .collect();
            let cap = rng.gen_range(50e-15..1e-12);
            let ws = TAU * rng.gen_range(6e9..9e9);
            let wp = ws + TAU * rng.gen_range(6e9..9e9);
            let pair = SignalIdlerPair::new(ws, wp).unwrap();
            let ind = ModulatedInductor::from_alpha(rng.gen_range(0.3e-9..2e-9), rng.gen_range(0.0..0.2), rng.gen_range(-3.0..3.0)).unwrap();
            let yi = ladder_admittance(&lines, cap, Impedance::real(50.0), pair.omega_i).unwrap();
            let y = effective_admittance(&ind, &pair, yi).unwrap();
            let oracle = harmonic_balance(&ind, &pair, yi);
            assert!(rel(y, oracle) < 1e-9, "{y} vs {oracle}");
        }
    }

    #[test]
    fn effective_admittance_examples() {
        let pair = SignalIdlerPair::new(W8, 2.0 * W8).unwrap();
        let plain = ModulatedInductor::new(1e-9, c(0.0, 0.0)).unwrap();
        let y = effective_admittance(&plain, &pair, c(0.02, 0.0)).unwrap();
        assert!(rel(y, 1.0 / (I * W8 * 1e-9)) < 1e-14);

        let ind = ModulatedInductor::from_alpha(1e-9, 0.05, 0.3).unwrap();
        let y = effective_admittance(&ind, &pair, c(0.0, 0.0)).unwrap();
        assert!(y.re.abs() < 1e-18);
        assert!(rel(y, (1.0 - 0.05) / (I * W8 * ind.l0_prime())) < 1e-14);

        let ind = ModulatedInductor::from_alpha(1e-9 / 0.99, 0.01, 0.0).unwrap();
        let y = effective_admittance(&ind, &pair, c(0.02, 0.0)).unwrap();
        let lp = ind.l0_prime();
        let x = W8 * lp / 50.0;
        let closed = -0.01 * x / (W8 * lp * (1.0 + x * x));
        assert!((y.re - closed).abs() / closed.abs() < 1e-12);
        assert!((y.re + 9.95e-5).abs() < 0.05e-5);
        let r = negative_resistance(y).unwrap();
        assert!((r - 1.0e4).abs() < 0.06e4);
    }

    #[test]
    fn negative_resistance_examples() {
        assert!((negative_resistance(c(-1e-4, 3.0)).unwrap() - 1e4).abs() < 1e-9);
        let pair = SignalIdlerPair::new(W8, 2.0 * W8).unwrap();
        let plain = ModulatedInductor::new(1e-9, c(0.0, 0.0)).unwrap();
        let y = effective_admittance(&plain, &pair, c(0.02, 0.0)).unwrap();
        assert!(matches!(negative_resistance(y), Err(Error::NoGain(_))));
    }

    #[test]
    fn pole_is_reported() {
        let pair = SignalIdlerPair::new(W8, 2.0 * W8).unwrap();
        let ind = ModulatedInductor::from_alpha(1e-9, 0.0, 0.0).unwrap();
        // i w L Y* = 1  =>  Y* = -i / (w L)  =>  Y = i / (w L)
        let y = c(0.0, 1.0 / (W8 * 1e-9));
        assert_eq!(effective_admittance(&ind, &pair, y), Err(Error::PoleAtOperatingPoint));
    }

    #[test]
    fn sign_theorem_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let ws = TAU * rng.gen_range(4e9..12e9);
            let pair = SignalIdlerPair::new(ws, ws + TAU * rng.gen_range(4e9..12e9)).unwrap();
            // hold l0' fixed so only the pump term changes with alpha
            let lp = rng.gen_range(0.1e-9..5e-9);
            let yi = c(rng.gen_range(0.0..0.1), rng.gen_range(-0.2..0.2));
            let mut last = 0.0;
            for k in 1..=5 {
                let alpha = 0.05 * k as f64;
                let ind = ModulatedInductor::from_alpha(lp / (1.0 - alpha), alpha, rng.gen_range(-3.0..3.0)).unwrap();
                let y = effective_admittance(&ind, &pair, yi).unwrap();
                assert!(y.re <= 1e-15 * y.norm(), "Re Y_eff = {} for yi = {yi}", y.re);
                assert!(y.re.abs() >= last);
                last = y.re.abs();
            }
        }
    }

    #[test]
    fn lossless_idler_gives_zero_real_part() {
        let pair = SignalIdlerPair::new(W8, 2.1 * W8).unwrap();
        let ind = ModulatedInductor::from_alpha(1e-9, 0.1, 0.0).unwrap();
        let y = effective_admittance(&ind, &pair, c(0.0, 0.013)).unwrap();
        assert!(y.re.abs() < 1e-15 * y.norm());
    }

    #[test]
    fn continuity_in_alpha() {
        let pair = SignalIdlerPair::new(W8, 2.0 * W8).unwrap();
        let plain = 1.0 / (I * W8 * 1e-9);
        for a in [1e-2, 1e-3, 1e-4] {
            let ind = ModulatedInductor::from_alpha(1e-9, a, 0.0).unwrap();
            let y = effective_admittance(&ind, &pair, c(0.02, 0.01)).unwrap();
            assert!((y - plain).norm() / plain.norm() < 10.0 * a);
        }
    }
}
