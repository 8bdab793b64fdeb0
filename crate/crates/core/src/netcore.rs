//! Lossless two-port network arithmetic (ABCD matrices, line transforms,
//! reflection coefficients).

use std::f64::consts::TAU;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{require, Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this, cos/sin of an electrical length are treated as exact zeros so
/// that quarter- and half-wave lines hit their ideal limits.
const TRIG_SNAP: f64 = 1e-12;

/// An impedance that may be an ideal open circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Impedance {
    Finite(Complex64),
    Open,
}

impl Impedance {
    pub fn real(r: f64) -> Self {
        Impedance::Finite(Complex64::new(r, 0.0))
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            Impedance::Finite(z) => Some(z),
            Impedance::Open => None,
        }
    }

    /// Admittance; an open circuit maps to zero.
    pub fn admittance(self) -> Result<Complex64> {
        match self {
            Impedance::Open => Ok(Complex64::new(0.0, 0.0)),
            Impedance::Finite(z) if z == Complex64::new(0.0, 0.0) => {
                Err(Error::SingularNetwork("short circuit has no finite admittance".into()))
            }
            Impedance::Finite(z) => Ok(z.inv()),
        }
    }
}

impl From<Complex64> for Impedance {
    fn from(z: Complex64) -> Self {
        Impedance::Finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionLineSegment {
    pub z_c: f64,
    pub length_fraction: f64,
    /// Angular frequency at which `length_fraction` holds.
    pub f_ref: f64,
}

impl TransmissionLineSegment {
    pub fn new(z_c: f64, length_fraction: f64, f_ref: f64) -> Result<Self> {
        let s = Self { z_c, length_fraction, f_ref };
        s.validate()?;
        Ok(s)
    }

    pub fn quarter(z_c: f64, f_ref: f64) -> Result<Self> {
        Self::new(z_c, 0.25, f_ref)
    }

    pub fn half(z_c: f64, f_ref: f64) -> Result<Self> {
        Self::new(z_c, 0.5, f_ref)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.z_c > 0.0 && self.z_c.is_finite(), || format!("line z_c must be > 0, got {}", self.z_c))?;
        require(self.length_fraction > 0.0, || format!("line length fraction must be > 0, got {}", self.length_fraction))?;
        require(self.f_ref > 0.0, || format!("line reference frequency must be > 0, got {}", self.f_ref))
    }

    pub fn electrical_length(&self, omega: f64) -> f64 {
        omega / self.f_ref * TAU * self.length_fraction
    }
}

fn snapped_trig(theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let snap = |x: f64| if x.abs() < TRIG_SNAP { 0.0 } else { x };
    (snap(c), snap(s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TwoPortMatrix {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if det.norm() == 0.0 {
            return Err(Error::SingularNetwork("ABCD matrix has zero determinant".into()));
        }
        Ok(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    /// Impedance seen at port 1 with `load` on port 2.
    pub fn input_impedance(&self, load: Impedance) -> Impedance {
        let (num, den) = match load {
            Impedance::Finite(zl) => (self.a * zl + self.b, self.c * zl + self.d),
            Impedance::Open => (self.a, self.c),
        };
        if den == Complex64::new(0.0, 0.0) {
            Impedance::Open
        } else {
            Impedance::Finite(num / den)
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for TwoPortMatrix {
    type Output = TwoPortMatrix;
    fn mul(self, r: TwoPortMatrix) -> TwoPortMatrix {
        TwoPortMatrix::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    SeriesImpedance(Complex64),
    ShuntAdmittance(Complex64),
    Line(TransmissionLineSegment),
}

pub fn elementary_two_port(element: Element, omega: f64) -> Result<TwoPortMatrix> {
    require(omega > 0.0, || format!("omega must be > 0, got {omega}"))?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(match element {
        Element::SeriesImpedance(z) => TwoPortMatrix::new(one, z, zero, one),
        Element::ShuntAdmittance(y) => TwoPortMatrix::new(one, zero, y, one),
        Element::Line(line) => {
            line.validate()?;
            line_matrix(&line, omega)
        }
    })
}

pub(crate) fn line_matrix(line: &TransmissionLineSegment, omega: f64) -> TwoPortMatrix {
    let (c, s) = snapped_trig(line.electrical_length(omega));
    TwoPortMatrix::new(
        Complex64::new(c, 0.0),
        I * (line.z_c * s),
        I * (s / line.z_c),
        Complex64::new(c, 0.0),
    )
}

/// Ordered product, port-1 side first.
pub fn cascade(matrices: &[TwoPortMatrix]) -> Result<TwoPortMatrix> {
    let (first, rest) = matrices
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("cascade of an empty list".into()))?;
    Ok(rest.iter().fold(*first, |acc, m| acc * *m))
}

/// Impedance seen through `line` toward `z_load`.
pub fn input_impedance(line: &TransmissionLineSegment, z_load: Impedance, omega: f64) -> Result<Impedance> {
    line.validate()?;
    require(omega > 0.0, || format!("omega must be > 0, got {omega}"))?;
    Ok(line_matrix(line, omega).input_impedance(z_load))
}

/// Power-wave reflection coefficient (z_in - z_ref*)/(z_in + z_ref).
pub fn reflection_coefficient(z_in: Complex64, z_ref: Complex64) -> Result<Complex64> {
    let den = z_in + z_ref;
    if den.norm() == 0.0 {
        return Err(Error::SingularReflection);
    }
    Ok((z_in - z_ref.conj()) / den)
}

/// Pseudo-wave reflection coefficient (z_in - z_ref)/(z_in + z_ref).
pub fn reflection_coefficient_pseudo(z_in: Complex64, z_ref: Complex64) -> Result<Complex64> {
    let den = z_in + z_ref;
    if den.norm() == 0.0 {
        return Err(Error::SingularReflection);
    }
    Ok((z_in - z_ref) / den)
}

pub fn gain_db(gamma: Complex64) -> f64 {
    20.0 * gamma.norm().log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const W0: f64 = TAU * 8e9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    fn tan_form(zc: f64, zl: Complex64, theta: f64) -> Complex64 {
        let t = theta.tan();
        zc * (zl + I * zc * t) / (zc + I * zl * t)
    }

    #[test]
    fn series_zero_is_identity() {
        let m = elementary_two_port(Element::SeriesImpedance(c(0.0, 0.0)), W0).unwrap();
        assert_eq!(m, TwoPortMatrix::identity());
    }

    #[test]
    fn half_wave_is_minus_identity() {
        let line = TransmissionLineSegment::half(73.0, W0).unwrap();
        let m = elementary_two_port(Element::Line(line), W0).unwrap();
        let neg = TwoPortMatrix::new(c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
        assert!(m.max_abs_diff(&neg) < 1e-12);
    }

    #[test]
    fn quarter_wave_entries() {
        let line = TransmissionLineSegment::quarter(180.0, W0).unwrap();
        let m = elementary_two_port(Element::Line(line), W0).unwrap();
        let want = TwoPortMatrix::new(c(0.0, 0.0), c(0.0, 180.0), c(0.0, 1.0 / 180.0), c(0.0, 0.0));
        assert!(m.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TransmissionLineSegment::new(-1.0, 0.25, W0).is_err());
        assert!(elementary_two_port(Element::SeriesImpedance(c(1.0, 0.0)), 0.0).is_err());
        assert!(cascade(&[]).is_err());
    }

    #[test]
    fn cascade_identity_and_inverse() {
        let id = TwoPortMatrix::identity();
        assert_eq!(cascade(&[id]).unwrap(), id);
        let line = TransmissionLineSegment::new(42.0, 0.13, W0).unwrap();
        let m = elementary_two_port(Element::Line(line), W0 * 1.1).unwrap();
        let p = cascade(&[m, m.inverse().unwrap()]).unwrap();
        assert!(p.max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn cascade_matches_repeated_transform() {
        let l1 = TransmissionLineSegment::quarter(80.0, W0).unwrap();
        let l2 = TransmissionLineSegment::quarter(30.0, W0).unwrap();
        let load = c(12.0, -7.0);
        for w in [W0, 0.9 * W0, 1.17 * W0] {
            let m = cascade(&[line_matrix(&l1, w), line_matrix(&l2, w)]).unwrap();
            let zc = m.input_impedance(load.into()).finite().unwrap();
            // oracle: tan-form transform, innermost line first
            let inner = tan_form(30.0, load, l2.electrical_length(w));
            let outer = tan_form(80.0, inner, l1.electrical_length(w));
            assert!(rel(zc, outer) < 1e-9, "{zc} vs {outer}");
        }
    }

    #[test]
    fn input_impedance_examples() {
        let matched = TransmissionLineSegment::new(50.0, 0.37, W0).unwrap();
        let z = input_impedance(&matched, Impedance::real(50.0), W0).unwrap().finite().unwrap();
        assert!(rel(z, c(50.0, 0.0)) < 1e-12);

        let inv = TransmissionLineSegment::quarter(180.0, W0).unwrap();
        let z = input_impedance(&inv, Impedance::real(60.0), W0).unwrap().finite().unwrap();
        assert!(rel(z, c(540.0, 0.0)) < 1e-12);

        let half = TransmissionLineSegment::half(30.0, W0).unwrap();
        let z = input_impedance(&half, c(10.0, 5.0).into(), W0).unwrap().finite().unwrap();
        assert!(rel(z, c(10.0, 5.0)) < 1e-12);

        assert_eq!(input_impedance(&inv, Impedance::real(0.0), W0).unwrap(), Impedance::Open);
        let z = input_impedance(&inv, Impedance::Open, W0).unwrap().finite().unwrap();
        assert!(z.norm() < 1e-9);
    }

    #[test]
    fn reflection_examples() {
        let r = reflection_coefficient(c(50.0, 0.0), c(50.0, 0.0)).unwrap();
        assert_eq!(r.norm(), 0.0);
        let r = reflection_coefficient(c(0.0, 37.0), c(50.0, 0.0)).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-12);
        let r = reflection_coefficient(c(-25.0, 0.0), c(50.0, 0.0)).unwrap();
        assert!((r.norm() - 3.0).abs() < 1e-12);
        assert!((gain_db(r) - 9.542425094).abs() < 1e-8);
        assert_eq!(reflection_coefficient(c(-50.0, 0.0), c(50.0, 0.0)), Err(Error::SingularReflection));
    }

    #[test]
    fn power_wave_passivity_with_complex_reference() {
        let r = reflection_coefficient(c(0.0, 13.0), c(40.0, 22.0)).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn matched_line_invariance(zc in 1.0..500.0f64, frac in 0.01..2.0f64, wr in 0.1..3.0f64) {
            let line = TransmissionLineSegment::new(zc, frac, W0).unwrap();
            let z = input_impedance(&line, Impedance::real(zc), W0 * wr).unwrap().finite().unwrap();
            prop_assert!(rel(z, c(zc, 0.0)) < 1e-12);
        }

        #[test]
        fn half_wave_periodicity(zc in 1.0..500.0f64, frac in 0.01..1.0f64, re in 0.0..300.0f64, im in -300.0..300.0f64) {
            let a = TransmissionLineSegment::new(zc, frac, W0).unwrap();
            let b = TransmissionLineSegment::new(zc, frac + 0.5, W0).unwrap();
            let zl = c(re, im);
            let za = input_impedance(&a, zl.into(), W0).unwrap().finite().unwrap();
            let zb = input_impedance(&b, zl.into(), W0).unwrap().finite().unwrap();
            prop_assert!(rel(zb, za) < 1e-12 * (1.0 + za.norm() / zc).max(1.0) * 10.0);
        }

        #[test]
        fn inverter_identity(zc in 1.0..500.0f64, re in 0.01..300.0f64, im in -300.0..300.0f64) {
            let line = TransmissionLineSegment::quarter(zc, W0).unwrap();
            let zl = c(re, im);
            let z = input_impedance(&line, zl.into(), W0).unwrap().finite().unwrap();
            prop_assert!(rel(z * zl, c(zc * zc, 0.0)) < 1e-12);
        }

        #[test]
        fn reactive_ladder_is_lossless(x in -500.0..500.0f64, z1 in 10.0..200.0f64, z2 in 10.0..200.0f64,
                                       f1 in 0.05..0.7f64, f2 in 0.05..0.7f64, wr in 0.3..2.0f64, b in -0.05..0.05f64) {
            let w = W0 * wr;
            let m = cascade(&[
                line_matrix(&TransmissionLineSegment::new(z1, f1, W0).unwrap(), w),
                elementary_two_port(Element::ShuntAdmittance(c(0.0, b)), w).unwrap(),
                line_matrix(&TransmissionLineSegment::new(z2, f2, W0).unwrap(), w),
            ]).unwrap();
            if let Impedance::Finite(z) = m.input_impedance(c(0.0, x).into()) {
                let g = reflection_coefficient(z, c(50.0, 0.0)).unwrap();
                prop_assert!((g.norm() - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn cascade_associative(z1 in 10.0..200.0f64, z2 in 10.0..200.0f64, y in -0.1..0.1f64, wr in 0.3..2.0f64) {
            let w = W0 * wr;
            let a = line_matrix(&TransmissionLineSegment::new(z1, 0.21, W0).unwrap(), w);
            let b = elementary_two_port(Element::ShuntAdmittance(c(0.0, y)), w).unwrap();
            let cc = line_matrix(&TransmissionLineSegment::new(z2, 0.43, W0).unwrap(), w);
            let lhs = cascade(&[a, b, cc]).unwrap();
            let rhs = cascade(&[cascade(&[a, b]).unwrap(), cc]).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12 * (1.0 + z1 + z2));
            prop_assert!((lhs.determinant() - c(1.0, 0.0)).norm() < 1e-9);
        }
    }
}
