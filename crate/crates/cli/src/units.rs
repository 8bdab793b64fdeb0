//! Quantities with unit suffixes, e.g. `17.025 GHz`, `0.57mA`, `-80 dBm`.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Frequency,
    Impedance,
    Capacitance,
    Inductance,
    Current,
    Time,
    /// Absolute power; `dBm` or watts.
    Power,
    /// Power ratio; `dB` or a bare linear number.
    Ratio,
    Angle,
    Temperature,
    Count,
}

impl Dim {
    fn name(self) -> &'static str {
        match self {
            Dim::Frequency => "frequency",
            Dim::Impedance => "impedance",
            Dim::Capacitance => "capacitance",
            Dim::Inductance => "inductance",
            Dim::Current => "current",
            Dim::Time => "time",
            Dim::Power => "power",
            Dim::Ratio => "ratio",
            Dim::Angle => "angle",
            Dim::Temperature => "temperature",
            Dim::Count => "number",
        }
    }
}

enum Conv {
    Pow10(i32),
    Scale(f64),
    Db,
    Dbm,
}

const UNITS: &[(&str, Dim, Conv)] = &[
    ("THz", Dim::Frequency, Conv::Pow10(12)),
    ("GHz", Dim::Frequency, Conv::Pow10(9)),
    ("MHz", Dim::Frequency, Conv::Pow10(6)),
    ("kHz", Dim::Frequency, Conv::Pow10(3)),
    ("Hz", Dim::Frequency, Conv::Pow10(0)),
    ("kohm", Dim::Impedance, Conv::Pow10(3)),
    ("ohm", Dim::Impedance, Conv::Pow10(0)),
    ("Ω", Dim::Impedance, Conv::Pow10(0)),
    ("pF", Dim::Capacitance, Conv::Pow10(-12)),
    ("fF", Dim::Capacitance, Conv::Pow10(-15)),
    ("nF", Dim::Capacitance, Conv::Pow10(-9)),
    ("F", Dim::Capacitance, Conv::Pow10(0)),
    ("uH", Dim::Inductance, Conv::Pow10(-6)),
    ("nH", Dim::Inductance, Conv::Pow10(-9)),
    ("pH", Dim::Inductance, Conv::Pow10(-12)),
    ("H", Dim::Inductance, Conv::Pow10(0)),
    ("mA", Dim::Current, Conv::Pow10(-3)),
    ("uA", Dim::Current, Conv::Pow10(-6)),
    ("µA", Dim::Current, Conv::Pow10(-6)),
    ("nA", Dim::Current, Conv::Pow10(-9)),
    ("A", Dim::Current, Conv::Pow10(0)),
    ("ms", Dim::Time, Conv::Pow10(-3)),
    ("us", Dim::Time, Conv::Pow10(-6)),
    ("ns", Dim::Time, Conv::Pow10(-9)),
    ("ps", Dim::Time, Conv::Pow10(-12)),
    ("s", Dim::Time, Conv::Pow10(0)),
    ("dBm", Dim::Power, Conv::Dbm),
    ("mW", Dim::Power, Conv::Pow10(-3)),
    ("W", Dim::Power, Conv::Pow10(0)),
    ("dB", Dim::Ratio, Conv::Db),
    ("pi", Dim::Angle, Conv::Scale(PI)),
    ("rad", Dim::Angle, Conv::Pow10(0)),
    ("deg", Dim::Angle, Conv::Scale(PI / 180.0)),
    ("mK", Dim::Temperature, Conv::Pow10(-3)),
    ("K", Dim::Temperature, Conv::Pow10(0)),
];

/// Splits `"17.025 GHz"` into `("17.025", "GHz")`.
fn split(text: &str) -> (&str, &str) {
    let t = text.trim();
    let b = t.as_bytes();
    let mut end = 0;
    while end < b.len() {
        let c = b[end] as char;
        let exp_sign = (c == '+' || c == '-') && end > 0 && matches!(b[end - 1], b'e' | b'E');
        let exp = (c == 'e' || c == 'E') && end > 0 && b.get(end + 1).is_some_and(|n| n.is_ascii_digit() || *n == b'-' || *n == b'+');
        if c.is_ascii_digit() || c == '.' || (end == 0 && (c == '-' || c == '+')) || exp || exp_sign {
            end += 1;
        } else {
            break;
        }
    }
    (&t[..end], t[end..].trim())
}

/// Parses a quantity into SI units. A bare number is taken as already SI
/// (linear for ratios). A bare unit such as `pi` means one of it.
pub fn parse_quantity(text: &str, dim: Dim) -> Result<f64, String> {
    let (num, unit) = split(text);
    let num = match num {
        "" if !unit.is_empty() => "1",
        "-" => "-1",
        n => n,
    };
    let x: f64 = num.parse().map_err(|_| format!("'{text}' is not a number with an optional unit"))?;
    if unit.is_empty() {
        return Ok(x);
    }
    let (_, d, conv) = UNITS
        .iter()
        .find(|(u, _, _)| *u == unit)
        .ok_or_else(|| format!("unknown unit '{unit}' in '{text}'"))?;
    if *d != dim {
        return Err(format!("'{text}' is a {}, expected a {}", d.name(), dim.name()));
    }
    Ok(match conv {
        // shift the decimal exponent so that 17.025 GHz is exactly 17.025e9
        Conv::Pow10(p) if !num.contains(['e', 'E']) => format!("{num}e{p}").parse().unwrap_or(x),
        Conv::Pow10(p) => x * 10f64.powi(*p),
        Conv::Scale(s) => x * s,
        Conv::Db => 10f64.powf(x / 10.0),
        Conv::Dbm => 1e-3 * 10f64.powf(x / 10.0),
    })
}

/// `start:stop:step`. A unit written only on the last part applies to all.
pub fn parse_span(text: &str, dim: Dim) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("'{text}' is not start:stop:step"));
    }
    let (_, unit) = split(parts[2]);
    let q = |p: &str| {
        let (n, u) = split(p);
        if u.is_empty() && !unit.is_empty() {
            parse_quantity(&format!("{n} {unit}"), dim)
        } else {
            parse_quantity(p, dim)
        }
    };
    let (a, b, c) = (q(parts[0])?, q(parts[1])?, q(parts[2])?);
    if !(c > 0.0) || b < a {
        return Err(format!("span '{text}' is empty or has a non-positive step"));
    }
    Ok((a, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantities() {
        assert_eq!(parse_quantity("17.025GHz", Dim::Frequency).unwrap(), 17.025e9);
        assert_eq!(parse_quantity(" 56 ohm", Dim::Impedance).unwrap(), 56.0);
        assert_eq!(parse_quantity("56Ω", Dim::Impedance).unwrap(), 56.0);
        assert_eq!(parse_quantity("330 fF", Dim::Capacitance).unwrap(), 330e-15);
        assert_eq!(parse_quantity("0.57mA", Dim::Current).unwrap(), 0.57e-3);
        assert!((parse_quantity("-80 dBm", Dim::Power).unwrap() - 1e-11).abs() < 1e-24);
        assert!((parse_quantity("20 dB", Dim::Ratio).unwrap() - 100.0).abs() < 1e-12);
        assert_eq!(parse_quantity("-0.7pi", Dim::Angle).unwrap(), -0.7 * PI);
        assert_eq!(parse_quantity("pi", Dim::Angle).unwrap(), PI);
        assert_eq!(parse_quantity("1e-3", Dim::Current).unwrap(), 1e-3);
        assert_eq!(parse_quantity("2.5e9 Hz", Dim::Frequency).unwrap(), 2.5e9);
        assert_eq!(parse_quantity("25 mK", Dim::Temperature).unwrap(), 0.025);
    }

    #[test]
    fn rejects() {
        assert!(parse_quantity("5 GHz", Dim::Current).is_err());
        assert!(parse_quantity("5 furlongs", Dim::Current).is_err());
        assert!(parse_quantity("abc", Dim::Current).is_err());
    }

    #[test]
    fn spans() {
        assert_eq!(parse_span("7.9GHz:8.9GHz:1MHz", Dim::Frequency).unwrap(), (7.9e9, 8.9e9, 1e6));
        assert_eq!(parse_span("30:100:10 ohm", Dim::Impedance).unwrap(), (30.0, 100.0, 10.0));
        assert!(parse_span("1:0:1", Dim::Impedance).is_err());
        assert!(parse_span("1:2", Dim::Impedance).is_err());
    }
}
