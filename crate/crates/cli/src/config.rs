//! TOML run configuration. Values may carry units; everything is converted
//! to SI (angular frequencies in rad/s) before a command runs.

use std::f64::consts::TAU;
use std::path::PathBuf;

use paramp_core::material::{law, CurrentScales, KineticInductorModel};
use paramp_core::presets::{self, DevicePreset, SynthInputs};
use paramp_core::search::{SearchRanges, SweepRange};
use paramp_core::simulator::{fixed_inductor, pump_policy, DesignSpec, EnvTerm, EnvironmentModel, QualifyOptions};
use serde::Deserialize;

use crate::units::{parse_quantity, parse_span, Dim};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Synth,
    Simulate,
    Map,
    Search,
    FitKi,
    FitQubit,
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Structured,
}

/// A number, or a string with a unit.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Q {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Q {
    fn si(&self, key: &str, dim: Dim) -> Result<f64, CliError> {
        let v = match self {
            Q::Int(i) => *i as f64,
            Q::Num(x) => *x,
            Q::Text(s) => parse_quantity(s, dim).map_err(|m| invalid(key, m))?,
        };
        if !v.is_finite() {
            return Err(invalid(key, format!("{v} is not finite")));
        }
        Ok(v)
    }

    fn span(&self, key: &str, dim: Dim) -> Result<SweepRange, CliError> {
        match self {
            Q::Text(s) if s.contains(':') => {
                let (a, b, c) = parse_span(s, dim).map_err(|m| invalid(key, m))?;
                Ok(SweepRange::new(a, b, c))
            }
            _ => Ok(SweepRange::single(self.si(key, dim)?)),
        }
    }
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{key}: {msg}"))
}

fn opt(v: &Option<Q>, key: &str, dim: Dim) -> Result<Option<f64>, CliError> {
    v.as_ref().map(|q| q.si(key, dim)).transpose()
}

fn positive(v: &Option<Q>, key: &str, dim: Dim) -> Result<Option<f64>, CliError> {
    match opt(v, key, dim)? {
        Some(x) if x <= 0.0 => Err(invalid(key, format!("must be > 0, got {x}"))),
        x => Ok(x),
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    pub command: Option<Command>,
    pub design: RawDesign,
    pub environment: RawEnvironment,
    pub pump: RawPump,
    pub sweep: RawSweep,
    pub qualify: RawQualify,
    pub map: RawMap,
    pub search: RawSearch,
    pub synth: RawSynth,
    pub fit_ki: RawKi,
    pub fit_qubit: RawQubit,
    pub noise: RawNoise,
    pub output: RawOutput,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawDesign {
    pub preset: Option<String>,
    pub circuit: Option<String>,
    pub z0: Option<Q>,
    pub z_quarter: Option<Q>,
    pub z_half: Option<Q>,
    pub z_ki: Option<Q>,
    pub z_nr: Option<Q>,
    pub c_shunt: Option<Q>,
    pub f0: Option<Q>,
    pub ki: Option<RawKi>,
}

/// Inductor law parameters; also the template for `fit-ki`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawKi {
    pub data: Option<PathBuf>,
    pub law: Option<String>,
    pub l_k0: Option<Q>,
    pub l_geo: Option<Q>,
    pub i_star2: Option<Q>,
    pub i_star4: Option<Q>,
    pub i_star_star: Option<Q>,
    pub n_exp: Option<Q>,
    pub i_c: Option<Q>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawEnvironment {
    pub preset: Option<String>,
    pub z0: Option<Q>,
    pub coupling: Option<String>,
    pub terms: Option<Vec<RawTerm>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub z: Q,
    pub tau: Q,
    #[serde(default)]
    pub phi: Option<Q>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawPump {
    pub idc: Option<Q>,
    pub fp: Option<Q>,
    pub xi3: Option<Q>,
    pub ip: Option<Q>,
    pub phase: Option<Q>,
    pub policy: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSweep {
    pub span: Option<String>,
    pub half_span: Option<Q>,
    pub step: Option<Q>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawQualify {
    pub threshold: Option<Q>,
    pub ripple_max: Option<Q>,
    pub stop_gain: Option<Q>,
    pub require_two_peaks: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawMap {
    pub fp: Option<Q>,
    pub idc: Option<Q>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSearch {
    pub preset: Option<String>,
    pub circuit: Option<String>,
    pub z_quarter: Option<Q>,
    pub z_half: Option<Q>,
    pub z_nr: Option<Q>,
    pub fp2: Option<Q>,
    pub z_ki: Option<Q>,
    pub z0: Option<Q>,
    pub f0: Option<Q>,
    pub ramp_factor: Option<Q>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSynth {
    pub preset: Option<String>,
    pub prototype: Option<String>,
    pub eps: Option<Q>,
    pub z_nr: Option<Q>,
    pub z_ki: Option<Q>,
    pub z0: Option<Q>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawQubit {
    pub data: Option<PathBuf>,
    pub fq: Option<Q>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawNoise {
    pub data: Option<PathBuf>,
    pub gain: Option<Q>,
    pub g_sys_eff: Option<Q>,
    pub n1: Option<Q>,
    pub b_m: Option<Q>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawOutput {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpLevel {
    /// |xi3| in rad/s.
    Xi3(f64),
    /// |I_p| in A.
    Current(f64),
    /// Widest qualifying profile along the ramp policy.
    Auto,
}

#[derive(Debug, Clone)]
pub struct PumpSettings {
    pub i_dc: f64,
    pub omega_p: f64,
    pub level: PumpLevel,
    pub phase: f64,
    pub policy: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    /// Explicit start/stop/step in Hz; otherwise centred on half the pump.
    pub span: Option<(f64, f64, f64)>,
    pub half_span_hz: f64,
    pub step_hz: f64,
}

#[derive(Debug, Clone)]
pub struct NoiseSettings {
    pub data: Option<PathBuf>,
    pub g_s: Option<f64>,
    pub g_sys_eff: Option<f64>,
    pub n1: f64,
    pub b_m: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub device: DevicePreset,
    pub env: EnvironmentModel,
    pub pump: PumpSettings,
    pub sweep: SweepSettings,
    pub qualify: QualifyOptions,
    /// Pump frequencies (rad/s) and bias currents (A).
    pub map_fp: Vec<f64>,
    pub map_idc: Vec<f64>,
    pub search: SearchRanges,
    pub synth: SynthInputs,
    pub ki_data: Option<PathBuf>,
    pub ki_template: KineticInductorModel,
    pub qubit_data: Option<PathBuf>,
    pub omega_q: Option<f64>,
    pub noise: NoiseSettings,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub fn parse_raw(text: &str) -> Result<RawConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_raw(text)?.resolve()
}

impl RawConfig {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let device = self.design.resolve()?;
        let pump = self.pump.resolve(&device)?;
        let qualify = self.qualify.resolve()?;
        let sweep = self.sweep.resolve()?;
        let map_fp = match &self.map.fp {
            Some(q) => q.span("map.fp", Dim::Frequency)?.values().iter().map(|f| TAU * f).collect(),
            None => vec![pump.omega_p],
        };
        let map_idc = match &self.map.idc {
            Some(q) => q.span("map.idc", Dim::Current)?.values(),
            None => vec![pump.i_dc],
        };
        let mut search = self.search.resolve()?;
        search.qualify = qualify;
        let noise = NoiseSettings {
            data: self.noise.data.clone(),
            g_s: positive(&self.noise.gain, "noise.gain", Dim::Ratio)?,
            g_sys_eff: positive(&self.noise.g_sys_eff, "noise.g_sys_eff", Dim::Ratio)?,
            n1: opt(&self.noise.n1, "noise.n1", Dim::Count)?.unwrap_or(0.5),
            b_m: positive(&self.noise.b_m, "noise.b_m", Dim::Frequency)?.unwrap_or(10.0),
        };
        Ok(RunConfig {
            command: self.command,
            env: self.environment.resolve()?,
            sweep,
            qualify,
            map_fp,
            map_idc,
            search,
            synth: self.synth.resolve()?,
            ki_data: self.fit_ki.data.clone(),
            ki_template: self.fit_ki.model("fit_ki", &device.design.ki_model)?,
            qubit_data: self.fit_qubit.data.clone(),
            omega_q: positive(&self.fit_qubit.fq, "fit_qubit.fq", Dim::Frequency)?.map(|f| TAU * f),
            noise,
            out: self.output.path.clone(),
            format: self.output.format.unwrap_or_default(),
            device,
            pump,
        })
    }
}

impl RawDesign {
    fn resolve(&self) -> Result<DevicePreset, CliError> {
        let name = self.preset.as_deref().unwrap_or("paper-device");
        let mut dev = presets::design(name).map_err(|e| invalid("design.preset", e))?;
        let overridden = self.circuit.is_some()
            || [&self.z0, &self.z_quarter, &self.z_half, &self.z_ki, &self.z_nr, &self.c_shunt, &self.f0].iter().any(|q| q.is_some())
            || self.ki.is_some();
        if !overridden {
            return Ok(dev);
        }
        let d = &dev.design;
        let circuit = self.circuit.clone().unwrap_or_else(|| d.topology.name().to_string());
        let z0 = positive(&self.z0, "design.z0", Dim::Impedance)?.unwrap_or(d.z0);
        let zq = positive(&self.z_quarter, "design.z_quarter", Dim::Impedance)?.unwrap_or(d.line_quarter.z_c);
        let zh = positive(&self.z_half, "design.z_half", Dim::Impedance)?.unwrap_or(d.line_half.z_c);
        let zki = positive(&self.z_ki, "design.z_ki", Dim::Impedance)?.or(d.line_ki_quarter.map(|l| l.z_c));
        let f0 = positive(&self.f0, "design.f0", Dim::Frequency)?.map_or(d.f0, |f| TAU * f);
        let c = positive(&self.c_shunt, "design.c_shunt", Dim::Capacitance)?.unwrap_or(d.c_shunt);
        let z_nr = positive(&self.z_nr, "design.z_nr", Dim::Impedance)?;
        let model = match (&self.ki, z_nr) {
            (Some(ki), _) => ki.model("design.ki", &d.ki_model)?,
            (None, Some(z)) => fixed_inductor(z * z * c).map_err(|e| invalid("design.z_nr", e))?,
            (None, None) => d.ki_model.clone(),
        };
        dev.design = DesignSpec::new(&circuit, z0, zq, zh, zki, c, model, f0).map_err(|e| invalid("design", e))?;
        Ok(dev)
    }
}

impl RawKi {
    fn model(&self, key: &str, base: &KineticInductorModel) -> Result<KineticInductorModel, CliError> {
        let k = |f: &str| format!("{key}.{f}");
        let law_name = self.law.clone().unwrap_or_else(|| base.law.name().to_string());
        let law = law(&law_name).map_err(|e| invalid(&k("law"), e))?;
        let cur = |v: &Option<Q>, f: &str, d: f64| positive(v, &k(f), Dim::Current).map(|x| x.unwrap_or(d));
        let scales = CurrentScales {
            i_star2: cur(&self.i_star2, "i_star2", base.scales.i_star2)?,
            i_star4: cur(&self.i_star4, "i_star4", base.scales.i_star4)?,
            i_star_star: cur(&self.i_star_star, "i_star_star", base.scales.i_star_star)?,
            n_exp: positive(&self.n_exp, &k("n_exp"), Dim::Count)?.unwrap_or(base.scales.n_exp),
        };
        let l_k0 = opt(&self.l_k0, &k("l_k0"), Dim::Inductance)?.unwrap_or(base.l_k0);
        let l_geo = opt(&self.l_geo, &k("l_geo"), Dim::Inductance)?.unwrap_or(base.l_geo);
        let i_c = cur(&self.i_c, "i_c", base.i_c)?;
        let m = KineticInductorModel { law, l_k0, l_geo, scales, i_c };
        m.validate().map_err(|e| invalid(key, e))?;
        Ok(m)
    }
}

impl RawEnvironment {
    fn resolve(&self) -> Result<EnvironmentModel, CliError> {
        let mut env = presets::environment(self.preset.as_deref().unwrap_or("ideal")).map_err(|e| invalid("environment.preset", e))?;
        if let Some(z0) = positive(&self.z0, "environment.z0", Dim::Impedance)? {
            env.z0 = z0;
        }
        if let Some(c) = &self.coupling {
            env.coupling = c.parse().map_err(|e| invalid("environment.coupling", e))?;
        }
        if let Some(terms) = &self.terms {
            env.terms = terms
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let key = |f: &str| format!("environment.terms[{k}].{f}");
                    Ok(EnvTerm {
                        z: t.z.si(&key("z"), Dim::Impedance)?,
                        tau: t.tau.si(&key("tau"), Dim::Time)?,
                        phi: opt(&t.phi, &key("phi"), Dim::Angle)?.unwrap_or(0.0),
                    })
                })
                .collect::<Result<_, CliError>>()?;
        }
        Ok(env)
    }
}

impl RawPump {
    fn resolve(&self, dev: &DevicePreset) -> Result<PumpSettings, CliError> {
        let i_dc = opt(&self.idc, "pump.idc", Dim::Current)?.unwrap_or(dev.i_dc);
        if i_dc < 0.0 {
            return Err(invalid("pump.idc", format!("must be >= 0, got {i_dc}")));
        }
        let omega_p = positive(&self.fp, "pump.fp", Dim::Frequency)?.map_or(dev.omega_p, |f| TAU * f);
        let xi3 = opt(&self.xi3, "pump.xi3", Dim::Frequency)?;
        let ip = opt(&self.ip, "pump.ip", Dim::Current)?;
        let level = match (xi3, ip) {
            (Some(_), Some(_)) => return Err(invalid("pump", "set at most one of xi3 and ip")),
            (Some(x), None) if x >= 0.0 => PumpLevel::Xi3(TAU * x),
            (None, Some(i)) if i >= 0.0 => PumpLevel::Current(i),
            (None, None) => PumpLevel::Auto,
            _ => return Err(invalid("pump", "xi3 and ip must be >= 0")),
        };
        let policy = self.policy.clone().unwrap_or_else(|| "xi3-ramp".into());
        pump_policy(&policy).map_err(|e| invalid("pump.policy", e))?;
        Ok(PumpSettings { i_dc, omega_p, level, phase: opt(&self.phase, "pump.phase", Dim::Angle)?.unwrap_or(0.0), policy })
    }
}

impl RawSweep {
    fn resolve(&self) -> Result<SweepSettings, CliError> {
        let span = self.span.as_deref().map(|s| parse_span(s, Dim::Frequency).map_err(|m| invalid("sweep.span", m))).transpose()?;
        let half_span_hz = positive(&self.half_span, "sweep.half_span", Dim::Frequency)?.unwrap_or(1e9);
        let step_hz = positive(&self.step, "sweep.step", Dim::Frequency)?.unwrap_or(1e6);
        if step_hz >= half_span_hz {
            return Err(invalid("sweep.step", "must be below sweep.half_span"));
        }
        Ok(SweepSettings { span, half_span_hz, step_hz })
    }
}

impl RawQualify {
    fn resolve(&self) -> Result<QualifyOptions, CliError> {
        // gains are given in dB; bare numbers are dB too
        let db = |v: &Option<Q>, key: &str| -> Result<Option<f64>, CliError> {
            Ok(match v {
                Some(Q::Text(s)) => Some(10.0 * parse_quantity(s, Dim::Ratio).map_err(|m| invalid(key, m))?.log10()),
                Some(q) => Some(q.si(key, Dim::Count)?),
                None => None,
            })
        };
        let d = QualifyOptions::default();
        let o = QualifyOptions {
            threshold_db: db(&self.threshold, "qualify.threshold")?.unwrap_or(d.threshold_db),
            ripple_max_db: db(&self.ripple_max, "qualify.ripple_max")?.unwrap_or(d.ripple_max_db),
            stop_gain_db: db(&self.stop_gain, "qualify.stop_gain")?.unwrap_or(d.stop_gain_db),
            require_two_peaks: self.require_two_peaks.unwrap_or(d.require_two_peaks),
        };
        if o.stop_gain_db < o.threshold_db {
            return Err(invalid("qualify.stop_gain", "must be at least the threshold"));
        }
        Ok(o)
    }
}

impl RawSearch {
    fn resolve(&self) -> Result<SearchRanges, CliError> {
        let mut r = presets::search_ranges(self.preset.as_deref().unwrap_or("appendixE-ranges")).map_err(|e| invalid("search.preset", e))?;
        if let Some(c) = &self.circuit {
            paramp_core::simulator::topology(c).map_err(|e| invalid("search.circuit", e))?;
            r.circuit = c.clone();
        }
        let span = |v: &Option<Q>, key: &str, dim: Dim| -> Result<Option<SweepRange>, CliError> {
            let s = v.as_ref().map(|q| q.span(key, dim)).transpose()?;
            if let Some(s) = s {
                if s.start <= 0.0 {
                    return Err(invalid(key, "must be > 0"));
                }
            }
            Ok(s)
        };
        if let Some(s) = span(&self.z_quarter, "search.z_quarter", Dim::Impedance)? {
            r.z_quarter = s;
        }
        if let Some(s) = span(&self.z_half, "search.z_half", Dim::Impedance)? {
            r.z_half = s;
        }
        if let Some(s) = span(&self.z_nr, "search.z_nr", Dim::Impedance)? {
            r.z_nr = s;
        }
        if let Some(s) = span(&self.fp2, "search.fp2", Dim::Frequency)? {
            r.omega_p_half = SweepRange::new(TAU * s.start, TAU * s.stop, TAU * s.step);
        }
        if let Some(z) = positive(&self.z_ki, "search.z_ki", Dim::Impedance)? {
            r.z_ki = z;
        }
        if let Some(z) = positive(&self.z0, "search.z0", Dim::Impedance)? {
            r.z0 = z;
        }
        if let Some(f) = positive(&self.f0, "search.f0", Dim::Frequency)? {
            r.omega0 = TAU * f;
        }
        if let Some(f) = opt(&self.ramp_factor, "search.ramp_factor", Dim::Count)? {
            if f <= 1.0 {
                return Err(invalid("search.ramp_factor", format!("must be > 1, got {f}")));
            }
            r.ramp.factor = f;
        }
        r.validate().map_err(|e| invalid("search", e))?;
        Ok(r)
    }
}

impl RawSynth {
    fn resolve(&self) -> Result<SynthInputs, CliError> {
        let name = self.preset.as_deref().unwrap_or("appendixB-worked");
        if !presets::SYNTH_PRESETS.contains(&name) {
            return Err(invalid("synth.preset", format!("unknown preset '{name}' (known: {})", presets::SYNTH_PRESETS.join(", "))));
        }
        let mut s = presets::appendix_b_worked();
        let eps = positive(&self.eps, "synth.eps", Dim::Count)?.unwrap_or(s.proto.eps);
        let proto = self.prototype.as_deref().unwrap_or("getsinger-17dB");
        s.proto = presets::prototype(proto, eps).map_err(|e| invalid("synth.prototype", e))?;
        s.proto.validate().map_err(|e| invalid("synth.eps", e))?;
        s.z_nr = positive(&self.z_nr, "synth.z_nr", Dim::Impedance)?.unwrap_or(s.z_nr);
        s.z_ki = positive(&self.z_ki, "synth.z_ki", Dim::Impedance)?.unwrap_or(s.z_ki);
        s.z0 = positive(&self.z0, "synth.z0", Dim::Impedance)?.unwrap_or(s.z0);
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = parse_config("command = \"synth\"").unwrap();
        assert_eq!(c.command, Some(Command::Synth));
        assert_eq!(c.synth.proto, paramp_core::synthesis::PrototypeCoefficients::getsinger_17db(0.0625));
        assert_eq!(c.format, Format::Csv);
        assert!(c.env.is_ideal());
        assert_eq!(c.pump.level, PumpLevel::Auto);
    }

    #[test]
    fn paper_device_preset() {
        let c = parse_config("[design]\npreset = \"paper-device\"").unwrap();
        let d = &c.device.design;
        assert_eq!(d.c_shunt, 330e-15);
        assert_eq!(d.line_quarter.z_c, 80.0);
        assert_eq!(d.line_half.z_c, 30.0);
        assert_eq!(d.line_ki_quarter.unwrap().z_c, 180.0);
        let z_nr = (d.inductance(c.pump.i_dc).unwrap() / d.c_shunt).sqrt();
        assert!((z_nr - 56.0).abs() < 1e-9);
    }

    #[test]
    fn units_and_overrides() {
        let c = parse_config(
            r#"
            [design]
            z_nr = "60 ohm"
            c_shunt = "0.3 pF"
            [pump]
            idc = "0.5 mA"
            fp = "16.9GHz"
            xi3 = "2.4 GHz"
            [environment]
            preset = "paper-env"
            terms = [{ z = "10 ohm", tau = "1 ns", phi = "-0.5pi" }]
            [map]
            fp = "16.8GHz:17.0GHz:0.1GHz"
            "#,
        )
        .unwrap();
        let d = &c.device.design;
        assert!((d.inductance(0.0).unwrap() - 3600.0 * 0.3e-12).abs() < 1e-20);
        assert_eq!(c.pump.i_dc, 0.5e-3);
        assert_eq!(c.pump.omega_p, TAU * 16.9e9);
        assert_eq!(c.pump.level, PumpLevel::Xi3(TAU * 2.4e9));
        assert_eq!(c.env.terms.len(), 1);
        assert_eq!(c.env.terms[0].tau, 1e-9);
        assert_eq!(c.map_fp.len(), 3);
        assert_eq!(c.map_idc, vec![0.5e-3]);
    }

    #[test]
    fn negative_impedance_names_key() {
        let e = parse_config("[design]\nz_nr = \"-5 ohm\"").unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("design.z_nr"), "{e}");
    }

    #[test]
    fn unknown_key_has_location() {
        let e = parse_config("[design]\npreset = \"paper-device\"\nzz = 1\n").unwrap_err();
        let m = e.to_string();
        assert!(m.contains("line 3") && m.contains("zz"), "{m}");
    }

    #[test]
    fn unknown_presets_and_units() {
        assert!(parse_config("[design]\npreset = \"nope\"").is_err());
        assert!(parse_config("[pump]\nidc = \"5 GHz\"").is_err());
        assert!(parse_config("[pump]\npolicy = \"nope\"").is_err());
        assert!(parse_config("[synth]\nprototype = \"nope\"").is_err());
        assert!(parse_config("[pump]\nxi3 = 1\nip = 1").is_err());
    }

    #[test]
    fn search_ranges() {
        let c = parse_config("[search]\npreset = \"appendixE-conventional\"\nz_nr = \"2:4:1 ohm\"\nfp2 = \"8GHz\"").unwrap();
        assert_eq!(c.search.circuit, "conventional");
        assert_eq!(c.search.z_nr.values(), vec![2.0, 3.0, 4.0]);
        assert_eq!(c.search.omega_p_half.values(), vec![TAU * 8e9]);
        assert!(parse_config("[search]\nz_nr = \"0:4:1 ohm\"").is_err());
    }
}
