//! One function per subcommand, each producing a table.

use std::f64::consts::TAU;
use std::path::Path;

use paramp_core::material::{fit_ki_curve, parse_ki_csv, PumpOperatingPoint};
use paramp_core::noise::{added_noise, fit_qubit_saturation, power_to_quanta, snr_gain, system_noise_temperature, QubitSample};
use paramp_core::search::{aggregate_by_znr, search_designs};
use paramp_core::simulator::{best_over_ramp, centred_grid, linear_grid, pump_bias_map, pump_policy, Evaluator, PumpDrive};
use paramp_core::synthesis::{predict_fractional_bandwidth, synthesize_transformer};
use paramp_core::units::{dbm_to_watts, ratio_to_db, watts_to_dbm};
use paramp_core::Complex64;

use crate::config::{Command, PumpLevel, RunConfig};
use crate::emit::{Cell, Table};
use crate::CliError;

pub fn run_command(cmd: Command, cfg: &RunConfig) -> Result<Table, CliError> {
    match cmd {
        Command::Synth => synth(cfg),
        Command::Simulate => simulate(cfg),
        Command::Map => map(cfg),
        Command::Search => search(cfg),
        Command::FitKi => fit_ki(cfg),
        Command::FitQubit => fit_qubit(cfg),
        Command::Noise => noise(cfg),
    }
}

fn synth(cfg: &RunConfig) -> Result<Table, CliError> {
    let s = &cfg.synth;
    let r = synthesize_transformer(&s.proto, s.z_nr, s.z_ki, s.z0)?;
    let fbw = predict_fractional_bandwidth(s.proto.g1, r.z_nr_primed, r.r_nr_primed)?;
    let mut t = Table::new(&["z_ref", "z_quarter", "z_parallel", "z_half", "z_nr_primed", "r_nr_primed", "fractional_bandwidth"]);
    t.push([r.z_ref, r.z_quarter, r.z_parallel, r.z_half, r.z_nr_primed, r.r_nr_primed, fbw].map(Cell::Num).to_vec());
    Ok(t)
}

fn simulate(cfg: &RunConfig) -> Result<Table, CliError> {
    let design = &cfg.device.design;
    let p = &cfg.pump;
    let freqs = match cfg.sweep.span {
        Some((a, b, step)) => linear_grid(TAU * a, TAU * b, TAU * step)?,
        None => centred_grid(p.omega_p, cfg.sweep.half_span_hz, cfg.sweep.step_hz)?,
    };
    let eval = Evaluator::new(design, &cfg.env, p.omega_p, &freqs)?;
    let drive = match p.level {
        PumpLevel::Xi3(x) => PumpDrive::from_xi3(design, p.i_dc, x, p.phase, p.omega_p)?,
        PumpLevel::Current(ip) => {
            let op = PumpOperatingPoint { i_dc: p.i_dc, i_p_mag: ip, phi_p: p.phase, omega_p: p.omega_p };
            op.validate(&design.ki_model)?;
            PumpDrive::from_operating_point(design, &op)?
        }
        PumpLevel::Auto => {
            // chosen on the standard grid so the optimum does not depend on --span
            let policy = pump_policy(&p.policy)?;
            let grid = centred_grid(p.omega_p, cfg.sweep.half_span_hz, cfg.sweep.step_hz)?;
            let ramp_eval = Evaluator::new(design, &cfg.env, p.omega_p, &grid)?;
            let best = best_over_ramp(&ramp_eval, policy.ramp(design, p.i_dc, p.omega_p)?, &cfg.qualify)?
                .ok_or_else(|| CliError::Numerical("no pump level along the ramp gives a qualifying profile".into()))?;
            log::info!(
                "pump ramp optimum: |xi3|/2pi = {:.6} GHz, bandwidth {:.3} MHz",
                best.drive.xi3 / TAU / 1e9,
                best.report.bandwidth / TAU / 1e6
            );
            best.drive
        }
    };
    let prof = eval.profile(&drive)?;
    let mut t = Table::new(&["freq_hz", "re_s11", "im_s11", "gain_db"]);
    for k in 0..prof.freqs.len() {
        let s = prof.s11[k];
        t.push(vec![Cell::Num(prof.freqs[k] / TAU), Cell::Num(s.re), Cell::Num(s.im), Cell::Num(prof.gain_db[k])]);
    }
    Ok(t)
}

fn map(cfg: &RunConfig) -> Result<Table, CliError> {
    let policy = pump_policy(&cfg.pump.policy)?;
    let opts = paramp_core::simulator::MapOptions {
        half_span_hz: cfg.sweep.half_span_hz,
        step_hz: cfg.sweep.step_hz,
        qualify: cfg.qualify,
    };
    let cells = pump_bias_map(&cfg.device.design, &cfg.env, &cfg.map_fp, &cfg.map_idc, policy.as_ref(), &opts)?;
    let mut t = Table::new(&["fp_hz", "idc_a", "bandwidth_hz", "peaks", "ripple_db"]);
    for c in &cells {
        let (peaks, ripple) = match &c.best {
            Some(b) => (b.report.peak_count as i64, Cell::Num(b.report.ripple_db)),
            None => (0, Cell::Empty),
        };
        t.push(vec![Cell::Num(c.omega_p / TAU), Cell::Num(c.i_dc), Cell::Num(c.bandwidth() / TAU), Cell::Int(peaks), ripple]);
    }
    Ok(t)
}

fn search(cfg: &RunConfig) -> Result<Table, CliError> {
    let r = &cfg.search;
    log::info!("searching {} design points ({} circuit)", r.points().len(), r.circuit);
    let recs = search_designs(r)?;
    for s in aggregate_by_znr(&recs, r.omega0) {
        log::info!(
            "z_nr {:.1} ohm: {} designs, mean bandwidth {:.1} MHz, max eta {:.3}",
            s.z_nr,
            s.count,
            s.mean_bandwidth / TAU / 1e6,
            s.max_eta
        );
    }
    let mut t = Table::new(&["z14", "z12", "znr", "fp2_hz", "bandwidth_hz", "xi3_hz", "eta"]);
    for rec in &recs {
        let p = rec.params;
        t.push(
            [p.z_quarter, p.z_half, p.z_nr, p.omega_p_half / TAU, rec.max_bandwidth / TAU, rec.optimal_xi3 / TAU, rec.eta]
                .map(Cell::Num)
                .to_vec(),
        );
    }
    Ok(t)
}

fn read_input(path: Option<&Path>, key: &str) -> Result<String, CliError> {
    let path = path.ok_or_else(|| CliError::Validation(format!("{key}: no input data file given (use --input)")))?;
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn csv_rows(text: &str, header: &[&str], key: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let got: Vec<String> = rdr.headers().map_err(|e| CliError::Validation(format!("{key}: {e}")))?.iter().map(String::from).collect();
    if got != header {
        return Err(CliError::Validation(format!("{key}: expected header '{}', got '{}'", header.join(","), got.join(","))));
    }
    rdr.records()
        .enumerate()
        .map(|(k, r)| {
            let r = r.map_err(|e| CliError::Validation(format!("{key}: {e}")))?;
            r.iter()
                .map(|f| f.parse::<f64>().map_err(|_| CliError::Validation(format!("{key}: row {}: '{f}' is not a number", k + 1))))
                .collect()
        })
        .collect()
}

fn fit_ki(cfg: &RunConfig) -> Result<Table, CliError> {
    let text = read_input(cfg.ki_data.as_deref(), "fit_ki.data")?;
    let data = parse_ki_csv(&text)?;
    let fit = fit_ki_curve(&data, &cfg.ki_template)?;
    let m = &fit.model;
    let mut t = Table::new(&["law", "l_k0_h", "l_geo_h", "i_star2_a", "i_star4_a", "i_star_star_a", "n_exp", "i_c_a", "rms", "iterations"]);
    let mut row = vec![Cell::Text(m.law.name().to_string())];
    row.extend([m.l_k0, m.l_geo, m.scales.i_star2, m.scales.i_star4, m.scales.i_star_star, m.scales.n_exp, m.i_c, fit.rms].map(Cell::Num));
    row.push(Cell::Int(fit.iterations as i64));
    t.push(row);
    Ok(t)
}

fn fit_qubit(cfg: &RunConfig) -> Result<Table, CliError> {
    let omega_q = cfg.omega_q.ok_or_else(|| CliError::Validation("fit_qubit.fq: qubit frequency is required".into()))?;
    let text = read_input(cfg.qubit_data.as_deref(), "fit_qubit.data")?;
    let rows = csv_rows(&text, &["detuning_hz", "p_vna_dbm", "re_s21", "im_s21"], "fit_qubit.data")?;
    let data: Vec<QubitSample> = rows
        .iter()
        .map(|r| QubitSample { detuning: TAU * r[0], p_vna: dbm_to_watts(r[1]), s21: Complex64::new(r[2], r[3]) })
        .collect();
    let f = fit_qubit_saturation(&data, omega_q)?;
    let mut t = Table::new(&["gamma1_hz", "gamma_phi_hz", "omega_d_ref_hz", "p_ref_dbm", "a_in_db", "rms", "iterations"]);
    let mut row: Vec<Cell> =
        [f.gamma1 / TAU, f.gamma_phi / TAU, f.omega_d_ref / TAU, watts_to_dbm(f.p_ref), ratio_to_db(f.a_in), f.rms].map(Cell::Num).to_vec();
    row.push(Cell::Int(f.iterations as i64));
    t.push(row);
    Ok(t)
}

fn noise(cfg: &RunConfig) -> Result<Table, CliError> {
    let n = &cfg.noise;
    let g_s = n.g_s.ok_or_else(|| CliError::Validation("noise.gain: amplifier gain is required".into()))?;
    let g_sys_eff = n.g_sys_eff.ok_or_else(|| CliError::Validation("noise.g_sys_eff: effective chain gain is required".into()))?;
    let text = read_input(n.data.as_deref(), "noise.data")?;
    let rows = csv_rows(&text, &["freq_hz", "p_on_dbm", "p_off_dbm"], "noise.data")?;
    let mut t = Table::new(&["freq_hz", "n4", "n4_off", "n_a", "g_snr_db", "t_sys_k"]);
    for r in rows {
        let w = TAU * r[0];
        let (p_on, p_off) = (dbm_to_watts(r[1]), dbm_to_watts(r[2]));
        let n4 = power_to_quanta(p_on, w, n.b_m);
        let n4_off = power_to_quanta(p_off, w, n.b_m);
        let n_a = added_noise(n4, n4_off, g_s, g_sys_eff, n.n1)?;
        let g_snr = snr_gain(p_on, p_off, g_s)?;
        let t_sys = system_noise_temperature(n4_off, w, g_sys_eff)?;
        t.push([r[0], n4, n4_off, n_a, ratio_to_db(g_snr), t_sys].map(Cell::Num).to_vec());
    }
    Ok(t)
}
