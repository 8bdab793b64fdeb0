//! Physical constants and small unit helpers.

use std::f64::consts::TAU;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;

pub fn hz(omega: f64) -> f64 {
    omega / TAU
}

pub fn rad(f_hz: f64) -> f64 {
    f_hz * TAU
}

pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn ratio_to_db(r: f64) -> f64 {
    10.0 * r.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * db_to_ratio(dbm)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    ratio_to_db(w / 1e-3)
}
