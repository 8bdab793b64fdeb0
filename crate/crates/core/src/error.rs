use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular reflection: z_in = -z_ref (oscillation threshold)")]
    SingularReflection,
    #[error("degenerate inverter: modulation strength is zero")]
    DegenerateInverter,
    #[error("singular network: {0}")]
    SingularNetwork(String),
    #[error("pole at operating point: parametric oscillation threshold")]
    PoleAtOperatingPoint,
    #[error("no gain: Re[Y_eff] = {0:e} S is not negative")]
    NoGain(f64),
    #[error("superconductivity breakdown: |I| = {current:e} A >= {limit:e} A")]
    SuperconductivityBreakdown { current: f64, limit: f64 },
    #[error("synthesis infeasible: {0}")]
    SynthesisInfeasible(String),
    #[error("unphysical environment: Re[Z_env] = {re:e} ohm at {omega:e} rad/s")]
    UnphysicalEnvironment { re: f64, omega: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("fit failed after {iterations} iterations (cost {cost:e}): {reason}")]
    FitFailure { iterations: usize, cost: f64, reason: String },
    #[error("invalid gain: {0}")]
    InvalidGain(String),
    #[error("unknown {kind} '{name}' (known: {known})")]
    UnknownStrategy { kind: &'static str, name: String, known: String },
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidGain(_)
                | Error::UnknownStrategy { .. }
                | Error::InsufficientData(_)
        )
    }
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
