//! Circuit topologies: which line segments sit between the port and the
//! resonator node.

use std::sync::{Arc, OnceLock};

use super::DesignSpec;
use crate::error::{Error, Result};
use crate::netcore::TransmissionLineSegment;
use crate::registry::Registry;

pub trait Topology: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn uses_ki_line(&self) -> bool;
    /// Line segments ordered from the port toward the resonator node.
    fn ladder(&self, design: &DesignSpec) -> Vec<TransmissionLineSegment>;
}

#[derive(Debug)]
pub struct ThreeStage;

#[derive(Debug)]
pub struct Conventional;

impl Topology for ThreeStage {
    fn name(&self) -> &'static str {
        "three-stage"
    }
    fn uses_ki_line(&self) -> bool {
        true
    }
    fn ladder(&self, d: &DesignSpec) -> Vec<TransmissionLineSegment> {
        let mut v = vec![d.line_quarter, d.line_half];
        v.extend(d.line_ki_quarter);
        v
    }
}

impl Topology for Conventional {
    fn name(&self) -> &'static str {
        "conventional"
    }
    fn uses_ki_line(&self) -> bool {
        false
    }
    fn ladder(&self, d: &DesignSpec) -> Vec<TransmissionLineSegment> {
        vec![d.line_quarter, d.line_half]
    }
}

pub fn topology_registry() -> &'static Registry<dyn Topology> {
    static REG: OnceLock<Registry<dyn Topology>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Topology> = Registry::new("circuit topology");
        r.register("three-stage", Arc::new(ThreeStage));
        r.register("conventional", Arc::new(Conventional));
        r
    })
}

pub fn topology(name: &str) -> Result<Arc<dyn Topology>> {
    topology_registry().get(name)
}

pub(crate) fn check_ki_line(t: &dyn Topology, has_line: bool) -> Result<()> {
    if t.uses_ki_line() && !has_line {
        return Err(Error::InvalidParameter(format!("{} circuit needs a KI quarter-wave line", t.name())));
    }
    Ok(())
}
