//! Bundled sample instances.

use crate::instance::{parse_instance, FjspInstance};

pub const TWO_JOBS_JSON: &str = include_str!("../data/two_jobs.json");
pub const MINIMAL_JSON: &str = include_str!("../data/minimal.json");
pub const THREE_MACHINES_JSON: &str = include_str!("../data/three_machines.json");

/// Two jobs, three operations, two machines, unit durations, two slots.
/// Job 2 may only run on the second machine.
pub fn two_jobs() -> FjspInstance {
    parse_instance(TWO_JOBS_JSON).expect("bundled instance parses")
}

/// One job with one operation on one machine, one slot.
pub fn minimal() -> FjspInstance {
    parse_instance(MINIMAL_JSON).expect("bundled instance parses")
}

/// Mixed durations on three machines; used where unit durations would hide
/// order and machine overlaps.
pub fn three_machines() -> FjspInstance {
    parse_instance(THREE_MACHINES_JSON).expect("bundled instance parses")
}
