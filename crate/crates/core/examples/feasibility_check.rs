//! One mixer layer on every feasible schedule of the two-job instance, in
//! both wiring modes.

use fjsp_mixer::fixtures;
use fjsp_mixer::qaoa::{compare_modes, verification_betas, Problem};

fn main() -> fjsp_mixer::Result<()> {
    let problem = Problem::new(fixtures::two_jobs());
    let report = compare_modes(&problem, &verification_betas())?;
    for r in [&report.corrected, &report.literal] {
        println!(
            "{:<9} trials={} infeasible={:.3e} multiply_permuted={:.3e} a/b={:.3e} max_support={} passed={}",
            r.mode.to_string(),
            r.trials,
            r.max_infeasible_mass,
            r.max_multiply_permuted_mass,
            r.max_register_mass,
            r.max_support,
            r.passed
        );
    }
    if let Some(w) = report.literal.failures.first() {
        println!(
            "literal witness: x={} beta={:.4} infeasible={:.3e}",
            w.input, w.beta, w.infeasible_mass
        );
    }
    Ok(())
}
