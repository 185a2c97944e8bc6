//! Grid-searches one layer on the three-machine instance and samples it.

use fjsp_mixer::circuit::MixerMode;
use fjsp_mixer::fixtures;
use fjsp_mixer::qaoa::{solve, OptimizeConfig, Problem, SolveConfig};

fn main() -> fjsp_mixer::Result<()> {
    let p = Problem::new(fixtures::three_machines());
    let config = SolveConfig {
        optimize: OptimizeConfig {
            layers: 1,
            grid: 8,
            refine_iterations: 40,
            mode: MixerMode::Corrected,
        },
        shots: 2000,
        seed: 11,
    };
    let r = solve(&p, &config)?;
    println!(
        "start makespan {} -> expected {:.4} at beta={:?}",
        r.initial_makespan, r.expected_cost, r.best_params.betas
    );
    println!(
        "optimal makespan {:?}: mass {:?} -> {:?}",
        r.optimal_makespan, r.initial_optimal_mass, r.optimal_mass
    );
    println!("feasible fraction {}", r.feasible_fraction);
    println!("best sampled schedule (makespan {:?}):", r.makespan);
    for a in &r.best_schedule {
        println!("  {a}");
    }
    Ok(())
}
