//! Walks between two feasible schedules one swap at a time.

use fjsp_mixer::control::{plan_transposition_path, shortest_transposition_path, Permutation};
use fjsp_mixer::fixtures;
use fjsp_mixer::instance::decode;
use fjsp_mixer::qaoa::Problem;

fn main() -> fjsp_mixer::Result<()> {
    let p = Problem::new(fixtures::two_jobs().with_horizon(4)?);
    let feasible = p.feasible_set()?;
    let (x, y) = (&feasible[0], &feasible[feasible.len() - 1]);

    let plan = match plan_transposition_path(&p.graph, &p.instance, &p.index, x, y) {
        Ok(plan) => {
            println!("two-phase plan");
            plan
        }
        Err(e) => {
            println!("two-phase plan unavailable ({e}); using shortest path");
            let family: Vec<Permutation> = p.family.iter().map(|q| (**q).clone()).collect();
            shortest_transposition_path(&p.graph, &family, x, y)?
        }
    };
    println!("start {x}  {}", decode(&p.index, x)?);
    for ((a, b), s) in plan.steps.iter().zip(plan.prefix_images()) {
        println!(
            "swap ({a:>2} {b:>2}) -> {s}  feasible={}  {}",
            p.graph.is_feasible(&s)?,
            decode(&p.index, &s)?
        );
    }
    Ok(())
}
