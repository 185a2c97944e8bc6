//! Builds the constraint graph of the two-job instance and lists its
//! feasible schedules.

use fjsp_mixer::graph::{build_graph, enumerate_feasible};
use fjsp_mixer::instance::{build_index, decode, makespan};
use fjsp_mixer::fixtures;

fn main() -> fjsp_mixer::Result<()> {
    let inst = fixtures::two_jobs();
    let index = build_index(&inst);
    let g = build_graph(&inst, &index);
    println!(
        "{} assignments, {} operations, {} conflict edges",
        g.vertex_count(),
        g.mark_count(),
        g.edge_count()
    );
    for (v, a) in index.assignments().iter().enumerate() {
        println!("  v{v:<2} {a}  neighbours {:?}", g.neighbors(v));
    }
    for x in enumerate_feasible(&g)? {
        let s = decode(&index, &x)?;
        println!("{x}  makespan {}  {s}", makespan(&inst, &s)?);
    }
    Ok(())
}
