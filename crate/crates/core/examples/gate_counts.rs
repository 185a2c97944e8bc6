//! Gate counts of one mixer layer over random instances, as CSV.

use fjsp_mixer::circuit::MixerMode;
use fjsp_mixer::resources::{gate_count_report, sweep_problems};

fn main() {
    let problems = sweep_problems((8..=40).step_by(4), 7);
    let report = gate_count_report(&problems, MixerMode::Corrected);
    print!("{}", report.to_csv());
    println!("# layer toffoli+cnot slope {:.3}", report.slopes.layer);
}
