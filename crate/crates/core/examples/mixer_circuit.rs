//! Prints one partial mixer as a gate list and its decomposed cost.

use std::sync::Arc;

use fjsp_mixer::circuit::{
    build_copy_layer, build_partial_mixer, count_gates, decompose, Circuit, MixerMode,
    RegisterLayout,
};
use fjsp_mixer::fixtures;
use fjsp_mixer::qaoa::Problem;

fn main() -> fjsp_mixer::Result<()> {
    let p = Problem::new(fixtures::two_jobs());
    let mut layout = RegisterLayout::new(p.n(), MixerMode::Corrected, p.family.len());
    let layer = layout.push_layer();
    let perm = Arc::clone(&p.family[0]);

    let mut gates = build_copy_layer(&layout, layer);
    gates.extend(build_partial_mixer(
        &p.graph,
        &perm,
        std::f64::consts::FRAC_PI_4,
        &layout,
        layer,
        0,
    ));
    let circuit = Circuit::new(layout, gates)?;
    print!("{}", circuit.to_text());

    let counts = count_gates(&circuit.gates);
    let flat = decompose(&circuit);
    println!(
        "# {} logical gates on {} qubits; toffoli={} cnot={} single={} with {} ancillas",
        circuit.gates.len(),
        circuit.layout.total_qubits(),
        counts.toffoli,
        counts.cnot,
        counts.single_qubit,
        flat.layout.ancilla().len()
    );
    Ok(())
}
