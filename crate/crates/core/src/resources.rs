//! Gate-count sweeps for one mixer layer.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::circuit::{
    build_partial_mixer, count_gates, decompose, single_layer_circuit, Gate, MixerMode,
    RegisterLayout,
};
use crate::instance::{FjspInstance, Job, Operation};
use crate::qaoa::Problem;

#[derive(Debug, Clone, Serialize)]
pub struct GateCountRow {
    pub n: usize,
    pub family_size: usize,
    pub toffoli: usize,
    pub cnot: usize,
    pub single_qubit: usize,
    /// Clean ancillas needed by the multi-controlled NOT decomposition.
    pub ancilla: usize,
    /// Mean Toffoli + CNOT count of one partial mixer without its
    /// fractional gate.
    pub control_logic: f64,
}

/// Counts for one full layer `B(β)` of `problem`.
pub fn layer_gate_counts(problem: &Problem, mode: MixerMode) -> GateCountRow {
    let circuit = single_layer_circuit(&problem.graph, &problem.family, 0.0, mode);
    let counts = count_gates(&circuit.gates);
    let ancilla = decompose(&circuit).layout.ancilla().len();

    let mut layout = RegisterLayout::new(problem.n(), mode, problem.family.len());
    let layer = layout.push_layer();
    let control_logic = if problem.family.is_empty() {
        0.0
    } else {
        let total: usize = problem
            .family
            .iter()
            .enumerate()
            .map(|(slot, p)| {
                let gates =
                    build_partial_mixer(&problem.graph, p, 0.0, &layout, layer, slot);
                count_gates(
                    gates
                        .iter()
                        .filter(|g| !matches!(g, Gate::FractionalPermutation(_))),
                )
                .two_and_three_qubit()
            })
            .sum();
        total as f64 / problem.family.len() as f64
    };

    GateCountRow {
        n: problem.n(),
        family_size: problem.family.len(),
        toffoli: counts.toffoli,
        cnot: counts.cnot,
        single_qubit: counts.single_qubit,
        ancilla,
        control_logic,
    }
}

/// Random instance with exactly `vertices` assignments over three machines
/// and two time slots. `vertices` must be even and at least 2.
pub fn random_instance(rng: &mut impl Rng, vertices: usize) -> FjspInstance {
    assert!(vertices >= 2 && vertices.is_multiple_of(2));
    let machines = 3;
    let horizon = 2;
    let mut remaining = vertices / horizon as usize;
    let mut jobs: Vec<Job> = Vec::new();
    while remaining > 0 {
        let width = rng.gen_range(1..=2).min(remaining);
        remaining -= width;
        let first = rng.gen_range(0..machines);
        let eligible = (0..width).map(|i| ((first + i) % machines, rng.gen_range(1..=2)));
        let op = Operation::new(eligible);
        match jobs.last_mut() {
            Some(job) if job.operations.len() < 3 && rng.gen_bool(0.5) => {
                job.operations.push(op)
            }
            _ => jobs.push(Job {
                name: format!("J{}", jobs.len() + 1),
                operations: vec![op],
            }),
        }
    }
    let names = (1..=machines).map(|m| format!("M{m}")).collect();
    FjspInstance::new(names, horizon, jobs).expect("generated instance is valid")
}

/// Least-squares slope of `ln y` against `ln x`; nonpositive points are skipped.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct Slopes {
    pub family_size: f64,
    pub toffoli: f64,
    pub cnot: f64,
    pub single_qubit: f64,
    pub ancilla: f64,
    pub control_logic: f64,
    /// Toffoli + CNOT of the whole layer.
    pub layer: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateCountReport {
    pub rows: Vec<GateCountRow>,
    pub slopes: Slopes,
}

pub fn gate_count_report(problems: &[Problem], mode: MixerMode) -> GateCountReport {
    let rows: Vec<GateCountRow> = problems
        .iter()
        .map(|p| layer_gate_counts(p, mode))
        .collect();
    let fit = |f: fn(&GateCountRow) -> f64| {
        loglog_slope(&rows.iter().map(|r| (r.n as f64, f(r))).collect::<Vec<_>>())
    };
    let slopes = Slopes {
        family_size: fit(|r| r.family_size as f64),
        toffoli: fit(|r| r.toffoli as f64),
        cnot: fit(|r| r.cnot as f64),
        single_qubit: fit(|r| r.single_qubit as f64),
        ancilla: fit(|r| r.ancilla as f64),
        control_logic: fit(|r| r.control_logic),
        layer: fit(|r| (r.toffoli + r.cnot) as f64),
    };
    GateCountReport { rows, slopes }
}

impl GateCountReport {
    /// One row per instance, then a `slope` row with the fitted exponents.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,P_size,toffoli,cnot,single_qubit,ancilla,control_logic\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{:.3}",
                r.n, r.family_size, r.toffoli, r.cnot, r.single_qubit, r.ancilla, r.control_logic
            )
            .unwrap();
        }
        let s = &self.slopes;
        writeln!(
            out,
            "slope,{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
            s.family_size, s.toffoli, s.cnot, s.single_qubit, s.ancilla, s.control_logic
        )
        .unwrap();
        out
    }
}

/// Two instances per even size in `sizes`, seeded.
pub fn sweep_problems(sizes: impl IntoIterator<Item = usize>, seed: u64) -> Vec<Problem> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    sizes
        .into_iter()
        .flat_map(|n| [n, n])
        .map(|n| Problem::new(random_instance(&mut rng, n)))
        .collect()
}
