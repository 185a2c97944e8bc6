//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run alone with `cargo test -p fjsp-mixer --test acceptance`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use fjsp_mixer::bits::BitString;
use fjsp_mixer::circuit::{single_layer_circuit, MixerMode, RegisterLayout};
use fjsp_mixer::control::{chi, plan_transposition_path};
use fjsp_mixer::error::Error;
use fjsp_mixer::fixtures;
use fjsp_mixer::graph::enumerate_feasible_unbounded;
use fjsp_mixer::instance::{decode, satisfies_constraints, FjspInstance, Job, Operation};
use fjsp_mixer::qaoa::{
    build_ansatz, compare_modes, solve, verification_betas, verify_all_pairs, verify_feasibility,
    LayerChain, OptimizeConfig, Problem, QaoaParams, SolveConfig,
};
use fjsp_mixer::resources::{gate_count_report, sweep_problems};
use fjsp_mixer::sim::{DenseState, SparseState};

const MASS_TOLERANCE: f64 = 1e-10;
const OVERLAP_THRESHOLD: f64 = 1e-9;
const NORM_TOLERANCE: f64 = 1e-10;
const DENSE_TOLERANCE: f64 = 1e-10;
const CONTROL_LOGIC_SLOPE_MAX: f64 = 3.3;
const LAYER_SLOPE_MAX: f64 = 5.3;
const SHOTS: usize = 10_000;
const SEED: u64 = 20_240_601;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let e = start.elapsed();
    (e < limit, format!("{:.2?} (limit {:?})", e, limit))
}

/// Feasible set by scanning every bit string with the direct checker.
fn brute_force_feasible(problem: &Problem) -> Vec<BitString> {
    let n = problem.n();
    assert!(n <= 24);
    (0..1u64 << n)
        .map(|v| BitString::from_u64(n, v))
        .filter(|x| satisfies_constraints(&problem.instance, &decode(&problem.index, x).unwrap()))
        .collect()
}

fn graph_fidelity() -> Verdict {
    let start = Instant::now();
    let p = Problem::new(fixtures::two_jobs());
    let g = &p.graph;
    let cliques = g.op_ranges().iter().all(|r| {
        r.clone()
            .all(|u| r.clone().all(|v| u == v || g.has_edge(u, v)))
    });
    let mut disagreements = 0;
    for v in 0..1u64 << 10 {
        let x = BitString::from_u64(10, v);
        let direct = satisfies_constraints(&p.instance, &decode(&p.index, &x).unwrap());
        if direct != g.is_feasible(&x).unwrap() {
            disagreements += 1;
        }
    }
    let (fast, time) = within(start, Duration::from_secs(1));
    verdict(
        g.vertex_count() == 10 && g.mark_count() == 3 && cliques && disagreements == 0 && fast,
        format!(
            "N={} k={} cliques={} disagreements={}/1024 time={}",
            g.vertex_count(),
            g.mark_count(),
            cliques,
            disagreements,
            time
        ),
    )
}

fn control_predicate() -> Verdict {
    let start = Instant::now();
    let p = Problem::new(fixtures::two_jobs());
    let feasible = brute_force_feasible(&p);
    let mut checked = 0;
    let mut mismatches = 0;
    for x in &feasible {
        for perm in &p.family {
            let image = perm.apply(x).unwrap();
            let expected = feasible.contains(&image);
            if chi(&p.graph, perm, x) != expected {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    let (fast, time) = within(start, Duration::from_secs(1));
    verdict(
        mismatches == 0 && checked == 4 * 13 && fast,
        format!("|F|={} |P|={} cases={checked} mismatches={mismatches} time={time}", feasible.len(), p.family.len()),
    )
}

fn feasibility_preservation() -> Verdict {
    let start = Instant::now();
    let p = Problem::new(fixtures::two_jobs());
    let betas = verification_betas();
    let r = verify_feasibility(&p, &betas, MixerMode::Corrected).unwrap();
    let (fast, time) = within(start, Duration::from_secs(60));
    verdict(
        betas.len() == 15
            && r.trials == 4 * 15
            && r.max_infeasible_mass < MASS_TOLERANCE
            && r.max_register_mass < MASS_TOLERANCE
            && fast,
        format!(
            "trials={} max_infeasible={:.1e} max_a_b={:.1e} time={time}",
            r.trials, r.max_infeasible_mass, r.max_register_mass
        ),
    )
}

fn explorability() -> Verdict {
    let start = Instant::now();
    let p = Problem::new(fixtures::two_jobs().with_horizon(4).unwrap());
    let k_max = 2 * p.graph.mark_count();
    let chain = LayerChain::new(&p, MixerMode::Corrected);
    let results = verify_all_pairs(&chain, &verification_betas(), k_max).unwrap();
    let misses = results
        .iter()
        .filter(|r| !r.hit || r.overlap <= OVERLAP_THRESHOLD || r.k > k_max)
        .count();
    // reaching y along the plan is one of the summed histories
    let bound_violations = results
        .iter()
        .filter(|r| r.overlap < r.path_probability * (1.0 - 1e-12))
        .count();
    let max_k = results.iter().map(|r| r.k).max().unwrap_or(0);
    let min_overlap = results.iter().map(|r| r.overlap).fold(1.0, f64::min);
    let (fast, time) = within(start, Duration::from_secs(600));
    verdict(
        results.len() == 72 * 72 && misses == 0 && bound_violations == 0 && fast,
        format!(
            "pairs={} misses={misses} max_k={max_k}<={k_max} min_overlap={min_overlap:.2e} bound_violations={bound_violations} time={time}",
            results.len()
        ),
    )
}

fn transposition_plans() -> Verdict {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for horizon in [4u32, 8] {
        let p = Problem::new(fixtures::two_jobs().with_horizon(horizon).unwrap());
        let feasible = enumerate_feasible_unbounded(&p.graph);
        let half = f64::from(horizon) / 2.0;
        let short: Vec<&BitString> = feasible
            .iter()
            .filter(|x| p.cost.evaluate(x) < half)
            .collect();
        let mut planned = 0;
        for x in &short {
            for y in &short {
                match plan_transposition_path(&p.graph, &p.instance, &p.index, x, y) {
                    Ok(plan) => {
                        let prefixes_ok = plan
                            .prefix_images()
                            .iter()
                            .all(|s| p.graph.is_feasible(s).unwrap());
                        ok &= prefixes_ok && plan.final_image() == **y;
                        planned += 1;
                    }
                    Err(_) => ok = false,
                }
            }
        }
        detail.push(format!(
            "horizon {horizon}: {}/{} pairs planned",
            planned,
            short.len() * short.len()
        ));
    }
    // beyond the half-horizon filter: every pair whose shifted parking slots fit
    let p = Problem::new(fixtures::two_jobs().with_horizon(4).unwrap());
    let feasible = p.feasible_set().unwrap();
    let mut planned = 0;
    for x in &feasible {
        for y in &feasible {
            match plan_transposition_path(&p.graph, &p.instance, &p.index, x, y) {
                Ok(plan) => {
                    planned += 1;
                    ok &= plan.prefix_images().iter().all(|s| p.graph.is_feasible(s).unwrap());
                }
                Err(Error::Plan(_)) => {}
                Err(_) => ok = false,
            }
        }
    }
    detail.push(format!("horizon 4 within parking room: {planned} pairs planned"));
    let (fast, time) = within(start, Duration::from_secs(10));
    verdict(ok && fast, format!("{} time={time}", detail.join(", ")))
}

fn register_accounting() -> Verdict {
    let n = 10;
    let family = 13;
    let mut literal = RegisterLayout::new(n, MixerMode::Literal, family);
    let mut corrected = RegisterLayout::new(n, MixerMode::Corrected, family);
    let mut counts = Vec::new();
    let mut corrected_counts = Vec::new();
    for _ in 1..=3 {
        literal.push_layer();
        corrected.push_layer();
        counts.push(literal.auxiliary_count());
        corrected_counts.push(corrected.auxiliary_count());
    }
    verdict(
        counts == [32, 44, 56] && literal.total_qubits() == n + 56,
        format!("aux(k=1,2,3)={counts:?}; per-mixer z allocation uses {corrected_counts:?}"),
    )
}

fn gate_scaling() -> Verdict {
    let start = Instant::now();
    let problems = sweep_problems((8..=40).step_by(4), SEED);
    let report = gate_count_report(&problems, MixerMode::Corrected);
    let ns: Vec<usize> = report.rows.iter().map(|r| r.n).collect();
    let range_ok = ns.iter().all(|&n| (8..=40).contains(&n));
    let s = &report.slopes;
    let (fast, time) = within(start, Duration::from_secs(60));
    verdict(
        range_ok && s.control_logic <= CONTROL_LOGIC_SLOPE_MAX && s.layer <= LAYER_SLOPE_MAX && fast,
        format!(
            "instances={} control_logic_slope={:.3}<={CONTROL_LOGIC_SLOPE_MAX} layer_slope={:.3}<={LAYER_SLOPE_MAX} time={time}",
            ns.len(),
            s.control_logic,
            s.layer
        ),
    )
}

fn single_op_instance(machines: usize, horizon: u32) -> FjspInstance {
    let names = (1..=machines).map(|m| format!("M{m}")).collect();
    let op = Operation::new((0..machines).map(|m| (m, 1)));
    FjspInstance::new(
        names,
        horizon,
        vec![Job {
            name: "J1".into(),
            operations: vec![op],
        }],
    )
    .unwrap()
}

fn dense_crosscheck(problem: &Problem, mode: MixerMode, beta: f64) -> (usize, f64, f64) {
    let c = single_layer_circuit(&problem.graph, &problem.family, beta, mode);
    let q = c.layout.total_qubits();
    let n = problem.n();
    // uniform superposition with distinct phases over every main string
    let amps: Vec<(BitString, Complex64)> = (0..1u64 << n)
        .map(|v| {
            (
                BitString::from_u64(n, v),
                Complex64::from_polar(1.0 + v as f64 / 7.0, 0.3 * v as f64),
            )
        })
        .collect();
    let mut sparse = SparseState::from_amplitudes(q, amps.clone()).unwrap();
    let mut dense_vec = vec![Complex64::default(); 1 << q];
    for (k, a) in sparse.amplitudes() {
        dense_vec[k.low_u64() as usize] = *a;
    }
    let mut dense = DenseState::from_vec(q, dense_vec).unwrap();
    sparse.apply_circuit(&c).unwrap();
    dense.apply_circuit(&c);
    (q, dense.max_difference(&sparse), sparse.max_norm_deviation())
}

fn simulator_exactness() -> Verdict {
    let mut max_norm = 0.0f64;
    let two = Problem::new(fixtures::two_jobs());
    for mode in [MixerMode::Corrected, MixerMode::Literal] {
        let r = verify_feasibility(&two, &verification_betas(), mode).unwrap();
        max_norm = max_norm.max(r.max_norm_deviation);
    }
    let wide = Problem::new(fixtures::two_jobs().with_horizon(4).unwrap());
    let chain = LayerChain::new(&wide, MixerMode::Corrected);
    let x0 = wide.greedy_state().unwrap();
    chain.run(&x0, &[PI / 16.0; 4]).unwrap();
    max_norm = max_norm.max(chain.max_norm_deviation());
    let params = QaoaParams::new(vec![0.4, 1.2], vec![0.7, 2.1]).unwrap();
    for mode in [MixerMode::Corrected, MixerMode::Literal] {
        let (_, s) = build_ansatz(&two, &two.greedy_state().unwrap(), &params, mode).unwrap();
        max_norm = max_norm.max(s.max_norm_deviation());
    }

    let mut max_diff = 0.0f64;
    let mut sizes = Vec::new();
    for (problem, mode) in [
        (Problem::new(single_op_instance(3, 1)), MixerMode::Corrected),
        (Problem::new(single_op_instance(3, 1)), MixerMode::Literal),
        (Problem::new(single_op_instance(2, 2)), MixerMode::Literal),
    ] {
        for beta in [PI / 5.0, 1.1] {
            let (q, diff, norm) = dense_crosscheck(&problem, mode, beta);
            max_diff = max_diff.max(diff);
            max_norm = max_norm.max(norm);
            sizes.push(q);
        }
    }
    sizes.dedup();
    verdict(
        max_norm < NORM_TOLERANCE && max_diff < DENSE_TOLERANCE && sizes.iter().all(|&q| q <= 18),
        format!("max_norm_deviation={max_norm:.1e} dense_max_diff={max_diff:.1e} qubits={sizes:?}"),
    )
}

fn end_to_end() -> Verdict {
    let start = Instant::now();
    let p = Problem::new(fixtures::two_jobs());
    let config = SolveConfig {
        optimize: OptimizeConfig {
            layers: 1,
            grid: 8,
            refine_iterations: 0,
            mode: MixerMode::Corrected,
        },
        shots: SHOTS,
        seed: SEED,
    };
    let report = solve(&p, &config).unwrap();
    let sampled: usize = report.sample_histogram.values().sum();
    let all_feasible = sampled == SHOTS && report.feasible_fraction == 1.0;
    let optimum = brute_force_feasible(&p)
        .iter()
        .map(|x| p.cost.evaluate(x))
        .fold(f64::INFINITY, f64::min);
    let initial = report.initial_optimal_mass.unwrap();
    let optimised = report.optimal_mass.unwrap();
    let (fast, time) = within(start, Duration::from_secs(300));
    verdict(
        all_feasible && report.optimal_makespan == Some(optimum) && optimised > initial && fast,
        format!(
            "feasible_fraction={} min_makespan={optimum} initial_x0_makespan={} optimal_mass initial={initial} optimised={optimised} time={time}",
            report.feasible_fraction, report.initial_makespan
        ),
    )
}

fn mode_comparison() -> Verdict {
    let p = Problem::new(fixtures::two_jobs());
    match compare_modes(&p, &verification_betas()) {
        Ok(r) => {
            let json = serde_json::to_value(&r).unwrap();
            let fields_present = ["max_infeasible_mass", "max_multiply_permuted_mass"]
                .iter()
                .all(|f| json["literal"][f].is_number() && json["corrected"][f].is_number());
            verdict(
                fields_present,
                format!(
                    "literal: infeasible={:.3e} multiply_permuted={:.3e} failing_cases={}/{}; corrected: infeasible={:.1e} multiply_permuted={:.1e}",
                    r.literal.max_infeasible_mass,
                    r.literal.max_multiply_permuted_mass,
                    r.literal.failures.len(),
                    r.literal.trials,
                    r.corrected.max_infeasible_mass,
                    r.corrected.max_multiply_permuted_mass
                ),
            )
        }
        Err(e) => verdict(false, format!("report failed: {e}")),
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 graph fidelity", graph_fidelity),
        ("2 control predicate", control_predicate),
        ("3 feasibility preservation", feasibility_preservation),
        ("4 explorability", explorability),
        ("5 transposition plans", transposition_plans),
        ("6 register accounting", register_accounting),
        ("7 gate-count scaling", gate_scaling),
        ("8 simulator exactness", simulator_exactness),
        ("9 end-to-end optimisation", end_to_end),
        ("10 mode comparison report", mode_comparison),
    ];
    let mut outcomes = BTreeMap::new();
    for (name, check) in criteria {
        let v = check();
        println!(
            "criterion {name}: {} | {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
        outcomes.insert(name, v.passed);
    }
    let failed: Vec<_> = outcomes.iter().filter(|(_, ok)| !**ok).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {failed:?}");
        ExitCode::FAILURE
    }
}
