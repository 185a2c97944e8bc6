//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on any input or validation error, 2 when
//! `verify` finds a corrected-mode feasibility violation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bits::BitString;
use crate::circuit::{single_layer_circuit, MixerMode};
use crate::control::{plan_transposition_path, shortest_transposition_path, Permutation};
use crate::error::{Error, Result};
use crate::instance::{decode, parse_instance, Assignment};
use crate::qaoa::{
    build_ansatz, solve, verify, OptimizeConfig, Problem, QaoaParams, SolveConfig,
};
use crate::resources::{gate_count_report, sweep_problems};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "fjsp-mixer", version, about = "Constraint-graph mixers for flexible job-shop QAOA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Corrected,
    Literal,
}

impl From<ModeArg> for MixerMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Corrected => MixerMode::Corrected,
            ModeArg::Literal => MixerMode::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathMethod {
    /// Two-phase plan, falling back to the shortest path.
    Auto,
    TwoPhase,
    Shortest,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constraint graph as JSON or Graphviz.
    Graph {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Every feasible schedule with its makespan.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Transposition path between two feasible schedules.
    Path {
        #[command(flatten)]
        common: Common,
        /// Source bit string; defaults to the greedy schedule.
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: PathMethod,
    },
    /// Gate-count sweep as CSV, or one layer's gate list.
    Gates {
        /// Dump the gate list of one mixer layer for this instance.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Smallest and largest vertex count of the sweep.
        #[arg(long, default_value_t = 8)]
        min_vertices: usize,
        #[arg(long, default_value_t = 40)]
        max_vertices: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Full-circuit simulation; prints the main-register distribution.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
        #[arg(long = "beta", required = true)]
        betas: Vec<f64>,
        #[arg(long = "gamma")]
        gammas: Vec<f64>,
        /// Initial bit string; defaults to the greedy schedule.
        #[arg(long)]
        initial: Option<String>,
    },
    /// Feasibility sweep in both modes and explorability over all pairs.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
    },
    /// Optimise the ansatz and sample it.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        /// Nelder–Mead iterations after the grid search.
        #[arg(long, default_value_t = 0)]
        refine: u64,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn load(common: &Common) -> Result<Problem> {
    let text = std::fs::read_to_string(&common.instance)?;
    Ok(Problem::new(parse_instance(&text)?))
}

fn parse_bits(problem: &Problem, text: &str) -> Result<BitString> {
    let bits: BitString = text.parse()?;
    if bits.len() != problem.n() {
        return Err(Error::LengthMismatch {
            expected: problem.n(),
            actual: bits.len(),
        });
    }
    Ok(bits)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn schedule_of(problem: &Problem, x: &BitString) -> Result<Vec<Assignment>> {
    Ok(decode(&problem.index, x)?.assignments().copied().collect())
}

struct Outcome {
    document: String,
    code: i32,
    output: Option<PathBuf>,
}

fn execute(command: Command) -> Result<Outcome> {
    let ok = |document: String, output: Option<PathBuf>| Outcome {
        document,
        code: 0,
        output,
    };
    match command {
        Command::Graph { common, format } => {
            let p = load(&common)?;
            let doc = match format {
                Format::Dot => p.graph.to_dot(&p.index),
                Format::Json => {
                    let edges: Vec<_> = p
                        .graph
                        .edges()
                        .map(|((u, v), kinds)| json!({ "u": u, "v": v, "kinds": kinds }))
                        .collect();
                    to_json(&json!({
                        "vertices": p.n(),
                        "mark_count": p.graph.mark_count(),
                        "edge_count": p.graph.edge_count(),
                        "family_size": p.family.len(),
                        "assignments": p.index.assignments(),
                        "edges": edges,
                        "degree_histogram": p.graph.degree_histogram(),
                    }))
                }
                other => {
                    return Err(Error::Validation(format!(
                        "graph supports json or dot, not {other:?}"
                    )))
                }
            };
            Ok(ok(doc, common.output))
        }
        Command::Enumerate { common } => {
            let p = load(&common)?;
            let rows = p
                .feasible_set()?
                .into_iter()
                .map(|x| {
                    Ok(json!({
                        "bits": x,
                        "makespan": p.cost.evaluate(&x),
                        "schedule": schedule_of(&p, &x)?,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ok(to_json(&rows), common.output))
        }
        Command::Path {
            common,
            from,
            to,
            method,
        } => {
            let p = load(&common)?;
            let x = match from {
                Some(s) => parse_bits(&p, &s)?,
                None => p.greedy_state()?,
            };
            let y = parse_bits(&p, &to)?;
            let family: Vec<Permutation> = p.family.iter().map(|q| (**q).clone()).collect();
            let shortest = || shortest_transposition_path(&p.graph, &family, &x, &y);
            let (plan, used) = match method {
                PathMethod::TwoPhase => (
                    plan_transposition_path(&p.graph, &p.instance, &p.index, &x, &y)?,
                    "two_phase",
                ),
                PathMethod::Shortest => (shortest()?, "shortest"),
                PathMethod::Auto => {
                    match plan_transposition_path(&p.graph, &p.instance, &p.index, &x, &y) {
                        Ok(plan) => (plan, "two_phase"),
                        Err(Error::Plan(_)) => (shortest()?, "shortest"),
                        Err(e) => return Err(e),
                    }
                }
            };
            let prefixes: Vec<_> = plan
                .prefix_images()
                .into_iter()
                .map(|s| {
                    let feasible = p.graph.is_feasible_unchecked(&s);
                    json!({ "bits": s, "feasible": feasible })
                })
                .collect();
            let doc = to_json(&json!({
                "method": used,
                "source": plan.source,
                "target": plan.target,
                "length": plan.len(),
                "steps": plan.steps,
                "prefixes": prefixes,
            }));
            Ok(ok(doc, common.output))
        }
        Command::Gates {
            instance,
            output,
            mode,
            beta,
            min_vertices,
            max_vertices,
            seed,
            format,
        } => {
            if let Some(path) = instance {
                let p = load(&Common {
                    instance: path,
                    output: None,
                })?;
                let c = single_layer_circuit(&p.graph, &p.family, beta, mode.into());
                return Ok(ok(c.to_text(), output));
            }
            if min_vertices < 2 || min_vertices > max_vertices {
                return Err(Error::Validation(
                    "need 2 <= min-vertices <= max-vertices".into(),
                ));
            }
            let start = min_vertices + min_vertices % 2;
            let report = gate_count_report(
                &sweep_problems((start..=max_vertices).step_by(4), seed),
                mode.into(),
            );
            let doc = match format {
                Format::Json => to_json(&report),
                _ => report.to_csv(),
            };
            Ok(ok(doc, output))
        }
        Command::Simulate {
            common,
            mode,
            betas,
            mut gammas,
            initial,
        } => {
            let p = load(&common)?;
            if gammas.is_empty() {
                gammas = vec![0.0; betas.len()];
            }
            let params = QaoaParams::new(betas, gammas)?;
            let x0 = match initial {
                Some(s) => parse_bits(&p, &s)?,
                None => p.greedy_state()?,
            };
            let (circuit, state) = build_ansatz(&p, &x0, &params, mode.into())?;
            let mut rows: Vec<(BitString, f64)> =
                state.marginal(circuit.layout.main()).into_iter().collect();
            rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let marginal: Vec<_> = rows
                .into_iter()
                .map(|(x, prob)| {
                    json!({
                        "bits": x,
                        "probability": prob,
                        "feasible": p.graph.is_feasible_unchecked(&x),
                        "makespan": p.cost.evaluate(&x),
                    })
                })
                .collect();
            let doc = to_json(&json!({
                "mode": MixerMode::from(mode),
                "params": params,
                "initial": x0,
                "qubits": circuit.layout.total_qubits(),
                "auxiliary_qubits": circuit.layout.auxiliary_count(),
                "support": state.support_size(),
                "max_norm_deviation": state.max_norm_deviation(),
                "pruned_mass": state.pruned_mass(),
                "marginal": marginal,
            }));
            Ok(ok(doc, common.output))
        }
        Command::Verify { common, mode } => {
            let p = load(&common)?;
            let report = verify(&p, mode.into())?;
            Ok(Outcome {
                code: if report.passed { 0 } else { 2 },
                document: to_json(&report),
                output: common.output,
            })
        }
        Command::Solve {
            common,
            mode,
            layers,
            grid,
            refine,
            shots,
            seed,
        } => {
            let p = load(&common)?;
            let config = SolveConfig {
                optimize: OptimizeConfig {
                    layers,
                    grid,
                    refine_iterations: refine,
                    mode: mode.into(),
                },
                shots,
                seed,
            };
            let report = solve(&p, &config)?;
            let histogram: BTreeMap<String, usize> = report
                .sample_histogram
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect();
            let doc = to_json(&json!({
                "mode": report.mode,
                "initial_state": report.initial_state,
                "initial_makespan": report.initial_makespan,
                "best_params": report.best_params,
                "expected_cost": report.expected_cost,
                "sample_histogram": histogram,
                "best_schedule": report.best_schedule,
                "makespan": report.makespan,
                "feasible_fraction": report.feasible_fraction,
                "optimal_makespan": report.optimal_makespan,
                "initial_optimal_mass": report.initial_optimal_mass,
                "optimal_mass": report.optimal_mass,
            }));
            Ok(ok(doc, common.output))
        }
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let written = match &outcome.output {
                Some(path) => std::fs::write(path, &outcome.document).map_err(Error::from),
                None => stdout
                    .write_all(outcome.document.as_bytes())
                    .map_err(Error::from),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
