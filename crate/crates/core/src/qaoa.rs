//! Alternating mixer / phase-separator ansatz and its verification harnesses.
//!
//! Each mixer layer starts by copying the main register into a fresh `y`
//! block that is never uncomputed. Branches with different main registers
//! at the start of a layer are therefore orthogonal on that layer's trash,
//! and the main-register distribution after `p` layers is exactly a Markov
//! chain whose transition row for `x` is the main marginal of one layer
//! applied to `|x⟩ ⊗ |0⟩`. [`LayerChain`] evaluates the ansatz this way,
//! caching each row per `(β, x)`. Diagonal phases commute with that
//! argument, so the measured distribution does not depend on the `γ`
//! angles. [`build_ansatz`] simulates the full circuit directly and is used
//! to cross-check the chain.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use argmin::core::{CostFunction as ArgminCost, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitString;
use crate::circuit::{
    build_layer_mixer, single_layer_circuit, Circuit, Gate, MixerMode, PhaseFunction,
    RegisterLayout,
};
use crate::control::{
    plan_transposition_path, shortest_transposition_path, transposition_family, Permutation,
};
use crate::error::{check_len, Error, Result};
use crate::graph::{build_graph, enumerate_feasible, ConstraintGraph};
use crate::instance::{
    build_index, decode, greedy_schedule, makespan, encode, AssignmentIndex, FjspInstance,
};
use crate::sim::{sample, SparseState};

/// Mass threshold below which a register or subspace counts as empty.
pub const MASS_TOLERANCE: f64 = 1e-10;
/// Smallest overlap accepted as reaching a target state.
pub const OVERLAP_THRESHOLD: f64 = 1e-9;

/// Grid values closer than this count as ties; the earlier point wins.
const TIE_TOLERANCE: f64 = 1e-12;

/// Probability of each main-register string.
pub type Distribution = BTreeMap<BitString, f64>;

/// `{π r / 16 : r = 1..15}`.
pub fn verification_betas() -> Vec<f64> {
    (1..16).map(|r| PI * r as f64 / 16.0).collect()
}

/// Makespan of the decoded schedule; infeasible strings are scored the
/// same way and flagged by the caller.
#[derive(Debug, Clone)]
pub struct CostFunction {
    instance: FjspInstance,
    index: AssignmentIndex,
}

impl CostFunction {
    pub fn new(instance: FjspInstance, index: AssignmentIndex) -> Self {
        Self { instance, index }
    }

    pub fn evaluate(&self, x: &BitString) -> f64 {
        let schedule = decode(&self.index, x).expect("main register width matches the index");
        makespan(&self.instance, &schedule).expect("decoded assignments are valid") as f64
    }
}

impl PhaseFunction for CostFunction {
    fn value(&self, main: &BitString) -> f64 {
        self.evaluate(main)
    }
}

/// An instance with everything the mixer needs precomputed.
#[derive(Debug, Clone)]
pub struct Problem {
    pub instance: FjspInstance,
    pub index: AssignmentIndex,
    pub graph: ConstraintGraph,
    pub family: Vec<Arc<Permutation>>,
    pub cost: Arc<CostFunction>,
}

impl Problem {
    pub fn new(instance: FjspInstance) -> Self {
        let index = build_index(&instance);
        let graph = build_graph(&instance, &index);
        let family = transposition_family(&graph)
            .into_iter()
            .map(Arc::new)
            .collect();
        let cost = Arc::new(CostFunction::new(instance.clone(), index.clone()));
        Self {
            instance,
            index,
            graph,
            family,
            cost,
        }
    }

    pub fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn feasible_set(&self) -> Result<Vec<BitString>> {
        enumerate_feasible(&self.graph)
    }

    /// Basis string of the greedy schedule.
    pub fn greedy_state(&self) -> Result<BitString> {
        encode(&self.index, &greedy_schedule(&self.instance)?)
    }

    fn require_feasible(&self, x: &BitString) -> Result<()> {
        if self.graph.is_feasible(x)? {
            Ok(())
        } else {
            Err(Error::Validation(format!("initial state {x} is not feasible")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaoaParams {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || betas.len() != gammas.len() {
            return Err(Error::Validation(format!(
                "need the same positive number of betas and gammas, got {} and {}",
                betas.len(),
                gammas.len()
            )));
        }
        if betas.iter().chain(&gammas).any(|a| !a.is_finite()) {
            return Err(Error::Validation("angles must be finite".into()));
        }
        Ok(Self { betas, gammas })
    }

    pub fn layers(&self) -> usize {
        self.betas.len()
    }
}

/// Multiplies every amplitude by `e^{−iγ f(main)}`.
pub fn phase_separate(state: &mut SparseState, gamma: f64, cost: &Arc<CostFunction>, n: usize) {
    state.apply_gate(&Gate::DiagonalPhase {
        register: 0..n,
        gamma,
        function: Arc::clone(cost) as Arc<dyn PhaseFunction>,
    });
}

/// `p` layers of mixer then phase separator, each layer on fresh trash.
pub fn build_ansatz_circuit(problem: &Problem, params: &QaoaParams, mode: MixerMode) -> Circuit {
    let n = problem.n();
    let mut layout = RegisterLayout::new(n, mode, problem.family.len());
    let mut gates = Vec::new();
    for (&beta, &gamma) in params.betas.iter().zip(&params.gammas) {
        let layer = layout.push_layer();
        gates.extend(build_layer_mixer(
            &problem.graph,
            &problem.family,
            beta,
            &layout,
            layer,
        ));
        gates.push(Gate::DiagonalPhase {
            register: 0..n,
            gamma,
            function: Arc::clone(&problem.cost) as Arc<dyn PhaseFunction>,
        });
    }
    Circuit::new(layout, gates).expect("builder emits valid gates")
}

/// Full-register simulation of the ansatz from `|x0⟩ ⊗ |0⟩`.
pub fn build_ansatz(
    problem: &Problem,
    x0: &BitString,
    params: &QaoaParams,
    mode: MixerMode,
) -> Result<(Circuit, SparseState)> {
    problem.require_feasible(x0)?;
    let circuit = build_ansatz_circuit(problem, params, mode);
    let mut state = SparseState::basis(circuit.layout.total_qubits(), x0);
    state.apply_circuit(&circuit)?;
    Ok((circuit, state))
}

pub fn expected_cost(dist: &Distribution, cost: &CostFunction) -> f64 {
    dist.iter().map(|(x, p)| p * cost.evaluate(x)).sum()
}

/// One layer applied to a single basis state.
#[derive(Debug, Clone)]
pub struct LayerOutcome {
    pub main: Vec<(BitString, f64)>,
    /// Probability that `a` or `b` is left nonzero.
    pub register_mass: f64,
    pub norm_deviation: f64,
    pub support: usize,
}

/// Cached single-layer transitions for one mode.
pub struct LayerChain<'p> {
    problem: &'p Problem,
    mode: MixerMode,
    circuits: Mutex<HashMap<u64, Arc<Circuit>>>,
    outcomes: Mutex<HashMap<(u64, BitString), Arc<LayerOutcome>>>,
}

impl<'p> LayerChain<'p> {
    pub fn new(problem: &'p Problem, mode: MixerMode) -> Self {
        Self {
            problem,
            mode,
            circuits: Mutex::new(HashMap::new()),
            outcomes: Mutex::new(HashMap::new()),
        }
    }

    pub fn mode(&self) -> MixerMode {
        self.mode
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    fn circuit(&self, beta: f64) -> Arc<Circuit> {
        let mut circuits = self.circuits.lock().unwrap();
        Arc::clone(circuits.entry(beta.to_bits()).or_insert_with(|| {
            Arc::new(single_layer_circuit(
                &self.problem.graph,
                &self.problem.family,
                beta,
                self.mode,
            ))
        }))
    }

    pub fn outcome(&self, beta: f64, x: &BitString) -> Result<Arc<LayerOutcome>> {
        check_len(self.problem.n(), x.len())?;
        let key = (beta.to_bits(), x.clone());
        if let Some(hit) = self.outcomes.lock().unwrap().get(&key) {
            return Ok(Arc::clone(hit));
        }
        let circuit = self.circuit(beta);
        let layout = &circuit.layout;
        let mut state = SparseState::basis(layout.total_qubits(), x);
        state.apply_circuit(&circuit)?;
        let shared = layout.a().start..layout.b().end;
        let outcome = Arc::new(LayerOutcome {
            main: state.marginal(layout.main()).into_iter().collect(),
            register_mass: state.nonzero_probability(shared),
            norm_deviation: state.max_norm_deviation(),
            support: state.support_size(),
        });
        self.outcomes
            .lock()
            .unwrap()
            .insert(key, Arc::clone(&outcome));
        Ok(outcome)
    }

    /// Largest norm deviation over every cached single-layer run.
    pub fn max_norm_deviation(&self) -> f64 {
        self.outcomes
            .lock()
            .unwrap()
            .values()
            .map(|o| o.norm_deviation)
            .fold(0.0, f64::max)
    }

    /// Pushes a distribution through one layer.
    pub fn step(&self, dist: &Distribution, beta: f64) -> Result<Distribution> {
        let rows: Vec<Arc<LayerOutcome>> = dist
            .keys()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|x| self.outcome(beta, x))
            .collect::<Result<_>>()?;
        let mut out = Distribution::new();
        for ((_, p), row) in dist.iter().zip(rows) {
            for (y, q) in &row.main {
                *out.entry(y.clone()).or_insert(0.0) += p * q;
            }
        }
        Ok(out)
    }

    pub fn run(&self, x0: &BitString, betas: &[f64]) -> Result<Distribution> {
        let mut dist = Distribution::from([(x0.clone(), 1.0)]);
        for &beta in betas {
            dist = self.step(&dist, beta)?;
        }
        Ok(dist)
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeConfig {
    pub layers: usize,
    pub grid: usize,
    /// Nelder–Mead iterations after the grid search; zero disables it.
    pub refine_iterations: u64,
    pub mode: MixerMode,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            layers: 1,
            grid: 8,
            refine_iterations: 0,
            mode: MixerMode::Corrected,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Optimum {
    pub params: QaoaParams,
    pub expected_cost: f64,
    pub grid_points: usize,
    pub refined: bool,
}

fn grid_tuples(layers: usize, grid: usize) -> impl Iterator<Item = Vec<f64>> {
    let dims = 2 * layers;
    let total = grid.pow(dims as u32);
    (0..total).map(move |mut i| {
        let mut digits = vec![0usize; dims];
        for d in (0..dims).rev() {
            digits[d] = i % grid;
            i /= grid;
        }
        digits
            .into_iter()
            .map(|r| PI * r as f64 / grid as f64)
            .collect()
    })
}

fn split_params(flat: &[f64]) -> QaoaParams {
    QaoaParams {
        betas: flat.iter().step_by(2).copied().collect(),
        gammas: flat.iter().skip(1).step_by(2).copied().collect(),
    }
}

struct Objective<'a, 'p> {
    chain: &'a LayerChain<'p>,
    x0: &'a BitString,
}

impl ArgminCost for Objective<'_, '_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, flat: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let params = split_params(flat);
        let dist = self.chain.run(self.x0, &params.betas)?;
        Ok(expected_cost(&dist, &self.chain.problem.cost))
    }
}

/// Exhaustive grid over `(β₁, γ₁, …, β_p, γ_p)`, each angle in
/// `{π r / R : r = 0..R−1}`, keeping the first minimum; then an optional
/// Nelder–Mead refinement from that point, kept only if it improves.
pub fn optimize(problem: &Problem, x0: &BitString, config: &OptimizeConfig) -> Result<Optimum> {
    problem.require_feasible(x0)?;
    if config.layers == 0 || config.grid == 0 {
        return Err(Error::Validation("layers and grid must be positive".into()));
    }
    if config.layers > 2 {
        return Err(Error::Validation(
            "grid search supports at most two layers".into(),
        ));
    }
    let chain = LayerChain::new(problem, config.mode);
    let mut by_betas: HashMap<Vec<u64>, f64> = HashMap::new();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut grid_points = 0;
    for flat in grid_tuples(config.layers, config.grid) {
        grid_points += 1;
        let params = split_params(&flat);
        let key: Vec<u64> = params.betas.iter().map(|b| b.to_bits()).collect();
        let value = match by_betas.get(&key) {
            Some(&v) => v,
            None => {
                let v = expected_cost(&chain.run(x0, &params.betas)?, &problem.cost);
                by_betas.insert(key, v);
                v
            }
        };
        if best.as_ref().is_none_or(|(_, b)| value < *b - TIE_TOLERANCE) {
            best = Some((flat, value));
        }
    }
    let (mut flat, mut value) = best.expect("grid is nonempty");
    let mut refined = false;
    if config.refine_iterations > 0 {
        let step = PI / config.grid as f64 / 2.0;
        let mut simplex = vec![flat.clone()];
        for d in 0..flat.len() {
            let mut v = flat.clone();
            v[d] += step;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-8)
            .map_err(|e| Error::Validation(e.to_string()))?;
        let result = Executor::new(Objective { chain: &chain, x0 }, solver)
            .configure(|s| s.max_iters(config.refine_iterations))
            .run()
            .map_err(|e| Error::Validation(format!("refinement failed: {e}")))?;
        let state = result.state();
        if let Some(p) = state.get_best_param() {
            if state.get_best_cost() < value - TIE_TOLERANCE {
                flat = p.clone();
                value = state.get_best_cost();
                refined = true;
            }
        }
    }
    Ok(Optimum {
        params: split_params(&flat),
        expected_cost: value,
        grid_points,
        refined,
    })
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub optimize: OptimizeConfig,
    pub shots: usize,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            optimize: OptimizeConfig::default(),
            shots: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub mode: MixerMode,
    pub initial_state: BitString,
    pub initial_makespan: f64,
    pub best_params: QaoaParams,
    pub expected_cost: f64,
    pub distribution: BTreeMap<BitString, f64>,
    pub sample_histogram: BTreeMap<BitString, usize>,
    pub best_schedule: Vec<String>,
    pub makespan: Option<f64>,
    pub feasible_fraction: f64,
    /// Smallest makespan over all feasible schedules, when enumerable.
    pub optimal_makespan: Option<f64>,
    pub initial_optimal_mass: Option<f64>,
    pub optimal_mass: Option<f64>,
}

/// Greedy start, parameter search, then sampling of the optimised state.
pub fn solve(problem: &Problem, config: &SolveConfig) -> Result<SolveReport> {
    let x0 = problem.greedy_state()?;
    let optimum = optimize(problem, &x0, &config.optimize)?;
    let chain = LayerChain::new(problem, config.optimize.mode);
    let dist = chain.run(&x0, &optimum.params.betas)?;
    let histogram = sample(&dist, config.shots, config.seed)?;

    let feasible_shots: usize = histogram
        .iter()
        .filter(|(x, _)| problem.graph.is_feasible_unchecked(x))
        .map(|(_, c)| c)
        .sum();
    let best = histogram
        .keys()
        .filter(|x| problem.graph.is_feasible_unchecked(x))
        .min_by(|a, b| {
            problem
                .cost
                .evaluate(a)
                .total_cmp(&problem.cost.evaluate(b))
        })
        .cloned();
    let best_schedule = match &best {
        Some(x) => decode(&problem.index, x)?
            .assignments()
            .map(|a| a.to_string())
            .collect(),
        None => Vec::new(),
    };

    let optimal_makespan = problem.feasible_set().ok().and_then(|f| {
        f.iter()
            .map(|x| problem.cost.evaluate(x))
            .min_by(f64::total_cmp)
    });
    let mass_at = |d: &Distribution, target: f64| {
        d.iter()
            .filter(|(x, _)| {
                problem.graph.is_feasible_unchecked(x) && problem.cost.evaluate(x) == target
            })
            .map(|(_, p)| p)
            .sum::<f64>()
    };
    let initial = Distribution::from([(x0.clone(), 1.0)]);

    Ok(SolveReport {
        mode: config.optimize.mode,
        initial_makespan: problem.cost.evaluate(&x0),
        initial_state: x0,
        best_params: optimum.params,
        expected_cost: optimum.expected_cost,
        sample_histogram: histogram,
        best_schedule,
        makespan: best.map(|x| problem.cost.evaluate(&x)),
        feasible_fraction: if config.shots == 0 {
            1.0
        } else {
            feasible_shots as f64 / config.shots as f64
        },
        optimal_makespan,
        initial_optimal_mass: optimal_makespan.map(|m| mass_at(&initial, m)),
        optimal_mass: optimal_makespan.map(|m| mass_at(&dist, m)),
        distribution: dist,
    })
}

/// One `(x, β)` case of the feasibility sweep.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityCase {
    pub input: BitString,
    pub beta: f64,
    pub infeasible_mass: f64,
    /// Mass on strings that are neither `x` nor one family image of `x`.
    pub multiply_permuted_mass: f64,
    pub register_mass: f64,
    pub norm_deviation: f64,
    pub support: usize,
}

impl FeasibilityCase {
    pub fn passed(&self) -> bool {
        self.infeasible_mass < MASS_TOLERANCE && self.register_mass < MASS_TOLERANCE
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub mode: MixerMode,
    pub trials: usize,
    pub max_infeasible_mass: f64,
    pub max_multiply_permuted_mass: f64,
    pub max_register_mass: f64,
    pub max_norm_deviation: f64,
    pub max_support: usize,
    /// Cases with nonzero infeasible or register mass; carries the witness.
    pub failures: Vec<FeasibilityCase>,
    pub passed: bool,
}

/// One mixer layer on every feasible basis state at every angle.
pub fn verify_feasibility(
    problem: &Problem,
    betas: &[f64],
    mode: MixerMode,
) -> Result<FeasibilityReport> {
    let feasible = problem.feasible_set()?;
    let chain = LayerChain::new(problem, mode);
    let cases: Vec<(BitString, f64)> = feasible
        .iter()
        .flat_map(|x| betas.iter().map(move |&b| (x.clone(), b)))
        .collect();
    let results: Vec<FeasibilityCase> = cases
        .par_iter()
        .map(|(x, beta)| {
            let out = chain.outcome(*beta, x)?;
            let mut neighbourhood: Vec<BitString> = problem
                .family
                .iter()
                .map(|p| p.apply_unchecked(x))
                .collect();
            neighbourhood.push(x.clone());
            let mut infeasible = 0.0;
            let mut multiple = 0.0;
            for (y, p) in &out.main {
                if !problem.graph.is_feasible_unchecked(y) {
                    infeasible += p;
                }
                if !neighbourhood.contains(y) {
                    multiple += p;
                }
            }
            Ok(FeasibilityCase {
                input: x.clone(),
                beta: *beta,
                infeasible_mass: infeasible,
                multiply_permuted_mass: multiple,
                register_mass: out.register_mass,
                norm_deviation: out.norm_deviation,
                support: out.support,
            })
        })
        .collect::<Result<_>>()?;
    let max = |f: fn(&FeasibilityCase) -> f64| results.iter().map(f).fold(0.0, f64::max);
    let failures: Vec<FeasibilityCase> =
        results.iter().filter(|c| !c.passed()).cloned().collect();
    Ok(FeasibilityReport {
        mode,
        trials: results.len(),
        max_infeasible_mass: max(|c| c.infeasible_mass),
        max_multiply_permuted_mass: max(|c| c.multiply_permuted_mass),
        max_register_mass: max(|c| c.register_mass),
        max_norm_deviation: max(|c| c.norm_deviation),
        max_support: results.iter().map(|c| c.support).max().unwrap_or(0),
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeComparison {
    pub corrected: FeasibilityReport,
    pub literal: FeasibilityReport,
}

pub fn compare_modes(problem: &Problem, betas: &[f64]) -> Result<ModeComparison> {
    Ok(ModeComparison {
        corrected: verify_feasibility(problem, betas, MixerMode::Corrected)?,
        literal: verify_feasibility(problem, betas, MixerMode::Literal)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathSource {
    /// Park-then-land construction.
    TwoPhase,
    /// Breadth-first search over the feasible set.
    Shortest,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplorabilityResult {
    pub source: BitString,
    pub target: BitString,
    pub k: usize,
    pub path: PathSource,
    pub steps: Vec<(usize, usize)>,
    pub beta: Option<f64>,
    pub overlap: f64,
    /// Product of the per-layer probabilities of following the path.
    pub path_probability: f64,
    pub hit: bool,
}

/// Searches for `β` with `⟨y| B(β)^k ρ_x B(β)^k† |y⟩ > 10⁻⁹`.
///
/// `k` is the two-phase plan length when its precondition holds, otherwise
/// the shortest path length. Angles are tried in order and the first hit is
/// returned; a miss keeps the best overlap seen.
pub fn verify_explorability(
    chain: &LayerChain<'_>,
    x: &BitString,
    y: &BitString,
    betas: &[f64],
    k_max: usize,
) -> Result<ExplorabilityResult> {
    let problem = chain.problem();
    let (plan, path) = match plan_transposition_path(
        &problem.graph,
        &problem.instance,
        &problem.index,
        x,
        y,
    ) {
        Ok(plan) => (plan, PathSource::TwoPhase),
        Err(Error::Plan(_)) => {
            let family: Vec<Permutation> =
                problem.family.iter().map(|p| (**p).clone()).collect();
            (
                shortest_transposition_path(&problem.graph, &family, x, y)?,
                PathSource::Shortest,
            )
        }
        Err(e) => return Err(e),
    };
    let k = plan.len();
    let mut result = ExplorabilityResult {
        source: x.clone(),
        target: y.clone(),
        k,
        path,
        steps: plan.steps.clone(),
        beta: None,
        overlap: 0.0,
        path_probability: 0.0,
        hit: false,
    };
    if k == 0 {
        result.overlap = 1.0;
        result.path_probability = 1.0;
        result.hit = true;
        return Ok(result);
    }
    if k > k_max {
        return Ok(result);
    }
    let waypoints: Vec<BitString> = std::iter::once(x.clone())
        .chain(plan.prefix_images())
        .collect();
    for &beta in betas {
        let dist = chain.run(x, &vec![beta; k])?;
        let overlap = dist.get(y).copied().unwrap_or(0.0);
        let mut along = 1.0;
        for w in waypoints.windows(2) {
            let row = chain.outcome(beta, &w[0])?;
            along *= row
                .main
                .iter()
                .find(|(s, _)| s == &w[1])
                .map_or(0.0, |(_, p)| *p);
        }
        if overlap > result.overlap {
            result.overlap = overlap;
            result.path_probability = along;
            result.beta = Some(beta);
        }
        if overlap > OVERLAP_THRESHOLD {
            result.overlap = overlap;
            result.path_probability = along;
            result.beta = Some(beta);
            result.hit = true;
            break;
        }
    }
    Ok(result)
}

/// All ordered pairs of feasible schedules.
pub fn verify_all_pairs(
    chain: &LayerChain<'_>,
    betas: &[f64],
    k_max: usize,
) -> Result<Vec<ExplorabilityResult>> {
    let feasible = chain.problem().feasible_set()?;
    let pairs: Vec<(&BitString, &BitString)> = feasible
        .iter()
        .flat_map(|x| feasible.iter().map(move |y| (x, y)))
        .collect();
    pairs
        .par_iter()
        .map(|(x, y)| verify_explorability(chain, x, y, betas, k_max))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub vertices: usize,
    pub mark_count: usize,
    pub family_size: usize,
    pub feasible_count: usize,
    pub betas: Vec<f64>,
    pub modes: ModeComparison,
    pub explorability_mode: MixerMode,
    pub explorability: Vec<ExplorabilityResult>,
    pub explorability_misses: usize,
    /// Outcome of the corrected-mode feasibility assertions.
    pub passed: bool,
}

/// Feasibility sweep in both modes plus every explorability pair.
pub fn verify(problem: &Problem, mode: MixerMode) -> Result<VerificationReport> {
    let betas = verification_betas();
    let modes = compare_modes(problem, &betas)?;
    let chain = LayerChain::new(problem, mode);
    let k_max = 2 * problem.graph.mark_count();
    let explorability = verify_all_pairs(&chain, &betas, k_max)?;
    Ok(VerificationReport {
        vertices: problem.n(),
        mark_count: problem.graph.mark_count(),
        family_size: problem.family.len(),
        feasible_count: problem.feasible_set()?.len(),
        betas,
        passed: modes.corrected.passed,
        modes,
        explorability_mode: mode,
        explorability_misses: explorability.iter().filter(|r| !r.hit).count(),
        explorability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn two_jobs() -> Problem {
        Problem::new(fixtures::two_jobs())
    }

    #[test]
    fn params_validation() {
        assert!(QaoaParams::new(vec![0.1], vec![]).is_err());
        assert!(QaoaParams::new(vec![], vec![]).is_err());
        assert!(QaoaParams::new(vec![f64::NAN], vec![0.0]).is_err());
        assert_eq!(QaoaParams::new(vec![0.1, 0.2], vec![0.0, 0.0]).unwrap().layers(), 2);
    }

    #[test]
    fn cost_matches_makespan() {
        let p = two_jobs();
        for x in p.feasible_set().unwrap() {
            assert_eq!(p.cost.evaluate(&x), 3.0);
        }
        assert_eq!(p.cost.evaluate(&BitString::zeros(10)), 0.0);
    }

    #[test]
    fn ansatz_allocation() {
        let p = two_jobs();
        for (layers, aux) in [(1, 32), (2, 44), (3, 56)] {
            let params = QaoaParams::new(vec![0.1; layers], vec![0.0; layers]).unwrap();
            let c = build_ansatz_circuit(&p, &params, MixerMode::Literal);
            assert_eq!(c.layout.auxiliary_count(), aux);
        }
    }

    #[test]
    fn zero_beta_is_point_mass() {
        let p = two_jobs();
        let x0 = p.greedy_state().unwrap();
        let params = QaoaParams::new(vec![0.0, 0.0], vec![0.4, 1.3]).unwrap();
        for mode in [MixerMode::Corrected, MixerMode::Literal] {
            let (c, s) = build_ansatz(&p, &x0, &params, mode).unwrap();
            let m = s.marginal(c.layout.main());
            assert_eq!(m.len(), 1);
            assert!((m[&x0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_start_rejected() {
        let p = two_jobs();
        let params = QaoaParams::new(vec![0.1], vec![0.0]).unwrap();
        assert!(build_ansatz(&p, &BitString::zeros(10), &params, MixerMode::Corrected).is_err());
    }

    #[test]
    fn phase_leaves_marginal() {
        let p = two_jobs();
        let x0 = p.greedy_state().unwrap();
        let params = QaoaParams::new(vec![0.7], vec![0.0]).unwrap();
        let (c, mut s) = build_ansatz(&p, &x0, &params, MixerMode::Corrected).unwrap();
        let before = s.marginal(c.layout.main());
        phase_separate(&mut s, 0.9, &p.cost, p.n());
        let after = s.marginal(c.layout.main());
        for (k, v) in &before {
            assert!((after[k] - v).abs() < 1e-15);
        }
    }

    #[test]
    fn chain_matches_direct_simulation() {
        let p = two_jobs();
        let x0 = p.greedy_state().unwrap();
        for mode in [MixerMode::Corrected, MixerMode::Literal] {
            let chain = LayerChain::new(&p, mode);
            for (betas, gammas) in [
                (vec![PI / 4.0], vec![0.0]),
                (vec![0.3, 1.1], vec![0.8, 2.0]),
            ] {
                let params = QaoaParams::new(betas.clone(), gammas).unwrap();
                let (c, s) = build_ansatz(&p, &x0, &params, mode).unwrap();
                let direct = s.marginal(c.layout.main());
                let chained = chain.run(&x0, &betas).unwrap();
                assert_eq!(
                    direct.keys().collect::<Vec<_>>(),
                    chained.keys().collect::<Vec<_>>()
                );
                for (k, v) in &direct {
                    assert!((chained[k] - v).abs() < 1e-12, "{mode} {k}");
                }
            }
        }
    }

    #[test]
    fn quarter_turn_reaches_every_neighbour() {
        // one-transposition feasible neighbours predicted by direct swaps
        let p = two_jobs();
        let x0 = p.greedy_state().unwrap();
        let chain = LayerChain::new(&p, MixerMode::Corrected);
        let dist = chain.run(&x0, &[PI / 4.0]).unwrap();
        assert!(dist.contains_key(&x0));
        for perm in &p.family {
            let y = perm.apply_unchecked(&x0);
            if y != x0 && p.graph.is_feasible_unchecked(&y) {
                assert!(dist.get(&y).copied().unwrap_or(0.0) > 0.0, "{y}");
            }
        }
        assert!(dist.keys().all(|y| p.graph.is_feasible_unchecked(y)));
    }

    #[test]
    fn expected_cost_of_mixture() {
        let p = Problem::new(fixtures::three_machines());
        let f = p.feasible_set().unwrap();
        let a = f.iter().find(|x| p.cost.evaluate(x) == 3.0).unwrap();
        let b = f.iter().find(|x| p.cost.evaluate(x) == 2.0);
        let b = b.unwrap_or_else(|| f.iter().find(|x| p.cost.evaluate(x) == 4.0).unwrap());
        let target = (3.0 + p.cost.evaluate(b)) / 2.0;
        let d = Distribution::from([(a.clone(), 0.5), (b.clone(), 0.5)]);
        assert!((expected_cost(&d, &p.cost) - target).abs() < 1e-15);
    }

    #[test]
    fn minimal_instance_optimum() {
        let p = Problem::new(fixtures::minimal());
        let x0 = p.greedy_state().unwrap();
        let opt = optimize(&p, &x0, &OptimizeConfig::default()).unwrap();
        // single assignment at slot 1 with duration 1
        assert_eq!(opt.expected_cost, 2.0);
        assert_eq!(opt.grid_points, 64);
    }

    #[test]
    fn grid_search_never_worse_than_start() {
        let p = two_jobs();
        let x0 = p.greedy_state().unwrap();
        let config = OptimizeConfig {
            refine_iterations: 20,
            ..Default::default()
        };
        let opt = optimize(&p, &x0, &config).unwrap();
        assert!(opt.expected_cost <= p.cost.evaluate(&x0));
    }

    #[test]
    fn grid_tuple_order() {
        let t: Vec<Vec<f64>> = grid_tuples(1, 2).collect();
        assert_eq!(t, vec![vec![0.0, 0.0], vec![0.0, PI / 2.0], vec![PI / 2.0, 0.0], vec![PI / 2.0, PI / 2.0]]);
    }

    #[test]
    fn zero_angle_feasibility_sweep() {
        let p = two_jobs();
        for mode in [MixerMode::Corrected, MixerMode::Literal] {
            let r = verify_feasibility(&p, &[0.0], mode).unwrap();
            assert_eq!(r.trials, 4);
            assert!(r.passed);
            assert_eq!(r.max_multiply_permuted_mass, 0.0);
        }
    }

    #[test]
    fn self_pair_needs_no_layers() {
        let p = two_jobs();
        let chain = LayerChain::new(&p, MixerMode::Corrected);
        let x = p.greedy_state().unwrap();
        let r = verify_explorability(&chain, &x, &x, &verification_betas(), 6).unwrap();
        assert_eq!((r.k, r.hit, r.overlap), (0, true, 1.0));
    }
}
