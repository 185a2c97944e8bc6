//! Gate-level representation of the graph-controlled permutation mixer.
//!
//! Qubit layout (all ranges contiguous, allocated in this order):
//!
//! | block | size | role |
//! |-------|------|------|
//! | `x`   | N    | main register, one qubit per assignment |
//! | `a`   | N    | "no neighbour of π(j) is marked after the move", shared |
//! | `b`   | N    | per-vertex control predicate, shared |
//! | `y`   | N    | copy of the main register, fresh per layer |
//! | `c`   | 1    | "a permutation already fired in this layer", fresh per layer |
//! | `z`   | 1 or \|P\| | predicate for the fractional gate, fresh per layer |
//!
//! `a` and `b` are uncomputed after each partial mixer; `y`, `c` and `z` are
//! left entangled and never touched again.
//!
//! In [`MixerMode::Literal`] one `z` qubit is shared by all partial mixers
//! of a layer. A branch in which a permutation fired keeps `z = 1` and
//! `c = 1`, and the next partial mixer's fractional gate fires on it again
//! without a feasibility check. [`MixerMode::Corrected`] gives every partial
//! mixer its own `z`, so the stale branch carries `z = 0` for all later
//! partial mixers.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::Serialize;

use crate::control::Permutation;
use crate::error::{Error, Result};
use crate::graph::ConstraintGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Control {
    pub qubit: usize,
    pub positive: bool,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Self {
            qubit,
            positive: true,
        }
    }

    pub fn neg(qubit: usize) -> Self {
        Self {
            qubit,
            positive: false,
        }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.positive { '+' } else { '-' }, self.qubit)
    }
}

/// Real-valued function of the main register, imprinted as a phase.
pub trait PhaseFunction: Send + Sync {
    fn value(&self, main: &crate::bits::BitString) -> f64;
}

/// `cos β · 1 − i sin β · (X_flip ⊗ U_π)` on the flip qubit and the main
/// register, applied when every control is satisfied.
#[derive(Debug, Clone)]
pub struct FractionalPermutation {
    pub controls: Vec<Control>,
    pub beta: f64,
    pub flip: usize,
    /// First qubit of the register the permutation acts on.
    pub register: usize,
    pub perm: Arc<Permutation>,
}

#[derive(Clone)]
pub enum Gate {
    X {
        target: usize,
    },
    /// Multi-controlled NOT; one control is a CNOT, two a Toffoli.
    Mcx {
        controls: Vec<Control>,
        target: usize,
    },
    FractionalPermutation(FractionalPermutation),
    /// `e^{−iγ f(main)}` on each basis state.
    DiagonalPhase {
        register: Range<usize>,
        gamma: f64,
        function: Arc<dyn PhaseFunction>,
    },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Mcx {
            controls: vec![Control::pos(control)],
            target,
        }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate::Mcx {
            controls: vec![Control::pos(c1), Control::pos(c2)],
            target,
        }
    }

    /// Every qubit the gate reads or writes.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X { target } => vec![*target],
            Gate::Mcx { controls, target } => controls
                .iter()
                .map(|c| c.qubit)
                .chain(std::iter::once(*target))
                .collect(),
            Gate::FractionalPermutation(f) => f
                .controls
                .iter()
                .map(|c| c.qubit)
                .chain(std::iter::once(f.flip))
                .chain(f.register..f.register + f.perm.len())
                .collect(),
            Gate::DiagonalPhase { register, .. } => register.clone().collect(),
        }
    }

    fn validate(&self, total: usize) -> Result<()> {
        let qubits = self.qubits();
        if let Some(&q) = qubits.iter().find(|&&q| q >= total) {
            return Err(Error::Validation(format!(
                "gate `{self}` references qubit {q} of {total}"
            )));
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qubits.len() {
            return Err(Error::Validation(format!("gate `{self}` repeats a qubit")));
        }
        match self {
            Gate::FractionalPermutation(f) if !f.beta.is_finite() || !f.perm.is_involution() => {
                Err(Error::Validation(format!(
                    "gate `{self}` needs a finite angle and an involutive permutation"
                )))
            }
            Gate::DiagonalPhase { gamma, .. } if !gamma.is_finite() => {
                Err(Error::Validation(format!("gate `{self}` has a non-finite angle")))
            }
            _ => Ok(()),
        }
    }
}

fn write_controls(f: &mut fmt::Formatter<'_>, controls: &[Control]) -> fmt::Result {
    f.write_str("[")?;
    for (i, c) in controls.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("]")
}

/// One line per gate: `name ctrl=[..] tgt=[..] angle`.
impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::X { target } => write!(f, "x ctrl=[] tgt=[{target}]"),
            Gate::Mcx { controls, target } => {
                let name = match controls.len() {
                    1 => "cx",
                    2 => "ccx",
                    _ => "mcx",
                };
                write!(f, "{name} ctrl=")?;
                write_controls(f, &controls[..])?;
                write!(f, " tgt=[{target}]")
            }
            Gate::FractionalPermutation(g) => {
                f.write_str("cfp ctrl=")?;
                write_controls(f, &g.controls)?;
                write!(f, " tgt=[{}", g.flip)?;
                for i in g.perm.moved() {
                    if i < g.perm.image(i) {
                        write!(
                            f,
                            ",({} {})",
                            g.register + i,
                            g.register + g.perm.image(i)
                        )?;
                    }
                }
                write!(f, "] beta={:.12}", g.beta)
            }
            Gate::DiagonalPhase {
                register, gamma, ..
            } => write!(
                f,
                "phase ctrl=[] tgt=[{}..{}] gamma={gamma:.12}",
                register.start, register.end
            ),
        }
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gate({self})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixerMode {
    /// One `z` qubit per layer.
    Literal,
    /// One `z` qubit per partial mixer.
    Corrected,
}

impl std::str::FromStr for MixerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Self::Literal),
            "corrected" => Ok(Self::Corrected),
            other => Err(Error::Validation(format!("unknown mixer mode {other:?}"))),
        }
    }
}

impl fmt::Display for MixerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Literal => "literal",
            Self::Corrected => "corrected",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerRegisters {
    pub y: Range<usize>,
    pub c: usize,
    pub z: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    n: usize,
    mode: MixerMode,
    partial_mixers: usize,
    layers: Vec<LayerRegisters>,
    ancilla: Range<usize>,
    total: usize,
}

impl RegisterLayout {
    /// Main register plus the shared `a` and `b` blocks; no layers yet.
    pub fn new(n: usize, mode: MixerMode, partial_mixers: usize) -> Self {
        Self {
            n,
            mode,
            partial_mixers,
            layers: Vec::new(),
            ancilla: 3 * n..3 * n,
            total: 3 * n,
        }
    }

    /// Allocates fresh `y`, `c` and `z` blocks and returns the layer index.
    pub fn push_layer(&mut self) -> usize {
        assert!(self.ancilla.is_empty(), "layers must precede the ancilla pool");
        let y = self.total..self.total + self.n;
        let c = y.end;
        let z_len = match self.mode {
            MixerMode::Literal => 1,
            MixerMode::Corrected => self.partial_mixers,
        };
        let z = c + 1..c + 1 + z_len;
        self.total = z.end;
        self.ancilla = self.total..self.total;
        self.layers.push(LayerRegisters { y, c, z });
        self.layers.len() - 1
    }

    /// Appends a clean ancilla pool used only by [`decompose`].
    fn with_ancillas(&self, count: usize) -> Self {
        let mut out = self.clone();
        out.ancilla = self.total..self.total + count;
        out.total += count;
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> MixerMode {
        self.mode
    }

    pub fn partial_mixers(&self) -> usize {
        self.partial_mixers
    }

    pub fn main(&self) -> Range<usize> {
        0..self.n
    }

    pub fn a(&self) -> Range<usize> {
        self.n..2 * self.n
    }

    pub fn b(&self) -> Range<usize> {
        2 * self.n..3 * self.n
    }

    pub fn layers(&self) -> &[LayerRegisters] {
        &self.layers
    }

    pub fn layer(&self, layer: usize) -> &LayerRegisters {
        &self.layers[layer]
    }

    /// `z` qubit used by partial mixer `slot` of `layer`.
    pub fn z(&self, layer: usize, slot: usize) -> usize {
        let z = &self.layers[layer].z;
        match self.mode {
            MixerMode::Literal => z.start,
            MixerMode::Corrected => {
                assert!(slot < z.len(), "partial mixer {slot} has no z qubit");
                z.start + slot
            }
        }
    }

    pub fn ancilla(&self) -> Range<usize> {
        self.ancilla.clone()
    }

    pub fn total_qubits(&self) -> usize {
        self.total
    }

    /// Logical auxiliary qubits, excluding the decomposition ancilla pool.
    pub fn auxiliary_count(&self) -> usize {
        self.total - self.n - self.ancilla.len()
    }
}

#[derive(Debug, Clone)]
pub struct Circuit {
    pub layout: RegisterLayout,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(layout: RegisterLayout, gates: Vec<Gate>) -> Result<Self> {
        let total = layout.total_qubits();
        for g in &gates {
            g.validate(total)?;
        }
        Ok(Self { layout, gates })
    }

    /// Gate list, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

/// `CNOT(x_j → y_j)` for every vertex.
pub fn build_copy_layer(layout: &RegisterLayout, layer: usize) -> Vec<Gate> {
    let y = layout.layer(layer).y.start;
    (0..layout.n()).map(|j| Gate::cnot(j, y + j)).collect()
}

/// The two gates computing `a_j` and `b_j` from the copy register.
///
/// `a_j` is set when no vertex of `π⁻¹(nbhd(π(j)))` is marked in `y`;
/// `b_j` then flips when `y_j = 1` and `a_j = 0`.
pub fn build_control_block(
    g: &ConstraintGraph,
    p: &Permutation,
    j: usize,
    layout: &RegisterLayout,
    layer: usize,
) -> [Gate; 2] {
    let y = layout.layer(layer).y.start;
    let a = layout.a().start + j;
    let b = layout.b().start + j;
    let mut watched: Vec<usize> = g
        .neighbors(p.image(j))
        .iter()
        .map(|&l| p.preimage(l))
        .collect();
    watched.sort_unstable();
    let first = if watched.is_empty() {
        Gate::X { target: a }
    } else {
        Gate::Mcx {
            controls: watched.into_iter().map(|v| Control::neg(y + v)).collect(),
            target: a,
        }
    };
    [
        first,
        Gate::Mcx {
            controls: vec![Control::pos(y + j), Control::neg(a)],
            target: b,
        },
    ]
}

/// Compute, fractional permutation, uncompute for one permutation.
///
/// `slot` is the partial mixer's position in the layer's family; it picks
/// the `z` qubit in corrected mode.
pub fn build_partial_mixer(
    g: &ConstraintGraph,
    p: &Arc<Permutation>,
    beta: f64,
    layout: &RegisterLayout,
    layer: usize,
    slot: usize,
) -> Vec<Gate> {
    let n = layout.n();
    let regs = layout.layer(layer);
    let z = layout.z(layer, slot);
    let b = layout.b();

    let flip_b = b.clone().map(|q| Gate::X { target: q });
    let controls: Vec<[Gate; 2]> = (0..n)
        .map(|j| build_control_block(g, p, j, layout, layer))
        .collect();
    let mark_z = Gate::Mcx {
        controls: b
            .clone()
            .map(Control::pos)
            .chain(std::iter::once(Control::neg(regs.c)))
            .collect(),
        target: z,
    };

    let mut gates = Vec::with_capacity(6 * n + 3);
    gates.extend(flip_b.clone());
    gates.extend(controls.iter().flat_map(|c| c.iter().cloned()));
    gates.push(mark_z.clone());
    gates.push(Gate::FractionalPermutation(FractionalPermutation {
        controls: vec![Control::pos(z)],
        beta,
        flip: regs.c,
        register: 0,
        perm: Arc::clone(p),
    }));
    gates.push(mark_z);
    for block in controls.iter().rev() {
        gates.extend(block.iter().rev().cloned());
    }
    gates.extend(flip_b.rev());
    gates
}

/// Copy layer followed by one partial mixer per family member, in order.
pub fn build_layer_mixer(
    g: &ConstraintGraph,
    family: &[Arc<Permutation>],
    beta: f64,
    layout: &RegisterLayout,
    layer: usize,
) -> Vec<Gate> {
    let mut gates = build_copy_layer(layout, layer);
    for (slot, p) in family.iter().enumerate() {
        gates.extend(build_partial_mixer(g, p, beta, layout, layer, slot));
    }
    gates
}

/// A one-layer circuit `B(β)` with its own layout.
pub fn single_layer_circuit(
    g: &ConstraintGraph,
    family: &[Arc<Permutation>],
    beta: f64,
    mode: MixerMode,
) -> Circuit {
    let mut layout = RegisterLayout::new(g.vertex_count(), mode, family.len());
    let layer = layout.push_layer();
    let gates = build_layer_mixer(g, family, beta, &layout, layer);
    Circuit::new(layout, gates).expect("builder emits valid gates")
}

/// Rewrites every multi-controlled NOT into X, CNOT and Toffoli gates.
///
/// Negated controls are conjugated by X. Three or more controls use a
/// Toffoli chain through a clean ancilla pool of `max_controls − 2` qubits,
/// which is computed and uncomputed around the target Toffoli.
/// Fractional permutations and diagonal phases are kept as they are.
pub fn decompose(c: &Circuit) -> Circuit {
    let max_controls = c
        .gates
        .iter()
        .map(|g| match g {
            Gate::Mcx { controls, .. } => controls.len(),
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let layout = c.layout.with_ancillas(max_controls.saturating_sub(2));
    let pool = layout.ancilla().start;
    let mut gates = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        match g {
            Gate::Mcx { controls, target } => {
                let negated: Vec<usize> = controls
                    .iter()
                    .filter(|c| !c.positive)
                    .map(|c| c.qubit)
                    .collect();
                gates.extend(negated.iter().map(|&q| Gate::X { target: q }));
                let qs: Vec<usize> = controls.iter().map(|c| c.qubit).collect();
                expand_positive_mcx(&qs, *target, pool, &mut gates);
                gates.extend(negated.iter().map(|&q| Gate::X { target: q }));
            }
            other => gates.push(other.clone()),
        }
    }
    Circuit { layout, gates }
}

fn expand_positive_mcx(controls: &[usize], target: usize, pool: usize, out: &mut Vec<Gate>) {
    match controls {
        [] => out.push(Gate::X { target }),
        [c] => out.push(Gate::cnot(*c, target)),
        [c1, c2] => out.push(Gate::toffoli(*c1, *c2, target)),
        _ => {
            let m = controls.len();
            let mut chain = vec![Gate::toffoli(controls[0], controls[1], pool)];
            for (i, &c) in controls.iter().enumerate().take(m - 1).skip(2) {
                chain.push(Gate::toffoli(pool + i - 2, c, pool + i - 1));
            }
            out.extend(chain.iter().cloned());
            out.push(Gate::toffoli(pool + m - 3, controls[m - 1], target));
            out.extend(chain.into_iter().rev());
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub toffoli: usize,
    pub cnot: usize,
    pub single_qubit: usize,
    /// Diagonal phase gates, counted but not decomposed.
    pub opaque: usize,
}

impl GateCounts {
    pub fn two_and_three_qubit(&self) -> usize {
        self.toffoli + self.cnot
    }

    pub fn total(&self) -> usize {
        self.toffoli + self.cnot + self.single_qubit
    }
}

impl std::ops::AddAssign for GateCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.toffoli += rhs.toffoli;
        self.cnot += rhs.cnot;
        self.single_qubit += rhs.single_qubit;
        self.opaque += rhs.opaque;
    }
}

fn positive_mcx_cost(m: usize) -> GateCounts {
    match m {
        0 => GateCounts {
            single_qubit: 1,
            ..Default::default()
        },
        1 => GateCounts {
            cnot: 1,
            ..Default::default()
        },
        _ => GateCounts {
            toffoli: 2 * (m - 2) + 1,
            ..Default::default()
        },
    }
}

/// Counting model for a controlled fractional permutation.
///
/// With `W = ∏ CSWAP(flip; u, v)` over the permutation's transpositions,
/// `exp(−iβ X_flip ⊗ U_π) = W · Rx_flip(2β) · W`, and only the rotation
/// needs the outer control. Each controlled swap is one Toffoli between two
/// CNOTs; a singly controlled `Rx` is two CNOTs and four single-qubit gates.
/// More outer controls are first combined into one ancilla by a
/// multi-controlled NOT, computed and uncomputed.
pub fn fractional_permutation_cost(g: &FractionalPermutation) -> GateCounts {
    let swaps = g.perm.moved().count() / 2;
    let mut counts = GateCounts {
        toffoli: 2 * swaps,
        cnot: 4 * swaps + 2,
        single_qubit: 4,
        opaque: 0,
    };
    let negated = g.controls.iter().filter(|c| !c.positive).count();
    counts.single_qubit += 2 * negated;
    if g.controls.len() > 1 {
        let and = positive_mcx_cost(g.controls.len());
        counts += and;
        counts += and;
    }
    counts
}

/// Cost of one gate after [`decompose`], with fractional permutations priced
/// by [`fractional_permutation_cost`].
pub fn gate_cost(g: &Gate) -> GateCounts {
    match g {
        Gate::X { .. } => GateCounts {
            single_qubit: 1,
            ..Default::default()
        },
        Gate::Mcx { controls, .. } => {
            let negated = controls.iter().filter(|c| !c.positive).count();
            let mut counts = positive_mcx_cost(controls.len());
            counts.single_qubit += 2 * negated;
            counts
        }
        Gate::FractionalPermutation(f) => fractional_permutation_cost(f),
        Gate::DiagonalPhase { .. } => GateCounts {
            opaque: 1,
            ..Default::default()
        },
    }
}

pub fn count_gates<'a>(gates: impl IntoIterator<Item = &'a Gate>) -> GateCounts {
    let mut total = GateCounts::default();
    for g in gates {
        total += gate_cost(g);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::transposition_family;
    use crate::fixtures;
    use crate::graph::build_graph;
    use crate::instance::build_index;

    fn two_job_graph() -> ConstraintGraph {
        let inst = fixtures::two_jobs();
        build_graph(&inst, &build_index(&inst))
    }

    fn family(g: &ConstraintGraph) -> Vec<Arc<Permutation>> {
        transposition_family(g).into_iter().map(Arc::new).collect()
    }

    #[test]
    fn layout_accounting() {
        for k in 1..=3 {
            let mut literal = RegisterLayout::new(10, MixerMode::Literal, 13);
            let mut corrected = RegisterLayout::new(10, MixerMode::Corrected, 13);
            for _ in 0..k {
                literal.push_layer();
                corrected.push_layer();
            }
            assert_eq!(literal.auxiliary_count(), 20 + 12 * k);
            assert_eq!(corrected.auxiliary_count(), 20 + (10 + 1 + 13) * k);
            assert_eq!(literal.total_qubits(), 10 + literal.auxiliary_count());
        }
    }

    #[test]
    fn layers_are_disjoint() {
        let mut layout = RegisterLayout::new(4, MixerMode::Corrected, 3);
        layout.push_layer();
        layout.push_layer();
        let mut seen = vec![false; layout.total_qubits()];
        let mut mark = |r: Range<usize>| {
            for q in r {
                assert!(!seen[q]);
                seen[q] = true;
            }
        };
        mark(layout.main());
        mark(layout.a());
        mark(layout.b());
        for l in layout.layers().to_vec() {
            mark(l.y.clone());
            mark(l.c..l.c + 1);
            mark(l.z.clone());
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn copy_layer_for_one_vertex() {
        let mut layout = RegisterLayout::new(1, MixerMode::Literal, 0);
        let l = layout.push_layer();
        let gates = build_copy_layer(&layout, l);
        assert_eq!(gates.len(), 1);
        assert_eq!(gates[0].to_string(), "cx ctrl=[+0] tgt=[3]");
    }

    #[test]
    fn isolated_vertex_gets_bare_x() {
        let inst = fixtures::minimal();
        let g = build_graph(&inst, &build_index(&inst));
        let mut layout = RegisterLayout::new(1, MixerMode::Literal, 1);
        let l = layout.push_layer();
        let [first, second] = build_control_block(&g, &Permutation::identity(1), 0, &layout, l);
        assert!(matches!(first, Gate::X { target: 1 }));
        assert_eq!(second.to_string(), "ccx ctrl=[+3,-1] tgt=[2]");
    }

    #[test]
    fn partial_mixer_shape() {
        let g = two_job_graph();
        let fam = family(&g);
        let mut layout = RegisterLayout::new(10, MixerMode::Corrected, fam.len());
        let l = layout.push_layer();
        let gates = build_partial_mixer(&g, &fam[0], 0.3, &layout, l, 0);
        assert_eq!(gates.len(), 6 * 10 + 3);
        let frac = gates
            .iter()
            .position(|g| matches!(g, Gate::FractionalPermutation(_)))
            .unwrap();
        assert_eq!(frac, 3 * 10 + 1);
        // mirror symmetry around the fractional gate
        for i in 0..frac {
            assert_eq!(
                gates[i].to_string(),
                gates[gates.len() - 1 - i].to_string()
            );
        }
    }

    #[test]
    fn layer_structure() {
        let g = two_job_graph();
        let fam = family(&g);
        let c = single_layer_circuit(&g, &fam, 0.1, MixerMode::Corrected);
        let fracs = c
            .gates
            .iter()
            .filter(|g| matches!(g, Gate::FractionalPermutation(_)))
            .count();
        assert_eq!(fracs, 13);
        assert_eq!(c.gates.len(), 10 + 13 * 63);
        let empty = single_layer_circuit(&g, &[], 0.1, MixerMode::Literal);
        assert_eq!(empty.gates.len(), 10);
    }

    #[test]
    fn decomposition_counts() {
        let layout = RegisterLayout::new(3, MixerMode::Literal, 0);
        let mk = |controls: Vec<Control>| {
            Circuit::new(layout.clone(), vec![Gate::Mcx { controls, target: 8 }]).unwrap()
        };
        let two = decompose(&mk(vec![Control::pos(0), Control::pos(1)]));
        assert_eq!(count_gates(&two.gates).toffoli, 1);
        assert_eq!(two.gates.len(), 1);
        let mixed = decompose(&mk(vec![Control::neg(0), Control::pos(1)]));
        let names: Vec<String> = mixed.gates.iter().map(|g| g.to_string()).collect();
        assert_eq!(
            names,
            vec!["x ctrl=[] tgt=[0]", "ccx ctrl=[+0,+1] tgt=[8]", "x ctrl=[] tgt=[0]"]
        );
        for m in 3..=7 {
            let d = decompose(&mk((0..m).map(Control::pos).collect()));
            assert_eq!(count_gates(&d.gates).toffoli, 2 * (m - 2) + 1);
            assert_eq!(d.layout.ancilla().len(), m - 2);
        }
    }

    #[test]
    fn analytic_cost_matches_decomposition() {
        let g = two_job_graph();
        let fam = family(&g);
        let c = single_layer_circuit(&g, &fam, 0.2, MixerMode::Corrected);
        let d = decompose(&c);
        assert!(d
            .gates
            .iter()
            .all(|g| !matches!(g, Gate::Mcx { controls, .. } if controls.len() > 2)));
        assert_eq!(count_gates(&c.gates), count_gates(&d.gates));
    }

    #[test]
    fn gate_text_dump() {
        let g = two_job_graph();
        let fam = family(&g);
        let c = single_layer_circuit(&g, &fam[..1], 0.5, MixerMode::Literal);
        let text = c.to_text();
        assert_eq!(text.lines().count(), c.gates.len());
        assert!(text.contains("cfp ctrl=[+41] tgt=[40,(0 1)] beta=0.500000000000"));
    }

    #[test]
    fn validation_catches_bad_gates() {
        let layout = RegisterLayout::new(2, MixerMode::Literal, 0);
        assert!(Circuit::new(layout.clone(), vec![Gate::X { target: 9 }]).is_err());
        assert!(Circuit::new(layout, vec![Gate::cnot(1, 1)]).is_err());
    }
}
