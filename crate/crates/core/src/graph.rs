//! Conflict detection and the constraint graph.
//!
//! Vertices are machine-eligible assignments; an edge joins two assignments
//! that cannot both belong to a feasible schedule. A bit string is feasible
//! iff it marks exactly `|O|` pairwise non-adjacent vertices.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::bits::BitString;
use crate::error::{check_len, Error, Result};
use crate::instance::{decode, satisfies_constraints, Assignment, AssignmentIndex, FjspInstance};

/// Largest vertex count [`enumerate_feasible`] accepts.
pub const MAX_ENUMERATION_VERTICES: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConflictKind {
    Assignment,
    Order,
    Machine,
}

impl ConflictKind {
    pub const ALL: [ConflictKind; 3] = [Self::Assignment, Self::Order, Self::Machine];

    fn bit(self) -> u8 {
        match self {
            Self::Assignment => 1,
            Self::Order => 2,
            Self::Machine => 4,
        }
    }
}

impl fmt::Display for ConflictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Assignment => "assignment",
            Self::Order => "order",
            Self::Machine => "machine",
        })
    }
}

/// Set of [`ConflictKind`]s; one pair can violate several constraints.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ConflictKinds(u8);

impl ConflictKinds {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, kind: ConflictKind) -> bool {
        self.0 & kind.bit() != 0
    }

    pub fn insert(&mut self, kind: ConflictKind) {
        self.0 |= kind.bit();
    }

    pub fn iter(self) -> impl Iterator<Item = ConflictKind> {
        ConflictKind::ALL.into_iter().filter(move |k| self.contains(*k))
    }
}

impl FromIterator<ConflictKind> for ConflictKinds {
    fn from_iter<I: IntoIterator<Item = ConflictKind>>(iter: I) -> Self {
        let mut out = Self::empty();
        for k in iter {
            out.insert(k);
        }
        out
    }
}

impl fmt::Debug for ConflictKinds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for ConflictKinds {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|k| k.to_string()))
    }
}

/// Every constraint violated by scheduling both `a` and `b`.
///
/// Both assignments must be machine-eligible; an ineligible one yields no
/// order or machine conflict because its duration is undefined.
pub fn conflicts(inst: &FjspInstance, a: &Assignment, b: &Assignment) -> ConflictKinds {
    let mut kinds = ConflictKinds::empty();
    if a == b {
        return kinds;
    }
    if a.same_operation(b) {
        kinds.insert(ConflictKind::Assignment);
    }
    let (Some(da), Some(db)) = (inst.duration(a), inst.duration(b)) else {
        return kinds;
    };
    if a.job == b.job && a.op != b.op {
        let (early, d_early, late) = if a.op < b.op { (a, da, b) } else { (b, db, a) };
        if early.time + d_early > late.time {
            kinds.insert(ConflictKind::Order);
        }
    }
    if a.machine == b.machine && !a.same_operation(b) {
        let b_in_a = a.time <= b.time && b.time < a.time + da;
        let a_in_b = b.time <= a.time && a.time < b.time + db;
        if b_in_a || a_in_b {
            kinds.insert(ConflictKind::Machine);
        }
    }
    kinds
}

#[derive(Debug, Clone)]
pub struct ConstraintGraph {
    n: usize,
    mark_count: usize,
    edges: BTreeMap<(usize, usize), ConflictKinds>,
    adjacency: Vec<Vec<usize>>,
    neighbor_masks: Vec<BitString>,
    op_ranges: Vec<Range<usize>>,
}

pub fn build_graph(inst: &FjspInstance, index: &AssignmentIndex) -> ConstraintGraph {
    let n = index.len();
    let mut edges = BTreeMap::new();
    let mut adjacency = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            let kinds = conflicts(inst, index.backward(u), index.backward(v));
            if !kinds.is_empty() {
                edges.insert((u, v), kinds);
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let neighbor_masks = adjacency
        .iter()
        .map(|list| BitString::from_ones(n, list.iter().copied()))
        .collect();
    ConstraintGraph {
        n,
        mark_count: inst.operation_count(),
        edges,
        adjacency,
        neighbor_masks,
        op_ranges: index.op_ranges().to_vec(),
    }
}

impl ConstraintGraph {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of vertices a feasible string marks (`k = |O|`).
    pub fn mark_count(&self) -> usize {
        self.mark_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` with `u < v` and their conflict kinds.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), ConflictKinds)> + '_ {
        self.edges.iter().map(|(&e, &k)| (e, k))
    }

    pub fn edge_kinds(&self, u: usize, v: usize) -> Option<ConflictKinds> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.neighbor_masks[u].get(v)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn neighbor_mask(&self, v: usize) -> &BitString {
        &self.neighbor_masks[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Vertex range of each operation.
    pub fn op_ranges(&self) -> &[Range<usize>] {
        &self.op_ranges
    }

    /// Map from degree to number of vertices with that degree.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for v in 0..self.n {
            *hist.entry(self.degree(v)).or_default() += 1;
        }
        hist
    }

    /// No marked pair is adjacent and exactly `k` vertices are marked.
    pub fn is_feasible(&self, x: &BitString) -> Result<bool> {
        check_len(self.n, x.len())?;
        Ok(self.is_feasible_unchecked(x))
    }

    pub(crate) fn is_feasible_unchecked(&self, x: &BitString) -> bool {
        x.count_ones() == self.mark_count
            && x.iter_ones().all(|v| !self.neighbor_masks[v].intersects(x))
    }

    /// Graphviz rendering; assignment-constraint edges solid, others dashed.
    pub fn to_dot(&self, index: &AssignmentIndex) -> String {
        let mut out = String::from("graph constraints {\n");
        for v in 0..self.n {
            let a = index.backward(v);
            out.push_str(&format!(
                "  v{v} [label=\"{},{},{}\"];\n",
                index.op_of_vertex(v) + 1,
                a.machine + 1,
                a.time
            ));
        }
        for ((u, v), kinds) in self.edges() {
            let style = if kinds.contains(ConflictKind::Assignment) {
                "solid"
            } else {
                "dashed"
            };
            out.push_str(&format!("  v{u} -- v{v} [style={style}];\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// All feasible bit strings, by backtracking over one mark per operation.
/// Output order is lexicographic in the chosen vertex of each operation.
pub fn enumerate_feasible(g: &ConstraintGraph) -> Result<Vec<BitString>> {
    if g.n > MAX_ENUMERATION_VERTICES {
        return Err(Error::TooLarge {
            vertices: g.n,
            limit: MAX_ENUMERATION_VERTICES,
        });
    }
    Ok(enumerate_feasible_unbounded(g))
}

/// [`enumerate_feasible`] without the size guard. The cost is exponential in
/// the operation count.
pub fn enumerate_feasible_unbounded(g: &ConstraintGraph) -> Vec<BitString> {
    fn walk(g: &ConstraintGraph, op: usize, current: &mut BitString, out: &mut Vec<BitString>) {
        if op == g.op_ranges.len() {
            out.push(current.clone());
            return;
        }
        for v in g.op_ranges[op].clone() {
            if !g.neighbor_masks[v].intersects(current) {
                current.set(v, true);
                walk(g, op + 1, current, out);
                current.set(v, false);
            }
        }
    }
    let mut out = Vec::new();
    walk(g, 0, &mut BitString::zeros(g.n), &mut out);
    out
}

/// Graph feasibility and the direct constraint check agree on `x`.
pub fn graph_semantic_equivalence(
    inst: &FjspInstance,
    index: &AssignmentIndex,
    g: &ConstraintGraph,
    x: &BitString,
) -> Result<bool> {
    let by_graph = g.is_feasible(x)?;
    let by_constraints = satisfies_constraints(inst, &decode(index, x)?);
    Ok(by_graph == by_constraints)
}
