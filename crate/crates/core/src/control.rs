//! Classical layer of the mixer: index permutations, the control predicates
//! and transposition paths between feasible schedules.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::bits::BitString;
use crate::error::{check_len, Error, Result};
use crate::graph::ConstraintGraph;
use crate::instance::{decode, makespan, Assignment, AssignmentIndex, FjspInstance, Schedule};

/// A bijection on vertex indices. `image(i)` is where bit `i` moves to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut inverse = vec![usize::MAX; n];
        for (i, &j) in image.iter().enumerate() {
            if j >= n || inverse[j] != usize::MAX {
                return Err(Error::Validation(format!(
                    "mapping {image:?} is not a bijection on 0..{n}"
                )));
            }
            inverse[j] = i;
        }
        Ok(Self { image, inverse })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.image.swap(a, b);
        p.inverse.swap(a, b);
        p
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.image[i]
    }

    #[inline]
    pub fn preimage(&self, j: usize) -> usize {
        self.inverse[j]
    }

    pub fn inverse(&self) -> Permutation {
        Self {
            image: self.inverse.clone(),
            inverse: self.image.clone(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let image = other.image.iter().map(|&j| self.image[j]).collect();
        Permutation::new(image).expect("composition of bijections")
    }

    pub fn is_involution(&self) -> bool {
        self.image == self.inverse
    }

    /// Indices not fixed by the permutation.
    pub fn moved(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.image[i] != i)
    }

    pub fn as_transposition(&self) -> Option<(usize, usize)> {
        let moved: Vec<usize> = self.moved().collect();
        match moved[..] {
            [a, b] => Some((a, b)),
            _ => None,
        }
    }

    /// `π(x)_j = x_{π⁻¹(j)}`.
    pub fn apply(&self, x: &BitString) -> Result<BitString> {
        check_len(self.len(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &BitString) -> BitString {
        let mut out = BitString::zeros(x.len());
        for i in x.iter_ones() {
            out.set(self.image[i], true);
        }
        out
    }
}

/// Conflict check for vertex `j`: either `x_j = 0`, or every neighbour of
/// `π(j)` is unmarked in `π(x)`.
pub fn chi_j(g: &ConstraintGraph, p: &Permutation, x: &BitString, j: usize) -> bool {
    !x.get(j) || g.neighbors(p.image(j)).iter().all(|&l| !x.get(p.preimage(l)))
}

/// Conjunction of [`chi_j`] over all vertices.
pub fn chi(g: &ConstraintGraph, p: &Permutation, x: &BitString) -> bool {
    (0..g.vertex_count()).all(|j| chi_j(g, p, x, j))
}

/// Every transposition of two vertices belonging to the same operation, in
/// lexicographic order of the swapped pair.
pub fn transposition_family(g: &ConstraintGraph) -> Vec<Permutation> {
    let n = g.vertex_count();
    let mut family = Vec::new();
    for range in g.op_ranges() {
        for a in range.clone() {
            for b in a + 1..range.end {
                family.push(Permutation::transposition(n, a, b));
            }
        }
    }
    family
}

/// A sequence of transpositions leading from `source` to `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranspositionPlan {
    pub source: BitString,
    pub target: BitString,
    /// Swapped vertex pairs, smaller index first.
    pub steps: Vec<(usize, usize)>,
}

impl TranspositionPlan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The bit string after each step; the last entry is the final image.
    pub fn prefix_images(&self) -> Vec<BitString> {
        let mut current = self.source.clone();
        self.steps
            .iter()
            .map(|&(a, b)| {
                swap_bits(&mut current, a, b);
                current.clone()
            })
            .collect()
    }

    pub fn final_image(&self) -> BitString {
        self.prefix_images()
            .pop()
            .unwrap_or_else(|| self.source.clone())
    }

    pub fn permutations(&self) -> Vec<Permutation> {
        let n = self.source.len();
        self.steps
            .iter()
            .map(|&(a, b)| Permutation::transposition(n, a, b))
            .collect()
    }
}

fn swap_bits(x: &mut BitString, a: usize, b: usize) {
    let (va, vb) = (x.get(a), x.get(b));
    x.set(a, vb);
    x.set(b, va);
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn all_prefixes_feasible(g: &ConstraintGraph, source: &BitString, steps: &[(usize, usize)]) -> bool {
    let mut current = source.clone();
    steps.iter().all(|&(a, b)| {
        swap_bits(&mut current, a, b);
        g.is_feasible_unchecked(&current)
    })
}

/// Two-phase transposition path between feasible schedules.
///
/// Phase one parks every operation of `x`, last operation of each job first,
/// in the same machine slot shifted by `h = max(C(x), C(y)) - 1` time steps.
/// Parked intervals then start no earlier than any unparked or target
/// interval ends. Phase two moves each operation, first to last, from its
/// parking slot onto its assignment in `y`. Afterwards operations whose
/// park/unpark pair can be dropped or fused into one direct move are
/// simplified whenever every prefix stays feasible.
///
/// Requires both endpoints feasible and every parking slot inside the
/// horizon, i.e. `t + h ≤ n_T` for each start time `t` of `x`.
pub fn plan_transposition_path(
    g: &ConstraintGraph,
    inst: &FjspInstance,
    index: &AssignmentIndex,
    x: &BitString,
    y: &BitString,
) -> Result<TranspositionPlan> {
    check_len(g.vertex_count(), x.len())?;
    check_len(g.vertex_count(), y.len())?;
    for (name, s) in [("source", x), ("target", y)] {
        if !g.is_feasible_unchecked(s) {
            return Err(Error::Plan(format!("{name} {s} is not feasible")));
        }
    }
    if x == y {
        return Ok(TranspositionPlan {
            source: x.clone(),
            target: y.clone(),
            steps: Vec::new(),
        });
    }
    let sx = decode(index, x)?;
    let sy = decode(index, y)?;
    let shift = makespan(inst, &sx)?.max(makespan(inst, &sy)?) - 1;

    let op_list: Vec<(usize, usize)> = inst.operations().collect();
    let lookup = |s: &Schedule, j: usize, o: usize| -> Assignment {
        *s.assignment_of(j, o).expect("feasible schedules assign every operation once")
    };

    // per operation: (x vertex, parking vertex, y vertex)
    let mut slots = Vec::with_capacity(op_list.len());
    for &(j, o) in &op_list {
        let from = lookup(&sx, j, o);
        let to = lookup(&sy, j, o);
        let park = Assignment::new(j, o, from.machine, from.time + shift);
        let park_v = index.forward(&park).ok_or_else(|| {
            Error::Plan(format!(
                "parking slot T{} for {from} lies beyond horizon {}",
                park.time,
                inst.horizon()
            ))
        })?;
        slots.push((
            index.forward(&from).expect("decoded assignment is indexed"),
            park_v,
            index.forward(&to).expect("decoded assignment is indexed"),
        ));
    }

    // step order: phase one walks each job's operations backwards, phase
    // two forwards
    let mut order_out = Vec::new();
    let mut order_in = Vec::new();
    let mut flat = 0;
    for job in inst.jobs() {
        let ids: Vec<usize> = (flat..flat + job.operations.len()).collect();
        order_out.extend(ids.iter().rev().copied());
        order_in.extend(ids.iter().copied());
        flat += job.operations.len();
    }
    let mut steps: Vec<Option<(usize, usize)>> = order_out
        .iter()
        .map(|&k| Some(ordered(slots[k].0, slots[k].1)))
        .chain(order_in.iter().map(|&k| Some(ordered(slots[k].1, slots[k].2))))
        .collect();
    let out_pos = |k: usize| order_out.iter().position(|&o| o == k).unwrap();
    let in_pos = |k: usize| order_out.len() + order_in.iter().position(|&o| o == k).unwrap();

    let collect = |steps: &[Option<(usize, usize)>]| steps.iter().flatten().copied().collect::<Vec<_>>();
    if !all_prefixes_feasible(g, x, &collect(&steps)) {
        return Err(Error::Plan(format!(
            "two-phase path from {x} to {y} leaves the feasible set"
        )));
    }

    for (k, &(from, _, to)) in slots.iter().enumerate() {
        let (po, pi) = (out_pos(k), in_pos(k));
        let direct = ordered(from, to);
        let mut candidates = Vec::new();
        if from == to {
            candidates.push((None, None));
        } else {
            candidates.push((Some(direct), None));
            candidates.push((None, Some(direct)));
        }
        for (new_out, new_in) in candidates {
            let mut trial = steps.clone();
            trial[po] = new_out;
            trial[pi] = new_in;
            if all_prefixes_feasible(g, x, &collect(&trial)) {
                steps = trial;
                break;
            }
        }
    }

    let plan = TranspositionPlan {
        source: x.clone(),
        target: y.clone(),
        steps: collect(&steps),
    };
    debug_assert_eq!(&plan.final_image(), y);
    Ok(plan)
}

/// Breadth-first search over the feasible set, moving along members of
/// `family`. Returns a shortest path.
pub fn shortest_transposition_path(
    g: &ConstraintGraph,
    family: &[Permutation],
    x: &BitString,
    y: &BitString,
) -> Result<TranspositionPlan> {
    check_len(g.vertex_count(), x.len())?;
    check_len(g.vertex_count(), y.len())?;
    for (name, s) in [("source", x), ("target", y)] {
        if !g.is_feasible_unchecked(s) {
            return Err(Error::Plan(format!("{name} {s} is not feasible")));
        }
    }
    let swaps: Vec<(usize, usize)> = family
        .iter()
        .filter_map(Permutation::as_transposition)
        .collect();
    type Edge = (BitString, (usize, usize));
    let mut parent: HashMap<BitString, Option<Edge>> = HashMap::new();
    parent.insert(x.clone(), None);
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(cur) = queue.pop_front() {
        if &cur == y {
            break;
        }
        for &(a, b) in &swaps {
            if cur.get(a) == cur.get(b) {
                continue;
            }
            let mut next = cur.clone();
            swap_bits(&mut next, a, b);
            if parent.contains_key(&next) || !g.is_feasible_unchecked(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((cur.clone(), (a, b))));
            queue.push_back(next);
        }
    }
    if !parent.contains_key(y) {
        return Err(Error::Plan(format!("{y} is unreachable from {x}")));
    }
    let mut steps = Vec::new();
    let mut cur = y.clone();
    while let Some(Some((prev, step))) = parent.get(&cur) {
        steps.push(*step);
        cur = prev.clone();
    }
    steps.reverse();
    Ok(TranspositionPlan {
        source: x.clone(),
        target: y.clone(),
        steps,
    })
}
