//! State-vector simulation.
//!
//! [`SparseState`] stores only nonzero basis amplitudes and is exact up to
//! pruning: amplitudes with modulus below [`PRUNE_AMPLITUDE`] are dropped
//! and their probability is accumulated. [`DenseState`] is a plain
//! `2^n`-vector used as a reference on small registers.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use num_complex::Complex64;
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::circuit::{Circuit, Control, FractionalPermutation, Gate};
use crate::error::{Error, Result};

pub const PRUNE_AMPLITUDE: f64 = 1e-12;
/// Largest total pruned probability tolerated by [`SparseState::apply_circuit`].
pub const MAX_PRUNED_MASS: f64 = 1e-10;
pub const MAX_DENSE_QUBITS: usize = 20;

fn controls_hold(key: &BitString, controls: &[Control]) -> bool {
    controls.iter().all(|c| key.get(c.qubit) == c.positive)
}

fn permute_register(key: &mut BitString, f: &FractionalPermutation) {
    let old = key.clone();
    for i in f.perm.moved() {
        key.set(f.register + f.perm.image(i), old.get(f.register + i));
    }
}

/// Sparse amplitudes; keys are unique.
#[derive(Debug, Clone)]
pub struct SparseState {
    qubits: usize,
    amps: Vec<(BitString, Complex64)>,
    pruned_mass: f64,
    max_norm_deviation: f64,
}

impl SparseState {
    /// `|x⟩` on the leading qubits, every other qubit `|0⟩`.
    pub fn basis(qubits: usize, x: &BitString) -> Self {
        assert!(x.len() <= qubits);
        let mut key = BitString::zeros(qubits);
        key.insert(0, x);
        Self {
            qubits,
            amps: vec![(key, Complex64::new(1.0, 0.0))],
            pruned_mass: 0.0,
            max_norm_deviation: 0.0,
        }
    }

    /// Normalised superposition; repeated keys are summed.
    pub fn from_amplitudes(
        qubits: usize,
        amps: impl IntoIterator<Item = (BitString, Complex64)>,
    ) -> Result<Self> {
        let mut merged: HashMap<BitString, Complex64> = HashMap::new();
        for (x, a) in amps {
            let mut key = BitString::zeros(qubits);
            if x.len() > qubits {
                return Err(Error::LengthMismatch {
                    expected: qubits,
                    actual: x.len(),
                });
            }
            key.insert(0, &x);
            *merged.entry(key).or_default() += a;
        }
        let norm: f64 = merged.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Validation("state has zero norm".into()));
        }
        let mut amps: Vec<_> = merged.into_iter().map(|(k, a)| (k, a / norm)).collect();
        amps.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self {
            qubits,
            amps,
            pruned_mass: 0.0,
            max_norm_deviation: 0.0,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[(BitString, Complex64)] {
        &self.amps
    }

    pub fn amplitude(&self, key: &BitString) -> Complex64 {
        self.amps
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, a)| *a)
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn pruned_mass(&self) -> f64 {
        self.pruned_mass
    }

    /// Largest `|‖ψ‖² − 1|` observed after any gate.
    pub fn max_norm_deviation(&self) -> f64 {
        self.max_norm_deviation
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        match gate {
            Gate::X { target } => {
                for (k, _) in &mut self.amps {
                    k.flip(*target);
                }
            }
            Gate::Mcx { controls, target } => {
                for (k, _) in &mut self.amps {
                    if controls_hold(k, controls) {
                        k.flip(*target);
                    }
                }
            }
            Gate::FractionalPermutation(f) => self.apply_fractional(f),
            Gate::DiagonalPhase {
                register,
                gamma,
                function,
            } => {
                for (k, a) in &mut self.amps {
                    let main = k.extract(register.start, register.len());
                    *a *= Complex64::from_polar(1.0, -gamma * function.value(&main));
                }
            }
        }
        let dev = (self.norm_sqr() - 1.0).abs();
        self.max_norm_deviation = self.max_norm_deviation.max(dev);
    }

    fn apply_fractional(&mut self, f: &FractionalPermutation) {
        let (s, c) = f.beta.sin_cos();
        let mut out: HashMap<BitString, Complex64> = HashMap::with_capacity(2 * self.amps.len());
        for (k, a) in self.amps.drain(..) {
            if !controls_hold(&k, &f.controls) {
                *out.entry(k).or_default() += a;
                continue;
            }
            let mut moved = k.clone();
            moved.flip(f.flip);
            permute_register(&mut moved, f);
            *out.entry(k).or_default() += a * c;
            *out.entry(moved).or_default() += a * Complex64::new(0.0, -s);
        }
        let mut pruned = 0.0;
        self.amps = out
            .into_iter()
            .filter(|(_, a)| {
                let keep = a.norm() >= PRUNE_AMPLITUDE;
                if !keep {
                    pruned += a.norm_sqr();
                }
                keep
            })
            .collect();
        self.amps.sort_by(|a, b| a.0.cmp(&b.0));
        self.pruned_mass += pruned;
    }

    /// Applies every gate; fails once the pruned mass exceeds the budget.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        assert_eq!(circuit.layout.total_qubits(), self.qubits);
        for g in &circuit.gates {
            self.apply_gate(g);
        }
        if self.pruned_mass > MAX_PRUNED_MASS {
            return Err(Error::PrunedMass(self.pruned_mass));
        }
        Ok(())
    }

    /// Probability of each bit pattern on `range`.
    pub fn marginal(&self, range: Range<usize>) -> BTreeMap<BitString, f64> {
        let mut out = BTreeMap::new();
        for (k, a) in &self.amps {
            *out.entry(k.extract(range.start, range.len())).or_insert(0.0) += a.norm_sqr();
        }
        out
    }

    /// Total probability of basis states satisfying `pred`.
    pub fn probability_where(&self, pred: impl Fn(&BitString) -> bool) -> f64 {
        self.amps
            .iter()
            .filter(|(k, _)| pred(k))
            .fold(0.0, |acc, (_, a)| acc + a.norm_sqr())
    }

    /// Probability that some qubit in `range` reads 1.
    pub fn nonzero_probability(&self, range: Range<usize>) -> f64 {
        self.probability_where(|k| !k.range_is_zero(range.start, range.len()))
    }

    /// Reduced density matrix entries `ρ[u][v]` of `range`, for off-diagonal
    /// coherence checks.
    pub fn reduced_coherence(&self, range: Range<usize>, u: &BitString, v: &BitString) -> Complex64 {
        let rest = |k: &BitString| {
            let mut r = k.clone();
            r.insert(range.start, &BitString::zeros(range.len()));
            r
        };
        let mut by_rest_u: HashMap<BitString, Complex64> = HashMap::new();
        for (k, a) in &self.amps {
            if &k.extract(range.start, range.len()) == u {
                by_rest_u.insert(rest(k), *a);
            }
        }
        let mut sum = Complex64::default();
        for (k, a) in &self.amps {
            if &k.extract(range.start, range.len()) == v {
                if let Some(au) = by_rest_u.get(&rest(k)) {
                    sum += au * a.conj();
                }
            }
        }
        sum
    }
}

/// Draws `shots` samples from a probability table with a seeded ChaCha stream.
pub fn sample(
    probabilities: &BTreeMap<BitString, f64>,
    shots: usize,
    seed: u64,
) -> Result<BTreeMap<BitString, usize>> {
    let keys: Vec<&BitString> = probabilities.keys().collect();
    let dist = WeightedIndex::new(probabilities.values().copied())
        .map_err(|e| Error::Validation(format!("cannot sample: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(keys[dist.sample(&mut rng)].clone()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Full `2^n` amplitude vector; bit `q` of an index is qubit `q`.
#[derive(Debug, Clone)]
pub struct DenseState {
    qubits: usize,
    amps: Vec<Complex64>,
}

fn index_holds(i: usize, controls: &[Control]) -> bool {
    controls
        .iter()
        .all(|c| ((i >> c.qubit) & 1 == 1) == c.positive)
}

fn index_to_bits(i: usize, qubits: usize) -> BitString {
    BitString::from_ones(qubits, (0..qubits).filter(|q| (i >> q) & 1 == 1))
}

impl DenseState {
    pub fn basis(qubits: usize, x: &BitString) -> Result<Self> {
        if qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                vertices: qubits,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let idx = x.iter_ones().fold(0usize, |acc, q| acc | (1 << q));
        let mut amps = vec![Complex64::default(); 1 << qubits];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    pub fn from_vec(qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if qubits > MAX_DENSE_QUBITS || amps.len() != 1 << qubits {
            return Err(Error::Validation("dense vector has the wrong size".into()));
        }
        Ok(Self { qubits, amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        match gate {
            Gate::X { target } => self.flip_where(*target, &[]),
            Gate::Mcx { controls, target } => self.flip_where(*target, controls),
            Gate::FractionalPermutation(f) => {
                let (s, c) = f.beta.sin_cos();
                let mut out = vec![Complex64::default(); self.amps.len()];
                for (i, &a) in self.amps.iter().enumerate() {
                    if a == Complex64::default() {
                        continue;
                    }
                    if !index_holds(i, &f.controls) {
                        out[i] += a;
                        continue;
                    }
                    let mut j = i ^ (1 << f.flip);
                    for m in f.perm.moved() {
                        let to = f.register + f.perm.image(m);
                        let bit = (i >> (f.register + m)) & 1;
                        j = (j & !(1 << to)) | (bit << to);
                    }
                    out[i] += a * c;
                    out[j] += a * Complex64::new(0.0, -s);
                }
                self.amps = out;
            }
            Gate::DiagonalPhase {
                register,
                gamma,
                function,
            } => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    let main = index_to_bits(i >> register.start, register.len());
                    *a *= Complex64::from_polar(1.0, -gamma * function.value(&main));
                }
            }
        }
    }

    fn flip_where(&mut self, target: usize, controls: &[Control]) {
        let bit = 1 << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 && index_holds(i, controls) {
                self.amps.swap(i, i | bit);
            }
        }
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) {
        assert_eq!(circuit.layout.total_qubits(), self.qubits);
        for g in &circuit.gates {
            self.apply_gate(g);
        }
    }

    /// Largest `|ψ_i − φ_i|` against a sparse state on the same register.
    pub fn max_difference(&self, other: &SparseState) -> f64 {
        assert_eq!(other.qubits(), self.qubits);
        let mut dense = self.amps.clone();
        for (k, a) in other.amplitudes() {
            let idx = k.iter_ones().fold(0usize, |acc, q| acc | (1 << q));
            dense[idx] -= a;
        }
        dense.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }
}
