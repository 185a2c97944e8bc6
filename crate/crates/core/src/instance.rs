//! Flexible job-shop instances, the assignment enumeration and schedule
//! encoding.
//!
//! Jobs, operations and machines are addressed by 0-based indices. Time slots
//! are 1-based (`1..=horizon`) because the makespan `max(t + d)` is defined on
//! slot numbers. Durations of ineligible machines are not stored at all.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    eligible: BTreeMap<usize, u32>,
}

impl Operation {
    pub fn new(eligible: impl IntoIterator<Item = (usize, u32)>) -> Self {
        Self {
            eligible: eligible.into_iter().collect(),
        }
    }

    /// Eligible machines with their durations, in machine order.
    pub fn eligible(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.eligible.iter().map(|(&m, &d)| (m, d))
    }

    pub fn duration(&self, machine: usize) -> Option<u32> {
        self.eligible.get(&machine).copied()
    }

    pub fn eligible_count(&self) -> usize {
        self.eligible.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub name: String,
    pub operations: Vec<Operation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FjspInstance {
    machines: Vec<String>,
    horizon: u32,
    jobs: Vec<Job>,
}

/// A tuple (operation, machine, start slot).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub job: usize,
    pub op: usize,
    pub machine: usize,
    pub time: u32,
}

impl Assignment {
    pub fn new(job: usize, op: usize, machine: usize, time: u32) -> Self {
        Self {
            job,
            op,
            machine,
            time,
        }
    }

    pub fn same_operation(&self, other: &Assignment) -> bool {
        self.job == other.job && self.op == other.op
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "O({},{})@(M{},T{})",
            self.job + 1,
            self.op + 1,
            self.machine + 1,
            self.time
        )
    }
}

impl FjspInstance {
    pub fn new(machines: Vec<String>, horizon: u32, jobs: Vec<Job>) -> Result<Self> {
        let inst = Self {
            machines,
            horizon,
            jobs,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::Semantic("horizon must be at least 1".into()));
        }
        if self.machines.is_empty() {
            return Err(Error::Semantic("no machines declared".into()));
        }
        if self.jobs.is_empty() {
            return Err(Error::Semantic("no jobs declared".into()));
        }
        for (j, job) in self.jobs.iter().enumerate() {
            if job.operations.is_empty() {
                return Err(Error::Semantic(format!("job {} has no operations", job.name)));
            }
            for (o, op) in job.operations.iter().enumerate() {
                if op.eligible.is_empty() {
                    return Err(Error::Semantic(format!(
                        "operation {} of job {} has an empty eligible-machine set",
                        o + 1,
                        job.name
                    )));
                }
                for (&m, &d) in &op.eligible {
                    if m >= self.machines.len() {
                        return Err(Error::Semantic(format!(
                            "operation {} of job {} references machine index {m}",
                            o + 1,
                            job.name
                        )));
                    }
                    if d == 0 {
                        return Err(Error::Semantic(format!(
                            "operation ({},{}) has nonpositive duration on {}",
                            j + 1,
                            o + 1,
                            self.machines[m]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn machines(&self) -> &[String] {
        &self.machines
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn operation(&self, job: usize, op: usize) -> &Operation {
        &self.jobs[job].operations[op]
    }

    /// Total operation count `|O|`, which is also the number of marks a
    /// feasible bit string carries.
    pub fn operation_count(&self) -> usize {
        self.jobs.iter().map(|j| j.operations.len()).sum()
    }

    /// `(job, op)` pairs in job-major order.
    pub fn operations(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.jobs
            .iter()
            .enumerate()
            .flat_map(|(j, job)| (0..job.operations.len()).map(move |o| (j, o)))
    }

    pub fn duration(&self, a: &Assignment) -> Option<u32> {
        self.jobs
            .get(a.job)?
            .operations
            .get(a.op)?
            .duration(a.machine)
    }

    pub fn is_valid_assignment(&self, a: &Assignment) -> bool {
        self.duration(a).is_some() && (1..=self.horizon).contains(&a.time)
    }

    /// Same data, different number of time slots.
    pub fn with_horizon(&self, horizon: u32) -> Result<Self> {
        Self::new(self.machines.clone(), horizon, self.jobs.clone())
    }

    pub fn to_json(&self) -> String {
        let doc = InstanceDoc {
            machines: self.machines.clone(),
            horizon: i64::from(self.horizon),
            jobs: self
                .jobs
                .iter()
                .map(|job| JobDoc {
                    name: job.name.clone(),
                    operations: job
                        .operations
                        .iter()
                        .map(|op| OperationDoc {
                            eligible: op
                                .eligible()
                                .map(|(m, d)| (self.machines[m].clone(), i64::from(d)))
                                .collect(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("instance serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    machines: Vec<String>,
    horizon: i64,
    jobs: Vec<JobDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobDoc {
    name: String,
    operations: Vec<OperationDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperationDoc {
    eligible: BTreeMap<String, i64>,
}

/// Parses and validates the JSON instance format.
pub fn parse_instance(text: &str) -> Result<FjspInstance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut machine_ids = HashMap::new();
    for (i, name) in doc.machines.iter().enumerate() {
        if machine_ids.insert(name.as_str(), i).is_some() {
            return Err(Error::Semantic(format!("machine {name} declared twice")));
        }
    }
    if doc.horizon < 1 || doc.horizon > i64::from(u32::MAX) {
        return Err(Error::Semantic(format!(
            "horizon must be a positive integer, got {}",
            doc.horizon
        )));
    }
    let mut jobs = Vec::with_capacity(doc.jobs.len());
    for job in doc.jobs {
        let mut operations = Vec::with_capacity(job.operations.len());
        for (o, op) in job.operations.into_iter().enumerate() {
            let mut eligible = BTreeMap::new();
            for (machine, d) in op.eligible {
                let &m = machine_ids.get(machine.as_str()).ok_or_else(|| {
                    Error::Semantic(format!(
                        "operation {} of job {} names unknown machine {machine}",
                        o + 1,
                        job.name
                    ))
                })?;
                if d < 1 || d > i64::from(u32::MAX) {
                    return Err(Error::Semantic(format!(
                        "operation {} of job {} has nonpositive duration {d} on {machine}",
                        o + 1,
                        job.name
                    )));
                }
                eligible.insert(m, d as u32);
            }
            operations.push(Operation { eligible });
        }
        jobs.push(Job {
            name: job.name,
            operations,
        });
    }
    FjspInstance::new(doc.machines, doc.horizon as u32, jobs)
}

/// The enumeration of machine-eligible assignments, lexicographic in
/// `(job, op, machine, time)`. Vertices are 0-based.
#[derive(Debug, Clone)]
pub struct AssignmentIndex {
    backward: Vec<Assignment>,
    forward: HashMap<Assignment, usize>,
    op_ranges: Vec<Range<usize>>,
    op_of_vertex: Vec<usize>,
}

pub fn build_index(inst: &FjspInstance) -> AssignmentIndex {
    let mut backward = Vec::new();
    let mut op_ranges = Vec::new();
    let mut op_of_vertex = Vec::new();
    for (flat, (j, o)) in inst.operations().enumerate() {
        let start = backward.len();
        for (m, _) in inst.operation(j, o).eligible() {
            for t in 1..=inst.horizon() {
                backward.push(Assignment::new(j, o, m, t));
                op_of_vertex.push(flat);
            }
        }
        op_ranges.push(start..backward.len());
    }
    let forward = backward.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    AssignmentIndex {
        backward,
        forward,
        op_ranges,
        op_of_vertex,
    }
}

impl AssignmentIndex {
    /// Number of indexed assignments `N`.
    pub fn len(&self) -> usize {
        self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backward.is_empty()
    }

    pub fn forward(&self, a: &Assignment) -> Option<usize> {
        self.forward.get(a).copied()
    }

    pub fn backward(&self, vertex: usize) -> &Assignment {
        &self.backward[vertex]
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.backward
    }

    /// Vertex range of each operation, in job-major operation order.
    pub fn op_ranges(&self) -> &[Range<usize>] {
        &self.op_ranges
    }

    /// Flat operation id owning `vertex`.
    pub fn op_of_vertex(&self, vertex: usize) -> usize {
        self.op_of_vertex[vertex]
    }
}

/// A set of assignments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Schedule {
    assignments: BTreeSet<Assignment>,
}

impl Schedule {
    pub fn new(assignments: impl IntoIterator<Item = Assignment>) -> Self {
        Self {
            assignments: assignments.into_iter().collect(),
        }
    }

    pub fn assignments(&self) -> impl Iterator<Item = &Assignment> {
        self.assignments.iter()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn insert(&mut self, a: Assignment) -> bool {
        self.assignments.insert(a)
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.assignments.contains(a)
    }

    /// The assignment of operation `(job, op)`, if exactly one exists.
    pub fn assignment_of(&self, job: usize, op: usize) -> Option<&Assignment> {
        let mut it = self
            .assignments
            .iter()
            .filter(|a| a.job == job && a.op == op);
        match (it.next(), it.next()) {
            (Some(a), None) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.assignments.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

pub fn encode(index: &AssignmentIndex, s: &Schedule) -> Result<BitString> {
    let mut x = BitString::zeros(index.len());
    for a in s.assignments() {
        let v = index
            .forward(a)
            .ok_or_else(|| Error::IneligibleAssignment(a.to_string()))?;
        x.set(v, true);
    }
    Ok(x)
}

pub fn decode(index: &AssignmentIndex, x: &BitString) -> Result<Schedule> {
    check_len(index.len(), x.len())?;
    Ok(Schedule::new(x.iter_ones().map(|v| *index.backward(v))))
}

/// `max(t + d)` over the schedule; 0 for the empty schedule.
pub fn makespan(inst: &FjspInstance, s: &Schedule) -> Result<u32> {
    s.assignments().try_fold(0, |acc, a| {
        let d = inst
            .duration(a)
            .ok_or_else(|| Error::IneligibleAssignment(a.to_string()))?;
        Ok(acc.max(a.time + d))
    })
}

/// Checks the assignment, order and machine constraints directly on a
/// schedule, without going through the constraint graph.
pub fn satisfies_constraints(inst: &FjspInstance, s: &Schedule) -> bool {
    if !s.assignments().all(|a| inst.is_valid_assignment(a)) {
        return false;
    }
    // assignment: exactly one per operation
    let mut per_op: HashMap<(usize, usize), usize> = HashMap::new();
    for a in s.assignments() {
        *per_op.entry((a.job, a.op)).or_default() += 1;
    }
    if inst.operations().any(|key| per_op.get(&key) != Some(&1)) {
        return false;
    }
    let list: Vec<&Assignment> = s.assignments().collect();
    for (i, a) in list.iter().enumerate() {
        for b in &list[i + 1..] {
            let (da, db) = (inst.duration(a).unwrap(), inst.duration(b).unwrap());
            // order
            if a.job == b.job && a.op != b.op {
                let (early, late, d) = if a.op < b.op { (a, b, da) } else { (b, a, db) };
                if early.time + d > late.time {
                    return false;
                }
            }
            // machine
            if a.machine == b.machine && !a.same_operation(b) {
                let b_in_a = a.time <= b.time && b.time < a.time + da;
                let a_in_b = b.time <= a.time && a.time < b.time + db;
                if b_in_a || a_in_b {
                    return false;
                }
            }
        }
    }
    true
}

/// List scheduling in job/operation order: each operation takes the
/// earliest start slot, at or after its predecessor finishes, on the first
/// eligible machine that is idle for its whole duration.
pub fn greedy_schedule(inst: &FjspInstance) -> Result<Schedule> {
    let mut busy: Vec<Vec<(u32, u32)>> = vec![Vec::new(); inst.machines().len()];
    let mut schedule = Schedule::default();
    for (j, job) in inst.jobs().iter().enumerate() {
        let mut ready = 1u32;
        for (o, op) in job.operations.iter().enumerate() {
            let placed = (ready..=inst.horizon()).find_map(|t| {
                op.eligible().find_map(|(m, d)| {
                    let free = busy[m].iter().all(|&(s, e)| t + d <= s || e <= t);
                    free.then_some((m, t, d))
                })
            });
            let (m, t, d) = placed.ok_or(Error::HorizonTooSmall {
                horizon: inst.horizon(),
            })?;
            busy[m].push((t, t + d));
            schedule.insert(Assignment::new(j, o, m, t));
            ready = t + d;
        }
    }
    Ok(schedule)
}
