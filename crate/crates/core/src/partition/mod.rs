//! Runs a compiled circuit and reads the final state back as test-case
//! subsets, one per branch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::qcore::{measure_counts, CircuitError, Histogram, QubitId, Statevector};
use crate::qsynth::{QseCircuit, SynthError, VariableLayout};

/// Amplitudes below this magnitude are treated as absent.
pub const AMPLITUDE_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PartitionError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("test case {case} carries flags {flags}, which match no branch")]
    UnmatchedFlags { case: String, flags: String },
    #[error("test case {case} has probability {probability}, expected {expected}")]
    NonUniform {
        case: String,
        probability: f64,
        expected: f64,
    },
    #[error("test case {case} leaves scratch qubits {qubits:?} set")]
    DirtyScratch { case: String, qubits: Vec<usize> },
}

/// One input assignment, variables in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TestCase {
    pub assignment: Vec<(String, u64)>,
}

impl TestCase {
    pub fn new(assignment: Vec<(String, u64)>) -> Self {
        TestCase { assignment }
    }

    /// Reads the input register out of a basis-state index.
    pub fn from_index(layout: &VariableLayout, index: usize) -> Self {
        let assignment = layout
            .variables
            .iter()
            .map(|(name, range)| {
                let value = (index >> range.start) & ((1usize << range.len) - 1);
                (name.clone(), value as u64)
            })
            .collect();
        TestCase { assignment }
    }

    pub fn value(&self, name: &str) -> Option<u64> {
        self.assignment
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn values(&self) -> Vec<u64> {
        self.assignment.iter().map(|(_, v)| *v).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.assignment
                .iter()
                .map(|(n, v)| (n.clone(), json!(v)))
                .collect(),
        )
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assignment
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The test cases reaching one branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSubset {
    pub id: String,
    /// Flag pattern the branch was read from; `None` for a classical oracle.
    pub pattern: Option<String>,
    pub cases: BTreeSet<TestCase>,
}

/// Test cases grouped by branch, branches in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Declared variables and their widths.
    pub variables: Vec<(String, u32)>,
    pub branches: Vec<BranchSubset>,
}

impl Partition {
    /// Empty subsets for `branch_ids`.
    pub fn empty(variables: Vec<(String, u32)>, branch_ids: &[&str]) -> Self {
        Partition {
            variables,
            branches: branch_ids
                .iter()
                .map(|id| BranchSubset {
                    id: id.to_string(),
                    pattern: None,
                    cases: BTreeSet::new(),
                })
                .collect(),
        }
    }

    pub fn input_width(&self) -> u32 {
        self.variables.iter().map(|(_, w)| w).sum()
    }

    pub fn space_size(&self) -> u64 {
        1u64 << self.input_width()
    }

    pub fn branch(&self, id: &str) -> Option<&BranchSubset> {
        self.branches.iter().find(|b| b.id == id)
    }

    pub fn branch_mut(&mut self, id: &str) -> Option<&mut BranchSubset> {
        self.branches.iter_mut().find(|b| b.id == id)
    }

    pub fn sizes(&self) -> Vec<(String, usize)> {
        self.branches
            .iter()
            .map(|b| (b.id.clone(), b.cases.len()))
            .collect()
    }

    /// Branches with at least one test case.
    pub fn covered(&self) -> usize {
        self.branches.iter().filter(|b| !b.cases.is_empty()).count()
    }

    /// Structural check of disjointness, exhaustiveness and value ranges
    /// against the partition's own declarations.
    pub fn check_structure(&self) -> PartitionReport {
        let mut report = PartitionReport {
            sizes: self.sizes(),
            total: 0,
            space_size: self.space_size(),
            missing: Vec::new(),
            duplicates: Vec::new(),
            out_of_range: Vec::new(),
        };
        let mut owner: BTreeMap<&TestCase, &str> = BTreeMap::new();
        for branch in &self.branches {
            for case in &branch.cases {
                report.total += 1;
                let in_range = case.assignment.len() == self.variables.len()
                    && case
                        .assignment
                        .iter()
                        .zip(&self.variables)
                        .all(|((n, v), (dn, w))| n == dn && *v < 1u64 << w);
                if !in_range {
                    report.out_of_range.push(case.clone());
                }
                if let Some(first) = owner.insert(case, &branch.id) {
                    report
                        .duplicates
                        .push((case.clone(), first.to_string(), branch.id.clone()));
                }
            }
        }
        for index in 0..self.space_size() {
            let mut rest = index;
            let case = TestCase::new(
                self.variables
                    .iter()
                    .map(|(name, w)| {
                        let v = rest & ((1u64 << w) - 1);
                        rest >>= w;
                        (name.clone(), v)
                    })
                    .collect(),
            );
            if !owner.contains_key(&case) {
                report.missing.push(case);
            }
        }
        report
    }

    /// Report as JSON: per branch, its id, pattern, size and test cases.
    pub fn to_json(&self) -> Value {
        json!({
            "space_size": self.space_size(),
            "variables": self.variables.iter()
                .map(|(n, w)| json!({"name": n, "width": w}))
                .collect::<Vec<_>>(),
            "branches": self.branches.iter().map(|b| json!({
                "id": b.id,
                "pattern": b.pattern,
                "size": b.cases.len(),
                "cases": b.cases.iter().map(TestCase::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Outcome of [`verify_partition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionReport {
    pub sizes: Vec<(String, usize)>,
    pub total: u64,
    pub space_size: u64,
    pub missing: Vec<TestCase>,
    /// A test case listed under two branches: (case, first, second).
    pub duplicates: Vec<(TestCase, String, String)>,
    pub out_of_range: Vec<TestCase>,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.duplicates.is_empty() && self.out_of_range.is_empty()
    }
}

impl fmt::Display for PartitionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let sizes: Vec<String> = self.sizes.iter().map(|(b, n)| format!("{b}:{n}")).collect();
        writeln!(
            f,
            "{verdict} {} of {} test cases [{}]",
            self.total,
            self.space_size,
            sizes.join(" ")
        )?;
        for case in self.missing.iter().take(10) {
            writeln!(f, "  missing {case}")?;
        }
        for (case, a, b) in self.duplicates.iter().take(10) {
            writeln!(f, "  {case} in both {a} and {b}")?;
        }
        for case in self.out_of_range.iter().take(10) {
            writeln!(f, "  out of range {case}")?;
        }
        Ok(())
    }
}

/// Checks that `p` splits the input space of `layout` into disjoint subsets
/// covering every assignment exactly once.
pub fn verify_partition(p: &Partition, layout: &VariableLayout) -> PartitionReport {
    let declared: Vec<(String, u32)> = layout
        .variables
        .iter()
        .map(|(n, r)| (n.clone(), r.len as u32))
        .collect();
    if declared == p.variables {
        p.check_structure()
    } else {
        Partition {
            variables: declared,
            branches: p.branches.clone(),
        }
        .check_structure()
    }
}

/// Simulates `circuit` from |0...0> and returns the final state.
pub fn simulate(circuit: &QseCircuit) -> Result<Statevector, PartitionError> {
    let mut state = Statevector::new(circuit.total_qubits())?;
    state.apply(&circuit.full())?;
    Ok(state)
}

fn flag_string(flags: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|i| if flags >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Simulates the circuit and sorts every basis term of the final state into
/// the branch its flags name.
pub fn run_and_extract(circuit: &QseCircuit) -> Result<Partition, PartitionError> {
    let state = simulate(circuit)?;
    extract(circuit, &state)
}

/// Decodes an already simulated final state.
pub fn extract(circuit: &QseCircuit, state: &Statevector) -> Result<Partition, PartitionError> {
    let layout = &circuit.layout;
    let dictionary = &circuit.dictionary;
    let expected = 1.0 / (1u64 << layout.s_width) as f64;
    let work_mask: usize = layout.work_qubits().iter().map(|q| q.mask()).sum();

    let mut partition = Partition {
        variables: layout
            .variables
            .iter()
            .map(|(n, r)| (n.clone(), r.len as u32))
            .collect(),
        branches: dictionary
            .branches
            .iter()
            .map(|(id, pattern)| BranchSubset {
                id: id.clone(),
                pattern: Some(pattern.to_string()),
                cases: BTreeSet::new(),
            })
            .collect(),
    };
    for (index, amp) in state.support(AMPLITUDE_THRESHOLD) {
        let case = TestCase::from_index(layout, index);
        let probability = amp.norm_sqr();
        if (probability - expected).abs() > AMPLITUDE_THRESHOLD {
            return Err(PartitionError::NonUniform {
                case: case.to_string(),
                probability,
                expected,
            });
        }
        if index & work_mask != 0 {
            let qubits = layout
                .work_qubits()
                .into_iter()
                .filter(|q| index & q.mask() != 0)
                .map(QubitId::index)
                .collect();
            return Err(PartitionError::DirtyScratch {
                case: case.to_string(),
                qubits,
            });
        }
        let flags = dictionary.flags_of(index);
        let Some(branch) = dictionary.lookup(flags) else {
            return Err(PartitionError::UnmatchedFlags {
                case: case.to_string(),
                flags: flag_string(flags, layout.flag_width),
            });
        };
        partition
            .branch_mut(branch)
            .expect("dictionary branches are partition branches")
            .cases
            .insert(case);
    }
    Ok(partition)
}

/// Measurement order for histograms: flags from `c^{m-1}` down to `c^0`,
/// then each variable in declaration order, most significant qubit first.
pub fn measured_qubits(layout: &VariableLayout) -> Vec<QubitId> {
    let mut qubits: Vec<QubitId> = layout.flag_qubits().into_iter().rev().collect();
    for (_, range) in &layout.variables {
        qubits.extend(range.qubits().into_iter().rev());
    }
    qubits
}

/// Samples `shots` joint measurements of flags and inputs.
pub fn sample_histogram(
    circuit: &QseCircuit,
    shots: u64,
    seed: u64,
) -> Result<Histogram, PartitionError> {
    let state = simulate(circuit)?;
    sample_state(circuit, &state, shots, seed)
}

pub fn sample_state(
    circuit: &QseCircuit,
    state: &Statevector,
    shots: u64,
    seed: u64,
) -> Result<Histogram, PartitionError> {
    Ok(measure_counts(
        state,
        &measured_qubits(&circuit.layout),
        shots,
        seed,
    )?)
}

/// Splits a histogram key into the branch named by its flag bits and the
/// test case encoded by the rest.
pub fn decode_outcome(circuit: &QseCircuit, key: &str) -> Option<(String, TestCase)> {
    let layout = &circuit.layout;
    let (flag_bits, s_bits) = key.split_at(layout.flag_width);
    let flags = if flag_bits.is_empty() {
        0
    } else {
        u64::from_str_radix(flag_bits, 2).ok()?
    };
    let branch = circuit.dictionary.lookup(flags)?.to_string();
    let mut offset = 0;
    let mut assignment = Vec::new();
    for (name, range) in &layout.variables {
        let bits = s_bits.get(offset..offset + range.len)?;
        assignment.push((name.clone(), u64::from_str_radix(bits, 2).ok()?));
        offset += range.len;
    }
    Some((branch, TestCase::new(assignment)))
}

/// Histogram restricted to each branch, keyed by branch id.
pub fn group_by_branch(circuit: &QseCircuit, hist: &Histogram) -> BTreeMap<String, Histogram> {
    let mut groups: BTreeMap<String, Histogram> = BTreeMap::new();
    for (key, &count) in hist {
        let branch = decode_outcome(circuit, key).map_or_else(|| "?".to_string(), |(b, _)| b);
        groups.entry(branch).or_default().insert(key.clone(), count);
    }
    groups
}

/// `bitstring,count` lines under a header.
pub fn histogram_csv(hist: &Histogram) -> String {
    let mut out = String::from("bitstring,count\n");
    for (key, count) in hist {
        out.push_str(&format!("{key},{count}\n"));
    }
    out
}
