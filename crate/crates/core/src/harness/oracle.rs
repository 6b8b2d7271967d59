use std::collections::BTreeSet;
use std::fmt;

use crate::condlang::BranchTree;
use crate::partition::{Partition, TestCase};

use super::HarnessError;

/// Largest input space the oracle enumerates: 2^24 assignments.
pub const ORACLE_MAX_WIDTH: u32 = 24;

/// Classical ground truth: every assignment routed through the tree.
pub fn brute_force_partition(tree: &BranchTree) -> Result<Partition, HarnessError> {
    let width = tree.input_width();
    if width > ORACLE_MAX_WIDTH {
        return Err(HarnessError::OracleCeiling {
            width,
            max: ORACLE_MAX_WIDTH,
        });
    }
    let variables: Vec<(String, u32)> = tree
        .decls
        .iter()
        .map(|d| (d.name.clone(), d.width))
        .collect();
    let mut partition = Partition::empty(variables.clone(), &tree.leaf_ids());
    let mut values = vec![0u64; variables.len()];
    for index in 0..1u64 << width {
        let mut rest = index;
        for (slot, (_, w)) in values.iter_mut().zip(&variables) {
            *slot = rest & ((1u64 << w) - 1);
            rest >>= w;
        }
        let lookup = |name: &str| {
            let pos = variables.iter().position(|(n, _)| n == name);
            values[pos.expect("parser rejects undeclared variables")]
        };
        let leaf = tree.root.route(&lookup);
        let case = TestCase::new(
            variables
                .iter()
                .zip(&values)
                .map(|((n, _), v)| (n.clone(), *v))
                .collect(),
        );
        partition
            .branch_mut(leaf)
            .expect("route returns a leaf of the tree")
            .cases
            .insert(case);
    }
    Ok(partition)
}

/// A test case present in one partition's branch but not the other's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Difference {
    pub branch: String,
    pub case: TestCase,
    /// True when the case is in the quantum subset only.
    pub quantum_only: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub total_differences: usize,
    /// The first ten differences, in branch order.
    pub counterexamples: Vec<Difference>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.total_differences == 0
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "PASS");
        }
        writeln!(f, "FAIL {} differences", self.total_differences)?;
        for d in &self.counterexamples {
            let side = if d.quantum_only {
                "quantum"
            } else {
                "classical"
            };
            writeln!(
                f,
                "  {} in branch {} only in the {side} partition",
                d.case, d.branch
            )?;
        }
        Ok(())
    }
}

/// Per-branch set difference between a quantum and a classical partition.
pub fn compare_partitions(q: &Partition, c: &Partition) -> Result<Comparison, HarnessError> {
    let ids = |p: &Partition| {
        p.branches
            .iter()
            .map(|b| b.id.clone())
            .collect::<BTreeSet<_>>()
    };
    if ids(q) != ids(c) {
        return Err(HarnessError::BranchMismatch {
            quantum: ids(q).into_iter().collect(),
            classical: ids(c).into_iter().collect(),
        });
    }
    let mut comparison = Comparison {
        total_differences: 0,
        counterexamples: Vec::new(),
    };
    for qb in &q.branches {
        let cb = c.branch(&qb.id).expect("branch ids agree");
        let only_q = qb.cases.difference(&cb.cases).map(|case| (case, true));
        let only_c = cb.cases.difference(&qb.cases).map(|case| (case, false));
        for (case, quantum_only) in only_q.chain(only_c) {
            comparison.total_differences += 1;
            if comparison.counterexamples.len() < 10 {
                comparison.counterexamples.push(Difference {
                    branch: qb.id.clone(),
                    case: case.clone(),
                    quantum_only,
                });
            }
        }
    }
    Ok(comparison)
}
