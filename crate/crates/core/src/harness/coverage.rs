use std::fmt;

use crate::condlang::{BranchTree, VarDecl};
use crate::partition::{run_and_extract, Partition};
use crate::qsynth::compile;

use super::oracle::brute_force_partition;
use super::HarnessError;

/// How a sweep obtains each partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// Compile and simulate.
    Quantum,
    /// Enumerate classically.
    Oracle,
}

pub fn partition_with(tree: &BranchTree, mode: SweepMode) -> Result<Partition, HarnessError> {
    match mode {
        SweepMode::Quantum => Ok(run_and_extract(&compile(tree)?)?),
        SweepMode::Oracle => brute_force_partition(tree),
    }
}

/// Fraction of branches with at least one test case.
pub fn coverage(tree: &BranchTree, mode: SweepMode) -> Result<f64, HarnessError> {
    let p = partition_with(tree, mode)?;
    Ok(p.covered() as f64 / p.branches.len() as f64)
}

/// `tree` with the given variables re-declared at new widths.
pub fn with_widths(tree: &BranchTree, widths: &[(String, u32)]) -> BranchTree {
    BranchTree {
        decls: tree
            .decls
            .iter()
            .map(|d| VarDecl {
                name: d.name.clone(),
                width: widths
                    .iter()
                    .find(|(n, _)| *n == d.name)
                    .map_or(d.width, |(_, w)| *w),
            })
            .collect(),
        root: tree.root.clone(),
    }
}

/// Coverage at each uniform variable width, in increasing width order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageCurve {
    pub points: Vec<(u32, f64)>,
}

impl CoverageCurve {
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[0].1 <= w[1].1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub curve: CoverageCurve,
    /// Smallest uniform width with full coverage.
    pub minimal_width: Option<u32>,
    /// Starting from `minimal_width`, each variable narrowed as far as full
    /// coverage allows, so narrowing any one of them further loses a branch.
    pub minimal_widths: Option<Vec<(String, u32)>>,
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width,coverage")?;
        for (w, c) in &self.curve.points {
            writeln!(f, "{w},{c:.4}")?;
        }
        match (&self.minimal_width, &self.minimal_widths) {
            (Some(w), Some(per_var)) => {
                let vars: Vec<String> = per_var.iter().map(|(n, w)| format!("{n}:{w}")).collect();
                writeln!(
                    f,
                    "# full coverage from width {w}; minimal widths {}",
                    vars.join(" ")
                )
            }
            _ => writeln!(f, "# no width in range covers every branch"),
        }
    }
}

/// Sweeps uniform widths `1..=max_width` and reports where every branch is
/// first reached.
pub fn coverage_sweep(
    tree: &BranchTree,
    max_width: u32,
    mode: SweepMode,
) -> Result<CoverageReport, HarnessError> {
    let mut points = Vec::new();
    for w in 1..=max_width {
        points.push((w, coverage(&tree.with_uniform_width(w), mode)?));
    }
    let minimal_width = points.iter().find(|(_, c)| *c >= 1.0).map(|(w, _)| *w);
    let minimal_widths = match minimal_width {
        Some(w) => Some(narrow_each(tree, w, mode)?),
        None => None,
    };
    Ok(CoverageReport {
        curve: CoverageCurve { points },
        minimal_width,
        minimal_widths,
    })
}

fn narrow_each(
    tree: &BranchTree,
    uniform: u32,
    mode: SweepMode,
) -> Result<Vec<(String, u32)>, HarnessError> {
    let mut widths: Vec<(String, u32)> = tree
        .decls
        .iter()
        .map(|d| (d.name.clone(), uniform))
        .collect();
    for i in 0..widths.len() {
        while widths[i].1 > 1 {
            let mut trial = widths.clone();
            trial[i].1 -= 1;
            if coverage(&with_widths(tree, &trial), mode)? < 1.0 {
                break;
            }
            widths = trial;
        }
    }
    Ok(widths)
}
