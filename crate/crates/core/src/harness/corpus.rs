use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::condlang::{collect_paths, count_conditions, parse_program, BranchTree};

use super::oracle::brute_force_partition;
use super::HarnessError;

/// One program of the benchmark corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusProgram {
    pub name: String,
    pub dsl_source: String,
    pub expected_division_count: usize,
    pub expected_path_count: usize,
    /// Smallest uniform variable width reaching every branch, for programs
    /// used in the coverage experiment.
    pub coverage_width: Option<u32>,
    pub notes: String,
}

impl CorpusProgram {
    pub fn tree(&self) -> Result<BranchTree, HarnessError> {
        parse_program(&self.dsl_source).map_err(|source| HarnessError::Parse {
            name: self.name.clone(),
            source,
        })
    }
}

#[derive(Deserialize)]
struct Manifest {
    program: Vec<Entry>,
}

#[derive(Deserialize)]
struct Entry {
    name: String,
    file: String,
    divisions: usize,
    paths: usize,
    coverage_width: Option<u32>,
    #[serde(default)]
    notes: String,
}

const MANIFEST: &str = include_str!("../../corpus/manifest.toml");

const SOURCES: &[(&str, &str)] = &[
    ("dart.qse", include_str!("../../corpus/dart.qse")),
    ("power.qse", include_str!("../../corpus/power.qse")),
    ("stat.qse", include_str!("../../corpus/stat.qse")),
    ("tcas.qse", include_str!("../../corpus/tcas.qse")),
    ("early.qse", include_str!("../../corpus/early.qse")),
    (
        "basic00181.qse",
        include_str!("../../corpus/basic00181.qse"),
    ),
    ("snp3-ok.qse", include_str!("../../corpus/snp3-ok.qse")),
    ("CWE789.qse", include_str!("../../corpus/CWE789.qse")),
];

fn parse_manifest(
    text: &str,
    read: impl Fn(&str) -> Result<String, HarnessError>,
) -> Result<Vec<CorpusProgram>, HarnessError> {
    let manifest: Manifest =
        toml::from_str(text).map_err(|e| HarnessError::Manifest(e.to_string()))?;
    manifest
        .program
        .into_iter()
        .map(|entry| {
            Ok(CorpusProgram {
                dsl_source: read(&entry.file)?,
                name: entry.name,
                expected_division_count: entry.divisions,
                expected_path_count: entry.paths,
                coverage_width: entry.coverage_width,
                notes: entry.notes,
            })
        })
        .collect()
}

/// The corpus compiled into the library.
pub fn embedded_corpus() -> Vec<CorpusProgram> {
    parse_manifest(MANIFEST, |file| {
        SOURCES
            .iter()
            .find(|(name, _)| *name == file)
            .map(|(_, src)| src.to_string())
            .ok_or_else(|| HarnessError::Manifest(format!("no embedded source {file}")))
    })
    .expect("embedded manifest is valid")
}

/// Reads `manifest.toml` and the sources it names from `dir`.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusProgram>, HarnessError> {
    let read = |file: &str| {
        let path = dir.join(file);
        std::fs::read_to_string(&path)
            .map_err(|e| HarnessError::Manifest(format!("{}: {e}", path.display())))
    };
    parse_manifest(&read("manifest.toml")?, read)
}

/// Path and division counts for one program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionRow {
    pub name: String,
    /// Leaves of the tree, i.e. syntactic paths.
    pub leaf_paths: usize,
    /// Paths some input actually follows.
    pub feasible_paths: usize,
    pub divisions: usize,
    pub expected_paths: usize,
    pub expected_divisions: usize,
}

impl DivisionRow {
    pub fn matches(&self) -> bool {
        self.feasible_paths == self.expected_paths && self.divisions == self.expected_divisions
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionTable {
    pub rows: Vec<DivisionRow>,
}

impl DivisionTable {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(DivisionRow::matches)
    }
}

impl fmt::Display for DivisionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:>10} {:>7} {:>10} {:>9}",
            "program", "CSE paths", "leaves", "divisions", "expected"
        )?;
        for r in &self.rows {
            let mark = if r.matches() { "ok" } else { "MISMATCH" };
            writeln!(
                f,
                "{:<12} {:>10} {:>7} {:>10} {:>9} {mark}",
                r.name,
                r.feasible_paths,
                r.leaf_paths,
                r.divisions,
                format!("{}/{}", r.expected_paths, r.expected_divisions),
            )?;
        }
        Ok(())
    }
}

/// Classical path counts next to quantum division counts.
pub fn division_count_report(corpus: &[CorpusProgram]) -> Result<DivisionTable, HarnessError> {
    let rows = corpus
        .iter()
        .map(|program| {
            let tree = program.tree()?;
            let oracle = brute_force_partition(&tree)?;
            Ok(DivisionRow {
                name: program.name.clone(),
                leaf_paths: collect_paths(&tree).len(),
                feasible_paths: oracle.covered(),
                divisions: count_conditions(&tree),
                expected_paths: program.expected_path_count,
                expected_divisions: program.expected_division_count,
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(DivisionTable { rows })
}
