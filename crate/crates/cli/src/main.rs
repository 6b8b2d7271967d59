use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use qse::condlang::{parse_program, BranchTree};
use qse::harness::{
    brute_force_partition, compare_partitions, coverage_sweep, division_count_report,
    embedded_corpus, load_corpus, SweepMode,
};
use qse::partition::{
    group_by_branch, histogram_csv, run_and_extract, sample_histogram, verify_partition,
};
use qse::qsynth::compile;

#[derive(Parser)]
#[command(
    name = "qse",
    version,
    about = "Quantum symbolic execution on a statevector simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the gate netlist and flag dictionary.
    Compile { file: PathBuf },
    /// Simulate and print the test-case subset of every branch.
    Run {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Sample the measured registers and print a histogram as CSV.
    Sample {
        file: PathBuf,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit one section per branch.
        #[arg(long)]
        by_branch: bool,
    },
    /// Compare the simulated partition with classical enumeration.
    Verify { file: PathBuf },
    /// Coverage at each uniform variable width.
    Sweep {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_width: u32,
        /// Enumerate classically instead of simulating.
        #[arg(long)]
        oracle: bool,
    },
    /// Division and path counts over the corpus.
    Bench {
        /// Directory holding manifest.toml; the built-in corpus otherwise.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

enum Failure {
    Verification,
    Usage(String),
}

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(path: &Path) -> Result<BranchTree, Failure> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_program(&source).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Compile { file } => {
            let circuit = compile(&load(&file)?)?;
            println!("# {}", circuit.layout.breakdown());
            print!("{}", circuit.netlist());
            print!("{}", circuit.dictionary.to_text());
        }
        Command::Run { file, json } => {
            let circuit = compile(&load(&file)?)?;
            let partition = run_and_extract(&circuit)?;
            let report = verify_partition(&partition, &circuit.layout);
            if json {
                println!("{}", partition.to_json());
            } else {
                for branch in &partition.branches {
                    println!(
                        "{} [{}] {} cases",
                        branch.id,
                        branch.pattern.as_deref().unwrap_or("none"),
                        branch.cases.len()
                    );
                    for case in &branch.cases {
                        println!("  {case}");
                    }
                }
                print!("{report}");
            }
            if !report.passed() {
                return Err(Failure::Verification);
            }
        }
        Command::Sample {
            file,
            shots,
            seed,
            by_branch,
        } => {
            let circuit = compile(&load(&file)?)?;
            let hist = sample_histogram(&circuit, shots, seed)?;
            if by_branch {
                for (branch, group) in group_by_branch(&circuit, &hist) {
                    println!("# {branch}");
                    print!("{}", histogram_csv(&group));
                }
            } else {
                print!("{}", histogram_csv(&hist));
            }
        }
        Command::Verify { file } => {
            let tree = load(&file)?;
            let start = Instant::now();
            let quantum = run_and_extract(&compile(&tree)?)?;
            let simulated = start.elapsed();
            let classical = brute_force_partition(&tree)?;
            let comparison = compare_partitions(&quantum, &classical)?;
            print!("{comparison}");
            eprintln!("simulation {simulated:.2?}, total {:.2?}", start.elapsed());
            if !comparison.passed() {
                return Err(Failure::Verification);
            }
        }
        Command::Sweep {
            file,
            max_width,
            oracle,
        } => {
            let mode = if oracle {
                SweepMode::Oracle
            } else {
                SweepMode::Quantum
            };
            print!("{}", coverage_sweep(&load(&file)?, max_width, mode)?);
        }
        Command::Bench { corpus } => {
            let programs = match corpus {
                Some(dir) => load_corpus(&dir)?,
                None => embedded_corpus(),
            };
            let table = division_count_report(&programs)?;
            print!("{table}");
            if !table.all_match() {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
