//! Quantum symbolic execution.
//!
//! A program's branch conditions are compiled into a reversible circuit over
//! two registers: `|s>` holds every possible input at once (a uniform
//! superposition prepared with Hadamards) and `|c>` holds flag qubits that the
//! comparator, AND and OR sub-circuits write. After simulation, each input is
//! entangled with exactly one flag pattern, and grouping inputs by pattern
//! yields the set of test cases reaching each branch.
//!
//! - [`condlang`]: DSL parser and classical path enumeration.
//! - [`qcore`]: dense statevector simulator and reversible arithmetic.
//! - [`qsynth`]: layout planning and circuit synthesis.
//! - [`partition`]: simulation, decoding and sampling.
//! - [`harness`]: brute-force oracle, corpus, coverage sweep.

pub mod condlang;
pub mod harness;
pub mod partition;
pub mod qcore;
pub mod qsynth;
