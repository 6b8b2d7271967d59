//! Dense statevector simulation and reversible arithmetic circuits.

pub mod arith;
mod fragment;
mod gate;
mod measure;
mod state;

use thiserror::Error;

pub use arith::{adder_fragment, comparator_fragment, multiplier_fragment};
pub use fragment::{controlled, CircuitFragment, QubitRange};
pub use gate::{qubit_range, Control, Gate, Op, QubitId};
pub use measure::{bitstring, marginal, measure_counts, Histogram};
pub use state::{apply_fragment, new_state, Statevector, DEFAULT_QUBIT_CEILING};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("{requested} qubits requested but the simulator ceiling is {ceiling}")]
    Ceiling { requested: usize, ceiling: usize },
    #[error("{qubit} is outside a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: QubitId, num_qubits: usize },
    #[error("{0} is both target and control of one gate")]
    TargetIsControl(QubitId),
    #[error("{0} appears twice in a control list")]
    DuplicateControl(QubitId),
    #[error("control {0} overlaps a qubit the fragment acts on")]
    ControlOverlap(QubitId),
    #[error("register width mismatch: {0}")]
    WidthMismatch(String),
    #[error("{0} is shared by registers that must be disjoint")]
    RegisterOverlap(QubitId),
    #[error("both comparator flags are {0}")]
    SameFlagQubit(QubitId),
    #[error("no qubits to measure")]
    EmptyMeasurement,
    #[error("{0} listed twice for measurement")]
    DuplicateMeasuredQubit(QubitId),
    #[error("shot count must be positive")]
    ZeroShots,
}

/// Basis-state helpers shared by unit tests across the crate.
#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Packs `value` into the qubits of `reg` (least significant first).
    pub fn encode(reg: &[QubitId], value: u64) -> usize {
        reg.iter()
            .enumerate()
            .filter(|(i, _)| value >> i & 1 == 1)
            .map(|(_, q)| q.mask())
            .sum()
    }

    pub fn decode(reg: &[QubitId], index: usize) -> u64 {
        reg.iter()
            .enumerate()
            .map(|(i, q)| ((index >> q.0) as u64 & 1) << i)
            .sum()
    }

    /// Runs `frag` on basis state `index` and returns the single basis state
    /// it maps to, failing if the output is a superposition.
    pub fn run_basis(frag: &CircuitFragment, num_qubits: usize, index: usize) -> usize {
        let mut state = Statevector::with_ceiling(num_qubits, 30).unwrap();
        state.set_basis(index);
        state.apply(frag).unwrap();
        let support: Vec<_> = state.support(1e-9).collect();
        assert_eq!(
            support.len(),
            1,
            "basis input {index:b} spread into {} terms",
            support.len()
        );
        assert!((support[0].1.re - 1.0).abs() < 1e-9 && support[0].1.im.abs() < 1e-9);
        support[0].0
    }
}
