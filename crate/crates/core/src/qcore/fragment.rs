use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::gate::{Control, Gate, QubitId};
use super::CircuitError;

/// Contiguous block of qubits recorded under a register name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitRange {
    pub start: usize,
    pub len: usize,
}

impl QubitRange {
    pub fn new(start: usize, len: usize) -> Self {
        QubitRange { start, len }
    }

    pub fn qubits(&self) -> Vec<QubitId> {
        (self.start..self.start + self.len).map(QubitId).collect()
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn contains(&self, qubit: QubitId) -> bool {
        (self.start..self.end()).contains(&qubit.0)
    }
}

/// An ordered gate list plus bookkeeping about the registers it was built over.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CircuitFragment {
    pub gates: Vec<Gate>,
    pub allocation: BTreeMap<String, QubitRange>,
    /// Qubits the fragment borrows as scratch; they start and end in |0>.
    pub ancilla: BTreeSet<QubitId>,
}

impl CircuitFragment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_gates(gates: Vec<Gate>) -> Self {
        CircuitFragment {
            gates,
            ..Self::default()
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends `other` after `self`, merging register and ancilla records.
    pub fn append(&mut self, other: CircuitFragment) {
        self.gates.extend(other.gates);
        for (name, range) in other.allocation {
            self.allocation.entry(name).or_insert(range);
        }
        self.ancilla.extend(other.ancilla);
    }

    pub fn with_register(mut self, name: &str, range: QubitRange) -> Self {
        self.allocation.insert(name.to_string(), range);
        self
    }

    pub fn with_ancilla(mut self, qubits: &[QubitId]) -> Self {
        self.ancilla.extend(qubits.iter().copied());
        self
    }

    /// Gate-wise inverse. Every supported gate is self-inverse, so this is the
    /// reversed gate list.
    pub fn inverse(&self) -> CircuitFragment {
        CircuitFragment {
            gates: self.gates.iter().rev().cloned().collect(),
            allocation: self.allocation.clone(),
            ancilla: self.ancilla.clone(),
        }
    }

    /// Every qubit touched as target or control.
    pub fn qubits(&self) -> BTreeSet<QubitId> {
        self.gates.iter().flat_map(|g| g.qubits()).collect()
    }

    /// One past the highest qubit index used, i.e. the minimum state size.
    pub fn width(&self) -> usize {
        self.qubits().iter().next_back().map_or(0, |q| q.0 + 1)
    }

    /// Adds `controls` to every gate: the result acts as `self` on basis
    /// states where all controls match and as the identity elsewhere.
    pub fn controlled(&self, controls: &[Control]) -> Result<CircuitFragment, CircuitError> {
        let mut seen = BTreeSet::new();
        for c in controls {
            if !seen.insert(c.qubit) {
                return Err(CircuitError::DuplicateControl(c.qubit));
            }
        }
        let touched = self.qubits();
        if let Some(c) = controls.iter().find(|c| touched.contains(&c.qubit)) {
            return Err(CircuitError::ControlOverlap(c.qubit));
        }
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let mut gate = g.clone();
                gate.controls.extend_from_slice(controls);
                gate
            })
            .collect();
        Ok(CircuitFragment {
            gates,
            allocation: self.allocation.clone(),
            ancilla: self.ancilla.clone(),
        })
    }

    /// Text netlist, one `GATE kind targets=[..] controls=[(q,±)..]` per line,
    /// preceded by `#` comment lines naming registers and ancillae.
    pub fn netlist(&self) -> String {
        let mut out = String::new();
        for (name, range) in &self.allocation {
            let _ = writeln!(
                out,
                "# register {name} = q{}-q{}",
                range.start,
                range.end() - 1
            );
        }
        if !self.ancilla.is_empty() {
            let list: Vec<String> = self.ancilla.iter().map(|q| q.0.to_string()).collect();
            let _ = writeln!(
                out,
                "# ancilla [{}] ({} qubits)",
                list.join(","),
                self.ancilla.len()
            );
        }
        for gate in &self.gates {
            let _ = writeln!(out, "{gate}");
        }
        out
    }
}

/// Free-function form of [`CircuitFragment::controlled`].
pub fn controlled(
    frag: &CircuitFragment,
    controls: &[Control],
) -> Result<CircuitFragment, CircuitError> {
    frag.controlled(controls)
}
