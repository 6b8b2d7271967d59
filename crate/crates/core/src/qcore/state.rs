use num_complex::Complex64;

use super::fragment::CircuitFragment;
use super::gate::{Gate, Op};
use super::CircuitError;

/// Largest state the simulator allocates unless told otherwise: 2^26
/// amplitudes of 16 bytes, 1 GiB.
pub const DEFAULT_QUBIT_CEILING: usize = 26;

/// Dense little-endian statevector: bit `k` of an amplitude's index is the
/// value of qubit `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// |0...0> on `num_qubits` qubits, subject to [`DEFAULT_QUBIT_CEILING`].
    pub fn new(num_qubits: usize) -> Result<Self, CircuitError> {
        Self::with_ceiling(num_qubits, DEFAULT_QUBIT_CEILING)
    }

    pub fn with_ceiling(num_qubits: usize, ceiling: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 || num_qubits > ceiling {
            return Err(CircuitError::Ceiling {
                requested: num_qubits,
                ceiling,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Basis states whose amplitude magnitude exceeds `threshold`.
    pub fn support(&self, threshold: f64) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.norm() > threshold)
            .map(|(i, a)| (i, *a))
    }

    /// Sets the state to computational basis state `index`.
    pub fn set_basis(&mut self, index: usize) {
        self.amplitudes
            .iter_mut()
            .for_each(|a| *a = Complex64::new(0.0, 0.0));
        self.amplitudes[index] = Complex64::new(1.0, 0.0);
    }

    pub fn check_gate(&self, gate: &Gate) -> Result<(), CircuitError> {
        if let Some(qubit) = gate.qubits().find(|q| q.0 >= self.num_qubits) {
            return Err(CircuitError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        if gate.controls.iter().any(|c| c.qubit == gate.target) {
            return Err(CircuitError::TargetIsControl(gate.target));
        }
        let mut seen = 0usize;
        for c in &gate.controls {
            if seen & c.qubit.mask() != 0 {
                return Err(CircuitError::DuplicateControl(c.qubit));
            }
            seen |= c.qubit.mask();
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), CircuitError> {
        self.check_gate(gate)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Applies every gate in order. The whole fragment is validated first, so
    /// an invalid fragment leaves the state untouched.
    pub fn apply(&mut self, frag: &CircuitFragment) -> Result<(), CircuitError> {
        for gate in &frag.gates {
            self.check_gate(gate)?;
        }
        for gate in &frag.gates {
            self.apply_unchecked(gate);
        }
        Ok(())
    }

    fn apply_unchecked(&mut self, gate: &Gate) {
        if gate.op == Op::I {
            return;
        }
        let (mask, value) = gate.control_mask();
        let target = gate.target.mask();
        // Only the 2^(n - 1 - k) index pairs whose control bits match are
        // visited: `free` runs through every subset of the unconstrained bits
        // in increasing order.
        let free = (self.amplitudes.len() - 1) & !(mask | target);
        let amps = &mut self.amplitudes;
        let mut rest = 0usize;
        match gate.op {
            Op::X => loop {
                let lo = rest | value;
                amps.swap(lo, lo | target);
                if rest == free {
                    break;
                }
                rest = rest.wrapping_sub(free) & free;
            },
            Op::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                loop {
                    let lo = rest | value;
                    let hi = lo | target;
                    let (a, b) = (amps[lo], amps[hi]);
                    amps[lo] = (a + b) * s;
                    amps[hi] = (a - b) * s;
                    if rest == free {
                        break;
                    }
                    rest = rest.wrapping_sub(free) & free;
                }
            }
            Op::I => {}
        }
    }
}

/// Functional form: consumes a state and returns it transformed by `frag`.
pub fn apply_fragment(
    mut state: Statevector,
    frag: &CircuitFragment,
) -> Result<Statevector, CircuitError> {
    state.apply(frag)?;
    Ok(state)
}

/// |0...0> on `num_qubits` qubits with the default ceiling.
pub fn new_state(num_qubits: usize) -> Result<Statevector, CircuitError> {
    Statevector::new(num_qubits)
}
