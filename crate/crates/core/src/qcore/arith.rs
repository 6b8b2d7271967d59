//! Reversible arithmetic over qubit registers (least significant qubit first).
//!
//! All three constructions are built on one in-place ripple-carry adder with
//! carry ancillae that are uncomputed on the way back down, so every fragment
//! leaves its ancillae in |0> for any basis input.

use std::collections::BTreeSet;

use super::fragment::CircuitFragment;
use super::gate::{Control, Gate, QubitId};
use super::CircuitError;

/// Carry ancillae needed by [`adder_fragment`] for `n`-qubit operands.
pub fn adder_ancillas(n: usize) -> usize {
    n.saturating_sub(1)
}

/// Carry ancillae needed by [`multiplier_fragment`] for an `n`-qubit
/// multiplicand.
pub fn multiplier_ancillas(n: usize) -> usize {
    n.saturating_sub(1)
}

/// Ancillae needed by [`comparator_fragment`]: one sign qubit plus carries.
pub fn comparator_ancillas(n: usize) -> usize {
    1 + n.saturating_sub(1)
}

/// In-place ripple-carry addition `acc := acc + addend (mod 2^(n+1))` where
/// `acc` has one more qubit than `addend`. `carries` must hold at least n-1
/// qubits in |0>; they are returned to |0>. `addend` is only ever read.
///
/// The incoming carry of bit 0 is identically zero, so it has no qubit and the
/// gates that would be controlled on it are omitted. The outgoing carry of
/// the top bit lands directly in `acc[n]`.
pub fn ripple_add_in_place(addend: &[QubitId], acc: &[QubitId], carries: &[QubitId]) -> Vec<Gate> {
    let n = addend.len();
    debug_assert_eq!(acc.len(), n + 1);
    debug_assert!(carries.len() >= n.saturating_sub(1));
    // carry into bit i
    let carry = |i: usize| -> Option<QubitId> {
        match i {
            0 => None,
            i if i == n => Some(acc[n]),
            i => Some(carries[i - 1]),
        }
    };
    let carry_block = |i: usize| -> Vec<Gate> {
        let out = carry(i + 1).expect("carry out of bit i always exists");
        let mut gates = vec![
            Gate::toffoli(addend[i], acc[i], out),
            Gate::cnot(addend[i], acc[i]),
        ];
        if let Some(cin) = carry(i) {
            gates.push(Gate::toffoli(cin, acc[i], out));
        }
        gates
    };
    let sum_block = |i: usize| -> Vec<Gate> {
        let mut gates = vec![Gate::cnot(addend[i], acc[i])];
        if let Some(cin) = carry(i) {
            gates.push(Gate::cnot(cin, acc[i]));
        }
        gates
    };

    let mut gates = Vec::new();
    for i in 0..n {
        gates.extend(carry_block(i));
    }
    gates.push(Gate::cnot(addend[n - 1], acc[n - 1]));
    gates.extend(sum_block(n - 1));
    for i in (0..n - 1).rev() {
        gates.extend(carry_block(i).into_iter().rev());
        gates.extend(sum_block(i));
    }
    gates
}

fn check_width(what: &str, reg: &[QubitId], expected: usize) -> Result<(), CircuitError> {
    if reg.len() != expected {
        return Err(CircuitError::WidthMismatch(format!(
            "{what} has {} qubits, expected {expected}",
            reg.len()
        )));
    }
    Ok(())
}

fn check_at_least(what: &str, reg: &[QubitId], expected: usize) -> Result<(), CircuitError> {
    if reg.len() < expected {
        return Err(CircuitError::WidthMismatch(format!(
            "{what} has {} qubits, needs at least {expected}",
            reg.len()
        )));
    }
    Ok(())
}

/// Fails if any qubit appears in two of the groups (or twice in one group).
fn check_disjoint(groups: &[&[QubitId]]) -> Result<(), CircuitError> {
    let mut seen = BTreeSet::new();
    for group in groups {
        for q in group.iter() {
            if !seen.insert(*q) {
                return Err(CircuitError::RegisterOverlap(*q));
            }
        }
    }
    Ok(())
}

fn nonempty(what: &str, reg: &[QubitId]) -> Result<(), CircuitError> {
    if reg.is_empty() {
        return Err(CircuitError::WidthMismatch(format!("{what} is empty")));
    }
    Ok(())
}

/// `|a>|b>|0>_{n+1} -> |a>|b>|a+b>`. `a` and `b` are `n` qubits each and may
/// alias one another; `sum` and `anc` must be fresh.
pub fn adder_fragment(
    a: &[QubitId],
    b: &[QubitId],
    sum: &[QubitId],
    anc: &[QubitId],
) -> Result<CircuitFragment, CircuitError> {
    let n = a.len();
    nonempty("adder operand", a)?;
    check_width("adder operand b", b, n)?;
    check_width("adder sum register", sum, n + 1)?;
    check_at_least("adder ancilla", anc, adder_ancillas(n))?;
    let anc = &anc[..adder_ancillas(n)];
    let inputs: BTreeSet<QubitId> = a.iter().chain(b).copied().collect();
    let inputs: Vec<QubitId> = inputs.into_iter().collect();
    check_disjoint(&[&inputs, sum, anc])?;

    let mut gates: Vec<Gate> = a
        .iter()
        .zip(sum)
        .map(|(&ai, &si)| Gate::cnot(ai, si))
        .collect();
    gates.extend(ripple_add_in_place(b, sum, anc));
    Ok(CircuitFragment::from_gates(gates).with_ancilla(anc))
}

/// `|a>|b>|0>_{na+nb} -> |a>|b>|a*b>` by shift-and-add: for each bit `b_i`,
/// a `b_i`-controlled ripple add of `a` into `prod[i..=i+na]`.
pub fn multiplier_fragment(
    a: &[QubitId],
    b: &[QubitId],
    prod: &[QubitId],
    anc: &[QubitId],
) -> Result<CircuitFragment, CircuitError> {
    let (na, nb) = (a.len(), b.len());
    nonempty("multiplier operand a", a)?;
    nonempty("multiplier operand b", b)?;
    check_width("multiplier product register", prod, na + nb)?;
    check_at_least("multiplier ancilla", anc, multiplier_ancillas(na))?;
    let anc = &anc[..multiplier_ancillas(na)];
    check_disjoint(&[a, b, prod, anc])?;

    let mut gates = Vec::new();
    for (i, &bi) in b.iter().enumerate() {
        // Partial products so far are < 2^(na+i), so the window never overflows.
        for mut gate in ripple_add_in_place(a, &prod[i..=i + na], anc) {
            gate.controls.push(Control::one(bi));
            gates.push(gate);
        }
    }
    Ok(CircuitFragment::from_gates(gates).with_ancilla(anc))
}

/// `|a>|b>|00> -> |a>|b>|c1 c2>` with `(c1, c2) = (1,0)` for a > b, `(0,1)`
/// for a < b and `(0,0)` for a = b.
///
/// `a` (extended by a sign ancilla) is overwritten with `a - b` by running the
/// ripple adder backwards, the flags are read off the sign bit and a zero
/// test, and the adder then restores `a`. `a` and `b` must not alias.
pub fn comparator_fragment(
    a: &[QubitId],
    b: &[QubitId],
    c1: QubitId,
    c2: QubitId,
    anc: &[QubitId],
) -> Result<CircuitFragment, CircuitError> {
    let n = a.len();
    nonempty("comparator operand", a)?;
    check_width("comparator operand b", b, n)?;
    if c1 == c2 {
        return Err(CircuitError::SameFlagQubit(c1));
    }
    check_at_least("comparator ancilla", anc, comparator_ancillas(n))?;
    let anc = &anc[..comparator_ancillas(n)];
    check_disjoint(&[a, b, &[c1, c2], anc])?;

    let sign = anc[0];
    let carries = &anc[1..];
    let mut acc = a.to_vec();
    acc.push(sign);
    let add = ripple_add_in_place(b, &acc, carries);

    let mut gates: Vec<Gate> = add.iter().rev().cloned().collect();
    // a < b exactly when a - b wrapped below zero
    gates.push(Gate::cnot(sign, c2));
    // a > b is "no borrow" minus the a == b case, where every bit is zero
    gates.push(Gate::mcx(vec![Control::zero(sign)], c1));
    gates.push(Gate::mcx(
        acc.iter().map(|&q| Control::zero(q)).collect(),
        c1,
    ));
    gates.extend(add);
    Ok(CircuitFragment::from_gates(gates).with_ancilla(anc))
}
