use std::collections::{BTreeMap, HashMap};

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gate::QubitId;
use super::state::Statevector;
use super::CircuitError;

/// Outcome bitstring -> count. Character `i` of a key is the measured value
/// of the `i`-th qubit in the list that was measured.
pub type Histogram = BTreeMap<String, u64>;

fn check_measured(state: &Statevector, qubits: &[QubitId]) -> Result<(), CircuitError> {
    if qubits.is_empty() {
        return Err(CircuitError::EmptyMeasurement);
    }
    let mut seen = 0usize;
    for &q in qubits {
        if q.0 >= state.num_qubits() {
            return Err(CircuitError::QubitOutOfRange {
                qubit: q,
                num_qubits: state.num_qubits(),
            });
        }
        if seen & q.mask() != 0 {
            return Err(CircuitError::DuplicateMeasuredQubit(q));
        }
        seen |= q.mask();
    }
    Ok(())
}

/// Renders the values of `qubits` in basis state `index`, first listed qubit
/// leftmost.
pub fn bitstring(index: usize, qubits: &[QubitId]) -> String {
    qubits
        .iter()
        .map(|q| if index & q.mask() != 0 { '1' } else { '0' })
        .collect()
}

/// Exact marginal distribution of `qubits`, keyed like [`Histogram`].
/// Outcomes with zero probability are omitted.
pub fn marginal(
    state: &Statevector,
    qubits: &[QubitId],
) -> Result<BTreeMap<String, f64>, CircuitError> {
    check_measured(state, qubits)?;
    let mask: usize = qubits.iter().map(|q| q.mask()).sum();
    let mut by_mask: HashMap<usize, f64> = HashMap::new();
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p > 0.0 {
            *by_mask.entry(i & mask).or_default() += p;
        }
    }
    Ok(by_mask
        .into_iter()
        .map(|(bits, p)| (bitstring(bits, qubits), p))
        .collect())
}

/// Samples `shots` joint measurements of `qubits` from the exact marginal.
/// The same `(state, qubits, shots, seed)` always produces the same histogram.
pub fn measure_counts(
    state: &Statevector,
    qubits: &[QubitId],
    shots: u64,
    seed: u64,
) -> Result<Histogram, CircuitError> {
    if shots == 0 {
        return Err(CircuitError::ZeroShots);
    }
    let dist = marginal(state, qubits)?;
    let (outcomes, weights): (Vec<String>, Vec<f64>) = dist.into_iter().unzip();
    let sampler = WeightedIndex::new(&weights).map_err(|_| CircuitError::EmptyMeasurement)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; outcomes.len()];
    for _ in 0..shots {
        counts[sampler.sample(&mut rng)] += 1;
    }
    Ok(outcomes
        .into_iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .collect())
}
