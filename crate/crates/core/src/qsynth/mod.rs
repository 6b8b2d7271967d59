//! Compilation of a branch tree into a quantum symbolic execution circuit.
//!
//! Each relational condition becomes a comparator that writes a two-qubit
//! flag (`10` for a > b, `01` for a < b, `00` for equality), each `&&`/`||`
//! a single output flag, and `!` nothing at all. Nested conditions run under
//! controls selecting the flag states of the path above them, so the final
//! flag register spells out which leaf every input reaches.

mod compile;
mod layout;
mod recipe;

use thiserror::Error;

use crate::qcore::CircuitError;

pub use compile::{
    compile, compile_qse, logical_and_fragment, logical_or_fragment, prepare_space,
    relational_fragment, ConditionRecord, FlagDictionary, QseCircuit,
};
pub use layout::{plan_layout, plan_layout_with_ceiling, Breakdown, FlagSlot, VariableLayout};
pub use recipe::{
    apply_not, else_recipe, logical_semantics, relational_semantics, t_module, FlagPair,
    FlagPattern, FlagSemantics, Recipe,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("circuit needs more qubits than the simulator ceiling of {ceiling} ({breakdown})")]
    Ceiling { ceiling: usize, breakdown: String },
    #[error("{region} region needs {needed} qubits but has {available}")]
    ScratchExhausted {
        region: String,
        needed: usize,
        available: usize,
    },
    #[error("`{0}` is not a comparison")]
    NotRelational(String),
    #[error("no flags allocated for condition `{0}`")]
    UnknownCondition(String),
    #[error("variable `{0}` is not in the layout")]
    UnknownVariable(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}
