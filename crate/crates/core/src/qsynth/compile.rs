use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::condlang::{
    condition_key, materialized_nodes, visit_conditions, BranchTree, CondExpr, Node,
};
use crate::qcore::{CircuitFragment, Control, Gate, QubitId};

use super::layout::{comparison_gates, plan_layout, FlagSlot, ScratchAlloc, VariableLayout};
use super::recipe::{
    apply_not, logical_semantics, relational_semantics, FlagPattern, FlagSemantics, Recipe,
};
use super::SynthError;

/// What one flag-writing condition compiled to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionRecord {
    pub key: String,
    /// `T<`, `T<=`, ... for comparisons, `AND` or `OR` for logical operators.
    pub kind: String,
    pub flags: Vec<QubitId>,
    pub shared: bool,
}

/// Branch id to flag pattern, plus the condition records behind them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagDictionary {
    pub flag_start: usize,
    pub flag_width: usize,
    /// Leaves in source order.
    pub branches: Vec<(String, FlagPattern)>,
    pub conditions: Vec<ConditionRecord>,
}

impl FlagDictionary {
    pub fn pattern(&self, branch: &str) -> Option<&FlagPattern> {
        self.branches
            .iter()
            .find(|(b, _)| b == branch)
            .map(|(_, p)| p)
    }

    /// Branch whose pattern matches `flags` (bit `i` = `c^i`). Patterns are
    /// tried most specific first.
    pub fn lookup(&self, flags: u64) -> Option<&str> {
        let mut order: Vec<&(String, FlagPattern)> = self.branches.iter().collect();
        order.sort_by_key(|(_, p)| p.wildcards());
        order
            .into_iter()
            .find(|(_, p)| p.matches(flags))
            .map(|(b, _)| b.as_str())
    }

    /// Reads the flag value out of a full basis-state index.
    pub fn flags_of(&self, index: usize) -> u64 {
        ((index >> self.flag_start) & ((1usize << self.flag_width) - 1)) as u64
    }

    /// One `branch pattern` line per leaf, then one comment line per
    /// condition naming its flags (`c^i` counted from the flag register).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (branch, pattern) in &self.branches {
            let _ = writeln!(out, "{branch} {pattern}");
        }
        for rec in &self.conditions {
            let flags: Vec<String> = rec
                .flags
                .iter()
                .map(|q| format!("c{}", q.0 - self.flag_start))
                .collect();
            let shared = if rec.shared { " shared" } else { "" };
            let _ = writeln!(
                out,
                "# {} {} [{}]{shared}",
                rec.kind,
                rec.key,
                flags.join(",")
            );
        }
        out
    }
}

/// A compiled program: input preparation, the condition circuit, and how to
/// read its flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QseCircuit {
    pub prep: CircuitFragment,
    pub body: CircuitFragment,
    pub layout: VariableLayout,
    pub dictionary: FlagDictionary,
}

impl QseCircuit {
    pub fn total_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    /// `prep` followed by `body`.
    pub fn full(&self) -> CircuitFragment {
        let mut all = self.prep.clone();
        all.append(self.body.clone());
        all
    }

    pub fn netlist(&self) -> String {
        let mut out = format!(
            "# qubits {} ({})\n",
            self.total_qubits(),
            self.layout.breakdown()
        );
        out.push_str(&self.full().netlist());
        out
    }
}

/// Hadamard on every input qubit: the uniform superposition of all test
/// cases, flags left at |0>.
pub fn prepare_space(layout: &VariableLayout) -> CircuitFragment {
    let mut frag =
        CircuitFragment::from_gates(layout.s_qubits().into_iter().map(Gate::h).collect());
    for (name, range) in &layout.variables {
        frag = frag.with_register(name, *range);
    }
    frag
}

/// Relational fragment for `rel`, writing its flag pair from `layout`, with
/// `controls` added to every gate.
pub fn relational_fragment(
    rel: &CondExpr,
    layout: &VariableLayout,
    controls: &[Control],
) -> Result<CircuitFragment, SynthError> {
    let frag = comparison_gates(rel, layout, &mut ScratchAlloc::for_layout(layout))?;
    Ok(frag.controlled(controls)?)
}

/// Flips `out` on terms satisfying both recipes.
pub fn logical_and_fragment(
    lhs: &Recipe,
    rhs: &Recipe,
    out: QubitId,
) -> Result<CircuitFragment, SynthError> {
    Ok(CircuitFragment::from_gates(lhs.and(rhs).flips(out)?))
}

/// Flips `out` on terms satisfying either recipe: once for the left operand,
/// once for the right, and once more where both hold to undo the double flip.
pub fn logical_or_fragment(
    lhs: &Recipe,
    rhs: &Recipe,
    out: QubitId,
) -> Result<CircuitFragment, SynthError> {
    let mut gates = lhs.flips(out)?;
    gates.extend(rhs.flips(out)?);
    gates.extend(lhs.and(rhs).flips(out)?);
    Ok(CircuitFragment::from_gates(gates))
}

struct Compiler<'a> {
    layout: &'a VariableLayout,
    body: CircuitFragment,
    shared: BTreeMap<String, FlagSemantics>,
    records: Vec<ConditionRecord>,
    branches: Vec<(String, FlagPattern)>,
}

impl Compiler<'_> {
    fn slot(&self, key: &str) -> Result<FlagSlot, SynthError> {
        self.layout
            .flags
            .get(key)
            .copied()
            .ok_or_else(|| SynthError::UnknownCondition(key.to_string()))
    }

    fn record(&mut self, key: String, kind: String, slot: FlagSlot) {
        let shared = self.layout.shared_keys.contains(&key);
        self.records.push(ConditionRecord {
            key,
            kind,
            flags: slot.qubits(),
            shared,
        });
    }

    /// Emits the gates for `cond` restricted to `path` (unless it is shared
    /// and already computed) and returns its flag semantics.
    fn condition(&mut self, cond: &CondExpr, path: &Recipe) -> Result<FlagSemantics, SynthError> {
        if let CondExpr::Not(inner) = cond {
            return Ok(apply_not(self.condition(inner, path)?));
        }
        let key = condition_key(cond);
        let shared = self.layout.shared_keys.contains(&key);
        if let Some(sem) = self.shared.get(&key) {
            return Ok(sem.clone());
        }
        let path = if shared {
            Recipe::always()
        } else {
            path.clone()
        };
        let slot = self.slot(&key)?;
        let sem = match (cond, slot) {
            (CondExpr::Rel(_, op, _), FlagSlot::Pair(pair)) => {
                let frag = comparison_gates(
                    cond,
                    self.layout,
                    &mut ScratchAlloc::for_layout(self.layout),
                )?;
                self.body.append(path.apply(&frag)?);
                self.record(key.clone(), format!("T{}", op.symbol()), slot);
                relational_semantics(*op, pair)
            }
            (CondExpr::And(lhs, rhs) | CondExpr::Or(lhs, rhs), FlagSlot::Single(out)) => {
                let l = self.condition(lhs, &path)?;
                let r = self.condition(rhs, &path)?;
                let guarded = path.and(&l.sat);
                let (frag, kind) = if matches!(cond, CondExpr::And(..)) {
                    (logical_and_fragment(&guarded, &r.sat, out)?, "AND")
                } else {
                    let guarded_rhs = path.and(&r.sat);
                    (logical_or_fragment(&guarded, &guarded_rhs, out)?, "OR")
                };
                self.body.append(frag);
                self.record(key.clone(), kind.to_string(), slot);
                logical_semantics(out)
            }
            _ => return Err(SynthError::UnknownCondition(key)),
        };
        if shared {
            self.shared.insert(key, sem.clone());
        }
        Ok(sem)
    }

    fn walk(&mut self, node: &Node, path: Recipe) -> Result<(), SynthError> {
        match node {
            Node::Leaf(id) => {
                let pattern = FlagPattern::from_recipe(
                    &path,
                    self.layout.flag_start(),
                    self.layout.flag_width,
                );
                self.branches.push((id.clone(), pattern));
            }
            Node::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let sem = self.condition(cond, &path)?;
                self.walk(then_branch, path.and(&sem.sat))?;
                self.walk(else_branch, path.and(&sem.unsat))?;
            }
        }
        Ok(())
    }
}

/// Compiles `tree` over `layout`. Conditions that occur more than once are
/// computed first, without controls; every other condition is computed
/// under the controls of the path that reaches it.
pub fn compile_qse(tree: &BranchTree, layout: &VariableLayout) -> Result<QseCircuit, SynthError> {
    let mut compiler = Compiler {
        layout,
        body: CircuitFragment::new(),
        shared: BTreeMap::new(),
        records: Vec::new(),
        branches: Vec::new(),
    };
    let mut shared_nodes: Vec<&CondExpr> = Vec::new();
    let mut seen = BTreeSet::new();
    visit_conditions(&tree.root, &mut |cond| {
        for node in materialized_nodes(cond) {
            let key = condition_key(node);
            if layout.shared_keys.contains(&key) && seen.insert(key) {
                shared_nodes.push(node);
            }
        }
    });
    for node in shared_nodes {
        compiler.condition(node, &Recipe::always())?;
    }
    compiler.walk(&tree.root, Recipe::always())?;

    let mut body = compiler.body;
    body = body.with_ancilla(&layout.work_qubits());
    Ok(QseCircuit {
        prep: prepare_space(layout),
        body,
        layout: layout.clone(),
        dictionary: FlagDictionary {
            flag_start: layout.flag_start(),
            flag_width: layout.flag_width,
            branches: compiler.branches,
            conditions: compiler.records,
        },
    })
}

/// [`plan_layout`] then [`compile_qse`].
pub fn compile(tree: &BranchTree) -> Result<QseCircuit, SynthError> {
    compile_qse(tree, &plan_layout(tree)?)
}
