use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::condlang::{
    condition_key, materialized_nodes, visit_conditions, ArithExpr, BranchTree, CondExpr, Node,
};
use crate::qcore::{
    adder_fragment, arith, comparator_fragment, multiplier_fragment, CircuitFragment, Gate,
    QubitId, QubitRange, DEFAULT_QUBIT_CEILING,
};

use super::recipe::FlagPair;
use super::SynthError;

/// Qubits a flag-writing condition owns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagSlot {
    Pair(FlagPair),
    Single(QubitId),
}

impl FlagSlot {
    pub fn qubits(&self) -> Vec<QubitId> {
        match *self {
            FlagSlot::Pair(FlagPair { hi, lo }) => vec![hi, lo],
            FlagSlot::Single(q) => vec![q],
        }
    }
}

/// Qubit map of a compiled program.
///
/// Regions, low to high: the input register `|s>` (variables in declaration
/// order, least significant qubit first), the flag register `|c>`, persistent
/// scratch for expression outputs and constants, a zero-padding register read
/// when a narrower operand meets a wider one, and transient ancillae for
/// carries and the comparator sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableLayout {
    pub variables: Vec<(String, QubitRange)>,
    pub s_width: usize,
    pub flag_width: usize,
    /// Flags per nesting depth; conditions at one depth sit on disjoint
    /// paths and reuse the same qubits.
    pub levels: Vec<QubitRange>,
    /// Flags of conditions that occur more than once and are computed once.
    pub shared: QubitRange,
    pub flags: BTreeMap<String, FlagSlot>,
    pub shared_keys: BTreeSet<String>,
    pub scratch: QubitRange,
    pub pad: QubitRange,
    pub ancilla: QubitRange,
    /// Per relational condition, the scratch registers its fragment uses.
    pub registers: BTreeMap<String, BTreeMap<String, QubitRange>>,
}

impl VariableLayout {
    pub fn total_qubits(&self) -> usize {
        self.ancilla.end()
    }

    pub fn flag_start(&self) -> usize {
        self.s_width
    }

    pub fn flag_qubits(&self) -> Vec<QubitId> {
        QubitRange::new(self.s_width, self.flag_width).qubits()
    }

    pub fn s_qubits(&self) -> Vec<QubitId> {
        QubitRange::new(0, self.s_width).qubits()
    }

    pub fn variable(&self, name: &str) -> Option<QubitRange> {
        self.variables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| *r)
    }

    /// Everything above the flag register.
    pub fn work_qubits(&self) -> Vec<QubitId> {
        (self.scratch.start..self.total_qubits())
            .map(QubitId)
            .collect()
    }

    pub fn breakdown(&self) -> Breakdown {
        Breakdown {
            s: self.s_width,
            flags: self.flag_width,
            scratch: self.scratch.len,
            pad: self.pad.len,
            ancilla: self.ancilla.len,
        }
    }
}

/// Qubit budget per region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Breakdown {
    pub s: usize,
    pub flags: usize,
    pub scratch: usize,
    pub pad: usize,
    pub ancilla: usize,
}

impl Breakdown {
    pub fn total(&self) -> usize {
        self.s + self.flags + self.scratch + self.pad + self.ancilla
    }
}

impl fmt::Display for Breakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s={} flags={} scratch={} pad={} ancilla={} total={}",
            self.s,
            self.flags,
            self.scratch,
            self.pad,
            self.ancilla,
            self.total()
        )
    }
}

/// Plans a layout under the default simulator ceiling.
pub fn plan_layout(tree: &BranchTree) -> Result<VariableLayout, SynthError> {
    plan_layout_with_ceiling(tree, DEFAULT_QUBIT_CEILING)
}

pub fn plan_layout_with_ceiling(
    tree: &BranchTree,
    ceiling: usize,
) -> Result<VariableLayout, SynthError> {
    let mut variables = Vec::new();
    let mut next = 0;
    for decl in &tree.decls {
        let width = decl.width as usize;
        variables.push((decl.name.clone(), QubitRange::new(next, width)));
        next += width;
    }
    let s_width = next;

    // Keys occurring more than once are computed once into dedicated flags.
    let mut occurrences: BTreeMap<String, usize> = BTreeMap::new();
    let mut first_seen: Vec<&CondExpr> = Vec::new();
    visit_conditions(&tree.root, &mut |cond| {
        for node in materialized_nodes(cond) {
            let count = occurrences.entry(condition_key(node)).or_default();
            if *count == 0 {
                first_seen.push(node);
            }
            *count += 1;
        }
    });
    let shared_keys: BTreeSet<String> = occurrences
        .iter()
        .filter(|(_, &n)| n > 1)
        .map(|(k, _)| k.clone())
        .collect();

    let slot_width = |node: &CondExpr| {
        if matches!(node, CondExpr::Rel(..)) {
            2
        } else {
            1
        }
    };
    let own_nodes = |cond: &'_ CondExpr| -> Vec<CondExpr> {
        materialized_nodes(cond)
            .into_iter()
            .filter(|n| !shared_keys.contains(&condition_key(n)))
            .cloned()
            .collect()
    };

    let mut per_depth: Vec<Vec<&CondExpr>> = Vec::new();
    conditions_by_depth(&tree.root, 0, &mut per_depth);
    let mut levels = Vec::new();
    let mut flags = BTreeMap::new();
    let mut cursor = s_width;
    for conds in &per_depth {
        let width = conds
            .iter()
            .map(|c| own_nodes(c).iter().map(slot_width).sum::<usize>())
            .max()
            .unwrap_or(0);
        for cond in conds {
            let mut slot = cursor;
            for node in own_nodes(cond) {
                flags.insert(condition_key(&node), make_slot(&node, slot));
                slot += slot_width(&node);
            }
        }
        levels.push(QubitRange::new(cursor, width));
        cursor += width;
    }
    let shared_start = cursor;
    for node in first_seen {
        let key = condition_key(node);
        if shared_keys.contains(&key) {
            flags.insert(key, make_slot(node, cursor));
            cursor += slot_width(node);
        }
    }
    let shared = QubitRange::new(shared_start, cursor - shared_start);
    let flag_width = cursor - s_width;

    let mut layout = VariableLayout {
        variables,
        s_width,
        flag_width,
        levels,
        shared,
        flags,
        shared_keys,
        scratch: QubitRange::new(cursor, 0),
        pad: QubitRange::new(cursor, 0),
        ancilla: QubitRange::new(cursor, 0),
        registers: BTreeMap::new(),
    };

    // Size the scratch regions by compiling every comparison against
    // unbounded regions, then compile again for the register map.
    let mut rels: Vec<&CondExpr> = Vec::new();
    visit_conditions(&tree.root, &mut |cond| {
        rels.extend(
            materialized_nodes(cond)
                .into_iter()
                .filter(|n| matches!(n, CondExpr::Rel(..))),
        );
    });
    let unbounded = 1 << 20;
    let (mut scratch, mut pad, mut anc) = (0, 0, 0);
    for rel in &rels {
        let mut alloc = ScratchAlloc::new(
            QubitRange::new(cursor, unbounded),
            QubitRange::new(cursor + unbounded, unbounded),
            QubitRange::new(cursor + 2 * unbounded, unbounded),
        );
        comparison_gates(rel, &layout, &mut alloc)?;
        scratch = scratch.max(alloc.used_scratch);
        pad = pad.max(alloc.used_pad);
        anc = anc.max(alloc.used_anc);
    }
    layout.scratch = QubitRange::new(cursor, scratch);
    layout.pad = QubitRange::new(layout.scratch.end(), pad);
    layout.ancilla = QubitRange::new(layout.pad.end(), anc);

    let breakdown = layout.breakdown();
    if breakdown.total() > ceiling {
        return Err(SynthError::Ceiling {
            ceiling,
            breakdown: breakdown.to_string(),
        });
    }
    for rel in rels {
        let mut alloc = ScratchAlloc::for_layout(&layout);
        comparison_gates(rel, &layout, &mut alloc)?;
        layout.registers.insert(condition_key(rel), alloc.registers);
    }
    Ok(layout)
}

fn make_slot(node: &CondExpr, base: usize) -> FlagSlot {
    match node {
        CondExpr::Rel(..) => FlagSlot::Pair(FlagPair {
            hi: QubitId(base + 1),
            lo: QubitId(base),
        }),
        _ => FlagSlot::Single(QubitId(base)),
    }
}

fn conditions_by_depth<'a>(node: &'a Node, depth: usize, out: &mut Vec<Vec<&'a CondExpr>>) {
    if let Node::If {
        cond,
        then_branch,
        else_branch,
    } = node
    {
        if out.len() <= depth {
            out.push(Vec::new());
        }
        out[depth].push(cond);
        conditions_by_depth(then_branch, depth + 1, out);
        conditions_by_depth(else_branch, depth + 1, out);
    }
}

/// Bump allocator over the scratch regions of one relational fragment.
/// Persistent registers are handed out once each; padding and ancillae are
/// reused from the start of their regions because every sub-circuit returns
/// them to |0> before the next one runs.
pub(crate) struct ScratchAlloc {
    scratch: QubitRange,
    pad: QubitRange,
    anc: QubitRange,
    used_scratch: usize,
    used_pad: usize,
    used_anc: usize,
    registers: BTreeMap<String, QubitRange>,
}

impl ScratchAlloc {
    fn new(scratch: QubitRange, pad: QubitRange, anc: QubitRange) -> Self {
        ScratchAlloc {
            scratch,
            pad,
            anc,
            used_scratch: 0,
            used_pad: 0,
            used_anc: 0,
            registers: BTreeMap::new(),
        }
    }

    pub(crate) fn for_layout(layout: &VariableLayout) -> Self {
        Self::new(layout.scratch, layout.pad, layout.ancilla)
    }

    fn exhausted(region: &str, needed: usize, available: usize) -> SynthError {
        SynthError::ScratchExhausted {
            region: region.to_string(),
            needed,
            available,
        }
    }

    fn persistent(&mut self, label: String, width: usize) -> Result<Vec<QubitId>, SynthError> {
        let needed = self.used_scratch + width;
        if needed > self.scratch.len {
            return Err(Self::exhausted("scratch", needed, self.scratch.len));
        }
        let range = QubitRange::new(self.scratch.start + self.used_scratch, width);
        self.used_scratch = needed;
        let mut name = label.clone();
        let mut k = 2;
        while self.registers.contains_key(&name) {
            name = format!("{label} #{k}");
            k += 1;
        }
        self.registers.insert(name, range);
        Ok(range.qubits())
    }

    fn padding(&mut self, width: usize) -> Result<Vec<QubitId>, SynthError> {
        if width > self.pad.len {
            return Err(Self::exhausted("pad", width, self.pad.len));
        }
        self.used_pad = self.used_pad.max(width);
        Ok(QubitRange::new(self.pad.start, width).qubits())
    }

    fn ancillae(&mut self, width: usize) -> Result<Vec<QubitId>, SynthError> {
        if width > self.anc.len {
            return Err(Self::exhausted("ancilla", width, self.anc.len));
        }
        self.used_anc = self.used_anc.max(width);
        Ok(QubitRange::new(self.anc.start, width).qubits())
    }
}

fn bit_length(value: u64) -> usize {
    (64 - value.leading_zeros() as usize).max(1)
}

/// Computes `expr` into a register, appending the gates to `gates`, and
/// returns the register (least significant qubit first).
fn expression(
    expr: &ArithExpr,
    layout: &VariableLayout,
    alloc: &mut ScratchAlloc,
    gates: &mut Vec<Gate>,
) -> Result<Vec<QubitId>, SynthError> {
    match expr {
        ArithExpr::Var(name) => layout
            .variable(name)
            .map(|r| r.qubits())
            .ok_or_else(|| SynthError::UnknownVariable(name.clone())),
        ArithExpr::Const(value) => {
            let reg = alloc.persistent(format!("const {value}"), bit_length(*value))?;
            gates.extend(
                reg.iter()
                    .enumerate()
                    .filter(|(i, _)| value >> i & 1 == 1)
                    .map(|(_, &q)| Gate::x(q)),
            );
            Ok(reg)
        }
        ArithExpr::Add(lhs, rhs) => {
            let a = expression(lhs, layout, alloc, gates)?;
            let b = expression(rhs, layout, alloc, gates)?;
            let (a, b) = same_width(a, b, alloc)?;
            let n = a.len();
            let sum = alloc.persistent(expr.to_string(), n + 1)?;
            let anc = alloc.ancillae(arith::adder_ancillas(n))?;
            gates.extend(adder_fragment(&a, &b, &sum, &anc)?.gates);
            Ok(sum)
        }
        ArithExpr::Mul(lhs, rhs) => {
            let a = expression(lhs, layout, alloc, gates)?;
            let mut b = expression(rhs, layout, alloc, gates)?;
            if a == b {
                b = copy(&b, alloc, gates)?;
            }
            let prod = alloc.persistent(expr.to_string(), a.len() + b.len())?;
            let anc = alloc.ancillae(arith::multiplier_ancillas(a.len()))?;
            gates.extend(multiplier_fragment(&a, &b, &prod, &anc)?.gates);
            Ok(prod)
        }
    }
}

fn copy(
    reg: &[QubitId],
    alloc: &mut ScratchAlloc,
    gates: &mut Vec<Gate>,
) -> Result<Vec<QubitId>, SynthError> {
    let dup = alloc.persistent("copy".to_string(), reg.len())?;
    gates.extend(
        reg.iter()
            .zip(&dup)
            .map(|(&from, &to)| Gate::cnot(from, to)),
    );
    Ok(dup)
}

/// Zero-extends the narrower register with padding qubits.
fn same_width(
    mut a: Vec<QubitId>,
    mut b: Vec<QubitId>,
    alloc: &mut ScratchAlloc,
) -> Result<(Vec<QubitId>, Vec<QubitId>), SynthError> {
    let n = a.len().max(b.len());
    let short = if a.len() < n { &mut a } else { &mut b };
    let missing = n - short.len();
    short.extend(alloc.padding(missing)?);
    Ok((a, b))
}

/// Gates of a relational fragment without path controls: compute both
/// sides, compare into the condition's flag pair, uncompute both sides.
pub(crate) fn comparison_gates(
    rel: &CondExpr,
    layout: &VariableLayout,
    alloc: &mut ScratchAlloc,
) -> Result<CircuitFragment, SynthError> {
    let CondExpr::Rel(lhs, _, rhs) = rel else {
        return Err(SynthError::NotRelational(rel.to_string()));
    };
    let key = condition_key(rel);
    let pair = match layout.flags.get(&key) {
        Some(FlagSlot::Pair(pair)) => *pair,
        _ => return Err(SynthError::UnknownCondition(key)),
    };
    let mut compute = Vec::new();
    let a = expression(lhs, layout, alloc, &mut compute)?;
    let b = expression(rhs, layout, alloc, &mut compute)?;
    let (a, mut b) = same_width(a, b, alloc)?;
    if a == b {
        b = copy(&b, alloc, &mut compute)?;
    }
    let anc = alloc.ancillae(arith::comparator_ancillas(a.len()))?;
    let compare = comparator_fragment(&a, &b, pair.hi, pair.lo, &anc)?;

    let mut gates = compute.clone();
    gates.extend(compare.gates);
    gates.extend(compute.into_iter().rev());
    let mut frag = CircuitFragment::from_gates(gates);
    for (name, range) in &alloc.registers {
        frag = frag.with_register(name, *range);
    }
    let borrowed = QubitRange::new(alloc.anc.start, alloc.used_anc).qubits();
    Ok(frag.with_ancilla(&borrowed))
}
