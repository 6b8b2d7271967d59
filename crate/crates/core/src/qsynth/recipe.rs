use std::fmt;

use crate::condlang::RelOp;
use crate::qcore::{CircuitError, CircuitFragment, Control, Gate, QubitId};

/// A disjunction of control conjunctions ("arms"). Arms are kept mutually
/// exclusive over reachable flag states, so an action applied once per arm
/// fires at most once on any basis term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    arms: Vec<Vec<Control>>,
}

impl Recipe {
    /// Satisfied everywhere: one arm with no controls.
    pub fn always() -> Self {
        Recipe {
            arms: vec![Vec::new()],
        }
    }

    /// Satisfied nowhere.
    pub fn never() -> Self {
        Recipe { arms: Vec::new() }
    }

    pub fn single(controls: Vec<Control>) -> Self {
        Recipe {
            arms: vec![controls],
        }
    }

    pub fn from_arms(arms: Vec<Vec<Control>>) -> Self {
        Recipe { arms }
    }

    pub fn arms(&self) -> &[Vec<Control>] {
        &self.arms
    }

    pub fn is_never(&self) -> bool {
        self.arms.is_empty()
    }

    /// Conjunction: the cross product of arms, with repeated controls merged
    /// and arms demanding both polarities of one qubit dropped.
    pub fn and(&self, other: &Recipe) -> Recipe {
        let mut arms = Vec::new();
        for lhs in &self.arms {
            'rhs: for rhs in &other.arms {
                let mut arm = lhs.clone();
                for c in rhs {
                    match arm.iter().find(|a| a.qubit == c.qubit) {
                        Some(a) if a.polarity == c.polarity => {}
                        Some(_) => continue 'rhs,
                        None => arm.push(*c),
                    }
                }
                arms.push(arm);
            }
        }
        Recipe { arms }
    }

    /// One X on `target` per arm.
    pub fn flips(&self, target: QubitId) -> Result<Vec<Gate>, CircuitError> {
        self.arms
            .iter()
            .map(|arm| {
                if arm.iter().any(|c| c.qubit == target) {
                    Err(CircuitError::ControlOverlap(target))
                } else {
                    Ok(Gate::mcx(arm.clone(), target))
                }
            })
            .collect()
    }

    /// `frag` controlled by each arm in turn.
    pub fn apply(&self, frag: &CircuitFragment) -> Result<CircuitFragment, CircuitError> {
        let mut out = CircuitFragment::new();
        for arm in &self.arms {
            out.append(frag.controlled(arm)?);
        }
        Ok(out)
    }

    /// Whether basis state `index` satisfies some arm.
    pub fn holds(&self, index: usize) -> bool {
        self.arms.iter().any(|arm| {
            arm.iter()
                .all(|c| (index & c.qubit.mask() != 0) == c.polarity)
        })
    }
}

/// Satisfying and unsatisfying control recipes of a flag-writing condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagSemantics {
    pub sat: Recipe,
    pub unsat: Recipe,
}

/// Negation emits no gates; it only exchanges which flag states count as
/// satisfying.
pub fn apply_not(semantics: FlagSemantics) -> FlagSemantics {
    FlagSemantics {
        sat: semantics.unsat,
        unsat: semantics.sat,
    }
}

/// Flag pair of a comparator: `hi` is set on a > b, `lo` on a < b.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlagPair {
    pub hi: QubitId,
    pub lo: QubitId,
}

/// Controls selecting exactly the comparator outputs that satisfy `op`.
/// The `11` flag state never occurs, which is what lets `<=` and `>=` get
/// away with a single control.
pub fn t_module(op: RelOp, pair: FlagPair) -> Recipe {
    let FlagPair { hi, lo } = pair;
    match op {
        RelOp::Lt => Recipe::single(vec![Control::zero(hi), Control::one(lo)]),
        RelOp::Gt => Recipe::single(vec![Control::one(hi), Control::zero(lo)]),
        RelOp::Eq => Recipe::single(vec![Control::zero(hi), Control::zero(lo)]),
        RelOp::Le => Recipe::single(vec![Control::zero(hi)]),
        RelOp::Ge => Recipe::single(vec![Control::zero(lo)]),
        RelOp::Ne => Recipe::from_arms(vec![
            vec![Control::zero(hi), Control::one(lo)],
            vec![Control::one(hi), Control::zero(lo)],
        ]),
    }
}

/// Controls selecting the comparator outputs that falsify `op`, as a single
/// qubit condition where one exists.
pub fn else_recipe(op: RelOp, pair: FlagPair) -> Recipe {
    let FlagPair { hi, lo } = pair;
    match op {
        RelOp::Lt => Recipe::single(vec![Control::zero(lo)]),
        RelOp::Gt => Recipe::single(vec![Control::zero(hi)]),
        RelOp::Le => Recipe::single(vec![Control::one(hi)]),
        RelOp::Ge => Recipe::single(vec![Control::one(lo)]),
        RelOp::Eq => t_module(RelOp::Ne, pair),
        RelOp::Ne => t_module(RelOp::Eq, pair),
    }
}

pub fn relational_semantics(op: RelOp, pair: FlagPair) -> FlagSemantics {
    FlagSemantics {
        sat: t_module(op, pair),
        unsat: else_recipe(op, pair),
    }
}

/// Semantics of an AND/OR output flag.
pub fn logical_semantics(out: QubitId) -> FlagSemantics {
    FlagSemantics {
        sat: Recipe::single(vec![Control::one(out)]),
        unsat: Recipe::single(vec![Control::zero(out)]),
    }
}

/// Requirement on a set of flag qubits: a union of cubes over {0, 1, *}.
/// Position `i` of a cube refers to flag `c^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagPattern {
    cubes: Vec<Vec<Option<bool>>>,
}

impl FlagPattern {
    /// No requirement on any of `width` flags.
    pub fn any(width: usize) -> Self {
        FlagPattern {
            cubes: vec![vec![None; width]],
        }
    }

    /// Reads a recipe over flag qubits `flag_start..flag_start + width`.
    pub fn from_recipe(recipe: &Recipe, flag_start: usize, width: usize) -> Self {
        let cubes = recipe
            .arms()
            .iter()
            .map(|arm| {
                let mut cube = vec![None; width];
                for c in arm {
                    cube[c.qubit.0 - flag_start] = Some(c.polarity);
                }
                cube
            })
            .collect();
        FlagPattern { cubes }
    }

    /// Parses the display form, e.g. `"0*01"` or `"01|10"`. The empty string
    /// is the zero-width pattern.
    pub fn parse(text: &str) -> Option<Self> {
        if text == NEVER {
            return Some(FlagPattern { cubes: Vec::new() });
        }
        let cubes = text
            .split('|')
            .map(|cube| {
                cube.chars()
                    .rev()
                    .map(|ch| match ch {
                        '0' => Some(Some(false)),
                        '1' => Some(Some(true)),
                        '*' => Some(None),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(FlagPattern { cubes })
    }

    pub fn width(&self) -> Option<usize> {
        self.cubes.first().map(Vec::len)
    }

    pub fn cubes(&self) -> &[Vec<Option<bool>>] {
        &self.cubes
    }

    /// Whether flag value `flags` (bit `i` = `c^i`) matches some cube.
    pub fn matches(&self, flags: u64) -> bool {
        self.cubes.iter().any(|cube| {
            cube.iter()
                .enumerate()
                .all(|(i, sym)| sym.is_none_or(|bit| (flags >> i & 1 == 1) == bit))
        })
    }

    /// Number of `*` symbols over all cubes; fewer means more specific.
    pub fn wildcards(&self) -> usize {
        self.cubes.iter().flatten().filter(|s| s.is_none()).count()
    }
}

const NEVER: &str = "none";

impl fmt::Display for FlagPattern {
    /// Most significant flag first, cubes joined by `|`. A pattern with no
    /// cubes (an infeasible branch) prints as `none`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cubes.is_empty() {
            return f.write_str(NEVER);
        }
        for (k, cube) in self.cubes.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            for sym in cube.iter().rev() {
                f.write_str(match sym {
                    Some(true) => "1",
                    Some(false) => "0",
                    None => "*",
                })?;
            }
        }
        Ok(())
    }
}
