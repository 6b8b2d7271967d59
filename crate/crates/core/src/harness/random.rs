use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condlang::{ArithExpr, BranchTree, CondExpr, Node, RelOp, VarDecl};
use crate::qsynth::plan_layout_with_ceiling;

const NAMES: [&str; 3] = ["a", "b", "c"];
const OPS: [RelOp; 6] = [
    RelOp::Lt,
    RelOp::Le,
    RelOp::Gt,
    RelOp::Ge,
    RelOp::Eq,
    RelOp::Ne,
];

/// Shape limits for generated programs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub max_depth: usize,
    pub max_input_width: u32,
    /// Programs whose circuit would need more qubits are redrawn.
    pub qubit_ceiling: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_depth: 3,
            max_input_width: 8,
            qubit_ceiling: 22,
        }
    }
}

struct Generator<'a, R: Rng> {
    rng: &'a mut R,
    names: Vec<String>,
    next_leaf: usize,
}

impl<R: Rng> Generator<'_, R> {
    fn operand(&mut self) -> ArithExpr {
        if self.rng.gen_bool(0.2) {
            ArithExpr::Const(self.rng.gen_range(0..6))
        } else {
            ArithExpr::Var(
                self.names
                    .choose(self.rng)
                    .expect("at least one variable")
                    .clone(),
            )
        }
    }

    fn arith(&mut self) -> ArithExpr {
        match self.rng.gen_range(0..10) {
            0..=5 => self.operand(),
            6..=8 => ArithExpr::sum(self.operand(), self.operand()),
            _ => ArithExpr::product(self.operand(), self.operand()),
        }
    }

    fn relation(&mut self) -> CondExpr {
        let lhs = self.arith();
        let op = *OPS.choose(self.rng).expect("non-empty");
        let rhs = if self.rng.gen_bool(0.5) {
            ArithExpr::Const(self.rng.gen_range(0..8))
        } else {
            self.operand()
        };
        CondExpr::rel(lhs, op, rhs)
    }

    fn condition(&mut self, budget: usize) -> CondExpr {
        if budget == 0 || self.rng.gen_bool(0.6) {
            return self.relation();
        }
        match self.rng.gen_range(0..5) {
            0 | 1 => CondExpr::and(self.condition(budget - 1), self.condition(budget - 1)),
            2 | 3 => CondExpr::or(self.condition(budget - 1), self.condition(budget - 1)),
            _ => CondExpr::negate(self.condition(budget - 1)),
        }
    }

    fn node(&mut self, depth: usize, max_depth: usize) -> Node {
        if depth == max_depth || (depth > 0 && self.rng.gen_bool(0.35)) {
            self.next_leaf += 1;
            return Node::Leaf(format!("L{}", self.next_leaf));
        }
        let cond = self.condition(1);
        let then_branch = self.node(depth + 1, max_depth);
        let else_branch = self.node(depth + 1, max_depth);
        Node::branch(cond, then_branch, else_branch)
    }
}

fn draw<R: Rng>(rng: &mut R, config: &GeneratorConfig) -> BranchTree {
    let count = rng.gen_range(1..=NAMES.len());
    let mut decls = Vec::new();
    let mut remaining = config.max_input_width;
    for name in &NAMES[..count] {
        if remaining == 0 {
            break;
        }
        let width = rng.gen_range(1..=remaining.min(3));
        remaining -= width;
        decls.push(VarDecl {
            name: name.to_string(),
            width,
        });
    }
    let mut generator = Generator {
        rng,
        names: decls.iter().map(|d| d.name.clone()).collect(),
        next_leaf: 0,
    };
    let root = generator.node(0, config.max_depth);
    BranchTree { decls, root }
}

/// Draws one program that fits the configured qubit ceiling.
pub fn random_program<R: Rng>(rng: &mut R, config: &GeneratorConfig) -> BranchTree {
    loop {
        let tree = draw(rng, config);
        if plan_layout_with_ceiling(&tree, config.qubit_ceiling).is_ok() {
            return tree;
        }
    }
}

/// `count` programs from a fixed seed.
pub fn random_programs(seed: u64, count: usize, config: &GeneratorConfig) -> Vec<BranchTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_program(&mut rng, config))
        .collect()
}
