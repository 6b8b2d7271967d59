use std::collections::BTreeSet;

use super::ast::{BranchTree, CondExpr, Node};

/// Conjunction of branch decisions leading from the root to one leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathConstraint {
    pub branch_id: String,
    /// Root-to-leaf order; `false` polarity means the else edge was taken.
    pub conjuncts: Vec<(CondExpr, bool)>,
}

impl PathConstraint {
    pub fn holds(&self, lookup: &dyn Fn(&str) -> u64) -> bool {
        self.conjuncts
            .iter()
            .all(|(cond, polarity)| cond.eval(lookup) == *polarity)
    }
}

/// One path constraint per leaf, in then-before-else leaf order.
pub fn collect_paths(tree: &BranchTree) -> Vec<PathConstraint> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    walk(&tree.root, &mut prefix, &mut out);
    out
}

fn walk(node: &Node, prefix: &mut Vec<(CondExpr, bool)>, out: &mut Vec<PathConstraint>) {
    match node {
        Node::Leaf(id) => out.push(PathConstraint {
            branch_id: id.clone(),
            conjuncts: prefix.clone(),
        }),
        Node::If {
            cond,
            then_branch,
            else_branch,
        } => {
            prefix.push((cond.clone(), true));
            walk(then_branch, prefix, out);
            prefix.pop();
            prefix.push((cond.clone(), false));
            walk(else_branch, prefix, out);
            prefix.pop();
        }
    }
}

/// Canonical identity of a flag-writing condition node: the node with its
/// outer negations removed, rendered in DSL syntax. Two occurrences with the
/// same key share one circuit.
pub fn condition_key(cond: &CondExpr) -> String {
    cond.strip_not().0.to_string()
}

/// Every Rel/And/Or node reachable from `cond`, outer-first, with `!` skipped.
pub fn materialized_nodes(cond: &CondExpr) -> Vec<&CondExpr> {
    let mut out = Vec::new();
    push_nodes(cond, &mut out);
    out
}

fn push_nodes<'a>(cond: &'a CondExpr, out: &mut Vec<&'a CondExpr>) {
    match cond {
        CondExpr::Not(inner) => push_nodes(inner, out),
        CondExpr::Rel(..) => out.push(cond),
        CondExpr::And(lhs, rhs) | CondExpr::Or(lhs, rhs) => {
            out.push(cond);
            push_nodes(lhs, out);
            push_nodes(rhs, out);
        }
    }
}

/// Number of subspace divisions: distinct Rel/And/Or nodes across all
/// conditions. `!` contributes nothing and structurally repeated conditions
/// are materialized once.
pub fn count_conditions(tree: &BranchTree) -> usize {
    let mut keys = BTreeSet::new();
    visit_conditions(&tree.root, &mut |cond| {
        for node in materialized_nodes(cond) {
            keys.insert(condition_key(node));
        }
    });
    keys.len()
}

/// Calls `f` on each `if` condition in pre-order (root first, then-subtree
/// before else-subtree).
pub fn visit_conditions<'a>(node: &'a Node, f: &mut dyn FnMut(&'a CondExpr)) {
    if let Node::If {
        cond,
        then_branch,
        else_branch,
    } = node
    {
        f(cond);
        visit_conditions(then_branch, f);
        visit_conditions(else_branch, f);
    }
}
