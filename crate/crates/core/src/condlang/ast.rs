use std::fmt;

/// A declared unsigned input variable and the number of qubits it occupies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub width: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArithExpr {
    Var(String),
    Const(u64),
    Add(Box<ArithExpr>, Box<ArithExpr>),
    Mul(Box<ArithExpr>, Box<ArithExpr>),
}

impl ArithExpr {
    pub fn sum(lhs: ArithExpr, rhs: ArithExpr) -> Self {
        ArithExpr::Add(Box::new(lhs), Box::new(rhs))
    }

    pub fn product(lhs: ArithExpr, rhs: ArithExpr) -> Self {
        ArithExpr::Mul(Box::new(lhs), Box::new(rhs))
    }

    pub fn var(name: &str) -> Self {
        ArithExpr::Var(name.to_string())
    }

    /// Exact unsigned evaluation. `lookup` resolves variable names.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> u64) -> u64 {
        match self {
            ArithExpr::Var(name) => lookup(name),
            ArithExpr::Const(value) => *value,
            ArithExpr::Add(lhs, rhs) => lhs.eval(lookup) + rhs.eval(lookup),
            ArithExpr::Mul(lhs, rhs) => lhs.eval(lookup) * rhs.eval(lookup),
        }
    }

    fn visit_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ArithExpr::Var(name) => out.push(name),
            ArithExpr::Const(_) => {}
            ArithExpr::Add(lhs, rhs) | ArithExpr::Mul(lhs, rhs) => {
                lhs.visit_vars(out);
                rhs.visit_vars(out);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub const ALL: [RelOp; 6] = [
        RelOp::Lt,
        RelOp::Le,
        RelOp::Gt,
        RelOp::Ge,
        RelOp::Eq,
        RelOp::Ne,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        }
    }

    pub fn holds(self, lhs: u64, rhs: u64) -> bool {
        match self {
            RelOp::Lt => lhs < rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Gt => lhs > rhs,
            RelOp::Ge => lhs >= rhs,
            RelOp::Eq => lhs == rhs,
            RelOp::Ne => lhs != rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CondExpr {
    Rel(ArithExpr, RelOp, ArithExpr),
    And(Box<CondExpr>, Box<CondExpr>),
    Or(Box<CondExpr>, Box<CondExpr>),
    Not(Box<CondExpr>),
}

impl CondExpr {
    pub fn rel(lhs: ArithExpr, op: RelOp, rhs: ArithExpr) -> Self {
        CondExpr::Rel(lhs, op, rhs)
    }

    pub fn and(lhs: CondExpr, rhs: CondExpr) -> Self {
        CondExpr::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: CondExpr, rhs: CondExpr) -> Self {
        CondExpr::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn negate(inner: CondExpr) -> Self {
        CondExpr::Not(Box::new(inner))
    }

    pub fn eval(&self, lookup: &dyn Fn(&str) -> u64) -> bool {
        match self {
            CondExpr::Rel(lhs, op, rhs) => op.holds(lhs.eval(lookup), rhs.eval(lookup)),
            CondExpr::And(lhs, rhs) => lhs.eval(lookup) && rhs.eval(lookup),
            CondExpr::Or(lhs, rhs) => lhs.eval(lookup) || rhs.eval(lookup),
            CondExpr::Not(inner) => !inner.eval(lookup),
        }
    }

    /// Peels every outer `!`, returning the underlying node and whether an odd
    /// number of negations was removed.
    pub fn strip_not(&self) -> (&CondExpr, bool) {
        let mut node = self;
        let mut negated = false;
        while let CondExpr::Not(inner) = node {
            node = inner;
            negated = !negated;
        }
        (node, negated)
    }

    /// Variable names referenced anywhere in the condition, in source order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit_vars(&mut out);
        out
    }

    fn visit_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            CondExpr::Rel(lhs, _, rhs) => {
                lhs.visit_vars(out);
                rhs.visit_vars(out);
            }
            CondExpr::And(lhs, rhs) | CondExpr::Or(lhs, rhs) => {
                lhs.visit_vars(out);
                rhs.visit_vars(out);
            }
            CondExpr::Not(inner) => inner.visit_vars(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(String),
    If {
        cond: CondExpr,
        then_branch: Box<Node>,
        else_branch: Box<Node>,
    },
}

impl Node {
    pub fn leaf(id: &str) -> Self {
        Node::Leaf(id.to_string())
    }

    pub fn branch(cond: CondExpr, then_branch: Node, else_branch: Node) -> Self {
        Node::If {
            cond,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
        }
    }

    pub fn leaf_ids(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Node::Leaf(id) => out.push(id),
            Node::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.collect_leaves(out);
                else_branch.collect_leaves(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::If {
                then_branch,
                else_branch,
                ..
            } => 1 + then_branch.depth().max(else_branch.depth()),
        }
    }

    /// Follows the tree for one concrete assignment and returns the leaf reached.
    pub fn route(&self, lookup: &dyn Fn(&str) -> u64) -> &str {
        let mut node = self;
        loop {
            match node {
                Node::Leaf(id) => return id,
                Node::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    node = if cond.eval(lookup) {
                        then_branch
                    } else {
                        else_branch
                    }
                }
            }
        }
    }
}

/// A parsed program: declarations plus the nested conditional structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchTree {
    pub decls: Vec<VarDecl>,
    pub root: Node,
}

impl BranchTree {
    /// Total input width `n` (sum of the declared variable widths).
    pub fn input_width(&self) -> u32 {
        self.decls.iter().map(|d| d.width).sum()
    }

    pub fn leaf_ids(&self) -> Vec<&str> {
        self.root.leaf_ids()
    }

    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    /// Same program with every variable re-declared at `width` qubits.
    pub fn with_uniform_width(&self, width: u32) -> BranchTree {
        BranchTree {
            decls: self
                .decls
                .iter()
                .map(|d| VarDecl {
                    name: d.name.clone(),
                    width,
                })
                .collect(),
            root: self.root.clone(),
        }
    }
}

fn fmt_arith_operand(expr: &ArithExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match expr {
        ArithExpr::Var(_) | ArithExpr::Const(_) => write!(f, "{expr}"),
        _ => write!(f, "({expr})"),
    }
}

impl fmt::Display for ArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithExpr::Var(name) => write!(f, "{name}"),
            ArithExpr::Const(value) => write!(f, "{value}"),
            ArithExpr::Add(lhs, rhs) => {
                fmt_arith_operand(lhs, f)?;
                f.write_str(" + ")?;
                fmt_arith_operand(rhs, f)
            }
            ArithExpr::Mul(lhs, rhs) => {
                fmt_arith_operand(lhs, f)?;
                f.write_str(" * ")?;
                fmt_arith_operand(rhs, f)
            }
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

fn fmt_cond_operand(cond: &CondExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match cond {
        CondExpr::Rel(..) | CondExpr::Not(_) => write!(f, "{cond}"),
        _ => write!(f, "({cond})"),
    }
}

impl fmt::Display for CondExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CondExpr::Rel(lhs, op, rhs) => write!(f, "{lhs} {op} {rhs}"),
            CondExpr::And(lhs, rhs) => {
                fmt_cond_operand(lhs, f)?;
                f.write_str(" && ")?;
                fmt_cond_operand(rhs, f)
            }
            CondExpr::Or(lhs, rhs) => {
                fmt_cond_operand(lhs, f)?;
                f.write_str(" || ")?;
                fmt_cond_operand(rhs, f)
            }
            CondExpr::Not(inner) => write!(f, "!({inner})"),
        }
    }
}

impl Node {
    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "    ".repeat(indent);
        match self {
            Node::Leaf(id) => writeln!(f, "{pad}{{ {id} }}"),
            Node::If {
                cond,
                then_branch,
                else_branch,
            } => {
                writeln!(f, "{pad}if ({cond})")?;
                then_branch.fmt_indented(f, indent + 1)?;
                writeln!(f, "{pad}else")?;
                else_branch.fmt_indented(f, indent + 1)
            }
        }
    }
}

/// Pretty-prints in the DSL's own syntax; the output re-parses to an identical tree.
impl fmt::Display for BranchTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for decl in &self.decls {
            writeln!(f, "var {}:{};", decl.name, decl.width)?;
        }
        self.root.fmt_indented(f, 0)
    }
}
