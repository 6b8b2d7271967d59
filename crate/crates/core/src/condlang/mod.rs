//! Condition-language frontend: a small DSL of unsigned variables and nested
//! `if/else` branch conditions, parsed into a [`BranchTree`], plus classical
//! path-constraint enumeration over that tree.

mod ast;
mod lexer;
mod parser;
mod paths;

use thiserror::Error;

pub use ast::{ArithExpr, BranchTree, CondExpr, Node, RelOp, VarDecl};
pub use parser::parse_program;
pub use paths::{
    collect_paths, condition_key, count_conditions, materialized_nodes, visit_conditions,
    PathConstraint,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: undeclared variable `{name}`")]
    Undeclared {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: variable `{name}` declared with width 0")]
    ZeroWidth {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: variable `{name}` declared twice")]
    DuplicateDecl {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: branch `{id}` appears twice")]
    DuplicateBranch { id: String, line: usize, col: usize },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::Undeclared { line, col, .. }
            | ParseError::ZeroWidth { line, col, .. }
            | ParseError::DuplicateDecl { line, col, .. }
            | ParseError::DuplicateBranch { line, col, .. } => (*line, *col),
        }
    }

    fn is_semantic(&self) -> bool {
        !matches!(self, ParseError::Syntax { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const DART: &str = "var x:3; var y:2;
        if (x+y<4) { if (x>y) {A} else {B} } else { if (y>1) {C} else {D} }";

    fn dart_source() -> String {
        DART.to_string()
    }

    #[test]
    fn parses_dart_program() {
        let tree = parse_program(&dart_source()).unwrap();
        assert_eq!(tree.leaf_ids(), vec!["A", "B", "C", "D"]);
        assert_eq!(tree.input_width(), 5);
        assert_eq!(
            tree.decls,
            vec![
                VarDecl {
                    name: "x".into(),
                    width: 3
                },
                VarDecl {
                    name: "y".into(),
                    width: 2
                }
            ]
        );
        let Node::If { cond, .. } = &tree.root else {
            panic!("root must be an if")
        };
        assert_eq!(
            *cond,
            CondExpr::rel(
                ArithExpr::sum(ArithExpr::var("x"), ArithExpr::var("y")),
                RelOp::Lt,
                ArithExpr::Const(4)
            )
        );
    }

    #[test]
    fn braces_around_nested_if_are_optional() {
        let bare = parse_program(
            "var x:3; var y:2; if (x+y<4) if (x>y) {A} else {B} else if (y>1) {C} else {D}",
        )
        .unwrap();
        assert_eq!(bare, parse_program(DART).unwrap());
    }

    #[test]
    fn minimal_two_branch_program() {
        let tree = parse_program("var a:1; if (a==0) {L} else {R}").unwrap();
        assert_eq!(tree.leaf_ids(), vec!["L", "R"]);
    }

    #[test]
    fn contradictions_parse() {
        let tree = parse_program("var a:2; if (a<1 && a>2) {L} else {R}").unwrap();
        assert_eq!(tree.leaf_ids().len(), 2);
    }

    #[test]
    fn precedence_and_parentheses() {
        let tree =
            parse_program("var a:2; var b:2; if (a+b*2 < (a+1)*b || !(a==b) && a!=1) {L} else {R}")
                .unwrap();
        let Node::If { cond, .. } = &tree.root else {
            unreachable!()
        };
        let expected = CondExpr::or(
            CondExpr::rel(
                ArithExpr::sum(
                    ArithExpr::var("a"),
                    ArithExpr::product(ArithExpr::var("b"), ArithExpr::Const(2)),
                ),
                RelOp::Lt,
                ArithExpr::product(
                    ArithExpr::sum(ArithExpr::var("a"), ArithExpr::Const(1)),
                    ArithExpr::var("b"),
                ),
            ),
            CondExpr::and(
                CondExpr::negate(CondExpr::rel(
                    ArithExpr::var("a"),
                    RelOp::Eq,
                    ArithExpr::var("b"),
                )),
                CondExpr::rel(ArithExpr::var("a"), RelOp::Ne, ArithExpr::Const(1)),
            ),
        );
        assert_eq!(*cond, expected);
    }

    #[test]
    fn parenthesised_condition_versus_parenthesised_operand() {
        let a = parse_program("var a:2; if ((a<1)) {L} else {R}").unwrap();
        let b = parse_program("var a:2; if ((a)<1) {L} else {R}").unwrap();
        assert_eq!(a.root, b.root);
    }

    #[test]
    fn single_leaf_program() {
        let tree = parse_program("var a:2; {only}").unwrap();
        assert_eq!(tree.root, Node::leaf("only"));
    }

    #[test]
    fn comments_are_skipped() {
        let tree = parse_program("// header\nvar a:2; // width\n{L}").unwrap();
        assert_eq!(tree.leaf_ids(), vec!["L"]);
    }

    #[test]
    fn error_undeclared_variable() {
        let err = parse_program("var a:2;\nif (b<1) {L} else {R}").unwrap_err();
        assert_eq!(
            err,
            ParseError::Undeclared {
                name: "b".into(),
                line: 2,
                col: 5
            }
        );
    }

    #[test]
    fn error_zero_width() {
        let err = parse_program("var a:0; {L}").unwrap_err();
        assert!(matches!(err, ParseError::ZeroWidth { ref name, .. } if name == "a"));
    }

    #[test]
    fn error_duplicate_declaration() {
        let err = parse_program("var a:1; var a:2; {L}").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::DuplicateDecl {
                    line: 1,
                    col: 14,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn error_duplicate_branch() {
        let err = parse_program("var a:1; if (a==0) {L} else {L}").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateBranch { .. }));
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let err = parse_program("var a:1;\nif (a == ) {L} else {R}").unwrap_err();
        assert_eq!(err.position(), (2, 10));
        assert!(err
            .to_string()
            .contains("expected variable, integer or `(`"));
        let err = parse_program("var a:1; if (a==0) {L}").unwrap_err();
        assert!(err.to_string().contains("expected `else`"), "{err}");
        let err = parse_program("var a:1; if (a # 0) {L} else {R}").unwrap_err();
        assert!(err.to_string().contains("unexpected character `#`"));
    }

    #[test]
    fn dart_paths() {
        let tree = parse_program(&dart_source()).unwrap();
        let paths = collect_paths(&tree);
        let s = |cond: &CondExpr| cond.to_string();
        let rendered: Vec<Vec<(String, bool)>> = paths
            .iter()
            .map(|p| p.conjuncts.iter().map(|(c, pol)| (s(c), *pol)).collect())
            .collect();
        assert_eq!(
            rendered,
            vec![
                vec![("x + y < 4".to_string(), true), ("x > y".to_string(), true)],
                vec![
                    ("x + y < 4".to_string(), true),
                    ("x > y".to_string(), false)
                ],
                vec![
                    ("x + y < 4".to_string(), false),
                    ("y > 1".to_string(), true)
                ],
                vec![
                    ("x + y < 4".to_string(), false),
                    ("y > 1".to_string(), false)
                ],
            ]
        );
        let ids: Vec<_> = paths.iter().map(|p| p.branch_id.as_str()).collect();
        assert_eq!(ids, vec!["A", "B", "C", "D"]);
    }

    #[test]
    fn single_leaf_has_one_empty_path() {
        let tree = parse_program("var a:1; {L}").unwrap();
        let paths = collect_paths(&tree);
        assert_eq!(paths.len(), 1);
        assert!(paths[0].conjuncts.is_empty());
        assert_eq!(count_conditions(&tree), 0);
    }

    #[test]
    fn full_depth_three_tree_paths() {
        let src = "var a:3;
            if (a<4) if (a<2) if (a<1) {L0} else {L1} else if (a<3) {L2} else {L3}
            else if (a<6) if (a<5) {L4} else {L5} else if (a<7) {L6} else {L7}";
        let tree = parse_program(src).unwrap();
        let paths = collect_paths(&tree);
        assert_eq!(paths.len(), 8);
        assert!(paths.iter().all(|p| p.conjuncts.len() == 3));
        assert_eq!(count_conditions(&tree), 7);
    }

    #[test]
    fn dart_condition_count() {
        let tree = parse_program(&dart_source()).unwrap();
        assert_eq!(count_conditions(&tree), 3);
    }

    #[test]
    fn or_condition_counts_three() {
        let tree =
            parse_program("var a:1; var b:1; var c:1; var d:1; if (a<b || c==d) {T} else {E}")
                .unwrap();
        assert_eq!(count_conditions(&tree), 3);
    }

    #[test]
    fn not_is_free_and_repeats_are_shared() {
        let tree = parse_program("var a:2; if (!(a<2)) {T} else {E}").unwrap();
        assert_eq!(count_conditions(&tree), 1);
        let tree = parse_program(
            "var a:2; var b:2; if (a<2) if (b==1) {T1} else {E1} else if (!(b==1)) {T2} else {E2}",
        )
        .unwrap();
        assert_eq!(count_conditions(&tree), 2);
    }

    #[test]
    fn pretty_print_reparses() {
        let tree = parse_program(
            "var a:2; var b:2; if (a+b*2 < (a+1)*b || !(a==b) && a!=1) if (!!(a<b)) {L} else {M} else {R}",
        )
        .unwrap();
        let printed = tree.to_string();
        assert_eq!(parse_program(&printed).unwrap(), tree, "{printed}");
    }
}
