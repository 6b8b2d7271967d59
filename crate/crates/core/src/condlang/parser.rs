use std::collections::HashSet;

use super::ast::{ArithExpr, BranchTree, CondExpr, Node, RelOp, VarDecl};
use super::lexer::{tokenize, Pos, Tok, Token};
use super::ParseError;

/// Parses DSL source into a validated [`BranchTree`].
///
/// ```text
/// program := decl* tree ;  decl := "var" IDENT ":" INT ";"
/// tree    := "{" IDENT "}" | "{" tree "}" | "if" "(" cond ")" tree "else" tree
/// cond    := and ("||" and)* ;  and := not ("&&" not)*
/// not     := "!" not | "(" cond ")" | rel
/// rel     := arith relop arith
/// arith   := term ("+" term)* ;  term := atom ("*" atom)*
/// atom    := IDENT | INT | "(" arith ")"
/// ```
pub fn parse_program(source: &str) -> Result<BranchTree, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        declared: HashSet::new(),
        leaves: HashSet::new(),
    };
    let decls = parser.decls()?;
    let root = parser.tree()?;
    parser.expect(Tok::Eof)?;
    Ok(BranchTree { decls, root })
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    declared: HashSet<String>,
    leaves: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.idx].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.idx].pos
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        token
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let pos = self.pos();
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            message: format!("expected {expected}, found {}", self.peek().describe()),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error_here(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok((name, pos))
            }
            _ => Err(self.error_here("identifier")),
        }
    }

    fn decls(&mut self) -> Result<Vec<VarDecl>, ParseError> {
        let mut decls = Vec::new();
        while *self.peek() == Tok::Var {
            self.bump();
            let (name, pos) = self.ident()?;
            self.expect(Tok::Colon)?;
            let width_pos = self.pos();
            let width = match *self.peek() {
                Tok::Int(value) => {
                    self.bump();
                    value
                }
                _ => return Err(self.error_here("bit width")),
            };
            self.expect(Tok::Semi)?;
            if width == 0 {
                return Err(ParseError::ZeroWidth {
                    name,
                    line: width_pos.line,
                    col: width_pos.col,
                });
            }
            let width = u32::try_from(width).map_err(|_| ParseError::Syntax {
                line: width_pos.line,
                col: width_pos.col,
                message: format!("width {width} is too large"),
            })?;
            if !self.declared.insert(name.clone()) {
                return Err(ParseError::DuplicateDecl {
                    name,
                    line: pos.line,
                    col: pos.col,
                });
            }
            decls.push(VarDecl { name, width });
        }
        Ok(decls)
    }

    fn tree(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Tok::LBrace => {
                self.bump();
                if !matches!(self.peek(), Tok::Ident(_)) {
                    // `{ tree }` block around a nested conditional
                    let inner = self.tree()?;
                    self.expect(Tok::RBrace)?;
                    return Ok(inner);
                }
                let (id, pos) = self.ident()?;
                self.expect(Tok::RBrace)?;
                if !self.leaves.insert(id.clone()) {
                    return Err(ParseError::DuplicateBranch {
                        id,
                        line: pos.line,
                        col: pos.col,
                    });
                }
                Ok(Node::Leaf(id))
            }
            Tok::If => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.cond()?;
                self.expect(Tok::RParen)?;
                let then_branch = self.tree()?;
                self.expect(Tok::Else)?;
                let else_branch = self.tree()?;
                Ok(Node::branch(cond, then_branch, else_branch))
            }
            _ => Err(self.error_here("`{` or `if`")),
        }
    }

    fn cond(&mut self) -> Result<CondExpr, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.and()?;
            lhs = CondExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<CondExpr, ParseError> {
        let mut lhs = self.not()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.not()?;
            lhs = CondExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<CondExpr, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(CondExpr::negate(self.not()?))
            }
            Tok::LParen => {
                // `(` opens either a parenthesised condition or an arithmetic
                // operand of a relation; try the relation first and fall back.
                let start = self.idx;
                let rel_err = match self.rel() {
                    Ok(rel) => return Ok(rel),
                    Err(err) => err,
                };
                self.idx = start;
                self.bump();
                let inner = self.cond().and_then(|cond| {
                    self.expect(Tok::RParen)?;
                    Ok(cond)
                });
                inner.map_err(|cond_err| {
                    // Semantic errors win; otherwise report the attempt that got further.
                    if rel_err.is_semantic() {
                        rel_err
                    } else if cond_err.is_semantic() || cond_err.position() >= rel_err.position() {
                        cond_err
                    } else {
                        rel_err
                    }
                })
            }
            _ => self.rel(),
        }
    }

    fn rel(&mut self) -> Result<CondExpr, ParseError> {
        let lhs = self.arith()?;
        let op = match self.peek() {
            Tok::Lt => RelOp::Lt,
            Tok::Le => RelOp::Le,
            Tok::Gt => RelOp::Gt,
            Tok::Ge => RelOp::Ge,
            Tok::EqEq => RelOp::Eq,
            Tok::Ne => RelOp::Ne,
            _ => return Err(self.error_here("relational operator")),
        };
        self.bump();
        let rhs = self.arith()?;
        Ok(CondExpr::rel(lhs, op, rhs))
    }

    fn arith(&mut self) -> Result<ArithExpr, ParseError> {
        let mut lhs = self.term()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let rhs = self.term()?;
            lhs = ArithExpr::sum(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ArithExpr, ParseError> {
        let mut lhs = self.atom()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.atom()?;
            lhs = ArithExpr::product(lhs, rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<ArithExpr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if !self.declared.contains(&name) {
                    return Err(ParseError::Undeclared {
                        name,
                        line: pos.line,
                        col: pos.col,
                    });
                }
                Ok(ArithExpr::Var(name))
            }
            Tok::Int(value) => {
                self.bump();
                Ok(ArithExpr::Const(value))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.arith()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.error_here("variable, integer or `(`")),
        }
    }
}
