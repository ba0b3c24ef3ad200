//! Recursive-descent parser for the program format.
//!
//! Grammar sketch (comments `// ...` allowed anywhere):
//!
//! ```text
//! program  := "vars" ident ("," ident)* ";" heap? command
//! heap     := "heap" "locs" num "ints" "0" ".." num ";"
//! command  := one (";" command)?
//! one      := "skip" | x ":=" aexp | x ":=" "nondet" "(" ")" | bexp "?"
//!           | "(" command "[+]" command ")" | "(" command ")" "*"?
//!           | "if" "(" bexp ")" "{" command "}" "else" "{" command "}"
//!           | "while" "(" bexp ")" "{" command "}"
//!           | x ":=" "alloc" "(" ")" | "free" "(" x ")"
//!           | x ":=" "[" y "]" | "[" x "]" ":=" y
//! ```
//!
//! `if`/`while` are desugared at parse time, so the returned AST only ever
//! contains the four core command forms.

use super::lexer::{tokenize, LexError, Pos, Tok, Token};
use super::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("unexpected end of input: expected {expected}")]
    Eof { expected: String },
    #[error("undeclared variable `{name}` at {pos}")]
    UndeclaredVar { pos: Pos, name: String },
    #[error("duplicate variable `{name}` at {pos}")]
    DuplicateVar { pos: Pos, name: String },
    #[error("`{name}` is a reserved word and cannot be a variable (at {pos})")]
    ReservedVar { pos: Pos, name: String },
    #[error("heap command at {pos} but the program declares no heap (add `heap locs N ints 0..K;`)")]
    HeapAtomicWithoutHeap { pos: Pos },
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError::Syntax { pos: e.pos, message: e.message }
    }
}

const KEYWORDS: &[&str] = &[
    "vars", "heap", "locs", "ints", "skip", "if", "else", "while", "nondet", "alloc", "free",
    "mod", "odd", "even", "true", "false", "exists", "emp",
];

/// Parse a whole program: `vars` header, optional heap header, one command.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = tokenize(src)?;
    let mut p = P { toks: &toks, i: 0, vars: Vec::new(), heap_mode: false };

    p.expect_ident("vars")?;
    loop {
        let (name, pos) = p.ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(ParseError::ReservedVar { pos, name });
        }
        if p.vars.contains(&name) {
            return Err(ParseError::DuplicateVar { pos, name });
        }
        p.vars.push(name);
        if p.eat(&Tok::Comma) {
            continue;
        }
        p.expect(&Tok::Semi)?;
        break;
    }

    let mut heap = None;
    if p.peek_ident("heap") {
        p.bump();
        p.expect_ident("locs")?;
        let (locs, lpos) = p.num()?;
        if locs == 0 {
            return Err(ParseError::Syntax {
                pos: lpos,
                message: "heap needs at least one location".into(),
            });
        }
        p.expect_ident("ints")?;
        let (lo, lopos) = p.num()?;
        if lo != 0 {
            return Err(ParseError::Syntax {
                pos: lopos,
                message: "integer range must start at 0".into(),
            });
        }
        p.expect(&Tok::DotDot)?;
        let (hi, _) = p.num()?;
        p.expect(&Tok::Semi)?;
        heap = Some(HeapDecl { locations: locs as usize, int_max: hi });
        p.heap_mode = true;
    }

    let body = p.command()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::Syntax {
            pos: t.pos,
            message: format!("trailing input starting with {}", t.tok),
        });
    }
    Ok(Program { vars: p.vars, body, heap })
}

/// Parse a command against an existing variable table (used when reading
/// derivation files, whose nodes carry command text).
pub fn parse_command(src: &str, vars: &[String], heap_mode: bool) -> Result<Command, ParseError> {
    let toks = tokenize(src)?;
    let mut p = P { toks: &toks, i: 0, vars: vars.to_vec(), heap_mode };
    let c = p.command()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::Syntax {
            pos: t.pos,
            message: format!("trailing input starting with {}", t.tok),
        });
    }
    Ok(c)
}

/// Parse a boolean assertion against an existing variable table.
pub fn parse_bexp(src: &str, vars: &[String]) -> Result<BExp, ParseError> {
    let toks = tokenize(src)?;
    let mut p = P { toks: &toks, i: 0, vars: vars.to_vec(), heap_mode: false };
    let b = p.bexp()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::Syntax {
            pos: t.pos,
            message: format!("trailing input starting with {}", t.tok),
        });
    }
    Ok(b)
}

struct P<'a> {
    toks: &'a [Token],
    i: usize,
    vars: Vec<String>,
    heap_mode: bool,
}

impl<'a> P<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.i + 1).map(|t| &t.tok)
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.i];
        self.i += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<Pos, ParseError> {
        match self.peek() {
            Some(t) if &t.tok == tok => {
                let pos = t.pos;
                self.i += 1;
                Ok(pos)
            }
            Some(t) => Err(ParseError::Syntax {
                pos: t.pos,
                message: format!("expected {tok}, found {}", t.tok),
            }),
            None => Err(ParseError::Eof { expected: tok.to_string() }),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), pos }) => {
                let out = (s.clone(), *pos);
                self.i += 1;
                Ok(out)
            }
            Some(t) => Err(ParseError::Syntax {
                pos: t.pos,
                message: format!("expected identifier, found {}", t.tok),
            }),
            None => Err(ParseError::Eof { expected: "identifier".into() }),
        }
    }

    fn num(&mut self) -> Result<(u64, Pos), ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Num(n), pos }) => {
                let out = (*n, *pos);
                self.i += 1;
                Ok(out)
            }
            Some(t) => Err(ParseError::Syntax {
                pos: t.pos,
                message: format!("expected number, found {}", t.tok),
            }),
            None => Err(ParseError::Eof { expected: "number".into() }),
        }
    }

    fn peek_ident(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(s), .. }) if s == kw)
    }

    fn expect_ident(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.peek_ident(kw) {
            self.i += 1;
            Ok(())
        } else {
            match self.peek() {
                Some(t) => Err(ParseError::Syntax {
                    pos: t.pos,
                    message: format!("expected `{kw}`, found {}", t.tok),
                }),
                None => Err(ParseError::Eof { expected: format!("`{kw}`") }),
            }
        }
    }

    fn var(&mut self) -> Result<(VarId, Pos), ParseError> {
        let (name, pos) = self.ident()?;
        match self.vars.iter().position(|v| *v == name) {
            Some(id) => Ok((id, pos)),
            None => Err(ParseError::UndeclaredVar { pos, name }),
        }
    }

    // ---- commands ----

    fn command(&mut self) -> Result<Command, ParseError> {
        let first = self.one_command()?;
        if self.eat(&Tok::Semi) {
            let rest = self.command()?;
            Ok(Command::seq(first, rest))
        } else {
            Ok(first)
        }
    }

    fn one_command(&mut self) -> Result<Command, ParseError> {
        let t = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(ParseError::Eof { expected: "command".into() }),
        };
        match &t.tok {
            Tok::Ident(s) if s == "skip" => {
                self.bump();
                Ok(Command::skip())
            }
            Tok::Ident(s) if s == "free" => {
                let pos = t.pos;
                self.bump();
                self.expect(&Tok::LParen)?;
                let (x, _) = self.var()?;
                self.expect(&Tok::RParen)?;
                self.heap_ok(pos)?;
                Ok(Command::Atomic(AtomicCmd::Free(x)))
            }
            Tok::Ident(s) if s == "if" => self.if_command(),
            Tok::Ident(s) if s == "while" => self.while_command(),
            Tok::Ident(_) if self.peek2() == Some(&Tok::Assign) => self.assign_like(),
            Tok::LBracket => {
                // [x] := y
                let pos = t.pos;
                self.bump();
                let (x, _) = self.var()?;
                self.expect(&Tok::RBracket)?;
                self.expect(&Tok::Assign)?;
                let (y, _) = self.var()?;
                self.heap_ok(pos)?;
                Ok(Command::Atomic(AtomicCmd::Store(x, y)))
            }
            Tok::LParen => {
                // Either a grouped command / choice / star, or a
                // parenthesised guard. Try the command reading first and
                // backtrack on failure.
                let save = self.i;
                match self.group_command() {
                    Ok(c) => Ok(c),
                    Err(_) => {
                        self.i = save;
                        self.assume_command()
                    }
                }
            }
            _ => self.assume_command(),
        }
    }

    fn group_command(&mut self) -> Result<Command, ParseError> {
        self.expect(&Tok::LParen)?;
        let first = self.command()?;
        let inner = if self.eat(&Tok::BoxPlus) {
            let second = self.command()?;
            Command::choice(first, second)
        } else {
            first
        };
        self.expect(&Tok::RParen)?;
        let mut out = inner;
        while self.eat(&Tok::Star) {
            out = Command::star(out);
        }
        Ok(out)
    }

    fn assume_command(&mut self) -> Result<Command, ParseError> {
        let b = self.bexp()?;
        self.expect(&Tok::Question)?;
        Ok(Command::Atomic(AtomicCmd::Assume(b)))
    }

    fn assign_like(&mut self) -> Result<Command, ParseError> {
        let (x, xpos) = self.var()?;
        self.expect(&Tok::Assign)?;
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) if s == "nondet" && self.peek2() == Some(&Tok::LParen) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                self.expect(&Tok::RParen)?;
                Ok(Command::Atomic(AtomicCmd::Havoc(x)))
            }
            Some(Token { tok: Tok::Ident(s), .. }) if s == "alloc" && self.peek2() == Some(&Tok::LParen) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                self.expect(&Tok::RParen)?;
                self.heap_ok(xpos)?;
                Ok(Command::Atomic(AtomicCmd::Alloc(x)))
            }
            Some(Token { tok: Tok::LBracket, pos }) => {
                let pos = *pos;
                self.bump();
                let (y, _) = self.var()?;
                self.expect(&Tok::RBracket)?;
                self.heap_ok(pos)?;
                Ok(Command::Atomic(AtomicCmd::Load(x, y)))
            }
            _ => {
                let a = self.aexp()?;
                Ok(Command::Atomic(AtomicCmd::Assign(x, a)))
            }
        }
    }

    fn heap_ok(&self, pos: Pos) -> Result<(), ParseError> {
        if self.heap_mode {
            Ok(())
        } else {
            Err(ParseError::HeapAtomicWithoutHeap { pos })
        }
    }

    fn if_command(&mut self) -> Result<Command, ParseError> {
        self.expect_ident("if")?;
        self.expect(&Tok::LParen)?;
        let guard = if self.peek_ident("nondet") && self.peek2() == Some(&Tok::LParen) {
            self.bump();
            self.expect(&Tok::LParen)?;
            self.expect(&Tok::RParen)?;
            None
        } else {
            Some(self.bexp()?)
        };
        self.expect(&Tok::RParen)?;
        self.expect(&Tok::LBrace)?;
        let then_branch = self.command()?;
        self.expect(&Tok::RBrace)?;
        self.expect_ident("else")?;
        self.expect(&Tok::LBrace)?;
        let else_branch = self.command()?;
        self.expect(&Tok::RBrace)?;
        Ok(match guard {
            Some(b) => Command::choice(
                Command::seq(Command::Atomic(AtomicCmd::Assume(b.clone())), then_branch),
                Command::seq(
                    Command::Atomic(AtomicCmd::Assume(BExp::Not(Box::new(b)))),
                    else_branch,
                ),
            ),
            // `if (nondet())` is a free choice between the branches
            None => Command::choice(then_branch, else_branch),
        })
    }

    fn while_command(&mut self) -> Result<Command, ParseError> {
        self.expect_ident("while")?;
        self.expect(&Tok::LParen)?;
        let b = self.bexp()?;
        self.expect(&Tok::RParen)?;
        self.expect(&Tok::LBrace)?;
        let body = self.command()?;
        self.expect(&Tok::RBrace)?;
        Ok(Command::seq(
            Command::star(Command::seq(Command::Atomic(AtomicCmd::Assume(b.clone())), body)),
            Command::Atomic(AtomicCmd::Assume(BExp::Not(Box::new(b)))),
        ))
    }

    // ---- boolean expressions ----

    fn bexp(&mut self) -> Result<BExp, ParseError> {
        self.bexp_or()
    }

    fn bexp_or(&mut self) -> Result<BExp, ParseError> {
        let mut out = self.bexp_and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.bexp_and()?;
            // a || b  ==>  !(!a && !b)
            out = BExp::Not(Box::new(BExp::And(
                Box::new(BExp::Not(Box::new(out))),
                Box::new(BExp::Not(Box::new(rhs))),
            )));
        }
        Ok(out)
    }

    fn bexp_and(&mut self) -> Result<BExp, ParseError> {
        let mut out = self.bexp_not()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.bexp_not()?;
            out = BExp::And(Box::new(out), Box::new(rhs));
        }
        Ok(out)
    }

    fn bexp_not(&mut self) -> Result<BExp, ParseError> {
        if self.eat(&Tok::Bang) {
            let inner = self.bexp_not()?;
            Ok(BExp::Not(Box::new(inner)))
        } else {
            self.bexp_atom()
        }
    }

    fn bexp_atom(&mut self) -> Result<BExp, ParseError> {
        let t = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(ParseError::Eof { expected: "boolean expression".into() }),
        };
        match &t.tok {
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(BExp::Not(Box::new(BExp::False)))
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(BExp::False)
            }
            Tok::Ident(s) if (s == "odd" || s == "even") && self.peek2() == Some(&Tok::LParen) => {
                let odd = s == "odd";
                self.bump();
                self.expect(&Tok::LParen)?;
                let (x, _) = self.var()?;
                self.expect(&Tok::RParen)?;
                let parity = AExp::Bin(ABinOp::Mod, Box::new(AExp::Var(x)), Box::new(AExp::Lit(2)));
                Ok(BExp::Cmp(CmpOp::Eq, parity, AExp::Lit(if odd { 1 } else { 0 })))
            }
            Tok::LParen => {
                // parenthesised boolean, or a parenthesised arithmetic
                // expression opening a comparison
                let save = self.i;
                self.bump();
                if let Ok(inner) = self.bexp_or() {
                    if self.eat(&Tok::RParen) {
                        return Ok(inner);
                    }
                }
                self.i = save;
                self.comparison()
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<BExp, ParseError> {
        let lhs = self.aexp()?;
        let op = match self.peek() {
            Some(Token { tok: Tok::Eq, .. }) => CmpOp::Eq,
            Some(Token { tok: Tok::Ne, .. }) => CmpOp::Ne,
            Some(Token { tok: Tok::Lt, .. }) => CmpOp::Lt,
            Some(Token { tok: Tok::Le, .. }) => CmpOp::Le,
            Some(Token { tok: Tok::Gt, .. }) => CmpOp::Gt,
            Some(Token { tok: Tok::Ge, .. }) => CmpOp::Ge,
            Some(t) => {
                return Err(ParseError::Syntax {
                    pos: t.pos,
                    message: format!("expected comparison operator, found {}", t.tok),
                })
            }
            None => return Err(ParseError::Eof { expected: "comparison operator".into() }),
        };
        self.bump();
        let rhs = self.aexp()?;
        Ok(BExp::Cmp(op, lhs, rhs))
    }

    // ---- arithmetic expressions ----

    fn aexp(&mut self) -> Result<AExp, ParseError> {
        let mut out = self.aexp_mul()?;
        loop {
            let op = match self.peek() {
                Some(Token { tok: Tok::Plus, .. }) => ABinOp::Add,
                Some(Token { tok: Tok::Minus, .. }) => ABinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.aexp_mul()?;
            out = AExp::Bin(op, Box::new(out), Box::new(rhs));
        }
        Ok(out)
    }

    fn aexp_mul(&mut self) -> Result<AExp, ParseError> {
        let mut out = self.aexp_atom()?;
        loop {
            let op = match self.peek() {
                Some(Token { tok: Tok::Star, .. }) => ABinOp::Mul,
                Some(Token { tok: Tok::Ident(s), .. }) if s == "mod" => ABinOp::Mod,
                _ => break,
            };
            self.bump();
            let rhs = self.aexp_atom()?;
            out = AExp::Bin(op, Box::new(out), Box::new(rhs));
        }
        Ok(out)
    }

    fn aexp_atom(&mut self) -> Result<AExp, ParseError> {
        let t = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(ParseError::Eof { expected: "arithmetic expression".into() }),
        };
        match &t.tok {
            Tok::Num(n) => {
                self.bump();
                Ok(AExp::Lit(*n))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let (x, _) = self.var()?;
                Ok(AExp::Var(x))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.aexp()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(ParseError::Syntax {
                pos: t.pos,
                message: format!("expected arithmetic expression, found {}", t.tok),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_skip() {
        let p = parse_program("vars x; skip").unwrap();
        assert_eq!(p.vars, vec!["x"]);
        assert_eq!(p.body, Command::skip());
        assert!(!p.heap_mode());
    }

    #[test]
    fn if_desugars_to_choice_of_guarded_branches() {
        let p = parse_program(
            "vars x,y,z; if (x mod 2 = 0) { if (y mod 2 = 1) { z := 42 } else { skip } } else { skip }",
        )
        .unwrap();
        let guard = |op: CmpOp, v: VarId, k: u64| {
            BExp::Cmp(
                op,
                AExp::Bin(ABinOp::Mod, Box::new(AExp::Var(v)), Box::new(AExp::Lit(2))),
                AExp::Lit(k),
            )
        };
        let inner = Command::choice(
            Command::seq(
                Command::Atomic(AtomicCmd::Assume(guard(CmpOp::Eq, 1, 1))),
                Command::Atomic(AtomicCmd::Assign(2, AExp::Lit(42))),
            ),
            Command::seq(
                Command::Atomic(AtomicCmd::Assume(BExp::Not(Box::new(guard(CmpOp::Eq, 1, 1))))),
                Command::skip(),
            ),
        );
        let expected = Command::choice(
            Command::seq(Command::Atomic(AtomicCmd::Assume(guard(CmpOp::Eq, 0, 0))), inner),
            Command::seq(
                Command::Atomic(AtomicCmd::Assume(BExp::Not(Box::new(guard(CmpOp::Eq, 0, 0))))),
                Command::skip(),
            ),
        );
        assert_eq!(p.body, expected);
    }

    #[test]
    fn while_desugars_to_star_and_exit_guard() {
        let p = parse_program("vars x; while (x < 3) { x := x + 1 }").unwrap();
        match &p.body {
            Command::Seq(star, exit) => {
                assert!(matches!(**star, Command::Star(_)));
                assert!(matches!(**exit, Command::Atomic(AtomicCmd::Assume(BExp::Not(_)))));
            }
            other => panic!("bad desugar: {other:?}"),
        }
    }

    #[test]
    fn heap_atomic_without_heap_header_is_an_error() {
        let err = parse_program("vars x; x := [x]").unwrap_err();
        assert!(matches!(err, ParseError::HeapAtomicWithoutHeap { .. }));
    }

    #[test]
    fn undeclared_variable_is_an_error() {
        let err = parse_program("vars x; y := 1").unwrap_err();
        assert!(matches!(err, ParseError::UndeclaredVar { .. }));
    }

    #[test]
    fn starred_guard_group() {
        let p = parse_program("vars x; ((x > 0)?)*").unwrap();
        match &p.body {
            Command::Star(inner) => {
                assert!(matches!(**inner, Command::Atomic(AtomicCmd::Assume(_))))
            }
            other => panic!("expected star, got {other:?}"),
        }
    }

    #[test]
    fn nondet_sugar() {
        let p = parse_program("vars x; x := nondet()").unwrap();
        assert_eq!(p.body, Command::Atomic(AtomicCmd::Havoc(0)));
        let p = parse_program("vars x; if (nondet()) { x := 1 } else { skip }").unwrap();
        assert_eq!(
            p.body,
            Command::choice(Command::Atomic(AtomicCmd::Assign(0, AExp::Lit(1))), Command::skip())
        );
    }
}
