//! The separation assertion language and its extensional bounded-model
//! semantics.
//!
//! Surface syntax: `false`, `true`, `!p`, `p && q`, `p || q`,
//! `exists x. p`, `a = a` (and the other comparisons), `emp`, `x |-> a`,
//! `x |-> -`, `x |-/>`, `p * q`. `true`, `||` and `|-> -` are sugar; the
//! dash form becomes `exists _v. x |-> _v`.
//!
//! Formulas denote sets of (store, heap) states; the error state satisfies
//! nothing. `x |-> a` is an exact single-cell heap, so larger heaps satisfy
//! it only through `*` with `true`.

use super::{cmp_hvals, Cell, HVal, HeapState, SepConfig};
use crate::syntax::lexer::{self as lex, Tok};
use crate::syntax::{ABinOp, AExp, BExp, CmpOp};
use std::collections::BTreeSet;
use std::fmt::Write;
use thiserror::Error;

/// Arithmetic expressions over named variables (assertions may mention
/// variables beyond the program's declarations, e.g. ghost names).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExp {
    Lit(u64),
    Var(String),
    Bin(ABinOp, Box<SExp>, Box<SExp>),
}

/// Assertion formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Asl {
    False,
    Not(Box<Asl>),
    And(Box<Asl>, Box<Asl>),
    Exists(String, Box<Asl>),
    Cmp(CmpOp, SExp, SExp),
    Emp,
    PointsTo(String, SExp),
    Dangling(String),
    Sep(Box<Asl>, Box<Asl>),
}

impl Asl {
    pub fn not(p: Asl) -> Asl {
        Asl::Not(Box::new(p))
    }
    pub fn and(p: Asl, q: Asl) -> Asl {
        Asl::And(Box::new(p), Box::new(q))
    }
    pub fn or(p: Asl, q: Asl) -> Asl {
        Asl::not(Asl::and(Asl::not(p), Asl::not(q)))
    }
    pub fn exists(x: impl Into<String>, p: Asl) -> Asl {
        Asl::Exists(x.into(), Box::new(p))
    }
    pub fn sep(p: Asl, q: Asl) -> Asl {
        Asl::Sep(Box::new(p), Box::new(q))
    }
    pub fn truth() -> Asl {
        Asl::not(Asl::False)
    }
    /// `x |-> -`
    pub fn points_somewhere(x: impl Into<String>) -> Asl {
        let x = x.into();
        Asl::exists("_v", Asl::PointsTo(x, SExp::Var("_v".into())))
    }
}

fn sexp_vars(e: &SExp, out: &mut BTreeSet<String>) {
    match e {
        SExp::Lit(_) => {}
        SExp::Var(x) => {
            out.insert(x.clone());
        }
        SExp::Bin(_, l, r) => {
            sexp_vars(l, out);
            sexp_vars(r, out);
        }
    }
}

fn fv_rec(p: &Asl, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match p {
        Asl::False | Asl::Emp => {}
        Asl::Not(q) => fv_rec(q, bound, out),
        Asl::And(l, r) | Asl::Sep(l, r) => {
            fv_rec(l, bound, out);
            fv_rec(r, bound, out);
        }
        Asl::Exists(x, body) => {
            bound.push(x.clone());
            fv_rec(body, bound, out);
            bound.pop();
        }
        Asl::Cmp(_, l, r) => {
            let mut vars = BTreeSet::new();
            sexp_vars(l, &mut vars);
            sexp_vars(r, &mut vars);
            out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
        }
        Asl::PointsTo(x, a) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
            let mut vars = BTreeSet::new();
            sexp_vars(a, &mut vars);
            out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
        }
        Asl::Dangling(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
    }
}

/// Free variables, computed modulo binding.
pub fn fv_asl(p: &Asl) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fv_rec(p, &mut Vec::new(), &mut out);
    out
}

/// Variables of an arithmetic assertion expression.
pub fn collect_sexp_vars(e: &SExp, out: &mut BTreeSet<String>) {
    sexp_vars(e, out)
}

/// Translation of a program boolean expression into an assertion (used by
/// the assert axiom).
pub fn embed_bexp(b: &BExp, vars: &[String]) -> Asl {
    match b {
        BExp::False => Asl::False,
        BExp::Not(inner) => Asl::not(embed_bexp(inner, vars)),
        BExp::And(l, r) => Asl::and(embed_bexp(l, vars), embed_bexp(r, vars)),
        BExp::Cmp(op, l, r) => Asl::Cmp(*op, embed_aexp(l, vars), embed_aexp(r, vars)),
    }
}

pub fn embed_aexp(a: &AExp, vars: &[String]) -> SExp {
    match a {
        AExp::Lit(n) => SExp::Lit(*n),
        AExp::Var(x) => SExp::Var(vars[*x].clone()),
        AExp::Bin(op, l, r) => {
            SExp::Bin(*op, Box::new(embed_aexp(l, vars)), Box::new(embed_aexp(r, vars)))
        }
    }
}

// ---- substitution ----

#[derive(Debug, Error)]
pub enum SubstError {
    #[error("cannot substitute the non-variable expression `{expr}` into the pointer position of `{var}`")]
    PointerPosition { var: String, expr: String },
}

fn subst_sexp(e: &SExp, a: &SExp, x: &str) -> SExp {
    match e {
        SExp::Lit(_) => e.clone(),
        SExp::Var(y) if y == x => a.clone(),
        SExp::Var(_) => e.clone(),
        SExp::Bin(op, l, r) => {
            SExp::Bin(*op, Box::new(subst_sexp(l, a, x)), Box::new(subst_sexp(r, a, x)))
        }
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding substitution `q[a / x]`. Substituting into the variable
/// position of `|->` or `|-/>` requires `a` to be a variable.
pub fn subst(q: &Asl, a: &SExp, x: &str) -> Result<Asl, SubstError> {
    Ok(match q {
        Asl::False => Asl::False,
        Asl::Emp => Asl::Emp,
        Asl::Not(p) => Asl::not(subst(p, a, x)?),
        Asl::And(l, r) => Asl::and(subst(l, a, x)?, subst(r, a, x)?),
        Asl::Sep(l, r) => Asl::sep(subst(l, a, x)?, subst(r, a, x)?),
        Asl::Cmp(op, l, r) => Asl::Cmp(*op, subst_sexp(l, a, x), subst_sexp(r, a, x)),
        Asl::Exists(y, body) => {
            if y == x {
                return Ok(q.clone());
            }
            let mut a_vars = BTreeSet::new();
            sexp_vars(a, &mut a_vars);
            if a_vars.contains(y) {
                // rename the binder out of the way first
                let mut avoid = a_vars.clone();
                avoid.extend(fv_asl(body));
                avoid.insert(x.to_string());
                let fresh = fresh_name(y, &avoid);
                let renamed = subst(body, &SExp::Var(fresh.clone()), y)?;
                Asl::exists(fresh, subst(&renamed, a, x)?)
            } else {
                Asl::exists(y.clone(), subst(body, a, x)?)
            }
        }
        Asl::PointsTo(y, e) => {
            let e2 = subst_sexp(e, a, x);
            if y == x {
                match a {
                    SExp::Var(z) => Asl::PointsTo(z.clone(), e2),
                    _ => {
                        return Err(SubstError::PointerPosition {
                            var: y.clone(),
                            expr: print_sexp(a),
                        })
                    }
                }
            } else {
                Asl::PointsTo(y.clone(), e2)
            }
        }
        Asl::Dangling(y) => {
            if y == x {
                match a {
                    SExp::Var(z) => Asl::Dangling(z.clone()),
                    _ => {
                        return Err(SubstError::PointerPosition {
                            var: y.clone(),
                            expr: print_sexp(a),
                        })
                    }
                }
            } else {
                q.clone()
            }
        }
    })
}

// ---- alpha equivalence ----

fn alpha_var(x: &str, y: &str, env: &[(String, String)]) -> bool {
    for (a, b) in env.iter().rev() {
        match (a == x, b == y) {
            (true, true) => return true,
            (true, false) | (false, true) => return false,
            _ => {}
        }
    }
    x == y
}

fn alpha_sexp(l: &SExp, r: &SExp, env: &[(String, String)]) -> bool {
    match (l, r) {
        (SExp::Lit(a), SExp::Lit(b)) => a == b,
        (SExp::Var(a), SExp::Var(b)) => alpha_var(a, b, env),
        (SExp::Bin(op1, a1, b1), SExp::Bin(op2, a2, b2)) => {
            op1 == op2 && alpha_sexp(a1, a2, env) && alpha_sexp(b1, b2, env)
        }
        _ => false,
    }
}

fn alpha_rec(l: &Asl, r: &Asl, env: &mut Vec<(String, String)>) -> bool {
    match (l, r) {
        (Asl::False, Asl::False) | (Asl::Emp, Asl::Emp) => true,
        (Asl::Not(a), Asl::Not(b)) => alpha_rec(a, b, env),
        (Asl::And(a1, b1), Asl::And(a2, b2)) | (Asl::Sep(a1, b1), Asl::Sep(a2, b2)) => {
            alpha_rec(a1, a2, env) && alpha_rec(b1, b2, env)
        }
        (Asl::Exists(x, a), Asl::Exists(y, b)) => {
            env.push((x.clone(), y.clone()));
            let out = alpha_rec(a, b, env);
            env.pop();
            out
        }
        (Asl::Cmp(op1, a1, b1), Asl::Cmp(op2, a2, b2)) => {
            op1 == op2 && alpha_sexp(a1, a2, env) && alpha_sexp(b1, b2, env)
        }
        (Asl::PointsTo(x, a), Asl::PointsTo(y, b)) => alpha_var(x, y, env) && alpha_sexp(a, b, env),
        (Asl::Dangling(x), Asl::Dangling(y)) => alpha_var(x, y, env),
        _ => false,
    }
}

/// Structural equality modulo renaming of bound variables.
pub fn alpha_eq(l: &Asl, r: &Asl) -> bool {
    alpha_rec(l, r, &mut Vec::new())
}

// ---- satisfaction ----

struct Env<'a> {
    cfg: &'a SepConfig,
    store: &'a [HVal],
    bindings: Vec<(String, HVal)>,
}

impl Env<'_> {
    fn lookup(&self, name: &str) -> HVal {
        for (n, v) in self.bindings.iter().rev() {
            if n == name {
                return *v;
            }
        }
        match self.cfg.var_id(name) {
            Some(i) => self.store[i],
            None => panic!("unbound assertion variable `{name}` (scope-check first)"),
        }
    }
}

fn eval_sexp(e: &SExp, env: &Env) -> HVal {
    let m = env.cfg.int_max + 1;
    match e {
        SExp::Lit(n) => HVal::Int(n % m),
        SExp::Var(x) => env.lookup(x),
        SExp::Bin(op, l, r) => {
            let lv = eval_sexp(l, env);
            let rv = eval_sexp(r, env);
            match (lv, rv) {
                (HVal::Int(a), HVal::Int(b)) => HVal::Int(match op {
                    ABinOp::Add => (a + b) % m,
                    ABinOp::Sub => (a + m - b) % m,
                    ABinOp::Mul => (a as u128 * b as u128 % m as u128) as u64,
                    ABinOp::Mod => {
                        if b == 0 {
                            a
                        } else {
                            a % b
                        }
                    }
                }),
                _ => HVal::Int(0),
            }
        }
    }
}

fn sat_rec(p: &Asl, env: &mut Env, heap: &[Cell]) -> bool {
    match p {
        Asl::False => false,
        Asl::Not(q) => !sat_rec(q, env, heap),
        Asl::And(l, r) => sat_rec(l, env, heap) && sat_rec(r, env, heap),
        Asl::Exists(x, body) => {
            let vals: Vec<HVal> = env.cfg.each_val().collect();
            for v in vals {
                env.bindings.push((x.clone(), v));
                let ok = sat_rec(body, env, heap);
                env.bindings.pop();
                if ok {
                    return true;
                }
            }
            false
        }
        Asl::Cmp(op, l, r) => cmp_hvals(*op, eval_sexp(l, env), eval_sexp(r, env)),
        Asl::Emp => heap.iter().all(|c| matches!(c, Cell::Absent)),
        Asl::PointsTo(x, a) => {
            let lv = env.lookup(x);
            let target = eval_sexp(a, env);
            match lv {
                HVal::Loc(l) => heap.iter().enumerate().all(|(i, c)| {
                    if i == l as usize {
                        *c == Cell::Val(target)
                    } else {
                        matches!(c, Cell::Absent)
                    }
                }),
                HVal::Int(_) => false,
            }
        }
        Asl::Dangling(x) => match env.lookup(x) {
            HVal::Loc(l) => heap.iter().enumerate().all(|(i, c)| {
                if i == l as usize {
                    matches!(c, Cell::Dangling)
                } else {
                    matches!(c, Cell::Absent)
                }
            }),
            HVal::Int(_) => false,
        },
        Asl::Sep(l, r) => {
            // distribute the defined cells over the two sides
            let defined: Vec<usize> = heap
                .iter()
                .enumerate()
                .filter(|(_, c)| !matches!(c, Cell::Absent))
                .map(|(i, _)| i)
                .collect();
            let mut left = vec![Cell::Absent; heap.len()];
            let mut right = vec![Cell::Absent; heap.len()];
            for mask in 0..(1usize << defined.len()) {
                for (bit, &i) in defined.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        left[i] = heap[i];
                        right[i] = Cell::Absent;
                    } else {
                        left[i] = Cell::Absent;
                        right[i] = heap[i];
                    }
                }
                if sat_rec(l, env, &left) && sat_rec(r, env, &right) {
                    return true;
                }
            }
            false
        }
    }
}

/// Does the state satisfy the formula? All free variables of `p` must be in
/// the configured variable list.
pub fn sat(p: &Asl, cfg: &SepConfig, st: &HeapState) -> bool {
    let mut env = Env { cfg, store: &st.store, bindings: Vec::new() };
    sat_rec(p, &mut env, &st.heap)
}

/// The denotation as an explicit state set (enumerates the universe).
pub fn eval_asl(p: &Asl, cfg: &SepConfig) -> Vec<HeapState> {
    let mut out = Vec::new();
    cfg.enumerate(|st| {
        if sat(p, cfg, st) {
            out.push(st.clone());
        }
    });
    out
}

/// Scope check: every free variable must be a configured variable.
pub fn check_scope(p: &Asl, cfg: &SepConfig) -> Result<(), super::SepError> {
    for v in fv_asl(p) {
        if cfg.var_id(&v).is_none() {
            return Err(super::SepError::UnboundVar(v));
        }
    }
    Ok(())
}

// ---- printing ----

pub fn print_sexp(e: &SExp) -> String {
    let mut out = String::new();
    sexp_fmt(&mut out, e, 0, false);
    out
}

fn sexp_fmt(out: &mut String, e: &SExp, parent: u8, rhs: bool) {
    match e {
        SExp::Lit(n) => {
            let _ = write!(out, "{n}");
        }
        SExp::Var(x) => out.push_str(x),
        SExp::Bin(op, l, r) => {
            let (prec, opstr) = match op {
                ABinOp::Add => (1, "+"),
                ABinOp::Sub => (1, "-"),
                ABinOp::Mul => (2, "*"),
                ABinOp::Mod => (2, "mod"),
            };
            let need = prec < parent || (prec == parent && rhs);
            if need {
                out.push('(');
            }
            sexp_fmt(out, l, prec, false);
            let _ = write!(out, " {opstr} ");
            sexp_fmt(out, r, prec, true);
            if need {
                out.push(')');
            }
        }
    }
}

/// Precedence levels: exists < `||` < `&&` < `*` < `!` < atoms.
pub fn print_asl(p: &Asl) -> String {
    let mut out = String::new();
    asl_fmt(&mut out, p, 0);
    out
}

fn asl_fmt(out: &mut String, p: &Asl, parent: u8) {
    // sugar on output
    if let Asl::Not(inner) = p {
        if **inner == Asl::False {
            out.push_str("true");
            return;
        }
        if let Asl::And(l, r) = &**inner {
            if let (Asl::Not(dl), Asl::Not(dr)) = (&**l, &**r) {
                let need = parent > 1;
                if need {
                    out.push('(');
                }
                // `||` folds to the left, so a right operand at the same
                // level needs explicit grouping
                asl_fmt(out, dl, 1);
                out.push_str(" || ");
                asl_fmt(out, dr, 2);
                if need {
                    out.push(')');
                }
                return;
            }
        }
    }
    if let Asl::Exists(x, body) = p {
        if let Asl::PointsTo(y, SExp::Var(v)) = &**body {
            if v == x && y != x {
                let _ = write!(out, "{y} |-> -");
                return;
            }
        }
    }
    match p {
        Asl::False => out.push_str("false"),
        Asl::Emp => out.push_str("emp"),
        Asl::Not(inner) => {
            out.push('!');
            match **inner {
                Asl::Not(_) => asl_fmt(out, inner, 4),
                _ => {
                    out.push('(');
                    asl_fmt(out, inner, 0);
                    out.push(')');
                }
            }
        }
        Asl::And(l, r) => {
            let need = parent > 2;
            if need {
                out.push('(');
            }
            asl_fmt(out, l, 3);
            out.push_str(" && ");
            asl_fmt(out, r, 2);
            if need {
                out.push(')');
            }
        }
        Asl::Sep(l, r) => {
            let need = parent > 3;
            if need {
                out.push('(');
            }
            asl_fmt(out, l, 4);
            out.push_str(" * ");
            asl_fmt(out, r, 3);
            if need {
                out.push(')');
            }
        }
        Asl::Exists(x, body) => {
            let need = parent > 0;
            if need {
                out.push('(');
            }
            let _ = write!(out, "exists {x}. ");
            asl_fmt(out, body, 0);
            if need {
                out.push(')');
            }
        }
        Asl::Cmp(op, l, r) => {
            let opstr = match op {
                CmpOp::Eq => "=",
                CmpOp::Ne => "!=",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            let _ = write!(out, "{} {opstr} {}", print_sexp(l), print_sexp(r));
        }
        Asl::PointsTo(x, a) => {
            let _ = write!(out, "{x} |-> {}", print_sexp(a));
        }
        Asl::Dangling(x) => {
            let _ = write!(out, "{x} |-/>");
        }
    }
}

// ---- parsing ----

#[derive(Debug, Error)]
#[error("assertion syntax error at {pos}: {message}")]
pub struct AslParseError {
    pub pos: lex::Pos,
    pub message: String,
}

/// Parses an assertion. Variables are left as names; scope-check against a
/// configuration before evaluating.
pub fn parse_asl(src: &str) -> Result<Asl, AslParseError> {
    let toks = lex::tokenize(src)
        .map_err(|e| AslParseError { pos: e.pos, message: e.message })?;
    let mut p = AslParser { toks: &toks, i: 0 };
    let out = p.formula()?;
    if let Some(t) = p.peek() {
        return Err(AslParseError {
            pos: t.pos,
            message: format!("trailing input starting with {}", t.tok),
        });
    }
    Ok(out)
}

struct AslParser<'a> {
    toks: &'a [lex::Token],
    i: usize,
}

impl AslParser<'_> {
    fn peek(&self) -> Option<&lex::Token> {
        self.toks.get(self.i)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, AslParseError> {
        let pos = self
            .peek()
            .map(|t| t.pos)
            .unwrap_or(lex::Pos { line: 0, col: 0 });
        Err(AslParseError { pos, message: message.into() })
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), AslParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            match self.peek() {
                Some(t) => {
                    let found = t.tok.clone();
                    self.err(format!("expected {tok}, found {found}"))
                }
                None => self.err(format!("expected {tok}, found end of input")),
            }
        }
    }

    fn ident(&mut self) -> Result<String, AslParseError> {
        match self.peek() {
            Some(lex::Token { tok: Tok::Ident(s), .. }) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn formula(&mut self) -> Result<Asl, AslParseError> {
        if matches!(self.peek(), Some(lex::Token { tok: Tok::Ident(s), .. }) if s == "exists") {
            self.i += 1;
            let x = self.ident()?;
            self.expect(&Tok::Dot)?;
            let body = self.formula()?;
            return Ok(Asl::exists(x, body));
        }
        self.or()
    }

    fn or(&mut self) -> Result<Asl, AslParseError> {
        let mut out = self.and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.and()?;
            out = Asl::or(out, rhs);
        }
        Ok(out)
    }

    fn and(&mut self) -> Result<Asl, AslParseError> {
        let mut out = self.sep()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.sep()?;
            out = Asl::and(out, rhs);
        }
        Ok(out)
    }

    fn sep(&mut self) -> Result<Asl, AslParseError> {
        let first = self.unary()?;
        if self.eat(&Tok::Star) {
            let rest = self.sep()?; // right associated
            Ok(Asl::sep(first, rest))
        } else {
            Ok(first)
        }
    }

    fn unary(&mut self) -> Result<Asl, AslParseError> {
        if self.eat(&Tok::Bang) {
            let inner = self.unary()?;
            return Ok(Asl::not(inner));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Asl, AslParseError> {
        let t = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("expected assertion"),
        };
        match &t.tok {
            Tok::Ident(s) if s == "false" => {
                self.i += 1;
                Ok(Asl::False)
            }
            Tok::Ident(s) if s == "true" => {
                self.i += 1;
                Ok(Asl::truth())
            }
            Tok::Ident(s) if s == "emp" => {
                self.i += 1;
                Ok(Asl::Emp)
            }
            Tok::Ident(s) if s == "exists" => self.formula(),
            Tok::Ident(_) => {
                // variable: points-to, dangling, or a comparison
                let save = self.i;
                let x = self.ident()?;
                match self.peek().map(|t| &t.tok) {
                    Some(Tok::MapsTo) => {
                        self.i += 1;
                        if self.dash_ahead() {
                            self.i += 1;
                            Ok(Asl::points_somewhere(x))
                        } else {
                            let a = self.sexp()?;
                            Ok(Asl::PointsTo(x, a))
                        }
                    }
                    Some(Tok::NotMapsTo) => {
                        self.i += 1;
                        Ok(Asl::Dangling(x))
                    }
                    _ => {
                        self.i = save;
                        self.comparison()
                    }
                }
            }
            Tok::LParen => {
                let save = self.i;
                self.i += 1;
                if let Ok(inner) = self.formula() {
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

    /// A `-` that closes a `|-> -` form rather than opening an expression.
    fn dash_ahead(&self) -> bool {
        if self.peek().map(|t| &t.tok) != Some(&Tok::Minus) {
            return false;
        }
        !matches!(
            self.toks.get(self.i + 1).map(|t| &t.tok),
            Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen)
        )
    }

    fn comparison(&mut self) -> Result<Asl, AslParseError> {
        let l = self.sexp()?;
        let op = match self.peek().map(|t| &t.tok) {
            Some(Tok::Eq) => CmpOp::Eq,
            Some(Tok::Ne) => CmpOp::Ne,
            Some(Tok::Lt) => CmpOp::Lt,
            Some(Tok::Le) => CmpOp::Le,
            Some(Tok::Gt) => CmpOp::Gt,
            Some(Tok::Ge) => CmpOp::Ge,
            _ => return self.err("expected comparison operator"),
        };
        self.i += 1;
        let r = self.sexp()?;
        Ok(Asl::Cmp(op, l, r))
    }

    fn sexp(&mut self) -> Result<SExp, AslParseError> {
        let mut out = self.sexp_mul()?;
        loop {
            let op = match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => ABinOp::Add,
                Some(Tok::Minus) => ABinOp::Sub,
                _ => break,
            };
            self.i += 1;
            let rhs = self.sexp_mul()?;
            out = SExp::Bin(op, Box::new(out), Box::new(rhs));
        }
        Ok(out)
    }

    fn sexp_mul(&mut self) -> Result<SExp, AslParseError> {
        // `*` is taken by the separating conjunction; only `mod` at this level
        let mut out = self.sexp_atom()?;
        while matches!(self.peek(), Some(lex::Token { tok: Tok::Ident(s), .. }) if s == "mod") {
            self.i += 1;
            let rhs = self.sexp_atom()?;
            out = SExp::Bin(ABinOp::Mod, Box::new(out), Box::new(rhs));
        }
        Ok(out)
    }

    fn sexp_atom(&mut self) -> Result<SExp, AslParseError> {
        match self.peek().cloned() {
            Some(lex::Token { tok: Tok::Num(n), .. }) => {
                self.i += 1;
                Ok(SExp::Lit(n))
            }
            Some(lex::Token { tok: Tok::Ident(s), .. })
                if !["exists", "emp", "true", "false", "mod"].contains(&s.as_str()) =>
            {
                self.i += 1;
                Ok(SExp::Var(s))
            }
            Some(lex::Token { tok: Tok::LParen, .. }) => {
                self.i += 1;
                let inner = self.sexp()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            _ => self.err("expected arithmetic expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SepConfig {
        SepConfig::new(2, 1, vec!["x".into(), "y".into()])
    }

    #[test]
    fn parse_and_print_roundtrip() {
        for src in [
            "false",
            "true",
            "emp",
            "x |-> 0",
            "x |-> -",
            "x |-/>",
            "x |-> y * y |-> - * true",
            "exists z. x |-> z && z = 1",
            "(x = y || x |-/>) * emp",
            "!(x = 0) && y <= 1",
        ] {
            let p = parse_asl(src).unwrap();
            let printed = print_asl(&p);
            let again = parse_asl(&printed).unwrap();
            assert_eq!(again, p, "{src} printed as {printed}");
        }
    }

    #[test]
    fn emp_denotes_exactly_the_empty_heap() {
        let cfg = cfg();
        let states = eval_asl(&Asl::Emp, &cfg);
        assert!(!states.is_empty());
        assert!(states.iter().all(|st| st.heap.iter().all(|c| matches!(c, Cell::Absent))));
        // one state per store
        assert_eq!(states.len() as u64, cfg.val_count().pow(2));
    }

    #[test]
    fn points_to_is_exact_single_cell() {
        let cfg = cfg();
        let p = parse_asl("x |-> 0").unwrap();
        for st in eval_asl(&p, &cfg) {
            let l = match st.store[0] {
                HVal::Loc(l) => l as usize,
                _ => panic!("x must hold a location"),
            };
            assert_eq!(st.heap[l], Cell::Val(HVal::Int(0)));
            for (i, c) in st.heap.iter().enumerate() {
                if i != l {
                    assert_eq!(*c, Cell::Absent);
                }
            }
        }
        // with * true, larger heaps qualify
        let pt = parse_asl("x |-> 0 * true").unwrap();
        assert!(eval_asl(&pt, &cfg).len() > eval_asl(&p, &cfg).len());
    }

    #[test]
    fn allocated_and_dangling_conflict_is_unsatisfiable() {
        let cfg = cfg();
        let p = parse_asl("x |-> - * x |-/>").unwrap();
        assert!(eval_asl(&p, &cfg).is_empty());
    }

    #[test]
    fn subst_examples() {
        // (x = 1)[0/x] = (0 = 1)
        let p = parse_asl("x = 1").unwrap();
        let out = subst(&p, &SExp::Lit(0), "x").unwrap();
        assert_eq!(out, parse_asl("0 = 1").unwrap());

        // (exists x. x = y)[x+1/y] renames the binder
        let p = parse_asl("exists x. x = y").unwrap();
        let a = parse_asl_expr("x + 1");
        let out = subst(&p, &a, "y").unwrap();
        assert!(alpha_eq(&out, &parse_asl("exists w. w = x + 1").unwrap()));
        // and literally uses a primed name
        assert_eq!(out, parse_asl("exists x'. x' = x + 1").unwrap());
    }

    fn parse_asl_expr(src: &str) -> SExp {
        match parse_asl(&format!("{src} = 0")).unwrap() {
            Asl::Cmp(_, l, _) => l,
            _ => unreachable!(),
        }
    }

    #[test]
    fn alpha_eq_ignores_binder_names() {
        let a = parse_asl("exists v. x |-> v").unwrap();
        let b = parse_asl("x |-> -").unwrap();
        assert!(alpha_eq(&a, &b));
        let c = parse_asl("exists v. y |-> v").unwrap();
        assert!(!alpha_eq(&a, &c));
    }

    #[test]
    fn sep_commutative_and_associative_on_denotations() {
        let cfg = cfg();
        let ab = parse_asl("x |-> 0 * y |-> 1").unwrap();
        let ba = parse_asl("y |-> 1 * x |-> 0").unwrap();
        assert_eq!(eval_asl(&ab, &cfg), eval_asl(&ba, &cfg));

        let l = parse_asl("(x |-> 0 * y |-> 1) * true").unwrap();
        let r = parse_asl("x |-> 0 * (y |-> 1 * true)").unwrap();
        assert_eq!(eval_asl(&l, &cfg), eval_asl(&r, &cfg));

        // unit
        let p = parse_asl("x |-> 0 * emp").unwrap();
        let q = parse_asl("x |-> 0").unwrap();
        assert_eq!(eval_asl(&p, &cfg), eval_asl(&q, &cfg));
    }
}
