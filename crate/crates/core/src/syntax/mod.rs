//! Abstract syntax for regular commands.
//!
//! Conditionals and loops exist only in the surface syntax; the parser
//! desugars them into choice and star, so the core AST has exactly four
//! command forms. Variables are resolved to indices into the program's
//! declared variable list at parse time.

pub(crate) mod lexer;
mod parser;
mod print;

pub use parser::{parse_bexp, parse_command, parse_program, ParseError};
pub use print::{print_bexp, print_command};

use std::collections::BTreeSet;

/// Index into a program's declared variable list.
pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ABinOp {
    Add,
    Sub,
    Mul,
    Mod,
}

/// Arithmetic expressions: literals, variables and binary nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AExp {
    Lit(u64),
    Var(VarId),
    Bin(ABinOp, Box<AExp>, Box<AExp>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// Boolean expressions. `true`, `||`, `odd(x)` and `even(x)` are parser
/// sugar and never appear here.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BExp {
    False,
    Not(Box<BExp>),
    And(Box<BExp>, Box<BExp>),
    Cmp(CmpOp, AExp, AExp),
}

/// Atomic commands. `Havoc` is the nondeterministic assignment
/// `x := nondet()`; the last four are heap primitives and only legal in
/// programs that declare a heap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AtomicCmd {
    Skip,
    Assign(VarId, AExp),
    Assume(BExp),
    Havoc(VarId),
    /// `x := alloc()`
    Alloc(VarId),
    /// `free(x)`
    Free(VarId),
    /// `x := [y]`
    Load(VarId, VarId),
    /// `[x] := y`
    Store(VarId, VarId),
}

/// Regular commands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Command {
    Atomic(AtomicCmd),
    Seq(Box<Command>, Box<Command>),
    Choice(Box<Command>, Box<Command>),
    Star(Box<Command>),
}

impl Command {
    pub fn skip() -> Self {
        Command::Atomic(AtomicCmd::Skip)
    }

    pub fn seq(a: Command, b: Command) -> Self {
        Command::Seq(Box::new(a), Box::new(b))
    }

    pub fn choice(a: Command, b: Command) -> Self {
        Command::Choice(Box::new(a), Box::new(b))
    }

    pub fn star(a: Command) -> Self {
        Command::Star(Box::new(a))
    }

    /// True if the command contains any of the heap primitives.
    pub fn uses_heap(&self) -> bool {
        match self {
            Command::Atomic(c) => matches!(
                c,
                AtomicCmd::Alloc(_) | AtomicCmd::Free(_) | AtomicCmd::Load(..) | AtomicCmd::Store(..)
            ),
            Command::Seq(a, b) | Command::Choice(a, b) => a.uses_heap() || b.uses_heap(),
            Command::Star(a) => a.uses_heap(),
        }
    }
}

/// Heap bounds declared by a program header, e.g. `heap locs 3 ints 0..1;`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeapDecl {
    pub locations: usize,
    pub int_max: u64,
}

/// A parsed program: its declared variables, its body, and the optional heap
/// declaration that switches on the heap primitives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub vars: Vec<String>,
    pub body: Command,
    pub heap: Option<HeapDecl>,
}

impl Program {
    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn heap_mode(&self) -> bool {
        self.heap.is_some()
    }
}

fn aexp_vars(a: &AExp, out: &mut BTreeSet<VarId>) {
    match a {
        AExp::Lit(_) => {}
        AExp::Var(x) => {
            out.insert(*x);
        }
        AExp::Bin(_, l, r) => {
            aexp_vars(l, out);
            aexp_vars(r, out);
        }
    }
}

fn bexp_vars(b: &BExp, out: &mut BTreeSet<VarId>) {
    match b {
        BExp::False => {}
        BExp::Not(inner) => bexp_vars(inner, out),
        BExp::And(l, r) => {
            bexp_vars(l, out);
            bexp_vars(r, out);
        }
        BExp::Cmp(_, l, r) => {
            aexp_vars(l, out);
            aexp_vars(r, out);
        }
    }
}

/// Variables syntactically occurring in a command.
pub fn free_vars(r: &Command) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    collect_free(r, &mut out);
    out
}

fn collect_free(r: &Command, out: &mut BTreeSet<VarId>) {
    match r {
        Command::Atomic(c) => match c {
            AtomicCmd::Skip => {}
            AtomicCmd::Assign(x, a) => {
                out.insert(*x);
                aexp_vars(a, out);
            }
            AtomicCmd::Assume(b) => bexp_vars(b, out),
            AtomicCmd::Havoc(x) | AtomicCmd::Alloc(x) | AtomicCmd::Free(x) => {
                out.insert(*x);
            }
            AtomicCmd::Load(x, y) | AtomicCmd::Store(x, y) => {
                out.insert(*x);
                out.insert(*y);
            }
        },
        Command::Seq(a, b) | Command::Choice(a, b) => {
            collect_free(a, out);
            collect_free(b, out);
        }
        Command::Star(a) => collect_free(a, out),
    }
}

/// Variables a command may modify. `free(x)` and `[x] := y` touch the cell
/// pointed to by `x`, not `x` itself, so they modify nothing.
pub fn mod_vars(r: &Command) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    collect_mod(r, &mut out);
    out
}

fn collect_mod(r: &Command, out: &mut BTreeSet<VarId>) {
    match r {
        Command::Atomic(c) => match c {
            AtomicCmd::Skip | AtomicCmd::Assume(_) | AtomicCmd::Free(_) | AtomicCmd::Store(..) => {}
            AtomicCmd::Assign(x, _) | AtomicCmd::Havoc(x) | AtomicCmd::Alloc(x) => {
                out.insert(*x);
            }
            AtomicCmd::Load(x, _) => {
                out.insert(*x);
            }
        },
        Command::Seq(a, b) | Command::Choice(a, b) => {
            collect_mod(a, out);
            collect_mod(b, out);
        }
        Command::Star(a) => collect_mod(a, out),
    }
}
