//! Checker for the separation derivation rules, plus the bounded-model
//! validity check used both standalone and to discharge consequence steps.
//!
//! Entailments between assertions are decided by exhaustive evaluation at
//! the configured bounds, so acceptance certifies bounded validity; full
//! assertion entailment is out of reach by design. Assertion equalities
//! demanded by the structural rules are likewise denotational, with a
//! syntactic (alpha-equivalence) fast path.

use super::asl::{
    alpha_eq, check_scope, embed_aexp, embed_bexp, fv_asl, parse_asl, print_asl, sat, subst, Asl,
    SExp,
};
use super::{fwsem_heap, ExtState, HeapState, SepConfig, SepError};
use crate::syntax::{mod_vars, parse_command, print_command, AtomicCmd, Command, ParseError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepRule {
    Skip,
    Assign,
    Assert,
    Alloc,
    Free,
    Load,
    Store,
    Exists,
    Frame,
    Cons,
    Seq,
    Choice,
    Iter,
    Empty,
    Disj,
    Iter0,
    Unroll,
}

impl SepRule {
    pub fn id(&self) -> &'static str {
        match self {
            SepRule::Skip => "skip",
            SepRule::Assign => "assign",
            SepRule::Assert => "assert",
            SepRule::Alloc => "alloc",
            SepRule::Free => "free",
            SepRule::Load => "load",
            SepRule::Store => "store",
            SepRule::Exists => "exists",
            SepRule::Frame => "frame",
            SepRule::Cons => "cons",
            SepRule::Seq => "seq",
            SepRule::Choice => "choice",
            SepRule::Iter => "iter",
            SepRule::Empty => "empty",
            SepRule::Disj => "disj",
            SepRule::Iter0 => "iter0",
            SepRule::Unroll => "unroll",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        Some(match s {
            "skip" => SepRule::Skip,
            "assign" => SepRule::Assign,
            "assert" => SepRule::Assert,
            "alloc" => SepRule::Alloc,
            "free" => SepRule::Free,
            "load" => SepRule::Load,
            "store" => SepRule::Store,
            "exists" => SepRule::Exists,
            "frame" => SepRule::Frame,
            "cons" => SepRule::Cons,
            "seq" => SepRule::Seq,
            "choice" => SepRule::Choice,
            "iter" => SepRule::Iter,
            "empty" => SepRule::Empty,
            "disj" => SepRule::Disj,
            "iter0" => SepRule::Iter0,
            "unroll" => SepRule::Unroll,
            _ => return None,
        })
    }
}

impl fmt::Display for SepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Derivation node. Side-condition data (the frame formula, the bound
/// variable of an exists step) is stored explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct SepDerivation {
    pub rule: SepRule,
    pub pre: Asl,
    pub cmd: Command,
    pub post: Asl,
    pub premises: Vec<SepDerivation>,
    pub frame: Option<Asl>,
    pub bound_var: Option<String>,
}

pub type ProofPath = Vec<usize>;

fn path_string(path: &ProofPath) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        format!("root.{}", path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("."))
    }
}

#[derive(Debug, Error)]
pub enum SepProofError {
    #[error("{}: rule {rule} shape mismatch: {message}", path_string(path))]
    Shape { path: ProofPath, rule: SepRule, message: String },
    #[error("{}: rule {rule} side condition failed: {message}", path_string(path))]
    SideCondition { path: ProofPath, rule: SepRule, message: String },
    #[error("{}: rule {rule} entailment failed: {message}", path_string(path))]
    Entailment { path: ProofPath, rule: SepRule, message: String },
    #[error(transparent)]
    Sep(#[from] SepError),
}

#[derive(Debug, Clone)]
pub struct SepVerdict {
    pub valid: bool,
    pub witness: Option<String>,
}

/// Context for checking: the program's variable table (commands index into
/// it) and the bounded universe, whose variable list must start with the
/// program variables.
pub struct SepCtx {
    pub cfg: SepConfig,
    pub prog_vars: Vec<String>,
}

impl SepCtx {
    /// Builds the universe variable list: program variables first, then any
    /// additional free variables of the given formulas.
    pub fn new(
        locations: usize,
        int_max: u64,
        prog_vars: &[String],
        formulas: &[&Asl],
    ) -> Self {
        let mut vars: Vec<String> = prog_vars.to_vec();
        let mut extra: BTreeSet<String> = BTreeSet::new();
        for f in formulas {
            for v in fv_asl(f) {
                if !vars.contains(&v) {
                    extra.insert(v);
                }
            }
        }
        vars.extend(extra);
        SepCtx { cfg: SepConfig::new(locations, int_max, vars), prog_vars: prog_vars.to_vec() }
    }

    fn var_name(&self, id: usize) -> &str {
        &self.prog_vars[id]
    }

    fn mod_names(&self, cmd: &Command) -> BTreeSet<String> {
        mod_vars(cmd).into_iter().map(|v| self.prog_vars[v].clone()).collect()
    }

    fn fv_cmd_names(&self, cmd: &Command) -> BTreeSet<String> {
        crate::syntax::free_vars(cmd).into_iter().map(|v| self.prog_vars[v].clone()).collect()
    }

    /// Universe restricted to the variables the given formulas mention;
    /// satisfaction only reads those, so checks over the restriction agree
    /// with the full universe.
    fn restrict(&self, formulas: &[&Asl]) -> SepConfig {
        let mut used: BTreeSet<String> = BTreeSet::new();
        for f in formulas {
            used.extend(fv_asl(f));
        }
        let vars: Vec<String> =
            self.cfg.vars.iter().filter(|v| used.contains(*v)).cloned().collect();
        SepConfig::new(self.cfg.locations, self.cfg.int_max, vars)
    }
}

/// Bounded validity: every precondition state has some non-error run into
/// the postcondition. The witness, when invalid, is the least failing state
/// in enumeration order.
pub fn check_sep_validity(
    p: &Asl,
    r: &Command,
    q: &Asl,
    ctx: &SepCtx,
) -> Result<SepVerdict, SepError> {
    check_scope(p, &ctx.cfg)?;
    check_scope(q, &ctx.cfg)?;
    ctx.cfg.check_budget()?;
    let mut witness = None;
    let mut states = Vec::new();
    ctx.cfg.enumerate(|st| {
        if sat(p, &ctx.cfg, st) {
            states.push(st.clone());
        }
    });
    for st in states {
        let start: BTreeSet<ExtState> = [ExtState::St(st.clone())].into();
        let outs = fwsem_heap(r, &ctx.cfg, &start);
        let ok = outs.iter().any(|o| match o {
            ExtState::St(next) => sat(q, &ctx.cfg, next),
            ExtState::Err => false,
        });
        if !ok {
            witness = Some(ctx.cfg.describe_state(&st));
            break;
        }
    }
    Ok(SepVerdict { valid: witness.is_none(), witness })
}

/// Does `p` entail `q` at the bounds? Returns a witness state otherwise.
pub fn entails(p: &Asl, q: &Asl, ctx: &SepCtx) -> Result<Option<HeapState>, SepError> {
    check_scope(p, &ctx.cfg)?;
    check_scope(q, &ctx.cfg)?;
    if alpha_eq(p, q) {
        return Ok(None);
    }
    let cfg = ctx.restrict(&[p, q]);
    let mut witness = None;
    cfg.enumerate(|st| {
        if witness.is_none() && sat(p, &cfg, st) && !sat(q, &cfg, st) {
            witness = Some(st.clone());
        }
    });
    Ok(witness)
}

/// Denotational equality of `target` with the disjunction of `parts`.
fn equal_to_union(target: &Asl, parts: &[&Asl], ctx: &SepCtx) -> Result<Option<String>, SepError> {
    check_scope(target, &ctx.cfg)?;
    for p in parts {
        check_scope(p, &ctx.cfg)?;
    }
    if parts.len() == 1 && alpha_eq(target, parts[0]) {
        return Ok(None);
    }
    let mut all = vec![target];
    all.extend(parts.iter().copied());
    let cfg = ctx.restrict(&all);
    let mut diff = None;
    cfg.enumerate(|st| {
        if diff.is_none() {
            let lhs = sat(target, &cfg, st);
            let rhs = parts.iter().any(|p| sat(p, &cfg, st));
            if lhs != rhs {
                diff = Some(format!(
                    "{} state: {}",
                    if lhs { "extra" } else { "missing" },
                    cfg.describe_state(st)
                ));
            }
        }
    });
    Ok(diff)
}

/// Accepts a derivation iff every node instantiates its rule at the bounds.
pub fn check_sep_derivation(d: &SepDerivation, ctx: &SepCtx) -> Result<(), SepProofError> {
    ctx.cfg.check_budget()?;
    let mut path = Vec::new();
    check_node(d, ctx, &mut path)
}

fn shape(path: &ProofPath, rule: SepRule, m: impl Into<String>) -> SepProofError {
    SepProofError::Shape { path: path.clone(), rule, message: m.into() }
}

fn side(path: &ProofPath, rule: SepRule, m: impl Into<String>) -> SepProofError {
    SepProofError::SideCondition { path: path.clone(), rule, message: m.into() }
}

fn check_node(d: &SepDerivation, ctx: &SepCtx, path: &mut ProofPath) -> Result<(), SepProofError> {
    let rule = d.rule;
    let premises = |n: usize| -> Result<(), SepProofError> {
        if d.premises.len() == n {
            Ok(())
        } else {
            Err(shape(path, rule, format!("expected {n} premises, found {}", d.premises.len())))
        }
    };
    let atomic = |expected: &str| -> Result<&AtomicCmd, SepProofError> {
        match &d.cmd {
            Command::Atomic(c) => Ok(c),
            _ => Err(shape(path, rule, format!("command must be {expected}"))),
        }
    };
    let want_alpha = |path: &ProofPath, what: &str, got: &Asl, expected: &Asl| -> Result<(), SepProofError> {
        if alpha_eq(got, expected) {
            Ok(())
        } else {
            Err(side(
                path,
                rule,
                format!("{what} must be `{}`, found `{}`", print_asl(expected), print_asl(got)),
            ))
        }
    };

    match rule {
        SepRule::Skip => {
            premises(0)?;
            if !matches!(atomic("skip")?, AtomicCmd::Skip) {
                return Err(shape(path, rule, "command must be skip"));
            }
            want_alpha(path, "precondition", &d.pre, &Asl::Emp)?;
            want_alpha(path, "postcondition", &d.post, &Asl::Emp)?;
        }
        SepRule::Assign => {
            premises(0)?;
            let (x, a) = match atomic("an assignment")? {
                AtomicCmd::Assign(x, a) => (*x, a.clone()),
                _ => return Err(shape(path, rule, "command must be an assignment")),
            };
            let xname = ctx.var_name(x).to_string();
            let expected = subst(&d.post, &embed_aexp(&a, &ctx.prog_vars), &xname)
                .map_err(|e| side(path, rule, e.to_string()))?;
            want_alpha(path, "precondition", &d.pre, &expected)?;
        }
        SepRule::Assert => {
            premises(0)?;
            let b = match atomic("a guard")? {
                AtomicCmd::Assume(b) => b.clone(),
                _ => return Err(shape(path, rule, "command must be a guard")),
            };
            let expected = Asl::and(d.post.clone(), embed_bexp(&b, &ctx.prog_vars));
            want_alpha(path, "precondition", &d.pre, &expected)?;
        }
        SepRule::Alloc => {
            premises(0)?;
            let x = match atomic("an allocation")? {
                AtomicCmd::Alloc(x) => *x,
                _ => return Err(shape(path, rule, "command must be an allocation")),
            };
            let xname = ctx.var_name(x).to_string();
            // precondition: x = x' (optionally with an explicit empty-heap
            // conjunct) for a fresh x'
            let cmp = match &d.pre {
                Asl::And(l, r) if matches!(**r, Asl::Emp) => &**l,
                other => other,
            };
            let ghost = match cmp {
                Asl::Cmp(crate::syntax::CmpOp::Eq, SExp::Var(a), SExp::Var(b)) if *a == xname => b,
                _ => {
                    return Err(side(
                        path,
                        rule,
                        format!("precondition must equate `{xname}` with a fresh variable"),
                    ))
                }
            };
            if *ghost == xname {
                return Err(side(path, rule, "the equated variable must be fresh".to_string()));
            }
            if fv_asl(&d.post).contains(ghost) {
                return Err(side(
                    path,
                    rule,
                    format!("fresh variable `{ghost}` occurs in the postcondition"),
                ));
            }
            want_alpha(path, "postcondition", &d.post, &Asl::points_somewhere(xname))?;
        }
        SepRule::Free => {
            premises(0)?;
            let x = match atomic("a free")? {
                AtomicCmd::Free(x) => *x,
                _ => return Err(shape(path, rule, "command must be a free")),
            };
            let xname = ctx.var_name(x);
            want_alpha(path, "precondition", &d.pre, &Asl::points_somewhere(xname))?;
            want_alpha(path, "postcondition", &d.post, &Asl::Dangling(xname.to_string()))?;
        }
        SepRule::Store => {
            premises(0)?;
            let (x, y) = match atomic("a heap store")? {
                AtomicCmd::Store(x, y) => (*x, *y),
                _ => return Err(shape(path, rule, "command must be a heap store")),
            };
            let xname = ctx.var_name(x);
            let yname = ctx.var_name(y).to_string();
            want_alpha(path, "precondition", &d.pre, &Asl::points_somewhere(xname))?;
            want_alpha(
                path,
                "postcondition",
                &d.post,
                &Asl::PointsTo(xname.to_string(), SExp::Var(yname)),
            )?;
        }
        SepRule::Load => {
            premises(0)?;
            let (x, y) = match atomic("a heap load")? {
                AtomicCmd::Load(x, y) => (*x, *y),
                _ => return Err(shape(path, rule, "command must be a heap load")),
            };
            if x == y {
                return Err(side(path, rule, "load target and source must differ".to_string()));
            }
            let xname = ctx.var_name(x).to_string();
            let yname = ctx.var_name(y).to_string();
            // postcondition shape: y |-> a * q
            let (a, q) = match &d.post {
                Asl::Sep(l, r) => match &**l {
                    Asl::PointsTo(v, a) if *v == yname => (a.clone(), (**r).clone()),
                    _ => {
                        return Err(shape(
                            path,
                            rule,
                            format!("postcondition must start with `{yname} |-> a`"),
                        ))
                    }
                },
                _ => {
                    return Err(shape(
                        path,
                        rule,
                        format!("postcondition must be `{yname} |-> a * q`"),
                    ))
                }
            };
            let mut a_vars = BTreeSet::new();
            super::asl::collect_sexp_vars(&a, &mut a_vars);
            if a_vars.contains(&xname) {
                return Err(side(
                    path,
                    rule,
                    format!("loaded expression must not mention the target `{xname}`"),
                ));
            }
            let q_sub = subst(&q, &a, &xname).map_err(|e| side(path, rule, e.to_string()))?;
            let expected = Asl::sep(Asl::PointsTo(yname, a), q_sub);
            want_alpha(path, "precondition", &d.pre, &expected)?;
        }
        SepRule::Exists => {
            premises(1)?;
            let x = d
                .bound_var
                .clone()
                .ok_or_else(|| shape(path, rule, "missing bound_var".to_string()))?;
            let p = &d.premises[0];
            if p.cmd != d.cmd {
                return Err(shape(path, rule, "premise command differs from conclusion"));
            }
            if ctx.fv_cmd_names(&d.cmd).contains(&x) {
                return Err(side(path, rule, format!("`{x}` occurs in the command")));
            }
            want_alpha(path, "precondition", &d.pre, &Asl::exists(x.clone(), p.pre.clone()))?;
            want_alpha(path, "postcondition", &d.post, &Asl::exists(x, p.post.clone()))?;
        }
        SepRule::Frame => {
            premises(1)?;
            let t = d
                .frame
                .clone()
                .ok_or_else(|| shape(path, rule, "missing frame formula".to_string()))?;
            let p = &d.premises[0];
            if p.cmd != d.cmd {
                return Err(shape(path, rule, "premise command differs from conclusion"));
            }
            let modified = ctx.mod_names(&d.cmd);
            let clash: Vec<String> =
                fv_asl(&t).into_iter().filter(|v| modified.contains(v)).collect();
            if !clash.is_empty() {
                return Err(side(
                    path,
                    rule,
                    format!("frame mentions modified variables: {}", clash.join(", ")),
                ));
            }
            want_alpha(path, "precondition", &d.pre, &Asl::sep(p.pre.clone(), t.clone()))?;
            want_alpha(path, "postcondition", &d.post, &Asl::sep(p.post.clone(), t))?;
        }
        SepRule::Cons => {
            premises(1)?;
            let p = &d.premises[0];
            if p.cmd != d.cmd {
                return Err(shape(path, rule, "premise command differs from conclusion"));
            }
            if let Some(w) = entails(&d.pre, &p.pre, ctx)? {
                return Err(SepProofError::Entailment {
                    path: path.clone(),
                    rule,
                    message: format!(
                        "`{}` does not entail `{}`; witness {}",
                        print_asl(&d.pre),
                        print_asl(&p.pre),
                        describe_restricted(&w, ctx, &[&d.pre, &p.pre]),
                    ),
                });
            }
            if let Some(w) = entails(&p.post, &d.post, ctx)? {
                return Err(SepProofError::Entailment {
                    path: path.clone(),
                    rule,
                    message: format!(
                        "`{}` does not entail `{}`; witness {}",
                        print_asl(&p.post),
                        print_asl(&d.post),
                        describe_restricted(&w, ctx, &[&p.post, &d.post]),
                    ),
                });
            }
        }
        SepRule::Seq => {
            premises(2)?;
            let (r1, r2) = match &d.cmd {
                Command::Seq(a, b) => ((**a).clone(), (**b).clone()),
                _ => return Err(shape(path, rule, "command is not a sequence")),
            };
            let (p1, p2) = (&d.premises[0], &d.premises[1]);
            if p1.cmd != r1 || p2.cmd != r2 {
                return Err(shape(path, rule, "premise commands do not split the sequence"));
            }
            for (what, a, b) in [
                ("first premise precondition", &p1.pre, &d.pre),
                ("midpoint", &p1.post, &p2.pre),
                ("second premise postcondition", &p2.post, &d.post),
            ] {
                if let Some(diff) = equal_to_union(a, &[b], ctx)? {
                    return Err(side(path, rule, format!("{what}: {diff}")));
                }
            }
        }
        SepRule::Choice => {
            premises(2)?;
            let (r1, r2) = match &d.cmd {
                Command::Choice(a, b) => ((**a).clone(), (**b).clone()),
                _ => return Err(shape(path, rule, "command is not a choice")),
            };
            let (p1, p2) = (&d.premises[0], &d.premises[1]);
            if p1.cmd != r1 || p2.cmd != r2 {
                return Err(shape(path, rule, "premise commands do not match the branches"));
            }
            for (what, a, b) in
                [("first branch postcondition", &p1.post, &d.post), ("second branch postcondition", &p2.post, &d.post)]
            {
                if let Some(diff) = equal_to_union(a, &[b], ctx)? {
                    return Err(side(path, rule, format!("{what}: {diff}")));
                }
            }
            if let Some(diff) = equal_to_union(&d.pre, &[&p1.pre, &p2.pre], ctx)? {
                return Err(side(path, rule, format!("precondition (branch disjunction): {diff}")));
            }
        }
        SepRule::Iter => {
            let body = match &d.cmd {
                Command::Star(b) => (**b).clone(),
                _ => return Err(shape(path, rule, "command is not an iteration")),
            };
            let mut parts: Vec<&Asl> = vec![&d.post];
            let mut prev: Option<&Asl> = None;
            for (n, p) in d.premises.iter().enumerate() {
                if p.cmd != body {
                    return Err(shape(path, rule, format!("premise {n} is not about the loop body")));
                }
                let expected_post = prev.unwrap_or(&d.post);
                if let Some(diff) = equal_to_union(&p.post, &[expected_post], ctx)? {
                    return Err(side(path, rule, format!("premise {n} postcondition (chain): {diff}")));
                }
                parts.push(&p.pre);
                prev = Some(&p.pre);
            }
            if let Some(diff) = equal_to_union(&d.pre, &parts, ctx)? {
                return Err(side(path, rule, format!("precondition (union of the chain): {diff}")));
            }
        }
        SepRule::Empty => {
            premises(0)?;
            if let Some(diff) = equal_to_union(&d.pre, &[&Asl::False], ctx)? {
                return Err(side(path, rule, format!("precondition must be unsatisfiable: {diff}")));
            }
        }
        SepRule::Disj => {
            premises(2)?;
            let (p1, p2) = (&d.premises[0], &d.premises[1]);
            if p1.cmd != d.cmd || p2.cmd != d.cmd {
                return Err(shape(path, rule, "premise commands differ from conclusion"));
            }
            if let Some(diff) = equal_to_union(&d.pre, &[&p1.pre, &p2.pre], ctx)? {
                return Err(side(path, rule, format!("precondition: {diff}")));
            }
            if let Some(diff) = equal_to_union(&d.post, &[&p1.post, &p2.post], ctx)? {
                return Err(side(path, rule, format!("postcondition: {diff}")));
            }
        }
        SepRule::Iter0 => {
            premises(0)?;
            if !matches!(d.cmd, Command::Star(_)) {
                return Err(shape(path, rule, "command is not an iteration"));
            }
            if let Some(diff) = equal_to_union(&d.pre, &[&d.post], ctx)? {
                return Err(side(path, rule, format!("precondition must equal postcondition: {diff}")));
            }
        }
        SepRule::Unroll => {
            premises(1)?;
            let body = match &d.cmd {
                Command::Star(b) => (**b).clone(),
                _ => return Err(shape(path, rule, "command is not an iteration")),
            };
            let p = &d.premises[0];
            if p.cmd != Command::seq(d.cmd.clone(), body) {
                return Err(shape(path, rule, "premise command must be star(r); r"));
            }
            for (what, a, b) in [("precondition", &p.pre, &d.pre), ("postcondition", &p.post, &d.post)] {
                if let Some(diff) = equal_to_union(a, &[b], ctx)? {
                    return Err(side(path, rule, format!("{what}: {diff}")));
                }
            }
        }
    }

    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, ctx, &mut *path)?;
        path.pop();
    }
    Ok(())
}

fn describe_restricted(w: &HeapState, ctx: &SepCtx, formulas: &[&Asl]) -> String {
    ctx.restrict(formulas).describe_state(w)
}

// ---- interchange format ----

#[derive(Serialize, Deserialize)]
struct SepDoc {
    rule: String,
    pre: String,
    cmd: String,
    post: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<SepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound_var: Option<String>,
}

#[derive(Debug, Error)]
pub enum SepFormatError {
    #[error("malformed derivation document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown rule id `{0}`")]
    UnknownRule(String),
    #[error("in field `cmd`: {0}")]
    Cmd(#[from] ParseError),
    #[error("in an assertion field: {0}")]
    Assertion(#[from] super::asl::AslParseError),
}

fn to_doc(d: &SepDerivation, vars: &[String]) -> SepDoc {
    SepDoc {
        rule: d.rule.id().to_string(),
        pre: print_asl(&d.pre),
        cmd: print_command(&d.cmd, vars),
        post: print_asl(&d.post),
        premises: d.premises.iter().map(|p| to_doc(p, vars)).collect(),
        frame: d.frame.as_ref().map(print_asl),
        bound_var: d.bound_var.clone(),
    }
}

pub fn encode_sep_derivation(d: &SepDerivation, prog_vars: &[String]) -> String {
    serde_json::to_string_pretty(&to_doc(d, prog_vars)).expect("serialization cannot fail")
}

fn from_doc(doc: &SepDoc, prog_vars: &[String]) -> Result<SepDerivation, SepFormatError> {
    let rule =
        SepRule::from_id(&doc.rule).ok_or_else(|| SepFormatError::UnknownRule(doc.rule.clone()))?;
    Ok(SepDerivation {
        rule,
        pre: parse_asl(&doc.pre)?,
        cmd: parse_command(&doc.cmd, prog_vars, true)?,
        post: parse_asl(&doc.post)?,
        premises: doc.premises.iter().map(|p| from_doc(p, prog_vars)).collect::<Result<_, _>>()?,
        frame: doc.frame.as_deref().map(parse_asl).transpose()?,
        bound_var: doc.bound_var.clone(),
    })
}

pub fn decode_sep_derivation(
    json: &str,
    prog_vars: &[String],
) -> Result<SepDerivation, SepFormatError> {
    let doc: SepDoc = serde_json::from_str(json)?;
    from_doc(&doc, prog_vars)
}

/// All assertion formulas appearing anywhere in a derivation, for universe
/// assembly.
pub fn derivation_formulas(d: &SepDerivation) -> Vec<&Asl> {
    let mut out = vec![&d.pre, &d.post];
    if let Some(t) = &d.frame {
        out.push(t);
    }
    for p in &d.premises {
        out.extend(derivation_formulas(p));
    }
    out
}
