//! Checkable derivation trees for SIL and a completeness-based synthesizer.
//!
//! The checker is purely local: each node must instantiate its rule, and
//! nothing else is verified. The iteration rule is finitely truncated: a
//! node for `r*` carries premises concluding `<Q_{n+1}> r <Q_n>` for
//! `n = 0..N-1` and the conclusion precondition is the union of all the
//! `Q_n`; the missing infinite tail is the constant empty set, which the
//! empty rule proves for any command, so truncation loses nothing.

use crate::describe::render_exact;
use crate::semantics::{bwsem, DomainConfig, SemError, StateSet};
use crate::syntax::{parse_bexp, parse_command, print_command, Command, ParseError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SilRule {
    Atom,
    Cons,
    Seq,
    Choice,
    Iter,
    Empty,
    Disj,
    Iter0,
    Unroll,
    UnrollSplit,
}

impl SilRule {
    pub fn id(&self) -> &'static str {
        match self {
            SilRule::Atom => "atom",
            SilRule::Cons => "cons",
            SilRule::Seq => "seq",
            SilRule::Choice => "choice",
            SilRule::Iter => "iter",
            SilRule::Empty => "empty",
            SilRule::Disj => "disj",
            SilRule::Iter0 => "iter0",
            SilRule::Unroll => "unroll",
            SilRule::UnrollSplit => "unroll_split",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        Some(match s {
            "atom" => SilRule::Atom,
            "cons" => SilRule::Cons,
            "seq" => SilRule::Seq,
            "choice" => SilRule::Choice,
            "iter" => SilRule::Iter,
            "empty" => SilRule::Empty,
            "disj" => SilRule::Disj,
            "iter0" => SilRule::Iter0,
            "unroll" => SilRule::Unroll,
            "unroll_split" => SilRule::UnrollSplit,
            _ => return None,
        })
    }
}

impl fmt::Display for SilRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// A rule-labelled proof tree. Every node carries its full conclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub rule: SilRule,
    pub pre: StateSet,
    pub cmd: Command,
    pub post: StateSet,
    pub premises: Vec<Derivation>,
}

/// Path from the root: indices into `premises` at each level.
pub type ProofPath = Vec<usize>;

fn path_string(path: &ProofPath) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        format!("root.{}", path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("."))
    }
}

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("{}: rule {rule} shape mismatch: {message}", path_string(path))]
    Shape { path: ProofPath, rule: SilRule, message: String },
    #[error("{}: rule {rule} side condition failed: {message}", path_string(path))]
    SideCondition { path: ProofPath, rule: SilRule, message: String },
    #[error(transparent)]
    Sem(#[from] SemError),
}

/// Difference report for two sets that should have matched.
fn diff_report(dom: &DomainConfig, label: &str, got: &StateSet, expected: &StateSet) -> String {
    let missing: Vec<String> =
        expected.difference(got).iter().take(3).map(|id| format!("[{}]", dom.store_string(id))).collect();
    let extra: Vec<String> =
        got.difference(expected).iter().take(3).map(|id| format!("[{}]", dom.store_string(id))).collect();
    let mut msg = format!("{label} differs from the required set");
    if !missing.is_empty() {
        msg.push_str(&format!("; missing e.g. {}", missing.join(", ")));
    }
    if !extra.is_empty() {
        msg.push_str(&format!("; extra e.g. {}", extra.join(", ")));
    }
    msg
}

/// Accepts a derivation iff every node is a correct instance of its rule.
pub fn check_derivation(d: &Derivation, dom: &Arc<DomainConfig>) -> Result<(), ProofError> {
    let mut path = Vec::new();
    check_node(d, dom, &mut path)
}

fn shape(path: &ProofPath, rule: SilRule, message: impl Into<String>) -> ProofError {
    ProofError::Shape { path: path.clone(), rule, message: message.into() }
}

fn side(path: &ProofPath, rule: SilRule, message: impl Into<String>) -> ProofError {
    ProofError::SideCondition { path: path.clone(), rule, message: message.into() }
}

fn check_node(d: &Derivation, dom: &Arc<DomainConfig>, path: &mut ProofPath) -> Result<(), ProofError> {
    let rule = d.rule;
    let expect_premises = |n: usize| -> Result<(), ProofError> {
        if d.premises.len() == n {
            Ok(())
        } else {
            Err(shape(path, rule, format!("expected {n} premises, found {}", d.premises.len())))
        }
    };

    match rule {
        SilRule::Atom => {
            expect_premises(0)?;
            let c = match &d.cmd {
                Command::Atomic(_) => &d.cmd,
                _ => return Err(shape(path, rule, "command is not atomic")),
            };
            let expected = bwsem(c, dom, &d.post)?;
            if d.pre != expected {
                return Err(side(path, rule, diff_report(dom, "precondition", &d.pre, &expected)));
            }
        }
        SilRule::Cons => {
            expect_premises(1)?;
            let p = &d.premises[0];
            if p.cmd != d.cmd {
                return Err(shape(path, rule, "premise command differs from conclusion"));
            }
            if !d.pre.is_subset(&p.pre) {
                return Err(side(path, rule, diff_report(dom, "precondition (must shrink)", &d.pre, &d.pre.intersect(&p.pre))));
            }
            if !p.post.is_subset(&d.post) {
                return Err(side(path, rule, diff_report(dom, "postcondition (must grow)", &d.post, &d.post.union(&p.post))));
            }
        }
        SilRule::Seq => {
            expect_premises(2)?;
            let (r1, r2) = match &d.cmd {
                Command::Seq(a, b) => (&**a, &**b),
                _ => return Err(shape(path, rule, "command is not a sequence")),
            };
            let (p1, p2) = (&d.premises[0], &d.premises[1]);
            if p1.cmd != *r1 || p2.cmd != *r2 {
                return Err(shape(path, rule, "premise commands do not split the sequence"));
            }
            if p1.pre != d.pre {
                return Err(side(path, rule, diff_report(dom, "first premise precondition", &p1.pre, &d.pre)));
            }
            if p1.post != p2.pre {
                return Err(side(path, rule, diff_report(dom, "midpoint", &p2.pre, &p1.post)));
            }
            if p2.post != d.post {
                return Err(side(path, rule, diff_report(dom, "second premise postcondition", &p2.post, &d.post)));
            }
        }
        SilRule::Choice => {
            expect_premises(2)?;
            let (r1, r2) = match &d.cmd {
                Command::Choice(a, b) => (&**a, &**b),
                _ => return Err(shape(path, rule, "command is not a choice")),
            };
            let (p1, p2) = (&d.premises[0], &d.premises[1]);
            if p1.cmd != *r1 || p2.cmd != *r2 {
                return Err(shape(path, rule, "premise commands do not match the branches"));
            }
            if p1.post != d.post || p2.post != d.post {
                return Err(side(path, rule, "premise postconditions must equal the conclusion's".to_string()));
            }
            let union = p1.pre.union(&p2.pre);
            if d.pre != union {
                return Err(side(path, rule, diff_report(dom, "precondition (union of branches)", &d.pre, &union)));
            }
        }
        SilRule::Iter => {
            let body = match &d.cmd {
                Command::Star(b) => &**b,
                _ => return Err(shape(path, rule, "command is not an iteration")),
            };
            // premises chain downward: premise n concludes <Q_{n+1}> r <Q_n>
            let mut union = d.post.clone();
            let mut prev_pre: Option<&StateSet> = None;
            for (n, p) in d.premises.iter().enumerate() {
                if p.cmd != *body {
                    return Err(shape(path, rule, format!("premise {n} is not about the loop body")));
                }
                let expected_post = prev_pre.unwrap_or(&d.post);
                if &p.post != expected_post {
                    return Err(side(path, rule, diff_report(dom, &format!("premise {n} postcondition (chain)"), &p.post, expected_post)));
                }
                union = union.union(&p.pre);
                prev_pre = Some(&p.pre);
            }
            if d.pre != union {
                return Err(side(path, rule, diff_report(dom, "precondition (union of the chain)", &d.pre, &union)));
            }
        }
        SilRule::Empty => {
            expect_premises(0)?;
            if !d.pre.is_empty() {
                return Err(side(path, rule, "precondition must be empty".to_string()));
            }
        }
        SilRule::Disj => {
            expect_premises(2)?;
            let (p1, p2) = (&d.premises[0], &d.premises[1]);
            if p1.cmd != d.cmd || p2.cmd != d.cmd {
                return Err(shape(path, rule, "premise commands differ from conclusion"));
            }
            let pre = p1.pre.union(&p2.pre);
            let post = p1.post.union(&p2.post);
            if d.pre != pre {
                return Err(side(path, rule, diff_report(dom, "precondition (componentwise union)", &d.pre, &pre)));
            }
            if d.post != post {
                return Err(side(path, rule, diff_report(dom, "postcondition (componentwise union)", &d.post, &post)));
            }
        }
        SilRule::Iter0 => {
            expect_premises(0)?;
            if !matches!(d.cmd, Command::Star(_)) {
                return Err(shape(path, rule, "command is not an iteration"));
            }
            if d.pre != d.post {
                return Err(side(path, rule, diff_report(dom, "precondition (must equal postcondition)", &d.pre, &d.post)));
            }
        }
        SilRule::Unroll => {
            expect_premises(1)?;
            let body = match &d.cmd {
                Command::Star(b) => (**b).clone(),
                _ => return Err(shape(path, rule, "command is not an iteration")),
            };
            let p = &d.premises[0];
            let unrolled = Command::seq(d.cmd.clone(), body);
            if p.cmd != unrolled {
                return Err(shape(path, rule, "premise command must be star(r); r"));
            }
            if p.pre != d.pre || p.post != d.post {
                return Err(side(path, rule, "premise must share the conclusion's pre and post".to_string()));
            }
        }
        SilRule::UnrollSplit => {
            expect_premises(1)?;
            let body = match &d.cmd {
                Command::Star(b) => (**b).clone(),
                _ => return Err(shape(path, rule, "command is not an iteration")),
            };
            let p = &d.premises[0];
            let unrolled = Command::seq(d.cmd.clone(), body);
            if p.cmd != unrolled {
                return Err(shape(path, rule, "premise command must be star(r); r"));
            }
            // conclusion is <P u Q2> r* <Q1 u Q2> for some Q2, where the
            // premise concludes <P> star(r);r <Q1>; existence of Q2 is
            // equivalent to these four inclusions
            if !p.pre.is_subset(&d.pre) {
                return Err(side(path, rule, "premise precondition must be contained in the conclusion's".to_string()));
            }
            if !p.post.is_subset(&d.post) {
                return Err(side(path, rule, "premise postcondition must be contained in the conclusion's".to_string()));
            }
            if !d.pre.difference(&p.pre).is_subset(&d.post) {
                return Err(side(path, rule, "the split part of the precondition must appear in the postcondition".to_string()));
            }
            if !d.post.difference(&p.post).is_subset(&d.pre) {
                return Err(side(path, rule, "the split part of the postcondition must appear in the precondition".to_string()));
            }
        }
    }

    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, dom, path)?;
        path.pop();
    }
    Ok(())
}

/// Builds a derivation of `<bwsem(r, Q)> r <Q>` by structural induction:
/// atoms use the atom rule, sequences chain through the backward midpoint,
/// choices union branch preconditions, and stars use the truncated iteration
/// with `Q_n = bwsem^n(Q)` cut at the first stable cumulative union.
pub fn synthesize_derivation(
    r: &Command,
    dom: &Arc<DomainConfig>,
    q: &StateSet,
) -> Result<Derivation, SemError> {
    Ok(match r {
        Command::Atomic(_) => Derivation {
            rule: SilRule::Atom,
            pre: bwsem(r, dom, q)?,
            cmd: r.clone(),
            post: q.clone(),
            premises: Vec::new(),
        },
        Command::Seq(r1, r2) => {
            let d2 = synthesize_derivation(r2, dom, q)?;
            let d1 = synthesize_derivation(r1, dom, &d2.pre)?;
            Derivation {
                rule: SilRule::Seq,
                pre: d1.pre.clone(),
                cmd: r.clone(),
                post: q.clone(),
                premises: vec![d1, d2],
            }
        }
        Command::Choice(r1, r2) => {
            let d1 = synthesize_derivation(r1, dom, q)?;
            let d2 = synthesize_derivation(r2, dom, q)?;
            Derivation {
                rule: SilRule::Choice,
                pre: d1.pre.union(&d2.pre),
                cmd: r.clone(),
                post: q.clone(),
                premises: vec![d1, d2],
            }
        }
        Command::Star(body) => {
            let mut premises = Vec::new();
            let mut union = q.clone();
            let mut level = q.clone();
            loop {
                let next = bwsem(body, dom, &level)?;
                if next.is_subset(&union) {
                    break;
                }
                let premise = synthesize_derivation(body, dom, &level)?;
                debug_assert_eq!(premise.pre, next);
                union.union_with(&next);
                premises.push(premise);
                level = next;
            }
            Derivation {
                rule: SilRule::Iter,
                pre: union,
                cmd: r.clone(),
                post: q.clone(),
                premises,
            }
        }
    })
}

/// If `<p> r <q>` is valid, returns a checkable derivation for it (the
/// synthesized weakest derivation weakened by one consequence step);
/// otherwise `None`.
pub fn derive_then_weaken(
    r: &Command,
    dom: &Arc<DomainConfig>,
    p: &StateSet,
    q: &StateSet,
) -> Result<Option<Derivation>, SemError> {
    if p.is_empty() {
        return Ok(Some(Derivation {
            rule: SilRule::Empty,
            pre: p.clone(),
            cmd: r.clone(),
            post: q.clone(),
            premises: Vec::new(),
        }));
    }
    let weakest = bwsem(r, dom, q)?;
    if !p.is_subset(&weakest) {
        return Ok(None);
    }
    let inner = synthesize_derivation(r, dom, q)?;
    Ok(Some(Derivation {
        rule: SilRule::Cons,
        pre: p.clone(),
        cmd: r.clone(),
        post: q.clone(),
        premises: vec![inner],
    }))
}

// ---- interchange format ----

#[derive(Serialize, Deserialize)]
struct DerivationDoc {
    rule: String,
    pre: String,
    cmd: String,
    post: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<DerivationDoc>,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed derivation document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown rule id `{0}`")]
    UnknownRule(String),
    #[error("in field `{field}`: {source}")]
    Field {
        field: String,
        #[source]
        source: ParseError,
    },
}

fn to_doc(d: &Derivation, vars: &[String]) -> DerivationDoc {
    DerivationDoc {
        rule: d.rule.id().to_string(),
        pre: render_exact(&d.pre),
        cmd: print_command(&d.cmd, vars),
        post: render_exact(&d.post),
        premises: d.premises.iter().map(|p| to_doc(p, vars)).collect(),
    }
}

/// Serializes a derivation; assertions become predicate strings that
/// reparse to exactly the same sets.
pub fn encode_derivation(d: &Derivation, vars: &[String]) -> String {
    serde_json::to_string_pretty(&to_doc(d, vars)).expect("derivation serialization cannot fail")
}

fn from_doc(
    doc: &DerivationDoc,
    vars: &[String],
    dom: &Arc<DomainConfig>,
) -> Result<Derivation, FormatError> {
    let rule = SilRule::from_id(&doc.rule).ok_or_else(|| FormatError::UnknownRule(doc.rule.clone()))?;
    let field = |field: &str, e: ParseError| FormatError::Field { field: field.to_string(), source: e };
    let pre = parse_bexp(&doc.pre, vars).map_err(|e| field("pre", e))?;
    let post = parse_bexp(&doc.post, vars).map_err(|e| field("post", e))?;
    let cmd = parse_command(&doc.cmd, vars, false).map_err(|e| field("cmd", e))?;
    let premises = doc
        .premises
        .iter()
        .map(|p| from_doc(p, vars, dom))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Derivation {
        rule,
        pre: StateSet::from_bexp(dom, &pre),
        cmd,
        post: StateSet::from_bexp(dom, &post),
        premises,
    })
}

/// Reads the interchange format; assertions are elaborated to state sets
/// under the given domain.
pub fn decode_derivation(
    json: &str,
    vars: &[String],
    dom: &Arc<DomainConfig>,
) -> Result<Derivation, FormatError> {
    let doc: DerivationDoc = serde_json::from_str(json)?;
    from_doc(&doc, vars, dom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_bexp, parse_program};

    fn fixture(src: &str, modulus: u64) -> (Command, Vec<String>, Arc<DomainConfig>) {
        let p = parse_program(src).unwrap();
        let dom = DomainConfig::new(modulus, p.vars.clone()).unwrap();
        (p.body, p.vars, dom)
    }

    fn set(dom: &Arc<DomainConfig>, vars: &[String], pred: &str) -> StateSet {
        StateSet::from_bexp(dom, &parse_bexp(pred, vars).unwrap())
    }

    #[test]
    fn synthesize_skip_is_single_atom() {
        let (cmd, vars, dom) = fixture("vars x; skip", 8);
        let q = set(&dom, &vars, "x = 3");
        let d = synthesize_derivation(&cmd, &dom, &q).unwrap();
        assert_eq!(d.rule, SilRule::Atom);
        assert_eq!(d.pre, q);
        check_derivation(&d, &dom).unwrap();
    }

    #[test]
    fn empty_precondition_uses_the_empty_rule() {
        let (cmd, vars, dom) = fixture("vars x; x := 1", 8);
        let d = derive_then_weaken(&cmd, &dom, &StateSet::empty(&dom), &set(&dom, &vars, "x = 0"))
            .unwrap()
            .unwrap();
        assert_eq!(d.rule, SilRule::Empty);
        check_derivation(&d, &dom).unwrap();
    }

    #[test]
    fn invalid_triple_yields_no_derivation() {
        let (cmd, vars, dom) = fixture("vars x; x := 1", 8);
        let out =
            derive_then_weaken(&cmd, &dom, &set(&dom, &vars, "true"), &set(&dom, &vars, "x = 0")).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn cons_direction_violation_is_rejected_with_path() {
        let (cmd, vars, dom) = fixture("vars x; x := 1", 8);
        let q = set(&dom, &vars, "x = 1");
        let inner = synthesize_derivation(&cmd, &dom, &q).unwrap();
        // grow instead of shrink: pre strictly larger than the premise's
        let bad = Derivation {
            rule: SilRule::Cons,
            pre: StateSet::full(&dom),
            cmd: cmd.clone(),
            post: q.clone(),
            premises: vec![Derivation { pre: set(&dom, &vars, "x = 0"), ..inner }],
        };
        let err = check_derivation(&bad, &dom).unwrap_err();
        match err {
            ProofError::SideCondition { path, rule, .. } => {
                assert_eq!(rule, SilRule::Cons);
                assert!(path.is_empty());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn iter_with_no_premises_equals_iter0() {
        let (cmd, vars, dom) = fixture("vars x; ((x > 0)?)*", 8);
        let q = set(&dom, &vars, "x = 0");
        // bwsem of the guard keeps shrinking below q, so the chain stops at once
        let d = synthesize_derivation(&cmd, &dom, &q).unwrap();
        assert_eq!(d.rule, SilRule::Iter);
        assert!(d.premises.is_empty());
        assert_eq!(d.pre, d.post);
        check_derivation(&d, &dom).unwrap();

        let iter0 = Derivation { rule: SilRule::Iter0, ..d };
        check_derivation(&iter0, &dom).unwrap();
    }

    #[test]
    fn format_roundtrip() {
        let (cmd, vars, dom) =
            fixture("vars x, y; while (x < 3) { (x := x + 1 [+] y := y + x) }", 4);
        let q = set(&dom, &vars, "y = 2");
        let d = synthesize_derivation(&cmd, &dom, &q).unwrap();
        check_derivation(&d, &dom).unwrap();
        let encoded = encode_derivation(&d, &vars);
        let back = decode_derivation(&encoded, &vars, &dom).unwrap();
        assert_eq!(back, d);
    }
}
