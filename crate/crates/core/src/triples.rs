//! Validity of the four triple forms, with concrete witnesses on failure.
//!
//! Over sets of states the four conditions are plain inclusions:
//!
//! * HL: `fwsem(r, P)` inside `Q` (forward over-approximation)
//! * IL: `fwsem(r, P)` covers `Q` (forward under-approximation)
//! * NC: `bwsem(r, Q)` inside `P` (backward over-approximation)
//! * SIL: `bwsem(r, Q)` covers `P` (backward under-approximation)
//!
//! SIL is additionally re-checked in its for-all/exists form (every
//! precondition state has at least one run into the postcondition); the two
//! routes must agree and disagreement panics, since it would mean the
//! semantics itself is broken.

use crate::semantics::{
    bwsem, fwsem, fwsem_states, has_run_into, DomainConfig, SemError, StateSet,
};
use crate::syntax::Command;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    Hl,
    Il,
    Nc,
    Sil,
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Logic::Hl => "HL",
            Logic::Il => "IL",
            Logic::Nc => "NC",
            Logic::Sil => "SIL",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Logic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hl" => Ok(Logic::Hl),
            "il" => Ok(Logic::Il),
            "nc" => Ok(Logic::Nc),
            "sil" => Ok(Logic::Sil),
            other => Err(format!("unknown logic `{other}` (expected hl, il, nc or sil)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Triple {
    pub logic: Logic,
    pub pre: StateSet,
    pub cmd: Command,
    pub post: StateSet,
}

/// Counterexample witness; the stores involved depend on the logic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A precondition state with no run into the postcondition (SIL).
    SilStuck { start: u32 },
    /// A precondition state together with a reachable state outside the
    /// postcondition (HL).
    HlEscape { start: u32, end: u32 },
    /// A postcondition state not reachable from the precondition (IL).
    IlUnreachable { end: u32 },
    /// A state that can reach the postcondition but is outside the
    /// precondition (NC).
    NcMissed { start: u32 },
}

impl Witness {
    pub fn describe(&self, dom: &DomainConfig) -> String {
        match self {
            Witness::SilStuck { start } => format!(
                "state [{}] satisfies the precondition but has no run into the postcondition",
                dom.store_string(*start)
            ),
            Witness::HlEscape { start, end } => format!(
                "state [{}] has a run ending in [{}], which is outside the postcondition",
                dom.store_string(*start),
                dom.store_string(*end)
            ),
            Witness::IlUnreachable { end } => format!(
                "postcondition state [{}] is not reachable from the precondition",
                dom.store_string(*end)
            ),
            Witness::NcMissed { start } => format!(
                "state [{}] can reach the postcondition but is outside the precondition",
                dom.store_string(*start)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Error)]
pub enum TripleError {
    #[error("pre/post sets use a different domain than the check configuration")]
    ConfigMismatch,
    #[error(transparent)]
    Sem(#[from] SemError),
}

/// Decide validity per the inclusion for the triple's logic. Witnesses are
/// deterministic: always the least state in the mixed-radix store order.
pub fn check_validity(t: &Triple, dom: &Arc<DomainConfig>) -> Result<Verdict, TripleError> {
    if !t.pre.domain().compatible(dom) || !t.post.domain().compatible(dom) {
        return Err(TripleError::ConfigMismatch);
    }
    match t.logic {
        Logic::Hl => {
            let image = fwsem(&t.cmd, dom, &t.pre)?;
            if image.is_subset(&t.post) {
                return Ok(Verdict { valid: true, witness: None });
            }
            // least pre-state with an escaping run, then its least escape
            let escapes = t.post.complement();
            for start in t.pre.iter() {
                if has_run_into(&t.cmd, dom, start, &escapes)? {
                    let outs = fwsem_states(&t.cmd, dom, &BTreeSet::from([start]))?;
                    let end = outs.iter().copied().find(|id| !t.post.contains(*id)).unwrap();
                    return Ok(Verdict {
                        valid: false,
                        witness: Some(Witness::HlEscape { start, end }),
                    });
                }
            }
            unreachable!("image escaped the post but no member state did");
        }
        Logic::Il => {
            let image = fwsem(&t.cmd, dom, &t.pre)?;
            if t.post.is_subset(&image) {
                Ok(Verdict { valid: true, witness: None })
            } else {
                let end = t.post.difference(&image).min_elem().unwrap();
                Ok(Verdict { valid: false, witness: Some(Witness::IlUnreachable { end }) })
            }
        }
        Logic::Nc => {
            let back = bwsem(&t.cmd, dom, &t.post)?;
            if back.is_subset(&t.pre) {
                Ok(Verdict { valid: true, witness: None })
            } else {
                let start = back.difference(&t.pre).min_elem().unwrap();
                Ok(Verdict { valid: false, witness: Some(Witness::NcMissed { start }) })
            }
        }
        Logic::Sil => {
            let back = bwsem(&t.cmd, dom, &t.post)?;
            let by_inclusion = t.pre.is_subset(&back);

            // independent route: every pre-state has some run into the post
            let mut by_runs = true;
            for start in t.pre.iter() {
                if !has_run_into(&t.cmd, dom, start, &t.post)? {
                    by_runs = false;
                    break;
                }
            }
            assert_eq!(
                by_inclusion, by_runs,
                "backward inclusion and forall/exists characterizations disagree"
            );

            if by_inclusion {
                Ok(Verdict { valid: true, witness: None })
            } else {
                let start = t.pre.difference(&back).min_elem().unwrap();
                Ok(Verdict { valid: false, witness: Some(Witness::SilStuck { start }) })
            }
        }
    }
}

/// The weakest SIL precondition for `q`: exactly the backward semantics.
/// Every valid SIL precondition is contained in it, and it is itself valid.
pub fn weakest_sil_pre(
    r: &Command,
    dom: &Arc<DomainConfig>,
    q: &StateSet,
) -> Result<StateSet, SemError> {
    bwsem(r, dom, q)
}

/// Weakest liberal precondition: the largest `P` with `fwsem(r, P)` inside
/// `q`; the complement of the backward image of the complement.
pub fn wlp(r: &Command, dom: &Arc<DomainConfig>, q: &StateSet) -> Result<StateSet, SemError> {
    Ok(bwsem(r, dom, &q.complement())?.complement())
}

/// The largest `Q` whose backward image stays inside `p`.
pub fn weakest_nc_post(
    r: &Command,
    dom: &Arc<DomainConfig>,
    p: &StateSet,
) -> Result<StateSet, SemError> {
    Ok(fwsem(r, dom, &p.complement())?.complement())
}

/// Manifest error check: the SIL triple with an unrestricted precondition.
pub fn is_manifest_error(
    r: &Command,
    dom: &Arc<DomainConfig>,
    q: &StateSet,
) -> Result<Verdict, TripleError> {
    check_validity(
        &Triple { logic: Logic::Sil, pre: StateSet::full(dom), cmd: r.clone(), post: q.clone() },
        dom,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_bexp, parse_program, Program};

    fn setup(src: &str, modulus: u64) -> (Program, Arc<DomainConfig>) {
        let p = parse_program(src).unwrap();
        let dom = DomainConfig::new(modulus, p.vars.clone()).unwrap();
        (p, dom)
    }

    fn set(dom: &Arc<DomainConfig>, pred: &str, p: &Program) -> StateSet {
        StateSet::from_bexp(dom, &parse_bexp(pred, &p.vars).unwrap())
    }

    fn verdict(logic: Logic, p: &Program, dom: &Arc<DomainConfig>, pre: &str, post: &str) -> Verdict {
        check_validity(
            &Triple {
                logic,
                pre: set(dom, pre, p),
                cmd: p.body.clone(),
                post: set(dom, post, p),
            },
            dom,
        )
        .unwrap()
    }

    #[test]
    fn wlp_of_skip_is_identity() {
        let (p, dom) = setup("vars x; skip", 8);
        let q = set(&dom, "x > 2", &p);
        assert_eq!(wlp(&p.body, &dom, &q).unwrap(), q);
    }

    #[test]
    fn weakest_nc_post_cases() {
        let (p, dom) = setup("vars x; skip", 8);
        let s = set(&dom, "x = 3", &p);
        assert_eq!(weakest_nc_post(&p.body, &dom, &s).unwrap(), s);

        // for x := 1, any postcondition containing the x=1 states pulls in
        // the whole space backward, so the weakest NC post for P = (x=1)
        // is everything except x=1
        let (p1, dom1) = setup("vars x; x := 1", 8);
        let w = weakest_nc_post(&p1.body, &dom1, &set(&dom1, "x = 1", &p1)).unwrap();
        assert_eq!(w, set(&dom1, "x != 1", &p1));
        assert!(verdict(Logic::Nc, &p1, &dom1, "x = 1", "x != 1").valid);
        // maximality: adding any x=1 state breaks it
        assert!(!verdict(Logic::Nc, &p1, &dom1, "x = 1", "true").valid);

        let full = StateSet::full(&dom1);
        assert_eq!(weakest_nc_post(&p1.body, &dom1, &full).unwrap(), StateSet::full(&dom1));
    }

    #[test]
    fn weakest_sil_pre_of_empty_is_empty() {
        let (p, dom) = setup("vars x; x := nondet()", 8);
        let empty = StateSet::empty(&dom);
        assert!(weakest_sil_pre(&p.body, &dom, &empty).unwrap().is_empty());
    }

    #[test]
    fn nondet_assignment_conj_breaks() {
        // two valid SIL triples whose pointwise intersection is invalid
        let (p, dom) = setup("vars x; x := nondet()", 16);
        assert!(verdict(Logic::Sil, &p, &dom, "x = 1", "x = 0").valid);
        assert!(verdict(Logic::Sil, &p, &dom, "x = 1", "x = 10").valid);
        assert!(!verdict(Logic::Sil, &p, &dom, "x = 1", "false").valid);
    }

    #[test]
    fn witnesses_are_least_states() {
        let (p, dom) = setup("vars x; x := 1", 8);
        let v = verdict(Logic::Il, &p, &dom, "true", "x != 1");
        assert!(!v.valid);
        // least state of x != 1 is x=0
        assert_eq!(v.witness, Some(Witness::IlUnreachable { end: dom.encode(&[0]) }));

        let v = verdict(Logic::Nc, &p, &dom, "x = 2", "x = 1");
        assert!(!v.valid);
        assert_eq!(v.witness, Some(Witness::NcMissed { start: dom.encode(&[0]) }));
    }

    #[test]
    fn manifest_error_trivial_case() {
        let (p, dom) = setup("vars x; skip", 4);
        let v = is_manifest_error(&p.body, &dom, &StateSet::full(&dom)).unwrap();
        assert!(v.valid);
    }
}
