//! Forward and backward collecting semantics.
//!
//! One driver handles both the dense bit-set representation (whole-set
//! queries) and a sorted sparse representation (used to run many singleton
//! queries, e.g. when building the transition relation). Star is a Kleene
//! least fixpoint of `X -> S u step(X)`, iterated on frontiers; both
//! semantics are additive, so once a round adds nothing the union is stable
//! forever.

use super::{eval_aexp, eval_bexp, DomainConfig, SemError, StateSet};
use crate::syntax::{AtomicCmd, Command};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Set representation the interpreter is generic over.
trait Bag: Clone {
    /// Whether backward assignment should scan the whole universe (cheap for
    /// dense sets) instead of generating candidates from members.
    const DENSE: bool;

    fn empty(dom: &Arc<DomainConfig>) -> Self;
    fn insert_id(&mut self, id: u32);
    fn contains_id(&self, id: u32) -> bool;
    fn is_empty(&self) -> bool;
    fn for_each(&self, f: impl FnMut(u32));
    /// In-place union, reporting whether anything was added.
    fn union_with(&mut self, other: &Self) -> bool;
    fn difference(&self, other: &Self) -> Self;
}

impl Bag for StateSet {
    const DENSE: bool = true;

    fn empty(dom: &Arc<DomainConfig>) -> Self {
        StateSet::empty(dom)
    }
    fn insert_id(&mut self, id: u32) {
        self.insert(id);
    }
    fn contains_id(&self, id: u32) -> bool {
        self.contains(id)
    }
    fn is_empty(&self) -> bool {
        StateSet::is_empty(self)
    }
    fn for_each(&self, mut f: impl FnMut(u32)) {
        for id in self.iter() {
            f(id);
        }
    }
    fn union_with(&mut self, other: &Self) -> bool {
        StateSet::union_with(self, other)
    }
    fn difference(&self, other: &Self) -> Self {
        StateSet::difference(self, other)
    }
}

impl Bag for BTreeSet<u32> {
    const DENSE: bool = false;

    fn empty(_dom: &Arc<DomainConfig>) -> Self {
        BTreeSet::new()
    }
    fn insert_id(&mut self, id: u32) {
        self.insert(id);
    }
    fn contains_id(&self, id: u32) -> bool {
        self.contains(&id)
    }
    fn is_empty(&self) -> bool {
        BTreeSet::is_empty(self)
    }
    fn for_each(&self, mut f: impl FnMut(u32)) {
        for &id in self {
            f(id);
        }
    }
    fn union_with(&mut self, other: &Self) -> bool {
        let before = self.len();
        self.extend(other.iter().copied());
        self.len() != before
    }
    fn difference(&self, other: &Self) -> Self {
        self.iter().copied().filter(|id| !other.contains(id)).collect()
    }
}

fn ensure_plain(r: &Command) -> Result<(), SemError> {
    if r.uses_heap() {
        Err(SemError::HeapAtomic)
    } else {
        Ok(())
    }
}

/// Forward semantics: all states reachable from `s` by some run of `r`.
pub fn fwsem(r: &Command, dom: &Arc<DomainConfig>, s: &StateSet) -> Result<StateSet, SemError> {
    ensure_plain(r)?;
    Ok(fw(r, dom, s))
}

/// Backward semantics: all states with some run of `r` into `q`; the
/// relational inverse of [`fwsem`], computed compositionally.
pub fn bwsem(r: &Command, dom: &Arc<DomainConfig>, q: &StateSet) -> Result<StateSet, SemError> {
    ensure_plain(r)?;
    Ok(bw(r, dom, q))
}

/// Sparse forward run, used for singleton queries.
pub fn fwsem_states(
    r: &Command,
    dom: &Arc<DomainConfig>,
    s: &BTreeSet<u32>,
) -> Result<BTreeSet<u32>, SemError> {
    ensure_plain(r)?;
    Ok(fw(r, dom, s))
}

/// Sparse backward run.
pub fn bwsem_states(
    r: &Command,
    dom: &Arc<DomainConfig>,
    q: &BTreeSet<u32>,
) -> Result<BTreeSet<u32>, SemError> {
    ensure_plain(r)?;
    Ok(bw(r, dom, q))
}

fn fw<B: Bag>(r: &Command, dom: &Arc<DomainConfig>, s: &B) -> B {
    match r {
        Command::Atomic(c) => fw_atomic(c, dom, s),
        Command::Seq(r1, r2) => {
            let mid = fw(r1, dom, s);
            fw(r2, dom, &mid)
        }
        Command::Choice(r1, r2) => {
            let mut out = fw(r1, dom, s);
            out.union_with(&fw(r2, dom, s));
            out
        }
        Command::Star(body) => kleene(s, |frontier| fw(body, dom, frontier)),
    }
}

fn bw<B: Bag>(r: &Command, dom: &Arc<DomainConfig>, q: &B) -> B {
    match r {
        Command::Atomic(c) => bw_atomic(c, dom, q),
        Command::Seq(r1, r2) => {
            let mid = bw(r2, dom, q);
            bw(r1, dom, &mid)
        }
        Command::Choice(r1, r2) => {
            let mut out = bw(r1, dom, q);
            out.union_with(&bw(r2, dom, q));
            out
        }
        Command::Star(body) => kleene(q, |frontier| bw(body, dom, frontier)),
    }
}

/// Least fixpoint of `X -> start u step(X)` by frontier iteration.
fn kleene<B: Bag>(start: &B, mut step: impl FnMut(&B) -> B) -> B {
    let mut acc = start.clone();
    let mut frontier = start.clone();
    loop {
        let next = step(&frontier);
        let new = next.difference(&acc);
        if new.is_empty() {
            return acc;
        }
        acc.union_with(&new);
        frontier = new;
    }
}

fn fw_atomic<B: Bag>(c: &AtomicCmd, dom: &Arc<DomainConfig>, s: &B) -> B {
    let modulus = dom.modulus();
    let mut out = B::empty(dom);
    let mut store = vec![0u64; dom.var_count()];
    match c {
        AtomicCmd::Skip => return s.clone(),
        AtomicCmd::Assign(x, a) => s.for_each(|id| {
            dom.decode_into(id, &mut store);
            let v = eval_aexp(a, &store, modulus);
            store[*x] = v;
            out.insert_id(dom.encode(&store));
        }),
        AtomicCmd::Assume(b) => s.for_each(|id| {
            dom.decode_into(id, &mut store);
            if eval_bexp(b, &store, modulus) {
                out.insert_id(id);
            }
        }),
        AtomicCmd::Havoc(x) => s.for_each(|id| {
            dom.decode_into(id, &mut store);
            for v in 0..modulus {
                store[*x] = v;
                out.insert_id(dom.encode(&store));
            }
        }),
        _ => unreachable!("heap atomics are rejected up front"),
    }
    out
}

fn bw_atomic<B: Bag>(c: &AtomicCmd, dom: &Arc<DomainConfig>, q: &B) -> B {
    let modulus = dom.modulus();
    let mut out = B::empty(dom);
    let mut store = vec![0u64; dom.var_count()];
    match c {
        AtomicCmd::Skip => return q.clone(),
        AtomicCmd::Assign(x, a) => {
            if B::DENSE {
                // whole-universe scan: sigma is in the preimage iff its
                // update lands in q
                for id in 0..dom.size() as u32 {
                    dom.decode_into(id, &mut store);
                    let v = eval_aexp(a, &store, modulus);
                    let old = store[*x];
                    store[*x] = v;
                    if q.contains_id(dom.encode(&store)) {
                        out.insert_id(id);
                    }
                    store[*x] = old;
                }
            } else {
                // generate candidates from members: sigma agrees with some
                // q-state off x, and its expression value restores it
                q.for_each(|id| {
                    dom.decode_into(id, &mut store);
                    let target = store[*x];
                    for w in 0..modulus {
                        store[*x] = w;
                        if eval_aexp(a, &store, modulus) == target {
                            out.insert_id(dom.encode(&store));
                        }
                    }
                    store[*x] = target;
                });
            }
        }
        AtomicCmd::Assume(b) => q.for_each(|id| {
            dom.decode_into(id, &mut store);
            if eval_bexp(b, &store, modulus) {
                out.insert_id(id);
            }
        }),
        AtomicCmd::Havoc(x) => q.for_each(|id| {
            dom.decode_into(id, &mut store);
            for v in 0..modulus {
                store[*x] = v;
                out.insert_id(dom.encode(&store));
            }
        }),
        _ => unreachable!("heap atomics are rejected up front"),
    }
    out
}

/// Lazy run enumeration: visits outputs of `r` from the single state `from`
/// until the visitor returns `true`; the return value reports whether the
/// visit was cut short. Iteration is structural, so a hit deep inside a
/// sequence aborts without materializing intermediate sets.
pub fn visit_outputs(
    r: &Command,
    dom: &Arc<DomainConfig>,
    from: u32,
    f: &mut dyn FnMut(u32) -> bool,
) -> bool {
    match r {
        Command::Atomic(c) => {
            let modulus = dom.modulus();
            let mut store = dom.decode(from);
            match c {
                AtomicCmd::Skip => f(from),
                AtomicCmd::Assign(x, a) => {
                    let v = eval_aexp(a, &store, modulus);
                    store[*x] = v;
                    f(dom.encode(&store))
                }
                AtomicCmd::Assume(b) => {
                    if eval_bexp(b, &store, modulus) {
                        f(from)
                    } else {
                        false
                    }
                }
                AtomicCmd::Havoc(x) => {
                    for v in 0..modulus {
                        store[*x] = v;
                        if f(dom.encode(&store)) {
                            return true;
                        }
                    }
                    false
                }
                _ => unreachable!("heap atomics are rejected up front"),
            }
        }
        Command::Seq(r1, r2) => {
            visit_outputs(r1, dom, from, &mut |mid| visit_outputs(r2, dom, mid, f))
        }
        Command::Choice(r1, r2) => {
            visit_outputs(r1, dom, from, f) || visit_outputs(r2, dom, from, f)
        }
        Command::Star(body) => {
            // breadth-first closure over body steps, yielding every node
            let mut visited = StateSet::empty(dom);
            visited.insert(from);
            if f(from) {
                return true;
            }
            let mut queue = std::collections::VecDeque::from([from]);
            while let Some(state) = queue.pop_front() {
                let mut aborted = false;
                let cut = visit_outputs(body, dom, state, &mut |next| {
                    if !visited.contains(next) {
                        visited.insert(next);
                        if f(next) {
                            aborted = true;
                            return true;
                        }
                        queue.push_back(next);
                    }
                    false
                });
                if cut || aborted {
                    return true;
                }
            }
            false
        }
    }
}

/// Does some run of `r` from `from` end inside `q`? The forward route of
/// the for-all/exists characterization, independent of the compositional
/// backward semantics.
pub fn has_run_into(
    r: &Command,
    dom: &Arc<DomainConfig>,
    from: u32,
    q: &StateSet,
) -> Result<bool, SemError> {
    ensure_plain(r)?;
    Ok(visit_outputs(r, dom, from, &mut |out| q.contains(out)))
}

/// The graph of a command's forward semantics, with image and preimage
/// queries. Built by running the forward semantics from every singleton, so
/// it is independent of the compositional backward path it serves as an
/// oracle for.
pub struct StateRelation {
    dom: Arc<DomainConfig>,
    succ: Vec<Vec<u32>>,
}

impl StateRelation {
    pub fn successors(&self, id: u32) -> &[u32] {
        &self.succ[id as usize]
    }

    pub fn contains(&self, from: u32, to: u32) -> bool {
        self.succ[from as usize].binary_search(&to).is_ok()
    }

    pub fn image(&self, s: &StateSet) -> StateSet {
        let mut out = StateSet::empty(&self.dom);
        for id in s.iter() {
            for &to in &self.succ[id as usize] {
                out.insert(to);
            }
        }
        out
    }

    pub fn preimage(&self, q: &StateSet) -> StateSet {
        let mut out = StateSet::empty(&self.dom);
        for (from, tos) in self.succ.iter().enumerate() {
            if tos.iter().any(|to| q.contains(*to)) {
                out.insert(from as u32);
            }
        }
        out
    }

    pub fn pair_count(&self) -> usize {
        self.succ.iter().map(|v| v.len()).sum()
    }
}

pub fn semantics_relation(r: &Command, dom: &Arc<DomainConfig>) -> Result<StateRelation, SemError> {
    ensure_plain(r)?;
    let mut succ = Vec::with_capacity(dom.size());
    for id in 0..dom.size() as u32 {
        let single: BTreeSet<u32> = [id].into();
        let outs = fw(r, dom, &single);
        succ.push(outs.into_iter().collect());
    }
    Ok(StateRelation { dom: dom.clone(), succ })
}

/// States with no run at all: `{ sigma | fwsem(r, {sigma}) = {} }`.
pub fn diverging_states(r: &Command, dom: &Arc<DomainConfig>) -> Result<StateSet, SemError> {
    ensure_plain(r)?;
    let mut out = StateSet::empty(dom);
    for id in 0..dom.size() as u32 {
        let single: BTreeSet<u32> = [id].into();
        if fw(r, dom, &single).is_empty() {
            out.insert(id);
        }
    }
    Ok(out)
}

/// States not reachable as any output: the complement of `fwsem(r, Sigma)`.
pub fn unreachable_states(r: &Command, dom: &Arc<DomainConfig>) -> Result<StateSet, SemError> {
    let image = fwsem(r, dom, &StateSet::full(dom))?;
    Ok(image.complement())
}

/// True iff every singleton has at most one successor.
pub fn is_deterministic(r: &Command, dom: &Arc<DomainConfig>) -> Result<bool, SemError> {
    ensure_plain(r)?;
    for id in 0..dom.size() as u32 {
        let single: BTreeSet<u32> = [id].into();
        if fw(r, dom, &single).len() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff no state only diverges.
pub fn is_terminating(r: &Command, dom: &Arc<DomainConfig>) -> Result<bool, SemError> {
    Ok(diverging_states(r, dom)?.is_empty())
}
