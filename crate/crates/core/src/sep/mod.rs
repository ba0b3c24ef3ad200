//! Bounded heap machine model: stores over integer-or-location values, heaps
//! with a deallocation marker, an error state, and the forward collecting
//! semantics of heap commands.
//!
//! Locations are abstract names, never arithmetic values. A heap cell is
//! absent, holds a value, or holds the deallocation marker left behind by
//! `free`; `free`, load and store demand a currently-allocated cell and step
//! to the error state otherwise. The error state is absorbing. `alloc` picks
//! any location that is absent or deallocated (every choice, every value);
//! if none exists the state has no successor.

pub mod asl;
pub mod proof;

use crate::syntax::{ABinOp, AExp, AtomicCmd, BExp, CmpOp, Command};
use std::collections::BTreeSet;
use thiserror::Error;

/// Budget for exhaustive enumeration of the heap-state universe.
pub const SEP_STATE_BUDGET: u128 = 1 << 24;

/// Integer-or-location value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HVal {
    Int(u64),
    Loc(u8),
}

impl HVal {
    pub fn describe(&self, cfg: &SepConfig) -> String {
        match self {
            HVal::Int(n) => n.to_string(),
            HVal::Loc(l) => cfg.loc_name(*l),
        }
    }
}

/// One heap cell: unallocated, deallocated, or holding a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Absent,
    Dangling,
    Val(HVal),
}

/// A store plus heap. The store is total over the configured variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeapState {
    pub store: Vec<HVal>,
    pub heap: Vec<Cell>,
}

/// Machine state: a proper state or the absorbing error state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtState {
    St(HeapState),
    Err,
}

#[derive(Debug, Error)]
pub enum SepError {
    #[error("heap-state space of {size} states exceeds the budget of {budget}")]
    Budget { size: u128, budget: u128 },
    #[error("variable `{0}` is not in the configured universe")]
    UnboundVar(String),
}

/// The bounded universe: location names, an integer range `0..=int_max`,
/// and the variable list stores are total over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SepConfig {
    pub locations: usize,
    pub int_max: u64,
    pub vars: Vec<String>,
}

impl SepConfig {
    pub fn new(locations: usize, int_max: u64, vars: Vec<String>) -> Self {
        SepConfig { locations, int_max, vars }
    }

    pub fn loc_name(&self, l: u8) -> String {
        format!("L{l}")
    }

    pub fn var_id(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn val_count(&self) -> u64 {
        self.int_max + 1 + self.locations as u64
    }

    /// Every value, integers first, then locations.
    pub fn each_val(&self) -> impl Iterator<Item = HVal> + '_ {
        (0..=self.int_max)
            .map(HVal::Int)
            .chain((0..self.locations as u8).map(HVal::Loc))
    }

    fn nth_val(&self, n: u64) -> HVal {
        if n <= self.int_max {
            HVal::Int(n)
        } else {
            HVal::Loc((n - self.int_max - 1) as u8)
        }
    }

    fn nth_cell(&self, n: u64) -> Cell {
        match n {
            0 => Cell::Absent,
            1 => Cell::Dangling,
            _ => Cell::Val(self.nth_val(n - 2)),
        }
    }

    /// `|Val|^|vars| * (|Val|+2)^|locations|`
    pub fn state_count(&self) -> u128 {
        let v = self.val_count() as u128;
        let mut out: u128 = 1;
        for _ in &self.vars {
            out = out.saturating_mul(v);
        }
        for _ in 0..self.locations {
            out = out.saturating_mul(v + 2);
        }
        out
    }

    pub fn check_budget(&self) -> Result<(), SepError> {
        let size = self.state_count();
        if size > SEP_STATE_BUDGET {
            Err(SepError::Budget { size, budget: SEP_STATE_BUDGET })
        } else {
            Ok(())
        }
    }

    /// Visits every (store, heap) state in a fixed deterministic order.
    pub fn enumerate(&self, mut f: impl FnMut(&HeapState)) {
        let nv = self.val_count();
        let nc = nv + 2;
        let mut state = HeapState {
            store: vec![HVal::Int(0); self.vars.len()],
            heap: vec![Cell::Absent; self.locations],
        };
        let total = self.state_count();
        let mut digits = vec![0u64; self.vars.len() + self.locations];
        let mut i: u128 = 0;
        loop {
            for (slot, d) in digits.iter().enumerate() {
                if slot < self.vars.len() {
                    state.store[slot] = self.nth_val(*d);
                } else {
                    state.heap[slot - self.vars.len()] = self.nth_cell(*d);
                }
            }
            f(&state);
            i += 1;
            if i >= total {
                return;
            }
            // odometer
            for (slot, d) in digits.iter_mut().enumerate() {
                let base = if slot < self.vars.len() { nv } else { nc };
                *d += 1;
                if *d < base {
                    break;
                }
                *d = 0;
            }
        }
    }

    pub fn describe_state(&self, st: &HeapState) -> String {
        let store: Vec<String> = self
            .vars
            .iter()
            .zip(&st.store)
            .map(|(v, val)| format!("{v}={}", val.describe(self)))
            .collect();
        let heap: Vec<String> = st
            .heap
            .iter()
            .enumerate()
            .filter_map(|(l, c)| match c {
                Cell::Absent => None,
                Cell::Dangling => Some(format!("{}=<freed>", self.loc_name(l as u8))),
                Cell::Val(v) => Some(format!("{}={}", self.loc_name(l as u8), v.describe(self))),
            })
            .collect();
        format!("store[{}] heap[{}]", store.join(", "), heap.join(", "))
    }
}

/// Arithmetic over mixed values: integer operations wrap modulo
/// `int_max + 1`; any arithmetic on a location yields 0. Locations only
/// interact meaningfully through comparisons.
pub fn eval_aexp_heap(a: &AExp, store: &[HVal], cfg: &SepConfig) -> HVal {
    let m = cfg.int_max + 1;
    match a {
        AExp::Lit(n) => HVal::Int(n % m),
        AExp::Var(x) => store[*x],
        AExp::Bin(op, l, r) => {
            let lv = eval_aexp_heap(l, store, cfg);
            let rv = eval_aexp_heap(r, store, cfg);
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

/// Comparisons: integers compare numerically; two locations compare by
/// identity (order follows the location index); a location never equals an
/// integer, so mixed comparisons are false except `!=`.
pub fn cmp_hvals(op: CmpOp, l: HVal, r: HVal) -> bool {
    match (l, r) {
        (HVal::Int(a), HVal::Int(b)) => cmp_ord(op, a as i128, b as i128),
        (HVal::Loc(a), HVal::Loc(b)) => cmp_ord(op, a as i128, b as i128),
        _ => matches!(op, CmpOp::Ne),
    }
}

fn cmp_ord(op: CmpOp, a: i128, b: i128) -> bool {
    match op {
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
    }
}

pub fn eval_bexp_heap(b: &BExp, store: &[HVal], cfg: &SepConfig) -> bool {
    match b {
        BExp::False => false,
        BExp::Not(inner) => !eval_bexp_heap(inner, store, cfg),
        BExp::And(l, r) => eval_bexp_heap(l, store, cfg) && eval_bexp_heap(r, store, cfg),
        BExp::Cmp(op, l, r) => {
            cmp_hvals(*op, eval_aexp_heap(l, store, cfg), eval_aexp_heap(r, store, cfg))
        }
    }
}

fn step_atomic(c: &AtomicCmd, cfg: &SepConfig, st: &HeapState, out: &mut BTreeSet<ExtState>) {
    match c {
        AtomicCmd::Skip => {
            out.insert(ExtState::St(st.clone()));
        }
        AtomicCmd::Assign(x, a) => {
            let mut next = st.clone();
            next.store[*x] = eval_aexp_heap(a, &st.store, cfg);
            out.insert(ExtState::St(next));
        }
        AtomicCmd::Assume(b) => {
            if eval_bexp_heap(b, &st.store, cfg) {
                out.insert(ExtState::St(st.clone()));
            }
        }
        AtomicCmd::Havoc(x) => {
            for v in cfg.each_val() {
                let mut next = st.clone();
                next.store[*x] = v;
                out.insert(ExtState::St(next));
            }
        }
        AtomicCmd::Alloc(x) => {
            for l in 0..cfg.locations {
                if matches!(st.heap[l], Cell::Absent | Cell::Dangling) {
                    for v in cfg.each_val() {
                        let mut next = st.clone();
                        next.store[*x] = HVal::Loc(l as u8);
                        next.heap[l] = Cell::Val(v);
                        out.insert(ExtState::St(next));
                    }
                }
            }
            // with every location live, allocation has no successor
        }
        AtomicCmd::Free(x) => match st.store[*x] {
            HVal::Loc(l) if matches!(st.heap[l as usize], Cell::Val(_)) => {
                let mut next = st.clone();
                next.heap[l as usize] = Cell::Dangling;
                out.insert(ExtState::St(next));
            }
            _ => {
                out.insert(ExtState::Err);
            }
        },
        AtomicCmd::Load(x, y) => match st.store[*y] {
            HVal::Loc(l) => match st.heap[l as usize] {
                Cell::Val(v) => {
                    let mut next = st.clone();
                    next.store[*x] = v;
                    out.insert(ExtState::St(next));
                }
                _ => {
                    out.insert(ExtState::Err);
                }
            },
            _ => {
                out.insert(ExtState::Err);
            }
        },
        AtomicCmd::Store(x, y) => match st.store[*x] {
            HVal::Loc(l) if matches!(st.heap[l as usize], Cell::Val(_)) => {
                let mut next = st.clone();
                next.heap[l as usize] = Cell::Val(st.store[*y]);
                out.insert(ExtState::St(next));
            }
            _ => {
                out.insert(ExtState::Err);
            }
        },
    }
}

fn step_states(c: &AtomicCmd, cfg: &SepConfig, states: &BTreeSet<ExtState>) -> BTreeSet<ExtState> {
    let mut out = BTreeSet::new();
    for st in states {
        match st {
            ExtState::Err => {
                out.insert(ExtState::Err);
            }
            ExtState::St(hs) => step_atomic(c, cfg, hs, &mut out),
        }
    }
    out
}

/// Forward collecting semantics over heap states. The error state is a
/// value, not a failure.
pub fn fwsem_heap(r: &Command, cfg: &SepConfig, states: &BTreeSet<ExtState>) -> BTreeSet<ExtState> {
    match r {
        Command::Atomic(c) => step_states(c, cfg, states),
        Command::Seq(r1, r2) => {
            let mid = fwsem_heap(r1, cfg, states);
            fwsem_heap(r2, cfg, &mid)
        }
        Command::Choice(r1, r2) => {
            let mut out = fwsem_heap(r1, cfg, states);
            out.extend(fwsem_heap(r2, cfg, states));
            out
        }
        Command::Star(body) => {
            let mut acc = states.clone();
            let mut frontier = states.clone();
            loop {
                let next = fwsem_heap(body, cfg, &frontier);
                let new: BTreeSet<ExtState> = next.difference(&acc).cloned().collect();
                if new.is_empty() {
                    return acc;
                }
                acc.extend(new.iter().cloned());
                frontier = new;
            }
        }
    }
}

/// Every non-error successor agrees with the start state on all variables
/// the command cannot modify.
pub fn store_mod_agreement(r: &Command, cfg: &SepConfig, st: &HeapState) -> bool {
    let modified = crate::syntax::mod_vars(r);
    let start: BTreeSet<ExtState> = [ExtState::St(st.clone())].into();
    for succ in fwsem_heap(r, cfg, &start) {
        if let ExtState::St(next) = succ {
            for (i, (a, b)) in st.store.iter().zip(&next.store).enumerate() {
                if !modified.contains(&i) && a != b {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn cfg2() -> SepConfig {
        SepConfig::new(2, 1, vec!["x".into(), "y".into()])
    }

    fn start(cfg: &SepConfig) -> HeapState {
        HeapState {
            store: vec![HVal::Int(0); cfg.vars.len()],
            heap: vec![Cell::Absent; cfg.locations],
        }
    }

    #[test]
    fn free_on_unallocated_is_an_error() {
        let cfg = cfg2();
        let p = parse_program("vars x, y; heap locs 2 ints 0..1; free(x)").unwrap();
        let out = fwsem_heap(&p.body, &cfg, &[ExtState::St(start(&cfg))].into());
        assert_eq!(out, [ExtState::Err].into());
    }

    #[test]
    fn alloc_covers_every_free_location_and_value() {
        let cfg = cfg2();
        let p = parse_program("vars x, y; heap locs 2 ints 0..1; x := alloc()").unwrap();
        let mut init = start(&cfg);
        init.heap[0] = Cell::Val(HVal::Int(1)); // one location occupied
        let out = fwsem_heap(&p.body, &cfg, &[ExtState::St(init)].into());
        // only location 1 is available: one successor per value
        assert_eq!(out.len(), cfg.val_count() as usize);
        for st in &out {
            match st {
                ExtState::St(hs) => {
                    assert_eq!(hs.store[0], HVal::Loc(1));
                    assert!(matches!(hs.heap[1], Cell::Val(_)));
                }
                ExtState::Err => panic!("alloc cannot fail"),
            }
        }
    }

    #[test]
    fn alloc_blocks_when_every_location_is_live() {
        let cfg = cfg2();
        let p = parse_program("vars x, y; heap locs 2 ints 0..1; x := alloc()").unwrap();
        let mut init = start(&cfg);
        init.heap[0] = Cell::Val(HVal::Int(0));
        init.heap[1] = Cell::Val(HVal::Int(0));
        let out = fwsem_heap(&p.body, &cfg, &[ExtState::St(init)].into());
        assert!(out.is_empty());
    }

    #[test]
    fn double_free_and_use_after_free_error() {
        let cfg = cfg2();
        let p = parse_program("vars x, y; heap locs 2 ints 0..1; free(x) ; free(x)").unwrap();
        let mut init = start(&cfg);
        init.store[0] = HVal::Loc(0);
        init.heap[0] = Cell::Val(HVal::Int(1));
        let out = fwsem_heap(&p.body, &cfg, &[ExtState::St(init.clone())].into());
        assert_eq!(out, [ExtState::Err].into());

        let p = parse_program("vars x, y; heap locs 2 ints 0..1; free(x) ; y := [x]").unwrap();
        let out = fwsem_heap(&p.body, &cfg, &[ExtState::St(init)].into());
        assert_eq!(out, [ExtState::Err].into());
    }

    #[test]
    fn err_is_absorbing() {
        let cfg = cfg2();
        let p = parse_program("vars x, y; heap locs 2 ints 0..1; x := alloc()").unwrap();
        let out = fwsem_heap(&p.body, &cfg, &[ExtState::Err].into());
        assert_eq!(out, [ExtState::Err].into());
    }

    #[test]
    fn store_mod_agreement_examples() {
        let cfg = cfg2();
        let mut init = start(&cfg);
        init.store[0] = HVal::Loc(0);
        init.heap[0] = Cell::Val(HVal::Int(0));
        let free = parse_program("vars x, y; heap locs 2 ints 0..1; free(x)").unwrap();
        assert!(store_mod_agreement(&free.body, &cfg, &init));
        let alloc = parse_program("vars x, y; heap locs 2 ints 0..1; x := alloc()").unwrap();
        assert!(store_mod_agreement(&alloc.body, &cfg, &init));
        let skip = parse_program("vars x, y; skip").unwrap();
        assert!(store_mod_agreement(&skip.body, &cfg, &init));
    }

    #[test]
    fn state_count_matches_enumeration() {
        let cfg = SepConfig::new(2, 1, vec!["x".into()]);
        let mut n: u128 = 0;
        cfg.enumerate(|_| n += 1);
        assert_eq!(n, cfg.state_count());
        // 4 values, 6 cell states: 4 * 36
        assert_eq!(n, 4 * 36);
    }
}
