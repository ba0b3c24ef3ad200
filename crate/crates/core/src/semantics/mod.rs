//! Exact collecting semantics over a bounded finite domain.
//!
//! Values live in `Z_B = {0, .., B-1}` and arithmetic wraps mod `B`, so the
//! store space is finite and every fixpoint below terminates. Results agree
//! with the unbounded-integer semantics whenever no evaluation wraps.

mod interp;
mod sets;

pub use interp::{
    bwsem, bwsem_states, diverging_states, fwsem, fwsem_states, has_run_into, is_deterministic,
    is_terminating, semantics_relation, unreachable_states, visit_outputs, StateRelation,
};
pub use sets::StateSet;

use crate::syntax::{ABinOp, AExp, BExp, CmpOp};
use std::sync::Arc;
use thiserror::Error;

/// Hard cap on the number of stores a domain may have.
pub const STATE_BUDGET: usize = 1 << 24;

/// A total store: one value in `Z_B` per declared variable.
pub type Store = Vec<u64>;

#[derive(Debug, Error)]
pub enum SemError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("at least one variable is required")]
    NoVars,
    #[error("state space of {size} states exceeds the budget of {budget}")]
    Budget { size: u128, budget: usize },
    #[error("heap command passed to the plain semantics")]
    HeapAtomic,
}

/// The finite store universe: a modulus and an ordered variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainConfig {
    modulus: u64,
    vars: Vec<String>,
    size: usize,
}

impl DomainConfig {
    pub fn new(modulus: u64, vars: Vec<String>) -> Result<Arc<Self>, SemError> {
        if modulus < 2 {
            return Err(SemError::BadModulus(modulus));
        }
        if vars.is_empty() {
            return Err(SemError::NoVars);
        }
        let mut size: u128 = 1;
        for _ in &vars {
            size = size.saturating_mul(modulus as u128);
            if size > STATE_BUDGET as u128 {
                return Err(SemError::Budget { size, budget: STATE_BUDGET });
            }
        }
        Ok(Arc::new(DomainConfig { modulus, vars, size: size as usize }))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    /// Number of stores in the universe, `B^|vars|`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Two domains are compatible when they have the same shape; variable
    /// names are not part of the identity.
    pub fn compatible(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.vars.len() == other.vars.len()
    }

    /// Mixed-radix encoding: the first declared variable varies fastest.
    pub fn encode(&self, store: &[u64]) -> u32 {
        debug_assert_eq!(store.len(), self.vars.len());
        let mut id: u64 = 0;
        for &v in store.iter().rev() {
            debug_assert!(v < self.modulus);
            id = id * self.modulus + v;
        }
        id as u32
    }

    pub fn decode(&self, id: u32) -> Store {
        let mut store = vec![0; self.vars.len()];
        self.decode_into(id, &mut store);
        store
    }

    pub fn decode_into(&self, id: u32, store: &mut [u64]) {
        let mut rest = id as u64;
        for slot in store.iter_mut() {
            *slot = rest % self.modulus;
            rest /= self.modulus;
        }
    }

    /// Renders a store as `x=0, y=1, ..` for witnesses and reports.
    pub fn store_string(&self, id: u32) -> String {
        let store = self.decode(id);
        self.vars
            .iter()
            .zip(&store)
            .map(|(name, v)| format!("{name}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Expression evaluation in `Z_B`. Total: `mod 0` yields the left operand.
pub fn eval_aexp(a: &AExp, store: &[u64], modulus: u64) -> u64 {
    match a {
        AExp::Lit(n) => n % modulus,
        AExp::Var(x) => store[*x],
        AExp::Bin(op, l, r) => {
            let lv = eval_aexp(l, store, modulus);
            let rv = eval_aexp(r, store, modulus);
            match op {
                ABinOp::Add => (lv + rv) % modulus,
                ABinOp::Sub => (lv + modulus - rv) % modulus,
                ABinOp::Mul => (lv as u128 * rv as u128 % modulus as u128) as u64,
                ABinOp::Mod => {
                    if rv == 0 {
                        lv
                    } else {
                        lv % rv
                    }
                }
            }
        }
    }
}

pub fn eval_bexp(b: &BExp, store: &[u64], modulus: u64) -> bool {
    match b {
        BExp::False => false,
        BExp::Not(inner) => !eval_bexp(inner, store, modulus),
        BExp::And(l, r) => eval_bexp(l, store, modulus) && eval_bexp(r, store, modulus),
        BExp::Cmp(op, l, r) => {
            let lv = eval_aexp(l, store, modulus);
            let rv = eval_aexp(r, store, modulus);
            match op {
                CmpOp::Eq => lv == rv,
                CmpOp::Ne => lv != rv,
                CmpOp::Lt => lv < rv,
                CmpOp::Le => lv <= rv,
                CmpOp::Gt => lv > rv,
                CmpOp::Ge => lv >= rv,
            }
        }
    }
}

impl StateSet {
    /// The denotation of a predicate: all stores satisfying it.
    pub fn from_bexp(dom: &Arc<DomainConfig>, b: &BExp) -> Self {
        let modulus = dom.modulus();
        StateSet::from_pred(dom, |store| eval_bexp(b, store, modulus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_bexp;

    fn dom64() -> Arc<DomainConfig> {
        DomainConfig::new(64, vec!["x".into(), "y".into(), "z".into()]).unwrap()
    }

    #[test]
    fn encode_decode_roundtrip() {
        let d = dom64();
        for id in [0u32, 1, 63, 64, 4095, 4096, 262143] {
            assert_eq!(d.encode(&d.decode(id)), id);
        }
    }

    #[test]
    fn eval_aexp_examples() {
        let d = DomainConfig::new(8, vec!["x".into()]).unwrap();
        let three_plus_four = AExp::Bin(ABinOp::Add, Box::new(AExp::Lit(3)), Box::new(AExp::Lit(4)));
        assert_eq!(eval_aexp(&three_plus_four, &[0], d.modulus()), 7);

        // 5 * 2 wraps to 2 mod 8
        let x_times_2 = AExp::Bin(ABinOp::Mul, Box::new(AExp::Var(0)), Box::new(AExp::Lit(2)));
        assert_eq!(eval_aexp(&x_times_2, &[5], 8), 2);

        let x_mod_2 = AExp::Bin(ABinOp::Mod, Box::new(AExp::Var(0)), Box::new(AExp::Lit(2)));
        assert_eq!(eval_aexp(&x_mod_2, &[42], 64), 0);

        // mod by zero: left operand
        let x_mod_0 = AExp::Bin(ABinOp::Mod, Box::new(AExp::Var(0)), Box::new(AExp::Lit(0)));
        assert_eq!(eval_aexp(&x_mod_0, &[5], 8), 5);
    }

    #[test]
    fn eval_bexp_examples() {
        let vars = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        let guard = parse_bexp("x mod 2 = 0 && !(y mod 2 = 0)", &vars).unwrap();
        assert!(eval_bexp(&guard, &[2, 3, 0], 64));
        assert!(!eval_bexp(&guard, &[2, 4, 0], 64));

        let z42 = parse_bexp("z = 42", &vars).unwrap();
        assert!(!eval_bexp(&z42, &[0, 0, 11], 64));
        assert!(eval_bexp(&parse_bexp("false", &vars).unwrap(), &[0, 0, 0], 64) == false);
    }

    #[test]
    fn budget_is_enforced() {
        let vars: Vec<String> = (0..9).map(|i| format!("v{i}")).collect();
        assert!(matches!(
            DomainConfig::new(64, vars).map(|_| ()),
            Err(SemError::Budget { .. })
        ));
    }
}
