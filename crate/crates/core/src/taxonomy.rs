//! Seeded random generation and property campaigns over the four logics.
//!
//! Each campaign instance is derived from `seed + i`, so the corpus is fully
//! determined by the seed no matter how instances are scheduled. A reported
//! violation is always re-checked against the raw semantics before it is
//! recorded.

use crate::proofs::{check_derivation, derive_then_weaken, Derivation, SilRule};
use crate::semantics::{
    bwsem, bwsem_states, diverging_states, fwsem, fwsem_states, is_deterministic, is_terminating,
    semantics_relation, unreachable_states, DomainConfig, StateSet,
};
use crate::syntax::{
    print_command, ABinOp, AExp, AtomicCmd, BExp, CmpOp, Command,
};
use crate::triples::{check_validity, weakest_nc_post, wlp, Logic, Triple};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Weights for the command constructors drawn by [`gen_command`].
#[derive(Debug, Clone)]
pub struct CmdWeights {
    pub skip: u32,
    pub assign: u32,
    pub assume: u32,
    pub havoc: u32,
    pub seq: u32,
    pub choice: u32,
    pub star: u32,
}

impl Default for CmdWeights {
    fn default() -> Self {
        CmdWeights { skip: 1, assign: 4, assume: 3, havoc: 2, seq: 4, choice: 3, star: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_depth: usize,
    pub var_count: usize,
    pub modulus: u64,
    pub weights: CmdWeights,
    pub seed: u64,
    pub instances: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 4,
            var_count: 3,
            modulus: 8,
            weights: CmdWeights::default(),
            seed: 0,
            instances: 500,
        }
    }
}

impl GenConfig {
    pub fn domain(&self) -> Arc<DomainConfig> {
        let vars = (0..self.var_count).map(|i| format!("v{i}")).collect();
        DomainConfig::new(self.modulus, vars).expect("generator domain within budget")
    }
}

/// A well-scoped random plain command. The same seed yields the same tree.
pub fn gen_command(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Command {
    gen_cmd_depth(cfg, rng, cfg.max_depth)
}

fn gen_cmd_depth(cfg: &GenConfig, rng: &mut ChaCha8Rng, depth: usize) -> Command {
    let w = &cfg.weights;
    let atomic_only = depth <= 1;
    let total = if atomic_only {
        w.skip + w.assign + w.assume + w.havoc
    } else {
        w.skip + w.assign + w.assume + w.havoc + w.seq + w.choice + w.star
    };
    assert!(total > 0, "all generator weights are zero");
    let mut pick = rng.gen_range(0..total);
    let mut take = |weight: u32| {
        if pick < weight {
            true
        } else {
            pick -= weight;
            false
        }
    };
    if take(w.skip) {
        Command::skip()
    } else if take(w.assign) {
        let x = rng.gen_range(0..cfg.var_count);
        let a = gen_aexp(cfg, rng, 2);
        Command::Atomic(AtomicCmd::Assign(x, a))
    } else if take(w.assume) {
        Command::Atomic(AtomicCmd::Assume(gen_bexp(cfg, rng, 2)))
    } else if take(w.havoc) {
        Command::Atomic(AtomicCmd::Havoc(rng.gen_range(0..cfg.var_count)))
    } else if take(w.seq) {
        Command::seq(gen_cmd_depth(cfg, rng, depth - 1), gen_cmd_depth(cfg, rng, depth - 1))
    } else if take(w.choice) {
        Command::choice(gen_cmd_depth(cfg, rng, depth - 1), gen_cmd_depth(cfg, rng, depth - 1))
    } else {
        Command::star(gen_cmd_depth(cfg, rng, depth - 1))
    }
}

fn gen_aexp(cfg: &GenConfig, rng: &mut ChaCha8Rng, depth: usize) -> AExp {
    if depth == 0 || rng.gen_bool(0.6) {
        if rng.gen_bool(0.5) {
            AExp::Lit(rng.gen_range(0..cfg.modulus))
        } else {
            AExp::Var(rng.gen_range(0..cfg.var_count))
        }
    } else {
        let op = match rng.gen_range(0..4) {
            0 => ABinOp::Add,
            1 => ABinOp::Sub,
            2 => ABinOp::Mul,
            _ => ABinOp::Mod,
        };
        AExp::Bin(op, Box::new(gen_aexp(cfg, rng, depth - 1)), Box::new(gen_aexp(cfg, rng, depth - 1)))
    }
}

fn gen_bexp(cfg: &GenConfig, rng: &mut ChaCha8Rng, depth: usize) -> BExp {
    if depth == 0 || rng.gen_bool(0.5) {
        let op = match rng.gen_range(0..6) {
            0 => CmpOp::Eq,
            1 => CmpOp::Ne,
            2 => CmpOp::Lt,
            3 => CmpOp::Le,
            4 => CmpOp::Gt,
            _ => CmpOp::Ge,
        };
        BExp::Cmp(op, gen_aexp(cfg, rng, 1), gen_aexp(cfg, rng, 1))
    } else {
        match rng.gen_range(0..3) {
            0 => BExp::False,
            1 => BExp::Not(Box::new(gen_bexp(cfg, rng, depth - 1))),
            _ => BExp::And(
                Box::new(gen_bexp(cfg, rng, depth - 1)),
                Box::new(gen_bexp(cfg, rng, depth - 1)),
            ),
        }
    }
}

/// Random state set: predicate-shaped (hits structured sets), explicit
/// random subsets (hits ragged ones), or an edge case.
pub fn gen_state_set(cfg: &GenConfig, rng: &mut ChaCha8Rng, dom: &Arc<DomainConfig>) -> StateSet {
    match rng.gen_range(0..10) {
        0 => StateSet::empty(dom),
        1 => StateSet::full(dom),
        2 => StateSet::singleton(dom, rng.gen_range(0..dom.size()) as u32),
        3..=6 => StateSet::from_bexp(dom, &gen_bexp(cfg, rng, 2)),
        _ => {
            let density = rng.gen_range(0.05..0.95);
            let mut s = StateSet::empty(dom);
            for id in 0..dom.size() as u32 {
                if rng.gen_bool(density) {
                    s.insert(id);
                }
            }
            s
        }
    }
}

// ---- campaign plumbing ----

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub instances: usize,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
    /// Wall-clock cost; deliberately excluded from the deterministic
    /// renderings of the report.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const ALL_PROPERTIES: &[&str] = &[
    "adjunction",
    "bwsem-compositional",
    "additivity",
    "bijection-hl-nc",
    "sil-hl-guarded",
    "galois",
    "weakest-hl-pre",
    "weakest-nc-post",
    "conj-il",
    "conj-sil",
    "il-sil-incomparable",
    "fig11-rules",
    "sil-proof-roundtrip",
];

struct Instance {
    cmd: Command,
    p1: StateSet,
    p2: StateSet,
    q1: StateSet,
    q2: StateSet,
}

fn instance(cfg: &GenConfig, dom: &Arc<DomainConfig>, i: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
    Instance {
        cmd: gen_command(cfg, &mut rng),
        p1: gen_state_set(cfg, &mut rng, dom),
        p2: gen_state_set(cfg, &mut rng, dom),
        q1: gen_state_set(cfg, &mut rng, dom),
        q2: gen_state_set(cfg, &mut rng, dom),
    }
}

fn valid(logic: Logic, pre: &StateSet, cmd: &Command, post: &StateSet, dom: &Arc<DomainConfig>) -> bool {
    check_validity(
        &Triple { logic, pre: pre.clone(), cmd: cmd.clone(), post: post.clone() },
        dom,
    )
    .expect("plain generated command")
    .valid
}

fn describe_instance(inst: &Instance, dom: &Arc<DomainConfig>) -> String {
    format!(
        "r = {}; |P1|={}, |P2|={}, |Q1|={}, |Q2|={}",
        print_command(&inst.cmd, dom.vars()),
        inst.p1.len(),
        inst.p2.len(),
        inst.q1.len(),
        inst.q2.len()
    )
}

/// Runs one named property over the seeded corpus.
pub fn run_property(cfg: &GenConfig, name: &str) -> PropertyReport {
    let start = std::time::Instant::now();
    let dom = cfg.domain();
    let mut violations = Vec::new();
    let mut notes = Vec::new();

    match name {
        "adjunction" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                if let Some(v) = check_adjunction(&inst.cmd, &dom) {
                    violations.push(format!("instance {i}: {v}; {}", describe_instance(&inst, &dom)));
                }
            }
        }
        "bwsem-compositional" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                let by_calculus = bwsem(&inst.cmd, &dom, &inst.q1).unwrap();
                let by_oracle = semantics_relation(&inst.cmd, &dom).unwrap().preimage(&inst.q1);
                if by_calculus != by_oracle {
                    // re-check against raw singleton runs before reporting
                    let genuine = (0..dom.size() as u32).any(|id| {
                        let runs = fwsem_states(&inst.cmd, &dom, &BTreeSet::from([id])).unwrap();
                        let hits = runs.iter().any(|o| inst.q1.contains(*o));
                        hits != by_calculus.contains(id)
                    });
                    if genuine {
                        violations.push(format!(
                            "instance {i}: compositional backward image disagrees with the relation oracle; {}",
                            describe_instance(&inst, &dom)
                        ));
                    }
                }
            }
        }
        "additivity" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                let f_union = fwsem(&inst.cmd, &dom, &inst.p1.union(&inst.p2)).unwrap();
                let f_parts = fwsem(&inst.cmd, &dom, &inst.p1).unwrap().union(&fwsem(&inst.cmd, &dom, &inst.p2).unwrap());
                let b_union = bwsem(&inst.cmd, &dom, &inst.q1.union(&inst.q2)).unwrap();
                let b_parts = bwsem(&inst.cmd, &dom, &inst.q1).unwrap().union(&bwsem(&inst.cmd, &dom, &inst.q2).unwrap());
                if f_union != f_parts || b_union != b_parts {
                    violations.push(format!("instance {i}: semantics not additive; {}", describe_instance(&inst, &dom)));
                }
            }
        }
        "bijection-hl-nc" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                if !check_bijection_hl_nc(&inst.cmd, &inst.p1, &inst.q1, &dom) {
                    violations.push(format!("instance {i}: forward/backward negation bijection broken; {}", describe_instance(&inst, &dom)));
                }
            }
        }
        "sil-hl-guarded" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                if !check_sil_hl_relation(&inst.cmd, &inst.p1, &inst.q1, &dom) {
                    violations.push(format!("instance {i}: determinism/termination guarded implication broken; {}", describe_instance(&inst, &dom)));
                }
            }
        }
        "galois" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                if !check_galois_inequalities(&inst.cmd, &inst.p1, &inst.q1, &dom) {
                    violations.push(format!("instance {i}: round-trip inclusion broken; {}", describe_instance(&inst, &dom)));
                }
            }
        }
        "weakest-hl-pre" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                let w = wlp(&inst.cmd, &dom, &inst.q1).unwrap();
                if !valid(Logic::Hl, &w, &inst.cmd, &inst.q1, &dom) {
                    violations.push(format!("instance {i}: wlp is not itself a valid HL precondition; {}", describe_instance(&inst, &dom)));
                    continue;
                }
                // maximality: any single extra state breaks validity
                for id in w.complement().iter() {
                    let outs = fwsem_states(&inst.cmd, &dom, &BTreeSet::from([id])).unwrap();
                    if outs.iter().all(|o| inst.q1.contains(*o)) {
                        violations.push(format!(
                            "instance {i}: state [{}] could be added to wlp; {}",
                            dom.store_string(id),
                            describe_instance(&inst, &dom)
                        ));
                        break;
                    }
                }
            }
        }
        "weakest-nc-post" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                let w = weakest_nc_post(&inst.cmd, &dom, &inst.p1).unwrap();
                if !valid(Logic::Nc, &inst.p1, &inst.cmd, &w, &dom) {
                    violations.push(format!("instance {i}: weakest NC postcondition is not valid; {}", describe_instance(&inst, &dom)));
                    continue;
                }
                for id in w.complement().iter() {
                    let back = bwsem_states(&inst.cmd, &dom, &BTreeSet::from([id])).unwrap();
                    if back.iter().all(|s| inst.p1.contains(*s)) {
                        violations.push(format!(
                            "instance {i}: state [{}] could be added to the weakest NC postcondition; {}",
                            dom.store_string(id),
                            describe_instance(&inst, &dom)
                        ));
                        break;
                    }
                }
            }
        }
        "conj-il" => match find_conj_counterexample(Logic::Il, cfg) {
            Ok(found) => notes.push(found),
            Err(e) => violations.push(e),
        },
        "conj-sil" => match find_conj_counterexample(Logic::Sil, cfg) {
            Ok(found) => notes.push(found),
            Err(e) => violations.push(e),
        },
        "il-sil-incomparable" => {
            let (v, n) = check_il_sil_incomparable(cfg);
            violations.extend(v);
            notes.extend(n);
        }
        "fig11-rules" => {
            let (v, n) = check_rule_table(cfg, &dom);
            violations.extend(v);
            notes.extend(n);
        }
        "sil-proof-roundtrip" => {
            for i in 0..cfg.instances {
                let inst = instance(cfg, &dom, i);
                if let Some(v) = check_proof_roundtrip(cfg, &inst, &dom, i) {
                    violations.push(v);
                }
            }
        }
        other => violations.push(format!("unknown property `{other}`")),
    }

    PropertyReport {
        property: name.to_string(),
        instances: cfg.instances,
        violations,
        notes,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// Runs every property; one report per property.
pub fn run_taxonomy_suite(cfg: &GenConfig) -> Vec<PropertyReport> {
    ALL_PROPERTIES.iter().map(|p| run_property(cfg, p)).collect()
}

// ---- individual checks ----

/// The forward and backward semantics are each other's relational inverse:
/// checked edge by edge through singleton runs in both directions.
fn check_adjunction(cmd: &Command, dom: &Arc<DomainConfig>) -> Option<String> {
    let n = dom.size() as u32;
    let mut fw_edges: Vec<BTreeSet<u32>> = Vec::with_capacity(n as usize);
    let mut bw_edges: Vec<BTreeSet<u32>> = Vec::with_capacity(n as usize);
    for id in 0..n {
        fw_edges.push(fwsem_states(cmd, dom, &BTreeSet::from([id])).unwrap());
        bw_edges.push(bwsem_states(cmd, dom, &BTreeSet::from([id])).unwrap());
    }
    for s in 0..n {
        for &t in &fw_edges[s as usize] {
            if !bw_edges[t as usize].contains(&s) {
                return Some(format!(
                    "[{}] steps to [{}] forward but not backward",
                    dom.store_string(s),
                    dom.store_string(t)
                ));
            }
        }
    }
    for t in 0..n {
        for &s in &bw_edges[t as usize] {
            if !fw_edges[s as usize].contains(&t) {
                return Some(format!(
                    "[{}] reaches [{}] backward but not forward",
                    dom.store_string(s),
                    dom.store_string(t)
                ));
            }
        }
    }
    None
}

/// HL validity of (P, Q) coincides with NC validity of the negations.
pub fn check_bijection_hl_nc(
    cmd: &Command,
    p: &StateSet,
    q: &StateSet,
    dom: &Arc<DomainConfig>,
) -> bool {
    let forward = fwsem(cmd, dom, p).unwrap().is_subset(q);
    let backward = bwsem(cmd, dom, &q.complement()).unwrap().is_subset(&p.complement());
    forward == backward
}

/// Deterministic commands: SIL implies HL. Terminating commands: HL
/// implies SIL. Guards are computed, never assumed.
pub fn check_sil_hl_relation(
    cmd: &Command,
    p: &StateSet,
    q: &StateSet,
    dom: &Arc<DomainConfig>,
) -> bool {
    let sil = valid(Logic::Sil, p, cmd, q, dom);
    let hl = valid(Logic::Hl, p, cmd, q, dom);
    if is_deterministic(cmd, dom).unwrap() && sil && !hl {
        return false;
    }
    if is_terminating(cmd, dom).unwrap() && hl && !sil {
        return false;
    }
    true
}

/// Round-trip inclusions: composing the two semantics loses at most the
/// diverging (resp. unreachable) states.
pub fn check_galois_inequalities(
    cmd: &Command,
    p: &StateSet,
    q: &StateSet,
    dom: &Arc<DomainConfig>,
) -> bool {
    let d = diverging_states(cmd, dom).unwrap();
    let u = unreachable_states(cmd, dom).unwrap();
    let back_fw = bwsem(cmd, dom, &fwsem(cmd, dom, p).unwrap()).unwrap();
    let fw_back = fwsem(cmd, dom, &bwsem(cmd, dom, q).unwrap()).unwrap();
    p.difference(&d).is_subset(&back_fw) && q.difference(&u).is_subset(&fw_back)
}

/// Hunts for two valid triples whose componentwise intersection is invalid.
/// The classic witnesses (a constant assignment for IL, a nondeterministic
/// assignment for SIL) are planted in the search corpus, so the search must
/// succeed within the budget.
pub fn find_conj_counterexample(logic: Logic, cfg: &GenConfig) -> Result<String, String> {
    if !matches!(logic, Logic::Il | Logic::Sil) {
        return Err("conjunction counterexamples only exist for IL and SIL".to_string());
    }
    // planted instances over a domain that houses the value 10
    let dom = DomainConfig::new(16, vec!["x".to_string()]).unwrap();
    let one = |v: u64| StateSet::from_bexp(&dom, &BExp::Cmp(CmpOp::Eq, AExp::Var(0), AExp::Lit(v)));
    let planted: (Command, StateSet, StateSet, StateSet, StateSet) = match logic {
        Logic::Il => (
            Command::Atomic(AtomicCmd::Assign(0, AExp::Lit(1))),
            one(0),
            one(10),
            one(1),
            one(1),
        ),
        Logic::Sil => (
            Command::Atomic(AtomicCmd::Havoc(0)),
            one(1),
            one(1),
            one(0),
            one(10),
        ),
        _ => unreachable!(),
    };

    let mut candidates: Vec<(Arc<DomainConfig>, Command, StateSet, StateSet, StateSet, StateSet)> =
        vec![(dom.clone(), planted.0, planted.1, planted.2, planted.3, planted.4)];
    let gen_dom = cfg.domain();
    for i in 0..cfg.instances {
        let inst = instance(cfg, &gen_dom, i);
        candidates.push((gen_dom.clone(), inst.cmd, inst.p1, inst.p2, inst.q1, inst.q2));
    }

    for (dom, cmd, p1, p2, q1, q2) in candidates {
        let both_valid = valid(logic, &p1, &cmd, &q1, &dom) && valid(logic, &p2, &cmd, &q2, &dom);
        if !both_valid {
            continue;
        }
        let meet_invalid = !valid(logic, &p1.intersect(&p2), &cmd, &q1.intersect(&q2), &dom);
        if meet_invalid {
            return Ok(format!(
                "{logic} conjunction fails on r = {}; P1({}) P2({}) Q1({}) Q2({})",
                print_command(&cmd, dom.vars()),
                crate::describe::render_pretty(&p1),
                crate::describe::render_pretty(&p2),
                crate::describe::render_pretty(&q1),
                crate::describe::render_pretty(&q2),
            ));
        }
    }
    Err(format!("search budget of {} instances exhausted without a {logic} conjunction counterexample", cfg.instances))
}

/// The planted constant-assignment instance shows IL and SIL agreeing on
/// (P, Q) while both negated-variant triples fail; fuzzing then hunts for
/// one-sided witnesses in each direction.
pub fn check_il_sil_incomparable(cfg: &GenConfig) -> (Vec<String>, Vec<String>) {
    let mut violations = Vec::new();
    let mut notes = Vec::new();

    // `x >= 0` from the unbounded setting degenerates to the full set here
    // (values are nonnegative), which would make the negated triples
    // vacuous; `x >= 2` plays the same role with a nonempty complement.
    let dom = DomainConfig::new(16, vec!["x".to_string()]).unwrap();
    let vars = dom.vars().to_vec();
    let cmd = Command::Atomic(AtomicCmd::Assign(0, AExp::Lit(1)));
    let p = StateSet::from_bexp(&dom, &crate::syntax::parse_bexp("x >= 2", &vars).unwrap());
    let q = StateSet::from_bexp(&dom, &crate::syntax::parse_bexp("x = 1", &vars).unwrap());

    let sil = valid(Logic::Sil, &p, &cmd, &q, &dom);
    let il = valid(Logic::Il, &p, &cmd, &q, &dom);
    let neg_sil = valid(Logic::Sil, &p.complement(), &cmd, &q.complement(), &dom);
    let neg_il = valid(Logic::Il, &p.complement(), &cmd, &q.complement(), &dom);
    if !(sil && il && !neg_sil && !neg_il) {
        violations.push(format!(
            "planted constant-assignment instance gave verdicts SIL={sil} IL={il} negSIL={neg_sil} negIL={neg_il}"
        ));
    } else {
        notes.push("planted instance: SIL and IL valid, both negated variants invalid".to_string());
    }

    let dom = cfg.domain();
    let mut sil_not_il = None;
    let mut il_not_sil = None;
    for i in 0..cfg.instances {
        let inst = instance(cfg, &dom, i);
        let sil = valid(Logic::Sil, &inst.p1, &inst.cmd, &inst.q1, &dom);
        let il = valid(Logic::Il, &inst.p1, &inst.cmd, &inst.q1, &dom);
        if sil && !il && sil_not_il.is_none() {
            sil_not_il = Some(i);
        }
        if il && !sil && il_not_sil.is_none() {
            il_not_sil = Some(i);
        }
        if sil_not_il.is_some() && il_not_sil.is_some() {
            break;
        }
    }
    match sil_not_il {
        Some(i) => notes.push(format!("instance {i}: SIL valid while IL invalid")),
        None => violations.push("no instance found with SIL valid and IL invalid".to_string()),
    }
    match il_not_sil {
        Some(i) => notes.push(format!("instance {i}: IL valid while SIL invalid")),
        None => violations.push("no instance found with IL valid and SIL invalid".to_string()),
    }
    (violations, notes)
}

/// Admissibility of the shared structural rules, logic by logic, plus
/// concrete counterexamples for the cells that are unsound for HL.
fn check_rule_table(cfg: &GenConfig, dom: &Arc<DomainConfig>) -> (Vec<String>, Vec<String>) {
    let mut violations = Vec::new();
    let mut notes = Vec::new();

    for i in 0..cfg.instances {
        let inst = instance(cfg, &dom.clone(), i);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64) ^ 0x517e);
        let Instance { cmd, p1, p2, q1, q2 } = &inst;

        // cons: shrink/grow directions per logic
        for (logic, shrink_pre) in [(Logic::Sil, true), (Logic::Hl, true), (Logic::Il, false), (Logic::Nc, false)] {
            if valid(logic, p1, cmd, q1, dom) {
                let (p_new, q_new) = if shrink_pre {
                    (p1.intersect(p2), q1.union(q2))
                } else {
                    (p1.union(p2), q1.intersect(q2))
                };
                if !valid(logic, &p_new, cmd, &q_new, dom) {
                    violations.push(format!("instance {i}: cons unsound for {logic}"));
                }
            }
        }

        // disj: sound for every logic
        for logic in [Logic::Sil, Logic::Hl, Logic::Il, Logic::Nc] {
            if valid(logic, p1, cmd, q1, dom) && valid(logic, p2, cmd, q2, dom) {
                if !valid(logic, &p1.union(p2), cmd, &q1.union(q2), dom) {
                    violations.push(format!("instance {i}: disj unsound for {logic}"));
                }
            }
        }

        // empty: vacuous side per logic
        if !valid(Logic::Sil, &StateSet::empty(dom), cmd, q1, dom)
            || !valid(Logic::Hl, &StateSet::empty(dom), cmd, q1, dom)
            || !valid(Logic::Il, p1, cmd, &StateSet::empty(dom), dom)
        {
            violations.push(format!("instance {i}: empty rule unsound"));
        }

        // seq: compose through a random midpoint
        let seq_cmd = Command::seq(cmd.clone(), cmd.clone());
        let mid = gen_state_set(cfg, &mut rng, dom);
        for logic in [Logic::Sil, Logic::Hl, Logic::Il] {
            if valid(logic, p1, cmd, &mid, dom)
                && valid(logic, &mid, cmd, q1, dom)
                && !valid(logic, p1, &seq_cmd, q1, dom)
            {
                violations.push(format!("instance {i}: seq unsound for {logic}"));
            }
        }

        // iter0 / unroll / unroll-split: sound for the under-approximate logics
        let star_cmd = Command::star(cmd.clone());
        let unrolled = Command::seq(star_cmd.clone(), cmd.clone());
        if !valid(Logic::Sil, q1, &star_cmd, q1, dom) || !valid(Logic::Il, p1, &star_cmd, p1, dom) {
            violations.push(format!("instance {i}: iter0 unsound for an under-approximate logic"));
        }
        for logic in [Logic::Sil, Logic::Il] {
            if valid(logic, p1, &unrolled, q1, dom) && !valid(logic, p1, &star_cmd, q1, dom) {
                violations.push(format!("instance {i}: unroll unsound for {logic}"));
            }
        }
        if valid(Logic::Sil, p1, &unrolled, q1, dom)
            && !valid(Logic::Sil, &p1.union(q2), &star_cmd, &q1.union(q2), dom)
        {
            violations.push(format!("instance {i}: unroll-split unsound for SIL"));
        }
        if valid(Logic::Il, p1, &unrolled, q1, dom)
            && !valid(Logic::Il, &p1.union(p2), &star_cmd, &q1.union(p2), dom)
        {
            violations.push(format!("instance {i}: unroll-split unsound for IL"));
        }
    }

    // the HL-unsound cells need concrete counterexamples
    let cdom = DomainConfig::new(8, vec!["x".to_string()]).unwrap();
    let vars = cdom.vars().to_vec();
    let inc = crate::syntax::parse_command("x := x + 1", &vars, false).unwrap();
    let x0 = StateSet::from_bexp(&cdom, &crate::syntax::parse_bexp("x = 0", &vars).unwrap());
    if valid(Logic::Hl, &x0, &Command::star(inc.clone()), &x0, &cdom) {
        violations.push("expected iter0 counterexample for HL did not fail".to_string());
    } else {
        notes.push("iter0 is unsound for HL (increment loop leaves the invariant)".to_string());
    }

    let set1 = StateSet::from_bexp(&cdom, &crate::syntax::parse_bexp("x = 1", &vars).unwrap());
    let assign1 = crate::syntax::parse_command("x := 1", &vars, false).unwrap();
    let star1 = Command::star(assign1.clone());
    let unrolled1 = Command::seq(star1.clone(), assign1);
    let premise_holds = valid(Logic::Hl, &StateSet::full(&cdom), &unrolled1, &set1, &cdom);
    let conclusion_holds = valid(Logic::Hl, &StateSet::full(&cdom), &star1, &set1, &cdom);
    if premise_holds && !conclusion_holds {
        notes.push("unroll and unroll-split are unsound for HL (zero iterations escape)".to_string());
    } else {
        violations.push("expected unroll counterexample for HL did not fail".to_string());
    }

    (violations, notes)
}

/// Soundness and completeness in one loop: a derivation is obtainable
/// exactly for the valid triples, synthesized derivations check, and any
/// randomly built tree the checker accepts has a valid conclusion.
fn check_proof_roundtrip(
    cfg: &GenConfig,
    inst: &Instance,
    dom: &Arc<DomainConfig>,
    i: usize,
) -> Option<String> {
    let is_valid = valid(Logic::Sil, &inst.p1, &inst.cmd, &inst.q1, dom);
    let derived = derive_then_weaken(&inst.cmd, dom, &inst.p1, &inst.q1).unwrap();
    match (&derived, is_valid) {
        (Some(_), false) => return Some(format!("instance {i}: derivation produced for an invalid triple")),
        (None, true) => return Some(format!("instance {i}: no derivation for a valid triple")),
        _ => {}
    }
    if let Some(d) = derived {
        if let Err(e) = check_derivation(&d, dom) {
            return Some(format!("instance {i}: synthesized derivation rejected: {e}"));
        }
    }

    // random rule application, sometimes mutated; acceptance must imply
    // validity of the conclusion
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64) ^ 0xd3c1);
    let tree = gen_derivation(&mut rng, dom, &inst.cmd, &inst.q1, 3);
    if check_derivation(&tree, dom).is_ok() {
        if !valid(Logic::Sil, &tree.pre, &tree.cmd, &tree.post, dom) {
            return Some(format!(
                "instance {i}: checker accepted a derivation with an invalid conclusion ({})",
                print_command(&tree.cmd, dom.vars())
            ));
        }
    }
    None
}

/// Builds a mostly-correct random derivation for `cmd` ending at `post`,
/// with occasional set mutations that the checker is expected to catch.
pub fn gen_derivation(
    rng: &mut ChaCha8Rng,
    dom: &Arc<DomainConfig>,
    cmd: &Command,
    post: &StateSet,
    fuel: usize,
) -> Derivation {
    let mut d = gen_derivation_correct(rng, dom, cmd, post, fuel);
    if rng.gen_bool(0.25) {
        // flip one random state in the root's pre or post
        let id = rng.gen_range(0..dom.size()) as u32;
        let target = if rng.gen_bool(0.5) { &mut d.pre } else { &mut d.post };
        let mut onebit = StateSet::empty(dom);
        onebit.insert(id);
        *target = if target.contains(id) { target.difference(&onebit) } else { target.union(&onebit) };
    }
    d
}

fn gen_derivation_correct(
    rng: &mut ChaCha8Rng,
    dom: &Arc<DomainConfig>,
    cmd: &Command,
    post: &StateSet,
    fuel: usize,
) -> Derivation {
    let leaf_empty = |post: &StateSet| Derivation {
        rule: SilRule::Empty,
        pre: StateSet::empty(dom),
        cmd: cmd.clone(),
        post: post.clone(),
        premises: Vec::new(),
    };
    if fuel == 0 {
        return match cmd {
            Command::Atomic(_) => Derivation {
                rule: SilRule::Atom,
                pre: bwsem(cmd, dom, post).unwrap(),
                cmd: cmd.clone(),
                post: post.clone(),
                premises: Vec::new(),
            },
            Command::Star(_) => Derivation {
                rule: SilRule::Iter0,
                pre: post.clone(),
                cmd: cmd.clone(),
                post: post.clone(),
                premises: Vec::new(),
            },
            _ => leaf_empty(post),
        };
    }

    // structural rules available for every shape
    if rng.gen_bool(0.15) {
        return leaf_empty(post);
    }
    if rng.gen_bool(0.15) {
        // cons around a recursive premise with a shrunk post
        let sub = random_subset(rng, post, dom);
        let premise = gen_derivation_correct(rng, dom, cmd, &sub, fuel - 1);
        let pre = random_subset(rng, &premise.pre, dom);
        return Derivation {
            rule: SilRule::Cons,
            pre,
            cmd: cmd.clone(),
            post: post.clone(),
            premises: vec![premise],
        };
    }
    if rng.gen_bool(0.1) {
        // disj with a random split of the post
        let q1 = random_subset(rng, post, dom);
        let q2 = post.difference(&q1);
        let d1 = gen_derivation_correct(rng, dom, cmd, &q1, fuel - 1);
        let d2 = gen_derivation_correct(rng, dom, cmd, &q2, fuel - 1);
        return Derivation {
            rule: SilRule::Disj,
            pre: d1.pre.union(&d2.pre),
            cmd: cmd.clone(),
            post: q1.union(&q2),
            premises: vec![d1, d2],
        };
    }

    match cmd {
        Command::Atomic(_) => Derivation {
            rule: SilRule::Atom,
            pre: bwsem(cmd, dom, post).unwrap(),
            cmd: cmd.clone(),
            post: post.clone(),
            premises: Vec::new(),
        },
        Command::Seq(r1, r2) => {
            let d2 = gen_derivation_correct(rng, dom, r2, post, fuel - 1);
            let d1 = gen_derivation_correct(rng, dom, r1, &d2.pre.clone(), fuel - 1);
            Derivation {
                rule: SilRule::Seq,
                pre: d1.pre.clone(),
                cmd: cmd.clone(),
                post: post.clone(),
                premises: vec![d1, d2],
            }
        }
        Command::Choice(r1, r2) => {
            let d1 = gen_derivation_correct(rng, dom, r1, post, fuel - 1);
            let d2 = gen_derivation_correct(rng, dom, r2, post, fuel - 1);
            Derivation {
                rule: SilRule::Choice,
                pre: d1.pre.union(&d2.pre),
                cmd: cmd.clone(),
                post: post.clone(),
                premises: vec![d1, d2],
            }
        }
        Command::Star(body) => match rng.gen_range(0..4) {
            0 => Derivation {
                rule: SilRule::Iter0,
                pre: post.clone(),
                cmd: cmd.clone(),
                post: post.clone(),
                premises: Vec::new(),
            },
            1 => {
                let premise =
                    gen_derivation_correct(rng, dom, &Command::seq(cmd.clone(), (**body).clone()), post, fuel - 1);
                Derivation {
                    rule: SilRule::Unroll,
                    pre: premise.pre.clone(),
                    cmd: cmd.clone(),
                    post: post.clone(),
                    premises: vec![premise],
                }
            }
            2 => {
                let q1 = random_subset(rng, post, dom);
                let q2 = post.difference(&q1);
                let premise =
                    gen_derivation_correct(rng, dom, &Command::seq(cmd.clone(), (**body).clone()), &q1, fuel - 1);
                Derivation {
                    rule: SilRule::UnrollSplit,
                    pre: premise.pre.union(&q2),
                    cmd: cmd.clone(),
                    post: q1.union(&q2),
                    premises: vec![premise],
                }
            }
            _ => {
                let n = rng.gen_range(0..3);
                let mut premises = Vec::new();
                let mut union = post.clone();
                let mut level = post.clone();
                for _ in 0..n {
                    let p = gen_derivation_correct(rng, dom, body, &level, fuel - 1);
                    level = p.pre.clone();
                    union.union_with(&level);
                    premises.push(p);
                }
                Derivation {
                    rule: SilRule::Iter,
                    pre: union,
                    cmd: cmd.clone(),
                    post: post.clone(),
                    premises,
                }
            }
        },
    }
}

fn random_subset(rng: &mut ChaCha8Rng, s: &StateSet, dom: &Arc<DomainConfig>) -> StateSet {
    let mut out = StateSet::empty(dom);
    for id in s.iter() {
        if rng.gen_bool(0.7) {
            out.insert(id);
        }
    }
    out
}
