//! Rendering state sets back into predicate syntax.
//!
//! Exact sets over a bounded domain can be irreducible, so there are two
//! renderers: [`render_exact`] always produces a predicate that reparses to
//! the same set (used when serializing derivations), while [`render_pretty`]
//! falls back to a count-plus-samples summary when no small cube cover
//! exists.

use crate::semantics::{DomainConfig, StateSet};
use std::sync::Arc;

/// A partial assignment: `None` leaves the variable free.
pub type Cube = Vec<Option<u64>>;

/// Work cap for cube enumeration: the summed size of all candidate cubes is
/// `(2B)^n`, which this keeps within interactive budgets.
const CUBE_WORK_LIMIT: u128 = 1 << 23;

/// Cubes a pretty description may use before falling back to a summary.
const PRETTY_CUBE_LIMIT: usize = 8;

fn cube_work(dom: &DomainConfig) -> u128 {
    let mut w: u128 = 1;
    for _ in 0..dom.var_count() {
        w = w.saturating_mul(2 * dom.modulus() as u128);
    }
    w
}

/// Greedy minimal-ish cover of `s` by cubes contained in `s`.
/// Returns `None` when enumeration would be too expensive.
pub fn cube_cover(s: &StateSet) -> Option<Vec<Cube>> {
    let dom = s.domain().clone();
    if cube_work(&dom) > CUBE_WORK_LIMIT {
        return None;
    }
    if s.is_empty() {
        return Some(Vec::new());
    }

    // every cube fully contained in s, canonically ordered: fewer fixed
    // variables first, then lexicographic
    let mut candidates: Vec<(Cube, Vec<u32>)> = Vec::new();
    let nvars = dom.var_count();
    let modulus = dom.modulus();
    let mut shape = vec![0usize; nvars]; // 0 = free, 1..=B = fixed value
    loop {
        let cube: Cube = shape
            .iter()
            .map(|&c| if c == 0 { None } else { Some(c as u64 - 1) })
            .collect();
        let members = cube_members(&dom, &cube);
        if members.iter().all(|id| s.contains(*id)) {
            candidates.push((cube, members));
        }
        // odometer over shapes
        let mut i = 0;
        loop {
            if i == nvars {
                // fewer fixed variables first, then by the fixed positions
                // and values, so ties resolve toward earlier-declared vars
                candidates.sort_by_key(|(cube, _)| {
                    let fixed: Vec<(usize, u64)> = cube
                        .iter()
                        .enumerate()
                        .filter_map(|(i, c)| c.map(|v| (i, v)))
                        .collect();
                    (fixed.len(), fixed)
                });
                return Some(greedy_cover(s, candidates));
            }
            shape[i] += 1;
            if shape[i] <= modulus as usize {
                break;
            }
            shape[i] = 0;
            i += 1;
        }
    }
}

fn cube_members(dom: &Arc<DomainConfig>, cube: &Cube) -> Vec<u32> {
    let mut out = Vec::new();
    let mut store = vec![0u64; dom.var_count()];
    fill_members(dom, cube, 0, &mut store, &mut out);
    out
}

fn fill_members(dom: &Arc<DomainConfig>, cube: &Cube, i: usize, store: &mut Vec<u64>, out: &mut Vec<u32>) {
    if i == cube.len() {
        out.push(dom.encode(store));
        return;
    }
    match cube[i] {
        Some(v) => {
            store[i] = v;
            fill_members(dom, cube, i + 1, store, out);
        }
        None => {
            for v in 0..dom.modulus() {
                store[i] = v;
                fill_members(dom, cube, i + 1, store, out);
            }
        }
    }
}

fn greedy_cover(s: &StateSet, candidates: Vec<(Cube, Vec<u32>)>) -> Vec<Cube> {
    let mut uncovered = s.clone();
    let mut cover = Vec::new();
    while !uncovered.is_empty() {
        let mut best: Option<(usize, usize)> = None; // (gain, index)
        for (i, (_, members)) in candidates.iter().enumerate() {
            let gain = members.iter().filter(|id| uncovered.contains(**id)).count();
            if gain > 0 && best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, i));
            }
        }
        let (_, i) = best.expect("singleton cubes always cover the remainder");
        for id in &candidates[i].1 {
            let mut one = StateSet::empty(s.domain());
            one.insert(*id);
            uncovered = uncovered.difference(&one);
        }
        cover.push(candidates[i].0.clone());
    }
    cover
}

fn cube_string(cube: &Cube, dom: &DomainConfig) -> String {
    let parts: Vec<String> = cube
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|v| format!("{} = {v}", dom.vars()[i])))
        .collect();
    if parts.is_empty() {
        "true".to_string()
    } else {
        parts.join(" && ")
    }
}

fn join_cubes(cubes: &[Cube], dom: &DomainConfig) -> String {
    if cubes.is_empty() {
        return "false".to_string();
    }
    cubes
        .iter()
        .map(|c| {
            let s = cube_string(c, dom);
            if cubes.len() > 1 && s.contains("&&") {
                format!("({s})")
            } else {
                s
            }
        })
        .collect::<Vec<_>>()
        .join(" || ")
}

/// A predicate that reparses to exactly `s`.
pub fn render_exact(s: &StateSet) -> String {
    let dom = s.domain().clone();
    if s.is_empty() {
        return "false".to_string();
    }
    if *s == StateSet::full(&dom) {
        return "true".to_string();
    }
    if let Some(cubes) = cube_cover(s) {
        return join_cubes(&cubes, &dom);
    }
    // explicit disjunction of members; exact but verbose
    let cubes: Vec<Cube> = s.iter().map(|id| dom.decode(id).into_iter().map(Some).collect()).collect();
    join_cubes(&cubes, &dom)
}

/// Human-oriented description: a small cube disjunction when one exists,
/// otherwise an honest count with the first few member stores.
pub fn render_pretty(s: &StateSet) -> String {
    let dom = s.domain().clone();
    if s.is_empty() {
        return "false".to_string();
    }
    if *s == StateSet::full(&dom) {
        return "true".to_string();
    }
    if let Some(cubes) = cube_cover(s) {
        if cubes.len() <= PRETTY_CUBE_LIMIT {
            return join_cubes(&cubes, &dom);
        }
    }
    let mut out = format!("{} of {} states", s.len(), dom.size());
    out.push_str("; e.g. ");
    let samples: Vec<String> = s.iter().take(3).map(|id| format!("[{}]", dom.store_string(id))).collect();
    out.push_str(&samples.join(", "));
    out
}
