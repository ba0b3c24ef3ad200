//! Dense bit-set representation of state sets over a fixed finite universe.

use super::DomainConfig;
use std::sync::Arc;

/// A finite set of stores, represented as a packed bitmask indexed by the
/// mixed-radix store encoding of its [`DomainConfig`].
#[derive(Clone)]
pub struct StateSet {
    dom: Arc<DomainConfig>,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(dom: &Arc<DomainConfig>) -> Self {
        let nwords = dom.size().div_ceil(64);
        StateSet { dom: dom.clone(), words: vec![0; nwords] }
    }

    pub fn full(dom: &Arc<DomainConfig>) -> Self {
        let mut s = Self::empty(dom);
        for w in &mut s.words {
            *w = u64::MAX;
        }
        s.clear_tail();
        s
    }

    pub fn from_pred(dom: &Arc<DomainConfig>, mut pred: impl FnMut(&[u64]) -> bool) -> Self {
        let mut s = Self::empty(dom);
        let mut store = vec![0u64; dom.var_count()];
        for id in 0..dom.size() as u32 {
            dom.decode_into(id, &mut store);
            if pred(&store) {
                s.insert(id);
            }
        }
        s
    }

    pub fn singleton(dom: &Arc<DomainConfig>, id: u32) -> Self {
        let mut s = Self::empty(dom);
        s.insert(id);
        s
    }

    pub fn domain(&self) -> &Arc<DomainConfig> {
        &self.dom
    }

    fn clear_tail(&mut self) {
        let size = self.dom.size();
        let rem = size % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn check_compat(&self, other: &Self) {
        assert!(
            self.dom.compatible(&other.dom),
            "state sets from different domains: {:?} vs {:?}",
            self.dom,
            other.dom
        );
    }

    pub fn insert(&mut self, id: u32) {
        debug_assert!((id as usize) < self.dom.size());
        self.words[id as usize / 64] |= 1u64 << (id % 64);
    }

    pub fn contains(&self, id: u32) -> bool {
        (self.words[id as usize / 64] >> (id % 64)) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.check_compat(other);
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
        out
    }

    /// In-place union; reports whether anything was added.
    pub fn union_with(&mut self, other: &Self) -> bool {
        self.check_compat(other);
        let mut changed = false;
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            let next = *w | o;
            changed |= next != *w;
            *w = next;
        }
        changed
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.check_compat(other);
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.check_compat(other);
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        out
    }

    /// Complement relative to the full universe of the domain.
    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_compat(other);
        self.words.iter().zip(&other.words).all(|(w, o)| w & !o == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, w)| {
            let mut bits = *w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros();
                    bits &= bits - 1;
                    Some(wi as u32 * 64 + b)
                }
            })
        })
    }

    /// Least member in the mixed-radix store order, if any.
    pub fn min_elem(&self) -> Option<u32> {
        self.iter().next()
    }
}

impl PartialEq for StateSet {
    fn eq(&self, other: &Self) -> bool {
        self.dom.compatible(&other.dom) && self.words == other.words
    }
}

impl Eq for StateSet {}

impl std::fmt::Debug for StateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.len();
        write!(f, "StateSet({n} of {} states", self.dom.size())?;
        if n > 0 && n <= 8 {
            write!(f, ": ")?;
            for (i, id) in self.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.dom.store_string(id))?;
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom() -> Arc<DomainConfig> {
        DomainConfig::new(3, vec!["x".into(), "y".into()]).unwrap()
    }

    #[test]
    fn boolean_ops_match_a_reference_model() {
        use std::collections::BTreeSet;
        let d = dom();
        let mk = |ids: &[u32]| {
            let mut s = StateSet::empty(&d);
            for &i in ids {
                s.insert(i);
            }
            s
        };
        let a = mk(&[0, 2, 5, 8]);
        let b = mk(&[2, 3, 8]);
        let ra: BTreeSet<u32> = a.iter().collect();
        let rb: BTreeSet<u32> = b.iter().collect();

        assert_eq!(a.union(&b).iter().collect::<BTreeSet<_>>(), &ra | &rb);
        assert_eq!(a.intersect(&b).iter().collect::<BTreeSet<_>>(), &ra & &rb);
        assert_eq!(a.difference(&b).iter().collect::<BTreeSet<_>>(), &ra - &rb);
        let comp: BTreeSet<u32> = (0..9).filter(|i| !ra.contains(i)).collect();
        assert_eq!(a.complement().iter().collect::<BTreeSet<_>>(), comp);
        assert_eq!(a.len(), 4);
        assert!(mk(&[2, 8]).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.min_elem(), Some(0));
    }

    #[test]
    fn complement_is_relative_to_the_universe() {
        let d = dom();
        let full = StateSet::full(&d);
        assert_eq!(full.len(), 9);
        assert!(StateSet::empty(&d).complement() == full);
        assert!(full.complement().is_empty());
    }
}
