//! Backward coverability: for each transition, the finite basis of minimal
//! markings from which it can eventually become enabled.
//!
//! The basis of an upward-closed target is saturated under minimal
//! predecessors; termination follows from Dickson's lemma. This is exact for
//! every net, bounded or not, which makes "is `t` dead at `M`" a basis lookup.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::net::{Marking, Net, TransId};
use crate::BudgetExceeded;

/// Minimal elements of an upward-closed set of markings.
#[derive(Debug, Clone, Default)]
pub struct UpwardSet {
    basis: Vec<Marking>,
    /// The basis laid out contiguously for membership tests.
    flat: Vec<u32>,
}

impl UpwardSet {
    pub fn basis(&self) -> &[Marking] {
        &self.basis
    }

    pub fn contains(&self, m: &Marking) -> bool {
        self.contains_counts(m.counts())
    }

    /// Same test on a raw count slice.
    pub fn contains_counts(&self, m: &[u32]) -> bool {
        if self.flat.is_empty() && !self.basis.is_empty() {
            return self.basis.iter().any(|b| b.iter().zip(m).all(|(x, y)| x <= y));
        }
        let width = m.len().max(1);
        self.flat
            .chunks_exact(width)
            .any(|b| b.iter().zip(m).all(|(x, y)| x <= y))
    }

    /// Orders the basis smallest total first (the most general elements
    /// answer most membership tests) and packs it.
    fn freeze(&mut self) {
        self.basis.sort_by_key(|b| (b.total(), b.clone()));
        self.flat = self.basis.iter().flat_map(|b| b.iter().copied()).collect();
    }

    /// Inserts `m` unless already covered; drops elements it subsumes.
    fn insert(&mut self, m: Marking) -> bool {
        if self.basis.iter().any(|b| b.le(&m)) {
            return false;
        }
        self.basis.retain(|b| !m.le(b));
        self.basis.push(m);
        true
    }
}

/// Minimal marking `x` with `x ≥ pre(u)` and `x - pre(u) + post(u) ≥ m`.
fn min_predecessor(net: &Net, u: TransId, m: &Marking) -> Marking {
    let mut x = Marking::zero(net.num_places());
    for p in 0..net.num_places() {
        let pre = net.pre_weight(p, u);
        let post = net.post_weight(u, p);
        x[p] = pre + m[p].saturating_sub(post);
    }
    x
}

/// All markings from which `target` can be covered.
///
/// Candidates are expanded smallest-total first, which keeps the number of
/// elements that are inserted and later subsumed low. `limit` bounds the
/// number of inserted elements.
pub fn backward_closure(net: &Net, target: &Marking, limit: usize) -> Result<UpwardSet, BudgetExceeded> {
    let mut set = UpwardSet::default();
    set.insert(target.clone());
    let mut work = BinaryHeap::new();
    work.push(Reverse((target.total(), target.clone())));
    let mut generated = 1usize;
    while let Some(Reverse((_, m))) = work.pop() {
        // Elements subsumed after being queued need no expansion.
        if !set.basis.contains(&m) {
            continue;
        }
        for u in 0..net.num_transitions() {
            let x = min_predecessor(net, u, &m);
            if set.insert(x.clone()) {
                generated += 1;
                if generated > limit {
                    return Err(BudgetExceeded { explored: generated });
                }
                work.push(Reverse((x.total(), x)));
            }
        }
    }
    set.freeze();
    Ok(set)
}

/// Per-transition coverability bases.
#[derive(Debug, Clone)]
pub struct Coverability {
    /// One set per distinct pre-multiset.
    sets: Vec<UpwardSet>,
    set_of: Vec<usize>,
}

impl Coverability {
    pub fn new(net: &Net, limit: usize) -> Result<Self, BudgetExceeded> {
        let mut targets: Vec<Marking> = Vec::new();
        let mut set_of = Vec::with_capacity(net.num_transitions());
        for t in 0..net.num_transitions() {
            let pre = net.pre_mset(t);
            match targets.iter().position(|x| *x == pre) {
                Some(i) => set_of.push(i),
                None => {
                    set_of.push(targets.len());
                    targets.push(pre);
                }
            }
        }
        let sets = targets
            .iter()
            .map(|pre| backward_closure(net, pre, limit))
            .collect::<Result<_, _>>()?;
        Ok(Coverability { sets, set_of })
    }

    /// Whether `t` can become enabled from `m`.
    pub fn coverable(&self, m: &Marking, t: TransId) -> bool {
        self.sets[self.set_of[t]].contains(m)
    }

    pub fn coverable_counts(&self, m: &[u32], t: TransId) -> bool {
        self.sets[self.set_of[t]].contains_counts(m)
    }

    /// Whether some transition is dead at `m`.
    pub fn any_dead(&self, m: &[u32]) -> bool {
        self.sets.iter().any(|s| !s.contains_counts(m))
    }

    /// Transitions dead at `m`.
    pub fn dead_set(&self, m: &Marking) -> Vec<TransId> {
        (0..self.set_of.len()).filter(|&t| !self.coverable(m, t)).collect()
    }

    pub fn basis(&self, t: TransId) -> &[Marking] {
        self.sets[self.set_of[t]].basis()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_net;

    #[test]
    fn chain_basis() {
        // a -> b -> c; t_c needs c.
        let (net, _) = parse_net(
            "net c\nplace a\nplace b\nplace c\ntrans ab pre a post b\ntrans bc pre b post c\ntrans cc pre c post c\n",
        )
        .unwrap();
        let cov = Coverability::new(&net, 1000).unwrap();
        assert!(cov.coverable(&Marking::new(vec![1, 0, 0]), 2));
        assert!(!cov.coverable(&Marking::new(vec![0, 0, 0]), 2));
        assert_eq!(cov.basis(2).len(), 3);
    }

    #[test]
    fn unbounded_net_terminates() {
        // pump: p -> p + q ; t needs q:3
        let (net, _) = parse_net("net u\nplace p\nplace q\ntrans pump pre p post p q\ntrans t pre q:3\n").unwrap();
        let cov = Coverability::new(&net, 1000).unwrap();
        assert!(cov.coverable(&Marking::new(vec![1, 0]), 1));
        assert!(!cov.coverable(&Marking::new(vec![0, 2]), 1));
    }
}
