//! Relaxed nets, their strongly connected components, rich/poor
//! classification, siphons, and bounded carrier/self-cover searches.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use fixedbitset::FixedBitSet;
use indexmap::IndexSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::classify::{dummy_augment, presentation, ClassifyError};
use crate::net::{Marking, Net, PlaceId, TransId};

/// Default number of explored states for the bounded searches.
pub const DEFAULT_NODE_BUDGET: usize = 200_000;

/// The subnet of moving edges: source → t → destinations, all weight 1.
/// Built over the dummy-augmented place set when the net needs it.
#[derive(Debug, Clone)]
pub struct RelaxedNet {
    pub net: Net,
    pub dummy: Option<PlaceId>,
}

pub fn relaxed_net(net: &Net) -> Result<RelaxedNet, ClassifyError> {
    let aug = dummy_augment(net)?;
    let n = &aug.net;
    let mut pre = Vec::with_capacity(n.num_transitions());
    let mut post = Vec::with_capacity(n.num_transitions());
    for t in 0..n.num_transitions() {
        let pr = presentation(n, t)?;
        pre.push(vec![(pr.source, 1)]);
        post.push(pr.destinations.iter().map(|&(p, _)| (p, 1)).collect());
    }
    let relaxed = Net::from_arcs(
        format!("{}_relaxed", n.name()),
        n.places().to_vec(),
        n.transitions().to_vec(),
        pre,
        post,
    )?;
    Ok(RelaxedNet {
        net: relaxed,
        dummy: aug.dummy,
    })
}

/// A strongly connected component of the relaxed net's graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub places: Vec<PlaceId>,
    pub transitions: Vec<TransId>,
    pub is_top: bool,
    pub is_bottom: bool,
}

impl Component {
    /// A single vertex (the graph is bipartite, so it has no self-loop).
    pub fn is_trivial(&self) -> bool {
        self.places.len() + self.transitions.len() == 1
    }
}

/// SCCs of the bipartite graph of `net` (places first, then transitions),
/// in topological order; ties are broken by the lowest vertex index.
pub fn sccs_of(net: &Net) -> Vec<Component> {
    let np = net.num_places();
    let nv = np + net.num_transitions();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(nv, 0);
    for _ in 0..nv {
        g.add_node(());
    }
    for t in 0..net.num_transitions() {
        for &(p, _) in net.pre(t) {
            g.add_edge(NodeIndex::new(p), NodeIndex::new(np + t), ());
        }
        for &(p, _) in net.post(t) {
            g.add_edge(NodeIndex::new(np + t), NodeIndex::new(p), ());
        }
    }
    let raw = tarjan_scc(&g);
    let mut comp_of = vec![0usize; nv];
    for (c, vs) in raw.iter().enumerate() {
        for v in vs {
            comp_of[v.index()] = c;
        }
    }
    let k = raw.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut indeg = vec![0usize; k];
    let mut has_pred = vec![false; k];
    for e in g.raw_edges() {
        let (a, b) = (comp_of[e.source().index()], comp_of[e.target().index()]);
        if a != b && !succ[a].contains(&b) {
            succ[a].push(b);
            indeg[b] += 1;
            has_pred[b] = true;
        }
    }
    let lowest: Vec<usize> = raw
        .iter()
        .map(|vs| vs.iter().map(|v| v.index()).min().unwrap_or(0))
        .collect();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..k)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((lowest[c], c)))
        .collect();
    let mut out = Vec::with_capacity(k);
    while let Some(Reverse((_, c))) = heap.pop() {
        let mut vs: Vec<usize> = raw[c].iter().map(|v| v.index()).collect();
        vs.sort_unstable();
        out.push(Component {
            places: vs.iter().copied().filter(|&v| v < np).collect(),
            transitions: vs.iter().filter(|&&v| v >= np).map(|&v| v - np).collect(),
            is_top: !has_pred[c],
            is_bottom: succ[c].is_empty(),
        });
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                heap.push(Reverse((lowest[d], d)));
            }
        }
    }
    out
}

pub fn sccs(relaxed: &RelaxedNet) -> Vec<Component> {
    sccs_of(&relaxed.net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Richness {
    Rich,
    Poor,
}

/// Rich iff the component's places hold at least as many tokens as there
/// are places (components without places are rich). `m` may be a marking of
/// the original net; the dummy place then counts as marked.
pub fn rich_poor(relaxed: &RelaxedNet, m: &Marking) -> Vec<(Component, Richness)> {
    let m = lift_to(relaxed, m);
    sccs(relaxed)
        .into_iter()
        .map(|c| {
            let tokens: u64 = c.places.iter().map(|&p| u64::from(m[p])).sum();
            let r = if tokens >= c.places.len() as u64 {
                Richness::Rich
            } else {
                Richness::Poor
            };
            (c, r)
        })
        .collect()
}

fn lift_to(relaxed: &RelaxedNet, m: &Marking) -> Marking {
    if m.len() + 1 == relaxed.net.num_places() && relaxed.dummy.is_some() {
        let mut v = m.counts().to_vec();
        v.push(1);
        Marking::new(v)
    } else {
        m.clone()
    }
}

/// Every transition that puts tokens into `s` also takes tokens from `s`.
pub fn is_siphon(net: &Net, s: &[PlaceId]) -> bool {
    let mask = place_mask(net, s);
    is_siphon_mask(net, &mask)
}

fn is_siphon_mask(net: &Net, mask: &FixedBitSet) -> bool {
    (0..net.num_transitions()).all(|t| {
        !net.post(t).iter().any(|&(p, _)| mask[p]) || net.pre(t).iter().any(|&(p, _)| mask[p])
    })
}

fn place_mask(net: &Net, s: &[PlaceId]) -> FixedBitSet {
    let mut mask = FixedBitSet::with_capacity(net.num_places());
    for &p in s {
        mask.insert(p);
    }
    mask
}

/// Largest siphon contained in `candidates`: repeatedly drop places fed by
/// a transition that takes nothing from the current set.
fn largest_siphon_within(net: &Net, mut mask: FixedBitSet) -> FixedBitSet {
    loop {
        let mut changed = false;
        for t in 0..net.num_transitions() {
            if net.pre(t).iter().any(|&(p, _)| mask[p]) {
                continue;
            }
            for &(p, _) in net.post(t) {
                if mask[p] {
                    mask.set(p, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return mask;
        }
    }
}

/// Some nonempty siphon unmarked at `m`, or `None`. Without `minimize` the
/// largest unmarked siphon is returned; with it, places are greedily removed
/// in index order while a nonempty siphon remains.
pub fn minimal_unmarked_siphon(net: &Net, m: &Marking, minimize: bool) -> Option<Vec<PlaceId>> {
    let unmarked: Vec<PlaceId> = (0..net.num_places()).filter(|&p| m[p] == 0).collect();
    let mut mask = largest_siphon_within(net, place_mask(net, &unmarked));
    if mask.count_ones(..) == 0 {
        return None;
    }
    if minimize {
        for p in 0..net.num_places() {
            if !mask[p] {
                continue;
            }
            let mut trial = mask.clone();
            trial.set(p, false);
            let trial = largest_siphon_within(net, trial);
            if trial.count_ones(..) > 0 {
                mask = trial;
            }
        }
    }
    Some(mask.ones().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelfCoverability {
    /// A full sequence σ with `m →σ m' ≥ m`.
    Yes(Vec<TransId>),
    No,
    BudgetExceeded { explored: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CarrierMaximality {
    Yes,
    /// A reachable marking with a strictly larger carrier.
    No(Marking),
    BudgetExceeded { explored: usize },
}

/// Searches for `m →σ m'` with `m ≤ m'` and every transition occurring in σ.
pub fn is_self_coverable(net: &Net, m: &Marking, node_budget: usize) -> SelfCoverability {
    let nt = net.num_transitions();
    let full = {
        let mut b = FixedBitSet::with_capacity(nt);
        b.insert_range(..);
        b
    };
    let start = (m.clone(), FixedBitSet::with_capacity(nt));
    if start.1 == full {
        return SelfCoverability::Yes(Vec::new());
    }
    let mut seen: IndexSet<(Marking, FixedBitSet)> = IndexSet::new();
    let mut parent: Vec<Option<(usize, TransId)>> = Vec::new();
    seen.insert(start);
    parent.push(None);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (cur, used) = seen.get_index(i).cloned().expect("queued index");
        for t in 0..nt {
            if !net.enabled(&cur, t) {
                continue;
            }
            let next = net.fire_unchecked(&cur, t);
            let mut u = used.clone();
            u.insert(t);
            let done = u == full && m.le(&next);
            let (j, fresh) = seen.insert_full((next, u));
            if fresh {
                parent.push(Some((i, t)));
                if done {
                    return SelfCoverability::Yes(trace(&parent, j));
                }
                if seen.len() > node_budget {
                    return SelfCoverability::BudgetExceeded {
                        explored: seen.len(),
                    };
                }
                queue.push_back(j);
            }
        }
    }
    SelfCoverability::No
}

fn trace(parent: &[Option<(usize, TransId)>], mut j: usize) -> Vec<TransId> {
    let mut seq = Vec::new();
    while let Some((i, t)) = parent[j] {
        seq.push(t);
        j = i;
    }
    seq.reverse();
    seq
}

/// Searches the reachability set for a marking with a larger carrier.
pub fn is_carrier_maximal(net: &Net, m: &Marking, node_budget: usize) -> CarrierMaximality {
    let size = m.carrier().len();
    let mut seen: IndexSet<Marking> = IndexSet::new();
    seen.insert(m.clone());
    let mut i = 0;
    while i < seen.len() {
        let cur = seen[i].clone();
        i += 1;
        for t in 0..net.num_transitions() {
            if !net.enabled(&cur, t) {
                continue;
            }
            let next = net.fire_unchecked(&cur, t);
            if next.carrier().len() > size {
                return CarrierMaximality::No(next);
            }
            if seen.insert(next) && seen.len() > node_budget {
                return CarrierMaximality::BudgetExceeded {
                    explored: seen.len(),
                };
            }
        }
    }
    CarrierMaximality::Yes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_net;

    #[test]
    fn edgeless_net_has_singleton_components() {
        let (net, _) = parse_net("net e\nplace a\nplace b\n").unwrap();
        let r = relaxed_net(&net).unwrap();
        let cs = sccs(&r);
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.is_top && c.is_bottom));
    }

    #[test]
    fn siphon_basics() {
        let (net, _) = parse_net("net s\nplace a\nplace b\ntrans t pre a post b\ntrans u pre b post a\n").unwrap();
        assert!(is_siphon(&net, &[]));
        assert!(is_siphon(&net, &[0, 1]));
        assert!(!is_siphon(&net, &[0]));
        let m = Marking::new(vec![0, 0]);
        assert_eq!(minimal_unmarked_siphon(&net, &m, false), Some(vec![0, 1]));
        assert_eq!(minimal_unmarked_siphon(&net, &Marking::new(vec![1, 0]), true), None);
    }

    #[test]
    fn zero_marking_is_not_self_coverable() {
        let (net, _) = parse_net("net s\nplace a\ntrans t pre a post a\n").unwrap();
        let z = Marking::new(vec![0]);
        assert_eq!(is_self_coverable(&net, &z, 100), SelfCoverability::No);
        assert_eq!(is_carrier_maximal(&net, &z, 100), CarrierMaximality::Yes);
        assert_eq!(
            is_self_coverable(&net, &Marking::new(vec![1]), 100),
            SelfCoverability::Yes(vec![0])
        );
    }
}
