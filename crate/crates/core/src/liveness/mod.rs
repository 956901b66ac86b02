//! Exact liveness by explicit exploration, DL-markings and witnesses.

use fixedbitset::FixedBitSet;
use indexmap::IndexSet;
use petgraph::algo::kosaraju_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::coverability::Coverability;
use crate::net::{Marking, Net, TransId};
use crate::BudgetExceeded;

mod paste;
mod witness;

pub use paste::{paste_down, PasteError, PastedExecution};

pub use witness::{
    check_witness, find_witness, Check, PathStep, Variant, Witness, WitnessCheck, WitnessError,
    WitnessOptions, WitnessSearch, DEFAULT_SUBSET_CAP,
};

/// Breadth-first reachability graph. Node 0 is the root.
#[derive(Debug, Clone)]
pub struct ReachGraph {
    pub nodes: IndexSet<Marking>,
    pub edges: Vec<Vec<(TransId, usize)>>,
}

impl ReachGraph {
    pub fn root(&self) -> &Marking {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Explores all markings reachable from `m0`, failing once more than
/// `node_budget` markings have been discovered.
pub fn reach_graph(net: &Net, m0: &Marking, node_budget: usize) -> Result<ReachGraph, BudgetExceeded> {
    let mut nodes = IndexSet::new();
    nodes.insert(m0.clone());
    let mut edges: Vec<Vec<(TransId, usize)>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let cur = nodes[i].clone();
        let mut out = Vec::new();
        for t in 0..net.num_transitions() {
            if net.enabled(&cur, t) {
                let (j, _) = nodes.insert_full(net.fire_unchecked(&cur, t));
                out.push((t, j));
            }
        }
        if nodes.len() > node_budget {
            return Err(BudgetExceeded {
                explored: nodes.len(),
            });
        }
        edges.push(out);
        i += 1;
    }
    Ok(ReachGraph { nodes, edges })
}

/// Whether no marking reachable from `m` enables `t`; the forward search
/// stops as soon as one covers the pre-multiset of `t`.
pub fn dead_at(net: &Net, m: &Marking, t: TransId, node_budget: usize) -> Result<bool, BudgetExceeded> {
    let mut nodes = IndexSet::new();
    nodes.insert(m.clone());
    let mut i = 0;
    while i < nodes.len() {
        let cur = nodes[i].clone();
        if net.enabled(&cur, t) {
            return Ok(false);
        }
        for u in 0..net.num_transitions() {
            if net.enabled(&cur, u) {
                nodes.insert(net.fire_unchecked(&cur, u));
            }
        }
        if nodes.len() > node_budget {
            return Err(BudgetExceeded {
                explored: nodes.len(),
            });
        }
        i += 1;
    }
    Ok(true)
}

/// Per-node liveness information of a complete reachability graph.
///
/// For each transition `t`, an SCC *attracts* `t` when `t` is enabled in it
/// or in some SCC reachable from it. `t` is dead at a node iff the node's
/// SCC does not attract it, and live iff every SCC reachable from it does.
#[derive(Debug, Clone)]
pub struct GraphLiveness {
    comp_of: Vec<usize>,
    attract: Vec<FixedBitSet>,
    live: Vec<FixedBitSet>,
    num_transitions: usize,
}

impl GraphLiveness {
    pub fn new(net: &Net, graph: &ReachGraph) -> Self {
        let n = graph.len();
        let nt = net.num_transitions();
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
        for _ in 0..n {
            g.add_node(());
        }
        for (i, out) in graph.edges.iter().enumerate() {
            for &(_, j) in out {
                g.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
            }
        }
        // Reverse topological order: successors of an SCC come first. The
        // iterative algorithm keeps deep graphs off the call stack.
        let comps = kosaraju_scc(&g);
        let mut comp_of = vec![0; n];
        for (c, vs) in comps.iter().enumerate() {
            for v in vs {
                comp_of[v.index()] = c;
            }
        }
        let empty = FixedBitSet::with_capacity(nt);
        let mut attract = vec![empty.clone(); comps.len()];
        let mut live = vec![empty; comps.len()];
        for (c, vs) in comps.iter().enumerate() {
            let mut att = FixedBitSet::with_capacity(nt);
            let mut lv = FixedBitSet::with_capacity(nt);
            lv.insert_range(..);
            for v in vs {
                for &(t, j) in &graph.edges[v.index()] {
                    att.insert(t);
                    let d = comp_of[j];
                    if d != c {
                        att.union_with(&attract[d]);
                        lv.intersect_with(&live[d]);
                    }
                }
            }
            lv.intersect_with(&att);
            attract[c] = att;
            live[c] = lv;
        }
        GraphLiveness {
            comp_of,
            attract,
            live,
            num_transitions: nt,
        }
    }

    /// Transitions dead at node `v`.
    pub fn dead_at(&self, v: usize) -> Vec<TransId> {
        let a = &self.attract[self.comp_of[v]];
        (0..self.num_transitions).filter(|&t| !a[t]).collect()
    }

    /// Transitions live at node `v`.
    pub fn live_at(&self, v: usize) -> Vec<TransId> {
        self.live[self.comp_of[v]].ones().collect()
    }

    pub fn is_live(&self, v: usize) -> bool {
        self.live[self.comp_of[v]].count_ones(..) == self.num_transitions
    }

    /// Every transition is dead or live at `v`, and at least one is dead.
    pub fn is_dl(&self, v: usize) -> bool {
        let c = self.comp_of[v];
        let dead = self.num_transitions - self.attract[c].count_ones(..);
        dead > 0 && dead + self.live[c].count_ones(..) == self.num_transitions
    }
}

/// Decides liveness of `m0` from its complete reachability graph.
pub fn is_live_exact(net: &Net, m0: &Marking, node_budget: usize) -> Result<bool, BudgetExceeded> {
    let graph = reach_graph(net, m0, node_budget)?;
    Ok(GraphLiveness::new(net, &graph).is_live(0))
}

/// A marking at which every transition is dead or live, with at least one dead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlMarking {
    pub marking: Marking,
    pub dead: Vec<TransId>,
    pub live: Vec<TransId>,
}

/// Finds a reachable DL-marking (the first in breadth-first order).
///
/// When the reachability set of `m0` fits the budget the answer is exact and
/// `None` means `m0` is live. Otherwise reachable markings are scanned in
/// breadth-first order; dead sets come from backward coverability, and a
/// candidate is accepted once its own (finite) reachability set shows that
/// no further transition ever dies.
pub fn find_dl_marking(net: &Net, m0: &Marking, node_budget: usize) -> Result<Option<DlMarking>, BudgetExceeded> {
    match reach_graph(net, m0, node_budget) {
        Ok(graph) => {
            let gl = GraphLiveness::new(net, &graph);
            Ok((0..graph.len()).find(|&v| gl.is_dl(v)).map(|v| DlMarking {
                marking: graph.nodes[v].clone(),
                dead: gl.dead_at(v),
                live: gl.live_at(v),
            }))
        }
        Err(_) => {
            let cov = Coverability::new(net, node_budget)?;
            let sub_budget = (node_budget / 16).max(1000);
            let mut nodes = IndexSet::new();
            nodes.insert(m0.clone());
            let mut i = 0;
            while i < nodes.len() && nodes.len() <= node_budget {
                let cur = nodes[i].clone();
                i += 1;
                let dead = cov.dead_set(&cur);
                if !dead.is_empty() && keeps_dead_set(net, &cov, &cur, &dead, sub_budget) {
                    let live = (0..net.num_transitions()).filter(|t| !dead.contains(t)).collect();
                    return Ok(Some(DlMarking {
                        marking: cur,
                        dead,
                        live,
                    }));
                }
                for t in 0..net.num_transitions() {
                    if net.enabled(&cur, t) {
                        nodes.insert(net.fire_unchecked(&cur, t));
                    }
                }
            }
            Err(BudgetExceeded {
                explored: nodes.len(),
            })
        }
    }
}

/// Whether the reachability set of `m` is finite within budget and every
/// marking in it has exactly the dead set `dead`.
fn keeps_dead_set(net: &Net, cov: &Coverability, m: &Marking, dead: &[TransId], budget: usize) -> bool {
    let mut nodes = IndexSet::new();
    nodes.insert(m.clone());
    let mut i = 0;
    while i < nodes.len() {
        let cur = nodes[i].clone();
        i += 1;
        if cov.dead_set(&cur).len() != dead.len() {
            return false;
        }
        for t in 0..net.num_transitions() {
            if net.enabled(&cur, t) {
                nodes.insert(net.fire_unchecked(&cur, t));
                if nodes.len() > budget {
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
    use crate::net::parse_net;

    #[test]
    fn no_transitions_is_live() {
        let (net, _) = parse_net("net e\nplace p\n").unwrap();
        assert!(is_live_exact(&net, &Marking::new(vec![0]), 10).unwrap());
        assert_eq!(reach_graph(&net, &Marking::new(vec![3]), 10).unwrap().len(), 1);
    }

    #[test]
    fn ring_liveness() {
        let (net, _) = parse_net("net r\nplace a\nplace b\ntrans t pre a post b\ntrans u pre b post a\n").unwrap();
        assert!(is_live_exact(&net, &Marking::new(vec![1, 0]), 10).unwrap());
        assert!(!is_live_exact(&net, &Marking::new(vec![0, 0]), 10).unwrap());
        assert!(dead_at(&net, &Marking::new(vec![0, 0]), 0, 10).unwrap());
        assert!(!dead_at(&net, &Marking::new(vec![0, 1]), 0, 10).unwrap());
        let dl = find_dl_marking(&net, &Marking::new(vec![0, 0]), 10).unwrap().unwrap();
        assert_eq!(dl.dead, vec![0, 1]);
        assert!(find_dl_marking(&net, &Marking::new(vec![1, 1]), 10).unwrap().is_none());
    }

    #[test]
    fn budget_is_reported() {
        let (net, _) = parse_net("net u\nplace p\ntrans t pre p post p:2\n").unwrap();
        assert!(reach_graph(&net, &Marking::new(vec![1]), 50).is_err());
    }
}
