//! Exact liveness of many markings of one net with finite reachability
//! sets, sharing one growing reachability graph.
//!
//! A marking is non-live iff it reaches a marking at which some transition
//! can never be enabled again (read off backward coverability). Each
//! marking is expanded at most once over all queries; when a marking with a
//! dead transition is found, non-liveness is propagated backwards along
//! every recorded edge, and a query whose whole reachability set was
//! explored without such a marking marks that set live.

use std::collections::HashMap;

use crate::net::{Marking, Net};
use crate::BudgetExceeded;


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Unknown,
    Live,
    NonLive,
}

pub(crate) struct SharedGraph<'a> {
    net: &'a Net,
    index: HashMap<Box<[u32]>, u32>,
    markings: Vec<Box<[u32]>>,
    succ: Vec<Option<Vec<u32>>>,
    pred: Vec<Vec<u32>>,
    status: Vec<Status>,
    stamp: Vec<u32>,
    epoch: u32,
    limit: usize,
}

impl<'a> SharedGraph<'a> {
    /// A graph that is cleared whenever it grows beyond `limit` markings.
    pub(crate) fn new(net: &'a Net, limit: usize) -> Self {
        SharedGraph {
            net,
            index: HashMap::new(),
            markings: Vec::new(),
            succ: Vec::new(),
            pred: Vec::new(),
            status: Vec::new(),
            stamp: Vec::new(),
            epoch: 0,
            limit,
        }
    }

    fn clear(&mut self) {
        self.index.clear();
        self.markings.clear();
        self.succ.clear();
        self.pred.clear();
        self.status.clear();
        self.stamp.clear();
    }

    fn intern(&mut self, counts: &[u32]) -> u32 {
        if let Some(&id) = self.index.get(counts) {
            return id;
        }
        let id = self.markings.len() as u32;
        let key: Box<[u32]> = counts.into();
        self.index.insert(key.clone(), id);
        self.markings.push(key);
        self.succ.push(None);
        self.pred.push(Vec::new());
        self.status.push(Status::Unknown);
        self.stamp.push(0);
        id
    }

    /// Marks `v` and every recorded predecessor chain into it non-live.
    fn propagate(&mut self, v: u32) {
        self.status[v as usize] = Status::NonLive;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for i in 0..self.pred[u as usize].len() {
                let p = self.pred[u as usize][i];
                if self.status[p as usize] != Status::NonLive {
                    self.status[p as usize] = Status::NonLive;
                    stack.push(p);
                }
            }
        }
    }

    fn expand(&mut self, v: u32) {
        let cur = Marking::new(self.markings[v as usize].to_vec());
        let mut out = Vec::new();
        for t in 0..self.net.num_transitions() {
            if self.net.enabled(&cur, t) {
                let next = self.net.fire_unchecked(&cur, t);
                let s = self.intern(next.counts());
                if !out.contains(&s) {
                    out.push(s);
                    self.pred[s as usize].push(v);
                }
            }
        }
        self.succ[v as usize] = Some(out);
    }

    /// Whether `m` is live. `dead` tells whether a marking has a transition
    /// that can never be enabled; `budget` bounds the markings expanded by
    /// this query.
    pub(crate) fn is_live(
        &mut self,
        m: &Marking,
        dead: impl Fn(&[u32]) -> bool,
        budget: usize,
    ) -> Result<(bool, usize), BudgetExceeded> {
        if self.markings.len() > self.limit {
            self.clear();
        }
        let root = self.intern(m.counts());
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut visited = vec![root];
        self.stamp[root as usize] = self.epoch;
        let mut stack = vec![root];
        let mut expanded = 0;
        while let Some(v) = stack.pop() {
            match self.status[v as usize] {
                Status::NonLive => {
                    // Reached over edges recorded after `v` was marked.
                    self.propagate(v);
                    return Ok((false, expanded));
                }
                Status::Live => continue,
                Status::Unknown => {}
            }
            if self.succ[v as usize].is_none() {
                if dead(&self.markings[v as usize]) {
                    self.propagate(v);
                    return Ok((false, expanded));
                }
                self.expand(v);
                expanded += 1;
                if expanded > budget {
                    return Err(BudgetExceeded { explored: expanded });
                }
            }
            let succ = self.succ[v as usize].as_ref().expect("expanded above");
            for &s in succ {
                if self.stamp[s as usize] != self.epoch {
                    self.stamp[s as usize] = self.epoch;
                    visited.push(s);
                    stack.push(s);
                }
            }
        }
        // The whole reachability set of `m` is explored and has no marking
        // with a dead transition.
        for v in visited {
            self.status[v as usize] = Status::Live;
        }
        Ok((true, expanded))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverability::Coverability;
    use crate::liveness::is_live_exact;
    use crate::net::parse_net;

    #[test]
    fn agrees_with_full_exploration() {
        let (net, _) = parse_net(
            "net n\nplace a\nplace b\nplace c\n\
             trans t1 pre a post b\ntrans t2 pre b post c\ntrans t3 pre c post a\ntrans t4 pre a b post a c\n",
        )
        .unwrap();
        let cov = Coverability::new(&net, 100_000).unwrap();
        let dead = |m: &[u32]| (0..net.num_transitions()).any(|t| !cov.coverable_counts(m, t));
        let mut graph = SharedGraph::new(&net, 1_000_000);
        for total in 0..5u32 {
            for a in 0..=total {
                for b in 0..=total - a {
                    let m = Marking::new(vec![a, b, total - a - b]);
                    let (live, _) = graph.is_live(&m, dead, 100_000).unwrap();
                    assert_eq!(live, is_live_exact(&net, &m, 100_000).unwrap(), "{m}");
                }
            }
        }
    }
}
