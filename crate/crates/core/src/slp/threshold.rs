//! Liveness proofs by threshold abstraction.
//!
//! A marking is abstracted by clamping every count at `k` (the value `k`
//! standing for "at least `k`"). Abstract firing over-approximates concrete
//! firing, so the abstract closure from the clamped initial marking contains
//! the clamp of every reachable marking. If at each abstract state every
//! transition is coverable from its least concretization (the state read as
//! a marking), then by monotonicity no reachable marking has a dead
//! transition: the initial marking is live. A bad abstract state proves
//! nothing (it may be spurious), so the caller falls back to the exact search.

use indexmap::IndexSet;

use crate::coverability::Coverability;
use crate::net::Net;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ThresholdResult {
    /// Every abstract state is good: the marking is live.
    Live { states: usize },
    /// Some abstract state has an uncoverable transition.
    Inconclusive { states: usize },
    /// The abstract closure outgrew the budget.
    Exceeded { states: usize },
}

/// Abstract successors of `a` under `t`, appended to `out`.
fn abstract_successors(net: &Net, a: &[u32], t: usize, k: u32, out: &mut Vec<Vec<u32>>) {
    let pre = net.pre(t);
    if !pre.iter().all(|&(p, w)| a[p] >= w || a[p] == k) {
        return;
    }
    // Places touched by t, with the range of abstract values they can take.
    let mut touched: Vec<(usize, u32, u32)> = Vec::new();
    let mut visit = |p: usize| {
        if touched.iter().any(|&(q, _, _)| q == p) {
            return;
        }
        let (w_in, w_out) = (net.pre_weight(p, t), net.post_weight(t, p));
        let (lo, hi) = if a[p] < k {
            let v = (a[p] - w_in).saturating_add(w_out).min(k);
            (v, v)
        } else {
            let lo = k.max(w_in) - w_in + w_out;
            (lo.min(k), k)
        };
        touched.push((p, lo, hi));
    };
    pre.iter().for_each(|&(p, _)| visit(p));
    net.post(t).iter().for_each(|&(p, _)| visit(p));

    let mut cur = a.to_vec();
    for &(p, lo, _) in &touched {
        cur[p] = lo;
    }
    loop {
        out.push(cur.clone());
        // Odometer over the touched ranges.
        let mut i = 0;
        loop {
            if i == touched.len() {
                return;
            }
            let (p, lo, hi) = touched[i];
            if cur[p] < hi {
                cur[p] += 1;
                break;
            }
            cur[p] = lo;
            i += 1;
        }
    }
}

/// Tries to prove `m0` live with threshold `k ≥ 1`.
pub(crate) fn prove_live(net: &Net, cov: &Coverability, m0: &[u32], k: u32, budget: usize) -> ThresholdResult {
    let good = |a: &[u32]| (0..net.num_transitions()).all(|t| cov.coverable_counts(a, t));
    let start: Vec<u32> = m0.iter().map(|&v| v.min(k)).collect();
    if !good(&start) {
        return ThresholdResult::Inconclusive { states: 1 };
    }
    let mut seen: IndexSet<Vec<u32>> = IndexSet::new();
    seen.insert(start);
    let mut buf = Vec::new();
    let mut i = 0;
    while i < seen.len() {
        let cur = seen[i].clone();
        i += 1;
        for t in 0..net.num_transitions() {
            buf.clear();
            abstract_successors(net, &cur, t, k, &mut buf);
            for next in buf.drain(..) {
                if seen.contains(&next) {
                    continue;
                }
                if !good(&next) {
                    return ThresholdResult::Inconclusive { states: seen.len() };
                }
                seen.insert(next);
                if seen.len() > budget {
                    return ThresholdResult::Exceeded { states: seen.len() };
                }
            }
        }
    }
    ThresholdResult::Live { states: seen.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_net;

    #[test]
    fn ring_is_proved_live() {
        let (net, _) = parse_net("net r\nplace a\nplace b\ntrans t pre a post b\ntrans u pre b post a\n").unwrap();
        let cov = Coverability::new(&net, 100).unwrap();
        assert!(matches!(prove_live(&net, &cov, &[1, 0], 1, 100), ThresholdResult::Live { .. }));
        assert!(matches!(
            prove_live(&net, &cov, &[0, 0], 1, 100),
            ThresholdResult::Inconclusive { .. }
        ));
    }

    #[test]
    fn draining_place_is_not_proved() {
        // t consumes from p and nothing refills it: dead eventually.
        let (net, _) = parse_net("net d\nplace p\ntrans t pre p\n").unwrap();
        let cov = Coverability::new(&net, 100).unwrap();
        for k in 1..4 {
            assert!(!matches!(prove_live(&net, &cov, &[9], k, 100), ThresholdResult::Live { .. }));
        }
    }
}
