//! Non-liveness witnesses: a marking, a set of crucial places, and a set of
//! transitions that stay dead in the net restricted to those places.

use std::collections::HashMap;
use std::sync::Mutex;

use fixedbitset::FixedBitSet;
use indexmap::IndexSet;
use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::classify::restricted_is_imo;
use crate::net::{Arcs, Marking, Net, PlaceId, TransId};
use crate::par::{self, Parallelism};

/// Largest place set searched by default.
pub const DEFAULT_SUBSET_CAP: usize = 16;

/// One move of a path leading to a witness marking: a firing, or a
/// re-increment of a saturated place in the capped search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PathStep {
    Fire(TransId),
    Increment(PlaceId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub m_wit: Marking,
    pub p_cruc: Vec<PlaceId>,
    pub t_dead: Vec<TransId>,
    pub path: Option<Vec<PathStep>>,
}

/// Which form of the small-values condition to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Values in {0,1} and fewer tokens than crucial places.
    Ordinary,
    /// Values at most the net's maximum edge weight.
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Pass,
    Fail,
    /// The restricted exploration did not finish within its budget.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    /// Small values on the crucial places (diagnostic only).
    pub cond1: bool,
    /// The restriction to the crucial places and the non-dead transitions is IMO.
    pub cond2: bool,
    /// No dead transition becomes enabled in the restricted exploration.
    pub cond3: Check,
}

impl WitnessCheck {
    pub fn sound(&self) -> bool {
        self.cond2 && self.cond3 == Check::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("malformed witness: {0}")]
    Malformed(String),
    #[error("{places} candidate places exceed the subset cap {cap}")]
    SubsetCapExceeded { places: usize, cap: usize },
}

fn restrict(arcs: &Arcs, places: &[PlaceId]) -> Arcs {
    arcs.iter()
        .filter_map(|&(p, w)| places.binary_search(&p).ok().map(|i| (i, w)))
        .collect()
}

fn covers(m: &[u32], arcs: &[(usize, u32)]) -> bool {
    arcs.iter().all(|&(i, w)| m[i] >= w)
}

fn fire_local(m: &[u32], pre: &[(usize, u32)], post: &[(usize, u32)]) -> Vec<u32> {
    let mut next = m.to_vec();
    for &(i, w) in pre {
        next[i] -= w;
    }
    for &(i, w) in post {
        next[i] += w;
    }
    next
}

/// Checks the three witness conditions.
pub fn check_witness(net: &Net, w: &Witness, variant: Variant, node_budget: usize) -> Result<WitnessCheck, WitnessError> {
    net.check_marking(&w.m_wit)
        .map_err(|e| WitnessError::Malformed(e.to_string()))?;
    if w.t_dead.is_empty() {
        return Err(WitnessError::Malformed("empty dead set".into()));
    }
    if let Some(&p) = w.p_cruc.iter().find(|&&p| p >= net.num_places()) {
        return Err(WitnessError::Malformed(format!("place index {p} out of range")));
    }
    if let Some(&t) = w.t_dead.iter().find(|&&t| t >= net.num_transitions()) {
        return Err(WitnessError::Malformed(format!("transition index {t} out of range")));
    }
    let places: Vec<PlaceId> = w.p_cruc.iter().copied().sorted().dedup().collect();
    let dead: FixedBitSet = {
        let mut b = FixedBitSet::with_capacity(net.num_transitions());
        w.t_dead.iter().for_each(|&t| b.insert(t));
        b
    };
    let vals: Vec<u32> = places.iter().map(|&p| w.m_wit[p]).collect();

    let cond1 = match variant {
        Variant::Ordinary => {
            vals.iter().all(|&v| v <= 1) && (vals.iter().sum::<u32>() as usize) < places.len()
        }
        Variant::Weighted => vals.iter().all(|&v| v <= net.max_weight()),
    };

    let restricted: Vec<_> = (0..net.num_transitions())
        .map(|t| (restrict(net.pre(t), &places), restrict(net.post(t), &places)))
        .collect();
    let cond2 = (0..net.num_transitions())
        .filter(|&t| !dead[t])
        .all(|t| restricted_is_imo(&restricted[t].0, &restricted[t].1));

    let mut seen: IndexSet<Vec<u32>> = IndexSet::new();
    seen.insert(vals);
    let mut i = 0;
    let mut cond3 = Check::Pass;
    'explore: while i < seen.len() {
        let cur = seen[i].clone();
        i += 1;
        for t in dead.ones() {
            if covers(&cur, &restricted[t].0) {
                cond3 = Check::Fail;
                break 'explore;
            }
        }
        for t in (0..net.num_transitions()).filter(|&t| !dead[t]) {
            let (pre, post) = &restricted[t];
            if covers(&cur, pre) {
                seen.insert(fire_local(&cur, pre, post));
                if seen.len() > node_budget {
                    cond3 = Check::Undetermined;
                    break 'explore;
                }
            }
        }
    }
    Ok(WitnessCheck { cond1, cond2, cond3 })
}

/// Search parameters for [`find_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessOptions {
    /// Maximum number of candidate places for subset enumeration.
    pub subset_cap: usize,
    /// Require every transition (not only the non-dead ones) to restrict to
    /// an IMO transition on the crucial places.
    pub strict: bool,
    /// Only consider crucial sets satisfying the small-values condition
    /// (see [`Variant`]); the variant follows from whether the net is ordinary.
    pub small_values_only: bool,
    pub parallelism: Parallelism,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            subset_cap: DEFAULT_SUBSET_CAP,
            strict: false,
            small_values_only: false,
            parallelism: Parallelism::Parallel,
        }
    }
}

/// Finds the first witness at `m` in (size, lexicographic) order of crucial
/// place sets, with the canonical dead set of each candidate.
pub fn find_witness(net: &Net, m: &Marking, opts: WitnessOptions) -> Result<Option<Witness>, WitnessError> {
    WitnessSearch::new(net, opts).search(m)
}

type MemoKey = (Vec<PlaceId>, Vec<u32>);

/// Reusable witness search over one net, memoizing results per restricted
/// marking (the verdict for a crucial set only depends on the values there).
pub struct WitnessSearch<'a> {
    net: &'a Net,
    opts: WitnessOptions,
    ordinary: bool,
    max_weight: u32,
    /// Dense arc weights, `pre[t * |P| + p]`.
    pre: Vec<u32>,
    post: Vec<u32>,
    memo: Mutex<HashMap<MemoKey, Option<Vec<TransId>>>>,
}

const MEMO_LIMIT: usize = 1 << 20;

impl<'a> WitnessSearch<'a> {
    pub fn new(net: &'a Net, opts: WitnessOptions) -> Self {
        let (np, nt) = (net.num_places(), net.num_transitions());
        let mut pre = vec![0; np * nt];
        let mut post = vec![0; np * nt];
        for t in 0..nt {
            for &(p, w) in net.pre(t) {
                pre[t * np + p] = w;
            }
            for &(p, w) in net.post(t) {
                post[t * np + p] = w;
            }
        }
        WitnessSearch {
            net,
            opts,
            ordinary: net.is_ordinary(),
            max_weight: net.max_weight(),
            pre,
            post,
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// Candidate crucial places at `m`.
    fn eligible(&self, m: &[u32]) -> Vec<PlaceId> {
        let bound = if self.ordinary { 1 } else { self.max_weight };
        (0..self.net.num_places())
            .filter(|&p| !self.opts.small_values_only || m[p] <= bound)
            .collect()
    }

    pub fn search(&self, m: &Marking) -> Result<Option<Witness>, WitnessError> {
        self.search_counts(m.counts()).map(|hit| {
            hit.map(|(p_cruc, t_dead)| Witness {
                m_wit: m.clone(),
                p_cruc,
                t_dead,
                path: None,
            })
        })
    }

    /// Like [`search`](Self::search) on raw counts; returns `(p_cruc, t_dead)`.
    pub fn search_counts(&self, m: &[u32]) -> Result<Option<(Vec<PlaceId>, Vec<TransId>)>, WitnessError> {
        let eligible = self.eligible(m);
        if eligible.len() > self.opts.subset_cap {
            return Err(WitnessError::SubsetCapExceeded {
                places: eligible.len(),
                cap: self.opts.subset_cap,
            });
        }
        let ordinary_bound = self.opts.small_values_only && self.ordinary;
        for size in 1..=eligible.len() {
            let subsets: Vec<Vec<PlaceId>> = eligible
                .iter()
                .copied()
                .combinations(size)
                .filter(|s| !ordinary_bound || s.iter().map(|&p| m[p] as usize).sum::<usize>() < size)
                .collect();
            let hit = par::find_first(self.opts.parallelism, &subsets, |s| {
                if self.rejected_at_start(s, m) {
                    return None;
                }
                let vals: Vec<u32> = s.iter().map(|&p| m[p]).collect();
                self.evaluate_memo(s, vals)
            });
            if let Some((i, dead)) = hit {
                return Ok(Some((subsets[i].clone(), dead)));
            }
        }
        Ok(None)
    }

    fn row<'r>(&self, arcs: &'r [u32], t: TransId) -> &'r [u32] {
        let np = self.net.num_places();
        &arcs[t * np..(t + 1) * np]
    }

    /// Whether the restriction of `t` to `places` is IMO (conservative with
    /// at most one excess token, or empty).
    fn restricted_imo(&self, t: TransId, places: &[PlaceId]) -> bool {
        let (pre, post) = (self.row(&self.pre, t), self.row(&self.post, t));
        let (mut a, mut b, mut excess) = (0u64, 0u64, 0u64);
        for &p in places {
            a += u64::from(pre[p]);
            b += u64::from(post[p]);
            excess += u64::from(pre[p].saturating_sub(post[p]));
        }
        a == b && excess <= 1
    }

    /// Cheap necessary checks, without allocation: no witness when the
    /// restricted marking already enables every transition or enables a
    /// non-IMO one (or, in strict mode, when some restriction is not IMO).
    fn rejected_at_start(&self, places: &[PlaceId], m: &[u32]) -> bool {
        let mut all_enabled = true;
        for t in 0..self.net.num_transitions() {
            let pre = self.row(&self.pre, t);
            let enabled = places.iter().all(|&p| m[p] >= pre[p]);
            if (enabled || self.opts.strict) && !self.restricted_imo(t, places) {
                return true;
            }
            all_enabled &= enabled;
        }
        all_enabled
    }

    fn evaluate_memo(&self, places: &[PlaceId], vals: Vec<u32>) -> Option<Vec<TransId>> {
        let key = (places.to_vec(), vals);
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return hit.clone();
        }
        let result = self.evaluate(places, &key.1);
        let mut memo = self.memo.lock().expect("memo lock");
        if memo.len() >= MEMO_LIMIT {
            memo.clear();
        }
        memo.insert(key, result.clone());
        result
    }

    /// The canonical dead set for crucial places `places` holding `vals`,
    /// if it makes a witness.
    fn evaluate(&self, places: &[PlaceId], vals: &[u32]) -> Option<Vec<TransId>> {
        let nt = self.net.num_transitions();
        let k = places.len();
        let mut rpre = vec![0u32; nt * k];
        let mut rpost = vec![0u32; nt * k];
        let mut imo = FixedBitSet::with_capacity(nt);
        for t in 0..nt {
            let (pre, post) = (self.row(&self.pre, t), self.row(&self.post, t));
            for (i, &p) in places.iter().enumerate() {
                rpre[t * k + i] = pre[p];
                rpost[t * k + i] = post[p];
            }
            if self.restricted_imo(t, places) {
                imo.insert(t);
            }
        }
        if self.opts.strict && imo.count_ones(..) != nt {
            return None;
        }
        let mut enabled_ever = FixedBitSet::with_capacity(nt);
        let mut seen: IndexSet<Vec<u32>> = IndexSet::new();
        seen.insert(vals.to_vec());
        let mut i = 0;
        while i < seen.len() {
            let cur = seen[i].clone();
            i += 1;
            for t in 0..nt {
                let pre = &rpre[t * k..(t + 1) * k];
                if cur.iter().zip(pre).any(|(v, w)| v < w) {
                    continue;
                }
                if !imo[t] {
                    // A non-IMO transition would have to stay dead.
                    return None;
                }
                enabled_ever.insert(t);
                let post = &rpost[t * k..(t + 1) * k];
                let next: Vec<u32> = cur.iter().zip(pre).zip(post).map(|((v, a), b)| v - a + b).collect();
                seen.insert(next);
            }
            if enabled_ever.count_ones(..) == nt {
                return None;
            }
        }
        let dead: Vec<TransId> = (0..nt).filter(|&t| !enabled_ever[t]).collect();
        (!dead.is_empty()).then_some(dead)
    }
}
