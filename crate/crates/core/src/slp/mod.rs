//! Structural liveness: live-marking bounds, truncation, the capped
//! non-liveness decision and the search for a live marking.
//!
//! [`is_nonlive`] explores *capped configurations*: markings whose counts are
//! clamped at `2·w·|P|`, each place carrying a saturation flag that is set
//! when a count was clamped and that later allows the count to be raised
//! again one token at a time. Every configuration is tested for a
//! non-liveness witness; the first hit in breadth-first order is reported
//! together with the path leading to it. A completed exploration without a
//! hit means the marking is live.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use indexmap::IndexSet;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify, dummy_augment, ClassifyError, NetClass};
use crate::coverability::Coverability;
use crate::liveness::{
    reach_graph, GraphLiveness, PathStep, Witness, WitnessError, WitnessOptions, WitnessSearch,
    DEFAULT_SUBSET_CAP,
};
use crate::net::{Marking, Net, NetError, PlaceId, TransId};
use crate::par::{self, Parallelism};
use crate::BudgetExceeded;

mod exact;
mod threshold;

use exact::SharedGraph;

use threshold::{prove_live, ThresholdResult};

/// Capped configurations explored per [`is_nonlive`] call by default.
pub const DEFAULT_CONFIG_BUDGET: usize = 500_000;
/// Candidate markings tested per structural liveness search by default.
pub const DEFAULT_CANDIDATE_BUDGET: usize = 200_000;

/// Configurations explored before the abstraction-based liveness proof is
/// attempted; small explorations finish on their own.
const PROBE_CONFIGS: usize = 2048;
/// Largest threshold tried by the abstraction-based proof.
const MAX_THRESHOLD: u32 = 3;
/// Cached candidate verdicts kept by the structural liveness search.
const CACHE_LIMIT: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlpError {
    #[error("net is not BIMO: {0}")]
    NotBimo(#[from] ClassifyError),
    #[error("net is not an ordinary IMO net")]
    NotOrdImo,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("candidate budget of {budget} markings exceeded")]
    CandidateBudgetExceeded { budget: usize },
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Table bounds for a net class: every structurally live net has a live
/// marking with all components at most `first`, and liveness of a marking is
/// unchanged when components are clamped at `second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub first: u64,
    pub second: u64,
}

/// The bounds row for the finest class the flags admit.
pub fn bounds_for(class: &NetClass, p_count: usize, w: u32) -> Result<Bounds, SlpError> {
    if !class.bimo {
        return Err(SlpError::NotBimo(ClassifyError::NotBimo(
            "some transition has more than one excess token".into(),
        )));
    }
    let p = p_count as u64;
    let w = u64::from(w);
    let (first, second) = if class.ordinary && class.imo {
        (1, 2 * p)
    } else if class.io {
        (2, 4 * p)
    } else if class.imo {
        (w, 2 * w * p)
    } else if class.ordinary {
        (p, 2 * p)
    } else {
        (w * p, 2 * w * p)
    };
    Ok(Bounds { first, second })
}

/// Number of places once the dummy place is added for empty pre-multisets.
fn augmented_place_count(net: &Net) -> usize {
    let needs_dummy = (0..net.num_transitions()).any(|t| net.pre(t).is_empty());
    net.num_places() + usize::from(needs_dummy)
}

/// Bounds of `net` itself, counting the dummy place when it is needed.
pub fn net_bounds(net: &Net) -> Result<Bounds, SlpError> {
    dummy_augment(net)?;
    bounds_for(&classify(net), augmented_place_count(net), net.max_weight())
}

/// The clamp value `2·w·|P|` of the capped exploration (dummy included).
pub fn cap_for(net: &Net) -> u32 {
    clamp_u32(2 * u64::from(net.max_weight()) * augmented_place_count(net) as u64)
}

fn clamp_u32(v: u64) -> u32 {
    u32::try_from(v).unwrap_or(u32::MAX)
}

/// Clamps every component at `2·w·|P|`.
pub fn truncate(net: &Net, m: &Marking) -> Marking {
    let cap = clamp_u32(2 * u64::from(net.max_weight()) * net.num_places() as u64);
    Marking::new(m.iter().map(|&v| v.min(cap)).collect())
}

/// A marking clamped at the cap, with per-place saturation flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CappedConfig {
    pub counts: Marking,
    pub saturated: FixedBitSet,
}

impl CappedConfig {
    /// The configuration of a marking: clamped, flags set where clamped.
    pub fn from_marking(m: &Marking, cap: u32) -> Self {
        let mut saturated = FixedBitSet::with_capacity(m.len());
        let counts = m
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                if v > cap {
                    saturated.insert(p);
                    cap
                } else {
                    v
                }
            })
            .collect();
        CappedConfig {
            counts: Marking::new(counts),
            saturated,
        }
    }

    /// Whether no place was ever clamped: the counts are then an actual
    /// reachable marking.
    pub fn is_exact(&self) -> bool {
        self.saturated.count_ones(..) == 0
    }
}

/// All successors of `cfg`: firings of enabled transitions (clamping and
/// flagging places pushed above the cap) followed by re-increments of
/// saturated places below the cap. Duplicates keep their first position.
pub fn capped_successors(net: &Net, cfg: &CappedConfig, cap: u32) -> Vec<(PathStep, CappedConfig)> {
    let mut out: Vec<(PathStep, CappedConfig)> = Vec::new();
    let mut push = |step, c: CappedConfig| {
        if !out.iter().any(|(_, d)| *d == c) {
            out.push((step, c));
        }
    };
    for t in 0..net.num_transitions() {
        if !net.enabled(&cfg.counts, t) {
            continue;
        }
        let mut next = cfg.clone();
        for &(p, w) in net.pre(t) {
            next.counts[p] -= w;
        }
        for &(p, w) in net.post(t) {
            let v = u64::from(next.counts[p]) + u64::from(w);
            if v > u64::from(cap) {
                next.counts[p] = cap;
                next.saturated.insert(p);
            } else {
                next.counts[p] = v as u32;
            }
        }
        push(PathStep::Fire(t), next);
    }
    for p in cfg.saturated.ones() {
        if cfg.counts[p] < cap {
            let mut next = cfg.clone();
            next.counts[p] += 1;
            push(PathStep::Increment(p), next);
        }
    }
    out
}

/// Parameters of [`is_nonlive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonLiveOptions {
    /// Capped configurations explored before giving up.
    pub node_budget: usize,
    /// Largest number of candidate crucial places per witness search.
    pub subset_cap: usize,
    /// Require every transition to restrict to IMO on the crucial places.
    pub strict: bool,
    /// Restrict witness searches to crucial sets with small values.
    pub small_values_only: bool,
    /// Try an abstraction-based liveness proof when the exploration grows.
    pub threshold_proofs: bool,
    pub parallelism: Parallelism,
}

impl Default for NonLiveOptions {
    fn default() -> Self {
        NonLiveOptions {
            node_budget: DEFAULT_CONFIG_BUDGET,
            subset_cap: DEFAULT_SUBSET_CAP,
            strict: false,
            small_values_only: false,
            threshold_proofs: true,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub configs_explored: usize,
    /// Abstract states visited by liveness proofs.
    pub abstract_states: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LivenessVerdict {
    Live,
    /// A witness, with the capped path leading to its marking.
    NonLive(Witness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonLiveOutcome {
    pub verdict: LivenessVerdict,
    pub stats: SearchStats,
}

impl NonLiveOutcome {
    pub fn is_nonlive(&self) -> bool {
        matches!(self.verdict, LivenessVerdict::NonLive(_))
    }
}

/// Decides whether `m0` is non-live in a BIMO net.
pub fn is_nonlive(net: &Net, m0: &Marking, opts: &NonLiveOptions) -> Result<NonLiveOutcome, SlpError> {
    Decider::new(net, opts)?.decide(m0)
}

/// Why a configuration ended the exploration.
enum Hit {
    Witness(Vec<PlaceId>, Vec<TransId>),
    /// Its counts are a marking already known to be non-live.
    Known,
}

enum Outcome {
    Live,
    NonLive {
        config: usize,
        hit: Hit,
        bfs: Bfs,
    },
}

/// Breadth-first exploration of capped configurations.
struct Bfs {
    configs: IndexSet<CappedConfig>,
    parent: Vec<Option<(usize, PathStep)>>,
    frontier: Vec<usize>,
}

impl Bfs {
    fn path_to(&self, mut i: usize) -> (Vec<PathStep>, Vec<usize>) {
        let mut steps = Vec::new();
        let mut nodes = vec![i];
        while let Some((j, step)) = self.parent[i] {
            steps.push(step);
            nodes.push(j);
            i = j;
        }
        steps.reverse();
        nodes.reverse();
        (steps, nodes)
    }
}

/// Shared state for deciding many markings of one net.
pub struct Decider<'a> {
    net: &'a Net,
    opts: NonLiveOptions,
    cap: u32,
    witness: WitnessSearch<'a>,
    cov: Option<Coverability>,
}

impl<'a> Decider<'a> {
    pub fn new(net: &'a Net, opts: &NonLiveOptions) -> Result<Self, SlpError> {
        dummy_augment(net)?;
        if !classify(net).bimo {
            return Err(SlpError::NotBimo(ClassifyError::NotBimo(
                "some transition has more than one excess token".into(),
            )));
        }
        let witness = WitnessSearch::new(
            net,
            WitnessOptions {
                subset_cap: opts.subset_cap,
                strict: opts.strict,
                small_values_only: opts.small_values_only,
                parallelism: opts.parallelism,
            },
        );
        Ok(Decider {
            net,
            opts: *opts,
            cap: cap_for(net),
            witness,
            cov: Coverability::new(net, opts.node_budget).ok(),
        })
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Whether some transition can never be enabled from `m`, which makes
    /// `m` non-live. `false` when coverability was not computed.
    pub fn has_dead_transition(&self, m: &[u32]) -> bool {
        self.cov.as_ref().is_some_and(|cov| cov.any_dead(m))
    }

    pub fn decide(&self, m0: &Marking) -> Result<NonLiveOutcome, SlpError> {
        let mut stats = SearchStats::default();
        let verdict = match self.run(m0, &|_| false, &mut stats)? {
            Outcome::Live => LivenessVerdict::Live,
            Outcome::NonLive { config, hit, bfs } => {
                let Hit::Witness(p_cruc, t_dead) = hit else {
                    unreachable!("no known markings were supplied")
                };
                let (path, _) = bfs.path_to(config);
                LivenessVerdict::NonLive(Witness {
                    m_wit: bfs.configs[config].counts.clone(),
                    p_cruc,
                    t_dead,
                    path: Some(path),
                })
            }
        };
        Ok(NonLiveOutcome { verdict, stats })
    }

    fn check(&self, cfg: &CappedConfig, known: &(dyn Fn(&[u32]) -> bool + Sync)) -> Option<Result<Hit, SlpError>> {
        let counts = cfg.counts.counts();
        if cfg.is_exact() && known(counts) {
            return Some(Ok(Hit::Known));
        }
        // A witness marking has a dead transition; skip the subset search
        // where coverability shows there is none.
        if let Some(cov) = &self.cov {
            if !cov.any_dead(counts) {
                return None;
            }
        }
        match self.witness.search_counts(counts) {
            Ok(Some((p, t))) => Some(Ok(Hit::Witness(p, t))),
            Ok(None) => None,
            Err(e) => Some(Err(e.into())),
        }
    }

    fn run(
        &self,
        m0: &Marking,
        known: &(dyn Fn(&[u32]) -> bool + Sync),
        stats: &mut SearchStats,
    ) -> Result<Outcome, SlpError> {
        self.net.check_marking(m0)?;
        let root = CappedConfig::from_marking(m0, self.cap);
        let mut bfs = Bfs {
            configs: IndexSet::new(),
            parent: vec![None],
            frontier: vec![0],
        };
        let root_hit = self.check(&root, known);
        bfs.configs.insert(root);
        stats.configs_explored = 1;
        if let Some(hit) = root_hit {
            return Ok(Outcome::NonLive {
                config: 0,
                hit: hit?,
                bfs,
            });
        }
        let mut tried_proof = !self.opts.threshold_proofs;
        while !bfs.frontier.is_empty() {
            if !tried_proof && bfs.configs.len() >= PROBE_CONFIGS {
                tried_proof = true;
                if self.prove(m0, stats) {
                    return Ok(Outcome::Live);
                }
            }
            let frontier = std::mem::take(&mut bfs.frontier);
            let expanded = par::map(self.opts.parallelism, &frontier, |&i| {
                capped_successors(self.net, &bfs.configs[i], self.cap)
            });
            let mut fresh = Vec::new();
            for (&i, succs) in frontier.iter().zip(expanded) {
                for (step, c) in succs {
                    let (j, new) = bfs.configs.insert_full(c);
                    if new {
                        bfs.parent.push(Some((i, step)));
                        fresh.push(j);
                    }
                }
            }
            stats.configs_explored = bfs.configs.len();
            if bfs.configs.len() > self.opts.node_budget {
                return Err(BudgetExceeded {
                    explored: bfs.configs.len(),
                }
                .into());
            }
            let hit = par::find_first(self.opts.parallelism, &fresh, |&j| self.check(&bfs.configs[j], known));
            if let Some((k, hit)) = hit {
                return Ok(Outcome::NonLive {
                    config: fresh[k],
                    hit: hit?,
                    bfs,
                });
            }
            bfs.frontier = fresh;
        }
        Ok(Outcome::Live)
    }

    /// Abstraction-based liveness proof at increasing thresholds.
    fn prove(&self, m0: &Marking, stats: &mut SearchStats) -> bool {
        let Some(cov) = &self.cov else { return false };
        for k in 1..=MAX_THRESHOLD.min(self.cap) {
            match prove_live(self.net, cov, m0.counts(), k, self.opts.node_budget) {
                ThresholdResult::Live { states } => {
                    stats.abstract_states += states;
                    return true;
                }
                ThresholdResult::Inconclusive { states } | ThresholdResult::Exceeded { states } => {
                    stats.abstract_states += states;
                }
            }
        }
        false
    }
}

/// How candidate markings are tested during the structural liveness search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SlpMethod {
    /// Exact reachability analysis for conservative nets, capped otherwise.
    #[default]
    Auto,
    /// Always the capped non-liveness decision.
    Capped,
    /// Always exact reachability analysis (finite reachability sets only).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlpOptions {
    pub liveness: NonLiveOptions,
    /// Candidate markings enumerated before giving up.
    pub candidate_budget: usize,
    pub method: SlpMethod,
    /// Candidates tested together; results do not depend on it.
    pub batch_size: usize,
}

impl Default for SlpOptions {
    fn default() -> Self {
        SlpOptions {
            liveness: NonLiveOptions::default(),
            candidate_budget: DEFAULT_CANDIDATE_BUDGET,
            method: SlpMethod::Auto,
            batch_size: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlpOutcome {
    /// The first live marking in the canonical order, if any.
    pub certificate: Option<Marking>,
    /// Largest component value enumerated.
    pub box_bound: u32,
    pub candidates_tested: usize,
    pub configs_explored: usize,
}

/// Searches the first-bound box for a live marking.
pub fn decide_slp(net: &Net, opts: &SlpOptions) -> Result<SlpOutcome, SlpError> {
    let bounds = net_bounds(net)?;
    search_box(net, clamp_u32(bounds.first), opts)
}

/// Searches only {0,1}-markings; complete for ordinary IMO nets.
pub fn slp_01_shortcut(net: &Net, opts: &SlpOptions) -> Result<SlpOutcome, SlpError> {
    let class = classify(net);
    if !(class.ordinary && class.imo) {
        return Err(SlpError::NotOrdImo);
    }
    search_box(net, 1, opts)
}

/// Markings with components in `0..=bound`, by total then lexicographically.
#[derive(Debug, Clone)]
pub struct BoxEnumerator {
    bound: u32,
    total: u64,
    max_total: u64,
    cur: Option<Vec<u32>>,
}

impl BoxEnumerator {
    pub fn new(places: usize, bound: u32) -> Self {
        let mut e = BoxEnumerator {
            bound,
            total: 0,
            max_total: u64::from(bound) * places as u64,
            cur: None,
        };
        e.cur = Some(vec![0; places]);
        e
    }

    /// Lexicographically smallest vector of the given total: tokens as far
    /// right as possible.
    fn fill_right(v: &mut [u32], mut rest: u64, bound: u32) {
        for x in v.iter_mut().rev() {
            let take = rest.min(u64::from(bound));
            *x = take as u32;
            rest -= take;
        }
    }

    fn advance(&mut self, v: &mut [u32]) -> bool {
        let n = v.len();
        let mut suffix: u64 = v.last().map_or(0, |&x| u64::from(x));
        for i in (0..n.saturating_sub(1)).rev() {
            if v[i] < self.bound && suffix >= 1 {
                v[i] += 1;
                Self::fill_right(&mut v[i + 1..], suffix - 1, self.bound);
                return true;
            }
            suffix += u64::from(v[i]);
        }
        if self.total >= self.max_total {
            return false;
        }
        self.total += 1;
        Self::fill_right(v, self.total, self.bound);
        true
    }
}

impl Iterator for BoxEnumerator {
    type Item = Marking;

    fn next(&mut self) -> Option<Marking> {
        let mut v = self.cur.take()?;
        let out = Marking::new(v.clone());
        if self.advance(&mut v) {
            self.cur = Some(v);
        }
        Some(out)
    }
}

enum Route {
    Exact,
    Capped,
}

fn search_box(net: &Net, bound: u32, opts: &SlpOptions) -> Result<SlpOutcome, SlpError> {
    let decider = Decider::new(net, &opts.liveness)?;
    let route = match opts.method {
        SlpMethod::Exact => Route::Exact,
        SlpMethod::Capped => Route::Capped,
        SlpMethod::Auto if net.is_conservative() => Route::Exact,
        SlpMethod::Auto => Route::Capped,
    };
    let mut candidates = BoxEnumerator::new(net.num_places(), bound);
    let mut outcome = SlpOutcome {
        certificate: None,
        box_bound: bound,
        candidates_tested: 0,
        configs_explored: 0,
    };
    // Exact verdicts (true = live) and markings known to be non-live.
    let mut verdicts: HashMap<Vec<u32>, bool> = HashMap::new();
    let mut nonlive: HashSet<Vec<u32>> = HashSet::new();
    // With coverability at hand, exact verdicts share one reachability graph.
    let mut shared = match route {
        Route::Exact if decider.cov.is_some() => Some(SharedGraph::new(net, CACHE_LIMIT)),
        _ => None,
    };
    let batch_size = opts.batch_size.max(1);
    loop {
        let batch: Vec<Marking> = candidates.by_ref().take(batch_size).collect();
        if batch.is_empty() {
            return Ok(outcome);
        }
        if outcome.candidates_tested + batch.len() > opts.candidate_budget {
            return Err(SlpError::CandidateBudgetExceeded {
                budget: opts.candidate_budget,
            });
        }
        // Candidates with a dead transition are non-live without exploration.
        let open: Vec<bool> = par::map(opts.liveness.parallelism, &batch, |m| {
            !decider.has_dead_transition(m.counts())
        });
        let explored: Vec<Marking> = batch.iter().zip(&open).filter(|(_, &o)| o).map(|(m, _)| m.clone()).collect();
        let results = match route {
            Route::Exact if shared.is_some() => {
                let graph = shared.as_mut().expect("checked by the guard");
                let fallback = opts.method == SlpMethod::Auto;
                let mut live = Vec::with_capacity(explored.len());
                for m in &explored {
                    let dead = |c: &[u32]| decider.has_dead_transition(c);
                    let is_live = match graph.is_live(m, dead, opts.liveness.node_budget) {
                        Ok((is_live, expanded)) => {
                            outcome.configs_explored += expanded;
                            is_live
                        }
                        Err(_) if fallback => {
                            let out = decider.decide(m)?;
                            outcome.configs_explored += out.stats.configs_explored;
                            !out.is_nonlive()
                        }
                        Err(e) => return Err(e.into()),
                    };
                    live.push(is_live);
                    if is_live {
                        // Later candidates of the batch are not needed.
                        break;
                    }
                }
                live
            }
            Route::Exact => {
                let r = par::map(opts.liveness.parallelism, &explored, |m| {
                    exact_candidate(net, m, &verdicts, &opts.liveness, opts.method == SlpMethod::Auto, &decider)
                });
                let mut live = Vec::with_capacity(r.len());
                for res in r {
                    let (is_live, explored, learned) = res?;
                    outcome.configs_explored += explored;
                    if verdicts.len() < CACHE_LIMIT {
                        verdicts.extend(learned);
                    }
                    live.push(is_live);
                }
                live
            }
            Route::Capped => {
                let known = |c: &[u32]| nonlive.contains(c);
                let r = par::map(opts.liveness.parallelism, &explored, |m| {
                    let mut stats = SearchStats::default();
                    decider.run(m, &known, &mut stats).map(|o| match o {
                        Outcome::Live => (true, stats, Vec::new()),
                        Outcome::NonLive { config, bfs, .. } => {
                            // Exact configurations on the path are real
                            // markings leading to a non-live one.
                            let (_, nodes) = bfs.path_to(config);
                            let learned = nodes
                                .into_iter()
                                .map(|i| &bfs.configs[i])
                                .filter(|c| c.is_exact())
                                .map(|c| c.counts.counts().to_vec())
                                .collect();
                            (false, stats, learned)
                        }
                    })
                });
                let mut live = Vec::with_capacity(r.len());
                for res in r {
                    let (is_live, stats, learned) = res?;
                    outcome.configs_explored += stats.configs_explored;
                    if nonlive.len() < CACHE_LIMIT {
                        nonlive.extend(learned);
                    }
                    live.push(is_live);
                }
                live
            }
        };
        let mut results = results.into_iter();
        let results: Vec<bool> = open.iter().map(|&o| o && results.next().unwrap_or(false)).collect();
        for (m, is_live) in batch.iter().zip(results) {
            outcome.candidates_tested += 1;
            if is_live {
                outcome.certificate = Some(m.clone());
                return Ok(outcome);
            }
        }
    }
}

type Learned = Vec<(Vec<u32>, bool)>;

/// Exact liveness of one candidate, with verdicts learned for other
/// markings on the way. Falls back to the capped decision when allowed and
/// the reachability set outgrows the budget.
fn exact_candidate(
    net: &Net,
    m: &Marking,
    cache: &HashMap<Vec<u32>, bool>,
    opts: &NonLiveOptions,
    fallback: bool,
    decider: &Decider<'_>,
) -> Result<(bool, usize, Learned), SlpError> {
    if let Some(&v) = cache.get(m.counts()) {
        return Ok((v, 0, Vec::new()));
    }
    let explored = reach_graph(net, m, opts.node_budget).map(|graph| {
        let gl = GraphLiveness::new(net, &graph);
        let learned = (0..graph.len())
            .map(|v| (graph.nodes[v].counts().to_vec(), gl.is_live(v)))
            .collect();
        (gl.is_live(0), graph.len(), learned)
    });
    match explored {
        Ok(result) => Ok(result),
        Err(_) if fallback => {
            let out = decider.decide(m)?;
            Ok((!out.is_nonlive(), out.stats.configs_explored, Vec::new()))
        }
        Err(e) => Err(e.into()),
    }
}
