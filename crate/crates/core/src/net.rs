//! Nets, markings, firing and the line-oriented text format.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Deref, Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type PlaceId = usize;
pub type TransId = usize;

/// Largest accepted edge weight (fits a signed 32-bit integer).
pub const MAX_WEIGHT: u32 = i32::MAX as u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("weight {weight} on `{place}` out of range 1..={MAX_WEIGHT}")]
    BadWeight { place: String, weight: u64 },
    #[error("marking has {got} entries, net has {expected} places")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("transition `{transition}` is not enabled at {marking}")]
    NotEnabled { transition: String, marking: Marking },
    #[error("step {index}: transition `{transition}` is not enabled at {marking}")]
    ReplayBlocked {
        index: usize,
        transition: String,
        marking: Marking,
    },
    #[error("token count overflow while firing `{0}`")]
    Overflow(String),
    #[error("malformed marking `{0}`: expected comma-separated token counts")]
    BadMarking(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("weight must be an integer in 1..={MAX_WEIGHT}, got `{0}`")]
    BadWeight(String),
    #[error("reference to undeclared place `{0}`")]
    UndeclaredPlace(String),
    #[error("missing `net <name>` header")]
    MissingHeader,
}

/// A multiset over the places of a net, stored densely in place order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marking(Vec<u32>);

impl Marking {
    pub fn new(counts: Vec<u32>) -> Self {
        Marking(counts)
    }

    pub fn zero(len: usize) -> Self {
        Marking(vec![0; len])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.0
    }

    /// |M|, the number of tokens.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    /// Multiset sum.
    pub fn plus(&self, other: &Marking) -> Marking {
        debug_assert_eq!(self.len(), other.len());
        Marking(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Truncated difference: `max(self - other, 0)` componentwise.
    pub fn minus(&self, other: &Marking) -> Marking {
        debug_assert_eq!(self.len(), other.len());
        Marking(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.saturating_sub(*b))
                .collect(),
        )
    }

    /// Componentwise minimum (multiset intersection).
    pub fn meet(&self, other: &Marking) -> Marking {
        debug_assert_eq!(self.len(), other.len());
        Marking(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// `self ≤ other` componentwise.
    pub fn le(&self, other: &Marking) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// The set of marked places.
    pub fn carrier(&self) -> BTreeSet<PlaceId> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl Deref for Marking {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl Index<PlaceId> for Marking {
    type Output = u32;
    fn index(&self, p: PlaceId) -> &u32 {
        &self.0[p]
    }
}

impl IndexMut<PlaceId> for Marking {
    fn index_mut(&mut self, p: PlaceId) -> &mut u32 {
        &mut self.0[p]
    }
}

impl From<Vec<u32>> for Marking {
    fn from(v: Vec<u32>) -> Self {
        Marking(v)
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Sparse weighted arc list: `(place, weight)` sorted by place, weights ≥ 1.
pub type Arcs = Vec<(PlaceId, u32)>;

/// A place/transition net with weighted flow. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    name: String,
    places: Vec<String>,
    transitions: Vec<String>,
    pre: Vec<Arcs>,
    post: Vec<Arcs>,
}

impl Net {
    /// Builds a net from named arcs. Repeated places within one side add up.
    pub fn new(
        name: impl Into<String>,
        places: Vec<String>,
        transitions: Vec<(String, Vec<(String, u32)>, Vec<(String, u32)>)>,
    ) -> Result<Self, NetError> {
        let mut index = HashMap::new();
        for (i, p) in places.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(NetError::Duplicate(p.clone()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        let mut names = Vec::with_capacity(transitions.len());
        let mut pre = Vec::with_capacity(transitions.len());
        let mut post = Vec::with_capacity(transitions.len());
        for (name, tpre, tpost) in transitions {
            if index.contains_key(&name) || !seen.insert(name.clone()) {
                return Err(NetError::Duplicate(name));
            }
            let resolve = |arcs: Vec<(String, u32)>| -> Result<Arcs, NetError> {
                let mut dense: Vec<(PlaceId, u64)> = Vec::new();
                for (p, w) in arcs {
                    let &i = index.get(&p).ok_or_else(|| NetError::UnknownPlace(p.clone()))?;
                    match dense.iter_mut().find(|(q, _)| *q == i) {
                        Some((_, acc)) => *acc += u64::from(w),
                        None => dense.push((i, u64::from(w))),
                    }
                }
                dense.sort_unstable();
                dense
                    .into_iter()
                    .map(|(i, w)| {
                        if w == 0 || w > u64::from(MAX_WEIGHT) {
                            Err(NetError::BadWeight {
                                place: places[i].clone(),
                                weight: w,
                            })
                        } else {
                            Ok((i, w as u32))
                        }
                    })
                    .collect()
            };
            pre.push(resolve(tpre)?);
            post.push(resolve(tpost)?);
            names.push(name);
        }
        Ok(Net {
            name: name.into(),
            places,
            transitions: names,
            pre,
            post,
        })
    }

    /// Builds a net directly from index-based arcs (used by constructions).
    pub fn from_arcs(
        name: impl Into<String>,
        places: Vec<String>,
        transitions: Vec<String>,
        pre: Vec<Arcs>,
        post: Vec<Arcs>,
    ) -> Result<Self, NetError> {
        assert_eq!(transitions.len(), pre.len());
        assert_eq!(transitions.len(), post.len());
        let named = |arcs: &Arcs| -> Vec<(String, u32)> {
            arcs.iter().map(|&(p, w)| (places[p].clone(), w)).collect()
        };
        let ts = transitions
            .iter()
            .zip(pre.iter().zip(&post))
            .map(|(t, (a, b))| (t.clone(), named(a), named(b)))
            .collect();
        Net::new(name, places.clone(), ts)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[String] {
        &self.transitions
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_index(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p == name)
    }

    pub fn transition_index(&self, name: &str) -> Option<TransId> {
        self.transitions.iter().position(|t| t == name)
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p]
    }

    pub fn transition_name(&self, t: TransId) -> &str {
        &self.transitions[t]
    }

    /// Sparse pre-multiset of `t`.
    pub fn pre(&self, t: TransId) -> &Arcs {
        &self.pre[t]
    }

    /// Sparse post-multiset of `t`.
    pub fn post(&self, t: TransId) -> &Arcs {
        &self.post[t]
    }

    pub fn pre_mset(&self, t: TransId) -> Marking {
        self.dense(&self.pre[t])
    }

    pub fn post_mset(&self, t: TransId) -> Marking {
        self.dense(&self.post[t])
    }

    pub fn pre_weight(&self, p: PlaceId, t: TransId) -> u32 {
        weight_of(&self.pre[t], p)
    }

    pub fn post_weight(&self, t: TransId, p: PlaceId) -> u32 {
        weight_of(&self.post[t], p)
    }

    fn dense(&self, arcs: &Arcs) -> Marking {
        let mut m = Marking::zero(self.num_places());
        for &(p, w) in arcs {
            m[p] = w;
        }
        m
    }

    /// Largest edge weight, 1 for an edgeless net.
    pub fn max_weight(&self) -> u32 {
        self.pre
            .iter()
            .chain(&self.post)
            .flat_map(|a| a.iter().map(|&(_, w)| w))
            .max()
            .unwrap_or(1)
    }

    pub fn is_ordinary(&self) -> bool {
        self.max_weight() == 1
    }

    pub fn is_conservative(&self) -> bool {
        (0..self.num_transitions()).all(|t| arc_total(&self.pre[t]) == arc_total(&self.post[t]))
    }

    pub fn check_marking(&self, m: &Marking) -> Result<(), NetError> {
        if m.len() == self.num_places() {
            Ok(())
        } else {
            Err(NetError::DimensionMismatch {
                expected: self.num_places(),
                got: m.len(),
            })
        }
    }

    pub fn enabled(&self, m: &Marking, t: TransId) -> bool {
        self.pre[t].iter().all(|&(p, w)| m[p] >= w)
    }

    pub fn enabled_transitions(&self, m: &Marking) -> impl Iterator<Item = TransId> + '_ {
        let m = m.clone();
        (0..self.num_transitions()).filter(move |&t| self.enabled(&m, t))
    }

    /// Fires `t` at `m`, which must be enabled.
    pub fn fire(&self, m: &Marking, t: TransId) -> Result<Marking, NetError> {
        if !self.enabled(m, t) {
            return Err(NetError::NotEnabled {
                transition: self.transitions[t].clone(),
                marking: m.clone(),
            });
        }
        let mut next = m.clone();
        for &(p, w) in &self.pre[t] {
            next[p] -= w;
        }
        for &(p, w) in &self.post[t] {
            next[p] = next[p]
                .checked_add(w)
                .ok_or_else(|| NetError::Overflow(self.transitions[t].clone()))?;
        }
        Ok(next)
    }

    /// Fires without the enabledness check; callers guarantee it.
    pub(crate) fn fire_unchecked(&self, m: &Marking, t: TransId) -> Marking {
        let mut next = m.clone();
        for &(p, w) in &self.pre[t] {
            next[p] -= w;
        }
        for &(p, w) in &self.post[t] {
            next[p] = next[p].saturating_add(w);
        }
        next
    }

    /// Fires a sequence left to right and records every intermediate marking.
    pub fn replay(&self, m0: &Marking, seq: &[TransId]) -> Result<Execution, NetError> {
        self.check_marking(m0)?;
        let mut steps = Vec::with_capacity(seq.len());
        let mut cur = m0.clone();
        for (index, &t) in seq.iter().enumerate() {
            cur = self.fire(&cur, t).map_err(|e| match e {
                NetError::NotEnabled {
                    transition,
                    marking,
                } => NetError::ReplayBlocked {
                    index,
                    transition,
                    marking,
                },
                other => other,
            })?;
            steps.push((t, cur.clone()));
        }
        Ok(Execution {
            start: m0.clone(),
            steps,
        })
    }

    /// Resolves transition names to indices.
    pub fn transitions_by_name<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<TransId>, NetError> {
        names
            .iter()
            .map(|n| {
                self.transition_index(n.as_ref())
                    .ok_or_else(|| NetError::UnknownTransition(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Resolves place names to indices.
    pub fn places_by_name<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<PlaceId>, NetError> {
        names
            .iter()
            .map(|n| {
                self.place_index(n.as_ref())
                    .ok_or_else(|| NetError::UnknownPlace(n.as_ref().to_string()))
            })
            .collect()
    }
}

pub(crate) fn weight_of(arcs: &Arcs, p: PlaceId) -> u32 {
    arcs.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, w)| w)
}

pub(crate) fn arc_total(arcs: &Arcs) -> u64 {
    arcs.iter().map(|&(_, w)| u64::from(w)).sum()
}

/// A start marking plus the fired transitions and the markings they produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub start: Marking,
    pub steps: Vec<(TransId, Marking)>,
}

impl Execution {
    pub fn end(&self) -> &Marking {
        self.steps.last().map_or(&self.start, |(_, m)| m)
    }

    /// All markings in order, starting with `start`.
    pub fn markings(&self) -> impl Iterator<Item = &Marking> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, m)| m))
    }
}

/// Parses the text format, returning the net and the marking given by
/// `tokens=` attributes (present iff at least one place carries one).
pub fn parse_net(text: &str) -> Result<(Net, Option<Marking>), ParseError> {
    let err = |line: usize, kind: ParseErrorKind| ParseError { line, kind };
    let mut name: Option<String> = None;
    let mut places: Vec<(String, Option<u32>)> = Vec::new();
    let mut place_idx: HashMap<String, usize> = HashMap::new();
    type RawArcs = Vec<(String, u32, usize)>;
    let mut trans: Vec<(String, RawArcs, RawArcs)> = Vec::new();
    let mut trans_names = std::collections::HashSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(keyword) = words.next() else { continue };
        match keyword {
            "net" => {
                if name.is_some() {
                    return Err(err(line, ParseErrorKind::Syntax("second `net` header".into())));
                }
                let n = words
                    .next()
                    .ok_or_else(|| err(line, ParseErrorKind::Syntax("`net` needs a name".into())))?;
                if let Some(extra) = words.next() {
                    return Err(err(line, ParseErrorKind::Syntax(format!("unexpected `{extra}`"))));
                }
                name = Some(n.to_string());
            }
            "place" | "trans" if name.is_none() => {
                return Err(err(line, ParseErrorKind::MissingHeader));
            }
            "place" => {
                let id = words
                    .next()
                    .ok_or_else(|| err(line, ParseErrorKind::Syntax("`place` needs an identifier".into())))?;
                check_ident(id).map_err(|m| err(line, ParseErrorKind::Syntax(m)))?;
                let mut tokens = None;
                for w in words {
                    let value = w.strip_prefix("tokens=").ok_or_else(|| {
                        err(line, ParseErrorKind::Syntax(format!("unexpected `{w}`")))
                    })?;
                    if tokens.is_some() {
                        return Err(err(line, ParseErrorKind::Syntax("repeated `tokens=`".into())));
                    }
                    let n: u32 = value.parse().map_err(|_| {
                        err(line, ParseErrorKind::Syntax(format!("bad token count `{value}`")))
                    })?;
                    tokens = Some(n);
                }
                if place_idx.contains_key(id) || trans_names.contains(id) {
                    return Err(err(line, ParseErrorKind::Duplicate(id.to_string())));
                }
                place_idx.insert(id.to_string(), places.len());
                places.push((id.to_string(), tokens));
            }
            "trans" => {
                let id = words
                    .next()
                    .ok_or_else(|| err(line, ParseErrorKind::Syntax("`trans` needs an identifier".into())))?;
                check_ident(id).map_err(|m| err(line, ParseErrorKind::Syntax(m)))?;
                if place_idx.contains_key(id) || !trans_names.insert(id.to_string()) {
                    return Err(err(line, ParseErrorKind::Duplicate(id.to_string())));
                }
                let mut pre = Vec::new();
                let mut post = Vec::new();
                let mut side: Option<bool> = None;
                let (mut seen_pre, mut seen_post) = (false, false);
                for w in words {
                    match w {
                        "pre" if !seen_pre && !seen_post => {
                            seen_pre = true;
                            side = Some(true);
                        }
                        "post" if !seen_post => {
                            seen_post = true;
                            side = Some(false);
                        }
                        "pre" | "post" => {
                            return Err(err(line, ParseErrorKind::Syntax(format!("misplaced `{w}`"))));
                        }
                        arc => {
                            let target = match side {
                                Some(true) => &mut pre,
                                Some(false) => &mut post,
                                None => {
                                    return Err(err(
                                        line,
                                        ParseErrorKind::Syntax(format!(
                                            "arc `{arc}` before `pre`/`post`"
                                        )),
                                    ))
                                }
                            };
                            let (p, weight) = match arc.split_once(':') {
                                None => (arc, 1),
                                Some((p, ws)) => {
                                    let weight = ws
                                        .parse::<u64>()
                                        .ok()
                                        .filter(|&v| (1..=u64::from(MAX_WEIGHT)).contains(&v))
                                        .ok_or_else(|| {
                                            err(line, ParseErrorKind::BadWeight(ws.to_string()))
                                        })?;
                                    (p, weight as u32)
                                }
                            };
                            check_ident(p).map_err(|m| err(line, ParseErrorKind::Syntax(m)))?;
                            target.push((p.to_string(), weight, line));
                        }
                    }
                }
                trans.push((id.to_string(), pre, post));
            }
            other => {
                return Err(err(line, ParseErrorKind::Syntax(format!("unknown keyword `{other}`"))));
            }
        }
    }

    let name = name.ok_or(ParseError {
        line: text.lines().count().max(1),
        kind: ParseErrorKind::MissingHeader,
    })?;
    let resolve = |arcs: Vec<(String, u32, usize)>| -> Result<Vec<(String, u32)>, ParseError> {
        let mut sums: Vec<(String, u64, usize)> = Vec::new();
        for (p, w, line) in arcs {
            if !place_idx.contains_key(&p) {
                return Err(err(line, ParseErrorKind::UndeclaredPlace(p)));
            }
            match sums.iter_mut().find(|(q, _, _)| *q == p) {
                Some((_, acc, _)) => *acc += u64::from(w),
                None => sums.push((p, u64::from(w), line)),
            }
        }
        sums.into_iter()
            .map(|(p, w, line)| {
                if w > u64::from(MAX_WEIGHT) {
                    Err(err(line, ParseErrorKind::BadWeight(w.to_string())))
                } else {
                    Ok((p, w as u32))
                }
            })
            .collect()
    };
    let mut ts = Vec::with_capacity(trans.len());
    for (id, pre, post) in trans {
        ts.push((id, resolve(pre)?, resolve(post)?));
    }
    let marking = places
        .iter()
        .any(|(_, t)| t.is_some())
        .then(|| Marking(places.iter().map(|(_, t)| t.unwrap_or(0)).collect()));
    let place_names = places.into_iter().map(|(p, _)| p).collect();
    let net = Net::new(name, place_names, ts).expect("validated during parsing");
    Ok((net, marking))
}

fn check_ident(id: &str) -> Result<(), String> {
    if id.is_empty() || id.contains([':', '=', '#']) || id == "pre" || id == "post" {
        Err(format!("invalid identifier `{id}`"))
    } else {
        Ok(())
    }
}

/// Writes the canonical text form. With a marking, every place gets a
/// `tokens=` attribute so that parsing gives the marking back exactly.
pub fn serialize_net(net: &Net, marking: Option<&Marking>) -> String {
    use fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "net {}", net.name);
    for (i, p) in net.places.iter().enumerate() {
        match marking {
            Some(m) => {
                let _ = writeln!(out, "place {p} tokens={}", m[i]);
            }
            None => {
                let _ = writeln!(out, "place {p}");
            }
        }
    }
    for t in 0..net.num_transitions() {
        let _ = write!(out, "trans {}", net.transitions[t]);
        for (label, arcs) in [("pre", &net.pre[t]), ("post", &net.post[t])] {
            if arcs.is_empty() {
                continue;
            }
            let _ = write!(out, " {label}");
            for &(p, w) in arcs {
                if w == 1 {
                    let _ = write!(out, " {}", net.places[p]);
                } else {
                    let _ = write!(out, " {}:{w}", net.places[p]);
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Parses a comma-separated marking such as `1,0,2`.
pub fn parse_marking(net: &Net, text: &str) -> Result<Marking, NetError> {
    let counts: Vec<u32> = if text.trim().is_empty() {
        Vec::new()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| NetError::BadMarking(text.to_string()))?
    };
    let m = Marking(counts);
    net.check_marking(&m)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "\
net fig1
place p1 tokens=4
place p2
place p3
place p4
place p5
place p6 tokens=1
trans t1 pre p1 p3 p4 post p2 p3 p4
trans t2 pre p2 post p3 p5
trans t3 pre p3 post p4
trans t4 pre p4 post p1
trans t5 pre p5
trans t6 pre p6 post p5 p6
";

    #[test]
    fn parses_figure_one() {
        let (net, m) = parse_net(FIG1).unwrap();
        assert_eq!(net.num_places(), 6);
        assert_eq!(net.num_transitions(), 6);
        assert_eq!(m.unwrap().counts(), &[4, 0, 0, 0, 0, 1]);
        assert_eq!(net.pre_mset(0).counts(), &[1, 0, 1, 1, 0, 0]);
        assert_eq!(net.post_mset(1).counts(), &[0, 0, 1, 0, 1, 0]);
        assert!(net.post_mset(4).is_zero());
    }

    #[test]
    fn firing_and_identity_loop() {
        let (net, _) = parse_net(FIG1).unwrap();
        let m = Marking::new(vec![1; 6]);
        assert!(net.enabled(&m, 1));
        assert_eq!(net.fire(&m, 1).unwrap().counts(), &[1, 0, 2, 1, 2, 1]);
        let zero = Marking::zero(6);
        assert!(matches!(net.fire(&zero, 0), Err(NetError::NotEnabled { .. })));
        // t1 has pre ≥ post on p3, p4 only through observation; replay sanity
        let exec = net.replay(&m, &[]).unwrap();
        assert_eq!(exec.end(), &m);
    }

    #[test]
    fn multiset_operations() {
        let a = Marking::new(vec![3, 0, 2]);
        let b = Marking::new(vec![1, 4, 2]);
        assert_eq!(a.plus(&b).counts(), &[4, 4, 4]);
        assert_eq!(a.minus(&b).counts(), &[2, 0, 0]);
        assert_eq!(a.meet(&b).counts(), &[1, 0, 2]);
        assert!(!a.le(&b));
        assert!(a.meet(&b).le(&a));
        assert_eq!(a.carrier().into_iter().collect::<Vec<_>>(), vec![0, 2]);
        assert!(Marking::zero(3).carrier().is_empty());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_net("net x\nplace p\nplace p\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::Duplicate(_)));
        let e = parse_net("net x\nplace p\ntrans t pre p:0\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::BadWeight(_)));
        let e = parse_net("net x\nplace p\n\ntrans t pre q\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::UndeclaredPlace(_)));
        let e = parse_net("net x\ntrans t pre p:2147483648\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadWeight(_)));
        let e = parse_net("place p\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::MissingHeader));
        let e = parse_net("net x\nplace p\ntrans p\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Duplicate(_)));
        let e = parse_net("net x\nplace p\nfoo\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn empty_net_round_trips() {
        let (net, m) = parse_net("net empty\n").unwrap();
        assert_eq!(net.num_places(), 0);
        assert!(m.is_none());
        assert_eq!(serialize_net(&net, None), "net empty\n");
    }

    #[test]
    fn serialization_is_a_fixpoint() {
        let (net, m) = parse_net(FIG1).unwrap();
        let text = serialize_net(&net, m.as_ref());
        let (net2, m2) = parse_net(&text).unwrap();
        assert_eq!((&net, &m), (&net2, &m2));
        assert_eq!(serialize_net(&net2, m2.as_ref()), text);
    }

    #[test]
    fn weights_and_repeated_arcs_accumulate() {
        let (net, _) = parse_net("net w\nplace p\nplace q\ntrans t pre p p:2 post q:3\n").unwrap();
        assert_eq!(net.pre_weight(0, 0), 3);
        assert_eq!(net.post_weight(0, 1), 3);
        assert_eq!(net.max_weight(), 3);
    }
}
