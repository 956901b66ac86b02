//! Class membership (ordinary, conservative, BIMO, BIO, IMO, IO) and
//! transition presentations.

use serde::Serialize;
use thiserror::Error;

use crate::net::{arc_total, Arcs, Marking, Net, NetError, PlaceId, TransId};

/// Name of the place added for transitions with an empty pre-multiset.
pub const DUMMY_PLACE: &str = "__dummy";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("transition `{0}` is not BIMO (|pre - post| >= 2)")]
    NotBimo(String),
    #[error("transition `{0}` has an empty pre-multiset; augment the net with a dummy place first")]
    EmptyPre(String),
    #[error("the net already uses the reserved identifier `{DUMMY_PLACE}`")]
    ReservedName,
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Class flags of a net plus its maximum edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NetClass {
    pub ordinary: bool,
    pub conservative: bool,
    pub bimo: bool,
    pub bio: bool,
    pub imo: bool,
    pub io: bool,
    pub max_weight: u32,
}

impl NetClass {
    /// Short name of the finest class, e.g. `ord-IO` or `BIMO`.
    pub fn label(&self) -> String {
        let base = if self.io {
            "IO"
        } else if self.imo {
            "IMO"
        } else if self.bio {
            "BIO"
        } else if self.bimo {
            "BIMO"
        } else {
            return "general".to_string();
        };
        if self.ordinary {
            format!("ord-{base}")
        } else {
            base.to_string()
        }
    }
}

/// Source place, observation multiset and destination multiset of a BIMO
/// transition: `pre = [source] + observations`, `post = observations + destinations`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub source: PlaceId,
    pub observations: Arcs,
    pub destinations: Arcs,
}

impl Presentation {
    pub fn observation_count(&self) -> u64 {
        arc_total(&self.observations)
    }

    pub fn destination_count(&self) -> u64 {
        arc_total(&self.destinations)
    }
}

/// `|pre - post|` with truncated difference.
pub(crate) fn excess(pre: &Arcs, post: &Arcs) -> u64 {
    pre.iter()
        .map(|&(p, w)| u64::from(w.saturating_sub(crate::net::weight_of(post, p))))
        .sum()
}

/// Presentation from raw arc lists; `None` when not BIMO or `pre` is empty.
pub(crate) fn present(pre: &Arcs, post: &Arcs) -> Option<Presentation> {
    let ex = excess(pre, post);
    if ex > 1 || pre.is_empty() {
        return None;
    }
    let source = if ex == 1 {
        pre.iter()
            .find(|&&(p, w)| w > crate::net::weight_of(post, p))
            .map(|&(p, _)| p)?
    } else {
        pre[0].0
    };
    let observations: Arcs = pre
        .iter()
        .filter_map(|&(p, w)| {
            let w = if p == source { w - 1 } else { w };
            (w > 0).then_some((p, w))
        })
        .collect();
    let destinations: Arcs = post
        .iter()
        .filter_map(|&(p, w)| {
            let w = w - crate::net::weight_of(&observations, p);
            (w > 0).then_some((p, w))
        })
        .collect();
    Some(Presentation {
        source,
        observations,
        destinations,
    })
}

pub fn is_bimo_transition(net: &Net, t: TransId) -> bool {
    excess(net.pre(t), net.post(t)) <= 1
}

/// The canonical presentation of `t`. When `|pre - post| = 0` the source is
/// the lowest-index place of the pre-multiset.
pub fn presentation(net: &Net, t: TransId) -> Result<Presentation, ClassifyError> {
    if !is_bimo_transition(net, t) {
        return Err(ClassifyError::NotBimo(net.transition_name(t).to_string()));
    }
    present(net.pre(t), net.post(t))
        .ok_or_else(|| ClassifyError::EmptyPre(net.transition_name(t).to_string()))
}

/// Result of adding the dummy place (if needed).
#[derive(Debug, Clone)]
pub struct Augmented {
    pub net: Net,
    /// Index of the dummy place, `None` when the net was returned unchanged.
    pub dummy: Option<PlaceId>,
}

impl Augmented {
    /// Lifts a marking of the original net by giving the dummy one token.
    pub fn lift(&self, m: &Marking) -> Marking {
        match self.dummy {
            None => m.clone(),
            Some(_) => {
                let mut v = m.counts().to_vec();
                v.push(1);
                Marking::new(v)
            }
        }
    }

    /// Drops the dummy coordinate.
    pub fn project(&self, m: &Marking) -> Marking {
        match self.dummy {
            None => m.clone(),
            Some(d) => Marking::new(m.counts()[..d].to_vec()),
        }
    }
}

/// Adds a place `__dummy` with a weight-1 self-loop on every transition with
/// an empty pre-multiset. Nets without such transitions come back unchanged.
pub fn dummy_augment(net: &Net) -> Result<Augmented, ClassifyError> {
    if net.place_index(DUMMY_PLACE).is_some() || net.transition_index(DUMMY_PLACE).is_some() {
        return Err(ClassifyError::ReservedName);
    }
    let needy: Vec<TransId> = (0..net.num_transitions())
        .filter(|&t| net.pre(t).is_empty())
        .collect();
    if needy.is_empty() {
        return Ok(Augmented {
            net: net.clone(),
            dummy: None,
        });
    }
    let d = net.num_places();
    let mut places = net.places().to_vec();
    places.push(DUMMY_PLACE.to_string());
    let mut pre = Vec::with_capacity(net.num_transitions());
    let mut post = Vec::with_capacity(net.num_transitions());
    for t in 0..net.num_transitions() {
        let mut a = net.pre(t).clone();
        let mut b = net.post(t).clone();
        if needy.contains(&t) {
            a.push((d, 1));
            b.push((d, 1));
        }
        pre.push(a);
        post.push(b);
    }
    let aug = Net::from_arcs(net.name(), places, net.transitions().to_vec(), pre, post)?;
    Ok(Augmented {
        net: aug,
        dummy: Some(d),
    })
}

/// Computes every class flag per definition (after dummy augmentation).
pub fn classify(net: &Net) -> NetClass {
    let ordinary = net.is_ordinary();
    let conservative = net.is_conservative();
    let mut bimo = true;
    let mut bio = true;
    let mut imo = true;
    for t in 0..net.num_transitions() {
        let (pre, post) = augmented_arcs(net, t);
        match present(&pre, &post) {
            None => {
                bimo = false;
                bio = false;
                imo = false;
            }
            Some(pr) => {
                // BIO: the observation multiset is a set with at most one element.
                if pr.observation_count() > 1 {
                    bio = false;
                }
                // IMO: exactly one destination token.
                if pr.destination_count() != 1 {
                    imo = false;
                }
            }
        }
    }
    NetClass {
        ordinary,
        conservative,
        bimo,
        bio,
        imo,
        io: bio && imo,
        max_weight: net.max_weight(),
    }
}

/// Arcs of `t` with the dummy loop added when its pre-multiset is empty.
/// The dummy is represented by the out-of-range index `num_places`.
fn augmented_arcs(net: &Net, t: TransId) -> (Arcs, Arcs) {
    if net.pre(t).is_empty() {
        let d = net.num_places();
        let mut post = net.post(t).clone();
        post.push((d, 1));
        (vec![(d, 1)], post)
    } else {
        (net.pre(t).clone(), net.post(t).clone())
    }
}

/// Whether the restriction of `t` to a place set (given by `pre`/`post`
/// already restricted) is an IMO transition. Transitions whose restricted
/// pre and post are both empty count as IMO.
pub(crate) fn restricted_is_imo(pre: &Arcs, post: &Arcs) -> bool {
    // Conservative BIMO transitions are exactly the IMO ones (or empty ones).
    arc_total(pre) == arc_total(post) && excess(pre, post) <= 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_net;

    #[test]
    fn weighted_branching_transition() {
        let (net, _) = parse_net("net x\nplace p\nplace q\ntrans t pre p post q:2\n").unwrap();
        let c = classify(&net);
        assert!(c.bimo && c.bio && !c.imo && !c.ordinary && !c.io);
        assert_eq!(c.max_weight, 2);
    }

    #[test]
    fn presentation_with_forced_source() {
        let (net, _) = parse_net("net x\nplace p1\nplace p2\ntrans t pre p1:2 post p1:3 p2\n").unwrap();
        let pr = presentation(&net, 0).unwrap();
        assert_eq!(pr.source, 0);
        assert_eq!(pr.observations, vec![(0, 1)]);
        assert_eq!(pr.destinations, vec![(0, 2), (1, 1)]);
    }

    #[test]
    fn not_bimo_is_rejected() {
        let (net, _) = parse_net("net x\nplace p\nplace q\ntrans t pre p q\n").unwrap();
        assert!(matches!(presentation(&net, 0), Err(ClassifyError::NotBimo(_))));
        assert!(!classify(&net).bimo);
    }

    #[test]
    fn empty_net_has_every_flag() {
        let (net, _) = parse_net("net e\n").unwrap();
        let c = classify(&net);
        assert!(c.ordinary && c.conservative && c.bimo && c.bio && c.imo && c.io);
        assert_eq!(c.max_weight, 1);
    }

    #[test]
    fn dummy_augmentation() {
        let (net, _) = parse_net("net x\nplace p\ntrans s post p\ntrans t pre p\n").unwrap();
        let aug = dummy_augment(&net).unwrap();
        assert_eq!(aug.dummy, Some(1));
        let pr = presentation(&aug.net, 0).unwrap();
        assert_eq!(pr.source, 1);
        assert!(pr.observations.is_empty());
        assert_eq!(pr.destinations, vec![(0, 1), (1, 1)]);
        assert_eq!(aug.lift(&Marking::new(vec![2])).counts(), &[2, 1]);
        let (plain, _) = parse_net("net y\nplace p\ntrans t pre p\n").unwrap();
        assert!(dummy_augment(&plain).unwrap().dummy.is_none());
        let (clash, _) = parse_net("net z\nplace __dummy\n").unwrap();
        assert!(matches!(dummy_augment(&clash), Err(ClassifyError::ReservedName)));
    }
}
