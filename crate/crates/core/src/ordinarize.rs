//! Weighted-to-ordinary transformation.
//!
//! Every place `p` touched by an arc is replaced by a ring of `wmax(p)`
//! ordinary places (`wmax` being the largest weight of an arc at `p`) joined
//! by rotation transitions that move a token one step around the ring. An
//! arc of weight `k` between `p` and `t` becomes `k` ordinary arcs between
//! the first `k` ring places and the image of `t`. A marking `M` is related
//! to a marking `M'` of the ordinary net when every ring holds `M(p)` tokens
//! in total; related markings are live together.

use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify, ClassifyError};
use crate::net::{Arcs, Marking, Net, NetError, PlaceId, TransId};
use crate::slp::{is_nonlive, NonLiveOptions, SlpError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinarizeError {
    #[error(transparent)]
    NotBimo(#[from] ClassifyError),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrdinarizeOptions {
    /// Give single-place rings their (vacuous) self-rotation.
    pub self_rotations: bool,
}

impl Default for OrdinarizeOptions {
    fn default() -> Self {
        OrdinarizeOptions { self_rotations: true }
    }
}

/// Correspondence between a net and its ordinary version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrdinarizeMap {
    /// Ring places of each original place, in rotation order. A place
    /// without arcs keeps a single place and no rotation.
    pub rings: Vec<Vec<PlaceId>>,
    /// Rotation transitions of each ring; `rotations[i][j]` moves a token
    /// from `rings[i][j]` to the next place of the ring.
    pub rotations: Vec<Vec<TransId>>,
    /// Image of each original transition.
    pub images: Vec<TransId>,
}

impl OrdinarizeMap {
    pub fn num_places(&self) -> usize {
        self.rings.iter().map(Vec::len).sum()
    }

    /// All rotation transitions.
    pub fn rotation_transitions(&self) -> impl Iterator<Item = TransId> + '_ {
        self.rotations.iter().flatten().copied()
    }
}

/// Ordinarizes a BIMO net, with self-rotations on single-place rings.
pub fn ordinarize(net: &Net) -> Result<(Net, OrdinarizeMap), OrdinarizeError> {
    ordinarize_with(net, OrdinarizeOptions::default())
}

pub fn ordinarize_with(net: &Net, opts: OrdinarizeOptions) -> Result<(Net, OrdinarizeMap), OrdinarizeError> {
    if !classify(net).bimo {
        let t = (0..net.num_transitions())
            .find(|&t| !crate::classify::is_bimo_transition(net, t))
            .map(|t| net.transition_name(t).to_string())
            .unwrap_or_default();
        return Err(ClassifyError::NotBimo(t).into());
    }
    let np = net.num_places();
    let mut wmax = vec![0u32; np];
    for t in 0..net.num_transitions() {
        for &(p, w) in net.pre(t).iter().chain(net.post(t)) {
            wmax[p] = wmax[p].max(w);
        }
    }

    let mut places = Vec::new();
    let mut rings = Vec::with_capacity(np);
    for (p, &size) in wmax.iter().enumerate() {
        let name = net.place_name(p);
        if size == 0 {
            rings.push(vec![places.len()]);
            places.push(name.to_string());
            continue;
        }
        let ring: Vec<PlaceId> = (places.len()..places.len() + size as usize).collect();
        places.extend((1..=size).map(|j| format!("{name}_{j}")));
        rings.push(ring);
    }

    let mut transitions: Vec<String> = net.transitions().to_vec();
    let lift = |arcs: &Arcs| -> Arcs {
        let mut out: Arcs = arcs
            .iter()
            .flat_map(|&(p, w)| rings[p][..w as usize].iter().map(|&q| (q, 1)))
            .collect();
        out.sort_unstable();
        out
    };
    let mut pre: Vec<Arcs> = (0..net.num_transitions()).map(|t| lift(net.pre(t))).collect();
    let mut post: Vec<Arcs> = (0..net.num_transitions()).map(|t| lift(net.post(t))).collect();
    let images = (0..net.num_transitions()).collect();

    let mut rotations = Vec::with_capacity(np);
    for (p, ring) in rings.iter().enumerate() {
        let size = wmax[p] as usize;
        if size == 0 || (size == 1 && !opts.self_rotations) {
            rotations.push(Vec::new());
            continue;
        }
        let name = net.place_name(p);
        let mut rot = Vec::with_capacity(size);
        for j in 0..size {
            rot.push(transitions.len());
            transitions.push(format!("rot_{name}_{}", j + 1));
            pre.push(vec![(ring[j], 1)]);
            post.push(vec![(ring[(j + 1) % size], 1)]);
        }
        rotations.push(rot);
    }

    let out = Net::from_arcs(format!("{}_ordinary", net.name()), places, transitions, pre, post)?;
    Ok((out, OrdinarizeMap { rings, rotations, images }))
}

/// The canonical related marking: all tokens of each place on its first
/// ring place.
pub fn embed_marking(map: &OrdinarizeMap, m: &Marking) -> Result<Marking, NetError> {
    if m.len() != map.rings.len() {
        return Err(NetError::DimensionMismatch {
            expected: map.rings.len(),
            got: m.len(),
        });
    }
    let mut out = Marking::zero(map.num_places());
    for (ring, &v) in map.rings.iter().zip(m.iter()) {
        out[ring[0]] = v;
    }
    Ok(out)
}

/// Sums each ring.
pub fn project_marking(map: &OrdinarizeMap, m: &Marking) -> Result<Marking, NetError> {
    if m.len() != map.num_places() {
        return Err(NetError::DimensionMismatch {
            expected: map.num_places(),
            got: m.len(),
        });
    }
    Ok(Marking::new(
        map.rings
            .iter()
            .map(|ring| ring.iter().map(|&q| m[q]).sum())
            .collect(),
    ))
}

/// Liveness verdicts on both sides of the transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub original_nonlive: bool,
    pub ordinary_nonlive: bool,
}

impl TransferReport {
    pub fn agree(&self) -> bool {
        self.original_nonlive == self.ordinary_nonlive
    }
}

/// Compares non-liveness of `(net, m)` with that of its ordinary version at
/// the canonical related marking.
pub fn check_liveness_transfer(net: &Net, m: &Marking, opts: &NonLiveOptions) -> Result<TransferReport, SlpError> {
    let (ord, map) = ordinarize(net).map_err(|e| match e {
        OrdinarizeError::NotBimo(c) => SlpError::NotBimo(c),
        OrdinarizeError::Net(n) => SlpError::Net(n),
    })?;
    let original_nonlive = is_nonlive(net, m, opts)?.is_nonlive();
    let ordinary_nonlive = is_nonlive(&ord, &embed_marking(&map, m)?, opts)?.is_nonlive();
    Ok(TransferReport {
        original_nonlive,
        ordinary_nonlive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_net;

    const WEIGHTED: &str = "net w\nplace p1\nplace p2\ntrans t pre p1:2 post p1:3 p2\n";

    #[test]
    fn rings_and_images() {
        let (net, _) = parse_net(WEIGHTED).unwrap();
        let (ord, map) = ordinarize(&net).unwrap();
        assert_eq!(map.rings, vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(ord.pre(0), &vec![(0, 1), (1, 1)]);
        assert_eq!(ord.post(0), &vec![(0, 1), (1, 1), (2, 1), (3, 1)]);
        assert_eq!(map.rotations, vec![vec![1, 2, 3], vec![4]]);
        assert_eq!(ord.pre(3), &vec![(2, 1)]);
        assert_eq!(ord.post(3), &vec![(0, 1)]);
        assert!(ord.is_ordinary());
        assert!(classify(&ord).bimo);

        let (bare, map) = ordinarize_with(&net, OrdinarizeOptions { self_rotations: false }).unwrap();
        assert_eq!(bare.num_transitions(), 4);
        assert!(map.rotations[1].is_empty());
    }

    #[test]
    fn embedding_round_trip() {
        let (net, _) = parse_net(WEIGHTED).unwrap();
        let (ord, map) = ordinarize(&net).unwrap();
        let m = Marking::new(vec![3, 1]);
        let e = embed_marking(&map, &m).unwrap();
        assert_eq!(e, Marking::new(vec![3, 0, 0, 1]));
        let rotated = ord.fire(&e, map.rotations[0][0]).unwrap();
        assert_eq!(project_marking(&map, &rotated).unwrap(), m);
        assert!(embed_marking(&map, &Marking::new(vec![1])).is_err());
    }

    #[test]
    fn untouched_place_is_kept() {
        let (net, _) = parse_net("net u\nplace a\nplace idle\ntrans t pre a post a\n").unwrap();
        let (ord, map) = ordinarize(&net).unwrap();
        assert_eq!(ord.place_name(map.rings[1][0]), "idle");
        assert!(map.rotations[1].is_empty());
    }
}
