//! Seeded random nets of a requested class.
//!
//! Transitions are drawn in presented form — a source place, an observation
//! multiset and a destination multiset — so every generated net belongs to
//! the requested class by construction; draws whose arc weights exceed the
//! requested maximum are redrawn.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::net::{Marking, Net};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    /// One observation token at most, exactly one destination token.
    Io,
    /// Any observations, exactly one destination token.
    Imo,
    /// One observation token at most, any destinations.
    Bio,
    /// Any observations and destinations.
    Bimo,
}

impl FromStr for ClassKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "io" => Ok(ClassKind::Io),
            "imo" => Ok(ClassKind::Imo),
            "bio" => Ok(ClassKind::Bio),
            "bimo" => Ok(ClassKind::Bimo),
            other => Err(format!("unknown class `{other}` (expected io, imo, bio or bimo)")),
        }
    }
}

impl ClassKind {
    pub const ALL: [ClassKind; 4] = [ClassKind::Io, ClassKind::Imo, ClassKind::Bio, ClassKind::Bimo];

    fn single_observation(self) -> bool {
        matches!(self, ClassKind::Io | ClassKind::Bio)
    }

    fn single_destination(self) -> bool {
        matches!(self, ClassKind::Io | ClassKind::Imo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub class: ClassKind,
    pub places: usize,
    pub transitions: usize,
    /// Largest arc weight; 1 yields ordinary nets.
    pub max_weight: u32,
    /// Largest observation token count (multi-observation classes).
    pub max_observations: u32,
    /// Largest destination token count (branching classes).
    pub max_destinations: u32,
    /// Force exactly one destination token (token-conserving transitions).
    pub conservative: bool,
}

impl GenParams {
    pub fn new(class: ClassKind, places: usize, transitions: usize, max_weight: u32) -> Self {
        GenParams {
            class,
            places,
            transitions,
            max_weight: max_weight.max(1),
            max_observations: 2,
            max_destinations: 2,
            conservative: false,
        }
    }

    pub fn conservative(mut self) -> Self {
        self.conservative = true;
        self
    }
}

fn draw_multiset<R: Rng>(rng: &mut R, places: usize, count: u32, into: &mut Vec<u32>) {
    for _ in 0..count {
        into[rng.gen_range(0..places)] += 1;
    }
}

/// Draws one transition as `(pre, post)` dense weight vectors.
fn draw_transition<R: Rng>(rng: &mut R, params: &GenParams) -> (Vec<u32>, Vec<u32>) {
    let n = params.places;
    let w = params.max_weight;
    loop {
        let mut pre = vec![0u32; n];
        let mut obs = vec![0u32; n];
        let mut dest = vec![0u32; n];
        pre[rng.gen_range(0..n)] += 1;
        let obs_count = if params.class.single_observation() {
            rng.gen_range(0..=1)
        } else {
            rng.gen_range(0..=params.max_observations.max(1))
        };
        draw_multiset(rng, n, obs_count, &mut obs);
        let dest_count = if params.class.single_destination() || params.conservative {
            1
        } else {
            rng.gen_range(0..=params.max_destinations.max(1))
        };
        draw_multiset(rng, n, dest_count, &mut dest);
        let post: Vec<u32> = obs.iter().zip(&dest).map(|(o, d)| o + d).collect();
        for (p, o) in pre.iter_mut().zip(&obs) {
            *p += o;
        }
        if pre.iter().chain(&post).all(|&v| v <= w) {
            return (pre, post);
        }
    }
}

/// Generates a net from `rng`.
pub fn generate<R: Rng>(params: &GenParams, rng: &mut R) -> Net {
    let places: Vec<String> = (1..=params.places).map(|i| format!("p{i}")).collect();
    let mut transitions = Vec::with_capacity(params.transitions);
    if params.places > 0 {
        for k in 1..=params.transitions {
            let (pre, post) = draw_transition(rng, params);
            let arcs = |v: &[u32]| -> Vec<(String, u32)> {
                v.iter()
                    .enumerate()
                    .filter(|&(_, &w)| w > 0)
                    .map(|(p, &w)| (places[p].clone(), w))
                    .collect()
            };
            transitions.push((format!("t{k}"), arcs(&pre), arcs(&post)));
        }
    }
    let name = format!("{:?}_{}x{}", params.class, params.places, params.transitions).to_lowercase();
    Net::new(name, places, transitions).expect("generated arcs are well formed")
}

/// Generates a net from a seed; the same seed always gives the same net.
pub fn generate_seeded(params: &GenParams, seed: u64) -> Net {
    generate(params, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A marking with independent uniform components in `0..=max`.
pub fn random_marking<R: Rng>(rng: &mut R, places: usize, max: u32) -> Marking {
    Marking::new((0..places).map(|_| rng.gen_range(0..=max)).collect())
}

/// A marking with exactly `total` tokens spread uniformly over the places.
pub fn random_marking_with_total<R: Rng>(rng: &mut R, places: usize, total: u32) -> Marking {
    let mut m = vec![0u32; places];
    if places > 0 {
        draw_multiset(rng, places, total, &mut m);
    }
    Marking::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;

    #[test]
    fn generated_nets_have_the_requested_class() {
        for seed in 0..50 {
            for class in ClassKind::ALL {
                for w in 1..=3 {
                    let net = generate_seeded(&GenParams::new(class, 4, 5, w), seed);
                    let c = classify(&net);
                    assert!(c.bimo);
                    assert!(net.max_weight() <= w);
                    match class {
                        ClassKind::Io => assert!(c.io),
                        ClassKind::Imo => assert!(c.imo),
                        ClassKind::Bio => assert!(c.bio),
                        ClassKind::Bimo => {}
                    }
                    if class.single_destination() {
                        assert!(c.conservative);
                    }
                }
            }
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let params = GenParams::new(ClassKind::Bimo, 5, 6, 3);
        assert_eq!(generate_seeded(&params, 7), generate_seeded(&params, 7));
    }
}
