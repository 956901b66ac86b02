//! Randomised properties checked against exhaustive exploration of the
//! reachability graph, which is finite for the token-conserving nets drawn
//! here.

use ionet_core::classify::classify;
use ionet_core::gen::{generate_seeded, ClassKind, GenParams};
use ionet_core::liveness::is_live_exact;
use ionet_core::ordinarize::{embed_marking, ordinarize};
use ionet_core::slp::{is_nonlive, truncate, NonLiveOptions};
use ionet_core::{parse_net, serialize_net, Marking, Net};
use proptest::prelude::*;

const NODES: usize = 200_000;

fn class() -> impl Strategy<Value = ClassKind> {
    prop::sample::select(ClassKind::ALL.to_vec())
}

/// A token-conserving net of the given class together with a marking.
fn marked_net(class: ClassKind, max_weight: u32, max_tokens: u32) -> impl Strategy<Value = (Net, Marking)> {
    (2..=4usize, 1..=4usize, any::<u64>()).prop_flat_map(move |(places, transitions, seed)| {
        let params = GenParams::new(class, places, transitions, max_weight).conservative();
        let net = generate_seeded(&params, seed);
        prop::collection::vec(0..=max_tokens, places).prop_map(move |v| (net.clone(), Marking::new(v)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(kind in class(), seed in any::<u64>(), tokens in prop::collection::vec(0..5u32, 4)) {
        let net = generate_seeded(&GenParams::new(kind, 4, 5, 3), seed);
        let m = Marking::new(tokens);
        let text = serialize_net(&net, Some(&m));
        let (back, marking) = parse_net(&text).unwrap();
        prop_assert_eq!(serialize_net(&back, marking.as_ref()), text);
        prop_assert_eq!(marking, Some(m));
    }

    #[test]
    fn generated_nets_have_the_requested_class(kind in class(), seed in any::<u64>(), w in 1..=3u32) {
        let net = generate_seeded(&GenParams::new(kind, 4, 5, w), seed);
        let c = classify(&net);
        let holds = match kind {
            ClassKind::Io => c.io,
            ClassKind::Imo => c.imo,
            ClassKind::Bio => c.bio,
            ClassKind::Bimo => c.bimo,
        };
        prop_assert!(holds, "{}", serialize_net(&net, None));
        prop_assert!(c.max_weight <= w);
    }

    #[test]
    fn capped_decision_matches_exploration((net, m) in marked_net(ClassKind::Imo, 2, 3)) {
        let exact = is_live_exact(&net, &m, NODES).unwrap();
        let out = is_nonlive(&net, &m, &NonLiveOptions::default()).unwrap();
        prop_assert_eq!(out.is_nonlive(), !exact, "{}", serialize_net(&net, Some(&m)));
    }

    #[test]
    fn truncation_keeps_liveness((net, m) in marked_net(ClassKind::Io, 1, 12)) {
        let clamped = truncate(&net, &m);
        prop_assert!(clamped.le(&m));
        prop_assert_eq!(
            is_live_exact(&net, &m, NODES).unwrap(),
            is_live_exact(&net, &clamped, NODES).unwrap(),
            "{} clamped to {}", m, clamped
        );
    }

    #[test]
    fn ordinarization_keeps_liveness((net, m) in marked_net(ClassKind::Imo, 3, 3)) {
        let (ord, map) = ordinarize(&net).unwrap();
        prop_assert!(classify(&ord).ordinary);
        let lifted = embed_marking(&map, &m).unwrap();
        let before = is_live_exact(&net, &m, NODES);
        let after = is_live_exact(&ord, &lifted, NODES);
        if let (Ok(before), Ok(after)) = (before, after) {
            prop_assert_eq!(before, after, "{} -> {}", m, lifted);
        }
    }
}
