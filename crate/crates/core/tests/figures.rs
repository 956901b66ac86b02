//! Behaviour of the figure nets shipped in `fixtures/`.

use std::path::PathBuf;

use ionet_core::classify::classify;
use ionet_core::liveness::{check_witness, dead_at, Check, Variant, Witness};
use ionet_core::net::{parse_net, Marking, Net};
use ionet_core::ordinarize::{ordinarize_with, OrdinarizeOptions};
use ionet_core::slp::{decide_slp, is_nonlive, LivenessVerdict, NonLiveOptions, SlpOptions};

fn fixture(name: &str) -> (Net, Option<Marking>) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_net(&text).unwrap()
}

fn m(v: &[u32]) -> Marking {
    Marking::new(v.to_vec())
}

fn nonlive(net: &Net, marking: &Marking) -> bool {
    is_nonlive(net, marking, &NonLiveOptions::default()).unwrap().is_nonlive()
}

#[test]
fn fig1_replay_passes_through_the_listed_markings() {
    let (net, marking) = fixture("fig1.net");
    assert_eq!(marking, Some(m(&[4, 0, 0, 0, 0, 1])));
    let seq = net
        .transitions_by_name(&["t2", "t3", "t3", "t4", "t4", "t4", "t5", "t5"])
        .unwrap();
    let run = net.replay(&m(&[1, 1, 1, 1, 1, 1]), &seq).unwrap();
    let expected: Vec<Marking> = [
        [1, 1, 1, 1, 1, 1],
        [1, 0, 2, 1, 2, 1],
        [1, 0, 1, 2, 2, 1],
        [1, 0, 0, 3, 2, 1],
        [2, 0, 0, 2, 2, 1],
        [3, 0, 0, 1, 2, 1],
        [4, 0, 0, 0, 2, 1],
        [4, 0, 0, 0, 1, 1],
        [4, 0, 0, 0, 0, 1],
    ]
    .iter()
    .map(|v| m(v))
    .collect();
    assert_eq!(run.markings().cloned().collect::<Vec<_>>(), expected);
    let class = classify(&net);
    assert!(class.bimo && class.ordinary);
}

#[test]
fn fig1_is_not_structurally_live() {
    let (net, _) = fixture("fig1.net");
    let out = decide_slp(&net, &SlpOptions::default()).unwrap();
    assert_eq!(out.certificate, None);
}

#[test]
fn fig6_liveness_is_not_monotone() {
    let (net, _) = fixture("fig6.net");
    assert!(nonlive(&net, &m(&[1, 0, 0, 0, 0])));
    assert!(!nonlive(&net, &m(&[2, 0, 0, 0, 0])));
    assert!(nonlive(&net, &m(&[3, 0, 0, 0, 0])));
    assert!(!nonlive(&net, &m(&[3, 0, 0, 0, 1])));
    let out = decide_slp(&net, &SlpOptions::default()).unwrap();
    let cert = out.certificate.expect("structurally live");
    assert!(!nonlive(&net, &cert));
}

#[test]
fn fig7_extra_token_kills_liveness() {
    let (net, marking) = fixture("fig7.net");
    let marking = marking.unwrap();
    assert!(classify(&net).io);
    assert!(!nonlive(&net, &marking));
    let mut more = marking.clone();
    more[1] += 1;
    let out = is_nonlive(&net, &more, &NonLiveOptions::default()).unwrap();
    let LivenessVerdict::NonLive(w) = out.verdict else {
        panic!("expected non-live")
    };
    let seq = net.transitions_by_name(&["t5", "t2", "t6"]).unwrap();
    let end = net.replay(&more, &seq).unwrap().end().clone();
    assert_eq!(end, m(&[2, 0, 0, 0, 0, 2]));
    for &t in &w.t_dead {
        assert!(dead_at(&net, &end, t, 10_000).unwrap());
    }
}

#[test]
fn fig5_witness_after_replay() {
    let (net, _) = fixture("fig5.net");
    let seq = net
        .transitions_by_name(&["t3", "t4", "t2", "t1", "t1", "t6", "t6", "t6"])
        .unwrap();
    let end = net.replay(&m(&[1; 7]), &seq).unwrap().end().clone();
    assert_eq!(end, m(&[0, 1, 1, 0, 0, 4, 4]));
    let w = Witness {
        m_wit: end,
        p_cruc: net.places_by_name(&["p1", "p2", "p3", "p4", "p5"]).unwrap(),
        t_dead: net.transitions_by_name(&["t1", "t6", "t7"]).unwrap(),
        path: None,
    };
    let check = check_witness(&net, &w, Variant::Ordinary, 100_000).unwrap();
    assert!(check.cond1 && check.cond2);
    assert_eq!(check.cond3, Check::Pass);
}

#[test]
fn fig9_depicted_marking_is_live() {
    let (net, marking) = fixture("fig9.net");
    let marking = marking.unwrap();
    assert!(!nonlive(&net, &marking));
}

#[test]
fn fig8_ordinarization_matches_the_figure() {
    let (left, _) = fixture("fig8_left.net");
    let (right, _) = fixture("fig8_right.net");
    let (ord, map) = ordinarize_with(&left, OrdinarizeOptions { self_rotations: false }).unwrap();
    // Rename the generated places and transitions to the figure's names.
    let place_names = ["p11", "p12", "p13", "p21"];
    let trans_names = ["t'", "t11", "t12", "t13"];
    assert_eq!(map.rings, vec![vec![0, 1, 2], vec![3]]);
    assert_eq!(ord.num_places(), right.num_places());
    assert_eq!(ord.num_transitions(), right.num_transitions());
    for t in 0..ord.num_transitions() {
        let rt = right.transition_index(trans_names[t]).unwrap();
        let rename = |arcs: &Vec<(usize, u32)>| -> Vec<(usize, u32)> {
            let mut v: Vec<_> = arcs
                .iter()
                .map(|&(p, w)| (right.place_index(place_names[p]).unwrap(), w))
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(rename(ord.pre(t)), *right.pre(rt));
        assert_eq!(rename(ord.post(t)), *right.post(rt));
    }
}
