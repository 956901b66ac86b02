//! The automaton reduction and the 0/1 shortcut on small instances.

use std::path::PathBuf;

use ionet_core::classify::classify;
use ionet_core::liveness::is_live_exact;
use ionet_core::reduce_lba::{
    build_stage, parse_word, reduction_correctness_check, LbaSpec, ReductionBudgets, Stage,
};
use ionet_core::slp::{slp_01_shortcut, SlpOptions};
use ionet_core::{parse_net, Marking};

fn machine(name: &str) -> LbaSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/lba").join(name);
    LbaSpec::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn acceptance_matches_liveness_of_the_closed_net() {
    for (file, word, accepted) in [
        ("accept_all.lba", "ab", true),
        ("reject_all.lba", "ab", false),
        ("reject_all.lba", "a", false),
        ("second_is_b.lba", "ab", true),
        ("flip.lba", "ab", true),
    ] {
        let spec = machine(file);
        let symbols = parse_word(word).unwrap();
        let (net, _) = build_stage(&spec, &symbols, Stage::Closed).unwrap();
        let class = classify(&net);
        assert!(class.ordinary && class.io, "{file} {word}");
        let report = reduction_correctness_check(&spec, &symbols, &ReductionBudgets::default()).unwrap();
        assert_eq!(report.accepted, accepted, "{file} {word}");
        assert!(report.agree(), "{file} {word}: {report:?}");
    }
}

#[test]
fn marked_ring_has_a_single_token_certificate() {
    for n in 2..=5 {
        let mut text = String::from("net ring\n");
        for i in 0..n {
            text += &format!("place p{i}\n");
        }
        for i in 0..n {
            text += &format!("trans t{i} pre p{i} post p{}\n", (i + 1) % n);
        }
        let (net, _) = parse_net(&text).unwrap();
        let out = slp_01_shortcut(&net, &SlpOptions::default()).unwrap();
        let cert = out.certificate.expect("ring is structurally live");
        assert!(cert.iter().all(|&v| v <= 1));
        assert!(is_live_exact(&net, &cert, 10_000).unwrap());
        let mut one = vec![0; n];
        one[n - 1] = 1;
        assert!(is_live_exact(&net, &Marking::new(one), 10_000).unwrap());
    }
}
