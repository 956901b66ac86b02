//! Sequential fallback versus the rayon core on the batch-heavy entry points.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ionet_core::gen::{generate_seeded, ClassKind, GenParams};
use ionet_core::liveness::{find_witness, WitnessOptions};
use ionet_core::slp::{decide_slp, is_nonlive, NonLiveOptions, SlpMethod, SlpOptions};
use ionet_core::{parse_net, Marking, Net, Parallelism};

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn fixture(name: &str) -> (Net, Option<Marking>) {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_net(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn witness_search(c: &mut Criterion) {
    let (net, _) = fixture("fig5.net");
    let m = Marking::new(vec![0, 1, 1, 0, 0, 4, 4]);
    let mut group = c.benchmark_group("find_witness");
    for (name, parallelism) in MODES {
        let opts = WitnessOptions {
            parallelism,
            ..WitnessOptions::default()
        };
        group.bench_function(name, |b| b.iter(|| find_witness(&net, &m, opts).unwrap()));
    }
    group.finish();
}

fn capped_decision(c: &mut Criterion) {
    let nets: Vec<Net> = (0..8)
        .map(|seed| generate_seeded(&GenParams::new(ClassKind::Imo, 5, 5, 2), seed))
        .collect();
    let m = Marking::new(vec![1; 5]);
    let mut group = c.benchmark_group("is_nonlive");
    group.sample_size(20);
    for (name, parallelism) in MODES {
        let opts = NonLiveOptions {
            parallelism,
            ..NonLiveOptions::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| {
                for net in &nets {
                    let _ = is_nonlive(net, &m, &opts);
                }
            })
        });
    }
    group.finish();
}

fn structural_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide_slp");
    group.sample_size(10);
    for file in ["fig1.net", "fig9.net"] {
        let (net, _) = fixture(file);
        for (name, parallelism) in MODES {
            let opts = SlpOptions {
                method: SlpMethod::Capped,
                liveness: NonLiveOptions {
                    parallelism,
                    ..NonLiveOptions::default()
                },
                ..SlpOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(name, file), &net, |b, net| {
                b.iter(|| decide_slp(net, &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, witness_search, capped_decision, structural_search);
criterion_main!(benches);
