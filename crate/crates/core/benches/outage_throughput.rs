use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use bidir_relay::config::SimConfig;
use bidir_relay::outage::{estimate_outage, RatePoint, TrialPolicy};
use bidir_relay::protocols::Scenario;
use bidir_relay::rng::StreamKey;

const TRIALS: u64 = 1 << 15;

fn outage_throughput(c: &mut Criterion) {
    let cfg = SimConfig::default();
    let model = cfg.trial_model(40.0).unwrap();
    let key = StreamKey::new(1);
    let policy = TrialPolicy::fixed(TRIALS);

    let mut group = c.benchmark_group("estimate_outage");
    group.throughput(Throughput::Elements(TRIALS));
    group.sample_size(10);
    // threads = 1 takes the sequential path; 0 uses the rayon pool when the
    // `parallel` feature is on and falls back to sequential otherwise.
    for (label, threads) in [("sequential", 1usize), ("parallel", 0)] {
        for s in [Scenario::TdmhOptRelay, Scenario::NcCollabAllBroadcast] {
            let rates = RatePoint::from_multiplexing(cfg.m, cfg.mu, 0.5, 1e4).unwrap();
            group.bench_with_input(BenchmarkId::new(label, s.name()), &s, |b, &s| {
                b.iter(|| estimate_outage(&model, s, &rates, 40.0, &policy, &key, threads).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, outage_throughput);
criterion_main!(benches);
