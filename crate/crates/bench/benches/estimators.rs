use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use puppyflow_core::flow::{discretize_recording, surrogate_matrix_from_series, te_matrix_from_series, Correction};
use puppyflow_core::info::{discretize, surrogate_baseline, transfer_entropy};
use puppyflow_core::sim::{noise_episode, run_episode};
use puppyflow_core::{ChannelId, Discretization, Kind, Leg, SimConfig, TeConfig};

fn recording(seconds: f64) -> puppyflow_core::Recording {
    run_episode(&SimConfig::named("bound-right", "foil", seconds, 7).unwrap()).unwrap()
}

fn estimators(c: &mut Criterion) {
    let cfg = TeConfig::default();
    let rec = recording(60.0);
    let series = discretize_recording(&rec, &cfg).unwrap();
    let motor = ChannelId::new(Leg::HR, Kind::Motor).index();
    let knee = ChannelId::new(Leg::HR, Kind::Knee).index();

    let mut g = c.benchmark_group("transfer_entropy");
    for k in [1usize, 2, 4] {
        let cfg = TeConfig { history_k: k, ..cfg };
        g.bench_with_input(BenchmarkId::from_parameter(k), &cfg, |b, cfg| {
            b.iter(|| transfer_entropy(black_box(&series[motor]), black_box(&series[knee]), cfg).unwrap())
        });
    }
    g.finish();

    let col = rec.column(ChannelId::new(Leg::HR, Kind::Knee));
    let mut g = c.benchmark_group("discretize");
    for method in [Discretization::EqualFrequency, Discretization::EqualWidth] {
        g.bench_function(format!("{method:?}"), |b| b.iter(|| discretize(black_box(col), 5, method).unwrap()));
    }
    g.finish();

    c.bench_function("te_matrix_16x16", |b| b.iter(|| te_matrix_from_series(black_box(&series), &cfg, None).unwrap()));
    c.bench_function("surrogate_baseline_100", |b| {
        b.iter(|| surrogate_baseline(&series[motor], &series[knee], &cfg, 100, 1).unwrap())
    });

    let noise = discretize_recording(&noise_episode(1000, 0.02, 3).unwrap(), &cfg).unwrap();
    let mut g = c.benchmark_group("surrogate_matrix");
    g.sample_size(10);
    g.bench_function("noise_1000x20", |b| {
        b.iter(|| surrogate_matrix_from_series(&noise, &cfg, 20, 5, Correction::MaxStatistic).unwrap())
    });
    g.finish();
}

fn simulator(c: &mut Criterion) {
    let cfg = SimConfig::named("turn-left", "rubber", 60.0, 11).unwrap();
    c.bench_function("run_episode_60s", |b| b.iter(|| run_episode(black_box(&cfg)).unwrap()));
}

criterion_group!(benches, estimators, simulator);
criterion_main!(benches);
