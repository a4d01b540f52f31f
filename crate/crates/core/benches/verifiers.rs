use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use breaklab::conjugacy::ConjugatePair;
use breaklab::rotation::{tune_to_rotation, TunedMap};
use breaklab::verify::{verify_denjoy, verify_finzi, Sampling};
use breaklab::{build_pl2, CirclePoint, ContinuedFraction, Execution};

fn tuned(b: f64, s1: f64) -> TunedMap {
    let base = build_pl2(CirclePoint::ZERO, CirclePoint::new(b).unwrap(), s1, 0.0).unwrap();
    tune_to_rotation(&base, &ContinuedFraction::golden(20), 24).unwrap()
}

fn verifiers(c: &mut Criterion) {
    let tm = tuned(0.5, 1.5);
    let t = tm.table();
    let v = 2.0 * 3f64.ln();
    let mut g = c.benchmark_group("verifiers");
    g.sample_size(10);
    for exec in [Execution::Auto, Execution::Sequential] {
        let s = Sampling::new(2000, 1).with_exec(exec);
        g.bench_with_input(
            BenchmarkId::new("finzi_n12", format!("{exec:?}")),
            &s,
            |b, s| b.iter(|| verify_finzi(&tm.map, &t, 12, v, s).unwrap()),
        );
        g.bench_with_input(
            BenchmarkId::new("denjoy_n14", format!("{exec:?}")),
            &s,
            |b, s| b.iter(|| verify_denjoy(&tm.map, &t, 14, v, s).unwrap()),
        );
    }
    g.finish();
}

fn deviation(c: &mut Criterion) {
    let (f1, f2) = (tuned(0.5, 1.5), tuned(0.4, 2.0));
    let table = f1.table();
    let pair = ConjugatePair::new(f1.map, f2.map, table, 24).unwrap();
    let delta = pair.thresholds().unwrap().delta0;
    let mut g = c.benchmark_group("deviation");
    g.sample_size(10);
    for exec in [Execution::Auto, Execution::Sequential] {
        let p = pair.clone().with_exec(exec);
        g.bench_function(BenchmarkId::new("measure_n12", format!("{exec:?}")), |b| {
            b.iter(|| p.deviation_measure(12, delta, 2e-3).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, verifiers, deviation);
criterion_main!(benches);
