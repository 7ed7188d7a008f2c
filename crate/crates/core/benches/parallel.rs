//! Rayon pool against a single worker on the per-ball pipelines. Build with
//! `--no-default-features` to time the sequential fallback itself.

use betascan_core::beta::{beta_sum, BetaOptions};
use betascan_core::cubes::{run_lab, LabConfig};
use betascan_core::curve::{generate_curve, CurveSpec};
use betascan_core::net::multires_for_curve;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn run<R>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        return rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f);
    }
    let _ = threads;
    f()
}

fn modes() -> Vec<(&'static str, Option<usize>)> {
    if cfg!(feature = "parallel") {
        vec![("rayon", None), ("one_worker", Some(1))]
    } else {
        vec![("sequential", None)]
    }
}

fn flatness(c: &mut Criterion) {
    let mut g = c.benchmark_group("beta_sum");
    g.sample_size(10);
    for spec in [CurveSpec::koch(25.0, 4), CurveSpec::circle(1.0, 256)] {
        let curve = generate_curve(&spec).unwrap();
        let mr = multires_for_curve(&curve, 10.0, 6).unwrap();
        for (name, threads) in modes() {
            g.bench_with_input(BenchmarkId::new(name, curve.label()), &mr, |b, mr| {
                b.iter(|| run(threads, || beta_sum(&curve, mr, &[2.0, 2.5], &BetaOptions::default()).unwrap()))
            });
        }
    }
    g.finish();
}

fn cube_lab(c: &mut Criterion) {
    let mut g = c.benchmark_group("cube_lab");
    g.sample_size(10);
    let curve = generate_curve(&CurveSpec::Polygon {
        vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.01], vec![0.0, 0.01]],
        closed: false,
    })
    .unwrap();
    let mr = multires_for_curve(&curve, 3.0, 7).unwrap();
    let rep = beta_sum(&curve, &mr, &[2.0], &BetaOptions::default()).unwrap();
    for (name, threads) in modes() {
        g.bench_function(BenchmarkId::new(name, curve.label()), |b| {
            b.iter(|| run(threads, || run_lab(&curve, &mr, &rep, &LabConfig::diagnostic()).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, flatness, cube_lab);
criterion_main!(benches);
