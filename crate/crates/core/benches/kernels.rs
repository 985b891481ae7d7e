//! Hot kernels under the rayon backend at one thread and at all threads.
//!
//! `cargo bench -p torusgaps` measures the parallel build; add
//! `--no-default-features` to measure the plain sequential fallback (the
//! group names then carry a `seq` prefix).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use torusgaps::diophantine::{count_8tuples, CoordBox, Count8Params, SieveWindow};
use torusgaps::dirichlet::{evaluate, CoeffRule, DirichletSpec};
use torusgaps::par::is_parallel;
use torusgaps::{enumerate, pair_statistic, validate_form, Interval};

fn backend() -> &'static str {
    if is_parallel() {
        "par"
    } else {
        "seq"
    }
}

/// Thread counts to compare: just 1 for the sequential build.
fn thread_counts() -> Vec<usize> {
    if is_parallel() {
        let all = std::thread::available_parallelism().map_or(1, |n| n.get());
        if all > 1 {
            vec![1, all]
        } else {
            vec![1]
        }
    } else {
        vec![1]
    }
}

fn run_with<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn bench_kernels(c: &mut Criterion) {
    let form = validate_form(1.3, 0.41, 2.2).unwrap();
    let spectrum = enumerate(&form, 1e6).unwrap();
    let window = SieveWindow::from_log(16.0, 0.25);
    let dirichlet = DirichletSpec::new(1e6, 2e6, CoeffRule::InS(window));
    let bx = CoordBox::new(1, 12);
    let count8 = Count8Params::new([bx; 4], [bx; 4], 4, 100.0, 12.0, 0.05);

    let mut g = c.benchmark_group(format!("{}/kernels", backend()));
    g.sample_size(10);
    for threads in thread_counts() {
        g.bench_with_input(BenchmarkId::new("enumerate_1e6", threads), &threads, |b, &t| {
            b.iter(|| run_with(t, || enumerate(black_box(&form), 1e6).unwrap().count()))
        });
        g.bench_with_input(BenchmarkId::new("pairs_1e6", threads), &threads, |b, &t| {
            b.iter(|| {
                run_with(t, || {
                    pair_statistic(&spectrum, 1e6, Interval::closed(0.0, black_box(1e-3)))
                        .unwrap()
                        .raw_pairs
                })
            })
        });
        g.bench_with_input(BenchmarkId::new("dirichlet_1e6", threads), &threads, |b, &t| {
            b.iter(|| run_with(t, || evaluate(&dirichlet, black_box(0.37)).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("count8_m12", threads), &threads, |b, &t| {
            b.iter(|| run_with(t, || count_8tuples(black_box(&count8)).unwrap().total()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_kernels);
criterion_main!(benches);
