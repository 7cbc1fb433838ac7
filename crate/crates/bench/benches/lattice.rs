use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use latvar::cover::{cover_planes, densest_planes_count, enum_primitive_lattices};
use latvar::linalg::{default_delta, hnf, lll_reduce, IntMatrix};
use latvar::projection::{best_projection, SpaceCurve};
use latvar::IntegerLattice;

fn knapsack_basis(n: usize) -> IntMatrix {
    // identity with a column of large weights: a classic hard-ish LLL input
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut r = vec![0; n + 1];
            r[i] = 1;
            r[n] = 1_000_003 * (i as i64 + 1) % 999_983 + 17 * i as i64;
            r
        })
        .collect();
    IntMatrix::from_rows(&rows).unwrap()
}

fn linalg(c: &mut Criterion) {
    let mut g = c.benchmark_group("linalg");
    for n in [4usize, 8, 12] {
        let m = knapsack_basis(n);
        g.bench_with_input(BenchmarkId::new("hnf", n), &m, |b, m| b.iter(|| hnf(black_box(m))));
        g.bench_with_input(BenchmarkId::new("lll", n), &m, |b, m| {
            b.iter(|| lll_reduce(black_box(m), default_delta()).unwrap())
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumeration");
    let plane = IntegerLattice::from_rows(&[[1i64, 2, 3], [0, 3, -1]]).unwrap();
    for bound in [10u64, 50] {
        g.bench_with_input(BenchmarkId::new("points_in_box", bound), &bound, |b, &bound| {
            b.iter(|| plane.points_in_box(bound).unwrap().len())
        });
    }
    g.bench_function("primitive_planes_z3_hsq100", |b| {
        b.iter(|| enum_primitive_lattices(3, 2, 100).unwrap().len())
    });
    g.finish();
}

fn covers(c: &mut Criterion) {
    let mut g = c.benchmark_group("cover");
    g.sample_size(10);
    for bound in [4u64, 8, 16] {
        g.bench_with_input(BenchmarkId::new("cover_planes_p2", bound), &bound, |b, &bound| {
            b.iter(|| cover_planes(2, 1, bound).unwrap().len())
        });
    }
    g.bench_function("densest_d16_b30", |b| {
        b.iter(|| densest_planes_count(2, 1, 16, 30).unwrap().count)
    });
    g.bench_function("twisted_cubic_projection", |b| {
        let curve = SpaceCurve::twisted_cubic();
        b.iter(|| best_projection(&curve).unwrap().d_prime)
    });
    g.finish();
}

criterion_group!(benches, linalg, enumeration, covers);
criterion_main!(benches);
