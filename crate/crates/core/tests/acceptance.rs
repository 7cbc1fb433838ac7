//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test -p latvar --test acceptance -- --nocapture --test-threads 1`
//! to see them in order.

use std::collections::HashSet;
use std::time::Instant;

use latvar::cover::{cover_planes, densest_planes_count, enum_primitive_lattices, enum_primitive_lattices_with, EnumOptions};
use latvar::experiment::{self, fit_exponent, ExperimentConfig};
use latvar::poly::{parse, Poly};
use latvar::projection::{best_projection, projection_degree, SpaceCurve};
use latvar::projective::{enum_proj_points, lattice_from_plane, plane_from_lattice};
use latvar::subdivision::subdivide;
use latvar::variety::{count_affine_points, count_proj_points, union_of_planes_variety, VarietySpec};
use latvar::{IntMatrix, IntegerLattice};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, passed: bool, detail: &str, started: Instant) {
    println!(
        "criterion {id:>2} {:<4} {name}: {detail} ({:.1}s)",
        if passed { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    assert!(passed, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_cover_correctness() {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in [2usize, 3] {
        for k in 1..n {
            for b in 1..=8u64 {
                let cover = cover_planes(n, k, b).unwrap();
                let covered = cover.covered_points().unwrap();
                let points = enum_proj_points(n, b).unwrap();
                let missing = points.iter().filter(|p| !covered.contains(*p)).count();
                if missing > 0 || points.len() != cover.points {
                    failures.push(format!("n={n} k={k} B={b}: {missing} uncovered"));
                }
                cases += 1;
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{cases} (n,k,B) cases fully covered")
    } else {
        failures.join("; ")
    };
    verdict(1, "cover correctness", failures.is_empty(), &detail, t);
}

#[test]
fn criterion_02_cover_size_scaling() {
    let t = Instant::now();
    let bs = [4u64, 8, 16, 32, 64];
    let samples: Vec<(f64, f64)> = bs
        .iter()
        .map(|&b| (b as f64, cover_planes(2, 1, b).unwrap().len() as f64))
        .collect();
    let fit = fit_exponent(&samples).unwrap();
    let sizes: Vec<u64> = samples.iter().map(|s| s.1 as u64).collect();
    verdict(
        2,
        "cover size scaling",
        (1.2..=1.8).contains(&fit.slope),
        &format!("sizes {sizes:?}, exponent {:.4} in [1.2, 1.8], target 1.5", fit.slope),
        t,
    );
}

#[test]
fn criterion_03_densest_sublinearity() {
    let t = Instant::now();
    let ds = [1usize, 2, 4, 8, 16, 32, 64];
    let counts: Vec<usize> = ds
        .iter()
        .map(|&d| densest_planes_count(2, 1, d, 50).unwrap().count)
        .collect();
    let samples: Vec<(f64, f64)> = ds.iter().zip(&counts).map(|(&d, &c)| (d as f64, c as f64)).collect();
    let fit = fit_exponent(&samples).unwrap();
    let bound = 2.0 * counts[0] as f64 * 64f64.powf(0.75);
    let growth_ok = counts[6] as f64 <= bound;
    let slope_ok = fit.slope <= 0.75;
    verdict(
        3,
        "densest-d sublinearity",
        slope_ok && growth_ok,
        &format!(
            "N {counts:?}, exponent {:.4} <= 0.75 [{}], N(64) = {} <= {bound:.0} [{}]",
            fit.slope,
            if slope_ok { "ok" } else { "violated" },
            counts[6],
            if growth_ok { "ok" } else { "violated" }
        ),
        t,
    );
}

#[test]
fn criterion_04_lattice_point_bound() {
    let t = Instant::now();
    let cfg = ExperimentConfig::parse(
        "id = \"lattice-point-bound\"\nseed = 4\nsamples = 200\nmax_det_sq = 100\nb_values = [10, 100]\nconstant_max = 20\n",
    )
    .unwrap();
    let report = experiment::run_experiment(&cfg);
    let worst = report.values.get("max_normalized_count").copied().unwrap_or(f64::NAN);
    verdict(
        4,
        "lattice point bound",
        report.passed(),
        &format!("max count*sqrt(det_sq)/B^2 over 200 lattices = {worst:.4} <= 20"),
        t,
    );
}

fn random_primitive_lattice(rng: &mut ChaCha8Rng, ambient: usize, rank: usize) -> IntegerLattice {
    loop {
        let rows: Vec<Vec<i64>> = (0..rank)
            .map(|_| (0..ambient).map(|_| rng.gen_range(-6..=6)).collect())
            .collect();
        let m = IntMatrix::from_rows(&rows).unwrap();
        if let Ok(l) = IntegerLattice::from_generators(&m) {
            if l.rank() == rank {
                return l.saturate();
            }
        }
    }
}

#[test]
fn criterion_05_duality_exactness() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut bad = 0;
    for ambient in [3usize, 4] {
        for i in 0..1000 {
            let rank = 1 + i % (ambient - 1);
            let l = random_primitive_lattice(&mut rng, ambient, rank);
            let c = l.orthogonal_complement().unwrap();
            if c.det_sq() != l.det_sq() || c.rank() != ambient - rank {
                bad += 1;
            }
            checked += 1;
        }
    }
    verdict(
        5,
        "duality exactness",
        bad == 0,
        &format!("{checked} lattices in Z^3 and Z^4, {bad} mismatches"),
        t,
    );
}

#[test]
fn criterion_06_subdivision_scheme() {
    let t = Instant::now();
    let mut failures = Vec::new();
    for k in [2u32, 3, 4] {
        for h in [10.0, 1e2, 1e3, 1e4] {
            let s = subdivide(h, k).unwrap();
            let checks = [
                ("K <= k H^(1/k)", s.count_bound_holds()),
                ("endpoint recurrence", s.endpoints_bracket_two() && s.within_declared_precision()),
                ("ratio bound", s.ratio_bound_holds()),
                ("f step", s.f_step_property_holds()),
            ];
            for (name, ok) in checks {
                if !ok {
                    failures.push(format!("k={k} H={h}: {name}"));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        "12 (k,H) cases, all four properties".to_string()
    } else {
        failures.join("; ")
    };
    verdict(6, "subdivision scheme", failures.is_empty(), &detail, t);
}

#[test]
fn criterion_07_parallel_lines_witness() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut cases = 0;
    for b in [5u64, 10, 20] {
        for d in 1..=b {
            let f = (0..d).fold(Poly::one(2), |acc, i| &acc * &(&Poly::var(2, 0) - &Poly::constant(2, i)));
            let v = VarietySpec::affine(2, vec![f]).unwrap();
            let count = count_affine_points(&v, b).unwrap();
            if count != d * (2 * b + 1) {
                bad.push(format!("d={d} B={b}: {count}"));
            }
            cases += 1;
        }
    }
    let detail = if bad.is_empty() {
        format!("{cases} (d,B) cases equal d(2B+1)")
    } else {
        bad.join("; ")
    };
    verdict(7, "parallel lines witness", bad.is_empty(), &detail, t);
}

/// Primitive integer tuples of `[-b, b]^len` satisfying `pred`, halved to
/// identify `x` with `-x`.
fn raw_tuple_count(len: usize, b: i64, pred: impl Fn(&[i64]) -> bool) -> usize {
    let side = (2 * b + 1) as usize;
    let mut primitive = 0;
    for idx in 0..side.pow(len as u32) {
        let mut r = idx;
        let v: Vec<i64> = (0..len)
            .map(|_| {
                let x = (r % side) as i64 - b;
                r /= side;
                x
            })
            .collect();
        if v.iter().fold(0i64, |g, x| g.gcd(x)) == 1 && pred(&v) {
            primitive += 1;
        }
    }
    assert_eq!(primitive % 2, 0);
    primitive / 2
}

#[test]
fn criterion_08_projective_small_cases() {
    let t = Instant::now();
    let conic = VarietySpec::projective(2, vec![parse("x0^2 + x1^2 - x2^2", 3).unwrap()]).unwrap();
    let hyperplane = VarietySpec::projective(2, vec![parse("x0", 3).unwrap()]).unwrap();
    let cases = [
        ("#P^1(Q,1)", enum_proj_points(1, 1).unwrap().len(), raw_tuple_count(2, 1, |_| true), 4),
        ("#P^2(Q,1)", enum_proj_points(2, 1).unwrap().len(), raw_tuple_count(3, 1, |_| true), 13),
        (
            "conic",
            count_proj_points(&conic, 1).unwrap() as usize,
            raw_tuple_count(3, 1, |v| v[0] * v[0] + v[1] * v[1] == v[2] * v[2]),
            4,
        ),
        (
            "hyperplane x0",
            count_proj_points(&hyperplane, 1).unwrap() as usize,
            raw_tuple_count(3, 1, |v| v[0] == 0),
            4,
        ),
    ];
    let ok = cases.iter().all(|&(_, got, oracle, want)| got == oracle && got == want);
    let detail: Vec<String> = cases
        .iter()
        .map(|(name, got, oracle, _)| format!("{name} = {got} (oracle {oracle})"))
        .collect();
    verdict(8, "projective small cases", ok, &detail.join(", "), t);
}

#[test]
fn criterion_09_correspondence_round_trip() {
    let t = Instant::now();
    let mut total = 0;
    let mut bad = 0;
    for (ambient, rank) in [(3usize, 2usize), (4, 3)] {
        for l in enum_primitive_lattices(ambient, rank, 25).unwrap().lattices {
            let plane = plane_from_lattice(&l).unwrap();
            let back = lattice_from_plane(&plane);
            let again = plane_from_lattice(&back).unwrap();
            let eqs = plane.equations();
            let on_plane = l
                .basis()
                .to_i64_rows()
                .unwrap()
                .iter()
                .all(|v| eqs.iter().all(|a| a.iter().zip(v).map(|(x, y)| x * y).sum::<i64>() == 0));
            if back != l || again != plane || plane.dim() + 1 != rank || !on_plane {
                bad += 1;
            }
            total += 1;
        }
    }
    verdict(
        9,
        "plane/lattice round trip",
        bad == 0 && total > 0,
        &format!("{total} lattices, {bad} failures"),
        t,
    );
}

#[test]
fn criterion_10_cross_module_consistency() {
    let t = Instant::now();
    let ds = [2usize, 4, 8, 16];
    let mut mismatches = Vec::new();
    let mut samples = Vec::new();
    for &d in &ds {
        let dense = densest_planes_count(2, 1, d, 30).unwrap();
        let v = union_of_planes_variety(&dense.planes).unwrap();
        let count = count_proj_points(&v, 30).unwrap();
        if count != dense.count as u64 {
            mismatches.push(format!("d={d}: {count} vs {}", dense.count));
        }
        samples.push((d as f64, count as f64));
    }
    let fit = fit_exponent(&samples).unwrap();
    let counts: Vec<u64> = samples.iter().map(|s| s.1 as u64).collect();
    let agree = mismatches.is_empty();
    let slope_ok = fit.slope <= 0.75;
    verdict(
        10,
        "cross-module consistency",
        agree && slope_ok,
        &format!(
            "counts {counts:?} agree [{}], d-exponent {:.4} <= 0.75 [{}]",
            if agree { "ok".to_string() } else { mismatches.join(", ") },
            fit.slope,
            if slope_ok { "ok" } else { "violated" }
        ),
        t,
    );
}

#[test]
fn criterion_11_projection_degree_contract() {
    let t = Instant::now();
    let corpus = experiment::curve_corpus(25, 4, 11);
    assert_eq!(corpus[0], SpaceCurve::twisted_cubic());
    let mut bad = Vec::new();
    for (i, c) in corpus.iter().enumerate() {
        let best = best_projection(c).unwrap();
        if !best.contract_holds() {
            bad.push(format!("curve {i}: d'={} d={}", best.d_prime, best.declared_degree));
        }
    }
    let cubic = SpaceCurve::twisted_cubic();
    let mut degrees: Vec<u32> = (0..3).map(|drop| projection_degree(&cubic, drop).unwrap()).collect();
    degrees.sort_unstable();
    let best = best_projection(&cubic).unwrap();
    let ok = bad.is_empty() && degrees == [2, 3, 3] && best.d_prime == 3;
    verdict(
        11,
        "projection degree contract",
        ok,
        &format!(
            "25 curves, {} contract violations; twisted cubic projections {degrees:?}, best d' = {}",
            bad.len(),
            best.d_prime
        ),
        t,
    );
}

#[test]
fn criterion_12_rank_count_duality() {
    let t = Instant::now();
    let search = EnumOptions {
        force_search: true,
        ..EnumOptions::default()
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for h_sq in [4u64, 25, 100] {
        let lines = enum_primitive_lattices(3, 1, h_sq).unwrap();
        let planes = enum_primitive_lattices_with(3, 2, h_sq, search).unwrap();
        // the searched planes must also be distinct and primitive
        let distinct: HashSet<_> = planes.lattices.iter().collect();
        let sound = distinct.len() == planes.len() && planes.lattices.iter().all(IntegerLattice::is_primitive);
        ok &= lines.len() == planes.len() && sound && planes.complete;
        parts.push(format!("H_sq={h_sq}: {} vs {}", lines.len(), planes.len()));
    }
    verdict(12, "rank count duality", ok, &parts.join(", "), t);
}
