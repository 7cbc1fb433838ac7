//! Plane covers of `P^n(Q, B)` and counts on unions of low-determinant planes.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{self, IntegerLattice, LatticeError};
use crate::linalg::{self, IntMatrix, LinalgError};
use crate::projective::{self, LinearVariety, ProjPoint, ProjectiveError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("plane dimension k = {k} must satisfy 1 <= k <= {max}")]
    PlaneDimension { k: usize, max: usize },
    #[error("lattice rank {rank} must satisfy 1 <= rank <= {max}")]
    LatticeRank { rank: usize, max: usize },
    #[error(
        "only {available} primitive rank-{rank} lattices found up to det^2 = {h_sq}; \
         requested {requested}"
    )]
    NotEnoughLattices {
        requested: usize,
        available: usize,
        rank: usize,
        h_sq: u64,
    },
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The `k`-plane through `x` whose lattice is the orthogonal complement of
/// the span of the `n-k` shortest reduced vectors orthogonal to `x`.
pub fn cover_plane_for_point(x: &ProjPoint, k: usize) -> Result<LinearVariety, CoverError> {
    let n = x.dim();
    if k == 0 || k >= n {
        return Err(CoverError::PlaneDimension { k, max: n.saturating_sub(1) });
    }
    let row = IntMatrix::from_rows(&[x.coords()])?;
    let orth = linalg::kernel_basis(&row);
    let reduced = linalg::lll_reduce(&orth, linalg::default_delta())?;
    let short = IntegerLattice::from_generators(&reduced.truncate_rows(n - k))?.saturate();
    let plane_lattice = short.orthogonal_complement()?;
    debug_assert_eq!(plane_lattice.rank(), k + 1);
    debug_assert!(plane_lattice.contains_i64(x.coords()).unwrap());
    Ok(projective::plane_from_lattice(&plane_lattice)?)
}

/// A set of `k`-planes jointly containing every point of `P^n(Q, B)`.
#[derive(Debug, Clone)]
pub struct PlaneCover {
    pub n: usize,
    pub k: usize,
    pub bound: u64,
    /// Distinct planes in canonical lattice order.
    pub planes: Vec<LinearVariety>,
    /// Number of points of `P^n(Q, B)` the cover was built from.
    pub points: usize,
}

impl PlaneCover {
    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn max_det_sq(&self) -> BigInt {
        self.planes
            .iter()
            .map(|p| p.lattice().det_sq().clone())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Union of the rational points of height at most `bound` on the planes.
    pub fn covered_points(&self) -> Result<BTreeSet<ProjPoint>, CoverError> {
        let mut all = BTreeSet::new();
        for p in &self.planes {
            all.extend(p.lattice().primitive_points_up_to_sign(self.bound)?);
        }
        Ok(all)
    }
}

pub fn cover_planes(n: usize, k: usize, bound: u64) -> Result<PlaneCover, CoverError> {
    if k == 0 || k >= n {
        return Err(CoverError::PlaneDimension { k, max: n.saturating_sub(1) });
    }
    let mut planes = BTreeSet::new();
    let mut points = 0;
    let mut failure = None;
    projective::for_each_proj_point(n, bound, |c| {
        if failure.is_some() {
            return;
        }
        points += 1;
        let x = ProjPoint::from_coords(c.to_vec()).expect("enumerated points are valid");
        match cover_plane_for_point(&x, k) {
            Ok(p) => {
                planes.insert(p);
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(PlaneCover {
        n,
        k,
        bound,
        planes: planes.into_iter().collect(),
        points,
    })
}

/// How `enum_primitive_lattices` produced its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumMethod {
    /// Primitive vectors up to sign.
    Vectors,
    /// Orthogonal complements of primitive vectors.
    Duality,
    /// Bounded search over generator tuples.
    GeneratorSearch,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumOptions {
    /// Use the generator search even where a direct method exists.
    pub force_search: bool,
    /// Squared-norm bound on generators; defaults to the provably complete
    /// bound for the requested rank.
    pub radius_sq: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct LatticeEnumeration {
    /// Sorted by squared determinant, ties in canonical lattice order.
    pub lattices: Vec<IntegerLattice>,
    pub method: EnumMethod,
    /// Squared-norm bound on the generators tried by the search.
    pub search_radius_sq: Option<u64>,
    /// False only when a caller-supplied radius is below the complete bound.
    pub complete: bool,
}

impl LatticeEnumeration {
    pub fn len(&self) -> usize {
        self.lattices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }
}

/// Every primitive rank-`rank` sublattice of `Z^ambient` with squared
/// determinant at most `h_sq`.
pub fn enum_primitive_lattices(
    ambient: usize,
    rank: usize,
    h_sq: u64,
) -> Result<LatticeEnumeration, CoverError> {
    enum_primitive_lattices_with(ambient, rank, h_sq, EnumOptions::default())
}

pub fn enum_primitive_lattices_with(
    ambient: usize,
    rank: usize,
    h_sq: u64,
    opts: EnumOptions,
) -> Result<LatticeEnumeration, CoverError> {
    if rank == 0 || rank >= ambient {
        return Err(CoverError::LatticeRank {
            rank,
            max: ambient.saturating_sub(1),
        });
    }
    let (mut lattices, method, radius, complete) = if opts.force_search || (rank > 1 && rank + 1 < ambient) {
        let (num, den) = product_constant(rank);
        let full = h_sq.saturating_mul(num) / den;
        let radius = opts.radius_sq.unwrap_or(full);
        let found = generator_search(ambient, rank, h_sq, radius, h_sq.saturating_mul(num), den)?;
        (found, EnumMethod::GeneratorSearch, Some(radius), radius >= full)
    } else if rank == 1 {
        (primitive_vector_lattices(ambient, h_sq)?, EnumMethod::Vectors, None, true)
    } else {
        let mut dual = Vec::new();
        for l in primitive_vector_lattices(ambient, h_sq)? {
            dual.push(l.orthogonal_complement()?);
        }
        (dual, EnumMethod::Duality, None, true)
    };
    lattices.sort_by(|a, b| a.det_sq().cmp(b.det_sq()).then_with(|| a.cmp(b)));
    Ok(LatticeEnumeration {
        lattices,
        method,
        search_radius_sq: radius,
        complete,
    })
}

/// `c_r` with `prod |b_i|^2 <= c_r det^2` for some basis of every rank-`r`
/// lattice, as a fraction. Minkowski-reduced bases attain the successive
/// minima for `r <= 3`, giving Hermite's `gamma_r^r`; beyond that the LLL
/// bound `2^(r(r-1)/2)` is used.
fn product_constant(rank: usize) -> (u64, u64) {
    match rank {
        1 => (1, 1),
        2 => (4, 3),
        3 => (2, 1),
        r => (1u64 << (r * (r - 1) / 2).min(62), 1),
    }
}

fn sign_normalized_primitive_vectors(ambient: usize, norm_bound: u64) -> Vec<Vec<i64>> {
    let m = isqrt(norm_bound) as i64;
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut cur = vec![-m; ambient];
    loop {
        if lattice::is_sign_normalized(&cur)
            && lattice::norm_sq_i64(&cur) <= norm_bound as i128
            && lattice::gcd_slice(&cur) == 1
        {
            out.push(cur.clone());
        }
        let mut i = ambient;
        loop {
            if i == 0 {
                out.sort_by_key(|v| (lattice::norm_sq_i64(v), v.clone()));
                return out;
            }
            i -= 1;
            if cur[i] < m {
                cur[i] += 1;
                break;
            }
            cur[i] = -m;
        }
    }
}

fn primitive_vector_lattices(ambient: usize, h_sq: u64) -> Result<Vec<IntegerLattice>, CoverError> {
    sign_normalized_primitive_vectors(ambient, h_sq)
        .iter()
        .map(|v| Ok(IntegerLattice::from_rows(&[v.as_slice()])?))
        .collect()
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// All primitive lattices spanned by `rank` sign-normalized primitive vectors
/// of squared norm at most `radius_sq` whose norm product is at most
/// `prod_num / prod_den` and whose determinant is at most `h_sq`.
fn generator_search(
    ambient: usize,
    rank: usize,
    h_sq: u64,
    radius_sq: u64,
    prod_num: u64,
    prod_den: u64,
) -> Result<Vec<IntegerLattice>, CoverError> {
    let pool = sign_normalized_primitive_vectors(ambient, radius_sq);
    let norms: Vec<u128> = pool.iter().map(|v| lattice::norm_sq_i64(v) as u128).collect();
    let mut found = BTreeSet::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(rank);
    let search = Search {
        pool: &pool,
        norms: &norms,
        rank,
        h_sq,
        prod_num: prod_num as u128,
        prod_den: prod_den as u128,
    };
    search.extend(0, 1, &mut chosen, &mut found)?;
    Ok(found.into_iter().collect())
}

struct Search<'a> {
    pool: &'a [Vec<i64>],
    norms: &'a [u128],
    rank: usize,
    h_sq: u64,
    prod_num: u128,
    prod_den: u128,
}

impl Search<'_> {
    fn extend(
        &self,
        start: usize,
        product: u128,
        chosen: &mut Vec<usize>,
        found: &mut BTreeSet<IntegerLattice>,
    ) -> Result<(), CoverError> {
        if chosen.len() == self.rank {
            let rows: Vec<&[i64]> = chosen.iter().map(|&i| self.pool[i].as_slice()).collect();
            let d = gram_det_i128(&rows);
            if d <= 0 || d > self.h_sq as i128 {
                return Ok(());
            }
            let l = IntegerLattice::from_rows(&rows)?;
            if l.is_primitive() {
                found.insert(l);
            }
            return Ok(());
        }
        let remaining = (self.rank - chosen.len()) as u32;
        for i in start..self.pool.len() {
            // The pool is sorted by norm, so later picks are at least as long.
            let next = product * self.norms[i].pow(remaining);
            if next * self.prod_den > self.prod_num {
                break;
            }
            chosen.push(i);
            self.extend(i + 1, product * self.norms[i], chosen, found)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// Gram determinant of a few short vectors, exact in `i128`.
fn gram_det_i128(rows: &[&[i64]]) -> i128 {
    let r = rows.len();
    let mut g = vec![vec![0i128; r]; r];
    for i in 0..r {
        for j in 0..r {
            g[i][j] = rows[i]
                .iter()
                .zip(rows[j])
                .map(|(&a, &b)| a as i128 * b as i128)
                .sum();
        }
    }
    // Bareiss elimination; all divisions are exact.
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..r {
        if g[k][k] == 0 {
            match (k + 1..r).find(|&i| g[i][k] != 0) {
                Some(p) => {
                    g.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..r {
            for j in k + 1..r {
                g[i][j] = (g[i][j] * g[k][k] - g[i][k] * g[k][j]) / prev;
            }
        }
        prev = g[k][k];
    }
    sign * g[r - 1][r - 1]
}

/// Result of counting points on the union of the `d` planes of smallest
/// determinant.
#[derive(Debug, Clone)]
pub struct DensestPlanes {
    pub planes: Vec<LinearVariety>,
    /// Distinct rational points of height at most `bound` on the union.
    pub count: usize,
    /// Determinant bound the selection was drawn from.
    pub h_sq: u64,
}

/// Largest squared determinant searched by `densest_planes_count`.
pub const DEFAULT_MAX_H_SQ: u64 = 1 << 12;

pub fn densest_planes_count(n: usize, k: usize, d: usize, bound: u64) -> Result<DensestPlanes, CoverError> {
    densest_planes_count_with(n, k, d, bound, DEFAULT_MAX_H_SQ)
}

pub fn densest_planes_count_with(
    n: usize,
    k: usize,
    d: usize,
    bound: u64,
    max_h_sq: u64,
) -> Result<DensestPlanes, CoverError> {
    if k == 0 || k >= n {
        return Err(CoverError::PlaneDimension { k, max: n.saturating_sub(1) });
    }
    if bound == 0 {
        return Err(ProjectiveError::ZeroHeight.into());
    }
    if d == 0 {
        return Ok(DensestPlanes { planes: Vec::new(), count: 0, h_sq: 0 });
    }
    let planes = smallest_planes(n, k, d, max_h_sq)?;
    let mut points: HashSet<Vec<i64>> = HashSet::new();
    for p in &planes.0 {
        p.lattice().for_each_point_in_box(bound, |v| {
            if lattice::is_sign_normalized(v) && lattice::gcd_slice(v) == 1 {
                points.insert(v.to_vec());
            }
        })?;
    }
    Ok(DensestPlanes {
        planes: planes.0,
        count: points.len(),
        h_sq: planes.1,
    })
}

/// The `d` full-rank `k`-planes of `P^n` with smallest lattice determinant,
/// ties broken by canonical lattice order.
pub fn smallest_planes(
    n: usize,
    k: usize,
    d: usize,
    max_h_sq: u64,
) -> Result<(Vec<LinearVariety>, u64), CoverError> {
    let mut h_sq = 1;
    loop {
        let found = enum_primitive_lattices(n + 1, k + 1, h_sq)?;
        // Everything not enumerated has larger determinant, so the first d
        // are the d smallest overall.
        if found.len() >= d {
            let planes = found
                .lattices
                .into_iter()
                .take(d)
                .map(|l| projective::plane_from_lattice(&l))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((planes, h_sq));
        }
        if h_sq >= max_h_sq {
            return Err(CoverError::NotEnoughLattices {
                requested: d,
                available: found.len(),
                rank: k + 1,
                h_sq,
            });
        }
        h_sq = (h_sq * 2).min(max_h_sq);
    }
}

/// Squared determinants as `u64` (they are small for every plane built here).
pub fn det_sq_values(planes: &[LinearVariety]) -> Vec<u64> {
    planes
        .iter()
        .map(|p| p.lattice().det_sq().to_u64().unwrap_or(u64::MAX))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> ProjPoint {
        s.parse().unwrap()
    }

    #[test]
    fn cover_plane_examples() {
        let p = cover_plane_for_point(&pt("1:0:0"), 1).unwrap();
        assert!(projective::plane_contains(&p, &pt("1:0:0")).unwrap());
        assert_eq!(p.lattice().det_sq(), &BigInt::from(1));

        let x = pt("1:2:2");
        let p = cover_plane_for_point(&x, 1).unwrap();
        assert!(projective::plane_contains(&p, &x).unwrap());
        assert!(p.lattice().det_sq() <= &BigInt::from(9));
        assert_eq!(p.dim(), 1);

        assert!(matches!(
            cover_plane_for_point(&x, 2),
            Err(CoverError::PlaneDimension { .. })
        ));
        assert!(matches!(
            cover_plane_for_point(&x, 0),
            Err(CoverError::PlaneDimension { .. })
        ));
    }

    #[test]
    fn cover_plane_contains_its_point_in_p3() {
        for x in projective::enum_proj_points(3, 4).unwrap() {
            let p = cover_plane_for_point(&x, 2).unwrap();
            assert!(projective::plane_contains(&p, &x).unwrap(), "{x}");
            assert!(p.lattice().is_primitive());
            assert_eq!(p.lattice().rank(), 3);
        }
    }

    #[test]
    fn small_covers() {
        let c = cover_planes(2, 1, 1).unwrap();
        assert_eq!(c.points, 13);
        let all: BTreeSet<ProjPoint> = projective::enum_proj_points(2, 1).unwrap().into_iter().collect();
        assert!(c.covered_points().unwrap().is_superset(&all));

        let c = cover_planes(3, 2, 1).unwrap();
        let all: BTreeSet<ProjPoint> = projective::enum_proj_points(3, 1).unwrap().into_iter().collect();
        for p in &c.planes {
            assert!(count_on(p, 1) >= 1);
        }
        assert!(c.covered_points().unwrap().is_superset(&all));
    }

    fn count_on(p: &LinearVariety, b: u64) -> usize {
        projective::count_points_on_plane(p, b).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let e = enum_primitive_lattices(2, 1, 4).unwrap();
        let want: Vec<IntegerLattice> = [[1i64, 0], [0, 1], [1, 1], [1, -1]]
            .iter()
            .map(|v| IntegerLattice::from_rows(&[v]).unwrap())
            .collect();
        assert_eq!(e.len(), 4);
        for w in &want {
            assert!(e.lattices.contains(w));
        }

        let r1 = enum_primitive_lattices(3, 1, 4).unwrap();
        let r2 = enum_primitive_lattices(3, 2, 4).unwrap();
        assert_eq!(r1.len(), r2.len());
        assert_eq!(r2.method, EnumMethod::Duality);

        assert!(enum_primitive_lattices(3, 1, 0).unwrap().is_empty());
        assert!(enum_primitive_lattices(3, 2, 0).unwrap().is_empty());
        assert!(matches!(
            enum_primitive_lattices(3, 3, 4),
            Err(CoverError::LatticeRank { .. })
        ));
    }

    #[test]
    fn search_agrees_with_duality() {
        for h in [1, 2, 5, 9, 30] {
            let dual = enum_primitive_lattices(3, 2, h).unwrap();
            let search = enum_primitive_lattices_with(
                3,
                2,
                h,
                EnumOptions { force_search: true, radius_sq: None },
            )
            .unwrap();
            assert!(search.complete);
            assert_eq!(search.lattices, dual.lattices, "h_sq = {h}");
        }
    }

    #[test]
    fn search_reports_radius() {
        let e = enum_primitive_lattices(4, 2, 5).unwrap();
        assert_eq!(e.method, EnumMethod::GeneratorSearch);
        assert_eq!(e.search_radius_sq, Some(6));
        assert!(e.complete);
        let short = enum_primitive_lattices_with(
            4,
            2,
            5,
            EnumOptions { force_search: false, radius_sq: Some(1) },
        )
        .unwrap();
        assert!(!short.complete);
        assert!(short.len() < e.len());
        for l in &e.lattices {
            assert!(l.is_primitive());
            assert!(l.det_sq() <= &BigInt::from(5));
            assert_eq!(l.rank(), 2);
        }
    }

    #[test]
    fn densest_examples() {
        let r = densest_planes_count(2, 1, 1, 1).unwrap();
        assert_eq!(r.count, 4);
        assert_eq!(r.planes[0].lattice().det_sq(), &BigInt::from(1));
        assert_eq!(densest_planes_count(2, 1, 0, 5).unwrap().count, 0);
        assert!(matches!(
            densest_planes_count_with(2, 1, 50, 5, 2),
            Err(CoverError::NotEnoughLattices { requested: 50, .. })
        ));
    }

    #[test]
    fn densest_is_monotone() {
        let mut last = 0;
        for d in 1..=12 {
            let c = densest_planes_count(2, 1, d, 6).unwrap().count;
            assert!(c >= last);
            last = c;
        }
        let mut last = 0;
        for b in 1..=8 {
            let c = densest_planes_count(2, 1, 5, b).unwrap().count;
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn gram_det_small() {
        assert_eq!(gram_det_i128(&[&[1, 2, 2]]), 9);
        assert_eq!(gram_det_i128(&[&[1, 0, 0], &[1, 1, 0]]), 1);
        assert_eq!(gram_det_i128(&[&[1, 2, 3], &[2, 4, 6]]), 0);
    }
}
