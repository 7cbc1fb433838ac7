//! Sublattices of `Z^n` in canonical Hermite form.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{self, IntMatrix, LinalgError};
use crate::projective::ProjPoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("generators span the zero lattice")]
    ZeroLattice,
    #[error("lattice has rank {rank} in Z^{ambient}; its orthogonal complement is zero")]
    FullRankComplement { rank: usize, ambient: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("box bound must be at least 1")]
    EmptyBox,
    #[error("basis entries too large for point enumeration")]
    Overflow,
    #[error("cannot parse lattice: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A nonzero sublattice of `Z^n`, stored by its Hermite normal form so that
/// equal lattices compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerLattice {
    basis: IntMatrix,
    det_sq: BigInt,
}

impl IntegerLattice {
    pub fn from_generators(gens: &IntMatrix) -> Result<Self, LatticeError> {
        let (h, rank) = linalg::hnf(gens);
        if rank == 0 {
            return Err(LatticeError::ZeroLattice);
        }
        let basis = h.truncate_rows(rank);
        let det_sq = linalg::gram_det_sq(&basis);
        Ok(IntegerLattice { basis, det_sq })
    }

    pub fn from_rows<T, R>(rows: &[R]) -> Result<Self, LatticeError>
    where
        T: Clone + Into<BigInt>,
        R: AsRef<[T]>,
    {
        Self::from_generators(&IntMatrix::from_rows(rows)?)
    }

    /// `Z^n` itself.
    pub fn full(n: usize) -> Self {
        Self::from_generators(&IntMatrix::identity(n)).expect("identity has full rank")
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Squared determinant (covolume) of the lattice.
    pub fn det_sq(&self) -> &BigInt {
        &self.det_sq
    }

    /// `(L ⊗ Q) ∩ Z^n`.
    pub fn saturate(&self) -> IntegerLattice {
        let perp = linalg::kernel_basis(&self.basis);
        let sat = linalg::kernel_basis(&perp);
        Self::from_generators(&sat).expect("saturation keeps the rank")
    }

    pub fn is_primitive(&self) -> bool {
        // Saturation has the same rank and its determinant divides ours, so
        // equality of determinants is equivalent to equality of lattices.
        self.saturate().det_sq == self.det_sq
    }

    /// Integer vectors orthogonal to every vector of the lattice.
    pub fn orthogonal_complement(&self) -> Result<IntegerLattice, LatticeError> {
        let k = linalg::kernel_basis(&self.basis);
        if k.rows() == 0 {
            return Err(LatticeError::FullRankComplement {
                rank: self.rank(),
                ambient: self.ambient_dim(),
            });
        }
        Self::from_generators(&k)
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool, LatticeError> {
        if v.len() != self.ambient_dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: v.len(),
            });
        }
        // Back-substitution along the Hermite pivots.
        let mut rest = v.to_vec();
        for row in self.basis.row_iter() {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return Ok(false);
            }
            if !q.is_zero() {
                for (x, b) in rest.iter_mut().zip(row) {
                    *x -= &q * b;
                }
            }
        }
        Ok(rest.iter().all(Zero::is_zero))
    }

    pub fn contains_i64(&self, v: &[i64]) -> Result<bool, LatticeError> {
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.contains(&v)
    }

    /// Calls `visit` for every lattice point with all coordinates in
    /// `[-bound, bound]`, the origin included. Visiting order is unspecified.
    pub fn for_each_point_in_box(
        &self,
        bound: u64,
        mut visit: impl FnMut(&[i64]),
    ) -> Result<(), LatticeError> {
        if bound == 0 {
            return Err(LatticeError::EmptyBox);
        }
        let reduced = linalg::lll_reduce(&self.basis, linalg::default_delta())?;
        let rows = reduced.to_i64_rows().ok_or(LatticeError::Overflow)?;
        let bound_i = i64::try_from(bound).map_err(|_| LatticeError::Overflow)?;
        let n = self.ambient_dim();
        let radius_sq = (n as f64) * (bound as f64) * (bound as f64);
        BallEnumerator::new(&rows, radius_sq).run(|p| {
            if p.iter().all(|x| x.abs() <= bound_i) {
                visit(p);
            }
        })
    }

    /// Lattice points in the box `[-bound, bound]^n`, lexicographically
    /// sorted, including the origin.
    pub fn points_in_box(&self, bound: u64) -> Result<Vec<Vec<i64>>, LatticeError> {
        let mut out = Vec::new();
        self.for_each_point_in_box(bound, |p| out.push(p.to_vec()))?;
        out.sort_unstable();
        Ok(out)
    }

    /// Primitive lattice points of the box up to sign, i.e. the rational
    /// points of height at most `bound` on the corresponding linear space.
    pub fn primitive_points_up_to_sign(&self, bound: u64) -> Result<Vec<ProjPoint>, LatticeError> {
        let mut out = Vec::new();
        self.for_each_point_in_box(bound, |p| {
            if is_sign_normalized(p) && gcd_slice(p) == 1 {
                out.push(ProjPoint::from_normalized(p.to_vec()));
            }
        })?;
        out.sort_unstable();
        Ok(out)
    }

    pub fn count_primitive_points_up_to_sign(&self, bound: u64) -> Result<usize, LatticeError> {
        let mut count = 0;
        self.for_each_point_in_box(bound, |p| {
            if is_sign_normalized(p) && gcd_slice(p) == 1 {
                count += 1;
            }
        })?;
        Ok(count)
    }
}

impl PartialOrd for IntegerLattice {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: ambient dimension, rank, then Hermite basis entries.
impl Ord for IntegerLattice {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ambient_dim(), self.rank())
            .cmp(&(other.ambient_dim(), other.rank()))
            .then_with(|| self.basis.row_iter().cmp(other.basis.row_iter()))
    }
}

impl fmt::Display for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.basis.fmt(f)
    }
}

impl fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerLattice[{}]", self.basis)
    }
}

/// Parses the line format `a,b,c;d,e,f` (any generating set is accepted).
impl FromStr for IntegerLattice {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .trim()
            .split(';')
            .map(|r| {
                r.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<BigInt>()
                            .map_err(|e| LatticeError::Parse(format!("{x:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        Self::from_generators(&IntMatrix::from_row_vecs(cols, rows)?)
    }
}

pub(crate) fn is_sign_normalized(p: &[i64]) -> bool {
    p.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

pub(crate) fn gcd_slice(p: &[i64]) -> i64 {
    p.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Enumerates lattice vectors of squared norm at most `radius_sq` by
/// depth-first search over coefficient vectors, with per-level intervals
/// taken from the Gram–Schmidt data of a (preferably reduced) basis.
///
/// Floating-point Gram–Schmidt only decides which coefficients to try; the
/// radius is padded so that no vector inside the ball is skipped, and
/// callers filter the produced vectors exactly.
struct BallEnumerator<'a> {
    basis: &'a [Vec<i64>],
    mu: Vec<Vec<f64>>,
    gs_norm: Vec<f64>,
    radius_sq: f64,
}

const RADIUS_PAD: f64 = 1e-6;

impl<'a> BallEnumerator<'a> {
    fn new(basis: &'a [Vec<i64>], radius_sq: f64) -> Self {
        let r = basis.len();
        let n = basis.first().map(Vec::len).unwrap_or(0);
        let mut star: Vec<Vec<f64>> = Vec::with_capacity(r);
        let mut mu = vec![vec![0.0; r]; r];
        let mut gs_norm = vec![0.0; r];
        for i in 0..r {
            let mut v: Vec<f64> = basis[i].iter().map(|&x| x as f64).collect();
            for j in 0..i {
                let m = dotf(&basis[i], &star[j]) / gs_norm[j];
                mu[i][j] = m;
                for t in 0..n {
                    v[t] -= m * star[j][t];
                }
            }
            gs_norm[i] = v.iter().map(|x| x * x).sum();
            star.push(v);
        }
        BallEnumerator {
            basis,
            mu,
            gs_norm,
            radius_sq: radius_sq * (1.0 + RADIUS_PAD) + RADIUS_PAD,
        }
    }

    fn run(&self, mut visit: impl FnMut(&[i64])) -> Result<(), LatticeError> {
        let r = self.basis.len();
        let n = self.basis.first().map(Vec::len).unwrap_or(0);
        let mut coeffs = vec![0i64; r];
        let mut point = vec![0i64; n];
        self.descend(r, 0.0, &mut coeffs, &mut point, &mut visit)
    }

    fn descend(
        &self,
        level: usize,
        used: f64,
        coeffs: &mut [i64],
        point: &mut [i64],
        visit: &mut impl FnMut(&[i64]),
    ) -> Result<(), LatticeError> {
        if level == 0 {
            visit(point);
            return Ok(());
        }
        let i = level - 1;
        let center: f64 = -(i + 1..coeffs.len())
            .map(|j| self.mu[j][i] * coeffs[j] as f64)
            .sum::<f64>();
        let rem = (self.radius_sq - used).max(0.0);
        let half = (rem / self.gs_norm[i]).sqrt();
        let lo = (center - half).floor() as i64;
        let hi = (center + half).ceil() as i64;
        let row = &self.basis[i];
        for c in lo..=hi {
            let off = c as f64 - center;
            let cost = used + off * off * self.gs_norm[i];
            if cost > self.radius_sq {
                continue;
            }
            coeffs[i] = c;
            for (p, &b) in point.iter_mut().zip(row) {
                *p = b
                    .checked_mul(c)
                    .and_then(|t| p.checked_add(t))
                    .ok_or(LatticeError::Overflow)?;
            }
            let res = self.descend(i, cost, coeffs, point, visit);
            for (p, &b) in point.iter_mut().zip(row) {
                *p -= b * c;
            }
            res?;
        }
        coeffs[i] = 0;
        Ok(())
    }
}

fn dotf(a: &[i64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, y)| x as f64 * y).sum()
}

/// Euclidean norm squared of an `i64` vector, exact.
pub fn norm_sq_i64(v: &[i64]) -> i128 {
    v.iter().map(|&x| x as i128 * x as i128).sum()
}

/// Squared determinant as `u64`, for callers comparing against small bounds.
pub fn det_sq_u64(l: &IntegerLattice) -> Option<u64> {
    if l.det_sq.is_negative() {
        return None;
    }
    l.det_sq.to_u64()
}
