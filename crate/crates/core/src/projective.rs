//! Rational points of projective space and linear subvarieties.
//!
//! A point is stored by its primitive integer representative whose first
//! nonzero coordinate is positive. A `k`-plane of `P^n` is stored by the
//! primitive rank `k+1` sublattice of `Z^(n+1)` spanned by its affine cone.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

use crate::lattice::{self, IntegerLattice, LatticeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectiveError {
    #[error("the zero vector is not a projective point")]
    ZeroPoint,
    #[error("a projective point needs at least two coordinates")]
    TooFewCoordinates,
    #[error("height bound must be at least 1")]
    ZeroHeight,
    #[error("projective dimension must be at least 1")]
    ZeroDimension,
    #[error("lattice is not primitive; only saturated lattices correspond to planes")]
    NotPrimitive,
    #[error("point lives in P^{point} but the plane in P^{plane}")]
    DimensionMismatch { point: usize, plane: usize },
    #[error("cannot parse point {0:?}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<i64>,
}

impl ProjPoint {
    /// Normalizes an arbitrary nonzero integer vector into its projective
    /// representative.
    pub fn from_coords(mut coords: Vec<i64>) -> Result<Self, ProjectiveError> {
        if coords.len() < 2 {
            return Err(ProjectiveError::TooFewCoordinates);
        }
        let g = lattice::gcd_slice(&coords);
        if g == 0 {
            return Err(ProjectiveError::ZeroPoint);
        }
        let lead = coords.iter().copied().find(|&x| x != 0).unwrap();
        let s = if lead < 0 { -g } else { g };
        for x in &mut coords {
            *x /= s;
        }
        Ok(ProjPoint { coords })
    }

    pub(crate) fn from_normalized(coords: Vec<i64>) -> Self {
        debug_assert!(lattice::is_sign_normalized(&coords));
        debug_assert_eq!(lattice::gcd_slice(&coords), 1);
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// Projective dimension `n` of the ambient `P^n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn height(&self) -> u64 {
        self.coords.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn norm_sq(&self) -> i128 {
        lattice::norm_sq_i64(&self.coords)
    }
}

/// Colon-separated coordinates, e.g. `1:2:2`.
impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for ProjPoint {
    type Err = ProjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords = s
            .trim()
            .split(':')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ProjectiveError::Parse(s.to_string()))?;
        ProjPoint::from_coords(coords)
    }
}

/// All points of `P^n(Q)` of height at most `bound`, in lexicographic order.
pub fn enum_proj_points(n: usize, bound: u64) -> Result<Vec<ProjPoint>, ProjectiveError> {
    let mut out = Vec::new();
    for_each_proj_point(n, bound, |p| out.push(ProjPoint::from_normalized(p.to_vec())))?;
    Ok(out)
}

/// Visits the points of `P^n(Q, bound)` in lexicographic order without
/// allocating a point per visit.
pub fn for_each_proj_point(
    n: usize,
    bound: u64,
    mut visit: impl FnMut(&[i64]),
) -> Result<(), ProjectiveError> {
    if n == 0 {
        return Err(ProjectiveError::ZeroDimension);
    }
    if bound == 0 {
        return Err(ProjectiveError::ZeroHeight);
    }
    let b = i64::try_from(bound).map_err(|_| LatticeError::Overflow)?;
    // Leading zeros, then a positive entry, then free entries in [-b, b].
    let len = n + 1;
    let mut cur = vec![0i64; len];
    for lead in (0..len).rev() {
        cur.iter_mut().for_each(|x| *x = 0);
        for first in 1..=b {
            cur[lead] = first;
            for x in &mut cur[lead + 1..] {
                *x = -b;
            }
            loop {
                if cur.iter().fold(0i64, |g, x| g.gcd(x)) == 1 {
                    visit(&cur);
                }
                let mut i = len;
                let mut advanced = false;
                while i > lead + 1 {
                    i -= 1;
                    if cur[i] < b {
                        cur[i] += 1;
                        advanced = true;
                        break;
                    }
                    cur[i] = -b;
                }
                if !advanced {
                    break;
                }
            }
        }
    }
    Ok(())
}

/// A full-rank linear subvariety of `P^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LinearVariety {
    lattice: IntegerLattice,
}

impl LinearVariety {
    /// Dimension `k` of the plane.
    pub fn dim(&self) -> usize {
        self.lattice.rank() - 1
    }

    /// Dimension `n` of the ambient projective space.
    pub fn ambient_dim(&self) -> usize {
        self.lattice.ambient_dim() - 1
    }

    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    /// Linear forms cutting out the plane: a basis of the orthogonal
    /// complement, empty when the plane is all of `P^n`.
    pub fn equations(&self) -> Vec<Vec<i64>> {
        match self.lattice.orthogonal_complement() {
            Ok(c) => c.basis().to_i64_rows().expect("complement of a small lattice"),
            Err(_) => Vec::new(),
        }
    }
}

impl fmt::Display for LinearVariety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.lattice.fmt(f)
    }
}

pub fn plane_from_lattice(lattice: &IntegerLattice) -> Result<LinearVariety, ProjectiveError> {
    if lattice.ambient_dim() < 2 {
        return Err(ProjectiveError::TooFewCoordinates);
    }
    if !lattice.is_primitive() {
        return Err(ProjectiveError::NotPrimitive);
    }
    Ok(LinearVariety {
        lattice: lattice.clone(),
    })
}

pub fn lattice_from_plane(plane: &LinearVariety) -> IntegerLattice {
    plane.lattice.clone()
}

pub fn plane_contains(plane: &LinearVariety, x: &ProjPoint) -> Result<bool, ProjectiveError> {
    if x.dim() != plane.ambient_dim() {
        return Err(ProjectiveError::DimensionMismatch {
            point: x.dim(),
            plane: plane.ambient_dim(),
        });
    }
    Ok(plane.lattice.contains_i64(x.coords())?)
}

/// Number of rational points of height at most `bound` on the plane.
pub fn count_points_on_plane(plane: &LinearVariety, bound: u64) -> Result<usize, ProjectiveError> {
    Ok(plane.lattice.count_primitive_points_up_to_sign(bound)?)
}
