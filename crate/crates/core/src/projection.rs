//! Coordinate projections of space curves in `A^3` by resultant elimination.

use thiserror::Error;

use crate::poly::{Poly, PolyError};

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("space curves live in 3 variables, got {0}")]
    VariableCount(usize),
    #[error("space curve generators must be nonconstant")]
    ConstantGenerator,
    #[error("declared degree must be at least 1")]
    ZeroDegree,
    #[error("variable x{var} out of range")]
    BadVariable { var: usize },
    #[error("polynomial {which} has degree 0 in x{var}")]
    DegreeZero { which: &'static str, var: usize },
    #[error("both generators are free of x{0}; nothing to eliminate")]
    NothingToEliminate(usize),
    #[error("dropping x{0} collapses the curve (zero resultant)")]
    Collapses(usize),
    #[error("every coordinate projection collapses the curve")]
    AllCollapse,
    #[error("expected exactly two polynomials, got {0}")]
    GeneratorCount(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A curve in `A^3` cut out by two polynomials in `x0, x1, x2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceCurve {
    p: Poly,
    q: Poly,
    declared_degree: u32,
    parametrization: Option<(Vec<i64>, Vec<i64>)>,
}

impl SpaceCurve {
    pub fn new(p: Poly, q: Poly, declared_degree: u32) -> Result<Self, ProjectionError> {
        for f in [&p, &q] {
            if f.n_vars() != 3 {
                return Err(ProjectionError::VariableCount(f.n_vars()));
            }
            if f.is_constant() {
                return Err(ProjectionError::ConstantGenerator);
            }
        }
        if declared_degree == 0 {
            return Err(ProjectionError::ZeroDegree);
        }
        Ok(SpaceCurve {
            p,
            q,
            declared_degree,
            parametrization: None,
        })
    }

    /// The curve `t -> (t, f(t), g(t))` presented as `x1 - f(x0), x2 - g(x0)`.
    /// `f` and `g` are coefficient lists in increasing degree.
    pub fn parametrized(f: &[i64], g: &[i64]) -> Self {
        let lift = |coeffs: &[i64], target: usize| {
            let t = Poly::from_terms(
                3,
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(e, &c)| (vec![e as u32, 0, 0], c)),
            );
            &Poly::var(3, target) - &t
        };
        let p = lift(f, 1);
        let q = lift(g, 2);
        let declared = p.degree().max(q.degree()).max(1);
        SpaceCurve {
            p,
            q,
            declared_degree: declared,
            parametrization: Some((f.to_vec(), g.to_vec())),
        }
    }

    pub fn twisted_cubic() -> Self {
        SpaceCurve::parametrized(&[0, 0, 1], &[0, 0, 0, 1])
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn declared_degree(&self) -> u32 {
        self.declared_degree
    }

    /// Points `(t, f(t), g(t))` for a parametrized curve, else empty.
    pub fn sample_points(&self, ts: impl IntoIterator<Item = i64>) -> Vec<[i64; 3]> {
        let Some((f, g)) = &self.parametrization else {
            return Vec::new();
        };
        let eval = |c: &[i64], t: i64| c.iter().rev().fold(0i64, |acc, &a| acc * t + a);
        ts.into_iter().map(|t| [t, eval(f, t), eval(g, t)]).collect()
    }
}

/// Sylvester resultant of `p` and `q` with respect to `x{var}`: the
/// determinant of the Sylvester matrix, a polynomial free of `x{var}`.
pub fn sylvester_resultant(p: &Poly, q: &Poly, var: usize) -> Result<Poly, ProjectionError> {
    if var >= p.n_vars() || p.n_vars() != q.n_vars() {
        return Err(ProjectionError::BadVariable { var });
    }
    let m = p.degree_in(var) as usize;
    let n = q.degree_in(var) as usize;
    if m == 0 {
        return Err(ProjectionError::DegreeZero { which: "p", var });
    }
    if n == 0 {
        return Err(ProjectionError::DegreeZero { which: "q", var });
    }
    let a = p.coefficients_in(var);
    let b = q.coefficients_in(var);
    let size = m + n;
    let zero = Poly::zero(p.n_vars());
    let mut mat = vec![vec![zero.clone(); size]; size];
    for r in 0..n {
        for i in 0..=m {
            mat[r][r + i] = a[m - i].clone();
        }
    }
    for r in 0..m {
        for j in 0..=n {
            mat[n + r][r + j] = b[n - j].clone();
        }
    }
    Ok(bareiss_det(mat))
}

/// Fraction-free determinant over the polynomial ring.
fn bareiss_det(mut a: Vec<Vec<Poly>>) -> Poly {
    let size = a.len();
    let nv = a[0][0].n_vars();
    let mut negate = false;
    let mut prev = Poly::one(nv);
    for k in 0..size {
        if a[k][k].is_zero() {
            match (k + 1..size).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Poly::zero(nv),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss step divides exactly");
            }
            a[i][k] = Poly::zero(nv);
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Polynomial defining the projection of `V(p, q)` that forgets `x{var}`.
/// When one generator is free of `x{var}` it already cuts out the image
/// cylinder, so the resultant degenerates to `p^deg(q)` (or `q^deg(p)`).
pub fn eliminate(p: &Poly, q: &Poly, var: usize) -> Result<Poly, ProjectionError> {
    if var >= p.n_vars() || p.n_vars() != q.n_vars() {
        return Err(ProjectionError::BadVariable { var });
    }
    match (p.degree_in(var), q.degree_in(var)) {
        (0, 0) => Err(ProjectionError::NothingToEliminate(var)),
        (0, n) => Ok(p.pow(n)),
        (m, 0) => Ok(q.pow(m)),
        _ => sylvester_resultant(p, q, var),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub drop: usize,
    /// Total degree of the raw eliminant.
    pub resultant_degree: u32,
    /// Squarefree part of the eliminant: the projected plane curve.
    pub image: Poly,
    pub degree: u32,
}

impl Projection {
    /// Whether the image polynomial vanishes at every point; the dropped
    /// coordinate is ignored.
    pub fn vanishes_on(&self, points: &[[i64; 3]]) -> Result<bool, ProjectionError> {
        for pt in points {
            if !self.image.vanishes_at(pt)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn project(c: &SpaceCurve, drop: usize) -> Result<Projection, ProjectionError> {
    let r = eliminate(&c.p, &c.q, drop)?;
    if r.is_zero() {
        return Err(ProjectionError::Collapses(drop));
    }
    let image = r.squarefree_part();
    Ok(Projection {
        drop,
        resultant_degree: r.degree(),
        degree: image.degree(),
        image,
    })
}

/// Degree of the projected plane curve after dropping `x{drop}`.
pub fn projection_degree(c: &SpaceCurve, drop: usize) -> Result<u32, ProjectionError> {
    Ok(project(c, drop)?.degree)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestProjection {
    pub drop: usize,
    pub d_prime: u32,
    pub declared_degree: u32,
    /// One entry per coordinate; `None` where the projection collapses.
    pub degrees: [Option<u32>; 3],
}

impl BestProjection {
    /// `d' <= d` and `d'^2 >= d`.
    pub fn contract_holds(&self) -> bool {
        let d = u64::from(self.declared_degree);
        let dp = u64::from(self.d_prime);
        dp <= d && dp * dp >= d
    }
}

/// The coordinate projection with the largest image degree, ties going to
/// the smallest index.
pub fn best_projection(c: &SpaceCurve) -> Result<BestProjection, ProjectionError> {
    let mut degrees = [None; 3];
    for (drop, slot) in degrees.iter_mut().enumerate() {
        match projection_degree(c, drop) {
            Ok(d) => *slot = Some(d),
            Err(ProjectionError::Collapses(_)) | Err(ProjectionError::NothingToEliminate(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let mut best: Option<(usize, u32)> = None;
    for (i, d) in degrees.iter().enumerate() {
        if let Some(d) = *d {
            if best.is_none_or(|(_, b)| d > b) {
                best = Some((i, d));
            }
        }
    }
    let (drop, d_prime) = best.ok_or(ProjectionError::AllCollapse)?;
    Ok(BestProjection {
        drop,
        d_prime,
        declared_degree: c.declared_degree,
        degrees,
    })
}

/// Builds a curve from the two polynomials of a polynomial file.
pub fn curve_from_polys(polys: &[Poly], declared_degree: Option<u32>) -> Result<SpaceCurve, ProjectionError> {
    let [p, q] = polys else {
        return Err(ProjectionError::GeneratorCount(polys.len()));
    };
    let p = p.with_vars(3)?;
    let q = q.with_vars(3)?;
    let d = declared_degree.unwrap_or_else(|| p.degree() * q.degree());
    SpaceCurve::new(p, q, d)
}
