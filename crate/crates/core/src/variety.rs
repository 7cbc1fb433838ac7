//! Presented varieties and brute-force point counts.
//!
//! A variety is the common zero set of a list of integer polynomials. Affine
//! counts run over integer tuples in `[-B, B]^n`; projective counts run over
//! the canonical representatives of `P^n(Q, B)`.

use std::fmt;

use thiserror::Error;

use crate::poly::{self, ParseError, Poly, PolyError};
use crate::projective::{for_each_proj_point, LinearVariety, ProjectiveError};

#[derive(Debug, Error)]
pub enum VarietyError {
    #[error("a variety needs at least one generator")]
    NoGenerators,
    #[error("generator {index} has {got} variables, expected {expected}")]
    VariableCount { index: usize, expected: usize, got: usize },
    #[error("generator {index} is not homogeneous: {poly}")]
    NotHomogeneous { index: usize, poly: String },
    #[error("expected a {expected} variety")]
    WrongAmbient { expected: &'static str },
    #[error("height bound must be positive")]
    ZeroHeight,
    #[error("expected a line in P^2, got a {dim}-plane in P^{ambient}")]
    NotALine { dim: usize, ambient: usize },
    #[error("line {line}: {error}")]
    File { line: usize, error: PolyError },
    #[error("line {line}: {message}")]
    Directive { line: usize, message: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Ambient {
    Affine(usize),
    Projective(usize),
}

impl Ambient {
    /// Number of polynomial variables: `n` for `A^n`, `n + 1` for `P^n`.
    pub fn n_vars(self) -> usize {
        match self {
            Ambient::Affine(n) => n,
            Ambient::Projective(n) => n + 1,
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Affine(n) => write!(f, "A^{n}"),
            Ambient::Projective(n) => write!(f, "P^{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySpec {
    ambient: Ambient,
    generators: Vec<Poly>,
    declared_degree: Option<u32>,
}

impl VarietySpec {
    pub fn new(ambient: Ambient, generators: Vec<Poly>, declared_degree: Option<u32>) -> Result<Self, VarietyError> {
        if generators.is_empty() {
            return Err(VarietyError::NoGenerators);
        }
        let expected = ambient.n_vars();
        for (index, g) in generators.iter().enumerate() {
            if g.n_vars() != expected {
                return Err(VarietyError::VariableCount {
                    index,
                    expected,
                    got: g.n_vars(),
                });
            }
            if matches!(ambient, Ambient::Projective(_)) && !g.is_homogeneous() {
                return Err(VarietyError::NotHomogeneous {
                    index,
                    poly: g.to_string(),
                });
            }
        }
        Ok(VarietySpec {
            ambient,
            generators,
            declared_degree,
        })
    }

    pub fn affine(n: usize, generators: Vec<Poly>) -> Result<Self, VarietyError> {
        VarietySpec::new(Ambient::Affine(n), generators, None)
    }

    pub fn projective(n: usize, generators: Vec<Poly>) -> Result<Self, VarietyError> {
        VarietySpec::new(Ambient::Projective(n), generators, None)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn declared_degree(&self) -> Option<u32> {
        self.declared_degree
    }

    /// The declared degree if present, else the product of the generator
    /// degrees (the Bezout bound, exact for a single hypersurface).
    pub fn degree(&self) -> u32 {
        self.declared_degree
            .unwrap_or_else(|| self.generators.iter().map(Poly::degree).product())
    }

    pub fn contains(&self, point: &[i64]) -> Result<bool, VarietyError> {
        for g in &self.generators {
            if !g.vanishes_at(point)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Integer points of `[-B, B]^n` on an affine variety.
pub fn count_affine_points(v: &VarietySpec, bound: u64) -> Result<u64, VarietyError> {
    let Ambient::Affine(n) = v.ambient else {
        return Err(VarietyError::WrongAmbient { expected: "affine" });
    };
    if bound == 0 {
        return Err(VarietyError::ZeroHeight);
    }
    let b = i64::try_from(bound).map_err(|_| VarietyError::ZeroHeight)?;
    let mut cur = vec![-b; n];
    let mut count = 0;
    loop {
        if v.contains(&cur)? {
            count += 1;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            if cur[i] < b {
                cur[i] += 1;
                break;
            }
            cur[i] = -b;
        }
    }
}

/// Points of `P^n(Q, B)` on a projective variety.
pub fn count_proj_points(v: &VarietySpec, bound: u64) -> Result<u64, VarietyError> {
    let Ambient::Projective(n) = v.ambient else {
        return Err(VarietyError::WrongAmbient { expected: "projective" });
    };
    for (index, g) in v.generators.iter().enumerate() {
        if !g.is_homogeneous() {
            return Err(VarietyError::NotHomogeneous {
                index,
                poly: g.to_string(),
            });
        }
    }
    let mut count = 0;
    let mut err = None;
    for_each_proj_point(n, bound, |p| {
        if err.is_some() {
            return;
        }
        match v.contains(p) {
            Ok(true) => count += 1,
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(count),
    }
}

/// The plane curve `prod_i (a_i . x)` whose components are the given lines,
/// with `a_i` spanning the orthogonal complement of line `i`.
pub fn union_of_planes_variety(planes: &[LinearVariety]) -> Result<VarietySpec, VarietyError> {
    if planes.is_empty() {
        return Err(VarietyError::NoGenerators);
    }
    let mut product = Poly::one(3);
    for plane in planes {
        if plane.ambient_dim() != 2 || plane.dim() != 1 {
            return Err(VarietyError::NotALine {
                dim: plane.dim(),
                ambient: plane.ambient_dim(),
            });
        }
        let eqs = plane.equations();
        product = &product * &Poly::linear_form(&eqs[0]);
    }
    VarietySpec::new(Ambient::Projective(2), vec![product], Some(planes.len() as u32))
}

/// Contents of a polynomial file: one polynomial per line, `#` comments,
/// and optional `vars = N` / `degree = d` directives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFile {
    pub polys: Vec<Poly>,
    pub vars: usize,
    pub degree: Option<u32>,
}

pub fn parse_poly_file(text: &str) -> Result<PolyFile, VarietyError> {
    let mut vars = None;
    let mut degree = None;
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let line = content.trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| VarietyError::Directive {
                line: i + 1,
                message: format!("invalid {what} value {value:?}"),
            };
            match key {
                "vars" => vars = Some(value.parse::<usize>().map_err(|_| bad("vars"))?),
                "degree" => degree = Some(value.parse::<u32>().map_err(|_| bad("degree"))?),
                _ => {
                    return Err(VarietyError::Directive {
                        line: i + 1,
                        message: format!("unknown directive {key:?}"),
                    })
                }
            }
            continue;
        }
        let parsed: Poly = content.parse().map_err(|e: ParseError| VarietyError::File {
            line: i + 1,
            error: e.into(),
        })?;
        lines.push((i + 1, content, parsed));
    }
    let vars = vars.unwrap_or_else(|| lines.iter().map(|(_, _, p)| p.n_vars()).max().unwrap_or(1));
    let polys = lines
        .into_iter()
        .map(|(line, text, _)| poly::parse(text, vars).map_err(|error| VarietyError::File { line, error }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolyFile { polys, vars, degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntegerLattice;
    use crate::projective::plane_from_lattice;

    fn aff(n: usize, s: &str) -> VarietySpec {
        VarietySpec::affine(n, vec![poly::parse(s, n).unwrap()]).unwrap()
    }

    fn proj(n: usize, gens: &[&str]) -> VarietySpec {
        VarietySpec::projective(n, gens.iter().map(|s| poly::parse(s, n + 1).unwrap()).collect()).unwrap()
    }

    fn brute_affine(n: usize, b: i64, pred: impl Fn(&[i64]) -> bool) -> u64 {
        let mut count = 0;
        let side = (2 * b + 1) as u64;
        for idx in 0..side.pow(n as u32) {
            let mut r = idx;
            let pt: Vec<i64> = (0..n)
                .map(|_| {
                    let x = (r % side) as i64 - b;
                    r /= side;
                    x
                })
                .collect();
            if pred(&pt) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn affine_examples() {
        assert_eq!(count_affine_points(&aff(2, "x0^2 - x0"), 2).unwrap(), 10);
        assert_eq!(count_affine_points(&aff(2, "1"), 3).unwrap(), 0);
        assert_eq!(
            count_affine_points(&aff(2, "x0^2 + x1^2 - 25"), 5).unwrap(),
            brute_affine(2, 5, |p| p[0] * p[0] + p[1] * p[1] == 25)
        );
    }

    #[test]
    fn parallel_lines_are_extremal() {
        for b in [3u64, 6] {
            for d in 1..=b as usize {
                let f = (0..d).fold(Poly::one(2), |acc, i| {
                    &acc * &(&Poly::var(2, 0) - &Poly::constant(2, i as i64))
                });
                let v = VarietySpec::affine(2, vec![f]).unwrap();
                assert_eq!(count_affine_points(&v, b).unwrap(), d as u64 * (2 * b + 1));
            }
        }
    }

    #[test]
    fn projective_examples() {
        assert_eq!(count_proj_points(&proj(2, &["x0^2 + x1^2 - x2^2"]), 1).unwrap(), 4);
        assert_eq!(count_proj_points(&proj(2, &["x0"]), 1).unwrap(), 4);
        assert_eq!(count_proj_points(&proj(2, &["x0", "x1", "x2"]), 3).unwrap(), 0);
    }

    #[test]
    fn projective_requires_homogeneous() {
        let g = poly::parse("x0^2 + x1", 3).unwrap();
        assert!(matches!(
            VarietySpec::projective(2, vec![g]),
            Err(VarietyError::NotHomogeneous { index: 0, .. })
        ));
        assert!(matches!(
            VarietySpec::projective(2, vec![poly::parse("x0", 2).unwrap()]),
            Err(VarietyError::VariableCount { .. })
        ));
        assert!(matches!(VarietySpec::affine(2, vec![]), Err(VarietyError::NoGenerators)));
    }

    #[test]
    fn projective_count_is_monotone() {
        let v = proj(2, &["x0*x1 - x2^2"]);
        let counts: Vec<u64> = (1..=6).map(|b| count_proj_points(&v, b).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }

    #[test]
    fn union_of_lines() {
        let l0 = plane_from_lattice(&IntegerLattice::from_rows(&[[0i64, 1, 0], [0, 0, 1]]).unwrap()).unwrap();
        let l1 = plane_from_lattice(&IntegerLattice::from_rows(&[[1i64, 0, 0], [0, 0, 1]]).unwrap()).unwrap();
        let v = union_of_planes_variety(&[l0.clone(), l1]).unwrap();
        assert_eq!(v.generators()[0].clone().normalize_sign(), poly::parse("x0*x1", 3).unwrap());
        assert_eq!(v.degree(), 2);
        let single = union_of_planes_variety(&[l0]).unwrap();
        assert_eq!(single.generators()[0].clone().normalize_sign(), poly::parse("x0", 3).unwrap());

        let point = plane_from_lattice(&IntegerLattice::from_rows(&[[1i64, 0, 0]]).unwrap()).unwrap();
        assert!(matches!(union_of_planes_variety(&[point]), Err(VarietyError::NotALine { .. })));
    }

    #[test]
    fn poly_file_format() {
        let f = parse_poly_file("# twisted cubic\nvars = 3\ndegree = 3\nx1 - x0^2\n\nx2 - x0^3  # second\n").unwrap();
        assert_eq!(f.vars, 3);
        assert_eq!(f.degree, Some(3));
        assert_eq!(f.polys.len(), 2);
        assert_eq!(f.polys[1].to_string(), "-x0^3 + x2");
        let inferred = parse_poly_file("x0 + x1\nx2").unwrap();
        assert_eq!(inferred.vars, 3);
        assert!(matches!(parse_poly_file("x0\nx0 +"), Err(VarietyError::File { line: 2, .. })));
        assert!(matches!(parse_poly_file("vars = 2\nx2"), Err(VarietyError::File { line: 2, .. })));
        assert!(matches!(parse_poly_file("colour = red"), Err(VarietyError::Directive { line: 1, .. })));
    }
}
