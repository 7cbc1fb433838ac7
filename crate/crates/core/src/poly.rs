//! Sparse multivariate polynomials over `Z`.
//!
//! Terms are kept in graded lexicographic order with `x0 > x1 > ...`. The
//! text form is `x0^2 + x1^2 - x2^2`: terms joined by `+`/`-`, each term an
//! optional integer coefficient followed by `*`-separated powers of the
//! variables `x0, x1, ...`. `Display` prints the canonical form, which
//! `parse` reads back to the same polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial {
            degree: exps.iter().sum(),
            exps,
        }
    }

    pub fn one(n_vars: usize) -> Self {
        Monomial::new(vec![0; n_vars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        Monomial::new(self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect())
    }

    fn div(&self, o: &Monomial) -> Option<Monomial> {
        self.exps
            .iter()
            .zip(&o.exps)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial::new)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("variable index {index} out of range for {n_vars} variables")]
    VariableOutOfRange { index: usize, n_vars: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    n_vars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero(n_vars: usize) -> Self {
        Poly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Poly::zero(n_vars);
        p.add_term(Monomial::one(n_vars), c.into());
        p
    }

    pub fn one(n_vars: usize) -> Self {
        Poly::constant(n_vars, 1)
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars, "x{i} out of range for {n_vars} variables");
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Poly::zero(n_vars);
        p.add_term(Monomial::new(e), BigInt::one());
        p
    }

    /// Builds `sum c * x^e` from `(exponents, coefficient)` pairs.
    pub fn from_terms<C: Into<BigInt>>(n_vars: usize, terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Self {
        let mut p = Poly::zero(n_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), n_vars, "exponent vector length");
            p.add_term(Monomial::new(e), c.into());
        }
        p
    }

    /// Linear form `sum a_i x_i`.
    pub fn linear_form(coeffs: &[i64]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::zero(n);
        for (i, &a) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(Monomial::new(e), BigInt::from(a));
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Same polynomial viewed in `n` variables (`n` must cover every
    /// variable that occurs).
    pub fn with_vars(&self, n: usize) -> Result<Poly, PolyError> {
        if let Some(i) = self.max_var() {
            if i >= n {
                return Err(PolyError::VariableOutOfRange { index: i, n_vars: n });
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.exps.clone();
                e.resize(n, 0);
                (Monomial::new(e), c.clone())
            })
            .collect();
        Ok(Poly { n_vars: n, terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree == 0)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exps[var]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Highest variable index that occurs.
    pub fn max_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.exps.iter().rposition(|&e| e > 0))
            .max()
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.degree_in(var) > 0
    }

    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> BigInt {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigInt::zero)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n_vars);
        }
        Poly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &BigInt) -> Poly {
        Poly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.n_vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut p = Poly::zero(self.n_vars);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            if e == 0 {
                continue;
            }
            let mut ex = m.exps.clone();
            ex[var] -= 1;
            p.add_term(Monomial::new(ex), c * BigInt::from(e));
        }
        p
    }

    /// Coefficients of `var^0, var^1, ...` as polynomials free of `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(self.n_vars); d + 1];
        for (m, c) in &self.terms {
            let mut ex = m.exps.clone();
            let e = std::mem::take(&mut ex[var]) as usize;
            out[e].add_term(Monomial::new(ex), c.clone());
        }
        out
    }

    /// Multiplies by `var^e`.
    fn shift(&self, var: usize, e: u32) -> Poly {
        let mut ex = vec![0; self.n_vars];
        ex[var] = e;
        self.mul_term(&Monomial::new(ex), &BigInt::one())
    }

    pub fn evaluate(&self, point: &[BigInt]) -> Result<BigInt, PolyError> {
        if point.len() != self.n_vars {
            return Err(PolyError::Arity {
                expected: self.n_vars,
                got: point.len(),
            });
        }
        let mut sum = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.exps) {
                if e > 0 {
                    t *= x.pow(e);
                }
            }
            sum += t;
        }
        Ok(sum)
    }

    pub fn evaluate_i64(&self, point: &[i64]) -> Result<BigInt, PolyError> {
        if point.len() != self.n_vars {
            return Err(PolyError::Arity {
                expected: self.n_vars,
                got: point.len(),
            });
        }
        if let Some(v) = self.evaluate_i128(point) {
            return Ok(BigInt::from(v));
        }
        let big: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
        self.evaluate(&big)
    }

    /// Checked `i128` evaluation; `None` on overflow.
    fn evaluate_i128(&self, point: &[i64]) -> Option<i128> {
        let mut sum: i128 = 0;
        for (m, c) in &self.terms {
            let mut t = c.to_i128()?;
            for (&x, &e) in point.iter().zip(&m.exps) {
                if e > 0 {
                    t = t.checked_mul((x as i128).checked_pow(e)?)?;
                }
            }
            sum = sum.checked_add(t)?;
        }
        Some(sum)
    }

    pub fn vanishes_at(&self, point: &[i64]) -> Result<bool, PolyError> {
        Ok(self.evaluate_i64(point)?.is_zero())
    }

    /// Gcd of the integer coefficients, nonnegative.
    pub fn integer_content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut q = Poly::zero(self.n_vars);
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let tm = m.div(&lm)?;
            let (tc, r) = c.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            rem = &rem - &d.mul_term(&tm, &tc);
            q.add_term(tm, tc);
        }
        Some(q)
    }

    /// Sign chosen so that the leading coefficient is positive.
    pub fn normalize_sign(self) -> Poly {
        if self.leading_coefficient().is_negative() {
            -self
        } else {
            self
        }
    }

    /// Divides out the integer content and fixes the sign.
    pub fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.integer_content();
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v = &*v / &c;
        }
        p.normalize_sign()
    }

    /// Gcd of the coefficients of `self` viewed as a polynomial in `var`.
    fn content_in(&self, var: usize) -> Poly {
        self.coefficients_in(var)
            .into_iter()
            .fold(Poly::zero(self.n_vars), |g, c| gcd(&g, &c))
    }

    /// Pseudo-remainder of `self` by `b` with respect to `var`.
    fn pseudo_rem(&self, b: &Poly, var: usize) -> Poly {
        let db = b.degree_in(var);
        let lcb = b.coefficients_in(var).pop().expect("nonzero");
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= db {
            let dr = r.degree_in(var);
            let lcr = r.coefficients_in(var).pop().expect("nonzero");
            r = &(&r * &lcb) - &(&lcr * &b.shift(var, dr - db));
        }
        r
    }

    /// `self / gcd(self, d self / d x_i for all i)`: the product of the
    /// distinct irreducible factors, up to an integer constant.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_zero() || self.is_constant() {
            return self.primitive_part();
        }
        let mut g = self.clone();
        for v in 0..self.n_vars {
            if self.uses_var(v) {
                g = gcd(&g, &self.derivative(v));
            }
        }
        self.div_exact(&g)
            .expect("gcd divides its argument")
            .primitive_part()
    }
}

/// Greatest common divisor in `Z[x0, ..., xn]`, with positive leading
/// coefficient. Uses recursive content removal and primitive pseudo-remainder
/// sequences on the highest variable present.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    assert_eq!(a.n_vars, b.n_vars, "gcd of polynomials in different rings");
    let n = a.n_vars;
    if a.is_zero() {
        return b.clone().normalize_sign();
    }
    if b.is_zero() {
        return a.clone().normalize_sign();
    }
    let var = match (a.max_var(), b.max_var()) {
        (None, None) => return Poly::constant(n, a.integer_content().gcd(&b.integer_content())),
        (x, y) => x.max(y).unwrap(),
    };
    if !a.uses_var(var) {
        return gcd(a, &b.content_in(var));
    }
    if !b.uses_var(var) {
        return gcd(&a.content_in(var), b);
    }
    let ca = a.content_in(var);
    let cb = b.content_in(var);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(var) < q.degree_in(var) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = p.pseudo_rem(&q, var);
        p = q;
        q = if r.is_zero() {
            r
        } else {
            let cr = r.content_in(var);
            r.div_exact(&cr).expect("content divides")
        };
    }
    let pp = if p.uses_var(var) {
        let cp = p.content_in(var);
        p.div_exact(&cp).expect("content divides")
    } else {
        Poly::one(n)
    };
    (&c * &pp).normalize_sign()
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, o: &Poly) -> Poly {
        assert_eq!(self.n_vars, o.n_vars);
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, o: &Poly) -> Poly {
        assert_eq!(self.n_vars, o.n_vars);
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), -c);
        }
        p
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, o: &Poly) -> Poly {
        assert_eq!(self.n_vars, o.n_vars);
        let mut p = Poly::zero(self.n_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.add_term(m1.mul(m2), c1 * c2);
            }
        }
        p
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(mut self) -> Poly {
        for v in self.terms.values_mut() {
            *v = -&*v;
        }
        self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            let vars: Vec<String> = m
                .exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                f.write_str(&vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly<{}>({})", self.n_vars, self)
    }
}

/// Parses with the variable count inferred from the highest index used
/// (at least one variable).
impl FromStr for Poly {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let terms = Parser::new(s).parse()?;
        let n = terms
            .iter()
            .flat_map(|(vars, _)| vars.iter().map(|(v, _)| v + 1))
            .max()
            .unwrap_or(1);
        Ok(build(n, terms))
    }
}

/// Parses in exactly `n_vars` variables.
pub fn parse(s: &str, n_vars: usize) -> Result<Poly, PolyError> {
    let terms = Parser::new(s).parse()?;
    for (vars, _) in &terms {
        for &(v, _) in vars {
            if v >= n_vars {
                return Err(PolyError::VariableOutOfRange { index: v, n_vars });
            }
        }
    }
    Ok(build(n_vars, terms))
}

type ParsedTerm = (Vec<(usize, u32)>, BigInt);

fn build(n: usize, terms: Vec<ParsedTerm>) -> Poly {
    let mut p = Poly::zero(n);
    for (vars, c) in terms {
        let mut e = vec![0; n];
        for (v, k) in vars {
            e[v] += k;
        }
        p.add_term(Monomial::new(e), c);
    }
    p
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(s: &str) -> Self {
        Parser {
            chars: s.chars().collect(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos,
            message: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') | Some('\u{2212}') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn parse(mut self) -> Result<Vec<ParsedTerm>, ParseError> {
        let mut terms = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let mut negative = self.sign().unwrap_or(false);
        loop {
            self.skip_ws();
            let (vars, c) = self.term()?;
            terms.push((vars, if negative { -c } else { c }));
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(terms);
            }
            match self.sign() {
                Some(neg) => negative = neg,
                None => return self.err(format!("expected '+' or '-', found {:?}", self.peek().unwrap())),
            }
        }
    }

    fn term(&mut self) -> Result<ParsedTerm, ParseError> {
        let mut vars = Vec::new();
        let coeff = match self.digits() {
            Some(d) => {
                let c: BigInt = d.parse().expect("digits");
                self.skip_ws();
                match self.peek() {
                    Some('*') => {
                        self.pos += 1;
                        self.skip_ws();
                        vars.push(self.factor()?);
                    }
                    Some('x') => vars.push(self.factor()?),
                    _ => return Ok((vars, c)),
                }
                c
            }
            None => {
                vars.push(self.factor()?);
                BigInt::one()
            }
        };
        loop {
            let save = self.pos;
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                self.skip_ws();
                vars.push(self.factor()?);
            } else {
                self.pos = save;
                return Ok((vars, coeff));
            }
        }
    }

    fn factor(&mut self) -> Result<(usize, u32), ParseError> {
        if self.peek() != Some('x') {
            return match self.peek() {
                Some(c) => self.err(format!("expected a variable x<index>, found {c:?}")),
                None => self.err("expected a variable x<index>, found end of input"),
            };
        }
        self.pos += 1;
        let Some(idx) = self.digits() else {
            return self.err("expected a variable index after 'x'");
        };
        let idx: usize = match idx.parse() {
            Ok(i) => i,
            Err(_) => return self.err("variable index too large"),
        };
        let save = self.pos;
        self.skip_ws();
        if self.peek() != Some('^') {
            self.pos = save;
            return Ok((idx, 1));
        }
        self.pos += 1;
        self.skip_ws();
        let Some(e) = self.digits() else {
            return self.err("expected an exponent after '^'");
        };
        match e.parse::<u32>() {
            Ok(e) => Ok((idx, e)),
            Err(_) => self.err("exponent too large"),
        }
    }
}
