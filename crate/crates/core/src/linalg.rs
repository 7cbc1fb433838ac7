//! Exact integer matrix kernel.
//!
//! Everything here works on arbitrary-precision integers. Lattice bases are
//! stored as rows; `hnf` gives the canonical form used as lattice identity,
//! `kernel_basis` the saturated integer kernel and `lll_reduce` an integral
//! (fraction-free) LLL reduction.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix must have at least one column")]
    NoColumns,
    #[error("row {row} has {len} entries, expected {cols}")]
    Ragged { row: usize, len: usize, cols: usize },
    #[error("basis rows are linearly dependent")]
    DependentRows,
    #[error("LLL parameter must lie strictly between 1/4 and 1, got {0}")]
    BadDelta(Ratio<i64>),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense integer matrix, row-major.
///
/// A matrix may have zero rows (the basis of the zero lattice, or an empty
/// kernel) but always has at least one column.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, LinalgError> {
        if cols == 0 {
            return Err(LinalgError::NoColumns);
        }
        Ok(IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n).expect("n >= 1");
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Matrix with no rows and `cols` columns.
    pub fn empty(cols: usize) -> Result<Self, LinalgError> {
        IntMatrix::zeros(0, cols)
    }

    pub fn from_rows<T, R>(rows: &[R]) -> Result<Self, LinalgError>
    where
        T: Clone + Into<BigInt>,
        R: AsRef<[T]>,
    {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if cols == 0 {
            return Err(LinalgError::NoColumns);
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    len: r.len(),
                    cols,
                });
            }
            data.extend(r.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_row_vecs(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self, LinalgError> {
        if cols == 0 {
            return Err(LinalgError::NoColumns);
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    len: r.len(),
                    cols,
                });
            }
        }
        let n = rows.len();
        for r in rows {
            data.extend(r);
        }
        Ok(IntMatrix { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[BigInt]> {
        self.data.chunks(self.cols)
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<BigInt>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    /// Rows as `i64`, or `None` if some entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.row_iter()
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn transpose(&self) -> IntMatrix {
        // A 0-row matrix transposes to something without columns; callers
        // never ask for that.
        let mut t = IntMatrix::zeros(self.cols, self.rows.max(1)).expect("cols >= 1");
        t.cols = self.rows;
        t.data = vec![BigInt::zero(); self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Keeps only the first `n` rows.
    pub fn truncate_rows(&self, n: usize) -> IntMatrix {
        let n = n.min(self.rows);
        IntMatrix {
            rows: n,
            cols: self.cols,
            data: self.data[..n * self.cols].to_vec(),
        }
    }

    /// Drops zero rows.
    pub fn nonzero_rows(&self) -> IntMatrix {
        let keep: Vec<Vec<BigInt>> = self
            .row_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| r.to_vec())
            .collect();
        IntMatrix::from_row_vecs(self.cols, keep).expect("cols unchanged")
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `M · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Dimension(format!(
                "{} columns against vector of length {}",
                self.cols,
                v.len()
            )));
        }
        Ok(self.row_iter().map(|r| dot(r, v)).collect())
    }

    pub fn gram(&self) -> IntMatrix {
        let mut g = IntMatrix::zeros(self.rows, self.rows.max(1)).expect("nonzero cols");
        g.cols = self.rows;
        g.data = vec![BigInt::zero(); self.rows * self.rows];
        for i in 0..self.rows {
            for j in i..self.rows {
                let v = dot(self.row(i), self.row(j));
                g.data[j * self.rows + i] = v.clone();
                g.data[i * self.rows + j] = v;
            }
        }
        g
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Line format: rows separated by `;`, entries by `,`.
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.row_iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[{}]", self.rows, self.cols, self)
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[BigInt]) -> BigInt {
    dot(a, a)
}

/// `row[dst] -= q * row[src]`
fn sub_row_multiple(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let cols = m.cols;
    for j in 0..cols {
        let t = &m.data[src * cols + j] * q;
        m.data[dst * cols + j] -= t;
    }
}

/// Row-style Hermite normal form.
///
/// Pivots are positive, entries above a pivot lie in `[0, pivot)`, and zero
/// rows are moved to the bottom so the shape is preserved. Returns the form
/// and the rank.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, usize) {
    let mut h = m.clone();
    let mut r = 0;
    for j in 0..h.cols {
        if r == h.rows {
            break;
        }
        // Euclid on column j among rows r.. until one nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for i in r..h.rows {
                if h[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if h[(b, j)].abs() <= h[(i, j)].abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..h.rows {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = h[(i, j)].div_floor(&h[(r, j)]);
                sub_row_multiple(&mut h, i, r, &q);
                if !h[(i, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            for x in h.row_mut(r) {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = h[(i, j)].div_floor(&h[(r, j)]);
            sub_row_multiple(&mut h, i, r, &q);
        }
        r += 1;
    }
    (h, r)
}

pub fn rank(m: &IntMatrix) -> usize {
    hnf(m).1
}

/// Basis of the integer kernel `{y : M y = 0}`, in Hermite normal form.
///
/// The kernel of an integer matrix is always saturated, so the result is a
/// primitive lattice. A 0-row input has the whole of `Z^cols` as kernel; an
/// injective map returns a matrix with no rows.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let c = m.cols;
    let r = m.rows;
    // Row-reduce [M^T | I]; rows whose M^T part vanishes carry the kernel.
    let mut aug = IntMatrix::zeros(c, r + c).expect("c >= 1");
    for i in 0..c {
        for j in 0..r {
            aug[(i, j)] = m[(j, i)].clone();
        }
        aug[(i, r + i)] = BigInt::one();
    }
    let (h, _) = hnf(&aug);
    let mut kern = Vec::new();
    for i in 0..c {
        let row = h.row(i);
        if row[..r].iter().all(Zero::is_zero) {
            kern.push(row[r..].to_vec());
        }
    }
    let k = IntMatrix::from_row_vecs(c, kern).expect("c >= 1");
    hnf(&k).0.nonzero_rows()
}

/// Fraction-free determinant of a square matrix.
pub fn det(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols, "det of non-square matrix");
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            a.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    sign * &a[(n - 1, n - 1)]
}

/// `det(B · B^T)`: the squared covolume of the lattice spanned by the rows,
/// zero if they are dependent.
pub fn gram_det_sq(b: &IntMatrix) -> BigInt {
    if b.rows == 0 {
        return BigInt::one();
    }
    det(&b.gram())
}

/// Integral Gram–Schmidt data of a basis: `d[i]` is the Gram determinant of
/// the first `i` rows and `lambda[k][j] = d[j+1] * mu[k][j]`.
struct GsData {
    d: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
}

fn integral_gram_schmidt(b: &IntMatrix) -> Result<GsData, LinalgError> {
    let n = b.rows;
    let mut d = vec![BigInt::one(); n + 1];
    let mut lambda = vec![vec![BigInt::zero(); n]; n];
    for k in 0..n {
        for j in 0..=k {
            let mut u = dot(b.row(k), b.row(j));
            for i in 0..j {
                u = (&d[i + 1] * &u - &lambda[k][i] * &lambda[j][i]) / &d[i];
            }
            if j < k {
                lambda[k][j] = u;
            } else {
                if u.is_zero() {
                    return Err(LinalgError::DependentRows);
                }
                d[k + 1] = u;
            }
        }
    }
    Ok(GsData { d, lambda })
}

fn check_delta(delta: Ratio<i64>) -> Result<(BigInt, BigInt), LinalgError> {
    let quarter = Ratio::new(1, 4);
    if delta <= quarter || delta >= Ratio::one() {
        return Err(LinalgError::BadDelta(delta));
    }
    Ok((BigInt::from(*delta.numer()), BigInt::from(*delta.denom())))
}

/// True iff the rows are size-reduced and satisfy the Lovász condition for
/// `delta`, both checked in exact arithmetic.
pub fn is_lll_reduced(b: &IntMatrix, delta: Ratio<i64>) -> Result<bool, LinalgError> {
    let (p, q) = check_delta(delta)?;
    let gs = integral_gram_schmidt(b)?;
    let d = &gs.d;
    for k in 0..b.rows {
        for l in 0..k {
            if BigInt::from(2) * gs.lambda[k][l].abs() > d[l + 1] {
                return Ok(false);
            }
        }
        if k >= 1 {
            let lam = &gs.lambda[k][k - 1];
            let lhs = &q * &d[k + 1] * &d[k - 1];
            let rhs = &p * &d[k] * &d[k] - &q * lam * lam;
            if lhs < rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub const DEFAULT_LLL_DELTA: (i64, i64) = (3, 4);

pub fn default_delta() -> Ratio<i64> {
    Ratio::new(DEFAULT_LLL_DELTA.0, DEFAULT_LLL_DELTA.1)
}

/// One pass of integral LLL (Cohen, Algorithm 2.6.7). Returns the number of
/// swaps performed.
#[allow(clippy::needless_range_loop)]
fn lll_pass(b: &mut IntMatrix, p: &BigInt, q: &BigInt) -> Result<usize, LinalgError> {
    let n = b.rows;
    if n <= 1 {
        if n == 1 && b.row(0).iter().all(Zero::is_zero) {
            return Err(LinalgError::DependentRows);
        }
        return Ok(0);
    }
    // 1-based indices below follow the textbook; d[0] = 1.
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::one();
    d[1] = norm_sq(b.row(0));
    if d[1].is_zero() {
        return Err(LinalgError::DependentRows);
    }
    let mut k = 2;
    let mut kmax = 1;
    let mut swaps = 0;
    let two = BigInt::from(2);

    let red = |b: &mut IntMatrix, lam: &mut Vec<Vec<BigInt>>, d: &[BigInt], k: usize, l: usize| {
        if &two * lam[k][l].abs() > d[l] {
            // nearest integer to lam / d
            let r = (&two * &lam[k][l] + &d[l]).div_floor(&(&two * &d[l]));
            sub_row_multiple(b, k - 1, l - 1, &r);
            lam[k][l] -= &r * &d[l];
            for i in 1..l {
                let t = &r * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    };

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(b.row(k - 1), b.row(j - 1));
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(LinalgError::DependentRows);
                    }
                    d[k] = u;
                }
            }
        }
        red(b, &mut lam, &d, k, k - 1);
        let l = &lam[k][k - 1];
        if q * &d[k] * &d[k - 2] < p * &d[k - 1] * &d[k - 1] - q * l * l {
            swaps += 1;
            b.swap_rows(k - 1, k - 2);
            for j in 1..=k.saturating_sub(2) {
                let t = std::mem::take(&mut lam[k][j]);
                lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
            }
            let l = lam[k][k - 1].clone();
            let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
                lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k];
            }
            d[k - 1] = bb;
            k = (k - 1).max(2);
        } else {
            for l in (1..=k - 2).rev() {
                red(b, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
    Ok(swaps)
}

fn sorted_by_norm(b: &IntMatrix) -> (IntMatrix, bool) {
    let mut rows: Vec<(BigInt, Vec<BigInt>)> =
        b.row_iter().map(|r| (norm_sq(r), r.to_vec())).collect();
    let already = rows.windows(2).all(|w| w[0].0 <= w[1].0);
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let m = IntMatrix::from_row_vecs(b.cols, rows.into_iter().map(|(_, r)| r).collect())
        .expect("cols unchanged");
    (m, already)
}

const MAX_SORT_ROUNDS: usize = 64;

/// LLL-reduces the rows of `b` and returns them in nondecreasing norm order.
///
/// Reduction and sorting alternate until the reduced basis is already
/// sorted, so in practice the output is both LLL-reduced and sorted. If that
/// does not settle within a fixed number of rounds the sorted permutation of
/// the last reduced basis is returned; it still spans the same lattice and
/// obeys the norm-product bound.
pub fn lll_reduce(b: &IntMatrix, delta: Ratio<i64>) -> Result<IntMatrix, LinalgError> {
    let (p, q) = check_delta(delta)?;
    let mut cur = b.clone();
    for _ in 0..MAX_SORT_ROUNDS {
        lll_pass(&mut cur, &p, &q)?;
        let (sorted, already) = sorted_by_norm(&cur);
        if already {
            return Ok(sorted);
        }
        cur = sorted;
    }
    Ok(sorted_by_norm(&cur).0)
}
