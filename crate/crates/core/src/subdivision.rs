//! Subdivision of `[2, H]` by `b_{i+1} = b_i - b_i^((k-1)/k)`.
//!
//! Endpoints are carried as intervals with dyadic endpoints, rounded
//! outward at every step, so each inequality is decided rigorously. The
//! endpoints themselves are irrational in general; `PRECISION_BITS` is the
//! scale of the dyadic grid.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const PRECISION_BITS: u32 = 192;

/// Maximum interval width accepted for an endpoint, as a power of two.
pub const DECLARED_PRECISION_BITS: u32 = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubdivisionError {
    #[error("H must be a finite number >= 2, got {0}")]
    BadHeight(f64),
    #[error("k must be at least 1")]
    BadExponent,
    #[error("precision exhausted deciding whether b_{0} >= 2")]
    Undecided(usize),
}

/// Closed interval `[lo, hi] / 2^PRECISION_BITS`.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
}

fn scale() -> BigInt {
    BigInt::one() << PRECISION_BITS
}

impl Interval {
    pub fn from_rational(r: &BigRational) -> Self {
        let num = r.numer() << PRECISION_BITS;
        let (lo, rem) = num.div_mod_floor(r.denom());
        let hi = if rem.is_zero() { lo.clone() } else { &lo + 1 };
        Interval { lo, hi }
    }

    pub fn from_int(n: i64) -> Self {
        let v = BigInt::from(n) << PRECISION_BITS;
        Interval { lo: v.clone(), hi: v }
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), scale())
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), scale())
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, scale())
    }

    pub fn mid_f64(&self) -> f64 {
        let m = BigRational::new(&self.lo + &self.hi, scale() * 2);
        m.to_f64().unwrap_or(f64::NAN)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let products = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Interval {
            lo: min >> PRECISION_BITS,
            hi: ceil_shift(max, PRECISION_BITS),
        }
    }

    pub fn scale_int(&self, c: i64) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c >= 0 {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn pow(&self, e: u32) -> Interval {
        let mut acc = Interval::from_int(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `k`-th root of a nonnegative interval.
    pub fn root(&self, k: u32) -> Interval {
        assert!(!self.lo.is_negative(), "root of a negative interval");
        let shift = PRECISION_BITS * (k - 1);
        let lo = (&self.lo << shift).nth_root(k);
        let top = &self.hi << shift;
        let mut hi = top.nth_root(k);
        if hi.pow(k) < top {
            hi += 1;
        }
        Interval { lo, hi }
    }

    /// `Less` / `Greater` when the whole interval is on one side of `r`,
    /// `Equal` when it contains `r`.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        if self.hi() < *r {
            Ordering::Less
        } else if self.lo() > *r {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }
}

fn ceil_shift(x: &BigInt, bits: u32) -> BigInt {
    let s = x >> bits;
    if (&s << bits) == *x {
        s
    } else {
        s + 1
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12}, {:.12}]", self.lo().to_f64().unwrap_or(f64::NAN), self.hi().to_f64().unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone)]
pub struct SubdivisionScheme {
    h: f64,
    h_exact: BigRational,
    k: u32,
    /// `b_0 = H, ..., b_K`, with `b_{K-1} >= 2 > b_K`.
    endpoints: Vec<Interval>,
}

pub fn subdivide(h: f64, k: u32) -> Result<SubdivisionScheme, SubdivisionError> {
    if !h.is_finite() || h < 2.0 {
        return Err(SubdivisionError::BadHeight(h));
    }
    if k == 0 {
        return Err(SubdivisionError::BadExponent);
    }
    let h_exact = BigRational::from_float(h).expect("finite");
    let two = BigRational::from_integer(2.into());
    let mut endpoints = vec![Interval::from_rational(&h_exact)];
    loop {
        let i = endpoints.len() - 1;
        let b = &endpoints[i];
        match b.cmp_rational(&two) {
            Ordering::Less => break,
            Ordering::Equal if b.lo() < two => return Err(SubdivisionError::Undecided(i)),
            _ => {}
        }
        let step = b.root(k).pow(k - 1);
        let next = b.sub(&step);
        endpoints.push(next);
    }
    Ok(SubdivisionScheme { h, h_exact, k, endpoints })
}

impl SubdivisionScheme {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of intervals `K`.
    pub fn intervals(&self) -> usize {
        self.endpoints.len() - 1
    }

    pub fn endpoints(&self) -> &[Interval] {
        &self.endpoints
    }

    pub fn endpoints_f64(&self) -> Vec<f64> {
        self.endpoints.iter().map(Interval::mid_f64).collect()
    }

    /// `k * H^(1/k)`, the bound on the number of intervals.
    pub fn interval_bound(&self) -> f64 {
        self.k as f64 * self.h.powf(1.0 / self.k as f64)
    }

    /// `K <= k H^(1/k)`, decided exactly as `K^k <= k^k H`.
    pub fn count_bound_holds(&self) -> bool {
        let kk = BigInt::from(self.k).pow(self.k);
        let lhs = BigRational::from_integer(BigInt::from(self.intervals()).pow(self.k));
        lhs <= BigRational::from_integer(kk) * &self.h_exact
    }

    /// `b_{K-1} >= 2 > b_K` and `b_0 = H`.
    pub fn endpoints_bracket_two(&self) -> bool {
        let two = BigRational::from_integer(2.into());
        let k = self.intervals();
        self.endpoints[0].lo() == self.h_exact
            && self.endpoints[0].hi() == self.h_exact
            && self.endpoints[k - 1].lo() >= two
            && self.endpoints[k].hi() < two
    }

    /// Largest endpoint interval width.
    pub fn max_width(&self) -> BigRational {
        self.endpoints.iter().map(Interval::width).max().unwrap()
    }

    /// Every endpoint is pinned to within `2^-DECLARED_PRECISION_BITS`.
    pub fn within_declared_precision(&self) -> bool {
        self.max_width() <= BigRational::new(BigInt::one(), BigInt::one() << DECLARED_PRECISION_BITS)
    }

    /// `b_i / b_{i+1} <= 1 / (1 - 2^(-1/k))` for every consecutive pair.
    pub fn ratio_bound_holds(&self) -> bool {
        let half = Interval::from_rational(&BigRational::new(1.into(), 2.into()));
        let c = Interval::from_int(1).sub(&half.root(self.k));
        self.endpoints
            .windows(2)
            .all(|w| w[1].lo >= w[0].mul(&c).hi)
    }

    /// Largest integer `i` with `i <= k H^(1/k)`.
    pub fn f_domain_end(&self) -> u64 {
        let kk = BigRational::from_integer(BigInt::from(self.k).pow(self.k)) * &self.h_exact;
        let mut i = self.interval_bound().floor().max(0.0) as u64;
        let fits = |i: u64| BigRational::from_integer(BigInt::from(i).pow(self.k)) <= kk;
        while !fits(i) {
            i -= 1;
        }
        while fits(i + 1) {
            i += 1;
        }
        i
    }

    /// `f(i) = (k H^(1/k) - i)^k / k^k`.
    pub fn f(&self, i: f64) -> f64 {
        let k = self.k as f64;
        (self.interval_bound() - i).powf(k) / k.powf(k)
    }

    /// `f(i) - f(i+1) <= f(i)^((k-1)/k)` for every integer `i` with
    /// `i + 1 <= k H^(1/k)`, decided with interval arithmetic.
    pub fn f_step_property_holds(&self) -> bool {
        let k = self.k;
        let root = Interval::from_rational(&self.h_exact).root(k);
        let kr = root.scale_int(k as i64);
        (0..self.f_domain_end()).all(|i| {
            // With t = k H^(1/k) - i the inequality reads
            // t^k - (t-1)^k <= k t^(k-1).
            let t = kr.sub(&Interval::from_int(i as i64));
            let t1 = t.sub(&Interval::from_int(1));
            let lhs = t.pow(k).sub(&t1.pow(k));
            let rhs = t.pow(k - 1).scale_int(k as i64);
            lhs.hi <= rhs.lo
        })
    }
}
