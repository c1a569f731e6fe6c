//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored in ascending order (`coeffs[k]` multiplies `x^k`)
//! and trailing zeros are always trimmed, so the zero polynomial is the empty
//! vector and `degree()` is `None` for it.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(v: &Q) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

pub fn to_f64(v: &Q) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 can fail on huge operands; fall back to shifting.
        let n = v.numer().bits() as i64;
        let d = v.denom().bits() as i64;
        let shift = (n - d).clamp(-1000, 1000);
        let scaled = if shift > 0 {
            v / Q::from_integer(BigInt::one() << shift as usize)
        } else {
            v * Q::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Q>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "UniPoly[{}]", parts.join(", "))
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * q(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Q) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Q::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        UniPoly::new(out)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let factor = &rem[k] / &lead;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] -= &factor * d;
            }
            quot[k - dd] = factor;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn rem(&self, divisor: &UniPoly) -> UniPoly {
        self.div_rem(divisor).1
    }

    /// A positive multiple of `self mod divisor`, made primitive. Runs on
    /// integer coefficients, so no rational normalization happens per step.
    pub fn pseudo_rem(&self, divisor: &UniPoly) -> UniPoly {
        let db = divisor.degree().expect("division by zero polynomial");
        let ints = |p: &UniPoly| -> Vec<BigInt> { p.primitive().coeffs.iter().map(|c| c.numer().clone()).collect() };
        let mut r = ints(self);
        let b = ints(divisor);
        let lc = b[db].clone();
        let (lc_abs, lc_neg) = (lc.abs(), lc.is_negative());
        while r.len() > db {
            let k = r.len() - 1;
            let top = r[k].clone();
            if !top.is_zero() {
                let factor = if lc_neg { -top } else { top };
                for c in r.iter_mut() {
                    *c *= &lc_abs;
                }
                for (j, bj) in b.iter().enumerate() {
                    r[k - db + j] -= &factor * bj;
                }
            }
            r.pop();
        }
        UniPoly::new(r.into_iter().map(Q::from_integer).collect()).primitive()
    }

    /// Multiplies by a positive rational so that coefficients become coprime
    /// integers. Signs are unchanged.
    pub fn primitive(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let den_lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Q::from_integer(den_lcm.clone())).to_integer())
            .collect();
        let g = ints
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
            .abs();
        UniPoly::new(ints.into_iter().map(|c| Q::from_integer(c / &g)).collect())
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => UniPoly::zero(),
        }
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`, normalized to a primitive integer polynomial.
    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.primitive()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree().unwrap_or(0) == 0
    }

    /// Sign of `p(x)` through the integer form `b^d L p(a/b)`, avoiding
    /// rational normalization.
    pub fn sign_eval(&self, x: &Q) -> i8 {
        let Some(d) = self.degree() else { return 0 };
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| if c.denom().is_one() { acc } else { acc.lcm(c.denom()) });
        let int = |c: &Q| -> BigInt {
            if l.is_one() {
                c.numer().clone()
            } else {
                c.numer() * (&l / c.denom())
            }
        };
        let (a, b) = (x.numer(), x.denom());
        let mut acc = int(&self.coeffs[d]);
        let mut bp = BigInt::one();
        for c in self.coeffs[..d].iter().rev() {
            bp *= b;
            acc = acc * a + int(c) * &bp;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Sign at `x`, or at -inf / +inf.
    pub fn sign_at(&self, x: &Bound) -> i8 {
        match x {
            Bound::Finite(v) => self.sign_eval(v),
            Bound::PosInf => self.leading().map_or(0, sign),
            Bound::NegInf => match self.degree() {
                None => 0,
                Some(d) => {
                    let s = sign(self.leading().unwrap());
                    if d % 2 == 0 {
                        s
                    } else {
                        -s
                    }
                }
            },
        }
    }

    /// Cauchy bound: every real root lies in (-B, B).
    pub fn cauchy_bound(&self) -> Q {
        let lead = self.leading().expect("cauchy bound of zero polynomial").abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Q::zero);
        m + Q::one()
    }
}

/// An endpoint of a real interval, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Finite(Q),
    PosInf,
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        use Bound::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

/// Simplest rational (smallest denominator, then numerator) in the closed
/// interval `[lo, hi]`, found by continued-fraction descent.
pub fn simplest_rational_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi);
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_rational_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if fl.clone() + Q::one() <= *hi {
        return fl + Q::one();
    }
    // lo and hi share the integer part fl; recurse on the reciprocals of the
    // fractional parts.
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    let inner = simplest_rational_between(&hi_frac.recip(), &lo_frac.recip());
    fl + inner.recip()
}
