//! Exact real-root certification for univariate polynomials and binary forms.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::form::{BinaryForm, Substitution};
use crate::linalg::QMatrix;
use crate::poly::{q, qf, Bound, UniPoly, Q};

/// Signed remainder sequence `p, p', -rem(p, p'), ...`; every element after
/// the first two is rescaled by a positive constant to a primitive integer
/// polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SturmSequence {
    polys: Vec<UniPoly>,
}

impl SturmSequence {
    pub fn new(p: &UniPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let p = p.primitive();
        let d = p.derivative().primitive();
        let mut polys = vec![p];
        if !d.is_zero() {
            polys.push(d);
        }
        while polys.len() >= 2 {
            let k = polys.len();
            let r = polys[k - 2].pseudo_rem(&polys[k - 1]);
            if r.is_zero() {
                break;
            }
            polys.push(r.neg());
        }
        Ok(SturmSequence { polys })
    }

    pub fn polys(&self) -> &[UniPoly] {
        &self.polys
    }

    /// True iff the last element is a nonzero constant.
    pub fn ends_in_constant(&self) -> bool {
        self.polys.last().and_then(UniPoly::degree) == Some(0)
    }

    pub fn variations(&self, at: &Bound) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.polys {
            let s = p.sign_at(at);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in `(lo, hi]`; meaningful for a square-free head.
    pub fn count(&self, lo: &Bound, hi: &Bound) -> usize {
        if lo >= hi {
            return 0;
        }
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_count(p: &UniPoly, lo: &Bound, hi: &Bound) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == Some(0) {
        return Ok(0);
    }
    let sturm = SturmSequence::new(p)?;
    if sturm.ends_in_constant() {
        return Ok(sturm.count(lo, hi));
    }
    Ok(SturmSequence::new(&p.squarefree_part())?.count(lo, hi))
}

pub fn count_all_real(p: &UniPoly) -> Result<usize> {
    sturm_count(p, &Bound::NegInf, &Bound::PosInf)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RootCount {
    pub distinct_real_projective: usize,
    pub distinct_real_affine: usize,
    pub has_root_at_infinity: bool,
    pub is_squarefree_over_c: bool,
}

pub fn count_projective_real_roots(f: &BinaryForm) -> Result<RootCount> {
    f.require_nonzero("count_projective_real_roots")?;
    f.require_degree("count_projective_real_roots", 1, ">= 1")?;
    let d = f.dehomogenize()?;
    let affine = count_all_real(&d.poly)?;
    let infinity = d.degree_drop > 0;
    let squarefree = if f.degree() >= 2 {
        !resultant_gradient(f)?.is_zero()
    } else {
        true
    };
    Ok(RootCount {
        distinct_real_projective: affine + usize::from(infinity),
        distinct_real_affine: affine,
        has_root_at_infinity: infinity,
        is_squarefree_over_c: squarefree,
    })
}

/// Sylvester resultant of two coefficient sequences given in descending
/// order with formal degrees `a.len() - 1` and `b.len() - 1`. Leading zeros
/// are kept, which gives the homogeneous resultant of two binary forms.
pub fn sylvester_resultant(a: &[Q], b: &[Q]) -> Q {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    if size == 0 {
        return Q::one();
    }
    let mut s = QMatrix::zeros(size, size);
    for r in 0..n {
        for (j, c) in a.iter().enumerate() {
            s.set(r, r + j, c.clone());
        }
    }
    for r in 0..m {
        for (j, c) in b.iter().enumerate() {
            s.set(n + r, r + j, c.clone());
        }
    }
    s.determinant()
}

/// `Res(f_x, f_y)`, zero iff `f` has a multiple root over C.
pub fn resultant_gradient(f: &BinaryForm) -> Result<Q> {
    f.require_degree("resultant_gradient", 2, ">= 2")?;
    let fx = f.partial_x()?;
    let fy = f.partial_y()?;
    Ok(sylvester_resultant(fx.coeffs(), fy.coeffs()))
}

/// `(-1)^(d(d-1)/2) Res(p, p') / lc(p)`.
pub fn discriminant_univariate(p: &UniPoly) -> Result<Q> {
    let d = match p.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::ConstantPolynomial),
        Some(d) => d,
    };
    let desc = |u: &UniPoly| u.coeffs().iter().rev().cloned().collect::<Vec<_>>();
    let res = sylvester_resultant(&desc(p), &desc(&p.derivative()));
    let lc = p.leading().unwrap();
    let s = if (d * (d - 1) / 2) % 2 == 0 { q(1) } else { q(-1) };
    Ok(s * res / lc)
}

/// Discriminant of a binary form, invariant under unimodular substitutions.
/// When `c_0 = 0` the form is first sheared by `y -> y + t x` so that the
/// dehomogenization keeps full degree.
pub fn discriminant_form(f: &BinaryForm) -> Result<Q> {
    f.require_nonzero("discriminant_form")?;
    f.require_degree("discriminant_form", 1, ">= 1")?;
    let g = if f.coeff(0).is_zero() {
        let t = (1..)
            .map(q)
            .find(|t| !f.evaluate(&q(1), t).is_zero())
            .unwrap();
        f.change_coordinates(&Substitution::new(q(1), q(0), t, q(1)))?
    } else {
        f.clone()
    };
    discriminant_univariate(&g.dehomogenize()?.poly)
}

/// Square-freeness through the dehomogenization: the affine part has no
/// repeated factor and `(1:0)` is at most a simple root.
pub fn is_squarefree_by_gcd(f: &BinaryForm) -> Result<bool> {
    let d = f.dehomogenize()?;
    Ok(d.degree_drop <= 1 && d.poly.is_squarefree())
}

/// A half-open interval `(lo, hi]` holding exactly one root, or the exact
/// root itself when `lo == hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatingInterval {
    pub lo: Q,
    pub hi: Q,
}

impl IsolatingInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / q(2)
    }

    /// Bisects until the width is at most `width`.
    pub fn refine(&mut self, sturm: &SturmSequence, width: &Q) {
        let p = &sturm.polys()[0];
        let w = self.width();
        if self.is_exact() || &w <= width {
            return;
        }
        // w / 2^k <= width once 2^k >= (w.n * width.d) / (width.n * w.d)
        let a = w.numer() * width.denom();
        let b = width.numer() * w.denom();
        let steps = (a.bits() + 1).saturating_sub(b.bits());
        for _ in 0..steps {
            if self.is_exact() {
                break;
            }
            self.bisect(sturm, p);
        }
    }

    pub(crate) fn bisect(&mut self, sturm: &SturmSequence, p: &UniPoly) {
        if p.sign_eval(&self.hi) == 0 {
            self.lo = self.hi.clone();
            return;
        }
        let mid = self.midpoint();
        if p.sign_eval(&mid) == 0 {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        // p is square-free, so a nonzero sign at lo decides the side directly
        let lo_sign = p.sign_eval(&self.lo);
        let left = if lo_sign != 0 {
            usize::from(lo_sign != p.sign_eval(&mid))
        } else {
            sturm.count(&Bound::Finite(self.lo.clone()), &Bound::Finite(mid.clone()))
        };
        if left == 1 {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }
}

/// Isolating intervals for the distinct real roots of a univariate
/// polynomial, sorted increasingly. Repeated factors are removed first.
#[derive(Clone, Debug)]
pub struct PolyRoots {
    pub sturm: SturmSequence,
    pub intervals: Vec<IsolatingInterval>,
}

impl PolyRoots {
    pub fn isolate(p: &UniPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut sturm = SturmSequence::new(p)?;
        if !sturm.ends_in_constant() && p.degree().unwrap_or(0) > 0 {
            sturm = SturmSequence::new(&p.squarefree_part())?;
        }
        let sf = sturm.polys()[0].clone();
        let mut intervals = Vec::new();
        if sf.degree().unwrap_or(0) > 0 {
            // a power of two keeps every bisection point dyadic
            let b = Q::from_integer(BigInt::one() << sf.cauchy_bound().ceil().to_integer().bits());
            let lo = -b.clone();
            let total = sturm.count(&Bound::Finite(lo.clone()), &Bound::Finite(b.clone()));
            let mut stack = vec![(lo, b, total)];
            while let Some((lo, hi, count)) = stack.pop() {
                match count {
                    0 => {}
                    1 => intervals.push(IsolatingInterval { lo, hi }),
                    _ => {
                        let mid = (&lo + &hi) / q(2);
                        let left =
                            sturm.count(&Bound::Finite(lo.clone()), &Bound::Finite(mid.clone()));
                        stack.push((mid.clone(), hi, count - left));
                        stack.push((lo, mid, left));
                    }
                }
            }
        }
        intervals.sort_by(|a, b| a.lo.cmp(&b.lo));
        Ok(PolyRoots { sturm, intervals })
    }

    pub fn squarefree_poly(&self) -> &UniPoly {
        &self.sturm.polys()[0]
    }

    pub fn refine_all(&mut self, width: &Q) {
        for iv in &mut self.intervals {
            iv.refine(&self.sturm, width);
        }
    }

    /// Sign of `g` at the `idx`-th root, by refining until `g` has no root in
    /// the interval. Fails when `g` vanishes at the root.
    pub fn sign_of_at_root(&mut self, g: &UniPoly, idx: usize) -> Result<i8> {
        if g.is_zero() {
            return Ok(0);
        }
        let p = self.sturm.polys()[0].clone();
        let common = p.gcd(g);
        if common.degree().unwrap_or(0) > 0 {
            let iv = &self.intervals[idx];
            if iv.is_exact() {
                if common.eval(&iv.lo).is_zero() {
                    return Err(Error::SignUndetermined("polynomial vanishes at the root"));
                }
            } else {
                let cs = SturmSequence::new(&common.squarefree_part())?;
                if cs.count(&Bound::Finite(iv.lo.clone()), &Bound::Finite(iv.hi.clone())) > 0 {
                    return Err(Error::SignUndetermined("polynomial vanishes at the root"));
                }
            }
        }
        let gs = SturmSequence::new(&g.squarefree_part())?;
        let iv = &mut self.intervals[idx];
        loop {
            if iv.is_exact() {
                return Ok(g.sign_eval(&iv.lo));
            }
            let inside = gs.count(&Bound::Finite(iv.lo.clone()), &Bound::Finite(iv.hi.clone()));
            if inside == 0 {
                return Ok(g.sign_eval(&iv.hi));
            }
            iv.bisect(&self.sturm, &p);
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootIsolation {
    pub roots: PolyRoots,
    pub root_at_infinity: bool,
}

impl RootIsolation {
    pub fn intervals(&self) -> &[IsolatingInterval] {
        &self.roots.intervals
    }

    /// Affine roots refined to width `width` and reported as midpoints; exact
    /// roots are reported exactly.
    pub fn approximations(&mut self, width: &Q) -> Vec<Q> {
        self.roots.refine_all(width);
        self.roots
            .intervals
            .iter()
            .map(|iv| if iv.is_exact() { iv.lo.clone() } else { iv.midpoint() })
            .collect()
    }
}

pub fn isolate_real_roots(f: &BinaryForm) -> Result<RootIsolation> {
    f.require_nonzero("isolate_real_roots")?;
    if f.degree() >= 2 && resultant_gradient(f)?.is_zero() {
        return Err(Error::NotSquareFree);
    }
    let d = f.dehomogenize()?;
    Ok(RootIsolation {
        roots: PolyRoots::isolate(&d.poly)?,
        root_at_infinity: d.degree_drop > 0,
    })
}

pub fn has_n_distinct_real_roots(f: &BinaryForm) -> Result<bool> {
    f.require_nonzero("has_n_distinct_real_roots")?;
    if f.degree() == 0 {
        return Ok(true);
    }
    let rc = count_projective_real_roots(f)?;
    Ok(rc.is_squarefree_over_c && rc.distinct_real_projective == f.degree())
}

/// Roots of `f` as projective points, with exact values whenever the
/// simplest rational inside a tight interval turns out to be a root.
/// Irrational roots are returned as interval midpoints of width below `width`.
pub fn projective_root_points(f: &BinaryForm, width: &Q) -> Result<Vec<((Q, Q), bool)>> {
    let mut iso = isolate_real_roots(f)?;
    let p = iso.roots.squarefree_poly().clone();
    let mut out = Vec::new();
    if iso.root_at_infinity {
        out.push(((q(1), q(0)), true));
    }
    let tight = width.clone().min(qf(1, 1 << 20));
    iso.roots.refine_all(&tight);
    for iv in &iso.roots.intervals {
        if iv.is_exact() {
            out.push(((iv.lo.clone(), q(1)), true));
            continue;
        }
        let s = crate::poly::simplest_rational_between(&iv.lo, &iv.hi);
        if p.sign_eval(&s) == 0 && s > iv.lo {
            out.push(((s, q(1)), true));
        } else {
            out.push(((iv.midpoint(), q(1)), false));
        }
    }
    Ok(out)
}
