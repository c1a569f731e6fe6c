//! Executable checks of the real-rootedness criteria for a single form.
//!
//! * A: `f` has `n` distinct real roots.
//! * B: every derivative `alpha f_x + beta f_y` has `n - 1` distinct real roots.
//! * C: the Hessian has no real zero and is negative at `(1, 0)`.
//!
//! Reports are plain data; callers decide what an inconsistency means.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::geometry::{default_steps, degree_phi_exact, hessian_is_definite, CircleMapKind, CircleMaps};
use crate::poly::{q, UniPoly, Q};
use crate::rank::{real_rank, RankMethod, SearchBudget};
use crate::roots::{count_projective_real_roots, discriminant_form, has_n_distinct_real_roots, resultant_gradient};

fn require_theorem_input(f: &BinaryForm, op: &'static str) -> Result<()> {
    f.require_nonzero(op)?;
    f.require_degree(op, 3, ">= 3")?;
    if resultant_gradient(f)?.is_zero() {
        return Err(Error::NotSquareFree);
    }
    Ok(())
}

pub fn check_criterion_a(f: &BinaryForm) -> Result<bool> {
    require_theorem_input(f, "check_criterion_A")?;
    has_n_distinct_real_roots(f)
}

/// Lagrange interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Q], ys: &[Q]) -> UniPoly {
    let mut acc = UniPoly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = UniPoly::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let factor = UniPoly::new(vec![-xj.clone(), Q::from_integer(1.into())]);
            basis = basis.mul(&factor).scale(&(xi - xj).recip());
        }
        acc = acc.add(&basis);
    }
    acc
}

/// The discriminant of `alpha f_x + beta f_y` as a binary form of degree
/// `2(n - 2)` in `(alpha, beta)`, recovered by interpolation at
/// `(t, 1)` for `t = 0..=2(n-2)`.
pub fn pencil_discriminant(f: &BinaryForm) -> Result<BinaryForm> {
    f.require_degree("pencil_discriminant", 3, ">= 3")?;
    let fx = f.partial_x()?;
    let fy = f.partial_y()?;
    let d = 2 * (f.degree() - 2);
    let ts: Vec<Q> = (0..=d as i64).map(q).collect();
    let values = ts
        .iter()
        .map(|t| {
            let member = fx.scale(t).add(&fy);
            if member.is_zero() {
                Ok(Q::zero())
            } else {
                discriminant_form(&member)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinaryForm::homogenize(&interpolate(&ts, &values), d))
}

/// Criterion B for all `(alpha : beta)` at once: the pencil discriminant has
/// no real zero, so the real-root count of the members is constant along the
/// connected real projective line, and `f_x` alone has `n - 1` real roots.
pub fn check_criterion_b(f: &BinaryForm) -> Result<bool> {
    require_theorem_input(f, "check_criterion_B")?;
    let d = pencil_discriminant(f)?;
    if d.is_zero() || count_projective_real_roots(&d)?.distinct_real_projective > 0 {
        return Ok(false);
    }
    has_n_distinct_real_roots(&f.partial_x()?)
}

pub fn check_criterion_c(f: &BinaryForm) -> Result<bool> {
    require_theorem_input(f, "check_criterion_C")?;
    let h = f.hessian()?;
    Ok(hessian_is_definite(&h)? && h.evaluate(&q(1), &q(0)).is_negative())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoremReport {
    pub form: String,
    pub degree: usize,
    pub criterion_a: bool,
    pub criterion_b: bool,
    pub criterion_c: bool,
    pub winding_phi: Option<i64>,
    pub winding_psi: Option<i64>,
    /// Preimage-count degree of phi, present when the Hessian never vanishes.
    pub winding_phi_exact: Option<i64>,
    pub consistent: bool,
    /// Proof-level implications that failed on this form; empty when sound.
    pub violations: Vec<String>,
}

/// Numeric winding number, retried on finer grids when the step guard trips.
pub fn robust_winding(maps: &CircleMaps, kind: CircleMapKind) -> Option<i64> {
    let mut steps = default_steps(maps.degree());
    for _ in 0..4 {
        match maps.winding_number(kind, steps) {
            Ok(w) => return Some(w.degree),
            Err(Error::Undersampled { .. }) => steps *= 4,
            Err(_) => return None,
        }
    }
    None
}

pub fn verify_theorem1(f: &BinaryForm) -> Result<TheoremReport> {
    require_theorem_input(f, "verify_theorem1")?;
    let n = f.degree() as i64;
    let a = check_criterion_a(f)?;
    let b = check_criterion_b(f)?;
    let c = check_criterion_c(f)?;
    let maps = CircleMaps::new(f)?;
    let phi = robust_winding(&maps, CircleMapKind::Phi);
    let psi = robust_winding(&maps, CircleMapKind::Psi);
    let exact = if hessian_is_definite(&f.hessian()?)? {
        Some(degree_phi_exact(f)?)
    } else {
        None
    };

    let mut violations = Vec::new();
    if b && !c {
        violations.push("criterion B holds but criterion C fails".to_string());
    }
    if a {
        if phi.is_some_and(|w| w != -(n - 1)) {
            violations.push(format!("all roots real but deg phi = {:?}, expected {}", phi, -(n - 1)));
        }
        if psi.is_some_and(|w| w != -n) {
            violations.push(format!("all roots real but deg psi = {:?}, expected {}", psi, -n));
        }
    }
    if let (Some(p), Some(s)) = (phi, psi) {
        if s != p - 1 {
            violations.push(format!("deg psi = {s} but deg phi - 1 = {}", p - 1));
        }
    }
    if let (Some(p), Some(e)) = (phi, exact) {
        if p != e {
            violations.push(format!("numeric deg phi = {p} but exact = {e}"));
        }
    }

    Ok(TheoremReport {
        form: f.to_string(),
        degree: f.degree(),
        criterion_a: a,
        criterion_b: b,
        criterion_c: c,
        winding_phi: phi,
        winding_psi: psi,
        winding_phi_exact: exact,
        consistent: a == b,
        violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorollaryOutcome {
    Consistent,
    BoundsOnly,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorollaryReport {
    pub form: String,
    pub degree: usize,
    pub criterion_a: bool,
    pub complex_exact: Option<usize>,
    pub real_lower: usize,
    pub real_upper: usize,
    pub real_exact: Option<usize>,
    pub method: RankMethod,
    pub outcome: CorollaryOutcome,
}

pub fn verify_corollary(f: &BinaryForm, budget: &SearchBudget) -> Result<CorollaryReport> {
    require_theorem_input(f, "verify_corollary")?;
    let n = f.degree();
    let a = check_criterion_a(f)?;
    let cert = real_rank(f, budget)?;
    let outcome = match cert.real_exact {
        Some(r) if (r == n) == a => CorollaryOutcome::Consistent,
        Some(_) => CorollaryOutcome::Inconsistent,
        // undetermined ranks only occur below n; the bounds must exclude n
        None if !a && cert.real_upper < n => CorollaryOutcome::BoundsOnly,
        None => CorollaryOutcome::Inconsistent,
    };
    Ok(CorollaryReport {
        form: f.to_string(),
        degree: n,
        criterion_a: a,
        complex_exact: cert.complex_exact,
        real_lower: cert.real_lower,
        real_upper: cert.real_upper,
        real_exact: cert.real_exact,
        method: cert.method,
        outcome,
    })
}
