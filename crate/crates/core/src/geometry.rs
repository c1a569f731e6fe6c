//! The normalized gradient map `phi = grad f / |grad f|` on the unit circle,
//! its rotated companion `psi = e^{-i theta} phi`, their winding numbers, and
//! exact Hessian evaluations.
//!
//! Sampling is in `f64`; everything that certifies a degree goes through the
//! exact routines in [`crate::roots`].

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::poly::{sign, Q};
use crate::roots::{count_projective_real_roots, discriminant_form, resultant_gradient, PolyRoots};

/// Raw gradient norms below this multiple of the largest `|c_i|` are treated
/// as a vanishing gradient.
pub const RAW_NORM_THRESHOLD: f64 = 1e-9;

pub const TRAJECTORY_CSV_HEADER: &str = "theta,vx,vy,angular_velocity";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleMapKind {
    Phi,
    Psi,
}

impl std::str::FromStr for CircleMapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(CircleMapKind::Phi),
            "psi" => Ok(CircleMapKind::Psi),
            other => Err(Error::Invalid(format!("unknown map `{other}`, expected phi or psi"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CircleMapSample {
    pub theta: f64,
    /// Unit vector.
    pub value: [f64; 2],
    pub raw_value: [f64; 2],
    /// Derivative of the angle of `value` with respect to `theta`.
    pub angular_velocity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WindingResult {
    pub degree: i64,
    /// `|sum / 2pi - degree|` before rounding.
    pub deviation: f64,
    pub max_step_angle: f64,
    pub min_raw_norm: f64,
    pub steps: usize,
}

/// Float evaluators for `f_x`, `f_y` and `H(f)`, checked once for
/// square-freeness.
#[derive(Clone, Debug)]
pub struct CircleMaps {
    degree: usize,
    fx: Vec<f64>,
    fy: Vec<f64>,
    hessian: Vec<f64>,
    norm_floor: f64,
}

/// `sum c_i x^(d-i) y^i` by Horner in whichever ratio has modulus <= 1.
fn eval_form(coeffs: &[f64], x: f64, y: f64) -> f64 {
    let d = (coeffs.len() - 1) as i32;
    if x.abs() >= y.abs() {
        let t = y / x;
        coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c) * x.powi(d)
    } else {
        let t = x / y;
        coeffs.iter().fold(0.0, |acc, c| acc * t + c) * y.powi(d)
    }
}

impl CircleMaps {
    pub fn new(f: &BinaryForm) -> Result<Self> {
        f.require_nonzero("circle map")?;
        f.require_degree("circle map", 2, ">= 2")?;
        if resultant_gradient(f)?.is_zero() {
            return Err(Error::NotSquareFree);
        }
        let scale = f
            .to_f64_coeffs()
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        Ok(CircleMaps {
            degree: f.degree(),
            fx: f.partial_x()?.to_f64_coeffs(),
            fy: f.partial_y()?.to_f64_coeffs(),
            hessian: f.hessian()?.to_f64_coeffs(),
            norm_floor: RAW_NORM_THRESHOLD * scale,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `(f_x, f_y)` at `(cos theta, sin theta)`.
    pub fn gradient(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        [eval_form(&self.fx, c, s), eval_form(&self.fy, c, s)]
    }

    pub fn hessian(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        eval_form(&self.hessian, c, s)
    }

    /// `(x f_x + y f_y, -y f_x + x f_y)`, the gradient rotated by `-theta`.
    pub fn rotated_gradient(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        let [a, b] = self.gradient(theta);
        [c * a + s * b, -s * a + c * b]
    }

    pub fn sample(&self, kind: CircleMapKind, theta: f64) -> Result<CircleMapSample> {
        let grad = self.gradient(theta);
        let norm2 = grad[0] * grad[0] + grad[1] * grad[1];
        let norm = norm2.sqrt();
        if !(norm >= self.norm_floor) || norm == 0.0 {
            return Err(Error::DegenerateGradient { theta, norm });
        }
        let phi_velocity = self.hessian(theta) / ((self.degree - 1) as f64 * norm2);
        let (raw, velocity) = match kind {
            CircleMapKind::Phi => (grad, phi_velocity),
            CircleMapKind::Psi => (self.rotated_gradient(theta), phi_velocity - 1.0),
        };
        Ok(CircleMapSample {
            theta,
            value: [raw[0] / norm, raw[1] / norm],
            raw_value: raw,
            angular_velocity: velocity,
        })
    }

    pub fn winding_number(&self, kind: CircleMapKind, steps: usize) -> Result<WindingResult> {
        let minimum = 64 * self.degree;
        if steps < minimum {
            return Err(Error::TooFewSteps {
                steps,
                minimum,
                degree: self.degree,
            });
        }
        let samples = self.trajectory(kind, steps)?;
        let mut total = 0.0;
        let mut max_step = 0.0f64;
        for k in 0..steps {
            let a = samples[k].value;
            let b = samples[(k + 1) % steps].value;
            let inc = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
            if inc.abs() >= PI / 2.0 {
                return Err(Error::Undersampled {
                    step: k,
                    increment: inc,
                });
            }
            max_step = max_step.max(inc.abs());
            total += inc;
        }
        let turns = total / TAU;
        let degree = turns.round();
        let min_raw_norm = samples
            .iter()
            .map(|s| s.raw_value[0].hypot(s.raw_value[1]))
            .fold(f64::INFINITY, f64::min);
        Ok(WindingResult {
            degree: degree as i64,
            deviation: (turns - degree).abs(),
            max_step_angle: max_step,
            min_raw_norm,
            steps,
        })
    }

    /// Samples on the uniform grid `theta_k = 2 pi k / steps`.
    pub fn trajectory(&self, kind: CircleMapKind, steps: usize) -> Result<Vec<CircleMapSample>> {
        (0..steps)
            .into_par_iter()
            .map(|k| self.sample(kind, TAU * k as f64 / steps as f64))
            .collect()
    }
}

pub fn default_steps(degree: usize) -> usize {
    4096.max(256 * degree)
}

pub fn phi_bar(f: &BinaryForm, theta: f64) -> Result<CircleMapSample> {
    CircleMaps::new(f)?.sample(CircleMapKind::Phi, theta)
}

pub fn psi_bar(f: &BinaryForm, theta: f64) -> Result<CircleMapSample> {
    CircleMaps::new(f)?.sample(CircleMapKind::Psi, theta)
}

pub fn winding_number_numeric(
    f: &BinaryForm,
    kind: CircleMapKind,
    steps: usize,
) -> Result<WindingResult> {
    CircleMaps::new(f)?.winding_number(kind, steps)
}

pub fn trajectory_csv(samples: &[CircleMapSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(TRAJECTORY_CSV_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.theta, s.value[0], s.value[1], s.angular_velocity
        );
    }
    out
}

/// True when the Hessian has no real projective zero.
pub fn hessian_is_definite(h: &BinaryForm) -> Result<bool> {
    if h.is_zero() {
        return Ok(false);
    }
    if h.degree() == 0 {
        return Ok(true);
    }
    Ok(count_projective_real_roots(h)?.distinct_real_projective == 0)
}

/// Degree of `phi` by exact preimage counting over `z = (0, 1)`: the number
/// of circle points with `f_x = 0` and `f_y > 0`, signed by `H(f)(1, 0)`.
/// Only valid when the Hessian never vanishes on the circle.
pub fn degree_phi_exact(f: &BinaryForm) -> Result<i64> {
    f.require_nonzero("degree_phi_exact")?;
    f.require_degree("degree_phi_exact", 2, ">= 2")?;
    if resultant_gradient(f)?.is_zero() {
        return Err(Error::NotSquareFree);
    }
    let h = f.hessian()?;
    if !hessian_is_definite(&h)? {
        return Err(Error::HessianHasRealRoots);
    }
    let orientation = sign(&h.evaluate(&Q::from_integer(1.into()), &Q::zero()));
    let fx = f.partial_x()?;
    let fy = f.partial_y()?;
    let even = (f.degree() - 1).is_multiple_of(2);
    let contribution = |s: i8| -> Result<i64> {
        match (s, even) {
            (0, _) => Err(Error::SignUndetermined("f_x and f_y share a root")),
            (_, false) => Ok(1),
            (1, true) => Ok(2),
            (_, true) => Ok(0),
        }
    };

    let dx = fx.dehomogenize()?;
    let mut count = 0;
    if dx.degree_drop > 0 {
        // direction (1:0); f_y(1, 0) = c_1
        count += contribution(sign(f.coeff(1)))?;
    }
    if dx.poly.degree().unwrap_or(0) > 0 {
        let fy_affine = fy.dehomogenize()?.poly;
        let mut roots = PolyRoots::isolate(&dx.poly)?;
        for idx in 0..roots.intervals.len() {
            count += contribution(roots.sign_of_at_root(&fy_affine, idx)?)?;
        }
    }
    Ok(orientation as i64 * count)
}

pub fn hessian_at_point(f: &BinaryForm, x: &Q, y: &Q) -> Result<Q> {
    Ok(f.hessian()?.evaluate(x, y))
}

/// `m^2 (m-1)^2 (a_0 a_2 - a_1^2)`, the Hessian at `(1, 0)` written through
/// binomial-scaled coefficients.
pub fn hessian_at_x_axis_scaled(g: &BinaryForm) -> Result<Q> {
    g.require_degree("hessian_at_x_axis_scaled", 2, ">= 2")?;
    let a = g.binomial_scaled();
    let m = Q::from_integer(g.degree().into());
    let m1 = &m - Q::from_integer(1.into());
    Ok(&m * &m * &m1 * &m1 * (&a[0] * &a[2] - &a[1] * &a[1]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticHessian {
    pub hessian_constant: Q,
    pub minus_discriminant: Q,
}

pub fn quadratic_hessian_check(h: &BinaryForm) -> Result<QuadraticHessian> {
    if h.degree() != 2 {
        return Err(Error::Degree {
            op: "quadratic_hessian_check",
            requirement: "== 2",
            actual: h.degree(),
        });
    }
    let hessian_constant = h.hessian()?.coeff(0).clone();
    let minus_discriminant = if h.is_zero() {
        Q::zero()
    } else {
        -discriminant_form(h)?
    };
    Ok(QuadraticHessian {
        hessian_constant,
        minus_discriminant,
    })
}
