#![allow(dead_code)]

use binform::poly::{q, Q};
use binform::BinaryForm;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` distinct projective points `(a : b)` with small coprime integer
/// coordinates, normalized so `b > 0` or `(a, b) = (1, 0)`.
pub fn distinct_points(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
    while pts.len() < n {
        let a = rng.random_range(-bound..=bound);
        let b = rng.random_range(0..=bound);
        if (a, b) == (0, 0) || a.gcd(&b) != 1 || (b == 0 && a != 1) {
            continue;
        }
        if !pts.contains(&(a, b)) {
            pts.push((a, b));
        }
    }
    pts
}

/// `c * prod (b_i x - a_i y)`: roots at the points `(a_i : b_i)`.
pub fn real_rooted(rng: &mut ChaCha8Rng, n: usize) -> BinaryForm {
    let pts = distinct_points(rng, n, 6);
    let factors: Vec<(Q, Q)> = pts.iter().map(|&(a, b)| (q(b), q(-a))).collect();
    let c = loop {
        let c = rng.random_range(-5..=5);
        if c != 0 {
            break c;
        }
    };
    BinaryForm::product_of_linear(&factors).scale(&q(c))
}

/// `x^2 + p xy + r y^2` with `p^2 < 4r`.
pub fn irreducible_quadratic(rng: &mut ChaCha8Rng) -> (i64, i64) {
    loop {
        let p = rng.random_range(-6..=6);
        let r = rng.random_range(1..=12);
        if p * p < 4 * r {
            return (p, r);
        }
    }
}

/// Degree-`n` square-free form with exactly `real` distinct real roots;
/// `n - real` must be even.
pub fn with_real_roots(rng: &mut ChaCha8Rng, n: usize, real: usize) -> BinaryForm {
    assert!(real <= n && (n - real).is_multiple_of(2));
    let mut f = if real > 0 {
        let pts = distinct_points(rng, real, 6);
        BinaryForm::product_of_linear(&pts.iter().map(|&(a, b)| (q(b), q(-a))).collect::<Vec<_>>())
    } else {
        BinaryForm::from_ints(&[1])
    };
    let mut used = Vec::new();
    while used.len() < (n - real) / 2 {
        let qd = irreducible_quadratic(rng);
        if !used.contains(&qd) {
            used.push(qd);
            f = f.mul(&BinaryForm::from_ints(&[1, qd.0, qd.1]));
        }
    }
    f
}

/// A real-rooted form of degree `n` or a form with fewer real roots, each
/// half the time.
pub fn near_miss(rng: &mut ChaCha8Rng, n: usize) -> BinaryForm {
    let pairs = rng.random_range(1..=n / 2);
    with_real_roots(rng, n, n - 2 * pairs)
}

/// Coefficients of `sum lambda_i (alpha_i x + beta_i y)^n` in floats.
pub fn reconstruct(terms: &[(f64, f64, f64)], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for &(l, a, b) in terms {
        let mut binom = 1.0;
        for (i, slot) in out.iter_mut().enumerate() {
            *slot += l * binom * a.powi((n - i) as i32) * b.powi(i as i32);
            binom = binom * (n - i) as f64 / (i + 1) as f64;
        }
    }
    out
}

fn projective_gap(p: (i64, i64), r: (i64, i64)) -> f64 {
    let d = ((p.1 as f64).atan2(p.0 as f64) - (r.1 as f64).atan2(r.0 as f64)).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// Real-rooted form whose roots are at least `min_gap` radians apart on the
/// projective line.
pub fn separated_real_rooted(rng: &mut ChaCha8Rng, n: usize, min_gap: f64) -> BinaryForm {
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
    while pts.len() < n {
        let cand = distinct_points(rng, 1, 8)[0];
        if pts.iter().all(|&p| projective_gap(p, cand) >= min_gap) {
            pts.push(cand);
        }
    }
    BinaryForm::product_of_linear(&pts.iter().map(|&(a, b)| (q(b), q(-a))).collect::<Vec<_>>())
}
