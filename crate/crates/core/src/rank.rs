//! Waring ranks of binary forms through apolarity.
//!
//! The apolar ideal of a binary form of degree `n` is generated by two forms
//! of degrees `d1 <= d2` with `d1 + d2 = n + 2` (Sylvester). Below `d2` every
//! apolar form is a multiple of the first generator, which is what makes the
//! complex rank and several real-rank bounds exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::linalg::QMatrix;
use crate::poly::{to_f64, Q};
use crate::roots::{has_n_distinct_real_roots, projective_root_points, resultant_gradient};

/// Residual bound for numeric witnesses, relative to the largest `|c_i|`.
pub const WITNESS_RESIDUAL_TOLERANCE: f64 = 1e-8;

const CANDIDATE_CHUNK: usize = 64;
const RANDOM_DENOMINATOR_BITS: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SearchBudget {
    /// Candidates tried per slice degree.
    pub max_candidates: usize,
    /// Grid coordinates lie in `[-grid_bound, grid_bound]`.
    pub grid_bound: i64,
    /// Grid points per unit length.
    pub grid_mesh: i64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_candidates: 2000,
            grid_bound: 3,
            grid_mesh: 1,
            seed: 0,
        }
    }
}

/// Hankel matrix `(a_{i+j})` of size `(k+1) x (n-k+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalecticant {
    pub k: usize,
    pub matrix: QMatrix,
}

pub fn catalecticant(f: &BinaryForm, k: usize) -> Result<Catalecticant> {
    let n = f.degree();
    if k < 1 || k + 1 > n {
        return Err(Error::Invalid(format!(
            "catalecticant index {k} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let a = f.binomial_scaled();
    let rows = (0..=k)
        .map(|i| (0..=n - k).map(|j| a[i + j].clone()).collect())
        .collect();
    Ok(Catalecticant {
        k,
        matrix: QMatrix::from_rows(rows),
    })
}

/// Largest catalecticant rank, a lower bound for the complex rank.
pub fn catalecticant_bound(f: &BinaryForm) -> Result<usize> {
    f.require_nonzero("catalecticant_bound")?;
    let n = f.degree();
    if n < 2 {
        return Ok(1);
    }
    (1..n)
        .map(|k| catalecticant(f, k).map(|c| c.matrix.rank()))
        .try_fold(0, |m, r| r.map(|r| m.max(r)))
}

/// Basis of the degree-`r` forms `g` with `g(d/dx, d/dy) f = 0`.
pub fn apolar_slice(f: &BinaryForm, r: usize) -> Result<Vec<BinaryForm>> {
    let n = f.degree();
    if r < 1 || r > n {
        return Err(Error::Invalid(format!("apolar slice degree {r} outside 1..={n}")));
    }
    // Column j holds the coefficients of d_x^{r-j} d_y^j f.
    let images: Vec<BinaryForm> = (0..=r)
        .map(|j| {
            let mut mono = vec![Q::zero(); r + 1];
            mono[j] = Q::one();
            f.apply_operator(&BinaryForm::new(mono).expect("nonempty"))
        })
        .collect();
    let rows = (0..=n - r)
        .map(|i| images.iter().map(|g| g.coeff(i).clone()).collect())
        .collect();
    Ok(QMatrix::from_rows(rows)
        .null_space()
        .into_iter()
        .map(|v| BinaryForm::new(v).expect("nonempty"))
        .collect())
}

/// First generator of the apolar ideal.
#[derive(Clone, Debug)]
struct ApolarStructure {
    d1: usize,
    d2: usize,
    /// The generator, when the slice in degree `d1` is one-dimensional.
    g1: Option<BinaryForm>,
}

fn apolar_structure(f: &BinaryForm) -> Result<ApolarStructure> {
    let n = f.degree();
    for r in 1..=n {
        let slice = apolar_slice(f, r)?;
        if slice.is_empty() {
            continue;
        }
        let g1 = (slice.len() == 1).then(|| slice[0].clone());
        return Ok(ApolarStructure {
            d1: r,
            d2: n + 2 - r,
            g1,
        });
    }
    unreachable!("the degree-n slice of a nonzero form is n-dimensional")
}

fn is_squarefree_form(g: &BinaryForm) -> Result<bool> {
    if g.is_zero() {
        return Ok(false);
    }
    if g.degree() < 2 {
        return Ok(true);
    }
    Ok(!resultant_gradient(g)?.is_zero())
}

/// Complex Waring rank by Sylvester's algorithm.
pub fn complex_rank(f: &BinaryForm) -> Result<usize> {
    f.require_nonzero("complex_rank")?;
    if f.degree() == 0 {
        return Ok(1);
    }
    let s = apolar_structure(f)?;
    match &s.g1 {
        // two independent generators in the same degree: a generic member is square-free
        None => Ok(s.d1),
        Some(g1) if is_squarefree_form(g1)? => Ok(s.d1),
        Some(_) => Ok(s.d2),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Q),
    Approx(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(v) => to_f64(v),
            Scalar::Approx(v) => *v,
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(v) => s.serialize_str(&v.to_string()),
            Scalar::Approx(v) => s.serialize_f64(*v),
        }
    }
}

/// One summand `lambda * (alpha x + beta y)^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaringTerm {
    pub lambda: Scalar,
    pub alpha: Scalar,
    pub beta: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Decomposition {
    pub terms: Vec<WaringTerm>,
    pub exact: bool,
    /// Max coefficient deviation over the largest `|c_i|`.
    pub residual: f64,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact reconstruction; `None` for numeric witnesses.
    pub fn reconstruct_exact(&self, n: usize) -> Option<BinaryForm> {
        let mut acc = BinaryForm::zero(n);
        for t in &self.terms {
            match (&t.lambda, &t.alpha, &t.beta) {
                (Scalar::Exact(l), Scalar::Exact(a), Scalar::Exact(b)) => {
                    acc = acc.add(&BinaryForm::linear_power(a, b, n).scale(l));
                }
                _ => return None,
            }
        }
        Some(acc)
    }

    pub fn reconstruct_f64(&self, n: usize) -> Vec<f64> {
        let binom: Vec<f64> = (0..=n)
            .map(|k| num_integer::binomial(n as u64, k as u64) as f64)
            .collect();
        let mut out = vec![0.0; n + 1];
        for t in &self.terms {
            let (l, a, b) = (t.lambda.to_f64(), t.alpha.to_f64(), t.beta.to_f64());
            for (k, o) in out.iter_mut().enumerate() {
                *o += l * binom[k] * a.powi((n - k) as i32) * b.powi(k as i32);
            }
        }
        out
    }

    pub fn residual_against(&self, f: &BinaryForm) -> f64 {
        let target = f.to_f64_coeffs();
        let scale = target.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let got = self.reconstruct_f64(f.degree());
        let dev = got
            .iter()
            .zip(&target)
            .fold(0.0f64, |m, (g, t)| m.max((g - t).abs()));
        if scale == 0.0 {
            dev
        } else {
            dev / scale
        }
    }
}

/// Writes `f` as a sum of `deg g` powers of the linear forms dual to the
/// real roots of an apolar form `g`.
pub fn decompose_from_apolar(f: &BinaryForm, g: &BinaryForm) -> Result<Decomposition> {
    f.require_nonzero("decompose_from_apolar")?;
    g.require_nonzero("decompose_from_apolar")?;
    let n = f.degree();
    let r = g.degree();
    if r == 0 || r > n {
        return Err(Error::Invalid(format!(
            "apolar form degree {r} must lie in 1..={n}"
        )));
    }
    if !f.apply_operator(g).is_zero() {
        return Err(Error::NotApolar);
    }
    if !has_n_distinct_real_roots(g)? {
        let rc = crate::roots::count_projective_real_roots(g)?;
        return Err(Error::ApolarRoots {
            expected: r,
            found: rc.distinct_real_projective,
            squarefree: rc.is_squarefree_over_c,
        });
    }
    let points = projective_root_points(g, &Q::new(BigInt::one(), BigInt::one() << 96usize))?;
    let all_exact = points.iter().all(|(_, e)| *e);
    let columns: Vec<BinaryForm> = points
        .iter()
        .map(|((a, b), _)| BinaryForm::linear_power(a, b, n))
        .collect();
    let mut m = QMatrix::zeros(n + 1, r);
    for (j, col) in columns.iter().enumerate() {
        for i in 0..=n {
            m.set(i, j, col.coeff(i).clone());
        }
    }
    let rhs = f.coeffs().to_vec();
    let lambdas = if all_exact {
        m.solve_unique(&rhs)
    } else {
        m.solve_least_squares(&rhs)
    }
    .ok_or(Error::SingularSolve)?;

    let terms = points
        .iter()
        .zip(lambdas)
        .map(|(((a, b), _), l)| {
            if all_exact {
                WaringTerm {
                    lambda: Scalar::Exact(l),
                    alpha: Scalar::Exact(a.clone()),
                    beta: Scalar::Exact(b.clone()),
                }
            } else {
                // unit-length linear forms keep the float reconstruction tame
                let (af, bf) = (to_f64(a), to_f64(b));
                let s = af.hypot(bf);
                WaringTerm {
                    lambda: Scalar::Approx(to_f64(&l) * s.powi(n as i32)),
                    alpha: Scalar::Approx(af / s),
                    beta: Scalar::Approx(bf / s),
                }
            }
        })
        .collect();
    let mut d = Decomposition {
        terms,
        exact: all_exact,
        residual: 0.0,
    };
    if all_exact {
        if d.reconstruct_exact(n).as_ref() != Some(f) {
            return Err(Error::SingularSolve);
        }
    } else {
        d.residual = d.residual_against(f);
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    CorollaryTopRank,
    ApolarSearch,
    CatalecticantOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RankCertificate {
    pub degree: usize,
    pub complex_lower: usize,
    pub complex_exact: Option<usize>,
    pub real_lower: usize,
    pub real_upper: usize,
    pub real_exact: Option<usize>,
    pub witness: Option<Decomposition>,
    pub method: RankMethod,
    /// `(real_lower, real_upper)` after each refinement step.
    pub bound_history: Vec<(usize, usize)>,
    pub candidates_tried: usize,
}

impl RankCertificate {
    fn tighten(&mut self, lower: Option<usize>, upper: Option<usize>) {
        if let Some(l) = lower {
            self.real_lower = self.real_lower.max(l);
        }
        if let Some(u) = upper {
            self.real_upper = self.real_upper.min(u);
        }
        self.bound_history.push((self.real_lower, self.real_upper));
        self.real_exact = (self.real_lower == self.real_upper).then_some(self.real_lower);
    }
}

/// Grid shells of increasing max-norm, then seeded random vectors; each
/// vector is reported once up to sign and common factors.
fn candidate_vectors(dim: usize, budget: &SearchBudget, stream: u64) -> impl Iterator<Item = Vec<BigInt>> {
    let limit = (budget.grid_bound * budget.grid_mesh).max(1);
    let grid_cap = budget.max_candidates / 2;
    let grid = (1..=limit)
        .flat_map(move |h| shell(dim, h))
        .take(grid_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    rng.set_stream(stream);
    let span = budget.grid_bound.max(1) << RANDOM_DENOMINATOR_BITS;
    let random = std::iter::repeat_with(move || {
        (0..dim)
            .map(|_| BigInt::from(rng.random_range(-span..=span)))
            .collect::<Vec<_>>()
    })
    .filter(|v| v.iter().any(|c| !c.is_zero()));
    grid.chain(random).take(budget.max_candidates)
}

/// Integer vectors with max-norm `h`, first nonzero entry positive and
/// coprime entries.
fn shell(dim: usize, h: i64) -> impl Iterator<Item = Vec<BigInt>> {
    let side = (2 * h + 1) as u64;
    let total = side.checked_pow(dim as u32).unwrap_or(u64::MAX);
    (0..total).filter_map(move |mut idx| {
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            v.push((idx % side) as i64 - h);
            idx /= side;
        }
        v.reverse();
        let first = v.iter().find(|c| **c != 0)?;
        if *first < 0 || v.iter().map(|c| c.abs()).max() != Some(h) {
            return None;
        }
        let g = v.iter().fold(0i64, |g, c| num_integer::gcd(g, *c));
        (g == 1).then(|| v.into_iter().map(BigInt::from).collect())
    })
}

fn combine(basis: &[BinaryForm], v: &[BigInt]) -> BinaryForm {
    let mut acc = BinaryForm::zero(basis[0].degree());
    for (b, c) in basis.iter().zip(v) {
        if !c.is_zero() {
            acc = acc.add(&b.scale(&Q::from_integer(c.clone())));
        }
    }
    acc
}

/// Searches the degree-`r` apolar slice for a form with `r` distinct real
/// roots. The first hit in candidate order wins, independent of threading.
pub fn search_real_apolar(
    f: &BinaryForm,
    r: usize,
    budget: &SearchBudget,
) -> Result<(Option<BinaryForm>, usize)> {
    let basis = apolar_slice(f, r)?;
    if basis.is_empty() {
        return Ok((None, 0));
    }
    let accept = |g: &BinaryForm| !g.is_zero() && has_n_distinct_real_roots(g).unwrap_or(false);
    if basis.len() == 1 {
        return Ok((accept(&basis[0]).then(|| basis[0].clone()), 1));
    }
    let mut tried = 0;
    let mut iter = candidate_vectors(basis.len(), budget, r as u64);
    loop {
        let chunk: Vec<Vec<BigInt>> = iter.by_ref().take(CANDIDATE_CHUNK).collect();
        if chunk.is_empty() {
            return Ok((None, tried));
        }
        let hit = chunk
            .par_iter()
            .map(|v| combine(&basis, v))
            .position_first(|g| accept(&g));
        match hit {
            Some(i) => {
                tried += i + 1;
                return Ok((Some(combine(&basis, &chunk[i])), tried));
            }
            None => tried += chunk.len(),
        }
    }
}

/// Certified bounds on the real Waring rank of a square-free form.
pub fn real_rank(f: &BinaryForm, budget: &SearchBudget) -> Result<RankCertificate> {
    f.require_nonzero("real_rank")?;
    f.require_degree("real_rank", 1, ">= 1")?;
    if !is_squarefree_form(f)? {
        return Err(Error::NotSquareFree);
    }
    let n = f.degree();
    let complex_lower = catalecticant_bound(f)?;
    let complex = complex_rank(f)?;
    let structure = apolar_structure(f)?;
    let mut cert = RankCertificate {
        degree: n,
        complex_lower,
        complex_exact: Some(complex),
        real_lower: complex,
        real_upper: n,
        real_exact: None,
        witness: None,
        method: RankMethod::CatalecticantOnly,
        bound_history: vec![(complex, n)],
        candidates_tried: 0,
    };
    cert.real_exact = (complex == n).then_some(n);

    if n >= 3 {
        if has_n_distinct_real_roots(f)? {
            cert.tighten(Some(n), None);
            cert.method = RankMethod::CorollaryTopRank;
            return Ok(cert);
        }
        cert.tighten(None, Some(n - 1));
    }

    // Below d2 the slice is g1 * (forms of degree r - d1).
    if let Some(g1) = &structure.g1 {
        if !has_n_distinct_real_roots(g1)? && structure.d2 > cert.real_lower {
            cert.tighten(Some(structure.d2.min(cert.real_upper)), None);
        }
    }

    for r in cert.real_lower..=cert.real_upper {
        let (hit, tried) = search_real_apolar(f, r, budget)?;
        cert.candidates_tried += tried;
        if let Some(g) = hit {
            let witness = decompose_from_apolar(f, &g)?;
            cert.tighten(None, Some(r));
            cert.witness = Some(witness);
            cert.method = RankMethod::ApolarSearch;
            break;
        }
    }
    Ok(cert)
}

/// Searches for a witness of the given length; used for top-rank forms where
/// the certificate itself needs none.
pub fn find_real_witness(
    f: &BinaryForm,
    r: usize,
    budget: &SearchBudget,
) -> Result<Option<Decomposition>> {
    match search_real_apolar(f, r, budget)? {
        (Some(g), _) => decompose_from_apolar(f, &g).map(Some),
        (None, _) => Ok(None),
    }
}

/// Sampling helper for tests and experiments: a uniformly random rational
/// in `[-bound, bound]` with denominator `2^bits`.
pub fn random_dyadic(rng: &mut impl Rng, bound: i64, bits: u32) -> Q {
    let span = bound << bits;
    Q::new(BigInt::from(rng.random_range(-span..=span)), BigInt::from(1i64 << bits))
}
