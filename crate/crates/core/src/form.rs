//! Exact binary forms `f = sum_i c_i x^(n-i) y^i` and their calculus.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{q, to_f64, UniPoly, Q};

/// A real homogeneous polynomial in `x` and `y` with rational coefficients,
/// stored in the monomial basis with descending powers of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<Q>,
}

/// The linear form `alpha*x + beta*y`, never identically zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    alpha: Q,
    beta: Q,
}

impl LinearForm {
    pub fn new(alpha: Q, beta: Q) -> Result<Self> {
        if alpha.is_zero() && beta.is_zero() {
            return Err(Error::ZeroLinearForm);
        }
        Ok(LinearForm { alpha, beta })
    }

    pub fn from_ints(alpha: i64, beta: i64) -> Result<Self> {
        Self::new(q(alpha), q(beta))
    }

    pub fn alpha(&self) -> &Q {
        &self.alpha
    }

    pub fn beta(&self) -> &Q {
        &self.beta
    }

    pub fn to_form(&self) -> BinaryForm {
        BinaryForm {
            coeffs: vec![self.alpha.clone(), self.beta.clone()],
        }
    }
}

/// Linear substitution `x -> m11 x + m12 y`, `y -> m21 x + m22 y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub m: [[Q; 2]; 2],
}

impl Substitution {
    pub fn new(m11: Q, m12: Q, m21: Q, m22: Q) -> Self {
        Substitution {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn from_ints(m11: i64, m12: i64, m21: i64, m22: i64) -> Self {
        Self::new(q(m11), q(m12), q(m21), q(m22))
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    pub fn determinant(&self) -> Q {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    /// Matrix product `self * other`; substituting `self` then `other` is the
    /// same as substituting the product.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let a = &self.m;
        let b = &other.m;
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        Substitution::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

/// Result of setting `y = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dehomogenized {
    pub poly: UniPoly,
    /// Multiplicity of the projective root `(1:0)`.
    pub degree_drop: usize,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Q>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::CoefficientLength {
                len: 0,
                expected: 1,
            });
        }
        Ok(BinaryForm { coeffs })
    }

    /// Builds a form after checking the coefficient count against `degree`.
    pub fn with_degree(degree: usize, coeffs: Vec<Q>) -> Result<Self> {
        if coeffs.len() != degree + 1 {
            return Err(Error::CoefficientLength {
                len: coeffs.len(),
                expected: degree + 1,
            });
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        assert!(!coeffs.is_empty());
        BinaryForm {
            coeffs: coeffs.iter().map(|&c| q(c)).collect(),
        }
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm {
            coeffs: vec![Q::zero(); degree + 1],
        }
    }

    /// `(alpha x + beta y)^n`.
    pub fn linear_power(alpha: &Q, beta: &Q, n: usize) -> Self {
        let coeffs = (0..=n)
            .map(|i| {
                Q::from_integer(binomial(BigInt::from(n), BigInt::from(i)))
                    * pow(alpha, n - i)
                    * pow(beta, i)
            })
            .collect();
        BinaryForm { coeffs }
    }

    /// Product of the linear forms `a_k x + b_k y`.
    pub fn product_of_linear(factors: &[(Q, Q)]) -> Self {
        factors.iter().fold(BinaryForm::from_ints(&[1]), |acc, (a, b)| {
            acc.mul(&BinaryForm {
                coeffs: vec![a.clone(), b.clone()],
            })
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Q {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub(crate) fn require_nonzero(&self, op: &'static str) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroForm(op))
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_degree(
        &self,
        op: &'static str,
        min: usize,
        requirement: &'static str,
    ) -> Result<()> {
        if self.degree() < min {
            Err(Error::Degree {
                op,
                requirement,
                actual: self.degree(),
            })
        } else {
            Ok(())
        }
    }

    /// Binomial-scaled coefficients `a_i = c_i / C(n, i)`.
    pub fn binomial_scaled(&self) -> Vec<Q> {
        let n = BigInt::from(self.degree());
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c / Q::from_integer(binomial(n.clone(), BigInt::from(i))))
            .collect()
    }

    pub fn from_binomial_scaled(a: &[Q]) -> Self {
        let n = BigInt::from(a.len() - 1);
        BinaryForm {
            coeffs: a
                .iter()
                .enumerate()
                .map(|(i, ai)| ai * Q::from_integer(binomial(n.clone(), BigInt::from(i))))
                .collect(),
        }
    }

    pub fn evaluate(&self, x: &Q, y: &Q) -> Q {
        let n = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * pow(x, n - i) * pow(y, i))
            .fold(Q::zero(), |a, b| a + b)
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let n = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| to_f64(c) * x.powi((n - i) as i32) * y.powi(i as i32))
            .sum()
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn partial_x(&self) -> Result<BinaryForm> {
        self.require_degree("partial_x", 1, ">= 1")?;
        let n = self.degree();
        Ok(BinaryForm {
            coeffs: (0..n)
                .map(|i| &self.coeffs[i] * q((n - i) as i64))
                .collect(),
        })
    }

    pub fn partial_y(&self) -> Result<BinaryForm> {
        self.require_degree("partial_y", 1, ">= 1")?;
        let n = self.degree();
        Ok(BinaryForm {
            coeffs: (1..=n).map(|i| &self.coeffs[i] * q(i as i64)).collect(),
        })
    }

    /// `alpha f_x + beta f_y`.
    pub fn directional_derivative(&self, d: &LinearForm) -> Result<BinaryForm> {
        self.require_degree("directional_derivative", 1, ">= 1")?;
        let fx = self.partial_x()?;
        let fy = self.partial_y()?;
        Ok(fx.scale(&d.alpha).add(&fy.scale(&d.beta)))
    }

    /// Applies the constant-coefficient operator `op(d/dx, d/dy)` to `self`.
    /// Returns the zero form of degree 0 when `op` has higher degree.
    pub fn apply_operator(&self, op: &BinaryForm) -> BinaryForm {
        let n = self.degree();
        let r = op.degree();
        if r > n {
            return BinaryForm::zero(0);
        }
        let mut acc = BinaryForm::zero(n - r);
        for (j, b) in op.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let mut g = self.clone();
            for _ in 0..(r - j) {
                g = g.partial_x().expect("degree checked");
            }
            for _ in 0..j {
                g = g.partial_y().expect("degree checked");
            }
            acc = acc.add(&g.scale(b));
        }
        acc
    }

    pub fn change_coordinates(&self, m: &Substitution) -> Result<BinaryForm> {
        if m.determinant().is_zero() {
            return Err(Error::SingularMatrix);
        }
        let n = self.degree();
        let lx = [m.m[0][0].clone(), m.m[0][1].clone()];
        let ly = [m.m[1][0].clone(), m.m[1][1].clone()];
        let lx_pows = linear_powers(&lx, n);
        let ly_pows = linear_powers(&ly, n);
        let mut acc = BinaryForm::zero(n);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&lx_pows[n - i].mul(&ly_pows[i]).scale(c));
        }
        Ok(acc)
    }

    /// Swaps the roles of `x` and `y`.
    pub fn swap_xy(&self) -> BinaryForm {
        BinaryForm {
            coeffs: self.coeffs.iter().rev().cloned().collect(),
        }
    }

    pub fn dehomogenize(&self) -> Result<Dehomogenized> {
        self.require_nonzero("dehomogenize")?;
        let n = self.degree();
        let degree_drop = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        // coefficient of x^k in f(x, 1) is c_{n-k}
        let poly = UniPoly::new((0..=n).map(|k| self.coeffs[n - k].clone()).collect());
        Ok(Dehomogenized { poly, degree_drop })
    }

    /// `y^n p(x/y)`; requires `deg p <= n`.
    pub fn homogenize(p: &UniPoly, n: usize) -> BinaryForm {
        assert!(p.degree().is_none_or(|d| d <= n));
        let coeffs = (0..=n)
            .map(|i| p.coeffs().get(n - i).cloned().unwrap_or_else(Q::zero))
            .collect();
        BinaryForm { coeffs }
    }

    /// `f_xx f_yy - f_xy^2`, a form of degree `2n - 4`.
    pub fn hessian(&self) -> Result<BinaryForm> {
        self.require_degree("hessian", 2, ">= 2")?;
        let fx = self.partial_x()?;
        let fy = self.partial_y()?;
        let fxx = fx.partial_x()?;
        let fxy = fx.partial_y()?;
        let fyy = fy.partial_y()?;
        Ok(fxx.mul(&fyy).sub(&fxy.mul(&fxy)))
    }

    pub fn scale(&self, s: &Q) -> BinaryForm {
        BinaryForm {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Sum of two forms of the same degree.
    pub fn add(&self, other: &BinaryForm) -> BinaryForm {
        assert_eq!(self.degree(), other.degree(), "adding forms of different degree");
        BinaryForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &BinaryForm) -> BinaryForm {
        self.add(&other.scale(&q(-1)))
    }

    pub fn mul(&self, other: &BinaryForm) -> BinaryForm {
        let mut coeffs = vec![Q::zero(); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        BinaryForm { coeffs }
    }

    pub fn pow(&self, k: usize) -> BinaryForm {
        (0..k).fold(BinaryForm::from_ints(&[1]), |acc, _| acc.mul(self))
    }
}

fn pow(base: &Q, e: usize) -> Q {
    let mut out = Q::one();
    for _ in 0..e {
        out *= base;
    }
    out
}

fn linear_powers(l: &[Q; 2], n: usize) -> Vec<BinaryForm> {
    let lf = BinaryForm {
        coeffs: vec![l[0].clone(), l[1].clone()],
    };
    let mut out = vec![BinaryForm::from_ints(&[1])];
    for k in 1..=n {
        out.push(out[k - 1].mul(&lf));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    degree: usize,
    coeffs: Vec<String>,
}

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormRepr {
            degree: self.degree(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BinaryForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FormRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        BinaryForm::with_degree(repr.degree, coeffs).map_err(D::Error::custom)
    }
}

/// Parses `a` or `a/b` with integer `a`, `b`; decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::Invalid(format!("`{s}` is not a rational of the form a or a/b"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (t, None),
    };
    let n = BigInt::from_str(num).map_err(|_| bad())?;
    let d = match den {
        Some(b) => BigInt::from_str(b).map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qf;

    fn f(c: &[i64]) -> BinaryForm {
        BinaryForm::from_ints(c)
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(f(&[1, 0, 0, 1]).evaluate(&q(1), &q(1)), q(2));
        assert_eq!(f(&[0, 1, 1, 0]).evaluate(&q(1), &q(0)), q(0));
        assert_eq!(f(&[1, -6, 12, -8]).evaluate(&q(2), &q(1)), q(0));
    }

    #[test]
    fn partials() {
        assert_eq!(f(&[1, 0, 0, 1]).partial_x().unwrap(), f(&[3, 0, 0]));
        assert_eq!(f(&[0, 1, 1, 0]).partial_y().unwrap(), f(&[1, 2, 0]));
        assert_eq!(f(&[0, 1, 1, 0]).partial_x().unwrap(), f(&[0, 2, 1]));
        assert!(matches!(f(&[5]).partial_x(), Err(Error::Degree { .. })));
    }

    #[test]
    fn directional() {
        let cube = f(&[1, 0, 0, 1]);
        let d10 = LinearForm::from_ints(1, 0).unwrap();
        let d11 = LinearForm::from_ints(1, 1).unwrap();
        assert_eq!(cube.directional_derivative(&d10).unwrap(), f(&[3, 0, 0]));
        assert_eq!(cube.directional_derivative(&d11).unwrap(), f(&[3, 0, 3]));
        let g = f(&[0, 1, 1, 0]);
        let d = LinearForm::from_ints(1, -1).unwrap();
        let got = g.directional_derivative(&d).unwrap();
        assert_eq!(got, f(&[-1, 0, 1]));
        // evaluate both sides at three points
        for (x, y) in [(1, 2), (-3, 1), (2, 5)] {
            let (x, y) = (q(x), q(y));
            let lhs = g.partial_x().unwrap().evaluate(&x, &y) - g.partial_y().unwrap().evaluate(&x, &y);
            assert_eq!(got.evaluate(&x, &y), lhs);
        }
        assert_eq!(LinearForm::from_ints(0, 0), Err(Error::ZeroLinearForm));
    }

    #[test]
    fn coordinate_changes() {
        let cube = f(&[1, 0, 0, 0]);
        assert_eq!(cube.change_coordinates(&Substitution::identity()).unwrap(), cube);
        let shear = Substitution::from_ints(1, 1, 0, 1);
        assert_eq!(cube.change_coordinates(&shear).unwrap(), f(&[1, 3, 3, 1]));
        assert_eq!(
            cube.change_coordinates(&Substitution::from_ints(1, 2, 2, 4)),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn dehomogenize_examples() {
        let d = f(&[0, 1, 1, 0]).dehomogenize().unwrap();
        assert_eq!(d.poly, UniPoly::from_ints(&[0, 1, 1]));
        assert_eq!(d.degree_drop, 1);
        let d = f(&[1, 0, 0, 1]).dehomogenize().unwrap();
        assert_eq!(d.poly, UniPoly::from_ints(&[1, 0, 0, 1]));
        assert_eq!(d.degree_drop, 0);
        let d = f(&[0, 0, 0, 1]).dehomogenize().unwrap();
        assert_eq!(d.poly, UniPoly::from_ints(&[1]));
        assert_eq!(d.degree_drop, 3);
        assert!(matches!(BinaryForm::zero(3).dehomogenize(), Err(Error::ZeroForm(_))));
    }

    #[test]
    fn hessian_examples() {
        assert_eq!(f(&[0, 1, 1, 0]).hessian().unwrap(), f(&[-4, -4, -4]));
        assert_eq!(f(&[1, 0, 0, 1]).hessian().unwrap(), f(&[0, 36, 0]));
        assert_eq!(f(&[0, 1, 0, 0]).hessian().unwrap(), f(&[-4, 0, 0]));
        assert!(f(&[1, 1]).hessian().is_err());
    }

    #[test]
    fn binomial_scaling_round_trip() {
        let g = f(&[1, 0, -3, 0]);
        assert_eq!(g.binomial_scaled(), vec![q(1), q(0), q(-1), q(0)]);
        assert_eq!(BinaryForm::from_binomial_scaled(&g.binomial_scaled()), g);
    }

    #[test]
    fn operator_application() {
        // (3 dx^2 dy - dy^3) (x^3 - 3 x y^2) = 0
        let g = f(&[1, 0, -3, 0]);
        let op = f(&[0, 3, 0, -1]);
        assert!(g.apply_operator(&op).is_zero());
        // dy x^n = 0
        assert!(f(&[1, 0, 0, 0, 0]).apply_operator(&f(&[0, 1])).is_zero());
    }

    #[test]
    fn linear_power_expansion() {
        assert_eq!(BinaryForm::linear_power(&q(1), &q(-2), 3), f(&[1, -6, 12, -8]));
        assert_eq!(
            BinaryForm::linear_power(&qf(1, 2), &q(0), 2),
            BinaryForm::new(vec![qf(1, 4), q(0), q(0)]).unwrap()
        );
    }

    #[test]
    fn json_repr() {
        let g = BinaryForm::new(vec![q(1), qf(-1, 2), q(0), q(1)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"degree":3,"coeffs":["1","-1/2","0","1"]}"#);
        let back: BinaryForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<BinaryForm>(r#"{"degree":2,"coeffs":["1"]}"#).is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
