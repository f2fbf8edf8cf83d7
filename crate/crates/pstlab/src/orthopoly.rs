//! Dense polynomial arithmetic for the three-term recurrence attached to a
//! symmetric tridiagonal matrix:
//!
//! - forward recurrence from diagonal/off-diagonal entries,
//! - monic characteristic polynomial from its roots,
//! - the signed endpoint interpolant (values alternating between -1 and 1),
//! - the Euclidean division step that walks the recurrence backwards and
//!   recovers diagonal entries and squared weights.
//!
//! Everything is generic over the coefficient field so the same code runs in
//! exact rational arithmetic (certificates) and in f64 (numerical checks).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::hamiltonian::HamiltonianKind;

/// Coefficient field: exact rationals or f64.
pub trait Coeff:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn approx(&self) -> f64;
}

impl Coeff for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn approx(&self) -> f64 {
        *self
    }
}

impl Coeff for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        num_traits::Signed::is_positive(self)
    }
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrthoPolyError {
    #[error("off-diagonal weight at index {0} is not strictly positive")]
    NonPositiveOffdiag(usize),
    #[error("signed interpolation is degenerate: {0}")]
    DegenerateInterpolation(String),
    #[error("euclidean step {step} produced a non-positive squared weight")]
    NegativeWeightSquared { step: usize },
    #[error("euclidean step {step} dropped degree (zero squared weight)")]
    DegreeDrop { step: usize },
}

/// Dense polynomial, constant term first. The empty list is the zero
/// polynomial; otherwise the last coefficient is nonzero.
#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<T: Coeff> Poly<T> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// The monomial x.
    pub fn x() -> Self {
        Self::from_coeffs(vec![T::zero(), T::one()])
    }

    /// Build from a dense coefficient list (constant first), trimming
    /// trailing zeros.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == T::one())
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn div_scalar(&self, c: &T) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() / c.clone()).collect())
    }

    /// Multiply by x.
    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(T::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Synthetic division by (x - a): returns (quotient, remainder).
    pub fn divide_linear(&self, a: &T) -> (Self, T) {
        if self.is_zero() {
            return (Self::zero(), T::zero());
        }
        let mut quotient = vec![T::zero(); self.coeffs.len() - 1];
        let mut carry = T::zero();
        for k in (0..self.coeffs.len()).rev() {
            let value = self.coeffs[k].clone() + carry.clone() * a.clone();
            if k == 0 {
                return (Self::from_coeffs(quotient), value);
            }
            quotient[k - 1] = value.clone();
            carry = value;
        }
        unreachable!()
    }

    /// Monic multiple: divide by the leading coefficient.
    pub fn monic(&self) -> Option<Self> {
        self.leading().cloned().map(|l| self.div_scalar(&l))
    }

    fn magnitude(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.approx().abs())
            .fold(0.0, f64::max)
    }
}

/// Monic polynomial with exactly the given roots.
pub fn from_roots<T: Coeff>(roots: &[T]) -> Poly<T> {
    let mut p = Poly::one();
    for root in roots {
        p = p.mul(&Poly::from_coeffs(vec![-root.clone(), T::one()]));
    }
    p
}

/// The recurrence polynomials p_0..p_n of a tridiagonal matrix together with
/// the diagonal similarity scalings d_1..d_n.
#[derive(Clone, Debug)]
pub struct OrthoPolySeq<T: Coeff> {
    polys: Vec<Poly<T>>,
    scalings: Vec<T>,
    kind: HamiltonianKind,
}

impl<T: Coeff> OrthoPolySeq<T> {
    /// Matrix order n (the sequence holds p_0..p_n).
    pub fn order(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    /// p_k for k in 0..=n.
    pub fn poly(&self, k: usize) -> &Poly<T> {
        &self.polys[k]
    }

    /// The characteristic polynomial p_n.
    pub fn charpoly(&self) -> &Poly<T> {
        self.polys.last().expect("sequence is never empty")
    }

    /// d_{k+1} for k in 0..n, so `scaling(k)` matches `poly(k)`.
    pub fn scaling(&self, k: usize) -> &T {
        &self.scalings[k]
    }

    pub fn scalings(&self) -> &[T] {
        &self.scalings
    }

    /// Scaled evaluation d_{k+1} * p_k(x) for k in 0..n.
    pub fn signed_eval(&self, k: usize, x: &T) -> T {
        self.scalings[k].clone() * self.polys[k].eval(x)
    }
}

/// Run the three-term recurrence p_k = (x - q_k) p_{k-1} - r_{k-1}^2 p_{k-2}
/// forward from the matrix entries. The roots of p_n are the eigenvalues.
pub fn recurrence_forward<T: Coeff>(
    kind: HamiltonianKind,
    q: &[T],
    r: &[T],
) -> Result<OrthoPolySeq<T>, OrthoPolyError> {
    assert_eq!(q.len(), r.len() + 1, "need n diagonal and n-1 off-diagonal entries");
    for (j, w) in r.iter().enumerate() {
        if !w.is_positive() {
            return Err(OrthoPolyError::NonPositiveOffdiag(j + 1));
        }
    }

    let n = q.len();
    let mut polys = Vec::with_capacity(n + 1);
    polys.push(Poly::one());
    for k in 1..=n {
        let x_minus_q = Poly::from_coeffs(vec![-q[k - 1].clone(), T::one()]);
        let mut next = x_minus_q.mul(&polys[k - 1]);
        if k >= 2 {
            let r_sq = r[k - 2].clone() * r[k - 2].clone();
            next = next.sub(&polys[k - 2].scale(&r_sq));
        }
        polys.push(next);
    }

    let mut scalings = Vec::with_capacity(n);
    scalings.push(T::one());
    for w in r {
        let prev = scalings.last().cloned().expect("non-empty");
        let next = match kind {
            HamiltonianKind::Adjacency => prev / w.clone(),
            HamiltonianKind::Laplacian => -(prev / w.clone()),
        };
        scalings.push(next);
    }

    Ok(OrthoPolySeq { polys, scalings, kind })
}

/// The unique polynomial of degree <= n-1 taking the value (-1)^(n+r) at the
/// r-th root (1-based, roots ascending). For a spectrum realizable as a
/// mirror-symmetric chain its leading coefficient is d_n > 0.
pub fn interpolate_signed<T: Coeff>(roots: &[T]) -> Result<Poly<T>, OrthoPolyError> {
    let n = roots.len();
    if n == 0 {
        return Err(OrthoPolyError::DegenerateInterpolation(
            "no interpolation nodes".into(),
        ));
    }
    for w in roots.windows(2) {
        if w[0] == w[1] {
            return Err(OrthoPolyError::DegenerateInterpolation(
                "repeated interpolation node".into(),
            ));
        }
    }

    let node_poly = from_roots(roots);
    let mut result = Poly::zero();
    let mut weight_scale = 0.0f64;
    for (idx, root) in roots.iter().enumerate() {
        // basis = node_poly / (x - root), monic of degree n-1
        let (basis, _) = node_poly.divide_linear(root);
        let denom = basis.eval(root);
        if denom.is_zero() {
            return Err(OrthoPolyError::DegenerateInterpolation(
                "coincident interpolation nodes".into(),
            ));
        }
        // sign (-1)^(n+r) with r = idx + 1
        let sign = if (n + idx + 1) % 2 == 0 { T::one() } else { -T::one() };
        let weight = sign / denom;
        weight_scale += weight.approx().abs();
        result = result.add(&basis.scale(&weight));
    }

    let leading = result.coeff(n - 1);
    let degenerate = if T::EXACT {
        leading.is_zero() || !leading.is_positive()
    } else {
        !(leading.approx() > 1e-12 * weight_scale.max(f64::MIN_POSITIVE))
    };
    if degenerate {
        return Err(OrthoPolyError::DegenerateInterpolation(format!(
            "leading coefficient {:?} is not positive; no mirror-symmetric chain realizes these values",
            leading
        )));
    }
    Ok(result)
}

/// One backward step of the Euclidean reconstruction: given monic p_k and
/// p_{k-1}, recover q_k, r_{k-1}^2, and monic p_{k-2} from
/// p_{k-2} = ((x - q_k) p_{k-1} - p_k) / r_{k-1}^2.
pub fn euclidean_step<T: Coeff>(
    p_k: &Poly<T>,
    p_km1: &Poly<T>,
) -> Result<(T, T, Poly<T>), OrthoPolyError> {
    let k = p_k.degree().expect("p_k must be nonzero");
    assert!(k >= 2, "euclidean_step needs degree >= 2");
    assert_eq!(p_km1.degree(), Some(k - 1), "degrees must be consecutive");
    assert!(p_k.is_monic() && p_km1.is_monic(), "inputs must be monic");

    // x p_{k-1} - p_k has degree <= k-1 (the x^k terms cancel exactly)
    let s = p_km1.mul_x().sub(p_k);
    let q_k = s.coeff(k - 1);
    // subtracting q_k p_{k-1} cancels x^(k-1) exactly since p_{k-1} is monic
    let remainder = s.sub(&p_km1.scale(&q_k));
    let r_sq = remainder.coeff(k - 2);

    let dropped = if T::EXACT {
        r_sq.is_zero()
    } else {
        r_sq.approx().abs() <= 1e-12 * (1.0 + p_k.magnitude())
    };
    if dropped {
        return Err(OrthoPolyError::DegreeDrop { step: k });
    }
    if !r_sq.is_positive() {
        return Err(OrthoPolyError::NegativeWeightSquared { step: k });
    }

    let p_km2 = remainder.div_scalar(&r_sq);
    Ok((q_k, r_sq, p_km2))
}
