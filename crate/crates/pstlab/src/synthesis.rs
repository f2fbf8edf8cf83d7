//! Inverse eigenvalue synthesis of transfer chains from a prescribed
//! spectrum, closed forms for the middle entries and for small orders, and
//! exact number-theoretic certificates: Laplacian chains cannot transfer
//! (order >= 3), and several spectral classes force an irrational weight.
//!
//! All synthesis and certificate arithmetic is exact rational; square roots
//! are taken only when materializing floats for the dynamics layer.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{self, DynamicsError};
use crate::exact::{
    format_ratio, is_perfect_square, is_rational_square, mod_residue, rational_gcd, ratio_to_f64,
};
use crate::hamiltonian::{HamiltonianError, HamiltonianKind, PathHamiltonian};
use crate::orthopoly::{euclidean_step, from_roots, interpolate_signed, OrthoPolyError, Poly};
use crate::rng::CounterRng;
use crate::spectra::{Spectrum, SpectrumError, SpectrumKind, Time};

/// Enumeration cap for the exhaustive Laplacian search.
pub const FALSIFIER_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    OrthoPoly(#[from] OrthoPolyError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("this operation needs exact rational eigenvalues")]
    ExactnessRequired,
    #[error("no positive rescale gives every gap an odd integer value (gap {index})")]
    KayInfeasible { index: usize },
    #[error("even-order middle weight S1/2 = {0} is not positive")]
    S1NonPositive(String),
    #[error("odd-order Laplacian spectra need S2 = 2 S1^2 (S1 = {s1}, S2 = {s2})")]
    LaplacianOddConstraintViolated { s1: String, s2: String },
    #[error("reconstructed chain is not mirror-symmetric")]
    NotPersymmetricResult,
    #[error("spectrum needs potentials: diagonal entry {index} is {value}, not zero")]
    PotentialRequired { index: usize, value: String },
    #[error("reconstructed entries violate the Laplacian row pattern at position {0}")]
    LaplacianStructureViolated(usize),
    #[error("no closed form for order {0} with this kind")]
    UnsupportedN(usize),
    #[error("enumeration would visit {candidates} spectra, over the budget of {budget}")]
    BudgetExceeded { candidates: u64, budget: u64 },
    #[error("exact squared weights are not available")]
    MissingExactData,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

impl SynthesisError {
    /// Stable machine-readable code for reports and exit status mapping.
    pub fn code(&self) -> &'static str {
        match self {
            SynthesisError::Spectrum(SpectrumError::GapNotOddInteger { .. }) => "gap_not_odd_integer",
            SynthesisError::Spectrum(_) => "invalid_spectrum",
            SynthesisError::OrthoPoly(OrthoPolyError::NegativeWeightSquared { .. }) => {
                "negative_weight_squared"
            }
            SynthesisError::OrthoPoly(OrthoPolyError::DegreeDrop { .. }) => "degree_drop",
            SynthesisError::OrthoPoly(_) => "degenerate_interpolation",
            SynthesisError::Hamiltonian(_) => "invalid_hamiltonian",
            SynthesisError::Dynamics(_) => "dynamics_failure",
            SynthesisError::ExactnessRequired => "exactness_required",
            SynthesisError::KayInfeasible { .. } => "kay_infeasible",
            SynthesisError::S1NonPositive(_) => "s1_non_positive",
            SynthesisError::LaplacianOddConstraintViolated { .. } => "laplacian_odd_constraint",
            SynthesisError::NotPersymmetricResult => "not_persymmetric",
            SynthesisError::PotentialRequired { .. } => "potential_required",
            SynthesisError::LaplacianStructureViolated(_) => "laplacian_structure_violated",
            SynthesisError::UnsupportedN(_) => "unsupported_n",
            SynthesisError::BudgetExceeded { .. } => "budget_exceeded",
            SynthesisError::MissingExactData => "missing_exact_data",
            SynthesisError::PreconditionViolated(_) => "precondition_violated",
        }
    }
}

// ---------------------------------------------------------------------------
// middle entries

/// Alternating-sign sums S1 and S2 and the closed-form middle entries they
/// determine for a mirror-symmetric chain.
#[derive(Clone, Debug, Serialize)]
pub struct MiddleEntries {
    #[serde(with = "crate::exact::serde_ratio")]
    pub s1: BigRational,
    #[serde(with = "crate::exact::serde_ratio")]
    pub s2: BigRational,
    #[serde(with = "crate::exact::serde_ratio")]
    pub middle_r_sq: BigRational,
    #[serde(with = "crate::exact::serde_ratio_opt")]
    pub middle_q: Option<BigRational>,
    /// r_{n/2-1} implied by the Laplacian row pattern (even order only)
    #[serde(with = "crate::exact::serde_ratio_opt", skip_serializing_if = "Option::is_none")]
    pub laplacian_inner_r: Option<BigRational>,
}

/// S1 = sum (-1)^(r+n) a_r and S2 = sum (-1)^(r+n) a_r^2, 1-based r.
fn alternating_sums(values: &[BigRational]) -> (BigRational, BigRational) {
    let n = values.len();
    let mut s1 = BigRational::zero();
    let mut s2 = BigRational::zero();
    for (idx, a) in values.iter().enumerate() {
        if (idx + 1 + n) % 2 == 0 {
            s1 += a;
            s2 += a * a;
        } else {
            s1 -= a;
            s2 -= a * a;
        }
    }
    (s1, s2)
}

/// Middle diagonal entry and squared middle weight from S1 and S2:
/// even order r_mid = S1/2, q_mid = S2/(2 S1); odd order q_mid = S1,
/// r_mid^2 = (S2 - S1^2)/4.
fn parity_middle(
    s1: &BigRational,
    s2: &BigRational,
    n: usize,
) -> Result<(BigRational, BigRational), SynthesisError> {
    let two = BigRational::from_integer(2.into());
    let four = BigRational::from_integer(4.into());
    if n % 2 == 0 {
        if !s1.is_positive() {
            return Err(SynthesisError::S1NonPositive(format_ratio(s1)));
        }
        let r_mid = s1 / &two;
        let q_mid = s2 / (&two * s1);
        Ok((q_mid, &r_mid * &r_mid))
    } else {
        let r_sq = (s2 - s1 * s1) / four;
        Ok((s1.clone(), r_sq))
    }
}

/// Closed-form middle entries of the chain realizing an exact spectrum.
pub fn middle_entries(s: &Spectrum) -> Result<MiddleEntries, SynthesisError> {
    let values = s.exact_values().ok_or(SynthesisError::ExactnessRequired)?;
    let n = values.len();
    let (s1, s2) = alternating_sums(values);
    let (middle_q, middle_r_sq) = parity_middle(&s1, &s2, n)?;

    let mut laplacian_inner_r = None;
    if s.kind() == SpectrumKind::Laplacian {
        let two = BigRational::from_integer(2.into());
        if n % 2 == 1 {
            if s2 != &two * &s1 * &s1 {
                return Err(SynthesisError::LaplacianOddConstraintViolated {
                    s1: format_ratio(&s1),
                    s2: format_ratio(&s2),
                });
            }
        } else {
            laplacian_inner_r = Some((&s2 - &s1 * &s1) / (&two * &s1));
        }
    }

    Ok(MiddleEntries {
        middle_q: Some(middle_q),
        middle_r_sq,
        laplacian_inner_r,
        s1,
        s2,
    })
}

// ---------------------------------------------------------------------------
// reconstruction

/// Comparison of the closed-form middle entries against the reconstruction.
#[derive(Clone, Debug, Serialize)]
pub struct MiddleCheck {
    #[serde(with = "crate::exact::serde_ratio")]
    pub s1: BigRational,
    #[serde(with = "crate::exact::serde_ratio")]
    pub s2: BigRational,
    #[serde(with = "crate::exact::serde_ratio")]
    pub middle_q: BigRational,
    #[serde(with = "crate::exact::serde_ratio")]
    pub middle_r_squared: BigRational,
    pub matches: bool,
}

/// Result of a full inverse-eigenvalue reconstruction.
#[derive(Clone, Debug, Serialize)]
pub struct SynthesisReport {
    pub hamiltonian: PathHamiltonian,
    #[serde(rename = "r_squared_exact", with = "crate::exact::serde_ratio_vec")]
    pub r_sq_exact: Vec<BigRational>,
    #[serde(rename = "q_exact", with = "crate::exact::serde_ratio_vec")]
    pub q_exact: Vec<BigRational>,
    pub middle_check: MiddleCheck,
    /// max |computed - target| over the float eigensolver verification
    pub spectrum_residual: f64,
    /// readout time at which the synthesized chain transfers end to end
    pub pst_time: Time,
}

/// The positive rescale turning every gap into an odd integer, if one
/// exists: divide by the rational gcd of the gaps and check oddness.
fn odd_gap_rescale(values: &[BigRational]) -> Result<BigRational, SynthesisError> {
    let gaps: Vec<BigRational> = values.windows(2).map(|w| &w[1] - &w[0]).collect();
    let g = rational_gcd(&gaps).expect("spectra have at least one gap");
    for (idx, gap) in gaps.iter().enumerate() {
        let quotient = gap / &g;
        debug_assert!(quotient.is_integer());
        if quotient.numer().is_even() {
            return Err(SynthesisError::KayInfeasible { index: idx + 1 });
        }
    }
    Ok(g)
}

fn is_even(r: &BigRational) -> bool {
    r.is_integer() && r.numer().is_even()
}

/// Exact Laplacian row-pattern test on reconstructed entries: q_1 = r_1,
/// q_j = r_{j-1} + r_j inside, q_n = r_{n-1}, phrased on squares so no root
/// is ever taken. Returns the first violated position.
fn laplacian_structure_violation(q: &[BigRational], r_sq: &[BigRational]) -> Option<usize> {
    let n = q.len();
    let four = BigRational::from_integer(4.into());
    for j in 0..n {
        let ok = if j == 0 {
            q[0].is_positive() && &q[0] * &q[0] == r_sq[0]
        } else if j == n - 1 {
            q[n - 1].is_positive() && &q[n - 1] * &q[n - 1] == r_sq[n - 2]
        } else {
            // q_j = r_{j-1} + r_j  <=>  q_j > 0, t := q_j^2 - r_{j-1}^2 - r_j^2 > 0,
            // and t^2 = 4 r_{j-1}^2 r_j^2
            let t = &q[j] * &q[j] - &r_sq[j - 1] - &r_sq[j];
            q[j].is_positive()
                && t.is_positive()
                && &t * &t == &four * &r_sq[j - 1] * &r_sq[j]
        };
        if !ok {
            return Some(j + 1);
        }
    }
    None
}

/// Reconstruct the unique mirror-symmetric chain with the prescribed exact
/// spectrum, in exact arithmetic, and verify it numerically.
///
/// The characteristic polynomial is built from the roots, the next
/// polynomial comes from the alternating-sign endpoint interpolant, and
/// repeated Euclidean division walks the recurrence down, recovering every
/// diagonal entry and squared weight.
pub fn reconstruct(s: &Spectrum) -> Result<SynthesisReport, SynthesisError> {
    let values = s.exact_values().ok_or(SynthesisError::ExactnessRequired)?;
    let n = values.len();

    // admissibility: some rescale gives odd integer gaps; transfer then
    // happens at pi * (gap gcd)
    let gap_gcd = odd_gap_rescale(values)?;
    let pst_time = Time::PiMultiple(BigRational::one() / &gap_gcd);

    let p_n = from_roots(values);
    let signed = interpolate_signed(values)?;
    let p_nm1 = signed.monic().expect("signed interpolant is nonzero");

    let mut q_rev: Vec<BigRational> = Vec::with_capacity(n);
    let mut r_sq_rev: Vec<BigRational> = Vec::with_capacity(n - 1);
    let mut p_hi: Poly<BigRational> = p_n;
    let mut p_lo = p_nm1;
    for _ in (2..=n).rev() {
        let (q_k, r_sq, p_next) = euclidean_step(&p_hi, &p_lo)?;
        q_rev.push(q_k);
        r_sq_rev.push(r_sq);
        p_hi = p_lo;
        p_lo = p_next;
    }
    // after stepping k = n..2, p_hi is p_1 = x - q_1
    q_rev.push(-p_hi.coeff(0));
    let q_exact: Vec<BigRational> = q_rev.into_iter().rev().collect();
    let r_sq_exact: Vec<BigRational> = r_sq_rev.into_iter().rev().collect();

    // mirror symmetry must come out exactly
    for j in 0..n / 2 {
        if q_exact[j] != q_exact[n - 1 - j] {
            return Err(SynthesisError::NotPersymmetricResult);
        }
    }
    for j in 0..(n - 1) / 2 {
        if r_sq_exact[j] != r_sq_exact[n - 2 - j] {
            return Err(SynthesisError::NotPersymmetricResult);
        }
    }

    // kind-specific structure
    let matrix_kind = match s.kind() {
        SpectrumKind::Adjacency => HamiltonianKind::Adjacency,
        SpectrumKind::AdjacencyNoPotentials => {
            if let Some(idx) = q_exact.iter().position(|q| !q.is_zero()) {
                return Err(SynthesisError::PotentialRequired {
                    index: idx + 1,
                    value: format_ratio(&q_exact[idx]),
                });
            }
            HamiltonianKind::Adjacency
        }
        SpectrumKind::Laplacian => {
            if let Some(pos) = laplacian_structure_violation(&q_exact, &r_sq_exact) {
                return Err(SynthesisError::LaplacianStructureViolated(pos));
            }
            HamiltonianKind::Laplacian
        }
    };

    // closed-form middle entries must agree with the reconstruction
    let (s1, s2) = alternating_sums(values);
    let (middle_q, middle_r_sq) = parity_middle(&s1, &s2, n)?;
    let (recon_q, recon_r_sq) = if n % 2 == 0 {
        (&q_exact[n / 2 - 1], &r_sq_exact[n / 2 - 1])
    } else {
        (&q_exact[(n - 1) / 2], &r_sq_exact[(n - 1) / 2 - 1])
    };
    let matches = *recon_q == middle_q && *recon_r_sq == middle_r_sq;
    let middle_check = MiddleCheck {
        s1,
        s2,
        middle_q,
        middle_r_squared: middle_r_sq,
        matches,
    };

    // materialize floats and verify the spectrum numerically
    let q_f: Vec<f64> = q_exact.iter().map(ratio_to_f64).collect();
    let r_f: Vec<f64> = r_sq_exact.iter().map(|rs| ratio_to_f64(rs).sqrt()).collect();
    let hamiltonian =
        PathHamiltonian::new(matrix_kind, q_f, r_f)?.with_exact_squares(r_sq_exact.clone())?;
    let es = dynamics::eigensystem(&hamiltonian)?;
    let spectrum_residual = dynamics::spectrum_residual(&es, &s.float_values());

    Ok(SynthesisReport {
        hamiltonian,
        r_sq_exact,
        q_exact,
        middle_check,
        spectrum_residual,
        pst_time,
    })
}

/// Closed forms for orders 2..=5: direct entry formulas with no polynomial
/// arithmetic. Orders 4 and 5 cover potential-free spectra only.
pub fn closed_form_small_n(s: &Spectrum) -> Result<PathHamiltonian, SynthesisError> {
    let v = s.exact_values().ok_or(SynthesisError::ExactnessRequired)?;
    let n = v.len();
    let two = BigRational::from_integer(2.into());

    let build = |kind: HamiltonianKind,
                 q: Vec<BigRational>,
                 r_sq: Vec<BigRational>|
     -> Result<PathHamiltonian, SynthesisError> {
        for rs in &r_sq {
            if !rs.is_positive() {
                return Err(SynthesisError::OrthoPoly(OrthoPolyError::NegativeWeightSquared {
                    step: 0,
                }));
            }
        }
        let q_f = q.iter().map(ratio_to_f64).collect();
        let r_f = r_sq.iter().map(|rs| ratio_to_f64(rs).sqrt()).collect();
        Ok(PathHamiltonian::new(kind, q_f, r_f)?.with_exact_squares(r_sq)?)
    };

    match (n, s.kind()) {
        (2, kind) => {
            // r_1 = (a2 - a1)/2, q = (a2 + a1)/2 on both sites
            let r1 = (&v[1] - &v[0]) / &two;
            let q1 = (&v[1] + &v[0]) / &two;
            let matrix_kind = match kind {
                SpectrumKind::Laplacian => HamiltonianKind::Laplacian,
                _ => HamiltonianKind::Adjacency,
            };
            build(matrix_kind, vec![q1.clone(), q1.clone()], vec![&r1 * &r1])
        }
        (3, SpectrumKind::Adjacency | SpectrumKind::AdjacencyNoPotentials) => {
            // q = (a2, a1 - a2 + a3, a2); r^2 = (S2 - S1^2)/4 on both edges
            let (s1, s2) = alternating_sums(v);
            let r_sq = (&s2 - &s1 * &s1) / BigRational::from_integer(4.into());
            build(
                HamiltonianKind::Adjacency,
                vec![v[1].clone(), s1, v[1].clone()],
                vec![r_sq.clone(), r_sq],
            )
        }
        (3, SpectrumKind::Laplacian) => {
            // entries q = (a2, a3 - a2, a2), r^2 = a2 (a3 - a2) / 2; a valid
            // Laplacian additionally needs q_1 = r_1
            let r_sq = &v[1] * (&v[2] - &v[1]) / &two;
            let q = [v[1].clone(), &v[2] - &v[1], v[1].clone()];
            if &q[0] * &q[0] != r_sq {
                return Err(SynthesisError::LaplacianStructureViolated(1));
            }
            build(HamiltonianKind::Laplacian, q.to_vec(), vec![r_sq.clone(), r_sq])
        }
        (4, SpectrumKind::AdjacencyNoPotentials) => {
            // r_2 = b2 - b1, r_1 = r_3 = sqrt(b1 b2)
            let (b1, b2) = (v[2].clone(), v[3].clone());
            let r2 = &b2 - &b1;
            build(
                HamiltonianKind::Adjacency,
                vec![BigRational::zero(); 4],
                vec![&b1 * &b2, &r2 * &r2, &b1 * &b2],
            )
        }
        (5, SpectrumKind::AdjacencyNoPotentials) => {
            // r_1 = r_4 = b1, r_2 = r_3 = sqrt((b2^2 - b1^2)/2)
            let (b1, b2) = (v[3].clone(), v[4].clone());
            let inner = (&b2 * &b2 - &b1 * &b1) / &two;
            build(
                HamiltonianKind::Adjacency,
                vec![BigRational::zero(); 5],
                vec![&b1 * &b1, inner.clone(), inner, &b1 * &b1],
            )
        }
        _ => Err(SynthesisError::UnsupportedN(n)),
    }
}

// ---------------------------------------------------------------------------
// certificates

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateClaim {
    #[serde(rename = "laplacian_infeasible")]
    LaplacianPathInfeasible,
    #[serde(rename = "weight_irrational")]
    WeightIrrational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateReason {
    EvenDivisibility,
    FourModFour,
    OddParity,
    Mod8Residue,
    Mod4Residue,
}

/// Machine-checkable witness for an infeasibility or irrationality claim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: CertificateClaim,
    pub n: usize,
    pub reason: CertificateReason,
    #[serde(with = "crate::exact::serde_ratio_vec")]
    pub witness: Vec<BigRational>,
}

impl Certificate {
    /// Re-check the witness by independent modular arithmetic.
    pub fn verify(&self) -> bool {
        match self.reason {
            CertificateReason::EvenDivisibility => {
                // 2^(n/2-1) does not divide n/2
                if self.n % 2 != 0 || self.n < 6 || self.witness.len() != 2 {
                    return false;
                }
                let power = BigRational::from_integer(BigInt::from(2).pow(self.n as u32 / 2 - 1));
                let half = BigRational::from_integer(BigInt::from(self.n as u64 / 2));
                self.witness[0] == power
                    && self.witness[1] == half
                    && !(half / power).is_integer()
            }
            CertificateReason::FourModFour => {
                // 2 a2 a4 = a3 (a2 + a4) - a3^2 cannot hold mod 4 when a2, a4
                // are odd and a3 is even
                if self.n != 4 || self.witness.len() != 2 {
                    return false;
                }
                let lhs_expected = &self.witness[0];
                let rhs_expected = &self.witness[1];
                for a2 in [1i64, 3] {
                    for a4 in [1i64, 3] {
                        for a3 in [0i64, 2] {
                            let lhs = (2 * a2 * a4).rem_euclid(4);
                            let rhs = (a3 * (a2 + a4) - a3 * a3).rem_euclid(4);
                            if lhs == rhs {
                                return false;
                            }
                            if BigRational::from_integer(lhs.into()) != *lhs_expected
                                || BigRational::from_integer(rhs.into()) != *rhs_expected
                            {
                                return false;
                            }
                        }
                    }
                }
                true
            }
            CertificateReason::OddParity => {
                // n * (product of odd integers) is odd; the product of the
                // even-valued eigenvalues is even
                self.n % 2 == 1
                    && self.n >= 3
                    && self.witness == vec![BigRational::one(), BigRational::zero()]
            }
            CertificateReason::Mod8Residue => {
                if self.witness.len() != 2 {
                    return false;
                }
                let value = &self.witness[0];
                let residue = mod_residue(value, 8);
                matches!(residue, Some(3) | Some(7))
                    && Some(&self.witness[1])
                        == residue
                            .map(|r| BigRational::from_integer(r.into()))
                            .as_ref()
                    && !is_perfect_square(value.numer())
            }
            CertificateReason::Mod4Residue => {
                if self.witness.len() != 2 {
                    return false;
                }
                let value = &self.witness[0];
                mod_residue(value, 4) == Some(2)
                    && self.witness[1] == BigRational::from_integer(2.into())
                    && !is_perfect_square(value.numer())
            }
        }
    }
}

/// Why no Laplacian chain on n >= 3 vertices can transfer end to end: the
/// applicable arithmetic obstruction per order.
pub fn laplacian_infeasibility(n: usize) -> Result<Certificate, SynthesisError> {
    if n < 3 {
        return Err(SynthesisError::PreconditionViolated(format!(
            "order {n} admits a Laplacian transfer chain; obstructions start at 3"
        )));
    }
    let cert = if n % 2 == 1 {
        Certificate {
            claim: CertificateClaim::LaplacianPathInfeasible,
            n,
            reason: CertificateReason::OddParity,
            witness: vec![BigRational::one(), BigRational::zero()],
        }
    } else if n == 4 {
        Certificate {
            claim: CertificateClaim::LaplacianPathInfeasible,
            n,
            reason: CertificateReason::FourModFour,
            witness: vec![
                BigRational::from_integer(2.into()),
                BigRational::zero(),
            ],
        }
    } else {
        Certificate {
            claim: CertificateClaim::LaplacianPathInfeasible,
            n,
            reason: CertificateReason::EvenDivisibility,
            witness: vec![
                BigRational::from_integer(BigInt::from(2).pow(n as u32 / 2 - 1)),
                BigRational::from_integer(BigInt::from(n as u64 / 2)),
            ],
        }
    };
    debug_assert!(cert.verify());
    Ok(cert)
}

/// Outcome of the rationality analysis: a certificate for covered spectral
/// classes, or an explicit refusal to claim anything for uncovered ones.
#[derive(Clone, Debug, PartialEq)]
pub enum RationalityOutcome {
    Certified(Certificate),
    NotCovered { n: usize },
}

/// Certify that the chain realizing an exact integer spectrum (parity
/// normalized: odd-indexed eigenvalues odd) must carry an irrational weight.
///
/// Covered classes: n = 4 (the quantity S1^2 r_1^2 is 3 or 7 mod 8) and odd
/// n >= 5 with n = 3 or 5 mod 8 (S2 - S1^2 is 2 mod 4, so the middle weight
/// is irrational). All other orders are out of reach of the argument and
/// report `NotCovered`.
pub fn rationality_certificate(s: &Spectrum) -> Result<RationalityOutcome, SynthesisError> {
    let values = s.exact_values().ok_or(SynthesisError::ExactnessRequired)?;
    let n = values.len();
    for (idx, v) in values.iter().enumerate() {
        if !v.is_integer() {
            return Err(SynthesisError::PreconditionViolated(format!(
                "eigenvalue {} is not an integer",
                idx + 1
            )));
        }
        let should_be_odd = (idx + 1) % 2 == 1;
        if is_even(v) == should_be_odd {
            return Err(SynthesisError::PreconditionViolated(format!(
                "eigenvalue {} breaks the odd/even alternation",
                idx + 1
            )));
        }
    }
    crate::spectra::validate_kay(s)?;

    let (s1, s2) = alternating_sums(values);
    if n == 4 {
        let prod_even = &values[1] * &values[3]; // a2 a4
        let prod_odd = &values[0] * &values[2]; // a1 a3
        let quantity = ((&prod_even - &prod_odd) * &s2 - (&prod_even + &prod_odd) * &s1 * &s1)
            / BigRational::from_integer(2.into());
        let residue = mod_residue(&quantity, 8).ok_or_else(|| {
            SynthesisError::PreconditionViolated("mod-8 quantity is not an integer".into())
        })?;
        if residue != 3 && residue != 7 {
            return Err(SynthesisError::PreconditionViolated(format!(
                "mod-8 residue {residue} outside {{3,7}}; input was not parity-normalized"
            )));
        }
        return Ok(RationalityOutcome::Certified(Certificate {
            claim: CertificateClaim::WeightIrrational,
            n,
            reason: CertificateReason::Mod8Residue,
            witness: vec![quantity, BigRational::from_integer(residue.into())],
        }));
    }

    if n >= 5 && n % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
        let quantity = &s2 - &s1 * &s1;
        let residue = mod_residue(&quantity, 4).ok_or_else(|| {
            SynthesisError::PreconditionViolated("mod-4 quantity is not an integer".into())
        })?;
        if residue != 2 {
            return Err(SynthesisError::PreconditionViolated(format!(
                "mod-4 residue {residue} is not 2; input was not parity-normalized"
            )));
        }
        return Ok(RationalityOutcome::Certified(Certificate {
            claim: CertificateClaim::WeightIrrational,
            n,
            reason: CertificateReason::Mod4Residue,
            witness: vec![quantity, BigRational::from_integer(2.into())],
        }));
    }

    Ok(RationalityOutcome::NotCovered { n })
}

/// True iff every squared weight is the square of a rational.
pub fn all_rational_check(h: &PathHamiltonian) -> Result<bool, SynthesisError> {
    let r_sq = h.r_sq_exact().ok_or(SynthesisError::MissingExactData)?;
    Ok(r_sq.iter().all(is_rational_square))
}

// ---------------------------------------------------------------------------
// exhaustive Laplacian search

/// Outcome of exhaustively trying every admissible integer Laplacian
/// spectrum up to a bound. `feasible` is expected to stay empty.
#[derive(Clone, Debug, Serialize)]
pub struct FalsifierReport {
    pub n: usize,
    pub max_eig: u64,
    pub candidates: u64,
    pub failures: BTreeMap<String, u64>,
    pub feasible: Vec<Vec<String>>,
}

/// Enumerate all integer spectra 0 = a_1 < ... < a_n <= max_eig with odd
/// gaps and run the Laplacian reconstruction on each, tallying the failure
/// modes.
pub fn laplacian_search_falsifier(
    n: usize,
    max_eig: u64,
) -> Result<FalsifierReport, SynthesisError> {
    if !(3..=8).contains(&n) {
        return Err(SynthesisError::PreconditionViolated(format!(
            "exhaustive search covers orders 3..=8 (got {n})"
        )));
    }

    let mut report = FalsifierReport {
        n,
        max_eig,
        candidates: 0,
        failures: BTreeMap::new(),
        feasible: Vec::new(),
    };

    // gaps are odd: g = 2u+1; enumerate in colex order
    let gaps = n - 1;
    let mut u = vec![0u64; gaps];
    loop {
        let total: u64 = u.iter().map(|&x| 2 * x + 1).sum();
        if total <= max_eig {
            report.candidates += 1;
            if report.candidates > FALSIFIER_BUDGET {
                return Err(SynthesisError::BudgetExceeded {
                    candidates: report.candidates,
                    budget: FALSIFIER_BUDGET,
                });
            }
            let mut values = Vec::with_capacity(n);
            let mut acc = BigRational::zero();
            values.push(acc.clone());
            for &x in &u {
                acc += BigRational::from_integer((2 * x + 1).into());
                values.push(acc.clone());
            }
            let spectrum = Spectrum::exact(SpectrumKind::Laplacian, values.clone(), Time::pi())?;
            match reconstruct(&spectrum) {
                Ok(_) => report
                    .feasible
                    .push(values.iter().map(format_ratio).collect()),
                Err(err) => {
                    *report.failures.entry(err.code().to_string()).or_insert(0) += 1;
                }
            }
        }

        // advance: increment with carry; prune via the running minimum total
        let mut pos = 0;
        loop {
            if pos == gaps {
                return Ok(report);
            }
            u[pos] += 1;
            let min_total: u64 = u.iter().map(|&x| 2 * x + 1).sum();
            if min_total <= max_eig {
                break;
            }
            u[pos] = 0;
            pos += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// seeded spectrum sampling and the rationality scan

/// Deterministic sampler for parity-normalized integer spectra: the smallest
/// eigenvalue is 1 and the gaps are 2u+1 with u uniform in 0..=4, keyed by
/// (seed, index).
#[derive(Clone, Copy, Debug)]
pub struct SpectrumSampler {
    rng: CounterRng,
    n: usize,
}

impl SpectrumSampler {
    pub fn new(seed: u64, n: usize) -> Self {
        Self {
            rng: CounterRng::new(seed),
            n,
        }
    }

    pub fn sample(&self, index: u64) -> Spectrum {
        let mut stream = self.rng.stream(index);
        let mut values = Vec::with_capacity(self.n);
        let mut acc = BigRational::one();
        values.push(acc.clone());
        for _ in 1..self.n {
            let gap = 2 * stream.next_below(5) + 1;
            acc += BigRational::from_integer(gap.into());
            values.push(acc.clone());
        }
        Spectrum::exact(SpectrumKind::Adjacency, values, Time::pi())
            .expect("sampled spectra are valid by construction")
    }
}

/// Residue histogram from running the rationality certificate over many
/// sampled spectra. Byte-identical output for any worker count.
#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub n: usize,
    pub count: u64,
    pub seed: u64,
    pub residue_modulus: u64,
    pub residues: BTreeMap<u64, u64>,
    pub counterexamples: Vec<Vec<String>>,
}

/// Run `rationality_certificate` over `count` sampled spectra of order `n`,
/// fanning out over `workers` threads and merging in input order.
pub fn scan_rationality(
    n: usize,
    count: u64,
    seed: u64,
    workers: usize,
) -> Result<ScanSummary, SynthesisError> {
    let modulus = if n == 4 {
        8
    } else if n >= 5 && n % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
        4
    } else {
        return Err(SynthesisError::PreconditionViolated(format!(
            "no rationality class covers order {n}; scan supports n = 4 and odd n = 3,5 mod 8"
        )));
    };

    let sampler = SpectrumSampler::new(seed, n);
    let per_item = |index: u64| -> Result<u64, Vec<String>> {
        let spectrum = sampler.sample(index);
        let values: Vec<String> = spectrum
            .exact_values()
            .expect("sampler is exact")
            .iter()
            .map(format_ratio)
            .collect();
        match rationality_certificate(&spectrum) {
            Ok(RationalityOutcome::Certified(cert)) => {
                match mod_residue(&cert.witness[0], modulus) {
                    Some(r) => Ok(r),
                    None => Err(values),
                }
            }
            _ => Err(values),
        }
    };

    let results = parallel_map_indexed(count, workers.max(1), per_item);
    let mut summary = ScanSummary {
        n,
        count,
        seed,
        residue_modulus: modulus,
        residues: BTreeMap::new(),
        counterexamples: Vec::new(),
    };
    for item in results {
        match item {
            Ok(residue) => *summary.residues.entry(residue).or_insert(0) += 1,
            Err(values) => summary.counterexamples.push(values),
        }
    }
    Ok(summary)
}

/// Evaluate `f` at each index in 0..count on a fixed thread fan-out and
/// return results in index order.
fn parallel_map_indexed<T, F>(count: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    if workers <= 1 || count < 2 {
        return (0..count).map(f).collect();
    }
    let chunk = count.div_ceil(workers as u64);
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers as u64 {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(count);
            if lo >= hi {
                break;
            }
            let f = &f;
            handles.push(scope.spawn(move || (lo, (lo..hi).map(f).collect::<Vec<T>>())));
        }
        for handle in handles {
            let (lo, items) = handle.join().expect("scan worker panicked");
            for (offset, item) in items.into_iter().enumerate() {
                slots[lo as usize + offset] = Some(item);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("all slots filled")).collect()
}
