//! Spectral decomposition and unitary evolution: a self-contained symmetric
//! tridiagonal eigensolver (implicit-shift QL), a Jacobi fallback for dense
//! symmetric matrices, fidelity of state transfer, and transfer verification.
//!
//! Complex arithmetic appears only in the evolution layer; everything
//! structural stays real.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::hamiltonian::PathHamiltonian;
use crate::orthopoly::OrthoPolySeq;

/// Default fidelity tolerance for declaring perfect transfer.
pub const PST_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("{alpha} is not an eigenvalue (root distance {distance:e})")]
    NotAnEigenvalue { alpha: f64, distance: f64 },
    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error("no endpoint transfer at this time (fidelity {fidelity})")]
    EndpointPSTAbsent { fidelity: f64 },
}

/// Full spectral decomposition: ascending eigenvalues, orthonormal
/// eigenvector columns, and the squared first components (the weights
/// normalizing the recurrence eigenvectors; strictly positive for chains).
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub normalizers: Vec<f64>,
}

impl EigenSystem {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Transfer amplitude e_j^T exp(itH) e_k via the spectral decomposition
    /// (1-based vertices).
    pub fn transfer_amplitude(&self, j: usize, k: usize, t: f64) -> Complex64 {
        let (j, k) = (j - 1, k - 1);
        let mut amp = Complex64::new(0.0, 0.0);
        for (r, &lambda) in self.eigenvalues.iter().enumerate() {
            let weight = self.eigenvectors[(j, r)] * self.eigenvectors[(k, r)];
            amp += Complex64::from_polar(1.0, t * lambda) * weight;
        }
        amp
    }

    pub fn fidelity(&self, j: usize, k: usize, t: f64) -> FidelityResult {
        let amp = self.transfer_amplitude(j, k, t);
        let fidelity = amp.norm_sqr();
        let phase = if fidelity > 1.0 - 1e-6 {
            let unit = amp / amp.norm();
            Some((unit.re, unit.im))
        } else {
            None
        };
        FidelityResult {
            pair: (j, k),
            time: t,
            fidelity,
            phase,
        }
    }
}

/// Fidelity of transfer between a vertex pair at one time.
#[derive(Clone, Debug, Serialize)]
pub struct FidelityResult {
    pub pair: (usize, usize),
    pub time: f64,
    pub fidelity: f64,
    /// unit phase factor (re, im), reported only near-perfect transfer
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<(f64, f64)>,
}

/// Report for all mirror pairs of a chain with endpoint transfer.
#[derive(Clone, Debug, Serialize)]
pub struct InternalPairsReport {
    pub endpoint: FidelityResult,
    pub pairs: Vec<FidelityResult>,
    pub all_transfer: bool,
}

/// Spectral decomposition of a chain Hamiltonian (dedicated tridiagonal QL).
pub fn eigensystem(h: &PathHamiltonian) -> Result<EigenSystem, DynamicsError> {
    let n = h.n();
    let mut d = h.q().to_vec();
    let sign = h.kind().offdiag_sign();
    let mut e: Vec<f64> = h.r().iter().map(|w| sign * w).collect();
    e.push(0.0);
    let mut z = DMatrix::identity(n, n);
    tql_implicit(&mut d, &mut e, &mut z)?;
    Ok(finish_eigensystem(d, z))
}

/// Spectral decomposition of a dense symmetric matrix (cyclic Jacobi).
pub fn eigensystem_dense(a: &DMatrix<f64>) -> Result<EigenSystem, DynamicsError> {
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                return Err(DynamicsError::NotSymmetric);
            }
        }
    }
    let (d, z) = jacobi_rotations(a)?;
    Ok(finish_eigensystem(d, z))
}

/// Sort ascending, canonicalize column signs, read off normalizers.
fn finish_eigensystem(d: Vec<f64>, z: DMatrix<f64>) -> EigenSystem {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut col = z.column(old_col).clone_owned();
        // fix sign by the first component of significant magnitude
        let lead = col.iter().find(|x| x.abs() > 1e-12).copied().unwrap_or(1.0);
        if lead < 0.0 {
            col.neg_mut();
        }
        eigenvectors.set_column(new_col, &col);
    }
    let normalizers = (0..n)
        .map(|r| eigenvectors[(0, r)] * eigenvectors[(0, r)])
        .collect();
    EigenSystem {
        eigenvalues,
        eigenvectors,
        normalizers,
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e` the off-diagonal in `e[0..n-1]` with a zero
/// sentinel at `e[n-1]`; rotations accumulate into the columns of `z`.
/// The shift is the eigenvalue of the trailing 2x2 closest to d[l].
fn tql_implicit(
    d: &mut [f64],
    e: &mut [f64],
    z: &mut DMatrix<f64>,
) -> Result<(), DynamicsError> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let cap = 50 * n;
    let mut iterations = 0usize;

    for l in 0..n {
        loop {
            // locate a negligible off-diagonal entry
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > cap {
                return Err(DynamicsError::ConvergenceFailure { sweeps: iterations });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // rotation annihilated; split and retry
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..z.nrows() {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Cyclic Jacobi rotations for a dense symmetric matrix.
fn jacobi_rotations(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>), DynamicsError> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::identity(n, n);
    if n <= 1 {
        return Ok(((0..n).map(|i| m[(i, i)]).collect(), v));
    }

    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= 1e-14 * m.amax().max(1.0) * n as f64 {
            return Ok(((0..n).map(|i| m[(i, i)]).collect(), v));
        }

        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(DynamicsError::ConvergenceFailure { sweeps: max_sweeps })
}

/// Eigenvector of the chain from the recurrence polynomials:
/// (d_1 p_0(alpha), ..., d_n p_{n-1}(alpha)).
pub fn eigenvector_from_polys(
    seq: &OrthoPolySeq<f64>,
    alpha: f64,
) -> Result<Vec<f64>, DynamicsError> {
    let p = seq.charpoly();
    let value = p.eval(&alpha);
    let derivative: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c * alpha.powi(k as i32 - 1))
        .sum();
    let distance = if derivative.abs() > f64::MIN_POSITIVE {
        (value / derivative).abs()
    } else {
        value.abs()
    };
    if distance > 1e-9 * (1.0 + alpha.abs()) {
        return Err(DynamicsError::NotAnEigenvalue { alpha, distance });
    }
    Ok((0..seq.order()).map(|k| seq.signed_eval(k, &alpha)).collect())
}

fn check_pair(h: &PathHamiltonian, j: usize, k: usize) -> Result<(), DynamicsError> {
    let n = h.n();
    for v in [j, k] {
        if v == 0 || v > n {
            return Err(DynamicsError::VertexOutOfRange(v, n));
        }
    }
    Ok(())
}

/// |e_j^T exp(itH) e_k|^2 between 1-based vertices j and k.
pub fn evolve_fidelity(
    h: &PathHamiltonian,
    j: usize,
    k: usize,
    t: f64,
) -> Result<FidelityResult, DynamicsError> {
    check_pair(h, j, k)?;
    Ok(eigensystem(h)?.fidelity(j, k, t))
}

/// True iff fidelity >= 1 - tol at time t.
pub fn verify_pst(
    h: &PathHamiltonian,
    j: usize,
    k: usize,
    t: f64,
    tol: f64,
) -> Result<(bool, FidelityResult), DynamicsError> {
    let result = evolve_fidelity(h, j, k, t)?;
    Ok((result.fidelity >= 1.0 - tol, result))
}

/// Endpoint transfer propagates to every mirror pair (j, n+1-j); check them
/// all at the same time.
pub fn verify_internal_pairs(
    h: &PathHamiltonian,
    t: f64,
    tol: f64,
) -> Result<InternalPairsReport, DynamicsError> {
    let n = h.n();
    let es = eigensystem(h)?;
    let endpoint = es.fidelity(1, n, t);
    if endpoint.fidelity < 1.0 - tol {
        return Err(DynamicsError::EndpointPSTAbsent {
            fidelity: endpoint.fidelity,
        });
    }
    let mut pairs = Vec::new();
    let mut all_transfer = true;
    for j in 2..=n.div_ceil(2) {
        let result = es.fidelity(j, n + 1 - j, t);
        all_transfer &= result.fidelity >= 1.0 - tol;
        pairs.push(result);
    }
    Ok(InternalPairsReport {
        endpoint,
        pairs,
        all_transfer,
    })
}

/// Uniformly sampled fidelity curve on [0, t_max] with `steps` samples
/// (endpoints included; `steps >= 2`).
pub fn fidelity_trace(
    h: &PathHamiltonian,
    j: usize,
    k: usize,
    t_max: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>, DynamicsError> {
    assert!(steps >= 2, "a trace needs at least two samples");
    check_pair(h, j, k)?;
    let es = eigensystem(h)?;
    Ok((0..steps)
        .map(|i| {
            let t = t_max * i as f64 / (steps - 1) as f64;
            (t, es.fidelity(j, k, t).fidelity)
        })
        .collect())
}

/// Render a trace as CSV with 17 significant digits per value.
pub fn trace_to_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("t,fidelity\n");
    for (t, f) in points {
        out.push_str(&format!("{t:.16e},{f:.16e}\n"));
    }
    out
}

/// Max-norm residual between computed eigenvalues and a target list.
pub fn spectrum_residual(es: &EigenSystem, target: &[f64]) -> f64 {
    es.eigenvalues
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Unit eigenvector reconstruction residual ||Hv - lambda v||_max, used by
/// verification code to bound eigensolver accuracy.
pub fn decomposition_residual(h: &DMatrix<f64>, es: &EigenSystem) -> f64 {
    let n = es.n();
    let mut worst = 0.0f64;
    for r in 0..n {
        let v: DVector<f64> = es.eigenvectors.column(r).clone_owned();
        let hv = h * &v;
        for i in 0..n {
            worst = worst.max((hv[i] - es.eigenvalues[r] * v[i]).abs());
        }
    }
    worst
}
