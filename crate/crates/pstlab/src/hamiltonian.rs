//! Tridiagonal chain Hamiltonians (adjacency and Laplacian sign conventions),
//! persymmetry and the orthogonal block split, the multiplication operator,
//! and Laplacians of mirror-symmetric trees.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{parse_ratio, ratio_to_f64};

/// Hard cap on matrix order; everything here is dense desk-scale algebra.
pub const MAX_ORDER: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HamiltonianKind {
    #[serde(rename = "adjacency")]
    Adjacency,
    #[serde(rename = "laplacian")]
    Laplacian,
}

impl HamiltonianKind {
    pub fn name(&self) -> &'static str {
        match self {
            HamiltonianKind::Adjacency => "adjacency",
            HamiltonianKind::Laplacian => "laplacian",
        }
    }

    /// Sign carried by the off-diagonal entries.
    pub fn offdiag_sign(&self) -> f64 {
        match self {
            HamiltonianKind::Adjacency => 1.0,
            HamiltonianKind::Laplacian => -1.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("edge weight {0} must be strictly positive and finite")]
    NonPositiveWeight(usize),
    #[error("need n diagonal and n-1 off-diagonal entries (got q: {q}, r: {r})")]
    DimensionMismatch { q: usize, r: usize },
    #[error("matrix order {0} exceeds the cap of {MAX_ORDER}")]
    TooLarge(usize),
    #[error("diagonal entry {0} does not match the Laplacian row pattern")]
    LaplacianPattern(usize),
    #[error("exact squared weights have the wrong length")]
    ExactLengthMismatch,
    #[error("matrix is not persymmetric")]
    NotPersymmetric,
    #[error("half tree is not connected")]
    DisconnectedHalf,
    #[error("attach vertex {0} is not a vertex of the half tree")]
    InvalidAttachVertex(usize),
    #[error("mirror map is not a valid involution")]
    InvalidMirror,
}

/// Weighted chain Hamiltonian: diagonal entries q, positive off-diagonal
/// magnitudes r, and optionally the exact rational squares of r.
#[derive(Clone, Debug, PartialEq)]
pub struct PathHamiltonian {
    kind: HamiltonianKind,
    q: Vec<f64>,
    r: Vec<f64>,
    r_sq_exact: Option<Vec<BigRational>>,
}

impl PathHamiltonian {
    pub fn new(
        kind: HamiltonianKind,
        q: Vec<f64>,
        r: Vec<f64>,
    ) -> Result<Self, HamiltonianError> {
        if q.len() < 2 || r.len() + 1 != q.len() {
            return Err(HamiltonianError::DimensionMismatch { q: q.len(), r: r.len() });
        }
        if q.len() > MAX_ORDER {
            return Err(HamiltonianError::TooLarge(q.len()));
        }
        for (j, w) in r.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(HamiltonianError::NonPositiveWeight(j + 1));
            }
        }
        if kind == HamiltonianKind::Laplacian {
            let n = q.len();
            for j in 0..n {
                let expected = match j {
                    0 => r[0],
                    j if j == n - 1 => r[n - 2],
                    j => r[j - 1] + r[j],
                };
                if (q[j] - expected).abs() > 1e-9 * expected.abs().max(1.0) {
                    return Err(HamiltonianError::LaplacianPattern(j + 1));
                }
            }
        }
        Ok(Self { kind, q, r, r_sq_exact: None })
    }

    pub fn adjacency(q: Vec<f64>, r: Vec<f64>) -> Result<Self, HamiltonianError> {
        Self::new(HamiltonianKind::Adjacency, q, r)
    }

    /// Laplacian chain from its edge weights; the diagonal is implied.
    pub fn laplacian_from_weights(r: Vec<f64>) -> Result<Self, HamiltonianError> {
        if r.is_empty() {
            return Err(HamiltonianError::DimensionMismatch { q: 0, r: 0 });
        }
        let n = r.len() + 1;
        let q = (0..n)
            .map(|j| match j {
                0 => r[0],
                j if j == n - 1 => r[n - 2],
                j => r[j - 1] + r[j],
            })
            .collect();
        Self::new(HamiltonianKind::Laplacian, q, r)
    }

    /// Attach exact squared weights (must be positive and consistent with r).
    pub fn with_exact_squares(
        mut self,
        r_sq: Vec<BigRational>,
    ) -> Result<Self, HamiltonianError> {
        if r_sq.len() != self.r.len() {
            return Err(HamiltonianError::ExactLengthMismatch);
        }
        for (j, (rsq, r)) in r_sq.iter().zip(&self.r).enumerate() {
            let float_sq = ratio_to_f64(rsq);
            if !(float_sq > 0.0) || (float_sq - r * r).abs() > 1e-9 * float_sq.max(1.0) {
                return Err(HamiltonianError::NonPositiveWeight(j + 1));
            }
        }
        self.r_sq_exact = Some(r_sq);
        Ok(self)
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn r_sq_exact(&self) -> Option<&[BigRational]> {
        self.r_sq_exact.as_deref()
    }

    /// Dense symmetric matrix with the kind's off-diagonal sign.
    pub fn build_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let sign = self.kind.offdiag_sign();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = self.q[j];
        }
        for j in 0..n - 1 {
            m[(j, j + 1)] = sign * self.r[j];
            m[(j + 1, j)] = sign * self.r[j];
        }
        m
    }

    /// Mirror symmetry about the anti-diagonal: q_j = q_{n+1-j} and
    /// r_j = r_{n-j}. Uses the exact squares when both sides carry them.
    pub fn is_persymmetric(&self, tol: f64) -> bool {
        let n = self.n();
        let scale = self
            .q
            .iter()
            .chain(self.r.iter())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        for j in 0..n / 2 {
            if (self.q[j] - self.q[n - 1 - j]).abs() > tol * scale {
                return false;
            }
        }
        if let Some(rsq) = &self.r_sq_exact {
            for j in 0..rsq.len() / 2 {
                if rsq[j] != rsq[rsq.len() - 1 - j] {
                    return false;
                }
            }
        } else {
            for j in 0..self.r.len() / 2 {
                if (self.r[j] - self.r[self.r.len() - 1 - j]).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Orthogonal reduction of a persymmetric chain to two half-size blocks.
    pub fn block_split(&self) -> Result<BlockSplit, HamiltonianError> {
        if !self.is_persymmetric(1e-9) {
            return Err(HamiltonianError::NotPersymmetric);
        }
        split_reversal_persymmetric(&self.build_matrix(), 1e-9)
    }

    /// The multiplication-by-x operator in the monic recurrence basis:
    /// superdiagonal ones, diagonal q, subdiagonal squared weights. It is
    /// diagonally similar to the Hamiltonian via `similarity_scalings`.
    pub fn multiplication_operator(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = self.q[j];
        }
        for j in 0..n - 1 {
            m[(j, j + 1)] = 1.0;
            m[(j + 1, j)] = self.r[j] * self.r[j];
        }
        m
    }

    /// Diagonal d with d_1 = 1 and d_{j+1} = ±d_j / r_j (sign by kind), so
    /// diag(d) * M = H * diag(d).
    pub fn similarity_scalings(&self) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.n());
        d.push(1.0);
        for w in &self.r {
            let prev = *d.last().expect("non-empty");
            d.push(self.kind.offdiag_sign() * prev / w);
        }
        d
    }
}

/// The standard transfer chain with weights sqrt(j(n-j)): its spectrum is
/// {-(n-1), -(n-3), ..., n-1} and it moves a state end to end at time pi/2.
pub fn christandl_chain(n: usize) -> Result<PathHamiltonian, HamiltonianError> {
    let r = (1..n).map(|j| ((j * (n - j)) as f64).sqrt()).collect();
    PathHamiltonian::adjacency(vec![0.0; n], r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitParity {
    Even,
    Odd,
}

/// The two orthogonally-similar blocks of a persymmetric matrix. For even
/// order B1 = E - RC and B2 = E + RC; for odd order B1 = E - RC and B2
/// borders E + RC with the center entry and sqrt(2)-scaled coupling (center
/// coordinate first).
#[derive(Clone, Debug)]
pub struct BlockSplit {
    pub b1: DMatrix<f64>,
    pub b2: DMatrix<f64>,
    pub parity: SplitParity,
}

impl BlockSplit {
    /// Lift a B1 eigenvector to the antisymmetric eigenvector [v; -Rv]
    /// (a zero center coordinate in the odd case).
    pub fn lift_antisymmetric(&self, v: &DVector<f64>) -> DVector<f64> {
        let m = v.len();
        let n = match self.parity {
            SplitParity::Even => 2 * m,
            SplitParity::Odd => 2 * m + 1,
        };
        let mut out = DVector::zeros(n);
        let inv = 1.0 / 2.0f64.sqrt();
        for i in 0..m {
            out[i] = v[i] * inv;
            out[n - 1 - i] = -v[i] * inv;
        }
        out
    }

    /// Lift a B2 eigenvector to the symmetric eigenvector [u; Ru], or
    /// [u_rest; sqrt(2) u_center; R u_rest] in the odd case (the center
    /// coordinate comes first in B2).
    pub fn lift_symmetric(&self, u: &DVector<f64>) -> DVector<f64> {
        let inv = 1.0 / 2.0f64.sqrt();
        match self.parity {
            SplitParity::Even => {
                let m = u.len();
                let mut out = DVector::zeros(2 * m);
                for i in 0..m {
                    out[i] = u[i] * inv;
                    out[2 * m - 1 - i] = u[i] * inv;
                }
                out
            }
            SplitParity::Odd => {
                let m = u.len() - 1;
                let n = 2 * m + 1;
                let mut out = DVector::zeros(n);
                for i in 0..m {
                    out[i] = u[i + 1] * inv;
                    out[n - 1 - i] = u[i + 1] * inv;
                }
                out[m] = u[0] * 2.0f64.sqrt() * inv;
                out
            }
        }
    }
}

/// Split a matrix that is persymmetric under the index reversal map.
fn split_reversal_persymmetric(
    a: &DMatrix<f64>,
    tol: f64,
) -> Result<BlockSplit, HamiltonianError> {
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    for i in 0..n {
        for j in 0..n {
            if (a[(i, j)] - a[(n - 1 - j, n - 1 - i)]).abs() > tol * scale {
                return Err(HamiltonianError::NotPersymmetric);
            }
        }
    }

    let m = n / 2;
    if n % 2 == 0 {
        // B1 = E - RC, B2 = E + RC with E the leading block and C the
        // lower-left block (rows reversed by R)
        let mut b1 = DMatrix::zeros(m, m);
        let mut b2 = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let e = a[(i, j)];
                let rc = a[(n - 1 - i, j)];
                b1[(i, j)] = e - rc;
                b2[(i, j)] = e + rc;
            }
        }
        Ok(BlockSplit { b1, b2, parity: SplitParity::Even })
    } else {
        let root2 = 2.0f64.sqrt();
        let mut b1 = DMatrix::zeros(m, m);
        let mut b2 = DMatrix::zeros(m + 1, m + 1);
        b2[(0, 0)] = a[(m, m)];
        for i in 0..m {
            b2[(0, i + 1)] = root2 * a[(m, i)];
            b2[(i + 1, 0)] = root2 * a[(i, m)];
            for j in 0..m {
                let e = a[(i, j)];
                let rc = a[(n - 1 - i, j)];
                b1[(i, j)] = e - rc;
                b2[(i + 1, j + 1)] = e + rc;
            }
        }
        Ok(BlockSplit { b1, b2, parity: SplitParity::Odd })
    }
}

/// Split a persymmetric matrix given its mirror involution. The matrix is
/// first permuted so the mirror becomes the index reversal.
pub fn tree_block_split(
    l: &DMatrix<f64>,
    mirror: &[usize],
) -> Result<BlockSplit, HamiltonianError> {
    let n = l.nrows();
    if mirror.len() != n {
        return Err(HamiltonianError::InvalidMirror);
    }
    for (i, &mi) in mirror.iter().enumerate() {
        if mi >= n || mirror[mi] != i {
            return Err(HamiltonianError::InvalidMirror);
        }
    }

    let is_reversal = mirror.iter().enumerate().all(|(i, &mi)| mi == n - 1 - i);
    if is_reversal {
        return split_reversal_persymmetric(l, 1e-9);
    }

    // order: one representative per orbit, fixed point in the middle,
    // mirrored representatives reversed at the end
    let lefts: Vec<usize> = (0..n).filter(|&i| i < mirror[i]).collect();
    let fixed: Vec<usize> = (0..n).filter(|&i| i == mirror[i]).collect();
    if fixed.len() != n % 2 {
        return Err(HamiltonianError::InvalidMirror);
    }
    let mut order = lefts.clone();
    order.extend(&fixed);
    order.extend(lefts.iter().rev().map(|&i| mirror[i]));

    let permuted = DMatrix::from_fn(n, n, |i, j| l[(order[i], order[j])]);
    split_reversal_persymmetric(&permuted, 1e-9)
}

/// The index-reversal mirror map on n vertices.
pub fn reversal_mirror(n: usize) -> Vec<usize> {
    (0..n).map(|i| n - 1 - i).collect()
}

/// A mirror-symmetric tree: a weighted half tree joined to its mirror image
/// by a bridge edge, optionally through a center vertex carrying the bridge
/// weight on both sides. Vertices of the half tree are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTree {
    pub edges: Vec<(usize, usize, f64)>,
    pub bridge_weight: f64,
    pub attach: usize,
    pub center: bool,
}

impl SymmetricTree {
    /// Number of vertices in the half tree.
    pub fn half_order(&self) -> usize {
        self.edges
            .iter()
            .flat_map(|&(u, v, _)| [u, v])
            .max()
            .unwrap_or(self.attach)
            .max(self.attach)
    }

    pub fn total_order(&self) -> usize {
        2 * self.half_order() + usize::from(self.center)
    }
}

/// Build the Laplacian of a mirror-symmetric tree together with its mirror
/// map. Vertices of the half tree are laid out in breadth-first order from
/// the attach vertex, then the center (if any), then the mirrored copy in
/// reverse order, which makes the Laplacian persymmetric by construction.
pub fn build_symmetric_tree(
    t: &SymmetricTree,
) -> Result<(DMatrix<f64>, Vec<usize>), HamiltonianError> {
    let m = t.half_order();
    if t.attach == 0 || t.attach > m {
        return Err(HamiltonianError::InvalidAttachVertex(t.attach));
    }
    if !(t.bridge_weight.is_finite() && t.bridge_weight > 0.0) {
        return Err(HamiltonianError::NonPositiveWeight(0));
    }
    for (idx, &(u, v, w)) in t.edges.iter().enumerate() {
        if !(w.is_finite() && w > 0.0) {
            return Err(HamiltonianError::NonPositiveWeight(idx + 1));
        }
        if u == 0 || v == 0 || u > m || v > m || u == v {
            return Err(HamiltonianError::InvalidAttachVertex(u.max(v)));
        }
    }
    let n = t.total_order();
    if n > MAX_ORDER {
        return Err(HamiltonianError::TooLarge(n));
    }

    // adjacency lists over 1-based half vertices
    let mut adj = vec![Vec::new(); m + 1];
    for &(u, v, w) in &t.edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }

    // breadth-first positions from the attach vertex
    let mut position = vec![usize::MAX; m + 1];
    let mut queue = std::collections::VecDeque::from([t.attach]);
    position[t.attach] = 0;
    let mut next_pos = 1;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if position[v] == usize::MAX {
                position[v] = next_pos;
                next_pos += 1;
                queue.push_back(v);
            }
        }
    }
    if next_pos != m {
        return Err(HamiltonianError::DisconnectedHalf);
    }

    let mut l = DMatrix::zeros(n, n);
    let add_edge = |l: &mut DMatrix<f64>, a: usize, b: usize, w: f64| {
        l[(a, b)] -= w;
        l[(b, a)] -= w;
        l[(a, a)] += w;
        l[(b, b)] += w;
    };
    for &(u, v, w) in &t.edges {
        let (pu, pv) = (position[u], position[v]);
        add_edge(&mut l, pu, pv, w);
        add_edge(&mut l, n - 1 - pu, n - 1 - pv, w);
    }
    if t.center {
        add_edge(&mut l, 0, m, t.bridge_weight);
        add_edge(&mut l, m, n - 1, t.bridge_weight);
    } else {
        add_edge(&mut l, 0, n - 1, t.bridge_weight);
    }

    Ok((l, reversal_mirror(n)))
}

// ---------------------------------------------------------------------------
// serde

#[derive(Serialize, Deserialize)]
struct PathHamiltonianRepr {
    kind: HamiltonianKind,
    q: Vec<f64>,
    r: Vec<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "crate::exact::serde_ratio_vec_opt"
    )]
    r_squared_exact: Option<Vec<BigRational>>,
}

impl Serialize for PathHamiltonian {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PathHamiltonianRepr {
            kind: self.kind,
            q: self.q.clone(),
            r: self.r.clone(),
            r_squared_exact: self.r_sq_exact.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PathHamiltonian {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PathHamiltonianRepr::deserialize(deserializer)?;
        let mut h = PathHamiltonian::new(repr.kind, repr.q, repr.r).map_err(D::Error::custom)?;
        if let Some(rsq) = repr.r_squared_exact {
            h = h.with_exact_squares(rsq).map_err(D::Error::custom)?;
        }
        Ok(h)
    }
}

#[derive(Serialize, Deserialize)]
struct SymmetricTreeRepr {
    edges: Vec<(usize, usize, WeightRepr)>,
    bridge_weight: WeightRepr,
    attach: usize,
    #[serde(default)]
    center: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightRepr {
    Exact(String),
    Float(f64),
}

impl WeightRepr {
    fn value(&self) -> Option<f64> {
        match self {
            WeightRepr::Exact(s) => parse_ratio(s).map(|r| ratio_to_f64(&r)),
            WeightRepr::Float(x) => Some(*x),
        }
    }
}

impl Serialize for SymmetricTree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SymmetricTreeRepr {
            edges: self
                .edges
                .iter()
                .map(|&(u, v, w)| (u, v, WeightRepr::Float(w)))
                .collect(),
            bridge_weight: WeightRepr::Float(self.bridge_weight),
            attach: self.attach,
            center: self.center,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricTree {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = SymmetricTreeRepr::deserialize(deserializer)?;
        let edges = repr
            .edges
            .iter()
            .map(|(u, v, w)| {
                w.value()
                    .map(|w| (*u, *v, w))
                    .ok_or_else(|| D::Error::custom("invalid edge weight"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let bridge_weight = repr
            .bridge_weight
            .value()
            .ok_or_else(|| D::Error::custom("invalid bridge weight"))?;
        Ok(SymmetricTree {
            edges,
            bridge_weight,
            attach: repr.attach,
            center: repr.center,
        })
    }
}
