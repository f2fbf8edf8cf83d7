//! Target spectra: ordered eigenvalue lists with an exactness mode, dynamics
//! kind, and readout time, plus the admissibility checks a spectrum must pass
//! before a transfer chain can be synthesized from it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_ratio, is_odd_integer, mod_residue, parse_ratio, ratio_to_f64};

/// Integrality tolerance for float-mode gap checks; matches the accuracy
/// budget of the eigensolver.
pub const FLOAT_INTEGRALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    #[serde(rename = "adjacency")]
    Adjacency,
    #[serde(rename = "adjacency_np")]
    AdjacencyNoPotentials,
    #[serde(rename = "laplacian")]
    Laplacian,
}

impl SpectrumKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpectrumKind::Adjacency => "adjacency",
            SpectrumKind::AdjacencyNoPotentials => "adjacency_np",
            SpectrumKind::Laplacian => "laplacian",
        }
    }
}

/// A readout time, either an exact rational multiple of pi or a plain real.
#[derive(Clone, Debug, PartialEq)]
pub enum Time {
    PiMultiple(BigRational),
    Real(f64),
}

impl Time {
    pub fn pi() -> Self {
        Time::PiMultiple(BigRational::from_integer(1.into()))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Time::PiMultiple(k) => ratio_to_f64(k) * std::f64::consts::PI,
            Time::Real(x) => *x,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Time::PiMultiple(k) => k.is_positive(),
            Time::Real(x) => *x > 0.0,
        }
    }

    /// Parse `"pi"`, `"pi/2"`, `"3pi/4"`, `"1/2pi"`, or a decimal.
    pub fn parse(s: &str) -> Option<Time> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        if let Some(pos) = cleaned.find("pi") {
            let (pre, rest) = cleaned.split_at(pos);
            let post = &rest[2..];
            let mut k = if pre.is_empty() {
                BigRational::from_integer(1.into())
            } else {
                parse_ratio(pre)?
            };
            if !post.is_empty() {
                let den = post.strip_prefix('/')?;
                let d: BigInt = den.parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                k /= BigRational::from_integer(d);
            }
            Some(Time::PiMultiple(k))
        } else {
            cleaned.parse::<f64>().ok().filter(|x| x.is_finite()).map(Time::Real)
        }
    }
}

impl std::fmt::Display for Time {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Time::PiMultiple(k) if k == &BigRational::from_integer(1.into()) => write!(f, "pi"),
            Time::PiMultiple(k) => write!(f, "{}pi", format_ratio(k)),
            Time::Real(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Time {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Time::PiMultiple(_) => serializer.serialize_str(&self.to_string()),
            Time::Real(x) => serializer.serialize_f64(*x),
        }
    }
}

/// Eigenvalue storage: all-exact or all-float; mixing is not permitted.
#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Values::Exact(v) => v.iter().map(ratio_to_f64).collect(),
            Values::Float(v) => v.clone(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("a spectrum needs at least two eigenvalues (got {0})")]
    TooFew(usize),
    #[error("eigenvalues must be strictly increasing (position {0})")]
    NotStrictlyIncreasing(usize),
    #[error("repeated eigenvalue at position {0}")]
    NonDistinct(usize),
    #[error("gap {index} is {gap}, not an odd positive integer")]
    GapNotOddInteger { index: usize, gap: String },
    #[error("readout time must be positive")]
    NonPositiveTime,
    #[error("potential-free spectrum must be symmetric about zero (position {0})")]
    NotSymmetricAboutZero(usize),
    #[error("a Laplacian spectrum must start at zero")]
    LaplacianMustStartAtZero,
    #[error("exact and floating-point values cannot be mixed")]
    MixedExactness,
    #[error("no rational shift yields integer eigenvalues with odd gaps")]
    NotIntegerizable,
    #[error("eigenvalue class at beta index {index} is {class} mod 4, expected {expected}")]
    PatternViolation { index: usize, class: u8, expected: u8 },
    #[error("operation requires a {expected} spectrum, got {got}")]
    WrongKind {
        expected: &'static str,
        got: &'static str,
    },
}

/// An ordered list of distinct target eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    kind: SpectrumKind,
    values: Values,
    readout_time: Time,
}

impl Spectrum {
    pub fn exact(
        kind: SpectrumKind,
        values: Vec<BigRational>,
        readout_time: Time,
    ) -> Result<Self, SpectrumError> {
        Self::new(kind, Values::Exact(values), readout_time)
    }

    pub fn float(
        kind: SpectrumKind,
        values: Vec<f64>,
        readout_time: Time,
    ) -> Result<Self, SpectrumError> {
        Self::new(kind, Values::Float(values), readout_time)
    }

    /// Exact spectrum from integer eigenvalues at readout pi.
    pub fn from_integers(kind: SpectrumKind, values: &[i64]) -> Result<Self, SpectrumError> {
        Self::exact(
            kind,
            values.iter().map(|&v| BigRational::from_integer(v.into())).collect(),
            Time::pi(),
        )
    }

    pub fn new(
        kind: SpectrumKind,
        values: Values,
        readout_time: Time,
    ) -> Result<Self, SpectrumError> {
        if values.len() < 2 {
            return Err(SpectrumError::TooFew(values.len()));
        }
        if !readout_time.is_positive() {
            return Err(SpectrumError::NonPositiveTime);
        }
        match &values {
            Values::Exact(v) => {
                for (i, w) in v.windows(2).enumerate() {
                    if w[0] >= w[1] {
                        return Err(SpectrumError::NotStrictlyIncreasing(i + 1));
                    }
                }
            }
            Values::Float(v) => {
                for (i, w) in v.windows(2).enumerate() {
                    if !(w[0] < w[1]) {
                        return Err(SpectrumError::NotStrictlyIncreasing(i + 1));
                    }
                }
            }
        }

        let s = Spectrum { kind, values, readout_time };
        s.check_kind_shape()?;
        Ok(s)
    }

    fn check_kind_shape(&self) -> Result<(), SpectrumError> {
        let n = self.n();
        match (self.kind, &self.values) {
            (SpectrumKind::AdjacencyNoPotentials, Values::Exact(v)) => {
                for i in 0..n / 2 {
                    if !(v[i].clone() + v[n - 1 - i].clone()).is_zero() {
                        return Err(SpectrumError::NotSymmetricAboutZero(i + 1));
                    }
                }
                // for odd n the middle value is forced to zero by symmetry
            }
            (SpectrumKind::AdjacencyNoPotentials, Values::Float(v)) => {
                let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                for i in 0..n / 2 {
                    if (v[i] + v[n - 1 - i]).abs() > FLOAT_INTEGRALITY_TOL * scale {
                        return Err(SpectrumError::NotSymmetricAboutZero(i + 1));
                    }
                }
            }
            (SpectrumKind::Laplacian, Values::Exact(v)) => {
                if !v[0].is_zero() {
                    return Err(SpectrumError::LaplacianMustStartAtZero);
                }
            }
            (SpectrumKind::Laplacian, Values::Float(v)) => {
                let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                if v[0].abs() > FLOAT_INTEGRALITY_TOL * scale {
                    return Err(SpectrumError::LaplacianMustStartAtZero);
                }
            }
            (SpectrumKind::Adjacency, _) => {}
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn readout_time(&self) -> &Time {
        &self.readout_time
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, Values::Exact(_))
    }

    pub fn exact_values(&self) -> Option<&[BigRational]> {
        match &self.values {
            Values::Exact(v) => Some(v),
            Values::Float(_) => None,
        }
    }

    pub fn float_values(&self) -> Vec<f64> {
        self.values.to_f64()
    }
}

/// Witness that consecutive gaps are odd integers: gap_i = 2 m_i + 1.
#[derive(Clone, Debug, Serialize)]
pub struct KayWitness {
    pub gaps: Vec<f64>,
    pub m_values: Vec<u64>,
    pub scaled_time: f64,
}

/// Check the odd-integer gap condition on the values as given (no rescaling).
///
/// Gap indices are 1-based: gap i separates eigenvalues i and i+1.
pub fn validate_kay(s: &Spectrum) -> Result<KayWitness, SpectrumError> {
    let mut gaps = Vec::with_capacity(s.n() - 1);
    let mut m_values = Vec::with_capacity(s.n() - 1);
    match s.values() {
        Values::Exact(v) => {
            for (i, w) in v.windows(2).enumerate() {
                let gap = w[1].clone() - w[0].clone();
                if !is_odd_integer(&gap) {
                    return Err(SpectrumError::GapNotOddInteger {
                        index: i + 1,
                        gap: format_ratio(&gap),
                    });
                }
                let m = (gap.numer() - BigInt::from(1)) / BigInt::from(2);
                m_values.push(m.to_u64().unwrap_or(u64::MAX));
                gaps.push(ratio_to_f64(&gap));
            }
        }
        Values::Float(v) => {
            for (i, w) in v.windows(2).enumerate() {
                let gap = w[1] - w[0];
                if gap.abs() <= FLOAT_INTEGRALITY_TOL {
                    return Err(SpectrumError::NonDistinct(i + 1));
                }
                let rounded = gap.round();
                let odd = rounded >= 1.0 && (rounded as i64) % 2 != 0;
                if (gap - rounded).abs() > FLOAT_INTEGRALITY_TOL || !odd {
                    return Err(SpectrumError::GapNotOddInteger {
                        index: i + 1,
                        gap: format!("{gap}"),
                    });
                }
                m_values.push(((rounded as i64 - 1) / 2) as u64);
                gaps.push(gap);
            }
        }
    }
    Ok(KayWitness {
        gaps,
        m_values,
        scaled_time: s.readout_time().as_f64(),
    })
}

/// Scale the eigenvalues by t0/pi so the implied readout time becomes pi.
pub fn rescale_to_pi(s: &Spectrum, t0: &Time) -> Spectrum {
    assert!(t0.is_positive(), "readout time must be positive");
    let values = match (s.values(), t0) {
        (Values::Exact(v), Time::PiMultiple(k)) => {
            Values::Exact(v.iter().map(|x| x * k).collect())
        }
        (values, t0) => {
            let factor = t0.as_f64() / std::f64::consts::PI;
            Values::Float(values.to_f64().iter().map(|x| x * factor).collect())
        }
    };
    Spectrum {
        kind: s.kind(),
        values,
        readout_time: Time::pi(),
    }
}

/// Shift an exact spectrum so odd-indexed eigenvalues are odd integers and
/// even-indexed ones are even. Laplacian spectra are returned unshifted
/// (they must already start at zero).
///
/// A nonzero shift turns a potential-free spectrum into a plain adjacency
/// one, since the shift adds a uniform potential to the chain.
pub fn normalize_parity(s: &Spectrum) -> Result<(Spectrum, BigRational), SpectrumError> {
    validate_kay(s).map_err(|_| SpectrumError::NotIntegerizable)?;
    let v = s.exact_values().ok_or(SpectrumError::NotIntegerizable)?;

    if s.kind() == SpectrumKind::Laplacian {
        return Ok((s.clone(), BigRational::zero()));
    }

    // smallest odd integer >= alpha_1
    let ceil = v[0].ceil().to_integer();
    let target = if ceil.is_odd() { ceil } else { ceil + 1 };
    let shift = BigRational::from_integer(target) - v[0].clone();
    let shifted: Vec<BigRational> = v.iter().map(|x| x + shift.clone()).collect();
    let kind = if shift.is_zero() {
        s.kind()
    } else {
        SpectrumKind::Adjacency
    };
    let out = Spectrum {
        kind,
        values: Values::Exact(shifted),
        readout_time: s.readout_time().clone(),
    };
    Ok((out, shift))
}

/// One positive-half eigenvalue with its residue class.
#[derive(Clone, Debug, Serialize)]
pub struct BetaClass {
    pub index: usize,
    pub beta: f64,
    /// residue of 2*beta modulo 4
    pub class_mod_4: u8,
}

#[derive(Clone, Debug, Serialize)]
pub struct BipartitePattern {
    pub classes: Vec<BetaClass>,
}

/// Classify the positive-half eigenvalues of a potential-free spectrum by the
/// residue of 2*beta_r modulo 4. Transfer at readout pi requires the classes
/// to alternate: 1,3,1,... for even n and 0,2,0,... (starting at beta_0 = 0)
/// for odd n.
pub fn classify_bipartite_pattern(s: &Spectrum) -> Result<BipartitePattern, SpectrumError> {
    if s.kind() != SpectrumKind::AdjacencyNoPotentials {
        return Err(SpectrumError::WrongKind {
            expected: "adjacency_np",
            got: s.kind().name(),
        });
    }
    let n = s.n();
    let even = n % 2 == 0;

    // beta indices: 1..=n/2 for even n, 0..=(n-1)/2 for odd n
    let betas: Vec<(usize, f64, Option<BigRational>)> = match s.values() {
        Values::Exact(v) => {
            let start = n / 2; // middle zero included for odd n
            v[start..]
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let r = if even { i + 1 } else { i };
                    (r, ratio_to_f64(b), Some(b.clone()))
                })
                .collect()
        }
        Values::Float(v) => {
            let start = n / 2;
            v[start..]
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let r = if even { i + 1 } else { i };
                    (r, *b, None)
                })
                .collect()
        }
    };

    let mut classes = Vec::with_capacity(betas.len());
    for (r, beta_f, beta_exact) in betas {
        let class = match beta_exact {
            Some(b) => {
                let doubled = b * BigRational::from_integer(2.into());
                mod_residue(&doubled, 4).ok_or(SpectrumError::PatternViolation {
                    index: r,
                    class: u8::MAX,
                    expected: expected_class(even, r),
                })?
            }
            None => {
                let doubled = 2.0 * beta_f;
                let rounded = doubled.round();
                if (doubled - rounded).abs() > FLOAT_INTEGRALITY_TOL {
                    return Err(SpectrumError::PatternViolation {
                        index: r,
                        class: u8::MAX,
                        expected: expected_class(even, r),
                    });
                }
                (rounded as i64).rem_euclid(4) as u64
            }
        } as u8;
        let expected = expected_class(even, r);
        if class != expected {
            return Err(SpectrumError::PatternViolation {
                index: r,
                class,
                expected,
            });
        }
        classes.push(BetaClass {
            index: r,
            beta: beta_f,
            class_mod_4: class,
        });
    }
    Ok(BipartitePattern { classes })
}

fn expected_class(even_n: bool, r: usize) -> u8 {
    if even_n {
        if r % 2 == 1 {
            1
        } else {
            3
        }
    } else if r % 2 == 1 {
        2
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// serde: {"kind": "...", "values": ["-3/2", ...] | [numbers], "readout_time": "pi" | number}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    kind: SpectrumKind,
    values: Vec<ValueRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    readout_time: Option<TimeRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Exact(String),
    Float(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TimeRepr {
    Text(String),
    Number(f64),
}

impl Serialize for Spectrum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let values = match self.values() {
            Values::Exact(v) => v.iter().map(|r| ValueRepr::Exact(format_ratio(r))).collect(),
            Values::Float(v) => v.iter().map(|x| ValueRepr::Float(*x)).collect(),
        };
        let readout_time = Some(match self.readout_time() {
            t @ Time::PiMultiple(_) => TimeRepr::Text(t.to_string()),
            Time::Real(x) => TimeRepr::Number(*x),
        });
        SpectrumRepr {
            kind: self.kind,
            values,
            readout_time,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = SpectrumRepr::deserialize(deserializer)?;
        let mut exact = Vec::new();
        let mut float = Vec::new();
        for v in &repr.values {
            match v {
                ValueRepr::Exact(s) => exact.push(
                    parse_ratio(s).ok_or_else(|| D::Error::custom(format!("invalid rational: {s}")))?,
                ),
                ValueRepr::Float(x) => float.push(*x),
            }
        }
        let values = match (exact.is_empty(), float.is_empty()) {
            (false, true) => Values::Exact(exact),
            (true, false) => Values::Float(float),
            // empty lists fall through to the length validation
            (true, true) => Values::Float(float),
            (false, false) => {
                return Err(D::Error::custom(SpectrumError::MixedExactness.to_string()))
            }
        };
        let readout_time = match repr.readout_time {
            None => Time::pi(),
            Some(TimeRepr::Number(x)) => Time::Real(x),
            Some(TimeRepr::Text(s)) => {
                Time::parse(&s).ok_or_else(|| D::Error::custom(format!("invalid time: {s}")))?
            }
        };
        Spectrum::new(repr.kind, values, readout_time).map_err(D::Error::custom)
    }
}
