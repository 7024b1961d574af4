//! Sequence and Hankel data model plus floating-point positivity classification.
//!
//! A truncated moment sequence `s_0..s_m` is classified through the smallest
//! eigenvalues of its nested Hankel matrices `H_n = (s_{i+j})`. The verdict is
//! three-valued: definite, semidefinite, or not positive, with an explicit
//! tolerance band separating the three in floating point.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::exact;

/// Default relative tolerance for the semidefinite band.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Default cap on the Hankel order for partial-sequence subset enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// A finite real sequence `s_0..s_m`, the candidate moments, with an optional
/// parallel list of exact rationals backing the float entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceRepr", into = "SequenceRepr")]
pub struct TruncatedMomentSequence {
    entries: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    moments: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<Vec<String>>,
}

impl TryFrom<SequenceRepr> for TruncatedMomentSequence {
    type Error = Error;

    fn try_from(repr: SequenceRepr) -> Result<Self> {
        match repr.exact {
            None => Self::new(repr.moments),
            Some(strings) => {
                let rationals = strings
                    .iter()
                    .map(|s| exact::parse_rational(s))
                    .collect::<Result<Vec<_>>>()?;
                Self::from_parts(repr.moments, rationals)
            }
        }
    }
}

impl From<TruncatedMomentSequence> for SequenceRepr {
    fn from(seq: TruncatedMomentSequence) -> Self {
        SequenceRepr {
            moments: seq.entries,
            exact: seq
                .exact
                .map(|rs| rs.iter().map(|r| r.to_string()).collect()),
        }
    }
}

impl TruncatedMomentSequence {
    /// Builds a sequence from float entries. Entries must be finite and
    /// nonempty; non-finite inputs are rejected here so that every later
    /// verdict can be trusted.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InsufficientMoments { needed: 1, got: 0 });
        }
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
        }
        Ok(Self {
            entries,
            exact: None,
        })
    }

    /// Builds a sequence from exact rationals; the float entries are the
    /// nearest-f64 roundings.
    pub fn from_exact(exact: Vec<BigRational>) -> Result<Self> {
        if exact.is_empty() {
            return Err(Error::InsufficientMoments { needed: 1, got: 0 });
        }
        let entries = exact
            .iter()
            .enumerate()
            .map(|(index, r)| {
                r.to_f64()
                    .filter(|v| v.is_finite())
                    .ok_or(Error::NonFiniteEntry {
                        index,
                        value: f64::INFINITY,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            entries,
            exact: Some(exact),
        })
    }

    /// Builds a sequence from parallel float and rational lists, checking
    /// that each rational rounds to its float partner.
    pub fn from_parts(entries: Vec<f64>, exact: Vec<BigRational>) -> Result<Self> {
        if exact.len() != entries.len() {
            return Err(Error::LengthMismatch {
                expected: entries.len(),
                got: exact.len(),
            });
        }
        let seq = Self::new(entries)?;
        for (index, (r, &float)) in exact.iter().zip(seq.entries.iter()).enumerate() {
            let as_float = r.to_f64().unwrap_or(f64::NAN);
            let scale = 1.0_f64.max(float.abs());
            let agrees = (as_float - float).abs() <= 1e-12 * scale;
            if !agrees {
                return Err(Error::ExactFloatDisagreement {
                    index,
                    exact: as_float,
                    float,
                });
            }
        }
        Ok(Self {
            exact: Some(exact),
            ..seq
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one entry
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, k: usize) -> Option<f64> {
        self.entries.get(k).copied()
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// Largest Hankel order `n` with all of `s_0..s_{2n}` available.
    pub fn max_feasible_order(&self) -> usize {
        (self.entries.len() - 1) / 2
    }

    /// Parses the one-moment-per-line CSV form; blank lines and `#` comments
    /// are skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: f64 = line
                .parse()
                .map_err(|_| Error::BadNumber(line.to_string()))?;
            entries.push(value);
        }
        Self::new(entries)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for v in &self.entries {
            out.push_str(&format!("{v}\n"));
        }
        out
    }
}

/// Symmetric matrix `H_n` with `H[i][j] = s_{i+j}`, stored dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    side: usize,
    data: Vec<f64>,
}

impl HankelMatrix {
    /// Matrix side `n + 1`.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Hankel order `n`.
    pub fn order(&self) -> usize {
        self.side - 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.side + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Largest absolute entry; by anti-diagonal constancy this is
    /// `max |s_k|` over `k <= 2n`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Classification scale `max(1, max |entry|)`.
    pub fn scale(&self) -> f64 {
        self.max_abs().max(1.0)
    }
}

impl fmt::Display for HankelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.side {
            for j in 0..self.side {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Builds `H_n` from a sequence; needs `2n + 1` entries.
pub fn build_hankel(seq: &TruncatedMomentSequence, order: usize) -> Result<HankelMatrix> {
    let needed = 2 * order + 1;
    if seq.len() < needed {
        return Err(Error::InsufficientMoments {
            needed,
            got: seq.len(),
        });
    }
    let side = order + 1;
    let mut data = vec![0.0; side * side];
    for i in 0..side {
        for j in 0..side {
            data[i * side + j] = seq.entries[i + j];
        }
    }
    Ok(HankelMatrix { side, data })
}

/// A sequence with some entries specified and the rest free, together with
/// the horizon up to which completions are considered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartialRepr", into = "PartialRepr")]
pub struct PartialMomentSequence {
    specified: BTreeMap<usize, f64>,
    horizon: usize,
}

#[derive(Serialize, Deserialize)]
struct PartialRepr {
    entries: BTreeMap<usize, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
}

impl TryFrom<PartialRepr> for PartialMomentSequence {
    type Error = Error;

    fn try_from(repr: PartialRepr) -> Result<Self> {
        PartialMomentSequence::new(repr.entries, repr.horizon)
    }
}

impl From<PartialMomentSequence> for PartialRepr {
    fn from(p: PartialMomentSequence) -> Self {
        PartialRepr {
            entries: p.specified,
            horizon: Some(p.horizon),
        }
    }
}

impl PartialMomentSequence {
    /// Builds a partial sequence. When `horizon` is omitted it defaults to
    /// `2 * max(pattern) + 2` so completions can be positivity-checked at a
    /// meaningful order.
    pub fn new(specified: BTreeMap<usize, f64>, horizon: Option<usize>) -> Result<Self> {
        if specified.is_empty() {
            return Err(Error::TooFewEntries { needed: 1, got: 0 });
        }
        for (&index, &value) in &specified {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
        }
        let max_index = *specified.keys().next_back().expect("nonempty");
        let horizon = horizon.unwrap_or(2 * max_index + 2);
        if horizon < max_index {
            return Err(Error::HorizonTooSmall { horizon, max_index });
        }
        Ok(Self { specified, horizon })
    }

    /// The pattern `P`: sorted indices of the specified entries.
    pub fn pattern(&self) -> Vec<usize> {
        self.specified.keys().copied().collect()
    }

    pub fn value(&self, index: usize) -> Option<f64> {
        self.specified.get(&index).copied()
    }

    pub fn specified(&self) -> &BTreeMap<usize, f64> {
        &self.specified
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Values along the pattern in index order.
    pub fn pattern_values(&self) -> Vec<f64> {
        self.specified.values().copied().collect()
    }
}

/// Three-valued positivity verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PositiveDefinite,
    PositiveSemidefinite,
    NotPositive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::PositiveDefinite => "positive_definite",
            Verdict::PositiveSemidefinite => "positive_semidefinite",
            Verdict::NotPositive => "not_positive",
        };
        f.write_str(s)
    }
}

/// Arithmetic mode a verdict was computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Float,
    Exact,
}

/// Evidence attached to a `not_positive` verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Smallest eigenvalue of the failing Hankel matrix (float mode).
    Eigenvalue(f64),
    /// Negative principal minor of the failing Hankel matrix (exact mode).
    Minor(BigRational),
    /// Fully specified principal submatrix of a partial sequence that fails,
    /// with its smallest eigenvalue.
    Submatrix {
        indices: Vec<usize>,
        lambda_min: f64,
    },
}

impl Witness {
    /// Float view of the witness value.
    pub fn value(&self) -> f64 {
        match self {
            Witness::Eigenvalue(v) => *v,
            Witness::Minor(r) => r.to_f64().unwrap_or(f64::NEG_INFINITY),
            Witness::Submatrix { lambda_min, .. } => *lambda_min,
        }
    }

    /// Exact witness, present in exact mode only.
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Witness::Minor(r) => Some(r),
            _ => None,
        }
    }
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(None)?;
        match self {
            Witness::Eigenvalue(v) => {
                map.serialize_entry("kind", "eigenvalue")?;
                map.serialize_entry("value", v)?;
            }
            Witness::Minor(r) => {
                map.serialize_entry("kind", "minor")?;
                map.serialize_entry("value", &r.to_string())?;
                map.serialize_entry("value_float", &r.to_f64())?;
            }
            Witness::Submatrix {
                indices,
                lambda_min,
            } => {
                map.serialize_entry("kind", "submatrix")?;
                map.serialize_entry("indices", indices)?;
                map.serialize_entry("value", lambda_min)?;
            }
        }
        map.end()
    }
}

/// Classification verdict with the evidence needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub tolerance_used: f64,
    pub mode: Mode,
}

impl PositivityReport {
    pub fn is_not_positive(&self) -> bool {
        self.verdict == Verdict::NotPositive
    }
}

/// Classifies a sequence by the smallest eigenvalues of `H_0..H_max_order`.
///
/// Positive definite means every `lambda_min(H_k) > tol * scale_k`; a verdict
/// of `not_positive` reports the smallest order with
/// `lambda_min < -tol * scale_k`; anything in the band is semidefinite. The
/// scale is `max(1, max |H_k entry|)`.
pub fn classify_positivity(
    seq: &TruncatedMomentSequence,
    max_order: usize,
    tol: f64,
) -> Result<PositivityReport> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::InvalidTolerance(tol));
    }
    let needed = 2 * max_order + 1;
    if seq.len() < needed {
        return Err(Error::InsufficientMoments {
            needed,
            got: seq.len(),
        });
    }

    let mut all_definite = true;
    for order in 0..=max_order {
        let hankel = build_hankel(seq, order)?;
        let band = tol * hankel.scale();
        let lambda_min = eigen::smallest_eigenvalue(&hankel)
            .map_err(|e| e.tag_order(order))?;
        if lambda_min < -band {
            return Ok(PositivityReport {
                verdict: Verdict::NotPositive,
                failing_order: Some(order),
                witness: Some(Witness::Eigenvalue(lambda_min)),
                tolerance_used: tol,
                mode: Mode::Float,
            });
        }
        if lambda_min <= band {
            all_definite = false;
        }
    }

    Ok(PositivityReport {
        verdict: if all_definite {
            Verdict::PositiveDefinite
        } else {
            Verdict::PositiveSemidefinite
        },
        failing_order: None,
        witness: None,
        tolerance_used: tol,
        mode: Mode::Float,
    })
}

/// Validates a partial sequence by classifying every fully specified
/// principal submatrix of `H_n`, using the default enumeration cap.
pub fn validate_partial(
    pseq: &PartialMomentSequence,
    max_order: usize,
    tol: f64,
) -> Result<PositivityReport> {
    validate_partial_with_cap(pseq, max_order, tol, DEFAULT_ENUMERATION_CAP)
}

/// Subset enumeration behind [`validate_partial`]; subsets of `{0..n}` are
/// visited in ascending bitmask order and the first failing one is reported.
pub fn validate_partial_with_cap(
    pseq: &PartialMomentSequence,
    max_order: usize,
    tol: f64,
    cap: usize,
) -> Result<PositivityReport> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::InvalidTolerance(tol));
    }
    if max_order > cap {
        return Err(Error::OrderTooLarge {
            order: max_order,
            cap,
        });
    }
    if pseq.horizon() < 2 * max_order {
        return Err(Error::InsufficientMoments {
            needed: 2 * max_order + 1,
            got: pseq.horizon() + 1,
        });
    }

    let side = max_order + 1;
    let mut all_definite = true;

    for mask in 1_u64..(1_u64 << side) {
        let indices: Vec<usize> = (0..side).filter(|i| mask >> i & 1 == 1).collect();
        let fully_specified = indices
            .iter()
            .all(|&i| indices.iter().all(|&j| pseq.value(i + j).is_some()));
        if !fully_specified {
            continue;
        }

        let k = indices.len();
        let mut data = vec![0.0; k * k];
        let mut scale: f64 = 1.0;
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                let v = pseq.value(i + j).expect("checked above");
                data[a * k + b] = v;
                scale = scale.max(v.abs());
            }
        }
        let decomposition = eigen::dense_symmetric_eigen(k, &data)?;
        let lambda_min = decomposition.eigenvalues()[0];
        let band = tol * scale;
        if lambda_min < -band {
            return Ok(PositivityReport {
                verdict: Verdict::NotPositive,
                failing_order: indices.last().copied(),
                witness: Some(Witness::Submatrix {
                    indices,
                    lambda_min,
                }),
                tolerance_used: tol,
                mode: Mode::Float,
            });
        }
        if lambda_min <= band {
            all_definite = false;
        }
    }

    Ok(PositivityReport {
        verdict: if all_definite {
            Verdict::PositiveDefinite
        } else {
            Verdict::PositiveSemidefinite
        },
        failing_order: None,
        witness: None,
        tolerance_used: tol,
        mode: Mode::Float,
    })
}
