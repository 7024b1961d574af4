//! Perturbation admissibility of moment sequences by signed atomic measures.
//!
//! Adding a signed measure `mu = mu_plus - mu_minus` to a base measure keeps
//! the moments representable exactly when the negative part fits under the
//! base: every `mu_minus` atom must sit on a base node and request no more
//! weight than that node carries. The report also exposes the largest
//! admissible scaling `epsilon_max` of `mu`, which is what the violations
//! leave room for.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::measures::{moments_of, AtomicMeasure, SignedAtomicMeasure};
use crate::sequence::{
    classify_positivity, PositivityReport, TruncatedMomentSequence, DEFAULT_TOLERANCE,
};

/// Default tolerance for matching perturbation nodes against base nodes.
pub const DEFAULT_NODE_TOLERANCE: f64 = 1e-9;
/// Slack added to weight comparisons so exact boundary cases stay dominated.
const WEIGHT_SLACK: f64 = 1e-12;

/// A way in which the negative part fails to fit under the base measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DominationViolation {
    /// Negative-part atom with no base node within tolerance.
    MissingNode { node: f64, requested: f64 },
    /// Matched node whose requested weight exceeds the available weight.
    ExcessWeight {
        node: f64,
        available: f64,
        requested: f64,
    },
}

/// Outcome of the domination check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub dominated: bool,
    pub violations: Vec<DominationViolation>,
    /// Largest `epsilon` in `[0, 1]` such that `epsilon * mu` is dominated:
    /// 1 when dominated, 0 when support is violated, otherwise the smallest
    /// available/requested weight ratio.
    pub epsilon_max: f64,
}

/// Checks whether the negative part of `mu` fits under `sigma`: support
/// inclusion within `node_tol` plus per-node weight bounds. A negative-part
/// node within tolerance of two base nodes is an error rather than a guess.
pub fn check_domination(
    sigma: &AtomicMeasure,
    mu: &SignedAtomicMeasure,
    node_tol: f64,
) -> Result<DominationReport> {
    if node_tol < 0.0 || !node_tol.is_finite() {
        return Err(Error::InvalidTolerance(node_tol));
    }

    let mut violations = Vec::new();
    let mut epsilon_max = 1.0_f64;
    let mut support_violated = false;

    for atom in mu.minus.atoms() {
        let matches: Vec<_> = sigma
            .atoms()
            .iter()
            .filter(|base| (base.node - atom.node).abs() <= node_tol)
            .collect();
        match matches.len() {
            0 => {
                support_violated = true;
                violations.push(DominationViolation::MissingNode {
                    node: atom.node,
                    requested: atom.weight,
                });
            }
            1 => {
                let base = matches[0];
                epsilon_max = epsilon_max.min(base.weight / atom.weight);
                if atom.weight > base.weight + WEIGHT_SLACK {
                    violations.push(DominationViolation::ExcessWeight {
                        node: atom.node,
                        available: base.weight,
                        requested: atom.weight,
                    });
                }
            }
            _ => {
                return Err(Error::AmbiguousMatch { node: atom.node });
            }
        }
    }

    let dominated = violations.is_empty();
    let epsilon_max = if dominated {
        1.0
    } else if support_violated {
        0.0
    } else {
        epsilon_max.min(1.0)
    };

    Ok(DominationReport {
        dominated,
        violations,
        epsilon_max,
    })
}

/// Perturbs the sequence represented by `sigma` with the moments of `mu`
/// and classifies the result. The caller's sequence must agree with the
/// moments of `sigma`; domination then guarantees the perturbed sequence is
/// never classified `not_positive`.
pub fn perturb_and_classify(
    seq: &TruncatedMomentSequence,
    sigma: &AtomicMeasure,
    mu: &SignedAtomicMeasure,
    k_max: usize,
) -> Result<(TruncatedMomentSequence, PositivityReport, DominationReport)> {
    let base = moments_of(sigma, k_max)?;
    if seq.len() < k_max + 1 {
        return Err(Error::InsufficientMoments {
            needed: k_max + 1,
            got: seq.len(),
        });
    }
    let scale = base
        .entries()
        .iter()
        .fold(1.0_f64, |acc, &s| acc.max(s.abs()));
    let deviation = seq
        .entries()
        .iter()
        .take(k_max + 1)
        .zip(base.entries())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    if deviation > 1e-9 * scale {
        return Err(Error::MeasureMismatch { deviation });
    }

    let plus = moments_of(&mu.plus, k_max)?;
    let minus = moments_of(&mu.minus, k_max)?;
    let perturbed_entries: Vec<f64> = (0..=k_max)
        .map(|k| {
            seq.entry(k).expect("length checked") + plus.entries()[k] - minus.entries()[k]
        })
        .collect();
    let perturbed = TruncatedMomentSequence::new(perturbed_entries)?;

    let report = classify_positivity(&perturbed, k_max / 2, DEFAULT_TOLERANCE)?;
    let domination = check_domination(sigma, mu, DEFAULT_NODE_TOLERANCE)?;
    Ok((perturbed, report, domination))
}

/// Zeroes the entry `s_{2m}` and reclassifies: for a positive definite
/// sequence with a nonzero off-diagonal row this ejects the sequence from
/// the positive cone at order exactly `m`. Uses the exact path when the
/// sequence carries rationals, so the witness minor is exact.
pub fn ejection_demo(seq: &TruncatedMomentSequence, m: usize) -> Result<PositivityReport> {
    let needed = 2 * m + 1;
    if seq.len() < needed {
        return Err(Error::InsufficientMoments {
            needed,
            got: seq.len(),
        });
    }

    match seq.exact() {
        Some(exact) => {
            let mut modified = exact.to_vec();
            modified[2 * m] = BigRational::zero();
            let zeroed = TruncatedMomentSequence::from_exact(modified)?;
            exact::classify_exact(&zeroed, m)
        }
        None => {
            let mut entries = seq.entries().to_vec();
            entries[2 * m] = 0.0;
            let zeroed = TruncatedMomentSequence::new(entries)?;
            classify_positivity(&zeroed, m, DEFAULT_TOLERANCE)
        }
    }
}

/// Even-moment domination bound: for every `k` with `2k <= k_max`,
/// the negative part's even moments may not exceed the base's
/// (`t_{2,2k} <= s_{2k}`). Returns the first violating `k`, if any.
pub fn even_moment_bound_violation(
    sigma: &AtomicMeasure,
    mu_minus: &AtomicMeasure,
    k_max: usize,
    tol: f64,
) -> Result<Option<usize>> {
    let base = moments_of(sigma, k_max)?;
    let minus = moments_of(mu_minus, k_max)?;
    for k in 0..=(k_max / 2) {
        let s = base.entries()[2 * k];
        let t = minus.entries()[2 * k];
        if t > s + tol * s.abs().max(1.0) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}
