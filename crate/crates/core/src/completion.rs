//! Completion of partial sequences whose pattern is an arithmetic
//! progression with even offset.
//!
//! The construction is fully auditable: recover an atomic measure for the
//! specified subsequence, pull its nodes back through the power map
//! `x -> x^step` (nonnegative branch for even steps), fold the offset into
//! the weights, and emit the forward moments of the pulled-back measure up
//! to the horizon. The result reproduces every specified entry and carries
//! the representing measure alongside the completed sequence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{self, moments_of, AtomicMeasure};
use crate::sequence::{
    classify_positivity, PartialMomentSequence, PositivityReport, TruncatedMomentSequence,
    Verdict, DEFAULT_TOLERANCE,
};

/// Tolerance for reproducing the specified entries, relative to their scale.
pub const SPECIFIED_ENTRY_TOLERANCE: f64 = 1e-9;
/// Recovered nodes no lower than this (relative) are clamped to zero for
/// even steps; genuinely negative ones abort the construction.
const NEGATIVE_NODE_BAND: f64 = 1e-9;

/// Shape of a pattern: an arithmetic progression `{k*step + offset}` with
/// even offset, or anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PatternDescriptor {
    Arithmetic { step: usize, offset: usize },
    Other,
}

/// Whether the completed sequence is positive definite at every checkable
/// order or merely semidefinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    Definite,
    Semidefinite,
}

/// A completion together with the measure that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionResult {
    pub completed: TruncatedMomentSequence,
    pub measure: AtomicMeasure,
    pub definiteness: Definiteness,
}

/// Classifies the pattern of a partial sequence. Needs at least three
/// specified entries to commit to a progression.
pub fn detect_pattern(pseq: &PartialMomentSequence) -> Result<PatternDescriptor> {
    let pattern = pseq.pattern();
    if pattern.len() < 3 {
        return Err(Error::TooFewEntries {
            needed: 3,
            got: pattern.len(),
        });
    }
    let offset = pattern[0];
    if !offset.is_multiple_of(2) {
        return Ok(PatternDescriptor::Other);
    }
    let step = pattern[1] - pattern[0];
    if step == 0 {
        return Ok(PatternDescriptor::Other);
    }
    for pair in pattern.windows(2) {
        if pair[1] - pair[0] != step {
            return Ok(PatternDescriptor::Other);
        }
    }
    Ok(PatternDescriptor::Arithmetic { step, offset })
}

/// Completes a partial sequence along an arithmetic pattern.
///
/// The specified subsequence `t_k = s_{k*step + offset}` must classify
/// positive. Recovery of its representing measure adapts to the data: rank
/// deficiency reduces the atom count, and an odd number of specified
/// entries pins one extra node through a modified last recurrence
/// coefficient so that every entry is still matched. For even steps the
/// recovered nodes must be nonnegative (they are moments of an `x^step`
/// pushforward); small negatives are clamped to zero and genuine ones abort.
/// A node at zero cannot absorb a positive offset and also aborts.
pub fn complete_arithmetic(
    pseq: &PartialMomentSequence,
    descriptor: &PatternDescriptor,
) -> Result<CompletionResult> {
    let &PatternDescriptor::Arithmetic { step, offset } = descriptor else {
        return Err(Error::NonArithmeticPattern);
    };
    if offset % 2 != 0 {
        return Err(Error::OddOffset(offset));
    }

    let values = pseq.pattern_values();
    let count = values.len();
    let subsequence = TruncatedMomentSequence::new(values.clone())?;
    let verdict = classify_positivity(
        &subsequence,
        subsequence.max_feasible_order(),
        DEFAULT_TOLERANCE,
    )?;
    if verdict.verdict == Verdict::NotPositive {
        return Err(Error::SubsequenceNotPositive);
    }

    let image_atoms = recover_subsequence_measure(&values, count)?;

    // Pull nodes back through x -> x^step and fold the offset into weights.
    let scale_nodes = image_atoms
        .iter()
        .fold(1.0_f64, |acc, a| acc.max(a.node.abs()));
    let mut atoms = Vec::with_capacity(image_atoms.len());
    for atom in &image_atoms {
        let mut image_node = atom.node;
        if step % 2 == 0 {
            if image_node < -NEGATIVE_NODE_BAND * scale_nodes {
                return Err(Error::EvenStepNegativeNode {
                    step,
                    node: image_node,
                });
            }
            image_node = image_node.max(0.0);
        }
        let node = real_root(image_node, step);
        let weight = if offset == 0 {
            atom.weight
        } else {
            if node == 0.0 {
                return Err(Error::ZeroNodeWithOffset { offset });
            }
            atom.weight / node.powi(offset as i32)
        };
        atoms.push(measures::Atom::new(node, weight));
    }
    let measure = AtomicMeasure::new(atoms)?;

    let completed = moments_of(&measure, pseq.horizon())?;

    // Every specified entry must be reproduced.
    let scale = values.iter().fold(1.0_f64, |acc, &v| acc.max(v.abs()));
    for (&index, &value) in pseq.specified() {
        let got = completed.entry(index).expect("horizon covers pattern");
        let deviation = (got - value).abs();
        if deviation > SPECIFIED_ENTRY_TOLERANCE * scale {
            return Err(Error::CompletionMismatch { index, deviation });
        }
    }

    // The finite-atom completion is definite through order n exactly when
    // it has more than n atoms; offsets > 0 are only ever claimed
    // semidefinite.
    let checkable_order = pseq.horizon() / 2;
    let definiteness = if offset == 0 && measure.len() > checkable_order {
        Definiteness::Definite
    } else {
        Definiteness::Semidefinite
    };

    Ok(CompletionResult {
        completed,
        measure,
        definiteness,
    })
}

/// Recovers a measure for the specified values, reducing the atom count on
/// rank deficiency. An odd value count leaves one moment unmatched by the
/// plain rule, so in that case the rule is rebuilt with one more atom and a
/// pinned node chosen below (or inside the nonnegative part of) the support.
fn recover_subsequence_measure(values: &[f64], count: usize) -> Result<Vec<measures::Atom>> {
    let gauss_atoms = count / 2;
    let mut m = gauss_atoms.max(1);
    let plain = loop {
        match measures::quadrature_from_moments(values, m, None) {
            Ok(atoms) => break atoms,
            Err(Error::RankDeficient(r)) if r > 0 && r < m => m = r,
            Err(other) => return Err(map_recovery_error(other)),
        }
    };

    if count.is_multiple_of(2) || m < gauss_atoms {
        // Even count: the m-point rule matches all entries. Reduced rank:
        // the data is exactly m-atomic, so every entry matches too.
        return Ok(plain);
    }

    // Odd count at full rank: check whether the trailing entry happens to
    // match already (atomic data), otherwise pin one extra node.
    let trailing = values[count - 1];
    let rule_measure = AtomicMeasure::new(plain.clone())?;
    let forward = moments_of(&rule_measure, count - 1)?;
    let scale = values.iter().fold(1.0_f64, |acc, &v| acc.max(v.abs()));
    if (forward.entries()[count - 1] - trailing).abs() <= SPECIFIED_ENTRY_TOLERANCE * scale {
        return Ok(plain);
    }

    let anchor = pick_anchor(&plain);
    match measures::quadrature_from_moments(values, gauss_atoms + 1, Some(anchor)) {
        Ok(atoms) => Ok(atoms),
        Err(Error::RankDeficient(_)) => Ok(plain),
        Err(other) => Err(map_recovery_error(other)),
    }
}

/// Anchor for the pinned extra node: half the smallest plain-rule node when
/// everything is nonnegative (keeps the anchored rule on the nonnegative
/// axis), otherwise a point strictly below the support.
fn pick_anchor(plain: &[measures::Atom]) -> f64 {
    let min = plain.iter().map(|a| a.node).fold(f64::INFINITY, f64::min);
    let max = plain.iter().map(|a| a.node).fold(f64::NEG_INFINITY, f64::max);
    if min >= 0.0 {
        min / 2.0
    } else {
        min - (max - min) - 1.0
    }
}

fn map_recovery_error(error: Error) -> Error {
    match error {
        Error::NotPositive => Error::SubsequenceNotPositive,
        other => other,
    }
}

fn real_root(value: f64, step: usize) -> f64 {
    if step == 1 {
        return value;
    }
    if step.is_multiple_of(2) {
        value.powf(1.0 / step as f64)
    } else {
        value.signum() * value.abs().powf(1.0 / step as f64)
    }
}

/// Audit of a completion against its partial sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionReport {
    pub specified_entries_match: bool,
    pub max_specified_deviation: f64,
    pub positivity: PositivityReport,
    pub definiteness_consistent: bool,
    pub passed: bool,
}

/// Checks (a) agreement on the specified entries, (b) positivity of the
/// completed sequence, and (c) that the definiteness claim is consistent
/// with the classification (a semidefinite claim is conservative, so a
/// definite classification does not fail it).
pub fn verify_completion(
    pseq: &PartialMomentSequence,
    result: &CompletionResult,
) -> Result<CompletionReport> {
    let scale = pseq
        .pattern_values()
        .iter()
        .fold(1.0_f64, |acc, &v| acc.max(v.abs()));
    let mut max_deviation = 0.0_f64;
    let mut matches = true;
    for (&index, &value) in pseq.specified() {
        match result.completed.entry(index) {
            Some(got) => {
                let deviation = (got - value).abs();
                max_deviation = max_deviation.max(deviation);
                if deviation > SPECIFIED_ENTRY_TOLERANCE * scale {
                    matches = false;
                }
            }
            None => {
                matches = false;
            }
        }
    }

    let positivity = classify_positivity(
        &result.completed,
        result.completed.max_feasible_order(),
        DEFAULT_TOLERANCE,
    )?;

    let definiteness_consistent = match result.definiteness {
        Definiteness::Definite => positivity.verdict == Verdict::PositiveDefinite,
        Definiteness::Semidefinite => positivity.verdict != Verdict::NotPositive,
    };

    let passed =
        matches && positivity.verdict != Verdict::NotPositive && definiteness_consistent;
    Ok(CompletionReport {
        specified_entries_match: matches,
        max_specified_deviation: max_deviation,
        positivity,
        definiteness_consistent,
        passed,
    })
}
