//! Extraction of submoment sequences along arithmetic index maps, and
//! admissibility testing of index lists.
//!
//! An index map `k -> k*d + offset` with even offset sends every positive
//! sequence to a positive sequence; those are exactly the extractions a
//! desk check can certify. The admissibility test decides whether a finite
//! index list has that shape, and on failure returns the witness that breaks
//! it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::sequence::TruncatedMomentSequence;

/// How the extraction index is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexMapKind {
    /// `k -> k + offset`: drops the first `offset` entries.
    Shift,
    /// `k -> k*d + offset`: every `d`-th entry starting at `offset`.
    Arithmetic,
}

/// An admissible extraction map: step `d >= 1` and even offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexMap {
    step: usize,
    offset: usize,
    kind: IndexMapKind,
}

impl IndexMap {
    /// Arithmetic extraction `k -> k*step + offset`.
    pub fn arithmetic(step: usize, offset: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::ZeroStep);
        }
        if !offset.is_multiple_of(2) {
            return Err(Error::OddOffset(offset));
        }
        Ok(Self {
            step,
            offset,
            kind: IndexMapKind::Arithmetic,
        })
    }

    /// Shift extraction `k -> k + offset`.
    pub fn shift(offset: usize) -> Result<Self> {
        if !offset.is_multiple_of(2) {
            return Err(Error::OddOffset(offset));
        }
        Ok(Self {
            step: 1,
            offset,
            kind: IndexMapKind::Shift,
        })
    }

    /// Converts the skip-count convention, where `skip` entries are dropped
    /// between successive picks (`k -> k + k*skip + offset`), to the
    /// canonical step form with `step = skip + 1`.
    pub fn arithmetic_from_skip(skip: usize, offset: usize) -> Result<Self> {
        Self::arithmetic(skip + 1, offset)
    }

    pub fn index(&self, k: usize) -> usize {
        k * self.step + self.offset
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn kind(&self) -> IndexMapKind {
        self.kind
    }
}

/// Extracts the subsequence `s~_k = s_{k*d + offset}`, taking every entry the
/// input can supply. At least three extracted entries are required.
pub fn extract_submoment(
    seq: &TruncatedMomentSequence,
    map: &IndexMap,
) -> Result<TruncatedMomentSequence> {
    let mut extracted = Vec::new();
    let mut k = 0;
    while let Some(value) = seq.entry(map.index(k)) {
        extracted.push(value);
        k += 1;
    }
    if extracted.len() < 3 {
        return Err(Error::InsufficientMoments {
            needed: map.index(2) + 1,
            got: seq.len(),
        });
    }
    TruncatedMomentSequence::new(extracted)
}

/// Why an index list fails admissibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AdmissibilityWitness {
    /// Leading offset is odd, so `a^{l_0} < 0` for negative `a`.
    OddLeadingOffset { offset: usize },
    /// First triple violating `2*l_{i+1} = l_i + l_{i+2}`.
    BrokenProgression { index: usize, triple: [usize; 3] },
    /// The progression decreases; steps must be nonnegative integers.
    DecreasingStep { index: usize, from: usize, to: usize },
}

/// Outcome of testing an index list for admissibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Admissibility {
    Admissible { step: usize, offset: usize },
    Inadmissible { witness: AdmissibilityWitness },
}

/// Decides whether `indices` is an arithmetic progression with even first
/// term and nonnegative step: exactly the lists for which `a^{l_k}` is a
/// positive sequence for every real `a`.
pub fn index_admissibility(indices: &[usize]) -> Result<Admissibility> {
    if indices.len() < 3 {
        return Err(Error::TooFewEntries {
            needed: 3,
            got: indices.len(),
        });
    }
    let offset = indices[0];
    if !offset.is_multiple_of(2) {
        return Ok(Admissibility::Inadmissible {
            witness: AdmissibilityWitness::OddLeadingOffset { offset },
        });
    }
    for (index, pair) in indices.windows(2).enumerate() {
        if pair[1] < pair[0] {
            return Ok(Admissibility::Inadmissible {
                witness: AdmissibilityWitness::DecreasingStep {
                    index,
                    from: pair[0],
                    to: pair[1],
                },
            });
        }
    }
    for (index, triple) in indices.windows(3).enumerate() {
        if triple[0] + triple[2] != 2 * triple[1] {
            return Ok(Admissibility::Inadmissible {
                witness: AdmissibilityWitness::BrokenProgression {
                    index,
                    triple: [triple[0], triple[1], triple[2]],
                },
            });
        }
    }
    Ok(Admissibility::Admissible {
        step: indices[1] - indices[0],
        offset,
    })
}

/// Evaluates `|sum_i c_i P(p_i) p_i^offset - sum_j c~_j P(p~_j)|`, the
/// residual of the shift identity between a measure and the measure
/// representing its offset-shifted moments, tested against one polynomial.
/// Coefficients are low degree first.
pub fn shift_identity_check(
    base: &AtomicMeasure,
    shifted: &AtomicMeasure,
    offset: usize,
    poly: &[f64],
) -> Result<f64> {
    if !offset.is_multiple_of(2) {
        return Err(Error::OddOffset(offset));
    }
    let eval = |x: f64| poly.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let lhs: f64 = base
        .atoms()
        .iter()
        .map(|a| a.weight * eval(a.node) * a.node.powi(offset as i32))
        .sum();
    let rhs: f64 = shifted
        .atoms()
        .iter()
        .map(|a| a.weight * eval(a.node))
        .sum();
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{moments_of, Atom};
    use approx::assert_abs_diff_eq;

    fn hilbert(len: usize) -> TruncatedMomentSequence {
        TruncatedMomentSequence::new((0..len).map(|k| 1.0 / (k as f64 + 1.0)).collect()).unwrap()
    }

    #[test]
    fn even_extraction_of_hilbert() {
        let map = IndexMap::arithmetic(2, 0).unwrap();
        let sub = extract_submoment(&hilbert(9), &map).unwrap();
        let expected: Vec<f64> = (0..5).map(|k| 1.0 / (2.0 * k as f64 + 1.0)).collect();
        assert_eq!(sub.entries(), expected.as_slice());
    }

    #[test]
    fn identity_extraction_is_identity() {
        let seq = hilbert(7);
        let map = IndexMap::arithmetic(1, 0).unwrap();
        let sub = extract_submoment(&seq, &map).unwrap();
        assert_eq!(sub.entries(), seq.entries());
    }

    #[test]
    fn offset_extraction_of_powers_of_two() {
        let seq =
            TruncatedMomentSequence::new((0..7).map(|k| 2.0_f64.powi(k)).collect()).unwrap();
        let map = IndexMap::arithmetic(2, 2).unwrap();
        let sub = extract_submoment(&seq, &map).unwrap();
        assert_eq!(sub.entries(), &[4.0, 16.0, 64.0]);
    }

    #[test]
    fn odd_offset_rejected() {
        assert_eq!(IndexMap::arithmetic(2, 3), Err(Error::OddOffset(3)));
        assert_eq!(IndexMap::shift(1), Err(Error::OddOffset(1)));
    }

    #[test]
    fn zero_step_rejected() {
        assert_eq!(IndexMap::arithmetic(0, 0), Err(Error::ZeroStep));
    }

    #[test]
    fn skip_convention_normalizes_to_step() {
        // skipping d entries between picks means step d + 1
        let map = IndexMap::arithmetic_from_skip(2, 4).unwrap();
        assert_eq!(map.step(), 3);
        assert_eq!(map.index(0), 4);
        assert_eq!(map.index(2), 10);
        let identity = IndexMap::arithmetic_from_skip(0, 0).unwrap();
        assert_eq!(identity.index(5), 5);
    }

    #[test]
    fn too_short_extraction_rejected() {
        let seq = TruncatedMomentSequence::new(vec![1.0, 0.5, 0.25]).unwrap();
        let map = IndexMap::arithmetic(2, 0).unwrap();
        assert!(matches!(
            extract_submoment(&seq, &map),
            Err(Error::InsufficientMoments { .. })
        ));
    }

    #[test]
    fn admissible_progression() {
        assert_eq!(
            index_admissibility(&[0, 3, 6, 9]).unwrap(),
            Admissibility::Admissible { step: 3, offset: 0 }
        );
    }

    #[test]
    fn constant_list_is_admissible_with_zero_step() {
        assert_eq!(
            index_admissibility(&[4, 4, 4]).unwrap(),
            Admissibility::Admissible { step: 0, offset: 4 }
        );
    }

    #[test]
    fn odd_offset_witness() {
        assert_eq!(
            index_admissibility(&[1, 2, 3]).unwrap(),
            Admissibility::Inadmissible {
                witness: AdmissibilityWitness::OddLeadingOffset { offset: 1 }
            }
        );
    }

    #[test]
    fn broken_progression_witness() {
        assert_eq!(
            index_admissibility(&[0, 2, 6]).unwrap(),
            Admissibility::Inadmissible {
                witness: AdmissibilityWitness::BrokenProgression {
                    index: 0,
                    triple: [0, 2, 6]
                }
            }
        );
    }

    #[test]
    fn too_few_indices_rejected() {
        assert_eq!(
            index_admissibility(&[0, 2]),
            Err(Error::TooFewEntries { needed: 3, got: 2 })
        );
    }

    #[test]
    fn shift_identity_on_unit_mass() {
        let delta_one = AtomicMeasure::new(vec![Atom::new(1.0, 1.0)]).unwrap();
        let residual =
            shift_identity_check(&delta_one, &delta_one, 2, &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(residual, 0.0);
    }

    #[test]
    fn shift_identity_on_scaled_shift() {
        // Shifting delta_2 by offset 2 is represented by 4*delta_2.
        let base = AtomicMeasure::new(vec![Atom::new(2.0, 1.0)]).unwrap();
        let shifted = AtomicMeasure::new(vec![Atom::new(2.0, 4.0)]).unwrap();
        let residual = shift_identity_check(&base, &shifted, 2, &[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(residual, 0.0);
    }

    #[test]
    fn extraction_composes() {
        let seq = moments_of(
            &AtomicMeasure::new(vec![Atom::new(0.5, 1.0), Atom::new(1.5, 0.25)]).unwrap(),
            24,
        )
        .unwrap();
        let once = extract_submoment(&seq, &IndexMap::arithmetic(2, 0).unwrap()).unwrap();
        let twice = extract_submoment(&once, &IndexMap::arithmetic(3, 0).unwrap()).unwrap();
        let direct = extract_submoment(&seq, &IndexMap::arithmetic(6, 0).unwrap()).unwrap();
        for (a, b) in twice.entries().iter().zip(direct.entries()) {
            assert_abs_diff_eq!(a, b);
        }
    }
}
