//! Stieltjes transforms of atomic measures, evaluated off the real axis,
//! and numerical checks of the identities tying a measure's transform to
//! the transform of its shifted or power-extracted counterpart.
//!
//! For an atomic measure the transform is the finite sum
//! `w(lambda) = sum_i c_i / (p_i - lambda)`, bounded in modulus by
//! `s_0 / |Im lambda|`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::sequence::TruncatedMomentSequence;

/// A point in the complex plane; operations that evaluate transforms refuse
/// points on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn require_off_axis(self) -> Result<Complex64> {
        if self.im == 0.0 || !self.im.is_finite() || !self.re.is_finite() {
            return Err(Error::RealLambda);
        }
        Ok(self.to_complex())
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im >= 0.0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

impl FromStr for ComplexPoint {
    type Err = Error;

    /// Accepts `a`, `bi`, `a+bi`, `a-bi`, with `i` or `j` as the unit.
    fn from_str(text: &str) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::BadNumber(text.to_string());
        if cleaned.is_empty() {
            return Err(bad());
        }
        let norm = cleaned.replace('j', "i");

        // split at the last +/- that is not an exponent sign and not leading
        let bytes = norm.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }

        let parse_imag = |s: &str| -> Result<f64> {
            let body = s.strip_suffix('i').ok_or_else(bad)?;
            match body {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => body.parse().map_err(|_| bad()),
            }
        };

        if norm.ends_with('i') {
            match split {
                Some(idx) => {
                    let re: f64 = norm[..idx].parse().map_err(|_| bad())?;
                    let im = parse_imag(&norm[idx..])?;
                    Ok(Self { re, im })
                }
                None => Ok(Self {
                    re: 0.0,
                    im: parse_imag(&norm)?,
                }),
            }
        } else {
            let re: f64 = norm.parse().map_err(|_| bad())?;
            Ok(Self { re, im: 0.0 })
        }
    }
}

/// `w(lambda) = sum_i c_i / (p_i - lambda)` for `Im lambda != 0`.
pub fn stieltjes_transform(measure: &AtomicMeasure, lambda: ComplexPoint) -> Result<Complex64> {
    let z = lambda.require_off_axis()?;
    let mut acc = Complex64::new(0.0, 0.0);
    for atom in measure.atoms() {
        acc += atom.weight / (Complex64::new(atom.node, 0.0) - z);
    }
    Ok(acc)
}

/// The lambda-dependent constant in the shifted-transform relation:
/// `C(lambda) = sum_{j=0}^{offset-1} lambda^{offset-1-j} s_j`, the polynomial
/// part of dividing `x^offset` by `x - lambda`. Zero offset gives zero.
pub fn circle_constant(
    seq: &TruncatedMomentSequence,
    offset: usize,
    lambda: ComplexPoint,
) -> Result<Complex64> {
    if seq.len() < offset {
        return Err(Error::InsufficientMoments {
            needed: offset,
            got: seq.len(),
        });
    }
    let z = lambda.to_complex();
    let mut acc = Complex64::new(0.0, 0.0);
    // Horner over j: C = s_0 z^{offset-1} + s_1 z^{offset-2} + ... + s_{offset-1}
    for j in 0..offset {
        acc = acc * z + seq.entry(j).expect("length checked");
    }
    Ok(acc)
}

/// Residual `|w_shifted(lambda) - C(lambda) - lambda^offset * w_base(lambda)|`
/// where `shifted` represents the offset-shifted moments of `base`.
pub fn circle_relation_check(
    base: &AtomicMeasure,
    shifted: &AtomicMeasure,
    offset: usize,
    lambda: ComplexPoint,
) -> Result<f64> {
    if !offset.is_multiple_of(2) {
        return Err(Error::OddOffset(offset));
    }
    let z = lambda.require_off_axis()?;
    let w_base = stieltjes_transform(base, lambda)?;
    let w_shifted = stieltjes_transform(shifted, lambda)?;
    let moments = crate::measures::moments_of(base, offset.max(1) - 1)?;
    let constant = circle_constant(&moments, offset, lambda)?;
    Ok((w_shifted - constant - z.powu(offset as u32) * w_base).norm())
}

/// Residual of the power-extraction relation
/// `|sum_i c_i p_i^offset / (p_i^step - lambda) - w_image(lambda)|` where
/// `image` represents the subsequence `s_{k*step + offset}`.
pub fn quotient_relation_check(
    base: &AtomicMeasure,
    image: &AtomicMeasure,
    step: usize,
    offset: usize,
    lambda: ComplexPoint,
) -> Result<f64> {
    if step == 0 {
        return Err(Error::ZeroStep);
    }
    if !offset.is_multiple_of(2) {
        return Err(Error::OddOffset(offset));
    }
    let z = lambda.require_off_axis()?;
    let mut lhs = Complex64::new(0.0, 0.0);
    for atom in base.atoms() {
        let numerator = atom.weight * atom.node.powi(offset as i32);
        let denominator = Complex64::new(atom.node.powi(step as i32), 0.0) - z;
        lhs += numerator / denominator;
    }
    let rhs = stieltjes_transform(image, lambda)?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Atom;
    use approx::assert_abs_diff_eq;

    #[test]
    fn transform_of_point_mass_at_origin() {
        let w = stieltjes_transform(&AtomicMeasure::delta(0.0), ComplexPoint::new(0.0, 1.0))
            .unwrap();
        // 1 / (0 - i) = i
        assert_abs_diff_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn transform_of_unit_mass_at_one() {
        let w = stieltjes_transform(&AtomicMeasure::delta(1.0), ComplexPoint::new(1.0, 1.0))
            .unwrap();
        // 1 / (1 - (1+i)) = 1 / (-i) = i
        assert_abs_diff_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn transform_of_symmetric_pair() {
        let measure =
            AtomicMeasure::new(vec![Atom::new(-1.0, 0.5), Atom::new(1.0, 0.5)]).unwrap();
        let w = stieltjes_transform(&measure, ComplexPoint::new(0.0, 1.0)).unwrap();
        // 0.5/(-1-i) + 0.5/(1-i) = i/2
        assert_abs_diff_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.im, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn real_lambda_rejected() {
        assert_eq!(
            stieltjes_transform(&AtomicMeasure::delta(1.0), ComplexPoint::new(2.0, 0.0)),
            Err(Error::RealLambda)
        );
    }

    #[test]
    fn modulus_bound_holds() {
        let measure = AtomicMeasure::new(vec![
            Atom::new(-3.0, 0.25),
            Atom::new(0.5, 1.25),
            Atom::new(4.0, 0.5),
        ])
        .unwrap();
        for lambda in [
            ComplexPoint::new(1.0, 1.0),
            ComplexPoint::new(-2.0, 0.01),
            ComplexPoint::new(3.0, -0.5),
        ] {
            let w = stieltjes_transform(&measure, lambda).unwrap();
            assert!(w.norm() <= measure.total_mass() / lambda.im.abs() + 1e-12);
        }
    }

    #[test]
    fn circle_constant_zero_offset_is_zero() {
        let seq = TruncatedMomentSequence::new(vec![1.0, 2.0]).unwrap();
        let c = circle_constant(&seq, 0, ComplexPoint::new(1.0, 2.0)).unwrap();
        assert_abs_diff_eq!(c.norm(), 0.0);
    }

    #[test]
    fn circle_constant_needs_offset_many_moments() {
        let seq = TruncatedMomentSequence::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(
            circle_constant(&seq, 4, ComplexPoint::new(0.0, 1.0)),
            Err(Error::InsufficientMoments { needed: 4, got: 2 })
        );
    }

    #[test]
    fn circle_constant_of_flat_sequence() {
        // all-ones moments, offset 2: C = lambda + 1
        let seq = TruncatedMomentSequence::new(vec![1.0, 1.0, 1.0]).unwrap();
        let lambda = ComplexPoint::new(0.5, 2.0);
        let c = circle_constant(&seq, 2, lambda).unwrap();
        assert_abs_diff_eq!(c.re, 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.im, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn circle_constant_of_doubling_sequence() {
        // moments 2^j, offset 2: C = lambda + 2
        let seq = TruncatedMomentSequence::new(vec![1.0, 2.0, 4.0]).unwrap();
        let lambda = ComplexPoint::new(0.0, 1.0);
        let c = circle_constant(&seq, 2, lambda).unwrap();
        assert_abs_diff_eq!(c.re, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn circle_relation_on_unit_mass() {
        let delta_one = AtomicMeasure::delta(1.0);
        let residual = circle_relation_check(
            &delta_one,
            &delta_one,
            2,
            ComplexPoint::new(0.0, 2.0),
        )
        .unwrap();
        assert!(residual <= 1e-14);
    }

    #[test]
    fn circle_relation_identity_offset() {
        let measure = AtomicMeasure::new(vec![Atom::new(-1.5, 0.5), Atom::new(2.0, 1.0)]).unwrap();
        let residual =
            circle_relation_check(&measure, &measure, 0, ComplexPoint::new(1.0, -1.0)).unwrap();
        assert_abs_diff_eq!(residual, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn circle_relation_on_weighted_shift() {
        let base = AtomicMeasure::delta(2.0);
        let shifted = base.shift_weighted(2).unwrap();
        let residual =
            circle_relation_check(&base, &shifted, 2, ComplexPoint::new(0.0, 1.0)).unwrap();
        assert!(residual <= 1e-12);
    }

    #[test]
    fn quotient_relation_on_square_map() {
        let base = AtomicMeasure::delta(2.0);
        let image = base.pushforward_power(2, 0).unwrap();
        let residual =
            quotient_relation_check(&base, &image, 2, 0, ComplexPoint::new(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(residual, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn quotient_relation_degenerates_at_step_one() {
        let measure = AtomicMeasure::new(vec![Atom::new(0.5, 0.5), Atom::new(-3.0, 1.5)]).unwrap();
        let residual =
            quotient_relation_check(&measure, &measure, 1, 0, ComplexPoint::new(2.0, 0.5))
                .unwrap();
        assert_abs_diff_eq!(residual, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn quotient_relation_with_collisions() {
        let base = AtomicMeasure::new(vec![Atom::new(-1.0, 0.5), Atom::new(1.0, 0.5)]).unwrap();
        let image = base.pushforward_power(2, 0).unwrap();
        assert_eq!(image.len(), 1);
        let residual =
            quotient_relation_check(&base, &image, 2, 0, ComplexPoint::new(0.0, 1.0)).unwrap();
        assert!(residual <= 1e-12);
    }

    #[test]
    fn circle_equals_quotient_at_step_one() {
        let base = AtomicMeasure::new(vec![Atom::new(0.5, 1.0), Atom::new(3.0, 0.25)]).unwrap();
        let shifted = base.shift_weighted(2).unwrap();
        let lambda = ComplexPoint::new(1.0, 1.0);
        let c = circle_relation_check(&base, &shifted, 2, lambda).unwrap();
        let q = quotient_relation_check(&base, &shifted, 1, 2, lambda).unwrap();
        assert_abs_diff_eq!(c, q, epsilon = 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        let measure = AtomicMeasure::new(vec![Atom::new(-2.0, 0.5), Atom::new(1.5, 1.0)]).unwrap();
        let w = stieltjes_transform(&measure, ComplexPoint::new(1.0, 2.0)).unwrap();
        let w_conj = stieltjes_transform(&measure, ComplexPoint::new(1.0, -2.0)).unwrap();
        assert_abs_diff_eq!(w.re, w_conj.re, epsilon = 1e-15);
        assert_abs_diff_eq!(w.im, -w_conj.im, epsilon = 1e-15);
    }

    #[test]
    fn parse_complex_forms() {
        assert_eq!("1+2i".parse::<ComplexPoint>().unwrap(), ComplexPoint::new(1.0, 2.0));
        assert_eq!("-1-0.5i".parse::<ComplexPoint>().unwrap(), ComplexPoint::new(-1.0, -0.5));
        assert_eq!("2i".parse::<ComplexPoint>().unwrap(), ComplexPoint::new(0.0, 2.0));
        assert_eq!("-i".parse::<ComplexPoint>().unwrap(), ComplexPoint::new(0.0, -1.0));
        assert_eq!("3".parse::<ComplexPoint>().unwrap(), ComplexPoint::new(3.0, 0.0));
        assert_eq!("1e-3+2e2i".parse::<ComplexPoint>().unwrap(), ComplexPoint::new(1e-3, 200.0));
        assert!("bogus".parse::<ComplexPoint>().is_err());
    }
}
