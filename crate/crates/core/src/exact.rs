//! Exact-rational positivity classification.
//!
//! The float classifier works inside a tolerance band; this module removes
//! the band entirely. Definiteness is decided by symmetric Gaussian
//! elimination over the rationals, which computes the matrix inertia without
//! square roots: congruence transforms preserve the signs of eigenvalues, so
//! counting pivot signs settles positive definite versus semidefinite versus
//! indefinite with no tolerance at all.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::sequence::{Mode, PositivityReport, TruncatedMomentSequence, Verdict, Witness};

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let trimmed = text.trim();
    let bad = || Error::BadRational(text.to_string());
    match trimmed.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = trimmed.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// Convenience constructor for small rationals.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Signature of a symmetric rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    /// A negative principal minor of the input, recorded the moment the
    /// first negative direction appears. Pivots before that moment are all
    /// positive, so the running pivot product is a certificate.
    pub negative_minor: Option<BigRational>,
}

/// Symmetric elimination with diagonal pivoting. Zero diagonals with a live
/// off-diagonal coupling are handled by a 2x2 block pivot, whose determinant
/// `-a^2 < 0` contributes one positive and one negative direction.
pub(crate) fn symmetric_inertia(side: usize, matrix: &[BigRational]) -> Inertia {
    assert_eq!(matrix.len(), side * side);
    let mut a = matrix.to_vec();
    let mut active: Vec<usize> = (0..side).collect();
    let mut inertia = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
        negative_minor: None,
    };
    let mut pivot_product = BigRational::from_integer(BigInt::from(1));

    let at = |a: &[BigRational], i: usize, j: usize| a[i * side + j].clone();

    while !active.is_empty() {
        // Prefer a nonzero diagonal pivot; take the first in index order so
        // the elimination is deterministic.
        if let Some(pos) = active.iter().position(|&i| !a[i * side + i].is_zero()) {
            let p = active[pos];
            let pivot = at(&a, p, p);
            if pivot.is_positive() {
                inertia.positive += 1;
            } else {
                inertia.negative += 1;
            }
            pivot_product *= &pivot;
            if inertia.negative_minor.is_none() && pivot_product.is_negative() {
                inertia.negative_minor = Some(pivot_product.clone());
            }
            active.remove(pos);
            for &r in &active {
                let factor = at(&a, r, p) / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for &c in &active {
                    let delta = &factor * at(&a, p, c);
                    a[r * side + c] -= delta;
                }
            }
            continue;
        }

        // All active diagonals are zero; look for an off-diagonal coupling.
        let mut block = None;
        'search: for (pi, &i) in active.iter().enumerate() {
            for (pj, &j) in active.iter().enumerate().skip(pi + 1) {
                if !a[i * side + j].is_zero() {
                    block = Some((pi, pj, i, j));
                    break 'search;
                }
            }
        }
        match block {
            None => {
                // Active block is identically zero.
                inertia.zero += active.len();
                break;
            }
            Some((pi, pj, i, j)) => {
                let coupling = at(&a, i, j);
                inertia.positive += 1;
                inertia.negative += 1;
                // block determinant is -coupling^2
                pivot_product *= -(&coupling * &coupling);
                if inertia.negative_minor.is_none() && pivot_product.is_negative() {
                    inertia.negative_minor = Some(pivot_product.clone());
                }
                active.remove(pj);
                active.remove(pi);
                // Schur complement against [[0, a], [a, 0]].
                for &r in &active {
                    let ri = at(&a, r, i);
                    let rj = at(&a, r, j);
                    if ri.is_zero() && rj.is_zero() {
                        continue;
                    }
                    for &c in &active {
                        let delta = (&ri * at(&a, j, c) + &rj * at(&a, i, c)) / &coupling;
                        a[r * side + c] -= delta;
                    }
                }
            }
        }
    }

    inertia
}

fn exact_hankel(exact: &[BigRational], order: usize) -> Vec<BigRational> {
    let side = order + 1;
    let mut data = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            data.push(exact[i + j].clone());
        }
    }
    data
}

/// Classifies a sequence carrying exact rationals by the inertia of each
/// nested Hankel matrix. No tolerance is involved; the witness for a
/// `not_positive` verdict is a negative principal minor, exactly.
pub fn classify_exact(
    seq: &TruncatedMomentSequence,
    max_order: usize,
) -> Result<PositivityReport> {
    let exact = seq.exact().ok_or(Error::MissingExact)?;
    let needed = 2 * max_order + 1;
    if exact.len() < needed {
        return Err(Error::InsufficientMoments {
            needed,
            got: exact.len(),
        });
    }

    let mut all_definite = true;
    for order in 0..=max_order {
        let side = order + 1;
        let matrix = exact_hankel(exact, order);
        let inertia = symmetric_inertia(side, &matrix);
        if inertia.negative > 0 {
            return Ok(PositivityReport {
                verdict: Verdict::NotPositive,
                failing_order: Some(order),
                witness: inertia.negative_minor.map(Witness::Minor),
                tolerance_used: 0.0,
                mode: Mode::Exact,
            });
        }
        if inertia.zero > 0 {
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
        tolerance_used: 0.0,
        mode: Mode::Exact,
    })
}

/// Hilbert-style exact sequence `s_k = 1/(k+1)`.
pub fn hilbert_exact(len: usize) -> Vec<BigRational> {
    (0..len).map(|k| ratio(1, k as i64 + 1)).collect()
}

/// Reciprocal-factorial sequence `s_k = 1/(k+1)!`.
pub fn reciprocal_factorial_exact(len: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(len);
    let mut factorial = BigInt::from(1);
    for k in 0..len {
        factorial *= BigInt::from(k as i64 + 1);
        out.push(BigRational::new(BigInt::from(1), factorial.clone()));
    }
    out
}
