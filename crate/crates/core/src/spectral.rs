//! Smallest-eigenvalue trajectories of nested Hankel matrices and the
//! determinacy heuristic built on them.
//!
//! For a positive sequence, determinacy of the moment problem is equivalent
//! to the smallest Hankel eigenvalue tending to zero with the order. A
//! finite tool can only observe a prefix of that trajectory, so the verdicts
//! here are deliberately named `suggests_*`: a steep log-linear decay over
//! the trailing window suggests a determinate problem, a flat trajectory
//! bounded away from zero suggests an indeterminate one, and anything in
//! between is inconclusive.

use serde::Serialize;

use crate::eigen;
use crate::error::{Error, Result};
use crate::sequence::{build_hankel, TruncatedMomentSequence};
use crate::submoment::{extract_submoment, IndexMap};

/// Default trailing-window length for the log-slope fit.
pub const DEFAULT_WINDOW: usize = 4;
/// Default slope threshold tau; slopes below `-tau` suggest determinacy.
///
/// Calibrated on the two reference sequences at order 8 in double
/// precision: the Hilbert sequence (determinate) fits a trailing slope of
/// about -3.4 while the Stieltjes-Wigert sequence at q = 0.9
/// (indeterminate) is still at about -1.2 there, so 1.5 separates them
/// with margin on both sides.
pub const DEFAULT_SLOPE_THRESHOLD: f64 = 1.5;
/// Default positive floor distinguishing "bounded away from zero".
pub const DEFAULT_FLOOR: f64 = 1e-12;

/// Tuning knobs for [`determinacy_heuristic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicParams {
    pub window: usize,
    pub slope_threshold: f64,
    pub floor: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            slope_threshold: DEFAULT_SLOPE_THRESHOLD,
            floor: DEFAULT_FLOOR,
        }
    }
}

/// Epistemic verdict of the trajectory heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterminacyVerdict {
    SuggestsDeterminate,
    SuggestsIndeterminate,
    Inconclusive,
}

/// Trajectory, fitted log-decay rate, and verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminacyReport {
    pub trajectory: Vec<f64>,
    pub verdict: DeterminacyVerdict,
    pub fit_slope: f64,
    pub window: usize,
    pub floor: f64,
}

/// Smallest eigenvalue of `H_n` for `n = 0..=max_order`.
pub fn eigenvalue_trajectory(
    seq: &TruncatedMomentSequence,
    max_order: usize,
) -> Result<Vec<f64>> {
    let needed = 2 * max_order + 1;
    if seq.len() < needed {
        return Err(Error::InsufficientMoments {
            needed,
            got: seq.len(),
        });
    }
    let mut trajectory = Vec::with_capacity(max_order + 1);
    for order in 0..=max_order {
        let hankel = build_hankel(seq, order)?;
        let lambda = eigen::smallest_eigenvalue(&hankel).map_err(|e| e.tag_order(order))?;
        trajectory.push(lambda);
    }
    Ok(trajectory)
}

/// Least-squares slope of `ln lambda_n` over the trailing window, turned
/// into a three-way verdict. All trajectory entries must be strictly
/// positive; the heuristic is undefined otherwise.
pub fn determinacy_heuristic(
    trajectory: &[f64],
    params: &HeuristicParams,
) -> Result<DeterminacyReport> {
    if params.window < 2 {
        return Err(Error::WindowTooSmall(params.window));
    }
    if trajectory.len() < params.window {
        return Err(Error::TrajectoryTooShort {
            len: trajectory.len(),
            window: params.window,
        });
    }
    for (index, &value) in trajectory.iter().enumerate() {
        if value <= 0.0 || value.is_nan() {
            return Err(Error::NonPositiveTrajectory { index, value });
        }
    }

    let start = trajectory.len() - params.window;
    let points: Vec<(f64, f64)> = trajectory[start..]
        .iter()
        .enumerate()
        .map(|(i, &lambda)| ((start + i) as f64, lambda.ln()))
        .collect();
    let slope = least_squares_slope(&points);

    let last = *trajectory.last().expect("nonempty by window check");
    let verdict = if slope < -params.slope_threshold {
        DeterminacyVerdict::SuggestsDeterminate
    } else if slope >= -params.slope_threshold / 10.0 && last > params.floor {
        DeterminacyVerdict::SuggestsIndeterminate
    } else {
        DeterminacyVerdict::Inconclusive
    };

    Ok(DeterminacyReport {
        trajectory: trajectory.to_vec(),
        verdict,
        fit_slope: slope,
        window: params.window,
        floor: params.floor,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in points {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    num / den
}

/// Pairs the smallest eigenvalues of the extracted subsequence's Hankel
/// matrices with those of the base sequence.
///
/// The subsequence matrix at order `n` embeds as a principal submatrix of
/// the base Hankel matrix at order `n*d + offset/2` (row set
/// `{offset/2 + i*d}`), so the base eigenvalue of each pair is taken at that
/// embedding order; Cauchy interlacing then guarantees
/// `pair.1 >= pair.0` up to the float band. For `d = 1, offset = 0` the
/// pairs are exactly equal.
pub fn interlacing_audit(
    seq: &TruncatedMomentSequence,
    step: usize,
    offset: usize,
    max_order: usize,
) -> Result<Vec<(f64, f64)>> {
    let map = IndexMap::arithmetic(step, offset)?;
    let sub = extract_submoment(seq, &map)?;
    if sub.len() < 2 * max_order + 1 {
        return Err(Error::InsufficientMoments {
            needed: 2 * max_order + 1,
            got: sub.len(),
        });
    }

    let mut pairs = Vec::with_capacity(max_order + 1);
    for n in 0..=max_order {
        let embedding_order = n * step + offset / 2;
        let base = build_hankel(seq, embedding_order)?;
        let lambda_base =
            eigen::smallest_eigenvalue(&base).map_err(|e| e.tag_order(embedding_order))?;
        let sub_hankel = build_hankel(&sub, n)?;
        let lambda_sub =
            eigen::smallest_eigenvalue(&sub_hankel).map_err(|e| e.tag_order(n))?;
        pairs.push((lambda_base, lambda_sub));
    }
    Ok(pairs)
}

/// CSV export of a trajectory with columns `order,lambda_min`.
pub fn trajectory_to_csv(trajectory: &[f64]) -> String {
    let mut out = String::from("order,lambda_min\n");
    for (order, lambda) in trajectory.iter().enumerate() {
        out.push_str(&format!("{order},{lambda}\n"));
    }
    out
}
