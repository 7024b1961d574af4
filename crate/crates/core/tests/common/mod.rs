//! Shared helpers for integration tests: random measure generation and
//! exact-arithmetic oracles kept independent of the library's own
//! classification path.

#![allow(dead_code)]

use momentkit::{Atom, AtomicMeasure, TruncatedMomentSequence};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::Rng;

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact determinant by Laplace expansion along the first row. Exponential,
/// used only on desk-size matrices; deliberately independent of the
/// library's elimination-based classifier.
pub fn laplace_det(matrix: &[Vec<BigRational>]) -> BigRational {
    let n = matrix.len();
    if n == 0 {
        return BigRational::from_integer(BigInt::from(1));
    }
    if n == 1 {
        return matrix[0][0].clone();
    }
    let mut acc = BigRational::from_integer(BigInt::from(0));
    for (col, entry) in matrix[0].iter().enumerate() {
        let minor: Vec<Vec<BigRational>> = matrix[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = entry * laplace_det(&minor);
        if col % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Hankel matrix of an exact sequence as rows of rationals.
pub fn exact_hankel_rows(entries: &[BigRational], order: usize) -> Vec<Vec<BigRational>> {
    (0..=order)
        .map(|i| (0..=order).map(|j| entries[i + j].clone()).collect())
        .collect()
}

/// Random atomic measure with the stated number of atoms, nodes drawn from
/// `node_range` with pairwise gaps of at least `min_gap`, weights from
/// `weight_range`.
pub fn random_measure(
    rng: &mut StdRng,
    atoms: usize,
    node_range: (f64, f64),
    min_gap: f64,
    weight_range: (f64, f64),
) -> AtomicMeasure {
    let mut nodes: Vec<f64> = Vec::with_capacity(atoms);
    while nodes.len() < atoms {
        let candidate = rng.random_range(node_range.0..node_range.1);
        if nodes.iter().all(|&n| (n - candidate).abs() >= min_gap) {
            nodes.push(candidate);
        }
    }
    let atoms: Vec<Atom> = nodes
        .into_iter()
        .map(|node| Atom::new(node, rng.random_range(weight_range.0..weight_range.1)))
        .collect();
    AtomicMeasure::new(atoms).expect("generated atoms are valid")
}

/// Like [`random_measure`], but redraws configurations whose moment data
/// cannot pin the parameters to the requested accuracy in f64: the inverse
/// of the moment map amplifies the ~1-ulp representation noise of the
/// moments by its conditioning, so a draw is kept only if that
/// amplification stays safely below `target_accuracy`.
pub fn random_identifiable_measure(
    rng: &mut StdRng,
    atoms: usize,
    node_range: (f64, f64),
    min_gap: f64,
    weight_range: (f64, f64),
    target_accuracy: f64,
) -> AtomicMeasure {
    loop {
        let candidate = random_measure(rng, atoms, node_range, min_gap, weight_range);
        if inverse_conditioning(&candidate) * 1e-15 < target_accuracy / 10.0 {
            return candidate;
        }
    }
}

/// Rough lower estimate of the infinity-norm of the inverse Jacobian of the
/// scaled moment map at the measure's true parameters, probed with a few
/// sign-pattern right-hand sides.
fn inverse_conditioning(measure: &AtomicMeasure) -> f64 {
    let m = measure.len();
    if m == 0 {
        return 0.0;
    }
    let n = 2 * m;
    let radius = measure
        .atoms()
        .iter()
        .fold(1.0_f64, |acc, a| acc.max(a.node.abs()));
    let mass = measure.total_mass();
    let theta: Vec<f64> = measure.atoms().iter().map(|a| a.node / radius).collect();
    let weight: Vec<f64> = measure.atoms().iter().map(|a| a.weight / mass).collect();

    let mut jacobian = vec![0.0; n * n];
    for k in 0..n {
        for i in 0..m {
            jacobian[k * n + i] = if k == 0 {
                0.0
            } else {
                k as f64 * weight[i] * theta[i].powi(k as i32 - 1)
            };
            jacobian[k * n + m + i] = theta[i].powi(k as i32);
        }
    }

    let mut worst = 0.0_f64;
    for probe in 0..4_u32 {
        let mut rhs: Vec<f64> = (0..n)
            .map(|k| if (k as u32).wrapping_mul(probe + 1).is_multiple_of(3) { 1.0 } else { -1.0 })
            .collect();
        let mut a = jacobian.clone();
        if !lu_solve(&mut a, &mut rhs, n) {
            return f64::INFINITY;
        }
        let norm = rhs.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()));
        worst = worst.max(norm);
    }
    worst
}

fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_row = row;
                pivot_val = v;
            }
        }
        if pivot_val < 1e-300 {
            return false;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        for row in (col + 1)..n {
            let factor = a[row * n + col] / a[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc -= a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
    true
}

pub fn hilbert_floats(len: usize) -> TruncatedMomentSequence {
    TruncatedMomentSequence::new((0..len).map(|k| 1.0 / (k as f64 + 1.0)).collect()).unwrap()
}

pub fn hilbert_with_exact(len: usize) -> TruncatedMomentSequence {
    TruncatedMomentSequence::from_exact((0..len).map(|k| rational(1, k as i64 + 1)).collect())
        .unwrap()
}

pub fn stieltjes_wigert(q: f64, len: usize) -> TruncatedMomentSequence {
    TruncatedMomentSequence::new(
        (0..len)
            .map(|n| q.powf(-((n as f64 + 1.0).powi(2)) / 2.0))
            .collect(),
    )
    .unwrap()
}

/// Max |entry| of a float sequence, floored at one.
pub fn sequence_scale(seq: &TruncatedMomentSequence) -> f64 {
    seq.entries().iter().fold(1.0_f64, |acc, &v| acc.max(v.abs()))
}
