//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! the implicit-shift QL sweep, in the classical EISPACK/JAMA lineage.
//!
//! The sweep order is fixed, so identical inputs always produce identical
//! output. Matrices here are desk-scale (sides well under 100), so no
//! blocking or parallelism is attempted.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::HankelMatrix;

/// Iteration cap per eigenvalue in the QL sweep.
const MAX_QL_ITERATIONS: usize = 50;

/// Full spectrum of a symmetric matrix: eigenvalues ascending, eigenvectors
/// orthonormal and aligned with the eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector belonging to `eigenvalues()[i]`.
    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.eigenvectors[i]
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigendecomposition of a Hankel matrix.
pub fn symmetric_eigen(hankel: &HankelMatrix) -> Result<EigenDecomposition> {
    dense_symmetric_eigen(hankel.side(), hankel.data())
}

/// Smallest eigenvalue of a Hankel matrix.
pub fn smallest_eigenvalue(hankel: &HankelMatrix) -> Result<f64> {
    Ok(symmetric_eigen(hankel)?.smallest())
}

/// Eigendecomposition of an arbitrary dense symmetric matrix given row-major.
pub(crate) fn dense_symmetric_eigen(side: usize, data: &[f64]) -> Result<EigenDecomposition> {
    assert_eq!(data.len(), side * side, "matrix data must be side*side");
    for (index, &v) in data.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteEntry { index, value: v });
        }
    }
    if side == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
        });
    }

    let mut v = data.to_vec();
    let mut d = vec![0.0; side];
    let mut e = vec![0.0; side];
    tridiagonalize(side, &mut v, &mut d, &mut e);
    ql_from_shifted(side, &mut d, &mut e, &mut v)?;
    Ok(collect_sorted(side, &d, &v))
}

/// Eigendecomposition of a symmetric tridiagonal matrix given by its
/// diagonal and subdiagonal (`off[i]` couples rows `i` and `i + 1`).
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<EigenDecomposition> {
    let side = diag.len();
    assert_eq!(off.len(), side.saturating_sub(1), "subdiagonal length");
    if side == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; side];
    e[..side - 1].copy_from_slice(off);
    // identity accumulator
    let mut v = vec![0.0; side * side];
    for i in 0..side {
        v[i * side + i] = 1.0;
    }
    // The QL sweep expects e[i] to couple rows i-1 and i.
    for i in (1..side).rev() {
        e[i] = e[i - 1];
    }
    e[0] = 0.0;
    ql_from_shifted(side, &mut d, &mut e, &mut v)?;
    Ok(collect_sorted(side, &d, &v))
}

/// Householder reduction of a symmetric matrix to tridiagonal form, with the
/// orthogonal transformation accumulated in `v` (Bowdler-Martin-Reinsch-
/// Wilkinson tred2).
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on a tridiagonal (tql2). `e[0]` must be zero and `e[i]`
/// couples rows `i - 1` and `i`; `v` accumulates rotations column-wise.
fn ql_from_shifted(n: usize, d: &mut [f64], e: &mut [f64], v: &mut [f64]) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > MAX_QL_ITERATIONS {
                    return Err(Error::ConvergenceFailure {
                        iterations: iterations - 1,
                        order: None,
                    });
                }

                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        h = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Sorts eigenpairs ascending and extracts eigenvector columns with a fixed
/// sign convention (largest-magnitude component nonnegative).
fn collect_sorted(n: usize, d: &[f64], v: &[f64]) -> EigenDecomposition {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &col in &order {
        eigenvalues.push(d[col]);
        let mut vector: Vec<f64> = (0..n).map(|row| v[row * n + col]).collect();
        let lead = vector
            .iter()
            .cloned()
            .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if lead < 0.0 {
            for x in &mut vector {
                *x = -*x;
            }
        }
        eigenvectors.push(vector);
    }
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}
