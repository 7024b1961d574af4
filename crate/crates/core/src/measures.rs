//! Atomic measures: finitely many point masses with positive weights.
//!
//! Forward direction: moments of an atomic measure, including generalized
//! moments through a generator function sampled at the nodes. Inverse
//! direction: recovery of nodes and weights from a truncated moment sequence
//! by orthogonalizing the monomial basis against the Hankel Gram structure,
//! assembling the symmetric tridiagonal matrix of recurrence coefficients,
//! and reading nodes off its spectrum and weights off the first eigenvector
//! components. An m-atom recovery reproduces the first 2m moments.

use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::sequence::TruncatedMomentSequence;

/// Relative pivot threshold deciding numerical rank during
/// orthogonalization.
const RANK_TOLERANCE: f64 = 1e-10;
/// Nodes closer than this after recovery are merged with summed weights.
const NODE_MERGE_TOLERANCE: f64 = 1e-9;
/// Recovered weights at or below this fraction of the total mass are
/// treated as float noise and dropped.
const WEIGHT_DROP_FRACTION: f64 = 1e-12;

/// A point mass: node location and positive weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub node: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(node: f64, weight: f64) -> Self {
        Self { node, weight }
    }
}

/// Finitely many point masses, canonically ordered by ascending node, with
/// pairwise distinct nodes and strictly positive weights. The empty measure
/// is allowed and represents zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<Atom>,
}

impl TryFrom<MeasureRepr> for AtomicMeasure {
    type Error = Error;

    fn try_from(repr: MeasureRepr) -> Result<Self> {
        AtomicMeasure::new(repr.atoms)
    }
}

impl From<AtomicMeasure> for MeasureRepr {
    fn from(m: AtomicMeasure) -> Self {
        MeasureRepr { atoms: m.atoms }
    }
}

impl AtomicMeasure {
    /// Validates and canonicalizes: sorts by node, requires finite distinct
    /// nodes and strictly positive weights.
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        for atom in &atoms {
            if !atom.node.is_finite() {
                return Err(Error::NonFiniteNode(atom.node));
            }
            if atom.weight <= 0.0 || !atom.weight.is_finite() {
                return Err(Error::NonPositiveWeight(atom.weight));
            }
        }
        atoms.sort_by(|a, b| a.node.partial_cmp(&b.node).expect("finite nodes"));
        for pair in atoms.windows(2) {
            if pair[0].node == pair[1].node {
                return Err(Error::DuplicateNode(pair[0].node));
            }
        }
        Ok(Self { atoms })
    }

    /// The zero measure.
    pub fn zero() -> Self {
        Self { atoms: Vec::new() }
    }

    /// Unit point mass at `node`.
    pub fn delta(node: f64) -> Self {
        Self {
            atoms: vec![Atom::new(node, 1.0)],
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Scales every weight by `factor >= 0`; zero empties the measure.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor < 0.0 || !factor.is_finite() {
            return Err(Error::NonPositiveWeight(factor));
        }
        if factor == 0.0 {
            return Ok(Self::zero());
        }
        Ok(Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(a.node, a.weight * factor))
                .collect(),
        })
    }

    /// The measure with weights `c_i * p_i^offset` at unchanged nodes; it
    /// represents the offset-shifted moment sequence. Atoms at zero vanish
    /// for positive offsets. Offset must be even to keep weights positive.
    pub fn shift_weighted(&self, offset: usize) -> Result<Self> {
        if !offset.is_multiple_of(2) {
            return Err(Error::OddOffset(offset));
        }
        let atoms = self
            .atoms
            .iter()
            .filter_map(|a| {
                let weight = a.weight * a.node.powi(offset as i32);
                (weight > 0.0).then_some(Atom::new(a.node, weight))
            })
            .collect();
        Self::new(atoms)
    }

    /// The pushforward under `x -> x^step` with weights `c_i * p_i^offset`,
    /// aggregating atoms whose images collide (for even steps, `-p` and `p`
    /// land on the same node).
    pub fn pushforward_power(&self, step: usize, offset: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::ZeroStep);
        }
        if !offset.is_multiple_of(2) {
            return Err(Error::OddOffset(offset));
        }
        let mut images: Vec<Atom> = self
            .atoms
            .iter()
            .filter_map(|a| {
                let weight = a.weight * a.node.powi(offset as i32);
                let node = a.node.powi(step as i32);
                (weight > 0.0).then_some(Atom::new(node, weight))
            })
            .collect();
        images.sort_by(|a, b| a.node.partial_cmp(&b.node).expect("finite nodes"));
        Self::new(merge_close_atoms(images, NODE_MERGE_TOLERANCE))
    }
}

/// Signed measure in Hahn-Jordan form: a positive part and a negative part,
/// each a valid atomic measure (possibly sharing nodes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedAtomicMeasure {
    pub plus: AtomicMeasure,
    pub minus: AtomicMeasure,
}

impl SignedAtomicMeasure {
    pub fn new(plus: AtomicMeasure, minus: AtomicMeasure) -> Self {
        Self { plus, minus }
    }

    pub fn zero() -> Self {
        Self {
            plus: AtomicMeasure::zero(),
            minus: AtomicMeasure::zero(),
        }
    }

    /// Scales both parts by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(Self {
            plus: self.plus.scaled(factor)?,
            minus: self.minus.scaled(factor)?,
        })
    }
}

/// Moments `s_k = sum_i c_i p_i^k` for `k = 0..=k_max`. Powers come from
/// repeated squaring and the cross-atom sums are compensated, keeping each
/// moment within a couple of ulps; the recovery roundtrip depends on that.
pub fn moments_of(measure: &AtomicMeasure, k_max: usize) -> Result<TruncatedMomentSequence> {
    let moments: Vec<f64> = (0..=k_max)
        .map(|k| {
            compensated_sum(
                measure
                    .atoms()
                    .iter()
                    .map(|a| a.weight * a.node.powi(k as i32)),
            )
        })
        .collect();
    if moments.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow);
    }
    TruncatedMomentSequence::new(moments)
}

/// Neumaier-compensated summation.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut compensation = 0.0_f64;
    for term in terms {
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// Generalized moments `s_k = sum_i c_i phi(p_i)^k` where `phi_at_nodes` is
/// the generator sampled at the atoms, aligned with them. The output is
/// always a positive sequence regardless of the generator values.
pub fn generalized_moments(
    measure: &AtomicMeasure,
    phi_at_nodes: &[f64],
    k_max: usize,
) -> Result<TruncatedMomentSequence> {
    if phi_at_nodes.len() != measure.len() {
        return Err(Error::LengthMismatch {
            expected: measure.len(),
            got: phi_at_nodes.len(),
        });
    }
    let mut moments = vec![0.0; k_max + 1];
    for (atom, &phi) in measure.atoms().iter().zip(phi_at_nodes) {
        let mut power = 1.0;
        for slot in moments.iter_mut() {
            *slot += atom.weight * power;
            power *= phi;
        }
    }
    if moments.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow);
    }
    TruncatedMomentSequence::new(moments)
}

/// Recovers an `m`-atom measure whose first `2m` moments match the sequence.
///
/// Orthogonalization against the Hankel Gram structure yields the three-term
/// recurrence; the symmetric tridiagonal matrix of those coefficients has
/// the nodes as eigenvalues and the weights as `s_0` times the squared first
/// eigenvector components. Fails with `RankDeficient(r)` when the moment
/// matrix has numerical rank `r < m` (retry with `m = r`) and `NotPositive`
/// when the sequence admits no representing measure.
pub fn recover_atoms(seq: &TruncatedMomentSequence, m: usize) -> Result<AtomicMeasure> {
    let rule = quadrature_from_moments(seq.entries(), m, None)?;
    AtomicMeasure::new(rule)
}

/// Shared quadrature construction. With `anchor = None` this is the plain
/// m-point rule matching moments `s_0..s_{2m-1}`; with `anchor = Some(x0)`
/// the last recurrence diagonal is modified so that `x0` becomes a node and
/// the rule matches `s_0..s_{2m-2}` (one fewer moment required, one node
/// pinned). Input slices are raw moments starting at `s_0`.
pub(crate) fn quadrature_from_moments(
    entries: &[f64],
    m: usize,
    anchor: Option<f64>,
) -> Result<Vec<Atom>> {
    if m == 0 {
        return Err(Error::ZeroAtoms);
    }
    let needed = if anchor.is_some() { 2 * m - 1 } else { 2 * m };
    if entries.len() < needed {
        return Err(Error::InsufficientMoments {
            needed,
            got: entries.len(),
        });
    }
    let mass = entries[0];
    if mass <= 0.0 {
        if entries.iter().all(|&v| v == 0.0) {
            return Err(Error::RankDeficient(0));
        }
        return Err(Error::NotPositive);
    }

    // Rescale to a support radius near one; the Gram conditioning of raw
    // monomial moments degrades fast otherwise.
    let radius = support_radius(entries, mass);
    let scaled: Vec<f64> = entries[..needed]
        .iter()
        .enumerate()
        .map(|(k, &s)| s / (mass * radius.powi(k as i32)))
        .collect();

    let recurrence = match anchor {
        None => monic_recurrence(&scaled, m)?,
        Some(x0) => anchored_recurrence(&scaled, m, x0 / radius)?,
    };

    let decomposition =
        eigen::tridiagonal_eigen(&recurrence.diag, &recurrence.offdiag)?;
    let mut scaled_atoms: Vec<(f64, f64)> = decomposition
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let first = decomposition.eigenvector(i)[0];
            (theta, first * first)
        })
        .collect();
    if anchor.is_none() {
        newton_refine(&entries[..needed], mass, radius, &mut scaled_atoms);
    }
    let mut atoms: Vec<Atom> = scaled_atoms
        .into_iter()
        .map(|(theta, weight)| Atom::new(theta * radius, mass * weight))
        .collect();
    atoms.sort_by(|a, b| a.node.partial_cmp(&b.node).expect("finite nodes"));
    let merged = merge_close_atoms(atoms, NODE_MERGE_TOLERANCE.max(NODE_MERGE_TOLERANCE * radius));
    let kept: Vec<Atom> = merged
        .into_iter()
        .filter(|a| a.weight > WEIGHT_DROP_FRACTION * mass)
        .collect();
    Ok(kept)
}

/// Support-radius estimate `max_k |s_k / s_0|^{1/k}`, floored away from zero.
fn support_radius(entries: &[f64], mass: f64) -> f64 {
    let mut radius = 1e-6_f64;
    for (k, &s) in entries.iter().enumerate().skip(1) {
        let ratio = (s / mass).abs();
        if ratio > 0.0 {
            radius = radius.max(ratio.powf(1.0 / k as f64));
        }
    }
    radius
}

struct Recurrence {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

/// Stieltjes orthogonalization of the monomial basis under the moment inner
/// product `<x^i, x^j> = nu_{i+j}`. Pivots are the squared norms of the
/// monic orthogonal polynomials; a collapsed pivot means rank deficiency, a
/// negative one means the sequence is not positive.
fn monic_recurrence(nu: &[f64], m: usize) -> Result<Recurrence> {
    let inner = |a: &[f64], b: &[f64], shift: usize| -> f64 {
        let mut acc = 0.0;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                acc += ai * bj * nu[i + j + shift];
            }
        }
        acc
    };

    let mut diag = Vec::with_capacity(m);
    let mut offdiag = Vec::with_capacity(m.saturating_sub(1));
    let mut prev: Vec<f64> = vec![1.0];
    let mut prev_norm = nu[0];
    let mut before: Vec<f64> = Vec::new();
    let mut beta = 0.0;
    diag.push(inner(&prev, &prev, 1) / prev_norm);

    for k in 1..m {
        // pi_k = (x - alpha_{k-1}) pi_{k-1} - beta_{k-1} pi_{k-2}
        let alpha = diag[k - 1];
        let mut next = vec![0.0; k + 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= alpha * c;
        }
        for (i, &c) in before.iter().enumerate() {
            next[i] -= beta * c;
        }

        let norm = inner(&next, &next, 0);
        let threshold = RANK_TOLERANCE * prev_norm;
        if norm <= threshold {
            if norm < -threshold {
                return Err(Error::NotPositive);
            }
            return Err(Error::RankDeficient(k));
        }
        beta = norm / prev_norm;
        offdiag.push(beta.sqrt());
        diag.push(inner(&next, &next, 1) / norm);

        before = std::mem::replace(&mut prev, next);
        prev_norm = norm;
    }

    Ok(Recurrence { diag, offdiag })
}

/// Recurrence with the last diagonal chosen so that `x0` is a node of the
/// resulting rule. Needs moments through `nu_{2(m-1)}` only; the produced
/// rule matches them all and keeps positive weights for any real anchor.
fn anchored_recurrence(nu: &[f64], m: usize, x0: f64) -> Result<Recurrence> {
    if m == 1 {
        return Ok(Recurrence {
            diag: vec![x0],
            offdiag: Vec::new(),
        });
    }
    let r = m - 1;
    let base = monic_recurrence(nu, r)?;

    // beta_r = |pi_r|^2 / |pi_{r-1}|^2 via the pivot chain.
    let (norms, pi_prev_x0, pi_r_x0) = evaluate_chain(nu, &base, r, x0)?;
    let beta_r = norms[r] / norms[r - 1];

    if pi_r_x0.abs() <= f64::MIN_POSITIVE.sqrt() {
        // Anchor collides with an existing node; the plain rule already
        // contains it.
        return Err(Error::RankDeficient(r));
    }
    let modified = x0 - beta_r * pi_prev_x0 / pi_r_x0;

    let mut diag = base.diag;
    let mut offdiag = base.offdiag;
    diag.push(modified);
    offdiag.push(beta_r.sqrt());
    Ok(Recurrence { diag, offdiag })
}

/// Walks the three-term recurrence once more to get `|pi_k|^2` for
/// `k = 0..=r` and the values `pi_{r-1}(x0)`, `pi_r(x0)`.
fn evaluate_chain(
    nu: &[f64],
    base: &Recurrence,
    r: usize,
    x0: f64,
) -> Result<(Vec<f64>, f64, f64)> {
    let mut norms = vec![nu[0]];
    let mut value_prev = 0.0; // pi_{-1}
    let mut value = 1.0; // pi_0
    let mut poly_before: Vec<f64> = Vec::new();
    let mut poly = vec![1.0];

    let inner = |a: &[f64], b: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                acc += ai * bj * nu[i + j];
            }
        }
        acc
    };

    for k in 0..r {
        let alpha = base.diag[k];
        let beta = if k == 0 {
            0.0
        } else {
            base.offdiag[k - 1] * base.offdiag[k - 1]
        };
        let mut next = vec![0.0; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= alpha * c;
        }
        for (i, &c) in poly_before.iter().enumerate() {
            next[i] -= beta * c;
        }
        let norm = inner(&next, &next);
        let threshold = RANK_TOLERANCE * norms[k];
        if norm <= threshold {
            if norm < -threshold {
                return Err(Error::NotPositive);
            }
            return Err(Error::RankDeficient(k + 1));
        }
        norms.push(norm);

        let next_value = (x0 - alpha) * value - beta * value_prev;
        value_prev = value;
        value = next_value;
        poly_before = std::mem::replace(&mut poly, next);
    }

    Ok((norms, value_prev, value))
}

/// Newton polish of the moment-matching equations, tightening the
/// eigensolver output. The system is square: 2m unknowns (nodes, weights)
/// against moments `nu_0..nu_{2m-1}`. Residuals are evaluated in
/// double-double arithmetic so the iteration converges to the solution the
/// f64 moment data actually determines, instead of stalling on its own
/// rounding noise; clustered nodes amplify that noise by many orders of
/// magnitude. Steps that fail to reduce the residual, or a singular
/// Jacobian, leave the input untouched.
fn newton_refine(raw: &[f64], mass: f64, radius: f64, atoms: &mut [(f64, f64)]) {
    let m = atoms.len();
    let n = 2 * m;
    if m == 0 || raw.len() < n {
        return;
    }

    // scaled targets nu_k = s_k / (mass * radius^k), carried in full width
    let targets: Vec<Dd> = raw
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            Dd::from_f64(s).div(Dd::from_f64(mass).mul(Dd::from_f64(radius).powi(k)))
        })
        .collect();
    let residual = |atoms: &[(f64, f64)]| -> Vec<f64> {
        (0..n)
            .map(|k| {
                let mut acc = Dd::from_f64(0.0);
                for &(node, weight) in atoms {
                    acc = acc.add(Dd::from_f64(weight).mul(Dd::from_f64(node).powi(k)));
                }
                acc.add(targets[k].neg()).to_f64()
            })
            .collect()
    };
    let max_abs = |v: &[f64]| v.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));

    for _ in 0..3 {
        let r = residual(atoms);
        let before = max_abs(&r);
        if before <= 1e-17 {
            return;
        }

        // rows: moment index k; columns: m node partials then m weight partials
        let mut jacobian = vec![0.0; n * n];
        for k in 0..n {
            for (i, &(node, weight)) in atoms.iter().enumerate() {
                jacobian[k * n + i] = if k == 0 {
                    0.0
                } else {
                    k as f64 * weight * node.powi(k as i32 - 1)
                };
                jacobian[k * n + m + i] = node.powi(k as i32);
            }
        }
        let mut delta: Vec<f64> = r.iter().map(|&x| -x).collect();
        if !solve_dense(&mut jacobian, &mut delta, n) {
            return;
        }

        let updated: Vec<(f64, f64)> = atoms
            .iter()
            .enumerate()
            .map(|(i, &(node, weight))| (node + delta[i], weight + delta[m + i]))
            .collect();
        if updated
            .iter()
            .any(|&(node, weight)| !node.is_finite() || !weight.is_finite() || weight <= 0.0)
        {
            return;
        }
        if max_abs(&residual(&updated)) >= before {
            return;
        }
        atoms.copy_from_slice(&updated);
    }
}

/// Unevaluated double-double value `hi + lo`; enough precision to evaluate
/// moment residuals without drowning them in term rounding.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, other: Self) -> Self {
        let s = two_sum(self.hi, other.hi);
        renorm(s.hi, s.lo + self.lo + other.lo)
    }

    fn mul(self, other: Self) -> Self {
        let p = two_prod(self.hi, other.hi);
        renorm(p.hi, p.lo + self.hi * other.lo + self.lo * other.hi)
    }

    fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        let remainder = self.add(other.mul(Dd::from_f64(q1)).neg());
        let q2 = remainder.to_f64() / other.hi;
        renorm(q1, q2)
    }

    fn powi(self, k: usize) -> Self {
        let mut acc = Dd::from_f64(1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

fn renorm(hi: f64, lo: f64) -> Dd {
    let s = hi + lo;
    Dd {
        hi: s,
        lo: (hi - s) + lo,
    }
}

/// Gaussian elimination with partial pivoting on a dense row-major system;
/// returns false if a pivot collapses.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
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
        let pivot = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pivot;
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

/// Merges adjacent atoms whose nodes are within `tol`, averaging nodes by
/// weight and summing weights. Input must be sorted by node.
fn merge_close_atoms(atoms: Vec<Atom>, tol: f64) -> Vec<Atom> {
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        match merged.last_mut() {
            Some(last) if (atom.node - last.node).abs() <= tol => {
                let total = last.weight + atom.weight;
                last.node = (last.node * last.weight + atom.node * atom.weight) / total;
                last.weight = total;
            }
            _ => merged.push(atom),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_mass_moments_are_all_one() {
        let seq = moments_of(&AtomicMeasure::delta(1.0), 4).unwrap();
        assert_eq!(seq.entries(), &[1.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn symmetric_pair_kills_odd_moments() {
        let measure = AtomicMeasure::new(vec![Atom::new(-1.0, 0.5), Atom::new(1.0, 0.5)]).unwrap();
        let seq = moments_of(&measure, 4).unwrap();
        assert_eq!(seq.entries(), &[1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn weighted_single_node_powers() {
        // delta at a^d with weight a^offset has moments a^{d k + offset}.
        let a: f64 = 3.0;
        let measure =
            AtomicMeasure::new(vec![Atom::new(a.powi(2), a.powi(4))]).unwrap();
        let seq = moments_of(&measure, 3).unwrap();
        for (k, &s) in seq.entries().iter().enumerate() {
            assert_abs_diff_eq!(s, a.powi(2 * k as i32 + 4), epsilon = 1e-9);
        }
    }

    #[test]
    fn generalized_identity_generator_recovers_moments() {
        let measure = AtomicMeasure::delta(2.0);
        let seq = generalized_moments(&measure, &[2.0], 4).unwrap();
        assert_eq!(seq.entries(), &[1.0, 2.0, 4.0, 8.0, 16.0]);
    }

    #[test]
    fn generalized_constant_generator_is_flat() {
        let measure = AtomicMeasure::new(vec![Atom::new(-3.0, 0.5), Atom::new(7.0, 1.5)]).unwrap();
        let seq = generalized_moments(&measure, &[1.0, 1.0], 5).unwrap();
        for &s in seq.entries() {
            assert_abs_diff_eq!(s, 2.0);
        }
    }

    #[test]
    fn generalized_square_generator_on_symmetric_pair() {
        let measure = AtomicMeasure::new(vec![Atom::new(-1.0, 0.5), Atom::new(1.0, 0.5)]).unwrap();
        let phi: Vec<f64> = measure.atoms().iter().map(|a| a.node * a.node).collect();
        let seq = generalized_moments(&measure, &phi, 6).unwrap();
        for &s in seq.entries() {
            assert_abs_diff_eq!(s, 1.0);
        }
    }

    #[test]
    fn generalized_length_mismatch() {
        let measure = AtomicMeasure::delta(1.0);
        assert_eq!(
            generalized_moments(&measure, &[1.0, 2.0], 3),
            Err(Error::LengthMismatch {
                expected: 1,
                got: 2
            })
        );
    }

    #[test]
    fn recover_symmetric_pair() {
        let seq = TruncatedMomentSequence::new(vec![2.0, 0.0, 2.0, 0.0, 2.0]).unwrap();
        let measure = recover_atoms(&seq, 2).unwrap();
        assert_eq!(measure.len(), 2);
        assert_abs_diff_eq!(measure.atoms()[0].node, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(measure.atoms()[1].node, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(measure.atoms()[0].weight, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(measure.atoms()[1].weight, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rank_deficiency_reported_then_reduced() {
        let seq = TruncatedMomentSequence::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        assert_eq!(recover_atoms(&seq, 2), Err(Error::RankDeficient(1)));
        let measure = recover_atoms(&seq, 1).unwrap();
        assert_eq!(measure.len(), 1);
        assert_abs_diff_eq!(measure.atoms()[0].node, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(measure.atoms()[0].weight, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_positive_sequence_rejected() {
        let seq = TruncatedMomentSequence::new(vec![1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0]).unwrap();
        assert_eq!(recover_atoms(&seq, 2), Err(Error::NotPositive));
    }

    #[test]
    fn recovered_moments_match_input() {
        let measure = AtomicMeasure::new(vec![
            Atom::new(-2.5, 0.7),
            Atom::new(0.25, 1.2),
            Atom::new(3.75, 0.4),
        ])
        .unwrap();
        let seq = moments_of(&measure, 5).unwrap();
        let recovered = recover_atoms(&seq, 3).unwrap();
        let back = moments_of(&recovered, 5).unwrap();
        let scale = seq.entries().iter().fold(1.0_f64, |a, &s| a.max(s.abs()));
        for (a, b) in seq.entries().iter().zip(back.entries()) {
            assert!((a - b).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn mass_is_conserved() {
        let measure = AtomicMeasure::new(vec![
            Atom::new(-1.0, 0.25),
            Atom::new(0.5, 0.5),
            Atom::new(2.0, 0.25),
        ])
        .unwrap();
        let seq = moments_of(&measure, 5).unwrap();
        let recovered = recover_atoms(&seq, 3).unwrap();
        assert_abs_diff_eq!(recovered.total_mass(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn duplicate_nodes_rejected() {
        assert!(matches!(
            AtomicMeasure::new(vec![Atom::new(1.0, 0.5), Atom::new(1.0, 0.5)]),
            Err(Error::DuplicateNode(_))
        ));
    }

    #[test]
    fn non_positive_weight_rejected() {
        assert!(matches!(
            AtomicMeasure::new(vec![Atom::new(1.0, 0.0)]),
            Err(Error::NonPositiveWeight(_))
        ));
    }

    #[test]
    fn pushforward_aggregates_collisions() {
        let measure = AtomicMeasure::new(vec![Atom::new(-1.0, 0.5), Atom::new(1.0, 0.5)]).unwrap();
        let image = measure.pushforward_power(2, 0).unwrap();
        assert_eq!(image.len(), 1);
        assert_abs_diff_eq!(image.atoms()[0].node, 1.0);
        assert_abs_diff_eq!(image.atoms()[0].weight, 1.0);
    }

    #[test]
    fn shift_weighted_drops_zero_node() {
        let measure = AtomicMeasure::new(vec![Atom::new(0.0, 0.5), Atom::new(2.0, 1.0)]).unwrap();
        let shifted = measure.shift_weighted(2).unwrap();
        assert_eq!(shifted.len(), 1);
        assert_abs_diff_eq!(shifted.atoms()[0].node, 2.0);
        assert_abs_diff_eq!(shifted.atoms()[0].weight, 4.0);
    }

    #[test]
    fn moments_overflow_detected() {
        let measure = AtomicMeasure::delta(1e200);
        assert_eq!(moments_of(&measure, 4), Err(Error::Overflow));
    }

    #[test]
    fn measure_json_round_trip() {
        let measure = AtomicMeasure::new(vec![Atom::new(2.0, 1.0), Atom::new(-1.0, 0.5)]).unwrap();
        let json = serde_json::to_string(&measure).unwrap();
        let back: AtomicMeasure = serde_json::from_str(&json).unwrap();
        assert_eq!(back, measure);
    }

    #[test]
    fn anchored_rule_pins_node_and_matches_moments() {
        let measure = AtomicMeasure::new(vec![
            Atom::new(-2.0, 1.0),
            Atom::new(1.0, 0.5),
            Atom::new(3.0, 1.5),
        ])
        .unwrap();
        let seq = moments_of(&measure, 4).unwrap();
        // three atoms, anchor pinned at 0.25, matching s_0..s_4
        let rule = quadrature_from_moments(seq.entries(), 3, Some(0.25)).unwrap();
        let recovered = AtomicMeasure::new(rule).unwrap();
        assert!(recovered
            .atoms()
            .iter()
            .any(|a| (a.node - 0.25).abs() < 1e-9));
        let back = moments_of(&recovered, 4).unwrap();
        for (a, b) in seq.entries().iter().zip(back.entries()) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
        }
        assert!(recovered.atoms().iter().all(|a| a.weight > 0.0));
    }
}
