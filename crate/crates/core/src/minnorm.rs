//! Minimum-norm point of the negated convex hull of a finite bundle of tangent
//! vectors: `g̃ = argmin { ‖g‖ : g ∈ −conv W }`.
//!
//! With the Gram matrix `G_ij = ⟨ξ_i, ξ_j⟩` this is the simplex-constrained
//! convex QP `min λᵀGλ s.t. λ ≥ 0, Σλ = 1`, solved by Wolfe's minimum-norm-point
//! algorithm (major/minor cycles over an affinely independent corral). If an
//! affine subsystem turns numerically singular even after diagonal
//! regularization, the solver falls back to projected-gradient iterations on
//! the simplex.
//!
//! The optimum is certified by the variational inequality
//! `⟨g̃, ξ⟩ ≤ −‖g̃‖²` for every `ξ ∈ W`, which downstream code relies on.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot};
use crate::manifold::{Point, TangentVector};

/// Relative duality-gap tolerance; tight enough that the certificate above
/// holds with slack 1e-8 at the bundle scales the solver produces.
const GAP_TOL: f64 = 1e-12;

/// Members closer than this (Euclidean) are considered duplicates.
const DEDUPE_TOL: f64 = 1e-12;

/// Diagonal regularization applied when an affine solve is singular.
const REGULARIZATION: f64 = 1e-14;

/// The working set `W` of subgradients accumulated at a base point.
#[derive(Debug, Clone)]
pub struct SubgradientBundle {
    base: Point,
    members: Vec<TangentVector>,
}

impl SubgradientBundle {
    /// Starts a bundle from its first member (bundles are never empty).
    pub fn new(first: TangentVector) -> Self {
        let base = first.base().clone();
        SubgradientBundle {
            base,
            members: vec![first],
        }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[TangentVector] {
        &self.members
    }

    /// Inserts a member, deduplicating at 1e-12; returns whether it was added.
    pub fn insert(&mut self, xi: TangentVector) -> Result<bool> {
        if xi.base() != &self.base {
            return Err(Error::BaseMismatch);
        }
        for existing in &self.members {
            let d2: f64 = existing
                .components()
                .iter()
                .zip(xi.components())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if libm::sqrt(d2) < DEDUPE_TOL {
                return Ok(false);
            }
        }
        self.members.push(xi);
        Ok(true)
    }

    pub fn max_member_norm(&self) -> f64 {
        self.members.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }
}

/// Solution of the min-norm subproblem.
#[derive(Debug, Clone)]
pub struct MinNormResult {
    /// `g̃ = −Σ λ_i ξ_i`, tangent at the bundle base.
    pub direction: TangentVector,
    /// Simplex weights λ (nonnegative, summing to one).
    pub weights: Vec<f64>,
    /// `‖g̃‖`.
    pub norm: f64,
}

/// Minimum-norm point of `−conv W`.
pub fn min_norm_neg_hull(bundle: &SubgradientBundle) -> Result<MinNormResult> {
    let members = bundle.members();
    let r = members.len();
    debug_assert!(r > 0);

    // degenerate bundle: every member numerically zero
    if members.iter().all(|m| m.norm() < 1e-14) {
        return Ok(MinNormResult {
            direction: TangentVector::zero(bundle.base().clone()),
            weights: vec![1.0 / r as f64; r],
            norm: 0.0,
        });
    }

    let gram: Vec<Vec<f64>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| dot(members[i].components(), members[j].components()))
                .collect()
        })
        .collect();

    let weights = solve_simplex_qp(&gram)?;

    let dim = bundle.base().dim();
    let mut vec_out = vec![0.0; dim];
    for (w, m) in weights.iter().zip(members) {
        axpy(-w, m.components(), &mut vec_out);
    }
    let ip = dot(bundle.base().coords(), &vec_out);
    axpy(-ip, bundle.base().coords(), &mut vec_out);
    let direction = TangentVector::new_unchecked(bundle.base().clone(), vec_out);
    let norm = direction.norm();
    Ok(MinNormResult {
        direction,
        weights,
        norm,
    })
}

/// `min λᵀGλ` over the unit simplex. Wolfe major/minor cycles; projected
/// gradient as the fallback when affine solves go singular.
fn solve_simplex_qp(gram: &[Vec<f64>]) -> Result<Vec<f64>> {
    let r = gram.len();
    if r == 1 {
        return Ok(vec![1.0]);
    }

    let cap = 100 * r;
    let mut lambda = vec![0.0; r];
    // start at the vertex of smallest norm
    let start = (0..r)
        .min_by(|&a, &b| {
            gram[a][a]
                .partial_cmp(&gram[b][b])
                .expect("gram entries are finite")
        })
        .expect("bundle is non-empty");
    lambda[start] = 1.0;
    let mut corral: Vec<usize> = vec![start];

    let mut singular = false;
    for _ in 0..cap {
        // major cycle: check optimality of the current point x = Σ λ_i w_i
        let q: Vec<f64> = (0..r).map(|j| dot(&gram[j], &lambda)).collect();
        let nx2 = dot(&lambda, &q);
        let (j_min, q_min) = argmin(&q);
        if nx2 - q_min <= GAP_TOL * nx2.max(1.0) {
            return Ok(lambda);
        }
        if corral.contains(&j_min) {
            // the most violating vertex is already in the corral; the affine
            // solve must have been inexact — hand over to the fallback
            singular = true;
            break;
        }
        corral.push(j_min);

        // minor cycles: restore λ ≥ 0 on the corral
        loop {
            let Some(y) = solve_affine(gram, &corral) else {
                singular = true;
                break;
            };
            if y.iter().all(|&yi| yi > DEDUPE_TOL) {
                lambda.iter_mut().for_each(|v| *v = 0.0);
                for (&idx, &yi) in corral.iter().zip(&y) {
                    lambda[idx] = yi;
                }
                break;
            }
            // step from λ toward y until the first coordinate hits zero
            let mut theta = 1.0f64;
            for (&idx, &yi) in corral.iter().zip(&y) {
                if yi <= DEDUPE_TOL {
                    let li = lambda[idx];
                    if li - yi > 0.0 {
                        theta = theta.min(li / (li - yi));
                    }
                }
            }
            theta = theta.clamp(0.0, 1.0);
            for (&idx, &yi) in corral.iter().zip(&y) {
                lambda[idx] = (1.0 - theta) * lambda[idx] + theta * yi;
            }
            let mut kept = Vec::with_capacity(corral.len());
            for &idx in &corral {
                if lambda[idx] > DEDUPE_TOL {
                    kept.push(idx);
                } else {
                    lambda[idx] = 0.0;
                }
            }
            if kept.is_empty() {
                // numerically everything collapsed; keep the heaviest index
                let (best, _) = argmax_by(&corral, |&idx| lambda[idx]);
                lambda.iter_mut().for_each(|v| *v = 0.0);
                lambda[best] = 1.0;
                kept.push(best);
            }
            corral = kept;
            if corral.len() == 1 {
                break;
            }
        }
        if singular {
            break;
        }
    }

    // projected-gradient fallback (also reached on cap without convergence)
    let _ = singular;
    projected_gradient(gram, lambda)
}

/// Minimize `‖Σ_{i∈S} y_i w_i‖` subject to `Σ y_i = 1` (signs free): solve the
/// bordered system `[G_SS 1; 1ᵀ 0][y; μ] = [0; 1]`. Returns `None` when the
/// system stays singular after regularization.
fn solve_affine(gram: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    for attempt in 0..2 {
        let reg = if attempt == 0 { 0.0 } else { REGULARIZATION };
        let k = corral.len();
        let mut a = vec![vec![0.0; k + 1]; k + 1];
        for (ri, &i) in corral.iter().enumerate() {
            for (ci, &j) in corral.iter().enumerate() {
                a[ri][ci] = gram[i][j];
            }
            a[ri][ri] += reg;
            a[ri][k] = 1.0;
            a[k][ri] = 1.0;
        }
        let mut rhs = vec![0.0; k + 1];
        rhs[k] = 1.0;
        if let Some(sol) = gauss_solve(&mut a, &mut rhs) {
            return Some(sol[..k].to_vec());
        }
    }
    None
}

/// Gaussian elimination with partial pivoting; `None` on a vanishing pivot.
fn gauss_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(1.0f64, |m, &v| m.max(v.abs()));
    let tiny = 1e-14 * scale;
    for col in 0..n {
        let (piv, piv_val) = (col..n)
            .map(|row| (row, a[row][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).expect("pivot magnitudes are finite"))?;
        if piv_val < tiny {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (pivot_rows, rest) = a.split_at_mut(col + 1);
        let pivot_row = &pivot_rows[col];
        let pivot_b = b[col];
        for (offset, row) in rest.iter_mut().enumerate() {
            let f = row[col] / pivot_row[col];
            if f == 0.0 {
                continue;
            }
            for (rk, pk) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *rk -= f * pk;
            }
            b[col + 1 + offset] -= f * pivot_b;
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

fn projected_gradient(gram: &[Vec<f64>], mut lambda: Vec<f64>) -> Result<Vec<f64>> {
    let r = gram.len();
    let lipschitz = gram
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let step = 1.0 / lipschitz;
    let mut best = lambda.clone();
    let mut best_gap = f64::INFINITY;
    for _ in 0..20_000 {
        let q: Vec<f64> = (0..r).map(|j| dot(&gram[j], &lambda)).collect();
        let nx2 = dot(&lambda, &q);
        let (_, q_min) = argmin(&q);
        let gap = nx2 - q_min;
        if gap < best_gap {
            best_gap = gap;
            best = lambda.clone();
        }
        if gap <= GAP_TOL * nx2.max(1.0) {
            return Ok(lambda);
        }
        let moved: Vec<f64> = lambda.iter().zip(&q).map(|(l, qi)| l - step * qi).collect();
        lambda = project_simplex(&moved);
    }
    let _ = best;
    Err(Error::MinNormStalled { residual: best_gap })
}

/// Euclidean projection onto the unit simplex (sort-based).
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| {
        b.partial_cmp(a)
            .expect("simplex projection input is finite")
    });
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&u| (u - tau).max(0.0)).collect()
}

fn argmin(v: &[f64]) -> (usize, f64) {
    let mut idx = 0;
    let mut val = v[0];
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x < val {
            idx = i;
            val = x;
        }
    }
    (idx, val)
}

fn argmax_by<T: Copy>(items: &[T], mut f: impl FnMut(&T) -> f64) -> (T, f64) {
    let mut best = items[0];
    let mut val = f(&items[0]);
    for it in &items[1..] {
        let v = f(it);
        if v > val {
            best = *it;
            val = v;
        }
    }
    (best, val)
}
