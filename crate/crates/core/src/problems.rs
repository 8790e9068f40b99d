//! The four benchmark families with closed-form Clarke subgradient oracles and
//! seeded random-instance generators.
//!
//! For objectives given by ambient formulas the Riemannian subgradient is the
//! tangent projection of an ambient Clarke subgradient (the retraction is the
//! exponential map, whose differential at the origin is the identity). Ties in
//! max/abs kinks resolve deterministically: lowest active index for max,
//! sign(0) = 0 for the absolute value.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, Matrix};
use crate::manifold::{Manifold, Point, Sphere, TangentVector};
use crate::oracle::{Objective, ObjectiveVector};

/// Benchmark family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    MaxLinear,
    GeoMedian,
    Rayleigh,
    SphereLasso,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::MaxLinear => "example1",
            Family::GeoMedian => "geomedian",
            Family::Rayleigh => "rayleigh",
            Family::SphereLasso => "lasso",
        }
    }
}

/// Family-specific instance data, kept alongside the oracles so experiments
/// can inspect (and re-serialize) exactly what was generated.
#[derive(Debug, Clone)]
pub enum FamilyParams {
    MaxLinear,
    GeoMedian {
        anchors: Vec<Vec<Point>>,
        weights: Vec<Vec<f64>>,
    },
    Rayleigh {
        matrices: Vec<Matrix>,
    },
    SphereLasso {
        design: Vec<Matrix>,
        rhs: Vec<Vec<f64>>,
        lambdas: Vec<f64>,
    },
}

/// A fully built benchmark problem.
#[derive(Debug)]
pub struct ProblemInstance {
    pub family: Family,
    pub dim_ambient: usize,
    pub objectives: ObjectiveVector,
    pub params: FamilyParams,
}

fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `f(x) = max_k ⟨a_k, x⟩` with lowest-index tie-break at 1e-12.
pub struct MaxOfLinear {
    forms: Vec<Vec<f64>>,
    label: String,
}

impl Objective for MaxOfLinear {
    fn label(&self) -> &str {
        &self.label
    }

    fn eval(&self, x: &Point) -> Result<f64> {
        Ok(self
            .forms
            .iter()
            .map(|a| dot(a, x.coords()))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    fn clarke_subgradient(&self, x: &Point) -> Result<TangentVector> {
        let values: Vec<f64> = self.forms.iter().map(|a| dot(a, x.coords())).collect();
        let max = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let active = values
            .iter()
            .position(|&v| v >= max - 1e-12)
            .expect("max over a non-empty list");
        Sphere::new(x.dim())?.project_tangent(x, &self.forms[active])
    }
}

/// `f(x) = |x_i − shift| + ⟨a, x⟩`.
pub struct AbsPlusLinear {
    index: usize,
    shift: f64,
    linear: Vec<f64>,
    label: String,
}

impl Objective for AbsPlusLinear {
    fn label(&self) -> &str {
        &self.label
    }

    fn eval(&self, x: &Point) -> Result<f64> {
        Ok((x.coords()[self.index] - self.shift).abs() + dot(&self.linear, x.coords()))
    }

    fn clarke_subgradient(&self, x: &Point) -> Result<TangentVector> {
        let mut g = self.linear.clone();
        g[self.index] += sign0(x.coords()[self.index] - self.shift);
        Sphere::new(x.dim())?.project_tangent(x, &g)
    }
}

/// `f(x) = Σ_j w_j dist(x, y_j)`, the weighted geodesic median objective.
pub struct GeodesicMedian {
    sphere: Sphere,
    anchors: Vec<Point>,
    weights: Vec<f64>,
    label: String,
}

impl Objective for GeodesicMedian {
    fn label(&self) -> &str {
        &self.label
    }

    fn eval(&self, x: &Point) -> Result<f64> {
        let mut total = 0.0;
        for (y, w) in self.anchors.iter().zip(&self.weights) {
            total += w * self.sphere.distance(x, y)?;
        }
        Ok(total)
    }

    fn clarke_subgradient(&self, x: &Point) -> Result<TangentVector> {
        // −Σ w_j · log_x(y_j)/dist(x, y_j); the term at an anchor itself is a
        // valid Clarke element 0 and is dropped
        let mut g = vec![0.0; x.dim()];
        for (y, w) in self.anchors.iter().zip(&self.weights) {
            let d = self.sphere.distance(x, y)?;
            if d < 1e-9 {
                continue;
            }
            let v = self.sphere.inverse_retract(x, y)?;
            axpy(-w / d, v.components(), &mut g);
        }
        self.sphere.project_tangent(x, &g)
    }
}

/// `f(x) = xᵀ A x` for a symmetric `A` (Rayleigh quotient on the sphere).
pub struct QuadraticForm {
    matrix: Matrix,
    label: String,
}

impl Objective for QuadraticForm {
    fn label(&self) -> &str {
        &self.label
    }

    fn eval(&self, x: &Point) -> Result<f64> {
        Ok(dot(&self.matrix.matvec(x.coords()), x.coords()))
    }

    fn clarke_subgradient(&self, x: &Point) -> Result<TangentVector> {
        let mut g = self.matrix.matvec(x.coords());
        for v in g.iter_mut() {
            *v *= 2.0;
        }
        Sphere::new(x.dim())?.project_tangent(x, &g)
    }
}

/// `f(x) = ½‖Ax − b‖² + λ‖x‖₁` restricted to the sphere.
pub struct SphereLasso {
    design: Matrix,
    rhs: Vec<f64>,
    lambda: f64,
    label: String,
}

impl Objective for SphereLasso {
    fn label(&self) -> &str {
        &self.label
    }

    fn eval(&self, x: &Point) -> Result<f64> {
        let mut r = self.design.matvec(x.coords());
        for (ri, bi) in r.iter_mut().zip(&self.rhs) {
            *ri -= bi;
        }
        let l1: f64 = x.coords().iter().map(|v| v.abs()).sum();
        Ok(0.5 * dot(&r, &r) + self.lambda * l1)
    }

    fn clarke_subgradient(&self, x: &Point) -> Result<TangentVector> {
        let mut r = self.design.matvec(x.coords());
        for (ri, bi) in r.iter_mut().zip(&self.rhs) {
            *ri -= bi;
        }
        let mut g = self.design.tr_matvec(&r);
        for (gi, xi) in g.iter_mut().zip(x.coords()) {
            *gi += self.lambda * sign0(*xi);
        }
        Sphere::new(x.dim())?.project_tangent(x, &g)
    }
}

/// The fixed two-objective max/abs problem on S²:
/// `f₁ = max(0.5x₁ + x₃, 0.3x₂ + 1.5x₃)`, `f₂ = |x₁ − 0.5| + x₂ + x₃`.
pub fn make_example1() -> ProblemInstance {
    let f1 = MaxOfLinear {
        forms: vec![vec![0.5, 0.0, 1.0], vec![0.0, 0.3, 1.5]],
        label: String::from("f1"),
    };
    let f2 = AbsPlusLinear {
        index: 0,
        shift: 0.5,
        linear: vec![0.0, 1.0, 1.0],
        label: String::from("f2"),
    };
    let objectives =
        ObjectiveVector::new(vec![Box::new(f1), Box::new(f2)]).expect("two objectives");
    ProblemInstance {
        family: Family::MaxLinear,
        dim_ambient: 3,
        objectives,
        params: FamilyParams::MaxLinear,
    }
}

fn validate_weights(weights: &[Vec<f64>]) -> Result<()> {
    for (i, w) in weights.iter().enumerate() {
        if w.is_empty() {
            return Err(Error::InvalidParameter {
                name: "weights",
                message: alloc::format!("objective {i} has no anchor weights"),
            });
        }
        if w.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter {
                name: "weights",
                message: alloc::format!("objective {i} has negative weights"),
            });
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "weights",
                message: alloc::format!("objective {i} weights sum to {sum}, expected 1"),
            });
        }
    }
    Ok(())
}

/// Geodesic-median instance with anchors drawn uniformly on the sphere from
/// `anchor_seed`; one weight simplex per objective (`m = weights.len()`).
pub fn make_geomedian(
    p: usize,
    weights: Vec<Vec<f64>>,
    anchor_seed: u64,
) -> Result<ProblemInstance> {
    let sphere = Sphere::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(anchor_seed);
    let anchors: Vec<Vec<Point>> = weights
        .iter()
        .map(|w| {
            (0..w.len())
                .map(|_| sphere.random_point(&mut rng))
                .collect()
        })
        .collect();
    geomedian_from_anchors(anchors, weights)
}

/// Geodesic-median instance over explicit anchors.
pub fn geomedian_from_anchors(
    anchors: Vec<Vec<Point>>,
    weights: Vec<Vec<f64>>,
) -> Result<ProblemInstance> {
    if anchors.len() != weights.len() {
        return Err(Error::InvalidParameter {
            name: "weights",
            message: alloc::format!(
                "{} anchor groups but {} weight vectors",
                anchors.len(),
                weights.len()
            ),
        });
    }
    validate_weights(&weights)?;
    let p = anchors
        .first()
        .and_then(|g| g.first())
        .map(Point::dim)
        .ok_or(Error::InvalidParameter {
            name: "anchors",
            message: String::from("no anchors given"),
        })?;
    let sphere = Sphere::new(p)?;
    for group in &anchors {
        for a in group {
            if a.dim() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: a.dim(),
                });
            }
        }
    }
    let oracles: Vec<Box<dyn Objective>> = anchors
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(i, (group, w))| {
            Box::new(GeodesicMedian {
                sphere,
                anchors: group.clone(),
                weights: w.clone(),
                label: alloc::format!("f{}", i + 1),
            }) as Box<dyn Objective>
        })
        .collect();
    Ok(ProblemInstance {
        family: Family::GeoMedian,
        dim_ambient: p,
        objectives: ObjectiveVector::new(oracles)?,
        params: FamilyParams::GeoMedian { anchors, weights },
    })
}

/// The benchmark weight simplices for the geodesic-median experiments
/// (m = 2 or 3).
pub fn geomedian_default_weights(m: usize) -> Result<Vec<Vec<f64>>> {
    let w1 = vec![0.1, 0.1, 0.1, 0.2, 0.2, 0.3];
    let w2 = vec![0.1, 0.2, 0.3, 0.4];
    let w3 = vec![0.1, 0.1, 0.2, 0.3, 0.3];
    match m {
        2 => Ok(vec![w1, w2]),
        3 => Ok(vec![w1, w2, w3]),
        _ => Err(Error::InvalidParameter {
            name: "m",
            message: alloc::format!("default geomedian weights exist for m in {{2, 3}}, got {m}"),
        }),
    }
}

/// Rayleigh instance: `f_i(x) = xᵀA_i x` with `A_i = (B_i + B_iᵀ)/2` and `B_i`
/// filled with independent standard normal entries from `matrix_seed`.
pub fn make_rayleigh(p: usize, m: usize, matrix_seed: u64) -> Result<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(matrix_seed);
    let matrices: Vec<Matrix> = (0..m)
        .map(|_| Matrix::from_fn(p, p, |_, _| StandardNormal.sample(&mut rng)).symmetrized())
        .collect();
    rayleigh_from_matrices(matrices)
}

/// Rayleigh instance over explicit symmetric matrices.
pub fn rayleigh_from_matrices(matrices: Vec<Matrix>) -> Result<ProblemInstance> {
    let p = matrices
        .first()
        .map(Matrix::rows)
        .ok_or(Error::InvalidParameter {
            name: "matrices",
            message: String::from("no matrices given"),
        })?;
    Sphere::new(p)?;
    for a in &matrices {
        if a.rows() != p || a.cols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: a.rows().max(a.cols()),
            });
        }
    }
    let oracles: Vec<Box<dyn Objective>> = matrices
        .iter()
        .enumerate()
        .map(|(i, a)| {
            Box::new(QuadraticForm {
                matrix: a.clone(),
                label: alloc::format!("f{}", i + 1),
            }) as Box<dyn Objective>
        })
        .collect();
    Ok(ProblemInstance {
        family: Family::Rayleigh,
        dim_ambient: p,
        objectives: ObjectiveVector::new(oracles)?,
        params: FamilyParams::Rayleigh { matrices },
    })
}

/// Sphere-constrained lasso instance: `f_i(x) = ½‖A_i x − b_i‖² + λ_i‖x‖₁`
/// with `A_i ∈ R^{n×p}` and `b_i ∈ R^n` standard normal from `data_seed`
/// (`m = lambdas.len()`).
pub fn make_sphere_lasso(
    n: usize,
    p: usize,
    lambdas: Vec<f64>,
    data_seed: u64,
) -> Result<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
    let mut design = Vec::with_capacity(lambdas.len());
    let mut rhs = Vec::with_capacity(lambdas.len());
    for _ in 0..lambdas.len() {
        design.push(Matrix::from_fn(n, p, |_, _| {
            StandardNormal.sample(&mut rng)
        }));
        rhs.push(
            (0..n)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect::<Vec<f64>>(),
        );
    }
    sphere_lasso_from_data(design, rhs, lambdas)
}

/// Sphere-constrained lasso instance over explicit data.
pub fn sphere_lasso_from_data(
    design: Vec<Matrix>,
    rhs: Vec<Vec<f64>>,
    lambdas: Vec<f64>,
) -> Result<ProblemInstance> {
    if design.len() != lambdas.len() || rhs.len() != lambdas.len() {
        return Err(Error::InvalidParameter {
            name: "lambdas",
            message: alloc::format!(
                "{} design matrices, {} right-hand sides, {} lambdas",
                design.len(),
                rhs.len(),
                lambdas.len()
            ),
        });
    }
    // the negated comparison also rejects NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if let Some(bad) = lambdas.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "lambdas",
            message: alloc::format!("regularization weights must be positive, got {bad}"),
        });
    }
    let p = design
        .first()
        .map(Matrix::cols)
        .ok_or(Error::InvalidParameter {
            name: "design",
            message: String::from("no design matrices given"),
        })?;
    Sphere::new(p)?;
    for (a, b) in design.iter().zip(&rhs) {
        if a.cols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: a.cols(),
            });
        }
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                actual: b.len(),
            });
        }
    }
    let oracles: Vec<Box<dyn Objective>> = design
        .iter()
        .zip(&rhs)
        .zip(&lambdas)
        .enumerate()
        .map(|(i, ((a, b), &lambda))| {
            Box::new(SphereLasso {
                design: a.clone(),
                rhs: b.clone(),
                lambda,
                label: alloc::format!("f{}", i + 1),
            }) as Box<dyn Objective>
        })
        .collect();
    Ok(ProblemInstance {
        family: Family::SphereLasso,
        dim_ambient: p,
        objectives: ObjectiveVector::new(oracles)?,
        params: FamilyParams::SphereLasso {
            design,
            rhs,
            lambdas,
        },
    })
}

/// The benchmark regularization weights for the lasso experiments (m = 2 or 3).
pub fn lasso_default_lambdas(m: usize) -> Result<Vec<f64>> {
    match m {
        2 => Ok(vec![0.01, 0.02]),
        3 => Ok(vec![0.01, 0.02, 0.02]),
        _ => Err(Error::InvalidParameter {
            name: "m",
            message: alloc::format!("default lasso lambdas exist for m in {{2, 3}}, got {m}"),
        }),
    }
}
