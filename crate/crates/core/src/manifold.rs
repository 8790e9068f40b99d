//! Geometry kernel for the unit sphere `S^{p-1}` behind a manifold abstraction.
//!
//! The sphere carries the metric inherited from the ambient space. Retraction
//! and vector transport are the exponential map and parallel transport along
//! geodesics, in closed form:
//!
//! ```text
//! R_x(ξ)          = cos(‖ξ‖) x + sin(‖ξ‖) ξ/‖ξ‖
//! R_x⁻¹(y)        = dist(x,y) (I − xxᵀ)(y − x) / ‖(I − xxᵀ)(y − x)‖
//! dist(x, y)      = arccos⟨x, y⟩
//! T_{x←y}(ξ_y)    = (I + (cos‖v‖ − 1) uuᵀ − sin‖v‖ y uᵀ) ξ_y,   u = v/‖v‖
//! ```
//!
//! where `v ∈ T_y` is the log of `x` at `y`; the transport is defined for all
//! `y ≠ ±x`. With this pairing the transport is an isometry and satisfies the
//! locking condition with β ≡ 1, so no β factors appear anywhere downstream.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm};

/// Membership / tangency tolerance for the domain types.
pub const GEOMETRY_TOL: f64 = 1e-10;

/// `y` counts as antipodal to `x` when `1 + ⟨x,y⟩` falls below this; the
/// transport denominator degenerates there.
pub const CUT_LOCUS_TOL: f64 = 1e-12;

/// Tangent norms below this are treated as zero in `retract` (avoids 0/0).
const ZERO_NORM_TOL: f64 = 1e-14;

/// A point on the manifold, stored in ambient coordinates (unit vector).
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Wraps coordinates that must already lie on the sphere (within 1e-10).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: coords.len(),
            });
        }
        let deviation = norm(&coords) - 1.0;
        if deviation.abs() > GEOMETRY_TOL {
            return Err(Error::PointNotOnManifold { deviation });
        }
        Ok(Point { coords })
    }

    /// Normalizes an ambient vector onto the sphere.
    pub fn from_unnormalized(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: coords.len(),
            });
        }
        let n = norm(&coords);
        if n < 1e-12 {
            return Err(Error::ZeroVector);
        }
        Ok(Point {
            coords: coords.into_iter().map(|c| c / n).collect(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A tangent vector attached to a base point, orthogonal to it.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: Point,
    vec: Vec<f64>,
}

impl TangentVector {
    /// Wraps components that must already be tangent at `base` (within 1e-10).
    pub fn new(base: Point, vec: Vec<f64>) -> Result<Self> {
        if vec.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                actual: vec.len(),
            });
        }
        let deviation = dot(base.coords(), &vec);
        if deviation.abs() > GEOMETRY_TOL {
            return Err(Error::VectorNotTangent { deviation });
        }
        Ok(TangentVector { base, vec })
    }

    /// Internal constructor for components known to be tangent by construction.
    pub(crate) fn new_unchecked(base: Point, vec: Vec<f64>) -> Self {
        debug_assert_eq!(base.dim(), vec.len());
        TangentVector { base, vec }
    }

    pub fn zero(base: Point) -> Self {
        let vec = vec![0.0; base.dim()];
        TangentVector { base, vec }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn components(&self) -> &[f64] {
        &self.vec
    }

    pub fn norm(&self) -> f64 {
        norm(&self.vec)
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            vec: self.vec.iter().map(|v| s * v).collect(),
        }
    }
}

/// Riemannian manifold interface used by the solver. Only the sphere ships,
/// but the solver code depends exclusively on this trait.
pub trait Manifold {
    fn dim_ambient(&self) -> usize;

    /// Radius on which the retraction stays invertible (π for the sphere).
    fn injectivity_radius(&self) -> f64;

    /// Riemannian metric at `x`; both vectors must be based at `x`.
    fn inner(&self, x: &Point, u: &TangentVector, v: &TangentVector) -> Result<f64>;

    /// Retraction (exponential map); `xi` must be based at `x`.
    fn retract(&self, x: &Point, xi: &TangentVector) -> Result<Point>;

    /// Inverse retraction (log map); errors at the cut locus.
    fn inverse_retract(&self, x: &Point, y: &Point) -> Result<TangentVector>;

    /// Geodesic distance.
    fn distance(&self, x: &Point, y: &Point) -> Result<f64>;

    /// Parallel transport of `xi_y ∈ T_y` to the tangent space at `x`.
    fn transport_to_base(
        &self,
        x: &Point,
        y: &Point,
        xi_y: &TangentVector,
    ) -> Result<TangentVector>;

    /// Orthogonal projection of an ambient vector onto the tangent space at `x`.
    fn project_tangent(&self, x: &Point, v: &[f64]) -> Result<TangentVector>;

    /// Uniformly distributed point; deterministic for a given generator state.
    fn random_point(&self, rng: &mut dyn rand::Rng) -> Point;
}

/// The unit sphere `S^{p-1}` embedded in `R^p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sphere {
    dim_ambient: usize,
}

impl Sphere {
    pub fn new(dim_ambient: usize) -> Result<Self> {
        if dim_ambient < 2 {
            return Err(Error::InvalidParameter {
                name: "dim_ambient",
                message: alloc::format!("sphere needs ambient dimension >= 2, got {dim_ambient}"),
            });
        }
        Ok(Sphere { dim_ambient })
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim_ambient {
            return Err(Error::DimensionMismatch {
                expected: self.dim_ambient,
                actual: len,
            });
        }
        Ok(())
    }

    fn check_base(x: &Point, v: &TangentVector) -> Result<()> {
        if v.base() != x {
            return Err(Error::BaseMismatch);
        }
        Ok(())
    }
}

impl Manifold for Sphere {
    fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    fn injectivity_radius(&self) -> f64 {
        PI
    }

    fn inner(&self, x: &Point, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        Self::check_base(x, u)?;
        Self::check_base(x, v)?;
        Ok(dot(u.components(), v.components()))
    }

    fn retract(&self, x: &Point, xi: &TangentVector) -> Result<Point> {
        self.check_dim(x.dim())?;
        Self::check_base(x, xi)?;
        let n = xi.norm();
        if n < ZERO_NORM_TOL {
            return Ok(x.clone());
        }
        let (s, c) = (libm::sin(n), libm::cos(n));
        let mut out: Vec<f64> = x.coords().iter().map(|&v| c * v).collect();
        axpy(s / n, xi.components(), &mut out);
        // renormalize to keep membership exact over long runs
        Point::from_unnormalized(out)
    }

    fn inverse_retract(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        let ip = dot(x.coords(), y.coords()).clamp(-1.0, 1.0);
        if 1.0 - ip < CUT_LOCUS_TOL {
            return Ok(TangentVector::zero(x.clone()));
        }
        if 1.0 + ip < CUT_LOCUS_TOL {
            return Err(Error::CutLocus);
        }
        let d = libm::acos(ip);
        // (I − xxᵀ)(y − x) = y − ⟨x,y⟩x
        let mut w: Vec<f64> = y.coords().to_vec();
        axpy(-ip, x.coords(), &mut w);
        let nw = norm(&w);
        if nw < ZERO_NORM_TOL {
            return Ok(TangentVector::zero(x.clone()));
        }
        let scale = d / nw;
        for v in w.iter_mut() {
            *v *= scale;
        }
        self.project_tangent(x, &w)
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        // clamp absorbs |⟨x,y⟩| exceeding 1 by rounding
        Ok(libm::acos(dot(x.coords(), y.coords()).clamp(-1.0, 1.0)))
    }

    fn transport_to_base(
        &self,
        x: &Point,
        y: &Point,
        xi_y: &TangentVector,
    ) -> Result<TangentVector> {
        self.check_dim(x.dim())?;
        Self::check_base(y, xi_y)?;
        let ip = dot(x.coords(), y.coords()).clamp(-1.0, 1.0);
        if 1.0 - ip < CUT_LOCUS_TOL {
            // same point: identity transport, rebased at x
            return self.project_tangent(x, xi_y.components());
        }
        if 1.0 + ip < CUT_LOCUS_TOL {
            return Err(Error::CutLocus);
        }
        // v = log_y(x) ∈ T_y, the velocity of the geodesic running from y to x
        let v = self.inverse_retract(y, x)?;
        let theta = v.norm();
        let u: Vec<f64> = v.components().iter().map(|c| c / theta).collect();
        let a = dot(&u, xi_y.components());
        let mut out = xi_y.components().to_vec();
        axpy((libm::cos(theta) - 1.0) * a, &u, &mut out);
        axpy(-libm::sin(theta) * a, y.coords(), &mut out);
        self.project_tangent(x, &out)
    }

    fn project_tangent(&self, x: &Point, v: &[f64]) -> Result<TangentVector> {
        self.check_dim(x.dim())?;
        self.check_dim(v.len())?;
        let ip = dot(x.coords(), v);
        let mut out = v.to_vec();
        axpy(-ip, x.coords(), &mut out);
        Ok(TangentVector::new_unchecked(x.clone(), out))
    }

    fn random_point(&self, rng: &mut dyn rand::Rng) -> Point {
        loop {
            let coords: Vec<f64> = (0..self.dim_ambient)
                .map(|_| StandardNormal.sample(&mut *rng))
                .collect();
            if let Ok(p) = Point::from_unnormalized(coords) {
                return p;
            }
            // all-zero draw: redraw
        }
    }
}

/// Random unit tangent vector at `x`, for tests and sampling utilities.
pub fn random_unit_tangent<M: Manifold + ?Sized>(
    manifold: &M,
    x: &Point,
    rng: &mut dyn Rng,
) -> TangentVector {
    loop {
        let ambient: Vec<f64> = (0..x.dim())
            .map(|_| StandardNormal.sample(&mut *rng))
            .collect();
        let t = manifold
            .project_tangent(x, &ambient)
            .expect("projection of a matching-dimension vector cannot fail");
        let n = t.norm();
        if n > 1e-9 {
            return t.scaled(1.0 / n);
        }
    }
}
