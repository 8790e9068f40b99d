//! Objective-function abstraction: evaluation plus one Clarke subgradient per
//! call, and transported subgradients from nearby points on the manifold.

use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, TangentVector};

/// A single locally Lipschitz objective. `clarke_subgradient` returns one
/// element of the Riemannian subdifferential at the point; the solver never
/// needs the full set.
pub trait Objective: Send + Sync {
    fn label(&self) -> &str;

    fn eval(&self, x: &Point) -> Result<f64>;

    /// One element of `∂f(x)`, tangent at `x`.
    fn clarke_subgradient(&self, x: &Point) -> Result<TangentVector>;
}

/// The ordered objectives `f_1, …, f_m` of a multiobjective problem.
pub struct ObjectiveVector {
    oracles: Vec<Box<dyn Objective>>,
}

impl core::fmt::Debug for ObjectiveVector {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_list()
            .entries(self.oracles.iter().map(|o| o.label()))
            .finish()
    }
}

impl ObjectiveVector {
    /// Requires at least two objectives.
    pub fn new(oracles: Vec<Box<dyn Objective>>) -> Result<Self> {
        if oracles.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "oracles",
                message: alloc::format!(
                    "a multiobjective problem needs m >= 2 objectives, got {}",
                    oracles.len()
                ),
            });
        }
        Ok(ObjectiveVector { oracles })
    }

    pub fn len(&self) -> usize {
        self.oracles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oracles.is_empty()
    }

    pub fn get(&self, i: usize) -> &dyn Objective {
        self.oracles[i].as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Objective> {
        self.oracles.iter().map(|o| o.as_ref())
    }

    /// Evaluates every component at `x`; failures carry the objective index.
    pub fn eval_all(&self, x: &Point) -> Result<Vec<f64>> {
        self.oracles
            .iter()
            .enumerate()
            .map(|(i, o)| {
                o.eval(x).map_err(|e| Error::Oracle {
                    index: i,
                    message: e.to_string(),
                })
            })
            .collect()
    }
}

/// Subgradient of `f` at `R_x(t·g)`, transported back to the tangent space at
/// `x`. For `t·‖g‖` numerically zero this is just the subgradient at `x`
/// (identity transport). The scale factor β of the locking condition is 1 for
/// the exponential map / parallel transport pairing and is omitted.
pub fn transported_subgradient<M: Manifold + ?Sized>(
    manifold: &M,
    f: &dyn Objective,
    x: &Point,
    t: f64,
    g: &TangentVector,
) -> Result<TangentVector> {
    if t * g.norm() < 1e-14 {
        return f.clarke_subgradient(x);
    }
    let y = manifold.retract(x, &g.scaled(t))?;
    let xi = f.clarke_subgradient(&y)?;
    manifold.transport_to_base(x, &y, &xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, Matrix};
    use crate::manifold::{random_unit_tangent, Sphere};
    use crate::problems;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eval_all_requires_two_objectives() {
        assert!(ObjectiveVector::new(vec![]).is_err());
    }

    struct FailingOracle;

    impl Objective for FailingOracle {
        fn label(&self) -> &str {
            "failing"
        }
        fn eval(&self, _x: &Point) -> crate::error::Result<f64> {
            Err(crate::error::Error::CutLocus)
        }
        fn clarke_subgradient(&self, x: &Point) -> crate::error::Result<TangentVector> {
            Ok(TangentVector::zero(x.clone()))
        }
    }

    struct ConstantOracle;

    impl Objective for ConstantOracle {
        fn label(&self) -> &str {
            "constant"
        }
        fn eval(&self, _x: &Point) -> crate::error::Result<f64> {
            Ok(1.0)
        }
        fn clarke_subgradient(&self, x: &Point) -> crate::error::Result<TangentVector> {
            Ok(TangentVector::zero(x.clone()))
        }
    }

    #[test]
    fn eval_all_failure_carries_objective_index() {
        let f = ObjectiveVector::new(vec![
            Box::new(ConstantOracle) as Box<dyn Objective>,
            Box::new(FailingOracle),
        ])
        .unwrap();
        let x = Point::new(vec![1.0, 0.0, 0.0]).unwrap();
        match f.eval_all(&x).unwrap_err() {
            Error::Oracle { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn geomedian_subgradient_fails_at_anchor_cut_locus() {
        let anchor = Point::new(vec![0.0, 0.0, 1.0]).unwrap();
        let other = Point::new(vec![1.0, 0.0, 0.0]).unwrap();
        let inst = problems::geomedian_from_anchors(
            vec![vec![anchor], vec![other]],
            vec![vec![1.0], vec![1.0]],
        )
        .unwrap();
        let antipode = Point::new(vec![0.0, 0.0, -1.0]).unwrap();
        assert!(inst
            .objectives
            .get(0)
            .clarke_subgradient(&antipode)
            .is_err());
        // evaluation stays defined there (dist = π), only the log map fails
        assert!(inst.objectives.get(0).eval(&antipode).is_ok());
    }

    #[test]
    fn eval_all_constant_rayleigh() {
        // A = I makes f ≡ 1 on the sphere
        let eye = Matrix::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.0 });
        let inst = problems::rayleigh_from_matrices(vec![eye.clone(), eye]).unwrap();
        let sphere = Sphere::new(4).unwrap();
        let x = sphere.random_point(&mut ChaCha8Rng::seed_from_u64(1));
        let vals = inst.objectives.eval_all(&x).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eval_all_example1_reference_point() {
        let inst = problems::make_example1();
        let x = Point::new(vec![0.0, 0.0, 1.0]).unwrap();
        let vals = inst.objectives.eval_all(&x).unwrap();
        assert_eq!(vals, vec![1.5, 1.5]);
    }

    #[test]
    fn transported_subgradient_identity_at_t_zero() {
        let inst = problems::make_rayleigh(6, 2, 3).unwrap();
        let sphere = Sphere::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = sphere.random_point(&mut rng);
        let g = random_unit_tangent(&sphere, &x, &mut rng);
        let direct = inst.objectives.get(0).clarke_subgradient(&x).unwrap();
        let transported =
            transported_subgradient(&sphere, inst.objectives.get(0), &x, 0.0, &g).unwrap();
        assert_eq!(direct.components(), transported.components());
    }

    #[test]
    fn transported_subgradient_preserves_norm() {
        let inst = problems::make_rayleigh(6, 2, 3).unwrap();
        let sphere = Sphere::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = sphere.random_point(&mut rng);
        let g = random_unit_tangent(&sphere, &x, &mut rng);
        let t = 0.05;
        let y = sphere.retract(&x, &g.scaled(t)).unwrap();
        let at_y = inst.objectives.get(1).clarke_subgradient(&y).unwrap();
        let back = transported_subgradient(&sphere, inst.objectives.get(1), &x, t, &g).unwrap();
        assert!((back.norm() - at_y.norm()).abs() < 1e-10);
        assert!(dot(back.base().coords(), back.components()).abs() < 1e-10);
    }

    #[test]
    fn transported_subgradient_continuity_for_smooth_objective() {
        let inst = problems::make_rayleigh(6, 2, 3).unwrap();
        let sphere = Sphere::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = sphere.random_point(&mut rng);
        let g = random_unit_tangent(&sphere, &x, &mut rng);
        let at_x = inst.objectives.get(0).clarke_subgradient(&x).unwrap();
        let t = 1e-6;
        let moved = transported_subgradient(&sphere, inst.objectives.get(0), &x, t, &g).unwrap();
        let diff: f64 = at_x
            .components()
            .iter()
            .zip(moved.components())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        // smooth gradient field: O(t) deviation
        assert!(diff < 1e-4, "deviation {diff:e} not O(t)");
    }

    #[test]
    fn rayleigh_subgradient_matches_finite_differences() {
        let inst = problems::make_rayleigh(8, 2, 11).unwrap();
        let sphere = Sphere::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let x = sphere.random_point(&mut rng);
            let xi = inst.objectives.get(0).clarke_subgradient(&x).unwrap();
            for _ in 0..4 {
                let dir = random_unit_tangent(&sphere, &x, &mut rng);
                let h = 1e-6;
                let fp = inst
                    .objectives
                    .get(0)
                    .eval(&sphere.retract(&x, &dir.scaled(h)).unwrap());
                let fm = inst
                    .objectives
                    .get(0)
                    .eval(&sphere.retract(&x, &dir.scaled(-h)).unwrap());
                let fd = (fp.unwrap() - fm.unwrap()) / (2.0 * h);
                let ip = dot(xi.components(), dir.components());
                assert!((fd - ip).abs() < 1e-5, "fd {fd} vs inner {ip}");
            }
        }
    }

    #[test]
    fn geomedian_first_order_expansion_along_geodesics() {
        let inst =
            problems::make_geomedian(6, vec![vec![0.5, 0.5], vec![0.3, 0.3, 0.4]], 21).unwrap();
        let sphere = Sphere::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let x = sphere.random_point(&mut rng);
            for (i, obj) in inst.objectives.iter().enumerate() {
                let fx = obj.eval(&x).unwrap();
                let xi = obj.clarke_subgradient(&x).unwrap();
                let v = random_unit_tangent(&sphere, &x, &mut rng).scaled(1e-3);
                let fv = obj.eval(&sphere.retract(&x, &v).unwrap()).unwrap();
                let linear = fx + dot(xi.components(), v.components());
                assert!(
                    fv >= linear - 1e-6,
                    "objective {i}: f(R_x(v)) = {fv} dips below first-order model {linear}"
                );
            }
        }
    }
}
