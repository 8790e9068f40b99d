//! Property tests for the sphere geometry kernel: the contracts every
//! downstream procedure leans on (exactness of the retraction at zero, the
//! geodesic property, transport isometry, the locking condition with β = 1,
//! log/exp round trips, and tangency of everything returned).

use nsmo_core::manifold::{random_unit_tangent, Manifold, Point, Sphere, TangentVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn setup(p: usize, seed: u64) -> (Sphere, Point, ChaCha8Rng) {
    let sphere = Sphere::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = sphere.random_point(&mut rng);
    (sphere, x, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn retraction_zero_identity_is_exact(p in 2usize..9, seed in any::<u64>()) {
        let (sphere, x, _) = setup(p, seed);
        let y = sphere.retract(&x, &TangentVector::zero(x.clone())).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn retraction_realizes_geodesic_distance(
        p in 2usize..9,
        seed in any::<u64>(),
        norm in 1e-6..(std::f64::consts::PI - 1e-6),
    ) {
        let (sphere, x, mut rng) = setup(p, seed);
        let xi = random_unit_tangent(&sphere, &x, &mut rng).scaled(norm);
        let y = sphere.retract(&x, &xi).unwrap();
        let d = sphere.distance(&y, &x).unwrap();
        prop_assert!((d - norm).abs() <= 1e-10, "dist {} vs ‖ξ‖ {}", d, norm);
    }

    #[test]
    fn log_exp_round_trip(p in 2usize..9, seed in any::<u64>(), norm in 1e-6..(std::f64::consts::PI - 0.1)) {
        let (sphere, x, mut rng) = setup(p, seed);
        let xi = random_unit_tangent(&sphere, &x, &mut rng).scaled(norm);
        let y = sphere.retract(&x, &xi).unwrap();
        let v = sphere.inverse_retract(&x, &y).unwrap();
        let back = sphere.retract(&x, &v).unwrap();
        let err: f64 = back
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        prop_assert!(err <= 1e-8, "round trip off by {}", err);
    }

    #[test]
    fn transport_preserves_inner_products(
        p in 2usize..9,
        seed in any::<u64>(),
        reach in 0.05..3.0f64,
        su in 0.1..4.0f64,
        sv in 0.1..4.0f64,
    ) {
        let (sphere, x, mut rng) = setup(p, seed);
        let step = random_unit_tangent(&sphere, &x, &mut rng).scaled(reach);
        let y = sphere.retract(&x, &step).unwrap();
        let u = random_unit_tangent(&sphere, &y, &mut rng).scaled(su);
        let v = random_unit_tangent(&sphere, &y, &mut rng).scaled(sv);
        let before = dot(u.components(), v.components());
        let tu = sphere.transport_to_base(&x, &y, &u).unwrap();
        let tv = sphere.transport_to_base(&x, &y, &v).unwrap();
        let after = sphere.inner(&x, &tu, &tv).unwrap();
        prop_assert!((before - after).abs() <= 1e-10, "{} vs {}", before, after);
    }

    #[test]
    fn locking_condition_with_unit_beta(
        p in 2usize..9,
        seed in any::<u64>(),
        norm in 0.01..(std::f64::consts::FRAC_PI_2 - 0.01),
    ) {
        // forward parallel transport of ξ along its own geodesic must equal
        // DR_x(ξ)[ξ], approximated by central differences of t ↦ R_x(ξ + tξ)
        let (sphere, x, mut rng) = setup(p, seed);
        let xi = random_unit_tangent(&sphere, &x, &mut rng).scaled(norm);
        let y = sphere.retract(&x, &xi).unwrap();
        let transported = sphere.transport_to_base(&y, &x, &xi).unwrap();

        let h = 1e-6;
        let plus = sphere.retract(&x, &xi.scaled(1.0 + h)).unwrap();
        let minus = sphere.retract(&x, &xi.scaled(1.0 - h)).unwrap();
        for (k, t) in transported.components().iter().enumerate() {
            let fd = (plus.coords()[k] - minus.coords()[k]) / (2.0 * h);
            prop_assert!((t - fd).abs() <= 1e-6, "component {}: {} vs {}", k, t, fd);
        }
    }

    #[test]
    fn returned_tangents_stay_tangent(p in 2usize..9, seed in any::<u64>(), reach in 0.05..3.0f64) {
        let (sphere, x, mut rng) = setup(p, seed);
        let step = random_unit_tangent(&sphere, &x, &mut rng).scaled(reach);
        let y = sphere.retract(&x, &step).unwrap();

        let log = sphere.inverse_retract(&x, &y).unwrap();
        prop_assert!(dot(log.base().coords(), log.components()).abs() <= 1e-10);

        let u = random_unit_tangent(&sphere, &y, &mut rng);
        let back = sphere.transport_to_base(&x, &y, &u).unwrap();
        prop_assert!(dot(back.base().coords(), back.components()).abs() <= 1e-10);

        let ambient: Vec<f64> = (0..p).map(|i| (i as f64) - 1.3).collect();
        let proj = sphere.project_tangent(&x, &ambient).unwrap();
        prop_assert!(dot(proj.base().coords(), proj.components()).abs() <= 1e-10);
    }
}
