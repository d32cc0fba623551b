use detector_tomography::coefficients::full_set;
use detector_tomography::geometry::boost_riemann;
use detector_tomography::special::{carlson_rd, carlson_rf};
use detector_tomography::{BoostSpec, DetectorShape, RiemannTensor};
use nalgebra::Vector3;
use proptest::prelude::*;

fn components() -> impl Strategy<Value = [f64; 20]> {
    proptest::array::uniform20(-1.0..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn riemann_packing_round_trips(v in components()) {
        let r = RiemannTensor::from_independent(&v);
        prop_assert_eq!(r.independent(), v);
        prop_assert!(r.symmetry_violation() < 1e-14);
        let back = RiemannTensor::from_labelled(&r.labelled()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn boost_then_inverse_is_identity(
        v in components(),
        dir in proptest::array::uniform3(-1.0..1.0f64),
        speed in -0.9..0.9f64,
    ) {
        prop_assume!(Vector3::from(dir).norm() > 1e-3);
        let r = RiemannTensor::from_independent(&v);
        let b = BoostSpec::new(Vector3::from(dir), speed).unwrap();
        let back = boost_riemann(&boost_riemann(&r, &b), &b.inverse());
        let err = back.independent().iter().zip(r.independent()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-11 * b.gamma().powi(4));
        prop_assert!((boost_riemann(&r, &b).scalar() - r.scalar()).abs() < 1e-11 * b.gamma().powi(4));
    }

    #[test]
    fn carlson_integrals_are_homogeneous(x in 0.01..10.0f64, y in 0.01..10.0f64, z in 0.01..10.0f64, s in 0.1..10.0f64) {
        let rf = carlson_rf(x, y, z).unwrap();
        prop_assert!((carlson_rf(s * x, s * y, s * z).unwrap() * s.sqrt() - rf).abs() <= 1e-13 * rf);
        let rd = carlson_rd(x, y, z).unwrap();
        prop_assert!((carlson_rd(s * x, s * y, s * z).unwrap() * s.powf(1.5) - rd).abs() <= 1e-13 * rd);
    }

    #[test]
    fn axis_order_does_not_change_coefficients(
        a in 0.3..3.0f64, b in 0.3..3.0f64, c in 0.3..3.0f64,
        axis in proptest::array::uniform3(-1.0..1.0f64), angle in 0.0..3.0f64,
    ) {
        prop_assume!(Vector3::from(axis).norm() > 1e-3);
        let first = DetectorShape::with_axis_angle([a, b, c], Vector3::from(axis), angle, 1.0).unwrap();
        let [p, q, r] = first.axes();
        let second = DetectorShape::new(
            [r, p, q],
            first.rotation() * nalgebra::Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0),
            1.0,
        );
        // A cyclic permutation of the principal frame preserves handedness.
        let second = second.unwrap();
        let (x, y) = (full_set(&first).unwrap(), full_set(&second).unwrap());
        prop_assert!((x.l0 - y.l0).abs() < 1e-12 * x.l0);
        prop_assert!((x.lij - y.lij).abs().max() < 1e-12 * x.lij.abs().max());
    }
}
