use fastcaputo::gamma;
use proptest::prelude::*;

proptest! {
    #[test]
    fn recurrence(x in 0.01f64..30.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs(), "x = {}", x);
    }

    #[test]
    fn positive_on_positive_axis(x in 1e-6f64..150.0) {
        let g = gamma(x).unwrap();
        prop_assert!(g > 0.0 && g.is_finite());
    }

    #[test]
    fn reflection_product(x in 0.01f64..0.99) {
        // Γ(x) Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        let lhs = gamma(x).unwrap() * gamma(1.0 - x).unwrap();
        let rhs = pi / (pi * x).sin();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }
}

#[test]
fn rejects_poles_and_non_finite() {
    for x in [0.0, -1.0, -0.5, f64::NAN, f64::INFINITY] {
        assert!(gamma(x).is_err(), "x = {x}");
    }
}
