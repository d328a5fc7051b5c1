//! Randomized property tests for the geometric and numerical invariants.

use nonlocal_spectral::domain::{AxisBox, Domain};
use nonlocal_spectral::gap;
use nonlocal_spectral::kernel::Kernel;
use nonlocal_spectral::quadrature;
use proptest::prelude::*;

/// Random disjoint 1D box union with 1–4 boxes.
fn union_1d() -> impl Strategy<Value = Domain> {
    (
        1usize..=4,
        prop::collection::vec((0.05f64..2.0, 0.05f64..1.5), 4),
    )
        .prop_map(|(n, spec)| {
            let mut boxes = Vec::new();
            let mut cursor = -2.0;
            for (width, gap) in spec.into_iter().take(n) {
                let lo = cursor + gap;
                boxes.push(AxisBox::new(vec![lo], vec![lo + width]));
                cursor = lo + width;
            }
            Domain::new(boxes, 1).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_split_halves_measure(domain in union_1d()) {
        let partition = domain.equal_split(0).unwrap();
        let half = domain.measure() / 2.0;
        prop_assert!((partition.part1.measure() - half).abs() < 1e-9 * domain.measure());
        prop_assert!((partition.part2.measure() - half).abs() < 1e-9 * domain.measure());
    }

    #[test]
    fn inertia_is_translation_invariant(domain in union_1d(), shift in -5.0f64..5.0) {
        let moved = domain.translate(&[shift]);
        let a = domain.inertia(0).unwrap();
        let b = moved.inertia(0).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn measure_scales_by_power_of_dimension(domain in union_1d(), s in 0.2f64..5.0) {
        let scaled = domain.scale(s);
        prop_assert!((scaled.measure() - s * domain.measure()).abs() < 1e-9 * scaled.measure());
    }

    #[test]
    fn quadrature_exact_on_random_cubics(
        c in prop::array::uniform4(-3.0f64..3.0),
        (a, w) in (-2.0f64..2.0, 0.1f64..3.0)
    ) {
        let d = Domain::interval(a, a + w).unwrap();
        let f = |x: &[f64]| c[0] + c[1] * x[0] + c[2] * x[0] * x[0] + c[3] * x[0].powi(3);
        let num = quadrature::integrate(&d, f, 4).unwrap();
        let prim = |x: f64| c[0] * x + c[1] * x * x / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0;
        let exact = prim(a + w) - prim(a);
        prop_assert!((num - exact).abs() < 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn kernel_evaluation_is_even(lambda in 0.5f64..6.0, z in -3.0f64..3.0) {
        let k = Kernel::gaussian(lambda, 1).unwrap();
        let a = k.evaluate(&[z]).unwrap();
        let b = k.evaluate(&[-z]).unwrap();
        prop_assert!((a - b).abs() <= 1e-15 * (1.0 + a.abs()));
    }

    #[test]
    fn gap_margin_formulas_agree(
        p in 0.5f64..3.0,
        lambda in 0.5f64..4.0,
        l in 0.2f64..3.0
    ) {
        let r = gap::example_exp_delta(p, lambda, l).unwrap();
        prop_assert!(
            (r.delta - r.delta_primitive).abs() < 1e-8,
            "p={p} lambda={lambda} L={l}: {} vs {}",
            r.delta,
            r.delta_primitive
        );
    }
}
