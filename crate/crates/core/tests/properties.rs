use std::f64::consts::FRAC_PI_2;

use nonoverlap::elliptic::{carlson_rf, carlson_rj, casin, ellip_f, ellip_k};
use nonoverlap::functional::{parse_functional, FunctionalSpec, Term};
use nonoverlap::sampler::sample_pair;
use nonoverlap::tracer::{classify, Containment};
use nonoverlap::{Complex64, ProblemConfig, Sign};
use proptest::prelude::*;

fn complex(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
    (lo..hi, 0.0..std::f64::consts::TAU).prop_map(|(m, a)| Complex64::from_polar(m, a))
}

fn right_half(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
    (lo..hi, -1.2..1.2f64).prop_map(|(m, a)| Complex64::from_polar(m, a))
}

fn term() -> impl Strategy<Value = Term> {
    (-3.0..3.0f64, -3.0..3.0f64, prop::array::uniform4(-3i32..=3)).prop_map(|(re, im, exponents)| Term {
        coeff: Complex64::new(re, im),
        exponents,
    })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #[test]
    fn functional_display_round_trips(terms in prop::collection::vec(term(), 1..5)) {
        if let Ok(spec) = FunctionalSpec::from_terms(terms) {
            let again = parse_functional(&spec.to_string()).unwrap();
            prop_assert_eq!(again, spec);
        }
    }

    #[test]
    fn euler_relation_for_homogeneous_terms(
        coeffs in prop::collection::vec(complex(0.1, 2.0), 1..4),
        exps in prop::collection::vec(prop::array::uniform3(-2i32..=2), 1..4),
        omega in prop::array::uniform4(complex(0.5, 2.0)),
        degree in -2i32..=2,
    ) {
        // last exponent fixes the total degree
        let terms: Vec<Term> = coeffs
            .iter()
            .zip(&exps)
            .map(|(c, e)| Term { coeff: *c, exponents: [e[0], e[1], e[2], degree - e[0] - e[1] - e[2]] })
            .collect();
        if let Ok(spec) = FunctionalSpec::from_terms(terms) {
            let grad = spec.gradient_at(&omega).unwrap();
            let euler: Complex64 = grad.iter().zip(&omega).map(|(g, w)| g * w).sum();
            let value = spec.eval_at(&omega).unwrap() * degree as f64;
            let scale = grad.iter().zip(&omega).map(|(g, w)| (g * w).norm()).sum::<f64>();
            prop_assert!((euler - value).norm() <= 1e-12 * scale.max(1e-300));
        }
    }

    #[test]
    fn rf_is_symmetric_and_homogeneous(x in right_half(0.1, 3.0), y in right_half(0.1, 3.0), z in right_half(0.1, 3.0), lambda in 0.1..10.0f64) {
        let base = carlson_rf(x, y, z).unwrap();
        prop_assert!(rel(carlson_rf(z, x, y).unwrap(), base) < 1e-13);
        prop_assert!(rel(carlson_rf(y, z, x).unwrap(), base) < 1e-13);
        let scaled = carlson_rf(x * lambda, y * lambda, z * lambda).unwrap();
        prop_assert!(rel(scaled, base / lambda.sqrt()) < 1e-13);
    }

    #[test]
    fn rj_is_symmetric_in_first_three(x in right_half(0.1, 3.0), y in right_half(0.1, 3.0), z in right_half(0.1, 3.0), p in right_half(0.1, 3.0)) {
        let base = carlson_rj(x, y, z, p).unwrap();
        prop_assert!(rel(carlson_rj(z, x, y, p).unwrap(), base) < 1e-12);
        prop_assert!(rel(carlson_rj(y, x, z, p).unwrap(), base) < 1e-12);
    }

    #[test]
    fn complete_first_kind_is_even(k in complex(0.0, 0.95)) {
        prop_assert!(rel(ellip_k(-k).unwrap(), ellip_k(k).unwrap()) < 1e-14);
        prop_assert!(rel(ellip_f(Complex64::new(FRAC_PI_2, 0.0), k).unwrap(), ellip_k(k).unwrap()) < 1e-12);
    }

    #[test]
    fn incomplete_first_kind_is_odd(phi in complex(0.01, 1.2), k in complex(0.0, 0.8)) {
        let f = ellip_f(phi, k).unwrap();
        prop_assert!(rel(ellip_f(-phi, k).unwrap(), -f) < 1e-13);
    }

    #[test]
    fn casin_inverts_sine(z in complex(0.0, 1.2)) {
        prop_assume!(z.re.abs() < FRAC_PI_2 - 1e-3);
        prop_assert!((casin(z.sin()) - z).norm() < 1e-12 * (1.0 + z.norm()));
    }

    #[test]
    fn sign_flip_is_an_involution(plus in any::<bool>()) {
        let s = if plus { Sign::Plus } else { Sign::Minus };
        prop_assert_eq!(s.flip().flip(), s);
        prop_assert_eq!(s.flip().factor(), -s.factor());
    }

    #[test]
    fn sampled_pairs_are_separated(scale in 0.1..10.0f64, t1 in 0.0..6.3f64, t2 in 0.0..6.3f64, a in complex(0.0, 0.5), r in 0.05..0.95f64, rho in 1.05..5.0f64) {
        let cfg = ProblemConfig::new(r, rho).unwrap();
        let s = sample_pair(scale, t1, t2, a, &cfg).unwrap();
        prop_assert!(s.w1.norm() < scale);
        prop_assert!((s.w2.norm() - scale * rho).abs() <= 1e-12 * scale * rho);
        prop_assert!(s.w1.norm() > 0.0);
    }

    #[test]
    fn regular_polygon_contains_its_centre(n in 3usize..40, radius in 0.1..10.0f64, cx in -5.0..5.0f64, cy in -5.0..5.0f64) {
        let centre = Complex64::new(cx, cy);
        let poly: Vec<Complex64> = (0..n)
            .map(|i| centre + Complex64::from_polar(radius, std::f64::consts::TAU * i as f64 / n as f64))
            .collect();
        let band = 1e-6 * 2.0 * radius;
        prop_assert_eq!(classify(&poly, centre, band).unwrap(), Containment::Inside);
        prop_assert_eq!(classify(&poly, centre + 20.0 * radius, band).unwrap(), Containment::Outside);
        prop_assert_eq!(classify(&poly, poly[0], band).unwrap(), Containment::NearBoundary);
    }
}
