use std::f64::consts::FRAC_PI_2;

use nonoverlap::elliptic::{carlson_rf, ellip_f, ellip_k, ellip_pi, ellip_pi_complete};
use nonoverlap::oracle::{
    f_by_quadrature, k_by_quadrature, pi_by_quadrature, pi_complete_by_quadrature,
    sample_elliptic_args,
};
use nonoverlap::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn kernel_identities() {
    let zero = Complex64::new(0.0, 0.0);
    assert!((ellip_k(zero).unwrap().re - FRAC_PI_2).abs() <= 1e-15);
    for k in [Complex64::new(0.3, 0.0), Complex64::new(0.4, 0.5), Complex64::new(-0.2, -0.7)] {
        let kk = ellip_k(k).unwrap();
        assert!(rel(ellip_pi_complete(zero, k).unwrap(), kk) <= 1e-12);
        assert!(rel(ellip_f(Complex64::new(FRAC_PI_2, 0.0), k).unwrap(), kk) <= 1e-12);
    }
    let x = Complex64::new(2.0, -1.0);
    assert!(rel(carlson_rf(x, x, x).unwrap(), 1.0 / x.sqrt()) <= 1e-12);
}

#[test]
fn closed_forms_match_defining_integrals() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let s = sample_elliptic_args(&mut rng);
        let pairs = [
            (ellip_k(s.k).unwrap(), k_by_quadrature(s.k).unwrap()),
            (ellip_f(s.phi, s.k).unwrap(), f_by_quadrature(s.phi, s.k).unwrap()),
            (ellip_pi_complete(s.n, s.k).unwrap(), pi_complete_by_quadrature(s.n, s.k).unwrap()),
            (ellip_pi(s.phi, s.n, s.k).unwrap(), pi_by_quadrature(s.phi, s.n, s.k).unwrap()),
        ];
        for (closed, quad) in pairs {
            assert!(rel(closed, quad) <= 1e-9, "{s:?}: {closed} vs {quad}");
        }
    }
}
