use nonoverlap::functional::{FunctionalSpec, Term};
use nonoverlap::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spec(rng: &mut ChaCha8Rng) -> FunctionalSpec {
    loop {
        let terms = (0..rng.gen_range(1..=4))
            .map(|_| Term {
                coeff: Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                exponents: [(); 4].map(|_| rng.gen_range(-2..=2)),
            })
            .collect();
        if let Ok(spec) = FunctionalSpec::from_terms(terms) {
            return spec;
        }
    }
}

fn random_omega(rng: &mut ChaCha8Rng) -> [Complex64; 4] {
    [(); 4].map(|_| Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU)))
}

#[test]
fn analytic_partials_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let spec = random_spec(&mut rng);
        let omega = random_omega(&mut rng);
        let grad = spec.gradient_at(&omega).unwrap();
        let scale = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        for k in 0..4 {
            let h = 1e-5 * omega[k].norm();
            let (mut plus, mut minus) = (omega, omega);
            plus[k] += h;
            minus[k] -= h;
            let fd = (spec.eval_at(&plus).unwrap() - spec.eval_at(&minus).unwrap()) / (2.0 * h);
            let err = (fd - grad[k]).norm() / scale.max(1e-300);
            assert!(err <= 1e-6, "case {case} ({spec}), partial {k}: {} vs {fd}, rel {err:e}", grad[k]);
        }
    }
}
