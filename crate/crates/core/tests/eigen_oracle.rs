use latticebands::{build_fiber, hermitian_eigenvalues, BlochPhase, Period, Potential};
use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn dense_oracle(v: &Potential, phase: BlochPhase) -> Vec<f64> {
    let fib = build_fiber(v, phase);
    let n = fib.dim();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let z = fib.matrix.get(i, j);
        Complex::new(z.re, z.im)
    });
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

#[test]
fn fiber_eigenvalues_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, q) in [(1, 1), (1, 5), (2, 2), (3, 4), (6, 5), (8, 10)] {
        let v = Potential::random(Period::new(p, q).unwrap(), 1.5, &mut rng).unwrap();
        for phase in [BlochPhase::ZERO, BlochPhase::PI_PI, BlochPhase::new(0.7, 2.9).unwrap()] {
            let ours = hermitian_eigenvalues(&build_fiber(&v, phase).matrix).unwrap();
            let want = dense_oracle(&v, phase);
            assert!(ours.residual_bound < 1e-10);
            for (a, b) in ours.values.iter().zip(&want) {
                assert!((a - b).abs() < 1e-10, "{p}x{q}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn large_fiber_is_fast_enough() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let v = Potential::random(Period::new(8, 10).unwrap(), 1.0, &mut rng).unwrap();
    let start = Instant::now();
    for k in 0..50 {
        let ph = BlochPhase::new(0.06 * k as f64, 0.05).unwrap();
        hermitian_eigenvalues(&build_fiber(&v, ph).matrix).unwrap();
    }
    eprintln!("50 solves of 80x80: {:?}", start.elapsed());
}
