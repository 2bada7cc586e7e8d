//! Acceptance criteria, one test per criterion. Each writes a single
//! PASS/FAIL line straight to stderr so it shows even when output is
//! captured.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use latticebands::bands::{band_structure, quilt};
use latticebands::floquet::build_fiber_at;
use latticebands::verify::{
    check_compliance, kruger_gap, limit_periodic_truncation, verify_theorem_sweep, verify_theorem_sweep_with,
    CertificateRoute, EnergyKind, EnergyStatus, ExceptionalSelection, ZeroEnergySplit,
};
use latticebands::{
    compute_bands, discriminant, eigenvalues_1d, find_gaps, hermitian_eigenvalues, multiplicity_profile,
    separable_eigenvalues, spectrum, BlochPhase, EigenOptions, Period, Potential, SpecialPhase,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, failures: &[String], elapsed: Duration, limit: Duration) {
    let timed_out = elapsed > limit;
    let pass = failures.is_empty() && !timed_out;
    let mut line = format!(
        "acceptance {n:>2} [{}] {name} ({:.1}s, limit {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    if timed_out {
        line.push_str(" runtime exceeded");
    }
    for f in failures.iter().take(5) {
        line.push_str("\n    ");
        line.push_str(f);
    }
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(pass, "{line}");
}

fn per(p: usize, q: usize) -> Period {
    Period::new(p, q).unwrap()
}

macro_rules! check {
    ($fails:ident, $cond:expr, $($msg:tt)+) => {
        if !$cond {
            $fails.push(format!($($msg)+));
        }
    };
}

#[test]
fn criterion_01_free_spectrum() {
    let start = Instant::now();
    let mut fails = Vec::new();
    for (p, q) in [(5, 4), (10, 2), (8, 10)] {
        let v = Potential::zero(per(p, q));
        for (res, cap) in [(65, 0.1), (513, 0.013)] {
            let t = Instant::now();
            let s = spectrum(&v, res).unwrap();
            let e = s.error_bound;
            check!(fails, s.component_count() == 1, "{p}x{q} R={res}: {} components", s.component_count());
            let h = s.hull().unwrap();
            check!(fails, (h.lo + 4.0).abs() <= e && (h.hi - 4.0).abs() <= e, "{p}x{q} R={res}: hull {h:?}");
            check!(fails, e <= cap, "{p}x{q} R={res}: error bound {e} > {cap}");
            check!(fails, t.elapsed() < Duration::from_secs(60), "{p}x{q} R={res}: {:?}", t.elapsed());
        }
    }
    report(1, "free Laplacian spectrum is [-4,4]", &fails, start.elapsed(), Duration::from_secs(180));
}

#[test]
fn criterion_02_bottom_band() {
    let start = Instant::now();
    let mut fails = Vec::new();
    for r in [2usize, 4, 6, 8] {
        let b = compute_bands(&Potential::zero(Period::square(r).unwrap()), 65).unwrap()[0];
        let want_hi = -4.0 * (PI / r as f64).cos();
        check!(
            fails,
            (b.enclosure.lo + 4.0).abs() <= b.grid_error && (b.enclosure.hi - want_hi).abs() <= b.grid_error,
            "r={r}: {:?} vs [-4, {want_hi}]",
            b.enclosure
        );
    }
    report(2, "bottom band [-4, -4cos(pi/r)]", &fails, start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_03_discriminant() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for r in 1..=50 {
        for k in 0..1000 {
            let eta = PI * k as f64 / 999.0;
            let d = discriminant(2.0 * eta.cos(), r);
            worst = worst.max((d - 2.0 * (r as f64 * eta).cos()).abs());
        }
    }
    let mut fails = Vec::new();
    check!(fails, worst <= 1e-9, "max deviation {worst:e}");
    report(3, "discriminant D(2cos eta) = 2cos(r eta)", &fails, start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_04_derivative_formula() {
    let start = Instant::now();
    let h = 1e-5;
    let mut fails = Vec::new();
    for r in 1..=20 {
        for (theta, step) in [(0.0, h), (PI, -h)] {
            let base = eigenvalues_1d(r, theta).eigenvalues;
            let moved = eigenvalues_1d(r, theta + step).eigenvalues;
            for (j, (a, b)) in base.iter().zip(&moved).enumerate() {
                let fd = ((b - a) / step).abs();
                let want = (4.0 - a * a).max(0.0).sqrt() / r as f64;
                check!(fails, (fd - want).abs() <= 1e-4, "r={r} theta={theta} j={}: {fd} vs {want}", j + 1);
            }
        }
    }
    report(4, "corner derivative sqrt(4-lambda^2)/r", &fails, start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_05_multiplicity_laws() {
    let start = Instant::now();
    let mut fails = Vec::new();
    for r in [2usize, 4, 6, 8, 10] {
        let p = Period::square(r).unwrap();
        for e in multiplicity_profile(p, SpecialPhase::Zero, SpecialPhase::Zero) {
            let m = e.multiplicity;
            let ok = if (e.value.abs() - 4.0).abs() < 1e-12 {
                m == 1
            } else if e.value.abs() < 1e-12 {
                m % 4 == 2
            } else {
                m % 4 == 0
            };
            check!(fails, ok, "r={r} (0,0): value {} multiplicity {m}", e.value);
        }
        for e in multiplicity_profile(p, SpecialPhase::Pi, SpecialPhase::Pi) {
            check!(fails, e.multiplicity % 4 == 0, "r={r} (pi,pi): value {} multiplicity {}", e.value, e.multiplicity);
        }
    }
    report(5, "multiplicity laws at the corners", &fails, start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_06_parity_quilt() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let q = quilt(&Potential::zero(per(8, 10)), -0.01, 201).unwrap();
    check!(fails, q.counts.len() == 201 && q.counts.iter().all(|r| r.len() == 201), "quilt shape");
    match (q.corner_zero(), q.corner_pi()) {
        (Some(a), Some(b)) => {
            check!(fails, a % 2 == 1, "count at (0,0) = {a} is even");
            check!(fails, b % 2 == 0, "count at (pi,pi) = {b} is odd");
        }
        other => fails.push(format!("undefined corner counts {other:?}")),
    }
    report(6, "parity quilt for 8x10 at E=-0.01", &fails, start.elapsed(), Duration::from_secs(600));
}

#[test]
fn criterion_07_theorem_sweep() {
    let start = Instant::now();
    let mut fails = Vec::new();
    for (p, q) in [(5, 4), (1, 12), (11, 12)] {
        let rep = verify_theorem_sweep(per(p, q), 200).unwrap();
        let bad = rep.energies.iter().filter(|r| r.status != EnergyStatus::Certified).count();
        check!(fails, bad == 0, "{p}x{q}: {bad} energies not certified ({:?})", rep.summary);
        let zero = rep.zero_record().unwrap();
        check!(fails, zero.status == EnergyStatus::Certified && zero.required, "{p}x{q}: E=0 not certified");
        let split = zero.certificate.as_ref().and_then(|c| match c.route {
            CertificateRoute::ZeroEnergy { split, .. } => Some((split, c.count_a, c.count_b)),
            _ => None,
        });
        if (p, q) == (1, 12) {
            let want = ZeroEnergySplit { s: 5, t: 0, ell_minus: 0, ell_plus: 2 };
            check!(fails, split == Some((want, 5, 7)), "1x12 zero split {split:?}");
        }
        if (p, q) == (11, 12) {
            let want = ZeroEnergySplit { s: 65, t: 0, ell_minus: 2, ell_plus: 0 };
            check!(fails, split == Some((want, 67, 65)), "11x12 zero split {split:?}");
        }
    }
    // exceptional energies only for the large square period
    let rep = verify_theorem_sweep_with(per(30, 30), 0, ExceptionalSelection::All).unwrap();
    let exc = rep.energies.iter().filter(|r| r.kind == EnergyKind::Exceptional).count();
    check!(fails, exc > 0 && rep.passed(), "30x30 exceptional: {:?}", rep.summary);
    let uncertified = rep.energies.iter().filter(|r| r.kind == EnergyKind::Exceptional && r.status != EnergyStatus::Certified).count();
    check!(fails, uncertified == 0, "30x30: {uncertified} exceptional energies uncertified");

    let rep = verify_theorem_sweep(per(8, 10), 200).unwrap();
    let z = rep.zero_record().unwrap();
    check!(fails, z.status == EnergyStatus::Uncertified && !z.required, "8x10: E=0 status {:?}", z.status);
    check!(fails, rep.passed(), "8x10: {:?}", rep.summary);
    report(7, "theorem sweep certifies interior energies", &fails, start.elapsed(), Duration::from_secs(900));
}

#[test]
fn criterion_08_checkerboard_counterexample() {
    let start = Instant::now();
    let mut fails = Vec::new();
    for d in [0.1, 0.5, 1.0] {
        match kruger_gap(d, 65) {
            Ok(s) => {
                let e = s.error_bound;
                let iv = &s.intervals;
                // outer edge from the 4x4 characteristic polynomial at (0,0)
                let fib = build_fiber_at(&Potential::checkerboard(d).unwrap(), 0.0, 0.0);
                let top = *hermitian_eigenvalues(&fib.matrix).unwrap().values.last().unwrap();
                check!(fails, iv.len() == 2, "delta={d}: {} components", iv.len());
                if iv.len() == 2 {
                    check!(fails, (iv[0].hi + d).abs() <= e && (iv[1].lo - d).abs() <= e, "delta={d}: inner {iv:?}");
                    check!(fails, (iv[0].lo + top).abs() <= e && (iv[1].hi - top).abs() <= e, "delta={d}: outer {iv:?}");
                    check!(fails, (top - (16.0 + d * d).sqrt()).abs() < 1e-12, "delta={d}: oracle {top}");
                }
            }
            Err(err) => fails.push(format!("delta={d}: {err}")),
        }
    }
    report(8, "checkerboard gap (-delta, delta)", &fails, start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_09_small_coupling() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (p, q) in [(3, 2), (5, 4), (1, 12), (2, 2), (4, 4), (8, 10)] {
        let period = per(p, q);
        for k in 0..50 {
            let v = Potential::random(period, 0.02, &mut rng).unwrap();
            // the 80-dimensional fibers are checked at a single resolution
            let (components, gaps) = if (p, q) == (8, 10) {
                let s = spectrum(&v, 33).unwrap();
                (s.component_count(), find_gaps(&s, &v))
            } else {
                let rec = check_compliance(&v, 1.0, 33).unwrap();
                check!(fails, rec.components == rec.components_refined, "{p}x{q} #{k}: resolutions disagree");
                (rec.components_refined, rec.gaps)
            };
            if period.has_odd() {
                check!(fails, components == 1, "{p}x{q} #{k}: {components} components");
            } else {
                check!(fails, components <= 2, "{p}x{q} #{k}: {components} components");
                check!(fails, gaps.iter().all(|g| g.contains_open(0.0)), "{p}x{q} #{k}: gaps {gaps:?}");
            }
        }
    }
    report(9, "small-coupling component law", &fails, start.elapsed(), Duration::from_secs(1200));
}

#[test]
fn criterion_10_oracle_equivalence() {
    let start = Instant::now();
    let mut fails = Vec::new();
    for p in 1..=10 {
        for q in 1..=10 {
            let v = Potential::zero(per(p, q));
            for i in 0..9 {
                for k in 0..9 {
                    let ph = BlochPhase::grid_point(i, k, 9);
                    let fast = separable_eigenvalues(p, q, ph);
                    let fib = build_fiber_at(&v, ph.theta(), ph.phi());
                    let dense = hermitian_eigenvalues(&fib.matrix).unwrap().values;
                    let dev = fast.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    check!(fails, dev <= 1e-9, "{p}x{q} at ({i},{k}): deviation {dev:e}");
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let (p, q) = (rng.random_range(2..=12), rng.random_range(2..=12));
        let v = Potential::random(per(p, q), rng.random_range(0.0..3.0), &mut rng).unwrap();
        let (t, f) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let fib = build_fiber_at(&v, t, f);
        let ev = hermitian_eigenvalues(&fib.matrix).unwrap().values;
        let tr: f64 = ev.iter().sum();
        let vs: f64 = v.values().iter().sum();
        check!(fails, (tr - vs).abs() <= (p * q) as f64 * 1e-9, "{p}x{q}: trace {tr} vs {vs}");
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        let fro = fib.matrix.frobenius_norm().powi(2);
        check!(fails, (sq - fro).abs() <= 1e-8 * fro, "{p}x{q}: Frobenius {sq} vs {fro}");
    }
    report(10, "separable/dense agreement, trace and Frobenius", &fails, start.elapsed(), Duration::from_secs(120));
}

#[test]
fn criterion_11_corollary_truncation() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let amps = [1e-2, 1e-3, 1e-4];
    let build = |periods: [(usize, usize); 3], rng: &mut ChaCha8Rng| {
        let layers: Vec<(Potential, f64)> = periods
            .iter()
            .zip(amps)
            .map(|(&(p, q), a)| (Potential::random(per(p, q), 1.0, rng).unwrap(), a))
            .collect();
        limit_periodic_truncation(&layers).unwrap()
    };
    let odd = build([(1, 3), (3, 3), (3, 9)], &mut rng);
    let rec = check_compliance(&odd, 1.0, 33).unwrap();
    check!(fails, rec.components == 1 && rec.components_refined == 1, "odd layers: {rec:?}");
    let even = build([(2, 2), (4, 4), (8, 8)], &mut rng);
    let s = band_structure(&even, 33, &EigenOptions::default()).unwrap().spectrum();
    let gaps = find_gaps(&s, &even);
    check!(fails, s.component_count() <= 2, "even layers: {} components", s.component_count());
    check!(fails, gaps.iter().all(|g| g.contains_open(0.0)), "even layers: gaps {gaps:?}");
    report(11, "limit-periodic truncations", &fails, start.elapsed(), Duration::from_secs(300));
}
