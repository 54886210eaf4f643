//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero
//! exit if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_ball::verify::hermitian::{hermitian4_min_eigenpair, mat_vec, Herm4};
use spectral_ball::verify::suite::{
    commutation_corpus, conjugation_corpus, invariant_conjugators, linearization_corpus,
    round_trip_corpus, round_trip_moebius, seeded_moebius, twist_exponents,
};
use spectral_ball::verify::{
    check_commutation, check_conjugate_invariance, check_moebius_spectral_mapping,
    check_round_trip, check_spectrum_preservation, falsify_diag_twist, fiber_affine_test,
    run_default_suite, sample_ball, SamplerConfig, SuiteConfig, Verdict,
    NOT_A_CONJUGATION_THRESHOLD,
};
use spectral_ball::{
    lower_twist_u, Automorphism64, EntirePoly64, InvariantFunction, LinearMap64, Mat2d,
    MonomialTable, TwistFunction, C64,
};

const SEED: u64 = 42;
const WORKERS: usize = 4;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lib<T>(r: spectral_ball::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn samples(count: usize) -> Result<Vec<Mat2d>, String> {
    lib(sample_ball(&SamplerConfig::with_seed(SEED, count)))
}

fn spectrum_preservation() -> Outcome {
    let start = Instant::now();
    let xs = samples(10_000)?;
    let corpus = conjugation_corpus();
    ensure(corpus.len() == 8, "expected 3 twists, 3 lower twists, 2 diagonal conjugations")?;
    let mut worst = 0.0f64;
    for (label, f) in &corpus {
        let d = lib(check_spectrum_preservation(f, &xs, WORKERS))?;
        // equal spectra ⇔ equal trace and determinant
        let mut invariants = 0.0f64;
        for x in &xs {
            let y = lib(f.apply(x))?;
            let scale = 1.0 + x.frobenius_norm().powi(2);
            invariants = invariants
                .max((y.trace() - x.trace()).norm() / scale)
                .max((y.det() - x.det()).norm() / scale);
        }
        ensure(d <= 1e-10, format!("{label}: eigenvalue deviation {d:e}"))?;
        ensure(invariants <= 1e-10, format!("{label}: trace/det deviation {invariants:e}"))?;
        worst = worst.max(d);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("8 forms, 10000 samples, max deviation {worst:.2e}, {elapsed:.2?}"))
}

fn round_trips() -> Outcome {
    let xs = samples(10_000)?;
    let mut worst = 0.0f64;
    for (label, f) in round_trip_corpus() {
        let d = lib(check_round_trip(&f, &xs, WORKERS))?;
        ensure(d <= 1e-9, format!("{label}: round trip {d:e}"))?;
        worst = worst.max(d);
    }
    ensure(round_trip_moebius().alpha() == c(0.3, 0.2), "Möbius parameters")?;

    // twist inverse flips the sign of φ
    for (label, phi) in twist_exponents() {
        let inv = lib(Automorphism64::DiagTwist(phi.clone()).invert())?;
        ensure(inv == Automorphism64::DiagTwist(phi.neg()), format!("{label}: twist inverse"))?;
    }
    // lower twist u x u⁻¹ is undone by u⁻¹ y u, with u read off x12 = y12
    let a = TwistFunction::new(lib(MonomialTable::new([((1, 0, 0), c(1.0, 0.0))]))?);
    let f = Automorphism64::LowerTwist(a.clone());
    for x in &xs[..1000] {
        let y = lib(f.apply(x))?;
        let u = lower_twist_u(&a, &y);
        let back = lib(y.similarity(&u))?;
        let err = (back - *x).frobenius_norm() / (1.0 + x.frobenius_norm());
        ensure(err <= 1e-9, format!("explicit lower-twist inverse {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("10 maps, 10000 samples, max error {worst:.2e}"))
}

fn moebius_spectral_mapping() -> Outcome {
    let xs = samples(10_000)?;
    let params = seeded_moebius(SEED, 5);
    let mut worst = 0.0f64;
    for m in &params {
        let d = lib(check_moebius_spectral_mapping(m, &xs, WORKERS))?;
        ensure(d <= 1e-10, format!("α={} γ={}: {d:e}", m.alpha(), m.gamma()))?;
        worst = worst.max(d);
    }
    Ok(format!("5 maps, 10000 samples, max deviation {worst:.2e}"))
}

fn commutation() -> Outcome {
    let xs = samples(500)?;
    let mut worst = 0.0f64;
    for (label, u, m) in commutation_corpus() {
        let d = lib(check_commutation(&u, &m, &xs, WORKERS))?;
        ensure(d <= 1e-9, format!("{label}: {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("3 pairs, 500 samples, max deviation {worst:.2e}"))
}

fn counterexample_falsification() -> Outcome {
    let start = Instant::now();
    let linear = lib(falsify_diag_twist(&EntirePoly64::identity(), 2.0, 64))?;
    ensure(
        linear.verdict == Verdict::NotAConjugation,
        format!("φ(t)=t verdict {:?}", linear.verdict),
    )?;
    ensure(
        linear.residual >= NOT_A_CONJUGATION_THRESHOLD,
        format!("φ(t)=t residual {} below θ", linear.residual),
    )?;

    let k = 0.3;
    let constant = lib(falsify_diag_twist(&EntirePoly64::constant(c(k, 0.0)), 2.0, 64))?;
    ensure(constant.verdict == Verdict::ConjugationFound, "constant φ not recognized")?;
    ensure(constant.residual <= 1e-8, format!("constant φ residual {:e}", constant.residual))?;
    let d = Mat2d::diag(c(1.0, 0.0), c(k.exp(), 0.0));
    let d = d.scale(c(1.0 / d.frobenius_norm(), 0.0));
    let n = constant.best_conjugator;
    let overlap: C64 = d.entries().iter().zip(n.entries()).map(|(a, b)| a.conj() * b).sum();
    let phase = overlap / overlap.norm();
    let gap = (n - d.scale(phase)).frobenius_norm();
    ensure(gap <= 1e-6, format!("conjugator off diag(1, e^0.3) by {gap:e}"))?;

    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!(
        "residual {:.4} ≥ θ = {NOT_A_CONJUGATION_THRESHOLD}; control residual {:.1e}, conjugator gap {gap:.1e}; {elapsed:.2?}",
        linear.residual, constant.residual
    ))
}

fn singularity_at_infinity() -> Outcome {
    let radii = [1.0, 2.0, 4.0];
    let mut growth = Vec::new();
    for (label, phi) in twist_exponents() {
        let reports = lib(fiber_affine_test(&phi, &radii, 64))?;
        let logs: Vec<f64> = reports.iter().map(|r| r.log_residual).collect();
        ensure(
            logs.windows(2).all(|w| w[0] < w[1]),
            format!("{label}: log residuals {logs:?} not increasing"),
        )?;
        growth.push(format!("{label}: {:.1}→{:.1}", logs[0], logs[2]));
    }
    for k in [c(0.0, 0.0), c(0.3, 0.0), c(-0.5, 1.2)] {
        for r in lib(fiber_affine_test(&EntirePoly64::constant(k), &radii, 64))? {
            ensure(r.residual <= 1e-10, format!("constant {k}: residual {:e}", r.residual))?;
        }
    }
    Ok(format!("ln residual {}", growth.join(", ")))
}

fn conjugate_invariance() -> Outcome {
    let cfg = SamplerConfig::with_seed(SEED, 1000);
    let mut invariant = 0.0f64;
    for (label, u) in invariant_conjugators() {
        let d = lib(check_conjugate_invariance(&u, &cfg, WORKERS))?;
        ensure(d <= 1e-10, format!("{label}: {d:e}"))?;
        invariant = invariant.max(d);
    }
    let product = InvariantFunction::poly(lib(MonomialTable::new([((0, 0, 1), c(1.0, 0.0))]))?);
    let moved = lib(check_conjugate_invariance(&Automorphism64::diag_conj(product), &cfg, WORKERS))?;
    ensure(moved > 0.01, format!("a = x12·x21 moved only {moved:e}"))?;
    Ok(format!("invariant max {invariant:.2e}; x12·x21 moves by {moved:.3}"))
}

fn linearization() -> Outcome {
    let corpus = linearization_corpus();
    ensure(corpus.len() >= 3, "corpus too small")?;
    let mut worst = 0.0f64;
    for (label, phi) in corpus {
        let derivative = lib(Automorphism64::DiagTwist(phi.clone()).derivative_at_zero())?;
        let e = phi.eval(c(0.0, 0.0)).exp();
        // m x m⁻¹ with m = diag(1, e^{φ(0)}) scales x12 by e^{−φ(0)} and x21 by e^{φ(0)}
        let expected = LinearMap64::from_fn(|x| Mat2d::new(x.x11, x.x12 / e, x.x21 * e, x.x22));
        let d = derivative.max_deviation(&expected);
        ensure(d <= 1e-7, format!("{label}: {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("4 exponents, max deviation {worst:.2e}"))
}

/// Characteristic polynomial coefficients `[c0, c1, c2, c3]` of
/// `λ⁴ + c3 λ³ + c2 λ² + c1 λ + c0` by Faddeev–LeVerrier.
fn char_poly(a: &Herm4) -> [C64; 4] {
    let mul = |x: &Herm4, y: &Herm4| {
        let mut z = [c(0.0, 0.0); 16];
        for i in 0..4 {
            for j in 0..4 {
                z[4 * i + j] = (0..4).map(|k| x[4 * i + k] * y[4 * k + j]).sum();
            }
        }
        z
    };
    let trace = |x: &Herm4| (0..4).map(|i| x[5 * i]).sum::<C64>();
    let mut coeffs = [c(0.0, 0.0); 5];
    coeffs[4] = c(1.0, 0.0);
    let mut m = [c(0.0, 0.0); 16];
    for k in 1..=4 {
        for i in 0..4 {
            m[5 * i] += coeffs[5 - k];
        }
        let am = mul(a, &m);
        coeffs[4 - k] = -trace(&am) / k as f64;
        m = am;
    }
    [coeffs[0], coeffs[1], coeffs[2], coeffs[3]]
}

/// All four roots of a monic quartic by Durand–Kerner iteration.
fn quartic_roots(p: [C64; 4]) -> [C64; 4] {
    let eval = |z: C64| (((z + p[3]) * z + p[2]) * z + p[1]) * z + p[0];
    let bound = 1.0 + p.iter().map(|q| q.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9);
    let mut roots: [C64; 4] = std::array::from_fn(|k| seed.powi(k as i32) * bound);
    for _ in 0..500 {
        let mut shift = 0.0f64;
        for i in 0..4 {
            let denom: C64 = (0..4).filter(|&j| j != i).map(|j| roots[i] - roots[j]).product();
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            shift = shift.max(step.norm());
        }
        if shift <= 1e-16 * bound {
            break;
        }
    }
    roots
}

fn random_hermitian(rng: &mut ChaCha8Rng, scale: f64) -> Herm4 {
    let mut a = [c(0.0, 0.0); 16];
    for i in 0..4 {
        a[5 * i] = c(scale * rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..4 {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
            a[4 * i + j] = z;
            a[4 * j + i] = z.conj();
        }
    }
    a
}

fn eigensolver_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let scale = 10f64.powi(trial % 7 - 3);
        let a = random_hermitian(&mut rng, scale);
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let roots = quartic_roots(char_poly(&a));
        let oracle = roots.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let (lambda, v) = lib(hermitian4_min_eigenpair(&a))?;
        let err = (lambda - oracle).abs() / norm;
        let av = mat_vec(&a, &v);
        let residual = (0..4).map(|i| (av[i] - v[i] * lambda).norm_sqr()).sum::<f64>().sqrt() / norm;
        let unit = (v.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs();
        ensure(err <= 1e-9, format!("matrix {trial}: λ_min {lambda} against {oracle}"))?;
        ensure(residual <= 1e-9, format!("matrix {trial}: eigenvector residual {residual:e}"))?;
        ensure(unit <= 1e-12, format!("matrix {trial}: eigenvector norm off by {unit:e}"))?;
        worst = worst.max(err).max(residual);
    }
    Ok(format!("100 matrices, max relative error {worst:.2e}"))
}

fn determinism() -> Outcome {
    let run = |workers: usize| -> Result<String, String> {
        let cfg = SuiteConfig {
            seed: SEED,
            samples: 1000,
            tol: None,
            workers,
        };
        Ok(lib(run_default_suite(&cfg))?
            .iter()
            .map(|r| r.to_json_line() + "\n")
            .collect())
    };
    let reference = run(1)?;
    for workers in [1, 2, 3, 8] {
        ensure(run(workers)? == reference, format!("report differs with {workers} workers"))?;
    }
    ensure(reference.lines().count() >= 10, "too few report lines")?;
    Ok(format!("{} report bytes identical for 1, 2, 3, 8 workers", reference.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("spectrum preservation", spectrum_preservation),
        ("round trips", round_trips),
        ("Möbius spectral mapping", moebius_spectral_mapping),
        ("commutation identity", commutation),
        ("counterexample falsification", counterexample_falsification),
        ("growth of the fiber twist", singularity_at_infinity),
        ("conjugate-invariance separation", conjugate_invariance),
        ("linearization at the origin", linearization),
        ("eigensolver against characteristic polynomial", eigensolver_oracle),
        ("determinism across workers", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(summary) => println!("PASS criterion {}: {name}: {summary}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
