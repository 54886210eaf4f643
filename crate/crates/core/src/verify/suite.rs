//! The default verification suite and its JSON report lines.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::checks::{
    check_commutation, check_conjugate_invariance, check_lower_twist_invariance,
    check_moebius_spectral_mapping, check_round_trip, check_spectrum_preservation,
    diag_conj_roundtrip,
};
use super::sampling::{disc_point, par_max, rng_for, sample_ball, SamplerConfig, Stream};
use super::witness::{search_non_injectivity_witness, WitnessOutcome, WITNESS_BUDGET};
use crate::automorphism::{Automorphism, LinearMap2, MoebiusParams};
use crate::error::Result;
use crate::format::to_json;
use crate::poly::{InvariantFunction, MonomialTable, TwistFunction};
use crate::{EntirePoly64, Mat2d, C64};

pub const SPECTRUM_TOL: f64 = 1e-10;
pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const MOEBIUS_SPECTRUM_TOL: f64 = 1e-10;
pub const COMMUTATION_TOL: f64 = 1e-9;
pub const COMMUTATION_SAMPLES: usize = 500;
pub const LOWER_TWIST_TOL: f64 = 1e-12;
pub const DIAG_ROUNDTRIP_TOL: f64 = 1e-9;
pub const INVARIANT_CONJUGATOR_TOL: f64 = 1e-10;
/// A conjugator that is not similarity-invariant must move by more than this.
pub const NON_INVARIANT_MARGIN: f64 = 0.01;
pub const LINEARIZATION_TOL: f64 = 1e-7;
pub const TWIST_STRUCTURE_TOL: f64 = 1e-12;

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub pass: bool,
    pub max_deviation: f64,
    pub samples: usize,
    pub seed: u64,
    pub details: Value,
}

impl Report {
    /// Compact JSON with `%.17g` floats.
    pub fn to_json_line(&self) -> String {
        to_json(self).expect("reports serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    /// Caps every upper-bound threshold of the suite when set.
    pub tol: Option<f64>,
    pub workers: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 1000,
            tol: None,
            workers: 1,
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit(angle: f64) -> C64 {
    Complex::from_polar(1.0, angle)
}

fn table(terms: &[((u32, u32, u32), C64)]) -> MonomialTable<f64> {
    MonomialTable::new(terms.iter().copied()).expect("corpus monomials are valid")
}

/// Exponents `φ` of the diagonal twists: `t`, `t²`, `3t + it³`.
pub fn twist_exponents() -> Vec<(&'static str, EntirePoly64)> {
    let p = |v: Vec<C64>| EntirePoly64::new(v).expect("finite");
    vec![
        ("t", EntirePoly64::identity()),
        ("t^2", p(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])),
        (
            "3t+it^3",
            p(vec![c(0.0, 0.0), c(3.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]),
        ),
    ]
}

/// Lower-twist scalars: `x12`, `tr·x12`, `x12·det`.
pub fn lower_twist_scalars() -> Vec<(&'static str, TwistFunction<f64>)> {
    let one = c(1.0, 0.0);
    vec![
        ("x12", TwistFunction::new(table(&[((1, 0, 0), one)]))),
        ("tr*x12", TwistFunction::new(table(&[((1, 1, 0), one)]))),
        ("x12*det", TwistFunction::new(table(&[((1, 0, 1), one)]))),
    ]
}

/// Diagonal-conjugation scalars: `exp(x11)`, `exp(x12·x21)`.
pub fn diag_conj_scalars() -> Vec<(&'static str, InvariantFunction<f64>)> {
    let one = c(1.0, 0.0);
    vec![
        ("exp(x11)", InvariantFunction::exp(table(&[((1, 0, 0), one)]))),
        ("exp(x12*x21)", InvariantFunction::exp(table(&[((0, 0, 1), one)]))),
    ]
}

/// Every structured conjugation form of the corpus, labelled.
pub fn conjugation_corpus() -> Vec<(String, Automorphism<f64>)> {
    let mut out = Vec::new();
    for (name, phi) in twist_exponents() {
        out.push((format!("diag_twist[{name}]"), Automorphism::DiagTwist(phi)));
    }
    for (name, a) in lower_twist_scalars() {
        out.push((format!("lower_twist[{name}]"), Automorphism::LowerTwist(a)));
    }
    for (name, a) in diag_conj_scalars() {
        out.push((format!("diag_conj[{name}]"), Automorphism::diag_conj(a)));
    }
    out
}

/// The Möbius map used by the round-trip corpus: `α = 0.3 + 0.2i`, `γ = e^{iπ/3}`.
pub fn round_trip_moebius() -> MoebiusParams<f64> {
    MoebiusParams::new(c(0.3, 0.2), unit(PI / 3.0)).expect("valid parameters")
}

/// Conjugation corpus plus transposition and [`round_trip_moebius`].
pub fn round_trip_corpus() -> Vec<(String, Automorphism<f64>)> {
    let mut out = conjugation_corpus();
    out.push(("transpose".into(), Automorphism::Transpose));
    out.push(("moebius".into(), Automorphism::Moebius(round_trip_moebius())));
    out
}

/// `count` Möbius parameter pairs drawn from the seed: `α` uniform in the
/// disc of radius 0.9, `γ` uniform on the circle.
pub fn seeded_moebius(seed: u64, count: usize) -> Vec<MoebiusParams<f64>> {
    let mut rng = rng_for(seed, Stream::Parameters, 0);
    (0..count)
        .map(|_| {
            let alpha = disc_point(&mut rng, 0.9);
            let gamma = unit(2.0 * PI * rng.gen::<f64>());
            MoebiusParams::new(alpha, gamma).expect("sampled inside the disc")
        })
        .collect()
}

/// `(label, u, m)` triples for the commutation identity.
pub fn commutation_corpus() -> Vec<(&'static str, Automorphism<f64>, MoebiusParams<f64>)> {
    let one = c(1.0, 0.0);
    let poly = InvariantFunction::poly(table(&[((1, 0, 0), one), ((0, 0, 1), one)]));
    let mp = |a: C64, g: C64| MoebiusParams::new(a, g).expect("valid parameters");
    vec![
        (
            "diag_conj[x11+x12*x21]",
            Automorphism::diag_conj(poly),
            mp(c(0.3, 0.0), unit(PI / 4.0)),
        ),
        (
            "diag_conj[exp(x11)]",
            Automorphism::diag_conj(diag_conj_scalars()[0].1.clone()),
            mp(c(-0.2, 0.4), unit(PI / 3.0)),
        ),
        (
            "diag_conj[exp(x12*x21)]",
            Automorphism::diag_conj(diag_conj_scalars()[1].1.clone()),
            mp(c(0.0, 0.5), c(-1.0, 0.0)),
        ),
    ]
}

/// Conjugators that only see the similarity class, as `(label, form)`.
pub fn invariant_conjugators() -> Vec<(&'static str, Automorphism<f64>)> {
    let one = c(1.0, 0.0);
    vec![
        (
            "diag_conj[exp(tr)]",
            Automorphism::diag_conj(InvariantFunction::exp(table(&[
                ((1, 0, 0), one),
                ((0, 1, 0), one),
            ]))),
        ),
        (
            "diag_conj[exp(det)]",
            Automorphism::diag_conj(InvariantFunction::exp(table(&[
                ((1, 1, 0), one),
                ((0, 0, 1), -one),
            ]))),
        ),
        (
            "diag_conj[1+tr*det]",
            Automorphism::diag_conj(InvariantFunction::poly(table(&[
                ((0, 0, 0), one),
                ((2, 1, 0), one),
                ((1, 2, 0), one),
                ((1, 0, 1), -one),
                ((0, 1, 1), -one),
            ]))),
        ),
    ]
}

/// Conjugators depending on `x12·x21`, which similarity moves.
pub fn non_invariant_conjugators() -> Vec<(&'static str, Automorphism<f64>)> {
    vec![
        (
            "diag_conj[x12*x21]",
            Automorphism::diag_conj(InvariantFunction::poly(table(&[((0, 0, 1), c(1.0, 0.0))]))),
        ),
        ("diag_twist[t]", Automorphism::DiagTwist(EntirePoly64::identity())),
    ]
}

/// Twist exponents for the linearization check, including one with `φ(0) ≠ 0`.
pub fn linearization_corpus() -> Vec<(&'static str, EntirePoly64)> {
    let mut out = twist_exponents();
    out.push((
        "0.2-0.1i+t",
        EntirePoly64::new(vec![c(0.2, -0.1), c(1.0, 0.0)]).expect("finite"),
    ));
    out
}

/// Largest deviation of `f'(0)` from `x ↦ m x m⁻¹`, `m = diag(1, e^{φ(0)})`.
pub fn linearization_deviation(phi: &EntirePoly64) -> Result<f64> {
    let f = Automorphism::DiagTwist(phi.clone());
    let derivative = f.derivative_at_zero()?;
    let m = Mat2d::diag(c(1.0, 0.0), phi.eval(c(0.0, 0.0)).exp());
    let expected = LinearMap2::scaled_conjugation(c(1.0, 0.0), &m)?;
    Ok(derivative.max_deviation(&expected))
}

/// Max of the diagonal drift and the relative drift of `x12·x21` under the twist.
pub fn check_twist_structure(phi: &EntirePoly64, samples: &[Mat2d], workers: usize) -> Result<f64> {
    let f = Automorphism::DiagTwist(phi.clone());
    par_max(samples, workers, |x| {
        let fx = f.apply(x)?;
        let p = x.x12 * x.x21;
        let diag = (fx.x11 - x.x11).norm().max((fx.x22 - x.x22).norm());
        Ok(diag.max((fx.x12 * fx.x21 - p).norm() / (1.0 + p.norm())))
    })
}

struct Builder {
    cfg: SuiteConfig,
    out: Vec<Report>,
}

impl Builder {
    fn cap(&self, threshold: f64) -> f64 {
        self.cfg.tol.map_or(threshold, |t| t.min(threshold))
    }

    fn at_most(&mut self, check: String, value: f64, threshold: f64, samples: usize, details: Value) {
        let threshold = self.cap(threshold);
        let mut details = details;
        details["threshold"] = json!(threshold);
        details["comparison"] = json!("<=");
        self.out.push(Report {
            check,
            pass: value <= threshold,
            max_deviation: value,
            samples,
            seed: self.cfg.seed,
            details,
        });
    }
}

/// Runs every default check and returns the reports sorted by check name.
/// Output is identical for any `workers`.
pub fn run_default_suite(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let sampler = SamplerConfig::with_seed(cfg.seed, cfg.samples);
    let xs = sample_ball(&sampler)?;
    let n = xs.len();
    let w = cfg.workers;
    let mut b = Builder {
        cfg: *cfg,
        out: Vec::new(),
    };

    for (label, f) in conjugation_corpus()
        .into_iter()
        .chain([("transpose".to_string(), Automorphism::Transpose)])
    {
        let d = check_spectrum_preservation(&f, &xs, w)?;
        b.at_most(format!("spectrum_preservation:{label}"), d, SPECTRUM_TOL, n, json!({}));
    }

    for (k, m) in seeded_moebius(cfg.seed, 5).iter().enumerate() {
        let d = check_moebius_spectral_mapping(m, &xs, w)?;
        let details = json!({
            "alpha": [m.alpha().re, m.alpha().im],
            "gamma": [m.gamma().re, m.gamma().im],
        });
        b.at_most(format!("moebius_spectral_mapping:{k}"), d, MOEBIUS_SPECTRUM_TOL, n, details);
    }

    for (label, f) in round_trip_corpus() {
        let d = check_round_trip(&f, &xs, w)?;
        b.at_most(format!("round_trip:{label}"), d, ROUND_TRIP_TOL, n, json!({}));
    }

    let involution = par_max(&xs, w, |x| {
        let back = Automorphism::Transpose.apply(&Automorphism::Transpose.apply(x)?)?;
        Ok(back.max_abs_diff(x))
    })?;
    b.at_most("transpose_involution".into(), involution, 0.0, n, json!({}));

    let head = &xs[..n.min(COMMUTATION_SAMPLES)];
    for (label, u, m) in commutation_corpus() {
        let d = check_commutation(&u, &m, head, w)?;
        let details = json!({
            "alpha": [m.alpha().re, m.alpha().im],
            "gamma": [m.gamma().re, m.gamma().im],
        });
        b.at_most(format!("commutation:{label}"), d, COMMUTATION_TOL, head.len(), details);
    }

    for (label, a) in lower_twist_scalars() {
        let d = check_lower_twist_invariance(&a, &xs, w)?;
        b.at_most(format!("lower_twist_invariance:{label}"), d, LOWER_TWIST_TOL, n, json!({}));
    }

    for (label, phi) in twist_exponents() {
        let d = check_twist_structure(&phi, &xs, w)?;
        b.at_most(format!("diag_twist_structure:{label}"), d, TWIST_STRUCTURE_TOL, n, json!({}));
    }

    let mut diag_scalars = diag_conj_scalars();
    diag_scalars.push(("1", InvariantFunction::poly(MonomialTable::constant(c(1.0, 0.0)))));
    for (label, a) in diag_scalars {
        let d = diag_conj_roundtrip(&a, &xs, w)?;
        b.at_most(format!("diag_conj_roundtrip:{label}"), d, DIAG_ROUNDTRIP_TOL, n, json!({}));
    }

    for (label, u) in invariant_conjugators() {
        let d = check_conjugate_invariance(&u, &sampler, w)?;
        let details = json!({"expect": "invariant"});
        b.at_most(format!("conjugate_invariance:{label}"), d, INVARIANT_CONJUGATOR_TOL, n, details);
    }
    for (label, u) in non_invariant_conjugators() {
        let d = check_conjugate_invariance(&u, &sampler, w)?;
        b.out.push(Report {
            check: format!("conjugate_invariance:{label}"),
            pass: d > NON_INVARIANT_MARGIN,
            max_deviation: d,
            samples: n,
            seed: cfg.seed,
            details: json!({
                "expect": "not invariant",
                "threshold": NON_INVARIANT_MARGIN,
                "comparison": ">",
            }),
        });
    }

    for (label, phi) in linearization_corpus() {
        let d = linearization_deviation(&phi)?;
        let details = json!({"step": crate::automorphism::FD_STEP});
        b.at_most(format!("linearization:diag_twist[{label}]"), d, LINEARIZATION_TOL, 4, details);
    }

    let witness = search_non_injectivity_witness(&EntirePoly64::identity(), WITNESS_BUDGET, cfg.seed)?;
    let (deviation, details) = match &witness {
        WitnessOutcome::Found {
            x,
            y,
            collision_error,
            trials,
        } => (
            *collision_error,
            json!({"outcome": "found", "trials": trials, "x": x, "y": y}),
        ),
        WitnessOutcome::Inconclusive { trials } => {
            (f64::NAN, json!({"outcome": "inconclusive", "trials": trials}))
        }
    };
    // an exhausted budget is reported, not failed
    b.out.push(Report {
        check: "non_injectivity_witness:exp(x12)".into(),
        pass: true,
        max_deviation: deviation,
        samples: 0,
        seed: cfg.seed,
        details,
    });

    let mut out = b.out;
    out.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(out)
}
