//! Numerical checks of the automorphism laws over batches of sample points.
//! Each check returns the largest deviation it saw.

use crate::automorphism::{Automorphism, MoebiusParams};
use crate::error::{Error, Result};
use crate::matrix::spectrum_distance;
use crate::poly::{InvariantFunction, TwistFunction};
use crate::{Mat2d, C64};

use super::sampling::{par_max, sample_ball, sample_conjugators, SamplerConfig};

/// Guard on `|a|` for the diagonal round trip.
pub const VANISHING_GUARD: f64 = 1e-6;

/// Max eigenvalue-multiset distance between `x` and `f(x)` for a
/// spectrum-preserving `f` (conjugation forms and transposition).
pub fn check_spectrum_preservation(
    f: &Automorphism<f64>,
    samples: &[Mat2d],
    workers: usize,
) -> Result<f64> {
    if !f.preserves_spectrum() {
        return Err(Error::WrongForm {
            expected: "a conjugation form or transpose",
            got: f.kind(),
        });
    }
    par_max(samples, workers, |x| {
        Ok(spectrum_distance(x.eigenvalues(), f.apply(x)?.eigenvalues()))
    })
}

/// Max distance between the spectrum of `M(x)` and the scalar Möbius image
/// of the spectrum of `x`.
pub fn check_moebius_spectral_mapping(
    m: &MoebiusParams<f64>,
    samples: &[Mat2d],
    workers: usize,
) -> Result<f64> {
    let f = Automorphism::Moebius(*m);
    par_max(samples, workers, |x| {
        let (a, b) = x.eigenvalues();
        Ok(spectrum_distance(
            f.apply(x)?.eigenvalues(),
            (m.scalar(a), m.scalar(b)),
        ))
    })
}

/// Max of `‖f⁻¹(f(x)) − x‖_F / (1 + ‖x‖_F)`.
pub fn check_round_trip(f: &Automorphism<f64>, samples: &[Mat2d], workers: usize) -> Result<f64> {
    let inv = f.invert()?;
    par_max(samples, workers, |x| {
        let back = inv.apply_with_tol(&f.apply(x)?, 0.0)?;
        Ok((back - *x).frobenius_norm() / (1.0 + x.frobenius_norm()))
    })
}

/// Max Frobenius gap between the two sides of `J_u ∘ M = M ∘ J_{u∘M}`,
/// i.e. `Compose([Moebius(m), u])` against `Compose([u∘M, Moebius(m)])`.
pub fn check_commutation(
    u: &Automorphism<f64>,
    m: &MoebiusParams<f64>,
    samples: &[Mat2d],
    workers: usize,
) -> Result<f64> {
    if !matches!(u, Automorphism::DiagConj { .. } | Automorphism::GeneralConj(_)) {
        return Err(Error::WrongForm {
            expected: "diag_conj or general_conj",
            got: u.kind(),
        });
    }
    let moebius = Automorphism::Moebius(*m);
    let lhs = Automorphism::compose(vec![moebius.clone(), u.clone()])?;
    let rhs = Automorphism::compose(vec![u.commutation_conjugate(m)?, moebius])?;
    par_max(samples, workers, |x| {
        Ok((lhs.apply(x)? - rhs.apply(x)?).frobenius_norm())
    })
}

/// Max of `|f(x)₁₂ − x₁₂|`, `|tr f(x) − tr x|` and `|det f(x) − det x|` for
/// the lower twist, relative to the size of the compared quantity.
pub fn check_lower_twist_invariance(
    a: &TwistFunction<f64>,
    samples: &[Mat2d],
    workers: usize,
) -> Result<f64> {
    let f = Automorphism::LowerTwist(a.clone());
    par_max(samples, workers, |x| {
        let fx = f.apply(x)?;
        let rel = |p: C64, q: C64| (p - q).norm() / (1.0 + q.norm());
        Ok(rel(fx.x12, x.x12)
            .max(rel(fx.trace(), x.trace()))
            .max(rel(fx.det(), x.det())))
    })
}

/// Max of `‖c(q⁻¹xq) − c(x)‖_F` over sampled pairs, where `c` is the
/// conjugator-valued map of `u` (see [`Automorphism::conjugator_at`]).
pub fn check_conjugate_invariance(
    u: &Automorphism<f64>,
    cfg: &SamplerConfig,
    workers: usize,
) -> Result<f64> {
    if matches!(u, Automorphism::Compose(_)) || !u.is_conjugation_form() {
        return Err(Error::WrongForm {
            expected: "a single conjugation form",
            got: u.kind(),
        });
    }
    let xs = sample_ball(cfg)?;
    let qs = sample_conjugators(cfg)?;
    let pairs: Vec<(Mat2d, Mat2d)> = xs.into_iter().zip(qs).collect();
    par_max(&pairs, workers, |(x, q)| {
        let moved = x.similarity(q)?;
        Ok((u.conjugator_at(&moved)? - u.conjugator_at(x)?).frobenius_norm())
    })
}

/// Round trip of `x ↦ diag(a, 1/a) x diag(a, 1/a)⁻¹` through the same map
/// with `a` replaced by `1/a`, which inverts it because `x11`, `x22` and
/// `x12·x21` are all fixed by the map.
pub fn diag_conj_roundtrip(
    a: &InvariantFunction<f64>,
    samples: &[Mat2d],
    workers: usize,
) -> Result<f64> {
    let forward = Automorphism::diag_conj(a.clone());
    let backward = Automorphism::diag_conj(a.reciprocal());
    par_max(samples, workers, |x| {
        let s = a.eval(x);
        if !(s.norm() >= VANISHING_GUARD) {
            return Err(Error::VanishingConjugator { abs: s.norm() });
        }
        let back = backward.apply_with_tol(&forward.apply(x)?, 0.0)?;
        Ok((back - *x).frobenius_norm() / (1.0 + x.frobenius_norm()))
    })
}
