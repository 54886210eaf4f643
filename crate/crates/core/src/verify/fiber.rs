//! The level set `{det x = 0, tr x = 1/2}` and the twist's image on it.

use std::f64::consts::TAU;

use num_complex::Complex;
use serde::Serialize;

use crate::automorphism::TWIST_EXPONENT_GUARD;
use crate::error::{Error, Result};
use crate::{EntirePoly64, Mat2d, C64};

/// A point `[[λ, λ], [1/2 − λ, 1/2 − λ]]` of the fiber; its eigenvalues are
/// `{0, 1/2}` whatever `λ` is, so it lies in the spectral ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberPoint {
    pub lambda: C64,
    pub matrix: Mat2d,
}

pub fn fiber_point(lambda: C64) -> FiberPoint {
    let rest = C64::new(0.5, 0.0) - lambda;
    FiberPoint {
        lambda,
        matrix: Mat2d::new(lambda, lambda, rest, rest),
    }
}

/// `count` equispaced parameters on the circle `|λ| = radius`, starting on
/// the positive real axis, optionally rotated by `offset` (in units of the
/// angular step).
pub fn circle(radius: f64, count: usize, offset: f64) -> Vec<C64> {
    (0..count)
        .map(|k| Complex::from_polar(radius, TAU * (k as f64 + offset) / count as f64))
        .collect()
}

fn twist_exponent(phi: &EntirePoly64, lambda: C64) -> Result<C64> {
    let e = phi.eval(lambda * (C64::new(0.5, 0.0) - lambda));
    if !(e.re.is_finite() && e.im.is_finite()) || e.re.abs() > TWIST_EXPONENT_GUARD {
        return Err(Error::OverflowGuard { exponent_re: e.re });
    }
    Ok(e)
}

/// Image of a fiber point under the diagonal twist, written out directly:
/// `[[λ, e^{−φ(t)}λ], [e^{φ(t)}(1/2 − λ), 1/2 − λ]]` with `t = λ(1/2 − λ)`.
pub fn fiber_image(phi: &EntirePoly64, lambda: C64) -> Result<Mat2d> {
    let e = twist_exponent(phi, lambda)?;
    let rest = C64::new(0.5, 0.0) - lambda;
    Ok(Mat2d::new(lambda, (-e).exp() * lambda, e.exp() * rest, rest))
}

/// Least-squares fit of `g(λ) = e^{φ(λ(1/2 − λ))}·λ` by `αλ + β` on one circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineFitReport {
    pub coeff_alpha: C64,
    pub coeff_beta: C64,
    /// Root-mean-square residual of the fit; `inf` when it exceeds the `f64` range.
    pub residual: f64,
    /// Natural log of `residual`; finite whenever the fit is inexact, even
    /// where `residual` itself overflows.
    pub log_residual: f64,
    pub sample_radius: f64,
}

/// Solves `min Σ|g_k − αλ_k − β|²` through the 2×2 complex normal equations.
fn affine_normal_equations(lambdas: &[C64], g: &[C64]) -> Option<(C64, C64)> {
    let n = lambdas.len() as f64;
    let s_ll: f64 = lambdas.iter().map(|l| l.norm_sqr()).sum();
    let s_l: C64 = lambdas.iter().sum();
    let s_lg: C64 = lambdas.iter().zip(g).map(|(l, v)| l.conj() * v).sum();
    let s_g: C64 = g.iter().sum();
    // [[Σ|λ|², Σλ̄], [Σλ, n]] · [α, β] = [Σλ̄g, Σg]
    let det = s_ll * n - s_l.norm_sqr();
    if !(det.abs() > 0.0) {
        return None;
    }
    let alpha = (s_lg * n - s_l.conj() * s_g) / det;
    let beta = (s_g * s_ll - s_l * s_lg) / det;
    Some((alpha, beta))
}

/// Fits `g(λ) = e^{φ(λ(1/2 − λ))}·λ` by an affine function on each circle
/// `|λ| = R`.
///
/// The samples are rescaled by `e^{−max Re φ}` before fitting, and the scale
/// is restored in log space, so the residual stays representable at radii
/// where `g` itself would overflow. An error is returned only when `φ`
/// evaluates to a non-finite value, naming the largest radius that was safe.
pub fn fiber_affine_test(
    phi: &EntirePoly64,
    radii: &[f64],
    samples_per_radius: usize,
) -> Result<Vec<AffineFitReport>> {
    if samples_per_radius < 3 {
        return Err(Error::InvalidParameter(
            "an affine fit needs at least three samples per radius".into(),
        ));
    }
    let mut out = Vec::with_capacity(radii.len());
    let mut largest_safe: Option<f64> = None;
    for &radius in radii {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radii must be positive, got {radius}"
            )));
        }
        let lambdas = circle(radius, samples_per_radius, 0.0);
        let exponents: Vec<C64> = lambdas
            .iter()
            .map(|&l| phi.eval(l * (C64::new(0.5, 0.0) - l)))
            .collect();
        if exponents.iter().any(|e| !(e.re.is_finite() && e.im.is_finite())) {
            return Err(Error::FiberOverflow {
                radius,
                largest_safe,
            });
        }
        let shift = exponents
            .iter()
            .map(|e| e.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<C64> = lambdas
            .iter()
            .zip(&exponents)
            .map(|(&l, &e)| (e - shift).exp() * l)
            .collect();
        let (alpha, beta) =
            affine_normal_equations(&lambdas, &scaled).ok_or(Error::DegenerateFit)?;
        let sum_sq: f64 = lambdas
            .iter()
            .zip(&scaled)
            .map(|(&l, &v)| (v - alpha * l - beta).norm_sqr())
            .sum();
        let rms = (sum_sq / samples_per_radius as f64).sqrt();
        let log_residual = rms.ln() + shift;
        let restore = shift.exp();
        out.push(AffineFitReport {
            coeff_alpha: alpha * restore,
            coeff_beta: beta * restore,
            residual: log_residual.exp(),
            log_residual,
            sample_radius: radius,
        });
        largest_safe = Some(largest_safe.map_or(radius, |r: f64| r.max(radius)));
    }
    Ok(out)
}
