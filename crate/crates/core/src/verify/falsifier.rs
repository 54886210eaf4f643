//! Least-squares search for a constant conjugator `n` with `f(x) = n x n⁻¹`
//! on a finite set of points.
//!
//! The objective `Σ_k ‖f(x_k)·n − n·x_k‖²` over `‖n‖_F = 1` is a Hermitian
//! quadratic form in the four entries of `n`; its minimum is the smallest
//! eigenvalue of `A = Σ_k L_k†L_k`, with `L_k : n ↦ f(x_k)n − n x_k`.

use num_complex::Complex;
use serde::Serialize;

use super::fiber::{circle, fiber_image, fiber_point};
use super::hermitian::{hermitian4_min_eigenpair, Herm4};
use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::{EntirePoly64, Mat2d, C64};

/// Residual at or below which a fit counts as an exact conjugation.
pub const CONJUGATION_FOUND_TOL: f64 = 1e-6;

/// Holdout error at or below which the fitted conjugator is accepted.
pub const HOLDOUT_TOL: f64 = 1e-6;

/// Largest singular-value ratio for which the fitted `n` is treated as invertible.
pub const MAX_CONDITION: f64 = 1e6;

/// Residual at or above which the fit certifies that no constant conjugator
/// exists. Half of the residual `10.675…` observed for `φ(t) = t` on 64
/// equispaced fiber points at `|λ| = 2` (regression value).
pub const NOT_A_CONJUGATION_THRESHOLD: f64 = 5.3376;

/// Default fiber circle radius and point count for the falsifier.
pub const FIBER_RADIUS: f64 = 2.0;
pub const FIBER_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ConjugationFound,
    NotAConjugation,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    /// `sqrt(λ_min(A) / Σ‖x_k‖²)`.
    pub residual: f64,
    /// Minimizer with unit Frobenius norm; its largest-modulus entry is
    /// rotated onto the positive real axis.
    pub best_conjugator: Mat2d,
    /// Ratio of the singular values of `best_conjugator` (`inf` if singular).
    pub conjugator_condition: f64,
    /// `max ‖f(x) − n x n⁻¹‖ / (1 + ‖x‖)` over the holdout; `inf` when `n`
    /// is not safely invertible.
    pub holdout_error: f64,
    pub verdict: Verdict,
}

/// Matrix of `n ↦ f·n − n·x` on entry vectors `[n11, n12, n21, n22]`.
pub fn commutator_operator(fx: &Mat2d, x: &Mat2d) -> [C64; 16] {
    let f = [[fx.x11, fx.x12], [fx.x21, fx.x22]];
    let xm = [[x.x11, x.x12], [x.x21, x.x22]];
    let mut l = [C64::new(0.0, 0.0); 16];
    for i in 0..2 {
        for j in 0..2 {
            let row = 2 * i + j;
            for k in 0..2 {
                // (f n)_ij = Σ_k f_ik n_kj
                l[4 * row + 2 * k + j] += f[i][k];
                // (n x)_ij = Σ_k n_ik x_kj
                l[4 * row + 2 * i + k] -= xm[k][j];
            }
        }
    }
    l
}

/// `Σ_k L_k† L_k` for the given point/image pairs.
pub fn normal_operator(pairs: &[(Mat2d, Mat2d)]) -> Herm4 {
    let mut a = [C64::new(0.0, 0.0); 16];
    for (x, fx) in pairs {
        let l = commutator_operator(fx, x);
        for p in 0..4 {
            for q in 0..4 {
                a[4 * p + q] += (0..4).map(|r| l[4 * r + p].conj() * l[4 * r + q]).sum::<C64>();
            }
        }
    }
    a
}

fn fix_phase(n: Mat2d) -> Mat2d {
    let pivot = n
        .entries()
        .into_iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("four entries");
    if pivot.norm() == 0.0 {
        return n;
    }
    n.scale(pivot.conj() / pivot.norm())
}

fn verdict(residual: f64, holdout_error: f64) -> Verdict {
    if residual <= CONJUGATION_FOUND_TOL && holdout_error <= HOLDOUT_TOL {
        Verdict::ConjugationFound
    } else if residual >= NOT_A_CONJUGATION_THRESHOLD {
        Verdict::NotAConjugation
    } else {
        Verdict::Inconclusive
    }
}

/// Fits a constant conjugator from precomputed `(x, f(x))` pairs.
pub fn fit_pairs(
    pairs: &[(Mat2d, Mat2d)],
    holdout: &[(Mat2d, Mat2d)],
) -> Result<FitReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("fit needs at least one point".into()));
    }
    if pairs.iter().chain(holdout).any(|(x, fx)| !x.is_finite() || !fx.is_finite()) {
        return Err(Error::InvalidParameter("fit points must be finite".into()));
    }
    let mass: f64 = pairs.iter().map(|(x, _)| x.frobenius_norm().powi(2)).sum();
    if mass == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let (lambda_min, v) = hermitian4_min_eigenpair(&normal_operator(pairs))?;
    let residual = (lambda_min.max(0.0) / mass).sqrt();
    let n = fix_phase(Mat2d::from_entries(v));
    let n = n.scale(Complex::new(n.frobenius_norm().recip(), 0.0));
    let (s_max, s_min) = n.singular_values();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    let holdout_error = if condition <= MAX_CONDITION {
        let n_inv = n.inverse()?;
        holdout.iter().fold(0.0f64, |acc, (x, fx)| {
            let err = (*fx - n * *x * n_inv).frobenius_norm() / (1.0 + x.frobenius_norm());
            acc.max(err)
        })
    } else {
        f64::INFINITY
    };
    Ok(FitReport {
        residual,
        best_conjugator: n,
        conjugator_condition: condition,
        holdout_error,
        verdict: verdict(residual, holdout_error),
    })
}

/// Looks for a single invertible `n` with `f(x) = n x n⁻¹` on `points`,
/// scoring the candidate on `holdout`.
pub fn fit_constant_conjugation(
    f: &Automorphism<f64>,
    points: &[Mat2d],
    holdout: &[Mat2d],
) -> Result<FitReport> {
    let image = |xs: &[Mat2d]| -> Result<Vec<(Mat2d, Mat2d)>> {
        xs.iter().map(|x| Ok((*x, f.apply(x)?))).collect()
    };
    fit_pairs(&image(points)?, &image(holdout)?)
}

/// Runs the falsifier for the diagonal twist with exponent `phi` on
/// `count` fiber points of the circle `|λ| = radius`, with a holdout of the
/// same size rotated by half a step.
pub fn falsify_diag_twist(phi: &EntirePoly64, radius: f64, count: usize) -> Result<FitReport> {
    let points: Vec<Mat2d> = circle(radius, count, 0.0)
        .into_iter()
        .map(|l| fiber_point(l).matrix)
        .collect();
    let holdout: Vec<Mat2d> = circle(radius, count, 0.5)
        .into_iter()
        .map(|l| fiber_point(l).matrix)
        .collect();
    fit_constant_conjugation(&Automorphism::DiagTwist(phi.clone()), &points, &holdout)
}

/// One row of a fiber scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub lambda: C64,
    /// `None` when the twist exponent tripped the overflow guard.
    pub image: Option<(C64, C64)>,
    /// Share of the squared normalized residual from this point, `inf` for
    /// guarded rows.
    pub residual_contrib: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberScan {
    pub rows: Vec<ScanRow>,
    /// Fit over the rows that evaluated; `None` if every row overflowed.
    pub fit: Option<FitReport>,
    pub overflow_rows: usize,
}

/// Evaluates the twist along `count` equispaced points of `|λ| = radius`,
/// fits a constant conjugator over them and splits the residual per point.
pub fn fiber_scan(phi: &EntirePoly64, radius: f64, count: usize) -> Result<FiberScan> {
    if !(radius > 0.0 && radius.is_finite()) || count == 0 {
        return Err(Error::InvalidParameter(
            "scan needs a positive radius and at least one point".into(),
        ));
    }
    let lambdas = circle(radius, count, 0.0);
    let images: Vec<Option<Mat2d>> = lambdas
        .iter()
        .map(|&l| match fiber_image(phi, l) {
            Ok(m) => Ok(Some(m)),
            Err(Error::OverflowGuard { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(Mat2d, Mat2d)> = lambdas
        .iter()
        .zip(&images)
        .filter_map(|(&l, img)| img.map(|m| (fiber_point(l).matrix, m)))
        .collect();
    let fit = if pairs.is_empty() {
        None
    } else {
        Some(fit_pairs(&pairs, &[])?)
    };
    let mass: f64 = pairs.iter().map(|(x, _)| x.frobenius_norm().powi(2)).sum();
    let rows = lambdas
        .iter()
        .zip(&images)
        .map(|(&lambda, img)| match (img, &fit) {
            (Some(fx), Some(fit)) => {
                let x = fiber_point(lambda).matrix;
                let n = fit.best_conjugator;
                let r = (*fx * n - n * x).frobenius_norm().powi(2) / mass;
                ScanRow {
                    lambda,
                    image: Some((fx.x12, fx.x21)),
                    residual_contrib: r,
                }
            }
            _ => ScanRow {
                lambda,
                image: None,
                residual_contrib: f64::INFINITY,
            },
        })
        .collect();
    Ok(FiberScan {
        rows,
        fit,
        overflow_rows: images.iter().filter(|m| m.is_none()).count(),
    })
}
