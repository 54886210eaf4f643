//! Randomized search for two distinct points with the same image under the
//! diagonal conjugation whose scalar depends on `x12` alone,
//! `x ↦ diag(a, 1/a) x diag(a, 1/a)⁻¹` with `a = exp(g(x12))`.
//!
//! The map sends `x12 ↦ h(x12) = x12·e^{2g(x12)}` and
//! `x21 ↦ x21·e^{−2g(x12)}`, so a collision of `h` at `z ≠ z'` plus a matched
//! choice of the `(2,1)` entries gives two points with one image.

use rand::Rng;
use serde::Serialize;

use super::sampling::{disc_point, rng_for, Stream};
use crate::automorphism::Automorphism;
use crate::error::Result;
use crate::{EntirePoly64, Mat2d, C64};

/// Default trial budget.
pub const WITNESS_BUDGET: usize = 100_000;

const NEWTON_STEPS: usize = 60;
const MIN_SEPARATION: f64 = 1e-3;
const TARGET_RADIUS: f64 = 2.0;
const START_RADIUS: f64 = 3.0;
const COLLISION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WitnessOutcome {
    Found {
        x: Mat2d,
        y: Mat2d,
        /// `‖J(x) − J(y)‖_F / (1 + ‖J(x)‖_F)`.
        collision_error: f64,
        trials: usize,
    },
    Inconclusive {
        trials: usize,
    },
}

impl WitnessOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, Self::Found { .. })
    }
}

/// The conjugation with scalar `exp(g(x12))`, as an opaque map.
pub fn x12_conjugation(g: &EntirePoly64) -> Automorphism<f64> {
    let g = g.clone();
    // general conjugations act as u⁻¹ x u, so u = diag(1/a, a)
    Automorphism::general_conj(move |x: &Mat2d| {
        let a = g.eval(x.x12).exp();
        Mat2d::diag(a.inv(), a)
    })
}

fn h(g: &EntirePoly64, z: C64) -> C64 {
    z * (g.eval(z) * 2.0).exp()
}

fn h_prime(g: &EntirePoly64, dg: &EntirePoly64, z: C64) -> C64 {
    (g.eval(z) * 2.0).exp() * (C64::new(1.0, 0.0) + z * dg.eval(z) * 2.0)
}

fn newton(g: &EntirePoly64, dg: &EntirePoly64, target: C64, mut z: C64) -> Option<C64> {
    for _ in 0..NEWTON_STEPS {
        let d = h_prime(g, dg, z);
        if d.norm() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
            return None;
        }
        let step = (h(g, z) - target) / d;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let res = (h(g, z) - target).norm();
    (res <= 1e-13 * (1.0 + target.norm())).then_some(z)
}

/// Searches for `x ≠ y` in the spectral ball with `J(x) = J(y)`.
///
/// Each trial picks a target `w = h(z)` and runs Newton on `h(z') = w` from
/// a random start; a root `z'` away from `z` yields the pair. Gives up with
/// [`WitnessOutcome::Inconclusive`] after `budget` trials.
pub fn search_non_injectivity_witness(
    g: &EntirePoly64,
    budget: usize,
    seed: u64,
) -> Result<WitnessOutcome> {
    let dg = g.derivative();
    let map = x12_conjugation(g);
    let mut rng = rng_for(seed, Stream::Witness, 0);
    for trial in 1..=budget {
        let z = disc_point(&mut rng, TARGET_RADIUS);
        let w = h(g, z);
        if !(w.re.is_finite() && w.im.is_finite()) {
            continue;
        }
        let start = disc_point(&mut rng, START_RADIUS);
        let Some(z2) = newton(g, &dg, w, start) else {
            continue;
        };
        if (z2 - z).norm() < MIN_SEPARATION {
            continue;
        }
        // x21 chosen so both points have spectral radius at most 1/2
        let ratio = (g.eval(z2) * 2.0 - g.eval(z) * 2.0).exp();
        let scale = 0.25 / z.norm().max((z2 * ratio).norm()).max(1.0);
        let s = C64::new(scale * rng.gen::<f64>().max(0.5), 0.0);
        let x = Mat2d::new(C64::new(0.0, 0.0), z, s, C64::new(0.0, 0.0));
        let y = Mat2d::new(C64::new(0.0, 0.0), z2, s * ratio, C64::new(0.0, 0.0));
        let (Ok(jx), Ok(jy)) = (map.apply(&x), map.apply(&y)) else {
            continue;
        };
        let collision_error = (jx - jy).frobenius_norm() / (1.0 + jx.frobenius_norm());
        if collision_error <= COLLISION_TOL {
            return Ok(WitnessOutcome::Found {
                x,
                y,
                collision_error,
                trials: trial,
            });
        }
    }
    Ok(WitnessOutcome::Inconclusive { trials: budget })
}
