//! Seeded sampling of the spectral ball.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), keyed by
//! `seed_from_u64(seed)` and split into independent streams with
//! `set_stream`. Samples are generated in fixed batches of [`BATCH`], batch
//! `b` of a given purpose drawing from stream `(purpose << 32) | b`, so the
//! sample list never depends on how the work is later partitioned.

use std::f64::consts::TAU;
use std::thread;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Mat2, DEFAULT_MEMBERSHIP_TOL};
use crate::{Mat2d, C64};

/// Number of samples drawn from one RNG stream.
pub const BATCH: usize = 64;

/// Lower bound on `|det q|` for sampled conjugators.
pub const MIN_CONJUGATOR_DET: f64 = 0.1;

/// Stream purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum Stream {
    BallPoints = 0,
    Conjugators = 1,
    Parameters = 2,
    Witness = 3,
}

pub fn rng_for(seed: u64, purpose: Stream, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(purpose as u32) << 32) | u64::from(index));
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub count: usize,
    /// Eigenvalues are drawn uniformly from the disc of this radius; `< 1`.
    pub eigenvalue_radius_cap: f64,
    /// Conjugator entries are drawn uniformly from the disc of this radius.
    pub conjugator_entry_scale: f64,
    /// The strictly upper-triangular entry is drawn from the disc of this radius.
    pub nilpotent_scale: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            count: 1000,
            eigenvalue_radius_cap: 0.9,
            conjugator_entry_scale: 0.4,
            nilpotent_scale: 0.25,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cap = self.eigenvalue_radius_cap;
        if !(cap > 0.0 && cap < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue_radius_cap must lie in (0, 1), got {cap}"
            )));
        }
        if !(self.conjugator_entry_scale > 0.0 && self.conjugator_entry_scale.is_finite()) {
            return Err(Error::InvalidParameter(
                "conjugator_entry_scale must be positive".into(),
            ));
        }
        if !(self.nilpotent_scale >= 0.0 && self.nilpotent_scale.is_finite()) {
            return Err(Error::InvalidParameter(
                "nilpotent_scale must be nonnegative".into(),
            ));
        }
        // |det q| ≤ 2·scale², so tiny scales could never reach the bound
        if 2.0 * self.conjugator_entry_scale.powi(2) <= MIN_CONJUGATOR_DET {
            return Err(Error::InvalidParameter(format!(
                "conjugator_entry_scale too small to reach |det q| >= {MIN_CONJUGATOR_DET}"
            )));
        }
        Ok(())
    }
}

/// Uniform point of the closed disc `|z| ≤ radius`.
pub fn disc_point(rng: &mut impl Rng, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex::from_polar(r, TAU * rng.gen::<f64>())
}

fn draw_conjugator(rng: &mut impl Rng, scale: f64) -> Mat2d {
    loop {
        let q = Mat2::new(
            disc_point(rng, scale),
            disc_point(rng, scale),
            disc_point(rng, scale),
            disc_point(rng, scale),
        );
        if q.det().norm() >= MIN_CONJUGATOR_DET {
            return q;
        }
    }
}

fn draw_ball_point(rng: &mut impl Rng, cfg: &SamplerConfig) -> Mat2d {
    loop {
        let l1 = disc_point(rng, cfg.eigenvalue_radius_cap);
        let l2 = disc_point(rng, cfg.eigenvalue_radius_cap);
        let top = disc_point(rng, cfg.nilpotent_scale);
        let t = Mat2::new(l1, top, C64::new(0.0, 0.0), l2);
        let q = draw_conjugator(rng, cfg.conjugator_entry_scale);
        let q_inv = q.inverse().expect("|det q| >= 0.1");
        let x = q * t * q_inv;
        if x.is_finite() && x.in_spectral_ball(DEFAULT_MEMBERSHIP_TOL) {
            return x;
        }
    }
}

fn batched<T>(cfg: &SamplerConfig, purpose: Stream, draw: impl Fn(&mut ChaCha8Rng) -> T) -> Vec<T> {
    let mut out = Vec::with_capacity(cfg.count);
    let mut batch = 0u32;
    while out.len() < cfg.count {
        let mut rng = rng_for(cfg.seed, purpose, batch);
        let take = BATCH.min(cfg.count - out.len());
        out.extend((0..take).map(|_| draw(&mut rng)));
        batch += 1;
    }
    out
}

/// `cfg.count` points `q·T·q⁻¹` of the spectral ball: `T` upper triangular
/// with eigenvalues uniform in the capped disc, `q` random with
/// `|det q| ≥ 0.1`.
pub fn sample_ball(cfg: &SamplerConfig) -> Result<Vec<Mat2d>> {
    cfg.validate()?;
    Ok(batched(cfg, Stream::BallPoints, |rng| draw_ball_point(rng, cfg)))
}

/// `cfg.count` invertible matrices drawn like the conjugators of [`sample_ball`]
/// but from an independent stream.
pub fn sample_conjugators(cfg: &SamplerConfig) -> Result<Vec<Mat2d>> {
    cfg.validate()?;
    Ok(batched(cfg, Stream::Conjugators, |rng| {
        draw_conjugator(rng, cfg.conjugator_entry_scale)
    }))
}

/// Maps `f` over `items` on up to `workers` threads and reduces by maximum.
///
/// The result does not depend on `workers`: the maximum is order-free, and
/// on failure the error of the earliest failing item is returned.
pub fn par_max<T: Sync>(
    items: &[T],
    workers: usize,
    f: impl Fn(&T) -> Result<f64> + Sync,
) -> Result<f64> {
    let fold = |chunk: &[T]| -> Result<f64> {
        chunk.iter().try_fold(0.0f64, |acc, item| {
            let v = f(item)?;
            // NaN must not be swallowed by max
            Ok(if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
        })
    };
    let workers = workers.max(1);
    if workers == 1 || items.len() < 2 {
        return fold(items);
    }
    let chunk = items.len().div_ceil(workers);
    let partials: Vec<Result<f64>> = thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || fold(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    partials.into_iter().try_fold(0.0f64, |acc, r| {
        let v = r?;
        Ok(if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
    })
}
