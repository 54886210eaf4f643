//! Closed-form complex 2×2 linear algebra and spectral-ball membership.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Cx, Real};

/// `|det|` at or below this raises [`Error::SingularMatrix`].
pub const SINGULARITY_THRESHOLD: f64 = 1e-300;

/// Default slack for spectral-ball membership.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2<T> {
    pub x11: Cx<T>,
    pub x12: Cx<T>,
    pub x21: Cx<T>,
    pub x22: Cx<T>,
}

pub(crate) fn singularity_threshold<T: Real>() -> T {
    T::lit(SINGULARITY_THRESHOLD).max(T::min_positive_value())
}

impl<T: Real> Mat2<T> {
    pub fn new(x11: Cx<T>, x12: Cx<T>, x21: Cx<T>, x22: Cx<T>) -> Self {
        Self { x11, x12, x21, x22 }
    }

    /// Builds a matrix from real entries given row by row.
    pub fn real(x11: T, x12: T, x21: T, x22: T) -> Self {
        Self::new(x11.into(), x12.into(), x21.into(), x22.into())
    }

    pub fn zero() -> Self {
        Self::diag(Cx::zero(), Cx::zero())
    }

    pub fn identity() -> Self {
        Self::diag(Cx::one(), Cx::one())
    }

    pub fn diag(a: Cx<T>, b: Cx<T>) -> Self {
        Self::new(a, Cx::zero(), Cx::zero(), b)
    }

    pub fn scalar(c: Cx<T>) -> Self {
        Self::diag(c, c)
    }

    /// Matrix unit `E_ij` for `index = 2·i + j` (0-based, row-major).
    pub fn unit(index: usize) -> Self {
        let mut e = [Cx::zero(); 4];
        e[index] = Cx::one();
        Self::from_entries(e)
    }

    pub fn from_entries(e: [Cx<T>; 4]) -> Self {
        Self::new(e[0], e[1], e[2], e[3])
    }

    pub fn entries(&self) -> [Cx<T>; 4] {
        [self.x11, self.x12, self.x21, self.x22]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().into_iter().all(is_finite)
    }

    pub fn map(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        Self::new(f(self.x11), f(self.x12), f(self.x21), f(self.x22))
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        self.map(|z| z * c)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.x11, self.x21, self.x12, self.x22)
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().map(|z| z.conj())
    }

    pub fn trace(&self) -> Cx<T> {
        self.x11 + self.x22
    }

    pub fn det(&self) -> Cx<T> {
        self.x11 * self.x22 - self.x12 * self.x21
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let det_abs = det.norm();
        if !(det_abs > singularity_threshold::<T>()) {
            return Err(Error::SingularMatrix {
                det_abs: det_abs.to_f64_lossy(),
            });
        }
        let inv = det.inv();
        Ok(Self::new(
            self.x22 * inv,
            -self.x12 * inv,
            -self.x21 * inv,
            self.x11 * inv,
        ))
    }

    /// Roots of `t² − tr·t + det`, larger-modulus root first.
    ///
    /// The sign of the discriminant is matched to the trace so that the
    /// first root is formed without cancellation; the second comes from
    /// the product of the roots.
    pub fn eigenvalues(&self) -> (Cx<T>, Cx<T>) {
        let tr = self.trace();
        let det = self.det();
        let four = T::lit(4.0);
        let half = T::lit(0.5);
        let disc = (tr * tr - det * four).sqrt();
        let plus = tr + disc;
        let minus = tr - disc;
        let big = if plus.norm_sqr() >= minus.norm_sqr() {
            plus
        } else {
            minus
        } * half;
        if big.is_zero() {
            return (Cx::zero(), Cx::zero());
        }
        (big, det / big)
    }

    pub fn spectral_radius(&self) -> T {
        let (a, b) = self.eigenvalues();
        a.norm().max(b.norm())
    }

    pub fn in_spectral_ball(&self, tol: T) -> bool {
        self.spectral_radius() < T::one() - tol
    }

    /// `q⁻¹ · self · q`.
    pub fn similarity(&self, q: &Self) -> Result<Self> {
        Ok(q.inverse()? * *self * *q)
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries()
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other)
            .entries()
            .iter()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> (T, T) {
        // eigenvalues of the Hermitian Gram matrix, in closed form
        let g = self.adjoint() * *self;
        let a = g.x11.re;
        let d = g.x22.re;
        let b = g.x12.norm();
        let half = T::lit(0.5);
        let mean = (a + d) * half;
        let rad = (((a - d) * half).powi(2) + b * b).sqrt();
        let hi = mean + rad;
        let det = (a * d - b * b).max(T::zero());
        let lo = if hi > T::zero() { det / hi } else { T::zero() };
        (hi.max(T::zero()).sqrt(), lo.sqrt())
    }

    /// Converts the entries to `f64`.
    pub fn to_f64(&self) -> Mat2<f64> {
        let w = |z: Cx<T>| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy());
        Mat2::new(w(self.x11), w(self.x12), w(self.x21), w(self.x22))
    }
}

/// Matching distance between two eigenvalue multisets: the better of the
/// two pairings, scored by the worse of its two deviations.
pub fn spectrum_distance<T: Real>(a: (Cx<T>, Cx<T>), b: (Cx<T>, Cx<T>)) -> T {
    let straight = (a.0 - b.0).norm().max((a.1 - b.1).norm());
    let crossed = (a.0 - b.1).norm().max((a.1 - b.0).norm());
    straight.min(crossed)
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.x11 + o.x11,
            self.x12 + o.x12,
            self.x21 + o.x21,
            self.x22 + o.x22,
        )
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.x11 - o.x11,
            self.x12 - o.x12,
            self.x21 - o.x21,
            self.x22 - o.x22,
        )
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.x11 * o.x11 + self.x12 * o.x21,
            self.x11 * o.x12 + self.x12 * o.x22,
            self.x21 * o.x11 + self.x22 * o.x21,
            self.x21 * o.x12 + self.x22 * o.x22,
        )
    }
}

impl<T: Real> Mul<Cx<T>> for Mat2<T> {
    type Output = Self;
    fn mul(self, c: Cx<T>) -> Self {
        self.scale(c)
    }
}

/// A matrix certified to lie in the spectral ball with the recorded slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBallPoint<T> {
    matrix: Mat2<T>,
    tol: T,
}

impl<T: Real> SpectralBallPoint<T> {
    pub fn new(matrix: Mat2<T>, tol: T) -> Result<Self> {
        if !(tol >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "membership tolerance must be nonnegative, got {tol}"
            )));
        }
        if !matrix.is_finite() || !matrix.in_spectral_ball(tol) {
            return Err(Error::OutsideDomain {
                radius: matrix.spectral_radius().to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        Ok(Self { matrix, tol })
    }

    pub fn matrix(&self) -> &Mat2<T> {
        &self.matrix
    }

    pub fn tol(&self) -> T {
        self.tol
    }
}

type Wire<T> = [[[T; 2]; 2]; 2];

impl<T: Real + Serialize> Serialize for Mat2<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let p = |z: Cx<T>| [z.re, z.im];
        let wire: Wire<T> = [[p(self.x11), p(self.x12)], [p(self.x21), p(self.x22)]];
        wire.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Mat2<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::<T>::deserialize(d)?;
        let c = |p: [T; 2]| Complex::new(p[0], p[1]);
        Ok(Self::new(c(w[0][0]), c(w[0][1]), c(w[1][0]), c(w[1][1])))
    }
}
