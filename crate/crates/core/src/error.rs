use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: |det| = {det_abs:e} is at or below the inversion threshold")]
    SingularMatrix { det_abs: f64 },

    #[error("point outside the spectral ball: spectral radius {radius} with tolerance {tol:e}")]
    OutsideDomain { radius: f64, tol: f64 },

    #[error("twist exponent has real part {exponent_re}, beyond the overflow guard")]
    OverflowGuard { exponent_re: f64 },

    #[error("automorphism contains an opaque conjugation and has no closed-form inverse")]
    NotInvertibleForm,

    #[error("map does not fix the origin: |f(0)| = {image_norm:e}")]
    NotOriginFixing { image_norm: f64 },

    #[error("expected {expected}, got {got}")]
    WrongForm {
        expected: &'static str,
        got: &'static str,
    },

    #[error("monomial total degree {degree} exceeds the configured maximum {max}")]
    DegreeTooHigh { degree: u32, max: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("least-squares fit is degenerate: every sample point is zero")]
    DegenerateFit,

    #[error("conjugator scalar |a| = {abs:e} vanishes below the guard")]
    VanishingConjugator { abs: f64 },

    #[error("Jacobi sweeps did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    ConvergenceFailure { sweeps: usize, off: f64 },

    #[error("fiber overflow at radius {radius}; largest safe radius tested: {largest_safe:?}")]
    FiberOverflow {
        radius: f64,
        largest_safe: Option<f64>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
