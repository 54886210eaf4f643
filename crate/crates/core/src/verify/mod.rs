//! Sampling, property checks and the constant-conjugation falsifier.

pub mod checks;
pub mod falsifier;
pub mod fiber;
pub mod hermitian;
pub mod sampling;
pub mod suite;
pub mod witness;

pub use checks::{
    check_commutation, check_conjugate_invariance, check_lower_twist_invariance,
    check_moebius_spectral_mapping, check_round_trip, check_spectrum_preservation,
    diag_conj_roundtrip,
};
pub use falsifier::{
    falsify_diag_twist, fiber_scan, fit_constant_conjugation, FiberScan, FitReport, ScanRow,
    Verdict, NOT_A_CONJUGATION_THRESHOLD,
};
pub use fiber::{circle, fiber_affine_test, fiber_image, fiber_point, AffineFitReport, FiberPoint};
pub use hermitian::hermitian4_min_eigenpair;
pub use sampling::{sample_ball, sample_conjugators, SamplerConfig};
pub use suite::{run_default_suite, Report, SuiteConfig};
pub use witness::{search_non_injectivity_witness, WitnessOutcome};
