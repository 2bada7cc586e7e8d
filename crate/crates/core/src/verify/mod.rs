//! Executable checks of the no-gap results for the Laplacian on `Z^2` and
//! its small periodic perturbations.

pub mod certificate;
pub mod coupling;
pub mod exceptional;
pub mod sweep;

pub use certificate::{
    certify_interior, recheck_certificate, Attempt, CertificateRoute, Certification, FailureReport,
    InteriorCertificate, Strategy, ZeroEnergySplit,
};
pub use coupling::{
    check_compliance, estimate_threshold, kruger_gap, limit_periodic_truncation, ComplianceRecord,
    ThresholdEstimate,
};
pub use exceptional::{exceptional_energies, ExceptionalSet};
pub use sweep::{
    verify_theorem_sweep, verify_theorem_sweep_with, EnergyKind, EnergyRecord, EnergyStatus,
    ExceptionalSelection, SweepSummary, VerifyReport,
};
