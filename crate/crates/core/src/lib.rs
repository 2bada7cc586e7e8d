//! Spectral analysis of periodic Schrodinger operators `Laplacian + V` on the
//! square lattice `Z^2`: Floquet fibers, band functions, spectrum
//! approximation and certification of interior band crossings.

pub mod bands;
pub mod cyclotomic;
pub mod eigen;
pub mod error;
pub mod floquet;
pub mod interval;
pub mod laplace1d;
pub mod lattice;
pub mod output;
pub mod potential;
pub mod verify;

pub use bands::{compute_bands, find_gaps, quilt, spectrum, Band, BandStructure, Quilt};
pub use eigen::{hermitian_eigenvalues, hermitian_eigenvalues_with, EigenOptions, EigenvalueList, HermitianMatrix};
pub use error::{Error, Result};
pub use floquet::{
    build_fiber, count_below, fiber_eigenvalues, multiplicity_profile, separable_eigenvalues, EigenCount, FiberMatrix,
    FiberSpectrum, SeparableCounter,
};
pub use interval::{interval_union, EnergyInterval, SpectrumApproximation};
pub use laplace1d::{
    derivative_magnitude, derivative_signs, discriminant, eigenvalues_1d, special_spectrum, twisted_laplacian_matrix,
    EigenvalueWithMultiplicity, SpecialPhase, TwistedLaplacianSpectrum,
};
pub use lattice::{BlochPhase, Period};
pub use potential::{load_potential, Potential, PotentialFormat};
pub use verify::{
    certify_interior, exceptional_energies, kruger_gap, limit_periodic_truncation, verify_theorem_sweep,
    Certification, ExceptionalSet, InteriorCertificate, Strategy, VerifyReport,
};
