//! Computable total quantum correlation for multipartite density matrices.
//!
//! A state is expanded in a product basis of orthonormal Hermitian operators
//! ([`basis`]). For each subsystem a correlation matrix is formed from the
//! expansion coefficients and the distance to the nearest state classical on
//! that subsystem follows from its eigenvalues ([`measure`]). Measuring the
//! subsystems one after another and summing gives the total correlation.

pub mod basis;
pub mod error;
pub mod figures;
pub mod ising;
pub mod measure;
mod modes;
pub mod oracle;
pub mod state;
pub mod state_file;
pub mod zoo;

pub type Complex64 = nalgebra::Complex<f64>;

pub use basis::{gellmann_generators, orthonormal_basis, CMatrix, GeneratorSet, OrthonormalBasis};
pub use error::{QcorrError, Result};
pub use measure::{
    apply_projector, correlation_matrix, subsystem_correlation, total_correlation_max, total_correlation_sequence,
    CorrelationMatrix, MeasureReport, MeasureStep, Projector, SubsystemCorrelation, Variant,
};
pub use state::{BipartiteTriple, CoefficientTensor, DensityMatrix};
pub use zoo::{build, random_mixed, StateSpec};
