//! State tomography from post-selected single-click probabilities: Hermitian
//! measurement bases, linear inversion, a positive-semidefinite
//! least-squares fit, fidelity, and the partial-transpose witness.

mod basis;
mod ensemble;
mod linalg;
mod mle;
mod reconstruct;

pub use basis::{build_basis, Eigensystem, HermitianBasis};
pub use ensemble::{
    alpha_sweep, ensemble_states, ensemble_sweep, fig11_visibility, EnsembleConfig, StateRecord,
    SweepPoint, SweepTable, ENSEMBLE_STREAM,
};
pub use linalg::{fidelity, hermitian_eigen, min_eigenvalue, partial_transpose, ppt_witness};
pub use mle::{mle_qst, MleEstimate, MleOptions};
pub use reconstruct::{
    expectations_of, linear_qst, measure_expectations, tomography_report, DensityMatrix,
    LinearEstimate, Method, TomographyReport, HERMITIAN_TOLERANCE,
};
