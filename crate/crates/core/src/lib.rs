//! Classical zero-point-field model of quantum optics.
//!
//! Coherent states plus Gaussian vacuum noise pass through linear-optics
//! unitaries and are measured by amplitude-threshold detectors. The crate
//! provides the exact click statistics (via the Marcum Q-function), a Monte
//! Carlo detector, the post-selected experiments built on them, and linear
//! and maximum-likelihood state tomography with a partial-transpose
//! entanglement witness.

pub mod circuit;
pub mod detection;
pub mod error;
pub mod experiments;
pub mod field;
pub mod marcum;
pub mod optics;
pub mod rng;
pub mod tomography;

pub use circuit::{CircuitSpec, GateSpec};
pub use detection::{
    born_expansion, dark_count_prob, detect_prob, detect_prob_pair, detect_sample, efficiency,
    mode_crossing_probs, outcome_distribution, poisson_detection_prob, simulate_clicks,
    visibility_single, ClickTally, DetectionOutcome, OutcomeDistribution, Threshold,
};
pub use error::{BornError, Result};
pub use field::{
    mean_energy_density, realize, realize_with_noise, sample_noise, AmplitudeSample,
    CoherentVector, ComplexNum, FieldUnits, NoiseRealization,
};
pub use marcum::{marcum_q1, marcum_q1_complement, marcum_q1_pair, MarcumQ};
pub use optics::{
    apply, gate_cnot, gate_hadamard, gate_phase, gate_x, haar_unitary, kron, CMatrix, UnitaryMatrix,
};
pub use rng::RngStream;

pub use num_complex::Complex64;
