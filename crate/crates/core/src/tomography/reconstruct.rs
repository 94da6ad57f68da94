use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::HermitianBasis;
use super::linalg::{fidelity, hermitian_eigen, ppt_witness};
use super::mle::{mle_qst, MleOptions};
use crate::detection::Threshold;
use crate::error::{BornError, Result};
use crate::experiments::conditional_mode_probs;
use crate::field::CoherentVector;
use crate::optics::CMatrix;

/// Tolerance on Hermiticity and unit trace of a density matrix.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Hermitian, unit-trace matrix. Positivity is not required, since linear
/// inversion can produce negative eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(BornError::InvalidState(
                "density matrix must be square".into(),
            ));
        }
        let herm = (&rho - rho.adjoint()).camax();
        if !(herm <= HERMITIAN_TOLERANCE) {
            return Err(BornError::InvalidState(format!(
                "not Hermitian (residual {herm:e})"
            )));
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOLERANCE {
            return Err(BornError::InvalidState(format!("trace {tr} is not 1")));
        }
        Ok(Self { rho })
    }

    /// `psi psi^dagger` for a unit vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n = psi.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            rho: CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.rho).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// `Tr[rho B_k]` for every basis element.
pub fn expectations_of(rho: &DensityMatrix, basis: &HermitianBasis) -> Result<Vec<f64>> {
    if rho.dim() != basis.dim() {
        return Err(BornError::DimensionMismatch {
            expected: basis.dim(),
            got: rho.dim(),
        });
    }
    Ok(basis
        .matrices()
        .iter()
        .map(|b| (rho.matrix() * b).trace().re)
        .collect())
}

/// Expectation of each basis element inferred from single-click statistics:
/// the state is rotated into the element's eigenbasis, `psi' = U_k^dagger psi`,
/// and `m_k = sum_i p_i beta_ki` with `p` the single-click conditionals.
pub fn measure_expectations(
    state: &CoherentVector,
    th: Threshold,
    basis: &HermitianBasis,
) -> Result<Vec<f64>> {
    if state.dim() != basis.dim() {
        return Err(BornError::DimensionMismatch {
            expected: basis.dim(),
            got: state.dim(),
        });
    }
    let psi = nalgebra::DVector::from_column_slice(state.psi());
    basis
        .eigensystems()
        .iter()
        .map(|e| {
            let rotated = e.vectors.adjoint() * &psi;
            let s = CoherentVector::normalized(state.alpha(), rotated.iter().cloned().collect())?;
            let p = conditional_mode_probs(&s, th)?;
            Ok(p.iter().zip(&e.values).map(|(p, b)| p * b).sum())
        })
        .collect()
}

/// Linear inversion with the trace rescaled to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearEstimate {
    pub rho: DensityMatrix,
    /// Trace of `sum_k m_k B_k` before rescaling, minus one.
    pub trace_deviation: f64,
}

/// `rho = sum_k m_k B_k`, Hermitian by construction.
pub fn linear_qst(m: &[f64], basis: &HermitianBasis) -> Result<LinearEstimate> {
    let raw = basis.combine(m)?;
    let tr = raw.trace().re;
    if !(tr.abs() > f64::EPSILON) {
        return Err(BornError::InvalidState(
            "linear estimate has zero trace".into(),
        ));
    }
    let scaled = raw * Complex64::new(1.0 / tr, 0.0);
    let herm = (&scaled + scaled.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(LinearEstimate {
        rho: DensityMatrix::new(herm)?,
        trace_deviation: tr - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linear,
    Mle,
}

impl std::str::FromStr for Method {
    type Err = BornError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Method::Linear),
            "mle" => Ok(Method::Mle),
            other => Err(BornError::Domain(format!(
                "unknown tomography method {other}"
            ))),
        }
    }
}

/// Reconstruction of one state with its figures of merit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyReport {
    pub rho: DensityMatrix,
    pub fidelity: f64,
    pub min_eigenvalue: f64,
    /// Partial-transpose witness, for states split as `d_a x d_b`.
    pub ppt_min_eigenvalue: Option<f64>,
    pub method: Method,
    /// Optimizer convergence flag; `None` for linear inversion.
    pub converged: Option<bool>,
}

/// Measures `state`, reconstructs it, and scores the result against
/// `state.psi()`.
pub fn tomography_report(
    state: &CoherentVector,
    th: Threshold,
    basis: &HermitianBasis,
    method: Method,
    opts: &MleOptions,
    split: Option<(usize, usize)>,
) -> Result<TomographyReport> {
    let m = measure_expectations(state, th, basis)?;
    let (rho, converged) = match method {
        Method::Linear => (linear_qst(&m, basis)?.rho, None),
        Method::Mle => {
            let est = mle_qst(&m, basis, opts)?;
            (est.rho, Some(est.converged))
        }
    };
    let ppt_min_eigenvalue = split
        .map(|(a, b)| ppt_witness(rho.matrix(), a, b))
        .transpose()?;
    Ok(TomographyReport {
        fidelity: fidelity(state.psi(), rho.matrix())?,
        min_eigenvalue: rho.min_eigenvalue(),
        ppt_min_eigenvalue,
        rho,
        method,
        converged,
    })
}
