//! Linear-optics unitaries and their action on coherent states.
//!
//! Mode ordering for two-qubit-like layouts is (spatial ⊗ polarization) with
//! basis order `[RH, RV, DH, DV]`; the first tensor factor is the most
//! significant index.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BornError, Result};
use crate::field::{l2_norm, AmplitudeSample, CoherentVector};
use crate::rng::RngStream;

pub type CMatrix = DMatrix<Complex64>;

/// Residual accepted when wrapping a caller-supplied matrix.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryMatrix {
    entries: CMatrix,
}

impl UnitaryMatrix {
    /// Wraps a square matrix, failing if `U^dagger U` deviates from the
    /// identity by more than [`UNITARY_TOLERANCE`].
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(BornError::InvalidDimension(format!(
                "unitary must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|c| !c.is_finite()) {
            return Err(BornError::InvalidState("non-finite matrix entry".into()));
        }
        let u = Self { entries };
        let res = u.unitarity_residual();
        if res > UNITARY_TOLERANCE {
            return Err(BornError::NotUnitary(res));
        }
        Ok(u)
    }

    pub fn identity(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(BornError::InvalidDimension("d must be at least 1".into()));
        }
        Ok(Self {
            entries: CMatrix::identity(d, d),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    /// `max |(U^dagger U - I)_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        let g = self.entries.adjoint() * &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    /// `self * other`: `other` acts first.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(BornError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(BornError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let d = self.dim();
        Ok((0..d)
            .map(|i| (0..d).map(|j| self.entries[(i, j)] * v[j]).sum())
            .collect())
    }

    /// Composes a circuit given in application order (first element acts first).
    pub fn chain(gates: &[UnitaryMatrix]) -> Result<Self> {
        let (first, rest) = gates
            .split_first()
            .ok_or_else(|| BornError::Circuit("empty gate list".into()))?;
        rest.iter()
            .try_fold(first.clone(), |acc, g| g.compose(&acc))
    }
}

/// 50/50 beam splitter, `(1/sqrt 2) [[1, 1], [1, -1]]`.
pub fn gate_hadamard() -> UnitaryMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    UnitaryMatrix {
        entries: CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        ),
    }
}

/// Phase shifter `diag(1, e^{i phi})`.
pub fn gate_phase(phi: f64) -> UnitaryMatrix {
    UnitaryMatrix {
        entries: CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, Complex64::from_polar(1.0, phi)]),
    }
}

/// Half-wave plate at 45 degrees: swaps the two modes.
pub fn gate_x() -> UnitaryMatrix {
    UnitaryMatrix {
        entries: CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
    }
}

/// Controlled NOT with the first tensor factor as control.
pub fn gate_cnot() -> UnitaryMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    UnitaryMatrix { entries: m }
}

pub fn kron(a: &UnitaryMatrix, b: &UnitaryMatrix) -> UnitaryMatrix {
    UnitaryMatrix {
        entries: a.entries.kronecker(&b.entries),
    }
}

/// Transforms the mean field: `psi' = U psi`, renormalized, with `alpha`
/// unchanged. Noise is not carried along; sampling the result draws fresh iid
/// noise, which has the same law as `U z` for unitary `U`.
pub fn apply(u: &UnitaryMatrix, state: &CoherentVector) -> Result<CoherentVector> {
    let psi = u.mul_vec(state.psi())?;
    let norm = l2_norm(&psi);
    let psi = psi.into_iter().map(|c| c / norm).collect();
    CoherentVector::new(state.alpha(), psi)
}

/// Realizes `state` and then propagates both the mean and the noise through
/// `u`: `a' = alpha U psi + U z / sqrt(2)`. Statistically equivalent to
/// `realize(&apply(u, state)?, rng)`; kept for checking that equivalence.
pub fn realize_propagated(
    u: &UnitaryMatrix,
    state: &CoherentVector,
    rng: &mut RngStream,
) -> Result<AmplitudeSample> {
    let before = crate::field::realize(state, rng);
    AmplitudeSample::new(u.mul_vec(before.a())?)
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of `R`'s diagonal moved into `Q`.
///
/// Ginibre entries are drawn column by column, `d^2` complex normals in all.
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> Result<UnitaryMatrix> {
    if d == 0 {
        return Err(BornError::InvalidDimension("d must be at least 1".into()));
    }
    let mut z = CMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            z[(i, j)] = rng.standard_complex_normal();
        }
    }
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Ok(UnitaryMatrix { entries: q })
}

/// Embeds a one-factor gate on tensor factor `wire` of `n_wires` two-level
/// factors (factor 0 most significant).
pub fn embed_single(gate: &UnitaryMatrix, wire: usize, n_wires: usize) -> Result<UnitaryMatrix> {
    if gate.dim() != 2 || wire >= n_wires {
        return Err(BornError::Circuit(format!(
            "cannot place a {}-mode gate on wire {wire} of {n_wires}",
            gate.dim()
        )));
    }
    let left = UnitaryMatrix::identity(1 << wire)?;
    let right = UnitaryMatrix::identity(1 << (n_wires - wire - 1))?;
    Ok(kron(&kron(&left, gate), &right))
}

/// Controlled NOT between arbitrary wires of an `n_wires` register.
pub fn embed_cnot(control: usize, target: usize, n_wires: usize) -> Result<UnitaryMatrix> {
    if control >= n_wires || target >= n_wires || control == target {
        return Err(BornError::Circuit(format!(
            "bad CNOT wires ({control}, {target}) for {n_wires} wires"
        )));
    }
    let d = 1usize << n_wires;
    let cbit = 1usize << (n_wires - 1 - control);
    let tbit = 1usize << (n_wires - 1 - target);
    let mut m = CMatrix::zeros(d, d);
    for col in 0..d {
        let row = if col & cbit != 0 { col ^ tbit } else { col };
        m[(row, col)] = ONE;
    }
    Ok(UnitaryMatrix { entries: m })
}
