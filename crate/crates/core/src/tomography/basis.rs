use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::hermitian_eigen;
use crate::error::{BornError, Result};
use crate::optics::CMatrix;

/// Spectral decomposition of one basis element: `B = sum_i values[i] v_i v_i^dagger`
/// with `v_i` the columns of `vectors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// `d^2` Hermitian matrices orthonormal under `Tr[A^dagger B]`, with their
/// eigensystems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianBasis {
    d: usize,
    matrices: Vec<CMatrix>,
    eigensystems: Vec<Eigensystem>,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn eigensystems(&self) -> &[Eigensystem] {
        &self.eigensystems
    }

    /// `sum_k coeffs[k] B_k`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<CMatrix> {
        if coeffs.len() != self.len() {
            return Err(BornError::DimensionMismatch {
                expected: self.len(),
                got: coeffs.len(),
            });
        }
        let mut out = CMatrix::zeros(self.d, self.d);
        for (c, b) in coeffs.iter().zip(&self.matrices) {
            out += b * Complex64::new(*c, 0.0);
        }
        Ok(out)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrix `k` (I, X, Y, Z) with eigenvalues and eigenvectors, `+1` first.
fn pauli(k: usize) -> (CMatrix, Vec<f64>, CMatrix) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let m = |v: [Complex64; 4]| DMatrix::from_row_slice(2, 2, &v);
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match k {
        0 => (m([one, o, o, one]), vec![1.0, 1.0], m([one, o, o, one])),
        1 => (
            m([o, one, one, o]),
            vec![1.0, -1.0],
            m([c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]),
        ),
        2 => (
            m([o, c(0.0, -1.0), c(0.0, 1.0), o]),
            vec![1.0, -1.0],
            m([c(r, 0.0), c(r, 0.0), c(0.0, r), c(0.0, -r)]),
        ),
        _ => (
            m([one, o, o, c(-1.0, 0.0)]),
            vec![1.0, -1.0],
            m([one, o, o, one]),
        ),
    }
}

fn pauli_basis(qubits: usize) -> HermitianBasis {
    let d = 1 << qubits;
    let scale = (d as f64).sqrt().recip();
    let mut matrices = Vec::with_capacity(d * d);
    let mut eigensystems = Vec::with_capacity(d * d);
    for idx in 0..d * d {
        let mut mat = CMatrix::identity(1, 1);
        let mut vals = vec![1.0];
        let mut vecs = CMatrix::identity(1, 1);
        // first factor is the most significant base-4 digit
        for q in (0..qubits).rev() {
            let (p, w, v) = pauli(idx >> (2 * q) & 3);
            mat = mat.kronecker(&p);
            vecs = vecs.kronecker(&v);
            vals = vals
                .iter()
                .flat_map(|a| w.iter().map(move |b| a * b))
                .collect();
        }
        matrices.push(mat * c(scale, 0.0));
        eigensystems.push(Eigensystem {
            values: vals.into_iter().map(|v| v * scale).collect(),
            vectors: vecs,
        });
    }
    HermitianBasis {
        d,
        matrices,
        eigensystems,
    }
}

fn gell_mann_basis(d: usize) -> HermitianBasis {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut matrices = vec![CMatrix::identity(d, d) * c((d as f64).sqrt().recip(), 0.0)];
    for j in 0..d {
        for k in j + 1..d {
            let mut s = CMatrix::zeros(d, d);
            s[(j, k)] = c(r, 0.0);
            s[(k, j)] = c(r, 0.0);
            matrices.push(s);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut a = CMatrix::zeros(d, d);
            a[(j, k)] = c(0.0, -r);
            a[(k, j)] = c(0.0, r);
            matrices.push(a);
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt().recip();
        let mut g = CMatrix::zeros(d, d);
        for j in 0..l {
            g[(j, j)] = c(norm, 0.0);
        }
        g[(l, l)] = c(-(l as f64) * norm, 0.0);
        matrices.push(g);
    }
    let eigensystems = matrices
        .iter()
        .map(|m| {
            let (w, v) = hermitian_eigen(m);
            // descending, to match the Pauli convention
            let n = w.len();
            Eigensystem {
                values: w.into_iter().rev().collect(),
                vectors: DMatrix::from_fn(n, n, |r, col| v[(r, n - 1 - col)]),
            }
        })
        .collect();
    HermitianBasis {
        d,
        matrices,
        eigensystems,
    }
}

/// Scaled Pauli products for `d` in {2, 4}, generalized Gell-Mann matrices
/// plus the scaled identity otherwise.
pub fn build_basis(d: usize) -> Result<HermitianBasis> {
    match d {
        0 | 1 => Err(BornError::InvalidDimension(format!(
            "tomography basis needs d >= 2, got {d}"
        ))),
        2 => Ok(pauli_basis(1)),
        4 => Ok(pauli_basis(2)),
        _ => Ok(gell_mann_basis(d)),
    }
}
