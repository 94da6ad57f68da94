use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{BornError, Result};
use crate::optics::CMatrix;

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0[0]
}

/// `<psi| rho |psi>`, real part.
pub fn fidelity(psi: &[Complex64], rho: &CMatrix) -> Result<f64> {
    if psi.len() != rho.nrows() {
        return Err(BornError::DimensionMismatch {
            expected: rho.nrows(),
            got: psi.len(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * rho[(i, j)] * psi[j];
        }
    }
    Ok(acc.re)
}

/// Transpose on the second factor of `C^{d_a} (x) C^{d_b}`, index `a d_b + b`.
pub fn partial_transpose(rho: &CMatrix, d_a: usize, d_b: usize) -> Result<CMatrix> {
    let d = rho.nrows();
    if d_a * d_b != d || rho.ncols() != d {
        return Err(BornError::Factorization { d, d_a, d_b });
    }
    Ok(DMatrix::from_fn(d, d, |r, c| {
        let (a, b) = (r / d_b, r % d_b);
        let (a2, b2) = (c / d_b, c % d_b);
        rho[(a * d_b + b2, a2 * d_b + b)]
    }))
}

/// Smallest eigenvalue of the partial transpose; negative values certify
/// entanglement for two qubits.
pub fn ppt_witness(rho: &CMatrix, d_a: usize, d_b: usize) -> Result<f64> {
    partial_transpose(rho, d_a, d_b).map(|pt| min_eigenvalue(&pt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn projector(psi: &[Complex64]) -> CMatrix {
        DMatrix::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    #[test]
    fn bell_witness() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let rho = projector(&[c(r), c(0.0), c(0.0), c(r)]);
        assert!((ppt_witness(&rho, 2, 2).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let m = DMatrix::from_fn(6, 6, |i, j| Complex64::new(i as f64, j as f64 * 0.5));
        let back = partial_transpose(&partial_transpose(&m, 2, 3).unwrap(), 2, 3).unwrap();
        assert_eq!(back, m);
        assert!(matches!(
            partial_transpose(&m, 4, 2),
            Err(BornError::Factorization { .. })
        ));
    }

    #[test]
    fn fidelity_cases() {
        let psi = [c(0.6), Complex64::new(0.0, 0.8)];
        assert!((fidelity(&psi, &projector(&psi)).unwrap() - 1.0).abs() < 1e-15);
        let mixed = CMatrix::identity(2, 2) * c(0.5);
        assert!((fidelity(&psi, &mixed).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&[c(1.0)], &mixed).is_err());
    }

    #[test]
    fn eigen_order_and_residual() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                c(2.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                c(2.0),
            ],
        );
        let (w, v) = hermitian_eigen(&m);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 3.0).abs() < 1e-14);
        for k in 0..2 {
            let col = v.column(k).into_owned();
            let r = &m * &col - col * c(w[k]);
            assert!(r.norm() < 1e-12);
        }
    }
}
