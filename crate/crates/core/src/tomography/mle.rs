//! Least-squares reconstruction restricted to valid density matrices.
//!
//! `rho(t) = T^dagger T / Tr[T^dagger T]` with `T` lower-triangular, `t` the
//! `d` real diagonal entries followed by (re, im) pairs of the strictly lower
//! entries in row-major order. The objective `sum_k (Tr[rho B_k] - m_k)^2`
//! equals `||rho - A||_F^2` with `A = sum_k m_k B_k`, since the basis is
//! orthonormal and complete; the optimizer works with the second form.

use nalgebra::{Cholesky, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::HermitianBasis;
use super::linalg::hermitian_eigen;
use super::reconstruct::DensityMatrix;
use crate::error::{BornError, Result};
use crate::optics::CMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    /// Budget of objective evaluations.
    pub max_evaluations: usize,
    /// Stop once the gradient norm falls to this value.
    pub gradient_tolerance: f64,
    /// An iteration stalls when the objective changes by at most
    /// `stall_tolerance * max(1, f)`.
    pub stall_tolerance: f64,
    /// Consecutive stalled iterations that end the search.
    pub stall_iterations: usize,
    /// Added to the clipped eigenvalues of the starting point so that the
    /// initial Cholesky factor exists.
    pub init_shift: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 100_000,
            gradient_tolerance: 1e-12,
            stall_tolerance: 1e-16,
            stall_iterations: 3,
            init_shift: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Gradient,
    Stalled,
    /// No step along the search direction lowers the objective.
    LineSearch,
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleEstimate {
    pub rho: DensityMatrix,
    /// `sum_k (Tr[rho B_k] - m_k)^2` at the returned point.
    pub objective: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub stop: StopReason,
    /// False only when the evaluation budget ran out.
    pub converged: bool,
}

fn to_lower(t: &[f64], d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(t[i], 0.0);
    }
    let mut n = d;
    for i in 0..d {
        for j in 0..i {
            m[(i, j)] = Complex64::new(t[n], t[n + 1]);
            n += 2;
        }
    }
    m
}

fn from_lower(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let mut t: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
    for i in 0..d {
        for j in 0..i {
            t.push(m[(i, j)].re);
            t.push(m[(i, j)].im);
        }
    }
    t
}

fn rho_of(t: &[f64], d: usize) -> CMatrix {
    let low = to_lower(t, d);
    let s = low.adjoint() * &low;
    let tau = s.trace().re;
    s * Complex64::new(1.0 / tau, 0.0)
}

struct Problem {
    d: usize,
    target: CMatrix,
    evaluations: usize,
}

impl Problem {
    fn value_grad(&mut self, t: &[f64]) -> (f64, Vec<f64>) {
        self.evaluations += 1;
        let d = self.d;
        let low = to_lower(t, d);
        let s = low.adjoint() * &low;
        let tau = s.trace().re;
        let diff = &s * Complex64::new(1.0 / tau, 0.0) - &self.target;
        let f = diff.iter().map(|z| z.norm_sqr()).sum();
        let g = diff * Complex64::new(2.0, 0.0);
        let gs = (&g * &s).trace().re;
        let h = &g * Complex64::new(1.0 / tau, 0.0)
            - CMatrix::identity(d, d) * Complex64::new(gs / (tau * tau), 0.0);
        let ht = h * low.adjoint();
        let mut grad: Vec<f64> = (0..d).map(|i| 2.0 * ht[(i, i)].re).collect();
        for i in 0..d {
            for j in 0..i {
                grad.push(2.0 * ht[(j, i)].re);
                grad.push(-2.0 * ht[(j, i)].im);
            }
        }
        (f, grad)
    }
}

/// Starting factor: the target with negative eigenvalues clipped, shifted,
/// renormalized and Cholesky-factored as `T^dagger T` with `T` lower.
fn initial_point(target: &CMatrix, shift: f64) -> Result<Vec<f64>> {
    let d = target.nrows();
    let (w, v) = hermitian_eigen(target);
    let clipped = DVector::from_iterator(
        d,
        w.iter().map(|&x| Complex64::new(x.max(0.0) + shift, 0.0)),
    );
    let mut r = &v * CMatrix::from_diagonal(&clipped) * v.adjoint();
    let tr = r.trace().re;
    r *= Complex64::new(1.0 / tr, 0.0);
    // Reversing the index order turns the usual L L^dagger factor into the
    // T^dagger T form.
    let flip = |m: &CMatrix| CMatrix::from_fn(d, d, |i, j| m[(d - 1 - i, d - 1 - j)]);
    let chol = Cholesky::new(flip(&r))
        .ok_or_else(|| BornError::InvalidState("initial point is not positive definite".into()))?;
    Ok(from_lower(&flip(&chol.l().adjoint())))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fits a valid density matrix to the expectations `m` by BFGS with
/// backtracking line search. Deterministic for fixed inputs and options.
pub fn mle_qst(m: &[f64], basis: &HermitianBasis, opts: &MleOptions) -> Result<MleEstimate> {
    let d = basis.dim();
    let target = basis.combine(m)?;
    let mut problem = Problem {
        d,
        target: target.clone(),
        evaluations: 0,
    };
    let n = d * d;
    let mut x = initial_point(&target, opts.init_shift)?;
    let (mut f, mut g) = problem.value_grad(&x);
    let mut hinv = vec![0.0; n * n];
    let reset = |h: &mut Vec<f64>, scale: f64| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = scale;
        }
    };
    reset(&mut hinv, 1.0);
    let mut iterations = 0;
    let mut stalled = 0;
    let stop = loop {
        if dot(&g, &g).sqrt() <= opts.gradient_tolerance {
            break StopReason::Gradient;
        }
        if problem.evaluations >= opts.max_evaluations {
            break StopReason::Budget;
        }
        iterations += 1;
        let mut p: Vec<f64> = (0..n)
            .map(|i| -dot(&hinv[i * n..(i + 1) * n], &g))
            .collect();
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            reset(&mut hinv, 1.0);
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let (ft, gt) = problem.value_grad(&trial);
            if ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gn)) = accepted else {
            break StopReason::LineSearch;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 0.0 {
            if iterations == 1 {
                reset(&mut hinv, sy / dot(&y, &y));
            }
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T, r = 1 / y^T s
            let r = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] +=
                        -r * (hy[i] * s[j] + s[i] * hy[j]) + (r * r * yhy + r) * s[i] * s[j];
                }
            }
        }
        let change = (f - fnew).abs();
        x = xn;
        g = gn;
        if change <= opts.stall_tolerance * f.max(1.0) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        f = fnew;
        if stalled >= opts.stall_iterations {
            break StopReason::Stalled;
        }
    };

    let rho = rho_of(&x, d);
    let objective = basis
        .matrices()
        .iter()
        .zip(m)
        .map(|(b, mk)| ((&rho * b).trace().re - mk).powi(2))
        .sum();
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(MleEstimate {
        rho: DensityMatrix::new(rho)?,
        objective,
        evaluations: problem.evaluations,
        iterations,
        stop,
        converged: stop != StopReason::Budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::{build_basis, expectations_of};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parameter_layout_roundtrip() {
        let t: Vec<f64> = (0..16).map(|i| i as f64 * 0.1 + 0.05).collect();
        assert_eq!(from_lower(&to_lower(&t, 4)), t);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let basis = build_basis(3).unwrap();
        let target = basis
            .combine(&(0..9).map(|k| 0.2 - 0.03 * k as f64).collect::<Vec<_>>())
            .unwrap();
        let mut prob = Problem {
            d: 3,
            target,
            evaluations: 0,
        };
        let t: Vec<f64> = (0..9)
            .map(|i| 0.3 + 0.11 * i as f64 - 0.05 * (i % 3) as f64)
            .collect();
        let (_, g) = prob.value_grad(&t);
        for k in 0..9 {
            let h = 1e-6;
            let mut up = t.clone();
            up[k] += h;
            let mut dn = t.clone();
            dn[k] -= h;
            let fd = (prob.value_grad(&up).0 - prob.value_grad(&dn).0) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-7, "{k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn initial_point_reproduces_valid_state() {
        let r =
            CMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let t = initial_point(&r, 0.0).unwrap();
        assert!((rho_of(&t, 2) - r).camax() < 1e-14);
    }

    #[test]
    fn recovers_pure_state() {
        let basis = build_basis(4).unwrap();
        let psi = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.5, 0.0)];
        let truth = DensityMatrix::pure(&psi).unwrap();
        let m = expectations_of(&truth, &basis).unwrap();
        let est = mle_qst(&m, &basis, &MleOptions::default()).unwrap();
        assert!(est.objective <= 1e-12, "{}", est.objective);
        assert!((est.rho.matrix() - truth.matrix()).camax() < 1e-5);
        assert!(est.converged);
    }

    #[test]
    fn output_is_positive_for_unphysical_input() {
        let basis = build_basis(2).unwrap();
        // Bloch vector of length 1.5 lies outside the ball
        let r = 1.5 * std::f64::consts::FRAC_1_SQRT_2;
        let m = [std::f64::consts::FRAC_1_SQRT_2, r, 0.0, 0.0];
        let est = mle_qst(&m, &basis, &MleOptions::default()).unwrap();
        assert!(est.rho.min_eigenvalue() >= -1e-10);
        // closest valid state is the pure +X state
        let x = est.rho.matrix()[(0, 1)].re;
        assert!((x - 0.5).abs() < 1e-6, "{x}");
    }
}
