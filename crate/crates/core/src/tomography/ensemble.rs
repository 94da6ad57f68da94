use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{build_basis, HermitianBasis};
use super::linalg::{fidelity, ppt_witness};
use super::mle::{mle_qst, MleOptions};
use super::reconstruct::{
    linear_qst, measure_expectations, tomography_report, Method, TomographyReport,
};
use crate::detection::{visibility_single, Threshold};
use crate::error::{BornError, Result};
use crate::field::CoherentVector;
use crate::optics::haar_unitary;
use crate::rng::RngStream;

/// Stream id under the run seed from which ensemble members are drawn.
pub const ENSEMBLE_STREAM: u64 = 0x00e5_e3b1;

/// Linear estimates with an eigenvalue below this count as invalid.
const INVALID_EIGENVALUE: f64 = -1e-10;

/// Haar-random pure states `U e_1`, member `k` drawn from
/// `RngStream::new(seed, ENSEMBLE_STREAM).child(k)`.
pub fn ensemble_states(d: usize, n_states: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    let root = RngStream::new(seed, ENSEMBLE_STREAM);
    (0..n_states)
        .map(|k| {
            let u = haar_unitary(d, &mut root.child(k as u64))?;
            Ok(u.matrix().column(0).iter().cloned().collect())
        })
        .collect()
}

/// Visibility attached to each sweep point: the single-mode fringe
/// visibility at the prepared amplitude `|alpha|`, before the state-shaping
/// unitary spreads it over the modes.
pub fn fig11_visibility(alpha: f64, th: Threshold) -> Result<f64> {
    visibility_single(alpha, th)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub d: usize,
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub n_states: usize,
    pub method: Method,
    pub seed: u64,
    pub mle: MleOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub index: usize,
    pub fidelity: f64,
    /// Smallest eigenvalue of the linear estimate.
    pub linear_min_eigenvalue: f64,
    /// Smallest eigenvalue of the estimate produced by the chosen method.
    pub min_eigenvalue: f64,
    pub ppt_min_eigenvalue: Option<f64>,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub gamma: f64,
    pub mean_fidelity: f64,
    /// Fraction of linear estimates with a negative eigenvalue.
    pub frac_invalid: f64,
    pub mean_visibility: f64,
    /// Mean partial-transpose witness, for `d = 4` split as two qubits.
    pub mean_ppt_witness: Option<f64>,
    pub states: Vec<StateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub config: EnsembleConfig,
    pub points: Vec<SweepPoint>,
}

impl SweepTable {
    /// Point of largest mean fidelity; the first one on ties.
    pub fn best(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .fold(None, |best: Option<&SweepPoint>, p| match best {
                Some(b) if b.mean_fidelity >= p.mean_fidelity => Some(b),
                _ => Some(p),
            })
    }

    pub fn point(&self, alpha_index: usize, gamma_index: usize) -> &SweepPoint {
        &self.points[gamma_index * self.config.alphas.len() + alpha_index]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "alpha",
            "gamma",
            "mean_fidelity",
            "frac_invalid",
            "mean_visibility",
            "mean_ppt_witness",
        ])?;
        for p in &self.points {
            w.write_record([
                p.alpha.to_string(),
                p.gamma.to_string(),
                p.mean_fidelity.to_string(),
                p.frac_invalid.to_string(),
                p.mean_visibility.to_string(),
                p.mean_ppt_witness
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }
}

fn two_qubit_split(d: usize) -> Option<(usize, usize)> {
    (d == 4).then_some((2, 2))
}

fn evaluate(
    psi: &[Complex64],
    alpha: f64,
    th: Threshold,
    basis: &HermitianBasis,
    cfg: &EnsembleConfig,
    index: usize,
) -> Result<StateRecord> {
    let state = CoherentVector::new(Complex64::new(alpha, 0.0), psi.to_vec())?;
    let m = measure_expectations(&state, th, basis)?;
    let linear = linear_qst(&m, basis)?.rho;
    let linear_min = linear.min_eigenvalue();
    let (rho, min_eigenvalue, converged) = match cfg.method {
        Method::Linear => (linear, linear_min, None),
        Method::Mle => {
            let est = mle_qst(&m, basis, &cfg.mle)?;
            let min = est.rho.min_eigenvalue();
            (est.rho, min, Some(est.converged))
        }
    };
    Ok(StateRecord {
        index,
        fidelity: fidelity(psi, rho.matrix())?,
        linear_min_eigenvalue: linear_min,
        min_eigenvalue,
        ppt_min_eigenvalue: two_qubit_split(cfg.d)
            .map(|(a, b)| ppt_witness(rho.matrix(), a, b))
            .transpose()?,
        converged,
    })
}

/// Mean tomographic figures over a Haar ensemble on an `(alpha, gamma)` grid.
/// Points are ordered with `alpha` varying fastest. Work is spread over all
/// (point, state) pairs; the result does not depend on the thread count.
pub fn ensemble_sweep(cfg: &EnsembleConfig) -> Result<SweepTable> {
    if cfg.n_states == 0 {
        return Err(BornError::Domain(
            "ensemble needs at least one state".into(),
        ));
    }
    let basis = build_basis(cfg.d)?;
    let states = ensemble_states(cfg.d, cfg.n_states, cfg.seed)?;
    let thresholds = cfg
        .gammas
        .iter()
        .map(|&g| Threshold::new(g))
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<(f64, Threshold)> = thresholds
        .iter()
        .flat_map(|&th| cfg.alphas.iter().map(move |&a| (a, th)))
        .collect();
    let n = cfg.n_states;
    let records = (0..grid.len() * n)
        .into_par_iter()
        .map(|job| {
            let (a, th) = grid[job / n];
            evaluate(&states[job % n], a, th, &basis, cfg, job % n)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::with_capacity(grid.len());
    for (chunk, &(alpha, th)) in records.chunks(n).zip(&grid) {
        let mean = |f: &dyn Fn(&StateRecord) -> f64| chunk.iter().map(f).sum::<f64>() / n as f64;
        let invalid = chunk
            .iter()
            .filter(|r| r.linear_min_eigenvalue < INVALID_EIGENVALUE)
            .count();
        points.push(SweepPoint {
            alpha,
            gamma: th.gamma(),
            mean_fidelity: mean(&|r| r.fidelity),
            frac_invalid: invalid as f64 / n as f64,
            mean_visibility: fig11_visibility(alpha, th)?,
            mean_ppt_witness: two_qubit_split(cfg.d)
                .map(|_| mean(&|r| r.ppt_min_eigenvalue.unwrap_or(f64::NAN))),
            states: chunk.to_vec(),
        });
    }
    Ok(SweepTable {
        config: cfg.clone(),
        points,
    })
}

/// Tomography of one fixed state at each amplitude, in parallel.
pub fn alpha_sweep(
    psi: &[Complex64],
    alphas: &[f64],
    th: Threshold,
    method: Method,
    opts: &MleOptions,
) -> Result<Vec<TomographyReport>> {
    let basis = build_basis(psi.len())?;
    alphas
        .par_iter()
        .map(|&a| {
            let state = CoherentVector::new(Complex64::new(a, 0.0), psi.to_vec())?;
            tomography_report(&state, th, &basis, method, opts, two_qubit_split(psi.len()))
        })
        .collect()
}
