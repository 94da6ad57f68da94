//! Mach–Zehnder interferometer on modes (RH, RV, DH, DV), its delayed-choice
//! variant without the second beam splitter, and the which-way variant that
//! flips the polarization in the lower arm.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    beamsplitter_coincidence, conditional_mode_probs, MonteCarlo, ScenarioMeta, ScenarioResult,
};
use crate::detection::{dark_count_prob, detect_prob_pair, Threshold};
use crate::error::{BornError, Result};
use crate::field::CoherentVector;
use crate::marcum::MarcumQ;
use crate::optics::{apply, gate_cnot, gate_hadamard, gate_phase, kron, UnitaryMatrix};
use crate::rng::RngStream;

/// Photons per sample point in the fitted-sample analysis.
pub const MZ_SAMPLE_PHOTONS: f64 = 2600.0;

/// Stream id under the run seed from which the fitted-sample noise is drawn.
pub const MZ_NOISE_STREAM: u64 = 3;

fn on_path(gate: UnitaryMatrix) -> UnitaryMatrix {
    kron(&gate, &UnitaryMatrix::identity(2).expect("d = 2"))
}

fn prepared(alpha: f64, gates: &[UnitaryMatrix]) -> Result<CoherentVector> {
    let input = CoherentVector::basis(Complex64::new(alpha, 0.0), 4, 0)?;
    apply(&UnitaryMatrix::chain(gates)?, &input)
}

/// Beam splitter, phase on the lower arm, beam splitter.
pub fn mach_zehnder_state(alpha: f64, phi: f64) -> Result<CoherentVector> {
    let bs = on_path(gate_hadamard());
    prepared(alpha, &[bs.clone(), on_path(gate_phase(phi)), bs])
}

/// Second beam splitter removed.
pub fn delayed_choice_state(alpha: f64, phi: f64) -> Result<CoherentVector> {
    prepared(alpha, &[on_path(gate_hadamard()), on_path(gate_phase(phi))])
}

/// Lower arm marked by a polarization flip before the second beam splitter.
pub fn which_way_state(alpha: f64, phi: f64) -> Result<CoherentVector> {
    let bs = on_path(gate_hadamard());
    prepared(
        alpha,
        &[bs.clone(), on_path(gate_phase(phi)), gate_cnot(), bs],
    )
}

/// Analytic quantities at one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachZehnderPoint {
    /// RH given a single click on RH or DH, with the second beam splitter.
    pub p_mz: f64,
    /// The same conditional without the second beam splitter.
    pub p_dc: f64,
    /// Probability of at least one click on RH or DH, with the beam splitter.
    pub total_mz: f64,
    /// The same without the beam splitter.
    pub total_dc: f64,
    /// Single-click conditionals of the which-way state over all four modes.
    pub which_way: [f64; 4],
}

fn single_conditional(first: MarcumQ, second: MarcumQ) -> f64 {
    let a = first.q * second.complement;
    let b = second.q * first.complement;
    a / (a + b)
}

pub fn mach_zehnder_point(alpha: f64, th: Threshold, phi: f64) -> Result<MachZehnderPoint> {
    // Output amplitudes |alpha| |cos(phi/2)| and |alpha| |sin(phi/2)|, written
    // around the balanced point phi = pi/2 so that it is balanced exactly.
    let t = phi / 2.0 - std::f64::consts::FRAC_PI_4;
    let (s, c) = t.sin_cos();
    let scale = alpha.abs() * std::f64::consts::FRAC_1_SQRT_2;
    let plus = detect_prob_pair(scale * (c - s).abs(), th)?;
    let minus = detect_prob_pair(scale * (c + s).abs(), th)?;
    let arm = detect_prob_pair(scale, th)?;
    let ww = conditional_mode_probs(&which_way_state(alpha, phi)?, th)?;
    Ok(MachZehnderPoint {
        p_mz: single_conditional(plus, minus),
        p_dc: single_conditional(arm, arm),
        total_mz: 1.0 - plus.complement * minus.complement,
        total_dc: 1.0 - arm.complement * arm.complement,
        which_way: [ww[0], ww[1], ww[2], ww[3]],
    })
}

/// Columns: `phi`, `p_mz`, `p_dc`, `P_MZ`, `P_DC`, `born` (= cos^2(phi/2)),
/// `ww_rh`, `ww_rv`, `ww_dh`, `ww_dv`; with Monte Carlo also `single_rh` and
/// `single_dh` of the interferometer state.
pub fn mach_zehnder(
    alpha: f64,
    th: Threshold,
    phis: &[f64],
    mc: Option<&MonteCarlo>,
) -> Result<ScenarioResult> {
    let rows = phis
        .iter()
        .map(|&p| mach_zehnder_point(alpha, th, p))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ScenarioResult::new(
        "phi",
        phis.to_vec(),
        ScenarioMeta {
            scenario: "mz".into(),
            alpha: Some(alpha),
            gamma: Some(th.gamma()),
            n_trials: mc.map(|m| m.trials),
            seed: mc.map(|m| m.rng.seed()),
        },
    );
    out.push_curve("p_mz", rows.iter().map(|r| r.p_mz).collect());
    out.push_curve("p_dc", rows.iter().map(|r| r.p_dc).collect());
    out.push_curve("P_MZ", rows.iter().map(|r| r.total_mz).collect());
    out.push_curve("P_DC", rows.iter().map(|r| r.total_dc).collect());
    out.push_curve(
        "born",
        phis.iter().map(|p| (p / 2.0).cos().powi(2)).collect(),
    );
    for (k, name) in ["ww_rh", "ww_rv", "ww_dh", "ww_dv"].iter().enumerate() {
        out.push_curve(name, rows.iter().map(|r| r.which_way[k]).collect());
    }
    if let Some(mc) = mc {
        let states = phis
            .iter()
            .map(|&p| mach_zehnder_state(alpha, p))
            .collect::<Result<Vec<_>>>()?;
        let tallies = mc.tally(&states, th);
        out.push_counts(
            "single_rh",
            tallies.iter().map(|t| t.single_clicks[0]).collect(),
        );
        out.push_counts(
            "single_dh",
            tallies.iter().map(|t| t.single_clicks[2]).collect(),
        );
    }
    Ok(out)
}

/// Least-squares fit `amplitude cos^2(phi/2 + phase) + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineFit {
    pub amplitude: f64,
    pub offset: f64,
    pub phase: f64,
    /// Root-mean-square residual of the fit.
    pub rmse: f64,
}

impl CosineFit {
    /// Fits `c0 + c1 cos(phi) + c2 sin(phi)`, which is the same family with
    /// the period fixed to 2 pi.
    pub fn fit(phis: &[f64], values: &[f64]) -> Result<Self> {
        if phis.len() != values.len() {
            return Err(BornError::DimensionMismatch {
                expected: phis.len(),
                got: values.len(),
            });
        }
        if phis.len() < 3 {
            return Err(BornError::Domain(
                "cosine fit needs at least 3 points".into(),
            ));
        }
        let design = DMatrix::from_fn(phis.len(), 3, |i, j| match j {
            0 => 1.0,
            1 => phis[i].cos(),
            _ => phis[i].sin(),
        });
        let rhs = DVector::from_column_slice(values);
        let c = design
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| BornError::Domain(format!("cosine fit failed: {e}")))?;
        let resid = &design * &c - &rhs;
        let amplitude = 2.0 * c[1].hypot(c[2]);
        Ok(Self {
            amplitude,
            offset: c[0] - amplitude / 2.0,
            phase: (-c[2]).atan2(c[1]) / 2.0,
            rmse: (resid.norm_squared() / phis.len() as f64).sqrt(),
        })
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.amplitude * (phi / 2.0 + self.phase).cos().powi(2) + self.offset
    }
}

/// Outcome of the fitted-sample comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MzAnalysis {
    pub phis: Vec<f64>,
    /// `p_mz` plus Gaussian noise of standard deviation `1/sqrt(photons)`.
    pub samples: Vec<f64>,
    pub fit: CosineFit,
    /// `(max - min) / (max + min)` of the dark-subtracted `p_mz` curve.
    pub visibility: f64,
    /// The same ratio read off the fitted cosine.
    pub fit_visibility: f64,
    /// Beam-splitter anticorrelation `R_d` at the same `(alpha, gamma)`.
    pub rd: f64,
    /// Root-mean-square deviation of the samples from `cos^2(phi/2)`.
    pub rmse: f64,
}

/// Simulates noisy conditional-probability samples of the interferometer and
/// evaluates them the way a measured fringe would be: dark subtraction,
/// visibility, a fixed-period cosine fit, and the error against the ideal
/// fringe. Point `j` draws its noise from `rng.child(j)`.
pub fn fitted_sample_analysis(
    alpha: f64,
    th: Threshold,
    phis: &[f64],
    photons: f64,
    rng: &RngStream,
) -> Result<MzAnalysis> {
    if !(photons > 0.0) {
        return Err(BornError::Domain(
            "photons per sample must be positive".into(),
        ));
    }
    let sigma = photons.sqrt().recip();
    let dark = dark_count_prob(th);
    let curve = phis
        .iter()
        .map(|&p| mach_zehnder_point(alpha, th, p).map(|r| r.p_mz))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<f64> = curve
        .iter()
        .enumerate()
        .map(|(j, p)| p + sigma * rng.child(j as u64).normal_pair().0)
        .collect();

    let hi = curve.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - dark;
    let lo = curve.iter().cloned().fold(f64::INFINITY, f64::min) - dark;
    let fit = CosineFit::fit(phis, &samples)?;
    let fit_hi = fit.amplitude + fit.offset - dark;
    let fit_lo = fit.offset - dark;
    let sq: f64 = samples
        .iter()
        .zip(phis)
        .map(|(s, p)| (s - (p / 2.0).cos().powi(2)).powi(2))
        .sum();
    Ok(MzAnalysis {
        phis: phis.to_vec(),
        samples,
        fit,
        visibility: (hi - lo) / (hi + lo),
        fit_visibility: (fit_hi - fit_lo) / (fit_hi + fit_lo),
        rd: beamsplitter_coincidence(alpha, th)?.rd,
        rmse: (sq / phis.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn th(g: f64) -> Threshold {
        Threshold::new(g).unwrap()
    }

    #[test]
    fn quarter_phase_is_balanced() {
        assert_eq!(
            mach_zehnder_point(0.95, th(1.6), PI / 2.0).unwrap().p_mz,
            0.5
        );
    }

    #[test]
    fn complement_symmetry() {
        for k in 0..12 {
            let phi = k as f64 * 0.37;
            let a = mach_zehnder_point(0.8, th(1.2), phi).unwrap().p_mz;
            let b = mach_zehnder_point(0.8, th(1.2), phi + PI).unwrap().p_mz;
            assert!((a + b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn states_match_closed_forms() {
        let phi = 0.9;
        let e = Complex64::from_polar(1.0, phi);
        let mz = mach_zehnder_state(1.0, phi).unwrap();
        assert!((mz.psi()[0] - (1.0 + e) / 2.0).norm() < 1e-14);
        assert!((mz.psi()[2] - (1.0 - e) / 2.0).norm() < 1e-14);
        let ww = which_way_state(1.0, phi).unwrap();
        let want = [
            Complex64::new(0.5, 0.0),
            e / 2.0,
            Complex64::new(0.5, 0.0),
            -e / 2.0,
        ];
        for (got, w) in ww.psi().iter().zip(want) {
            assert!((got - w).norm() < 1e-14);
        }
        let dc = delayed_choice_state(1.0, phi).unwrap();
        assert!((dc.psi()[2] - e * std::f64::consts::FRAC_1_SQRT_2).norm() < 1e-14);
    }

    #[test]
    fn flat_variants() {
        let r = mach_zehnder_point(0.7, th(1.0), 1.1).unwrap();
        assert_eq!(r.p_dc, 0.5);
        for w in r.which_way {
            assert!((w - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_fit_recovers_exact_curve() {
        let phis = super::super::linspace(0.0, 2.0 * PI, 40);
        let truth = CosineFit {
            amplitude: 0.8,
            offset: 0.1,
            phase: 0.2,
            rmse: 0.0,
        };
        let ys: Vec<f64> = phis.iter().map(|&p| truth.eval(p)).collect();
        let fit = CosineFit::fit(&phis, &ys).unwrap();
        assert!((fit.amplitude - 0.8).abs() < 1e-12);
        assert!((fit.offset - 0.1).abs() < 1e-12);
        assert!((fit.phase - 0.2).abs() < 1e-12);
        assert!(fit.rmse < 1e-12);
    }
}
