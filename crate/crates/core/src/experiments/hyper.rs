use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MonteCarlo, ScenarioMeta, ScenarioResult};
use crate::detection::{detect_prob_pair, Threshold};
use crate::error::Result;
use crate::field::CoherentVector;

/// Single-detection probabilities for the spatial/polarization Bell state
/// on modes (RH, RV, DH, DV).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperProbs {
    /// Only RH clicks (equal to only DV).
    pub pr_rh: f64,
    /// Only RV clicks (equal to only DH).
    pub pr_rv: f64,
    /// RH given exactly one click anywhere.
    pub conditional_rh: f64,
}

/// `alpha (|RH> + |DV>) / sqrt 2`.
pub fn hyperentangled_state(alpha: f64) -> Result<CoherentVector> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    CoherentVector::new(Complex64::new(alpha, 0.0), vec![h, z, z, h])
}

pub fn hyperentangled_probs(alpha: f64, th: Threshold) -> Result<HyperProbs> {
    let m = detect_prob_pair(std::f64::consts::FRAC_1_SQRT_2 * alpha.abs(), th)?;
    // vacuum modes share the evaluation path of the bright ones so that the
    // alpha = 0 symmetry holds exactly
    let v = detect_prob_pair(0.0, th)?;
    let pr_rh = (v.complement * v.complement) * (m.q * m.complement);
    let pr_rv = (v.q * v.complement) * (m.complement * m.complement);
    Ok(HyperProbs {
        pr_rh,
        pr_rv,
        conditional_rh: pr_rh / (2.0 * pr_rh + 2.0 * pr_rv),
    })
}

/// Columns: `gamma`, `pr_rh`, `pr_rv`, `conditional_rh`, `conditional_rv`;
/// with Monte Carlo also `single_rh`, `single_rv`, `single_dh`, `single_dv`.
pub fn hyper_scan(
    alpha: f64,
    gammas: &[Threshold],
    mc: Option<&MonteCarlo>,
) -> Result<ScenarioResult> {
    let rows = gammas
        .iter()
        .map(|&g| hyperentangled_probs(alpha, g))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ScenarioResult::new(
        "gamma",
        gammas.iter().map(|g| g.gamma()).collect(),
        ScenarioMeta {
            scenario: "hyper".into(),
            alpha: Some(alpha),
            n_trials: mc.map(|m| m.trials),
            seed: mc.map(|m| m.rng.seed()),
            ..Default::default()
        },
    );
    out.push_curve("pr_rh", rows.iter().map(|r| r.pr_rh).collect());
    out.push_curve("pr_rv", rows.iter().map(|r| r.pr_rv).collect());
    out.push_curve(
        "conditional_rh",
        rows.iter().map(|r| r.conditional_rh).collect(),
    );
    out.push_curve(
        "conditional_rv",
        rows.iter().map(|r| 0.5 - r.conditional_rh).collect(),
    );
    if let Some(mc) = mc {
        let state = hyperentangled_state(alpha)?;
        // one independent stream per threshold
        let tallies: Vec<_> = gammas
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                crate::detection::simulate_clicks(&state, g, mc.trials, &mc.rng.child(i as u64))
            })
            .collect();
        for (k, name) in ["single_rh", "single_rv", "single_dh", "single_dv"]
            .iter()
            .enumerate()
        {
            out.push_counts(name, tallies.iter().map(|t| t.single_clicks[k]).collect());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(g: f64) -> Threshold {
        Threshold::new(g).unwrap()
    }

    #[test]
    fn vacuum_is_quarter() {
        for g in [0.3, 1.0, 2.5] {
            assert_eq!(
                hyperentangled_probs(0.0, th(g)).unwrap().conditional_rh,
                0.25
            );
        }
    }

    #[test]
    fn large_threshold_limit() {
        let c = hyperentangled_probs(1.0, th(3.0)).unwrap().conditional_rh;
        assert!((c - 0.5).abs() < 0.01, "{c}");
    }
}
