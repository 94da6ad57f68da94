use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MonteCarlo, ScenarioMeta, ScenarioResult};
use crate::detection::{dark_count_prob, detect_prob_pair, Threshold};
use crate::error::{BornError, Result};
use crate::field::CoherentVector;

/// Click statistics of a polarizing beam splitter fed with `alpha` at
/// polarization angle `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualModeProbs {
    /// Neither detector clicks.
    pub p0: f64,
    /// Only H clicks.
    pub ph: f64,
    /// Only V clicks.
    pub pv: f64,
    /// Both click.
    pub phv: f64,
    /// H given exactly one click.
    pub p_h: f64,
    /// `(p_h - 1/2) / visibility + 1/2`.
    pub p_h_renorm: f64,
    pub visibility: f64,
}

/// `alpha (cos theta, sin theta)` on the H and V modes; `theta` in degrees.
pub fn dual_mode_state(alpha: f64, theta_deg: f64) -> Result<CoherentVector> {
    let t = theta_deg.to_radians();
    CoherentVector::new(
        Complex64::new(alpha, 0.0),
        vec![Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)],
    )
}

pub fn dual_mode_probs(alpha: f64, theta_deg: f64, th: Threshold) -> Result<DualModeProbs> {
    let t = theta_deg.to_radians();
    let h = detect_prob_pair((alpha * t.cos()).abs(), th)?;
    let v = detect_prob_pair((alpha * t.sin()).abs(), th)?;
    let ph = h.q * v.complement;
    let pv = h.complement * v.q;
    if ph + pv <= 0.0 {
        return Err(BornError::UndefinedConditional(
            "no single-click events on either mode".into(),
        ));
    }
    let full = detect_prob_pair(alpha.abs(), th)?;
    let dark = dark_count_prob(th);
    let signal = full.q * (1.0 - dark);
    let noise = full.complement * dark;
    let visibility = (signal - noise) / (signal + noise);
    let p_h = ph / (ph + pv);
    Ok(DualModeProbs {
        p0: h.complement * v.complement,
        ph,
        pv,
        phv: h.q * v.q,
        p_h,
        p_h_renorm: (p_h - 0.5) / visibility + 0.5,
        visibility,
    })
}

/// Columns: `theta`, `p_h`, `p_h_renorm`, `born` (= cos^2 theta), `visibility`,
/// `P0`, `PH`, `PV`, `PHV`; with Monte Carlo also `single_h`, `single_v`.
pub fn born_again_scan(
    alpha: f64,
    th: Threshold,
    thetas: &[f64],
    mc: Option<&MonteCarlo>,
) -> Result<ScenarioResult> {
    let rows = thetas
        .iter()
        .map(|&t| dual_mode_probs(alpha, t, th))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ScenarioResult::new(
        "theta",
        thetas.to_vec(),
        ScenarioMeta {
            scenario: "born-again".into(),
            alpha: Some(alpha),
            gamma: Some(th.gamma()),
            n_trials: mc.map(|m| m.trials),
            seed: mc.map(|m| m.rng.seed()),
        },
    );
    let col = |f: fn(&DualModeProbs) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    out.push_curve("p_h", col(|r| r.p_h));
    out.push_curve("p_h_renorm", col(|r| r.p_h_renorm));
    out.push_curve(
        "born",
        thetas
            .iter()
            .map(|t| t.to_radians().cos().powi(2))
            .collect(),
    );
    out.push_curve("visibility", col(|r| r.visibility));
    out.push_curve("P0", col(|r| r.p0));
    out.push_curve("PH", col(|r| r.ph));
    out.push_curve("PV", col(|r| r.pv));
    out.push_curve("PHV", col(|r| r.phv));
    if let Some(mc) = mc {
        let states = thetas
            .iter()
            .map(|&t| dual_mode_state(alpha, t))
            .collect::<Result<Vec<_>>>()?;
        let tallies = mc.tally(&states, th);
        out.push_counts(
            "single_h",
            tallies.iter().map(|t| t.single_clicks[0]).collect(),
        );
        out.push_counts(
            "single_v",
            tallies.iter().map(|t| t.single_clicks[1]).collect(),
        );
    }
    Ok(out)
}
