use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MonteCarlo, ScenarioMeta, ScenarioResult};
use crate::detection::{detect_prob_pair, Threshold};
use crate::error::{BornError, Result};
use crate::field::CoherentVector;

/// Coincidence statistics behind a 50/50 beam splitter with outputs R and D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterProbs {
    pub p0: f64,
    /// Only R clicks.
    pub pr: f64,
    /// Only D clicks.
    pub pd: f64,
    /// Both click.
    pub prd: f64,
    /// `P_RD / (P_R P_D)`, normalized by all trials.
    pub r: f64,
    /// `P_RD (1 - P0) / (P_R P_D)`, normalized by detected events.
    pub rd: f64,
}

/// `alpha` split evenly over the two output ports.
pub fn beamsplitter_state(alpha: f64) -> Result<CoherentVector> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CoherentVector::new(Complex64::new(alpha, 0.0), vec![h, h])
}

pub fn beamsplitter_coincidence(alpha: f64, th: Threshold) -> Result<BeamSplitterProbs> {
    // each port carries |alpha|/sqrt 2, so the crossing probability is Q1(sqrt 2 |alpha|, 2 gamma)
    let m = detect_prob_pair(std::f64::consts::FRAC_1_SQRT_2 * alpha.abs(), th)?;
    let single = m.q * m.complement;
    if single <= 0.0 {
        return Err(BornError::UndefinedRatio(
            "single-detector probability vanishes".into(),
        ));
    }
    let p0 = m.complement * m.complement;
    let prd = m.q * m.q;
    let r = prd / (single * single);
    Ok(BeamSplitterProbs {
        p0,
        pr: single,
        pd: single,
        prd,
        r,
        rd: r * (1.0 - p0),
    })
}

/// Columns: `alpha`, `R`, `Rd`, `P0`, `PR`, `PD`, `PRD`; with Monte Carlo also
/// `none`, `single_r`, `single_d`, `both`.
pub fn antibunching_scan(
    alphas: &[f64],
    th: Threshold,
    mc: Option<&MonteCarlo>,
) -> Result<ScenarioResult> {
    let rows = alphas
        .iter()
        .map(|&a| beamsplitter_coincidence(a, th))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ScenarioResult::new(
        "alpha",
        alphas.to_vec(),
        ScenarioMeta {
            scenario: "antibunch".into(),
            gamma: Some(th.gamma()),
            n_trials: mc.map(|m| m.trials),
            seed: mc.map(|m| m.rng.seed()),
            ..Default::default()
        },
    );
    let col = |f: fn(&BeamSplitterProbs) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    out.push_curve("R", col(|r| r.r));
    out.push_curve("Rd", col(|r| r.rd));
    out.push_curve("P0", col(|r| r.p0));
    out.push_curve("PR", col(|r| r.pr));
    out.push_curve("PD", col(|r| r.pd));
    out.push_curve("PRD", col(|r| r.prd));
    if let Some(mc) = mc {
        let states = alphas
            .iter()
            .map(|&a| beamsplitter_state(a))
            .collect::<Result<Vec<_>>>()?;
        let tallies = mc.tally(&states, th);
        out.push_counts("none", tallies.iter().map(|t| t.no_clicks).collect());
        out.push_counts(
            "single_r",
            tallies.iter().map(|t| t.single_clicks[0]).collect(),
        );
        out.push_counts(
            "single_d",
            tallies.iter().map(|t| t.single_clicks[1]).collect(),
        );
        let both = tallies
            .iter()
            .map(|t| t.outcome_counts.as_ref().map_or(0, |c| c[3]))
            .collect();
        out.push_counts("both", both);
    }
    Ok(out)
}
