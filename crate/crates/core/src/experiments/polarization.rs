use num_complex::Complex64;

use super::{MonteCarlo, ScenarioMeta, ScenarioResult};
use crate::detection::{
    born_expansion, dark_count_prob, detect_prob, visibility_single, Threshold,
};
use crate::error::{BornError, Result};
use crate::field::CoherentVector;
use crate::rng::RngStream;

/// Single-mode polarizer scan with amplitude `alpha0 cos(theta)`.
///
/// Columns: `theta` (degrees), `analytic` = `n Q1(2|alpha|, 2 gamma)`,
/// `expansion` = `n` times the fourth-order expansion, and, when `rng` is
/// given, `counts` of threshold crossings in `n` trials per angle.
pub fn polarization_scan(
    alpha0: f64,
    th: Threshold,
    thetas: &[f64],
    n: u64,
    rng: Option<&RngStream>,
) -> Result<ScenarioResult> {
    if n == 0 {
        return Err(BornError::Domain("polarization scan needs n >= 1".into()));
    }
    let amps: Vec<f64> = thetas
        .iter()
        .map(|t| (alpha0 * t.to_radians().cos()).abs())
        .collect();
    let scale = n as f64;
    let analytic = amps
        .iter()
        .map(|&a| detect_prob(a, th).map(|p| scale * p))
        .collect::<Result<Vec<_>>>()?;
    let expansion = amps
        .iter()
        .map(|&a| scale * born_expansion(a, th))
        .collect();

    let mut out = ScenarioResult::new(
        "theta",
        thetas.to_vec(),
        ScenarioMeta {
            scenario: "counts".into(),
            alpha: Some(alpha0),
            gamma: Some(th.gamma()),
            n_trials: Some(n),
            seed: rng.map(|r| r.seed()),
        },
    );
    out.push_curve("analytic", analytic);
    out.push_curve("expansion", expansion);
    if let Some(rng) = rng {
        let mc = MonteCarlo {
            trials: n,
            rng: rng.clone(),
        };
        let states = amps
            .iter()
            .map(|&a| CoherentVector::single_mode(Complex64::new(a, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        let counts = mc
            .tally(&states, th)
            .into_iter()
            .map(|t| t.mode_clicks[0])
            .collect();
        out.push_counts("counts", counts);
    }
    Ok(out)
}

/// Subtracts the dark level and rescales so the largest value maps to one.
pub fn renormalize_counts(values: &[f64], dark: f64) -> Vec<f64> {
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - dark;
    values.iter().map(|v| (v - dark) / top).collect()
}

/// Threshold model against the coherent-state click law `1 - exp(-|alpha|^2)`
/// for `alpha = alpha0 cos(theta)`.
///
/// The model curve is dark-subtracted and scaled to share the quantum
/// curve's value at `theta = 0`: `(Q - delta) / (Q_max - delta) (1 - exp(-alpha0^2))`.
/// Columns: `theta`, `quantum`, then `model_g<gamma>` and `deviation_g<gamma>`
/// (model minus quantum) per threshold.
pub fn deviation_scan(alpha0: f64, gammas: &[Threshold], thetas: &[f64]) -> Result<ScenarioResult> {
    if alpha0 <= 0.0 {
        return Err(BornError::Domain("deviation scan needs alpha0 > 0".into()));
    }
    let amps: Vec<f64> = thetas
        .iter()
        .map(|t| (alpha0 * t.to_radians().cos()).abs())
        .collect();
    let peak = -(-alpha0 * alpha0).exp_m1();
    let quantum: Vec<f64> = amps.iter().map(|a| -(-a * a).exp_m1()).collect();
    let mut out = ScenarioResult::new(
        "theta",
        thetas.to_vec(),
        ScenarioMeta {
            scenario: "deviation".into(),
            alpha: Some(alpha0),
            ..Default::default()
        },
    );
    out.push_curve("quantum", quantum.clone());
    for &th in gammas {
        let dark = dark_count_prob(th);
        let top = detect_prob(alpha0, th)? - dark;
        if top <= 0.0 {
            return Err(BornError::UndefinedRatio(format!(
                "no signal above dark level at gamma = {}",
                th.gamma()
            )));
        }
        let model = amps
            .iter()
            .map(|&a| detect_prob(a, th).map(|q| (q - dark) / top * peak))
            .collect::<Result<Vec<_>>>()?;
        let deviation = model.iter().zip(&quantum).map(|(m, q)| m - q).collect();
        out.push_curve(&format!("model_g{}", th.gamma()), model);
        out.push_curve(&format!("deviation_g{}", th.gamma()), deviation);
    }
    Ok(out)
}

/// Single-mode visibility against threshold, one column `visibility_a<alpha>`
/// per amplitude.
pub fn visibility_curves(alphas: &[f64], gammas: &[Threshold]) -> Result<ScenarioResult> {
    let mut out = ScenarioResult::new(
        "gamma",
        gammas.iter().map(|g| g.gamma()).collect(),
        ScenarioMeta {
            scenario: "visibility".into(),
            ..Default::default()
        },
    );
    for &a in alphas {
        let v = gammas
            .iter()
            .map(|&g| visibility_single(a, g))
            .collect::<Result<Vec<_>>>()?;
        out.push_curve(&format!("visibility_a{a}"), v);
    }
    Ok(out)
}
