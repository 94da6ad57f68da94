use crate::detection::{mode_crossing_pairs, Threshold};
use crate::error::{BornError, Result};
use crate::field::CoherentVector;

/// Probability that mode `i` is the one that clicked, given exactly one
/// click: `p_i = w_i / sum_k w_k` with odds `w_i = q_i / (1 - q_i)`.
///
/// Odds are combined in log space so large amplitudes do not overflow.
pub fn conditional_mode_probs(state: &CoherentVector, th: Threshold) -> Result<Vec<f64>> {
    let pairs = mode_crossing_pairs(state, th);
    let mut log_odds = Vec::with_capacity(pairs.len());
    for (i, m) in pairs.iter().enumerate() {
        if m.complement <= 0.0 {
            return Err(BornError::SaturatedDetector(i));
        }
        log_odds.push(m.q.ln() - m.complement.ln());
    }
    let top = log_odds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(BornError::UndefinedConditional(
            "no detector can click".into(),
        ));
    }
    let w: Vec<f64> = log_odds.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}
