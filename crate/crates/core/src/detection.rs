//! Amplitude-threshold detection: analytic crossing probabilities, the
//! product-Bernoulli outcome law of independent detectors, and the Monte
//! Carlo detector.
//!
//! A detector on mode `i` clicks iff `|a_i| > gamma`. Since `4|a_i|^2` is
//! noncentral chi-squared with two degrees of freedom and noncentrality
//! `4|alpha psi_i|^2`, the click probability is `Q1(2|alpha psi_i|, 2 gamma)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BornError, Result};
use crate::field::{AmplitudeSample, CoherentVector};
use crate::marcum::{marcum_q1_pair, MarcumQ};
use crate::rng::RngStream;

/// Largest `d` for which [`outcome_distribution`] enumerates all `2^d`
/// outcomes.
pub const MAX_ENUMERATION_DIM: usize = 20;

/// Trials per independent random stream in [`simulate_clicks`].
pub const MC_CHUNK: u64 = 1 << 16;

/// Dimensionless detection threshold `gamma >= 0` of the single-mode limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(BornError::Domain(format!(
                "threshold gamma = {gamma} must be finite and non-negative"
            )));
        }
        Ok(Self(gamma))
    }

    pub fn gamma(self) -> f64 {
        self.0
    }
}

fn check_amplitude(alpha_abs: f64) -> Result<()> {
    if !alpha_abs.is_finite() || alpha_abs < 0.0 {
        return Err(BornError::Domain(format!(
            "amplitude |alpha| = {alpha_abs} must be finite and non-negative"
        )));
    }
    Ok(())
}

/// `Pr[|a|^2 > gamma^2] = Q1(2|alpha|, 2 gamma)`.
pub fn detect_prob(alpha_abs: f64, th: Threshold) -> Result<f64> {
    detect_prob_pair(alpha_abs, th).map(|m| m.q)
}

/// Click probability and its complement, both to full relative precision.
pub fn detect_prob_pair(alpha_abs: f64, th: Threshold) -> Result<MarcumQ> {
    check_amplitude(alpha_abs)?;
    marcum_q1_pair(2.0 * alpha_abs, 2.0 * th.gamma())
}

/// Dark-count probability `exp(-2 gamma^2)`.
pub fn dark_count_prob(th: Threshold) -> f64 {
    (-2.0 * th.gamma() * th.gamma()).exp()
}

/// Fourth-order small-amplitude expansion of [`detect_prob`]:
/// `e^{-2g^2} (1 + 4 g^2 |alpha|^2 + 4 g^2 (g^2 - 1) |alpha|^4)`.
pub fn born_expansion(alpha_abs: f64, th: Threshold) -> f64 {
    let g2 = th.gamma() * th.gamma();
    let s = alpha_abs * alpha_abs;
    dark_count_prob(th) * (1.0 + 4.0 * g2 * s + 4.0 * g2 * (g2 - 1.0) * s * s)
}

/// Effective efficiency `eta = 4 g^2 e^{-2g^2} / (1 - e^{-2g^2})` that makes
/// the Poissonian click model agree with the threshold model to first order.
pub fn efficiency(th: Threshold) -> Result<f64> {
    let g2 = th.gamma() * th.gamma();
    if g2 == 0.0 {
        return Err(BornError::SingularThreshold);
    }
    Ok(4.0 * g2 * (-2.0 * g2).exp() / -(-2.0 * g2).exp_m1())
}

/// Poissonian click model `1 - (1 - delta) exp(-eta |alpha|^2)` with
/// `delta` the dark-count probability and `eta` from [`efficiency`].
pub fn poisson_detection_prob(alpha_abs: f64, th: Threshold) -> Result<f64> {
    check_amplitude(alpha_abs)?;
    let eta = efficiency(th)?;
    let delta = dark_count_prob(th);
    Ok(1.0 - (1.0 - delta) * (-eta * alpha_abs * alpha_abs).exp())
}

/// Fringe visibility of the single-mode click probability,
/// `(Q1(2|alpha|, 2g) - e^{-2g^2}) / (Q1(2|alpha|, 2g) + e^{-2g^2})`.
pub fn visibility_single(alpha_abs: f64, th: Threshold) -> Result<f64> {
    let q = detect_prob(alpha_abs, th)?;
    let dark = dark_count_prob(th);
    Ok((q - dark) / (q + dark))
}

/// Per-mode crossing probabilities `q_i = Q1(2|alpha psi_i|, 2 gamma)`.
pub fn mode_crossing_probs(state: &CoherentVector, th: Threshold) -> Vec<f64> {
    mode_crossing_pairs(state, th)
        .into_iter()
        .map(|m| m.q)
        .collect()
}

/// `q_i` and `1 - q_i` per mode.
pub fn mode_crossing_pairs(state: &CoherentVector, th: Threshold) -> Vec<MarcumQ> {
    let per_mode = vec![th; state.dim()];
    mode_crossing_pairs_per_detector(state, &per_mode).expect("one threshold per mode")
}

/// As [`mode_crossing_pairs`] with an individual threshold per detector.
pub fn mode_crossing_pairs_per_detector(
    state: &CoherentVector,
    thresholds: &[Threshold],
) -> Result<Vec<MarcumQ>> {
    if thresholds.len() != state.dim() {
        return Err(BornError::DimensionMismatch {
            expected: state.dim(),
            got: thresholds.len(),
        });
    }
    state
        .mode_magnitudes()
        .into_iter()
        .zip(thresholds)
        .map(|(m, th)| detect_prob_pair(m, *th))
        .collect()
}

/// Which detectors clicked in one trial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetectionOutcome {
    bits: Vec<bool>,
}

impl DetectionOutcome {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Outcome encoded in the low `d` bits of `index`, bit `i` for mode `i`.
    pub fn from_index(index: usize, d: usize) -> Self {
        Self {
            bits: (0..d).map(|i| index >> i & 1 == 1).collect(),
        }
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn clicks(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// The mode that clicked, if exactly one did.
    pub fn single_mode(&self) -> Option<usize> {
        let mut it = self.bits.iter().enumerate().filter(|(_, &b)| b);
        match (it.next(), it.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

/// Joint law of all `2^d` click patterns, indexed as in
/// [`DetectionOutcome::from_index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    d: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outcome: &DetectionOutcome) -> Result<f64> {
        if outcome.dim() != self.d {
            return Err(BornError::DimensionMismatch {
                expected: self.d,
                got: outcome.dim(),
            });
        }
        Ok(self.probs[outcome.index()])
    }

    pub fn iter(&self) -> impl Iterator<Item = (DetectionOutcome, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (DetectionOutcome::from_index(i, self.d), p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability that mode `mode` clicks, summed over all other modes.
    pub fn marginal(&self, mode: usize) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> mode & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    /// Probability that `mode` is the only detector to click.
    pub fn single(&self, mode: usize) -> f64 {
        self.probs[1 << mode]
    }

    pub fn none(&self) -> f64 {
        self.probs[0]
    }
}

/// `P(n) = prod_i q_i^{n_i} (1 - q_i)^{1 - n_i}` over all `2^d` outcomes.
pub fn outcome_distribution(state: &CoherentVector, th: Threshold) -> Result<OutcomeDistribution> {
    let d = state.dim();
    if d > MAX_ENUMERATION_DIM {
        return Err(BornError::EnumerationLimit {
            d,
            max: MAX_ENUMERATION_DIM,
        });
    }
    let pairs = mode_crossing_pairs(state, th);
    let mut probs = vec![1.0];
    for m in &pairs {
        // doubling keeps bit i for mode i
        let low: Vec<f64> = probs.iter().map(|p| p * m.complement).collect();
        let high: Vec<f64> = probs.iter().map(|p| p * m.q).collect();
        probs = low;
        probs.extend(high);
    }
    Ok(OutcomeDistribution { d, probs })
}

/// Threshold test `|a_i| > gamma` on every mode.
pub fn detect_sample(sample: &AmplitudeSample, th: Threshold) -> DetectionOutcome {
    let g2 = th.gamma() * th.gamma();
    DetectionOutcome {
        bits: sample.a().iter().map(|a| a.norm_sqr() > g2).collect(),
    }
}

/// Monte Carlo click statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickTally {
    pub trials: u64,
    /// Clicks per mode, regardless of the other modes.
    pub mode_clicks: Vec<u64>,
    /// Trials in which only this mode clicked.
    pub single_clicks: Vec<u64>,
    pub no_clicks: u64,
    /// Counts per outcome index, kept when `d <= MAX_ENUMERATION_DIM`.
    pub outcome_counts: Option<Vec<u64>>,
}

impl ClickTally {
    fn empty(d: usize) -> Self {
        Self {
            trials: 0,
            mode_clicks: vec![0; d],
            single_clicks: vec![0; d],
            no_clicks: 0,
            outcome_counts: (d <= MAX_ENUMERATION_DIM).then(|| vec![0; 1 << d]),
        }
    }

    fn record(&mut self, outcome: &DetectionOutcome) {
        self.trials += 1;
        for (c, &b) in self.mode_clicks.iter_mut().zip(outcome.bits()) {
            *c += u64::from(b);
        }
        match outcome.clicks() {
            0 => self.no_clicks += 1,
            1 => self.single_clicks[outcome.single_mode().unwrap()] += 1,
            _ => {}
        }
        if let Some(counts) = &mut self.outcome_counts {
            counts[outcome.index()] += 1;
        }
    }

    fn merge(mut self, other: ClickTally) -> Self {
        self.trials += other.trials;
        self.no_clicks += other.no_clicks;
        for (a, b) in self.mode_clicks.iter_mut().zip(other.mode_clicks) {
            *a += b;
        }
        for (a, b) in self.single_clicks.iter_mut().zip(other.single_clicks) {
            *a += b;
        }
        if let (Some(a), Some(b)) = (&mut self.outcome_counts, other.outcome_counts) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self
    }

    pub fn single_total(&self) -> u64 {
        self.single_clicks.iter().sum()
    }
}

/// Runs `trials` independent realizations of `state` through threshold
/// detectors. Trials are split into chunks of [`MC_CHUNK`], chunk `c` using
/// `rng.child(c)`, so the tally depends only on `(rng, trials)` and not on
/// the thread count.
pub fn simulate_clicks(
    state: &CoherentVector,
    th: Threshold,
    trials: u64,
    rng: &RngStream,
) -> ClickTally {
    let d = state.dim();
    let n_chunks = trials.div_ceil(MC_CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut stream = rng.child(c);
            let n = MC_CHUNK.min(trials - c * MC_CHUNK);
            let mut tally = ClickTally::empty(d);
            for _ in 0..n {
                let sample = crate::field::realize(state, &mut stream);
                tally.record(&detect_sample(&sample, th));
            }
            tally
        })
        .reduce(|| ClickTally::empty(d), ClickTally::merge)
}
