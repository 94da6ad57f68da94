//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use bornsim::{outcome_distribution, ClickTally, CoherentVector, OutcomeDistribution, Threshold};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
fn kronrod15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = kronrod15(f, a, b);
    // stop at the requested tolerance or once the difference is down to
    // rounding noise
    if err <= tol || err <= 500.0 * f64::EPSILON * k.abs() || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod integral of `f` over consecutive `breaks`, to
/// relative tolerance `rel`.
pub fn integrate(f: &dyn Fn(f64) -> f64, breaks: &[f64], rel: f64) -> f64 {
    let rough: f64 = breaks
        .windows(2)
        .map(|w| kronrod15(f, w[0], w[1]).0.abs())
        .sum();
    let tol = rel * rough.max(f64::MIN_POSITIVE);
    breaks
        .windows(2)
        .map(|w| adapt(f, w[0], w[1], tol, 24))
        .sum()
}

/// `exp(-z) I0(z) = (1/pi) int_0^pi exp(z (cos t - 1)) dt`.
pub fn scaled_bessel_i0(z: f64) -> f64 {
    let f = |t: f64| (z * (t.cos() - 1.0)).exp();
    integrate(
        &f,
        &[0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI],
        1e-15,
    ) / std::f64::consts::PI
}

/// `Q1(a, b) = int_b^inf x exp(-(x^2 + a^2)/2) I0(a x) dx` by nested
/// quadrature, with the Bessel factor rescaled to avoid overflow.
pub fn marcum_quadrature(a: f64, b: f64) -> f64 {
    let f = |x: f64| x * (-(x - a).powi(2) / 2.0).exp() * scaled_bessel_i0(a * x);
    let top = a.max(b) + 40.0;
    let mut breaks = vec![b];
    if a > b {
        breaks.push(a);
    }
    breaks.push(top);
    integrate(&f, &breaks, 1e-13)
}

/// `|count - n p| <= k sqrt(n p (1 - p))`, with the spread floored at one
/// count so that near-certain events are not over-constrained.
pub fn within_sigma(count: u64, n: u64, p: f64, k: f64) -> bool {
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt().max(1.0);
    (count as f64 - mean).abs() <= k * sd
}

/// Panics with context if any tallied outcome frequency falls outside `k`
/// binomial standard deviations of the exact table.
pub fn assert_tally_matches(tally: &ClickTally, dist: &OutcomeDistribution, k: f64) {
    let counts = tally.outcome_counts.as_ref().expect("enumerable tally");
    for (i, (&c, &p)) in counts.iter().zip(dist.probs()).enumerate() {
        assert!(
            within_sigma(c, tally.trials, p, k),
            "outcome {i}: {c} of {} vs p = {p}",
            tally.trials
        );
    }
}

/// Probability that only `mode` clicks, by direct summation over the table.
pub fn brute_single(dist: &OutcomeDistribution, mode: usize) -> f64 {
    dist.iter()
        .filter(|(o, _)| o.single_mode() == Some(mode))
        .map(|(_, p)| p)
        .sum()
}

/// Probability that no detector clicks, by direct summation.
pub fn brute_none(dist: &OutcomeDistribution) -> f64 {
    dist.iter()
        .filter(|(o, _)| o.clicks() == 0)
        .map(|(_, p)| p)
        .sum()
}

/// Probability that exactly the modes in `set` click.
pub fn brute_exact(dist: &OutcomeDistribution, set: &[usize]) -> f64 {
    dist.iter()
        .filter(|(o, _)| (0..o.dim()).all(|i| o.bits()[i] == set.contains(&i)))
        .map(|(_, p)| p)
        .sum()
}

pub fn table(state: &CoherentVector, gamma: f64) -> OutcomeDistribution {
    outcome_distribution(state, Threshold::new(gamma).unwrap()).unwrap()
}

pub fn th(g: f64) -> Threshold {
    Threshold::new(g).unwrap()
}

/// Coefficients of `Q1(2 sqrt(s), 2 gamma)` in powers of `s = |alpha|^2`,
/// from the Poisson-mixture form `sum_k e^{-2s} (2s)^k / k! P(N_y <= k)`
/// with `y = 2 gamma^2`.
pub fn detect_prob_series(gamma: f64, order: usize) -> Vec<f64> {
    let y = 2.0 * gamma * gamma;
    let mut cdf = Vec::with_capacity(order + 1);
    let mut term = (-y).exp();
    let mut acc = 0.0;
    for k in 0..=order {
        if k > 0 {
            term *= y / k as f64;
        }
        acc += term;
        cdf.push(acc);
    }
    let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
    // e^{-2s} = sum_j (-2)^j s^j / j!; second factor sum_k 2^k F_k s^k / k!
    (0..=order)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    let j = n - k;
                    (-2.0f64).powi(j as i32) / fact(j) * 2.0f64.powi(k as i32) * cdf[k] / fact(k)
                })
                .sum()
        })
        .collect()
}
