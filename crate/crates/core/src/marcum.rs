//! First-order Marcum Q-function.
//!
//! With `x = a^2/2` and `y = b^2/2`, `Q1(a, b) = P(N_y <= N_x)` for independent
//! Poisson variables `N_x ~ Poi(x)` and `N_y ~ Poi(y)`. This is the usual
//! Poisson-weighted sum of regularized incomplete gamma terms,
//!
//! ```text
//! Q1(a, b)     = sum_k Poi(k; x) * P(N_y <= k)
//! 1 - Q1(a, b) = sum_k Poi(k; x) * P(N_y >  k)
//! ```
//!
//! Both sums have non-negative terms, so each is evaluated directly and keeps
//! its relative accuracy even when the other is close to one. Poisson weights
//! are generated by ratio recursion outward from the mode and normalized over
//! the window. The window ends once the geometric bound on the discarded tail
//! mass drops below [`TAIL_BOUND`] of the total, so the truncation error is
//! at most `2 * TAIL_BOUND` (absolute, on either sum). Tails far below the mode
//! are kept down to the f64 underflow limit, around `1e-300` relative to the
//! peak.

use crate::error::{BornError, Result};

/// Bound on the Poisson mass discarded above each window.
pub const TAIL_BOUND: f64 = 1e-17;

/// `Q1(a, b)` together with its complement `1 - Q1(a, b)`, each computed
/// to full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarcumQ {
    pub q: f64,
    pub complement: f64,
}

/// `Q1(a, b)` for finite `a, b >= 0`.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    marcum_q1_pair(a, b).map(|m| m.q)
}

/// `1 - Q1(a, b)` without cancellation.
pub fn marcum_q1_complement(a: f64, b: f64) -> Result<f64> {
    marcum_q1_pair(a, b).map(|m| m.complement)
}

pub fn marcum_q1_pair(a: f64, b: f64) -> Result<MarcumQ> {
    check_arg("a", a)?;
    check_arg("b", b)?;
    if b == 0.0 {
        return Ok(MarcumQ {
            q: 1.0,
            complement: 0.0,
        });
    }
    let y = 0.5 * b * b;
    if a == 0.0 {
        return Ok(MarcumQ {
            q: (-y).exp(),
            complement: -(-y).exp_m1(),
        });
    }
    let x = 0.5 * a * a;
    let upper = window_end(x).max(window_end(y));
    let px = poisson_weights(x, upper);
    let py = poisson_weights(y, upper);

    // P(N_y > k) by backward accumulation; the mass above `upper` is below
    // TAIL_BOUND and dropped.
    let mut survival = vec![0.0; upper + 1];
    let mut acc = 0.0;
    for k in (0..=upper).rev() {
        survival[k] = acc;
        acc += py[k];
    }

    let mut q = 0.0;
    let mut complement = 0.0;
    let mut cdf = 0.0;
    for k in 0..=upper {
        cdf += py[k];
        q += px[k] * cdf;
        complement += px[k] * survival[k];
    }
    Ok(MarcumQ {
        q: q.min(1.0),
        complement: complement.min(1.0),
    })
}

fn check_arg(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(BornError::Domain(format!(
            "Marcum Q argument {name} = {v} must be finite and non-negative"
        )));
    }
    Ok(())
}

/// Smallest `k` past the mode of `Poi(lambda)` at which the remaining upper
/// tail is certified below `TAIL_BOUND` (relative to the mode weight, which
/// is itself at most the total).
fn window_end(lambda: f64) -> usize {
    if lambda == 0.0 {
        return 0;
    }
    let mut k = lambda.floor() as usize;
    let mut w = 1.0;
    loop {
        let next = k + 1;
        let ratio = lambda / (next as f64 + 1.0);
        let w_next = w * lambda / next as f64;
        // mass of {next, next+1, ...} <= w_next / (1 - ratio)
        if ratio < 1.0 && w_next / (1.0 - ratio) <= TAIL_BOUND {
            return k;
        }
        k = next;
        w = w_next;
    }
}

/// Normalized `Poi(k; lambda)` for `k = 0..=upper`.
fn poisson_weights(lambda: f64, upper: usize) -> Vec<f64> {
    let mut w = vec![0.0; upper + 1];
    if lambda == 0.0 {
        w[0] = 1.0;
        return w;
    }
    let mode = (lambda.floor() as usize).min(upper);
    w[mode] = 1.0;
    for k in mode..upper {
        w[k + 1] = w[k] * lambda / (k + 1) as f64;
    }
    for k in (1..=mode).rev() {
        w[k - 1] = w[k] * k as f64 / lambda;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values() {
        assert_eq!(marcum_q1(1.3, 0.0).unwrap(), 1.0);
        assert_eq!(marcum_q1(0.0, 0.0).unwrap(), 1.0);
        let v = marcum_q1(0.0, 2.0).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-16);
        assert!((v - 0.135_335).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(marcum_q1(-1.0, 1.0), Err(BornError::Domain(_))));
        assert!(marcum_q1(1.0, -0.1).is_err());
        assert!(marcum_q1(f64::NAN, 1.0).is_err());
        assert!(marcum_q1(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn pair_sums_to_one() {
        for &(a, b) in &[
            (0.3, 0.4),
            (2.0, 2.0),
            (5.0, 1.0),
            (1.0, 6.0),
            (20.0, 2.0),
            (0.01, 0.01),
        ] {
            let m = marcum_q1_pair(a, b).unwrap();
            assert!((m.q + m.complement - 1.0).abs() < 1e-14, "{a} {b}");
        }
    }

    #[test]
    fn deep_tails_stay_relative() {
        // a >> b: 1 - Q1 is tiny but still resolved.
        let m = marcum_q1_pair(20.0, 2.0).unwrap();
        assert!(m.complement > 0.0 && m.complement < 1e-30);
        // b >> a: Q1 close to e^{-b^2/2} scale, still positive.
        let m = marcum_q1_pair(0.5, 12.0).unwrap();
        assert!(m.q > 0.0 && m.q < 1e-25);
    }

    #[test]
    fn poisson_window_normalized() {
        for lambda in [0.1, 1.0, 7.5, 200.0] {
            let up = window_end(lambda);
            let w = poisson_weights(lambda, up);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let mode = lambda.floor() as usize;
            assert!(w[mode] >= w[mode.saturating_sub(1)]);
        }
    }
}
