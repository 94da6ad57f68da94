//! Analytic scenario formulas against brute-force sums over the full outcome
//! table, and against Monte Carlo frequencies.

mod common;

use bornsim::experiments::*;
use bornsim::{detect_prob, simulate_clicks, RngStream};
use common::{
    assert_tally_matches, brute_exact, brute_none, brute_single, table, th, within_sigma,
};
use proptest::prelude::*;

const EXACT: f64 = 1e-12;
const MC_TRIALS: u64 = 100_000;

fn close(a: f64, b: f64, what: &str) {
    assert!((a - b).abs() <= EXACT, "{what}: {a} vs {b}");
}

#[test]
fn dual_mode_matches_table() {
    for &(alpha, gamma) in &[(0.707, 1.0), (0.3, 0.5), (2.0, 1.5), (1.0, 3.0)] {
        for &theta in &[0.0, 17.0, 45.0, 60.0, 90.0, 133.0] {
            let p = dual_mode_probs(alpha, theta, th(gamma)).unwrap();
            let t = table(&dual_mode_state(alpha, theta).unwrap(), gamma);
            close(p.p0, brute_none(&t), "P0");
            close(p.ph, brute_single(&t, 0), "PH");
            close(p.pv, brute_single(&t, 1), "PV");
            close(p.phv, brute_exact(&t, &[0, 1]), "PHV");
            let s = brute_single(&t, 0) + brute_single(&t, 1);
            close(p.p_h, brute_single(&t, 0) / s, "p_h");
        }
    }
}

#[test]
fn dual_mode_visibility_from_extremes() {
    // visibility of the single-click conditional between theta = 0 and 90
    let (alpha, gamma) = (0.707, 1.0);
    let hi = dual_mode_probs(alpha, 0.0, th(gamma)).unwrap().p_h;
    let lo = dual_mode_probs(alpha, 90.0, th(gamma)).unwrap();
    close((hi - lo.p_h) / (hi + lo.p_h), lo.visibility, "visibility");
}

#[test]
fn beamsplitter_matches_table() {
    for &(alpha, gamma) in &[(0.3, 1.6), (1.0, 1.0), (2.5, 0.7), (0.05, 2.0)] {
        let p = beamsplitter_coincidence(alpha, th(gamma)).unwrap();
        let t = table(&beamsplitter_state(alpha).unwrap(), gamma);
        close(p.p0, brute_none(&t), "P0");
        close(p.pr, brute_single(&t, 0), "PR");
        close(p.pd, brute_single(&t, 1), "PD");
        close(p.prd, brute_exact(&t, &[0, 1]), "PRD");
        let r = brute_exact(&t, &[0, 1]) / (brute_single(&t, 0) * brute_single(&t, 1));
        assert!((p.r - r).abs() <= EXACT * r.max(1.0), "R {} vs {r}", p.r);
    }
}

#[test]
fn hyperentangled_matches_table() {
    for &(alpha, gamma) in &[(1.0, 1.2), (0.0, 1.0), (1.0, 3.0), (2.0, 0.8)] {
        let p = hyperentangled_probs(alpha, th(gamma)).unwrap();
        let t = table(&hyperentangled_state(alpha).unwrap(), gamma);
        close(p.pr_rh, brute_single(&t, 0), "RH");
        close(p.pr_rv, brute_single(&t, 1), "RV");
        close(p.pr_rv, brute_single(&t, 2), "DH");
        close(p.pr_rh, brute_single(&t, 3), "DV");
        let s: f64 = (0..4).map(|m| brute_single(&t, m)).sum();
        close(p.conditional_rh, brute_single(&t, 0) / s, "conditional");
    }
}

#[test]
fn mach_zehnder_matches_table() {
    let (alpha, gamma) = (0.95, 1.6);
    for &phi in &[0.0, 0.4, 1.3, std::f64::consts::FRAC_PI_2, 2.9, 4.0, 5.5] {
        let p = mach_zehnder_point(alpha, th(gamma), phi).unwrap();
        let t = table(&mach_zehnder_state(alpha, phi).unwrap(), gamma);
        let (rh, dh) = (brute_single(&t, 0), brute_single(&t, 2));
        close(p.p_mz, rh / (rh + dh), "p_mz");
        let quiet: f64 = t
            .iter()
            .filter(|(o, _)| !o.bits()[0] && !o.bits()[2])
            .map(|(_, q)| q)
            .sum();
        close(p.total_mz, 1.0 - quiet, "P_MZ");

        let t = table(&delayed_choice_state(alpha, phi).unwrap(), gamma);
        let (rh, dh) = (brute_single(&t, 0), brute_single(&t, 2));
        close(p.p_dc, rh / (rh + dh), "p_dc");

        let t = table(&which_way_state(alpha, phi).unwrap(), gamma);
        let s: f64 = (0..4).map(|m| brute_single(&t, m)).sum();
        for m in 0..4 {
            close(p.which_way[m], brute_single(&t, m) / s, "which-way");
        }
    }
}

#[test]
fn mach_zehnder_totals_agree_in_weak_limit() {
    let p = mach_zehnder_point(1e-3, th(1.0), 0.7).unwrap();
    assert!((p.total_mz / p.total_dc - 1.0).abs() <= 1e-4);
}

#[test]
fn conditional_probs_match_table() {
    let state = mach_zehnder_state(1.1, 0.9).unwrap();
    let p = conditional_mode_probs(&state, th(1.0)).unwrap();
    let t = table(&state, 1.0);
    let s: f64 = (0..4).map(|m| brute_single(&t, m)).sum();
    for m in 0..4 {
        close(p[m], brute_single(&t, m) / s, "conditional");
    }
}

#[test]
fn scenario_monte_carlo_within_five_sigma() {
    let rng = RngStream::new(7, 11);
    let cases = [
        (dual_mode_state(0.707, 30.0).unwrap(), 1.0),
        (beamsplitter_state(0.3).unwrap(), 1.6),
        (beamsplitter_state(1.5).unwrap(), 1.0),
        (hyperentangled_state(1.0).unwrap(), 1.2),
        (mach_zehnder_state(0.95, 1.1).unwrap(), 1.6),
        (delayed_choice_state(0.95, 1.1).unwrap(), 1.6),
        (which_way_state(0.95, 1.1).unwrap(), 1.6),
    ];
    for (i, (state, gamma)) in cases.iter().enumerate() {
        let tally = simulate_clicks(state, th(*gamma), MC_TRIALS, &rng.child(i as u64));
        assert_tally_matches(&tally, &table(state, *gamma), 5.0);
    }
}

#[test]
fn scan_counts_track_analytic_columns() {
    let mc = MonteCarlo::new(MC_TRIALS, 42).unwrap();
    let thetas = [0.0, 30.0, 60.0, 90.0];
    let r = born_again_scan(0.707, th(1.0), &thetas, Some(&mc)).unwrap();
    let ph = r.curve("PH").unwrap();
    for (c, p) in r.count("single_h").unwrap().iter().zip(ph) {
        assert!(within_sigma(*c, MC_TRIALS, *p, 5.0), "{c} vs {p}");
    }

    let alphas = [0.3, 1.0, 2.0];
    let r = antibunching_scan(&alphas, th(1.6), Some(&mc)).unwrap();
    for (c, p) in r.count("both").unwrap().iter().zip(r.curve("PRD").unwrap()) {
        assert!(within_sigma(*c, MC_TRIALS, *p, 5.0), "{c} vs {p}");
    }

    let phis = [0.0, 1.0, 2.0, 3.0];
    let r = mach_zehnder(0.95, th(1.6), &phis, Some(&mc)).unwrap();
    for (k, phi) in phis.iter().enumerate() {
        let t = table(&mach_zehnder_state(0.95, *phi).unwrap(), 1.6);
        let c = r.count("single_rh").unwrap()[k];
        assert!(within_sigma(c, MC_TRIALS, brute_single(&t, 0), 5.0));
    }

    let r = polarization_scan(0.707, th(1.0), &thetas, MC_TRIALS, Some(&mc.rng)).unwrap();
    for (c, a) in r
        .count("counts")
        .unwrap()
        .iter()
        .zip(r.curve("analytic").unwrap())
    {
        assert!(within_sigma(*c, MC_TRIALS, a / MC_TRIALS as f64, 5.0));
    }
}

#[test]
fn scan_columns_are_stable() {
    let r = polarization_scan(
        0.707,
        th(1.0),
        &default_theta_grid(),
        10_000,
        Some(&RngStream::new(42, 0)),
    )
    .unwrap();
    assert_eq!(r.columns(), ["theta", "analytic", "expansion", "counts"]);
    assert_eq!(r.grid.len(), 181);
    let r = mach_zehnder(0.95, th(1.6), &default_phi_grid(), None).unwrap();
    assert_eq!(
        r.columns(),
        ["phi", "p_mz", "p_dc", "P_MZ", "P_DC", "born", "ww_rh", "ww_rv", "ww_dh", "ww_dv"]
    );
}

#[test]
fn scans_are_reproducible_as_bytes() {
    let mc = MonteCarlo::new(20_000, 42).unwrap();
    let render = || {
        let mut buf = Vec::new();
        born_again_scan(0.707, th(1.0), &default_theta_grid(), Some(&mc))
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        buf
    };
    let first = render();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    assert_eq!(first, pool.install(render));
}

#[test]
fn polarization_endpoints() {
    let r = polarization_scan(0.707, th(1.0), &default_theta_grid(), 10_000, None).unwrap();
    let a = r.curve("analytic").unwrap();
    let min = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = a.iter().cloned().fold(0.0, f64::max);
    assert!((min - 1353.35).abs() < 0.1, "{min}");
    assert!((max - 3942.0).abs() < 2.0, "{max}");
    assert!((min / 1e4 - detect_prob(0.0, th(1.0)).unwrap()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn mach_zehnder_complement(phi in 0.0f64..std::f64::consts::PI, alpha in 0.05f64..3.0, gamma in 0.3f64..3.0) {
        let a = mach_zehnder_point(alpha, th(gamma), phi).unwrap().p_mz;
        let b = mach_zehnder_point(alpha, th(gamma), phi + std::f64::consts::PI).unwrap().p_mz;
        prop_assert!((a + b - 1.0).abs() <= EXACT);
    }

    #[test]
    fn beamsplitter_ratio_at_least_one(alpha in 0.01f64..4.0, gamma in 0.1f64..3.0) {
        let p = beamsplitter_coincidence(alpha, th(gamma)).unwrap();
        prop_assert!(p.r >= 1.0 - EXACT);
    }

    #[test]
    fn conditional_probs_normalized(a in 0.0f64..4.0, x in -1.0f64..1.0, y in -1.0f64..1.0, gamma in 0.3f64..3.0) {
        let state = bornsim::CoherentVector::normalized(
            bornsim::Complex64::new(a, 0.0),
            vec![bornsim::Complex64::new(1.0, 0.0), bornsim::Complex64::new(x, y), bornsim::Complex64::new(y, 0.5)],
        ).unwrap();
        let p = conditional_mode_probs(&state, th(gamma)).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= EXACT);
        prop_assert!(p.iter().all(|v| *v >= 0.0));
    }
}
