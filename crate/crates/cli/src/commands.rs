//! One function per command, each producing CSV bytes, a JSON document and
//! a plot description.

use std::fs;

use bornsim::experiments::*;
use bornsim::tomography::*;
use bornsim::{
    apply, outcome_distribution, simulate_clicks, CircuitSpec, CoherentVector, Complex64,
    RngStream, Threshold,
};
use serde_json::json;

use crate::config::{Command, RunConfig};
use crate::output::{Output, Plot};

/// Why a command did not produce output.
#[derive(Debug)]
pub enum Failure {
    /// The configuration does not fit the command; exit status 2.
    Usage(String),
    /// The computation itself failed; exit status 1.
    Scenario(String),
}

impl From<bornsim::BornError> for Failure {
    fn from(e: bornsim::BornError) -> Self {
        Failure::Scenario(e.to_string())
    }
}

type Outcome = Result<Output, Failure>;

fn usage<T>(r: Result<T, String>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn thresholds(gammas: &[f64]) -> Result<Vec<Threshold>, Failure> {
    gammas
        .iter()
        .map(|&g| Threshold::new(g).map_err(|e| Failure::Usage(e.to_string())))
        .collect()
}

fn threshold(cfg: &RunConfig) -> Result<Threshold, Failure> {
    Ok(thresholds(&[usage(cfg.gamma_value())?])?[0])
}

fn monte_carlo(cfg: &RunConfig) -> Result<Option<MonteCarlo>, Failure> {
    cfg.n
        .map(|n| MonteCarlo::new(n, cfg.seed))
        .transpose()
        .map_err(Failure::from)
}

fn csv_of(result: &ScenarioResult) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    result.write_csv(&mut buf)?;
    Ok(buf)
}

fn json_of<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("results serialize")
}

fn scenario_output(result: ScenarioResult, ylabel: &str) -> Outcome {
    let plot = Plot::lines(&result, ylabel);
    Ok(Output {
        csv: csv_of(&result)?,
        json: json_of(&result),
        plot,
    })
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.command {
        Command::Counts => counts(cfg),
        Command::Deviation => deviation(cfg),
        Command::Visibility => visibility(cfg),
        Command::BornAgain => born_again(cfg),
        Command::Antibunch => antibunch(cfg),
        Command::Hyper => hyper(cfg),
        Command::Mz => mz(cfg),
        Command::Fidelity => fidelity(cfg, Method::Linear),
        Command::FidelityMle => fidelity(cfg, Method::Mle),
        Command::Witness => witness(cfg),
        Command::FidelityContour => fidelity_contour(cfg),
        Command::VisibilityContour => visibility_contour(cfg),
        Command::Circuit => circuit(cfg),
    }
}

fn alpha0(cfg: &RunConfig) -> Result<f64, Failure> {
    cfg.alpha0
        .ok_or_else(|| Failure::Usage(format!("`{}` needs --alpha0", cfg.command.name())))
}

fn counts(cfg: &RunConfig) -> Outcome {
    let n = cfg.n.expect("defaulted");
    let rng = RngStream::new(cfg.seed, 0);
    let r = polarization_scan(
        alpha0(cfg)?,
        threshold(cfg)?,
        &default_theta_grid(),
        n,
        Some(&rng),
    )?;
    scenario_output(r, "counts")
}

fn deviation(cfg: &RunConfig) -> Outcome {
    let r = deviation_scan(
        alpha0(cfg)?,
        &thresholds(cfg.gammas())?,
        &default_theta_grid(),
    )?;
    scenario_output(r, "probability")
}

fn visibility(cfg: &RunConfig) -> Outcome {
    let r = visibility_curves(cfg.alphas(), &thresholds(cfg.gammas())?)?;
    scenario_output(r, "visibility")
}

fn born_again(cfg: &RunConfig) -> Outcome {
    let mc = monte_carlo(cfg)?;
    let r = born_again_scan(
        usage(cfg.alpha_value())?,
        threshold(cfg)?,
        &default_theta_grid(),
        mc.as_ref(),
    )?;
    scenario_output(r, "probability")
}

fn antibunch(cfg: &RunConfig) -> Outcome {
    let mc = monte_carlo(cfg)?;
    let r = antibunching_scan(cfg.alphas(), threshold(cfg)?, mc.as_ref())?;
    scenario_output(r, "ratio")
}

fn hyper(cfg: &RunConfig) -> Outcome {
    let mc = monte_carlo(cfg)?;
    let r = hyper_scan(
        usage(cfg.alpha_value())?,
        &thresholds(cfg.gammas())?,
        mc.as_ref(),
    )?;
    scenario_output(r, "probability")
}

fn mz(cfg: &RunConfig) -> Outcome {
    let alpha = usage(cfg.alpha_value())?;
    let th = threshold(cfg)?;
    let phis = default_phi_grid();
    let mc = monte_carlo(cfg)?;
    let mut r = mach_zehnder(alpha, th, &phis, mc.as_ref())?;
    let rng = RngStream::new(cfg.seed, MZ_NOISE_STREAM);
    let analysis = fitted_sample_analysis(alpha, th, &phis, MZ_SAMPLE_PHOTONS, &rng)?;
    r.push_curve("sample", analysis.samples.clone());
    r.push_curve("fit", phis.iter().map(|&p| analysis.fit.eval(p)).collect());
    let plot = Plot::lines(&r, "probability");
    Ok(Output {
        csv: csv_of(&r)?,
        json: json!({ "scenario": r, "analysis": analysis }),
        plot,
    })
}

fn ensemble_config(cfg: &RunConfig, method: Method, gammas: Vec<f64>) -> EnsembleConfig {
    EnsembleConfig {
        d: cfg.dim.expect("defaulted"),
        alphas: cfg.alphas().to_vec(),
        gammas,
        n_states: cfg.n_states.expect("defaulted"),
        method,
        seed: cfg.seed,
        mle: cfg.mle_options(),
    }
}

fn fidelity(cfg: &RunConfig, method: Method) -> Outcome {
    let gamma = usage(cfg.gamma_value())?;
    let table = ensemble_sweep(&ensemble_config(cfg, method, vec![gamma]))?;
    let mut r = ScenarioResult::new(
        "alpha",
        cfg.alphas().to_vec(),
        ScenarioMeta {
            scenario: cfg.command.name(),
            alpha: None,
            gamma: Some(gamma),
            n_trials: None,
            seed: Some(cfg.seed),
        },
    );
    r.push_curve(
        "mean_fidelity",
        table.points.iter().map(|p| p.mean_fidelity).collect(),
    );
    r.push_curve(
        "frac_invalid",
        table.points.iter().map(|p| p.frac_invalid).collect(),
    );
    let n = table.config.n_states;
    for k in 0..n {
        r.push_curve(
            &format!("fidelity_{k}"),
            table.points.iter().map(|p| p.states[k].fidelity).collect(),
        );
    }
    for k in 0..n {
        r.push_curve(
            &format!("min_eigenvalue_{k}"),
            table
                .points
                .iter()
                .map(|p| p.states[k].linear_min_eigenvalue)
                .collect(),
        );
    }
    let plot = Plot::lines_of(&r, "fidelity", |c| c.starts_with("fidelity_"));
    Ok(Output {
        csv: csv_of(&r)?,
        json: json_of(&table),
        plot,
    })
}

fn bell() -> Vec<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    vec![h, z, z, h]
}

fn witness(cfg: &RunConfig) -> Outcome {
    let th = threshold(cfg)?;
    let reports = alpha_sweep(&bell(), cfg.alphas(), th, Method::Mle, &cfg.mle_options())?;
    let mut r = ScenarioResult::new(
        "alpha",
        cfg.alphas().to_vec(),
        ScenarioMeta {
            scenario: "witness".into(),
            alpha: None,
            gamma: Some(th.gamma()),
            n_trials: None,
            seed: None,
        },
    );
    r.push_curve(
        "witness",
        reports
            .iter()
            .map(|p| p.ppt_min_eigenvalue.expect("two-qubit split"))
            .collect(),
    );
    r.push_curve("fidelity", reports.iter().map(|p| p.fidelity).collect());
    r.push_curve(
        "min_eigenvalue",
        reports.iter().map(|p| p.min_eigenvalue).collect(),
    );
    let plot = Plot::lines_of(&r, "minimum eigenvalue of the partial transpose", |c| {
        c == "witness"
    });
    Ok(Output {
        csv: csv_of(&r)?,
        json: json!({ "scenario": r, "reports": reports }),
        plot,
    })
}

fn fidelity_contour(cfg: &RunConfig) -> Outcome {
    let table = ensemble_sweep(&ensemble_config(cfg, Method::Mle, cfg.gammas().to_vec()))?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    let best = table.best().map(|p| json!({ "alpha": p.alpha, "gamma": p.gamma, "mean_fidelity": p.mean_fidelity, "visibility": p.mean_visibility }));
    Ok(Output {
        csv,
        json: json!({ "best": best, "table": table }),
        plot: Plot::surface(cfg.alphas().len(), cfg.gammas().len(), "mean_fidelity"),
    })
}

fn visibility_contour(cfg: &RunConfig) -> Outcome {
    let ths = thresholds(cfg.gammas())?;
    let mut rows = Vec::new();
    for th in &ths {
        for &a in cfg.alphas() {
            rows.push((a, th.gamma(), fig11_visibility(a, *th)?));
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Scenario(e.to_string());
    w.write_record(["alpha", "gamma", "visibility"])
        .map_err(io)?;
    for (a, g, v) in &rows {
        w.write_record([a.to_string(), g.to_string(), v.to_string()])
            .map_err(io)?;
    }
    let csv = w
        .into_inner()
        .map_err(|e| Failure::Scenario(e.to_string()))?;
    let points: Vec<_> = rows
        .iter()
        .map(|(a, g, v)| json!({ "alpha": a, "gamma": g, "visibility": v }))
        .collect();
    Ok(Output {
        csv,
        json: json!({ "points": points }),
        plot: Plot::surface(cfg.alphas().len(), ths.len(), "visibility"),
    })
}

fn circuit(cfg: &RunConfig) -> Outcome {
    let path = cfg.circuit.as_ref().expect("validated");
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let spec = CircuitSpec::from_json(&text)?;
    let alpha = usage(cfg.alpha_value())?;
    let th = threshold(cfg)?;
    let input = CoherentVector::basis(Complex64::new(alpha, 0.0), spec.modes, 0)?;
    let state = apply(&spec.unitary()?, &input)?;
    let dist = outcome_distribution(&state, th)?;
    let tally = cfg
        .n
        .map(|n| simulate_clicks(&state, th, n, &RngStream::new(cfg.seed, 0)));

    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Scenario(e.to_string());
    let mut header = vec!["outcome", "clicks", "probability"];
    if tally.is_some() {
        header.push("counts");
    }
    w.write_record(&header).map_err(io)?;
    for (o, p) in dist.iter() {
        let bits: String = o
            .bits()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        let mut row = vec![bits, o.clicks().to_string(), p.to_string()];
        if let Some(t) = &tally {
            let counts = t.outcome_counts.as_ref().expect("enumerable");
            row.push(counts[o.index()].to_string());
        }
        w.write_record(&row).map_err(io)?;
    }
    let csv = w
        .into_inner()
        .map_err(|e| Failure::Scenario(e.to_string()))?;
    let marginals: Vec<f64> = (0..spec.modes).map(|m| dist.marginal(m)).collect();
    Ok(Output {
        csv,
        json: json!({
            "circuit": spec,
            "alpha": alpha,
            "gamma": th.gamma(),
            "psi": state.psi().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "marginals": marginals,
            "conditional": conditional_mode_probs(&state, th).ok(),
            "outcomes": dist.probs(),
            "tally": tally,
        }),
        plot: Plot::bars("probability"),
    })
}
