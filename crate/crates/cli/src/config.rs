//! Run configuration: command-line flags layered over an optional JSON
//! config file, layered over per-command defaults.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bornsim::experiments::linspace;
use bornsim::tomography::MleOptions;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Polarizer counts against angle, with Monte Carlo.
    Counts,
    /// Normalized detection probability against the quantum prediction.
    Deviation,
    /// Single-mode visibility against threshold.
    Visibility,
    /// Post-selected polarization probability against the cos^2 law.
    BornAgain,
    /// Beam-splitter coincidence ratios R and R_d.
    Antibunch,
    /// Single-click probabilities of a spatial/polarization Bell state.
    Hyper,
    /// Mach-Zehnder fringe, delayed-choice and which-way variants, fitted samples.
    Mz,
    /// Linear-inversion fidelity of a Haar ensemble against amplitude.
    Fidelity,
    /// Maximum-likelihood fidelity of a Haar ensemble against amplitude.
    FidelityMle,
    /// Partial-transpose witness of a reconstructed Bell state.
    Witness,
    /// Mean maximum-likelihood fidelity over amplitude and threshold.
    FidelityContour,
    /// Visibility over amplitude and threshold.
    VisibilityContour,
    /// Outcome table of a JSON-described circuit.
    Circuit,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// A list of values written as `x`, `a,b,c` or `min:step:max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Values(pub Vec<f64>);

impl FromStr for Values {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        };
        if s.contains(':') {
            let parts = s.split(':').map(number).collect::<Result<Vec<_>, _>>()?;
            let [min, step, max] = parts[..] else {
                return Err(format!("grid `{s}` must be min:step:max"));
            };
            return grid(min, step, max).map(Values);
        }
        let vals = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        Ok(Values(vals))
    }
}

impl<'de> Deserialize<'de> for Values {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            One(f64),
            Many(Vec<f64>),
            Spec(String),
        }
        match Repr::deserialize(d)? {
            Repr::One(v) => Ok(Values(vec![v])),
            Repr::Many(v) => Ok(Values(v)),
            Repr::Spec(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl fmt::Display for Values {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Inclusive grid from `min` to `max` in steps of `step`; `max` must be
/// reached within a millionth of a step.
pub fn grid(min: f64, step: f64, max: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) {
        return Err(format!("grid step must be positive, got {step}"));
    }
    if min > max {
        return Err(format!("grid min {min} exceeds max {max}"));
    }
    let span = (max - min) / step;
    let n = span.round();
    if (span - n).abs() > 1e-6 {
        return Err(format!("grid {min}:{step}:{max} does not land on max"));
    }
    Ok(linspace(min, max, n as usize + 1))
}

/// Flags shared by every command. Unset flags fall back to the config file
/// and then to the command's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Amplitude |alpha|: a value, a list `a,b` or a grid `min:step:max`.
    #[arg(long, visible_alias = "alpha-grid", value_name = "VALUES")]
    pub alpha: Option<Values>,
    /// Peak amplitude of the polarizer scans.
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// Threshold gamma: a value, a list or a grid.
    #[arg(long, visible_alias = "gamma-grid", value_name = "VALUES")]
    pub gamma: Option<Values>,
    /// Monte Carlo trials per grid point.
    #[arg(long)]
    pub n: Option<u64>,
    /// Haar ensemble size.
    #[arg(long)]
    pub n_states: Option<usize>,
    /// Hilbert-space dimension of the ensemble.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Master seed; defaults to 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; defaults to the current one.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Data files to write; defaults to csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "BORNSIM_THREADS")]
    pub threads: Option<usize>,
    /// JSON config file, or a manifest from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSON circuit description for `circuit`.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Contour sweeps with 20 states instead of 100.
    #[arg(long)]
    pub fast: bool,
}

/// Settings as read from a config file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub alpha: Option<Values>,
    pub alpha0: Option<f64>,
    pub gamma: Option<Values>,
    pub n: Option<u64>,
    pub n_states: Option<usize>,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub circuit: Option<PathBuf>,
    pub fast: Option<bool>,
    pub mle: Option<MleOptions>,
}

impl FileConfig {
    /// Reads a config object, or the `config` member of a run manifest.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let inner = match value.get("config") {
            Some(c) if value.get("version").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(|e| e.to_string())
    }
}

/// Fully resolved settings; written to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: Option<Values>,
    pub alpha0: Option<f64>,
    pub gamma: Option<Values>,
    pub n: Option<u64>,
    pub n_states: Option<usize>,
    pub dim: Option<usize>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
    pub circuit: Option<PathBuf>,
    pub fast: bool,
    pub mle: Option<MleOptions>,
}

pub const DEFAULT_SEED: u64 = 42;

struct Defaults {
    alpha: Option<Vec<f64>>,
    alpha0: Option<f64>,
    gamma: Option<Vec<f64>>,
    n: Option<u64>,
    n_states: Option<usize>,
    dim: Option<usize>,
}

fn span(min: f64, step: f64, max: f64) -> Option<Vec<f64>> {
    Some(grid(min, step, max).expect("valid default grid"))
}

fn defaults(command: Command, fast: bool) -> Defaults {
    use Command::*;
    let none = Defaults {
        alpha: None,
        alpha0: None,
        gamma: None,
        n: None,
        n_states: None,
        dim: None,
    };
    match command {
        Counts => Defaults {
            alpha0: Some(0.707),
            gamma: Some(vec![1.0]),
            n: Some(10_000),
            ..none
        },
        Deviation => Defaults {
            alpha0: Some(1.0),
            gamma: Some(vec![1.0, 0.5]),
            ..none
        },
        Visibility => Defaults {
            alpha: Some(vec![0.5, 1.0, 1.5]),
            gamma: span(0.05, 0.05, 3.0),
            ..none
        },
        BornAgain => Defaults {
            alpha: Some(vec![0.5f64.sqrt()]),
            gamma: Some(vec![1.0]),
            ..none
        },
        Antibunch => Defaults {
            alpha: span(0.01, 0.01, 3.0),
            gamma: Some(vec![1.0]),
            ..none
        },
        Hyper => Defaults {
            alpha: Some(vec![1.0]),
            gamma: span(0.05, 0.05, 4.0),
            ..none
        },
        Mz => Defaults {
            alpha: Some(vec![0.95]),
            gamma: Some(vec![1.6]),
            ..none
        },
        Fidelity => Defaults {
            alpha: span(0.0, 0.1, 5.0),
            gamma: Some(vec![1.0]),
            n_states: Some(30),
            dim: Some(4),
            ..none
        },
        FidelityMle => Defaults {
            alpha: span(0.0, 0.1, 5.0),
            gamma: Some(vec![1.0]),
            n_states: Some(5),
            dim: Some(4),
            ..none
        },
        Witness => Defaults {
            alpha: span(0.0, 0.1, 3.0),
            gamma: Some(vec![1.0]),
            ..none
        },
        FidelityContour => Defaults {
            alpha: span(0.1, 0.1, 3.0),
            gamma: span(0.5, 0.1, 3.0),
            n_states: Some(if fast { 20 } else { 100 }),
            dim: Some(4),
            ..none
        },
        VisibilityContour => Defaults {
            alpha: span(0.1, 0.1, 3.0),
            gamma: span(0.5, 0.1, 3.0),
            ..none
        },
        Circuit => Defaults {
            alpha: Some(vec![1.0]),
            gamma: Some(vec![1.0]),
            ..none
        },
    }
}

impl RunConfig {
    /// Flags over file over defaults.
    pub fn resolve(command: Command, flags: Flags, file: FileConfig) -> Result<Self, String> {
        if let Some(c) = file.command {
            if c != command {
                return Err(format!(
                    "config is for `{}`, not `{}`",
                    c.name(),
                    command.name()
                ));
            }
        }
        let fast = flags.fast || file.fast.unwrap_or(false);
        let d = defaults(command, fast);
        let cfg = RunConfig {
            command,
            alpha: flags.alpha.or(file.alpha).or(d.alpha.map(Values)),
            alpha0: flags.alpha0.or(file.alpha0).or(d.alpha0),
            gamma: flags.gamma.or(file.gamma).or(d.gamma.map(Values)),
            n: flags.n.or(file.n).or(d.n),
            n_states: flags.n_states.or(file.n_states).or(d.n_states),
            dim: flags.dim.or(file.dim).or(d.dim),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out_dir: flags
                .out_dir
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            threads: flags.threads.or(file.threads),
            circuit: flags.circuit.or(file.circuit),
            fast,
            mle: file.mle,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        for (name, v) in [("alpha", &self.alpha), ("gamma", &self.gamma)] {
            if let Some(v) = v {
                if v.0.is_empty() {
                    return Err(format!("--{name} is empty"));
                }
                if v.0.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(format!("--{name} values must be finite and non-negative"));
                }
            }
        }
        if self.n == Some(0) {
            return Err("--n must be at least 1".into());
        }
        if self.n_states == Some(0) {
            return Err("--n-states must be at least 1".into());
        }
        if self.threads == Some(0) {
            return Err("--threads must be at least 1".into());
        }
        if self.command == Command::Circuit && self.circuit.is_none() {
            return Err("`circuit` needs --circuit FILE".into());
        }
        Ok(())
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha.as_ref().expect("resolved").0
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gamma.as_ref().expect("resolved").0
    }

    /// The single amplitude of a point command.
    pub fn alpha_value(&self) -> Result<f64, String> {
        single("alpha", self.alphas())
    }

    pub fn gamma_value(&self) -> Result<f64, String> {
        single("gamma", self.gammas())
    }

    pub fn mle_options(&self) -> MleOptions {
        self.mle.clone().unwrap_or_default()
    }
}

fn single(name: &str, v: &[f64]) -> Result<f64, String> {
    match v {
        [x] => Ok(*x),
        _ => Err(format!(
            "--{name} takes a single value here, got {}",
            v.len()
        )),
    }
}
