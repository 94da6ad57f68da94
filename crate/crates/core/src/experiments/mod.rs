//! Reproducible scenarios built on the detection layer. Each returns exact
//! probabilities and, when asked, Monte Carlo counts from the same states.
//!
//! Angles: polarization angles `theta` are in degrees, interferometer phases
//! `phi` in radians.

mod antibunching;
mod conditional;
mod dual_mode;
mod hyper;
mod mach_zehnder;
mod polarization;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{simulate_clicks, ClickTally, Threshold};
use crate::error::{BornError, Result};
use crate::field::CoherentVector;
use crate::rng::RngStream;

pub use antibunching::{
    antibunching_scan, beamsplitter_coincidence, beamsplitter_state, BeamSplitterProbs,
};
pub use conditional::conditional_mode_probs;
pub use dual_mode::{born_again_scan, dual_mode_probs, dual_mode_state, DualModeProbs};
pub use hyper::{hyper_scan, hyperentangled_probs, hyperentangled_state, HyperProbs};
pub use mach_zehnder::{
    delayed_choice_state, fitted_sample_analysis, mach_zehnder, mach_zehnder_point,
    mach_zehnder_state, which_way_state, CosineFit, MachZehnderPoint, MzAnalysis, MZ_NOISE_STREAM,
    MZ_SAMPLE_PHOTONS,
};
pub use polarization::{deviation_scan, polarization_scan, renormalize_counts, visibility_curves};

/// Default number of grid points for angle and phase sweeps.
pub const DEFAULT_GRID_POINTS: usize = 181;

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Polarization angles 0..=180 degrees.
pub fn default_theta_grid() -> Vec<f64> {
    linspace(0.0, 180.0, DEFAULT_GRID_POINTS)
}

/// Phases 0..=2 pi.
pub fn default_phi_grid() -> Vec<f64> {
    linspace(0.0, 2.0 * std::f64::consts::PI, DEFAULT_GRID_POINTS)
}

/// Monte Carlo settings for a scan. Grid point `i` draws from `rng.child(i)`.
#[derive(Debug, Clone)]
pub struct MonteCarlo {
    pub trials: u64,
    pub rng: RngStream,
}

impl MonteCarlo {
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(BornError::Domain(
                "Monte Carlo needs at least one trial".into(),
            ));
        }
        Ok(Self {
            trials,
            rng: RngStream::new(seed, 0),
        })
    }

    /// One tally per state, in parallel over grid points.
    pub fn tally(&self, states: &[CoherentVector], th: Threshold) -> Vec<ClickTally> {
        states
            .par_iter()
            .enumerate()
            .map(|(i, s)| simulate_clicks(s, th, self.trials, &self.rng.child(i as u64)))
            .collect()
    }
}

/// A named column of values over the scan grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    pub values: Vec<f64>,
}

/// A named column of Monte Carlo counts over the scan grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub name: String,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMeta {
    pub scenario: String,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
}

/// Curves and counts over one swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub grid_name: String,
    pub grid: Vec<f64>,
    pub analytic: Vec<Curve>,
    pub counts: Option<Vec<Counts>>,
    pub meta: ScenarioMeta,
}

impl ScenarioResult {
    pub fn new(grid_name: &str, grid: Vec<f64>, meta: ScenarioMeta) -> Self {
        Self {
            grid_name: grid_name.to_string(),
            grid,
            analytic: Vec::new(),
            counts: None,
            meta,
        }
    }

    pub fn push_curve(&mut self, name: &str, values: Vec<f64>) {
        assert_eq!(values.len(), self.grid.len(), "curve {name} length");
        self.analytic.push(Curve {
            name: name.to_string(),
            values,
        });
    }

    pub fn push_counts(&mut self, name: &str, values: Vec<u64>) {
        assert_eq!(values.len(), self.grid.len(), "counts {name} length");
        self.counts.get_or_insert_with(Vec::new).push(Counts {
            name: name.to_string(),
            values,
        });
    }

    pub fn curve(&self, name: &str) -> Option<&[f64]> {
        self.analytic
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn count(&self, name: &str) -> Option<&[u64]> {
        self.counts
            .as_ref()?
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec![self.grid_name.clone()];
        cols.extend(self.analytic.iter().map(|c| c.name.clone()));
        if let Some(counts) = &self.counts {
            cols.extend(counts.iter().map(|c| c.name.clone()));
        }
        cols
    }

    /// One row per grid point; floats use the shortest round-trip form.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns())?;
        for i in 0..self.grid.len() {
            let mut row = vec![self.grid[i].to_string()];
            row.extend(self.analytic.iter().map(|c| c.values[i].to_string()));
            if let Some(counts) = &self.counts {
                row.extend(counts.iter().map(|c| c.values[i].to_string()));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }
}
