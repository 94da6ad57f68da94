//! Writing data files, the run manifest and gnuplot scripts.

use std::fs;
use std::path::{Path, PathBuf};

use bornsim::experiments::ScenarioResult;
use serde::Serialize;

use crate::config::RunConfig;

/// What a command produced.
pub struct Output {
    pub csv: Vec<u8>,
    pub json: serde_json::Value,
    pub plot: Plot,
}

/// How the CSV should be drawn.
pub enum Plot {
    Lines {
        x: String,
        ys: Vec<String>,
        ylabel: String,
    },
    Surface {
        nx: usize,
        ny: usize,
        z: String,
    },
    Bars {
        y: String,
    },
}

impl Plot {
    /// Every column of `r` against its grid.
    pub fn lines(r: &ScenarioResult, ylabel: &str) -> Self {
        Self::lines_of(r, ylabel, |_| true)
    }

    pub fn lines_of(r: &ScenarioResult, ylabel: &str, keep: impl Fn(&str) -> bool) -> Self {
        Plot::Lines {
            x: r.grid_name.clone(),
            ys: r
                .columns()
                .into_iter()
                .skip(1)
                .filter(|c| keep(c))
                .collect(),
            ylabel: ylabel.into(),
        }
    }

    /// `z` over the `alpha` x `gamma` grid.
    pub fn surface(nx: usize, ny: usize, z: &str) -> Self {
        Plot::Surface {
            nx,
            ny,
            z: z.into(),
        }
    }

    pub fn bars(y: &str) -> Self {
        Plot::Bars { y: y.into() }
    }

    fn script(&self, data: &str, title: &str) -> String {
        let mut s = format!(
            "# gnuplot -persist {title}.gp\nset datafile separator \",\"\nset title \"{title}\"\nset key outside\n"
        );
        match self {
            Plot::Lines { x, ys, ylabel } => {
                s += &format!("set xlabel \"{x}\"\nset ylabel \"{ylabel}\"\n");
                let series: Vec<String> = ys
                    .iter()
                    .map(|y| {
                        let style = if is_count(y) { "points pt 6" } else { "lines" };
                        format!("\"{data}\" using \"{x}\":\"{y}\" with {style} title \"{y}\"")
                    })
                    .collect();
                s += &format!("plot {}\n", series.join(", \\\n     "));
            }
            Plot::Surface { nx, ny, z } => {
                s += &format!(
                    "set xlabel \"alpha\"\nset ylabel \"gamma\"\nset dgrid3d {ny},{nx}\nset pm3d map\n\
                     splot \"{data}\" using \"alpha\":\"gamma\":\"{z}\" with pm3d title \"{z}\"\n"
                );
            }
            Plot::Bars { y } => {
                s += &format!(
                    "set style fill solid 0.5\nset xtics rotate\nset ylabel \"{y}\"\n\
                     plot \"{data}\" using 0:\"{y}\":xticlabels(1) with boxes title \"{y}\"\n"
                );
            }
        }
        s
    }
}

fn is_count(column: &str) -> bool {
    column == "counts"
        || column == "sample"
        || column.starts_with("single_")
        || column == "none"
        || column == "both"
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    command: String,
    config: &'a RunConfig,
    threads: usize,
    wall_clock_seconds: f64,
    outputs: Vec<PathBuf>,
}

/// Writes `<command>-<seed>.csv`/`.json` as configured, a gnuplot script next
/// to the CSV, and `<command>-<seed>.manifest.json`. Returns the paths
/// written, manifest last.
pub fn write_all(
    cfg: &RunConfig,
    out: &Output,
    wall_clock_seconds: f64,
) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out_dir)?;
    let stem = format!("{}-{}", cfg.command.name(), cfg.seed);
    let path = |ext: &str| cfg.out_dir.join(format!("{stem}.{ext}"));
    let mut written = Vec::new();
    if cfg.format.csv() {
        fs::write(path("csv"), &out.csv)?;
        written.push(path("csv"));
        fs::write(path("gp"), out.plot.script(&format!("{stem}.csv"), &stem))?;
        written.push(path("gp"));
    }
    if cfg.format.json() {
        let text = serde_json::to_string_pretty(&out.json).map_err(std::io::Error::other)?;
        fs::write(path("json"), text + "\n")?;
        written.push(path("json"));
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.name(),
        config: cfg,
        threads: rayon::current_num_threads(),
        wall_clock_seconds,
        outputs: written.iter().map(|p| file_name(p)).collect(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    fs::write(path("manifest.json"), text + "\n")?;
    written.push(path("manifest.json"));
    Ok(written)
}

fn file_name(p: &Path) -> PathBuf {
    p.file_name()
        .map(PathBuf::from)
        .unwrap_or_else(|| p.to_path_buf())
}
