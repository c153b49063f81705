//! Run configuration: command defaults, an optional TOML file, then flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use dqpt_core::ed::BoundaryCondition;
use dqpt_core::otoc::{Aggregation, TimeAxis, DEFAULT_DW_THRESHOLD, DEFAULT_N_PHI};
use dqpt_core::tfim::{GridMode, SignConvention, DEFAULT_N_MAX, DEFAULT_PULSE_STEPS};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Which chain quantities the oracle comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    /// Even-parity initial state, half-time evolution, bond rotation.
    Sector,
    /// `|+⟩^N`, full-time evolution, global `S_x` rotation.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    RateFunction,
    Heatmap,
    Otoc,
    Spectra,
    OracleCompare,
    PulseSchedule,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RateFunction => "rate-function",
            Command::Heatmap => "heatmap",
            Command::Otoc => "otoc",
            Command::Spectra => "spectra",
            Command::OracleCompare => "oracle-compare",
            Command::PulseSchedule => "pulse-schedule",
        }
    }

    fn default_g_f(&self) -> Vec<f64> {
        match self {
            Command::RateFunction => vec![0.5, 0.8, 1.2],
            Command::Heatmap => vec![0.8, 1.2],
            Command::Otoc | Command::Spectra | Command::OracleCompare => vec![0.6, 0.8, 1.2, 1.5],
            Command::PulseSchedule => vec![1.2],
        }
    }

    fn default_t_points(&self) -> usize {
        match self {
            Command::RateFunction => 2000,
            Command::OracleCompare => 100,
            _ => 101,
        }
    }
}

fn parse_grid(s: &str) -> Result<GridMode, String> {
    match s {
        "paper" => Ok(GridMode::Paper),
        "abc" => Ok(GridMode::Abc),
        _ => Err(format!("unknown grid '{s}' (expected paper or abc)")),
    }
}

fn parse_sign(s: &str) -> Result<SignConvention, String> {
    match s {
        "ferro_ground" | "ferro-ground" => Ok(SignConvention::FerroGround),
        "bare" => Ok(SignConvention::Bare),
        _ => Err(format!("unknown sign convention '{s}' (expected ferro-ground or bare)")),
    }
}

fn parse_aggregation(s: &str) -> Result<Aggregation, String> {
    match s {
        "mean" => Ok(Aggregation::Mean),
        "product" => Ok(Aggregation::Product),
        _ => Err(format!("unknown aggregation '{s}' (expected mean or product)")),
    }
}

fn parse_time_axis(s: &str) -> Result<TimeAxis, String> {
    match s {
        "physical" => Ok(TimeAxis::Physical),
        "normalized" => Ok(TimeAxis::Normalized),
        _ => Err(format!("unknown time axis '{s}' (expected physical or normalized)")),
    }
}

fn parse_bc(s: &str) -> Result<BoundaryCondition, String> {
    match s {
        "periodic" => Ok(BoundaryCondition::Periodic),
        "open" => Ok(BoundaryCondition::Open),
        _ => Err(format!("unknown boundary condition '{s}' (expected periodic or open)")),
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config file,
/// then to the command's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML file with [quench], [heatmap], [echo], [oracle], [pulse], [output] and [run] sections
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Post-quench fields, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub gf: Option<Vec<f64>>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gi: Option<f64>,
    /// Number of lattice sites of the momentum grid
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// paper | abc
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<GridMode>,
    /// ferro-ground | bare
    #[arg(long, global = true, value_parser = parse_sign)]
    pub sign: Option<SignConvention>,
    /// mean | product
    #[arg(long, global = true, value_parser = parse_aggregation)]
    pub aggregation: Option<Aggregation>,
    /// physical | normalized
    #[arg(long, global = true, value_parser = parse_time_axis)]
    pub time_axis: Option<TimeAxis>,
    #[arg(long, global = true)]
    pub nphi: Option<usize>,
    /// Highest coherence order written to spectra.csv
    #[arg(long, global = true)]
    pub m_max: Option<usize>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub t_points: Option<usize>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub dw_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub pulse_constant: Option<f64>,
    /// Pulse durations per momentum
    #[arg(long, global = true)]
    pub nt: Option<usize>,
    /// Chain length of the exact oracle
    #[arg(long, global = true)]
    pub n_oracle: Option<usize>,
    /// periodic | open
    #[arg(long, global = true, value_parser = parse_bc)]
    pub bc: Option<BoundaryCondition>,
    #[arg(long, global = true, value_enum)]
    pub mapping: Option<Mapping>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    quench: QuenchFile,
    heatmap: HeatmapFile,
    echo: EchoFile,
    oracle: OracleFile,
    pulse: PulseFile,
    output: OutputFile,
    run: RunFile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct QuenchFile {
    g_i: Option<f64>,
    g_f: Option<Vec<f64>>,
    n: Option<usize>,
    grid: Option<GridMode>,
    sign: Option<SignConvention>,
    t_max: Option<f64>,
    t_points: Option<usize>,
    n_max: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HeatmapFile {
    tau_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EchoFile {
    n_phi: Option<usize>,
    aggregation: Option<Aggregation>,
    time_axis: Option<TimeAxis>,
    m_max: Option<usize>,
    dw_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OracleFile {
    n: Option<usize>,
    bc: Option<BoundaryCondition>,
    tolerance: Option<f64>,
    mapping: Option<Mapping>,
    echo_t_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PulseFile {
    constant: Option<f64>,
    n_t: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OutputFile {
    dir: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunFile {
    threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuenchConfig {
    pub g_i: f64,
    pub g_f: Vec<f64>,
    pub n: usize,
    pub grid: GridMode,
    pub sign: SignConvention,
    pub t_max: f64,
    pub t_points: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapConfig {
    pub tau_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoSettings {
    pub n_phi: usize,
    pub aggregation: Aggregation,
    pub time_axis: TimeAxis,
    pub m_max: usize,
    pub dw_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleConfig {
    pub n: usize,
    pub bc: BoundaryCondition,
    pub tolerance: f64,
    pub mapping: Mapping,
    pub echo_t_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseConfig {
    pub constant: f64,
    pub n_t: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

/// Fully resolved settings; echoed verbatim into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub quench: QuenchConfig,
    pub heatmap: HeatmapConfig,
    pub echo: EchoSettings,
    pub oracle: OracleConfig,
    pub pulse: PulseConfig,
    pub output: OutputConfig,
    #[serde(skip)]
    pub threads: Option<usize>,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: Command, o: &Overrides) -> Result<Self, CliError> {
        let f = match &o.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let default_grid = if command == Command::OracleCompare { GridMode::Abc } else { GridMode::Paper };
        let default_nphi = if command == Command::OracleCompare { 16 } else { DEFAULT_N_PHI };
        let config = RunConfig {
            command,
            quench: QuenchConfig {
                g_i: o.gi.or(f.quench.g_i).unwrap_or(0.0),
                g_f: o.gf.clone().or(f.quench.g_f).unwrap_or_else(|| command.default_g_f()),
                n: o.n.or(f.quench.n).unwrap_or(30),
                grid: o.grid.or(f.quench.grid).unwrap_or(default_grid),
                sign: o.sign.or(f.quench.sign).unwrap_or_default(),
                t_max: o.t_max.or(f.quench.t_max).unwrap_or(5.0),
                t_points: o.t_points.or(f.quench.t_points).unwrap_or(command.default_t_points()),
                n_max: f.quench.n_max.unwrap_or(DEFAULT_N_MAX),
            },
            heatmap: HeatmapConfig { tau_points: f.heatmap.tau_points.unwrap_or(201) },
            echo: EchoSettings {
                n_phi: o.nphi.or(f.echo.n_phi).unwrap_or(default_nphi),
                aggregation: o.aggregation.or(f.echo.aggregation).unwrap_or_default(),
                time_axis: o.time_axis.or(f.echo.time_axis).unwrap_or_default(),
                m_max: o.m_max.or(f.echo.m_max).unwrap_or(4),
                dw_threshold: o.dw_threshold.or(f.echo.dw_threshold).unwrap_or(DEFAULT_DW_THRESHOLD),
            },
            oracle: OracleConfig {
                n: o.n_oracle.or(f.oracle.n).unwrap_or(8),
                bc: o.bc.or(f.oracle.bc).unwrap_or_default(),
                tolerance: o.tolerance.or(f.oracle.tolerance).unwrap_or(1e-6),
                mapping: o.mapping.or(f.oracle.mapping).unwrap_or(Mapping::Sector),
                echo_t_points: f.oracle.echo_t_points.unwrap_or(20),
            },
            pulse: PulseConfig {
                constant: o.pulse_constant.or(f.pulse.constant).unwrap_or(1.0),
                n_t: o.nt.or(f.pulse.n_t).unwrap_or(DEFAULT_PULSE_STEPS),
            },
            output: OutputConfig {
                dir: o.out.clone().or(f.output.dir).unwrap_or_else(|| PathBuf::from("out")),
                format: o.format.or(f.output.format).unwrap_or(Format::Csv),
            },
            threads: o.threads.or(f.run.threads),
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks every field the selected command uses.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::Config(format!("{field}: {msg}")));
        let q = &self.quench;
        if q.n < 2 {
            return bad("n (quench.n)", format!("must be at least 2, got {}", q.n));
        }
        if !q.g_i.is_finite() {
            return bad("gi (quench.g_i)", format!("must be finite, got {}", q.g_i));
        }
        if q.g_f.is_empty() {
            return bad("gf (quench.g_f)", "needs at least one value".into());
        }
        if let Some(g) = q.g_f.iter().find(|g| !g.is_finite()) {
            return bad("gf (quench.g_f)", format!("must be finite, got {g}"));
        }
        if !(q.t_max > 0.0 && q.t_max.is_finite()) {
            return bad("t-max (quench.t_max)", format!("must be positive, got {}", q.t_max));
        }
        if q.t_points < 2 {
            return bad("t-points (quench.t_points)", format!("must be at least 2, got {}", q.t_points));
        }
        if let Some(0) = self.threads {
            return bad("threads (run.threads)", "must be positive".into());
        }
        match self.command {
            Command::RateFunction => {}
            Command::Heatmap => {
                if self.heatmap.tau_points < 2 {
                    return bad("heatmap.tau_points", format!("must be at least 2, got {}", self.heatmap.tau_points));
                }
            }
            Command::Otoc | Command::Spectra => {
                let e = &self.echo;
                if e.n_phi < 2 * e.m_max + 1 {
                    return bad(
                        "nphi (echo.n_phi)",
                        format!("{} samples cannot resolve m_max = {} (need {})", e.n_phi, e.m_max, 2 * e.m_max + 1),
                    );
                }
                if !(e.dw_threshold >= 0.0 && e.dw_threshold.is_finite()) {
                    return bad("dw-threshold (echo.dw_threshold)", format!("must be non-negative, got {}", e.dw_threshold));
                }
                if self.command == Command::Otoc && e.n_phi < 3 {
                    return bad("nphi (echo.n_phi)", format!("A_1 needs at least 3 samples, got {}", e.n_phi));
                }
            }
            Command::OracleCompare => {
                let o = &self.oracle;
                if o.n < 2 || o.n > dqpt_core::ed::MAX_SPINS {
                    return bad("n-oracle (oracle.n)", format!("must lie in 2..={}, got {}", dqpt_core::ed::MAX_SPINS, o.n));
                }
                if q.g_i != 0.0 {
                    return bad("gi (quench.g_i)", format!("the exact oracle needs g_i = 0, got {}", q.g_i));
                }
                if !(o.tolerance > 0.0) {
                    return bad("tolerance (oracle.tolerance)", format!("must be positive, got {}", o.tolerance));
                }
                if o.echo_t_points < 1 {
                    return bad("oracle.echo_t_points", "must be positive".into());
                }
                if self.echo.n_phi < 1 {
                    return bad("nphi (echo.n_phi)", "must be positive".into());
                }
            }
            Command::PulseSchedule => {
                if !(self.pulse.constant > 0.0 && self.pulse.constant.is_finite()) {
                    return bad("pulse-constant (pulse.constant)", format!("must be positive, got {}", self.pulse.constant));
                }
                if self.pulse.n_t < 2 {
                    return bad("nt (pulse.n_t)", format!("must be at least 2, got {}", self.pulse.n_t));
                }
            }
        }
        Ok(())
    }
}
