//! Subcommand bodies. Each returns its artifacts and a pass/fail verdict.

use dqpt_core::ed::mode_map::{rate_series_mode_map, ModeMapOracle};
use dqpt_core::ed::{self, EchoOracle, EchoSample, EdRate, Method};
use dqpt_core::otoc::{self, Aggregation, EchoConfig, Surface};
use dqpt_core::tfim::{self, LoschmidtTable, QuenchSpec};
use dqpt_core::Error;
use serde::Serialize;

use crate::config::{Command, Mapping, RunConfig};
use crate::output::Artifacts;
use crate::CliError;

/// Largest replay deviation accepted by `pulse-schedule`.
pub const REPLAY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail(String),
}

pub fn run(config: &RunConfig) -> Result<(Artifacts, Verdict), CliError> {
    match config.command {
        Command::RateFunction => rate_function(config),
        Command::Heatmap => heatmap(config),
        Command::Otoc => otoc(config, false),
        Command::Spectra => otoc(config, true),
        Command::OracleCompare => oracle_compare(config),
        Command::PulseSchedule => pulse_schedule(config),
    }
}

fn spec(config: &RunConfig, g_f: f64) -> Result<QuenchSpec, CliError> {
    let q = &config.quench;
    Ok(QuenchSpec::new(q.g_i, g_f, q.n, q.grid)?.with_sign(q.sign))
}

fn times(config: &RunConfig) -> Vec<f64> {
    tfim::linspace(0.0, config.quench.t_max, config.quench.t_points)
}

#[derive(Serialize)]
struct RateRow {
    g_f: f64,
    t: f64,
    rate: f64,
    floored: bool,
}

#[derive(Serialize)]
struct CriticalEntry {
    g_i: f64,
    g_f: f64,
    dqpt: bool,
    critical_momentum: Option<f64>,
    critical_times: Vec<f64>,
}

fn critical_entry(g_i: f64, g_f: f64, n_max: usize) -> Result<CriticalEntry, CliError> {
    let k = match tfim::critical_momentum(g_i, g_f) {
        Ok(k) => k,
        Err(Error::UndefinedExpression { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let critical_times = match k {
        Some(_) => tfim::critical_times(g_i, g_f, n_max)?,
        None => Vec::new(),
    };
    Ok(CriticalEntry { g_i, g_f, dqpt: tfim::dqpt_predicate(g_i, g_f), critical_momentum: k, critical_times })
}

fn rate_function(config: &RunConfig) -> Result<(Artifacts, Verdict), CliError> {
    let times = times(config);
    let mut rows = Vec::new();
    let mut critical = Vec::new();
    for &g_f in &config.quench.g_f {
        let table = LoschmidtTable::new(&spec(config, g_f)?)?;
        for s in table.series(&times) {
            rows.push(RateRow { g_f, t: s.t, rate: s.value, floored: !s.floored.is_empty() });
        }
        critical.push(critical_entry(config.quench.g_i, g_f, config.quench.n_max)?);
    }
    let mut out = Artifacts::default();
    out.table("rate_function", config.output.format, &rows)?;
    out.json("critical_times.json", &critical)?;
    Ok((out, Verdict::Pass))
}

#[derive(Serialize)]
struct ReturnRow {
    g_f: f64,
    k: f64,
    t_over_t0: f64,
    probability: f64,
}

fn heatmap(config: &RunConfig) -> Result<(Artifacts, Verdict), CliError> {
    let mut rows = Vec::new();
    for &g_f in &config.quench.g_f {
        let map = tfim::return_probability_map(&spec(config, g_f)?, config.heatmap.tau_points)?;
        for (k, row) in map.momenta.iter().zip(&map.values) {
            for (tau, p) in map.t_over_t0.iter().zip(row) {
                rows.push(ReturnRow { g_f, k: *k, t_over_t0: *tau, probability: *p });
            }
        }
    }
    let mut out = Artifacts::default();
    out.table("return_prob", config.output.format, &rows)?;
    Ok((out, Verdict::Pass))
}

#[derive(Serialize)]
struct SurfaceRow {
    g_f: f64,
    phi: f64,
    t: f64,
    fidelity: f64,
    magnetization: f64,
}

#[derive(Serialize)]
struct SpectrumRow {
    g_f: f64,
    observable: &'static str,
    t: f64,
    m: i64,
    re: f64,
    im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct SignatureRow {
    g_f: f64,
    tau: f64,
    re: f64,
    im: f64,
    abs: f64,
}

fn spectrum_rows(rows: &mut Vec<SpectrumRow>, g_f: f64, observable: &'static str, surface: &Surface, m_max: usize) -> Result<(), CliError> {
    for (t, s) in surface.times.iter().zip(otoc::spectra_of(surface, m_max)?) {
        for (m, c) in s.iter() {
            rows.push(SpectrumRow { g_f, observable, t: *t, m, re: c.re + 0.0, im: c.im + 0.0, abs: c.norm() });
        }
    }
    Ok(())
}

fn otoc(config: &RunConfig, spectra_only: bool) -> Result<(Artifacts, Verdict), CliError> {
    let e = &config.echo;
    let times = times(config);
    let mut surface_rows = Vec::new();
    let mut spectrum = Vec::new();
    let mut reports = Vec::new();
    let mut signature = Vec::new();
    for &g_f in &config.quench.g_f {
        let spec = spec(config, g_f)?;
        let echo = EchoConfig::new(spec, times.clone())
            .with_n_phi(e.n_phi)
            .with_aggregation(e.aggregation)
            .with_time_axis(e.time_axis);
        let (fid, mag) = otoc::echo_surfaces(&echo)?;
        spectrum_rows(&mut spectrum, g_f, "fidelity", &fid, e.m_max)?;
        spectrum_rows(&mut spectrum, g_f, "magnetization", &mag, e.m_max)?;
        if spectra_only {
            continue;
        }
        for (p, phi) in fid.phis.iter().enumerate() {
            for (j, t) in fid.times.iter().enumerate() {
                surface_rows.push(SurfaceRow {
                    g_f,
                    phi: *phi,
                    t: *t,
                    fidelity: fid.values[p][j],
                    magnetization: mag.values[p][j],
                });
            }
        }
        let (report, series) = otoc::classify_quench(&spec, e.n_phi, e.dw_threshold)?;
        for (tau, a) in series.tau.iter().zip(&series.a1) {
            signature.push(SignatureRow { g_f, tau: *tau, re: a.re + 0.0, im: a.im + 0.0, abs: a.norm() });
        }
        reports.push(report);
    }
    let mut out = Artifacts::default();
    let format = config.output.format;
    if !spectra_only {
        out.table("otoc_surface", format, &surface_rows)?;
    }
    out.table("spectra", format, &spectrum)?;
    if !spectra_only {
        out.table("signature", format, &signature)?;
        out.json("doublewell.json", &reports)?;
    }
    Ok((out, Verdict::Pass))
}

#[derive(Serialize)]
struct CompareRow {
    g_f: f64,
    quantity: &'static str,
    phi: Option<f64>,
    t: f64,
    momentum: f64,
    chain: f64,
    abs_diff: f64,
}

fn chain_rates(config: &RunConfig, g_f: f64, times: &[f64]) -> Result<Vec<EdRate>, CliError> {
    let o = &config.oracle;
    Ok(match o.mapping {
        Mapping::Sector => rate_series_mode_map(o.n, g_f, times, o.bc)?,
        Mapping::Literal => ed::rate_series_ed(o.n, config.quench.g_i, g_f, times, o.bc, Method::Auto)?,
    })
}

enum ChainEcho {
    Sector(ModeMapOracle),
    Literal(EchoOracle),
}

impl ChainEcho {
    fn new(config: &RunConfig, g_f: f64) -> Result<Self, CliError> {
        let o = &config.oracle;
        Ok(match o.mapping {
            Mapping::Sector => Self::Sector(ModeMapOracle::new(o.n, g_f, o.bc)?),
            Mapping::Literal => Self::Literal(EchoOracle::new(o.n, g_f, o.bc, Method::Auto)?),
        })
    }

    fn row(&self, t: f64, phis: &[f64]) -> Result<Vec<EchoSample>, CliError> {
        Ok(match self {
            Self::Sector(o) => o.row(t, phis)?,
            Self::Literal(o) => o.row(t, phis)?,
        })
    }
}

fn oracle_compare(config: &RunConfig) -> Result<(Artifacts, Verdict), CliError> {
    let o = &config.oracle;
    let q = &config.quench;
    let rate_times = times(config);
    let echo_times = tfim::linspace(0.0, q.t_max, o.echo_t_points);
    let phis = otoc::phi_grid(config.echo.n_phi);
    let mut rows = Vec::new();
    for &g_f in &q.g_f {
        let spec = QuenchSpec::new(q.g_i, g_f, o.n, q.grid)?.with_sign(q.sign);
        let table = LoschmidtTable::new(&spec)?;
        for (s, c) in table.series(&rate_times).iter().zip(chain_rates(config, g_f, &rate_times)?) {
            rows.push(CompareRow {
                g_f,
                quantity: "rate",
                phi: None,
                t: s.t,
                momentum: s.value,
                chain: c.value,
                abs_diff: (s.value - c.value).abs(),
            });
        }
        let product = EchoConfig::new(spec, echo_times.clone())
            .with_n_phi(config.echo.n_phi)
            .with_aggregation(Aggregation::Product);
        let (fid, _) = otoc::echo_surfaces(&product)?;
        let mag = otoc::magnetization_otoc(&product.clone().with_aggregation(Aggregation::Mean))?;
        let oracle = ChainEcho::new(config, g_f)?;
        for (j, t) in echo_times.iter().enumerate() {
            let chain = oracle.row(*t, &phis)?;
            for (p, phi) in phis.iter().enumerate() {
                let (mf, cf) = (fid.values[p][j], chain[p].fidelity);
                let (mm, cm) = (mag.values[p][j], chain[p].magnetization);
                rows.push(CompareRow { g_f, quantity: "fidelity", phi: Some(*phi), t: *t, momentum: mf, chain: cf, abs_diff: (mf - cf).abs() });
                rows.push(CompareRow { g_f, quantity: "magnetization", phi: Some(*phi), t: *t, momentum: mm, chain: cm, abs_diff: (mm - cm).abs() });
            }
        }
    }
    let worst = rows.iter().max_by(|a, b| a.abs_diff.total_cmp(&b.abs_diff));
    let verdict = match worst {
        Some(w) if !(w.abs_diff <= o.tolerance) => Verdict::Fail(format!(
            "max difference {:e} exceeds tolerance {:e} ({} at g_f = {}, t = {}{})",
            w.abs_diff,
            o.tolerance,
            w.quantity,
            w.g_f,
            w.t,
            w.phi.map(|p| format!(", phi = {p}")).unwrap_or_default()
        )),
        _ => Verdict::Pass,
    };
    let mut out = Artifacts::default();
    out.table("compare", config.output.format, &rows)?;
    Ok((out, verdict))
}

#[derive(Serialize)]
struct ScheduleRow {
    g_f: f64,
    k: f64,
    axis_angle: f64,
    rabi_rate: f64,
    idle: bool,
    duration_index: Option<usize>,
    duration: Option<f64>,
}

#[derive(Serialize)]
struct ReplayEntry {
    g_f: f64,
    max_deviation: f64,
}

#[derive(Serialize)]
struct ReplayCheck {
    tolerance: f64,
    max_deviation: f64,
    pass: bool,
    per_field: Vec<ReplayEntry>,
}

fn pulse_schedule(config: &RunConfig) -> Result<(Artifacts, Verdict), CliError> {
    let mut rows = Vec::new();
    let mut per_field = Vec::new();
    for &g_f in &config.quench.g_f {
        let spec = spec(config, g_f)?;
        let schedule = tfim::pulse_schedule(&spec, config.pulse.constant, config.pulse.n_t)?;
        for entry in &schedule {
            let base = |duration_index, duration| ScheduleRow {
                g_f,
                k: entry.k,
                axis_angle: entry.axis_angle,
                rabi_rate: entry.rabi_rate,
                idle: entry.idle,
                duration_index,
                duration,
            };
            if entry.idle {
                rows.push(base(None, None));
            }
            for (i, d) in entry.durations.iter().enumerate() {
                rows.push(base(Some(i), Some(*d)));
            }
        }
        per_field.push(ReplayEntry { g_f, max_deviation: tfim::replay_deviation(&spec, &schedule)? });
    }
    let max_deviation = per_field.iter().map(|e| e.max_deviation).fold(0.0, f64::max);
    let pass = max_deviation < REPLAY_TOLERANCE;
    let check = ReplayCheck { tolerance: REPLAY_TOLERANCE, max_deviation, pass, per_field };
    let mut out = Artifacts::default();
    out.table("schedule", config.output.format, &rows)?;
    out.json("replay_check.json", &check)?;
    let verdict = if pass {
        Verdict::Pass
    } else {
        Verdict::Fail(format!("replay deviation {max_deviation:e} exceeds {REPLAY_TOLERANCE:e}"))
    };
    Ok((out, verdict))
}
