//! Time-reversal echo: forward evolution under `H`, a rotation `R_x(φ)`, then
//! evolution under `−H`. The φ-dependence of the revival gives the fidelity
//! OTOC, whose Fourier components are the multiple-quantum intensities `I_m`,
//! and the magnetization OTOC with Fourier amplitudes `A_m`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{self, BlochVector, QubitState, Unitary2};
use crate::tfim::{self, Mode, QuenchSpec};

pub const DEFAULT_N_PHI: usize = 64;

/// Default noise threshold of [`double_well_detector`], in A_1 units.
pub const DEFAULT_DW_THRESHOLD: f64 = 1e-3;

/// Samples of the normalized-time A_1 series used by [`classify_quench`].
pub const SIGNATURE_SAMPLES: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Average over momentum runs.
    #[default]
    Mean,
    /// Product over modes: the many-body Loschmidt echo.
    Product,
}

/// How the time grid is applied to each mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeAxis {
    /// Every mode evolves for the same time `t`.
    #[default]
    Physical,
    /// Grid values are `τ = t/t₀(k)`; mode `k` evolves for `τ π/|d_f(k)|`.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Fidelity,
    Magnetization,
}

/// Operator ordering in `W(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WConvention {
    /// `W(t) = e^{−iHt} W e^{iHt}`
    #[default]
    Paper,
    /// `W(t) = e^{iHt} W e^{−iHt}`
    Heisenberg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoConfig {
    pub spec: QuenchSpec,
    pub n_phi: usize,
    pub times: Vec<f64>,
    pub aggregation: Aggregation,
    pub time_axis: TimeAxis,
}

impl EchoConfig {
    pub fn new(spec: QuenchSpec, times: Vec<f64>) -> Self {
        Self {
            spec,
            n_phi: DEFAULT_N_PHI,
            times,
            aggregation: Aggregation::default(),
            time_axis: TimeAxis::default(),
        }
    }

    pub fn with_n_phi(mut self, n_phi: usize) -> Self {
        self.n_phi = n_phi;
        self
    }

    pub fn with_aggregation(mut self, aggregation: Aggregation) -> Self {
        self.aggregation = aggregation;
        self
    }

    pub fn with_time_axis(mut self, time_axis: TimeAxis) -> Self {
        self.time_axis = time_axis;
        self
    }

    /// `φ_j = 2πj/N_φ`, `j = 0..N_φ`.
    pub fn phi_grid(&self) -> Vec<f64> {
        phi_grid(self.n_phi)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.n_phi < 1 {
            return Err(Error::InvalidConfiguration("n_phi must be positive".into()));
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidConfiguration("time grid contains non-finite values".into()));
        }
        Ok(())
    }
}

pub fn phi_grid(n_phi: usize) -> Vec<f64> {
    (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect()
}

/// Values over the (φ, t) plane, `values[φ index][t index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub phis: Vec<f64>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Surface {
    /// Signal over φ at time index `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }
}

/// `e^{+i h t} · R_x(φ) · e^{−i h t} · ψ₀`, the backward leg being evolution under `−h`.
pub fn echo_state(psi0: &QubitState, h: &BlochVector, t: f64, phi: f64) -> Result<QubitState> {
    let forward = su2::evolution_unitary(h, t)?;
    let backward = su2::evolution_unitary(&-*h, t)?;
    Ok(backward * (su2::rotation_x(phi)? * (forward * *psi0)))
}

fn mode_time(mode: &Mode, t: f64, axis: TimeAxis) -> f64 {
    match axis {
        TimeAxis::Physical => t,
        TimeAxis::Normalized => {
            let norm = mode.h_f.norm();
            if norm == 0.0 { 0.0 } else { t * PI / norm }
        }
    }
}

struct EchoPoint {
    fidelity: f64,
    magnetization: f64,
}

/// Aggregated echo observables for every (φ, t); fidelity follows
/// `config.aggregation`, magnetization is always the mode mean.
fn echo_points(config: &EchoConfig) -> Result<Vec<Vec<EchoPoint>>> {
    config.validate()?;
    let ensemble = tfim::build_ensemble(&config.spec)?;
    let modes = &ensemble.modes;
    let m = modes.len() as f64;
    let phis = config.phi_grid();
    let rotations = phis.iter().map(|&p| su2::rotation_x(p)).collect::<Result<Vec<_>>>()?;

    // Evolved states per (t, mode); the φ loop only reuses them.
    let evolutions: Vec<Vec<(QubitState, Unitary2)>> = config
        .times
        .par_iter()
        .map(|&t| {
            modes
                .iter()
                .map(|mode| {
                    let tm = mode_time(mode, t, config.time_axis);
                    let forward = su2::evolution_unitary(&mode.h_f, tm)?;
                    let backward = su2::evolution_unitary(&-mode.h_f, tm)?;
                    Ok((forward * mode.psi0, backward))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(rotations
        .par_iter()
        .map(|rot| {
            evolutions
                .iter()
                .map(|per_mode| {
                    let mut fid_sum = 0.0;
                    let mut fid_prod = 1.0;
                    let mut mag = 0.0;
                    for ((evolved, backward), mode) in per_mode.iter().zip(modes) {
                        let out = *backward * (*rot * *evolved);
                        let f = su2::fidelity(&mode.psi0, &out);
                        fid_sum += f;
                        fid_prod *= f;
                        mag += su2::expect_sx(&out);
                    }
                    let fidelity = match config.aggregation {
                        Aggregation::Mean => fid_sum / m,
                        Aggregation::Product => fid_prod,
                    };
                    EchoPoint { fidelity, magnetization: mag / m }
                })
                .collect()
        })
        .collect())
}

fn surface_from(config: &EchoConfig, points: &[Vec<EchoPoint>], pick: impl Fn(&EchoPoint) -> f64) -> Surface {
    Surface {
        phis: config.phi_grid(),
        times: config.times.clone(),
        values: points.iter().map(|row| row.iter().map(&pick).collect()).collect(),
    }
}

/// Fidelity `|⟨ψ₀|ψ_f⟩|²` aggregated over modes.
pub fn fidelity_otoc(config: &EchoConfig) -> Result<Surface> {
    let points = echo_points(config)?;
    Ok(surface_from(config, &points, |p| p.fidelity))
}

/// Mean over modes of `⟨σ_x/2⟩` after the echo.
pub fn magnetization_otoc(config: &EchoConfig) -> Result<Surface> {
    if config.aggregation == Aggregation::Product {
        return Err(Error::InvalidConfiguration(
            "magnetization is intensive; only mean aggregation is defined".into(),
        ));
    }
    let points = echo_points(config)?;
    Ok(surface_from(config, &points, |p| p.magnetization))
}

/// Both surfaces from one pass. The magnetization surface is always mean-aggregated.
pub fn echo_surfaces(config: &EchoConfig) -> Result<(Surface, Surface)> {
    let points = echo_points(config)?;
    Ok((
        surface_from(config, &points, |p| p.fidelity),
        surface_from(config, &points, |p| p.magnetization),
    ))
}

/// Fourier components `c_m`, `m = −m_max..=m_max`, of a real φ-scan.
#[derive(Debug, Clone, PartialEq)]
pub struct MqcSpectrum {
    m_max: usize,
    components: Vec<Complex64>,
}

impl MqcSpectrum {
    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn component(&self, m: i64) -> Complex64 {
        let idx = m + self.m_max as i64;
        if idx < 0 || idx as usize >= self.components.len() {
            return Complex64::new(0.0, 0.0);
        }
        self.components[idx as usize]
    }

    /// `(m, c_m)` pairs in ascending m.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let offset = self.m_max as i64;
        self.components.iter().enumerate().map(move |(i, c)| (i as i64 - offset, *c))
    }

    /// `Σ_m c_m`, which equals the signal at φ = 0 for a band-limited signal.
    pub fn total(&self) -> Complex64 {
        self.components.iter().sum()
    }

    /// `Σ_m c_m e^{imφ}`
    pub fn reconstruct(&self, phi: f64) -> Complex64 {
        self.iter().map(|(m, c)| c * Complex64::from_polar(1.0, m as f64 * phi)).sum()
    }
}

/// Discrete Fourier transform over a uniform φ grid:
/// `c_m = (1/N_φ) Σ_j s(φ_j) e^{−imφ_j}`.
pub fn mqc_spectrum(signal: &[f64], m_max: usize) -> Result<MqcSpectrum> {
    let n_phi = signal.len();
    if n_phi < 2 * m_max + 1 {
        return Err(Error::Aliasing { n_phi, m_max });
    }
    let phis = phi_grid(n_phi);
    let components = (-(m_max as i64)..=m_max as i64)
        .map(|m| {
            let sum: Complex64 = signal
                .iter()
                .zip(&phis)
                .map(|(s, phi)| *s * Complex64::from_polar(1.0, -(m as f64) * phi))
                .sum();
            sum / n_phi as f64
        })
        .collect();
    Ok(MqcSpectrum { m_max, components })
}

/// Column-wise spectra of the fidelity (`I_m`) or magnetization (`A_m`) surface.
pub fn spectrum_dynamics(config: &EchoConfig, observable: Observable, m_max: usize) -> Result<Vec<MqcSpectrum>> {
    if config.n_phi < 2 * m_max + 1 {
        return Err(Error::Aliasing { n_phi: config.n_phi, m_max });
    }
    let surface = match observable {
        Observable::Fidelity => fidelity_otoc(config)?,
        Observable::Magnetization => magnetization_otoc(config)?,
    };
    spectra_of(&surface, m_max)
}

pub fn spectra_of(surface: &Surface, m_max: usize) -> Result<Vec<MqcSpectrum>> {
    (0..surface.times.len()).map(|j| mqc_spectrum(&surface.column(j), m_max)).collect()
}

/// `⟨ψ₀| W(t)† V† W(t) V |ψ₀⟩` for the mode Hamiltonian `h·σ`.
pub fn otoc_general(
    w: &Unitary2,
    v: &Unitary2,
    h: &BlochVector,
    t: f64,
    psi0: &QubitState,
    convention: WConvention,
) -> Result<Complex64> {
    for (name, op) in [("W", w), ("V", v)] {
        let defect = op.unitarity_defect();
        if !(defect <= Unitary2::UNITARITY_TOLERANCE) {
            return Err(Error::InvalidArgument(format!("{name} is not unitary (defect {defect:e})")));
        }
    }
    let u = su2::evolution_unitary(h, t)?;
    let wt = match convention {
        WConvention::Paper => u * *w * u.adjoint(),
        WConvention::Heisenberg => u.adjoint() * *w * u,
    };
    let phi = wt.adjoint() * (v.adjoint() * (wt * (*v * *psi0)));
    Ok(psi0.inner(&phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WellShape {
    DoubleWell,
    SingleWell,
}

/// Looks for an inverted double well in `series` within `[t_c − window, t_c + window]`.
///
/// Reports [`WellShape::DoubleWell`] when some interior strict local minimum of
/// the windowed series is exceeded by at least `threshold` by the maximum on
/// each side of it (window endpoints included).
pub fn double_well_detector(
    times: &[f64],
    series: &[f64],
    t_c: f64,
    window: f64,
    threshold: f64,
) -> Result<WellShape> {
    if times.len() != series.len() || times.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 samples with matching times (got {} times, {} values)",
            times.len(),
            series.len()
        )));
    }
    if !(window > 0.0) || !t_c.is_finite() || !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bad detector parameters (t_c = {t_c}, window = {window}, threshold = {threshold})"
        )));
    }
    let step = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let tol = 1e-9 * step.abs().max(f64::MIN_POSITIVE);
    if !(step > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-6 * step) {
        return Err(Error::InvalidArgument("time grid must be uniform and ascending".into()));
    }
    let (lo, hi) = (t_c - window, t_c + window);
    if lo < times[0] - tol || hi > times[times.len() - 1] + tol {
        return Err(Error::Range(format!(
            "window [{lo}, {hi}] exceeds sampled range [{}, {}]",
            times[0],
            times[times.len() - 1]
        )));
    }
    let inside: Vec<f64> = times
        .iter()
        .zip(series)
        .filter(|(t, _)| **t >= lo - tol && **t <= hi + tol)
        .map(|(_, s)| *s)
        .collect();
    for j in 1..inside.len().saturating_sub(1) {
        let v = inside[j];
        if !(inside[j - 1] > v && v < inside[j + 1]) {
            continue;
        }
        let left = inside[..j].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let right = inside[j + 1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if left - v >= threshold && right - v >= threshold {
            return Ok(WellShape::DoubleWell);
        }
    }
    Ok(WellShape::SingleWell)
}

/// The A_1 signature series of a quench: mean-over-modes magnetization
/// echo on the normalized time axis `τ = t/t₀(k) ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSeries {
    pub tau: Vec<f64>,
    pub a1: Vec<Complex64>,
}

pub fn signature_series(spec: &QuenchSpec, n_phi: usize, samples: usize) -> Result<SignatureSeries> {
    let tau = tfim::linspace(0.0, 1.0, samples);
    let config = EchoConfig::new(*spec, tau.clone())
        .with_n_phi(n_phi)
        .with_time_axis(TimeAxis::Normalized);
    let spectra = spectrum_dynamics(&config, Observable::Magnetization, 1)?;
    Ok(SignatureSeries { tau, a1: spectra.iter().map(|s| s.component(1)).collect() })
}

/// Result of [`classify_quench`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleWellReport {
    pub g_i: f64,
    pub g_f: f64,
    pub shape: WellShape,
    /// Fisher-zero location on the normalized axis: `t_c / t₀(k*) = 1/2`.
    pub tau_c: f64,
    pub window: f64,
    pub threshold: f64,
    pub samples: usize,
    pub n_phi: usize,
}

/// Classifies Re A_1(τ) around τ_c = 1/2 with a window covering `[0, 1]`.
pub fn classify_quench(spec: &QuenchSpec, n_phi: usize, threshold: f64) -> Result<(DoubleWellReport, SignatureSeries)> {
    let series = signature_series(spec, n_phi, SIGNATURE_SAMPLES)?;
    let re: Vec<f64> = series.a1.iter().map(|c| c.re).collect();
    let (tau_c, window) = (0.5, 0.5);
    let shape = double_well_detector(&series.tau, &re, tau_c, window, threshold)?;
    Ok((
        DoubleWellReport {
            g_i: spec.g_i,
            g_f: spec.g_f,
            shape,
            tau_c,
            window,
            threshold,
            samples: SIGNATURE_SAMPLES,
            n_phi,
        },
        series,
    ))
}
