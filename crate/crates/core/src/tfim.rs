//! Global quench of the transverse-field Ising chain
//! `H(g) = −Σ_n (σ^x_n σ^x_{n+1} + g σ^z_n)` in momentum space.
//!
//! After Jordan–Wigner fermionization each quasi-momentum `k` carries the Bloch
//! Hamiltonian `d(k)·σ` with `d = (1 − g cos k, g sin k, 0)`. The quench
//! `g_i → g_f` evolves every mode independently, so the Loschmidt amplitude,
//! the rate function and the Fisher zeros all follow from per-mode algebra.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{self, BlochVector, QubitState, Unitary2};

/// Per-mode return probabilities below this are clamped before the logarithm.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Default number of Fisher-zero times reported by [`critical_times`] callers.
pub const DEFAULT_N_MAX: usize = 3;

/// Default pulse count per momentum in [`pulse_schedule`].
pub const DEFAULT_PULSE_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// `k = 2πj/N`, `j = 0..=N` (both zone edges, N+1 points).
    Paper,
    /// Anti-periodic momenta `k = (2n+1)π/N`, `n = 0..N`.
    Abc,
}

/// Overall sign of the per-mode Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// Mode Hamiltonian `−d·σ`, so `|x⟩` is the ground state of the `g = 0` mode.
    #[default]
    FerroGround,
    /// Mode Hamiltonian `+d·σ`.
    Bare,
}

impl SignConvention {
    /// Bloch vector of the mode Hamiltonian for the bare vector `d`.
    pub fn hamiltonian(&self, d: &BlochVector) -> BlochVector {
        match self {
            SignConvention::FerroGround => -*d,
            SignConvention::Bare => *d,
        }
    }
}

/// One global quench experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchSpec {
    pub g_i: f64,
    pub g_f: f64,
    pub n: usize,
    pub grid: GridMode,
    #[serde(default)]
    pub sign: SignConvention,
}

impl QuenchSpec {
    pub fn new(g_i: f64, g_f: f64, n: usize, grid: GridMode) -> Result<Self> {
        let spec = Self { g_i, g_f, n, grid, sign: SignConvention::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_sign(mut self, sign: SignConvention) -> Self {
        self.sign = sign;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n = {} must be at least 2", self.n)));
        }
        if !self.g_i.is_finite() || !self.g_f.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "fields must be finite (g_i = {}, g_f = {})",
                self.g_i, self.g_f
            )));
        }
        Ok(())
    }

    /// Quasi-momenta of the grid, ascending.
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.n as f64;
        match self.grid {
            GridMode::Paper => (0..=self.n).map(|j| 2.0 * PI * j as f64 / n).collect(),
            GridMode::Abc => (0..self.n).map(|j| (2 * j + 1) as f64 * PI / n).collect(),
        }
    }
}

/// `d(k) = (1 − g cos k, g sin k, 0)`.
pub fn bloch_vector(g: f64, k: f64) -> BlochVector {
    BlochVector::new(1.0 - g * k.cos(), g * k.sin(), 0.0)
}

/// Unitary `U = P S⁻¹` taking the mode Hamiltonian `h·σ` to `−|h| σ_x`.
///
/// `S` holds the ground and excited eigenvectors of `h·σ` as columns and `P`
/// holds `|x⟩, |−x⟩`, so `U` maps the ground state onto `|x⟩`.
pub fn frame_transform_for(h: &BlochVector) -> Result<Unitary2> {
    let ground = su2::ground_state(h)?;
    let excited = su2::ground_state(&-*h)?;
    let s = 1.0 / 2f64.sqrt();
    let p = [[s, s], [s, -s]];
    let cols = [ground.amplitudes(), excited.amplitudes()];
    let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in u.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = (0..2).map(|j| p[r][j] * cols[j][c].conj()).sum();
        }
    }
    Ok(Unitary2::from_entries_unchecked(u))
}

/// Frame transform for the pre-quench mode at momentum `k` (default sign convention).
pub fn frame_transform(g_i: f64, k: f64) -> Result<Unitary2> {
    let h = SignConvention::FerroGround.hamiltonian(&bloch_vector(g_i, k));
    frame_transform_for(&h).map_err(|_| Error::GaplessMode { k })
}

#[derive(Debug, Clone, Copy)]
struct ModeOverlap {
    df_norm: f64,
    /// d̂_i·d̂_f
    cos_angle: f64,
}

fn mode_overlap(g_i: f64, g_f: f64, k: f64) -> Result<ModeOverlap> {
    let d_i = bloch_vector(g_i, k);
    let d_f = bloch_vector(g_f, k);
    let ni = d_i.norm();
    if ni == 0.0 {
        return Err(Error::GaplessMode { k });
    }
    let nf = d_f.norm();
    let cos_angle = if nf == 0.0 { 1.0 } else { d_i.dot(&d_f) / (ni * nf) };
    Ok(ModeOverlap { df_norm: nf, cos_angle })
}

impl ModeOverlap {
    fn amplitude(&self, t: f64) -> Complex64 {
        if self.df_norm == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let (s, c) = (self.df_norm * t).sin_cos();
        Complex64::new(c, self.cos_angle * s)
    }

    fn return_probability(&self, t: f64) -> f64 {
        // Also exact for modes the quench leaves unchanged (d̂_i = ±d̂_f).
        if self.df_norm == 0.0 || self.cos_angle.abs() == 1.0 {
            return 1.0;
        }
        let (s, c) = (self.df_norm * t).sin_cos();
        c * c + self.cos_angle * self.cos_angle * s * s
    }
}

/// `G_k(t) = cos(|d_f| t) + i (d̂_i·d̂_f) sin(|d_f| t)`.
pub fn loschmidt_mode(spec: &QuenchSpec, k: f64, t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    Ok(mode_overlap(spec.g_i, spec.g_f, k)?.amplitude(t))
}

/// Rate function value plus the momenta whose return probability hit
/// [`PROBABILITY_FLOOR`].
#[derive(Debug, Clone, PartialEq)]
pub struct RateSample {
    pub t: f64,
    pub value: f64,
    pub floored: Vec<f64>,
}

/// Precomputed per-mode data for repeated rate-function evaluation.
#[derive(Debug, Clone)]
pub struct LoschmidtTable {
    n: usize,
    momenta: Vec<f64>,
    modes: Vec<ModeOverlap>,
}

impl LoschmidtTable {
    pub fn new(spec: &QuenchSpec) -> Result<Self> {
        spec.validate()?;
        let momenta = spec.momenta();
        let modes = momenta
            .iter()
            .map(|&k| mode_overlap(spec.g_i, spec.g_f, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: spec.n, momenta, modes })
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn sample(&self, t: f64) -> RateSample {
        let mut sum = 0.0;
        let mut floored = Vec::new();
        for (k, m) in self.momenta.iter().zip(&self.modes) {
            let p = m.return_probability(t);
            if p < PROBABILITY_FLOOR {
                floored.push(*k);
            }
            sum += p.max(PROBABILITY_FLOOR).ln();
        }
        // −0.0 would print as "-0"
        let value = -sum / self.n as f64 + 0.0;
        RateSample { t, value, floored }
    }

    /// Rate function over a time grid; modes are summed in ascending k for every t.
    pub fn series(&self, times: &[f64]) -> Vec<RateSample> {
        times.par_iter().map(|&t| self.sample(t)).collect()
    }
}

/// `f(t) = −(1/N) Σ_k log |G_k(t)|²` over the grid of `spec`.
pub fn rate_function(spec: &QuenchSpec, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    Ok(LoschmidtTable::new(spec)?.sample(t).value)
}

/// Critical momentum `k* = arccos[(1 + g_i g_f)/(g_i + g_f)]`, when it exists.
pub fn critical_momentum(g_i: f64, g_f: f64) -> Result<Option<f64>> {
    let denom = g_i + g_f;
    if denom == 0.0 {
        return Err(Error::UndefinedExpression { g_i, g_f });
    }
    let arg = (1.0 + g_i * g_f) / denom;
    Ok((arg.abs() < 1.0).then(|| arg.acos()))
}

/// Fisher-zero times `π/|d_f(k*)| (n + 1/2)` for `n = 0..=n_max`.
pub fn critical_times(g_i: f64, g_f: f64, n_max: usize) -> Result<Vec<f64>> {
    let k = critical_momentum(g_i, g_f)?.ok_or(Error::NoDqpt { g_i, g_f })?;
    let period = PI / bloch_vector(g_f, k).norm();
    Ok((0..=n_max).map(|n| period * (n as f64 + 0.5)).collect())
}

/// True iff the pre- and post-quench fields lie in different equilibrium phases.
pub fn dqpt_predicate(g_i: f64, g_f: f64) -> bool {
    (1.0 - g_i.abs()) * (1.0 - g_f.abs()) < 0.0
}

/// Evenly spaced samples of `[start, stop]`, endpoints included.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n).map(|j| if j == n - 1 { stop } else { start + step * j as f64 }).collect()
        }
    }
}

/// 300 points over `[0, 3 t_c]` when a DQPT exists, else over `[0, 10]`.
pub fn default_time_grid(g_i: f64, g_f: f64) -> Vec<f64> {
    let t_max = match critical_times(g_i, g_f, 0) {
        Ok(tc) => 3.0 * tc[0],
        Err(_) => 10.0,
    };
    linspace(0.0, t_max, 300)
}

/// Return probabilities `|G_k(t)|²` on a grid of normalized time `t/t₀(k)`,
/// `t₀(k) = π/|d_f(k)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnProbabilityMap {
    pub momenta: Vec<f64>,
    pub t_over_t0: Vec<f64>,
    /// `values[row = k][col = t/t₀]`
    pub values: Vec<Vec<f64>>,
}

fn return_probability_row_inner(m: &ModeOverlap, taus: &[f64]) -> Vec<f64> {
    if m.df_norm == 0.0 {
        return vec![1.0; taus.len()];
    }
    let t0 = PI / m.df_norm;
    taus.iter().map(|tau| m.return_probability(tau * t0)).collect()
}

/// One row of [`return_probability_map`] at an arbitrary momentum.
pub fn return_probability_row(spec: &QuenchSpec, k: f64, n_t: usize) -> Result<Vec<f64>> {
    if n_t < 2 {
        return Err(Error::InvalidArgument(format!("n_t = {n_t} must be at least 2")));
    }
    let m = mode_overlap(spec.g_i, spec.g_f, k)?;
    Ok(return_probability_row_inner(&m, &linspace(0.0, 2.0, n_t)))
}

pub fn return_probability_map(spec: &QuenchSpec, n_t: usize) -> Result<ReturnProbabilityMap> {
    if n_t < 2 {
        return Err(Error::InvalidArgument(format!("n_t = {n_t} must be at least 2")));
    }
    let table = LoschmidtTable::new(spec)?;
    let taus = linspace(0.0, 2.0, n_t);
    let values = table.modes.par_iter().map(|m| return_probability_row_inner(m, &taus)).collect();
    Ok(ReturnProbabilityMap { momenta: table.momenta, t_over_t0: taus, values })
}

/// Drive parameters realizing the post-quench evolution of one mode as a
/// resonant rotation of a single qubit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseScheduleEntry {
    pub k: f64,
    /// Azimuth of the rotation axis `(cos φ, sin φ, 0) = d̂_f(k)`.
    pub axis_angle: f64,
    /// `Ω = C |d_f(k)|`
    pub rabi_rate: f64,
    /// Pulse durations uniformly spanning `[0, 2π/Ω]`; empty for idle entries.
    pub durations: Vec<f64>,
    /// `|d_f(k)| = 0`: the mode does not evolve and no pulse is applied.
    pub idle: bool,
    pub pulse_constant: f64,
}

impl PulseScheduleEntry {
    pub fn axis(&self) -> BlochVector {
        BlochVector::new(self.axis_angle.cos(), self.axis_angle.sin(), 0.0)
    }

    /// Quench time simulated by a pulse of length `duration`.
    ///
    /// A rotation by `θ = Ω T` equals `exp(−i |d_f| t d̂_f·σ)` with `t = θ / (2|d_f|) = C T / 2`.
    pub fn quench_time(&self, duration: f64) -> f64 {
        0.5 * self.pulse_constant * duration
    }

    /// The lab-frame rotation applied for pulse `duration`.
    pub fn replay(&self, duration: f64) -> Result<Unitary2> {
        if self.idle {
            return Ok(Unitary2::identity());
        }
        su2::rotation(&self.axis(), self.rabi_rate * duration)
    }
}

pub fn pulse_schedule(spec: &QuenchSpec, pulse_constant: f64, n_steps: usize) -> Result<Vec<PulseScheduleEntry>> {
    spec.validate()?;
    if !(pulse_constant > 0.0 && pulse_constant.is_finite()) {
        return Err(Error::InvalidArgument(format!("pulse constant {pulse_constant} must be positive")));
    }
    if n_steps < 2 {
        return Err(Error::InvalidArgument(format!("n_T = {n_steps} must be at least 2")));
    }
    Ok(spec
        .momenta()
        .into_iter()
        .map(|k| {
            let d = bloch_vector(spec.g_f, k);
            let norm = d.norm();
            if norm == 0.0 {
                return PulseScheduleEntry {
                    k,
                    axis_angle: 0.0,
                    rabi_rate: 0.0,
                    durations: Vec::new(),
                    idle: true,
                    pulse_constant,
                };
            }
            // atan2 keeps the quadrant when 1 − g cos k < 0.
            let axis_angle = d.y.atan2(d.x);
            let rabi_rate = pulse_constant * norm;
            PulseScheduleEntry {
                k,
                axis_angle,
                rabi_rate,
                durations: linspace(0.0, 2.0 * PI / rabi_rate, n_steps),
                idle: false,
                pulse_constant,
            }
        })
        .collect())
}

/// Largest phase-insensitive deviation between replayed pulses and the mode
/// evolution they stand for.
pub fn replay_deviation(spec: &QuenchSpec, schedule: &[PulseScheduleEntry]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for entry in schedule {
        let d = bloch_vector(spec.g_f, entry.k);
        for &duration in &entry.durations {
            let replayed = entry.replay(duration)?;
            let exact = su2::evolution_unitary(&d, entry.quench_time(duration))?;
            worst = worst.max(replayed.max_abs_diff_up_to_phase(&exact));
        }
    }
    Ok(worst)
}

/// A momentum mode in the frame where its pre-quench ground state is `|x⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub k: f64,
    pub d_i: BlochVector,
    pub d_f: BlochVector,
    /// Frame transform `U` applied to this mode.
    pub frame: Unitary2,
    /// Initial state in the rotated frame.
    pub psi0: QubitState,
    /// Pre-quench mode Hamiltonian in the rotated frame (`∝ −σ_x`).
    pub h_i: BlochVector,
    /// Post-quench mode Hamiltonian in the rotated frame.
    pub h_f: BlochVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeEnsemble {
    pub spec: QuenchSpec,
    pub modes: Vec<Mode>,
}

pub fn build_ensemble(spec: &QuenchSpec) -> Result<ModeEnsemble> {
    spec.validate()?;
    let modes = spec
        .momenta()
        .into_iter()
        .map(|k| {
            let d_i = bloch_vector(spec.g_i, k);
            let d_f = bloch_vector(spec.g_f, k);
            let h_i = spec.sign.hamiltonian(&d_i);
            let h_f = spec.sign.hamiltonian(&d_f);
            if spec.g_i == 0.0 && spec.sign == SignConvention::FerroGround {
                // h_i = −σ_x already.
                return Ok(Mode {
                    k,
                    d_i,
                    d_f,
                    frame: Unitary2::identity(),
                    psi0: QubitState::plus_x(),
                    h_i,
                    h_f,
                });
            }
            let frame = frame_transform_for(&h_i).map_err(|_| Error::GaplessMode { k })?;
            let psi0 = frame * su2::ground_state(&h_i).map_err(|_| Error::GaplessMode { k })?;
            Ok(Mode {
                k,
                d_i,
                d_f,
                frame,
                psi0,
                h_i: frame.conjugate_bloch(&h_i),
                h_f: frame.conjugate_bloch(&h_f),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeEnsemble { spec: *spec, modes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(g_i: f64, g_f: f64, n: usize, grid: GridMode) -> QuenchSpec {
        QuenchSpec::new(g_i, g_f, n, grid).unwrap()
    }

    #[test]
    fn grids() {
        let paper = spec(0.0, 1.2, 4, GridMode::Paper).momenta();
        assert_eq!(paper.len(), 5);
        assert_eq!(paper[0], 0.0);
        assert!((paper[4] - 2.0 * PI).abs() < 1e-15);

        let abc = spec(0.0, 1.2, 8, GridMode::Abc).momenta();
        let expected: Vec<f64> = (0..8).map(|n| (2 * n + 1) as f64 * PI / 8.0).collect();
        assert_eq!(abc, expected);
    }

    #[test]
    fn spec_validation() {
        assert!(QuenchSpec::new(0.0, 1.2, 1, GridMode::Paper).is_err());
        assert!(QuenchSpec::new(f64::NAN, 1.2, 4, GridMode::Paper).is_err());
    }

    #[test]
    fn bloch_vector_examples() {
        assert_eq!(bloch_vector(1.0, 0.0), BlochVector::new(0.0, 0.0, 0.0));
        let d = bloch_vector(0.7, PI);
        assert!((d.x - 1.7).abs() < 1e-15 && d.y.abs() < 1e-15);

        let kstar = (5.0f64 / 6.0).acos();
        let d = bloch_vector(1.2, kstar);
        assert!(d.x.abs() < 1e-15);
        assert!((d.y - 0.44f64.sqrt()).abs() < 1e-15);
        assert!((d.norm() * d.norm() - 0.44).abs() < 1e-14);
    }

    #[test]
    fn frame_transform_identity_cases() {
        for k in [0.0, 0.4, 2.0, PI] {
            let u = frame_transform(0.0, k).unwrap();
            assert!(u.max_abs_diff_up_to_phase(&Unitary2::identity()) < 1e-15);
        }
        let u = frame_transform(0.5, PI).unwrap();
        assert!(u.max_abs_diff_up_to_phase(&Unitary2::identity()) < 1e-15);
    }

    #[test]
    fn frame_transform_maps_initial_hamiltonian_to_sigma_x() {
        let k = PI / 2.0;
        let d_i = bloch_vector(0.5, k);
        let u = frame_transform(0.5, k).unwrap();
        let r = u.conjugate_bloch(&d_i);
        assert!((r.x - d_i.norm()).abs() < 1e-12 && r.y.abs() < 1e-12 && r.z.abs() < 1e-12);
        assert!(u.unitarity_defect() < 1e-14);
    }

    #[test]
    fn frame_transform_rejects_gapless_mode() {
        assert_eq!(frame_transform(1.0, 0.0), Err(Error::GaplessMode { k: 0.0 }));
    }

    #[test]
    fn loschmidt_examples() {
        let s = spec(0.0, 0.0, 4, GridMode::Paper);
        for (k, t) in [(0.3, 1.0), (2.0, 7.5)] {
            assert!((loschmidt_mode(&s, k, t).unwrap().norm() - 1.0).abs() < 1e-15);
        }

        let s = spec(0.0, 1.2, 30, GridMode::Paper);
        let kstar = critical_momentum(0.0, 1.2).unwrap().unwrap();
        let tc = PI / (2.0 * 0.44f64.sqrt());
        assert!(loschmidt_mode(&s, kstar, tc).unwrap().norm() < 1e-10);

        // Gapless final mode: g_f = 1 at k = 0.
        let s = spec(0.0, 1.0, 4, GridMode::Paper);
        assert_eq!(loschmidt_mode(&s, 0.0, 3.0).unwrap(), Complex64::new(1.0, 0.0));
        // Gapless initial mode.
        let s = spec(1.0, 0.5, 4, GridMode::Paper);
        assert!(matches!(loschmidt_mode(&s, 0.0, 1.0), Err(Error::GaplessMode { .. })));
    }

    #[test]
    fn rate_function_trivial_values() {
        let same = spec(0.4, 0.4, 10, GridMode::Paper);
        for t in [0.0, 1.0, 3.3] {
            assert!(rate_function(&same, t).unwrap().abs() < 1e-14);
        }
        let s = spec(0.0, 1.2, 30, GridMode::Paper);
        assert_eq!(rate_function(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rate_function_at_on_grid_fisher_zero_stays_finite() {
        // For g_f = 2 the critical momentum π/3 lies on the N = 3 abc grid.
        let s = spec(0.0, 2.0, 3, GridMode::Abc);
        let kstar = critical_momentum(0.0, 2.0).unwrap().unwrap();
        assert!((kstar - PI / 3.0).abs() < 1e-15);
        let tc = critical_times(0.0, 2.0, 0).unwrap()[0];
        let sample = LoschmidtTable::new(&s).unwrap().sample(tc);
        assert!(sample.value.is_finite() && sample.value > 10.0);
        // Rounding in cos(k*) leaves |G_k|² near 1e-32, above the floor.
        assert!(sample.floored.is_empty());
    }

    #[test]
    fn critical_momentum_examples() {
        let k = critical_momentum(0.0, 1.2).unwrap().unwrap();
        assert!((k - (1.0f64 / 1.2).acos()).abs() < 1e-15);
        assert!((k - 0.58569).abs() < 1e-5);
        assert!(bloch_vector(0.0, k).dot(&bloch_vector(1.2, k)).abs() < 1e-12);

        assert_eq!(critical_momentum(0.0, 0.8).unwrap(), None);

        let k = critical_momentum(0.0, 1.5).unwrap().unwrap();
        assert!((k - 0.84107).abs() < 1e-5);
        assert!(bloch_vector(0.0, k).dot(&bloch_vector(1.5, k)).abs() < 1e-12);

        assert!(matches!(critical_momentum(0.5, -0.5), Err(Error::UndefinedExpression { .. })));
    }

    #[test]
    fn critical_times_examples() {
        let t = critical_times(0.0, 1.2, 1).unwrap();
        assert_eq!(t.len(), 2);
        assert!((t[0] - 2.3680).abs() < 1e-4);
        assert!((t[1] - 7.1041).abs() < 1e-4);

        let t = critical_times(0.0, 1.5, 0).unwrap();
        assert!((t[0] - PI / (2.0 * 1.25f64.sqrt())).abs() < 1e-14);
        assert!((t[0] - 1.4050).abs() < 1e-4);

        assert!(matches!(critical_times(0.0, 0.8, 3), Err(Error::NoDqpt { .. })));
    }

    #[test]
    fn dqpt_predicate_examples() {
        assert!(dqpt_predicate(0.0, 1.2));
        assert!(!dqpt_predicate(0.0, 0.8));
        assert!(!dqpt_predicate(0.0, 1.0));
    }

    #[test]
    fn default_time_grids() {
        let g = default_time_grid(0.0, 1.2);
        assert_eq!(g.len(), 300);
        assert!((g[299] - 3.0 * critical_times(0.0, 1.2, 0).unwrap()[0]).abs() < 1e-15);
        assert_eq!(default_time_grid(0.0, 0.8)[299], 10.0);
    }

    #[test]
    fn return_probability_map_properties() {
        let s = spec(0.0, 1.2, 30, GridMode::Paper);
        let map = return_probability_map(&s, 201).unwrap();
        assert_eq!(map.values.len(), 31);
        assert_eq!(map.t_over_t0[0], 0.0);
        assert_eq!(*map.t_over_t0.last().unwrap(), 2.0);
        for row in &map.values {
            assert_eq!(row[0], 1.0);
            assert!(row.iter().all(|p| (0.0..=1.0 + 1e-15).contains(p)));
        }

        let kstar = critical_momentum(0.0, 1.2).unwrap().unwrap();
        let row = return_probability_row(&s, kstar, 201).unwrap();
        assert!(row[50].abs() < 1e-10);

        let s = spec(0.0, 0.8, 30, GridMode::Paper);
        let map = return_probability_map(&s, 201).unwrap();
        let min = map.values.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0);

        assert!(return_probability_map(&s, 1).is_err());
    }

    #[test]
    fn gapless_final_mode_row_is_ones() {
        let s = spec(0.0, 1.0, 4, GridMode::Paper);
        let map = return_probability_map(&s, 11).unwrap();
        assert!(map.values[0].iter().all(|&p| p == 1.0));
    }

    #[test]
    fn pulse_schedule_examples() {
        let s = spec(0.0, 1.2, 2, GridMode::Paper);
        let sched = pulse_schedule(&s, 1.0, DEFAULT_PULSE_STEPS).unwrap();
        let at_pi = &sched[1];
        assert!((at_pi.k - PI).abs() < 1e-15);
        assert!(at_pi.axis_angle.abs() < 1e-15);
        assert!((at_pi.rabi_rate - 2.2).abs() < 1e-15);
        assert_eq!(at_pi.durations.len(), 100);
        assert!((at_pi.durations[99] - 2.0 * PI / 2.2).abs() < 1e-15);

        let kstar = critical_momentum(0.0, 1.2).unwrap().unwrap();
        let d = bloch_vector(1.2, kstar);
        assert!((d.y.atan2(d.x) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn pulse_schedule_idle_and_errors() {
        let s = spec(0.0, 1.0, 4, GridMode::Paper);
        let sched = pulse_schedule(&s, 1.0, 10).unwrap();
        assert!(sched[0].idle && sched[0].durations.is_empty());
        assert!(!sched[1].idle);
        assert!(pulse_schedule(&s, 0.0, 10).is_err());
        assert!(pulse_schedule(&s, 1.0, 1).is_err());
    }

    #[test]
    fn ensemble_g_i_zero_uses_x_exactly() {
        let e = build_ensemble(&spec(0.0, 1.2, 4, GridMode::Paper)).unwrap();
        assert_eq!(e.modes.len(), 5);
        assert!(e.modes.iter().all(|m| m.psi0 == QubitState::plus_x()));
    }

    #[test]
    fn ensemble_general_g_i_ground_energy() {
        let e = build_ensemble(&spec(0.5, 1.2, 8, GridMode::Paper)).unwrap();
        for m in &e.modes {
            let energy = m.psi0.expect(&m.h_i);
            assert!((energy + m.d_i.norm()).abs() < 1e-12, "k = {}", m.k);
            assert!((m.psi0.norm_sqr() - 1.0).abs() < 1e-12);
        }
        assert!(e.modes.windows(2).all(|w| w[0].k < w[1].k));
    }

    #[test]
    fn ensemble_gapless_initial_mode_names_k() {
        let err = build_ensemble(&spec(1.0, 0.5, 4, GridMode::Paper)).unwrap_err();
        assert_eq!(err, Error::GaplessMode { k: 0.0 });
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 2.0, 5), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }
}
