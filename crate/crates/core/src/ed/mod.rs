//! Exact simulation of the full `2^N`-dimensional spin chain.
//!
//! Only the `g_i = 0` quench is supported, whose initial state `|+⟩^{⊗N}` is
//! known in closed form. [`mode_map`] holds the chain quantities that
//! coincide exactly with the momentum-space factorization.

pub mod chain;
pub mod mode_map;
pub mod propagator;

use rayon::prelude::*;
use serde::Serialize;

pub use chain::{initial_chain_state, BoundaryCondition, ChainOperator, ChainState, MAX_SPINS};
pub use propagator::{bessel_j_sequence, evolve_chain, ChainPropagator, Method, DENSE_MAX_SPINS};

use crate::error::{Error, Result};
use crate::otoc::{self, MqcSpectrum};
use crate::tfim::PROBABILITY_FLOOR;

/// Rate-function value with a flag for a floored return probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdRate {
    pub value: f64,
    pub floored: bool,
}

impl EdRate {
    pub(crate) fn from_probability(p: f64, n: usize, scale: f64) -> Self {
        let floored = p < PROBABILITY_FLOOR;
        let value = -scale * p.max(PROBABILITY_FLOOR).ln() / n as f64 + 0.0;
        Self { value, floored }
    }
}

fn require_ferro_start(g_i: f64) -> Result<()> {
    if g_i != 0.0 {
        return Err(Error::Unsupported(format!(
            "the exact oracle starts from |+⟩^N and needs g_i = 0 (got {g_i})"
        )));
    }
    Ok(())
}

/// `−(1/N) log|⟨Φ₀|e^{−iHt}|Φ₀⟩|²` with `|Φ₀⟩ = |+⟩^{⊗N}` and `H = H(g_f)`.
pub fn rate_function_ed(n: usize, g_i: f64, g_f: f64, t: f64, bc: BoundaryCondition) -> Result<EdRate> {
    Ok(rate_series_ed(n, g_i, g_f, &[t], bc, Method::Auto)?[0])
}

/// [`rate_function_ed`] over many times with one propagator.
pub fn rate_series_ed(
    n: usize,
    g_i: f64,
    g_f: f64,
    times: &[f64],
    bc: BoundaryCondition,
    method: Method,
) -> Result<Vec<EdRate>> {
    require_ferro_start(g_i)?;
    let op = ChainOperator::new(n, g_f, bc)?;
    let psi0 = initial_chain_state(n)?;
    let prop = ChainPropagator::new(&op, method);
    times
        .par_iter()
        .map(|&t| {
            let psi = prop.evolve(&psi0, t)?;
            Ok(EdRate::from_probability(psi0.inner(&psi).norm_sqr(), n, 1.0))
        })
        .collect()
}

/// Outputs of one chain echo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoSample {
    pub fidelity: f64,
    pub magnetization: f64,
}

/// Echo `e^{+iHt} R_x(φ) e^{−iHt}|+⟩^{⊗N}` with the global rotation
/// `R_x(φ) = e^{−iφS_x}`, reusing one propagator.
#[derive(Debug, Clone)]
pub struct EchoOracle {
    n: usize,
    psi0: ChainState,
    prop: ChainPropagator,
}

impl EchoOracle {
    pub fn new(n: usize, g_f: f64, bc: BoundaryCondition, method: Method) -> Result<Self> {
        let op = ChainOperator::new(n, g_f, bc)?;
        Ok(Self { n, psi0: initial_chain_state(n)?, prop: ChainPropagator::new(&op, method) })
    }

    /// Samples at time `t` for every `φ` in `phis`.
    pub fn row(&self, t: f64, phis: &[f64]) -> Result<Vec<EchoSample>> {
        let forward = self.prop.evolve(&self.psi0, t)?;
        phis.par_iter()
            .map(|&phi| {
                let mut psi = forward.clone();
                psi.rotate_x(phi);
                let out = self.prop.evolve(&psi, -t)?;
                Ok(EchoSample {
                    fidelity: self.psi0.inner(&out).norm_sqr(),
                    magnetization: out.expect_sx_total() / self.n as f64,
                })
            })
            .collect()
    }

    pub fn sample(&self, t: f64, phi: f64) -> Result<EchoSample> {
        Ok(self.row(t, &[phi])?[0])
    }

    /// `values[φ index][t index]`
    pub fn surface(&self, phis: &[f64], times: &[f64]) -> Result<Vec<Vec<EchoSample>>> {
        let rows: Vec<Vec<EchoSample>> = times.iter().map(|&t| self.row(t, phis)).collect::<Result<_>>()?;
        Ok((0..phis.len()).map(|p| rows.iter().map(|r| r[p]).collect()).collect())
    }
}

/// Fidelity `|⟨Φ₀|ψ_f⟩|²` and per-spin magnetization `⟨S_x⟩/N` of one echo.
pub fn echo_chain(n: usize, g_f: f64, t: f64, phi: f64, bc: BoundaryCondition) -> Result<EchoSample> {
    EchoOracle::new(n, g_f, bc, Method::Auto)?.sample(t, phi)
}

/// Multiple-quantum spectrum of the chain fidelity at time `t` over `n_phi`
/// rotation angles.
pub fn mqc_spectrum_ed(
    n: usize,
    g_f: f64,
    t: f64,
    bc: BoundaryCondition,
    m_max: usize,
    n_phi: usize,
) -> Result<MqcSpectrum> {
    if n_phi < 2 * n + 1 {
        return Err(Error::Aliasing { n_phi, m_max: n });
    }
    if n_phi < 2 * m_max + 1 {
        return Err(Error::Aliasing { n_phi, m_max });
    }
    let oracle = EchoOracle::new(n, g_f, bc, Method::Auto)?;
    let signal: Vec<f64> = oracle.row(t, &otoc::phi_grid(n_phi))?.iter().map(|s| s.fidelity).collect();
    otoc::mqc_spectrum(&signal, m_max)
}
