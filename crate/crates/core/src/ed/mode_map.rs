//! Chain quantities that coincide exactly with the momentum-space model on
//! the anti-periodic grid.
//!
//! The momentum modes describe the even fermion-parity sector, whose
//! `g_i = 0` ground state is `|e⟩ = (|+⟩^{⊗N} + |−⟩^{⊗N})/√2`. A pair of modes
//! `±k` shares one two-level system with twice the mode energy, so the chain
//! runs for `t/2`, and the per-mode rotation `R_x(φ)` lifts to
//! `e^{−iφK}` with `K = ¼ Σ_bonds σ^xσ^x`. Under this map
//!
//! - `f_abc(t) = −(2/N) log|⟨e|e^{−iHt/2}|e⟩|²`,
//! - the product-aggregated fidelity equals `|⟨e|ψ_f⟩|⁴`,
//! - the mean magnetization equals `⟨Σ_bonds σ^xσ^x⟩/(2N)`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::chain::{check_size, BoundaryCondition, ChainOperator, ChainState};
use super::propagator::{ChainPropagator, Method};
use super::{EchoSample, EdRate};
use crate::error::Result;

/// `(|+⟩^{⊗N} + |−⟩^{⊗N})/√2`: amplitude `2^{(1−N)/2}` on even-popcount basis states.
pub fn even_parity_state(n: usize) -> Result<ChainState> {
    check_size(n, 1)?;
    let a = (0.5f64).powf(0.5 * (n as f64 - 1.0));
    let amps = (0..1usize << n)
        .map(|s| Complex64::new(if s.count_ones() % 2 == 0 { a } else { 0.0 }, 0.0))
        .collect();
    Ok(ChainState::from_raw(n, amps))
}

/// Normalized Walsh–Hadamard transform on all sites (self-inverse).
fn hadamard_all(v: &mut [Complex64]) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = (a + b) * s;
                v[i + h] = (a - b) * s;
            }
        }
        h *= 2;
    }
}

/// `e^{−iφK}`, `K = ¼ Σ_bonds σ^x_i σ^x_j`, diagonal in the `σ^x` basis.
fn apply_bond_rotation(state: &mut ChainState, bonds: &[(usize, usize)], phi: f64) {
    let v = state.amplitudes_mut();
    hadamard_all(v);
    for (s, a) in v.iter_mut().enumerate() {
        let k: f64 = bonds
            .iter()
            .map(|&(i, j)| if ((s >> i) ^ (s >> j)) & 1 == 0 { 0.25 } else { -0.25 })
            .sum();
        *a *= Complex64::from_polar(1.0, -phi * k);
    }
    hadamard_all(v);
}

/// `−(2/N) log|⟨e|e^{−iHt/2}|e⟩|²` for each time.
pub fn rate_series_mode_map(n: usize, g_f: f64, times: &[f64], bc: BoundaryCondition) -> Result<Vec<EdRate>> {
    let op = ChainOperator::new(n, g_f, bc)?;
    let e = even_parity_state(n)?;
    let prop = ChainPropagator::new(&op, Method::Auto);
    times
        .par_iter()
        .map(|&t| {
            let psi = prop.evolve(&e, 0.5 * t)?;
            Ok(EdRate::from_probability(e.inner(&psi).norm_sqr(), n, 2.0))
        })
        .collect()
}

pub fn rate_function_mode_map(n: usize, g_f: f64, t: f64, bc: BoundaryCondition) -> Result<EdRate> {
    Ok(rate_series_mode_map(n, g_f, &[t], bc)?[0])
}

/// Chain echo in the image of the momentum-mode protocol.
#[derive(Debug, Clone)]
pub struct ModeMapOracle {
    n: usize,
    bonds: Vec<(usize, usize)>,
    psi0: ChainState,
    prop: ChainPropagator,
}

impl ModeMapOracle {
    pub fn new(n: usize, g_f: f64, bc: BoundaryCondition) -> Result<Self> {
        let op = ChainOperator::new(n, g_f, bc)?;
        Ok(Self {
            n,
            bonds: op.bonds().to_vec(),
            psi0: even_parity_state(n)?,
            prop: ChainPropagator::new(&op, Method::Auto),
        })
    }

    /// Product-aggregated fidelity and mean magnetization of the momentum
    /// protocol at every `φ` in `phis`.
    pub fn row(&self, t: f64, phis: &[f64]) -> Result<Vec<EchoSample>> {
        let forward = self.prop.evolve(&self.psi0, 0.5 * t)?;
        phis.par_iter()
            .map(|&phi| {
                let mut psi = forward.clone();
                apply_bond_rotation(&mut psi, &self.bonds, phi);
                let out = self.prop.evolve(&psi, -0.5 * t)?;
                Ok(EchoSample {
                    fidelity: self.psi0.inner(&out).norm_sqr().powi(2),
                    magnetization: out.expect_xx(&self.bonds) / (2.0 * self.n as f64),
                })
            })
            .collect()
    }

    pub fn sample(&self, t: f64, phi: f64) -> Result<EchoSample> {
        Ok(self.row(t, &[phi])?[0])
    }
}

pub fn echo_chain_mode_map(n: usize, g_f: f64, t: f64, phi: f64, bc: BoundaryCondition) -> Result<EchoSample> {
    ModeMapOracle::new(n, g_f, bc)?.sample(t, phi)
}
