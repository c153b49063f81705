//! State vectors and the matrix-free TFIM Hamiltonian on `2^N` basis states.
//!
//! Basis index bit `i` is site `i`; a zero bit is spin up (`σ^z = +1`).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain handled by the oracle.
pub const MAX_SPINS: usize = 14;

const NORM_TOLERANCE: f64 = 1e-10;

pub(crate) fn check_size(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_SPINS {
        return Err(Error::ResourceGuard { n });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl ChainState {
    /// Checked constructor: length `2^n`, unit norm within 1e-10.
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_size(n, 1)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes given for {n} spins (need {})",
                amplitudes.len(),
                1usize << n
            )));
        }
        let state = Self { n, amplitudes };
        let norm = state.norm_sqr();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::InvalidArgument(format!("state has squared norm {norm}, expected 1")));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(n: usize, amplitudes: Vec<Complex64>) -> Self {
        Self { n, amplitudes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &ChainState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Applies `e^{−iφσ^x/2}` to every site.
    pub fn rotate_x(&mut self, phi: f64) {
        let (c, s) = ((0.5 * phi).cos(), (0.5 * phi).sin());
        let mis = Complex64::new(0.0, -s);
        for site in 0..self.n {
            let bit = 1usize << site;
            for idx in 0..self.amplitudes.len() {
                if idx & bit == 0 {
                    let a = self.amplitudes[idx];
                    let b = self.amplitudes[idx | bit];
                    self.amplitudes[idx] = a * c + b * mis;
                    self.amplitudes[idx | bit] = a * mis + b * c;
                }
            }
        }
    }

    /// `⟨σ^x_i σ^x_j⟩` summed over `pairs`.
    pub fn expect_xx(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs
            .iter()
            .map(|&(i, j)| {
                let mask = (1usize << i) ^ (1usize << j);
                self.amplitudes
                    .iter()
                    .enumerate()
                    .map(|(s, a)| (a.conj() * self.amplitudes[s ^ mask]).re)
                    .sum::<f64>()
            })
            .sum()
    }

    /// `⟨S_x⟩ = ½ Σ_i ⟨σ^x_i⟩`
    pub fn expect_sx_total(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let bit = 1usize << i;
                self.amplitudes
                    .iter()
                    .enumerate()
                    .map(|(s, a)| (a.conj() * self.amplitudes[s ^ bit]).re)
                    .sum::<f64>()
            })
            .sum::<f64>()
            * 0.5
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    #[default]
    Periodic,
    Open,
}

/// `H = −Σ_{(i,j)∈bonds} σ^x_i σ^x_j − g Σ_i σ^z_i`, applied without storing a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    n: usize,
    g: f64,
    bonds: Vec<(usize, usize)>,
}

impl ChainOperator {
    pub fn new(n: usize, g: f64, bc: BoundaryCondition) -> Result<Self> {
        check_size(n, 2)?;
        let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        // For n = 2 the wrap-around bond doubles the single bond.
        if bc == BoundaryCondition::Periodic {
            bonds.push((n - 1, 0));
        }
        Self::with_bonds(n, g, bonds)
    }

    /// Arbitrary `σ^xσ^x` bond list, e.g. a relabeled chain.
    pub fn with_bonds(n: usize, g: f64, bonds: Vec<(usize, usize)>) -> Result<Self> {
        check_size(n, 2)?;
        if !g.is_finite() {
            return Err(Error::InvalidArgument(format!("field g = {g} must be finite")));
        }
        if let Some(&(i, j)) = bonds.iter().find(|&&(i, j)| i >= n || j >= n || i == j) {
            return Err(Error::InvalidArgument(format!("bond ({i}, {j}) is invalid for {n} spins")));
        }
        Ok(Self { n, g, bonds })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    fn masks(&self) -> Vec<usize> {
        self.bonds.iter().map(|&(i, j)| (1usize << i) | (1usize << j)).collect()
    }

    fn diagonal(&self, s: usize) -> f64 {
        -self.g * (self.n as f64 - 2.0 * s.count_ones() as f64)
    }

    /// `out = H v`
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        let masks = self.masks();
        out.par_iter_mut().enumerate().with_min_len(256).for_each(|(s, o)| {
            let mut acc = v[s] * self.diagonal(s);
            for m in &masks {
                acc -= v[s ^ m];
            }
            *o = acc;
        });
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    /// ⟨ψ|H|ψ⟩
    pub fn expectation(&self, state: &ChainState) -> f64 {
        inner(state.amplitudes(), &self.apply(state.amplitudes())).re
    }

    /// Upper bound on the spectral radius.
    pub fn spectral_bound(&self) -> f64 {
        self.bonds.len() as f64 + self.n as f64 * self.g.abs()
    }

    /// Dense real symmetric matrix of `H`.
    pub fn dense(&self) -> nalgebra::DMatrix<f64> {
        let dim = self.dim();
        let masks = self.masks();
        let mut m = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for s in 0..dim {
            m[(s, s)] += self.diagonal(s);
            for mask in &masks {
                m[(s ^ mask, s)] -= 1.0;
            }
        }
        m
    }
}

/// `|+⟩^{⊗N}`, the ground state of the `g = 0` chain.
pub fn initial_chain_state(n: usize) -> Result<ChainState> {
    check_size(n, 1)?;
    let a = Complex64::new((0.5f64).powf(0.5 * n as f64), 0.0);
    Ok(ChainState::from_raw(n, vec![a; 1 << n]))
}
