//! `e^{−iHt}` on chain states: dense eigendecomposition or a Chebyshev series.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::chain::{ChainOperator, ChainState};
use crate::error::{Error, Result};

/// Largest chain evolved densely under [`Method::Auto`].
pub const DENSE_MAX_SPINS: usize = 10;

/// Target truncation error of the Chebyshev series.
pub const CHEBYSHEV_TOLERANCE: f64 = 1e-12;

/// Largest `a·Δt` covered by one Chebyshev step.
const MAX_STEP_PHASE: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dense up to [`DENSE_MAX_SPINS`], Chebyshev above.
    #[default]
    Auto,
    Dense,
    Chebyshev,
}

/// Bessel functions `J_0(x) … J_{k_max}(x)` by Miller's backward recurrence,
/// normalized with `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_sequence(x: f64, k_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; k_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let start = {
        let m = k_max.max(ax.ceil() as usize) + 40 + (160.0 * (k_max as f64 + ax)).sqrt() as usize;
        m + m % 2
    };
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut even_sum = 0.0;
    let mut j0 = 0.0;
    for k in (0..=start).rev() {
        if k <= k_max {
            out[k] = cur;
        }
        if k == 0 {
            j0 = cur;
        } else if k % 2 == 0 {
            even_sum += cur;
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            even_sum *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    let norm = j0 + 2.0 * even_sum;
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        // J_k(−x) = (−1)^k J_k(x)
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// Precomputed eigendecomposition `H = V diag(E) Vᵀ`.
#[derive(Debug, Clone)]
pub struct DensePropagator {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl DensePropagator {
    pub fn new(op: &ChainOperator) -> Self {
        let eig = SymmetricEigen::new(op.dense());
        Self { energies: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn evolve(&self, state: &ChainState, t: f64) -> ChainState {
        let amps = state.amplitudes();
        let re = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.re));
        let im = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.im));
        let cre = self.vectors.tr_mul(&re);
        let cim = self.vectors.tr_mul(&im);
        let mut pre = DVector::zeros(amps.len());
        let mut pim = DVector::zeros(amps.len());
        for i in 0..amps.len() {
            let c = Complex64::new(cre[i], cim[i]) * Complex64::from_polar(1.0, -self.energies[i] * t);
            pre[i] = c.re;
            pim[i] = c.im;
        }
        let ore = &self.vectors * pre;
        let oim = &self.vectors * pim;
        let out = ore.iter().zip(oim.iter()).map(|(r, i)| Complex64::new(*r, *i)).collect();
        ChainState::from_raw(state.n(), out)
    }
}

/// Chebyshev expansion `e^{−iHt} = Σ_k c_k T_k(H/a)` with
/// `c_0 = J_0(at)`, `c_k = 2(−i)^k J_k(at)`.
#[derive(Debug, Clone)]
pub struct ChebyshevPropagator {
    op: ChainOperator,
    scale: f64,
}

impl ChebyshevPropagator {
    pub fn new(op: &ChainOperator) -> Self {
        let scale = 1.01 * op.spectral_bound().max(1e-3);
        Self { op: op.clone(), scale }
    }

    fn step(&self, v: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
        let x = self.scale * dt;
        let k_max = (x.abs() + 12.0 * x.abs().cbrt() + 30.0).ceil() as usize;
        let bessel = bessel_j_sequence(x, k_max + 2);
        let tail: f64 = bessel[k_max - 1..].iter().map(|b| 2.0 * b.abs()).sum();
        if !(tail <= CHEBYSHEV_TOLERANCE) {
            return Err(Error::NumericalFailure {
                what: format!("Chebyshev series did not converge in {k_max} terms"),
                residual: tail,
            });
        }
        let inv = 1.0 / self.scale;
        let dim = v.len();
        let mut t_prev = v.to_vec();
        let mut t_cur = self.op.apply(v);
        t_cur.iter_mut().for_each(|z| *z *= inv);
        let mut out: Vec<Complex64> = v.iter().map(|z| z * bessel[0]).collect();
        let mut phase = Complex64::new(0.0, -1.0);
        let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
        for (k, b) in bessel.iter().enumerate().take(k_max + 1).skip(1) {
            let c = phase * (2.0 * b);
            for (o, t) in out.iter_mut().zip(&t_cur) {
                *o += c * t;
            }
            if k == k_max {
                break;
            }
            // T_{k+1} = 2(H/a)T_k − T_{k−1}
            self.op.apply_into(&t_cur, &mut scratch);
            for (p, s) in t_prev.iter_mut().zip(&scratch) {
                *p = s * (2.0 * inv) - *p;
            }
            std::mem::swap(&mut t_prev, &mut t_cur);
            phase *= Complex64::new(0.0, -1.0);
        }
        Ok(out)
    }

    pub fn evolve(&self, state: &ChainState, t: f64) -> Result<ChainState> {
        let steps = ((self.scale * t.abs()) / MAX_STEP_PHASE).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let mut v = state.amplitudes().to_vec();
        for _ in 0..steps {
            v = self.step(&v, dt)?;
        }
        Ok(ChainState::from_raw(state.n(), v))
    }
}

#[derive(Debug, Clone)]
pub enum ChainPropagator {
    Dense(DensePropagator),
    Chebyshev(ChebyshevPropagator),
}

impl ChainPropagator {
    pub fn new(op: &ChainOperator, method: Method) -> Self {
        match method {
            Method::Dense => Self::Dense(DensePropagator::new(op)),
            Method::Chebyshev => Self::Chebyshev(ChebyshevPropagator::new(op)),
            Method::Auto if op.n() <= DENSE_MAX_SPINS => Self::Dense(DensePropagator::new(op)),
            Method::Auto => Self::Chebyshev(ChebyshevPropagator::new(op)),
        }
    }

    /// `e^{−iHt}|ψ⟩`; negative `t` runs the evolution backwards.
    pub fn evolve(&self, state: &ChainState, t: f64) -> Result<ChainState> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time {t} must be finite")));
        }
        if t == 0.0 {
            return Ok(state.clone());
        }
        let out = match self {
            Self::Dense(p) => p.evolve(state, t),
            Self::Chebyshev(p) => p.evolve(state, t)?,
        };
        let drift = (out.norm_sqr() - state.norm_sqr()).abs();
        if !(drift <= 1e-9) {
            return Err(Error::NumericalFailure { what: "norm not preserved".into(), residual: drift });
        }
        Ok(out)
    }
}

/// `e^{−iHt}|ψ⟩` with the default method for the chain size.
pub fn evolve_chain(state: &ChainState, op: &ChainOperator, t: f64) -> Result<ChainState> {
    if state.n() != op.n() {
        return Err(Error::InvalidArgument(format!(
            "state has {} spins, operator {}",
            state.n(),
            op.n()
        )));
    }
    ChainPropagator::new(op, Method::Auto).evolve(state, t)
}
