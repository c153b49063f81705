//! Closed-form linear algebra for a single momentum mode.
//!
//! Every mode of the chain is a two-level system, so evolutions and rotations
//! are elements of SU(2) and are evaluated with the half-angle formula
//! `exp(-i θ n·σ) = cos θ I − i sin θ (n·σ)` rather than a general matrix
//! exponential. Units: ħ = 1, coupling J = 1, angles in radians.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Neg};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Real 3-vector `d` of a single-mode Hamiltonian `d·σ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn scale(&self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn unit(&self) -> Option<BlochVector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }

    /// The Hermitian matrix `d·σ`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.z, 0.0), Complex64::new(self.x, -self.y)],
            [Complex64::new(self.x, self.y), Complex64::new(-self.z, 0.0)],
        ]
    }

    /// Reads `d` back from a matrix of the form `d·σ` (traceless Hermitian part).
    pub fn from_matrix(m: &[[Complex64; 2]; 2]) -> BlochVector {
        let off = (m[1][0] + m[0][1].conj()) * 0.5;
        BlochVector::new(off.re, off.im, 0.5 * (m[0][0].re - m[1][1].re))
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;

    fn neg(self) -> BlochVector {
        self.scale(-1.0)
    }
}

impl Add for BlochVector {
    type Output = BlochVector;

    fn add(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

/// Normalized pure state of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState([Complex64; 2]);

impl QubitState {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n2 = a0.norm_sqr() + a1.norm_sqr();
        if !n2.is_finite() || (n2 - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "qubit state has squared norm {n2}, expected 1"
            )));
        }
        Ok(Self([a0, a1]))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self([a0 / n, a1 / n]))
    }

    /// |↑⟩, the +1 eigenstate of σ_z.
    pub fn up() -> Self {
        Self([ONE, ZERO])
    }

    /// |↓⟩
    pub fn down() -> Self {
        Self([ZERO, ONE])
    }

    /// |x⟩ = (|↑⟩ + |↓⟩)/√2
    pub fn plus_x() -> Self {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self([a, a])
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// Expectation of `d·σ`.
    pub fn expect(&self, d: &BlochVector) -> f64 {
        d.dot(&self.bloch_vector())
    }

    /// Bloch vector (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩).
    pub fn bloch_vector(&self) -> BlochVector {
        let [a, b] = self.0;
        let c = a.conj() * b;
        BlochVector::new(2.0 * c.re, 2.0 * c.im, a.norm_sqr() - b.norm_sqr())
    }
}

/// 2×2 unitary acting on one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2([[Complex64; 2]; 2]);

impl Unitary2 {
    pub const UNITARITY_TOLERANCE: f64 = 1e-10;

    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    /// Checked constructor: rejects matrices with `‖U†U − I‖_max` above
    /// [`Self::UNITARITY_TOLERANCE`].
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = Self(entries);
        let dev = u.unitarity_defect();
        if !(dev <= Self::UNITARITY_TOLERANCE) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (max |U†U − I| = {dev:e})"
            )));
        }
        Ok(u)
    }

    /// Wraps entries without checking unitarity.
    pub fn from_entries_unchecked(entries: [[Complex64; 2]; 2]) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// max entrywise |U†U − I|.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        p.max_abs_diff(&Unitary2::identity())
    }

    pub fn max_abs_diff(&self, other: &Unitary2) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let d = (self.0[r][c] - other.0[r][c]).norm();
                worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
            }
        }
        worst
    }

    /// `max_abs_diff` after removing the best-fitting global phase.
    pub fn max_abs_diff_up_to_phase(&self, other: &Unitary2) -> f64 {
        // tr(A†B) carries the relative phase of B with respect to A.
        let mut overlap = ZERO;
        for r in 0..2 {
            for c in 0..2 {
                overlap += self.0[r][c].conj() * other.0[r][c];
            }
        }
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        let aligned = Unitary2(self.0.map(|row| row.map(|z| z * phase)));
        aligned.max_abs_diff(other)
    }

    /// `U (d·σ) U†` expressed as a Bloch vector.
    pub fn conjugate_bloch(&self, d: &BlochVector) -> BlochVector {
        let h = Unitary2::from_entries_unchecked(d.matrix());
        let m = *self * h * self.adjoint();
        BlochVector::from_matrix(&m.0)
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Unitary2(out)
    }
}

impl Mul<QubitState> for Unitary2 {
    type Output = QubitState;

    fn mul(self, psi: QubitState) -> QubitState {
        let m = &self.0;
        let [a, b] = psi.0;
        QubitState([m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b])
    }
}

fn su2_from_half_angle(cos: f64, sin: f64, n: &BlochVector) -> Unitary2 {
    // cos·I − i·sin·(n·σ)
    let s = -I * sin;
    Unitary2([
        [Complex64::new(cos, 0.0) + s * n.z, s * Complex64::new(n.x, -n.y)],
        [s * Complex64::new(n.x, n.y), Complex64::new(cos, 0.0) - s * n.z],
    ])
}

/// `exp(-i (d·σ) t)`; the identity when `d = 0`.
pub fn evolution_unitary(d: &BlochVector, t: f64) -> Result<Unitary2> {
    if !d.is_finite() || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "evolution needs finite inputs (d = {d:?}, t = {t})"
        )));
    }
    match d.unit() {
        None => Ok(Unitary2::identity()),
        Some(n) => {
            let theta = d.norm() * t;
            Ok(su2_from_half_angle(theta.cos(), theta.sin(), &n))
        }
    }
}

/// `exp(-i φ σ_x / 2)`, the single-mode form of `exp(-i φ Ŝ_x)`.
pub fn rotation_x(phi: f64) -> Result<Unitary2> {
    rotation(&BlochVector::new(1.0, 0.0, 0.0), phi)
}

/// Rotation of the Bloch sphere by `angle` about the unit `axis`:
/// `exp(-i angle (axis·σ) / 2)`.
pub fn rotation(axis: &BlochVector, angle: f64) -> Result<Unitary2> {
    if !axis.is_finite() || !angle.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rotation needs finite inputs (axis = {axis:?}, angle = {angle})"
        )));
    }
    let n = axis
        .unit()
        .ok_or_else(|| Error::InvalidArgument("rotation axis must be nonzero".into()))?;
    let half = 0.5 * angle;
    Ok(su2_from_half_angle(half.cos(), half.sin(), &n))
}

/// Eigenvector of `d·σ` with eigenvalue `−|d|`.
///
/// The phase is fixed so the first nonzero amplitude is real and positive.
pub fn ground_state(d: &BlochVector) -> Result<QubitState> {
    if !d.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite Bloch vector {d:?}")));
    }
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::DegenerateHamiltonian);
    }
    // Null vector of d·σ + |d| I from whichever row is better conditioned.
    let (v0, v1) = if d.z >= 0.0 {
        (Complex64::new(d.x, -d.y), Complex64::new(-(d.z + r), 0.0))
    } else {
        (Complex64::new(r - d.z, 0.0), Complex64::new(-d.x, -d.y))
    };
    let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    let (v0, v1) = (v0 / norm, v1 / norm);
    let lead = if v0.norm() > f64::EPSILON { v0 } else { v1 };
    let phase = lead.conj() / lead.norm();
    Ok(QubitState([v0 * phase, v1 * phase]))
}

/// |⟨a|b⟩|²
pub fn fidelity(a: &QubitState, b: &QubitState) -> f64 {
    a.inner(b).norm_sqr()
}

/// ⟨a|σ_x/2|a⟩
pub fn expect_sx(a: &QubitState) -> f64 {
    let [p, q] = a.0;
    (p.conj() * q).re
}
