//! SU(2) propagators in the Pauli basis.
//!
//! An operator is stored as the quadruple `(a_I, a_x, a_y, a_z)` with
//! `U = a_I I + a_x σx + a_y σy + a_z σz`. Products are evaluated with the
//! Pauli product rule so no 2×2 matrix is ever formed on the hot path.
//! Products of more than ~10⁴ factors accumulate roundoff and may drift from
//! exact unitarity at the 1e-10 level.

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // inherent float methods shadow these once std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::solver::{PulseKind, PulseSequence};

pub type Vec3 = [f64; 3];
pub type Matrix2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Coefficients of a 2×2 operator over `{I, σx, σy, σz}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Operator {
    pub ai: C64,
    pub ax: C64,
    pub ay: C64,
    pub az: C64,
}

impl Su2Operator {
    pub const IDENTITY: Su2Operator = Su2Operator::new(ONE, ZERO, ZERO, ZERO);
    pub const SIGMA_X: Su2Operator = Su2Operator::new(ZERO, ONE, ZERO, ZERO);
    pub const SIGMA_Y: Su2Operator = Su2Operator::new(ZERO, ZERO, ONE, ZERO);
    pub const SIGMA_Z: Su2Operator = Su2Operator::new(ZERO, ZERO, ZERO, ONE);

    pub const fn new(ai: C64, ax: C64, ay: C64, az: C64) -> Self {
        Su2Operator { ai, ax, ay, az }
    }

    /// Product `self · rhs` via `σa σb = δab I + i εabc σc`.
    pub fn compose(&self, rhs: &Su2Operator) -> Su2Operator {
        let (p0, p) = (self.ai, [self.ax, self.ay, self.az]);
        let (q0, q) = (rhs.ai, [rhs.ax, rhs.ay, rhs.az]);
        let dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
        let cross = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
        let v = |k: usize| p0 * q[k] + q0 * p[k] + I * cross[k];
        Su2Operator::new(p0 * q0 + dot, v(0), v(1), v(2))
    }

    /// Adjoint (conjugate transpose).
    pub fn adjoint(&self) -> Su2Operator {
        Su2Operator::new(self.ai.conj(), self.ax.conj(), self.ay.conj(), self.az.conj())
    }

    pub fn scale(&self, s: C64) -> Su2Operator {
        Su2Operator::new(self.ai * s, self.ax * s, self.ay * s, self.az * s)
    }

    /// `½ Tr(U)`. The other coefficients are `½ Tr(σ_k U)`.
    pub fn half_trace(&self) -> C64 {
        self.ai
    }

    /// Dense 2×2 matrix, row-major.
    pub fn to_matrix(&self) -> Matrix2 {
        [[self.ai + self.az, self.ax - I * self.ay], [self.ax + I * self.ay, self.ai - self.az]]
    }

    /// Inverse of [`to_matrix`](Self::to_matrix).
    pub fn from_matrix(m: &Matrix2) -> Su2Operator {
        let half = C64::new(0.5, 0.0);
        Su2Operator::new(
            (m[0][0] + m[1][1]) * half,
            (m[0][1] + m[1][0]) * half,
            (m[1][0] - m[0][1]) * half * (-I),
            (m[0][0] - m[1][1]) * half,
        )
    }

    pub fn determinant(&self) -> C64 {
        self.ai * self.ai - self.ax * self.ax - self.ay * self.ay - self.az * self.az
    }

    /// Largest entry deviation of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.to_matrix();
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let entry = m[0][r].conj() * m[0][c] + m[1][r].conj() * m[1][c];
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((entry - target).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Su2Operator) -> f64 {
        [
            (self.ai - other.ai).norm(),
            (self.ax - other.ax).norm(),
            (self.ay - other.ay).norm(),
            (self.az - other.az).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Matrix-vector product on a state; the frame tag is carried through.
    pub fn apply(&self, state: &SpinState) -> SpinState {
        let m = self.to_matrix();
        SpinState {
            c1: m[0][0] * state.c1 + m[0][1] * state.c2,
            c2: m[1][0] * state.c1 + m[1][1] * state.c2,
            frame: state.frame,
        }
    }
}

impl core::ops::Mul for Su2Operator {
    type Output = Su2Operator;

    fn mul(self, rhs: Su2Operator) -> Su2Operator {
        self.compose(&rhs)
    }
}

/// Rotation parameters of the constant "on" generator `½σz − (v/2)σy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnAxis {
    pub omega: f64,
    pub ny: f64,
    pub nz: f64,
}

impl OnAxis {
    pub fn new(v: f64) -> Self {
        let omega = (1.0 + v * v).sqrt();
        OnAxis { omega, ny: v / omega, nz: 1.0 / omega }
    }
}

/// `exp(-i H τ)` for the "on" Hamiltonian `½σz − (v/2)σy`.
pub fn on_propagator(tau: f64, v: f64) -> Su2Operator {
    let axis = OnAxis::new(v);
    let half = 0.5 * axis.omega * tau;
    let (s, c) = half.sin_cos();
    Su2Operator::new(C64::new(c, 0.0), ZERO, C64::new(0.0, axis.ny * s), C64::new(0.0, -axis.nz * s))
}

/// `exp(-i τ σz / 2)`.
pub fn off_propagator(tau: f64) -> Su2Operator {
    let (s, c) = (0.5 * tau).sin_cos();
    Su2Operator::new(C64::new(c, 0.0), ZERO, ZERO, C64::new(0.0, -s))
}

/// Time-ordered product of the segment propagators of `seq`.
pub fn sequence_propagator(seq: &PulseSequence) -> Result<Su2Operator> {
    if seq.m < 1 {
        return Err(Error::InvalidSequence("at least one off-pulse is required"));
    }
    let total = seq
        .segments()
        .fold(Su2Operator::IDENTITY, |acc, seg| segment_propagator(seg.kind, seg.tau, seq.v).compose(&acc));
    Ok(total)
}

/// Propagator of a single constant-control segment.
pub fn segment_propagator(kind: PulseKind, tau: f64, v: f64) -> Su2Operator {
    match kind {
        PulseKind::On => on_propagator(tau, v),
        PulseKind::Off => off_propagator(tau),
    }
}

/// `U P U`, written without an adjoint. For the propagators used here this
/// product is what peels one factor off each side of a trace.
pub fn sandwich(u: &Su2Operator, p: &Su2Operator) -> Su2Operator {
    u.compose(p).compose(u)
}

/// Closed form of `U σy U` for an "on" propagator of duration `tau`.
pub fn on_sandwich_sigma_y(tau: f64, v: f64) -> Su2Operator {
    let OnAxis { omega, ny, nz } = OnAxis::new(v);
    let (s, c) = (omega * tau).sin_cos();
    Su2Operator::new(
        C64::new(0.0, ny * s),
        ZERO,
        C64::new(nz * nz + ny * ny * c, 0.0),
        C64::new(ny * nz * (1.0 - c), 0.0),
    )
}

/// Closed form of `U σz U` for an "on" propagator of duration `tau`.
pub fn on_sandwich_sigma_z(tau: f64, v: f64) -> Su2Operator {
    let OnAxis { omega, ny, nz } = OnAxis::new(v);
    let (s, c) = (omega * tau).sin_cos();
    Su2Operator::new(
        C64::new(0.0, -nz * s),
        ZERO,
        C64::new(ny * nz * (1.0 - c), 0.0),
        C64::new(ny * ny + nz * nz * c, 0.0),
    )
}

/// Closed form of `W σz W` for an "off" propagator; `W σy W = σy`.
pub fn off_sandwich_sigma_z(tau: f64) -> Su2Operator {
    let (s, c) = tau.sin_cos();
    Su2Operator::new(C64::new(0.0, -s), ZERO, ZERO, C64::new(c, 0.0))
}

/// Which amplitude basis a [`SpinState`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// `a`: amplitudes on `|0>, |1>`.
    Original,
    /// `b`: amplitudes on the instantaneous eigenstates `|φ+>, |φ->`.
    Adiabatic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub c1: C64,
    pub c2: C64,
    pub frame: Frame,
}

impl SpinState {
    pub fn new(c1: C64, c2: C64, frame: Frame) -> Self {
        SpinState { c1, c2, frame }
    }

    /// `(1, 0)`, i.e. `|φ+>` in the adiabatic frame.
    pub fn up(frame: Frame) -> Self {
        SpinState::new(ONE, ZERO, frame)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    pub fn to_bloch(&self) -> BlochVector {
        state_to_bloch(self)
    }

    pub fn max_abs_diff(&self, other: &SpinState) -> f64 {
        (self.c1 - other.c1).norm().max((self.c2 - other.c2).norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl BlochVector {
    pub fn as_array(&self) -> Vec3 {
        [self.sx, self.sy, self.sz]
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.as_array())
    }
}

impl From<Vec3> for BlochVector {
    fn from(v: Vec3) -> Self {
        BlochVector { sx: v[0], sy: v[1], sz: v[2] }
    }
}

pub fn state_to_bloch(state: &SpinState) -> BlochVector {
    let cross = state.c1.conj() * state.c2;
    BlochVector {
        // b1* b2 + b1 b2* and (b1* b2 − b1 b2*)/i
        sx: 2.0 * cross.re,
        sy: 2.0 * cross.im,
        sz: state.c1.norm_sqr() - state.c2.norm_sqr(),
    }
}

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// Right-handed rotation of `vec` by `angle` about the unit vector `axis`
/// (Rodrigues' formula).
pub fn rotate3(axis: &Vec3, angle: f64, vec: &Vec3) -> Result<Vec3> {
    let n = norm3(axis);
    if !((n - 1.0).abs() <= 1e-10) {
        return Err(Error::NonUnitAxis { norm: n });
    }
    let (s, c) = angle.sin_cos();
    let kxv = cross3(axis, vec);
    let kdv = dot3(axis, vec);
    Ok(core::array::from_fn(|i| vec[i] * c + kxv[i] * s + axis[i] * kdv * (1.0 - c)))
}
