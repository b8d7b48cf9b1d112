//! Switching-plane geometry of the adjoint vector.
//!
//! With `φ = (φx, φy − μ, φz)` the adjoint dynamics is a rotation,
//! `φ̇ = (ẑ + uŷ) × φ`. A switch happens when the switching function
//! `φy = φ2 + μ` vanishes, i.e. on the plane `φ2 = −μ`. During an "off" pulse
//! `φ` turns about `ẑ`; during an "on" pulse about `n = (ẑ + vŷ)/ω` at rate `ω`.
//! Starting at a switch point `P`, the off arc ends at the mirror image
//! `Q = (−P1, −μ, P3)` and the following on arc ends back at `P`, which is why
//! every off pulse has the same duration and every interior on pulse too.

use core::f64::consts::PI;

#[allow(unused_imports)] // inherent float methods shadow these once std is linked
use num_traits::{Euclid, Float};

use crate::error::{Error, Result};
use crate::su2::{cross3, dot3, norm3, rotate3, OnAxis, Vec3};

pub const PLANE_TOL: f64 = 1e-10;

const Z_AXIS: Vec3 = [0.0, 0.0, 1.0];

/// Adjoint state: the constant area multiplier `μ` and the rotating vector `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointGeometry {
    pub mu: f64,
    pub phi: Vec3,
}

impl AdjointGeometry {
    pub fn new(mu: f64, phi: Vec3) -> Self {
        AdjointGeometry { mu, phi }
    }

    /// `φy`; `u = 0` is optimal where it is positive, `u = v` where negative.
    pub fn switching_function(&self) -> f64 {
        self.phi[1] + self.mu
    }

    /// Squared radius of the sphere the motion is confined to.
    pub fn sphere_invariant(&self) -> f64 {
        dot3(&self.phi, &self.phi)
    }

    pub fn evolve_off(&self, tau: f64) -> Self {
        let phi = rotate3(&Z_AXIS, tau, &self.phi).expect("ẑ is a unit axis");
        AdjointGeometry { phi, ..*self }
    }

    pub fn evolve_on(&self, tau: f64, v: f64) -> Self {
        let OnAxis { omega, ny, nz } = OnAxis::new(v);
        let phi = rotate3(&[0.0, ny, nz], omega * tau, &self.phi).expect("n is a unit axis");
        AdjointGeometry { phi, ..*self }
    }
}

/// Rotation angle about `ẑ` that carries `p` (on the plane) to its mirror
/// image through the `φ2 φ3` plane. Returns `2π` when `p1 = 0`.
pub fn off_return_angle(p: &Vec3) -> f64 {
    let beta = p[1].atan2(p[0]);
    let mut alpha = Euclid::rem_euclid(&(PI - 2.0 * beta), &(2.0 * PI));
    if alpha <= 0.0 {
        alpha = 2.0 * PI;
    }
    alpha
}

/// First positive "on" duration after which the rotation of `q` about `n`
/// meets the plane `φ2 = q2` again. A tangent circle returns after a full turn.
pub fn on_return_time(q: &Vec3, v: f64) -> f64 {
    let OnAxis { omega, ny, nz } = OnAxis::new(v);
    let n = [0.0, ny, nz];
    let along = dot3(&n, q);
    let perp: Vec3 = core::array::from_fn(|i| q[i] - along * n[i]);
    let side = cross3(&n, q);
    // φ2(θ) − q2 = perp2 (cos θ − 1) + side2 sin θ vanishes again at θ = 2δ
    let delta = side[1].atan2(perp[1]);
    let mut angle = Euclid::rem_euclid(&(2.0 * delta), &(2.0 * PI));
    if angle <= 1e-15 {
        angle = 2.0 * PI;
    }
    angle / omega
}

/// Checks the mirror-and-return construction starting at switch point `p`.
///
/// `tau2` must carry `p` back onto the plane under the off rotation and
/// `tau3` must carry the result back onto the plane under the on rotation;
/// otherwise the inputs are rejected. Returns whether the off arc ended at
/// the mirror point and the on arc at `p`, both within [`PLANE_TOL`], with
/// the sphere invariant preserved.
pub fn verify_switch_plane_geometry(mu: f64, p: &Vec3, tau2: f64, tau3: f64, v: f64) -> Result<bool> {
    if (p[1] + mu).abs() > PLANE_TOL {
        return Err(Error::InconsistentGeometry("switch point is not on the plane φ2 = −μ"));
    }
    let start = AdjointGeometry::new(mu, *p);
    let q = start.evolve_off(tau2);
    if q.switching_function().abs() > PLANE_TOL {
        return Err(Error::InconsistentGeometry("off duration does not return to the plane"));
    }
    let back = q.evolve_on(tau3, v);
    if back.switching_function().abs() > PLANE_TOL {
        return Err(Error::InconsistentGeometry("on duration does not return to the plane"));
    }
    let mirror = [-p[0], -mu, p[2]];
    let dist = |a: &Vec3, b: &Vec3| norm3(&core::array::from_fn(|i| a[i] - b[i]));
    let radius = start.sphere_invariant();
    let conserved = (q.sphere_invariant() - radius).abs() <= 1e-12 * radius.max(1.0)
        && (back.sphere_invariant() - radius).abs() <= 1e-12 * radius.max(1.0);
    Ok(dist(&q.phi, &mirror) <= PLANE_TOL && dist(&back.phi, p) <= PLANE_TOL && conserved)
}
