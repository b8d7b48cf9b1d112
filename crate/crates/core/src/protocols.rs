//! Boundary conditions, the constant-control Roland-Cerf protocol and its
//! perfect-transfer resonances, and the duration bounds.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent float methods shadow these once std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Angles closer than this to 0 or π are rejected: the detuning `Ω cot θ`
/// diverges there.
pub const ANGLE_MARGIN: f64 = 1e-9;

pub const DEFAULT_K_MAX: usize = 10;

/// Initial and final field angles and the (constant) Rabi frequency.
///
/// Physical times derived from these are in units of `1/Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub theta_i: f64,
    pub theta_f: f64,
    pub omega_rabi: f64,
}

impl BoundaryConditions {
    pub fn new(theta_i: f64, theta_f: f64, omega_rabi: f64) -> Result<Self> {
        if !(omega_rabi.is_finite() && omega_rabi > 0.0) {
            return Err(Error::InvalidArgument { name: "omega_rabi", value: omega_rabi });
        }
        let inside = |th: f64| (ANGLE_MARGIN..=PI - ANGLE_MARGIN).contains(&th);
        if !(inside(theta_i) && inside(theta_f) && theta_f < theta_i) {
            return Err(Error::InvalidBoundary { theta_i, theta_f });
        }
        Ok(BoundaryConditions { theta_i, theta_f, omega_rabi })
    }

    /// Builds the boundary angles from detunings through `cot θ = Δ/Ω`.
    pub fn from_detunings(delta_i: f64, delta_f: f64, omega_rabi: f64) -> Result<Self> {
        if !(omega_rabi.is_finite() && omega_rabi > 0.0) {
            return Err(Error::InvalidArgument { name: "omega_rabi", value: omega_rabi });
        }
        let theta_i = angle_from_detuning(delta_i, omega_rabi);
        let theta_f = angle_from_detuning(delta_f, omega_rabi);
        BoundaryConditions::new(theta_i, theta_f, omega_rabi)
    }

    /// The Δ = ∓10Ω sweep used as the reference scenario throughout.
    pub fn symmetric_ten_omega() -> Self {
        let theta_f = (0.1).atan();
        BoundaryConditions { theta_i: PI - theta_f, theta_f, omega_rabi: 1.0 }
    }

    /// Total angle change `θi − θf`, which equals the required pulse area.
    pub fn delta_theta(&self) -> f64 {
        self.theta_i - self.theta_f
    }

    pub fn theta_mean(&self) -> f64 {
        0.5 * (self.theta_i + self.theta_f)
    }

    pub fn delta_i(&self) -> f64 {
        detuning_from_angle(self.theta_i, self.omega_rabi)
    }

    pub fn delta_f(&self) -> f64 {
        detuning_from_angle(self.theta_f, self.omega_rabi)
    }
}

/// `θ = arccot(Δ/Ω)` on the branch `(0, π)`.
pub fn angle_from_detuning(delta: f64, omega_rabi: f64) -> f64 {
    omega_rabi.atan2(delta)
}

pub fn detuning_from_angle(theta: f64, omega_rabi: f64) -> f64 {
    omega_rabi * theta.cos() / theta.sin()
}

/// Field angle at time `t` under a constant local adiabaticity parameter `u`.
pub fn rc_theta_profile(t: f64, u: f64, bc: &BoundaryConditions) -> Result<f64> {
    let arg = bc.theta_i.cos() + u * bc.omega_rabi * t;
    if !(-1.0..=1.0).contains(&arg) {
        return Err(Error::InvalidArgument { name: "cos(theta)", value: arg });
    }
    Ok(arg.acos())
}

/// Constant-control amplitude/duration pair that returns the adiabatic state
/// exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcResonance {
    pub k: usize,
    pub u: f64,
    /// Rescaled duration.
    pub t_rescaled: f64,
    /// Physical duration in units of `1/Ω`.
    pub t_physical: f64,
}

impl RcResonance {
    /// `|T√(1+u²) − 2kπ|`.
    pub fn return_residual(&self) -> f64 {
        (self.t_rescaled * (1.0 + self.u * self.u).sqrt() - 2.0 * PI * self.k as f64).abs()
    }

    /// `|uT − Δθ|`.
    pub fn area_residual(&self, bc: &BoundaryConditions) -> f64 {
        (self.u * self.t_rescaled - bc.delta_theta()).abs()
    }
}

pub fn rc_resonance(bc: &BoundaryConditions, k: usize) -> Result<RcResonance> {
    if k == 0 {
        return Err(Error::InvalidArgument { name: "k", value: 0.0 });
    }
    let period = 2.0 * PI * k as f64;
    let x = bc.delta_theta() / period;
    let root = (1.0 - x * x).sqrt();
    let u = x / root;
    Ok(RcResonance {
        k,
        u,
        t_rescaled: period * root,
        t_physical: (bc.theta_f.cos() - bc.theta_i.cos()) / (u * bc.omega_rabi),
    })
}

pub fn rc_resonances(bc: &BoundaryConditions, k_max: usize) -> Result<Vec<RcResonance>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument { name: "k_max", value: 0.0 });
    }
    (1..=k_max).map(|k| rc_resonance(bc, k)).collect()
}

/// Lower bounds on the transfer time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationBounds {
    /// Always π.
    pub t0_rescaled: f64,
    /// `sin θ̄ · π/Ω`, reached with two instantaneous jumps of θ.
    pub t0_physical: f64,
    /// `(θi − θf)/Ω`, reached only with unbounded detuning.
    pub t_qsl_physical: f64,
    pub theta_mean: f64,
}

pub fn compute_bounds(bc: &BoundaryConditions) -> DurationBounds {
    let theta_mean = bc.theta_mean();
    DurationBounds {
        t0_rescaled: PI,
        t0_physical: theta_mean.sin() * PI / bc.omega_rabi,
        t_qsl_physical: bc.delta_theta() / bc.omega_rabi,
        theta_mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn ten_omega_detunings() {
        let bc = BoundaryConditions::from_detunings(-10.0, 10.0, 1.0).unwrap();
        assert!((bc.theta_f - (0.1f64).atan()).abs() < 1e-15);
        assert!((bc.theta_i - (PI - bc.theta_f)).abs() < 1e-15);
        let reference = BoundaryConditions::symmetric_ten_omega();
        assert!((bc.theta_f - reference.theta_f).abs() < 1e-15);
        assert!((bc.theta_i - reference.theta_i).abs() < 1e-15);
    }

    #[test]
    fn zero_detuning_is_right_angle() {
        let bc = BoundaryConditions::from_detunings(0.0, 1.0, 1.0).unwrap();
        assert_eq!(bc.theta_i, FRAC_PI_2);
    }

    #[test]
    fn unit_detunings() {
        let bc = BoundaryConditions::from_detunings(-1.0, 1.0, 1.0).unwrap();
        assert!((bc.theta_i - 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((bc.theta_f - PI / 4.0).abs() < 1e-15);
        // Ω scales out
        let scaled = BoundaryConditions::from_detunings(-2.5, 2.5, 2.5).unwrap();
        assert!((scaled.theta_i - bc.theta_i).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_boundaries() {
        assert!(BoundaryConditions::new(2.3, 2.4, 1.0).is_err());
        assert!(BoundaryConditions::new(1.0, 1.0, 1.0).is_err());
        assert!(BoundaryConditions::new(PI, 0.5, 1.0).is_err());
        assert!(BoundaryConditions::new(2.0, 1e-12, 1.0).is_err());
        assert!(BoundaryConditions::new(2.0, 1.0, 0.0).is_err());
        assert!(BoundaryConditions::from_detunings(10.0, -10.0, 1.0).is_err());
    }

    #[test]
    fn theta_profile_endpoints() {
        let bc = BoundaryConditions::new(3.0 * PI / 4.0, PI / 4.0, 1.0).unwrap();
        assert_eq!(rc_theta_profile(0.0, 0.5, &bc).unwrap(), bc.theta_i);
        let t_end = (bc.theta_f.cos() - bc.theta_i.cos()) / 0.5;
        assert!((rc_theta_profile(t_end, 0.5, &bc).unwrap() - bc.theta_f).abs() < 1e-12);
        let mid = rc_theta_profile(1.0, 0.5, &bc).unwrap();
        assert!((mid - (-(2.0f64).sqrt() / 2.0 + 0.5).acos()).abs() < 1e-15);
        assert!(rc_theta_profile(10.0, 0.5, &bc).is_err());
    }

    #[test]
    fn first_resonance_reference_case() {
        let bc = BoundaryConditions::symmetric_ten_omega();
        assert!((bc.delta_theta() - 2.9422553).abs() < 1e-7);
        let r = rc_resonance(&bc, 1).unwrap();
        // direct evaluation: x = Δθ/2π, u = x/√(1−x²), T = 2π√(1−x²)
        assert!((r.u - 0.529_972_232_662_924).abs() < 1e-12);
        assert!((r.t_rescaled - 5.551_716_047_128_867).abs() < 1e-12);
        assert!(r.return_residual() < 1e-12);
        assert!(r.area_residual(&bc) < 1e-12);
    }

    #[test]
    fn resonance_asymptotics() {
        let bc = BoundaryConditions::symmetric_ten_omega();
        let r = rc_resonance(&bc, 10_000).unwrap();
        let period = 2.0 * PI * 10_000.0;
        assert!((r.u - bc.delta_theta() / period).abs() < 1e-12);
        assert!((r.t_rescaled / period - 1.0).abs() < 1e-8);
    }

    #[test]
    fn resonances_are_monotone() {
        let bc = BoundaryConditions::new(2.0, 0.4, 1.0).unwrap();
        let rs = rc_resonances(&bc, DEFAULT_K_MAX).unwrap();
        assert_eq!(rs.len(), DEFAULT_K_MAX);
        for w in rs.windows(2) {
            assert!(w[1].u < w[0].u);
            assert!(w[1].t_rescaled > w[0].t_rescaled);
        }
        assert!(rc_resonances(&bc, 0).is_err());
    }

    #[test]
    fn bounds() {
        let bc = BoundaryConditions::symmetric_ten_omega();
        let b = compute_bounds(&bc);
        assert_eq!(b.t0_rescaled, PI);
        assert_eq!(b.t0_physical, PI);
        assert!(b.t_qsl_physical <= b.t0_physical);

        let bc = BoundaryConditions::new(3.0 * PI / 4.0, PI / 4.0, 1.0).unwrap();
        let b = compute_bounds(&bc);
        assert!((b.t_qsl_physical - FRAC_PI_2).abs() < 1e-15);
        assert!((b.t0_physical - PI).abs() < 1e-15);

        let b = compute_bounds(&BoundaryConditions::new(2.5, 0.3, 2.0).unwrap());
        assert_eq!(b.t0_rescaled, PI);
    }
}
