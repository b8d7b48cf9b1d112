//! The three conditions that fix a bang-bang sequence: pulse area, the PMP
//! optimality relation between `tau1, tau2, tau3`, and return to `|φ+>`.

use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // inherent float methods shadow these once std is linked
use num_traits::Float;

use super::PulseSequence;
use crate::error::{Error, Result};
use crate::su2::{sequence_propagator, OnAxis, Vec3};

/// Below this magnitude `A` and `B` are treated as zero.
pub const AB_ZERO: f64 = 1e-14;

/// Coefficients of the optimality condition `A sin τ2 + B (1 − cos τ2) = 0`.
///
/// `A = n_z (1 − cos ωτ3)`,
/// `B = n_y² sin ωτ1 + n_z² sin ωτ3 + n_y² sin ω(τ3 − τ1)`.
///
/// Both follow from expanding `det(ŷ − y1, ŷ − y2, s(τ1 + τ2)) = 0` with the
/// exact `s(τ1 + τ2)` of [`bloch_after_on_off`]; the determinant equals
/// `(A sin τ2 + B (1 − cos τ2)) / ω`.
pub fn optimality_ab(tau1: f64, tau3: f64, v: f64) -> (f64, f64) {
    let OnAxis { omega, ny, nz } = OnAxis::new(v);
    let a = nz * (1.0 - (omega * tau3).cos());
    let b = ny * ny * (omega * tau1).sin() + nz * nz * (omega * tau3).sin() + ny * ny * (omega * (tau3 - tau1)).sin();
    (a, b)
}

/// Left-hand side of the optimality condition.
pub fn optimality_residual(tau1: f64, tau2: f64, tau3: f64, v: f64) -> f64 {
    let (a, b) = optimality_ab(tau1, tau3, v);
    a * tau2.sin() + b * (1.0 - tau2.cos())
}

/// `τ2 = 2 arccot(−B/A)` with `arccot` on `(0, π)`, so `τ2 ∈ (0, 2π)`.
pub fn tau2_from_optimality(tau1: f64, tau3: f64, v: f64) -> Result<f64> {
    let (a, b) = optimality_ab(tau1, tau3, v);
    tau2_from_ab(a, b)
}

pub fn tau2_from_ab(a: f64, b: f64) -> Result<f64> {
    if a.abs() <= AB_ZERO {
        return if b.abs() <= AB_ZERO { Err(Error::Unconstrained) } else { Err(Error::DegenerateBranch { b }) };
    }
    // arccot(x) = atan2(1, x); scale both arguments by |A| to avoid B/A.
    let half = if a > 0.0 { a.atan2(-b) } else { (-a).atan2(b) };
    Ok(2.0 * half)
}

/// `τ1 = ½ [Δθ/v − (m − 1) τ3]`.
pub fn tau1_from_area(tau3: f64, m: usize, v: f64, delta_theta: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::InvalidArgument { name: "v", value: v });
    }
    if m < 1 {
        return Err(Error::InvalidSequence("at least one off-pulse is required"));
    }
    let interior = if m == 1 { 0.0 } else { (m - 1) as f64 * tau3 };
    let tau1 = 0.5 * (delta_theta / v - interior);
    if !(tau1 > 0.0) {
        return Err(Error::InvalidArgument { name: "tau1", value: tau1 });
    }
    Ok(tau1)
}

/// Closed-form `a_y = ½ Tr(σy U)` for one, two or three off-pulses.
pub fn ay_closed_form(m: usize, tau1: f64, tau2: f64, tau3: f64, v: f64) -> Result<C64> {
    let OnAxis { omega, ny, nz } = OnAxis::new(v);
    let (s1, c1) = (omega * tau1).sin_cos();
    let (s3, c3) = (omega * tau3).sin_cos();
    let (s2, c2) = tau2.sin_cos();
    let (sh2, ch2) = (0.5 * tau2).sin_cos();
    let value = match m {
        1 => {
            let (sh1, ch1) = (0.5 * omega * tau1).sin_cos();
            2.0 * ny * sh1 * (ch1 * ch2 - nz * sh1 * sh2)
        }
        2 => {
            let (sh3, ch3) = (0.5 * omega * tau3).sin_cos();
            ny * ch3 * (s1 * c2 - nz * s2 * (1.0 - c1))
                + ny * sh3 * (c1 + nz * (-s1 * s2 + nz * (1.0 - c1) * (1.0 - c2)))
        }
        3 => {
            let first = s1 * c2 - nz * s2 * (1.0 - c1);
            let second = -s1 * s2 + nz * (1.0 - c1) * (1.0 - c2);
            ny * (ch2 * c3 - nz * sh2 * s3) * first
                + ny * (nz * ch2 * s3 + sh2 * (ny * ny + nz * nz * c3)) * second
                + ny * (c1 * ch2 * s3 - nz * sh2 * (1.0 - c1 * c3))
        }
        other => return Err(Error::UnsupportedOffCount(other)),
    };
    Ok(C64::new(0.0, value))
}

/// `a_y` of the full sequence propagator, any `m`.
pub fn ay_generic(seq: &PulseSequence) -> Result<C64> {
    Ok(sequence_propagator(seq)?.ay)
}

/// Bloch vector after the first "on" pulse and the first "off" pulse,
/// starting from the north pole: `exp(τ2 Z) exp(τ1 (Z − vY)) ẑ`.
pub fn bloch_after_on_off(tau1: f64, tau2: f64, v: f64) -> Vec3 {
    let OnAxis { omega, ny, nz } = OnAxis::new(v);
    let (s1, c1) = (omega * tau1).sin_cos();
    let (s2, c2) = tau2.sin_cos();
    let tilt = ny * nz * (1.0 - c1);
    [-ny * s1 * c2 + tilt * s2, -ny * s1 * s2 - tilt * c2, nz * nz + ny * ny * c1]
}

/// Smallest `τ2 ∈ [0, 2π)` with `a_{y,1}(τ1, τ2) = 0`, i.e.
/// `tan(τ2/2) = cot(ωτ1/2) / n_z`.
///
/// Returns `None` when `sin(ωτ1/2) = 0`: then `a_{y,1}` vanishes for every
/// `τ2` and the infimum is the constant-control sequence `τ2 = 0`, which the
/// caller handles as a resonance.
pub fn single_off_tau2(tau1: f64, v: f64) -> Option<f64> {
    let OnAxis { omega, nz, .. } = OnAxis::new(v);
    let (sh, ch) = (0.5 * omega * tau1).sin_cos();
    if sh.abs() <= AB_ZERO {
        return None;
    }
    // τ2/2 = atan2(cos, n_z sin) folded into [0, π)
    let (num, den) = if sh > 0.0 { (ch, nz * sh) } else { (-ch, -nz * sh) };
    let mut half = num.atan2(den);
    if half < 0.0 {
        half += PI;
    }
    let tau2 = 2.0 * half;
    // Roundoff on a root that sits exactly at τ2 = 0 can land it at 2π⁻.
    Some(if 2.0 * PI - tau2 <= super::RESONANCE_SNAP { 0.0 } else { tau2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::rotate3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ab_vanish_without_interior_pulse() {
        for (t1, v) in [(0.3, 0.2), (2.0, 1.5), (5.0, 0.35)] {
            let (a, b) = optimality_ab(t1, 0.0, v);
            assert_eq!(a, 0.0);
            assert!(b.abs() < 1e-15);
        }
    }

    #[test]
    fn ab_without_control() {
        let tau3 = 1.1;
        let (a, b) = optimality_ab(0.7, tau3, 0.0);
        // n_y = 0, n_z = 1
        assert!((a - (1.0 - tau3.cos())).abs() < 1e-15);
        assert!((b - tau3.sin()).abs() < 1e-15);
    }

    #[test]
    fn tau2_branches() {
        assert!((tau2_from_ab(0.8, 0.0).unwrap() - PI).abs() < 1e-15);
        assert!((tau2_from_ab(0.8, 0.8).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert!((tau2_from_ab(-0.8, -0.8).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(tau2_from_ab(0.0, 0.0), Err(Error::Unconstrained));
        assert!(matches!(tau2_from_ab(0.0, 0.3), Err(Error::DegenerateBranch { .. })));
    }

    #[test]
    fn tau2_zeroes_optimality_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let t1 = rng.gen_range(0.01..6.0);
            let t3 = rng.gen_range(0.01..6.0);
            let v = rng.gen_range(0.05..3.0);
            let Ok(t2) = tau2_from_optimality(t1, t3, v) else { continue };
            assert!(t2 > 0.0 && t2 < 2.0 * PI);
            assert!(optimality_residual(t1, t2, t3, v).abs() < 1e-12);
        }
    }

    #[test]
    fn tau1_cases() {
        let dth = 2.9422553;
        assert_eq!(tau1_from_area(123.0, 1, 0.4, dth).unwrap(), dth / 0.8);
        assert!(tau1_from_area(dth / 0.4, 2, 0.4, dth).is_err());
        let t1 = tau1_from_area(5.0, 3, 0.2, dth).unwrap();
        assert!((t1 - 0.5 * (dth / 0.2 - 10.0)).abs() < 1e-14);
        assert!((t1 - 2.355638).abs() < 1e-6);
        assert!(tau1_from_area(1.0, 2, 0.0, dth).is_err());
    }

    #[test]
    fn ay1_vanishes_without_first_pulse() {
        assert_eq!(ay_closed_form(1, 0.0, 1.3, 0.0, 0.8).unwrap(), C64::new(0.0, 0.0));
        assert!(ay_closed_form(4, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn single_off_root_matches_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t1 = rng.gen_range(0.05..5.0);
            let v = rng.gen_range(0.1..3.0);
            let f = |t2: f64| ay_closed_form(1, t1, t2, 0.0, v).unwrap().im;
            // dense scan for the first sign change on (0, 2π)
            let n = 20_000;
            let h = 2.0 * PI / n as f64;
            let mut first = None;
            for i in 0..n {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                if f(a) == 0.0 || f(a).signum() != f(b).signum() {
                    let (mut lo, mut hi) = (a, b);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        if f(lo).signum() == f(mid).signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    first = Some(0.5 * (lo + hi));
                    break;
                }
            }
            let got = single_off_tau2(t1, v).unwrap();
            assert!((got - first.unwrap()).abs() < 1e-9, "{got} vs {first:?}");
            assert!(f(got).abs() < 1e-12);
        }
    }

    #[test]
    fn single_off_snaps_resonant_root() {
        // ωτ1 = π makes cos(ωτ1/2) = 0: the only root is τ2 = 0.
        let v = 0.6;
        let omega = (1.0f64 + v * v).sqrt();
        let t2 = single_off_tau2(PI / omega, v).unwrap();
        assert!(t2 < 1e-12);
        assert!(single_off_tau2(2.0 * PI / omega, v).is_none());
    }

    #[test]
    fn bloch_after_on_off_matches_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t1 = rng.gen_range(0.0..7.0);
            let t2 = rng.gen_range(0.0..7.0);
            let v = rng.gen_range(0.0..3.0);
            let omega = (1.0f64 + v * v).sqrt();
            // ṡ = (ẑ − vŷ) × s
            let axis = [0.0, -v / omega, 1.0 / omega];
            let s = rotate3(&axis, omega * t1, &[0.0, 0.0, 1.0]).unwrap();
            let s = rotate3(&[0.0, 0.0, 1.0], t2, &s).unwrap();
            let got = bloch_after_on_off(t1, t2, v);
            for k in 0..3 {
                assert!((got[k] - s[k]).abs() < 1e-12);
            }
        }
    }
}
