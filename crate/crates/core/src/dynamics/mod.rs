//! Physical-time synthesis and independent verification.
//!
//! The original frame evolves `i ȧ = H a` with `H = (Δ σz + Ω σx)/2`. The
//! adiabatic frame is reached by the real involution `b = M(θ) a`, where
//! `M(θ) = [[cos θ/2, sin θ/2], [sin θ/2, −cos θ/2]]`, and in rescaled time
//! evolves with `H′ = σz/2 − u σy/2`. The two descriptions agree exactly,
//! phases included, which is what the frame-equivalence checks compare.

mod rk;
mod waveform;

pub use rk::{Dopri5, IntegratorOptions};
pub use waveform::{ControlWaveform, WaveformSegment};

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // inherent float methods shadow these once std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::protocols::BoundaryConditions;
use crate::su2::{off_propagator, segment_propagator, BlochVector, Frame, SpinState, Su2Operator};

/// Lower limit of [`fidelity_error`].
pub const FIDELITY_FLOOR: f64 = -16.0;
/// Minimum number of uniformly spaced samples in a trajectory.
pub const MIN_SAMPLES: usize = 400;
/// Allowed deviation of an initial state from unit norm.
pub const NORM_TOL: f64 = 1e-10;

/// `M(θ) a`; maps between the two frames in either direction.
pub fn frame_transform(a: &SpinState, theta: f64) -> SpinState {
    let (s, c) = (0.5 * theta).sin_cos();
    let frame = match a.frame {
        Frame::Original => Frame::Adiabatic,
        Frame::Adiabatic => Frame::Original,
    };
    SpinState::new(a.c1 * c + a.c2 * s, a.c1 * s - a.c2 * c, frame)
}

/// `log10 |b2|²`, floored at [`FIDELITY_FLOOR`].
pub fn fidelity_error(b: &SpinState) -> f64 {
    b.c2.norm_sqr().log10().max(FIDELITY_FLOOR)
}

/// Instantaneous ground state `|φ+(θ)>` written in the original frame.
pub fn adiabatic_ground(theta: f64) -> SpinState {
    frame_transform(&SpinState::up(Frame::Adiabatic), theta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub tau: f64,
    pub theta: f64,
    pub delta: f64,
    pub state: SpinState,
    pub bloch: BlochVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub frame: Frame,
    pub omega_rabi: f64,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    /// Energy gap `Ω / sin θ` at a sample.
    pub fn gap(&self, sample: &Sample) -> f64 {
        self.omega_rabi / sample.theta.sin()
    }

    pub fn final_state(&self) -> Option<SpinState> {
        self.samples.last().map(|s| s.state)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.samples.iter().map(|s| (s.state.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Every sample mapped to the other frame with its own `θ`.
    pub fn transformed(&self) -> Trajectory {
        let frame = match self.frame {
            Frame::Original => Frame::Adiabatic,
            Frame::Adiabatic => Frame::Original,
        };
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let state = frame_transform(&s.state, s.theta);
                Sample { state, bloch: state.to_bloch(), ..*s }
            })
            .collect();
        Trajectory { frame, omega_rabi: self.omega_rabi, samples }
    }
}

/// `n` uniform physical times on `[0, T̃]` merged with every segment boundary.
/// A zero-length waveform yields the two samples `[0, 0]`.
pub fn sample_times(wf: &ControlWaveform, n: usize) -> Vec<f64> {
    let total = wf.total_physical();
    if total <= 0.0 {
        return alloc::vec![0.0, 0.0];
    }
    let n = n.max(2);
    let boundaries = wf.boundaries_t();
    let near = 1e-12 * total;
    let mut times: Vec<f64> = (0..n)
        .map(|i| total * i as f64 / (n - 1) as f64)
        .filter(|t| boundaries.iter().all(|b| (t - b).abs() > near))
        .chain(boundaries.iter().copied())
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= near);
    if let Some(last) = times.last_mut() {
        *last = total;
    }
    times
}

fn check_normalized(state: &SpinState) -> Result<()> {
    let n = state.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument { name: "state norm", value: n.sqrt() });
    }
    Ok(())
}

fn pack(s: &SpinState) -> [f64; 4] {
    [s.c1.re, s.c1.im, s.c2.re, s.c2.im]
}

fn unpack(y: &[f64; 4], frame: Frame) -> SpinState {
    SpinState::new(C64::new(y[0], y[1]), C64::new(y[2], y[3]), frame)
}

/// `−i (hx σx + hy σy + hz σz) ψ` on the packed real state.
fn schrodinger_rhs(hx: f64, hy: f64, hz: f64, y: &[f64; 4]) -> [f64; 4] {
    let a1 = C64::new(y[0], y[1]);
    let a2 = C64::new(y[2], y[3]);
    let h1 = a1 * hz + a2 * C64::new(hx, -hy);
    let h2 = a1 * C64::new(hx, hy) - a2 * hz;
    let (d1, d2) = (h1 * C64::new(0.0, -1.0), h2 * C64::new(0.0, -1.0));
    [d1.re, d1.im, d2.re, d2.im]
}

/// Integrates the original-frame Schrödinger equation in physical time along
/// the waveform, sampled at [`sample_times`].
pub fn integrate_original(
    wf: &ControlWaveform,
    a0: &SpinState,
    n_samples: usize,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    check_normalized(a0)?;
    let times = sample_times(wf, n_samples);
    integrate_original_at(wf, a0, &times, opts)
}

/// As [`integrate_original`] at caller-chosen, non-decreasing times.
pub fn integrate_original_at(
    wf: &ControlWaveform,
    a0: &SpinState,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    check_normalized(a0)?;
    let omega = wf.omega_rabi;
    let boundaries = wf.boundaries_t();
    let mut rk = Dopri5::new(*opts);
    let mut y = pack(a0);
    let mut samples = Vec::with_capacity(times.len());
    let mut t_prev = 0.0;
    for &t in times {
        if t < t_prev {
            return Err(Error::InvalidArgument { name: "sample time", value: t });
        }
        // never step across a kink of Δ(t)
        let start = t_prev;
        let inner = boundaries.iter().copied().filter(|&b| b > start && b < t);
        for stop in inner.chain(core::iter::once(t)) {
            if stop > t_prev {
                let index = wf.segment_index_at_t(0.5 * (t_prev + stop));
                let rhs = |s: f64, y: &[f64; 4]| schrodinger_rhs(0.5 * omega, 0.0, 0.5 * wf.delta_in(index, s), y);
                rk.integrate(rhs, t_prev, &mut y, stop)?;
                t_prev = stop;
            }
        }
        let state = unpack(&y, Frame::Original);
        samples.push(Sample {
            t,
            tau: wf.tau_at_t(t),
            theta: wf.theta_at_t(t),
            delta: wf.delta_at_t(t),
            state,
            bloch: state.to_bloch(),
        });
    }
    Ok(Trajectory { frame: Frame::Original, omega_rabi: omega, samples })
}

/// Exact adiabatic-frame evolution under the piecewise-constant control of
/// the waveform, sampled at the same physical times as [`integrate_original`].
pub fn integrate_adiabatic(wf: &ControlWaveform, b0: &SpinState, n_samples: usize) -> Result<Trajectory> {
    let times = sample_times(wf, n_samples);
    integrate_adiabatic_at(wf, b0, &times)
}

pub fn integrate_adiabatic_at(wf: &ControlWaveform, b0: &SpinState, times: &[f64]) -> Result<Trajectory> {
    check_normalized(b0)?;
    // propagators up to the start of every segment
    let mut starts = Vec::with_capacity(wf.segments.len());
    let mut acc = Su2Operator::IDENTITY;
    for s in &wf.segments {
        starts.push(acc);
        acc = segment_propagator(s.kind, s.tau_len, s.u).compose(&acc);
    }
    let samples = times
        .iter()
        .map(|&t| {
            let tau = wf.tau_at_t(t);
            let index = wf.segment_index_at_tau(tau);
            let u = match wf.segments.get(index) {
                Some(s) => segment_propagator(s.kind, tau - s.tau_start, s.u).compose(&starts[index]),
                None => Su2Operator::IDENTITY,
            };
            let mut state = u.apply(b0);
            state.frame = Frame::Adiabatic;
            Sample { t, tau, theta: wf.theta_at_t(t), delta: wf.delta_at_t(t), state, bloch: state.to_bloch() }
        })
        .collect();
    Ok(Trajectory { frame: Frame::Adiabatic, omega_rabi: wf.omega_rabi, samples })
}

/// Adiabatic-frame ODE in rescaled time for an arbitrary control profile
/// `u(τ) ≥ 0`. `θ` and `t` are carried along as extra state components,
/// `θ′ = −u` and `t′ = sin θ / Ω`. Samples are `n_samples` uniform rescaled
/// times on `[0, tau_end]`.
pub fn integrate_adiabatic_profile<F>(
    u: F,
    tau_end: f64,
    bc: &BoundaryConditions,
    b0: &SpinState,
    n_samples: usize,
    opts: &IntegratorOptions,
) -> Result<Trajectory>
where
    F: Fn(f64) -> f64,
{
    check_normalized(b0)?;
    if !(tau_end.is_finite() && tau_end >= 0.0) {
        return Err(Error::InvalidArgument { name: "tau_end", value: tau_end });
    }
    let omega = bc.omega_rabi;
    let rhs = |tau: f64, y: &[f64; 6]| {
        let uu = u(tau);
        let psi = [y[0], y[1], y[2], y[3]];
        let d = schrodinger_rhs(0.0, -0.5 * uu, 0.5, &psi);
        [d[0], d[1], d[2], d[3], -uu, y[4].sin() / omega]
    };
    let [r1, i1, r2, i2] = pack(b0);
    let mut y = [r1, i1, r2, i2, bc.theta_i, 0.0];
    let mut rk = Dopri5::new(*opts);
    let n = n_samples.max(2);
    let mut samples = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 0..n {
        let tau = if i + 1 == n { tau_end } else { tau_end * i as f64 / (n - 1) as f64 };
        rk.integrate(rhs, prev, &mut y, tau)?;
        prev = tau;
        let theta = y[4];
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::AngleOutOfRange { theta });
        }
        let state = unpack(&[y[0], y[1], y[2], y[3]], Frame::Adiabatic);
        samples.push(Sample { t: y[5], tau, theta, delta: omega / theta.tan(), state, bloch: state.to_bloch() });
    }
    Ok(Trajectory { frame: Frame::Adiabatic, omega_rabi: omega, samples })
}

/// Outcome of the instantaneous-jump protocol behind the bound `T̃0`: jump
/// `θi → θ̄`, hold for `T̃0 = sin θ̄ π/Ω`, jump `θ̄ → θf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpProtocol {
    pub theta_mean: f64,
    pub t_physical: f64,
    pub t_rescaled: f64,
    /// Final state in the adiabatic frame of `θf`.
    pub final_state: SpinState,
    pub fidelity_error: f64,
}

/// Runs the jump protocol with exact propagators; the jumps act as frame
/// changes and leave the original-frame state untouched.
pub fn jump_protocol(bc: &BoundaryConditions) -> JumpProtocol {
    let theta_mean = bc.theta_mean();
    let a0 = adiabatic_ground(bc.theta_i);
    let b_mid = frame_transform(&a0, theta_mean);
    let mut b_end = off_propagator(PI).apply(&b_mid);
    b_end.frame = Frame::Adiabatic;
    let a_end = frame_transform(&b_end, theta_mean);
    let final_state = frame_transform(&a_end, bc.theta_f);
    JumpProtocol {
        theta_mean,
        t_physical: theta_mean.sin() * PI / bc.omega_rabi,
        t_rescaled: PI,
        final_state,
        fidelity_error: fidelity_error(&final_state),
    }
}

/// Same protocol with the hold integrated as an ODE in physical time.
pub fn jump_protocol_ode(bc: &BoundaryConditions, opts: &IntegratorOptions) -> Result<SpinState> {
    let theta_mean = bc.theta_mean();
    let omega = bc.omega_rabi;
    let delta = omega / theta_mean.tan();
    let mut y = pack(&adiabatic_ground(bc.theta_i));
    let t_end = theta_mean.sin() * PI / omega;
    Dopri5::new(*opts).integrate(|_, y| schrodinger_rhs(0.5 * omega, 0.0, 0.5 * delta, y), 0.0, &mut y, t_end)?;
    Ok(frame_transform(&unpack(&y, Frame::Original), bc.theta_f))
}
