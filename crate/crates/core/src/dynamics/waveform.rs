//! Detuning waveform in physical time for a bang-bang sequence.
//!
//! On "on" segments `θ` falls linearly in rescaled time at rate `v`, so
//! `cos θ` rises linearly in physical time at rate `vΩ`. On "off" segments `θ`
//! is frozen and `dt = sin θ dτ / Ω`. Both maps are closed forms.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent float methods shadow these once std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::protocols::BoundaryConditions;
use crate::solver::{PulseKind, PulseSequence};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformSegment {
    pub kind: PulseKind,
    /// Control value `u` on this segment.
    pub u: f64,
    pub tau_start: f64,
    pub tau_len: f64,
    pub t_start: f64,
    pub t_len: f64,
    pub theta_start: f64,
    pub theta_end: f64,
}

impl WaveformSegment {
    pub fn tau_end(&self) -> f64 {
        self.tau_start + self.tau_len
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.t_len
    }

    fn sweeps(&self) -> bool {
        self.u > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlWaveform {
    pub omega_rabi: f64,
    pub segments: Vec<WaveformSegment>,
}

impl ControlWaveform {
    /// Synthesizes the waveform starting at `θi`. The final angle equals `θf`
    /// only when the sequence satisfies the area condition.
    pub fn build(seq: &PulseSequence, bc: &BoundaryConditions) -> Result<Self> {
        let omega = bc.omega_rabi;
        let mut segments = Vec::with_capacity(seq.segment_count());
        let (mut tau, mut t, mut theta) = (0.0, 0.0, bc.theta_i);
        for seg in seq.segments() {
            let u = match seg.kind {
                PulseKind::On => seq.v,
                PulseKind::Off => 0.0,
            };
            let theta_end = theta - u * seg.tau;
            if !(theta_end > 0.0 && theta_end < PI) {
                return Err(Error::AngleOutOfRange { theta: theta_end });
            }
            let t_len = if u > 0.0 {
                // (cos θb − cos θa)/(vΩ) in a cancellation-free form
                2.0 * (0.5 * (theta + theta_end)).sin() * (0.5 * u * seg.tau).sin() / (u * omega)
            } else {
                theta.sin() * seg.tau / omega
            };
            segments.push(WaveformSegment {
                kind: seg.kind,
                u,
                tau_start: tau,
                tau_len: seg.tau,
                t_start: t,
                t_len,
                theta_start: theta,
                theta_end,
            });
            tau += seg.tau;
            t += t_len;
            theta = theta_end;
        }
        Ok(ControlWaveform { omega_rabi: omega, segments })
    }

    pub fn total_rescaled(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.tau_end())
    }

    pub fn total_physical(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.t_end())
    }

    pub fn theta_final(&self) -> f64 {
        self.segments.last().map_or(f64::NAN, |s| s.theta_end)
    }

    /// Physical times of all segment boundaries including 0 and `T̃`.
    pub fn boundaries_t(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        out.push(0.0);
        out.extend(self.segments.iter().map(|s| s.t_end()));
        out
    }

    /// Index of the segment containing physical time `t`. Boundaries belong
    /// to the later segment; zero-length segments are never returned unless
    /// all of them are.
    pub fn segment_index_at_t(&self, t: f64) -> usize {
        self.locate(t, |s| s.t_start, |s| s.t_len)
    }

    pub fn segment_index_at_tau(&self, tau: f64) -> usize {
        self.locate(tau, |s| s.tau_start, |s| s.tau_len)
    }

    fn locate(&self, x: f64, start: impl Fn(&WaveformSegment) -> f64, len: impl Fn(&WaveformSegment) -> f64) -> usize {
        let mut found = 0;
        for (i, s) in self.segments.iter().enumerate() {
            if len(s) > 0.0 && start(s) <= x {
                found = i;
            }
        }
        found
    }

    pub fn theta_at_t(&self, t: f64) -> f64 {
        self.theta_in(self.segment_index_at_t(t), t)
    }

    /// `θ(t)` evaluated with the formula of segment `index`.
    pub fn theta_in(&self, index: usize, t: f64) -> f64 {
        let Some(s) = self.segments.get(index) else { return f64::NAN };
        if s.sweeps() {
            let c = s.theta_start.cos() + s.u * self.omega_rabi * (t - s.t_start);
            c.clamp(-1.0, 1.0).acos()
        } else {
            s.theta_start
        }
    }

    /// `Δ(t) = Ω cot θ(t)` evaluated with the formula of segment `index`.
    pub fn delta_in(&self, index: usize, t: f64) -> f64 {
        let Some(s) = self.segments.get(index) else { return f64::NAN };
        if s.sweeps() {
            let c = s.theta_start.cos() + s.u * self.omega_rabi * (t - s.t_start);
            self.omega_rabi * c / (1.0 - c * c).sqrt()
        } else {
            self.omega_rabi / s.theta_start.tan()
        }
    }

    pub fn delta_at_t(&self, t: f64) -> f64 {
        self.delta_in(self.segment_index_at_t(t), t)
    }

    pub fn tau_at_t(&self, t: f64) -> f64 {
        let index = self.segment_index_at_t(t);
        let Some(s) = self.segments.get(index) else { return 0.0 };
        if s.sweeps() {
            s.tau_start + (s.theta_start - self.theta_in(index, t)) / s.u
        } else {
            s.tau_start + self.omega_rabi * (t - s.t_start) / s.theta_start.sin()
        }
    }

    pub fn theta_at_tau(&self, tau: f64) -> f64 {
        let Some(s) = self.segments.get(self.segment_index_at_tau(tau)) else { return f64::NAN };
        s.theta_start - s.u * (tau - s.tau_start)
    }

    pub fn u_at_tau(&self, tau: f64) -> f64 {
        self.segments.get(self.segment_index_at_tau(tau)).map_or(0.0, |s| s.u)
    }

    pub fn u_at_t(&self, t: f64) -> f64 {
        self.segments.get(self.segment_index_at_t(t)).map_or(0.0, |s| s.u)
    }

    /// Physical time at rescaled time `tau`.
    pub fn t_at_tau(&self, tau: f64) -> f64 {
        let Some(s) = self.segments.get(self.segment_index_at_tau(tau)) else { return 0.0 };
        let d = tau - s.tau_start;
        if s.sweeps() {
            let theta = s.theta_start - s.u * d;
            s.t_start + 2.0 * (0.5 * (s.theta_start + theta)).sin() * (0.5 * s.u * d).sin() / (s.u * self.omega_rabi)
        } else {
            s.t_start + s.theta_start.sin() * d / self.omega_rabi
        }
    }
}
