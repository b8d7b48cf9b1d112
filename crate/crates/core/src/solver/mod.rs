//! Minimum-time bang-bang sequences at fixed maximum amplitude `v`.
//!
//! A candidate sequence in rescaled time is
//! `on(τ1) off(τ2) [on(τ3) off(τ2)]^(m−1) on(τ1)`.
//! For `m = 1` the area fixes `τ1` and return to `|φ+>` fixes `τ2` directly.
//! For `m > 1`, `τ1` and `τ2` are slaved to `τ3` through the area and
//! optimality conditions, which leaves a scalar equation `Im a_y(τ3) = 0`.
//! It is solved by dense scanning plus bisection. All roots for all
//! `m ≤ m_max` are compared and the shortest sequence wins.

mod conditions;
mod geometry;

pub use conditions::*;
pub use geometry::*;

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dynamics::{fidelity_error, ControlWaveform};
use crate::error::{Error, Result};
use crate::protocols::BoundaryConditions;
use crate::su2::{sequence_propagator, Frame, SpinState};

pub const DEFAULT_M_MAX: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const SCAN_POINTS: usize = 2000;
/// Distance kept from the ends of the feasible `τ3` interval.
pub const SCAN_EPS: f64 = 1e-9;
pub const MAX_BISECTIONS: usize = 200;
/// Bracketed roots whose residual stays above this are sign flips across a
/// discontinuity of the slaved `τ2`, not roots.
pub const ROOT_ACCEPT: f64 = 1e-9;
/// Durations closer than this are ties.
pub const TIE_TOL: f64 = 1e-9;
/// Off-pulse durations within this of `2π` are folded to 0.
pub const RESONANCE_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub index: usize,
    pub kind: PulseKind,
    pub tau: f64,
}

/// Bang-bang control `u(τ) ∈ {0, v}` in rescaled time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSequence {
    pub v: f64,
    /// Number of "off" pulses.
    pub m: usize,
    /// First and last "on" pulse.
    pub tau1: f64,
    /// Every "off" pulse.
    pub tau2: f64,
    /// Every interior "on" pulse; zero when `m = 1`.
    pub tau3: f64,
}

impl PulseSequence {
    pub fn new(v: f64, m: usize, tau1: f64, tau2: f64, tau3: f64) -> Result<Self> {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidArgument { name: "v", value: v });
        }
        if m < 1 {
            return Err(Error::InvalidSequence("at least one off-pulse is required"));
        }
        for (name, value) in [("tau1", tau1), ("tau2", tau2), ("tau3", tau3)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidArgument { name, value });
            }
        }
        if m == 1 && tau3 != 0.0 {
            return Err(Error::InvalidSequence("tau3 must be zero for a single off-pulse"));
        }
        Ok(PulseSequence { v, m, tau1, tau2, tau3 })
    }

    /// Classical Roland-Cerf protocol: constant `u = v` for rescaled time `tau`.
    pub fn constant_control(v: f64, tau: f64) -> Result<Self> {
        PulseSequence::new(v, 1, 0.5 * tau, 0.0, 0.0)
    }

    pub fn segment_count(&self) -> usize {
        2 * self.m + 1
    }

    /// Segments in time order.
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        let last = self.segment_count() - 1;
        (0..=last).map(move |index| {
            let (kind, tau) = if index == 0 || index == last {
                (PulseKind::On, self.tau1)
            } else if index % 2 == 1 {
                (PulseKind::Off, self.tau2)
            } else {
                (PulseKind::On, self.tau3)
            };
            Segment { index, kind, tau }
        })
    }

    pub fn total_duration(&self) -> f64 {
        2.0 * self.tau1 + self.m as f64 * self.tau2 + self.interior_count() * self.tau3
    }

    pub fn on_duration(&self) -> f64 {
        2.0 * self.tau1 + self.interior_count() * self.tau3
    }

    /// `∫ u dτ`, the total decrease of θ.
    pub fn area(&self) -> f64 {
        self.v * self.on_duration()
    }

    pub fn area_residual(&self, bc: &BoundaryConditions) -> f64 {
        (self.area() - bc.delta_theta()).abs()
    }

    /// Checks the invariants a solved sequence must satisfy for `bc`.
    pub fn validate(&self, bc: &BoundaryConditions) -> Result<()> {
        if !(self.tau1 > 0.0) {
            return Err(Error::InvalidSequence("tau1 must be positive"));
        }
        if !(self.tau2 < 2.0 * PI) {
            return Err(Error::InvalidSequence("tau2 must lie in [0, 2π)"));
        }
        if self.area_residual(bc) > 1e-10 * bc.delta_theta().max(1.0) {
            return Err(Error::InvalidSequence("pulse area does not match θi − θf"));
        }
        Ok(())
    }

    fn interior_count(&self) -> f64 {
        self.m.saturating_sub(1) as f64
    }
}

/// How a candidate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `m = 1`: optimality is vacuous, `τ2` from `a_{y,1} = 0`.
    SingleOff,
    /// `m > 1`: root of the slaved residual in `τ3`.
    Interior,
    /// `v` is a resonance amplitude and the sequence is constant control.
    Resonance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub sequence: PulseSequence,
    pub branch: Branch,
    pub t_rescaled: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `|v (2τ1 + (m−1)τ3) − Δθ|`.
    pub area: f64,
    /// `|A sin τ2 + B (1 − cos τ2)|`.
    pub optimality: f64,
    /// `|Im a_y|` of the sequence propagator.
    pub ay_imag: f64,
    /// `|Re a_y|`; zero up to roundoff for every sequence of this form.
    pub ay_real: f64,
}

impl Residuals {
    pub fn of(seq: &PulseSequence, bc: &BoundaryConditions) -> Result<Self> {
        let ay = ay_generic(seq)?;
        Ok(Residuals {
            area: seq.area_residual(bc),
            optimality: optimality_residual(seq.tau1, seq.tau2, seq.tau3, seq.v).abs(),
            ay_imag: ay.im.abs(),
            ay_real: ay.re.abs(),
        })
    }

    pub fn max(&self) -> f64 {
        self.area.max(self.optimality).max(self.ay_imag).max(self.ay_real)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub sequence: PulseSequence,
    pub branch: Branch,
    pub t_rescaled: f64,
    /// Physical duration in units of `1/Ω`.
    pub t_physical: f64,
    /// `log10 |b2(T)|²` from the exact propagator.
    pub fidelity_error: f64,
    pub residuals: Residuals,
    /// Every root found, all `m`.
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub m_max: usize,
    /// Target `|Im a_y|` for bisection.
    pub tol: f64,
    pub scan_points: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { m_max: DEFAULT_M_MAX, tol: DEFAULT_TOL, scan_points: SCAN_POINTS }
    }
}

/// Finds the shortest admissible sequence with amplitude bound `v`.
pub fn solve_for_v(bc: &BoundaryConditions, v: f64, opts: &SolveOptions) -> Result<SolverResult> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidArgument { name: "v", value: v });
    }
    if opts.m_max < 1 {
        return Err(Error::InvalidArgument { name: "m_max", value: opts.m_max as f64 });
    }
    let candidates = find_candidates(bc, v, opts)?;
    let best = select_shortest(&candidates).ok_or(Error::NoSolution { v, m_max: opts.m_max })?;
    let sequence = best.sequence;
    if best.t_rescaled < PI - 1e-9 {
        return Err(Error::BoundViolation { t_rescaled: best.t_rescaled });
    }
    let t_physical = ControlWaveform::build(&sequence, bc)?.total_physical();
    let final_state = sequence_propagator(&sequence)?.apply(&SpinState::up(Frame::Adiabatic));
    Ok(SolverResult {
        sequence,
        branch: best.branch,
        t_rescaled: best.t_rescaled,
        t_physical,
        fidelity_error: fidelity_error(&final_state),
        residuals: Residuals::of(&sequence, bc)?,
        candidates,
    })
}

/// All roots for `m = 1..=m_max`.
pub fn find_candidates(bc: &BoundaryConditions, v: f64, opts: &SolveOptions) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    out.push(single_off_candidate(bc, v)?);
    for m in 2..=opts.m_max {
        interior_roots(bc, v, m, opts, &mut out);
    }
    Ok(out)
}

fn candidate(sequence: PulseSequence, branch: Branch) -> Candidate {
    Candidate { sequence, branch, t_rescaled: sequence.total_duration() }
}

fn single_off_candidate(bc: &BoundaryConditions, v: f64) -> Result<Candidate> {
    let tau1 = tau1_from_area(0.0, 1, v, bc.delta_theta())?;
    match single_off_tau2(tau1, v) {
        Some(tau2) if tau2 > 0.0 => Ok(candidate(PulseSequence::new(v, 1, tau1, tau2, 0.0)?, Branch::SingleOff)),
        // a_{y,1} ≡ 0 or τ2 = 0: the constant-control protocol already returns.
        _ => Ok(candidate(PulseSequence::new(v, 1, tau1, 0.0, 0.0)?, Branch::Resonance)),
    }
}

/// Sequence with `τ1, τ2` slaved to `τ3`, or `None` outside the feasible
/// set or on the vacuous branch `A = B = 0`.
fn slaved_sequence(bc: &BoundaryConditions, v: f64, m: usize, tau3: f64) -> Option<PulseSequence> {
    let tau1 = tau1_from_area(tau3, m, v, bc.delta_theta()).ok()?;
    let tau2 = tau2_from_optimality(tau1, tau3, v).ok()?;
    Some(PulseSequence { v, m, tau1, tau2, tau3 })
}

/// `Im a_y` along the slaved curve; this is what `a_{y,m}(τ3) = 0` solves.
pub fn slaved_residual(bc: &BoundaryConditions, v: f64, m: usize, tau3: f64) -> Option<f64> {
    let seq = slaved_sequence(bc, v, m, tau3)?;
    let ay = sequence_propagator(&seq).ok()?.ay;
    ay.im.is_finite().then_some(ay.im)
}

/// Feasible `τ3` interval for `m > 1`, shrunk by [`SCAN_EPS`].
pub fn tau3_interval(bc: &BoundaryConditions, v: f64, m: usize) -> Option<(f64, f64)> {
    if m < 2 {
        return None;
    }
    let hi = bc.delta_theta() / ((m - 1) as f64 * v) - SCAN_EPS;
    (hi > SCAN_EPS).then_some((SCAN_EPS, hi))
}

fn interior_roots(bc: &BoundaryConditions, v: f64, m: usize, opts: &SolveOptions, out: &mut Vec<Candidate>) {
    let Some((lo, hi)) = tau3_interval(bc, v, m) else { return };
    let f = |x: f64| slaved_residual(bc, v, m, x);
    let n = opts.scan_points.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let grid = |i: usize| if i + 1 == n { hi } else { lo + step * i as f64 };

    let mut prev: Option<(f64, f64)> = None;
    for i in 0..n {
        let x = grid(i);
        let Some(fx) = f(x) else {
            prev = None;
            continue;
        };
        let root = if fx == 0.0 {
            Some(x)
        } else {
            match prev {
                Some((a, fa)) if fa != 0.0 && fa.signum() != fx.signum() => Some(bisect(&f, a, fa, x, fx, opts.tol)),
                _ => None,
            }
        };
        if let Some(tau3) = root {
            if let Some(seq) = slaved_sequence(bc, v, m, tau3) {
                let ok = f(tau3).is_some_and(|r| r.abs() <= ROOT_ACCEPT.max(opts.tol));
                if ok {
                    out.push(candidate(seq, Branch::Interior));
                }
            }
        }
        prev = Some((x, fx));
    }
}

/// Bisection on a bracket with `fa`, `fb` of opposite sign. Returns the
/// endpoint with the smaller residual when the bracket collapses.
fn bisect(f: &impl Fn(f64) -> Option<f64>, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, tol: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let Some(fm) = f(mid) else { break };
        if fm.abs() < tol {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

/// Shortest candidate; ties go to smaller `m`, then smaller `τ3`.
pub fn select_shortest(candidates: &[Candidate]) -> Option<Candidate> {
    candidates.iter().copied().reduce(|best, c| {
        let shorter = c.t_rescaled < best.t_rescaled - TIE_TOL;
        let tie = (c.t_rescaled - best.t_rescaled).abs() <= TIE_TOL;
        let simpler = (c.sequence.m, c.sequence.tau3) < (best.sequence.m, best.sequence.tau3);
        if shorter || (tie && simpler) {
            c
        } else {
            best
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaircasePoint {
    pub m: usize,
    pub t_rescaled: f64,
    pub t_physical: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseRow {
    pub v: f64,
    pub outcome: core::result::Result<StaircasePoint, Error>,
}

impl StaircaseRow {
    pub fn from_solution(v: f64, solved: Result<SolverResult>) -> Self {
        StaircaseRow {
            v,
            outcome: solved.map(|r| StaircasePoint {
                m: r.sequence.m,
                t_rescaled: r.t_rescaled,
                t_physical: r.t_physical,
                branch: r.branch,
            }),
        }
    }
}

/// Checks that a sweep grid is strictly increasing and positive.
pub fn check_grid(v_grid: &[f64]) -> Result<()> {
    if v_grid.is_empty() {
        return Err(Error::InvalidArgument { name: "v_grid length", value: 0.0 });
    }
    for (i, &v) in v_grid.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) || (i > 0 && !(v > v_grid[i - 1])) {
            return Err(Error::InvalidArgument { name: "v_grid", value: v });
        }
    }
    Ok(())
}

/// Optimal duration versus amplitude bound; per-point failures are recorded
/// in the row and never abort the sweep.
pub fn staircase_sweep(bc: &BoundaryConditions, v_grid: &[f64], opts: &SolveOptions) -> Result<Vec<StaircaseRow>> {
    check_grid(v_grid)?;
    Ok(v_grid.iter().map(|&v| StaircaseRow::from_solution(v, solve_for_v(bc, v, opts))).collect())
}
