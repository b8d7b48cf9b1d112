//! Serialized forms of solver output. Floats are written with shortest
//! round-trip formatting by both serde_json and csv.

use apforge_core::protocols::{compute_bounds, RcResonance};
use apforge_core::solver::{Branch, Candidate, Residuals, SolverResult, StaircaseRow};
use apforge_core::{BoundaryConditions, PulseSequence};
use serde::{Deserialize, Serialize};

use crate::error::{status_tag, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub theta_i: f64,
    pub theta_f: f64,
    pub omega_rabi: f64,
    pub delta_i: f64,
    pub delta_f: f64,
}

impl BoundaryRecord {
    pub fn new(bc: &BoundaryConditions) -> Self {
        BoundaryRecord {
            theta_i: bc.theta_i,
            theta_f: bc.theta_f,
            omega_rabi: bc.omega_rabi,
            delta_i: bc.delta_i(),
            delta_f: bc.delta_f(),
        }
    }

    /// The angles are authoritative; the detunings are informational.
    pub fn conditions(&self) -> Result<BoundaryConditions, CliError> {
        Ok(BoundaryConditions::new(self.theta_i, self.theta_f, self.omega_rabi)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub v: f64,
    pub m: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
}

impl SequenceRecord {
    pub fn new(seq: &PulseSequence) -> Self {
        SequenceRecord { v: seq.v, m: seq.m, tau1: seq.tau1, tau2: seq.tau2, tau3: seq.tau3 }
    }

    pub fn sequence(&self) -> Result<PulseSequence, CliError> {
        Ok(PulseSequence::new(self.v, self.m, self.tau1, self.tau2, self.tau3)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRecord {
    SingleOff,
    Interior,
    Resonance,
}

impl From<Branch> for BranchRecord {
    fn from(b: Branch) -> Self {
        match b {
            Branch::SingleOff => BranchRecord::SingleOff,
            Branch::Interior => BranchRecord::Interior,
            Branch::Resonance => BranchRecord::Resonance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub area: f64,
    pub optimality: f64,
    pub ay_imag: f64,
    pub ay_real: f64,
}

impl From<Residuals> for ResidualRecord {
    fn from(r: Residuals) -> Self {
        ResidualRecord { area: r.area, optimality: r.optimality, ay_imag: r.ay_imag, ay_real: r.ay_real }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub m: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub t_rescaled: f64,
    pub branch: BranchRecord,
}

impl From<&Candidate> for CandidateRecord {
    fn from(c: &Candidate) -> Self {
        CandidateRecord {
            m: c.sequence.m,
            tau1: c.sequence.tau1,
            tau2: c.sequence.tau2,
            tau3: c.sequence.tau3,
            t_rescaled: c.t_rescaled,
            branch: c.branch.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub t0_rescaled: f64,
    pub t0_physical: f64,
    pub t_qsl_physical: f64,
}

/// Output of `solve`, input of `verify` and `simulate --input`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub boundary: BoundaryRecord,
    pub sequence: SequenceRecord,
    pub branch: BranchRecord,
    pub t_rescaled: f64,
    pub t_physical: f64,
    pub residuals: ResidualRecord,
    /// `log10(1 − F)` from the original-frame ODE integration.
    pub fidelity_error: f64,
    /// `log10 |a_y|²` from the exact propagator.
    pub fidelity_error_propagator: f64,
    pub bounds: BoundsRecord,
    pub candidates: Vec<CandidateRecord>,
}

impl SolveReport {
    pub fn new(bc: &BoundaryConditions, r: &SolverResult, fidelity_error: f64) -> Self {
        let b = compute_bounds(bc);
        SolveReport {
            boundary: BoundaryRecord::new(bc),
            sequence: SequenceRecord::new(&r.sequence),
            branch: r.branch.into(),
            t_rescaled: r.t_rescaled,
            t_physical: r.t_physical,
            residuals: r.residuals.into(),
            fidelity_error,
            fidelity_error_propagator: r.fidelity_error,
            bounds: BoundsRecord {
                t0_rescaled: b.t0_rescaled,
                t0_physical: b.t0_physical,
                t_qsl_physical: b.t_qsl_physical,
            },
            candidates: r.candidates.iter().map(CandidateRecord::from).collect(),
        }
    }
}

/// Flat single-row form of [`SolveReport`] for CSV output.
#[derive(Debug, Serialize)]
pub struct SolveRow {
    pub theta_i: f64,
    pub theta_f: f64,
    pub omega_rabi: f64,
    pub v: f64,
    pub m: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub branch: BranchRecord,
    pub t_rescaled: f64,
    pub t_physical: f64,
    pub residual_area: f64,
    pub residual_optimality: f64,
    pub residual_ay_imag: f64,
    pub residual_ay_real: f64,
    pub fidelity_error: f64,
    pub candidates: usize,
}

impl From<&SolveReport> for SolveRow {
    fn from(r: &SolveReport) -> Self {
        SolveRow {
            theta_i: r.boundary.theta_i,
            theta_f: r.boundary.theta_f,
            omega_rabi: r.boundary.omega_rabi,
            v: r.sequence.v,
            m: r.sequence.m,
            tau1: r.sequence.tau1,
            tau2: r.sequence.tau2,
            tau3: r.sequence.tau3,
            branch: r.branch,
            t_rescaled: r.t_rescaled,
            t_physical: r.t_physical,
            residual_area: r.residuals.area,
            residual_optimality: r.residuals.optimality,
            residual_ay_imag: r.residuals.ay_imag,
            residual_ay_real: r.residuals.ay_real,
            fidelity_error: r.fidelity_error,
            candidates: r.candidates.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaircaseRecord {
    pub v: f64,
    pub m: Option<usize>,
    #[serde(rename = "T_rescaled")]
    pub t_rescaled: Option<f64>,
    #[serde(rename = "T_physical")]
    pub t_physical: Option<f64>,
    pub status: &'static str,
}

impl From<&StaircaseRow> for StaircaseRecord {
    fn from(row: &StaircaseRow) -> Self {
        match &row.outcome {
            Ok(p) => StaircaseRecord {
                v: row.v,
                m: Some(p.m),
                t_rescaled: Some(p.t_rescaled),
                t_physical: Some(p.t_physical),
                status: "ok",
            },
            Err(e) => StaircaseRecord { v: row.v, m: None, t_rescaled: None, t_physical: None, status: status_tag(e) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceRecord {
    pub k: usize,
    pub u: f64,
    #[serde(rename = "T_rescaled")]
    pub t_rescaled: f64,
    #[serde(rename = "T_physical")]
    pub t_physical: f64,
    /// `|T_k √(1 + u_k²) − 2kπ|`.
    pub return_residual: f64,
    /// `|u_k T_k − Δθ|`.
    pub area_residual: f64,
}

impl ResonanceRecord {
    pub fn new(r: &RcResonance, bc: &BoundaryConditions) -> Self {
        ResonanceRecord {
            k: r.k,
            u: r.u,
            t_rescaled: r.t_rescaled,
            t_physical: r.t_physical,
            return_residual: r.return_residual(),
            area_residual: r.area_residual(bc),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    VacuousPass,
    Fail,
}

impl CheckStatus {
    pub fn passed(self) -> bool {
        self != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    pub status: CheckStatus,
    pub value: f64,
    pub threshold: f64,
}

/// Trajectory sample row.
#[derive(Debug, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub tau: f64,
    pub theta: f64,
    pub delta: f64,
    pub re_c1: f64,
    pub im_c1: f64,
    pub re_c2: f64,
    pub im_c2: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub gap: f64,
}

#[derive(Debug, Serialize)]
pub struct WaveformRow {
    pub t: f64,
    pub tau: f64,
    pub u: f64,
    pub theta: f64,
    pub delta: f64,
}
