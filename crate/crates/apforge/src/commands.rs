use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use apforge_core::dynamics::{
    adiabatic_ground, fidelity_error, frame_transform, integrate_adiabatic_at, integrate_original,
    integrate_original_at, sample_times, ControlWaveform, IntegratorOptions, Trajectory,
};
use apforge_core::protocols::{rc_resonance, rc_resonances};
use apforge_core::solver::{check_grid, optimality_ab, optimality_residual, solve_for_v, StaircaseRow, AB_ZERO};
use apforge_core::su2::sequence_propagator;
use apforge_core::{BoundaryConditions, Frame, PulseSequence, SpinState};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    Cli, Command, Format, OutputArgs, ResonanceArgs, SimulateArgs, SolveArgs, StaircaseArgs, VerifyArgs,
};
use crate::error::CliError;
use crate::report::{
    CheckRecord, CheckStatus, ResonanceRecord, SolveReport, SolveRow, StaircaseRecord, TrajectoryRow, WaveformRow,
};

/// Thresholds applied by `verify`.
pub const RESIDUAL_LIMIT: f64 = 1e-9;
pub const FIDELITY_LIMIT: f64 = -9.0;

pub const THREADS_ENV: &str = "APFORGE_THREADS";

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Staircase(args) => cmd_staircase(&args),
        Command::Resonances(args) => cmd_resonances(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Verify(args) => cmd_verify(&args),
    }
}

fn sink(out: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize + ?Sized>(mut w: impl Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv<T: Serialize>(w: impl Write, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

fn read_report(path: &Path) -> Result<SolveReport, CliError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    Ok(serde_json::from_str(&text)?)
}

/// `log10(1 − F)` of the sequence from the original-frame ODE, measured
/// against the adiabatic state at the target angle.
pub fn integrated_fidelity(bc: &BoundaryConditions, seq: &PulseSequence, samples: usize) -> Result<f64, CliError> {
    let (_, original) = integrate_both(bc, seq, samples)?;
    Ok(final_fidelity(bc, &original))
}

fn final_fidelity(bc: &BoundaryConditions, original: &Trajectory) -> f64 {
    match original.final_state() {
        Some(a) => fidelity_error(&frame_transform(&a, bc.theta_f)),
        None => f64::NAN,
    }
}

fn integrate_both(
    bc: &BoundaryConditions,
    seq: &PulseSequence,
    samples: usize,
) -> Result<(ControlWaveform, Trajectory), CliError> {
    let wf = ControlWaveform::build(seq, bc)?;
    let tr = integrate_original(&wf, &adiabatic_ground(bc.theta_i), samples, &IntegratorOptions::default())?;
    Ok((wf, tr))
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let bc = args.boundary.resolve()?;
    let opts = args.search.options()?;
    let solved = solve_for_v(&bc, args.v, &opts)?;
    let fidelity = integrated_fidelity(&bc, &solved.sequence, args.samples)?;
    let report = SolveReport::new(&bc, &solved, fidelity);
    let w = sink(&args.output)?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(w, &report),
        Format::Csv => write_csv(w, [SolveRow::from(&report)]),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => return Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Numerical(e.to_string()))
}

fn cmd_staircase(args: &StaircaseArgs) -> Result<(), CliError> {
    let bc = args.boundary.resolve()?;
    let opts = args.search.options()?;
    let grid = args.grid()?;
    check_grid(&grid)?;
    // rows come back in grid order whatever the completion order
    let rows: Vec<StaircaseRow> = thread_pool()?
        .install(|| grid.par_iter().map(|&v| StaircaseRow::from_solution(v, solve_for_v(&bc, v, &opts))).collect());
    let records: Vec<StaircaseRecord> = rows.iter().map(StaircaseRecord::from).collect();
    let w = sink(&args.output)?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(w, &records),
        Format::Json => write_json(w, &records),
    }
}

fn cmd_resonances(args: &ResonanceArgs) -> Result<(), CliError> {
    let bc = args.boundary.resolve()?;
    let records: Vec<ResonanceRecord> =
        rc_resonances(&bc, args.k_max)?.iter().map(|r| ResonanceRecord::new(r, &bc)).collect();
    let w = sink(&args.output)?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(w, &records),
        Format::Json => write_json(w, &records),
    }
}

fn simulation_source(args: &SimulateArgs) -> Result<(BoundaryConditions, PulseSequence), CliError> {
    if let Some(path) = &args.input {
        if args.boundary.given() {
            return Err(CliError::Usage("--input carries its own boundary conditions".into()));
        }
        let report = read_report(path)?;
        return Ok((report.boundary.conditions()?, report.sequence.sequence()?));
    }
    let bc = args.boundary.resolve()?;
    if let Some(k) = args.rc_k {
        let res = rc_resonance(&bc, k)?;
        return Ok((bc, PulseSequence::constant_control(res.u, res.t_rescaled)?));
    }
    match (args.v, args.m, args.tau1, args.tau2) {
        (Some(v), Some(m), Some(tau1), Some(tau2)) => Ok((bc, PulseSequence::new(v, m, tau1, tau2, args.tau3)?)),
        _ => {
            Err(CliError::Usage("give --input, --rc-k, or an inline sequence (--v --m --tau1 --tau2 [--tau3])".into()))
        }
    }
}

fn trajectory_rows(tr: &Trajectory) -> impl Iterator<Item = TrajectoryRow> + '_ {
    tr.samples.iter().map(move |s| TrajectoryRow {
        t: s.t,
        tau: s.tau,
        theta: s.theta,
        delta: s.delta,
        re_c1: s.state.c1.re,
        im_c1: s.state.c1.im,
        re_c2: s.state.c2.re,
        im_c2: s.state.c2.im,
        sx: s.bloch.sx,
        sy: s.bloch.sy,
        sz: s.bloch.sz,
        gap: tr.gap(s),
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let (bc, seq) = simulation_source(args)?;
    let wf = ControlWaveform::build(&seq, &bc)?;
    let times = sample_times(&wf, args.samples);
    let original = integrate_original_at(&wf, &adiabatic_ground(bc.theta_i), &times, &IntegratorOptions::default())?;
    let adiabatic = integrate_adiabatic_at(&wf, &SpinState::up(Frame::Adiabatic), &times)?;

    fs::create_dir_all(&args.out)?;
    let file =
        |name: &str| -> Result<BufWriter<File>, CliError> { Ok(BufWriter::new(File::create(args.out.join(name))?)) };
    write_csv(file("original.csv")?, trajectory_rows(&original))?;
    write_csv(file("adiabatic.csv")?, trajectory_rows(&adiabatic))?;
    let waveform = times.iter().map(|&t| WaveformRow {
        t,
        tau: wf.tau_at_t(t),
        u: wf.u_at_t(t),
        theta: wf.theta_at_t(t),
        delta: wf.delta_at_t(t),
    });
    write_csv(file("waveform.csv")?, waveform)?;

    let closure = adiabatic.final_state().map_or(f64::NAN, |b| 1.0 - b.to_bloch().sz);
    let mut out = io::stdout().lock();
    writeln!(out, "samples={}", times.len())?;
    writeln!(out, "T_rescaled={}", wf.total_rescaled())?;
    writeln!(out, "T_physical={}", wf.total_physical())?;
    writeln!(out, "theta_final={}", wf.theta_final())?;
    writeln!(out, "fidelity_error={}", final_fidelity(&bc, &original))?;
    writeln!(out, "closure={closure}")?;
    Ok(())
}

/// Recomputes every check on a solve result.
pub fn verify_report(report: &SolveReport, samples: usize) -> Result<Vec<CheckRecord>, CliError> {
    let bc = report.boundary.conditions()?;
    let seq = report.sequence.sequence()?;
    let status = |ok: bool| if ok { CheckStatus::Pass } else { CheckStatus::Fail };
    let mut checks = Vec::new();

    let area = seq.area_residual(&bc);
    checks.push(CheckRecord {
        check: "area",
        status: status(area <= RESIDUAL_LIMIT),
        value: area,
        threshold: RESIDUAL_LIMIT,
    });

    let (a, b) = optimality_ab(seq.tau1, seq.tau3, seq.v);
    let opt = optimality_residual(seq.tau1, seq.tau2, seq.tau3, seq.v).abs();
    let vacuous = seq.m == 1 || (a.abs() <= AB_ZERO && b.abs() <= AB_ZERO);
    checks.push(CheckRecord {
        check: "optimality",
        status: if vacuous { CheckStatus::VacuousPass } else { status(opt <= RESIDUAL_LIMIT) },
        value: opt,
        threshold: RESIDUAL_LIMIT,
    });

    let u = sequence_propagator(&seq)?;
    let ay = u.ay.norm();
    checks.push(CheckRecord {
        check: "a_y",
        status: status(ay <= RESIDUAL_LIMIT),
        value: ay,
        threshold: RESIDUAL_LIMIT,
    });

    let tau2_ok = (0.0..2.0 * PI).contains(&seq.tau2);
    checks.push(CheckRecord { check: "tau2_range", status: status(tau2_ok), value: seq.tau2, threshold: 2.0 * PI });

    let (wf, original) = integrate_both(&bc, &seq, samples)?;
    let fidelity = final_fidelity(&bc, &original);
    checks.push(CheckRecord {
        check: "fidelity",
        status: status(fidelity < FIDELITY_LIMIT),
        value: fidelity,
        threshold: FIDELITY_LIMIT,
    });

    let t = seq.total_duration();
    let lower = PI - RESIDUAL_LIMIT;
    checks.push(CheckRecord { check: "lower_bound", status: status(t >= lower), value: t, threshold: lower });

    let drift = (report.t_rescaled - t).abs().max((report.t_physical - wf.total_physical()).abs());
    checks.push(CheckRecord {
        check: "reported_duration",
        status: status(drift <= RESIDUAL_LIMIT),
        value: drift,
        threshold: RESIDUAL_LIMIT,
    });

    // largest decrease of Δ between consecutive samples
    let fall =
        original.samples.windows(2).map(|w| (w[0].delta - w[1].delta) / w[0].delta.abs().max(1.0)).fold(0.0, f64::max);
    checks.push(CheckRecord {
        check: "monotone_detuning",
        status: status(fall <= RESIDUAL_LIMIT),
        value: fall,
        threshold: RESIDUAL_LIMIT,
    });
    Ok(checks)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    passed: bool,
    checks: &'a [CheckRecord],
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let report = read_report(&args.input)?;
    let checks = verify_report(&report, args.samples)?;
    let passed = checks.iter().all(|c| c.status.passed());
    let w = sink(&args.output)?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(w, &checks)?,
        Format::Json => write_json(w, &VerifyOutput { passed, checks: &checks })?,
    }
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.status.passed()).map(|c| c.check).collect();
        Err(CliError::Numerical(format!("failed checks: {}", failed.join(", "))))
    }
}
