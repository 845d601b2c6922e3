//! Command-line front end: config-driven simulations, soliton and spectrum
//! self-checks, stability ensembles, and the acceptance suite.
//!
//! Exit codes: 0 success, 1 criterion failure, 2 configuration error,
//! 3 numeric blow-up.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;

use skdv::charges::charge_report;
use skdv::dynamics::{simulate, IntegratorConfig, Scheme};
use skdv::field::{CliffordField, SimState};
use skdv::io::{write_snapshot_csv, write_stability_csv, write_timeseries_csv};
use skdv::soliton::{
    default_box_length, measure_speed, soliton_profile, traveling_wave_residual, SolitonParams,
    SpeedConvention,
};
use skdv::spectrum::{build_operator, eigen_pairs};
use skdv::stability::{
    run_ground_state_stability, run_soliton_stability, ExperimentSetup, PerturbationSpec,
    StabilityReport,
};
use skdv::Grid;

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "skdv",
    about = "Pseudo-spectral laboratory for a Clifford-valued KdV system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured initial data; write timeseries.csv and
    /// optional per-sample snapshots
    Simulate {
        /// JSON run configuration (defaults used when omitted)
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Verify the one-soliton: traveling-wave residual, measured speed,
    /// charge values (JSON on stdout)
    SolitonCheck {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "L")]
        length: Option<f64>,
        /// Simulation horizon for the speed fit
        #[arg(long, default_value_t = 5.0)]
        t_end: f64,
    },
    /// Eigenvalues of the linearization operator and closed-form errors
    /// (JSON on stdout)
    Spectrum {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "L")]
        length: Option<f64>,
    },
    /// Perturbed-soliton ensemble: stability CSV per seed plus a summary JSON
    Stability {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of seeds (seed values start at the configured seed)
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Small-data run compared against the a priori bound (JSON on stdout)
    GroundState {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the acceptance suite; exit 0 iff every criterion passes
    VerifyAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    if let Some(lib) = err.downcast_ref::<skdv::Error>() {
        return match lib {
            skdv::Error::Config(_) => 2,
            skdv::Error::BlowUp { .. } | skdv::Error::Numeric(_) => 3,
            _ => 1,
        };
    }
    if err.downcast_ref::<serde_json::Error>().is_some() {
        return 2;
    }
    1
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_path(p),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Simulate { config } => cmd_simulate(&load_config(&config)?),
        Command::SolitonCheck {
            c,
            n,
            length,
            t_end,
        } => cmd_soliton_check(c, n, length, t_end),
        Command::Spectrum { c, k, n, length } => cmd_spectrum(c, k, n, length),
        Command::Stability { config, seeds } => cmd_stability(&load_config(&config)?, seeds),
        Command::GroundState { config } => cmd_ground_state(&load_config(&config)?),
        Command::VerifyAll => cmd_verify_all(),
    }
}

/// Initial data of a configured run: the soliton plus the configured
/// perturbation (amplitude 0 means the bare soliton).
fn initial_state(cfg: &RunConfig) -> anyhow::Result<SimState> {
    let grid = Grid::new(cfg.grid.n, cfg.grid.length)?;
    let params = SolitonParams::new(cfg.soliton.c)?
        .with_phase(cfg.soliton.a)
        .with_convention(cfg.soliton.speed_convention);
    let profile = soliton_profile(&params, 0.0, &grid);
    if profile.tail_warning {
        eprintln!(
            "warning: soliton tail exceeds 1e-10 at the box edge (L = {}); enlarge the domain",
            cfg.grid.length
        );
    }
    if cfg.perturbation.amplitude > 0.0 {
        let (du, dxi) =
            skdv::stability::make_perturbation(&cfg.perturbation.to_spec(), &grid, cfg.clifford.k)?;
        Ok(SimState::new(0.0, profile.field.add(&du), dxi))
    } else {
        Ok(SimState::new(
            0.0,
            profile.field,
            CliffordField::zeros(&grid, cfg.clifford.k),
        ))
    }
}

fn cmd_simulate(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let out = cfg.output_dir();
    std::fs::create_dir_all(&out)
        .with_context(|| format!("cannot create output directory {}", out.display()))?;
    let initial = initial_state(cfg)?;
    let integrator = IntegratorConfig::new(
        cfg.integrator.dt,
        cfg.integrator.scheme,
        cfg.integrator.dealias,
        &initial,
    )?;
    let trajectory = simulate(
        &initial,
        cfg.integrator.t_end,
        &integrator,
        cfg.integrator.sample_every,
    )?;
    let reports: Vec<_> = trajectory.iter().map(charge_report).collect();
    write_timeseries_csv(&out.join("timeseries.csv"), &reports)?;
    if cfg.output.emit_snapshots {
        for (i, state) in trajectory.iter().enumerate() {
            write_snapshot_csv(&out.join(format!("snapshot_{i:06}.csv")), state)?;
        }
    }
    println!(
        "wrote {} samples to {}",
        reports.len(),
        out.join("timeseries.csv").display()
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SolitonCheckReport {
    c: f64,
    n: usize,
    #[serde(rename = "L")]
    length: f64,
    residual: f64,
    measured_speed: f64,
    matched_convention: Option<SpeedConvention>,
    charge_values: ChargeValues,
    tail_warning: bool,
}

#[derive(Serialize)]
struct ChargeValues {
    v: f64,
    m: f64,
    h_1: f64,
    v_exact: f64,
    m_exact: f64,
    h_1_exact: f64,
}

fn cmd_soliton_check(
    c: f64,
    n: Option<usize>,
    length: Option<f64>,
    t_end: f64,
) -> anyhow::Result<ExitCode> {
    let n = n.unwrap_or(1024);
    let length = length.unwrap_or_else(|| default_box_length(c));
    let grid = Grid::new(n, length)?;
    let params = SolitonParams::new(c)?;
    let profile = soliton_profile(&params, 0.0, &grid);
    let state = SimState::new(0.0, profile.field.clone(), CliffordField::zeros(&grid, 1));

    let integrator = IntegratorConfig::new(1e-3, Scheme::IntegratingFactorRk4, true, &state)?;
    let sample_every = ((t_end / 1e-3 / 100.0).ceil() as usize).max(1);
    let trajectory = simulate(&state, t_end, &integrator, sample_every)?;
    let speed = measure_speed(&trajectory)?;

    let matched_convention = if (speed - c).abs() <= 0.005 * c {
        Some(SpeedConvention::Derived)
    } else if (speed - (1.0 + c)).abs() <= 0.005 * (1.0 + c) {
        Some(SpeedConvention::Paper)
    } else {
        None
    };
    let report = SolitonCheckReport {
        c,
        n,
        length,
        residual: traveling_wave_residual(&profile.field, c),
        measured_speed: speed,
        matched_convention,
        charge_values: ChargeValues {
            v: skdv::charges::charge_v(&state),
            m: skdv::charges::charge_m(&state),
            h_1: skdv::charges::charge_h1(&state.u),
            v_exact: skdv::soliton::soliton_v_exact(c),
            m_exact: skdv::soliton::soliton_m_exact(c),
            h_1_exact: skdv::soliton::soliton_h1_exact(c),
        },
        tail_warning: profile.tail_warning,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SpectrumReport {
    c: f64,
    n: usize,
    #[serde(rename = "L")]
    length: f64,
    eigenvalues: Vec<f64>,
    analytic_errors: AnalyticErrors,
}

#[derive(Serialize)]
struct AnalyticErrors {
    lambda1: f64,
    lambda2: f64,
    #[serde(rename = "psi1_L2")]
    psi1_l2: f64,
    #[serde(rename = "psi2_L2")]
    psi2_l2: f64,
}

fn cmd_spectrum(
    c: f64,
    k: usize,
    n: Option<usize>,
    length: Option<f64>,
) -> anyhow::Result<ExitCode> {
    let n = n.unwrap_or(2048);
    let length = length.unwrap_or_else(|| default_box_length(c));
    let grid = Grid::new(n, length)?;
    let op = build_operator(c, &grid)?;
    let spec = eigen_pairs(&op, k.max(2))?;

    let half_sqrt_c = 0.5 * c.sqrt();
    let psi1 = {
        let raw = grid.field_from_fn(|x| 1.0 / (half_sqrt_c * x).cosh().powi(2));
        raw.scale(1.0 / raw.norm_sq().sqrt())
    };
    let psi2 = {
        let raw =
            grid.field_from_fn(|x| (half_sqrt_c * x).sinh() / (half_sqrt_c * x).cosh().powi(2));
        raw.scale(1.0 / raw.norm_sq().sqrt())
    };
    let psi2_err = {
        let plus = spec.eigenfunctions[1].sub(&psi2).norm_sq().sqrt();
        let minus = spec.eigenfunctions[1].add(&psi2).norm_sq().sqrt();
        plus.min(minus)
    };
    let report = SpectrumReport {
        c,
        n,
        length,
        eigenvalues: spec.eigenvalues.clone(),
        analytic_errors: AnalyticErrors {
            lambda1: (spec.eigenvalues[0] + c).abs(),
            lambda2: (spec.eigenvalues[1] + 0.25 * c).abs(),
            psi1_l2: spec.eigenfunctions[0].sub(&psi1).norm_sq().sqrt(),
            psi2_l2: psi2_err,
        },
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SeedSummary {
    seed: u64,
    c_eff: f64,
    d_i0: f64,
    sup_d_ii: f64,
    dm_drift: f64,
    min_margin35: f64,
    min_margin_one_sixth: f64,
    pass: bool,
}

#[derive(Serialize)]
struct EnsembleSummary {
    c: f64,
    seeds: Vec<SeedSummary>,
    all_pass: bool,
}

fn seed_summary(seed: u64, report: &StabilityReport) -> SeedSummary {
    let dm0 = report.records[0].dm_direct;
    let mut sup_d_ii = 0.0_f64;
    let mut dm_drift = 0.0_f64;
    let mut min_margin35 = f64::INFINITY;
    let mut min_one_sixth = f64::INFINITY;
    for r in &report.records {
        sup_d_ii = sup_d_ii.max(r.d_ii);
        dm_drift = dm_drift.max((r.dm_direct - dm0).abs() / dm0.abs().max(1.0));
        min_margin35 = min_margin35.min(r.margin35);
        min_one_sixth = min_one_sixth.min(r.margin_one_sixth);
    }
    let pass = sup_d_ii <= 10.0 * report.d_i0
        && dm_drift <= 1e-6
        && min_margin35 >= 0.0
        && min_one_sixth >= 0.0;
    SeedSummary {
        seed,
        c_eff: report.c_eff,
        d_i0: report.d_i0,
        sup_d_ii,
        dm_drift,
        min_margin35,
        min_margin_one_sixth: min_one_sixth,
        pass,
    }
}

fn cmd_stability(cfg: &RunConfig, seeds: u64) -> anyhow::Result<ExitCode> {
    let out = cfg.output_dir();
    std::fs::create_dir_all(&out)?;
    let setup = ExperimentSetup {
        n: cfg.grid.n,
        length: cfg.grid.length,
        k: cfg.clifford.k,
        dt: cfg.integrator.dt,
        sample_every: cfg.integrator.sample_every,
        scheme: cfg.integrator.scheme,
    };
    let mut summaries = Vec::new();
    for i in 0..seeds.max(1) {
        let seed = cfg.perturbation.seed + i;
        let pert = PerturbationSpec {
            seed,
            ..cfg.perturbation.to_spec()
        };
        let report = run_soliton_stability(cfg.soliton.c, &pert, cfg.integrator.t_end, &setup)?;
        write_stability_csv(&out.join(format!("stability_seed{seed}.csv")), &report)?;
        summaries.push(seed_summary(seed, &report));
    }
    let all_pass = summaries.iter().all(|s| s.pass);
    let summary = EnsembleSummary {
        c: cfg.soliton.c,
        seeds: summaries,
        all_pass,
    };
    let path = out.join("ensemble.json");
    std::fs::write(&path, serde_json::to_string_pretty(&summary)?)?;
    println!("wrote {} and per-seed CSVs", path.display());
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_ground_state(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let setup = ExperimentSetup {
        n: cfg.grid.n,
        length: cfg.grid.length,
        k: cfg.clifford.k,
        dt: cfg.integrator.dt,
        sample_every: cfg.integrator.sample_every,
        scheme: cfg.integrator.scheme,
    };
    let report =
        run_ground_state_stability(&cfg.perturbation.to_spec(), cfg.integrator.t_end, &setup)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(
        if report.bounded && report.budget_v_ok && report.budget_m_ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        },
    )
}

fn cmd_verify_all() -> anyhow::Result<ExitCode> {
    let results = skdv::acceptance::run_all(|r| println!("{}", r.line()));
    let all = results.iter().all(|r| r.passed);
    println!(
        "{}/{} criteria passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    Ok(if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
