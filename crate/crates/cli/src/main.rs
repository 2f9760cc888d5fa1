//! `gsic`: power allocation, feasibility, detection ordering, iterative
//! power control, and capacity-region sweeps for groupwise successive
//! interference cancellation systems.
//!
//! Exit codes: 0 success (and feasible), 1 internal error, 2 infeasible,
//! 3 invalid configuration or flags.

mod config;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gsic_core::{
    brute_force_order, check_feasibility, derive_params, recover_transmit_power, run_power_control,
    solve_powers, solve_powers_recursive, sorted_order, total_power, trace_boundary,
    ArchitectureKind, Error as CoreError, GroupParams, IterationOutcome, ReceiverKind, SystemModel,
    UpdateSchedule,
};

use config::ConfigFile;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, flags or environment: exit 3.
    Validation(String),
    /// The system admits no positive power solution: exit 2.
    Infeasible(String),
    /// Anything else: exit 1.
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Internal(m) => write!(f, "error: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

/// Solver errors reached from a structurally valid config are feasibility
/// outcomes, not validation ones.
fn solver_error(e: CoreError) -> CliError {
    match e {
        CoreError::InfeasibleSystem { .. }
        | CoreError::RecursionInfeasible { .. }
        | CoreError::SingularSystem { .. }
        | CoreError::DegenerateGroup { .. }
        | CoreError::AllInfeasible => CliError::Infeasible(e.to_string()),
        CoreError::InvalidOrder { .. } | CoreError::InvalidParameter { .. } => {
            CliError::Validation(e.to_string())
        }
        other => CliError::Internal(other.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReceiverArg {
    Lmmse,
    Mf,
}

impl From<ReceiverArg> for ReceiverKind {
    fn from(r: ReceiverArg) -> Self {
        match r {
            ReceiverArg::Lmmse => ReceiverKind::Lmmse,
            ReceiverArg::Mf => ReceiverKind::MatchedFilter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArchArg {
    GsicLmmse,
    GsicMf,
    AllMf,
    Multicode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScheduleArg {
    Sync,
    Roundrobin,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderMode {
    Brute,
    Sorted,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON system description.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Receiver used within detection groups.
    #[arg(long, value_enum, default_value = "lmmse")]
    receiver: ReceiverArg,
    /// Detection order as comma-separated class labels (0-based);
    /// defaults to ascending cancellation error.
    #[arg(long, value_name = "a,b,c")]
    order: Option<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "gsic",
    version,
    about = "GSIC power allocation and capacity toolbox"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the derived per-group quantities.
    Derive {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write them as CSV.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Check the power-control feasibility conditions (exit 2 when
    /// infeasible).
    Feasibility {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Solve for the optimal received powers by both routes and print
    /// them (exit 1 if the routes disagree).
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the powers as CSV.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Find the detection order minimizing total received power.
    Order {
        #[command(flatten)]
        common: CommonArgs,
        /// brute examines every permutation; sorted applies the
        /// ascending-error rule directly.
        #[arg(long, value_enum, default_value = "brute")]
        mode: OrderMode,
        /// Write every permutation's total as CSV (brute mode).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run iterative power control from zero power and export the trace.
    PcSim {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "sync")]
        schedule: ScheduleArg,
        /// Seed for the random schedule.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative convergence tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 1_000_000)]
        max_iter: usize,
        /// Trace CSV destination (stdout when omitted).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Trace a two-class capacity-region boundary.
    Region {
        /// JSON system description (exactly two groups; their alpha
        /// fields are ignored by the sweep).
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[arg(long, value_enum)]
        arch: ArchArg,
        /// Codes per high-rate user for the multicode architecture.
        #[arg(long = "M", default_value_t = 4)]
        m: u32,
        /// Class-1 load grid as START:STOP:STEP.
        #[arg(long, value_name = "START:STOP:STEP", default_value = "0:2:0.01")]
        sweep: String,
        /// Bisection tolerance on the class-2 load.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Boundary CSV destination (stdout when omitted).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Write the three architecture-comparison datasets at the standard
    /// two-class benchmark parameters.
    Figures {
        /// Output directory.
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        /// Class-1 load grid as START:STOP:STEP.
        #[arg(long, value_name = "START:STOP:STEP", default_value = "0:2:0.01")]
        sweep: String,
    },
}

fn main() -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("{e}");
        return ExitCode::from(e.exit_code());
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// GSIC_THREADS caps the rayon pool used by region sweeps.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GSIC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        CliError::Validation(format!(
            "GSIC_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(format!("thread pool setup failed: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Derive { common, out } => cmd_derive(&common, out.as_deref()),
        Command::Feasibility { common } => cmd_feasibility(&common),
        Command::Solve { common, out } => cmd_solve(&common, out.as_deref()),
        Command::Order { common, mode, out } => cmd_order(&common, mode, out.as_deref()),
        Command::PcSim {
            common,
            schedule,
            seed,
            tol,
            max_iter,
            out,
        } => cmd_pc_sim(&common, schedule, seed, tol, max_iter, out.as_deref()),
        Command::Region {
            config,
            arch,
            m,
            sweep,
            tol,
            out,
        } => cmd_region(&config, arch, m, &sweep, tol, out.as_deref()),
        Command::Figures { out, sweep } => cmd_figures(&out, &sweep),
    }
}

// ─── Shared loading ─────────────────────────────────────────────────────

fn load_system(common: &CommonArgs) -> Result<(SystemModel, ReceiverKind), CliError> {
    let kind: ReceiverKind = common.receiver.into();
    let system = load_config(&common.config)?.to_system(kind)?;
    Ok((system, kind))
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    ConfigFile::parse(&text)
}

fn resolve_order(system: &SystemModel, arg: &Option<String>) -> Result<Vec<usize>, CliError> {
    let order = match arg {
        None => sorted_order(system),
        Some(text) => {
            let parsed: Result<Vec<usize>, _> =
                text.split(',').map(|t| t.trim().parse::<usize>()).collect();
            parsed.map_err(|_| {
                CliError::Validation(format!(
                    "--order must be comma-separated labels, got {text:?}"
                ))
            })?
        }
    };
    system
        .validate_order(&order)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(order)
}

fn write_or_print(path: Option<&Path>, content: &str, what: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, content)
                .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", p.display())))?;
            println!("{what} written to {}", p.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn fmt_order(order: &[usize]) -> String {
    order
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

// ─── Commands ───────────────────────────────────────────────────────────

fn cmd_derive(common: &CommonArgs, out: Option<&Path>) -> Result<(), CliError> {
    let (system, kind) = load_system(common)?;
    let mut csv = String::from("group,nu,epsilon,theta,lambda_lmmse,lambda_mf,margin\n");
    println!("group          nu     epsilon       theta   lambda_lmmse   lambda_mf      margin");
    for (label, g) in system.groups.iter().enumerate() {
        let d = derive_params(g, kind).map_err(solver_error)?;
        if g.epsilon_clamped() {
            eprintln!(
                "warning: group {label}: derived cancellation error sqrt(paths*xi2) exceeds 1, clamped"
            );
        }
        println!(
            "{label:>5}  {:>10.6} {:>10.6} {:>11.6}  {:>13.6} {:>11.6} {:>11.6}",
            d.nu, d.epsilon, d.theta, d.lambda_lmmse, d.lambda_mf, d.margin
        );
        csv.push_str(&format!(
            "{label},{},{},{},{},{},{}\n",
            d.nu, d.epsilon, d.theta, d.lambda_lmmse, d.lambda_mf, d.margin
        ));
    }
    if let Some(p) = out {
        write_or_print(Some(p), &csv, "derived parameters")?;
    }
    Ok(())
}

fn cmd_feasibility(common: &CommonArgs) -> Result<(), CliError> {
    let (system, kind) = load_system(common)?;
    let order = resolve_order(&system, &common.order)?;
    let report = check_feasibility(&system, &order, kind).map_err(solver_error)?;
    println!("detection order: {}", fmt_order(&order));
    for (label, ok) in report.per_group_sir_ok.iter().enumerate() {
        println!(
            "group {label}: target below estimation cap: {}",
            if *ok { "yes" } else { "no" }
        );
    }
    match report.spectral_radius {
        Some(rho) => println!("spectral radius: {rho}"),
        None => println!("spectral radius: undefined (unreachable target SIR)"),
    }
    println!("feasible: {}", report.feasible);
    if report.feasible {
        Ok(())
    } else {
        Err(CliError::Infeasible(
            "target SIRs are not jointly achievable".into(),
        ))
    }
}

fn cmd_solve(common: &CommonArgs, out: Option<&Path>) -> Result<(), CliError> {
    let (system, kind) = load_system(common)?;
    let order = resolve_order(&system, &common.order)?;
    let direct = solve_powers(&system, &order, kind).map_err(solver_error)?;
    let recursive = solve_powers_recursive(&system, &order, kind).map_err(solver_error)?;

    for (a, b) in direct.q.iter().zip(&recursive.q) {
        if (a - b).abs() > 1e-8 * a.abs() {
            return Err(CliError::Internal(format!(
                "solver routes disagree: matrix {a} vs recursion {b}"
            )));
        }
    }

    println!("# sigma2={}", system.sigma2);
    println!("detection order: {}", fmt_order(&order));
    println!("group    Q(matrix)      Q(recursion)   transmit_equivalent");
    for (pos, &label) in order.iter().enumerate() {
        let transmit = recover_transmit_power(direct.q[pos], &system.groups[label], 1.0)
            .map_err(solver_error)?;
        println!(
            "{label:>5}  {:>14.6} {:>14.6}  {:>14.6}",
            direct.q[pos] / system.sigma2,
            recursive.q[pos] / system.sigma2,
            transmit / system.sigma2
        );
    }
    println!(
        "total: {} (matrix), {} (recursion)",
        direct.total / system.sigma2,
        recursive.total / system.sigma2
    );
    if let Some(p) = out {
        write_or_print(
            Some(p),
            &output::powers_csv(&direct, &system, &order),
            "powers",
        )?;
    }
    Ok(())
}

fn cmd_order(common: &CommonArgs, mode: OrderMode, out: Option<&Path>) -> Result<(), CliError> {
    let (system, kind) = load_system(common)?;
    match mode {
        OrderMode::Brute => {
            let result = brute_force_order(&system, kind).map_err(solver_error)?;
            println!("best order: {}", fmt_order(&result.best_order));
            println!(
                "total received power: {}",
                result.best_total / system.sigma2
            );
            if let (Some(p), Some(all)) = (out, &result.all_totals) {
                let mut rows = all.clone();
                for (_, total) in rows.iter_mut() {
                    *total /= system.sigma2;
                }
                write_or_print(Some(p), &output::order_csv(&rows), "permutation totals")?;
            }
        }
        OrderMode::Sorted => {
            let order = sorted_order(&system);
            let total = total_power(&system, &order, kind).map_err(solver_error)?;
            println!("ascending-error order: {}", fmt_order(&order));
            println!("total received power: {}", total / system.sigma2);
        }
    }
    Ok(())
}

fn cmd_pc_sim(
    common: &CommonArgs,
    schedule: ScheduleArg,
    seed: u64,
    tol: f64,
    max_iter: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (system, kind) = load_system(common)?;
    let order = resolve_order(&system, &common.order)?;
    let schedule = match schedule {
        ScheduleArg::Sync => UpdateSchedule::Synchronous,
        ScheduleArg::Roundrobin => UpdateSchedule::RoundRobin,
        ScheduleArg::Random => UpdateSchedule::RandomAsync { seed },
    };
    let q0 = vec![0.0; system.len()];
    let trace = run_power_control(&system, &order, kind, &q0, schedule, tol, max_iter)
        .map_err(solver_error)?;
    println!("detection order: {}", fmt_order(&order));
    println!("steps: {}", trace.rows.len());
    println!("outcome: {:?}", trace.outcome);
    write_or_print(out, &output::trace_csv(&trace, &system), "trace")?;
    match trace.outcome {
        IterationOutcome::Converged => Ok(()),
        IterationOutcome::Diverged => Err(CliError::Infeasible(
            "power control diverged; the target SIRs are not jointly achievable".into(),
        )),
        IterationOutcome::MaxIterations => Err(CliError::Internal(format!(
            "no convergence within {max_iter} iterations"
        ))),
    }
}

fn cmd_region(
    config: &Path,
    arch: ArchArg,
    m: u32,
    sweep: &str,
    tol: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let kind = match arch {
        ArchArg::GsicMf | ArchArg::AllMf => ReceiverKind::MatchedFilter,
        _ => ReceiverKind::Lmmse,
    };
    let system = cfg.to_system(kind)?;
    if system.len() != 2 {
        return Err(CliError::Validation(format!(
            "region sweeps need exactly two groups, config has {}",
            system.len()
        )));
    }
    let architecture = match arch {
        ArchArg::GsicLmmse => ArchitectureKind::GsicLmmse,
        ArchArg::GsicMf => ArchitectureKind::GsicMf,
        ArchArg::AllMf => ArchitectureKind::AllMf,
        ArchArg::Multicode => ArchitectureKind::MulticodeLmmse { codes: m },
    };
    let grid = parse_sweep(sweep)?;
    let samples = trace_boundary(
        architecture,
        &grid,
        &system.groups[0],
        &system.groups[1],
        tol,
    )
    .map_err(solver_error)?;
    write_or_print(out, &output::region_csv(&samples), "region boundary")?;
    Ok(())
}

fn cmd_figures(dir: &Path, sweep: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
    let grid = parse_sweep(sweep)?;
    let xi2_values = [0.0, 0.001, 0.01];
    let tol = 1e-6;
    let class = |xi2: f64| GroupParams::new(0.0, 10.0, 1.0, xi2, 3).expect("benchmark class");

    type Curve = (String, f64, Vec<gsic_core::RegionSample>);
    let curves = |archs: &[ArchitectureKind]| -> Result<Vec<Curve>, CliError> {
        let mut out = Vec::new();
        for &arch in archs {
            for &xi2 in &xi2_values {
                let c = class(xi2);
                let samples = trace_boundary(arch, &grid, &c, &c, tol).map_err(solver_error)?;
                out.push((arch.label(), xi2, samples));
            }
        }
        Ok(out)
    };

    let multicode = ArchitectureKind::MulticodeLmmse { codes: 4 };
    let figures = [
        (
            "fig1_gsic_lmmse_vs_mf.csv",
            curves(&[ArchitectureKind::GsicLmmse, ArchitectureKind::GsicMf])?,
        ),
        (
            "fig2_gsicmf_vs_allmf.csv",
            curves(&[ArchitectureKind::GsicMf, ArchitectureKind::AllMf])?,
        ),
        (
            "fig3_gsic_vs_multicode.csv",
            curves(&[ArchitectureKind::GsicLmmse, multicode])?,
        ),
    ];
    for (name, data) in &figures {
        let path = dir.join(name);
        std::fs::write(&path, output::figure_csv(data))
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Parses START:STOP:STEP into an inclusive, strictly increasing grid.
///
/// Plain decimal tokens take an exact fixed-point route, so a sweep like
/// 0:2:0.01 yields the f64 nearest to each true decimal (0.15, not
/// 0.15000000000000002) and the CSV output stays clean.
fn parse_sweep(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("--sweep must be START:STOP:STEP, got {text:?}"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    if let Some(grid) = decimal_grid(parts[0], parts[1], parts[2]) {
        return Ok(grid);
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
        return Err(CliError::Validation(format!(
            "--sweep needs stop >= start and step > 0, got {text:?}"
        )));
    }
    let count = ((stop - start) / step * (1.0 + 1e-12) + 1e-12).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

/// Fixed-point grid construction for plain decimal tokens.
fn decimal_grid(start: &str, stop: &str, step: &str) -> Option<Vec<f64>> {
    let a = parse_decimal(start)?;
    let b = parse_decimal(stop)?;
    let s = parse_decimal(step)?;
    let scale = a.1.max(b.1).max(s.1);
    let up = |(digits, decimals): (i128, u32)| digits * 10_i128.pow(scale - decimals);
    let (a, b, s) = (up(a), up(b), up(s));
    if s <= 0 || b < a {
        return None;
    }
    let den = 10_f64.powi(scale as i32);
    let count = (b - a) / s;
    Some((0..=count).map(|k| (a + k * s) as f64 / den).collect())
}

/// Nonnegative decimal literal -> (digits as integer, decimal places).
fn parse_decimal(text: &str) -> Option<(i128, u32)> {
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if whole.len() + frac.len() > 18 {
        return None;
    }
    let digits: i128 = format!("{whole}{frac}").parse().ok()?;
    Some((digits, frac.len() as u32))
}
