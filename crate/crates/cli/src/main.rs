//! `ramp-dispatch`: solve single hours, simulate scenarios, sweep ramping
//! prices and check the closed forms against the numeric oracle.
//!
//! Exit codes: 0 success, 1 verification gap above threshold, 2 invalid
//! input, 3 solver failure, 4 oracle failure.

mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ramp_dispatch::{
    base_case_cost, build_base_profile, discrete_cost, duration_curve, optimal_cost, oracle, run_scenario,
    sample_dispatch, sensitivity_sweep, solve_hour, synthetic_year, totals, DispatchError, HourSchedule,
    PriceSet, RenewableLevel, SampleMode, ScenarioConfig,
};

use scenario::{num, read_scenario, read_sidecar, write_csv, write_scenario};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

/// Flag that carries a validated field.
fn flag_for(field: &str) -> &'static str {
    match field {
        "a" => "--a",
        "b" => "--b",
        "c" => "--c",
        "Qz" => "--qz",
        "Q0" => "--q0",
        "QT" => "--qt",
        "ET" => "--et",
        "T" => "--horizon",
        _ => "input",
    }
}

impl From<DispatchError> for CliError {
    fn from(e: DispatchError) -> Self {
        let code = match &e {
            DispatchError::InvalidPrice { .. }
            | DispatchError::InvalidSchedule { .. }
            | DispatchError::DegeneratePrices { .. }
            | DispatchError::BadStep { .. }
            | DispatchError::TooFewIntervals
            | DispatchError::EmptyInput
            | DispatchError::InvalidConfig(_) => 2,
            DispatchError::NoConvergence { .. } | DispatchError::SingularKkt => 4,
            DispatchError::Hour { source, .. } => CliError::from((**source).clone()).code.max(3),
            _ => 3,
        };
        let message = match &e {
            DispatchError::InvalidPrice { field, .. } | DispatchError::InvalidSchedule { field, .. } => {
                format!("{}: {e}", flag_for(field))
            }
            DispatchError::DegeneratePrices { .. } => format!("--a/--c: {e}"),
            DispatchError::BadStep { .. } | DispatchError::TooFewIntervals => format!("--step-seconds: {e}"),
            _ => e.to_string(),
        };
        Self { code, message }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ramp-dispatch", version, about = "Minimum-cost dispatch under energy, power and ramping prices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one hour and write its optimal and conventional trajectories.
    SolveHour(SolveArgs),
    /// Run a multi-hour scenario with schedule-error carry-over.
    Simulate(SimulateArgs),
    /// Compare the closed-form optimal cost with the numeric oracle.
    Verify(VerifyArgs),
    /// Re-run a scenario with the ramping price scaled by each factor.
    Sensitivity(SensitivityArgs),
    /// Write a seeded synthetic scenario file.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
struct Instance {
    /// Marginal price of energy a, $/MW²·h.
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    /// Marginal price of power b, $/MW².
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    b: f64,
    /// Marginal price of ramping c, $·h/MW².
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    /// Must-take generation Qz, MW.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    qz: f64,
    /// Initial power Q0, MW.
    #[arg(long, allow_hyphen_values = true)]
    q0: f64,
    /// Terminal power QT, MW.
    #[arg(long, allow_hyphen_values = true)]
    qt: f64,
    /// Scheduled energy ET, MWh.
    #[arg(long, allow_hyphen_values = true)]
    et: f64,
    /// Horizon T, hours.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    horizon: f64,
}

impl Instance {
    fn build(&self) -> Result<(PriceSet, HourSchedule), CliError> {
        let prices = PriceSet::new(self.a, self.b, self.c, self.qz)?;
        let sched = HourSchedule::with_horizon(self.q0, self.qt, self.et, self.horizon)?;
        Ok((prices, sched))
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Mode {
    Sampled,
    EnergyCorrected,
}

impl From<Mode> for SampleMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Sampled => SampleMode::Sampled,
            Mode::EnergyCorrected => SampleMode::EnergyCorrected,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Level {
    Low,
    High,
}

#[derive(Args, Debug)]
struct OutDir {
    /// Directory for output CSV files.
    #[arg(long, env = "RAMP_DISPATCH_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

impl OutDir {
    fn path(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::io(format!("--out-dir {}: {e}", self.out_dir.display())))?;
        Ok(self.out_dir.join(name))
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    instance: Instance,
    /// Controller update interval, seconds.
    #[arg(long, default_value_t = 300.0)]
    step_seconds: f64,
    /// Number of evenly spaced rows in trajectory.csv.
    #[arg(long, default_value_t = 121)]
    samples: usize,
    #[arg(long, value_enum, default_value = "sampled")]
    mode: Mode,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario CSV with header `hour,a,b,c,Qz,Q0,QT,ET`.
    scenario: PathBuf,
    /// JSON run settings; defaults to the scenario path with a .json extension.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Mean schedule error, MW.
    #[arg(long, allow_hyphen_values = true)]
    error_mean: Option<f64>,
    /// Standard deviation of the schedule error, MW.
    #[arg(long)]
    error_std: Option<f64>,
    /// Controller update interval, seconds.
    #[arg(long)]
    step_seconds: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Start each hour from the previous hour's last dispatch sample.
    #[arg(long)]
    chaining: bool,
}

impl RunArgs {
    fn config(&self) -> Result<ScenarioConfig, CliError> {
        let hours = read_scenario(&self.scenario)?;
        let side = read_sidecar(&self.scenario, self.sidecar.as_deref())?;
        let mut cfg = ScenarioConfig::new(hours);
        let mut error = side.error.unwrap_or_default();
        if let Some(m) = self.error_mean {
            error.mean = m;
        }
        if let Some(s) = self.error_std {
            error.std = s;
        }
        cfg.error = error;
        cfg.seed = self.seed.or(side.seed).unwrap_or(0);
        cfg.t_s = self.step_seconds.or(side.t_s).unwrap_or(cfg.t_s);
        cfg.mode = self.mode.map(SampleMode::from).or(side.mode).unwrap_or_default();
        cfg.chaining = self.chaining || side.chaining.unwrap_or(false);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct SensitivityArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated ramping price factors, e.g. 0.5,1.0,1.5.
    #[arg(long, value_delimiter = ',', required = true)]
    factors: Vec<f64>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    instance: Instance,
    /// Oracle grid intervals.
    #[arg(long, default_value_t = 3600)]
    steps: usize,
    /// Largest acceptable relative gap.
    #[arg(long, default_value_t = 1e-3)]
    threshold: f64,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 8760)]
    hours: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "high")]
    level: Level,
    /// Scenario CSV to write.
    #[arg(long)]
    output: PathBuf,
}

fn solve(args: &SolveArgs) -> Result<u8, CliError> {
    let (prices, sched) = args.instance.build()?;
    if args.samples < 2 {
        return Err(CliError::validation("--samples: need at least 2 rows"));
    }
    let traj = solve_hour(&prices, &sched)?;
    let dispatch = sample_dispatch(&traj, args.step_seconds, args.mode.into())?;
    let base = build_base_profile(&sched);
    let c_opt = optimal_cost(&traj);
    let c_base = base_case_cost(&prices, &sched);
    let c_star = discrete_cost(&dispatch, &prices)?;

    let horizon = sched.horizon();
    let rows = (0..args.samples)
        .map(|i| {
            let t = if i + 1 == args.samples { horizon } else { horizon * i as f64 / (args.samples - 1) as f64 };
            Ok(vec![num(t), num(traj.power_at(t)?), num(base.power_at(t)?), num(traj.ramp_at(t)?)])
        })
        .collect::<Result<Vec<_>, DispatchError>>()?;
    write_csv(&args.out.path("trajectory.csv")?, &["t", "Q_optimal", "Q_base", "Qdot_optimal"], rows)?;
    let ts = dispatch.step_hours();
    write_csv(
        &args.out.path("dispatch.csv")?,
        &["k", "t", "Q_star"],
        dispatch.samples().map(|(k, q)| vec![k.to_string(), num((k as f64 * ts).min(horizon)), num(q)]),
    )?;

    println!("regime   {:?}", traj.regime());
    println!("mu       {} $/MWh", num(traj.mu()));
    println!("lambda   {} $/MWh", num(traj.lambda()));
    println!("qdot0    {} MW/h", num(traj.qdot0()));
    println!("omega    {} 1/h", num(traj.omega()));
    println!("C_opt    {} $", num(c_opt.total));
    println!("C_base   {} $", num(c_base.total));
    println!("C_star   {} $", num(c_star));
    println!("savings  {} $", num(c_base.total - c_star));
    if let Some(tc) = c_opt.sign_split_at {
        println!("t_c      {} h", num(tc));
    }
    Ok(0)
}

fn simulate(args: &SimulateArgs) -> Result<u8, CliError> {
    let cfg = args.run.config()?;
    let results = run_scenario(&cfg)?;
    write_csv(
        &args.out.path("hours.csv")?,
        &["hour", "C_opt", "C_base", "C_star", "savings", "carried_error"],
        results.iter().zip(&cfg.hours).map(|(r, h)| {
            vec![h.hour.to_string(), num(r.c_opt), num(r.c_base), num(r.c_star), num(r.savings), num(r.carried_error)]
        }),
    )?;
    let savings: Vec<f64> = results.iter().map(|r| r.savings).collect();
    let curve = duration_curve(&savings)?;
    write_csv(
        &args.out.path("duration.csv")?,
        &["hours_at_or_above", "savings"],
        curve.points().map(|(n, v)| vec![n.to_string(), num(v)]),
    )?;
    let t = totals(&results);
    println!("hours    {}", results.len());
    println!("C_opt    {} $", num(t.c_opt));
    println!("C_base   {} $", num(t.c_base));
    println!("C_star   {} $", num(t.c_star));
    println!("savings  {} $", num(t.savings));
    Ok(0)
}

fn sensitivity(args: &SensitivityArgs) -> Result<u8, CliError> {
    if args.factors.is_empty() {
        return Err(CliError::validation("--factors: empty factor list"));
    }
    let cfg = args.run.config()?;
    let rows = sensitivity_sweep(&cfg, &args.factors).map_err(|e| match e {
        DispatchError::InvalidConfig(m) => CliError::validation(format!("--factors: {m}")),
        other => other.into(),
    })?;
    write_csv(
        &args.out.path("sensitivity.csv")?,
        &["factor", "total_savings"],
        rows.iter().map(|r| vec![num(r.factor), num(r.total_savings)]),
    )?;
    for r in &rows {
        println!("{}  {} $", num(r.factor), num(r.total_savings));
    }
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let (prices, sched) = args.instance.build()?;
    if !(args.threshold.is_finite() && args.threshold >= 0.0) {
        return Err(CliError::validation("--threshold: must be finite and non-negative"));
    }
    let traj = solve_hour(&prices, &sched)?;
    let analytic = optimal_cost(&traj).total;
    let numeric = oracle::solve_numeric(&prices, &sched, args.steps).map_err(|e| match e {
        DispatchError::InvalidConfig(m) => CliError::validation(format!("--steps: {m}")),
        other => other.into(),
    })?;
    let gap = oracle::compare(analytic, &numeric);
    println!("analytic   {} $", num(analytic));
    println!("oracle     {} $", num(numeric.cost));
    println!("gap        {}", num(gap));
    println!("threshold  {}", num(args.threshold));
    println!("iterations {}", numeric.iterations);
    Ok(if gap <= args.threshold { 0 } else { 1 })
}

fn synth(args: &SynthArgs) -> Result<u8, CliError> {
    if args.hours == 0 {
        return Err(CliError::validation("--hours: must be positive"));
    }
    let level = match args.level {
        Level::Low => RenewableLevel::Low,
        Level::High => RenewableLevel::High,
    };
    write_scenario(&args.output, &synthetic_year(args.hours, args.seed, level))?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::SolveHour(a) => solve(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::Synth(a) => synth(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
