//! `trackside` command-line front end.
//!
//! Every subcommand writes CSV. Numbers use scientific notation with 12
//! significant digits so that output is byte-stable across runs.
//!
//! A `--config <path>` file holds `key=value` lines whose keys are flag names
//! without the leading dashes. Flags given on the command line win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::channel_model::{ChannelParams, TrainProfile};
use crate::error::Error;
use crate::planning::{
    interval_for_dominant_ratio, interval_for_service, plan_track, speed_for_service_and_interval, transmission_window,
    ServiceRequirement, TrackPlan,
};
use crate::ride_simulator::{simulate_ride, SimulationConfig};
use crate::service_calculus::{dominant_ratio, service_up_to_time, total_service, SolverSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

const DEFAULT_POINTS: usize = 200;

#[derive(Debug, Parser)]
#[command(
    name = "trackside",
    version,
    about = "Channel-service calculus and base-station interval planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Capacity versus time for one station: `t,capacity_bits_per_s`.
    Capacity(CurveArgs),
    /// Accumulated service versus time: `t,service_bits`.
    ServiceCurve(CurveArgs),
    /// Dominant ratio versus service distance: `d_s,eta`.
    EtaCurve(EtaCurveArgs),
    /// Speed versus service distance for a fixed service quantity: `d_s,v`.
    SpeedCurve(SpeedCurveArgs),
    /// Service distance for a ratio or quantity requirement.
    SolveInterval(RequirementArgs),
    /// Station layout for a track.
    Plan(PlanArgs),
    /// Transmission window and buffer size of one station.
    Strategy(RequirementArgs),
    /// Ride simulation over a planned track.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// key=value file supplying defaults for any flag
    #[arg(long)]
    config: Option<PathBuf>,
    /// write CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// SNR scale 2 P_s / N0 (distance^alpha)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    rho: Vec<f64>,
    /// linear SNR at the foot point, in dB
    #[arg(long = "snr0-db", value_delimiter = ',', allow_negative_numbers = true)]
    snr0_db: Vec<f64>,
    /// station-to-track offset in meters
    #[arg(long, allow_negative_numbers = true)]
    d0: Option<f64>,
    /// path-loss exponent
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long = "quad-rel-tol")]
    quad_rel_tol: Option<f64>,
    #[arg(long = "quad-abs-tol")]
    quad_abs_tol: Option<f64>,
    #[arg(long = "max-subdivisions")]
    max_subdivisions: Option<usize>,
    #[arg(long = "root-rel-tol")]
    root_rel_tol: Option<f64>,
    #[arg(long = "max-root-iters")]
    max_root_iters: Option<usize>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    common: Common,
    /// train speed in m/s
    #[arg(long, allow_negative_numbers = true)]
    speed: Option<f64>,
    /// half-width of the time grid in seconds (default 10 d0 / v)
    #[arg(long = "t-max", allow_negative_numbers = true)]
    t_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Args)]
struct EtaCurveArgs {
    #[command(flatten)]
    common: Common,
    /// largest service distance (default 20 d0)
    #[arg(long = "ds-max", allow_negative_numbers = true)]
    ds_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Args)]
struct SpeedCurveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "service-bits", allow_negative_numbers = true)]
    service_bits: Option<f64>,
    #[arg(long = "ds-max", allow_negative_numbers = true)]
    ds_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Args)]
struct RequirementArgs {
    #[command(flatten)]
    common: Common,
    /// dominant ratio in (0, 1)
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// required service per station, in bits
    #[arg(long = "service-bits", allow_negative_numbers = true)]
    service_bits: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    speed: Option<f64>,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[command(flatten)]
    req: RequirementArgs,
    #[arg(long = "track-length", allow_negative_numbers = true)]
    track_length: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    req: RequirementArgs,
    #[arg(long = "track-length", allow_negative_numbers = true)]
    track_length: Option<f64>,
    /// time step in seconds (default 1e-4 d0 / v)
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Model(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Model(e) => match e {
                Error::InvalidParameter(_) | Error::InvalidConfig(_) => EXIT_USAGE,
                Error::InfeasibleRatio { .. } | Error::InfeasibleService { .. } => EXIT_INFEASIBLE,
                Error::QuadratureFailure { .. } | Error::SolverFailure(_) => EXIT_SOLVER,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Model(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Runs the CLI on `argv` (including the program name), writing CSV to
/// standard output or `--out`. Returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    run_with(argv, &mut stdout, &mut stderr)
}

/// Like [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(&argv) {
        Ok(cli) => cli,
        Err(Parsed::Display(text)) => {
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
        Err(Parsed::Fail(e)) => {
            let _ = writeln!(err, "error: {}", e.message());
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok((csv, path)) => match emit(&csv, path.as_ref(), out) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {}", e.message());
                e.exit_code()
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

enum Parsed {
    Display(String),
    Fail(CliError),
}

fn clap_error(e: clap::Error) -> Parsed {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            Parsed::Display(e.render().to_string())
        }
        _ => {
            let text = e.render().to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            Parsed::Fail(usage(line.trim_start_matches("error: ").to_string()))
        }
    }
}

fn parse(argv: &[OsString]) -> std::result::Result<Cli, Parsed> {
    let matches = Cli::command().try_get_matches_from(argv).map_err(clap_error)?;
    let (_, sub) = matches.subcommand().expect("subcommand is required");
    let Some(config) = sub.get_one::<PathBuf>("config") else {
        return Cli::from_arg_matches(&matches).map_err(clap_error);
    };

    let entries = read_config(config).map_err(Parsed::Fail)?;
    let known = all_long_flags();
    let mut merged = argv.to_vec();
    for (key, value) in entries {
        if key == "config" || !known.contains_key(&key) {
            return Err(Parsed::Fail(usage(format!("unknown config key '{key}'"))));
        }
        let id = key.replace('-', "_");
        let accepted = sub_accepts(&matches, &id);
        if !accepted {
            continue;
        }
        let given = sub.ids().any(|i| i.as_str() == id) && sub.value_source(&id) == Some(ValueSource::CommandLine);
        if !given {
            merged.push(OsString::from(format!("--{key}={value}")));
        }
    }
    let matches = Cli::command().try_get_matches_from(&merged).map_err(clap_error)?;
    Cli::from_arg_matches(&matches).map_err(clap_error)
}

fn sub_accepts(matches: &clap::ArgMatches, id: &str) -> bool {
    let (name, _) = matches.subcommand().expect("subcommand is required");
    Cli::command()
        .find_subcommand(name)
        .map(|c| c.get_arguments().any(|a| a.get_id().as_str() == id))
        .unwrap_or(false)
}

fn all_long_flags() -> BTreeMap<String, ()> {
    let mut flags = BTreeMap::new();
    for sub in Cli::command().get_subcommands() {
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                flags.insert(long.to_string(), ());
            }
        }
    }
    flags
}

fn read_config(path: &PathBuf) -> CliResult<Vec<(String, String)>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", n + 1)))?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn emit(csv: &str, path: Option<&PathBuf>, out: &mut dyn std::io::Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, csv).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write output: {e}"))),
    }
}

/// Scientific notation, 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn settings(c: &Common) -> CliResult<SolverSettings> {
    let d = SolverSettings::default();
    let s = SolverSettings {
        quad_rel_tol: c.quad_rel_tol.unwrap_or(d.quad_rel_tol),
        quad_abs_tol: c.quad_abs_tol.unwrap_or(d.quad_abs_tol),
        max_subdivisions: c.max_subdivisions.unwrap_or(d.max_subdivisions),
        root_rel_tol: c.root_rel_tol.unwrap_or(d.root_rel_tol),
        max_root_iters: c.max_root_iters.unwrap_or(d.max_root_iters),
    };
    s.validate()?;
    Ok(s)
}

fn required<T: Copy>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| usage(format!("missing required flag --{flag}")))
}

/// One channel per requested SNR value, labelled for multi-valued output.
fn channels(c: &Common) -> CliResult<(Vec<ChannelParams>, &'static str, Vec<f64>)> {
    let d0 = required(c.d0, "d0")?;
    let alpha = required(c.alpha, "alpha")?;
    match (c.rho.is_empty(), c.snr0_db.is_empty()) {
        (false, true) => {
            let ps = c
                .rho
                .iter()
                .map(|&r| ChannelParams::new(r, d0, alpha))
                .collect::<Result<_, _>>()?;
            Ok((ps, "rho", c.rho.clone()))
        }
        (true, false) => {
            let ps = c
                .snr0_db
                .iter()
                .map(|&db| ChannelParams::from_snr0_db(db, d0, alpha))
                .collect::<Result<_, _>>()?;
            Ok((ps, "snr0_db", c.snr0_db.clone()))
        }
        (false, false) => Err(usage("give exactly one of --rho or --snr0-db, not both")),
        (true, true) => Err(usage("missing required flag --rho or --snr0-db")),
    }
}

fn channel(c: &Common) -> CliResult<ChannelParams> {
    let (ps, _, _) = channels(c)?;
    if ps.len() != 1 {
        return Err(usage("this subcommand takes a single --rho or --snr0-db value"));
    }
    Ok(ps[0])
}

fn points(n: Option<usize>, min: usize) -> CliResult<usize> {
    let n = n.unwrap_or(DEFAULT_POINTS);
    if n < min {
        return Err(usage(format!("--points must be at least {min}")));
    }
    Ok(n)
}

fn positive(x: f64, flag: &str) -> CliResult<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(usage(format!("--{flag} must be finite and > 0, got {x}")))
    }
}

fn train(speed: Option<f64>) -> CliResult<TrainProfile> {
    Ok(TrainProfile::new(required(speed, "speed")?)?)
}

fn requirement(r: &RequirementArgs) -> CliResult<ServiceRequirement> {
    match (r.eta, r.service_bits) {
        (Some(eta), None) => Ok(ServiceRequirement::dominant_ratio(eta)?),
        (None, Some(bits)) => Ok(ServiceRequirement::service_quantity(bits)?),
        (Some(_), Some(_)) => Err(usage("give exactly one of --eta or --service-bits, not both")),
        (None, None) => Err(usage("missing required flag --eta or --service-bits")),
    }
}

// Speed is optional for ratio requirements; any value gives the same d_s.
fn requirement_train(r: &RequirementArgs, req: ServiceRequirement) -> CliResult<TrainProfile> {
    match (req, r.speed) {
        (ServiceRequirement::DominantRatio(_), None) => Ok(TrainProfile::new(1.0)?),
        _ => train(r.speed),
    }
}

fn execute(cmd: &Command) -> CliResult<(String, Option<PathBuf>)> {
    let (csv, common) = match cmd {
        Command::Capacity(a) => (capacity_csv(a)?, &a.common),
        Command::ServiceCurve(a) => (service_curve_csv(a)?, &a.common),
        Command::EtaCurve(a) => (eta_curve_csv(a)?, &a.common),
        Command::SpeedCurve(a) => (speed_curve_csv(a)?, &a.common),
        Command::SolveInterval(a) => (solve_interval_csv(a)?, &a.common),
        Command::Plan(a) => (plan_csv(a)?, &a.req.common),
        Command::Strategy(a) => (strategy_csv(a)?, &a.common),
        Command::Simulate(a) => (simulate_csv(a)?, &a.req.common),
    };
    Ok((csv, common.out.clone()))
}

fn symmetric_grid(half: f64, n: usize) -> impl Iterator<Item = f64> {
    let last = (n - 1) as f64;
    (0..n).map(move |i| half * (2.0 * i as f64 - last) / last)
}

fn time_grid(a: &CurveArgs, p: &ChannelParams, v: f64) -> CliResult<Vec<f64>> {
    let t_max = positive(a.t_max.unwrap_or(10.0 * p.d0() / v), "t-max")?;
    Ok(symmetric_grid(t_max, points(a.points, 2)?).collect())
}

fn capacity_csv(a: &CurveArgs) -> CliResult<String> {
    let p = channel(&a.common)?;
    settings(&a.common)?;
    let tr = train(a.speed)?;
    let mut csv = String::from("t,capacity_bits_per_s\n");
    for t in time_grid(a, &p, tr.speed())? {
        let _ = writeln!(csv, "{},{}", fmt_num(t), fmt_num(p.capacity_at_time(t, tr)));
    }
    Ok(csv)
}

fn service_curve_csv(a: &CurveArgs) -> CliResult<String> {
    let p = channel(&a.common)?;
    let s = settings(&a.common)?;
    let tr = train(a.speed)?;
    let mut csv = String::from("t,service_bits\n");
    for t in time_grid(a, &p, tr.speed())? {
        let _ = writeln!(csv, "{},{}", fmt_num(t), fmt_num(service_up_to_time(t, &p, tr, &s)?));
    }
    Ok(csv)
}

fn eta_curve_csv(a: &EtaCurveArgs) -> CliResult<String> {
    let (ps, label, values) = channels(&a.common)?;
    let s = settings(&a.common)?;
    let n = points(a.points, 2)?;
    let multi = ps.len() > 1;
    let mut csv = if multi {
        format!("{label},d_s,eta\n")
    } else {
        String::from("d_s,eta\n")
    };
    for (p, value) in ps.iter().zip(values) {
        let ds_max = positive(a.ds_max.unwrap_or(20.0 * p.d0()), "ds-max")?;
        for i in 0..n {
            let d_s = ds_max * i as f64 / (n - 1) as f64;
            let eta = dominant_ratio(d_s, p, &s)?;
            if multi {
                let _ = write!(csv, "{},", fmt_num(value));
            }
            let _ = writeln!(csv, "{},{}", fmt_num(d_s), fmt_num(eta));
        }
    }
    Ok(csv)
}

fn speed_curve_csv(a: &SpeedCurveArgs) -> CliResult<String> {
    let p = channel(&a.common)?;
    let s = settings(&a.common)?;
    let bits = required(a.service_bits, "service-bits")?;
    let ds_max = positive(a.ds_max.unwrap_or(20.0 * p.d0()), "ds-max")?;
    let n = points(a.points, 1)?;
    let mut csv = String::from("d_s,v\n");
    for i in 1..=n {
        let d_s = ds_max * i as f64 / n as f64;
        let v = speed_for_service_and_interval(bits, d_s, &p, &s)?;
        let _ = writeln!(csv, "{},{}", fmt_num(d_s), fmt_num(v));
    }
    Ok(csv)
}

fn solve_interval_csv(a: &RequirementArgs) -> CliResult<String> {
    let p = channel(&a.common)?;
    let s = settings(&a.common)?;
    let d_s = match requirement(a)? {
        ServiceRequirement::DominantRatio(eta) => interval_for_dominant_ratio(eta, &p, &s)?,
        ServiceRequirement::ServiceQuantity(bits) => interval_for_service(bits, train(a.speed)?, &p, &s)?,
    };
    Ok(format!("d_s\n{}\n", fmt_num(d_s)))
}

fn plan_rows(plan: &TrackPlan) -> String {
    let mut csv = String::from("index,position,region_start,region_end,interval_to_next\n");
    for (i, st) in plan.stations.iter().enumerate() {
        let next = plan.intervals.get(i).map(|&d| fmt_num(d)).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{i},{},{},{},{next}",
            fmt_num(st.position),
            fmt_num(st.region_start),
            fmt_num(st.region_end)
        );
    }
    csv
}

fn plan_csv(a: &PlanArgs) -> CliResult<String> {
    let p = channel(&a.req.common)?;
    let s = settings(&a.req.common)?;
    let req = requirement(&a.req)?;
    let tr = requirement_train(&a.req, req)?;
    let length = positive(required(a.track_length, "track-length")?, "track-length")?;
    Ok(plan_rows(&plan_track(length, req, tr, &p, &s)?))
}

fn strategy_csv(a: &RequirementArgs) -> CliResult<String> {
    let p = channel(&a.common)?;
    let s = settings(&a.common)?;
    let req = requirement(a)?;
    let w = transmission_window(req, train(a.speed)?, &p, &s)?;
    Ok(format!(
        "x_start,x_end,t_start,t_end,buffer_bits\n{},{},{},{},{}\n",
        fmt_num(w.x_start),
        fmt_num(w.x_end),
        fmt_num(w.t_start),
        fmt_num(w.t_end),
        fmt_num(w.buffer_bits)
    ))
}

fn simulate_csv(a: &SimulateArgs) -> CliResult<String> {
    let p = channel(&a.req.common)?;
    let s = settings(&a.req.common)?;
    let req = requirement(&a.req)?;
    let tr = train(a.req.speed)?;
    let length = positive(required(a.track_length, "track-length")?, "track-length")?;
    let plan = plan_track(length, req, tr, &p, &s)?;
    let n = plan.stations.len() as f64;
    let cfg = SimulationConfig::new(plan, tr, p, a.dt)?;
    let report = simulate_ride(&cfg)?;
    let station_total = total_service(&p, tr, &SolverSettings::default())?;

    let mut csv = String::from("station_index,delivered_bits,ratio\n");
    for (i, (bits, ratio)) in report
        .per_station_bits
        .iter()
        .zip(&report.per_station_ratio)
        .enumerate()
    {
        let _ = writeln!(csv, "{i},{},{}", fmt_num(*bits), fmt_num(*ratio));
    }
    let _ = writeln!(
        csv,
        "total,{},{}",
        fmt_num(report.total_bits),
        fmt_num(report.total_bits / (n * station_total))
    );
    Ok(csv)
}
