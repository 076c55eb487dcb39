//! `corridor` — scriptable planner for railway cellular corridors.
//!
//! Every subcommand is deterministic given its config and cached inputs and
//! writes CSV plus a structured report file with the effective config.

use corridor_cli::{config, output};

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use corridor_core::energy::{corridor_energy_per_km, OperatingPolicy};
use corridor_core::link::{snr_profile_with_model, LinkError};
use corridor_core::planner::{
    max_isd, place_repeaters, sweep_max_isd, PlannerError, SweepResult,
};
use corridor_core::pvgis::{fetch_series, PvgisError};
use corridor_core::series::{IrradianceSeries, SeriesError};
use corridor_core::solar::{build_consumption_profile, simulate_battery, size_system, SolarError};
use corridor_core::synthetic;

use config::RunConfig;
use output::EnergyRow;

#[derive(Parser)]
#[command(
    name = "corridor",
    about = "Link budgets, repeater planning, energy accounting and off-grid PV sizing for railway cellular corridors",
    version
)]
struct Cli {
    /// Path to a run-config TOML; built-in defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-position link profile CSV: RSRP per source, total signal/noise, SNR, throughput.
    Profile {
        /// Inter-site distance in meters.
        #[arg(long)]
        isd: f64,
        /// Number of repeater nodes between the sites.
        #[arg(long)]
        n: usize,
        /// Track sampling step in meters.
        #[arg(long, default_value_t = 1.0)]
        grid_step: f64,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Maximum-ISD sweep CSV over a range of repeater counts.
    MaxIsd {
        /// Smallest repeater count, inclusive.
        #[arg(long, default_value_t = 1)]
        n_from: usize,
        /// Largest repeater count, inclusive.
        #[arg(long, default_value_t = 10)]
        n_to: usize,
        /// Worker threads for sweep rows.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Per-km corridor energy CSV: conventional baseline plus each repeater
    /// count under the always-on, sleep and solar policies.
    Energy {
        #[arg(long, default_value_t = 1)]
        n_from: usize,
        #[arg(long, default_value_t = 10)]
        n_to: usize,
        /// Comma-separated ISDs in meters, one per repeater count; computed
        /// from the max-ISD sweep when omitted.
        #[arg(long)]
        isds: Option<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Battery-balance simulation for one repeater supply; writes autonomy stats CSV.
    SolarSim {
        #[command(flatten)]
        source: SeriesSource,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Smallest PV panel/battery pair with zero downtime; writes the system CSV.
    SolarSize {
        #[command(flatten)]
        source: SeriesSource,
        /// Candidate panel sizes in watts-peak, ascending.
        #[arg(long, default_value = "540,600,660")]
        panels: String,
        /// Candidate battery capacities in watt-hours, ascending.
        #[arg(long, default_value = "720,1440,2160,2880")]
        batteries: String,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Fetch an hourly PVGIS series into the cache and write it as CSV.
    Fetch {
        /// Named location from the config or "lat,lon" in degrees.
        #[arg(long)]
        location: String,
        #[command(flatten)]
        io: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Report file path; defaults to <out>.report.toml.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Where the solar commands read their hourly series from.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct SeriesSource {
    /// Plain CSV series file (timestamp,poa_wm2 or timestamp,pv_w).
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Named location from the config or "lat,lon" in degrees (uses PVGIS).
    #[arg(long)]
    location: Option<String>,
    /// Built-in deterministic synthetic year: madrid, lyon, vienna or berlin.
    #[arg(long)]
    synthetic: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Infeasible(String),
    Network(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Network(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Network(m) => write!(f, "network error: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<LinkError> for CliError {
    fn from(e: LinkError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<PlannerError> for CliError {
    fn from(e: PlannerError) -> Self {
        match e {
            PlannerError::Link(inner) => CliError::Validation(inner.to_string()),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

impl From<corridor_core::energy::EnergyError> for CliError {
    fn from(e: corridor_core::energy::EnergyError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SolarError> for CliError {
    fn from(e: SolarError) -> Self {
        match e {
            SolarError::NoFeasibleSystem => CliError::Infeasible(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<PvgisError> for CliError {
    fn from(e: PvgisError) -> Self {
        match e {
            PvgisError::Network { .. } | PvgisError::Http { .. } => {
                CliError::Network(e.to_string())
            }
            PvgisError::Io(io) => CliError::Io(io),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Validation)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Profile { isd, n, grid_step, io } => cmd_profile(&config, isd, n, grid_step, &io),
        Command::MaxIsd { n_from, n_to, jobs, io } => cmd_max_isd(&config, n_from, n_to, jobs, &io),
        Command::Energy { n_from, n_to, isds, jobs, io } => {
            cmd_energy(&config, n_from, n_to, isds.as_deref(), jobs, &io)
        }
        Command::SolarSim { source, io } => cmd_solar_sim(&config, &source, &io),
        Command::SolarSize { source, panels, batteries, io } => {
            cmd_solar_size(&config, &source, &panels, &batteries, &io)
        }
        Command::Fetch { location, io } => cmd_fetch(&config, &location, &io),
    }
}

fn write_out(io: &OutputArgs, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(&io.out, contents)?;
    Ok(())
}

fn write_report(
    io: &OutputArgs,
    command: &str,
    args: &[(&str, String)],
    config: &RunConfig,
) -> Result<(), CliError> {
    let path = io
        .report
        .clone()
        .unwrap_or_else(|| output::default_report_path(&io.out));
    output::write_report(&path, command, args, config)?;
    Ok(())
}

fn cmd_profile(
    config: &RunConfig,
    isd: f64,
    n: usize,
    grid_step: f64,
    io: &OutputArgs,
) -> Result<(), CliError> {
    let positions = place_repeaters(isd, n, &config.placement_strategy())?;
    let corridor = config.corridor_config(isd, positions);
    let profile = snr_profile_with_model(&corridor, grid_step, &config.throughput_model())?;
    let mut buf = Vec::new();
    output::write_profile_csv(&profile, &mut buf)?;
    write_out(io, &buf)?;
    write_report(
        io,
        "profile",
        &[
            ("isd_m", isd.to_string()),
            ("n", n.to_string()),
            ("grid_step_m", grid_step.to_string()),
        ],
        config,
    )
}

fn run_sweep(
    config: &RunConfig,
    n_from: usize,
    n_to: usize,
    jobs: usize,
) -> Result<SweepResult, CliError> {
    if n_to < n_from {
        return Err(CliError::Validation(format!(
            "empty repeater range {n_from}..={n_to}"
        )));
    }
    let corridor = config.corridor_config(config.search.isd_step_m, Vec::new());
    let strategy = config.placement_strategy();
    let params = config.search_params();
    let threshold = config.throughput_model().peak_snr_db();

    if jobs <= 1 {
        return Ok(sweep_max_isd(
            n_from..=n_to,
            &corridor,
            &strategy,
            &params,
            threshold,
        )?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let rows = pool.install(|| {
        (n_from..=n_to)
            .into_par_iter()
            .map(|n| max_isd(n, &corridor, &strategy, &params, threshold))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(SweepResult { rows })
}

fn cmd_max_isd(
    config: &RunConfig,
    n_from: usize,
    n_to: usize,
    jobs: usize,
    io: &OutputArgs,
) -> Result<(), CliError> {
    let sweep = run_sweep(config, n_from, n_to, jobs)?;
    let mut buf = Vec::new();
    output::write_sweep_csv(&sweep, &mut buf)?;
    write_out(io, &buf)?;
    write_report(
        io,
        "max-isd",
        &[
            ("n_from", n_from.to_string()),
            ("n_to", n_to.to_string()),
        ],
        config,
    )
}

fn cmd_energy(
    config: &RunConfig,
    n_from: usize,
    n_to: usize,
    isds: Option<&str>,
    jobs: usize,
    io: &OutputArgs,
) -> Result<(), CliError> {
    if n_to < n_from {
        return Err(CliError::Validation(format!(
            "empty repeater range {n_from}..={n_to}"
        )));
    }
    let counts: Vec<usize> = (n_from..=n_to).collect();
    let isd_per_n: Vec<f64> = match isds {
        Some(list) => {
            let parsed: Result<Vec<f64>, _> = list.split(',').map(|s| s.trim().parse()).collect();
            let parsed =
                parsed.map_err(|e| CliError::Validation(format!("bad --isds value: {e}")))?;
            if parsed.len() != counts.len() {
                return Err(CliError::Validation(format!(
                    "--isds carries {} values for {} repeater counts",
                    parsed.len(),
                    counts.len()
                )));
            }
            parsed
        }
        None => run_sweep(config, n_from, n_to, jobs)?
            .rows
            .iter()
            .map(|r| r.max_isd_m)
            .collect(),
    };

    let schedule = config.traffic_schedule();
    let hp = config.hp_params();
    let lp = config.lp_params();
    let mut rows = Vec::new();

    let baseline = corridor_energy_per_km(500.0, 0, &schedule, &hp, &lp, OperatingPolicy::LpSleep)?;
    rows.push(EnergyRow {
        scenario: "conventional".into(),
        n_nodes: 0,
        isd_m: 500.0,
        w_per_km: baseline.mains_w_per_km,
        savings_pct: baseline.savings_vs_baseline * 100.0,
    });
    for (&n, &isd) in counts.iter().zip(&isd_per_n) {
        for (policy, label) in [
            (OperatingPolicy::LpAlwaysOn, "always-on"),
            (OperatingPolicy::LpSleep, "sleep"),
            (OperatingPolicy::LpSolar, "solar"),
        ] {
            let report = corridor_energy_per_km(isd, n, &schedule, &hp, &lp, policy)?;
            rows.push(EnergyRow {
                scenario: format!("n{n}-{label}"),
                n_nodes: n,
                isd_m: isd,
                w_per_km: report.mains_w_per_km,
                savings_pct: report.savings_vs_baseline * 100.0,
            });
        }
    }

    let mut buf = Vec::new();
    output::write_energy_csv(&rows, &mut buf)?;
    write_out(io, &buf)?;
    write_report(
        io,
        "energy",
        &[
            ("n_from", n_from.to_string()),
            ("n_to", n_to.to_string()),
            ("isds", isds.unwrap_or("from-sweep").to_string()),
        ],
        config,
    )
}

fn resolve_location(config: &RunConfig, spec: &str) -> Result<(f64, f64), CliError> {
    if let Some(loc) = config.locations.get(&spec.to_ascii_lowercase()) {
        return Ok((loc.lat, loc.lon));
    }
    if let Some((lat, lon)) = spec.split_once(',') {
        let lat: f64 = lat
            .trim()
            .parse()
            .map_err(|e| CliError::Validation(format!("bad latitude in {spec:?}: {e}")))?;
        let lon: f64 = lon
            .trim()
            .parse()
            .map_err(|e| CliError::Validation(format!("bad longitude in {spec:?}: {e}")))?;
        return Ok((lat, lon));
    }
    Err(CliError::Validation(format!(
        "unknown location {spec:?}; use a configured name or \"lat,lon\""
    )))
}

fn load_series(config: &RunConfig, source: &SeriesSource) -> Result<(IrradianceSeries, String), CliError> {
    if let Some(path) = &source.fixture {
        let series = IrradianceSeries::read_csv_path(path)?;
        return Ok((series, format!("fixture {}", path.display())));
    }
    if let Some(name) = &source.synthetic {
        let loc = synthetic::location_by_name(name).ok_or_else(|| {
            CliError::Validation(format!(
                "unknown synthetic location {name:?}; available: madrid, lyon, vienna, berlin"
            ))
        })?;
        let series = synthetic::synthetic_year(&loc, config.pvgis.start_year);
        return Ok((series, format!("synthetic {}", loc.name)));
    }
    if let Some(spec) = &source.location {
        let (lat, lon) = resolve_location(config, spec)?;
        let req = config.pvgis_request(lat, lon);
        let series = fetch_series(&req, &config.fetch_config())?;
        return Ok((series, format!("pvgis {lat},{lon}")));
    }
    unreachable!("clap enforces exactly one series source");
}

fn cmd_solar_sim(config: &RunConfig, source: &SeriesSource, io: &OutputArgs) -> Result<(), CliError> {
    let (series, origin) = load_series(config, source)?;
    let profile = build_consumption_profile(&config.traffic_schedule(), &config.lp_params())?;
    let stats = simulate_battery(&series, &profile, &config.pv_system())?;
    let mut buf = Vec::new();
    output::write_autonomy_csv(&stats, &mut buf)?;
    write_out(io, &buf)?;
    write_report(io, "solar-sim", &[("source", origin)], config)
}

fn parse_list(label: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse()).collect();
    let values = values.map_err(|e| CliError::Validation(format!("bad {label} list: {e}")))?;
    if values.is_empty() || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Validation(format!(
            "{label} list must be non-empty and strictly ascending"
        )));
    }
    Ok(values)
}

fn cmd_solar_size(
    config: &RunConfig,
    source: &SeriesSource,
    panels: &str,
    batteries: &str,
    io: &OutputArgs,
) -> Result<(), CliError> {
    let (series, origin) = load_series(config, source)?;
    let profile = build_consumption_profile(&config.traffic_schedule(), &config.lp_params())?;
    let panels = parse_list("panel", panels)?;
    let batteries = parse_list("battery", batteries)?;
    let system = size_system(&series, &profile, &panels, &batteries, &config.pv_system())?;
    let mut buf = Vec::new();
    output::write_system_csv(&system, &mut buf)?;
    write_out(io, &buf)?;
    write_report(io, "solar-size", &[("source", origin)], config)
}

fn cmd_fetch(config: &RunConfig, location: &str, io: &OutputArgs) -> Result<(), CliError> {
    let (lat, lon) = resolve_location(config, location)?;
    let req = config.pvgis_request(lat, lon);
    let series = fetch_series(&req, &config.fetch_config())?;
    let mut buf = Vec::new();
    series.write_csv(&mut buf)?;
    write_out(io, &buf)?;
    write_report(
        io,
        "fetch",
        &[
            ("location", location.to_string()),
            ("fingerprint", req.fingerprint()),
        ],
        config,
    )
}
