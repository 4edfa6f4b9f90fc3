use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mimo_aging::analytics::{
    asymptotic_sinr_infinite_n, de_sinr_fixed_ratio, low_snr_metrics, power_scaling_limit, sinr_law,
};
use mimo_aging::simulator::AgingSampling;
use mimo_aging::sysmodel::{is_valid, validate, Aging};
use mimo_aging_cli::config::{linear_to_db, Overrides, Scenario};
use mimo_aging_cli::csv::{write_rows, Row};
use mimo_aging_cli::experiment::{range, run_experiment, Axis, ExperimentSpec, Method, Metric, Report};

/// Uplink multi-cell massive MIMO with zero-forcing, pilot contamination
/// and channel aging: analytic rates, outage and Monte Carlo checks.
#[derive(Parser)]
#[command(name = "mimo-aging", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML scenario file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every Monte Carlo estimate.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per point.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated methods: exact, bound, quadrature, mc, limit, literal.
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Uplink SNR p_r in dB.
    #[arg(long, global = true, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Aging correlation α, overriding any mobility parameters.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Base-station antennas N.
    #[arg(long, global = true)]
    antennas: Option<usize>,
    /// Scale the power as p_r = E/√N (E is the configured power).
    #[arg(long, global = true)]
    scale_power: bool,
    /// Outage threshold γ_th (linear).
    #[arg(long, global = true)]
    gamma_th: Option<f64>,
    /// User index k in the home cell.
    #[arg(long, global = true)]
    user: Option<usize>,
    /// Target rate in bits/s/Hz for required-power searches.
    #[arg(long, global = true)]
    target: Option<f64>,
    /// Add per-point wall-clock times (makes the output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    /// Simulate the aging innovation explicitly instead of through its
    /// projected law (slower, same distribution).
    #[arg(long, global = true)]
    explicit_aging: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum MetricArg {
    SumRate,
    Rate,
    Outage,
    RequiredPower,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate one of the reference figures (1–5) as CSV.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
    },
    /// Sweep one parameter; axis and range come from flags or the config.
    Sweep {
        #[arg(long)]
        axis: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, value_enum, default_value = "sum-rate")]
        metric: MetricArg,
    },
    /// Ergodic rate of one user at the configured operating point.
    Rate,
    /// Outage probability of one user at the configured operating point.
    Outage,
    /// Eb/N0_min and wideband slope of one user.
    Lowsnr,
    /// Large-system limits of one user's SINR.
    Limits,
    /// Uplink power needed for the target rate.
    RequiredPower,
    /// Check a configuration and print the derived quantities.
    Validate,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            trials: self.trials,
            methods: self.methods.clone(),
            snr_db: self.snr_db,
            alpha: self.alpha,
            antennas: self.antennas,
            scale_power: self.scale_power,
            gamma_th: self.gamma_th,
            user: self.user,
            target_rate: self.target,
        }
    }
}

fn thresholds(s: &Scenario) -> Vec<f64> {
    s.gamma_th.map_or_else(|| vec![2.0, 3.0], |g| vec![g])
}

fn metric(m: MetricArg, s: &Scenario) -> Metric {
    match m {
        MetricArg::SumRate => Metric::SumRate,
        MetricArg::Rate => Metric::UserRate,
        MetricArg::Outage => Metric::Outage { thresholds: thresholds(s) },
        MetricArg::RequiredPower => Metric::RequiredPower { target: s.target_rate },
    }
}

fn default_methods(m: &Metric) -> &'static [Method] {
    match m {
        Metric::SumRate | Metric::UserRate => &[Method::Exact, Method::Bound, Method::Mc],
        Metric::Outage { .. } => &[Method::Exact, Method::Mc],
        Metric::RequiredPower { .. } => &[Method::Exact, Method::Bound],
    }
}

fn emit(common: &Common, rows: &[Row]) -> Result<()> {
    match &common.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_rows(BufWriter::new(file), rows)
        }
        None => write_rows(io::stdout().lock(), rows),
    }
}

/// Human-readable notes go to stdout when the CSV went to a file and to
/// stderr otherwise, so that piping the CSV stays clean.
fn note(common: &Common, line: &str) {
    if common.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn finish(common: &Common, name: &str, report: &Report) -> Result<ExitCode> {
    emit(common, &report.rows)?;
    note(common, &format!("{name}: {} rows", report.rows.len()));
    if let Some(p) = &common.out {
        note(common, &format!("written to {}", p.display()));
    }
    for w in &report.warnings {
        note(common, &format!("warning: {w}"));
    }
    for w in &report.infeasible {
        eprintln!("infeasible: {w}");
    }
    Ok(if report.infeasible.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run_spec(common: &Common, s: &Scenario, mut spec: ExperimentSpec) -> Result<ExitCode> {
    spec.timing = common.timing;
    if common.explicit_aging {
        spec.aging = AgingSampling::Explicit;
    }
    let report = run_experiment(s, &spec)?;
    finish(common, &spec.name, &report)
}

/// A one-point spec at the scenario's own operating point.
fn single(name: &str, s: &Scenario, m: Metric) -> Result<ExperimentSpec> {
    let (axis, value) = match m {
        Metric::RequiredPower { .. } => (Axis::Antennas, s.config.antennas as f64),
        _ => (Axis::SnrDb, linear_to_db(s.config.uplink_power)),
    };
    let methods = default_methods(&m);
    let mut spec = ExperimentSpec::custom(s, axis, vec![value], m, methods)?;
    spec.name = name.into();
    Ok(spec)
}

fn row(x: f64, method: &str, value: f64) -> Row {
    Row {
        sweep_value: x,
        method: method.into(),
        value,
        stderr: None,
        elapsed_ms: None,
    }
}

fn run(cli: Cli, common: Common) -> Result<ExitCode> {
    let s = Scenario::resolve(common.config.as_deref(), &common.overrides())?;
    match cli.command {
        Command::Figure { id } => {
            let mut spec = ExperimentSpec::figure(id, &s)?;
            spec.scale_power = false;
            run_spec(&common, &s, spec)
        }
        Command::Sweep {
            axis,
            from,
            to,
            step,
            metric: m,
        } => {
            let file = s.sweep.clone();
            let pick = |flag: Option<f64>, i: usize| flag.or(file.as_ref().map(|f| [f.1, f.2, f.3][i]));
            let axis = axis.or(file.as_ref().map(|f| f.0.clone()));
            let (Some(axis), Some(from), Some(to), Some(step)) = (axis, pick(from, 0), pick(to, 1), pick(step, 2)) else {
                bail!("sweep needs --axis, --from, --to and --step (or an [experiment] sweep in the config)");
            };
            let metric = metric(m, &s);
            let methods = default_methods(&metric);
            let spec = ExperimentSpec::custom(&s, axis.parse()?, range(from, to, step)?, metric, methods)?;
            run_spec(&common, &s, spec)
        }
        Command::Rate => run_spec(&common, &s, single("rate", &s, Metric::UserRate)?),
        Command::Outage => {
            let m = Metric::Outage { thresholds: thresholds(&s) };
            run_spec(&common, &s, single("outage", &s, m)?)
        }
        Command::RequiredPower => run_spec(&common, &s, single("required-power", &s, Metric::RequiredPower { target: s.target_rate })?),
        Command::Lowsnr => {
            let prof = s.profile(&s.config)?;
            let law = sinr_law(&s.config, &prof, s.user)?;
            let m = low_snr_metrics(&law)?;
            let n = s.config.antennas as f64;
            let rows = vec![
                row(n, "ebn0_min_db", m.ebn0_min_db()),
                row(n, "wideband_slope", m.wideband_slope),
                row(n, "first_derivative", m.first_derivative),
                row(n, "second_derivative", m.second_derivative),
                row(n, "literal_slope", m.literal_slope),
                row(n, "literal_second_derivative", m.literal_second_derivative),
            ];
            emit(&common, &rows)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Limits => {
            let c = &s.config;
            let prof = s.profile(c)?;
            let n = c.antennas as f64;
            let mut rows = Vec::new();
            match asymptotic_sinr_infinite_n(&prof, s.user) {
                Ok(g) => rows.push(row(n, "sinr_infinite_n", g)),
                Err(e) => note(&common, &format!("warning: N → ∞ limit: {e}")),
            }
            let kappa = n / c.users as f64;
            match de_sinr_fixed_ratio(&prof, s.user, kappa, c.users) {
                Ok(g) => rows.push(row(n, "sinr_deterministic_equivalent", g)),
                Err(e) => note(&common, &format!("warning: deterministic equivalent: {e}")),
            }
            let energy = if s.scale_power { c.uplink_power } else { c.uplink_power * n.sqrt() };
            rows.push(row(n, "sinr_power_scaling", power_scaling_limit(&prof, s.user, energy, c.pilot_length)?));
            emit(&common, &rows)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate => {
            let c = &s.config;
            let profile = s.profile(c).ok();
            let violations = validate(c, profile.as_ref());
            let mut out = io::stdout().lock();
            writeln!(out, "L = {}, K = {}, N = {}, tau = {}, T = {}", c.cells, c.users, c.antennas, c.pilot_length, c.coherence)?;
            writeln!(out, "p_r = {} ({:.3} dB), p_tr = {}", c.uplink_power, linear_to_db(c.uplink_power), c.training_power())?;
            match (c.aging, c.alpha()) {
                (Aging::Mobility { velocity, carrier_hz, sample_period }, Ok(a)) => writeln!(
                    out,
                    "alpha = {a} (from v = {velocity} m/s, f_c = {carrier_hz} Hz, T_s = {sample_period} s)"
                )?,
                (_, Ok(a)) => writeln!(out, "alpha = {a}")?,
                (_, Err(_)) => {}
            }
            writeln!(out, "pre-log factor = {}", c.prelog())?;
            if let Some(p) = &profile {
                let l = p.home();
                for k in 0..c.users {
                    writeln!(
                        out,
                        "user {k}: beta = {}, beta_hat = {}, C = {}",
                        p.beta(l, l, k),
                        p.beta_hat(l, l, k),
                        p.interference_constant(k)
                    )?;
                }
            }
            for v in &violations {
                writeln!(out, "{v}")?;
            }
            if is_valid(&violations) && profile.is_some() {
                writeln!(out, "configuration is valid")?;
                Ok(ExitCode::SUCCESS)
            } else {
                writeln!(out, "configuration is invalid")?;
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("MIMO_AGING_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not configure {n} threads: {e}");
                }
            }
            _ => eprintln!("warning: ignoring MIMO_AGING_THREADS={v:?}; expected a positive integer"),
        }
    }
    let common = cli.common.clone();
    match run(cli, common) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
