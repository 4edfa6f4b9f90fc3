//! Experiment specifications (the five reference figures and custom
//! sweeps) and their evaluation into CSV rows.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Result};
use mimo_aging::analytics::{
    asymptotic_rate_infinite_n, ergodic_rate_exact, ergodic_rate_quadrature, outage_probability_with, power_scaling_limit, rate_lower_bound, sinr_law, sum_spectral_efficiency, OutageForm,
};
use mimo_aging::simulator::{mc_sum_rate, required_power, AgingSampling, MonteCarlo, RateMethod};
use mimo_aging::stats::mean_stderr;
use mimo_aging::sysmodel::{Aging, SystemConfig};
use mimo_aging::Error;
use rayon::prelude::*;

use crate::config::{db_to_linear, linear_to_db, Scenario};
use crate::csv::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Bound,
    Quadrature,
    Mc,
    /// Large-N limit (1/C, or the power-scaling limit).
    Limit,
    /// The printed short outage form.
    Literal,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Bound => "bound",
            Method::Quadrature => "quadrature",
            Method::Mc => "mc",
            Method::Limit => "limit",
            Method::Literal => "literal",
        }
    }
}

impl FromStr for Method {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Method::Exact,
            "bound" => Method::Bound,
            "quadrature" | "quad" => Method::Quadrature,
            "mc" | "montecarlo" | "monte-carlo" | "simulation" => Method::Mc,
            "limit" | "limits" => Method::Limit,
            "literal" => Method::Literal,
            other => bail!("unknown method `{other}` (expected exact, bound, quadrature, mc, limit or literal)"),
        })
    }
}

pub fn parse_methods(list: &[String]) -> Result<Vec<Method>> {
    list.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    SnrDb,
    Alpha,
    Antennas,
}

impl FromStr for Axis {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "snr_db" | "snr" => Axis::SnrDb,
            "alpha" => Axis::Alpha,
            "antennas" | "n" => Axis::Antennas,
            other => bail!("unknown sweep axis `{other}` (expected snr_db, alpha or antennas)"),
        })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::SnrDb => "snr_db",
            Axis::Alpha => "alpha",
            Axis::Antennas => "antennas",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// (1 − τ/T) Σ_k R_k, bits/s/Hz per cell.
    SumRate,
    /// Ergodic rate of the configured user, bits/s/Hz (no pre-log factor).
    UserRate,
    /// P(SINR ≤ γ) of the configured user at each threshold.
    Outage { thresholds: Vec<f64> },
    /// p_r (dB) for the configured user to reach `target` bits/s/Hz.
    RequiredPower { target: f64 },
}

/// One curve: parameters that override the base scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    pub label: String,
    pub antennas: Option<usize>,
    pub alpha: Option<f64>,
    pub snr_db: Option<f64>,
    pub scale_power: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub series: Vec<Series>,
    pub metric: Metric,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    /// p_r = E/√N with E the configured power.
    pub scale_power: bool,
    pub aging: AgingSampling,
    pub timing: bool,
}

pub const DEFAULT_TRIALS: usize = 10_000;
pub const OUTAGE_TRIALS: usize = 1_000_000;

/// `from, from+step, …` up to `to` inclusive (within rounding).
pub fn range(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 || to < from {
        bail!("invalid sweep range {from}..{to} step {step}");
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    // Rounded to 12 significant digits so that e.g. 0.1·3 prints as 0.3.
    Ok((0..=n).map(|i| format!("{:.12e}", from + i as f64 * step).parse().unwrap()).collect())
}

fn series_n(values: &[usize]) -> Vec<Series> {
    values
        .iter()
        .map(|&n| Series {
            label: format!("N={n}"),
            antennas: Some(n),
            ..Default::default()
        })
        .collect()
}

impl ExperimentSpec {
    /// The reference figures. Swept and per-series parameters are fixed by
    /// the figure; everything else comes from the scenario.
    pub fn figure(id: u8, s: &Scenario) -> Result<Self> {
        let methods = |default: &[Method]| -> Result<Vec<Method>> {
            match &s.methods {
                Some(m) => parse_methods(m),
                None => Ok(default.to_vec()),
            }
        };
        let base = |name: &str, axis, values, series, metric, methods, trials| ExperimentSpec {
            name: name.into(),
            axis,
            values,
            series,
            metric,
            methods,
            trials: s.trials.unwrap_or(trials),
            seed: s.seed,
            scale_power: false,
            aging: AgingSampling::Projected,
            timing: false,
        };
        use Method::*;
        let spec = match id {
            1 => {
                let mut series = series_n(&[20, 50, 100]);
                series.iter_mut().for_each(|x| x.alpha = Some(0.9));
                base("figure1", Axis::SnrDb, range(-10.0, 20.0, 2.0)?, series, Metric::SumRate, methods(&[Exact, Bound, Mc])?, DEFAULT_TRIALS)
            }
            2 => {
                let mut series = series_n(&[20, 50, 100]);
                series.iter_mut().for_each(|x| x.snr_db = Some(0.0));
                base("figure2", Axis::Alpha, range(0.05, 1.0, 0.05)?, series, Metric::SumRate, methods(&[Exact, Bound, Mc])?, DEFAULT_TRIALS)
            }
            3 => {
                let series = [0.7, 0.9]
                    .iter()
                    .map(|&a| Series {
                        label: format!("alpha={a}"),
                        alpha: Some(a),
                        ..Default::default()
                    })
                    .collect();
                base(
                    "figure3",
                    Axis::Antennas,
                    range(100.0, 500.0, 50.0)?,
                    series,
                    Metric::RequiredPower { target: s.target_rate },
                    // The exact route needs thousands of bits at these powers;
                    // quadrature gives the same numbers.
                    methods(&[Quadrature, Bound])?,
                    DEFAULT_TRIALS,
                )
            }
            4 => {
                let mut series = Vec::new();
                for a in [0.7, 0.9, 1.0] {
                    for scaled in [false, true] {
                        series.push(Series {
                            label: format!("alpha={a};{}", if scaled { "scaled" } else { "fixed" }),
                            alpha: Some(a),
                            snr_db: Some(0.0),
                            scale_power: Some(scaled),
                            ..Default::default()
                        });
                    }
                }
                let values = vec![20.0, 50.0, 100.0, 200.0, 500.0, 1000.0];
                base("figure4", Axis::Antennas, values, series, Metric::SumRate, methods(&[Quadrature, Mc, Limit])?, DEFAULT_TRIALS)
            }
            5 => {
                let series = [1.0, 0.9]
                    .iter()
                    .map(|&a| Series {
                        label: format!("alpha={a}"),
                        alpha: Some(a),
                        antennas: Some(100),
                        ..Default::default()
                    })
                    .collect();
                let metric = Metric::Outage {
                    thresholds: match s.gamma_th {
                        Some(g) => vec![g],
                        None => vec![2.0, 3.0],
                    },
                };
                base("figure5", Axis::SnrDb, range(-10.0, 10.0, 2.0)?, series, metric, methods(&[Exact, Mc])?, OUTAGE_TRIALS)
            }
            other => bail!("there is no figure {other}; choose 1–5"),
        };
        spec.check()?;
        Ok(spec)
    }

    /// A one-series sweep defined by the scenario's sweep settings.
    pub fn custom(s: &Scenario, axis: Axis, values: Vec<f64>, metric: Metric, default_methods: &[Method]) -> Result<Self> {
        let methods = match &s.methods {
            Some(m) => parse_methods(m)?,
            None => default_methods.to_vec(),
        };
        let trials = s.trials.unwrap_or(match metric {
            Metric::Outage { .. } => OUTAGE_TRIALS,
            _ => DEFAULT_TRIALS,
        });
        let spec = ExperimentSpec {
            name: "custom".into(),
            axis,
            values,
            series: vec![Series::default()],
            metric,
            methods,
            trials,
            seed: s.seed,
            scale_power: s.scale_power,
            aging: AgingSampling::Projected,
            timing: false,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.values.is_empty() || self.series.is_empty() {
            bail!("the sweep is empty");
        }
        if self.methods.is_empty() {
            bail!("no methods selected");
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            bail!("sweep values must be finite");
        }
        if self.methods.contains(&Method::Mc) && self.trials < 100 {
            bail!("Monte Carlo needs at least 100 trials, got {}", self.trials);
        }
        for &m in &self.methods {
            let ok = match (&self.metric, m) {
                (Metric::SumRate | Metric::UserRate, Method::Literal) => false,
                (Metric::SumRate | Metric::UserRate, _) => true,
                (Metric::Outage { .. }, Method::Exact | Method::Literal | Method::Mc) => true,
                (Metric::RequiredPower { .. }, Method::Exact | Method::Bound | Method::Quadrature | Method::Mc) => true,
                _ => false,
            };
            if !ok {
                bail!("method `{}` is not available for this metric", m.name());
            }
        }
        if let Metric::Outage { thresholds } = &self.metric {
            if thresholds.is_empty() || thresholds.iter().any(|g| !(*g > 0.0)) {
                bail!("outage thresholds must be positive");
            }
        }
        if matches!(self.metric, Metric::RequiredPower { .. }) && (self.axis == Axis::SnrDb || self.scale_power) {
            bail!("required power cannot be swept over SNR or combined with power scaling");
        }
        Ok(())
    }
}

/// Rows plus everything worth telling the user about them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
    pub infeasible: Vec<String>,
}

fn point_config(s: &Scenario, spec: &ExperimentSpec, series: &Series, x: f64) -> Result<(SystemConfig, bool)> {
    let mut c = s.config.clone();
    if let Some(n) = series.antennas {
        c.antennas = n;
    }
    if let Some(a) = series.alpha {
        c.aging = Aging::Direct(a);
    }
    if let Some(db) = series.snr_db {
        c.uplink_power = db_to_linear(db);
    }
    match spec.axis {
        Axis::SnrDb => c.uplink_power = db_to_linear(x),
        Axis::Alpha => c.aging = Aging::Direct(x),
        Axis::Antennas => {
            if x < 1.0 || x.fract() != 0.0 {
                bail!("antenna counts must be positive integers, got {x}");
            }
            c.antennas = x as usize;
        }
    }
    let scaled = series.scale_power.unwrap_or(spec.scale_power);
    if scaled {
        c.uplink_power /= (c.antennas as f64).sqrt();
    }
    Ok((c, scaled))
}

/// SplitMix64 finaliser; decorrelates the per-point seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the simulation at (series, point); depends only on the master
/// seed and the position in the sweep.
pub fn task_seed(seed: u64, series: usize, point: usize) -> u64 {
    mix(seed ^ mix(((series as u64) << 32) | point as u64))
}

struct Task<'a> {
    x: f64,
    series: &'a Series,
    series_index: usize,
    point_index: usize,
    method: Method,
}

enum Outcome {
    Values(Vec<(String, f64, Option<f64>)>),
    Skipped(String),
    Infeasible(String),
}

fn label(method: Method, series: &str, extra: Option<String>) -> String {
    let parts: Vec<String> = [Some(series.to_string()).filter(|s| !s.is_empty()), extra].into_iter().flatten().collect();
    if parts.is_empty() {
        method.name().to_string()
    } else {
        format!("{}[{}]", method.name(), parts.join(";"))
    }
}

fn evaluate(s: &Scenario, spec: &ExperimentSpec, t: &Task) -> Result<Outcome> {
    let (cfg, scaled) = point_config(s, spec, t.series, t.x)?;
    let violations = mimo_aging::sysmodel::validate(&cfg, None);
    if !mimo_aging::sysmodel::is_valid(&violations) {
        let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
        bail!("invalid configuration at {}={}: {}", spec.axis, t.x, msgs.join("; "));
    }
    let prof = s.profile(&cfg)?;
    let seed = task_seed(spec.seed, t.series_index, t.point_index);
    let name = label(t.method, &t.series.label, None);
    let skip = |e: Error| -> Result<Outcome> {
        match e {
            Error::IllConditioned { .. } | Error::Unsupported(_) | Error::Unbounded => {
                Ok(Outcome::Skipped(format!("{name} at {}={}: {e}", spec.axis, t.x)))
            }
            e => Err(e.into()),
        }
    };
    macro_rules! attempt {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(e) => return skip(e),
            }
        };
    }
    let one = |v: f64, se: Option<f64>| Outcome::Values(vec![(name.clone(), v, se)]);
    match &spec.metric {
        Metric::SumRate => {
            let prelog = cfg.prelog();
            Ok(match t.method {
                Method::Exact => one(attempt!(sum_spectral_efficiency(&cfg, &prof, |_, l| ergodic_rate_exact(l))), None),
                Method::Bound => one(attempt!(sum_spectral_efficiency(&cfg, &prof, |_, l| rate_lower_bound(l, &prof))), None),
                Method::Quadrature => one(attempt!(sum_spectral_efficiency(&cfg, &prof, |_, l| ergodic_rate_quadrature(l))), None),
                Method::Mc => {
                    let est = mc_sum_rate(&cfg, &prof, spec.trials, seed, spec.aging)?;
                    one(prelog * est.mean, Some(prelog * est.stderr))
                }
                Method::Limit => {
                    let mut total = 0.0;
                    for k in 0..cfg.users {
                        total += if scaled {
                            let energy = cfg.uplink_power * (cfg.antennas as f64).sqrt();
                            let g = attempt!(power_scaling_limit(&prof, k, energy, cfg.pilot_length));
                            g.ln_1p() / std::f64::consts::LN_2
                        } else {
                            attempt!(asymptotic_rate_infinite_n(&prof, k))
                        };
                    }
                    one(prelog * total, None)
                }
                Method::Literal => unreachable!("rejected by check()"),
            })
        }
        Metric::UserRate => {
            let law = sinr_law(&cfg, &prof, s.user)?;
            Ok(match t.method {
                Method::Exact => one(attempt!(ergodic_rate_exact(&law)), None),
                Method::Bound => one(attempt!(rate_lower_bound(&law, &prof)), None),
                Method::Quadrature => one(attempt!(ergodic_rate_quadrature(&law)), None),
                Method::Mc => {
                    let est = MonteCarlo::new(&cfg, &prof, s.user)?.aging(spec.aging).ergodic_rate(spec.trials, seed)?;
                    one(est.mean, Some(est.stderr))
                }
                Method::Limit => {
                    if scaled {
                        let energy = cfg.uplink_power * (cfg.antennas as f64).sqrt();
                        let g = attempt!(power_scaling_limit(&prof, s.user, energy, cfg.pilot_length));
                        one(g.ln_1p() / std::f64::consts::LN_2, None)
                    } else {
                        one(attempt!(asymptotic_rate_infinite_n(&prof, s.user)), None)
                    }
                }
                Method::Literal => unreachable!("rejected by check()"),
            })
        }
        Metric::Outage { thresholds } => {
            let law = sinr_law(&cfg, &prof, s.user)?;
            let tag = |g: f64| label(t.method, &t.series.label, Some(format!("gamma_th={g}")));
            let mut out = Vec::new();
            match t.method {
                Method::Exact | Method::Literal => {
                    let form = if t.method == Method::Exact { OutageForm::Complete } else { OutageForm::Literal };
                    for &g in thresholds {
                        out.push((tag(g), outage_probability_with(&law, g, form)?, None));
                    }
                }
                Method::Mc => {
                    let samples = MonteCarlo::new(&cfg, &prof, s.user)?.aging(spec.aging).sinr_samples(spec.trials, seed)?;
                    for &g in thresholds {
                        let hits: Vec<f64> = samples.iter().map(|&x| if x <= g { 1.0 } else { 0.0 }).collect();
                        let (m, se) = mean_stderr(&hits);
                        out.push((tag(g), m, Some(se)));
                    }
                }
                _ => unreachable!("rejected by check()"),
            }
            Ok(Outcome::Values(out))
        }
        Metric::RequiredPower { target } => {
            let method = match t.method {
                Method::Exact => RateMethod::Exact,
                Method::Bound => RateMethod::Bound,
                Method::Quadrature => RateMethod::Quadrature,
                Method::Mc => RateMethod::MonteCarlo { trials: spec.trials, seed },
                _ => unreachable!("rejected by check()"),
            };
            match required_power(&cfg, &prof, s.user, *target, method) {
                Ok(p) => Ok(one(linear_to_db(p), None)),
                Err(Error::Infeasible { target, ceiling }) => Ok(Outcome::Infeasible(format!(
                    "{name} at {}={}: {target} bits/s/Hz is above the ceiling {ceiling:.4}",
                    spec.axis, t.x
                ))),
                Err(e) => skip(e),
            }
        }
    }
}

/// Evaluates every (point, series, method) combination. Tasks run in
/// parallel; rows are emitted in sweep order, then series, then method.
pub fn run_experiment(s: &Scenario, spec: &ExperimentSpec) -> Result<Report> {
    spec.check()?;
    let mut tasks = Vec::new();
    for (point_index, &x) in spec.values.iter().enumerate() {
        for (series_index, series) in spec.series.iter().enumerate() {
            for &method in &spec.methods {
                tasks.push(Task {
                    x,
                    series,
                    series_index,
                    point_index,
                    method,
                });
            }
        }
    }
    let results: Vec<Result<(Outcome, f64)>> = tasks
        .par_iter()
        .map(|t| {
            let start = Instant::now();
            let out = evaluate(s, spec, t)?;
            Ok((out, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect();
    let mut report = Report::default();
    for (t, r) in tasks.iter().zip(results) {
        let (outcome, ms) = r?;
        match outcome {
            Outcome::Values(vals) => {
                for (method, value, stderr) in vals {
                    if stderr.is_some() && matches!(spec.metric, Metric::Outage { .. }) {
                        let events = (value.min(1.0 - value) * spec.trials as f64).round();
                        if events < 20.0 {
                            report.warnings.push(format!(
                                "{method} at {}={}: only {events} events in {} trials; estimate unreliable",
                                spec.axis, t.x, spec.trials
                            ));
                        }
                    }
                    report.rows.push(Row {
                        sweep_value: t.x,
                        method,
                        value,
                        stderr,
                        elapsed_ms: spec.timing.then_some(ms),
                    });
                }
            }
            Outcome::Skipped(w) => report.warnings.push(w),
            Outcome::Infeasible(w) => report.infeasible.push(w),
        }
    }
    Ok(report)
}
