//! The configuration file and its resolution into a concrete scenario.
//!
//! ```toml
//! [system]
//! cells = 7
//! users = 10
//! antennas = 100          # required
//! pilot_length = 10
//! coherence = 200
//! uplink_power_db = 0.0   # or uplink_power = 1.0 (linear)
//! alpha = 0.9             # or velocity / carrier_hz / sample_period
//!
//! [fading]
//! cross_gain = 0.1        # symmetric scenario, or beta = [...] (l, i, k order)
//! home_cell = 0
//!
//! [experiment]
//! seed = 1
//! trials = 10000
//! methods = ["exact", "bound", "mc"]
//! ```
//!
//! Precedence: command-line flags, then the file, then built-in defaults
//! (the 7-cell, 10-user reference scenario at 0 dB with α = 0.9).

use std::path::Path;

use anyhow::{bail, Context, Result};
use mimo_aging::sysmodel::{build_profile, Aging, FadingProfile, LargeScale, SystemConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemSection,
    #[serde(default)]
    pub fading: FadingSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub cells: Option<usize>,
    pub users: Option<usize>,
    pub antennas: usize,
    pub pilot_length: Option<usize>,
    pub coherence: Option<usize>,
    pub uplink_power: Option<f64>,
    pub uplink_power_db: Option<f64>,
    pub alpha: Option<f64>,
    pub velocity: Option<f64>,
    pub carrier_hz: Option<f64>,
    pub sample_period: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSection {
    pub cross_gain: Option<f64>,
    pub cross_gain_db: Option<f64>,
    pub beta: Option<Vec<f64>>,
    pub home_cell: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub user: Option<usize>,
    pub gamma_th: Option<f64>,
    pub gamma_th_db: Option<f64>,
    pub target_rate: Option<f64>,
    pub scale_power: Option<bool>,
    pub axis: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid configuration {}", path.display()))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Large-scale gains: the symmetric scenario or an explicit table.
#[derive(Debug, Clone, PartialEq)]
pub enum Gains {
    Symmetric(f64),
    Table(LargeScale),
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SystemConfig,
    pub gains: Gains,
    pub home: usize,
    pub user: usize,
    pub seed: u64,
    pub trials: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub gamma_th: Option<f64>,
    pub target_rate: f64,
    pub scale_power: bool,
    pub sweep: Option<(String, f64, f64, f64)>,
}

/// Values given on the command line; `None` leaves the file/default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub snr_db: Option<f64>,
    pub alpha: Option<f64>,
    pub antennas: Option<usize>,
    pub scale_power: bool,
    pub gamma_th: Option<f64>,
    pub user: Option<usize>,
    pub target_rate: Option<f64>,
}

pub const DEFAULT_SEED: u64 = 1;

impl Scenario {
    /// The reference scenario: 7 cells, 10 users, N = 100, τ = 10, T = 200,
    /// 0 dB, α = 0.9, cross gain 0.1.
    pub fn reference() -> Self {
        Scenario {
            config: SystemConfig::reference(100, 0.9),
            gains: Gains::Symmetric(0.1),
            home: 0,
            user: 0,
            seed: DEFAULT_SEED,
            trials: None,
            methods: None,
            gamma_th: None,
            target_rate: 1.0,
            scale_power: false,
            sweep: None,
        }
    }

    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        let mut s = Scenario::reference();
        let sys = &file.system;
        let c = &mut s.config;
        c.antennas = sys.antennas;
        c.cells = sys.cells.unwrap_or(c.cells);
        c.users = sys.users.unwrap_or(c.users);
        c.pilot_length = sys.pilot_length.unwrap_or(c.users);
        c.coherence = sys.coherence.unwrap_or(c.coherence);
        c.uplink_power = match (sys.uplink_power, sys.uplink_power_db) {
            (Some(_), Some(_)) => bail!("give either system.uplink_power or system.uplink_power_db, not both"),
            (Some(p), None) => p,
            (None, Some(db)) => db_to_linear(db),
            (None, None) => c.uplink_power,
        };
        let mobility = [sys.velocity, sys.carrier_hz, sys.sample_period];
        c.aging = match (sys.alpha, mobility) {
            (Some(_), m) if m.iter().any(Option::is_some) => {
                bail!("give either system.alpha or the mobility triple (velocity, carrier_hz, sample_period), not both")
            }
            (Some(a), _) => Aging::Direct(a),
            (None, [Some(velocity), Some(carrier_hz), Some(sample_period)]) => Aging::Mobility {
                velocity,
                carrier_hz,
                sample_period,
            },
            (None, [None, None, None]) => c.aging,
            (None, _) => bail!("the mobility triple needs all of velocity, carrier_hz and sample_period"),
        };
        let fad = &file.fading;
        s.gains = match (fad.cross_gain, fad.cross_gain_db, &fad.beta) {
            (None, None, None) => s.gains,
            (Some(a), None, None) => Gains::Symmetric(a),
            (None, Some(db), None) => Gains::Symmetric(db_to_linear(db)),
            (None, None, Some(values)) => Gains::Table(LargeScale::new(c.cells, c.users, values.clone())?),
            _ => bail!("give exactly one of fading.cross_gain, fading.cross_gain_db and fading.beta"),
        };
        s.home = fad.home_cell.unwrap_or(0);
        let exp = &file.experiment;
        s.seed = exp.seed.unwrap_or(DEFAULT_SEED);
        s.trials = exp.trials;
        s.methods = exp.methods.clone();
        s.user = exp.user.unwrap_or(0);
        s.gamma_th = match (exp.gamma_th, exp.gamma_th_db) {
            (Some(_), Some(_)) => bail!("give either experiment.gamma_th or experiment.gamma_th_db, not both"),
            (g, None) => g,
            (None, Some(db)) => Some(db_to_linear(db)),
        };
        s.target_rate = exp.target_rate.unwrap_or(1.0);
        s.scale_power = exp.scale_power.unwrap_or(false);
        s.sweep = match (&exp.axis, exp.from, exp.to, exp.step) {
            (None, None, None, None) => None,
            (Some(a), Some(f), Some(t), Some(st)) => Some((a.clone(), f, t, st)),
            _ => bail!("a sweep needs all of experiment.axis, from, to and step"),
        };
        Ok(s)
    }

    /// Loads `path` if given, else the reference scenario, then applies
    /// the command-line overrides.
    pub fn resolve(path: Option<&Path>, o: &Overrides) -> Result<Self> {
        let mut s = match path {
            Some(p) => Scenario::from_file(&ConfigFile::load(p)?)?,
            None => Scenario::reference(),
        };
        if let Some(v) = o.seed {
            s.seed = v;
        }
        if let Some(v) = o.trials {
            s.trials = Some(v);
        }
        if let Some(v) = &o.methods {
            s.methods = Some(v.clone());
        }
        if let Some(db) = o.snr_db {
            s.config.uplink_power = db_to_linear(db);
        }
        if let Some(a) = o.alpha {
            s.config.aging = Aging::Direct(a);
        }
        if let Some(n) = o.antennas {
            s.config.antennas = n;
        }
        s.scale_power |= o.scale_power;
        if let Some(g) = o.gamma_th {
            s.gamma_th = Some(g);
        }
        if let Some(u) = o.user {
            s.user = u;
        }
        if let Some(t) = o.target_rate {
            s.target_rate = t;
        }
        Ok(s)
    }

    pub fn large_scale(&self, config: &SystemConfig) -> Result<LargeScale> {
        Ok(match &self.gains {
            Gains::Symmetric(a) => LargeScale::symmetric(config.cells, config.users, *a)?,
            Gains::Table(t) => t.clone(),
        })
    }

    /// The profile for `config` (which may differ from `self.config` in
    /// power, α or N) seen from the home cell.
    pub fn profile(&self, config: &SystemConfig) -> Result<FadingProfile> {
        Ok(build_profile(config, &self.large_scale(config)?)?.with_home(self.home)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_uses_reference_defaults() {
        let f = ConfigFile::parse("[system]\nantennas = 50\n").unwrap();
        let s = Scenario::from_file(&f).unwrap();
        assert_eq!(s.config, SystemConfig::reference(50, 0.9));
        assert_eq!(s.gains, Gains::Symmetric(0.1));
    }

    #[test]
    fn missing_antennas_is_a_parse_error() {
        let err = ConfigFile::parse("[system]\ncells = 7\n").unwrap_err();
        assert!(format!("{err:#}").contains("antennas"));
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line_number() {
        let err = ConfigFile::parse("[system]\nantennas = 50\nantenas = 3\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("antenas") && msg.contains('3'), "{msg}");
    }

    #[test]
    fn decibel_keys_convert() {
        let f = ConfigFile::parse("[system]\nantennas = 50\nuplink_power_db = 10\n[experiment]\ngamma_th_db = 3\n").unwrap();
        let s = Scenario::from_file(&f).unwrap();
        assert!((s.config.uplink_power - 10.0).abs() < 1e-12);
        assert!((s.gamma_th.unwrap() - 1.9952623149688795).abs() < 1e-12);
    }

    #[test]
    fn conflicting_keys_fail() {
        let f = ConfigFile::parse("[system]\nantennas = 50\nuplink_power = 1\nuplink_power_db = 0\n").unwrap();
        assert!(Scenario::from_file(&f).is_err());
        let f = ConfigFile::parse("[system]\nantennas = 50\nalpha = 0.5\nvelocity = 3\n").unwrap();
        assert!(Scenario::from_file(&f).is_err());
    }

    #[test]
    fn flags_override_the_file() {
        let o = Overrides {
            antennas: Some(20),
            snr_db: Some(-10.0),
            ..Default::default()
        };
        let s = Scenario::resolve(None, &o).unwrap();
        assert_eq!(s.config.antennas, 20);
        assert!((s.config.uplink_power - 0.1).abs() < 1e-15);
    }
}
