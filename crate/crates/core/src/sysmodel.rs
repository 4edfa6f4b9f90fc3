//! System configuration, large-scale fading and the derived constants of
//! the model (estimation gains, pilot-contamination constant, aging-error
//! variances).

use std::fmt;

use crate::specfun::bessel_j0;
use crate::{error::domain, Result};

/// Speed of light used for the Doppler shift, m/s.
pub const SPEED_OF_LIGHT: f64 = 3e8;

/// How the temporal correlation α between consecutive channel samples is
/// specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aging {
    /// α given directly.
    Direct(f64),
    /// Jakes model: α = J0(2π f_D T_s) with f_D = v f_c / c.
    Mobility {
        velocity: f64,
        carrier_hz: f64,
        sample_period: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// L
    pub cells: usize,
    /// K
    pub users: usize,
    /// N
    pub antennas: usize,
    /// τ
    pub pilot_length: usize,
    /// T
    pub coherence: usize,
    /// p_r, linear
    pub uplink_power: f64,
    pub aging: Aging,
}

impl SystemConfig {
    pub fn new(
        cells: usize,
        users: usize,
        antennas: usize,
        pilot_length: usize,
        coherence: usize,
        uplink_power: f64,
        aging: Aging,
    ) -> Self {
        SystemConfig {
            cells,
            users,
            antennas,
            pilot_length,
            coherence,
            uplink_power,
            aging,
        }
    }

    /// The evaluation scenario used throughout: 7 cells, 10 users, τ = K,
    /// T = 200 and 0 dB uplink power.
    pub fn reference(antennas: usize, alpha: f64) -> Self {
        SystemConfig::new(7, 10, antennas, 10, 200, 1.0, Aging::Direct(alpha))
    }

    pub fn alpha(&self) -> Result<f64> {
        match self.aging {
            Aging::Direct(a) if a.is_finite() && (-1.0..=1.0).contains(&a) => Ok(a),
            Aging::Direct(a) => Err(domain(format!("α must lie in [−1, 1], got {a}"))),
            Aging::Mobility {
                velocity,
                carrier_hz,
                sample_period,
            } => alpha_from_mobility(velocity, carrier_hz, sample_period),
        }
    }

    /// p_tr = τ p_r.
    pub fn training_power(&self) -> f64 {
        self.pilot_length as f64 * self.uplink_power
    }

    /// 1 − τ/T.
    pub fn prelog(&self) -> f64 {
        1.0 - self.pilot_length as f64 / self.coherence as f64
    }

    pub fn with_power(&self, uplink_power: f64) -> Self {
        SystemConfig { uplink_power, ..self.clone() }
    }

    pub fn with_antennas(&self, antennas: usize) -> Self {
        SystemConfig { antennas, ..self.clone() }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        SystemConfig {
            aging: Aging::Direct(alpha),
            ..self.clone()
        }
    }
}

/// α = J0(2π f_D T_s) with maximum Doppler shift f_D = v f_c / c.
///
/// ```
/// use mimo_aging::sysmodel::alpha_from_mobility;
/// assert_eq!(alpha_from_mobility(0.0, 2e9, 1e-3).unwrap(), 1.0);
/// ```
pub fn alpha_from_mobility(velocity: f64, carrier_hz: f64, sample_period: f64) -> Result<f64> {
    if !(velocity >= 0.0) || !velocity.is_finite() {
        return Err(domain(format!("velocity must be nonnegative, got {velocity}")));
    }
    if !(carrier_hz > 0.0) || !(sample_period > 0.0) || !carrier_hz.is_finite() || !sample_period.is_finite() {
        return Err(domain("carrier frequency and sample period must be positive"));
    }
    let doppler = velocity * carrier_hz / SPEED_OF_LIGHT;
    bessel_j0(2.0 * std::f64::consts::PI * doppler * sample_period)
}

/// Large-scale gains β_lik: serving cell `l`, source cell `i`, user `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScale {
    cells: usize,
    users: usize,
    values: Vec<f64>,
}

impl LargeScale {
    /// `values` in row-major (l, i, k) order.
    pub fn new(cells: usize, users: usize, values: Vec<f64>) -> Result<Self> {
        if cells == 0 || users == 0 {
            return Err(domain("large-scale table needs at least one cell and one user"));
        }
        if values.len() != cells * cells * users {
            return Err(domain(format!(
                "large-scale table has {} entries, expected L·L·K = {}",
                values.len(),
                cells * cells * users
            )));
        }
        if let Some(bad) = values.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
            return Err(domain(format!("large-scale gains must be positive and finite, got {bad}")));
        }
        Ok(LargeScale { cells, users, values })
    }

    pub fn from_fn(cells: usize, users: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(cells * cells * users);
        for l in 0..cells {
            for i in 0..cells {
                for k in 0..users {
                    values.push(f(l, i, k));
                }
            }
        }
        LargeScale::new(cells, users, values)
    }

    /// β_llk = 1 and β_lik = a for i ≠ l.
    pub fn symmetric(cells: usize, users: usize, a: f64) -> Result<Self> {
        LargeScale::from_fn(cells, users, |l, i, _| if l == i { 1.0 } else { a })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn users(&self) -> usize {
        self.users
    }

    #[inline]
    pub fn get(&self, l: usize, i: usize, k: usize) -> f64 {
        self.values[(l * self.cells + i) * self.users + k]
    }
}

/// Large-scale gains together with every derived deterministic constant.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingProfile {
    beta: LargeScale,
    beta_hat: Vec<f64>,
    alpha: f64,
    uplink_power: f64,
    training_power: f64,
    home: usize,
}

/// Builds the profile with p_tr = τ p_r.
pub fn build_profile(config: &SystemConfig, beta: &LargeScale) -> Result<FadingProfile> {
    build_profile_with_training(config, beta, config.training_power())
}

/// Builds the profile with an explicit training power; `f64::INFINITY`
/// gives noiseless pilots.
pub fn build_profile_with_training(config: &SystemConfig, beta: &LargeScale, training_power: f64) -> Result<FadingProfile> {
    if beta.cells() != config.cells || beta.users() != config.users {
        return Err(domain(format!(
            "large-scale table is {}×{}×{}, configuration needs {}×{}×{}",
            beta.cells(),
            beta.cells(),
            beta.users(),
            config.cells,
            config.cells,
            config.users
        )));
    }
    if !(config.uplink_power > 0.0) || !config.uplink_power.is_finite() {
        return Err(domain(format!("uplink power must be positive, got {}", config.uplink_power)));
    }
    if !(training_power > 0.0) {
        return Err(domain(format!("training power must be positive, got {training_power}")));
    }
    let alpha = config.alpha()?;
    let (l_n, k_n) = (beta.cells(), beta.users());
    let mut beta_hat = Vec::with_capacity(l_n * l_n * k_n);
    for l in 0..l_n {
        for i in 0..l_n {
            for k in 0..k_n {
                let denom: f64 = (0..l_n).map(|j| beta.get(l, j, k)).sum::<f64>() + 1.0 / training_power;
                let b = beta.get(l, i, k);
                beta_hat.push(b * b / denom);
            }
        }
    }
    Ok(FadingProfile {
        beta: beta.clone(),
        beta_hat,
        alpha,
        uplink_power: config.uplink_power,
        training_power,
        home: 0,
    })
}

impl FadingProfile {
    /// The symmetric scenario with β_llk = 1 and cross gains `a`.
    ///
    /// ```
    /// use mimo_aging::sysmodel::{FadingProfile, SystemConfig};
    /// let cfg = SystemConfig::reference(100, 0.9);
    /// let p = FadingProfile::symmetric(&cfg, 0.1).unwrap();
    /// assert!((p.interference_constant(0) - 0.06).abs() < 1e-15);
    /// assert!((p.beta_hat(0, 0, 0) - 1.0 / 1.7).abs() < 1e-15);
    /// ```
    pub fn symmetric(config: &SystemConfig, a: f64) -> Result<Self> {
        build_profile(config, &LargeScale::symmetric(config.cells, config.users, a)?)
    }

    /// The same profile analysed from serving cell `home`.
    pub fn with_home(mut self, home: usize) -> Result<Self> {
        if home >= self.cells() {
            return Err(domain(format!("home cell {home} out of range")));
        }
        self.home = home;
        Ok(self)
    }

    pub fn home(&self) -> usize {
        self.home
    }

    pub fn cells(&self) -> usize {
        self.beta.cells()
    }

    pub fn users(&self) -> usize {
        self.beta.users()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn uplink_power(&self) -> f64 {
        self.uplink_power
    }

    pub fn training_power(&self) -> f64 {
        self.training_power
    }

    pub fn large_scale(&self) -> &LargeScale {
        &self.beta
    }

    pub fn beta(&self, l: usize, i: usize, k: usize) -> f64 {
        self.beta.get(l, i, k)
    }

    /// β̂_lik = β²_lik / (Σ_j β_ljk + 1/p_tr), the variance of the MMSE estimate.
    pub fn beta_hat(&self, l: usize, i: usize, k: usize) -> f64 {
        self.beta_hat[(l * self.cells() + i) * self.users() + k]
    }

    /// d_lik = β_lik − α² β̂_lik, the variance of the aged estimation error.
    pub fn aging_error(&self, l: usize, i: usize, k: usize) -> f64 {
        (self.beta(l, i, k) - self.alpha * self.alpha * self.beta_hat(l, i, k)).max(0.0)
    }

    /// Entry k of D_i: β_lik / β_llk for the home cell l.
    pub fn ratio(&self, i: usize, k: usize) -> f64 {
        let l = self.home;
        self.beta(l, i, k) / self.beta(l, l, k)
    }

    /// C = Σ_{i≠l} (β_lik/β_llk)² for user `k` of the home cell.
    pub fn interference_constant(&self, k: usize) -> f64 {
        (0..self.cells()).filter(|&i| i != self.home).map(|i| self.ratio(i, k).powi(2)).sum()
    }

    /// The K·L aging-error variances seen by the home base station, ordered
    /// (source cell, user).
    pub fn aging_diagonal(&self) -> Vec<f64> {
        let l = self.home;
        (0..self.cells())
            .flat_map(|i| (0..self.users()).map(move |k| (i, k)))
            .map(|(i, k)| self.aging_error(l, i, k))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Checks every invariant of the configuration and profile. An empty list
/// means the pair is valid; warnings alone do not make it invalid.
pub fn validate(config: &SystemConfig, profile: Option<&FadingProfile>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut err = |m: String| {
        out.push(Violation {
            severity: Severity::Error,
            message: m,
        })
    };
    if config.cells == 0 || config.users == 0 || config.antennas == 0 || config.pilot_length == 0 || config.coherence == 0 {
        err("L, K, N, τ and T must all be positive".into());
    }
    if config.antennas < config.users {
        err(format!("N ≥ K violated: N = {}, K = {}", config.antennas, config.users));
    }
    if config.pilot_length < config.users {
        err(format!("τ ≥ K violated: τ = {}, K = {}", config.pilot_length, config.users));
    }
    if config.pilot_length > config.coherence {
        err(format!("τ ≤ T violated: τ = {}, T = {}", config.pilot_length, config.coherence));
    }
    if !(config.uplink_power > 0.0) || !config.uplink_power.is_finite() {
        err(format!("p_r > 0 violated: p_r = {}", config.uplink_power));
    }
    if let Err(e) = config.alpha() {
        err(format!("invalid aging parameters: {e}"));
    }
    if let Some(p) = profile {
        if p.cells() != config.cells || p.users() != config.users {
            err("profile dimensions do not match the configuration".into());
        } else {
            for l in 0..p.cells() {
                for i in 0..p.cells() {
                    for k in 0..p.users() {
                        let (b, bh) = (p.beta(l, i, k), p.beta_hat(l, i, k));
                        if !(b > 0.0) {
                            err(format!("β[{l}][{i}][{k}] = {b} is not positive"));
                        }
                        if !(bh > 0.0 && bh <= b * (1.0 + 1e-12)) {
                            err(format!("0 < β̂ ≤ β violated at [{l}][{i}][{k}]: β̂ = {bh}, β = {b}"));
                        }
                        let d = b - p.alpha() * p.alpha() * bh;
                        if d < -1e-12 * b {
                            err(format!("aging-error variance negative at [{l}][{i}][{k}]: {d}"));
                        }
                    }
                }
            }
            for k in 0..p.users() {
                let c = p.interference_constant(k);
                if !(c >= 0.0) || ((c == 0.0) != (p.cells() == 1)) {
                    err(format!("C ≥ 0 with C = 0 iff L = 1 violated for user {k}: C = {c}"));
                }
            }
        }
    }
    if config.antennas == config.users && config.users > 0 {
        out.push(Violation {
            severity: Severity::Warning,
            message: "degenerate: inverse-mean quantities undefined (N = K)".into(),
        });
    }
    out
}

/// True when `validate` reported no errors.
pub fn is_valid(violations: &[Violation]) -> bool {
    violations.iter().all(|v| v.severity != Severity::Error)
}
