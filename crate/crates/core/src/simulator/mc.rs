use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;

use super::realization::{draw_realization_full_training, draw_with, sinr_with, AgingSampling, EstimateModel};
use crate::analytics::SinrLaw;
use crate::stats::mean_stderr;
use crate::sysmodel::{FadingProfile, SystemConfig};
use crate::{error::domain, Result};

/// A Monte Carlo point estimate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation / √trials.
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

impl McEstimate {
    fn from_samples(xs: &[f64], seed: u64) -> Self {
        let (mean, stderr) = mean_stderr(xs);
        McEstimate {
            mean,
            stderr,
            trials: xs.len(),
            seed,
        }
    }
}

/// The RNG for trial `index` of a run seeded with `seed`.
pub(crate) fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// SINR simulation of one user of the home cell.
#[derive(Debug, Clone)]
pub struct MonteCarlo<'a> {
    config: &'a SystemConfig,
    profile: &'a FadingProfile,
    user: usize,
    aging: AgingSampling,
    estimates: EstimateModel,
}

impl<'a> MonteCarlo<'a> {
    pub fn new(config: &'a SystemConfig, profile: &'a FadingProfile, user: usize) -> Result<Self> {
        if user >= profile.users() {
            return Err(domain(format!("user index {user} out of range")));
        }
        Ok(MonteCarlo {
            config,
            profile,
            user,
            aging: AgingSampling::default(),
            estimates: EstimateModel::default(),
        })
    }

    pub fn aging(mut self, aging: AgingSampling) -> Self {
        self.aging = aging;
        self
    }

    pub fn estimates(mut self, estimates: EstimateModel) -> Self {
        self.estimates = estimates;
        self
    }

    fn one(&self, seed: u64, index: u64) -> Result<f64> {
        let mut rng = trial_rng(seed, index);
        let real = match self.estimates {
            EstimateModel::Marginal => draw_with(self.config, self.profile, &mut rng, self.aging)?,
            EstimateModel::FullTraining => draw_realization_full_training(self.config, self.profile, &mut rng)?,
        };
        let projected = self.aging == AgingSampling::Projected && self.estimates == EstimateModel::Marginal;
        Ok(if projected {
            sinr_with(&real, self.config, self.profile, self.user, Some(&mut rng))
        } else {
            sinr_with::<ChaCha8Rng>(&real, self.config, self.profile, self.user, None)
        })
    }

    /// SINR samples in trial order.
    pub fn sinr_samples(&self, trials: usize, seed: u64) -> Result<Vec<f64>> {
        (0..trials as u64).into_par_iter().map(|t| self.one(seed, t)).collect()
    }

    pub fn ergodic_rate(&self, trials: usize, seed: u64) -> Result<McEstimate> {
        if trials < 100 {
            return Err(domain(format!("at least 100 trials are required, got {trials}")));
        }
        let rates: Vec<f64> = self.sinr_samples(trials, seed)?.into_iter().map(|g| g.ln_1p() / std::f64::consts::LN_2).collect();
        Ok(McEstimate::from_samples(&rates, seed))
    }

    /// Fraction of trials with SINR ≤ γ_th. The estimate is only meaningful
    /// when `trials × probability` is at least about 20.
    pub fn outage(&self, gamma_th: f64, trials: usize, seed: u64) -> Result<McEstimate> {
        let hits: Vec<f64> = self
            .sinr_samples(trials, seed)?
            .into_iter()
            .map(|g| if g <= gamma_th { 1.0 } else { 0.0 })
            .collect();
        Ok(McEstimate::from_samples(&hits, seed))
    }
}

/// Σ_k E[log₂(1 + SINR_k)] over all users of the home cell, every user's
/// SINR taken from the same realisation (no prelog).
pub fn mc_sum_rate(
    config: &SystemConfig,
    profile: &FadingProfile,
    trials: usize,
    seed: u64,
    aging: AgingSampling,
) -> Result<McEstimate> {
    if trials < 100 {
        return Err(domain(format!("at least 100 trials are required, got {trials}")));
    }
    let users = profile.users();
    let sums: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let real = draw_with(config, profile, &mut rng, aging)?;
            let mut acc = 0.0;
            for k in 0..users {
                let g = match aging {
                    AgingSampling::Projected => sinr_with(&real, config, profile, k, Some(&mut rng)),
                    AgingSampling::Explicit => sinr_with::<ChaCha8Rng>(&real, config, profile, k, None),
                };
                acc += g.ln_1p() / std::f64::consts::LN_2;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(McEstimate::from_samples(&sums, seed))
}

/// Monte Carlo ergodic rate E[log₂(1 + SINR)] over the full matrix pipeline.
pub fn mc_ergodic_rate(config: &SystemConfig, profile: &FadingProfile, k: usize, trials: usize, seed: u64) -> Result<McEstimate> {
    MonteCarlo::new(config, profile, k)?.ergodic_rate(trials, seed)
}

/// Monte Carlo outage probability P(SINR ≤ γ_th).
pub fn mc_outage(
    config: &SystemConfig,
    profile: &FadingProfile,
    k: usize,
    gamma_th: f64,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    MonteCarlo::new(config, profile, k)?.outage(gamma_th, trials, seed)
}

/// SINR samples drawn from the reduced law: X from its Erlang law and
/// Y = Σ d_i E_i with i.i.d. unit exponentials.
pub fn law_sinr_samples(law: &SinrLaw, trials: usize, seed: u64) -> Vec<f64> {
    let gamma = Gamma::new(law.erlang.shape as f64, law.erlang.scale).expect("valid Erlang law");
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let x = gamma.sample(&mut rng);
            let y: f64 = law.diagonal.iter().map(|d| d * rng.sample::<f64, _>(Exp1)).sum();
            law.sinr(x, y)
        })
        .collect()
}
