use crate::analytics::{ergodic_rate_exact, ergodic_rate_quadrature, rate_lower_bound, sinr_law};
use crate::sysmodel::{build_profile, FadingProfile, SystemConfig};
use crate::{error::domain, Error, Result};

use super::mc::MonteCarlo;

/// Which ergodic-rate evaluator drives a power search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateMethod {
    /// Closed form in adaptive extended precision.
    Exact,
    /// Jensen-type lower bound.
    Bound,
    /// Numerical integration of the SINR law.
    Quadrature,
    /// Full-pipeline simulation with common random numbers across powers.
    MonteCarlo { trials: usize, seed: u64 },
}

const P_MIN: f64 = 1e-6;
const P_MAX: f64 = 1e6;
const RATE_TOL: f64 = 1e-4;

/// Ergodic rate (bits/s/Hz) of user `k` when both data and training power
/// are rescaled to p_r (with p_tr = τ p_r). The large-scale table and the
/// home cell are taken from `profile`.
pub fn rate_at_power(config: &SystemConfig, profile: &FadingProfile, k: usize, p_r: f64, method: RateMethod) -> Result<f64> {
    let cfg = config.with_power(p_r);
    let prof = build_profile(&cfg, profile.large_scale())?.with_home(profile.home())?;
    if let RateMethod::MonteCarlo { trials, seed } = method {
        return Ok(MonteCarlo::new(&cfg, &prof, k)?.ergodic_rate(trials, seed)?.mean);
    }
    let law = sinr_law(&cfg, &prof, k)?;
    match method {
        RateMethod::Exact => ergodic_rate_exact(&law),
        RateMethod::Bound => rate_lower_bound(&law, &prof),
        RateMethod::Quadrature => ergodic_rate_quadrature(&law),
        RateMethod::MonteCarlo { .. } => unreachable!(),
    }
}

/// Smallest uplink power p_r ∈ [1e-6, 1e6] at which user `k` reaches
/// `target` bits/s/Hz, found by bisection on log₁₀ p_r until the rate is
/// within 1e-4 of the target.
///
/// The search is first narrowed with two cheap bounds that hold for every
/// method: the Jensen lower bound and log₂(1 + α²p_r E[X]), which ignores
/// all interference. This keeps the expensive evaluator away from the
/// extremes of the bracket.
///
/// Returns [`Error::Infeasible`] when the rate at the top of the bracket
/// (the pilot-contamination/aging ceiling for practical purposes) is still
/// below the target.
pub fn required_power(config: &SystemConfig, profile: &FadingProfile, k: usize, target: f64, method: RateMethod) -> Result<f64> {
    if !(target >= 0.0) || !target.is_finite() {
        return Err(domain(format!("target rate must be nonnegative, got {target}")));
    }
    if target == 0.0 {
        return Ok(P_MIN);
    }
    let f = |log_p: f64| rate_at_power(config, profile, k, 10f64.powf(log_p), method);
    let upper = |log_p: f64| -> Result<f64> {
        let cfg = config.with_power(10f64.powf(log_p));
        let prof = build_profile(&cfg, profile.large_scale())?.with_home(profile.home())?;
        let law = sinr_law(&cfg, &prof, k)?;
        Ok((law.alpha * law.alpha * cfg.uplink_power * law.erlang.mean()).ln_1p() / std::f64::consts::LN_2)
    };
    let lower = |log_p: f64| rate_at_power(config, profile, k, 10f64.powf(log_p), RateMethod::Bound);

    let (mut lo, mut hi) = (P_MIN.log10(), P_MAX.log10());
    if lower(hi).unwrap_or(0.0) < target {
        let ceiling = f(hi)?;
        if ceiling < target {
            return Err(Error::Infeasible { target, ceiling });
        }
    } else {
        hi = crossing(lo, hi, |x| Ok(lower(x).unwrap_or(0.0) >= target))?.1;
    }
    if upper(lo)? >= target {
        if f(lo)? >= target {
            return Ok(P_MIN);
        }
    } else {
        // upper(lo) < target ⇒ rate(lo) < target
        lo = crossing(lo, hi, |x| Ok(upper(x)? >= target))?.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = f(mid)?;
        if (r - target).abs() < RATE_TOL {
            return Ok(10f64.powf(mid));
        }
        if r < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(10f64.powf(hi))
}

/// Brackets the switch of a monotone predicate (false at lo, true at hi)
/// to within 1e-10.
fn crossing(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> Result<bool>) -> Result<(f64, f64)> {
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}
