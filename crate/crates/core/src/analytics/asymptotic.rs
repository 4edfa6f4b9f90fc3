use crate::sysmodel::FadingProfile;
use crate::{error::domain, Error, Result};

/// Almost-sure SINR limit as N → ∞ with K fixed: 1/C.
pub fn asymptotic_sinr_infinite_n(profile: &FadingProfile, k: usize) -> Result<f64> {
    let c = profile.interference_constant(k);
    if c == 0.0 {
        return Err(Error::Unbounded);
    }
    if profile.alpha() == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / c)
}

/// log₂(1 + 1/C).
pub fn asymptotic_rate_infinite_n(profile: &FadingProfile, k: usize) -> Result<f64> {
    asymptotic_sinr_infinite_n(profile, k).map(f64::ln_1p).map(|r| r / std::f64::consts::LN_2)
}

/// Deterministic equivalent of the SINR for N, K → ∞ at fixed κ = N/K:
/// α²β̂(κ−1) / (α²Cβ̂(κ−1) + (1/K) Σ_i Tr D̃_li). Independent of p_r.
pub fn de_sinr_fixed_ratio(profile: &FadingProfile, k: usize, kappa: f64, users: usize) -> Result<f64> {
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(domain(format!("κ must exceed 1, got {kappa}")));
    }
    if users != profile.users() {
        return Err(domain(format!("K = {users} does not match the profile's {} users", profile.users())));
    }
    let a2 = profile.alpha() * profile.alpha();
    let l = profile.home();
    let bh = profile.beta_hat(l, l, k);
    let trace: f64 = profile.aging_diagonal().iter().sum::<f64>() / users as f64;
    let signal = a2 * bh * (kappa - 1.0);
    Ok(signal / (signal * profile.interference_constant(k) + trace))
}

/// SINR limit under the power scaling p_r = E/√N:
/// α²τE²β²_llk / (α²τE²Cβ²_llk + 1).
pub fn power_scaling_limit(profile: &FadingProfile, k: usize, energy: f64, pilot_length: usize) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(domain(format!("E must be positive, got {energy}")));
    }
    let l = profile.home();
    let b = profile.beta(l, l, k);
    let s = profile.alpha().powi(2) * pilot_length as f64 * energy * energy * b * b;
    Ok(s / (s * profile.interference_constant(k) + 1.0))
}
