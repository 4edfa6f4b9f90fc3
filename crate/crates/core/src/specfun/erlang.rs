use super::gamma::ln_gamma;
use crate::{error::domain, Result};

/// Gamma law with integer shape: the distribution of X = 1/‖[Ĝ†]_k‖² for a
/// zero-forcing receiver with `N` antennas and `K` users has shape N−K+1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErlangLaw {
    pub shape: u32,
    pub scale: f64,
}

impl ErlangLaw {
    pub fn new(shape: u32, scale: f64) -> Result<Self> {
        if shape < 1 {
            return Err(domain("Erlang shape must be at least 1"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(domain(format!("Erlang scale must be positive, got {scale}")));
        }
        Ok(ErlangLaw { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.shape as f64 * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape as f64 * self.scale * self.scale
    }

    /// E[X²] = s(s+1)·scale².
    pub fn second_moment(&self) -> f64 {
        let s = self.shape as f64;
        s * (s + 1.0) * self.scale * self.scale
    }
}

pub fn erlang_pdf(law: &ErlangLaw, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("Erlang density requires x ≥ 0, got {x}")));
    }
    let s = law.shape as f64;
    if x == 0.0 {
        return Ok(if law.shape == 1 { 1.0 / law.scale } else { 0.0 });
    }
    let u = x / law.scale;
    Ok(((s - 1.0) * u.ln() - u - ln_gamma(s)).exp() / law.scale)
}

/// Erlang CDF, 1 − e^{−u} Σ_{k<s} u^k/k! with u = x/scale.
///
/// In the lower tail the complementary series e^{−u} Σ_{k≥s} u^k/k! is summed
/// instead, so that tiny probabilities keep their relative accuracy.
pub fn erlang_cdf(law: &ErlangLaw, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("Erlang CDF requires x ≥ 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let u = x / law.scale;
    let s = law.shape as usize;
    if u < s as f64 {
        let log_first = s as f64 * u.ln() - u - ln_gamma(s as f64 + 1.0);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in s + 1.. {
            term *= u / k as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return Ok((log_first + sum.ln()).exp().min(1.0));
    }
    let mut term = (-u).exp();
    let mut sum = term;
    for k in 1..s {
        term *= u / k as f64;
        sum += term;
    }
    Ok((1.0 - sum).clamp(0.0, 1.0))
}

/// E[1/X] = 1/((shape−1)·scale); diverges for shape 1 (an N = K system).
pub fn erlang_inverse_mean(law: &ErlangLaw) -> Result<f64> {
    if law.shape < 2 {
        return Err(domain("inverse mean of an Erlang law with shape 1 diverges (N = K)"));
    }
    Ok(1.0 / ((law.shape - 1) as f64 * law.scale))
}
