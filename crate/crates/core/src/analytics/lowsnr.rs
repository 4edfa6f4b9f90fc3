use std::f64::consts::LN_2;

use super::law::SinrLaw;
use crate::specfun::hypoexp_mean;
use crate::{error::domain, Result};

/// Energy efficiency at vanishing SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowSnrMetrics {
    /// Eb/N0_min, linear.
    pub ebn0_min: f64,
    /// Wideband slope S0 (bits/s/Hz per 3 dB), from the derivative definition.
    pub wideband_slope: f64,
    /// Ṙ(0) in bits/s/Hz per unit p_r.
    pub first_derivative: f64,
    /// R̈(0) in bits/s/Hz per unit p_r².
    pub second_derivative: f64,
    /// The slope expression sometimes quoted in closed form (negative sign,
    /// different moment weights); reported for comparison only.
    pub literal_slope: f64,
    /// The matching quoted second derivative, for comparison only.
    pub literal_second_derivative: f64,
}

impl LowSnrMetrics {
    pub fn ebn0_min_db(&self) -> f64 {
        10.0 * self.ebn0_min.log10()
    }
}

/// Low-SNR expansion R(p) = Ṙ(0) p + R̈(0) p²/2 + o(p²) of the ergodic rate
/// (estimation gains held fixed), with Eb/N0_min = 1/Ṙ(0) and
/// S0 = −2 Ṙ(0)² ln 2 / R̈(0).
pub fn low_snr_metrics(law: &SinrLaw) -> Result<LowSnrMetrics> {
    if law.alpha == 0.0 {
        return Err(domain("low-SNR metrics are undefined for α = 0"));
    }
    let a2 = law.alpha * law.alpha;
    let m = law.erlang.shape as f64;
    let bh = law.beta_hat();
    let ex = m * bh;
    let ex2 = m * (m + 1.0) * bh * bh;
    let ex3 = m * (m + 1.0) * (m + 2.0) * bh * bh * bh;
    let ey = law.spectral.as_ref().map_or(0.0, hypoexp_mean);
    let first = a2 * ex / LN_2;
    let second = -(a2 * a2 * (2.0 * law.c + 1.0) * ex2 + 2.0 * a2 * ex * ey) / LN_2;
    let slope = -2.0 * first * first * LN_2 / second;

    let literal_second = (a2 * a2 * a2 * ex3 + 2.0 * a2 * a2 * law.c * ex2 + 2.0 * a2 * ex * ey) / LN_2;
    let quoted_mean: f64 = law.spectral.as_ref().map_or(0.0, |s| {
        let mut acc = 0.0;
        for (p, (&mu, &tau)) in s.eigenvalues.iter().zip(&s.multiplicities).enumerate() {
            for q in 1..=tau {
                acc += s.char_coeffs[p][q - 1] * mu.powi(-(q as i32)) * q as f64 / crate::specfun::factorial(q - 1);
            }
        }
        acc
    });
    let literal_slope = (-2.0 * m / (m + 1.0))
        / (a2 * a2 + 2.0 * a2 * law.c * (m + 2.0) + 2.0 / (m + 1.0) * quoted_mean / bh);

    Ok(LowSnrMetrics {
        ebn0_min: LN_2 / (a2 * m * bh),
        wideband_slope: slope,
        first_derivative: first,
        second_derivative: second,
        literal_slope,
        literal_second_derivative: literal_second,
    })
}
