//! Closed-form and semi-analytic performance metrics.
//!
//! Everything here works from a [`SinrLaw`]: the SINR of user k is distributed
//! as α²pX / (α²pCX + pY + 1) with X Erlang and Y hypoexponential.

mod asymptotic;
mod law;
mod lowsnr;
mod outage;
mod precision;
mod rate;

pub use asymptotic::{asymptotic_rate_infinite_n, asymptotic_sinr_infinite_n, de_sinr_fixed_ratio, power_scaling_limit};
pub use law::{sinr_law, SinrLaw};
pub use lowsnr::{low_snr_metrics, LowSnrMetrics};
pub use outage::{outage_probability, outage_probability_with, OutageForm};
pub use rate::{
    ergodic_rate_distinct, ergodic_rate_exact, ergodic_rate_quadrature, ergodic_rate_quadrature_with, rate_lower_bound,
    sum_spectral_efficiency,
};
