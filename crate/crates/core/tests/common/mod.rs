#![allow(dead_code)]

use mimo_aging::analytics::{sinr_law, SinrLaw};
use mimo_aging::sysmodel::{FadingProfile, SystemConfig};

/// The 7-cell, 10-user reference scenario with cross gain 0.1.
pub fn reference(antennas: usize, alpha: f64, snr_db: f64) -> (SystemConfig, FadingProfile, SinrLaw) {
    let cfg = SystemConfig::reference(antennas, alpha).with_power(10f64.powf(snr_db / 10.0));
    let profile = FadingProfile::symmetric(&cfg, 0.1).unwrap();
    let law = sinr_law(&cfg, &profile, 0).unwrap();
    (cfg, profile, law)
}

/// Trapezoid rule in u = ln s over the whole real line; exponentially
/// accurate for the smooth, doubly decaying integrands used here.
fn log_trapezoid(f: impl Fn(f64) -> f64) -> f64 {
    let h = 0.005;
    let mut sum = 0.0;
    let mut u: f64 = -60.0;
    while u < 8.0 {
        let s = u.exp();
        sum += f(s) * s;
        u += h;
    }
    sum * h
}

/// Ergodic rate in bits via the MGF representation
/// ln(1+γ) = ∫₀^∞ (e^{−sA} − e^{−s(A+B)})/s ds with A = pY + 1 + α²pCX,
/// B = α²pX, using the raw aging-error diagonal (no partial fractions).
pub fn mgf_rate(law: &SinrLaw) -> f64 {
    let p = law.p_r;
    let a2 = law.alpha * law.alpha;
    let bh = law.erlang.scale;
    let shape = law.erlang.shape as f64;
    let c = law.c;
    let nats = log_trapezoid(|s| {
        let mut prod = (-s).exp() / s;
        for d in &law.diagonal {
            prod /= 1.0 + p * d * s;
        }
        let lo = (1.0 + p * a2 * c * bh * s).powf(-shape);
        let hi = (1.0 + p * a2 * (c + 1.0) * bh * s).powf(-shape);
        prod * (lo - hi)
    });
    nats / std::f64::consts::LN_2
}

/// P(SINR ≤ γ) = E_Y[F_X(γ(pY+1)/(α²p(1−Cγ)))] by the MGF-free route:
/// numerically integrate the Erlang CDF against the empirical mixture of
/// the hypoexponential density, evaluated with 1-D quadrature.
pub fn outage_semi_analytic(law: &SinrLaw, gamma: f64) -> f64 {
    use mimo_aging::specfun::{density_breaks, erlang_cdf, integrate_piecewise, HypoexpDensity, QuadOptions};
    let a2p = law.alpha * law.alpha * law.p_r;
    let scale = gamma / (a2p * (1.0 - law.c * gamma));
    let Some(spec) = &law.spectral else {
        return erlang_cdf(&law.erlang, scale).unwrap();
    };
    let dens = HypoexpDensity::new(spec);
    let (b, s) = density_breaks(law.y_mean(), law.y_variance().sqrt());
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 };
    integrate_piecewise(
        |y| erlang_cdf(&law.erlang, scale * (law.p_r * y + 1.0)).unwrap() * dens.pdf(y),
        &b,
        s,
        opts,
    )
    .unwrap()
    .value
}
