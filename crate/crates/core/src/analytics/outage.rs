use super::law::SinrLaw;
use super::precision::converge;
use crate::specfun::{binomial, erlang_cdf, factorials, gamma, u_moment_table, Mp, Real};
use crate::{error::domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutageForm {
    /// The complete closed form, including the (γ_th/γ̄)^t/t! weights and the
    /// 1/p_r shift of the hypoexponential moments.
    #[default]
    Complete,
    /// The abbreviated expression without those factors, with (q−1) read as
    /// (q−1)!. Kept only to document how far it is from the truth; it is not
    /// clamped.
    Literal,
}

/// P(SINR ≤ γ_th) from the complete closed form.
///
/// ```
/// use mimo_aging::{analytics, sysmodel::{FadingProfile, SystemConfig}};
/// let cfg = SystemConfig::reference(100, 0.9);
/// let law = analytics::sinr_law(&cfg, &FadingProfile::symmetric(&cfg, 0.1).unwrap(), 0).unwrap();
/// // no outage-free operation beyond the pilot-contamination ceiling 1/C
/// assert_eq!(analytics::outage_probability(&law, 1.0 / 0.06).unwrap(), 1.0);
/// ```
pub fn outage_probability(law: &SinrLaw, gamma_th: f64) -> Result<f64> {
    outage_probability_with(law, gamma_th, OutageForm::Complete)
}

pub fn outage_probability_with(law: &SinrLaw, gamma_th: f64, form: OutageForm) -> Result<f64> {
    if !(gamma_th > 0.0) || gamma_th.is_nan() {
        return Err(domain(format!("outage threshold must be positive, got {gamma_th}")));
    }
    if law.alpha == 0.0 || (law.c > 0.0 && gamma_th >= 1.0 / law.c) {
        return Ok(1.0);
    }
    if form == OutageForm::Literal {
        return Ok(literal(law, gamma_th));
    }
    let gamma_bar = law.beta_hat() * law.alpha * law.alpha * (1.0 - law.c * gamma_th);
    let g = gamma_th / gamma_bar;
    let z = 1.0 / law.p_r;
    let Some(spectral) = &law.spectral else {
        // X < γ_th/(α² p_r (1 − Cγ_th)) = g z β̂
        return erlang_cdf(&law.erlang, g * z * law.beta_hat());
    };
    let bits = 96 + spectral.coefficient_mass().max(1.0).log2() as u32;
    let p = converge(bits, 1e-12, 1e-20, || Mp::one() - survival::<Mp>(law, g, z))?;
    Ok(p.clamp(0.0, 1.0))
}

/// e^{−gz} Σ_p Σ_q X_{p,q} μ^{−q}/(q−1)! Σ_{t≤n} g^t/t! ∫ y^{q−1}(y+z)^t e^{−(1/μ+g)y} dy.
fn survival<R: Real>(law: &SinrLaw, g: f64, z: f64) -> R {
    let spectral = law.spectral.as_ref().expect("non-degenerate law");
    let n = law.dof();
    let coeffs = spectral.coefficients_in::<R>();
    let tau_max = spectral.multiplicities.iter().copied().max().unwrap_or(1);
    let fact = factorials::<R>(n.max(tau_max));
    let g_r = R::from_f64(g);
    let z_r = R::from_f64(z);
    let mut total = R::zero();
    for (p, (&mu_f, &tau)) in spectral.eigenvalues.iter().zip(&spectral.multiplicities).enumerate() {
        let mu = R::from_f64(mu_f);
        let shifted = R::one() / (R::one() / mu.clone() + g_r.clone());
        let moments = u_moment_table(tau, n, &z_r, &shifted);
        let inv_mu = R::one() / mu;
        let mut mu_pow = R::one();
        for q in 1..=tau {
            mu_pow *= inv_mu.clone();
            let mut inner = R::zero();
            let mut g_pow = R::one();
            for t in 0..=n {
                inner += g_pow.clone() / fact[t].clone() * moments[t][q - 1].clone();
                g_pow *= g_r.clone();
            }
            total += coeffs[p][q - 1].clone() * mu_pow.clone() / fact[q - 1].clone() * inner;
        }
    }
    (-(g_r * z_r)).exp() * total
}

fn literal(law: &SinrLaw, gamma_th: f64) -> f64 {
    let Some(spectral) = &law.spectral else {
        return f64::NAN;
    };
    let a2 = law.alpha * law.alpha;
    let bh = law.beta_hat();
    let scale = bh * (a2 - a2 * law.c * gamma_th);
    let lead = (-gamma_th / (bh * (a2 * law.p_r - a2 * law.p_r * law.c * gamma_th))).exp();
    let mut sum = 0.0;
    for (p, (&mu, &tau)) in spectral.eigenvalues.iter().zip(&spectral.multiplicities).enumerate() {
        for q in 1..=tau {
            let x = spectral.char_coeffs[p][q - 1];
            let qf = crate::specfun::factorial(q - 1);
            for t in 0..=law.dof() {
                for s in 0..=t {
                    sum += binomial(t, s) * x * mu.powi(-(q as i32)) / qf * gamma((s + q) as f64) * scale.powi((s + q) as i32);
                }
            }
        }
    }
    1.0 - lead * sum
}
