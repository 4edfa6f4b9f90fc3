use std::f64::consts::LN_2;

use super::law::SinrLaw;
use super::precision::{converge, MAX_BITS};
use crate::specfun::{
    binomial_row, density_breaks, erlang_pdf, factorials, integrate_piecewise, u_moment_table, HypoexpDensity,
    JKernel, Mp, QuadOptions, Real,
};
use crate::sysmodel::{FadingProfile, SystemConfig};
use crate::{Error, Result};

/// Exact ergodic rate (bits/s/Hz) from the closed form.
///
/// The finite sums cancel over hundreds of orders of magnitude at low SNR,
/// so they are evaluated in MPFR, raising the precision until two
/// successive evaluations agree to 1e-13.
pub fn ergodic_rate_exact(law: &SinrLaw) -> Result<f64> {
    if law.alpha == 0.0 {
        return Ok(0.0);
    }
    if law.antennas == law.users {
        return Err(Error::Unsupported("the closed-form rate needs N > K".into()));
    }
    let nats = converge(start_bits(law)?, 1e-13, 1e-300, || rate_nats::<Mp>(law))?;
    Ok(nats / LN_2)
}

/// The closed form specialised to distinct eigenvalues, with product-form
/// coefficients and incomplete-gamma U terms.
pub fn ergodic_rate_distinct(law: &SinrLaw) -> Result<f64> {
    let spectral = match &law.spectral {
        Some(s) if s.is_distinct() => s,
        _ => {
            return Err(Error::Precondition(
                "repeated (or vanishing) aging-error variances; use ergodic_rate_exact".into(),
            ))
        }
    };
    if law.alpha == 0.0 {
        return Ok(0.0);
    }
    if law.antennas == law.users {
        return Err(Error::Unsupported("the closed-form rate needs N > K".into()));
    }
    let mu = spectral.eigenvalues.clone();
    let nats = converge(start_bits(law)?, 1e-13, 1e-300, || distinct_nats::<Mp>(law, &mu))?;
    Ok(nats / LN_2)
}

/// Working precision predicted from the size of the cancellation; fails
/// fast when even the largest supported precision cannot be enough.
fn start_bits(law: &SinrLaw) -> Result<u32> {
    // e^{b} with b = 1/(β̂ α² C p_r) sets the scale of the cancellation.
    let c = if law.c > 0.0 { law.c } else { 1.0 };
    let b = 1.0 / (law.beta_hat() * law.alpha * law.alpha * c * law.p_r);
    let mass = law.spectral.as_ref().map_or(1.0, |s| s.coefficient_mass().max(1.0));
    let bits = 96.0 + 2.0 * b * std::f64::consts::LOG2_E + mass.log2();
    if !(bits <= MAX_BITS as f64) {
        return Err(Error::IllConditioned {
            precision_bits: bits.min(u32::MAX as f64) as u32,
            previous: f64::NAN,
            last: f64::NAN,
        });
    }
    Ok(bits as u32)
}

/// Sum over c ∈ {C+1, C} with signs +/−, skipping C = 0.
fn constants(law: &SinrLaw) -> Vec<(f64, f64)> {
    let mut out = vec![(law.c + 1.0, 1.0)];
    if law.c > 0.0 {
        out.push((law.c, -1.0));
    }
    out
}

/// w_m = Σ_{t=m+1}^{n} (t−m−1)!/t! for m = 0..n−1.
fn u_weights<R: Real>(n: usize, fact: &[R]) -> Vec<R> {
    (0..n)
        .map(|m| {
            let mut w = R::zero();
            for t in m + 1..=n {
                w += fact[t - m - 1].clone() / fact[t].clone();
            }
            w
        })
        .collect()
}

/// Exact rate in nats for a generic law.
fn rate_nats<R: Real>(law: &SinrLaw) -> R {
    let n = law.dof();
    let beta_hat = R::from_f64(law.beta_hat());
    let alpha2 = R::from_f64(law.alpha) * R::from_f64(law.alpha);
    let z = R::one() / R::from_f64(law.p_r);
    let Some(spectral) = &law.spectral else {
        return degenerate_nats(law);
    };
    let coeffs = spectral.coefficients_in::<R>();
    let tau_max = spectral.multiplicities.iter().copied().max().unwrap_or(1);
    let fact = factorials::<R>(n + tau_max + 1);
    let weights = u_weights::<R>(n, &fact);

    let mut total = R::zero();
    for (p, (&mu_f, &tau)) in spectral.eigenvalues.iter().zip(&spectral.multiplicities).enumerate() {
        let mu = R::from_f64(mu_f);
        let moments = u_moment_table(tau, n - 1, &z, &mu);
        let exp_z_mu = (z.clone() / mu.clone()).exp();
        let mut diff = vec![R::zero(); tau];
        for (c, sign) in constants(law) {
            let a = R::one() / (beta_hat.clone() * alpha2.clone() * R::from_f64(c));
            let b = a.clone() * z.clone();
            let lambda = R::one() / mu.clone() - a.clone();
            let kernel = JKernel::new(a.clone(), b.clone(), lambda, n + tau - 1);
            // Q_r = Σ_t (−1)^{t+1} K_{t+r}/t!
            let q_sums: Vec<R> = (0..tau)
                .map(|r| {
                    let mut acc = R::zero();
                    for t in 0..=n {
                        let term = kernel.k(t + r).clone() / fact[t].clone();
                        if t % 2 == 0 {
                            acc -= term;
                        } else {
                            acc += term;
                        }
                    }
                    acc
                })
                .collect();
            let minus_a = -a.clone();
            let minus_b = -b.clone();
            let mut a_pow_q = R::one();
            for q in 1..=tau {
                a_pow_q *= a.clone();
                // e^{z/μ} a^{−q} Σ_r C(q−1,r) (−b)^{q−1−r} Q_r
                let binom = binomial_row::<R>(q - 1);
                let mut j_part = R::zero();
                let mut pow = R::one();
                for r in (0..q).rev() {
                    j_part += binom[r].clone() * pow.clone() * q_sums[r].clone();
                    pow *= minus_b.clone();
                }
                j_part = j_part * exp_z_mu.clone() / a_pow_q.clone();
                // Σ_m (−a)^m M_m(q) w_m
                let mut u_part = R::zero();
                let mut pow = R::one();
                for m in 0..n {
                    u_part += pow.clone() * moments[m][q - 1].clone() * weights[m].clone();
                    pow *= minus_a.clone();
                }
                let i_c = j_part + u_part;
                if sign > 0.0 {
                    diff[q - 1] += i_c;
                } else {
                    diff[q - 1] -= i_c;
                }
            }
        }
        let inv_mu = R::one() / mu.clone();
        let mut mu_pow = R::one();
        for q in 1..=tau {
            mu_pow *= inv_mu.clone();
            total += coeffs[p][q - 1].clone() * mu_pow.clone() / fact[q - 1].clone() * diff[q - 1].clone();
        }
    }
    total
}

/// Y ≡ 0: E ln(1+α²p(C+1)X) − E ln(1+α²pCX) with
/// E ln(1+kX) = Σ_{t≤n} h_t(w)/t!, w = 1/(kβ̂),
/// h_t(w) = Σ_{k=1}^{t} (k−1)! (−w)^{t−k} − (−w)^t e^w Ei(−w).
fn degenerate_nats<R: Real>(law: &SinrLaw) -> R {
    let n = law.dof();
    let fact = factorials::<R>(n + 1);
    let mut total = R::zero();
    for (c, sign) in constants(law) {
        let k = R::from_f64(law.alpha) * R::from_f64(law.alpha) * R::from_f64(law.p_r) * R::from_f64(c);
        let w = R::one() / (k * R::from_f64(law.beta_hat()));
        let minus_w = -w.clone();
        let tail = w.exp() * minus_w.ei();
        let mut sum = R::zero();
        for t in 0..=n {
            let mut h = R::zero();
            let mut pow = R::one();
            for kk in (1..=t).rev() {
                h += fact[kk - 1].clone() * pow.clone();
                pow *= minus_w.clone();
            }
            // pow = (−w)^t here
            h -= pow * tail.clone();
            sum += h / fact[t].clone();
        }
        if sign > 0.0 {
            total += sum;
        } else {
            total -= sum;
        }
    }
    total
}

fn distinct_nats<R: Real>(law: &SinrLaw, mu: &[f64]) -> R {
    let n = law.dof();
    let beta_hat = R::from_f64(law.beta_hat());
    let alpha2 = R::from_f64(law.alpha) * R::from_f64(law.alpha);
    let z = R::one() / R::from_f64(law.p_r);
    let fact = factorials::<R>(n + 1);
    let weights = u_weights::<R>(n, &fact);
    let mut total = R::zero();
    for (p, &mu_p) in mu.iter().enumerate() {
        // X_{p,1} = Π_{q≠p} (1 − μ_q/μ_p)^{−1}
        let mut coeff = R::one();
        for (q, &mu_q) in mu.iter().enumerate() {
            if q != p {
                coeff /= R::one() - R::from_f64(mu_q) / R::from_f64(mu_p);
            }
        }
        let mu_r = R::from_f64(mu_p);
        let x = z.clone() / mu_r.clone();
        let exp_x = x.exp();
        // μ^{m+1} e^{z/μ} Γ(m+1, z/μ)
        let mut u_terms = Vec::with_capacity(n);
        let mut mu_pow = mu_r.clone();
        for m in 0..n {
            u_terms.push(mu_pow.clone() * exp_x.clone() * R::gamma_upper(m as u32 + 1, &x));
            mu_pow *= mu_r.clone();
        }
        let mut diff = R::zero();
        for (c, sign) in constants(law) {
            let a = R::one() / (beta_hat.clone() * alpha2.clone() * R::from_f64(c));
            let b = a.clone() * z.clone();
            let lambda = R::one() / mu_r.clone() - a.clone();
            let kernel = JKernel::new(a.clone(), b.clone(), lambda, n);
            let mut i_c = R::zero();
            for t in 0..=n {
                // −(−1)^t e^b J_{0,t}/t!
                let j = kernel.value(0, t) * b.exp() / fact[t].clone();
                if t % 2 == 0 {
                    i_c -= j;
                } else {
                    i_c += j;
                }
            }
            let minus_a = -a.clone();
            let mut pow = R::one();
            for m in 0..n {
                i_c += pow.clone() * u_terms[m].clone() * weights[m].clone();
                pow *= minus_a.clone();
            }
            if sign > 0.0 {
                diff += i_c;
            } else {
                diff -= i_c;
            }
        }
        total += coeff * diff / mu_r;
    }
    total
}

/// Reference ergodic rate by two-dimensional adaptive quadrature of
/// E[log₂(1 + SINR)] against the Erlang and hypoexponential densities,
/// absolute tolerance 1e-7.
pub fn ergodic_rate_quadrature(law: &SinrLaw) -> Result<f64> {
    ergodic_rate_quadrature_with(law, QuadOptions::absolute(1e-7))
}

pub fn ergodic_rate_quadrature_with(law: &SinrLaw, opts: QuadOptions) -> Result<f64> {
    if law.alpha == 0.0 {
        return Ok(0.0);
    }
    let erlang = law.erlang;
    let (x_breaks, x_scale) = density_breaks(erlang.mean(), erlang.variance().sqrt());
    let inner_opts = QuadOptions {
        abs_tol: opts.abs_tol * 1e-2,
        rel_tol: opts.rel_tol * 1e-2,
        max_intervals: opts.max_intervals,
    };
    let mut failure: Option<Error> = None;
    let mut inner = |y: f64| -> f64 {
        let f = |x: f64| {
            let g = law.sinr(x, y);
            g.ln_1p() / LN_2 * erlang_pdf(&erlang, x).unwrap_or(0.0)
        };
        match integrate_piecewise(f, &x_breaks, x_scale, inner_opts) {
            Ok(r) => r.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let Some(spectral) = &law.spectral else {
        let v = inner(0.0);
        return match failure {
            Some(e) => Err(e),
            None => Ok(v),
        };
    };
    let density = HypoexpDensity::new(spectral);
    let (y_breaks, y_scale) = density_breaks(law.y_mean(), law.y_variance().sqrt());
    let outer = integrate_piecewise(|y| inner(y) * density.pdf(y), &y_breaks, y_scale, opts);
    match (outer, failure) {
        (_, Some(e)) => Err(e),
        (r, None) => r.map(|r| r.value),
    }
}

/// Jensen lower bound log₂(1 + 1/(C + (Σd + 1/p_r)/((N−K)α²β̂))).
pub fn rate_lower_bound(law: &SinrLaw, profile: &FadingProfile) -> Result<f64> {
    if law.antennas == law.users {
        return Err(Error::Unsupported("the rate lower bound divides by N − K".into()));
    }
    if law.alpha == 0.0 {
        return Ok(0.0);
    }
    let trace: f64 = profile.aging_diagonal().iter().sum();
    let signal = law.dof() as f64 * law.alpha * law.alpha * law.beta_hat();
    let inv = law.c + (trace + 1.0 / law.p_r) / signal;
    Ok((1.0 / inv).ln_1p() / LN_2)
}

/// (1 − τ/T) Σ_k R_k over the home cell, with R_k supplied by `rate`.
/// Users with identical laws are evaluated once.
pub fn sum_spectral_efficiency(
    config: &SystemConfig,
    profile: &FadingProfile,
    mut rate: impl FnMut(usize, &SinrLaw) -> Result<f64>,
) -> Result<f64> {
    let prelog = config.prelog();
    if prelog <= 0.0 {
        return Ok(0.0);
    }
    let mut seen: Vec<(SinrLaw, f64)> = Vec::new();
    let mut total = 0.0;
    for k in 0..config.users {
        let law = super::law::sinr_law(config, profile, k)?;
        let r = match seen.iter().find(|(l, _)| *l == law) {
            Some((_, r)) => *r,
            None => {
                let r = rate(k, &law)?;
                seen.push((law, r));
                r
            }
        };
        total += r;
    }
    Ok(prelog * total)
}
