use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::sysmodel::{FadingProfile, SystemConfig};
use crate::{error::domain, Result};

static REDRAWS: AtomicU64 = AtomicU64::new(0);

/// Number of rank-deficient estimates rejected and redrawn so far in this
/// process.
pub fn redraw_count() -> u64 {
    REDRAWS.load(Ordering::Relaxed)
}

/// How the channel estimates at slot n−1 are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimateModel {
    /// Draw Ĝ_ll from its marginal law (entries CN(0, β̂_llk)) and impose
    /// the pilot-contamination structure Ĝ_li = Ĝ_ll D_i.
    #[default]
    Marginal,
    /// Simulate the true channels, the contaminated pilot observation and
    /// the MMSE filter, then age the true channels with the AR(1) model.
    FullTraining,
}

/// How the aging errors Ẽ_li[n] enter the SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AgingSampling {
    /// Full N×K error matrices.
    #[default]
    Explicit,
    /// Only the projections [Ĝ†]_k Ẽ_li, which are CN(0, ‖[Ĝ†]_k‖² d_lik)
    /// because Ẽ has i.i.d. entries independent of Ĝ. Same distribution,
    /// O(KL) instead of O(NKL) work.
    Projected,
}

/// One draw of the estimated channel at slot n−1 and the aging error at n,
/// seen from the home base station.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// Ĝ_ll[n−1], N×K.
    pub estimate_prev: DMatrix<Complex64>,
    /// Ĝ_li[n−1] for every source cell i (index l holds Ĝ_ll again).
    pub cross_estimates: Vec<DMatrix<Complex64>>,
    /// Ẽ_li[n] for every source cell; empty under projected sampling.
    pub aging_errors: Vec<DMatrix<Complex64>>,
    /// Ĝ_ll†, K×N.
    pub zf_rows: DMatrix<Complex64>,
    alpha: f64,
}

#[inline]
fn cn<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, variances: &[f64]) -> DMatrix<Complex64> {
    // Column-major fill: column k has variance variances[k].
    let mut data = Vec::with_capacity(rows * variances.len());
    for &v in variances {
        for _ in 0..rows {
            data.push(cn(rng, v));
        }
    }
    DMatrix::from_vec(rows, variances.len(), data)
}

/// Pseudo-inverse of a tall matrix via a thin QR factorisation,
/// G† = R^{−1} Q^H. `None` when G is numerically rank deficient.
pub(crate) fn pseudo_inverse(g: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let qr = g.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..r.nrows()).map(|i| r[(i, i)].norm()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min < 1e-12 * max {
        return None;
    }
    r.solve_upper_triangular(&qr.q().adjoint())
}

fn check(config: &SystemConfig, profile: &FadingProfile) -> Result<()> {
    if config.users != profile.users() || config.cells != profile.cells() {
        return Err(domain("configuration and profile dimensions differ"));
    }
    if config.antennas < config.users {
        return Err(domain("N ≥ K required for zero-forcing"));
    }
    Ok(())
}

/// Draws a realisation with estimates from their marginal law and explicit
/// aging-error matrices.
pub fn draw_realization<R: Rng + ?Sized>(config: &SystemConfig, profile: &FadingProfile, rng: &mut R) -> Result<ChannelRealization> {
    draw_with(config, profile, rng, AgingSampling::Explicit)
}

pub(crate) fn draw_with<R: Rng + ?Sized>(
    config: &SystemConfig,
    profile: &FadingProfile,
    rng: &mut R,
    aging: AgingSampling,
) -> Result<ChannelRealization> {
    check(config, profile)?;
    let (n, k_n, l_n, l) = (config.antennas, profile.users(), profile.cells(), profile.home());
    let variances: Vec<f64> = (0..k_n).map(|k| profile.beta_hat(l, l, k)).collect();
    let (estimate, zf) = loop {
        let g = gaussian_matrix(rng, n, &variances);
        match pseudo_inverse(&g) {
            Some(p) => break (g, p),
            None => {
                REDRAWS.fetch_add(1, Ordering::Relaxed);
            }
        }
    };
    let cross = (0..l_n)
        .map(|i| {
            let mut m = estimate.clone();
            for k in 0..k_n {
                let r = profile.ratio(i, k);
                m.column_mut(k).scale_mut(r);
            }
            m
        })
        .collect();
    let errors = match aging {
        AgingSampling::Explicit => (0..l_n)
            .map(|i| {
                let v: Vec<f64> = (0..k_n).map(|k| profile.aging_error(l, i, k)).collect();
                gaussian_matrix(rng, n, &v)
            })
            .collect(),
        AgingSampling::Projected => Vec::new(),
    };
    Ok(ChannelRealization {
        estimate_prev: estimate,
        cross_estimates: cross,
        aging_errors: errors,
        zf_rows: zf,
        alpha: profile.alpha(),
    })
}

/// Draws a realisation by simulating pilot training literally: true
/// channels at n−1, the contaminated pilot observation with noise at
/// training power p_tr, the MMSE filter, and the AR(1) step to slot n.
pub fn draw_realization_full_training<R: Rng + ?Sized>(
    config: &SystemConfig,
    profile: &FadingProfile,
    rng: &mut R,
) -> Result<ChannelRealization> {
    check(config, profile)?;
    let (n, k_n, l_n, l) = (config.antennas, profile.users(), profile.cells(), profile.home());
    let alpha = profile.alpha();
    let p_tr = profile.training_power();
    loop {
        let truth: Vec<DMatrix<Complex64>> = (0..l_n)
            .map(|i| {
                let v: Vec<f64> = (0..k_n).map(|k| profile.beta(l, i, k)).collect();
                gaussian_matrix(rng, n, &v)
            })
            .collect();
        // Despread pilot observation: Σ_j g_ljk + noise/√p_tr.
        let noise_var = if p_tr.is_finite() { 1.0 / p_tr } else { 0.0 };
        let mut observation = gaussian_matrix(rng, n, &vec![noise_var; k_n]);
        for g in &truth {
            observation += g;
        }
        let estimates: Vec<DMatrix<Complex64>> = (0..l_n)
            .map(|i| {
                let mut m = observation.clone();
                for k in 0..k_n {
                    let denom: f64 = (0..l_n).map(|j| profile.beta(l, j, k)).sum::<f64>() + noise_var;
                    m.column_mut(k).scale_mut(profile.beta(l, i, k) / denom);
                }
                m
            })
            .collect();
        let Some(zf) = pseudo_inverse(&estimates[l]) else {
            REDRAWS.fetch_add(1, Ordering::Relaxed);
            continue;
        };
        let innovation = (1.0 - alpha * alpha).max(0.0);
        let errors = (0..l_n)
            .map(|i| {
                let v: Vec<f64> = (0..k_n).map(|k| innovation * profile.beta(l, i, k)).collect();
                let w = gaussian_matrix(rng, n, &v);
                // g[n] − α ĝ[n−1] = α (g[n−1] − ĝ[n−1]) + √(1−α²) w
                (&truth[i] - &estimates[i]) * Complex64::from(alpha) + w
            })
            .collect();
        return Ok(ChannelRealization {
            estimate_prev: estimates[l].clone(),
            cross_estimates: estimates,
            aging_errors: errors,
            zf_rows: zf,
            alpha,
        });
    }
}

/// ZF SINR of user `k`:
/// α²p / (α²p Σ_{i≠l} ‖r Ĝ_li‖² + p Σ_i ‖r Ẽ_li‖² + ‖r‖²), r = [Ĝ†]_k.
pub fn instantaneous_sinr(real: &ChannelRealization, config: &SystemConfig, profile: &FadingProfile, k: usize) -> f64 {
    sinr_with::<rand_chacha::ChaCha8Rng>(real, config, profile, k, None)
}

pub(crate) fn sinr_with<R: Rng + ?Sized>(
    real: &ChannelRealization,
    config: &SystemConfig,
    profile: &FadingProfile,
    k: usize,
    projected_rng: Option<&mut R>,
) -> f64 {
    let alpha = real.alpha;
    if alpha == 0.0 {
        return 0.0;
    }
    let p = config.uplink_power;
    let l = profile.home();
    let row = real.zf_rows.row(k);
    let norm2 = row.norm_squared();
    let mut inter = 0.0;
    for (i, g) in real.cross_estimates.iter().enumerate() {
        if i != l {
            inter += (row * g).norm_squared();
        }
    }
    let err = match projected_rng {
        None => real.aging_errors.iter().map(|e| (row * e).norm_squared()).sum::<f64>(),
        Some(rng) => {
            let mut acc = 0.0;
            for i in 0..profile.cells() {
                for kk in 0..profile.users() {
                    let x: f64 = rng.sample(Exp1);
                    acc += profile.aging_error(l, i, kk) * x;
                }
            }
            norm2 * acc
        }
    };
    let a2p = alpha * alpha * p;
    a2p / (a2p * inter + p * err + norm2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_forcing_inverts_the_estimate() {
        let cfg = SystemConfig::reference(40, 0.9);
        let p = FadingProfile::symmetric(&cfg, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = draw_realization(&cfg, &p, &mut rng).unwrap();
        let prod = &r.zf_rows * &r.estimate_prev;
        let eye = DMatrix::<Complex64>::identity(10, 10);
        assert!((prod - eye).norm() < 1e-10);
    }

    #[test]
    fn sinr_stays_below_the_contamination_ceiling() {
        let cfg = SystemConfig::reference(30, 1.0);
        let p = FadingProfile::symmetric(&cfg, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let r = draw_realization(&cfg, &p, &mut rng).unwrap();
            for k in 0..10 {
                assert!(instantaneous_sinr(&r, &cfg, &p, k) < 1.0 / 0.06);
            }
        }
    }

    #[test]
    fn zero_alpha_gives_zero_sinr() {
        let cfg = SystemConfig::reference(30, 0.0);
        let p = FadingProfile::symmetric(&cfg, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = draw_realization(&cfg, &p, &mut rng).unwrap();
        assert_eq!(instantaneous_sinr(&r, &cfg, &p, 3), 0.0);
    }
}
