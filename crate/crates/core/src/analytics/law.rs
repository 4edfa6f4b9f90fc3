use crate::specfun::{characteristic_coefficients, ErlangLaw, SpectralData};
use crate::sysmodel::{FadingProfile, SystemConfig};
use crate::{error::domain, Result};

/// Aging-error variances below this fraction of their β are treated as zero.
const ZERO_VARIANCE: f64 = 1e-14;

/// Distributional law of one user's ZF SINR.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrLaw {
    pub alpha: f64,
    pub p_r: f64,
    /// Law of X: shape N−K+1, scale β̂_llk.
    pub erlang: ErlangLaw,
    /// Law of Y; `None` when every aging-error variance vanishes.
    pub spectral: Option<SpectralData>,
    /// Pilot-contamination constant C.
    pub c: f64,
    pub antennas: usize,
    pub users: usize,
    /// The raw K·L aging-error variances (zeros included).
    pub diagonal: Vec<f64>,
}

impl SinrLaw {
    /// Y ≡ 0: perfect, fresh CSI without contamination.
    pub fn y_degenerate(&self) -> bool {
        self.spectral.is_none()
    }

    /// β̂_llk.
    pub fn beta_hat(&self) -> f64 {
        self.erlang.scale
    }

    /// N − K.
    pub fn dof(&self) -> usize {
        self.antennas - self.users
    }

    /// E[Y] = Σ d.
    pub fn y_mean(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    pub fn y_variance(&self) -> f64 {
        self.diagonal.iter().map(|d| d * d).sum()
    }

    /// The same law at another transmit power, holding the estimation gains
    /// fixed (the SINR's explicit dependence on p_r only).
    pub fn with_power(&self, p_r: f64) -> SinrLaw {
        SinrLaw { p_r, ..self.clone() }
    }

    /// The instantaneous SINR for given realisations of X and Y.
    #[inline]
    pub fn sinr(&self, x: f64, y: f64) -> f64 {
        let a2p = self.alpha * self.alpha * self.p_r;
        a2p * x / (a2p * self.c * x + self.p_r * y + 1.0)
    }
}

/// Assembles the SINR law of user `k` in the profile's home cell.
pub fn sinr_law(config: &SystemConfig, profile: &FadingProfile, k: usize) -> Result<SinrLaw> {
    if k >= profile.users() {
        return Err(domain(format!("user index {k} out of range (K = {})", profile.users())));
    }
    if config.antennas < config.users {
        return Err(domain(format!("N ≥ K required, got N = {}, K = {}", config.antennas, config.users)));
    }
    if config.users != profile.users() || config.cells != profile.cells() {
        return Err(domain("configuration and profile dimensions differ"));
    }
    let l = profile.home();
    let erlang = ErlangLaw::new((config.antennas - config.users + 1) as u32, profile.beta_hat(l, l, k))?;
    let mut diagonal = Vec::with_capacity(profile.cells() * profile.users());
    let mut nonzero = Vec::new();
    for i in 0..profile.cells() {
        for kk in 0..profile.users() {
            let d = profile.aging_error(l, i, kk);
            if d > ZERO_VARIANCE * profile.beta(l, i, kk) {
                diagonal.push(d);
                nonzero.push(d);
            } else {
                diagonal.push(0.0);
            }
        }
    }
    let spectral = if nonzero.is_empty() {
        None
    } else {
        Some(characteristic_coefficients(&nonzero)?)
    };
    Ok(SinrLaw {
        alpha: profile.alpha(),
        p_r: profile.uplink_power(),
        erlang,
        spectral,
        c: profile.interference_constant(k),
        antennas: config.antennas,
        users: config.users,
        diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::{build_profile_with_training, Aging, LargeScale};

    #[test]
    fn reference_scenario_has_two_eigenvalues() {
        let cfg = SystemConfig::reference(100, 0.9);
        let p = FadingProfile::symmetric(&cfg, 0.1).unwrap();
        let law = sinr_law(&cfg, &p, 0).unwrap();
        let s = law.spectral.as_ref().unwrap();
        assert_eq!(s.rho(), 2);
        assert_eq!(s.multiplicities, vec![10, 60]);
        assert_eq!(law.erlang.shape, 91);
    }

    #[test]
    fn zero_alpha_exposes_full_gains() {
        let cfg = SystemConfig::reference(20, 0.0);
        let p = FadingProfile::symmetric(&cfg, 0.1).unwrap();
        let law = sinr_law(&cfg, &p, 0).unwrap();
        assert_eq!(law.spectral.unwrap().eigenvalues, vec![1.0, 0.1]);
    }

    #[test]
    fn perfect_csi_single_cell_is_y_degenerate() {
        let cfg = SystemConfig::new(1, 4, 8, 4, 100, 1.0, Aging::Direct(1.0));
        let beta = LargeScale::from_fn(1, 4, |_, _, k| 0.37 + 0.1 * k as f64).unwrap();
        let p = build_profile_with_training(&cfg, &beta, f64::INFINITY).unwrap();
        assert!(sinr_law(&cfg, &p, 2).unwrap().y_degenerate());
    }
}
