//! Hypoexponential laws: sums of independent exponentials with possibly
//! repeated means, decomposed into partial fractions of the MGF
//! Π_p (1 − μ_p s)^{−τ_p} = Σ_p Σ_q X_{p,q} (1 − μ_p s)^{−q}.

use super::real::{factorial, with_precision, Mp, Real};
use crate::{error::domain, Result};

/// Relative tolerance under which diagonal entries are merged into one
/// eigenvalue.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Working precision for computing the coefficients themselves; they are
/// rounded to `f64` afterwards.
const COEFF_BITS: u32 = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// Distinct means μ_p in decreasing order.
    pub eigenvalues: Vec<f64>,
    /// Multiplicities τ_p.
    pub multiplicities: Vec<usize>,
    /// `char_coeffs[p][q-1]` is X_{p,q} for 1 ≤ q ≤ τ_p.
    pub char_coeffs: Vec<Vec<f64>>,
    source_len: usize,
    source_sum: f64,
}

impl SpectralData {
    /// Number of distinct eigenvalues ϱ.
    pub fn rho(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// Trace of the source diagonal (the mean of the law).
    pub fn trace(&self) -> f64 {
        self.source_sum
    }

    /// Σ τ_p μ_p²: the variance of the law.
    pub fn variance(&self) -> f64 {
        self.eigenvalues.iter().zip(&self.multiplicities).map(|(m, &t)| t as f64 * m * m).sum()
    }

    pub fn is_distinct(&self) -> bool {
        self.multiplicities.iter().all(|&t| t == 1)
    }

    /// The coefficients recomputed in the requested arithmetic.
    pub fn coefficients_in<R: Real>(&self) -> Vec<Vec<R>> {
        residue_coefficients(&self.eigenvalues, &self.multiplicities)
    }

    /// Σ |X_{p,q}|, a condition number for evaluating the partial fractions.
    pub fn coefficient_mass(&self) -> f64 {
        self.char_coeffs.iter().flatten().map(|x| x.abs()).sum()
    }

    /// Bits needed to evaluate partial-fraction sums to about 1e-19 relative.
    pub(crate) fn working_bits(&self) -> u32 {
        64 + self.coefficient_mass().max(1.0).log2().ceil() as u32
    }
}

/// Partial-fraction coefficients of a hypoexponential law with the given
/// diagonal of means.
///
/// ```
/// use mimo_aging::specfun::characteristic_coefficients;
/// let s = characteristic_coefficients(&[2.0, 1.0]).unwrap();
/// assert_eq!(s.eigenvalues, vec![2.0, 1.0]);
/// assert!((s.char_coeffs[0][0] - 2.0).abs() < 1e-15);
/// assert!((s.char_coeffs[1][0] + 1.0).abs() < 1e-15);
/// ```
pub fn characteristic_coefficients(diagonal: &[f64]) -> Result<SpectralData> {
    if diagonal.is_empty() {
        return Err(domain("characteristic_coefficients needs a nonempty diagonal"));
    }
    if let Some(bad) = diagonal.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(domain(format!("diagonal entries must be positive and finite, got {bad}")));
    }
    let mut sorted = diagonal.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut eigenvalues: Vec<f64> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    for d in sorted {
        match eigenvalues.last() {
            Some(&rep) if (rep - d).abs() <= MERGE_TOLERANCE * rep => *multiplicities.last_mut().unwrap() += 1,
            _ => {
                eigenvalues.push(d);
                multiplicities.push(1);
            }
        }
    }
    let char_coeffs = with_precision(COEFF_BITS, || {
        residue_coefficients::<Mp>(&eigenvalues, &multiplicities)
            .into_iter()
            .map(|row| row.iter().map(Real::to_f64).collect())
            .collect()
    });
    Ok(SpectralData {
        eigenvalues,
        multiplicities,
        char_coeffs,
        source_len: diagonal.len(),
        source_sum: diagonal.iter().sum(),
    })
}

/// Residue recursion on the logarithmic derivative.
///
/// Around the pole of μ_p, write u = 1 − μ_p s. The remaining factors are
/// G(u) = Π_{r≠p} c_r^{−τ_r} (1 + ρ_r u)^{−τ_r} with c_r = 1 − μ_r/μ_p and
/// ρ_r = μ_r/(μ_p − μ_r). Their Taylor coefficients obey
/// (j+1) g_{j+1} = Σ_{i≤j} h_i g_{j−i} with h_i = Σ_r τ_r (−1)^{i+1} ρ_r^{i+1},
/// and X_{p, τ_p − j} = g_j.
fn residue_coefficients<R: Real>(mu: &[f64], tau: &[usize]) -> Vec<Vec<R>> {
    let mut table = Vec::with_capacity(mu.len());
    for (p, (&mp, &tp)) in mu.iter().zip(tau).enumerate() {
        let mu_p = R::from_f64(mp);
        let mut g0 = R::one();
        let mut rhos = Vec::new();
        for (r, (&mr, &tr)) in mu.iter().zip(tau).enumerate() {
            if r == p {
                continue;
            }
            let mu_r = R::from_f64(mr);
            let c = R::one() - mu_r.clone() / mu_p.clone();
            g0 /= c.powi(tr as i32);
            rhos.push((mu_r.clone() / (mu_p.clone() - mu_r), tr));
        }
        // h_i for i = 0..tp-2
        let mut h = Vec::with_capacity(tp.saturating_sub(1));
        let mut powers: Vec<R> = rhos.iter().map(|(rho, _)| rho.clone()).collect();
        for i in 0..tp.saturating_sub(1) {
            let mut hi = R::zero();
            for (k, (rho, tr)) in rhos.iter().enumerate() {
                hi += powers[k].clone() * R::from_u64(*tr as u64);
                powers[k] *= rho.clone();
            }
            h.push(if i % 2 == 0 { -hi } else { hi });
        }
        let mut g = vec![g0];
        for j in 0..tp.saturating_sub(1) {
            let mut acc = R::zero();
            for i in 0..=j {
                acc += h[i].clone() * g[j - i].clone();
            }
            g.push(acc / R::from_u64(j as u64 + 1));
        }
        // X_{p,q} = g_{τ_p − q}
        table.push((1..=tp).map(|q| g[tp - q].clone()).collect());
    }
    table
}

/// Partial-fraction evaluator for the density and distribution function.
///
/// Repeated eigenvalues that sit close together produce coefficients of
/// large magnitude and alternating sign, so the sums are evaluated in MPFR
/// at a precision matched to the coefficient mass whenever `f64` would lose
/// more than a few digits.
pub struct HypoexpDensity {
    eigenvalues: Vec<f64>,
    coeffs_f64: Vec<Vec<f64>>,
    coeffs_mp: Option<(u32, Vec<Vec<Mp>>)>,
}

impl HypoexpDensity {
    pub fn new(spec: &SpectralData) -> Self {
        let coeffs_mp = if spec.coefficient_mass() > 1e3 {
            let bits = spec.working_bits();
            Some((bits, with_precision(bits, || spec.coefficients_in::<Mp>())))
        } else {
            None
        };
        HypoexpDensity {
            eigenvalues: spec.eigenvalues.clone(),
            coeffs_f64: spec.char_coeffs.clone(),
            coeffs_mp,
        }
    }

    fn pdf_in<R: Real>(&self, coeffs: &[Vec<R>], y: f64) -> R {
        let mut total = R::zero();
        for (mu, row) in self.eigenvalues.iter().zip(coeffs) {
            let inv = R::one() / R::from_f64(*mu);
            let u = R::from_f64(y) * inv.clone();
            // term_q = u^{q-1} e^{-u} / ((q-1)! μ)
            let mut term = (-u.clone()).exp() * inv;
            for (q, x) in row.iter().enumerate() {
                if q > 0 {
                    term = term * u.clone() / R::from_u64(q as u64);
                }
                total += x.clone() * term.clone();
            }
        }
        total
    }

    fn survival_in<R: Real>(&self, coeffs: &[Vec<R>], y: f64) -> R {
        // P(Y > y) = Σ X_{p,q} e^{-u} Σ_{k<q} u^k/k!
        let mut total = R::zero();
        for (mu, row) in self.eigenvalues.iter().zip(coeffs) {
            let u = R::from_f64(y) / R::from_f64(*mu);
            let mut term = (-u.clone()).exp();
            let mut partial = term.clone();
            for (q, x) in row.iter().enumerate() {
                if q > 0 {
                    term = term * u.clone() / R::from_u64(q as u64);
                    partial += term.clone();
                }
                total += x.clone() * partial.clone();
            }
        }
        total
    }

    pub fn pdf(&self, y: f64) -> f64 {
        let v = match &self.coeffs_mp {
            Some((bits, c)) => with_precision(*bits, || self.pdf_in(c, y).to_f64()),
            None => self.pdf_in(&self.coeffs_f64, y),
        };
        v.max(0.0)
    }

    pub fn survival(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 1.0;
        }
        let v = match &self.coeffs_mp {
            Some((bits, c)) => with_precision(*bits, || self.survival_in(c, y).to_f64()),
            None => self.survival_in(&self.coeffs_f64, y),
        };
        v.clamp(0.0, 1.0)
    }

    pub fn cdf(&self, y: f64) -> f64 {
        1.0 - self.survival(y)
    }
}

pub fn hypoexp_pdf(spec: &SpectralData, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(domain(format!("hypoexponential density requires y ≥ 0, got {y}")));
    }
    Ok(HypoexpDensity::new(spec).pdf(y))
}

pub fn hypoexp_cdf(spec: &SpectralData, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(domain(format!("hypoexponential CDF requires y ≥ 0, got {y}")));
    }
    Ok(HypoexpDensity::new(spec).cdf(y))
}

/// Σ_p Σ_q X_{p,q} q μ_p, evaluated at a precision that absorbs the
/// cancellation between coefficients; equals the trace of the diagonal.
pub fn hypoexp_mean(spec: &SpectralData) -> f64 {
    let bits = spec.working_bits().max(128);
    with_precision(bits, || {
        let coeffs = spec.coefficients_in::<Mp>();
        let mut total = Mp::zero();
        for (mu, row) in spec.eigenvalues.iter().zip(&coeffs) {
            for (q, x) in row.iter().enumerate() {
                total += x.clone() * Mp::from_u64(q as u64 + 1) * Mp::from_f64(*mu);
            }
        }
        total.to_f64()
    })
}

/// The `q`-th Gamma component density μ^{−q} y^{q−1} e^{−y/μ}/(q−1)!.
pub fn gamma_component<R: Real>(mu: f64, q: usize, y: &R) -> R {
    let mu = R::from_f64(mu);
    let u = y.clone() / mu.clone();
    u.powi(q as i32 - 1) * (-u).exp() / (factorial::<R>(q - 1) * mu)
}
