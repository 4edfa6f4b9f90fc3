//! The kernel J_{m,n}(a, b, α) = ∫₀^∞ y^m (ay+b)^n e^{−αy} Ei(−ay−b) dy.
//!
//! With v = ay + b and β = α/a the integral becomes
//! a^{−m−1} e^{βb} Σ_r C(m,r) (−b)^{m−r} K_{n+r}, where
//! K_j = ∫_b^∞ v^j e^{−βv} Ei(−v) dv. Integrating by parts gives
//!
//! K_j = j! [ e^{−βb} Ei(−b) T_j − Ei(−(1+β)b)/β^{j+1} + e^{−(1+β)b} V_j ]
//!
//! with T_j = T_{j−1}/β + b^j/(j! β), S_j = S_{j−1}/(1+β) + b^{j−1}/((j−1)!(1+β))
//! and V_j = V_{j−1}/β + S_j/(j β). β may be negative (as long as 1+β > 0);
//! near β = 0 the recursion is replaced by the Taylor series in β.

use super::real::{binomial_row, Real};
use crate::{error::domain, Result};

pub struct JKernel<R> {
    a: R,
    b: R,
    beta: R,
    k: Vec<R>,
    max_log2_term: f64,
}

impl<R: Real> JKernel<R> {
    /// Prepares K_0..=K_jmax for the given parameters (α may be ≤ 0 provided
    /// α + a > 0).
    pub fn new(a: R, b: R, alpha: R, jmax: usize) -> Self {
        let beta = alpha / a.clone();
        let mut kernel = JKernel {
            a,
            b,
            beta,
            k: Vec::with_capacity(jmax + 1),
            max_log2_term: f64::NEG_INFINITY,
        };
        let beta_f = kernel.beta.to_f64().abs();
        let reach = jmax as f64 + kernel.b.to_f64() + 1.0;
        if beta_f * reach < 0.05 {
            kernel.fill_series(jmax);
        } else {
            kernel.fill_recursion(jmax);
        }
        kernel
    }

    fn note(&mut self, x: &R) {
        self.max_log2_term = self.max_log2_term.max(x.log2_abs());
    }

    fn fill_recursion(&mut self, jmax: usize) {
        let b = self.b.clone();
        let beta = self.beta.clone();
        let one_beta = R::one() + beta.clone();
        let ei_b = (-b.clone()).ei();
        let ei_b2 = (-(one_beta.clone() * b.clone())).ei();
        let e1 = (-(beta.clone() * b.clone())).exp() * ei_b;
        let e2 = (-(one_beta.clone() * b.clone())).exp();
        let mut t = R::zero();
        let mut s = R::zero();
        let mut v = R::zero();
        let mut fact = R::one();
        // b^j / j!
        let mut bj = R::one();
        let mut inv_beta_pow = R::one() / beta.clone();
        for j in 0..=jmax {
            if j > 0 {
                fact *= R::from_u64(j as u64);
                let prev_bj = bj.clone();
                bj = bj * b.clone() / R::from_u64(j as u64);
                s = (s + prev_bj) / one_beta.clone();
                v = (v + s.clone() / R::from_u64(j as u64)) / beta.clone();
                inv_beta_pow /= beta.clone();
            }
            t = (t + bj.clone()) / beta.clone();
            let p1 = e1.clone() * t.clone();
            let p2 = ei_b2.clone() * inv_beta_pow.clone();
            let p3 = e2.clone() * v.clone();
            for x in [&p1, &p2, &p3] {
                let scaled = fact.clone() * x.clone();
                self.note(&scaled);
            }
            let kj = fact.clone() * (p1 - p2 + p3);
            self.k.push(kj);
        }
    }

    fn fill_series(&mut self, jmax: usize) {
        // K_j(β) = Σ_i (−β)^i / i! K⁰_{j+i}, K⁰_m = −[b^{m+1} Ei(−b) + Γ(m+1, b)]/(m+1)
        let b = self.b.clone();
        let ei_b = (-b.clone()).ei();
        let bits = R::bits() as f64;
        let mut k0: Vec<R> = Vec::new();
        let k0_at = |m: usize, k0: &mut Vec<R>| -> R {
            while k0.len() <= m {
                let mm = k0.len();
                let val = -(b.powi(mm as i32 + 1) * ei_b.clone() + R::gamma_upper(mm as u32 + 1, &b)) / R::from_u64(mm as u64 + 1);
                k0.push(val);
            }
            k0[m].clone()
        };
        let minus_beta = -self.beta.clone();
        for j in 0..=jmax {
            let mut sum = k0_at(j, &mut k0);
            self.max_log2_term = self.max_log2_term.max(sum.log2_abs());
            if !self.beta.is_zero() {
                let mut coef = R::one();
                for i in 1..100_000 {
                    coef = coef * minus_beta.clone() / R::from_u64(i as u64);
                    let term = coef.clone() * k0_at(j + i, &mut k0);
                    sum += term.clone();
                    if term.is_zero() || term.log2_abs() < sum.log2_abs() - bits - 8.0 {
                        break;
                    }
                }
            }
            self.k.push(sum);
        }
    }

    /// K_j for j ≤ jmax.
    pub fn k(&self, j: usize) -> &R {
        &self.k[j]
    }

    pub fn jmax(&self) -> usize {
        self.k.len() - 1
    }

    pub fn beta(&self) -> &R {
        &self.beta
    }

    /// log2 of the largest intermediate magnitude seen while building K.
    pub fn max_log2_term(&self) -> f64 {
        self.max_log2_term
    }

    /// J_{m,n}; requires m + n ≤ jmax.
    pub fn value(&self, m: usize, n: usize) -> R {
        let (v, _) = self.value_tracked(m, n);
        v
    }

    fn value_tracked(&self, m: usize, n: usize) -> (R, f64) {
        let binom = binomial_row::<R>(m);
        let minus_b = -self.b.clone();
        let mut sum = R::zero();
        let mut max_term = self.max_log2_term;
        let mut pow = R::one();
        // r runs from m down so that (−b)^{m−r} is built incrementally.
        for r in (0..=m).rev() {
            let term = binom[r].clone() * pow.clone() * self.k[n + r].clone();
            max_term = max_term.max(term.log2_abs());
            sum += term;
            pow *= minus_b.clone();
        }
        let pref = (self.beta.clone() * self.b.clone()).exp() / self.a.powi(m as i32 + 1);
        (pref * sum.clone(), max_term - sum.log2_abs())
    }
}

/// A J value together with its conditioning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JValue {
    pub value: f64,
    /// log2 of (largest intermediate term / result); the number of bits lost.
    pub bits_lost: f64,
    /// True when the result is below 1e-9 times the largest term, i.e. the
    /// double-precision value cannot be trusted.
    pub cancellation: bool,
}

fn check_args(a: f64, b: f64, alpha: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && alpha > 0.0) || !(a.is_finite() && b.is_finite() && alpha.is_finite()) {
        return Err(domain(format!("j_function needs positive finite a, b, alpha; got ({a}, {b}, {alpha})")));
    }
    Ok(())
}

/// J_{m,n}(a, b, α) in double precision, flagged when cancellation destroys
/// the result.
///
/// ```
/// use mimo_aging::specfun::{exp_integral_ei, j_function};
/// // J_{0,0} = (1/α)[Ei(−b) − e^{αb/a} Ei(−b − αb/a)]
/// let (a, b, al) = (0.5, 0.3, 1.2);
/// let want = (exp_integral_ei(-b).unwrap()
///     - (al * b / a).exp() * exp_integral_ei(-b - al * b / a).unwrap()) / al;
/// let j = j_function(0, 0, a, b, al).unwrap();
/// assert!((j.value - want).abs() < 1e-14 && !j.cancellation);
/// ```
pub fn j_function(m: usize, n: usize, a: f64, b: f64, alpha: f64) -> Result<JValue> {
    check_args(a, b, alpha)?;
    let kernel = JKernel::new(a, b, alpha, m + n);
    let (value, bits_lost) = kernel.value_tracked(m, n);
    let bits_lost = bits_lost.max(0.0);
    Ok(JValue {
        value,
        bits_lost,
        cancellation: !value.is_finite() || bits_lost > 1e9f64.log2(),
    })
}

/// The finite triple sum sometimes quoted for J, with (x)^s read as the
/// falling factorial. It agrees with the integral only for m = n = 0 and is
/// kept for comparison.
pub fn j_function_literal(m: usize, n: usize, a: f64, b: f64, alpha: f64) -> Result<f64> {
    use super::gamma::{binomial, factorial};
    check_args(a, b, alpha)?;
    let ff = |x: usize, s: usize| -> f64 { (0..s).map(|i| (x - i) as f64).product() };
    let ei_b = super::exp_integral_ei(-b)?;
    let ei_b2 = super::exp_integral_ei(-alpha * b / a - b)?;
    let mut total = 0.0;
    for r in 0..=m {
        let nr = n + r;
        let mut inner = 0.0;
        for s in 0..=nr {
            inner += ff(nr, s) * b.powi((nr - s) as i32) / (alpha.powi(s as i32 + 1) * a.powi(m as i32 - s as i32));
        }
        inner *= ei_b;
        inner -= ff(nr, nr) * (alpha * b / a).exp() / (alpha.powi(nr as i32 + 1) * a.powi(m as i32 - nr as i32)) * ei_b2;
        let mut tail = 0.0;
        for s in 0..nr {
            for u in 0..(nr - s) {
                tail += factorial(u) * ff(nr, s) * binomial(nr - s - 1, u) * b.powi((nr - s - u - 1) as i32)
                    / (alpha.powi(s as i32) * a.powi(m as i32 - s as i32) * (alpha / a + 1.0).powi(s as i32 + 1));
            }
        }
        inner += (-b).exp() / alpha * tail;
        total += binomial(m, r) * (-b).powi((m - r) as i32) * inner;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::real::{with_precision, Mp};

    fn forced(a: f64, b: f64, alpha: f64, jmax: usize, series: bool) -> JKernel<Mp> {
        let mut k = JKernel {
            a: Mp::from_f64(a),
            b: Mp::from_f64(b),
            beta: Mp::from_f64(alpha) / Mp::from_f64(a),
            k: Vec::new(),
            max_log2_term: f64::NEG_INFINITY,
        };
        if series {
            k.fill_series(jmax);
        } else {
            k.fill_recursion(jmax);
        }
        k
    }

    #[test]
    fn series_and_recursion_agree() {
        with_precision(256, || {
            for alpha in [0.2, 0.05, 0.01, -0.01, -0.05] {
                let s = forced(2.0, 0.4, alpha, 4, true);
                let r = forced(2.0, 0.4, alpha, 4, false);
                for j in 0..=4 {
                    let (x, y) = (s.k(j).to_f64(), r.k(j).to_f64());
                    assert!((x / y - 1.0).abs() < 1e-14, "alpha={alpha} j={j}: {x} vs {y}");
                }
            }
        });
    }

    #[test]
    fn zero_beta_series() {
        // K⁰_0 = −[b Ei(−b) + e^{−b}]
        let b = 0.7f64;
        let k = JKernel::new(1.0, b, 0.0, 0);
        let want = -(b * crate::specfun::exp_integral_ei(-b).unwrap() + (-b).exp());
        assert!((k.k(0) - want).abs() < 1e-15);
    }

    #[test]
    fn literal_sum_agrees_only_at_origin() {
        let (a, b, al) = (0.5, 0.3, 1.2);
        let lit = j_function_literal(0, 0, a, b, al).unwrap();
        let j = j_function(0, 0, a, b, al).unwrap().value;
        assert!((lit - j).abs() < 1e-14);
        let lit = j_function_literal(1, 2, a, b, al).unwrap();
        let j = j_function(1, 2, a, b, al).unwrap().value;
        assert!((lit - j).abs() > 1e-3 * j.abs());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(j_function(0, 0, 0.0, 1.0, 1.0).is_err());
        assert!(j_function(0, 0, 1.0, 1.0, -1.0).is_err());
    }
}
