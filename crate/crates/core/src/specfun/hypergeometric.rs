use super::gamma::ln_gamma;
use super::quad::{density_breaks, integrate_piecewise, QuadOptions};
use super::real::Real;
use crate::{error::domain, Result};

/// Confluent hypergeometric function of the second kind,
/// U(a, b, z) = (1/Γ(a)) ∫₀^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt,
/// by adaptive quadrature after the substitution s = z t.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    tricomi_u_with(a, b, z, 1e-13)
}

pub fn tricomi_u_with(a: f64, b: f64, z: f64, rel_tol: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("tricomi_u requires a > 0, got {a}")));
    }
    if !(z > 0.0) || !z.is_finite() || !b.is_finite() {
        return Err(domain(format!("tricomi_u requires z > 0 and finite b, got b={b}, z={z}")));
    }
    let c = b - a - 1.0;
    // log of the integrand in s, e^{-s} s^{a-1} (1 + s/z)^c
    let log_f = move |s: f64| -s + (a - 1.0) * s.ln() + c * (s / z).ln_1p();

    // Locate the mode and curvature to place breakpoints.
    let big_b = a - 1.0 + c - z;
    let disc = big_b * big_b + 4.0 * (a - 1.0) * z;
    let mode = if disc >= 0.0 { 0.5 * (big_b + disc.sqrt()) } else { 0.0 };
    let mode = if mode > 0.0 { mode } else { 0.0 };
    let curv = if mode > 0.0 { (a - 1.0) / (mode * mode) + c / ((z + mode) * (z + mode)) } else { 0.0 };
    let spread = if curv > 0.0 { 1.0 / curv.sqrt() } else { (a + c.abs()).max(1.0) };
    let shift = if mode > 0.0 { log_f(mode) } else { 0.0 };

    let opts = QuadOptions { abs_tol: 0.0, rel_tol, max_intervals: 4000 };
    let integral = if a < 1.0 {
        // s = w^{1/a} removes the endpoint singularity: s^{a-1} ds = dw / a.
        let inv = 1.0 / a;
        let f = move |w: f64| {
            if w <= 0.0 {
                return (-shift).exp() / a;
            }
            let s = w.powf(inv);
            (-s + c * (s / z).ln_1p() - shift).exp() / a
        };
        let (breaks, _) = density_breaks(mode.max(spread).powf(a), spread.powf(a));
        integrate_piecewise(f, &breaks, spread.powf(a).max(1.0), opts)?
    } else {
        let f = move |s: f64| if s <= 0.0 { if a == 1.0 { (-shift).exp() } else { 0.0 } } else { (log_f(s) - shift).exp() };
        let (breaks, _) = density_breaks(mode, spread);
        integrate_piecewise(f, &breaks, spread, opts)?
    };
    Ok((integral.value.ln() + shift - a * z.ln() - ln_gamma(a)).exp())
}

/// Table of M_m(q) = ∫₀^∞ y^{q−1} (y+z)^m e^{−y/μ} dy = Γ(q) z^{q+m} U(q, q+m+1, z/μ)
/// for q = 1..=qmax and m = 0..=mmax, indexed `[m][q-1]`.
///
/// Built from M_0(q) = Γ(q) μ^q and the contiguous relation
/// M_m(q) = M_{m−1}(q+1) + z M_{m−1}(q); every term is positive.
pub fn u_moment_table<R: Real>(qmax: usize, mmax: usize, z: &R, mu: &R) -> Vec<Vec<R>> {
    let width = qmax + mmax;
    let mut row = Vec::with_capacity(width);
    let mut acc = mu.clone();
    for q in 1..=width {
        // Γ(q) μ^q
        row.push(acc.clone());
        acc = acc * mu.clone() * R::from_u64(q as u64);
    }
    let mut table = Vec::with_capacity(mmax + 1);
    table.push(row[..qmax].to_vec());
    for m in 1..=mmax {
        let next: Vec<R> = (0..width - m).map(|i| row[i + 1].clone() + z.clone() * row[i].clone()).collect();
        table.push(next[..qmax].to_vec());
        row = next;
    }
    table
}

/// U(a, a+m+1, x) for positive integers a and nonnegative m, exact finite sum.
pub fn tricomi_u_integer<R: Real>(a: usize, m: usize, x: &R) -> R {
    let one = R::one();
    let mu = one.clone() / x.clone();
    let table = u_moment_table(a, m, &one, &mu);
    let mut gamma_a = R::one();
    for i in 2..a {
        gamma_a *= R::from_u64(i as u64);
    }
    table[m][a - 1].clone() / gamma_a
}
