use std::f64::consts::PI;

use crate::{error::domain, Result};

/// Bessel function of the first kind, order zero.
///
/// Uses the trapezoid rule on J0(x) = (1/π)∫₀^π cos(x sin θ) dθ, whose periodic
/// integrand makes the rule converge geometrically once the node count exceeds
/// |x|/2 (the aliasing error is 2·J_{2M}(x), which needs a margin of order
/// |x|^{1/3} past the turning point); large arguments use the Hankel
/// asymptotic expansion.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("bessel_j0 requires a finite argument"));
    }
    let ax = x.abs();
    if ax > 2000.0 {
        return Ok(hankel_j0(ax));
    }
    let m = nodes(ax);
    let mut sum = 0.0;
    for j in 0..m {
        sum += (ax * (PI * j as f64 / m as f64).sin()).cos();
    }
    Ok(sum / m as f64)
}

fn nodes(ax: f64) -> usize {
    ((ax + 20.0 * ax.cbrt() + 30.0) / 2.0).ceil() as usize
}

fn hankel_j0(x: f64) -> f64 {
    // t_k = a_k(0) / x^k with a_k the Hankel coefficients; P takes the even
    // terms, Q the odd ones, both with alternating signs.
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0f64;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        let next = t * (-odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > t.abs() {
            break;
        }
        t = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
        if t.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!((bessel_j0(1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j0(-1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!(bessel_j0(f64::NAN).is_err());
    }

    #[test]
    fn asymptotic_branch_matches_trapezoid() {
        let x = 2000.0;
        let m = nodes(x);
        let trap: f64 = (0..m).map(|j| (x * (PI * j as f64 / m as f64).sin()).cos()).sum::<f64>() / m as f64;
        assert!((hankel_j0(x) - trap).abs() < 1e-12, "{} vs {trap}", hankel_j0(x));
    }
}
