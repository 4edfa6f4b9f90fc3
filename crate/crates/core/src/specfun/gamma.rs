use crate::{error::domain, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(a) for a > 0.
pub fn ln_gamma(a: f64) -> f64 {
    if a < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * a).sin()).ln() - ln_gamma(1.0 - a);
    }
    if a == a.floor() && a <= 171.0 {
        return ln_factorial(a as usize - 1);
    }
    let x = a - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

pub fn gamma(a: f64) -> f64 {
    if a == a.floor() && a >= 1.0 && a <= 171.0 {
        return factorial(a as usize - 1);
    }
    ln_gamma(a).exp()
}

/// n! in double precision (overflows to infinity past 170!).
pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// ln n!, exact products below 20! and log-space sums above.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= 20 {
        return factorial(n).ln();
    }
    (21..=n).fold(factorial(20).ln(), |acc, i| acc + (i as f64).ln())
}

/// Binomial coefficient C(n, k) via log-space factorials above 20!.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 20 {
        return (factorial(n) / (factorial(k) * factorial(n - k))).round();
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

/// Upper incomplete gamma function Γ(a, x).
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("upper_incomplete_gamma requires a > 0, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("upper_incomplete_gamma requires x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(gamma(a));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let log_prefactor = a * x.ln() - x;
    if x < a + 1.0 {
        // Γ(a) − γ(a, x) with the lower function from its power series.
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..10_000 {
            term *= x / (a + n as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        let lower = (log_prefactor + sum.ln()).exp();
        return Ok(gamma(a) - lower);
    }
    // Lentz continued fraction for Γ(a, x) e^{x} x^{-a}.
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    Ok((log_prefactor + h.ln()).exp())
}
