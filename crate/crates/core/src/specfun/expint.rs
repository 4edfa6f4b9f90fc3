use crate::{error::domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral Ei(x) on the negative half-line, Ei(x) = −E1(−x).
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x.is_nan() || x >= 0.0 {
        return Err(domain(format!("exp_integral_ei is only defined here for x < 0, got {x}")));
    }
    Ok(-exp_integral_e1(-x))
}

/// E1(y) for y > 0: power series below 1, continued fraction above.
pub(crate) fn exp_integral_e1(y: f64) -> f64 {
    if y.is_infinite() {
        return 0.0;
    }
    if y <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -y / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return -EULER_GAMMA - y.ln() + sum;
    }
    // Modified Lentz on E1(y) = e^{-y} / (y + 1 - 1/(y + 3 - 4/(y + 5 - ...))).
    let tiny = 1e-300;
    let mut b = y + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-y).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let v = exp_integral_ei(-1.0).unwrap();
        assert!((v / -0.219_383_934_395_520_27 - 1.0).abs() < 1e-14);
        let v = exp_integral_ei(-0.1).unwrap();
        assert!((v / -1.822_923_958_419_390_7 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn positive_and_zero_arguments_fail() {
        assert!(exp_integral_ei(0.0).is_err());
        assert!(exp_integral_ei(2.0).is_err());
    }

    #[test]
    fn asymptotic_envelope() {
        let v = exp_integral_ei(-50.0).unwrap();
        assert!(v < 0.0 && v.abs() < (-50f64).exp() / 50.0 * 1.05);
    }
}
