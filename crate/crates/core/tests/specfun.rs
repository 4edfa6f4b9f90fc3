//! Special functions against independent oracles: arbitrary-precision
//! series, MPFR reference implementations, quadrature and Monte Carlo.

use mimo_aging::specfun::*;
use mimo_aging::stats::ks_one_sample;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma as GammaDist};
use rug::Float;

const BITS: u32 = 320;

fn mp(x: f64) -> Float {
    Float::with_val(BITS, x)
}

/// J0 by its power series Σ (−x²/4)^k/(k!)², summed in 320-bit arithmetic.
fn j0_series(x: f64) -> f64 {
    let q = -(mp(x) * mp(x)) / 4u32;
    let mut term = mp(1.0);
    let mut sum = mp(1.0);
    for k in 1..400u32 {
        term *= &q;
        term /= k * k;
        sum += &term;
        if term.clone().abs() < 1e-40 && k as f64 > x.abs() {
            break;
        }
    }
    sum.to_f64()
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(20240607)
}

#[test]
fn bessel_j0_examples() {
    assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    assert!((bessel_j0(1.0).unwrap() - j0_series(1.0)).abs() < 1e-15);
    assert!((bessel_j0(1.0).unwrap() - 0.7651976866).abs() < 1e-10);
    assert!(bessel_j0(2.4048255577).unwrap().abs() < 1e-8);
    assert!(bessel_j0(f64::NAN).is_err());
    assert!(bessel_j0(f64::INFINITY).is_err());
}

#[test]
fn bessel_zero_located_by_bisection_on_the_oracle() {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if j0_series(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - 2.4048255577).abs() < 1e-9);
    assert!(bessel_j0(lo).unwrap().abs() < 1e-12);
}

#[test]
fn bessel_j0_matches_series_oracle_on_random_points() {
    let mut r = rng();
    for _ in 0..100 {
        let x: f64 = r.random_range(-50.0..50.0);
        let err = (bessel_j0(x).unwrap() - j0_series(x)).abs();
        assert!(err < 1e-12, "x={x}: err {err}");
    }
}

#[test]
fn exp_integral_matches_mpfr_on_random_points() {
    let mut r = rng();
    for _ in 0..100 {
        let x = -10f64.powf(r.random_range(-6.0..2.8));
        let want = mp(x).eint().to_f64();
        let got = exp_integral_ei(x).unwrap();
        assert!(((got - want) / want).abs() < 1e-10, "x={x}: {got} vs {want}");
    }
}

#[test]
fn exp_integral_examples() {
    assert!((exp_integral_ei(-1.0).unwrap() + 0.2193839344).abs() < 1e-10);
    assert!((exp_integral_ei(-0.1).unwrap() + 1.8229239585).abs() < 1e-9);
    let v = exp_integral_ei(-50.0).unwrap();
    assert!(v < 0.0 && v.abs() < (-50f64).exp() / 50.0 * 1.05);
    assert!(exp_integral_ei(0.0).is_err() && exp_integral_ei(2.0).is_err());
}

#[test]
fn incomplete_gamma_matches_mpfr_on_random_points() {
    let mut r = rng();
    for _ in 0..100 {
        let a: f64 = r.random_range(0.05..40.0);
        let x: f64 = r.random_range(0.0..80.0);
        let want = mp(a).gamma_inc(&mp(x)).to_f64();
        let got = upper_incomplete_gamma(a, x).unwrap();
        assert!(((got - want) / want).abs() < 1e-10, "Γ({a},{x}): {got} vs {want}");
    }
}

#[test]
fn incomplete_gamma_recurrence_against_quadrature() {
    let (a, x) = (3.0, 2.0);
    let quad = |s: f64| adaptive_quad(|t| t.powf(s - 1.0) * (-t).exp(), Domain::SemiInfinite(x), 1e-11).unwrap();
    let lhs = upper_incomplete_gamma(a + 1.0, x).unwrap();
    let rhs = a * upper_incomplete_gamma(a, x).unwrap() + x.powf(a) * (-x).exp();
    assert!((lhs - rhs).abs() < 1e-12 * lhs);
    assert!((lhs - quad(a + 1.0)).abs() < 1e-12 * lhs);
    for x in [0.0, 0.3, 7.0] {
        assert!((upper_incomplete_gamma(1.0, x).unwrap() - (-x).exp()).abs() < 1e-15);
    }
    assert!((upper_incomplete_gamma(4.5, 0.0).unwrap() - gamma(4.5)).abs() < 1e-12 * gamma(4.5));
    assert!(upper_incomplete_gamma(0.0, 1.0).is_err());
}

#[test]
fn tricomi_u_identity_for_unit_a() {
    for b in 2..=8 {
        for z in [0.1, 1.0, 10.0] {
            let bf = b as f64;
            let want = z.exp() * z.powf(1.0 - bf) * upper_incomplete_gamma(bf - 1.0, z).unwrap();
            let got = tricomi_u(1.0, bf, z).unwrap();
            assert!(((got - want) / want).abs() < 1e-8, "U(1,{b},{z}): {got} vs {want}");
        }
    }
}

#[test]
fn tricomi_u_power_case_and_refinement_doubling() {
    for (a, z) in [(0.5f64, 2.0f64), (2.0, 0.3), (3.7, 5.0)] {
        let want = z.powf(-a);
        let got = tricomi_u(a, a + 1.0, z).unwrap();
        assert!(((got - want) / want).abs() < 1e-8);
    }
    let coarse = tricomi_u_with(2.0, 5.0, 1.5, 1e-10).unwrap();
    let fine = tricomi_u_with(2.0, 5.0, 1.5, 1e-13).unwrap();
    assert!(((coarse - fine) / fine).abs() < 1e-8);
    // Exact finite sum for integer parameters.
    let exact = tricomi_u_integer::<f64>(2, 2, &1.5);
    assert!(((fine - exact) / exact).abs() < 1e-12);
}

#[test]
fn j_function_against_extended_precision_and_quadrature() {
    let (m, n, a, b, al) = (1, 2, 0.5, 0.3, 1.2);
    let got = j_function(m, n, a, b, al).unwrap();
    assert!(got.value.is_finite() && !got.cancellation);
    let hi = with_precision(256, || {
        JKernel::new(Mp::from_f64(a), Mp::from_f64(b), Mp::from_f64(al), m + n).value(m, n).to_f64()
    });
    assert!(((got.value - hi) / hi).abs() < 1e-9);
    let integral = adaptive_quad(
        |y| y.powi(m as i32) * (a * y + b).powi(n as i32) * (-al * y).exp() * exp_integral_ei(-a * y - b).unwrap(),
        Domain::SemiInfinite(0.0),
        1e-14,
    )
    .unwrap();
    assert!(((got.value - integral) / integral).abs() < 1e-9, "{} vs {integral}", got.value);
}

#[test]
fn j_function_origin_two_term_form_by_two_routes() {
    let (a, b, al) = (0.7, 1.1, 0.4);
    let two_term =
        (exp_integral_ei(-b).unwrap() - (al * b / a).exp() * exp_integral_ei(-b - al * b / a).unwrap()) / al;
    assert!((j_function(0, 0, a, b, al).unwrap().value - two_term).abs() < 1e-13);
    assert!((j_function_literal(0, 0, a, b, al).unwrap() - two_term).abs() < 1e-13);
}

#[test]
fn characteristic_coefficient_examples() {
    let s = characteristic_coefficients(&[2.0, 2.0, 2.0]).unwrap();
    assert_eq!((s.rho(), s.eigenvalues[0], s.multiplicities[0]), (1, 2.0, 3));
    assert_eq!(s.char_coeffs[0], vec![0.0, 0.0, 1.0]);

    let s = characteristic_coefficients(&[1.0, 2.0]).unwrap();
    assert_eq!(s.eigenvalues, vec![2.0, 1.0]);
    assert!((s.char_coeffs[0][0] - 2.0).abs() < 1e-15 && (s.char_coeffs[1][0] + 1.0).abs() < 1e-15);
    for y in [0.0, 0.5, 3.0] {
        let want = (-y / 2.0).exp() - (-y).exp();
        assert!((hypoexp_pdf(&s, y).unwrap() - want).abs() < 1e-15);
    }
    assert!((hypoexp_mean(&s) - 3.0).abs() < 1e-15);
    assert!(hypoexp_pdf(&s, -1.0).is_err());

    let s = characteristic_coefficients(&[0.4]).unwrap();
    assert!((hypoexp_pdf(&s, 1.0).unwrap() - (-2.5f64).exp() / 0.4).abs() < 1e-15);
    assert!((hypoexp_mean(&s) - 0.4).abs() < 1e-15);
}

#[test]
fn three_three_one_against_monte_carlo() {
    let s = characteristic_coefficients(&[3.0, 3.0, 1.0]).unwrap();
    assert!((hypoexp_mean(&s) - 7.0).abs() < 1e-10);
    let (e3, e1) = (Exp::new(1.0 / 3.0).unwrap(), Exp::new(1.0).unwrap());
    let mut r = rng();
    let draws: Vec<f64> =
        (0..1_000_000).map(|_| e3.sample(&mut r) + e3.sample(&mut r) + e1.sample(&mut r)).collect();
    let d = ks_one_sample(&draws, |y| hypoexp_cdf(&s, y).unwrap());
    assert!(d < 0.005, "KS {d}");
    let mc_mean = draws.iter().sum::<f64>() / draws.len() as f64;
    assert!((mc_mean - 7.0).abs() < 0.02);
}

#[test]
fn density_of_four_entries_integrates_to_one() {
    let s = characteristic_coefficients(&[3.0, 3.0, 1.0, 0.5]).unwrap();
    let total = adaptive_quad(|y| hypoexp_pdf(&s, y).unwrap(), Domain::SemiInfinite(0.0), 1e-12).unwrap();
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn distinct_inputs_match_the_product_formula() {
    let mut r = rng();
    for _ in 0..50 {
        let len = r.random_range(2..8);
        let mut d: Vec<f64> = (0..len).map(|_| r.random_range(0.05..5.0)).collect();
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let s = characteristic_coefficients(&d).unwrap();
        assert!(s.is_distinct());
        for (p, &mp_) in s.eigenvalues.iter().enumerate() {
            let want: f64 = s
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != p)
                .map(|(_, &mq)| 1.0 / (1.0 - mq / mp_))
                .product();
            let got = s.char_coeffs[p][0];
            assert!(((got - want) / want).abs() < 1e-12, "{d:?}: {got} vs {want}");
        }
    }
}

#[test]
fn erlang_cdf_matches_quadrature_of_the_density() {
    let mut r = rng();
    for _ in 0..20 {
        let law = ErlangLaw::new(r.random_range(1..60), r.random_range(0.05..3.0)).unwrap();
        let x = r.random_range(0.0..2.0 * law.mean() + 1.0);
        let cdf = erlang_cdf(&law, x).unwrap();
        let quad = adaptive_quad(|t| erlang_pdf(&law, t).unwrap(), Domain::Finite(0.0, x), 1e-13).unwrap();
        assert!((cdf - quad).abs() < 1e-9, "{law:?} x={x}: {cdf} vs {quad}");
    }
}

#[test]
fn erlang_examples() {
    let law = ErlangLaw::new(1, 0.7).unwrap();
    assert!((erlang_pdf(&law, 0.4).unwrap() - (-0.4f64 / 0.7).exp() / 0.7).abs() < 1e-15);
    assert!(erlang_inverse_mean(&law).is_err());
    let law = ErlangLaw::new(11, 0.5882).unwrap();
    assert_eq!(erlang_cdf(&law, 0.0).unwrap(), 0.0);
    assert!((erlang_cdf(&law, 1e4).unwrap() - 1.0).abs() < 1e-15);
    let inv = erlang_inverse_mean(&law).unwrap();
    assert!((inv - 0.1700).abs() < 5e-5);
    let g = GammaDist::new(11.0, 0.5882).unwrap();
    let mut r = rng();
    let mc = (0..1_000_000).map(|_| 1.0 / g.sample(&mut r)).sum::<f64>() / 1e6;
    assert!((mc - inv).abs() < 1e-3 * inv, "{mc} vs {inv}");
    let total = adaptive_quad(|t| erlang_pdf(&law, t).unwrap(), Domain::SemiInfinite(0.0), 1e-13).unwrap();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn quadrature_examples() {
    let one = adaptive_quad(|x| (-x).exp(), Domain::SemiInfinite(0.0), 1e-12).unwrap();
    let two = adaptive_quad(|x| x * x * (-x).exp(), Domain::SemiInfinite(0.0), 1e-12).unwrap();
    assert!((one - 1.0).abs() < 1e-12 && (two - 2.0).abs() < 1e-12);
}

fn diagonal_strategy() -> impl Strategy<Value = Vec<f64>> {
    // Values drawn from a small pool so that repeats (multiplicities) occur.
    prop::collection::vec(prop_oneof![Just(0.06), Just(0.5), Just(1.3), 0.01f64..4.0], 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hypoexp_normalises_and_matches_the_trace(d in diagonal_strategy()) {
        let s = characteristic_coefficients(&d).unwrap();
        prop_assert_eq!(s.multiplicities.iter().sum::<usize>(), d.len());
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] > w[1]) && s.eigenvalues.iter().all(|&m| m > 0.0));
        let trace: f64 = d.iter().sum();
        prop_assert!((hypoexp_mean(&s) - trace).abs() < 1e-10 * trace.max(1.0));
        let dens = HypoexpDensity::new(&s);
        let sd = s.variance().sqrt();
        let (b, tail) = density_breaks(trace, sd);
        let total = integrate_piecewise(|y| dens.pdf(y), &b, tail, QuadOptions::absolute(1e-12)).unwrap().value;
        prop_assert!((total - 1.0).abs() < 1e-8, "∫pdf = {}", total);
    }

    #[test]
    fn j0_is_bounded_and_even(x in -200.0f64..200.0) {
        let v = bessel_j0(x).unwrap();
        prop_assert!(v.abs() <= 1.0);
        prop_assert_eq!(v, bessel_j0(-x).unwrap());
    }

    #[test]
    fn ei_is_negative_and_increasing_toward_zero(x in -300.0f64..-1e-8, f in 0.1f64..0.9) {
        let (a, b) = (exp_integral_ei(x).unwrap(), exp_integral_ei(x * f).unwrap());
        prop_assert!(a < 0.0 && b < a);
    }

    #[test]
    fn incomplete_gamma_recurrence(a in 0.2f64..30.0, x in 0.0f64..50.0) {
        let lhs = upper_incomplete_gamma(a + 1.0, x).unwrap();
        let rhs = a * upper_incomplete_gamma(a, x).unwrap() + x.powf(a) * (-x).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
    }

    #[test]
    fn erlang_cdf_is_monotone(shape in 1u32..80, scale in 0.01f64..5.0, x in 0.0f64..100.0, dx in 0.0f64..5.0) {
        let law = ErlangLaw::new(shape, scale).unwrap();
        let (a, b) = (erlang_cdf(&law, x).unwrap(), erlang_cdf(&law, x + dx).unwrap());
        prop_assert!((0.0..=1.0).contains(&a) && a <= b + 1e-15);
    }
}
