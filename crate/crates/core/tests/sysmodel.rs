use mimo_aging::simulator::draw_realization_full_training;
use mimo_aging::specfun::bessel_j0;
use mimo_aging::sysmodel::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn mobility_examples() {
    assert_eq!(alpha_from_mobility(0.0, 2e9, 1e-3).unwrap(), 1.0);
    // f_D = 200 Hz at 30 m/s and 2 GHz.
    let a = alpha_from_mobility(30.0, 2e9, 1e-3).unwrap();
    assert!((a - bessel_j0(2.0 * std::f64::consts::PI * 0.2).unwrap()).abs() < 1e-15);
    // Argument at the first Bessel zero.
    let v = 2.4048255577 * SPEED_OF_LIGHT / (2.0 * std::f64::consts::PI * 2e9 * 1e-3);
    assert!(alpha_from_mobility(v, 2e9, 1e-3).unwrap().abs() < 1e-8);
    assert!(alpha_from_mobility(-1.0, 2e9, 1e-3).is_err());
    assert!(alpha_from_mobility(1.0, 0.0, 1e-3).is_err());
}

#[test]
fn reference_profile_constants() {
    let cfg = SystemConfig::reference(100, 0.9);
    let p = FadingProfile::symmetric(&cfg, 0.1).unwrap();
    assert_eq!(cfg.training_power(), 10.0);
    assert!((p.interference_constant(3) - 0.06).abs() < 1e-15);
    assert!((p.beta_hat(0, 0, 0) - 0.5882).abs() < 1e-4);
    assert!((p.ratio(2, 0) - 0.1).abs() < 1e-15);
    let diag = p.aging_diagonal();
    let mut distinct = diag.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    assert_eq!(distinct.len(), 2);
    assert_eq!(diag.iter().filter(|&&d| d == distinct[1]).count(), 10);
    assert_eq!(diag.iter().filter(|&&d| d == distinct[0]).count(), 60);
}

#[test]
fn perfect_estimation_limit() {
    let cfg = SystemConfig::new(1, 3, 8, 3, 100, 1.0, Aging::Direct(1.0));
    let beta = LargeScale::symmetric(1, 3, 0.0).unwrap();
    let p = build_profile_with_training(&cfg, &beta, f64::INFINITY).unwrap();
    assert_eq!(p.beta_hat(0, 0, 1), 1.0);
    assert_eq!(p.aging_error(0, 0, 1), 0.0);
    assert_eq!(p.interference_constant(0), 0.0);
    let p = build_profile_with_training(&cfg, &beta, 1e12).unwrap();
    assert!((p.beta_hat(0, 0, 1) - 1.0).abs() < 1e-11);
}

#[test]
fn estimate_variance_matches_the_mmse_gain() {
    // Empirical variance of the simulated MMSE estimate, per antenna.
    let cfg = SystemConfig::reference(64, 0.9);
    let p = FadingProfile::symmetric(&cfg, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut sum, mut count) = (0.0, 0usize);
    for _ in 0..100 {
        let r = draw_realization_full_training(&cfg, &p, &mut rng).unwrap();
        sum += r.estimate_prev.iter().map(|z| z.norm_sqr()).sum::<f64>();
        count += r.estimate_prev.len();
    }
    let v = sum / count as f64;
    assert!((v / p.beta_hat(0, 0, 0) - 1.0).abs() < 0.01, "{v}");
}

#[test]
fn validation_examples() {
    let ok = SystemConfig::new(7, 10, 100, 10, 200, 1.0, Aging::Direct(0.9));
    assert!(validate(&ok, None).is_empty());
    let few = SystemConfig::new(7, 10, 5, 10, 200, 1.0, Aging::Direct(0.9));
    assert!(validate(&few, None).iter().any(|v| v.message.contains("N ≥ K")));
    let short = SystemConfig::new(7, 10, 100, 5, 200, 1.0, Aging::Direct(0.9));
    assert!(validate(&short, None).iter().any(|v| v.message.contains("τ ≥ K")));
    let long = SystemConfig::new(7, 10, 100, 300, 200, 1.0, Aging::Direct(0.9));
    assert!(validate(&long, None).iter().any(|v| v.message.contains("τ ≤ T")));
    let square = SystemConfig::new(7, 10, 10, 10, 200, 1.0, Aging::Direct(0.9));
    let v = validate(&square, None);
    assert!(is_valid(&v) && v.iter().any(|v| v.severity == Severity::Warning && v.message.contains("degenerate")));
    assert!(!is_valid(&validate(&ok.with_alpha(1.5), None)));
    assert!(!is_valid(&validate(&ok.with_power(0.0), None)));
}

#[test]
fn profile_construction_errors() {
    let cfg = SystemConfig::reference(100, 0.9);
    assert!(LargeScale::new(7, 10, vec![1.0; 5]).is_err());
    assert!(LargeScale::new(1, 2, vec![1.0, -0.5]).is_err());
    let wrong = LargeScale::symmetric(3, 10, 0.1).unwrap();
    assert!(build_profile(&cfg, &wrong).is_err());
    assert!(FadingProfile::symmetric(&cfg, 0.1).unwrap().with_home(7).is_err());
}

fn scenario() -> impl Strategy<Value = (SystemConfig, LargeScale)> {
    (1usize..5, 1usize..5, 0usize..20, 0usize..3, -1.0f64..=1.0, -20.0f64..30.0).prop_flat_map(
        |(cells, users, extra, pilot_extra, alpha, snr)| {
            let cfg = SystemConfig::new(
                cells,
                users,
                users + extra,
                users + pilot_extra,
                200,
                10f64.powf(snr / 10.0),
                Aging::Direct(alpha),
            );
            prop::collection::vec(1e-3f64..2.0, cells * cells * users)
                .prop_map(move |v| (cfg.clone(), LargeScale::new(cells, users, v).unwrap()))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn derived_constants_respect_their_invariants((cfg, beta) in scenario()) {
        let p = build_profile(&cfg, &beta).unwrap();
        prop_assert!(is_valid(&validate(&cfg, Some(&p))));
        for l in 0..p.cells() {
            for i in 0..p.cells() {
                for k in 0..p.users() {
                    let (b, bh) = (p.beta(l, i, k), p.beta_hat(l, i, k));
                    prop_assert!(bh > 0.0 && bh <= b);
                    prop_assert!(p.aging_error(l, i, k) >= 0.0);
                }
            }
        }
        for k in 0..p.users() {
            let c = p.interference_constant(k);
            prop_assert!(c >= 0.0 && ((c == 0.0) == (p.cells() == 1)));
        }
    }

    #[test]
    fn estimate_gain_grows_with_training_power((cfg, beta) in scenario(), boost in 1.0f64..100.0) {
        let lo = build_profile_with_training(&cfg, &beta, cfg.training_power()).unwrap();
        let hi = build_profile_with_training(&cfg, &beta, cfg.training_power() * boost).unwrap();
        for i in 0..lo.cells() {
            for k in 0..lo.users() {
                prop_assert!(hi.beta_hat(0, i, k) >= lo.beta_hat(0, i, k));
                prop_assert!(hi.beta_hat(0, i, k) <= hi.beta(0, i, k));
            }
        }
    }

    #[test]
    fn aging_error_endpoints((cfg, beta) in scenario()) {
        let still = build_profile(&cfg.with_alpha(1.0), &beta).unwrap();
        let lost = build_profile(&cfg.with_alpha(0.0), &beta).unwrap();
        for i in 0..still.cells() {
            for k in 0..still.users() {
                let (b, bh) = (still.beta(0, i, k), still.beta_hat(0, i, k));
                prop_assert!((still.aging_error(0, i, k) - (b - bh)).abs() <= 1e-15 * b);
                prop_assert_eq!(lost.aging_error(0, i, k), b);
            }
        }
    }

    #[test]
    fn mobility_alpha_is_a_valid_correlation(v in 0.0f64..150.0, fc in 1e8f64..6e9, ts in 1e-5f64..1e-2) {
        let a = alpha_from_mobility(v, fc, ts).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a));
    }
}
