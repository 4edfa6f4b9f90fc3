use std::io::Write;
use std::process::{Command, Output};

use mimo_aging_cli::csv::read_rows;

fn bin(threads: usize, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mimo-aging"))
        .args(args)
        .env("MIMO_AGING_THREADS", threads.to_string())
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> &[u8] {
    assert!(out.status.success(), "exit {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    &out.stdout
}

#[test]
fn figure_one_is_byte_identical_across_thread_counts() {
    let args = ["figure", "1", "--methods", "bound,mc", "--trials", "200", "--seed", "7"];
    let one = bin(1, &args);
    let three = bin(3, &args);
    assert_eq!(ok(&one), ok(&three));
    let rows = read_rows(&one.stdout[..]).unwrap();
    // 16 SNR points × 3 antenna counts × 2 methods
    assert_eq!(rows.len(), 96);
    for r in &rows {
        assert_eq!(r.stderr.is_some(), r.method.starts_with("mc"), "{r:?}");
        assert!(r.elapsed_ms.is_none());
        assert!(r.value > 0.0);
    }
}

#[test]
fn figure_five_is_byte_identical_across_thread_counts() {
    let args = ["figure", "5", "--trials", "2000", "--seed", "3"];
    let a = bin(1, &args);
    let b = bin(4, &args);
    assert_eq!(ok(&a), ok(&b));
    let rows = read_rows(&a.stdout[..]).unwrap();
    // 11 SNR points × 2 α × 2 methods × 2 thresholds
    assert_eq!(rows.len(), 88);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.value)));
    assert!(rows.iter().any(|r| r.method == "exact[alpha=0.9;gamma_th=3]"));
}

#[test]
fn seed_changes_only_the_monte_carlo_rows() {
    let run = |seed: &str| {
        let out = bin(2, &["rate", "--antennas", "20", "--trials", "500", "--seed", seed]);
        read_rows(ok(&out)).unwrap()
    };
    let (a, b, c) = (run("1"), run("1"), run("2"));
    assert_eq!(a, b);
    assert_eq!(a[0], c[0]);
    assert_ne!(a[2].value, c[2].value);
}

#[test]
fn timing_column_is_filled_on_request() {
    let out = bin(1, &["rate", "--methods", "bound", "--timing"]);
    let rows = read_rows(ok(&out)).unwrap();
    assert!(rows[0].elapsed_ms.unwrap() >= 0.0);
}

#[test]
fn out_flag_writes_a_file_and_summarises_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.csv");
    let out = bin(1, &["outage", "--methods", "exact", "--gamma-th", "2", "--out", path.to_str().unwrap()]);
    let summary = String::from_utf8(ok(&out).to_vec()).unwrap();
    assert!(summary.contains("outage: 1 rows"), "{summary}");
    let rows = read_rows(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows[0].method, "exact[gamma_th=2]");
    assert!((rows[0].value - 0.005451336960244707).abs() < 1e-12);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "[system]\nantennas = 30\nuplink_power_db = 10\nalpha = 0.8\n[fading]\ncross_gain = 0.2").unwrap();
    let p = f.path().to_str().unwrap();
    let base = read_rows(ok(&bin(1, &["rate", "--config", p, "--methods", "exact"]))).unwrap();
    assert_eq!(base[0].sweep_value, 10.0);
    let over = read_rows(ok(&bin(1, &["rate", "--config", p, "--methods", "exact", "--antennas", "60"]))).unwrap();
    assert!(over[0].value > base[0].value);
}

#[test]
fn bad_configs_fail_with_useful_messages() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "[system]\nantennas = 30\n\nantenas = 3").unwrap();
    let out = bin(1, &["rate", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("antenas") && err.contains("line 4"), "{err}");

    let out = bin(1, &["validate", "--antennas", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("N ≥ K violated"));
}

#[test]
fn validate_reports_mobility_alpha() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "[system]\nantennas = 100\nvelocity = 30\ncarrier_hz = 2e9\nsample_period = 1e-4").unwrap();
    let out = bin(1, &["validate", "--config", f.path().to_str().unwrap()]);
    let text = String::from_utf8(ok(&out).to_vec()).unwrap();
    // J0(x) = Σ (−x²/4)^m / (m!)², x = 2π · 30 · 2e9 / c · 1e-4, c = 3e8
    let x = 2.0 * std::f64::consts::PI * 30.0 * 2e9 / 3e8 * 1e-4;
    let (mut term, mut want) = (1.0f64, 1.0f64);
    for m in 1..20 {
        term *= -x * x / 4.0 / (m * m) as f64;
        want += term;
    }
    let line = text.lines().find(|l| l.starts_with("alpha = ")).unwrap();
    let a: f64 = line[8..].split_whitespace().next().unwrap().parse().unwrap();
    assert!((a - want).abs() < 1e-12, "{line} vs {want}");
    assert!(text.contains("pre-log factor = 0.95"));
}

#[test]
fn infeasible_target_exits_nonzero() {
    let out = bin(1, &["required-power", "--alpha", "0.7", "--antennas", "50", "--methods", "bound"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
    let out = bin(1, &["required-power", "--alpha", "0.9", "--antennas", "200", "--methods", "bound"]);
    let rows = read_rows(ok(&out)).unwrap();
    assert!(rows[0].value < 0.0);
}

#[test]
fn unsupported_method_is_rejected() {
    let out = bin(1, &["rate", "--methods", "literal"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin(1, &["rate", "--methods", "bogus"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown method"));
}

#[test]
fn sweep_from_flags() {
    let out = bin(1, &["sweep", "--axis", "alpha", "--from", "0.5", "--to", "0.7", "--step", "0.1", "--methods", "bound", "--metric", "rate"]);
    let rows = read_rows(ok(&out)).unwrap();
    let xs: Vec<f64> = rows.iter().map(|r| r.sweep_value).collect();
    assert_eq!(xs, [0.5, 0.6, 0.7]);
    assert!(rows.windows(2).all(|w| w[1].value > w[0].value));
}
