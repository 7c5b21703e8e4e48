use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use mwave::sphere::sphere_kernel_series;
use mwave::SymbolFunction;
use mwave_cli::RunConfig;

fn mwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwave"))
        .args(args)
        .env("MWAVE_THREADS", "2")
        .output()
        .expect("spawn mwave")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a rendered CSV, skipping the header and `#` lines.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn trailer<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

#[test]
fn sphere_kernel_rows_match_series() {
    let o = mwave(&["kernel", "--manifold", "sphere2", "--symbol", "mexican:1", "--t", "0.1", "--theta", "0:pi:512"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# mwave kernel v"));
    let data = rows(&text);
    assert_eq!(data.len(), 512);
    let f = SymbolFunction::mexican(1);
    for row in data.iter().step_by(37) {
        let theta: f64 = row[1].parse().unwrap();
        let value: f64 = row[2].parse().unwrap();
        let expect = 4.0 * PI * sphere_kernel_series(&f, 0.1, theta.cos(), 2, 400).unwrap();
        assert!((value - expect).abs() <= 1e-10 * expect.abs().max(1.0), "θ={theta}");
    }
    let last: f64 = data[511][1].parse().unwrap();
    assert!((last - PI).abs() < 1e-15);
}

#[test]
fn validate_ht_approx_passes() {
    let o = mwave(&["validate", "--target", "ht-approx", "--t", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let err: f64 = trailer(&stdout(&o), "max_abs_err").unwrap().parse().unwrap();
    assert!(err <= 9.5e-4, "{err}");
}

#[test]
fn validate_exit_two_on_tight_tolerance() {
    let o = mwave(&["validate", "--target", "ht-approx", "--t", "0.1", "--tolerance", "1e-6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stdout.is_empty());
}

#[test]
fn torus_value_at_eighth() {
    let o = mwave(&[
        "kernel", "--manifold", "torus2", "--symbol", "paper-torus", "--t", "0.125", "--point", "0,0", "--report", "t2pi",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let data = rows(&stdout(&o));
    assert_eq!(data.len(), 1);
    let v: f64 = data[0][3].parse().unwrap();
    assert!((v - 1.0).abs() <= 1e-4, "{v}");
}

#[test]
fn gauss_only_in_kernel_and_validate() {
    let o = mwave(&["kernel", "--manifold", "sphere2", "--symbol", "gauss", "--t", "0.5", "--theta", "0:pi:8"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    std::fs::write(&input, "m1,coefficient\n1,1.0\n").unwrap();
    for cmd in ["cwt", "reconstruct"] {
        let mut args = vec![cmd, "--symbol", "gauss", "--input", input.to_str().unwrap()];
        if cmd == "cwt" {
            args.extend(["--t", "0.1"]);
        }
        let o = mwave(&args);
        assert_eq!(o.status.code(), Some(1), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("--symbol"));
    }
}

#[test]
fn usage_errors_exit_one_and_name_the_flag() {
    let o = mwave(&["kernel", "--bogus", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--bogus"));

    let o = mwave(&["kernel", "--manifold", "klein", "--t", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("manifold"));

    let o = mwave(&["kernel", "--manifold", "sphere2", "--t", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--t"));

    let o = mwave(&["kernel", "--manifold", "torus2"]);
    assert_eq!(o.status.code(), Some(1));

    assert_eq!(mwave(&["--help"]).status.code(), Some(0));
    assert_eq!(mwave(&["--version"]).status.code(), Some(0));
}

#[test]
fn config_file_rejects_unknown_and_misplaced_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "manifold=sphere2\nfrobnicate=3\n").unwrap();
    let o = mwave(&["kernel", "--config", cfg.to_str().unwrap(), "--t", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("frobnicate"));

    std::fs::write(&cfg, "target=ht-approx\n").unwrap();
    let o = mwave(&["kernel", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("target"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sphere run\nmanifold=sphere2\nt=0.5\ntheta=0:pi:4\n").unwrap();
    let a = stdout(&mwave(&["kernel", "--config", cfg.to_str().unwrap(), "--t", "0.25"]));
    let b = stdout(&mwave(&["kernel", "--manifold", "sphere2", "--t", "0.25", "--theta", "0:pi:4"]));
    assert_eq!(a, b);
    assert_eq!(rows(&a)[0][0].parse::<f64>().unwrap(), 0.25);
}

#[test]
fn canonical_config_round_trips_and_hashes() {
    let mut cfg = RunConfig::new(mwave_cli::Command::Kernel);
    cfg.set("manifold", "torus2").unwrap();
    cfg.set("t", "0.5,0.125").unwrap();
    cfg.set("point", "0.25,-0.5").unwrap();
    let text = cfg.canonical();
    let back = RunConfig::from_canonical(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.canonical(), text);
    assert_eq!(back.hash(), cfg.hash());
    assert_eq!(cfg.hash().len(), 64);

    let o = mwave(&["kernel", "--manifold", "torus2", "--t", "0.5,0.125", "--point", "0.25,-0.5"]);
    let header = stdout(&o).lines().next().unwrap().to_string();
    assert!(header.ends_with(&format!("config={}", cfg.hash())), "{header}");
}

#[test]
fn output_is_deterministic_and_path_independent() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "kernel".to_string(),
            "--manifold".into(),
            "torus2".into(),
            "--symbol".into(),
            "mexican:2".into(),
            "--t".into(),
            "0.3".into(),
            "--grid".into(),
            "12".into(),
            "--output".into(),
            p.to_str().unwrap().to_string(),
        ]
    };
    let run = |p: &Path, threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_mwave"))
            .args(args(p))
            .env("MWAVE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    };
    run(&a, "1");
    run(&b, "4");
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(rows(&String::from_utf8(ta).unwrap()).len(), 144);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_mwave"))
        .args(["accept", "--help"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_mwave"))
        .args(["validate", "--target", "torus-table"])
        .env("MWAVE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("MWAVE_THREADS"));
}

#[test]
fn cwt_then_reconstruct_recovers_field() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    std::fs::write(&input, "m1,m2,coefficient\n0,0,2.0\n1,0,1.0\n-2,3,0.5\n5,5,-0.25\n").unwrap();
    let path = input.to_str().unwrap();

    let o = mwave(&["cwt", "--input", path, "--t", "0.1,0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let data = rows(&stdout(&o));
    assert_eq!(data.len(), 8);
    let f = SymbolFunction::mexican(1);
    for row in &data {
        let t: f64 = row[0].parse().unwrap();
        let (m1, m2): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        let c0 = match (row[1].as_str(), row[2].as_str()) {
            ("0", "0") => 0.0,
            ("1", "0") => 1.0,
            ("-2", "3") => 0.5,
            _ => -0.25,
        };
        let lambda = 4.0 * PI * PI * (m1 * m1 + m2 * m2);
        let expect = c0 * f.evaluate(t * t * lambda);
        assert!((row[3].parse::<f64>().unwrap() - expect).abs() <= 1e-15 * (1.0 + expect.abs()));
    }

    let o = mwave(&["reconstruct", "--input", path]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let predicted: f64 = trailer(&text, "predicted_rel_err").unwrap().parse().unwrap();
    let measured: f64 = trailer(&text, "measured_rel_err").unwrap().parse().unwrap();
    assert!(measured <= 2.0 * predicted, "{measured} vs {predicted}");
    let back = mwave::SpectralField::from_csv(&text).unwrap();
    assert_eq!(back.get(&vec![0, 0]), 0.0);
    assert!((back.get(&vec![1, 0]) - 1.0).abs() < 2e-4);
}

#[test]
fn holder_and_localize_report_summaries() {
    let o = mwave(&["holder", "--test-field", "256", "--expect-alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let alpha: f64 = trailer(&stdout(&o), "alpha").unwrap().parse().unwrap();
    assert!((alpha - 0.5).abs() <= 0.05);

    let o = mwave(&["holder", "--test-field", "256", "--resolution", "64"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--resolution"));

    let o = mwave(&["localize", "--manifold", "sphere2", "--power", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(rows(&text).len(), 12);
    let ratio: f64 = trailer(&text, "ratio").unwrap().parse().unwrap();
    assert!(ratio <= 10.0);

    let o = mwave(&["localize", "--manifold", "sphere2", "--max-ratio", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}
