use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mlbound::spectrum::{enumerate_spectrum, format_spectrum, LinearCode};
use mlbound_cli::curve::Curve;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn mlbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlbound"))
        .args(args)
        .env_remove("MLBOUND_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = mlbound(args);
    assert!(
        out.status.success(),
        "mlbound {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn status(args: &[&str]) -> i32 {
    mlbound(args).status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixtures_match_their_generator_polynomials() {
    for (name, n, k, poly) in [
        ("hamming74.gen", 7, 4, 0b1011u64),
        ("bch15_7.gen", 15, 7, 0x1d1),
        ("bch31_21.gen", 31, 21, 0x769),
        ("bch31_26.gen", 31, 26, 0x25),
    ] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        assert_eq!(LinearCode::parse(&text).unwrap(), LinearCode::cyclic(n, k, poly).unwrap(), "{name}");
    }
    let code = LinearCode::cyclic(63, 39, 0o166623567).unwrap();
    let dual = LinearCode::parse(&std::fs::read_to_string(fixture("bch63_39_dual.gen")).unwrap()).unwrap();
    assert_eq!(dual.k(), 24);
    for &a in dual.rows() {
        for &b in code.rows() {
            assert_eq!((a & b).count_ones() % 2, 0);
        }
    }
}

#[test]
fn spectrum_sources() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rnd.spec");
    ok(&["spectrum", "--ensemble", "100", "95", "-o", path_str(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("weight n=100 k=95 kind=ensemble"));

    let printed = ok(&["spectrum", "--enumerate", path_str(&fixture("hamming74.gen"))]);
    let code = LinearCode::parse(&std::fs::read_to_string(fixture("hamming74.gen")).unwrap()).unwrap();
    assert_eq!(printed, format_spectrum(&enumerate_spectrum(&code, 28).unwrap().into()));

    let weights = ok(&["spectrum", "--enumerate", path_str(&fixture("hamming74.gen")), "--weight-only"]);
    assert_eq!(weights, "weight n=7 k=4 kind=exact\n0 1\n3 7\n4 7\n7 1\n");
}

#[test]
fn diagnostics_and_exit_codes() {
    let missing = mlbound(&["spectrum", "--enumerate", "/nonexistent/code.gen"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/code.gen"));

    // clap rejects two sources with a usage error
    assert_eq!(status(&["spectrum", "--ensemble", "10", "5", "--enumerate", "x.gen"]), 2);
    assert_eq!(
        status(&["bound", "--ensemble", "10", "5", "--enumerate", path_str(&fixture("hamming74.gen"))]),
        2
    );
    assert_eq!(
        status(&["spectrum", "--enumerate", path_str(&fixture("bch31_26.gen")), "--max-k", "20"]),
        3
    );
    assert_eq!(status(&["bound", "--ensemble", "10", "5", "--snr-step", "0"]), 2);
    assert_eq!(status(&["bound", "--ensemble", "10", "5", "--snr-start", "3", "--snr-stop", "1"]), 2);
    assert_eq!(status(&["bound", "--ensemble", "10", "5", "--dstar", "11"]), 2);
}

#[test]
fn bit_bound_demands_iowe() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("w.spec");
    ok(&[
        "spectrum",
        "--enumerate",
        path_str(&fixture("hamming74.gen")),
        "--weight-only",
        "-o",
        path_str(&spec),
    ]);
    let out = mlbound(&["bound", "--spectrum", path_str(&spec), "--variant", "bit"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("input-output weight enumerator"));
    ok(&["bound", "--enumerate", path_str(&fixture("hamming74.gen")), "--variant", "bit"]);
}

#[test]
fn forcing_dstar_n_reproduces_union_rows() {
    let grid = ["--snr-start", "0", "--snr-stop", "10", "--snr-step", "0.25"];
    let mut union_args = vec!["bound", "--ensemble", "100", "95", "--variant", "union"];
    union_args.extend(grid);
    let mut trunc_args = vec!["bound", "--ensemble", "100", "95", "--variant", "truncated-union", "--dstar", "100"];
    trunc_args.extend(grid);
    let union = Curve::parse(&ok(&union_args)).unwrap();
    let trunc = Curve::parse(&ok(&trunc_args)).unwrap();
    assert_eq!(union.rows.len(), 41);
    for (u, t) in union.rows.iter().zip(&trunc.rows) {
        assert_eq!(u.snr_db, t.snr_db);
        assert_eq!(u.raw_value, t.raw_value);
    }
}

#[test]
fn compare_flags_dominance_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let union = dir.path().join("union.csv");
    let word = dir.path().join("word.csv");
    let grid = ["--snr-start", "0", "--snr-stop", "10", "--snr-step", "0.5"];
    for (variant, file) in [("union", &union), ("word", &word)] {
        let mut args = vec!["bound", "--ensemble", "100", "95", "--variant", variant, "-o", path_str(file)];
        args.extend(grid);
        ok(&args);
    }
    let u = format!("union={}", path_str(&union));
    let w = format!("word={}", path_str(&word));

    let table = ok(&["compare", "--curve", &u, "--curve", &w, "--dominance", "word<=union", "--strict"]);
    assert!(table.lines().any(|l| l == "snr_db,sigma,union,word,violations"));
    assert!(table.lines().filter(|l| !l.starts_with('#')).skip(1).all(|l| l.ends_with(',')));

    // the reverse relation fails wherever the union bound is loose
    let out = mlbound(&["compare", "--curve", &u, "--curve", &w, "--dominance", "union<=word", "--strict"]);
    assert_eq!(out.status.code(), Some(4));

    // single-curve pass-through keeps values bit-exact
    let single = ok(&["compare", "--curve", &w]);
    let curve = Curve::parse(&std::fs::read_to_string(&word).unwrap()).unwrap();
    let rows: Vec<&str> = single.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), curve.rows.len());
    for (line, r) in rows.iter().zip(&curve.rows) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[2].parse::<f64>().unwrap().to_bits(), r.raw_value.to_bits());
        assert_eq!(cells[2], format!("{:e}", r.raw_value));
    }
}

#[test]
fn compare_rejects_misaligned_grids() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ok(&["bound", "--ensemble", "20", "10", "--snr-stop", "4", "-o", path_str(&a)]);
    ok(&["bound", "--ensemble", "20", "10", "--snr-stop", "4", "--snr-step", "0.25", "-o", path_str(&b)]);
    let out = mlbound(&[
        "compare",
        "--curve",
        &format!("a={}", path_str(&a)),
        "--curve",
        &format!("b={}", path_str(&b)),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("misaligned grids"));
}

#[test]
fn simulate_is_reproducible_and_under_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let gen = fixture("bch15_7.gen");
    let args = |out: &Path, workers: &str| {
        vec![
            "--workers".to_string(),
            workers.to_string(),
            "simulate".into(),
            "--code".into(),
            path_str(&gen).into(),
            "--snr".into(),
            "4".into(),
            "--trials".into(),
            "20000".into(),
            "--seed".into(),
            "7".into(),
            "--format".into(),
            "json".into(),
            "-o".into(),
            path_str(out).into(),
        ]
    };
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    for (out, workers) in [(&first, "1"), (&second, "2")] {
        let a = args(out, workers);
        ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let a = std::fs::read(&first).unwrap();
    assert_eq!(a, std::fs::read(&second).unwrap());

    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let p = &v["points"][0];
    let rate = p["report"]["word_error_rate"]["rate"].as_f64().unwrap();
    let bound = p["word_error_bound"].as_f64().unwrap();
    assert!(rate > 0.0 && rate < bound, "rate {rate} bound {bound}");
    assert_eq!(p["report"]["counters"]["ties"].as_u64(), Some(0));

    // the simulated point lines up with a bound curve in compare
    let curve = dir.path().join("word.csv");
    ok(&[
        "bound",
        "--enumerate",
        path_str(&gen),
        "--snr-start",
        "0",
        "--snr-stop",
        "6",
        "--snr-step",
        "1",
        "-o",
        path_str(&curve),
    ]);
    let table = ok(&[
        "compare",
        "--curve",
        &format!("word={}", path_str(&curve)),
        "--sim",
        &format!("ml={}", path_str(&first)),
        "--dominance",
        "ml<=word",
        "--strict",
    ]);
    let row = table.lines().find(|l| l.starts_with("4,")).unwrap();
    assert_eq!(row.split(',').nth(3).unwrap().parse::<f64>().unwrap(), rate);
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# shared settings\nensemble = 30 20\nvariant = union\nsnr-start = 1\nsnr-stop = 3\nsnr_step = 1\n",
    )
    .unwrap();
    let from_config = Curve::parse(&ok(&["--config", path_str(&cfg), "bound"])).unwrap();
    assert_eq!(from_config.meta("variant"), Some("union"));
    assert_eq!(from_config.rows.len(), 3);

    let overridden = Curve::parse(&ok(&["--config", path_str(&cfg), "bound", "--variant", "word", "--snr-step", "0.5"])).unwrap();
    assert_eq!(overridden.meta("variant"), Some("word"));
    assert_eq!(overridden.rows.len(), 5);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(status(&["--config", path_str(&cfg), "bound", "--ensemble", "30", "20"]), 2);
}

#[test]
fn worker_count_from_environment() {
    let run = |env: &str, extra: &[&str]| {
        let mut args = extra.to_vec();
        args.extend(["bound", "--ensemble", "30", "20", "--snr-stop", "2"]);
        Command::new(env!("CARGO_BIN_EXE_mlbound"))
            .args(&args)
            .env("MLBOUND_WORKERS", env)
            .output()
            .unwrap()
    };
    assert_eq!(run("0", &[]).status.code(), Some(2));
    let a = run("0", &["--workers", "2"]);
    assert!(a.status.success());
    let b = run("1", &[]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn truncated_spectrum_restricts_the_probe() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("t63.spec");
    ok(&[
        "spectrum",
        "--macwilliams",
        path_str(&fixture("bch63_39_dual.gen")),
        "--truncate",
        "20",
        "-o",
        path_str(&spec),
    ]);
    assert!(std::fs::read_to_string(&spec).unwrap().starts_with("weight n=63 k=39 kind=truncated d_max=20"));
    assert_eq!(status(&["bound", "--spectrum", path_str(&spec), "--variant", "union"]), 2);
    let curve = Curve::parse(&ok(&["bound", "--spectrum", path_str(&spec), "--variant", "word"])).unwrap();
    assert_eq!(curve.meta("probe"), Some("0..=10"));
    assert!(curve.rows.iter().all(|r| r.d_star_opt <= 10 && r.raw_value.is_finite()));
    assert_eq!(status(&["bound", "--spectrum", path_str(&spec), "--dstar", "11"]), 2);
}
