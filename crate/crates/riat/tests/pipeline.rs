//! End-to-end pipeline and command-line integration tests.

use std::process::Command;

use riat::calendar::SessionCalendar;
use riat::synth::{market_like, MarketSpec};

fn small_market() -> riat::MinuteBarSeries {
    market_like(&MarketSpec {
        days: 15,
        seed: 99,
        ..MarketSpec::default()
    })
    .unwrap()
}

#[test]
fn library_pipeline_end_to_end() {
    let bars = small_market();
    assert_eq!(bars.minutes_per_day(), 240);
    assert_eq!(bars.n_days(), 15);

    // Preprocess: the normalized series has unit standard deviation.
    let v = riat::normalized_volumes(&bars).unwrap();
    assert_eq!(v.len(), 15 * 240);
    let n = v.len() as f64;
    let mean = v.values().iter().sum::<f64>() / n;
    let sd = (v.values().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!((sd - 1.0).abs() < 1e-9);

    // Returns align to the minute axis with session starts undefined.
    let returns = riat::to_returns(&bars).unwrap();
    assert_eq!(returns.returns_per_day(), 238);
    let aligned = riat::align_returns(&returns).unwrap();
    assert_eq!(aligned.axis_len(), v.len());
    assert_eq!(aligned.defined_count(), 15 * 238);

    // Intervals, fit, gof.
    let pooled = riat::pooled_scaled_sample(&v, &[2.0, 3.0]).unwrap();
    assert!(pooled.len() > 100);
    let fit = riat::fit_tail(&pooled, 0.1, 50).unwrap();
    assert!(fit.delta > 1.0 && fit.delta.is_finite());
    let gof = riat::gof_report(&fit, &pooled, 200, 7).unwrap();
    assert!((0.0..=1.0).contains(&gof.p_ks));
    assert!((0.0..=1.0).contains(&gof.p_ksw));
    assert!(gof.w2 >= 0.0);

    // Memory and coupling run through on the same series.
    let memory = riat::interval_memory_report(&v, &[2.0], 1, 7).unwrap();
    assert_eq!(memory.per_q.len(), 1);
    let grid = riat::coupling::default_return_threshold_grid(&aligned);
    let coupling = riat::coupling_report(&v, &aligned, 2.0, &grid).unwrap();
    assert!(coupling.c_r_tau.is_finite() && coupling.c_r_tau.abs() <= 1.0);
    assert!(coupling.n_pairs >= 30);
}

#[test]
fn intraday_profile_shape_matches_generator() {
    // The market generator plants a U-shaped profile; the estimate must dip
    // in the middle and rise at the edges.
    let bars = small_market();
    let profile = riat::intraday_profile(bars.volume_grid()).unwrap();
    let a = profile.values();
    let mid = a[120];
    assert!(a[0] > 2.0 * mid, "open {} vs midday {mid}", a[0]);
    assert!(a[239] > 2.0 * mid, "close {} vs midday {mid}", a[239]);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_riat"))
}

#[test]
fn cli_synth_profile_intervals_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("market.synth");
    std::fs::write(
        &spec,
        "kind = market-like\ndays = 20\nseed = 5\nsession = 09:30-11:30\nsession = 13:00-15:00\n",
    )
    .unwrap();
    let csv = dir.path().join("market.csv");

    let out = bin()
        .args(["synth", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "synth failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(csv.exists());

    let outdir = dir.path().join("cli-out");
    let out = bin()
        .args(["profile", "--input"])
        .arg(&csv)
        .arg("--out")
        .arg(&outdir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "profile failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(outdir.join("profile.tsv").exists());

    let out = bin()
        .args(["intervals", "--q", "2,3", "--input"])
        .arg(&csv)
        .arg("--out")
        .arg(&outdir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "intervals failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(outdir.join("intervals_q2.tsv").exists());
    assert!(outdir.join("intervals_q3.json").exists());

    let fit_json = dir.path().join("fit.json");
    let out = bin()
        .args(["fit", "--q", "2,3", "--xmin-floor", "0.1", "--input"])
        .arg(&csv)
        .arg("--out")
        .arg(&fit_json)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "fit failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&fit_json).unwrap()).unwrap();
    assert!(fit["delta"].as_f64().unwrap() > 1.0);

    // Full report through a config file.
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        format!(
            "input = M:{}\nq = 2,3\nn_boot = 200\nseed = 9\ntrace_trigger = 3.0\nsession = 09:30-11:30\nsession = 13:00-15:00\n",
            csv.display()
        ),
    )
    .unwrap();
    let report_dir = dir.path().join("report-out");
    let out = bin()
        .args(["--config"])
        .arg(&conf)
        .args(["report", "--out"])
        .arg(&report_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "report failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(report_dir.join("report.json").exists());
    assert!(report_dir.join("manifest.json").exists());
    assert!(report_dir.join("M/profile.tsv").exists());
    assert!(!report_dir.join(".partial").exists());
}

#[test]
fn cli_analysis_subcommands_produce_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("market.csv");
    market_like(&MarketSpec {
        days: 30,
        seed: 6,
        ..MarketSpec::default()
    })
    .unwrap()
    .write_csv(&csv, ',')
    .unwrap();
    let outdir = dir.path().join("out");

    let gof_json = dir.path().join("gof.json");
    let out = bin()
        .args([
            "gof", "--q", "2,3", "--n-boot", "150", "--stat", "ks,cvm", "--input",
        ])
        .arg(&csv)
        .arg("--out")
        .arg(&gof_json)
        .args(["--seed", "5"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "gof failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let gof: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&gof_json).unwrap()).unwrap();
    assert!(gof["p_ks"].as_f64().is_some());
    assert!(gof["w2"].as_f64().is_some());
    assert!(gof.get("p_ksw").is_none(), "ksw was not requested");

    for (args, artifact) in [
        (vec!["conditional", "--q", "2"], "conditional_q2.tsv"),
        (vec!["dfa", "--q", "2"], "dfa_alphas.json"),
        (vec!["couple", "--q", "2"], "coupling.json"),
        (vec!["comove", "--q", "2"], "comovement_q2.tsv"),
        (
            vec!["trace", "--trigger", "3.0", "--horizon", "60"],
            "trace.tsv",
        ),
    ] {
        let out = bin()
            .args(&args)
            .args(["--input"])
            .arg(&csv)
            .arg("--out")
            .arg(&outdir)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(outdir.join(artifact).exists(), "{artifact} missing");
    }
}

#[test]
fn cli_exit_codes_follow_the_taxonomy() {
    let dir = tempfile::tempdir().unwrap();

    // Config error: empty q list.
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "input = x.csv\nq = \n").unwrap();
    let out = bin()
        .args(["--config"])
        .arg(&conf)
        .args(["report"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "config errors exit 1");

    // Ingest error: malformed row.
    let csv = dir.path().join("broken.csv");
    std::fs::write(&csv, "date,time,price,volume\n2024-01-02,09:30,abc,10\n").unwrap();
    let out = bin()
        .args(["profile", "--input"])
        .arg(&csv)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "parse errors exit 2");

    // I/O error: missing file.
    let out = bin()
        .args(["profile", "--input"])
        .arg(dir.path().join("nope.csv"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "missing input exits 4");
}

#[test]
fn synth_fixture_round_trips_through_ingest_with_no_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let bars = small_market();
    let path = dir.path().join("bars.csv");
    bars.write_csv(&path, ',').unwrap();
    let config = riat::IngestConfig {
        calendar: SessionCalendar::cn_two_session(),
        ..riat::IngestConfig::default()
    };
    let loaded = riat::load_minute_bars(&path, &config).unwrap();
    assert!(loaded.warnings.is_empty());
    assert_eq!(loaded.series, bars);
}

#[test]
fn two_instruments_give_two_table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    market_like(&MarketSpec {
        days: 20,
        seed: 31,
        ..MarketSpec::default()
    })
    .unwrap()
    .write_csv(&a, ',')
    .unwrap();
    market_like(&MarketSpec {
        days: 20,
        seed: 32,
        ..MarketSpec::default()
    })
    .unwrap()
    .write_csv(&b, ',')
    .unwrap();

    let mut cfg = riat::RunConfig::default();
    cfg.inputs = vec![("A".into(), a), ("B".into(), b)];
    cfg.q_list = vec![2.0, 3.0];
    cfg.n_boot = 100;
    cfg.trace_trigger = 3.0;
    cfg.out_dir = dir.path().join("out");
    let bundle = riat::run_full_report(&cfg).unwrap();
    assert_eq!(bundle.rows.len(), 2);
    assert_eq!(bundle.rows[0].instrument, "A");
    assert_eq!(bundle.rows[1].instrument, "B");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report.as_array().unwrap().len(), 2);
}

#[test]
fn partial_marker_survives_failed_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    market_like(&MarketSpec {
        days: 20,
        seed: 33,
        ..MarketSpec::default()
    })
    .unwrap()
    .write_csv(&a, ',')
    .unwrap();

    let mut cfg = riat::RunConfig::default();
    cfg.inputs = vec![("A".into(), a)];
    cfg.q_list = vec![2.0, 3.0];
    // An absurd trigger guarantees the trace stage fails.
    cfg.trace_trigger = 1e9;
    cfg.n_boot = 50;
    cfg.out_dir = dir.path().join("out");
    let err = riat::run_full_report(&cfg).unwrap_err();
    assert!(
        err.to_string().contains("trace"),
        "error should name the stage: {err}"
    );
    assert!(cfg.out_dir.join(".partial").exists());
}
