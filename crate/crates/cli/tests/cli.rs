//! End-to-end tests of the `corridor` binary: outputs, determinism, exit
//! codes and the effective-config report.

use std::path::Path;
use std::process::{Command, Output};

fn corridor() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corridor"))
}

fn run(args: &[&str]) -> Output {
    corridor().args(args).output().expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn profile_writes_expected_columns_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("profile.csv");
    let args = [
        "profile",
        "--isd",
        "2400",
        "--n",
        "8",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_code(&run(&args), 0);
    let first = std::fs::read(&out).unwrap();
    let header = String::from_utf8_lossy(&first);
    let header = header.lines().next().unwrap();
    assert_eq!(
        header,
        "d_m,rsrp_hp_left_dbm,rsrp_hp_right_dbm,rsrp_lp_1_dbm,rsrp_lp_2_dbm,rsrp_lp_3_dbm,\
         rsrp_lp_4_dbm,rsrp_lp_5_dbm,rsrp_lp_6_dbm,rsrp_lp_7_dbm,rsrp_lp_8_dbm,signal_dbm,\
         noise_dbm,snr_db,thr_bps_hz"
    );
    assert_code(&run(&args), 0);
    let second = std::fs::read(&out).unwrap();
    assert_eq!(first, second, "repeated runs must be byte-identical");
}

#[test]
fn profile_long_segment_keeps_signal_above_minus_100_dbm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("profile.csv");
    assert_code(
        &run(&[
            "profile",
            "--isd",
            "2400",
            "--n",
            "8",
            "--out",
            out.to_str().unwrap(),
        ]),
        0,
    );
    let text = std::fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        let signal: f64 = line.split(',').nth(11).unwrap().parse().unwrap();
        assert!(signal > -100.0, "signal {signal} dBm in line {line}");
    }
}

#[test]
fn profile_without_repeaters_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("two_source.csv");
    assert_code(
        &run(&[
            "profile",
            "--isd",
            "500",
            "--n",
            "0",
            "--out",
            out.to_str().unwrap(),
        ]),
        0,
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let snr: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    let n = snr.len();
    for i in 0..n {
        assert!((snr[i] - snr[n - 1 - i]).abs() < 1e-3);
    }
}

#[test]
fn profile_rejects_zero_grid_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let r = run(&[
        "profile",
        "--isd",
        "500",
        "--n",
        "0",
        "--grid-step",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_code(&r, 2);
}

#[test]
fn max_isd_is_deterministic_and_parallel_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq.csv");
    let par = dir.path().join("par.csv");
    assert_code(
        &run(&["max-isd", "--n-from", "0", "--n-to", "3", "--out", seq.to_str().unwrap()]),
        0,
    );
    assert_code(
        &run(&[
            "max-isd", "--n-from", "0", "--n-to", "3", "--jobs", "4", "--out",
            par.to_str().unwrap(),
        ]),
        0,
    );
    assert_eq!(std::fs::read(&seq).unwrap(), std::fs::read(&par).unwrap());
}

#[test]
fn energy_grid_reproduces_reference_savings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("energy.csv");
    assert_code(
        &run(&[
            "energy",
            "--isds",
            "1250,1450,1600,1800,1950,2100,2250,2400,2500,2650",
            "--out",
            out.to_str().unwrap(),
        ]),
        0,
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 1 + 30, "header + baseline + 10x3");
    let field = |scenario: &str, idx: usize| -> f64 {
        text.lines()
            .find(|l| l.starts_with(&format!("{scenario},")))
            .unwrap_or_else(|| panic!("missing scenario {scenario}"))
            .split(',')
            .nth(idx)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(field("conventional", 4), 0.0);
    assert!((field("n1-sleep", 4) - 56.86).abs() < 0.01);
    assert!((field("n10-sleep", 4) - 74.28).abs() < 0.01);
    assert!((field("n10-solar", 4) - 79.28).abs() < 0.01);
    assert!(field("n3-always-on", 3) <= 0.50 * 467.152);
}

#[test]
fn energy_rejects_mismatched_isd_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("energy.csv");
    let r = run(&[
        "energy",
        "--isds",
        "1250,1450",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_code(&r, 2);
}

#[test]
fn solar_sim_on_zero_production_fixture_depletes_day_four() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("dark.csv");
    let mut csv = String::from("timestamp,pv_w\n");
    for day in 1..=6 {
        for hour in 0..24 {
            csv.push_str(&format!("2019-01-{day:02}T{hour:02}:00:00Z,0.000\n"));
        }
    }
    std::fs::write(&fixture, csv).unwrap();

    let out = dir.path().join("stats.csv");
    assert_code(
        &run(&[
            "solar-sim",
            "--fixture",
            fixture.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]),
        0,
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let downtime: f64 = fields[2].parse().unwrap();
    // depletion begins during day 4: unserved from hour 83 through hour 143
    assert_eq!(downtime, (24.0 * 6.0) - 83.0);
}

#[test]
fn solar_size_baseline_feasible_fixture_returns_smallest_system() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("sunny.csv");
    let mut csv = String::from("timestamp,pv_w\n");
    for day in 1..=10 {
        for hour in 0..24 {
            csv.push_str(&format!("2019-01-{day:02}T{hour:02}:00:00Z,50.000\n"));
        }
    }
    std::fs::write(&fixture, csv).unwrap();

    let out = dir.path().join("system.csv");
    assert_code(
        &run(&[
            "solar-size",
            "--fixture",
            fixture.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]),
        0,
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("540,720,"));
}

#[test]
fn solar_size_reports_infeasible_with_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("dark.csv");
    let mut csv = String::from("timestamp,pv_w\n");
    for day in 1..=20 {
        for hour in 0..24 {
            csv.push_str(&format!("2019-01-{day:02}T{hour:02}:00:00Z,0.000\n"));
        }
    }
    std::fs::write(&fixture, csv).unwrap();
    let out = dir.path().join("system.csv");
    let r = run(&[
        "solar-size",
        "--fixture",
        fixture.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_code(&r, 3);
}

#[test]
fn fetch_with_unreachable_endpoint_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.toml");
    std::fs::write(
        &config_path,
        "[pvgis]\nendpoint = \"http://127.0.0.1:9/x\"\nretries = 1\ninitial_backoff_s = 0.0\ntimeout_s = 0.2\n",
    )
    .unwrap();
    let out = dir.path().join("series.csv");
    let r = corridor()
        .env("PVGIS_CACHE_DIR", dir.path().join("cache"))
        .args([
            "fetch",
            "--config",
            config_path.to_str().unwrap(),
            "--location",
            "madrid",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_code(&r, 4);
}

#[test]
fn fetch_uses_cache_and_writes_series_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir_all(&cache).unwrap();
    seed_default_madrid_payload(&cache);

    let config_path = dir.path().join("config.toml");
    std::fs::write(
        &config_path,
        "[pvgis]\nendpoint = \"http://127.0.0.1:9/x\"\nretries = 1\ninitial_backoff_s = 0.0\ntimeout_s = 0.2\n",
    )
    .unwrap();
    let out = dir.path().join("series.csv");
    let args = [
        "fetch",
        "--config",
        config_path.to_str().unwrap(),
        "--location",
        "madrid",
        "--out",
        out.to_str().unwrap(),
    ];
    let r = corridor()
        .env("PVGIS_CACHE_DIR", &cache)
        .args(args)
        .output()
        .unwrap();
    assert_code(&r, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "timestamp,pv_w");
    assert_eq!(text.lines().count(), 1 + 2);
}

/// Seed a two-record PVGIS payload under the fingerprint the default config
/// produces for its "madrid" location.
fn seed_default_madrid_payload(cache: &Path) {
    use corridor_cli::config::RunConfig;
    use corridor_core::pvgis::{write_cache_entry, FetchConfig};
    let defaults = RunConfig::default();
    let madrid = defaults.locations["madrid"];
    let req = defaults.pvgis_request(madrid.lat, madrid.lon);
    let cfg = FetchConfig {
        cache_dir: Some(cache.to_path_buf()),
        ..FetchConfig::default()
    };
    let payload = br#"{"outputs":{"hourly":[
        {"time":"20190101:0010","P":0.0},
        {"time":"20190101:0110","P":12.5}
    ]}}"#;
    write_cache_entry(&req, &cfg, payload, "seeded").unwrap();
}

#[test]
fn report_embeds_config_that_round_trips() {
    use corridor_cli::config::RunConfig;
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    assert_code(
        &run(&["max-isd", "--n-from", "1", "--n-to", "2", "--out", out.to_str().unwrap()]),
        0,
    );
    let report_path = dir.path().join("sweep.csv.report.toml");
    let report: toml::Value =
        toml::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(
        report["run"]["command"].as_str(),
        Some("max-isd"),
        "report: {report:?}"
    );
    // the embedded effective config re-parses to an equal RunConfig
    let embedded: RunConfig = report["config"].clone().try_into().unwrap();
    assert_eq!(embedded, RunConfig::default());
}

#[test]
fn config_with_unknown_keys_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    std::fs::write(&config_path, "[corridor]\nfrequency_ghz = 3.5\n").unwrap();
    let out = dir.path().join("x.csv");
    let r = run(&[
        "profile",
        "--config",
        config_path.to_str().unwrap(),
        "--isd",
        "500",
        "--n",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_code(&r, 2);
}
