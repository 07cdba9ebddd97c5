use std::path::Path;
use std::process::{Command, Output};

fn cachee(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cachee")).args(args).output().expect("run cachee")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn condition_table_has_six_cases_and_metadata() {
    let o = cachee(&["table1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# scenario="));
    assert!(text.contains("# seed=") && text.contains("# version=cachee "));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "case,cache,backhaul,catalog_size,content_size_mb,lhs_w,rhs_w,holds");
    assert_eq!(rows.len(), 7);
    let verdicts: Vec<&str> = rows[1..].iter().map(|r| r.rsplit(',').next().unwrap()).collect();
    assert_eq!(verdicts, ["true", "true", "true", "true", "false", "false"]);
}

#[test]
fn analytic_output_is_reproducible() {
    let a = cachee(&["analyze", "--preset", "pico+dram"]);
    let b = cachee(&["analyze", "--preset", "pico+dram"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn figure_sweep_declares_its_figure() {
    let o = cachee(&["sweep", "--figure", "fig3a"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "# figure=fig3a"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("backhaul_capacity_mbps,"));
}

#[test]
fn custom_sweep_with_simulation_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let args = [
        "sweep", "--param", "eta", "--grid", "0.01,0.1", "--outputs", "analytic,sim", "--drops", "20", "--workers", "2",
        "--out", out.to_str().unwrap(),
    ];
    let o = cachee(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(&out).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.contains("eta,throughput_bps,total_power_w,ee_bit_per_joule,sim_throughput_bps,sim_throughput_se"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    let mut again = args;
    again[10] = "1";
    assert!(cachee(&again).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn config_file_overrides_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "[network]\ninterference_factor = 0\n[sim]\nseed = 9\n").unwrap();
    let o = cachee(&["analyze", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# seed=9"));
    let seeded = cachee(&["analyze", "--config", path.to_str().unwrap(), "--seed", "10"]);
    assert!(stdout(&seeded).contains("# seed=10"));
}

#[test]
fn usage_and_config_errors_exit_with_two() {
    assert_eq!(cachee(&["analyze", "--preset", "femto"]).status.code(), Some(2));
    assert_eq!(cachee(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cachee(&["sweep", "--param", "eta", "--grid", "0.1,0.1"]).status.code(), Some(2));
    assert_eq!(cachee(&["sweep", "--figure", "fig99"]).status.code(), Some(2));
    assert_eq!(cachee(&["analyze", "--config", "/nonexistent/run.conf"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "[network]\nantenas = 4\n").unwrap();
    let o = cachee(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("antenas"), "{err}");
}

#[test]
fn validation_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("validate.csv");
    // noise-limited network, where the simulator and the model agree
    let conf = dir.path().join("quiet.conf");
    std::fs::write(&conf, "[network]\ninterference_factor = 0\n").unwrap();
    let o = cachee(&["validate", "--config", conf.to_str().unwrap(), "--drops", "300", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(Path::new(&out)).unwrap();
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| !l.starts_with('#')).skip(1).all(|l| l.split(',').nth(1) == Some("true")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS throughput_sim_vs_model"));
}
