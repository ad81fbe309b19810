//! End-to-end tests of the `mcloop` binary: exit codes, dataset formats and
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mcloop")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn run_in(out_dir: &Path, config: &Path, subcommand: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        subcommand.to_string(),
        "--config".into(),
        config.display().to_string(),
        "--out".into(),
        out_dir.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    Command::new(bin()).args(&args).output().unwrap()
}

const BASE: &str = r#"
[channel]
mu = 83.0
distance = 100.0

[transmembrane]
k = 200.0

[ligand_receptor]
k_on = 0.1
k_off = 100.0
k_re = 1.0
receptors = 1000.0
"#;

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

#[test]
fn bode_writes_datasets_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!(
            "{BASE}\n[sweep]\nomega_min = 1e-6\nomega_max = 1e-2\npoints = 120\noutputs = [\"gamma_0l\", \"s0\"]\n"
        ),
    );
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    let run_a = run_in(&out_a, &cfg, "bode", &[]);
    assert_eq!(
        exit_code(&run_a),
        0,
        "{}",
        String::from_utf8_lossy(&run_a.stderr)
    );
    let run_b = run_in(&out_b, &cfg, "bode", &[]);
    assert_eq!(exit_code(&run_b), 0);

    let a = std::fs::read(out_a.join("gamma_0l.csv")).unwrap();
    let b = std::fs::read(out_b.join("gamma_0l.csv")).unwrap();
    assert_eq!(
        a, b,
        "identical configs must produce byte-identical datasets"
    );

    // Every in-band gain sits above -6 dB for the redesigned membrane, and
    // the printed floats round-trip exactly.
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "omega_rad_s,re,im,gain_db,phase_rad");
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(fields.len(), 5);
        let (re, im, gain_db) = (fields[1], fields[2], fields[3]);
        let recomputed = 20.0 * re.hypot(im).log10();
        assert_eq!(recomputed, gain_db, "gain must be reproducible from re/im");
        assert!(gain_db > -6.0, "in-band point below -6 dB: {line}");
    }
}

#[test]
fn bode_rejects_empty_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!("{BASE}\n[sweep]\nomega_min = 1e-6\nomega_max = 1e-2\npoints = 0\n"),
    );
    let out = run_in(tmp.path(), &cfg, "bode", &[]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!("{BASE}\nnot_a_section = 1\n"),
    );
    let out = run_in(tmp.path(), &cfg, "design-check", &[]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
}

#[test]
fn missing_config_flag_is_a_usage_error() {
    let out = run(&["bode"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn cutoff_reports_the_normalized_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!("{BASE}\n[cutoff]\ntarget = \"absolute\"\n"),
    );
    let out = run_in(tmp.path(), &cfg, "cutoff", &[]);
    assert_eq!(
        exit_code(&out),
        0,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("cutoff.json")).unwrap())
            .unwrap();
    let omega_hat = json["omega_hat"].as_f64().unwrap();
    assert!(
        (omega_hat - 4.14).abs() / 4.14 < 0.01,
        "omega_hat {omega_hat}"
    );
    let omega_c = json["omega_c_rad_s"].as_f64().unwrap();
    assert!((omega_c - omega_hat * 83.0 / 1e4).abs() < 1e-12);
}

#[test]
fn cutoff_from_steady_for_dd_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!("{BASE}\n[cutoff]\nboundary = \"dd\"\ntarget = \"from-steady\"\n"),
    );
    let out = run_in(tmp.path(), &cfg, "cutoff", &[]);
    assert_eq!(exit_code(&out), 0);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("cutoff.json")).unwrap())
            .unwrap();
    let omega_hat = json["omega_hat"].as_f64().unwrap();
    assert!(
        (omega_hat - 15.0).abs() / 15.0 < 0.01,
        "omega_hat {omega_hat}"
    );
}

#[test]
fn cutoff_without_steady_gain_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!("{BASE}\n[cutoff]\nboundary = \"nn\"\ntarget = \"from-steady\"\n"),
    );
    let out = run_in(tmp.path(), &cfg, "cutoff", &[]);
    assert_eq!(
        exit_code(&out),
        4,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn design_check_verdicts_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let design = "\n[design]\nband_hi = 1e-2\nl_min = 10.0\nl_max = 100.0\n";

    let good = write_config(tmp.path(), "good.toml", &format!("{BASE}{design}"));
    let out = run_in(tmp.path(), &good, "design-check", &[]);
    assert_eq!(
        exit_code(&out),
        0,
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );

    // slow membrane: the self-interference condition gives out
    let slow = write_config(
        tmp.path(),
        "slow.toml",
        &format!("{}{design}", BASE.replace("k = 200.0", "k = 5e-2")),
    );
    let out = run_in(tmp.path(), &slow, "design-check", &[]);
    assert_eq!(exit_code(&out), 1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL self-interference"), "{stdout}");

    // thin molecule: the channel-bandwidth condition reports the threshold
    let thin = write_config(
        tmp.path(),
        "thin.toml",
        &format!("{}{design}", BASE.replace("mu = 83.0", "mu = 10.0")),
    );
    let out = run_in(tmp.path(), &thin, "design-check", &[]);
    assert_eq!(exit_code(&out), 1);
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("design_check.json")).unwrap(),
    )
    .unwrap();
    let cond = &json["conditions"][0];
    assert_eq!(cond["name"], "channel-bandwidth");
    assert_eq!(cond["pass"], false);
    let threshold = cond["threshold"].as_f64().unwrap();
    assert!((threshold - 24.2).abs() < 0.1, "threshold {threshold}");
}

#[test]
fn simulate_zero_amplitude_writes_zero_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!("{BASE}\n[sim]\namplitude = 0.0\nomega = 1e-2\nduration = 50.0\n"),
    );
    let out = run_in(tmp.path(), &cfg, "simulate", &[]);
    assert_eq!(
        exit_code(&out),
        0,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(tmp.path().join("timeseries.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t_s,c_drive,c_out,z_l,c_a,y_l,mass");
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(fields[1..].iter().all(|&v| v == 0.0), "{line}");
    }
}

#[test]
fn simulate_single_period_run_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    // one drive period at omega = 0.1 rad/s
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!(
            "{}\n[sim]\namplitude = 1.0\nomega = 1e-1\nduration = 62.83\n",
            BASE.replace("distance = 100.0", "distance = 60.0")
        ),
    );
    let out = run_in(tmp.path(), &cfg, "simulate", &[]);
    assert_eq!(
        exit_code(&out),
        5,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("not settled"));
}

#[test]
fn simulate_runaway_parameters_exit_5() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!(
            "{}\n[sim]\namplitude = 1.0\nomega = 1e-1\nduration = 100.0\n",
            BASE.replace("receptors = 1000.0", "receptors = 1e9")
        ),
    );
    let out = run_in(tmp.path(), &cfg, "simulate", &[]);
    assert_eq!(
        exit_code(&out),
        5,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn compare_validates_the_analytic_gain() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!("{}\n[compare]\nomegas = [1e-1]\ndistances = [50.0]\n", BASE),
    );
    let out = run_in(tmp.path(), &cfg, "compare", &["--jobs", "2"]);
    assert_eq!(
        exit_code(&out),
        0,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("compare.json")).unwrap())
            .unwrap();
    assert_eq!(json["pass"], true);
    let delta = json["max_abs_delta_db"].as_f64().unwrap();
    assert!(delta <= 0.5, "delta {delta}");

    // the same run against an unreasonably tight bar fails with exit 1
    let out = run_in(tmp.path(), &cfg, "compare", &["--tolerance-db", "0.01"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn compare_unsettled_run_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.toml",
        &format!(
            "{}\n[compare]\nomegas = [1e-1]\ndistances = [50.0]\nduration = 62.83\n",
            BASE
        ),
    );
    let out = run_in(tmp.path(), &cfg, "compare", &[]);
    assert_eq!(exit_code(&out), 5);
}

#[test]
fn shipped_reference_config_passes_design_check() {
    let tmp = tempfile::tempdir().unwrap();
    let repo_config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml");
    let out = run_in(tmp.path(), &repo_config, "design-check", &[]);
    assert_eq!(
        exit_code(&out),
        0,
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let out = run_in(tmp.path(), &repo_config, "cutoff", &[]);
    assert_eq!(exit_code(&out), 0);
}
