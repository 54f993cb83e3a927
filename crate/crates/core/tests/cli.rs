use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use swipt_sim::iq::read_iq;
use swipt_sim::spectrum::{bin_of, windowed_bin_power};
use swipt_sim::wit::{ModulationScheme, OfdmPlan};

fn bin() -> &'static Path {
    Path::new(env!("CARGO_BIN_EXE_swipt-sim"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn swipt(args: &[&str], config: Option<&Path>, out: Option<&Path>) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.output().unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

fn field<'a>(stdout: &'a str, key: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("no {key} in report:\n{stdout}"))
}

#[test]
fn gen_wpt_occupies_only_the_tone_bins() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wpt.cf32");
    let o = swipt(&["gen", "wpt"], None, Some(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let (buf, meta) = read_iq(&out).unwrap();
    assert_eq!(meta.get("kind"), Some("wpt"));
    let bins = windowed_bin_power(&buf.samples, 64, 0, 64);
    let total: f64 = bins.iter().sum();
    let tones: Vec<usize> = [-16, -12, -8, -4, 4, 8, 12, 16]
        .iter()
        .map(|&k| bin_of(k, 64))
        .collect();
    for (b, p) in bins.iter().enumerate() {
        if tones.contains(&b) {
            assert!((p / total - 0.125).abs() < 1e-6, "bin {b}");
        } else {
            assert!(p / total < 1e-12, "bin {b} leaks {}", p / total);
        }
    }
}

#[test]
fn gen_combined_at_rho_zero_matches_gen_wit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sp.cfg",
        "tx.mode = superposition\ntx.rho = 0\nrx.mode = power-splitting\n",
    );
    let wit = dir.path().join("wit.cf32");
    let combined = dir.path().join("combined.cf32");
    assert!(
        swipt(&["gen", "wit", "--seed", "9"], Some(&cfg), Some(&wit))
            .status
            .success()
    );
    assert!(swipt(
        &["gen", "combined", "--seed", "9"],
        Some(&cfg),
        Some(&combined)
    )
    .status
    .success());
    assert_eq!(
        std::fs::read(wit).unwrap(),
        std::fs::read(combined).unwrap()
    );
}

#[test]
fn gen_wit_leaves_reserved_bins_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wit.cf32");
    assert!(swipt(&["gen", "wit"], None, Some(&out)).status.success());
    let (buf, meta) = read_iq(&out).unwrap();
    assert_eq!(meta.get("modulation"), Some("QPSK"));

    let plan = OfdmPlan::new(ModulationScheme::Qpsk);
    let bins = windowed_bin_power(&buf.samples, 64, plan.cp_len, plan.symbol_len());
    let total: f64 = bins.iter().sum();
    for (b, reserved) in plan.reserved_mask().iter().enumerate() {
        if *reserved {
            assert!(bins[b] / total < 1e-12, "reserved bin {b}");
        }
    }
}

#[test]
fn simulate_wit_only_decodes_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "wit.cfg",
        "tx.mode = wit-only\nrx.mode = power-splitting\nrx.rho = 0\n",
    );
    let csv = dir.path().join("report.csv");
    let o = swipt(&["simulate"], Some(&cfg), Some(&csv));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(field(&stdout, "ber").parse::<f64>().unwrap(), 0.0);
    assert_eq!(
        field(&stdout, "throughput_mbps").parse::<f64>().unwrap(),
        15.0
    );

    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("# config_sha256="));
    assert_eq!(data_rows(&text).len(), 1);
}

#[test]
fn simulate_is_reproducible_from_the_seed() {
    let a = swipt(&["simulate", "--seed", "31", "--trial", "2"], None, None);
    let b = swipt(&["simulate", "--seed", "31", "--trial", "2"], None, None);
    let c = swipt(&["simulate", "--seed", "32", "--trial", "2"], None, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_circuit_wpt_only_reports_a_positive_voltage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "circuit.cfg",
        "tx.mode = wpt-only\nrx.mode = power-splitting\nrx.rho = 1\nrectifier.model = circuit\n",
    );
    let o = swipt(&["simulate"], Some(&cfg), None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    let v: f64 = field(&stdout, "dc_metric").parse().unwrap();
    assert!(v > 1e-3, "dc voltage {v}");
    assert_eq!(field(&stdout, "ber"), "undefined");
}

#[test]
fn sweep_row_counts_follow_the_receiver() {
    let dir = tempfile::tempdir().unwrap();
    let quick = "sweep.trials = 2\nsweep.sim_slot_s = 0.0002\n";
    let ts = write_config(
        dir.path(),
        "ts.cfg",
        &format!("tx.mode = time-sharing\nrx.mode = time-switching\n{quick}"),
    );
    let ps = write_config(
        dir.path(),
        "ps.cfg",
        &format!("tx.mode = superposition\nrx.mode = power-splitting\n{quick}"),
    );
    for (cfg, rows) in [(ts, 11), (ps, 121)] {
        let out = dir.path().join("sweep.csv");
        let o = swipt(&["sweep"], Some(&cfg), Some(&out));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("# config_sha256="));
        assert_eq!(data_rows(&text).len(), rows);
    }
}

#[test]
fn pareto_keeps_a_mutually_undominated_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    std::fs::write(
        &input,
        "mode,alpha,rho_tx,rho_rx,modulation,mean_energy_j,stderr_energy,mean_ber,mean_throughput_mbps,stderr_throughput,n_trials\n\
         synthetic,nan,nan,nan,QPSK,1,0,nan,3,0,1\n\
         synthetic,nan,nan,nan,QPSK,2,0,nan,2,0,1\n\
         synthetic,nan,nan,nan,QPSK,3,0,nan,1,0,1\n",
    )
    .unwrap();
    let out = dir.path().join("front.csv");
    let o = swipt(
        &["sweep", "--pareto", "--input", input.to_str().unwrap()],
        None,
        Some(&out),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with(",false")));
}

#[test]
fn config_errors_exit_with_two_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "# comment\ntx.rho = 3\n");
    let o = swipt(&["simulate"], Some(&cfg), None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let unknown = write_config(dir.path(), "unknown.cfg", "tx.colour = red\n");
    assert_eq!(
        swipt(&["simulate"], Some(&unknown), None).status.code(),
        Some(2)
    );
}

#[test]
fn simulation_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "stall.cfg",
        "tx.mode = wpt-only\nrx.mode = power-splitting\nrx.rho = 1\n\
         rectifier.model = circuit\nrectifier.max_periods = 2\n",
    );
    let o = swipt(&["simulate"], Some(&cfg), None);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
