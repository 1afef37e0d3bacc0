use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tr-stirap"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn status(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn verify_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify"]);
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    for name in [
        "commutator",
        "route_equivalence",
        "eigen_residual",
        "rescale.(ii)",
    ] {
        assert!(stdout.contains(name), "{name} missing");
    }
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn verify_reports_failure_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("coarse.ini"), "[run]\nsteps = 40\n").unwrap();
    let out = run(dir.path(), &["-c", "coarse.ini", "verify"]);
    assert_eq!(status(&out), 2);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("FAIL route_equivalence"));
}

#[test]
fn simulate_rescaled_ends_at_contracted_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--protocol", "tr", "--a", "10"]);
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("trajectory.csv"));
    assert_eq!(header, "t_us,re1,im1,re2,im2,re3,im3,P1,P2,P3");
    let last = rows.last().unwrap();
    assert_eq!(num(&last[0]), 1.0);
    assert!(num(&last[9]) >= 0.99);
    for row in &rows {
        assert_eq!(row.len(), 10);
        let total: f64 = row[7..].iter().map(|x| num(x)).sum();
        assert!((total - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn simulate_reference_and_baselines() {
    let dir = tempfile::tempdir().unwrap();
    for (protocol, end) in [("reference", 10.0), ("cd", 1.0), ("pi_pulse", 1.0)] {
        let file = format!("{protocol}.csv");
        let out = run(
            dir.path(),
            &["simulate", "--protocol", protocol, "-o", &file],
        );
        assert_eq!(status(&out), 0, "{protocol}");
        let (_, rows) = read_csv(&dir.path().join(file));
        let last = rows.last().unwrap();
        assert_eq!(num(&last[0]), end);
        assert!(num(&last[9]) >= 0.99, "{protocol}");
    }
}

#[test]
fn pi_pulse_amplitude_scan_matches_rabi_formula() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "scan",
            "--kind",
            "amplitude",
            "--protocol",
            "pi_pulse",
            "--points",
            "13",
        ],
    );
    assert_eq!(status(&out), 0);
    let (header, rows) = read_csv(&dir.path().join("scan.csv"));
    assert_eq!(header, "error_value,fidelity,protocol,a,T_us");
    assert_eq!(rows.len(), 13);
    for row in &rows {
        let beta = num(&row[0]);
        let expected = (PI * (1.0 + beta) / 2.0).sin().powi(2);
        assert!((num(&row[1]) - expected).abs() <= 1e-6);
        assert_eq!(row[2], "pi_pulse");
    }
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["config"]["stirap"]["omega0_mhz"], 3.0);
    assert_eq!(sidecar["config"]["scan"]["points"], 13);
}

#[test]
fn rescaled_scan_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let ini = "\
# frequencies in MHz, times in µs
[stirap]
[rescale]
a = 10
[scan]
protocol = tr
error = amplitude
min = -0.2
max = 0.2
points = 5
[output]
scan = beta.csv
";
    std::fs::write(dir.path().join("run.ini"), ini).unwrap();
    let out = run(dir.path(), &["--config", "run.ini", "scan"]);
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = read_csv(&dir.path().join("beta.csv"));
    assert_eq!(rows.len(), 5);
    let centre = rows.iter().find(|r| num(&r[0]) == 0.0).unwrap();
    assert!(num(&centre[1]) >= 0.999);
    assert_eq!(num(&centre[3]), 10.0);
    assert!(dir.path().join("beta.json").exists());
}

#[test]
fn emitted_pulses_hit_peaks_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["emit-pulses", "--a", "10"]);
    assert_eq!(status(&out), 0);
    let (header, rows) = read_csv(&dir.path().join("pulses.csv"));
    assert_eq!(
        header,
        "t_us,omega_p,omega_s,t_tr_us,omega_p_tr,omega_s_tr,delta_tr,fdot"
    );
    assert_eq!(rows.len(), 1001);
    let peak = rows.iter().find(|r| num(&r[0]) == 6.0).unwrap();
    assert_eq!(num(&peak[1]), 2.0 * PI * 3.0);
    let fmax = rows.iter().map(|r| num(&r[7])).fold(f64::MIN, f64::max);
    assert_eq!(fmax, 19.0);
    assert_eq!(num(&rows[500][7]), 19.0);
}

#[test]
fn invalid_configuration_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("slow.ini", "[rescale]\na = 0.5\n", "a must be ≥ 1"),
        ("dup.ini", "[stirap]\nt_f = 10\nt_f = 11\n", "line 3"),
        ("unknown.ini", "[stirap]\nomega = 3\n", "stirap.omega"),
        (
            "section.ini",
            "[run]\nprotocol = tr\n",
            "missing section [rescale]",
        ),
    ];
    for (name, text, needle) in cases {
        std::fs::write(dir.path().join(name), text).unwrap();
        let out = run(dir.path(), &["-c", name, "simulate"]);
        assert_eq!(status(&out), 1, "{name}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.contains(needle), "{name}: {stderr}");
    }
    assert_eq!(status(&run(dir.path(), &["simulate", "--a", "0.5"])), 1);
    assert_eq!(status(&run(dir.path(), &["frobnicate"])), 1);
}

#[test]
fn io_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(status(&run(dir.path(), &["-c", "absent.ini", "verify"])), 3);
    let out = run(dir.path(), &["emit-pulses", "-o", "no/such/dir/p.csv"]);
    assert_eq!(status(&out), 3);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("no/such/dir/p.csv"));
}
