use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scos::bench::CSV_HEADER;
use scos::codes::rm_info_set;
use scos::CodeSpec;
use tempfile::TempDir;

fn scos(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scos"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_spec(path: &Path) -> CodeSpec {
    CodeSpec::from_toml(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Writes the RM(1,3) code into `dir` and returns its file name.
fn small_code(dir: &Path) -> &'static str {
    let o = scos(
        dir,
        &[
            "--out",
            ".",
            "construct",
            "rm",
            "--r",
            "1",
            "--m",
            "3",
            "--name",
            "rm8",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    "rm8.toml"
}

#[test]
fn construct_pac_uses_rm_info_set() {
    let dir = TempDir::new().unwrap();
    let o = scos(
        dir.path(),
        &[
            "--out",
            ".",
            "construct",
            "pac",
            "--n",
            "7",
            "--k",
            "64",
            "--g",
            "011011",
        ],
    );
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("N=128 K=64 rate=0.5 rule=pac r=3 g=011011"));
    let spec = read_spec(&dir.path().join("pac_128_64.toml"));
    assert_eq!(spec.info_set(), rm_info_set(3, 7).unwrap().as_slice());
    assert!(!spec.constraints().is_empty());
}

#[test]
fn construct_rm_and_rate_one_polar() {
    let dir = TempDir::new().unwrap();
    assert!(scos(
        dir.path(),
        &["--out", ".", "construct", "rm", "--r", "3", "--m", "7"]
    )
    .status
    .success());
    assert_eq!(read_spec(&dir.path().join("rm_128_64.toml")).k(), 64);
    let o = scos(
        dir.path(),
        &[
            "--out",
            ".",
            "construct",
            "polar-pw",
            "--n",
            "3",
            "--k",
            "8",
        ],
    );
    assert!(stdout(&o).contains("rate=1 "));
    let spec = read_spec(&dir.path().join("polar_pw_8_8.toml"));
    assert_eq!(spec.info_set(), &[1, 2, 3, 4, 5, 6, 7, 8]);
}

#[test]
fn construct_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let o = scos(
        dir.path(),
        &["construct", "pac", "--n", "7", "--k", "63", "--g", "011011"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = scos(
        dir.path(),
        &["construct", "polar-pw", "--n", "3", "--k", "9"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_csv_format_is_stable() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    let args = [
        "--seed",
        "4",
        "simulate",
        "--code",
        code,
        "--decoder",
        "sc",
        "--snr",
        "0,1.5",
        "--frames",
        "500",
        "--min-frame-errors",
        "1000000",
    ];
    let o = scos(dir.path(), &args);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    for (line, snr) in lines[1..].iter().zip(["0", "1.5"]) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 10);
        assert_eq!(f[0], snr);
        assert_eq!(f[1], "500");
        let errors: u64 = f[2].parse().unwrap();
        let fer: f64 = f[3].parse().unwrap();
        assert!((fer - errors as f64 / 500.0).abs() < 1e-12);
        // SC never erases and visits exactly N phases
        assert_eq!(f[6], "0");
        assert_eq!(f[7], "1");
        assert_eq!(f[9], "4");
    }
}

#[test]
fn simulate_zero_frames_is_header_only() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    let o = scos(
        dir.path(),
        &["simulate", "--code", code, "--snr", "2", "--frames", "0"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), format!("{CSV_HEADER}\n"));
}

#[test]
fn simulate_is_deterministic_across_workers() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    let run = |w: &str| {
        let o = scos(
            dir.path(),
            &[
                "--seed",
                "9",
                "--workers",
                w,
                "simulate",
                "--code",
                code,
                "--snr",
                "1",
                "--lambda-max-ratio",
                "3",
                "--min-frame-errors",
                "25",
            ],
        );
        assert!(o.status.success());
        stdout(&o)
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn flags_override_config_keys() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    fs::write(
        dir.path().join("run.toml"),
        format!(
            "code = \"{code}\"\ndecoder = \"scl\"\nlist_size = 2\nsnr = 2.0\nmax_frames = 300\nmin_frame_errors = 1000\nseed = 2\n"
        ),
    )
    .unwrap();
    let o = scos(dir.path(), &["--config", "run.toml", "simulate"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("2,300,"));
    let o = scos(
        dir.path(),
        &[
            "--config", "run.toml", "--seed", "5", "simulate", "--frames", "120",
        ],
    );
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("2,120,"));
    assert!(row.ends_with(",5"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    fs::write(dir.path().join("bad.toml"), "lambda = 3\n").unwrap();
    assert_eq!(
        scos(dir.path(), &["--config", "bad.toml", "simulate"])
            .status
            .code(),
        Some(2)
    );
    let o = scos(
        dir.path(),
        &[
            "simulate",
            "--code",
            code,
            "--snr",
            "1",
            "--lambda-max-ratio",
            "0.5",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = scos(
        dir.path(),
        &[
            "simulate",
            "--code",
            code,
            "--snr",
            "1",
            "--decoder",
            "dscf",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        scos(dir.path(), &["simulate", "--snr", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn bias_files_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    let run = |out: &str| {
        let o = scos(
            dir.path(),
            &[
                "--out", out, "--seed", "1", "bias", "--code", code, "--snr", "3.5", "--frames",
                "20000",
            ],
        );
        assert!(o.status.success());
        let entries: Vec<_> = fs::read_dir(dir.path().join(out)).unwrap().collect();
        assert_eq!(entries.len(), 1);
        fs::read(entries[0].as_ref().unwrap().path()).unwrap()
    };
    let a = run("a");
    assert!(!a.is_empty());
    assert_eq!(a, run("b"));
}

#[test]
fn auto_bias_is_cached_in_the_output_directory() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    let args = [
        "--out",
        "res",
        "simulate",
        "--code",
        code,
        "--snr",
        "2",
        "--bias",
        "auto",
        "--bias-estimator",
        "bit-channel",
        "--bias-frames",
        "2000",
        "--lambda-max-ratio",
        "2",
        "--frames",
        "400",
        "--min-frame-errors",
        "1000",
    ];
    let first = scos(dir.path(), &args);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let cached: Vec<String> = fs::read_dir(dir.path().join("res"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("bias_"))
        .collect();
    assert_eq!(cached.len(), 1);
    assert!(cached[0].ends_with("_2_bit-channel.csv"));
    let second = scos(dir.path(), &args);
    assert_eq!(stdout(&first), stdout(&second));
    let csv = fs::read_to_string(dir.path().join("res/fer.csv")).unwrap();
    assert_eq!(csv, stdout(&first));
}

#[test]
fn crosscheck_and_histogram() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    let o = scos(
        dir.path(),
        &["ml-crosscheck", "--code", code, "--frames", "2000"],
    );
    assert!(o.status.success());
    for line in stdout(&o).lines().skip(1) {
        assert!(line.contains(",2000,0,0,"), "{line}");
    }
    let o = scos(
        dir.path(),
        &[
            "--out",
            "h",
            "histogram",
            "--code",
            code,
            "--snr",
            "3.5",
            "--frames",
            "1000",
            "--tail",
            "40",
        ],
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("at_or_above_40=0 tail_mass=0"));
}

#[test]
fn vset_saturation_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let code = small_code(dir.path());
    let ok = scos(
        dir.path(),
        &["vset", "--code", code, "--snr", "2", "--frames", "200"],
    );
    assert_eq!(ok.status.code(), Some(0));
    let sat = scos(
        dir.path(),
        &[
            "vset",
            "--code",
            code,
            "--snr",
            "-2",
            "--frames",
            "50",
            "--node-limit",
            "1",
        ],
    );
    assert_eq!(sat.status.code(), Some(3));
}
