use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use geoacc_core::report::{build_report, ReportDocument};
use tempfile::TempDir;

const TABLE1_REFERENCE: [f64; 12] = [
    6.94, 7.07, 6.89, 10.98, 10.98, 10.99, 11.65, 6.17, 5.49, 30.33, 8.00, 6.26,
];

fn geoacc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoacc"))
        .args(args)
        .output()
        .unwrap()
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn write_csv(dir: &TempDir, name: &str, rows: &[(f64, f64)]) -> String {
    let mut text = String::from("period,observed,forecast\n");
    for (i, (o, f)) in rows.iter().enumerate() {
        text.push_str(&format!("p{},{o},{f}\n", i + 1));
    }
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn ratios_file(dir: &TempDir, name: &str, ratios: &[f64]) -> String {
    let rows: Vec<(f64, f64)> = ratios.iter().map(|r| (100.0 * r, 100.0)).collect();
    write_csv(dir, name, &rows)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn synthetic_claims_pin_the_binomial_p_value() {
    let path = root().join("data/synthetic_claims.csv");
    let out = geoacc(&["test", path.to_str().unwrap(), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let doc: ReportDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.binomial.statistic, 14.0);
    assert!((doc.binomial.p_value - 0.115_318_3).abs() < 1e-7);
    assert!(!doc.binomial.reject);

    let text = geoacc(&["test", path.to_str().unwrap()]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("0.115318298"), "{text}");
    assert!(text.contains("geometric mean"), "{text}");
}

#[test]
fn exit_code_per_outcome() {
    let dir = TempDir::new().unwrap();
    let centred = ratios_file(
        &dir,
        "ok.csv",
        &[1.02, 0.97, 1.05, 0.96, 1.01, 0.99, 1.03, 0.98, 1.04, 0.95],
    );
    assert_eq!(geoacc(&["test", &centred]).status.code(), Some(0));

    let biased = ratios_file(
        &dir,
        "biased.csv",
        &[1.22, 1.17, 1.25, 1.16, 1.21, 1.19, 1.23, 1.18, 1.24, 1.15],
    );
    assert_eq!(geoacc(&["test", &biased]).status.code(), Some(2));

    let outlier = ratios_file(
        &dir,
        "outlier.csv",
        &[1.02, 0.97, 1.05, 0.96, 1.01, 0.99, 1.03, 0.98, 1.04, 60.0],
    );
    let out = geoacc(&["test", &outlier]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("not run"));
}

#[test]
fn alpha_flag_moves_the_decision() {
    let path = root().join("data/synthetic_claims.csv");
    let path = path.to_str().unwrap();
    assert_eq!(geoacc(&["test", path, "--alpha", "0.001"]).status.code(), Some(0));
    assert_eq!(geoacc(&["test", path, "--alpha", "1.5"]).status.code(), Some(1));
}

#[test]
fn zero_forecast_is_an_input_error_with_row_number() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(
        &dir,
        "zero.csv",
        &[(1.0, 1.0), (2.0, 2.1), (3.0, 0.0), (4.0, 3.9)],
    );
    let out = geoacc(&["test", &path]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("line 4") && msg.contains("forecast"), "{msg}");
}

#[test]
fn identical_series_report_zero_variance() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(
        &dir,
        "same.csv",
        &[(5.0, 5.0), (7.0, 7.0), (9.0, 9.0), (2.0, 2.0)],
    );
    let out = geoacc(&["test", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("zero variance"), "{}", stderr(&out));
}

#[test]
fn other_input_errors() {
    let dir = TempDir::new().unwrap();
    let short = write_csv(&dir, "short.csv", &[(1.0, 1.1), (2.0, 1.9)]);
    assert_eq!(geoacc(&["test", &short]).status.code(), Some(1));

    let header = dir.path().join("header.csv");
    fs::write(&header, "date,actual,predicted\n1,2,3\n").unwrap();
    let out = geoacc(&["test", header.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"));

    assert_eq!(geoacc(&["test", "/nonexistent/file.csv"]).status.code(), Some(1));
    assert_eq!(geoacc(&["test"]).status.code(), Some(1));
    assert_eq!(geoacc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(geoacc(&["--help"]).status.code(), Some(0));
}

#[test]
fn structured_report_round_trips() {
    let path = root().join("data/synthetic_claims.csv");
    let bytes = fs::read(&path).unwrap();
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("report.json");
    let out = geoacc(&[
        "test",
        path.to_str().unwrap(),
        "--format",
        "structured",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let parsed: ReportDocument = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let built = build_report(&bytes, 0.05, env!("CARGO_PKG_VERSION")).unwrap();
    assert_eq!(parsed, built);
    assert_eq!(
        serde_json::to_string_pretty(&parsed).unwrap() + "\n",
        fs::read_to_string(&out_path).unwrap()
    );
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_geoacc"))
        .args(["test", "-", "--format", "structured"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let bytes = fs::read(root().join("data/synthetic_claims.csv")).unwrap();
    child.stdin.take().unwrap().write_all(&bytes).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc: ReportDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.summary.n, 20);
}

#[test]
fn digest_follows_file_bytes() {
    let dir = TempDir::new().unwrap();
    let digest = |path: &str| -> String {
        let out = geoacc(&["test", path, "--format", "structured"]);
        serde_json::from_slice::<ReportDocument>(&out.stdout)
            .unwrap()
            .input_digest
    };
    let rows = [(1.02, 1.0), (0.97, 1.0), (1.05, 1.0), (0.96, 1.0), (1.01, 1.0)];
    let a = write_csv(&dir, "a.csv", &rows);
    let b = write_csv(&dir, "b.csv", &rows);
    assert_eq!(digest(&a), digest(&b));
    let mut changed = fs::read(&b).unwrap();
    changed.extend_from_slice(b"\n");
    fs::write(&b, changed).unwrap();
    assert_ne!(digest(&a), digest(&b));
}

fn write_config(dir: &TempDir, body: &str) -> String {
    let path = dir.path().join("config.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const LOGNORMAL_N20: &str = r#"
seed = 314
[[scenario]]
family = { kind = "lognormal_ratio", theta_r = 1.0, rho = 0.0 }
n = 20
"#;

#[test]
fn power_lognormal_panel_and_determinism() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, LOGNORMAL_N20);
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for out in [&first, &second] {
        let o = geoacc(&["power", "--config", &config, "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = fs::read(&first).unwrap();
    assert_eq!(a, fs::read(&second).unwrap());

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            [
                "beta",
                "reject_rate_accuracy",
                "reject_rate_binomial",
                "se_accuracy",
                "se_binomial",
            ]
            .iter()
            .map(|c| f[col(c)].parse().unwrap())
            .collect()
        })
        .collect();
    assert_eq!(rows.len(), 21);
    for r in rows.iter().filter(|r| (r[0].abs() - 0.2).abs() < 1e-12) {
        let se = (r[3] * r[3] + r[4] * r[4]).sqrt();
        assert!(r[1] - r[2] > 2.0 * se, "beta {}: {} vs {}", r[0], r[1], r[2]);
    }

    let reseeded = dir.path().join("c.csv");
    geoacc(&[
        "power",
        "--config",
        &config,
        "--seed",
        "315",
        "--output",
        reseeded.to_str().unwrap(),
    ]);
    assert_ne!(fs::read(&first).unwrap(), fs::read(&reseeded).unwrap());
}

#[test]
fn power_rejects_invalid_configs() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, LOGNORMAL_N20);
    let o = geoacc(&["power", "--config", &config, "--reps", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("reps"), "{}", stderr(&o));

    let bad_beta = write_config(&dir, &format!("{LOGNORMAL_N20}beta_grid = [0.1, -1.0]\n"));
    assert_eq!(geoacc(&["power", "--config", &bad_beta]).status.code(), Some(1));

    let unknown = write_config(
        &dir,
        "[[scenario]]\nfamily = { kind = \"weibull\", k = 2.0 }\nn = 20\n",
    );
    let o = geoacc(&["power", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("weibull"), "{}", stderr(&o));

    assert_eq!(
        geoacc(&["power", "--config", "/nonexistent.toml"]).status.code(),
        Some(1)
    );
}

#[test]
fn shipped_configs_parse() {
    for name in [
        "lognormal.toml",
        "gamma_fixed_shape.toml",
        "gamma_fixed_rate.toml",
    ] {
        let path = root().join("configs").join(name);
        let dir = TempDir::new().unwrap();
        let out = dir.path().join("out.csv");
        // 1 rep keeps this a parse-and-plumbing check
        let o = geoacc(&[
            "power",
            "--config",
            path.to_str().unwrap(),
            "--reps",
            "1",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        assert_eq!(
            fs::read_to_string(&out).unwrap().lines().count(),
            1 + 6 * 21,
            "{name}"
        );
    }
}

#[test]
fn table1_desk_scale() {
    let out = geoacc(&["table1", "--reps", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    for (i, (row, reference)) in rows.iter().zip(TABLE1_REFERENCE).enumerate() {
        assert_eq!(row[0], (i + 1).to_string());
        let pct: f64 = row[5].parse().unwrap();
        assert!((4.0..=35.0).contains(&pct), "row {}: {pct}", i + 1);
        assert!(
            (pct - reference).abs() <= 2.0,
            "row {}: {pct} vs {reference}",
            i + 1
        );
    }
    assert_eq!(geoacc(&["table1", "--reps", "0"]).status.code(), Some(1));
}
