use std::path::Path;
use std::process::{Command, Output};

use ncsqueeze::export::ExportTable;

fn ncsqueeze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsqueeze"))
        .args(args)
        .output()
        .expect("spawn ncsqueeze")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn read_csv(path: &Path) -> ExportTable {
    ExportTable::from_csv(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn value(table: &ExportTable, column: &str) -> f64 {
    table.column(column).unwrap()[0]
}

#[test]
fn derive_commutative_limit() {
    let o = ncsqueeze(&["derive", "--theta", "0", "--eta", "0", "--omega", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let t = ExportTable::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.meta("verdict"), Some("commutative limit"));
    assert_eq!(value(&t, "gamma"), 0.0);
    assert!((value(&t, "big_omega") - 1.5).abs() < 1e-12);
}

#[test]
fn derive_small_noncommutativity() {
    let o = ncsqueeze(&["derive", "--theta", "0.2", "--eta", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let t = ExportTable::from_csv(&stdout(&o)).unwrap();
    assert!((value(&t, "eps_small") - 0.05).abs() < 1e-12);
    assert!(value(&t, "constraint_residual").abs() < 1e-12);
    assert_eq!(t.meta("verdict"), Some("coupled"));
}

#[test]
fn derive_figure_controls_json() {
    let o = ncsqueeze(&[
        "derive",
        "--eps-ratio",
        "0.1",
        "--big-omega",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t = ExportTable::from_json(&stdout(&o)).unwrap();
    assert_eq!(value(&t, "alpha_sq"), value(&t, "beta_sq"));
    assert!((value(&t, "gamma") - 0.1).abs() < 1e-15);
    assert_eq!(t.meta("verdict"), Some("figure controls"));
}

#[test]
fn invalid_parameters_exit_two_with_reason() {
    let cases: [(&[&str], &str); 4] = [
        (&["derive", "--theta", "1", "--eta", "1"], "SingularMap"),
        (&["audit", "--theta", "2", "--eta", "0.8"], "SingularMap"),
        (&["derive", "--theta", "3", "--eta", "0.1"], "NonPositiveStiffness"),
        (&["derive", "--mass", "-1"], "DomainError"),
    ];
    for (args, reason) in cases {
        let o = ncsqueeze(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(reason), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn figure_controls_conflict_with_physical_flags() {
    let o = ncsqueeze(&["derive", "--eps-ratio", "0.1", "--theta", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_parameter_error() {
    assert_eq!(ncsqueeze(&["derive", "--kappa", "1"]).status.code(), Some(2));
}

#[test]
fn audit_passes() {
    let o = ncsqueeze(&["audit", "--cases", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("PASS").count(), 6);
    assert!(!out.contains("FAIL"));

    let o = ncsqueeze(&["audit", "--theta", "0", "--eta", "0", "--cases", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fixed parameters"));
}

#[test]
fn figure1_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncsqueeze(&["figure1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 8);
    for f in files {
        let t = read_csv(&f.unwrap().path());
        assert_eq!(t.rows.len(), 1024);
        assert_eq!(t.columns, ["tau", "Q1", "Q2", "Pi1", "Pi2"]);
    }

    for ic in ["ic1", "ic2"] {
        let closed = read_csv(&dir.path().join(format!("figure1_{ic}_eps0.csv")));
        let (first, last) = (&closed.rows[0], closed.rows.last().unwrap());
        for c in 1..5 {
            assert!((first[c] - last[c]).abs() < 1e-8);
        }

        let spiral = read_csv(&dir.path().join(format!("figure1_{ic}_eps0.1.csv")));
        let radius = |row: &Vec<f64>| row[1].hypot(row[4]);
        let ratio = radius(spiral.rows.last().unwrap()) / radius(&spiral.rows[0]);
        assert!((ratio - (0.2 * std::f64::consts::PI).exp()).abs() < 1e-10);
        assert!((ratio - 1.874).abs() < 1e-3);
    }
}

#[test]
fn figure2_squeezing_schedule() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &Path, eps: &str| {
        let o = ncsqueeze(&[
            "figure2",
            "--eps-ratio",
            eps,
            "--grid",
            "64",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        read_csv(&dir.join("figure2_metrics.csv"))
    };
    let m1 = run(a.path(), "0.1");
    let m2 = run(b.path(), "0.01");
    let r1 = m1.column("r").unwrap();
    assert_eq!(r1.len(), 7);
    for (k, r) in r1.iter().enumerate() {
        assert!((r - k as f64 * std::f64::consts::PI / 32.0).abs() < 1e-10);
    }
    for (x, y) in r1.iter().zip(m2.column("r").unwrap()) {
        assert!((x - y).abs() < 1e-12);
    }

    let g0 = read_csv(&a.path().join("figure2_k0.csv"));
    assert_eq!(g0.columns, ["Q1", "Pi1", "W"]);
    assert_eq!(g0.rows.len(), 64 * 64);
    let peak = g0.column("W").unwrap().into_iter().fold(0.0, f64::max);
    assert!((peak - 1.0).abs() < 1e-2);
}

#[test]
fn exports_are_byte_identical_on_rerun() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            ncsqueeze(&["figure1", "--samples", "64", "--format", "json", "--out", out])
                .status
                .code(),
            Some(0)
        );
        assert_eq!(
            ncsqueeze(&["figure2", "--grid", "32", "--out", out]).status.code(),
            Some(0)
        );
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 8 + 8);
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn provenance_rerun_reproduces_export() {
    let o = ncsqueeze(&["trajectory", "--theta", "0.3", "--eta", "0.2", "--samples", "16"]);
    let first = stdout(&o);
    let t = ExportTable::from_csv(&first).unwrap();
    let rerun: Vec<&str> = t.meta("rerun").unwrap().split_whitespace().skip(1).collect();
    assert_eq!(stdout(&ncsqueeze(&rerun)), first);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("params.cfg");
    std::fs::write(&cfg, "# test system\ntheta = 0.2\neta = 0.5\nmass = 2\n").unwrap();
    let o = ncsqueeze(&["derive", "--config", cfg.to_str().unwrap(), "--eta", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = ExportTable::from_csv(&stdout(&o)).unwrap();
    assert_eq!(value(&t, "theta"), 0.2);
    assert_eq!(value(&t, "eta"), 0.1);
    assert_eq!(value(&t, "mass"), 2.0);

    std::fs::write(&cfg, "kappa = 1\n").unwrap();
    let o = ncsqueeze(&["derive", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let missing = dir.path().join("absent.cfg");
    let o = ncsqueeze(&["derive", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = ncsqueeze(&["figure1", "--samples", "16", "--out", blocker.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn trajectory_zero_point() {
    let o = ncsqueeze(&[
        "trajectory", "--theta", "0.3", "--eta", "0.2", "--x", "0", "--y", "0", "--samples", "32",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t = ExportTable::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.rows.len(), 32);
    assert!(t.rows.iter().all(|r| r[1..].iter().all(|v| *v == 0.0)));
}

#[test]
fn trajectory_oracle_columns_agree() {
    let o = ncsqueeze(&[
        "trajectory", "--theta", "0.3", "--eta", "0.2", "--pi-x", "0.5", "--samples", "64",
        "--t-end", "20", "--oracle",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = ExportTable::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.columns.len(), 9);
    let scale = t
        .rows
        .iter()
        .flat_map(|r| r[1..5].iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    for row in &t.rows {
        for c in 1..5 {
            assert!((row[c] - row[c + 4]).abs() / scale < 1e-6);
        }
    }
}

#[test]
fn trajectory_closed_orbit() {
    let o = ncsqueeze(&["trajectory", "--x", "0.7", "--pi-y", "-0.4"]);
    let t = ExportTable::from_csv(&stdout(&o)).unwrap();
    let (first, last) = (&t.rows[0], t.rows.last().unwrap());
    for c in 1..5 {
        assert!((first[c] - last[c]).abs() < 1e-8);
    }
}

#[test]
fn trajectory_invalid_range() {
    for args in [
        &["trajectory", "--t-start", "2", "--t-end", "1"][..],
        &["trajectory", "--t-start", "-1"][..],
        &["trajectory", "--samples", "1"][..],
    ] {
        assert_eq!(ncsqueeze(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn trajectory_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncsqueeze(&[
        "trajectory", "--samples", "8", "--format", "json", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("trajectory.json")).unwrap();
    assert_eq!(ExportTable::from_json(&text).unwrap().rows.len(), 8);
}
