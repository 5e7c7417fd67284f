use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use afem::Mesh;

fn afem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afem")).args(args).output().expect("failed to start afem")
}

fn small_run(dir: &Path, tag: &str) -> (Output, PathBuf, PathBuf) {
    let csv = dir.join(format!("{tag}.csv"));
    let mesh = dir.join(format!("{tag}.mesh"));
    let out = afem(&[
        "--problem", "singular-known", "--p", "2", "--mode", "m3p", "--variant", "lambda-osc",
        "--max-levels", "4", "--out", csv.to_str().unwrap(), "--dump-mesh", mesh.to_str().unwrap(),
    ]);
    (out, csv, mesh)
}

#[test]
fn successful_run_writes_csv_and_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv, mesh) = small_run(dir.path(), "a");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 5, "{stdout}");

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 14);
    assert_eq!(header[0], "level");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.len() == 14));

    let last = Mesh::read_file(&mesh).unwrap();
    let n_col = header.iter().position(|h| *h == "nrelements").unwrap();
    assert_eq!(rows[3][n_col].parse::<usize>().unwrap(), last.num_triangles());
    assert!((last.total_area() - 3.0).abs() < 1e-12);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, csv_a, mesh_a) = small_run(dir.path(), "a");
    let (b, csv_b, mesh_b) = small_run(dir.path(), "b");
    assert!(a.status.success() && b.status.success());
    assert_eq!(std::fs::read(csv_a).unwrap(), std::fs::read(csv_b).unwrap());
    assert_eq!(std::fs::read(mesh_a).unwrap(), std::fs::read(mesh_b).unwrap());
}

#[test]
fn invalid_configurations_exit_with_2() {
    for args in [
        &["--problem", "smooth", "--p", "3"][..],
        &["--problem", "smooth", "--theta", "0"],
        &["--problem", "smooth", "--theta", "1.5"],
        &["--problem", "smooth", "--p", "1", "--variant", "lambda-apx"],
        &["--problem", "smooth", "--variant", "mu-osc", "--mode", "m3"],
        &["--problem", "nonsense"],
        &["--problem", "smooth", "--mode", "m4"],
        &[],
    ] {
        let out = afem(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_exits_with_1() {
    let out = afem(&["--problem", "smooth", "--max-levels", "1", "--quiet", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn quiet_suppresses_the_table() {
    let out = afem(&["--problem", "smooth", "--max-levels", "2", "--quiet"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}
