//! End-to-end runs of the `discflux` binary.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{scenario_path, scenario_text};

fn discflux(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_discflux"))
        .args(args)
        .env("DISCFLUX_OUT", out)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_scenario(out: &Path, file: &Path) -> PathBuf {
    let o = discflux(out, &["run", file.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let line = String::from_utf8(o.stdout).unwrap();
    PathBuf::from(line.split(": ").next().unwrap())
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(format!("{name}.toml"));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_writes_solution() {
    let out = tempfile::tempdir().unwrap();
    let file = run_scenario(out.path(), &scenario_path("burgers_periodic_sine"));
    assert!(file.exists());
    let sol = discflux::solution_file::read(&file).unwrap();
    assert_eq!(sol.cells, 200);
    assert!((sol.mass(sol.states.len() - 1) - sol.mass(0)).abs() <= 1e-12);
}

#[test]
fn run_rejects_interface_off_cell_edge() {
    let out = tempfile::tempdir().unwrap();
    let text = scenario_text("lwr_vv_u").replace("cells = 800", "cells = 801");
    let p = write_scenario(out.path(), "off_edge", &text);
    let o = discflux(out.path(), &["run", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("[[interfaces]] 0"), "{}", stderr(&o));
    assert!(stderr(&o).contains("cell edge"));
}

#[test]
fn run_rejects_bad_cfl() {
    let out = tempfile::tempdir().unwrap();
    let p = write_scenario(out.path(), "bad_cfl", &scenario_text("burgers_shock").replace("cfl = 0.45", "cfl = 1.5"));
    let o = discflux(out.path(), &["run", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cfl = 1.5 is out of (0, 1)"), "{}", stderr(&o));
}

#[test]
fn run_reports_parse_errors_with_line_numbers() {
    let out = tempfile::tempdir().unwrap();
    let p = write_scenario(out.path(), "typo", &scenario_text("burgers_shock").replace("t_end = 0.5", "t_end = 0.5\nt_emd = 1.0"));
    let o = discflux(out.path(), &["run", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let e = stderr(&o);
    assert!(e.contains("line") && e.contains("t_emd"), "{e}");
}

#[test]
fn verify_identical_files_pass_with_zero_kato() {
    let out = tempfile::tempdir().unwrap();
    let u = run_scenario(out.path(), &scenario_path("burgers_bad_germ_v"));
    let o = discflux(out.path(), &["verify", u.to_str().unwrap(), u.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let kato = std::fs::read_dir(out.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().ends_with("-kato.csv"))
        .unwrap();
    let text = std::fs::read_to_string(kato).unwrap();
    for row in text.lines().skip(1) {
        let measured: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(measured, 0.0);
    }
}

#[test]
fn verify_shock_against_zero_passes() {
    let out = tempfile::tempdir().unwrap();
    let u = run_scenario(out.path(), &scenario_path("burgers_shock"));
    let v = run_scenario(out.path(), &scenario_path("burgers_zero"));
    let o = discflux(out.path(), &["verify", u.to_str().unwrap(), v.to_str().unwrap(), "--klevels", "9"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let summary = std::fs::read_dir(out.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().ends_with("-summary.toml"))
        .unwrap();
    let name = summary.file_name().unwrap().to_string_lossy().into_owned();
    let sol = discflux::solution_file::read(&u).unwrap();
    assert!(name.contains(&sol.fingerprint[..16]), "{name}");
    let table: toml::Table = std::fs::read_to_string(&summary).unwrap().parse().unwrap();
    assert_eq!(table["pass"].as_bool(), Some(true));
    assert_eq!(table["entropy_u"]["k_levels"].as_integer(), Some(9));
    assert!(table["ledger"]["tol_ledger"].as_float().unwrap() > 0.0);
}

#[test]
fn verify_flags_non_dissipative_coupling() {
    let out = tempfile::tempdir().unwrap();
    let u = run_scenario(out.path(), &scenario_path("burgers_bad_germ_u"));
    let v = run_scenario(out.path(), &scenario_path("burgers_bad_germ_v"));
    let o = discflux(out.path(), &["verify", u.to_str().unwrap(), v.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("W > 0"));
}

#[test]
fn verify_rejects_fingerprint_mismatch() {
    let out = tempfile::tempdir().unwrap();
    let u = run_scenario(out.path(), &scenario_path("burgers_bad_germ_u"));
    let v = run_scenario(out.path(), &scenario_path("burgers_periodic_sine"));
    let o = discflux(out.path(), &["verify", u.to_str().unwrap(), v.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn verify_rejects_cone_outside_domain() {
    let out = tempfile::tempdir().unwrap();
    let u = run_scenario(out.path(), &scenario_path("burgers_bad_germ_v"));
    let o = discflux(out.path(), &["verify", u.to_str().unwrap(), u.to_str().unwrap(), "--R", "5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn germ_command_verdicts() {
    let out = tempfile::tempdir().unwrap();
    let o = discflux(out.path(), &["germ", scenario_path("lwr_vv_u").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = discflux(out.path(), &["germ", scenario_path("burgers_bad_germ_u").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("(-1, 1) vs (0, 0)"));
    let single = scenario_text("burgers_bad_germ_u").replace("pairs = [[-1.0, 1.0], [0.0, 0.0]]", "pairs = [[1.0, -1.0]]");
    let p = write_scenario(out.path(), "single", &single);
    let o = discflux(out.path(), &["germ", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("max W = 0e0"));
    let empty = scenario_text("burgers_bad_germ_u").replace("pairs = [[-1.0, 1.0], [0.0, 0.0]]", "pairs = []");
    let p = write_scenario(out.path(), "empty", &empty);
    let o = discflux(out.path(), &["germ", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("empty"), "{}", stderr(&o));
}

#[test]
fn traces_command_prints_rows() {
    let out = tempfile::tempdir().unwrap();
    let src = scenario_text("lwr_germ_pair_steady").replace("cells = 400", "cells = 200");
    let p = write_scenario(out.path(), "steady", &src);
    let sol = run_scenario(out.path(), &p);
    let o = discflux(out.path(), &["traces", sol.to_str().unwrap(), "--interface", "0", "--window", "0.4,0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "j,t1,t2,r_k,u_minus_k,u_plus_k,converged,rh_residual");
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|r| r.contains(",true,")));
    let o = discflux(out.path(), &["traces", sol.to_str().unwrap(), "--interface", "4"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = run_scenario(a.path(), &scenario_path("lwr_affine_traces"));
    let fb = run_scenario(b.path(), &scenario_path("lwr_affine_traces"));
    assert_eq!(std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap());
}

#[test]
fn help_and_usage_errors() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(code(&discflux(out.path(), &["--help"])), 0);
    assert_eq!(code(&discflux(out.path(), &["frobnicate"])), 2);
    assert_eq!(code(&discflux(out.path(), &["run", "/nonexistent.toml"])), 2);
}
