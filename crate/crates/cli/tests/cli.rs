use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn lrmon(out: &Path, args: &[&str]) -> (i32, PathBuf) {
    let o = Command::new(env!("CARGO_BIN_EXE_lrmon")).arg("--output-dir").arg(out).args(args).output().expect("spawn lrmon");
    let dir = PathBuf::from(String::from_utf8_lossy(&o.stdout).trim().to_string());
    (o.status.code().unwrap_or(-1), dir)
}

fn rows(path: PathBuf) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn phase_diagram_marks_phases_and_divergence() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, dir) = lrmon(tmp.path(), &["phase-diagram", "--alpha", "0.4,2", "--gamma", "0.05,1", "--g", "1"]);
    assert_eq!(code, 0);
    let phases: Vec<String> = rows(dir.join("phase_diagram.csv")).into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(phases, ["divergent", "divergent", "broken", "symmetric"]);
    let gc = rows(dir.join("gamma_c.csv"));
    assert_eq!(gc[0][2], "divergent");
    let v: f64 = gc[1][1].parse().unwrap();
    assert!(v > 0.05 && v < 1.0);
    assert!(dir.file_name().unwrap().to_str().unwrap().starts_with("phase-diagram-"));
}

#[test]
fn couplings_table_matches_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, dir) = lrmon(tmp.path(), &["couplings", "--form", "nearest-neighbor", "--g", "0.25", "--l", "64"]);
    assert_eq!(code, 0);
    for r in rows(dir.join("couplings.csv")) {
        let (a, b): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!((a - b).abs() < 1e-12);
    }
    assert!(manifest(&dir)["summary"]["j_hat_0"].as_f64().unwrap() > 0.0);
}

#[test]
fn validation_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let base = ["entropy-fit", "--delta", "1", "--b", "0", "--alpha", "2", "--l", "64", "--t-steps", "32", "--t-phys", "16"];
    let mut args = base.to_vec();
    args.extend(["--sizes", "1,8"]);
    assert_eq!(lrmon(tmp.path(), &args).0, 2);
    let mut args = base.to_vec();
    args.extend(["--sizes", ""]);
    assert_eq!(lrmon(tmp.path(), &args).0, 2);
    assert_eq!(lrmon(tmp.path(), &["mc", "--n", "1", "--l", "2", "--gamma", "1", "--dt", "0.1", "--t-total", "1"]).0, 2);
    assert_eq!(lrmon(tmp.path(), &["couplings", "--form", "power-law", "--g", "0.5", "--alpha", "0.4", "--l", "16"]).0, 2);
    assert_eq!(lrmon(tmp.path(), &["mc", "-n", "1"]).0, 2);
    assert!(fs::read_dir(tmp.path()).map(|d| d.count() == 0).unwrap_or(true));
}

#[test]
fn resource_bound_exits_four() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(lrmon(tmp.path(), &["mc", "--n", "4", "--l", "4", "--gamma", "0", "--t-total", "0.1"]).0, 4);
}

#[test]
fn mc_is_reproducible_and_consistent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["mc", "--n", "1", "--l", "2", "--gamma", "0,1", "--t-total", "0.1", "--n-traj", "40", "--seed", "7", "--replica", "--dump-weights"];
    let (ca, da) = lrmon(a.path(), &args);
    let (cb, db) = lrmon(b.path(), &args);
    assert_eq!((ca, cb), (0, 0));
    assert_eq!(da.file_name(), db.file_name());
    for f in ["manifest.json", "entropy.csv", "consistency.csv", "trend.csv", "replica.csv", "weights.csv"] {
        assert_eq!(fs::read(da.join(f)).unwrap(), fs::read(db.join(f)).unwrap(), "{f}");
    }
    for r in rows(da.join("consistency.csv")) {
        assert!(r[3].parse::<f64>().unwrap().abs() < 1e-12);
    }
    let first = &rows(da.join("entropy.csv"))[0];
    assert!((first[3].parse::<f64>().unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    let m = manifest(&da);
    assert_eq!(m["params"]["seed"], 7);
    assert!(m["summary"]["monotone_trend"].as_bool().unwrap());
}

#[test]
fn code_reports_crossover_and_distance() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, dir) = lrmon(tmp.path(), &["code", "--alpha", "0.7", "--phase", "broken", "--sigma", "0.2", "--n", "4", "--l", "256"]);
    assert_eq!(code, 0);
    let s = &manifest(&dir)["summary"];
    let exact = s["crossover_exact"].as_f64().unwrap();
    assert!(exact < s["a_star"].as_f64().unwrap());
    assert_eq!(s["code_distance"]["kind"], "power-law");
    for r in rows(dir.join("code.csv")) {
        let (a, mi): (f64, f64) = (r[0].parse().unwrap(), r[4].parse().unwrap());
        if a < exact {
            assert!(mi.abs() < 1e-9);
        } else {
            assert!(mi > 0.0);
        }
    }
}

#[test]
fn syk_reports_lambda_and_order() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, dir) = lrmon(tmp.path(), &["syk", "--u", "0.8", "--gamma-tilde", "0.6,1.05"]);
    assert_eq!(code, 0);
    assert_eq!(manifest(&dir)["summary"]["transition_order"], "First");
    let (code, dir) = lrmon(tmp.path(), &["syk", "--gamma-tilde", "0.6"]);
    assert_eq!(code, 0);
    let r = &rows(dir.join("syk.csv"))[0];
    assert!((r[1].parse::<f64>().unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn entropy_fit_reports_area_law_for_short_range_symmetric() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, dir) = lrmon(
        tmp.path(),
        &["entropy-fit", "--delta", "-1", "--b", "0.1", "--alpha", "2", "--l", "64", "--t-steps", "64", "--t-phys", "32", "--sizes", "4,8,12,16"],
    );
    assert_eq!(code, 0);
    let s = &manifest(&dir)["summary"];
    assert_eq!(s["phase"], "symmetric");
    assert_eq!(s["predicted_form"], "area");
    assert!(s["fit"]["exponent"].as_f64().unwrap() <= 0.0);
}
