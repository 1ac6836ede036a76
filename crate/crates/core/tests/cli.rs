use serde_json::Value;
use std::path::Path;
use ternlab::cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("ternlab").chain(args.iter().copied()).collect();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = invoke(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

const SUBCOMMANDS: [&str; 9] =
    ["system", "eval-u", "verify-sh", "certify", "build-g", "measure", "nevanlinna", "recur", "loglog"];

#[test]
fn system_reports_side_lengths() {
    let r = report(&["system", "--epsilon", "geometric", "--depth", "3"]);
    assert_eq!(r["schema_version"], "1");
    let a: Vec<f64> = serde_json::from_value(r["results"]["a"].clone()).unwrap();
    let expected = [1.0, 4.0, 40.0 / 3.0, 1120.0 / 27.0];
    assert_eq!(a.len(), 4);
    for (x, y) in a.iter().zip(expected) {
        assert!((x - y).abs() < 1e-12);
    }
    assert_eq!(r["results"]["exact_a"][3], "1120/27");
}

#[test]
fn gamma_outside_unit_interval_is_usage_error() {
    let (code, _, err) = invoke(&["certify", "--gamma", "1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("gamma must lie in (0,1)"), "{err}");
}

#[test]
fn verify_sh_level_one() {
    let r = report(&["verify-sh", "--level", "1", "--B", "20", "--grid", "256"]);
    assert!(r["results"]["prop_iii_margin_log"].as_f64().unwrap() > 0.0);
    assert!(r["results"]["prop_ii_margin_log"].as_f64().unwrap() > 0.0);
}

#[test]
fn help_and_schema_for_every_subcommand() {
    for cmd in SUBCOMMANDS {
        let (code, out, _) = invoke(&[cmd, "--help"]);
        assert_eq!(code, 0, "{cmd} --help");
        assert!(out.contains("Usage"));
        let s = report(&[cmd, "--schema"]);
        assert_eq!(s["subcommand"], cmd);
        assert!(!s["results"].as_array().unwrap().is_empty(), "{cmd}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(invoke(&["bogus"]).0, 2);
    assert_eq!(invoke(&["system", "--depth", "many"]).0, 2);
    let (code, _, err) = invoke(&["system", "--epsilon", "fast"]);
    assert_eq!(code, 2);
    assert!(err.contains("--epsilon"));
    assert_eq!(invoke(&["nevanlinna", "--function", "cosh"]).0, 2);
}

#[test]
fn config_defaults_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"epsilon_mode": "geometric", "depth": 2}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let r = report(&["--config", c, "system"]);
    assert_eq!(r["inputs"]["B"], 20.0);
    assert_eq!(r["inputs"]["grid_n"], 256);
    assert_eq!(r["inputs"]["seed"], 0);
    let r = report(&["--config", c, "system", "--B", "3"]);
    assert_eq!(r["inputs"]["B"], 3.0);
    assert_eq!(r["inputs"]["depth"], 2);

    std::fs::write(&cfg, r#"{"depth": 2, "grid": 64}"#).unwrap();
    let (code, _, err) = invoke(&["--config", c, "system"]);
    assert_eq!(code, 2);
    assert!(err.contains("`grid`"), "{err}");
}

#[test]
fn epsilon_file_mode() {
    let dir = tempfile::tempdir().unwrap();
    let eps = dir.path().join("eps.txt");
    std::fs::write(&eps, "0.25, 0.125\n0.0625").unwrap();
    let flag = format!("file:{}", eps.display());
    let r = report(&["system", "--epsilon", &flag, "--depth", "3"]);
    assert_eq!(r["results"]["a"][1], 3.75);
    assert_eq!(invoke(&["system", "--epsilon", &flag, "--depth", "4"]).0, 2);
}

#[test]
fn csv_outputs_have_headers() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.csv");
    report(&["system", "--depth", "2", "--csv", sys.to_str().unwrap()]);
    assert!(std::fs::read_to_string(&sys).unwrap().starts_with("n,epsilon,a,d\n"));

    let prof = dir.path().join("prof.csv");
    report(&["nevanlinna", "--function", "id", "--Rmax", "1", "--profile-out", prof.to_str().unwrap()]);
    assert!(std::fs::read_to_string(&prof).unwrap().starts_with("r,a_r,T\n"));

    let u = dir.path().join("u.csv");
    report(&["eval-u", "--level", "1", "--grid", "64", "--log-domain", "--csv", u.to_str().unwrap()]);
    let text = std::fs::read_to_string(&u).unwrap();
    assert!(text.starts_with("x,y,log_value\n"));
    assert_eq!(text.lines().count(), 64 * 64 + 1);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, out, _) = invoke(&["system", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["subcommand"], "system");
}

#[test]
fn reports_are_byte_stable() {
    let args = ["measure", "--function", "id", "--n", "2", "--samples", "5000", "--seed", "7", "--thresholds", "5,20"];
    let (a, b) = (invoke(&args).1, invoke(&args).1);
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let other = invoke(&["measure", "--function", "id", "--n", "2", "--samples", "5000", "--seed", "8"]).1;
    assert_ne!(a, other);
}

fn grid_file(dir: &Path) -> String {
    let field = ternlab::field::ComplexField::sample(&ternlab::geometry::Square::centered(14.0), 112, |z| z * 0.5);
    let path = dir.join("g.csv");
    field.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    format!("G:{}", path.display())
}

#[test]
fn grid_functions_load() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid_file(dir.path());
    let r = report(&["measure", "--function", &g, "--n", "2", "--samples", "2000", "--thresholds", "1"]);
    let frac = r["results"]["tails"][0]["mc_fraction"].as_f64().unwrap();
    // |z/2| > 1 outside the disk of radius 2.
    let exact = 1.0 - std::f64::consts::PI * 4.0 / (2.0 * 40.0 / 3.0f64).powi(2);
    assert!((frac - exact).abs() < 0.02, "{frac} vs {exact}");
    let r = report(&["nevanlinna", "--function", &g, "--Rmax", "2", "--intervals", "16"]);
    let t = r["results"]["t_rmax"].as_f64().unwrap();
    assert!((t - 0.5 * 2f64.ln()).abs() < 1e-3, "{t}");
}

#[test]
fn recur_default_is_guaranteed() {
    let r = report(&["recur"]);
    assert_eq!(r["results"]["covered"], true);
    assert_eq!(r["results"]["guaranteed"], true);
    let r = report(&["recur", "--w", "3.141592653589793,0"]);
    assert_eq!(r["results"]["guaranteed"], false);
}

#[test]
fn build_g_writes_grids() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&["build-g", "--B", "3", "--depth", "2", "--csv-dir", dir.path().to_str().unwrap()]);
    let levels = r["results"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 2);
    assert_eq!(levels[0]["s0_deviation"], 0.0);
    assert!(dir.path().join("G_2.csv").exists());
}

#[test]
fn loglog_increases() {
    let r = report(&["loglog", "--depth", "3"]);
    assert_eq!(r["results"]["strictly_increasing"], true);
}
