use std::path::Path;
use std::process::{Command, Output};

fn pmcgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmcgeom")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn catalog_listing() {
    let out = pmcgeom(&["catalog"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["slice", "vertical_geodesic_cylinder", "circle_cylinder", "cor32_flat_minimal", "perturbed_control"] {
        assert!(text.contains(id), "{id}");
    }
    let out = pmcgeom(&["catalog", "--format", "json"]);
    assert!(json(&out).as_array().unwrap().len() >= 5);
    let out = pmcgeom(&["catalog", "--id", "cor32_flat_minimal", "--format", "json"]);
    let v = json(&out);
    let names: Vec<_> = v[0]["required_params"].as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["kappa", "theta"]);
    assert_eq!(code(&pmcgeom(&["catalog", "--id", "torus"])), 2);
}

#[test]
fn verify_exit_codes() {
    let out = pmcgeom(&["verify", "--surface", "circle_cylinder", "--param", "kappa=1", "--param", "r=0.7853981633974483"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["results"].as_array().unwrap().iter().all(|r| r["passed"] == true));
    assert_eq!(v["surface"]["id"], "circle_cylinder");
    assert_eq!(v["grid"]["nu"], 33);

    let out = pmcgeom(&["verify", "--surface", "perturbed_control", "--nu", "11", "--nv", "11"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let passed = |id: &str| {
        v["results"].as_array().unwrap().iter().find(|r| r["identity_id"] == id).unwrap()["passed"] == true
    };
    assert!(!passed("pmc") && !passed("codazzi_s"));
    assert!(passed("gauss_equation") && passed("ambient_codazzi"));

    let out = pmcgeom(&["verify", "--surface", "slice", "--param", "kappa=-1"]);
    assert_eq!(code(&out), 0);
    let ids: Vec<String> = json(&out)["results"].as_array().unwrap().iter().map(|r| r["identity_id"].as_str().unwrap().to_owned()).collect();
    assert!(ids.contains(&"codazzi_s_tilde".to_owned()) && !ids.contains(&"codazzi_s".to_owned()));
}

#[test]
fn tolerance_override_can_fail_a_run() {
    let args = ["verify", "--surface", "helicoid", "--param", "kappa=1", "--nu", "9", "--nv", "9"];
    assert_eq!(code(&pmcgeom(&args)), 0);
    let mut tight = args.to_vec();
    tight.extend(["--tol", "gauss_equation=1e-300"]);
    assert_eq!(code(&pmcgeom(&tight)), 1);
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        vec!["verify", "--surface", "nosuch"],
        vec!["verify", "--surface", "slice", "--param", "kappa"],
        vec!["verify", "--surface", "slice", "--param", "bogus=1"],
        vec!["verify", "--surface", "slice", "--nu", "3"],
        vec!["verify", "--surface", "slice", "--margin", "0.5"],
        vec!["verify", "--surface", "slice", "--tol", "nope=1"],
        vec!["verify", "--surface", "cor32_flat_minimal", "--param", "theta=2"],
        vec!["field", "--surface", "slice", "--quantity", "area"],
        vec!["field", "--surface", "slice", "--quantity", "detS"],
        vec!["hypothesis", "--surface", "slice", "--theorem", "2.1"],
        vec!["hypothesis", "--surface", "circle_cylinder", "--theorem", "3.1", "--c", "1"],
        vec!["launch"],
    ] {
        assert_eq!(code(&pmcgeom(&args)), 2, "{args:?}");
    }
}

fn read_csv(path: &Path) -> Vec<[f64; 3]> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,v,value"));
    lines
        .map(|l| {
            let x: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            [x[0], x[1], x[2]]
        })
        .collect()
}

#[test]
fn field_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let p = path.to_str().unwrap();
    assert_eq!(code(&pmcgeom(&["field", "--surface", "cor32_flat_minimal", "--quantity", "K", "--output", p])), 0);
    let rows = read_csv(&path);
    assert_eq!(rows.len(), 33 * 33);
    assert!(rows.iter().all(|r| r[2].abs() < 1e-9));
    // row-major with u outer
    assert!(rows[0][0] == rows[1][0] && rows[0][1] < rows[1][1]);

    assert_eq!(code(&pmcgeom(&["field", "--surface", "slice", "--quantity", "normT", "--output", p])), 0);
    assert!(read_csv(&path).iter().all(|r| r[2] == 0.0));

    let args = ["field", "--surface", "circle_cylinder", "--param", "kappa=1", "--param", "r=0.7853981633974483", "--quantity", "detS", "--output", p];
    assert_eq!(code(&pmcgeom(&args)), 0);
    assert!(read_csv(&path).iter().all(|r| (r[2] + 1.0).abs() < 1e-10));

    let out = pmcgeom(&["field", "--surface", "cor32_flat_minimal", "--quantity", "detS", "--tilde", "--nu", "5", "--nv", "5"]);
    assert_eq!(code(&out), 0);
    let first = String::from_utf8(out.stdout).unwrap().lines().nth(1).unwrap().to_owned();
    let det: f64 = first.rsplit(',').next().unwrap().parse().unwrap();
    assert!((det + 0.5_f64.powi(2) / 4.0).abs() < 1e-12, "{det}");
    // 17 significant digits
    assert_eq!(first.split(',').next().unwrap().split('e').next().unwrap().len(), 18);
}

#[test]
fn hypothesis_verdicts() {
    let out = pmcgeom(&["hypothesis", "--theorem", "3.1", "--surface", "circle_cylinder", "--param", "kappa=-1", "--param", "r=0.3", "--eps", "1.0"]);
    assert_eq!(code(&out), 0);
    let v = &json(&out)["verdicts"][0];
    assert_eq!(v["theorem_id"], "3.1");
    assert_eq!(v["status"], "consistent");
    assert_eq!(v["applicable"], true);

    let out = pmcgeom(&["hypothesis", "--theorem", "cor", "--surface", "cor32_flat_minimal", "--eps", "0.5", "--param", "kappa=1", "--param", "theta=1.0471975511965976"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdicts"][0]["status"], "consistent");

    let out = pmcgeom(&["hypothesis", "--theorem", "3.1", "--surface", "circle_cylinder", "--param", "kappa=1", "--param", "r=0.7853981633974483"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdicts"][0]["status"], "inapplicable");

    assert_eq!(code(&pmcgeom(&["hypothesis", "--theorem", "3.1", "--surface", "slice"])), 2);
    assert_eq!(code(&pmcgeom(&["hypothesis", "--theorem", "1.2", "--surface", "perturbed_control"])), 2);
}

#[test]
fn stdout_reports_are_reproducible() {
    let args = ["verify", "--surface", "cor32_flat_minimal", "--param", "theta=0.9", "--nu", "15", "--nv", "11"];
    let (a, b) = (pmcgeom(&args), pmcgeom(&args));
    assert_eq!(a.stdout, b.stdout);
    let args = ["verify", "--surface", "helicoid", "--format", "csv", "--nu", "9", "--nv", "9"];
    assert_eq!(pmcgeom(&args).stdout, pmcgeom(&args).stdout);
}
