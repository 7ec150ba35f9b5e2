use std::f64::consts::PI;
use std::process::{Command, Output};

fn rzl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rzl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

fn sign_changes(v: &[f64]) -> usize {
    v.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
}

#[test]
fn figures_theta_oscillates() {
    let o = rzl(&["figures", "--lambda-max", "30", "--steps", "300"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("lambda,k_perp,k_theta\n"));
    assert_eq!(csv.lines().count(), 301);
    let dev: Vec<f64> = column(&csv, "k_theta").iter().map(|k| k - 1.0).collect();
    assert!(sign_changes(&dev) >= 3);
}

#[test]
fn figures_perp_rises_toward_one() {
    let o = rzl(&["figures"]);
    let k = column(&stdout(&o), "k_perp");
    assert!(k.windows(2).all(|w| w[1] > w[0]));
    // Reference value at λ = 30 from 50-digit quadrature.
    let last = *k.last().unwrap();
    assert!((last - 0.945671088638605).abs() < 1e-9, "{last}");
}

#[test]
fn tangential_curve_has_no_pair_columns() {
    let o = rzl(&["limits-curve", "--u", "0,1", "--steps", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let k = column(&stdout(&o), "k_inf");
    assert!(k.iter().all(|v| v.is_nan()));
}

#[test]
fn converge_density_circle() {
    let o = rzl(&[
        "converge-density",
        "--profile",
        "circle",
        "--z",
        "1+0i",
        "--u",
        "0+0i",
        "--N-list",
        "50,100,200",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.starts_with("N,D_scaled,D_limit,err_D,flagged\n"));
    let d = *column(&csv, "D_scaled").last().unwrap();
    assert!(((d - 1.0 / (12.0 * PI)) * 12.0 * PI).abs() <= 0.01 + 1e-12);
    let summary: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(summary["subcommand"], "converge-density");
    assert_eq!(summary["gates"]["err_D_at_max_N"], "pass");
    let rate = summary["metrics"]["fitted_rate_D"].as_f64().unwrap();
    assert!((rate + 1.0).abs() < 1e-6);
}

#[test]
fn converge_pair_and_flagged_exit() {
    let o = rzl(&["converge-pair", "--profile", "sphere", "--u", "2,0", "--N-list", "20,40,80"]);
    assert_eq!(o.status.code(), Some(4));
    let csv = stdout(&o);
    assert!(csv.starts_with(
        "N,D_scaled,D_limit,err_D,K_scaled,K_limit,err_K,K_tilde,K_tilde_limit,err_K_tilde,flagged\n"
    ));
    let err = column(&csv, "err_K");
    assert!(err.windows(2).all(|w| w[1] < w[0]));
    assert!(stderr(&o).lines().any(|l| l.starts_with("ERROR 4 ")));
}

#[test]
fn error_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["converge-density", "--u", "0", "--N-list", "50,10,200"], 2),
        (&["converge-density", "--u", "0", "--N-list", "5,10"], 2),
        (&["converge-density", "--u", "1+2", "--N-list", "5,10,20"], 2),
        (&["converge-density", "--u", "0", "--N-list", "5,10,20", "--quad-order", "0"], 2),
        (&["converge-pair", "--profile", "sphere", "--u", "0,1", "--N-list", "5,10,20"], 2),
        (&["converge-density", "--profile", "torus", "--u", "0", "--N-list", "5,10,20"], 2),
        (&["mc-circle", "--trials", "10"], 2),
        (&["mc-circle", "--profile", "sphere"], 2),
        (&["norms", "--N", "3", "--out", "/nonexistent-dir/x.txt"], 2),
        (&["converge-density", "--profile", "sphere", "--u", "0,0", "--N-list", "10,20,1300"], 3),
        (&["nonsense"], 2),
    ];
    for (args, code) in cases {
        let o = rzl(args);
        assert_eq!(o.status.code(), Some(*code), "{args:?}: {}", stderr(&o));
        let last = stderr(&o).lines().last().unwrap_or_default().to_string();
        assert!(last.starts_with(&format!("ERROR {code} ")), "{args:?}: {last}");
    }
    assert_eq!(rzl(&["--help"]).status.code(), Some(0));
    assert!(stdout(&rzl(&["--help"])).contains("a+bi"));
}

#[test]
fn byte_identical_reruns() {
    let args = ["mc-circle", "--N", "40", "--trials", "200", "--seed", "9"];
    let (a, b) = (rzl(&args), rzl(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("re_u,im_u,count,empirical,predicted,z_score\n"));
    let args = ["limits-curve", "--profile", "sphere", "--u", "1+0.5i,0.3", "--steps", "20"];
    let (a, b) = (rzl(&args), rzl(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("t,re_beta,im_beta,d_inf,k_inf,k_tilde_inf\n"));
}

#[test]
fn floats_have_seventeen_digits() {
    let o = rzl(&["figures", "--steps", "3"]);
    for line in stdout(&o).lines().skip(1) {
        for field in line.split(',') {
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
        }
    }
}

#[test]
fn norms_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ell.txt");
    let json = dir.path().join("ell.json");
    let p = path.to_str().unwrap();
    let o = rzl(&[
        "norms",
        "--profile",
        "ellipsoid:1,2",
        "--N",
        "6",
        "--out",
        p,
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = rzl_core::szego::NormTable::load(&path).unwrap();
    assert_eq!(table.degree(), 6);
    assert_eq!(table.to_text(), std::fs::read_to_string(&path).unwrap());
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["metrics"]["len"], 28);
}
