//! The `rzl` command-line driver.
//!
//! Every subcommand writes CSV (header row, floats with 17 significant
//! digits) to `--out` or stdout and a one-object JSON summary
//! `{subcommand, config, metrics, gates}` to `--json` or stderr.
//!
//! Exit codes: 0 success, 2 bad input or I/O, 3 numerical failure, 4 a
//! convergence or statistical gate failed. Failures also print one line
//! `ERROR <code> <message>` on stderr.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, ErrorClass, Result};
use crate::geometry::{beta, geometry_jet, BoundaryPoint, GeometryJet, RadialProfile};
use crate::kacrice::{convergence_table, ConvergenceReport, FLAG_THRESHOLD};
use crate::limits::{density_limit, pair_limit, LimitGeometry, TOL_BETA};
use crate::montecarlo::{estimate_density, EnsembleConfig};
use crate::szego::{compute_norms, DEFAULT_QUAD_ORDER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_GATE: i32 = 4;

const COMPLEX_HELP: &str = "Complex numbers are written a+bi or a-bi without spaces \
(also a, bi, i); vectors are comma-separated, e.g. --z 1+0i,0+0i.";

#[derive(Debug, Parser)]
#[command(name = "rzl", version, about = "Zero statistics of random polynomials on Reinhardt domains", after_help = COMPLEX_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized pair correlations on the 3-sphere at (1,0), normal and rotated directions.
    Figures(FiguresArgs),
    /// Limit density and pair correlation along t·u.
    LimitsCurve(CurveArgs),
    /// Scaled finite-degree density against its limit.
    ConvergeDensity(ConvergeArgs),
    /// Scaled finite-degree pair correlation against its limit.
    ConvergePair(ConvergeArgs),
    /// Monte Carlo zero density near a point of a one-variable profile.
    McCircle(McArgs),
    /// Monomial norm table.
    Norms(NormsArgs),
}

#[derive(Debug, Args, Clone)]
pub struct Output {
    /// CSV destination (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary destination (default stderr).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct FiguresArgs {
    #[arg(long, default_value_t = 0.1)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 30.0)]
    pub lambda_max: f64,
    /// Number of grid points, both ends included.
    #[arg(long, default_value_t = 300)]
    pub steps: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Clone)]
pub struct CurveArgs {
    #[arg(long, default_value = "sphere")]
    pub profile: String,
    /// Boundary point; projected radially onto the boundary.
    #[arg(long)]
    pub z: Option<String>,
    /// Direction u.
    #[arg(long)]
    pub u: String,
    #[arg(long, default_value_t = 0.1)]
    pub t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Clone)]
pub struct ConvergeArgs {
    #[arg(long, default_value = "circle")]
    pub profile: String,
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long)]
    pub u: String,
    /// Ascending degrees, at least three, e.g. 50,100,200.
    #[arg(long = "N-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Clone)]
pub struct McArgs {
    #[arg(long, default_value = "circle")]
    pub profile: String,
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long = "N", default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 5.25)]
    pub half_width: f64,
    /// Bins per axis.
    #[arg(long, default_value_t = 21)]
    pub bins: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Clone)]
pub struct NormsArgs {
    #[arg(long, default_value = "circle")]
    pub profile: String,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    #[command(flatten)]
    pub output: Output,
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim();
    let bad = || Error::Parse(format!("bad complex number '{s}' (expected a+bi)"));
    if t.is_empty() {
        return Err(bad());
    }
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    let imag = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => num(x),
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(num(t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let v = match split {
        Some(k) => Complex64::new(num(&body[..k])?, imag(&body[k..])?),
        None => Complex64::new(0.0, imag(body)?),
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(bad());
    }
    Ok(v)
}

pub fn parse_complex_vec(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(parse_complex).collect()
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_c(z: &Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{:.16e}-{:.16e}i", z.re, -z.im)
    } else {
        format!("{:.16e}+{:.16e}i", z.re, z.im)
    }
}

fn fmt_cv(v: &[Complex64]) -> String {
    v.iter().map(fmt_c).collect::<Vec<_>>().join(",")
}

/// Outcome of a subcommand: CSV body, JSON summary and gates.
struct Report {
    csv: String,
    config: Value,
    metrics: Map<String, Value>,
    gates: Vec<(String, bool)>,
    /// Whether a failed gate sets exit code 4.
    gates_bind: bool,
}

fn resolve_point(profile: &RadialProfile, z: Option<&str>) -> Result<(BoundaryPoint, GeometryJet)> {
    let raw = match z {
        Some(s) => parse_complex_vec(s)?,
        None => {
            let mut v = vec![Complex64::new(0.0, 0.0); profile.dim()];
            v[0] = Complex64::new(1.0, 0.0);
            if !profile.is_sphere() {
                v.iter_mut().for_each(|c| *c = Complex64::new(1.0, 0.0));
            }
            v
        }
    };
    let point = BoundaryPoint::project(profile, &raw)?;
    let jet = geometry_jet(profile, &point)?;
    Ok((point, jet))
}

fn check_grid(min: f64, max: f64, steps: usize) -> Result<()> {
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(Error::InvalidInput(format!("grid needs finite min < max, got [{min}, {max}]")));
    }
    if steps < 2 {
        return Err(Error::InvalidInput("grid needs at least two steps".into()));
    }
    Ok(())
}

fn grid(min: f64, max: f64, steps: usize) -> impl Iterator<Item = f64> {
    (0..steps).map(move |k| min + (max - min) * k as f64 / (steps - 1) as f64)
}

fn sign_changes(v: &[f64]) -> usize {
    v.windows(2).filter(|w| (w[0] > 0.0 && w[1] < 0.0) || (w[0] < 0.0 && w[1] > 0.0)).count()
}

fn figures(a: &FiguresArgs) -> Result<Report> {
    check_grid(a.lambda_min, a.lambda_max, a.steps)?;
    if a.lambda_min <= 0.0 {
        return Err(Error::InvalidInput("lambda-min must be positive".into()));
    }
    let geom = LimitGeometry::unit_sphere(1);
    let mut csv = String::from("lambda,k_perp,k_theta\n");
    let mut k_perp = Vec::with_capacity(a.steps);
    let mut k_theta = Vec::with_capacity(a.steps);
    for lam in grid(a.lambda_min, a.lambda_max, a.steps) {
        let kp = pair_limit(&geom, Complex64::new(lam, 0.0))?.k_tilde_inf;
        let kt = pair_limit(&geom, Complex64::new(0.0, lam))?.k_tilde_inf;
        csv.push_str(&format!("{},{},{}\n", fmt_f(lam), fmt_f(kp), fmt_f(kt)));
        k_perp.push(kp);
        k_theta.push(kt);
    }
    let last = *k_perp.last().unwrap();
    let changes = sign_changes(&k_theta.iter().map(|k| k - 1.0).collect::<Vec<_>>());
    let mut metrics = Map::new();
    metrics.insert("k_perp_first".into(), json!(k_perp[0]));
    metrics.insert("k_perp_last".into(), json!(last));
    metrics.insert("k_theta_sign_changes".into(), json!(changes));
    Ok(Report {
        csv,
        config: json!({"profile": "sphere", "z": "1+0i,0+0i", "lambda_min": a.lambda_min,
                        "lambda_max": a.lambda_max, "steps": a.steps}),
        metrics,
        gates: vec![
            ("k_perp_near_one_at_max".into(), (last - 1.0).abs() < 0.05),
            ("k_theta_oscillates".into(), changes >= 3),
        ],
        gates_bind: false,
    })
}

fn limits_curve(a: &CurveArgs) -> Result<Report> {
    check_grid(a.t_min, a.t_max, a.steps)?;
    let profile = RadialProfile::parse(&a.profile)?;
    let (point, jet) = resolve_point(&profile, a.z.as_deref())?;
    let u = parse_complex_vec(&a.u)?;
    if u.len() != profile.dim() {
        return Err(Error::InvalidInput(format!("u needs {} components", profile.dim())));
    }
    let geom = jet.limit_geometry()?;
    let b1 = beta(&jet, &u);
    let mut csv = String::from("t,re_beta,im_beta,d_inf,k_inf,k_tilde_inf\n");
    for t in grid(a.t_min, a.t_max, a.steps) {
        let b = b1 * t;
        let d = density_limit(&geom, b)?;
        let (k, kt) = if b.norm() >= TOL_BETA {
            let p = pair_limit(&geom, b)?;
            (p.k_inf, p.k_tilde_inf)
        } else {
            (f64::NAN, f64::NAN)
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f(t),
            fmt_f(b.re),
            fmt_f(b.im),
            fmt_f(d),
            fmt_f(k),
            fmt_f(kt)
        ));
    }
    let mut metrics = Map::new();
    metrics.insert("beta_unit".into(), json!([b1.re, b1.im]));
    metrics.insert("tangential".into(), json!(b1.norm() < TOL_BETA));
    Ok(Report {
        csv,
        config: json!({"profile": a.profile, "z": fmt_cv(point.z()), "u": fmt_cv(&u),
                        "t_min": a.t_min, "t_max": a.t_max, "steps": a.steps}),
        metrics,
        gates: vec![],
        gates_bind: true,
    })
}

fn convergence_csv(rep: &ConvergenceReport, pair: bool) -> String {
    let mut csv = String::from(if pair {
        "N,D_scaled,D_limit,err_D,K_scaled,K_limit,err_K,K_tilde,K_tilde_limit,err_K_tilde,flagged\n"
    } else {
        "N,D_scaled,D_limit,err_D,flagged\n"
    });
    for r in &rep.rows {
        csv.push_str(&format!("{},{},{},{}", r.n, fmt_f(r.d_scaled), fmt_f(r.d_limit), fmt_f(r.err_d)));
        if let Some(p) = r.pair {
            for x in [p.k_scaled, p.k_limit, p.err_k, p.k_tilde, p.k_tilde_limit, p.err_k_tilde] {
                csv.push(',');
                csv.push_str(&fmt_f(x));
            }
        }
        csv.push_str(&format!(",{}\n", u8::from(r.flagged)));
    }
    csv
}

fn converge(a: &ConvergeArgs, pair: bool) -> Result<Report> {
    let profile = RadialProfile::parse(&a.profile)?;
    let (point, jet) = resolve_point(&profile, a.z.as_deref())?;
    let u = parse_complex_vec(&a.u)?;
    if u.len() != profile.dim() {
        return Err(Error::InvalidInput(format!("u needs {} components", profile.dim())));
    }
    if a.n_list.len() < 3 || a.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "N-list must be strictly ascending with at least three entries".into(),
        ));
    }
    if a.n_list[0] == 0 {
        return Err(Error::InvalidInput("degrees must be positive".into()));
    }
    if pair && beta(&jet, &u).norm() < TOL_BETA {
        return Err(Error::DegenerateDirection { beta_abs: beta(&jet, &u).norm() });
    }
    let table = compute_norms(&profile, *a.n_list.last().unwrap(), a.quad_order)?;
    let rep = convergence_table(&table, &jet, point.z(), &u, &a.n_list, pair)?;
    let last = rep.rows.last().unwrap();
    let mut metrics = Map::new();
    metrics.insert("fitted_rate_D".into(), json!(rep.rate_d));
    metrics.insert("last_err_D".into(), json!(last.err_d));
    let mut gates = vec![("err_D_at_max_N".to_string(), last.err_d <= FLAG_THRESHOLD)];
    if let Some(p) = last.pair {
        metrics.insert("fitted_rate_K".into(), json!(rep.rate_k));
        metrics.insert("fitted_rate_K_tilde".into(), json!(rep.rate_k_tilde));
        metrics.insert("last_err_K".into(), json!(p.err_k));
        metrics.insert("last_err_K_tilde".into(), json!(p.err_k_tilde));
        gates.push(("err_K_at_max_N".into(), p.err_k <= FLAG_THRESHOLD));
        gates.push(("err_K_tilde_at_max_N".into(), p.err_k_tilde <= FLAG_THRESHOLD));
    }
    metrics.insert("flagged_rows".into(), json!(rep.rows.iter().filter(|r| r.flagged).count()));
    Ok(Report {
        csv: convergence_csv(&rep, pair),
        config: json!({"profile": a.profile, "z": fmt_cv(point.z()), "u": fmt_cv(&u),
                        "N_list": a.n_list, "quad_order": a.quad_order}),
        metrics,
        gates,
        gates_bind: true,
    })
}

fn mc(a: &McArgs) -> Result<Report> {
    let profile = RadialProfile::parse(&a.profile)?;
    if profile.m() != 0 {
        return Err(Error::InvalidInput("mc-circle needs a one-variable profile".into()));
    }
    let (point, jet) = resolve_point(&profile, a.z.as_deref())?;
    let mut cfg = EnsembleConfig::new(a.n, a.trials, a.seed);
    cfg.window = crate::montecarlo::Window::square(a.half_width);
    cfg.bins_re = a.bins;
    cfg.bins_im = a.bins;
    cfg.validate()?;
    let table = compute_norms(&profile, a.n, DEFAULT_QUAD_ORDER)?;
    let (hist, rep) = estimate_density(&cfg, &table, &jet, point.z()[0])?;
    let mut metrics = Map::new();
    metrics.insert("center_z_score".into(), json!(rep.center_z_score));
    metrics.insert("fraction_abs_z_below_3".into(), json!(rep.fraction_within_3));
    metrics.insert("mean_roots_per_trial".into(), json!(rep.mean_roots_per_trial));
    metrics.insert("accepted_trials".into(), json!(rep.accepted_trials));
    metrics.insert("discarded_trials".into(), json!(rep.discarded_trials));
    metrics.insert("max_conjugate_pair_z".into(), json!(rep.max_conjugate_z));
    metrics.insert("total_count".into(), json!(hist.total_count()));
    Ok(Report {
        csv: hist.to_csv(),
        config: json!({"profile": a.profile, "z": fmt_cv(point.z()), "N": a.n, "trials": a.trials,
                        "seed": a.seed, "half_width": a.half_width, "bins": a.bins}),
        metrics,
        gates: vec![
            ("center_bin_within_3_sigma".into(), rep.center_within_3()),
            ("bins_within_3_sigma_at_least_90pct".into(), rep.fraction_within_3 >= 0.9),
        ],
        gates_bind: true,
    })
}

fn norms(a: &NormsArgs) -> Result<Report> {
    let profile = RadialProfile::parse(&a.profile)?;
    let table = compute_norms(&profile, a.n, a.quad_order)?;
    let mut metrics = Map::new();
    metrics.insert("len".into(), json!(table.len()));
    metrics.insert("total_mass".into(), json!(table.total_mass()));
    Ok(Report {
        csv: table.to_text(),
        config: json!({"profile": a.profile, "N": a.n, "quad_order": a.quad_order}),
        metrics,
        gates: vec![],
        gates_bind: true,
    })
}

fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Precondition | ErrorClass::Io => EXIT_PRECONDITION,
        ErrorClass::Numerical => EXIT_NUMERICAL,
    }
}

fn emit(dest: Option<&PathBuf>, text: &str, fallback: &mut dyn Write) -> Result<()> {
    match dest {
        Some(p) => fs::write(p, text)?,
        None => fallback.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (name, result, out, json_dest) = match &cli.command {
        Command::Figures(a) => ("figures", figures(a), a.output.out.clone(), a.output.json.clone()),
        Command::LimitsCurve(a) => {
            ("limits-curve", limits_curve(a), a.output.out.clone(), a.output.json.clone())
        }
        Command::ConvergeDensity(a) => {
            ("converge-density", converge(a, false), a.output.out.clone(), a.output.json.clone())
        }
        Command::ConvergePair(a) => {
            ("converge-pair", converge(a, true), a.output.out.clone(), a.output.json.clone())
        }
        Command::McCircle(a) => ("mc-circle", mc(a), a.output.out.clone(), a.output.json.clone()),
        Command::Norms(a) => ("norms", norms(a), a.output.out.clone(), a.output.json.clone()),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(stderr, "ERROR {code} {}", e.to_string().replace('\n', " "));
            return code;
        }
    };
    let gates: Map<String, Value> =
        report.gates.iter().map(|(k, ok)| (k.clone(), json!(if *ok { "pass" } else { "fail" }))).collect();
    let summary = json!({
        "subcommand": name,
        "config": report.config,
        "metrics": report.metrics,
        "gates": gates,
    });
    let written = emit(out.as_ref(), &report.csv, stdout)
        .and_then(|_| emit(json_dest.as_ref(), &format!("{summary}\n"), stderr));
    if let Err(e) = written {
        let code = exit_code(&e);
        let _ = writeln!(stderr, "ERROR {code} {e}");
        return code;
    }
    let failed: Vec<&str> = report.gates.iter().filter(|g| !g.1).map(|g| g.0.as_str()).collect();
    if report.gates_bind && !failed.is_empty() {
        let _ = writeln!(stderr, "ERROR {EXIT_GATE} gate failed: {}", failed.join(", "));
        return EXIT_GATE;
    }
    EXIT_OK
}

/// Parses arguments and runs; usage errors print `ERROR 2 ...`.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let _ = write!(stderr, "{}", e.render());
            let first = e.to_string().lines().next().unwrap_or("usage error").to_string();
            let _ = writeln!(stderr, "ERROR {EXIT_PRECONDITION} {first}");
            EXIT_PRECONDITION
        }
    }
}
