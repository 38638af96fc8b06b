//! Command-line front end: configuration, pipeline orchestration and
//! bit-stable file output.
//!
//! Exit codes: `0` success, `2` forbidden/degenerate exponent, `3` no
//! convergence, `4` invalid configuration, `5` internal solver failure.
//! All outputs are deterministic for a fixed configuration: the parallel
//! sweep merges in grid order and numbers are printed with 17 significant
//! digits.

use crate::analysis::{
    fast_decay_pipeline, nonexistence_certificate, pohozaev_residual, CertificateVerdict,
    ExteriorOptions, FastDecayOptions, StarDomain,
};
use crate::domain_map::{DomainMapSpec, MapFamily};
use crate::perturbed::{contraction_solve, PerturbedOptions};
use crate::problem::{ProblemParams, SphericalSpectrum};
use crate::radial_shoot::{ode_residual_sup, solve_henon_radial_n};
use crate::spectrum::{find_pk, nondegeneracy_certificate, sweep_nu, NuOptions};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "henon",
    about = "Radial solutions, linearized spectra and perturbed-domain solvers \
             for the Henon equation -Δu = |x|^α u^p",
    version
)]
struct Cli {
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for parallel sweeps (default: HENON_WORKERS or all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed recorded in outputs and used by randomized diagnostics.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optional key=value config file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the radial problem on the unit ball.
    Radial(RadialArgs),
    /// Sweep the weighted first eigenvalue ν(p) with both discretizations.
    Nu(NuArgs),
    /// Locate the degenerate exponents p_k (roots of ν(p) = -λ_k).
    Pk(PkArgs),
    /// Mode-by-mode nondegeneracy certificate at a single exponent.
    CheckDegeneracy(CheckArgs),
    /// Contraction solve on a perturbed ball.
    Perturbed(PerturbedArgs),
    /// Fast-decay exterior solution via the Kelvin transform.
    Exterior(ExteriorArgs),
    /// Pohozaev identity residual for the radial solution.
    Pohozaev(CheckArgs),
    /// Pohozaev-type nonexistence certificate for a shifted domain.
    CertifyNonexistence(CertifyArgs),
}

#[derive(Args, Debug, Clone)]
struct RadialArgs {
    #[arg(long = "N")]
    n_dim: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Default grid nodes of the stored profile.
    #[arg(long)]
    grid_nodes: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct NuArgs {
    #[arg(long = "N")]
    n_dim: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct PkArgs {
    #[arg(long = "N")]
    n_dim: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct CheckArgs {
    #[arg(long = "N")]
    n_dim: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct PerturbedArgs {
    #[arg(long = "N")]
    n_dim: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// dilation | translation | bump:c0,c1,c2,c3,c4
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    rnodes: Option<usize>,
    #[arg(long)]
    maxiter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ExteriorArgs {
    #[arg(long = "N")]
    n_dim: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    smax: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Optional perturbed variant: map family as for `perturbed`.
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct CertifyArgs {
    #[arg(long = "N")]
    n_dim: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Shift magnitude |x_m| of the domain.
    #[arg(long)]
    shift: Option<f64>,
    /// ball | graph:c0,c1,... (radial graph ρ(μ) = Σ c_j μ^j)
    #[arg(long)]
    domain: Option<String>,
}

/// Parse and execute; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = e.print();
            return code;
        }
    };
    let workers = cli
        .workers
        .or_else(|| {
            std::env::var("HENON_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build worker pool: {e}");
            return 5;
        }
    };
    let config = match cli.config.as_deref().map(read_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return 4;
        }
    };
    let outcome = pool.install(|| dispatch(&cli, &config));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code of an error, per the contract in the module docs.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ForbiddenExponent { .. } => 2,
        Error::NoConvergence { .. } | Error::TrustBall { .. } => 3,
        Error::InvalidParams(_) | Error::Supercritical { .. } | Error::Io(_) => 4,
        Error::Integration(_) | Error::Eigensolve(_) | Error::MapInversion(_) => 5,
    }
}

type Config = HashMap<String, String>;

fn read_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidParams(format!(
                "config line {} is not key=value: {line:?}",
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn cfg_parse<T: std::str::FromStr>(config: &Config, key: &str) -> Result<Option<T>> {
    match config.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            Error::InvalidParams(format!("config key {key} has unparsable value {raw:?}"))
        }),
    }
}

/// Flag value, then config file, then default.
fn resolve<T: std::str::FromStr + Copy>(
    flag: Option<T>,
    config: &Config,
    key: &str,
    default: Option<T>,
) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(v) = cfg_parse::<T>(config, key)? {
        return Ok(v);
    }
    default.ok_or_else(|| Error::InvalidParams(format!("missing required parameter --{key}")))
}

fn parse_map(raw: &str) -> Result<MapFamily> {
    let raw = raw.trim();
    if raw == "dilation" {
        return Ok(MapFamily::Dilation);
    }
    if raw == "translation" {
        return Ok(MapFamily::Translation {
            direction: [0.0, 0.0, 1.0],
        });
    }
    if raw == "bump" {
        return Ok(MapFamily::Bump {
            coeffs: [1.0, 0.0, 0.0, 0.0, 0.0],
        });
    }
    if let Some(list) = raw.strip_prefix("bump:") {
        let parts: Vec<&str> = list.split(',').collect();
        if parts.len() > 5 || parts.is_empty() {
            return Err(Error::InvalidParams(
                "bump map takes 1..=5 comma-separated coefficients".into(),
            ));
        }
        let mut coeffs = [0.0; 5];
        for (i, part) in parts.iter().enumerate() {
            coeffs[i] = part.trim().parse().map_err(|_| {
                Error::InvalidParams(format!("bad bump coefficient {part:?}"))
            })?;
        }
        return Ok(MapFamily::Bump { coeffs });
    }
    Err(Error::InvalidParams(format!(
        "unknown map family {raw:?} (expected dilation | translation | bump:c0,..,c4)"
    )))
}

fn parse_domain(raw: &str) -> Result<StarDomain> {
    let raw = raw.trim();
    if raw == "ball" {
        return Ok(StarDomain::Ball);
    }
    if let Some(list) = raw.strip_prefix("graph:") {
        let coeffs: std::result::Result<Vec<f64>, _> =
            list.split(',').map(|v| v.trim().parse()).collect();
        return Ok(StarDomain::RadialGraph {
            coeffs: coeffs
                .map_err(|_| Error::InvalidParams("bad graph coefficients".into()))?,
        });
    }
    Err(Error::InvalidParams(format!(
        "unknown domain {raw:?} (expected ball | graph:c0,c1,...)"
    )))
}

fn dispatch(cli: &Cli, config: &Config) -> Result<()> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Radial(a) => run_radial(cli, config, a),
        Command::Nu(a) => run_nu(cli, config, a),
        Command::Pk(a) => run_pk(cli, config, a),
        Command::CheckDegeneracy(a) => run_check(cli, config, a),
        Command::Perturbed(a) => run_perturbed(cli, config, a),
        Command::Exterior(a) => run_exterior(cli, config, a),
        Command::Pohozaev(a) => run_pohozaev(cli, config, a),
        Command::CertifyNonexistence(a) => run_certify(cli, config, a),
    }
}

fn run_radial(cli: &Cli, config: &Config, a: &RadialArgs) -> Result<()> {
    let n_dim: u32 = resolve(a.n_dim, config, "N", None)?;
    let alpha: f64 = resolve(a.alpha, config, "alpha", None)?;
    let p: f64 = resolve(a.p, config, "p", None)?;
    let tol: f64 = resolve(a.tol, config, "tol", Some(1e-10))?;
    let nodes: usize = resolve(a.grid_nodes, config, "grid_nodes", Some(2001))?;
    let params = ProblemParams::new(n_dim, alpha, p)?;
    let profile = solve_henon_radial_n(&params, tol, nodes)?;
    let residual = ode_residual_sup(&profile, 0.01, 0.99);

    let mut csv = String::from("r,u,du\n");
    for i in 0..profile.len() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            fmt(profile.grid[i]),
            fmt(profile.values[i]),
            fmt(profile.dvalues[i])
        );
    }
    write_file(&cli.out.join("radial.csv"), &csv)?;

    let json = JsonObject::new()
        .int("N", n_dim as i64)
        .num("alpha", alpha)
        .num("p", p)
        .num("N_alpha", params.fractional_dimension())
        .num("R0", profile.first_zero.unwrap_or(f64::NAN))
        .num("central_value", profile.central_value)
        .num("residual_sup", residual)
        .int("seed", cli.seed as i64)
        .finish();
    write_file(&cli.out.join("radial.json"), &json)?;
    println!(
        "radial: N={n_dim} alpha={alpha} p={p}: central value {:.6}, residual {:.3e}",
        profile.central_value, residual
    );
    Ok(())
}

fn nu_grid(params: &ProblemParams, p_min: f64, p_max: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 || p_min >= p_max || p_min <= 1.0 || p_max >= params.critical_exponent() {
        return Err(Error::InvalidParams(format!(
            "sweep range [{p_min}, {p_max}] with {samples} samples is invalid for \
             p_alpha = {}",
            params.critical_exponent()
        )));
    }
    Ok((0..samples)
        .map(|i| p_min + (p_max - p_min) * i as f64 / (samples - 1) as f64)
        .collect())
}

fn run_nu(cli: &Cli, config: &Config, a: &NuArgs) -> Result<()> {
    let n_dim: u32 = resolve(a.n_dim, config, "N", None)?;
    let alpha: f64 = resolve(a.alpha, config, "alpha", None)?;
    let probe = ProblemParams::new(n_dim, alpha, 2.0)?;
    let p_lo_default = (n_dim as f64 + 2.0) / (n_dim as f64 - 2.0);
    let p_min: f64 = resolve(a.p_min, config, "p_min", Some(p_lo_default))?;
    let p_max: f64 = resolve(
        a.p_max,
        config,
        "p_max",
        Some(probe.critical_exponent() - 1e-3),
    )?;
    let samples: usize = resolve(a.samples, config, "samples", Some(400))?;
    let tol: f64 = resolve(a.tol, config, "tol", Some(1e-10))?;
    let grid = nu_grid(&probe, p_min, p_max, samples)?;
    let opts = NuOptions {
        shoot_tol: tol,
        ..NuOptions::default()
    };
    let curve = sweep_nu(n_dim, alpha, &grid, &opts);

    let mut csv = String::from("p,nu,nu_direct,gap\n");
    for s in &curve.samples {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt(s.p),
            fmt(s.nu),
            fmt(s.nu_direct),
            fmt(s.gap)
        );
    }
    write_file(&cli.out.join("nu.csv"), &csv)?;
    for (p, msg) in &curve.failures {
        eprintln!("sample p = {p} failed: {msg}");
    }
    println!(
        "nu: {} samples ({} failed) on [{p_min}, {p_max}]",
        curve.samples.len(),
        curve.failures.len()
    );
    Ok(())
}

fn run_pk(cli: &Cli, config: &Config, a: &PkArgs) -> Result<()> {
    let n_dim: u32 = resolve(a.n_dim, config, "N", None)?;
    let alpha: f64 = resolve(a.alpha, config, "alpha", None)?;
    let probe = ProblemParams::new(n_dim, alpha, 2.0)?;
    let p_lo_default = (n_dim as f64 + 2.0) / (n_dim as f64 - 2.0);
    let p_min: f64 = resolve(a.p_min, config, "p_min", Some(p_lo_default))?;
    let p_max: f64 = resolve(
        a.p_max,
        config,
        "p_max",
        Some(probe.critical_exponent() - 0.05),
    )?;
    let samples: usize = resolve(a.samples, config, "samples", Some(200))?;
    let k_max: usize = resolve(a.k_max, config, "k_max", Some(8))?;
    let tol: f64 = resolve(a.tol, config, "tol", Some(1e-10))?;
    let grid = nu_grid(&probe, p_min, p_max, samples)?;
    let opts = NuOptions {
        shoot_tol: tol,
        ..NuOptions::default()
    };
    let curve = sweep_nu(n_dim, alpha, &grid, &opts);
    let spectrum = SphericalSpectrum::new(n_dim, k_max);
    let table = find_pk(&curve, &spectrum, k_max, &opts)?;

    let mut csv = String::from("k,lambda_k,p_k,bracket_lo,bracket_hi,mode_shot_residual\n");
    for e in &table.entries {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            e.k,
            fmt(e.lambda),
            fmt(e.p_k),
            fmt(e.bracket.0),
            fmt(e.bracket.1),
            fmt(e.mode_shot_residual)
        );
    }
    write_file(&cli.out.join("pk.csv"), &csv)?;
    let json = JsonObject::new()
        .int("N", n_dim as i64)
        .num("alpha", alpha)
        .num("p_min", p_min)
        .num("p_max", p_max)
        .int("samples", curve.samples.len() as i64)
        .int("failed_samples", curve.failures.len() as i64)
        .int("roots", table.entries.len() as i64)
        .int("k_max", k_max as i64)
        .int("seed", cli.seed as i64)
        .finish();
    write_file(&cli.out.join("pk.json"), &json)?;
    println!("pk: located {} degenerate exponents", table.entries.len());
    Ok(())
}

fn run_check(cli: &Cli, config: &Config, a: &CheckArgs) -> Result<()> {
    let n_dim: u32 = resolve(a.n_dim, config, "N", None)?;
    let alpha: f64 = resolve(a.alpha, config, "alpha", None)?;
    let p: f64 = resolve(a.p, config, "p", None)?;
    let tol: f64 = resolve(a.tol, config, "tol", Some(1e-10))?;
    let params = ProblemParams::new(n_dim, alpha, p)?;
    let report = nondegeneracy_certificate(&params, tol)?;

    let mut csv = String::from("k,boundary_value\n");
    for (k, v) in &report.boundary_values {
        let _ = writeln!(csv, "{},{}", k, fmt(*v));
    }
    write_file(&cli.out.join("modes.csv"), &csv)?;
    let verdict = if report.degenerate {
        "degenerate"
    } else {
        "nondegenerate"
    };
    let json = JsonObject::new()
        .int("N", n_dim as i64)
        .num("alpha", alpha)
        .num("p", p)
        .int("k_checked", report.k_checked as i64)
        .num("potential_sup", report.potential_sup)
        .num("min_residual", report.min_residual)
        .int("min_mode", report.min_mode as i64)
        .str("verdict", verdict)
        .finish();
    write_file(&cli.out.join("certificate.json"), &json)?;
    println!(
        "check-degeneracy: {verdict} (min |a_k(1)| = {:.3e} at k = {})",
        report.min_residual, report.min_mode
    );
    if report.degenerate {
        return Err(Error::ForbiddenExponent {
            p,
            mode: report.min_mode,
            residual: report.min_residual,
        });
    }
    Ok(())
}

fn run_perturbed(cli: &Cli, config: &Config, a: &PerturbedArgs) -> Result<()> {
    let n_dim: u32 = resolve(a.n_dim, config, "N", None)?;
    let alpha: f64 = resolve(a.alpha, config, "alpha", None)?;
    let p: f64 = resolve(a.p, config, "p", None)?;
    let t: f64 = resolve(a.t, config, "t", None)?;
    let map_raw: String = match &a.map {
        Some(m) => m.clone(),
        None => config
            .get("map")
            .cloned()
            .ok_or_else(|| Error::InvalidParams("missing required parameter --map".into()))?,
    };
    let opts = PerturbedOptions {
        k_max: resolve(a.kmax, config, "kmax", Some(32))?,
        r_nodes: resolve(a.rnodes, config, "rnodes", Some(1024))?,
        max_iter: resolve(a.maxiter, config, "maxiter", Some(200))?,
        tol: resolve(a.tol, config, "tol", Some(1e-10))?,
        ..PerturbedOptions::default()
    };
    let params = ProblemParams::new(n_dim, alpha, p)?;
    let spec = DomainMapSpec::new(parse_map(&map_raw)?, t)?;
    let (phi, report, solver) = contraction_solve(&params, &spec, &opts)?;

    let mut csv = String::from("r,theta,v\n");
    for (r, theta, v) in solver.solution_rows(&phi) {
        let _ = writeln!(csv, "{},{},{}", fmt(r), fmt(theta), fmt(v));
    }
    write_file(&cli.out.join("solution.csv"), &csv)?;

    let mut conv = String::from("n,increment_norm\n");
    for (n, inc) in report.increments.iter().enumerate() {
        let _ = writeln!(conv, "{},{}", n + 1, fmt(*inc));
    }
    write_file(&cli.out.join("convergence.csv"), &conv)?;

    let json = JsonObject::new()
        .num("kappa", report.kappa)
        .int("iters", report.iters as i64)
        .num("residual_sup", report.residual_sup)
        .num("positivity_margin", report.positivity_margin)
        .finish();
    write_file(&cli.out.join("report.json"), &json)?;
    println!(
        "perturbed: converged in {} iterations, kappa = {:.3}, residual = {:.3e}, \
         positivity margin = {:.3e}",
        report.iters, report.kappa, report.residual_sup, report.positivity_margin
    );
    if report.positivity_margin <= 0.0 {
        eprintln!("warning: positivity margin is not positive; solution rejected");
        return Err(Error::NoConvergence {
            iters: report.iters,
            increment: report.positivity_margin,
            kappa: report.kappa,
        });
    }
    Ok(())
}

fn run_exterior(cli: &Cli, config: &Config, a: &ExteriorArgs) -> Result<()> {
    let n_dim: u32 = resolve(a.n_dim, config, "N", None)?;
    let p: f64 = resolve(a.p, config, "p", None)?;
    let s_max: f64 = resolve(a.smax, config, "smax", Some(100.0))?;
    let n_nodes: usize = resolve(a.nodes, config, "nodes", Some(8192))?;
    let tol: f64 = resolve(a.tol, config, "tol", Some(1e-10))?;
    let map_raw: Option<String> = a.map.clone().or_else(|| config.get("map").cloned());
    let mut opts = FastDecayOptions {
        shoot_tol: tol,
        exterior: ExteriorOptions {
            s_max,
            n_nodes,
        },
        ..FastDecayOptions::default()
    };
    if let Some(raw) = map_raw {
        let t: f64 = resolve(a.t, config, "t", None)?;
        opts.map = Some(DomainMapSpec::new(parse_map(&raw)?, t)?);
    }
    let report = fast_decay_pipeline(n_dim, p, &opts)?;

    let mut csv = String::from("s,w\n");
    for (s, w) in report.exterior.s_grid.iter().zip(&report.exterior.values) {
        let _ = writeln!(csv, "{},{}", fmt(*s), fmt(*w));
    }
    write_file(&cli.out.join("exterior.csv"), &csv)?;
    let mut json = JsonObject::new()
        .int("N", n_dim as i64)
        .num("p", p)
        .num("alpha_star", report.alpha_star)
        .num("beta", report.beta)
        .num("decay_exponent", report.exterior.decay_exponent)
        .num("residual_sup", report.exterior.residual_sup)
        .num("s_max", s_max)
        .num("nearest_pk_distance", report.guard.distance);
    if let Some(res) = report.perturbed_exterior_residual {
        json = json
            .num("perturbed_exterior_residual", res)
            .num(
                "perturbed_interior_residual",
                report.perturbed_interior_residual.unwrap_or(f64::NAN),
            );
    }
    write_file(&cli.out.join("exterior.json"), &json.finish())?;
    println!(
        "exterior: alpha* = {}, beta = {}, decay exponent {:.4} (target {}), residual {:.3e}",
        report.alpha_star,
        report.beta,
        report.exterior.decay_exponent,
        n_dim - 2,
        report.exterior.residual_sup
    );
    Ok(())
}

fn run_pohozaev(cli: &Cli, config: &Config, a: &CheckArgs) -> Result<()> {
    let n_dim: u32 = resolve(a.n_dim, config, "N", None)?;
    let alpha: f64 = resolve(a.alpha, config, "alpha", None)?;
    let p: f64 = resolve(a.p, config, "p", None)?;
    let tol: f64 = resolve(a.tol, config, "tol", Some(1e-10))?;
    let params = ProblemParams::new(n_dim, alpha, p)?;
    let vp = crate::radial_shoot::solve_henon_radial(&params, tol)?;
    let report = pohozaev_residual(&vp, &params);
    let json = JsonObject::new()
        .int("N", n_dim as i64)
        .num("alpha", alpha)
        .num("p", p)
        .num("c_poh", report.coefficient)
        .num("volume_term", report.volume_term)
        .num("boundary_term", report.boundary_term)
        .num("residual", report.residual)
        .num("relative_residual", report.relative_residual)
        .finish();
    write_file(&cli.out.join("pohozaev.json"), &json)?;
    println!(
        "pohozaev: relative residual {:.3e} (c_poh = {:.6})",
        report.relative_residual, report.coefficient
    );
    Ok(())
}

fn run_certify(cli: &Cli, config: &Config, a: &CertifyArgs) -> Result<()> {
    let n_dim: u32 = resolve(a.n_dim, config, "N", None)?;
    let alpha: f64 = resolve(a.alpha, config, "alpha", None)?;
    let p: f64 = resolve(a.p, config, "p", None)?;
    let shift: f64 = resolve(a.shift, config, "shift", None)?;
    let domain_raw = a
        .domain
        .clone()
        .or_else(|| config.get("domain").cloned())
        .unwrap_or_else(|| "ball".into());
    let params = ProblemParams::new(n_dim, alpha, p)?;
    let domain = parse_domain(&domain_raw)?;
    let report = nonexistence_certificate(&domain, shift, &params)?;
    let verdict = match report.verdict {
        CertificateVerdict::CertifiedNonexistence => "CERTIFIED-NONEXISTENCE",
        CertificateVerdict::Inconclusive => "INCONCLUSIVE",
    };
    let json = JsonObject::new()
        .int("N", n_dim as i64)
        .num("alpha", alpha)
        .num("p", p)
        .num("shift", shift)
        .num("gamma", report.gamma)
        .str("verdict", verdict)
        .num("min_margin", report.min_margin)
        .num("sup_eps", report.sup_eps)
        .num("eps_bound", report.eps_bound)
        .finish();
    write_file(&cli.out.join("nonexistence.json"), &json)?;
    println!("certify-nonexistence: {verdict} (min margin {:.6})", report.min_margin);
    Ok(())
}

/// 17 significant digits, bit-stable across runs.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Tiny ordered JSON writer; keys appear exactly in insertion order and
/// floats use the same 17-digit format as the CSVs.
struct JsonObject {
    body: String,
    first: bool,
}

impl JsonObject {
    fn new() -> Self {
        Self {
            body: String::from("{"),
            first: true,
        }
    }

    fn sep(&mut self) {
        if !self.first {
            self.body.push(',');
        }
        self.first = false;
    }

    fn num(mut self, key: &str, value: f64) -> Self {
        self.sep();
        if value.is_finite() {
            let _ = write!(self.body, "\n  \"{key}\": {}", fmt(value));
        } else {
            let _ = write!(self.body, "\n  \"{key}\": null");
        }
        self
    }

    fn int(mut self, key: &str, value: i64) -> Self {
        self.sep();
        let _ = write!(self.body, "\n  \"{key}\": {value}");
        self
    }

    fn str(mut self, key: &str, value: &str) -> Self {
        self.sep();
        let _ = write!(self.body, "\n  \"{key}\": \"{value}\"");
        self
    }

    fn finish(mut self) -> String {
        self.body.push_str("\n}\n");
        self.body
    }
}
