//! `wph`: command-line driver for the Weil-Petersson Hessian toolkit.
//!
//! Exit codes: 0 success, 1 failed invariant or numerical error, 2 usage error.

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{qd_text, Format, RunConfig};
use num_complex::Complex64;
use output::{Emitted, Table};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use wph_core::elliptic::{flatparallel_scaling, RadialConfig};
use wph_core::geom::{DiskChart, ModelSurface};
use wph_core::hessian::arc::{hessian_arc, ArcConfig, CuspEnd, TwoCuspArc, DEFAULT_LADDER};
use wph_core::hessian::{cylinder_family_scan, hessian_closed, HessianConfig};
use wph_core::qdiff::{cusp_surface, ChartTag, QuadDiff};
use wph_core::thurston::{thurston_ratio_with, RatioMode, DEFAULT_T_MAX};
use wph_core::{selftest, WphError};

const DEFAULT_SEED: u64 = 7;
const DEFAULT_COLLAR_ELLS: [f64; 5] = [0.4, 0.2, 0.1, 0.05, 0.025];

#[derive(Parser, Debug)]
#[command(name = "wph", version, about = "Weil-Petersson Hessians of geodesic length on model hyperbolic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON file of settings; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format (json by default, csv for cyl-family).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized suites (default 7).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hessian of core length on the cylinder in the direction of a differential.
    CylHessian(CylHessianArgs),
    /// Core length along the WP geodesic of the cylinder family.
    CylFamily(CylFamilyArgs),
    /// Collar problem solutions and their log-log slopes in ℓ.
    CollarScaling(CollarArgs),
    /// Truncated arc Hessians between two cusps and their line-kernel limit.
    ArcConverge(ArcArgs),
    /// Ratio of the geodesic-flow quadratic form to the WP norm on the disk.
    Thurston(ThurstonArgs),
    /// Seeded reduced run of the invariant suite.
    Selftest,
}

#[derive(Args, Debug)]
struct CylHessianArgs {
    /// Core length ℓ.
    #[arg(long)]
    ell: Option<f64>,
    /// Differential as JSON, e.g. '{"kind":"constant","c":[0,1]}'.
    #[arg(long)]
    qd: Option<String>,
    /// Second differential for the polarized form.
    #[arg(long)]
    psi: Option<String>,
    /// Minimum samples on the core circle (default 256).
    #[arg(long)]
    samples: Option<usize>,
    /// Radial solver intervals (default 8192).
    #[arg(long)]
    intervals: Option<usize>,
}

#[derive(Args, Debug)]
struct CylFamilyArgs {
    /// Smallest ℓ (default 0.25).
    #[arg(long)]
    l0: Option<f64>,
    /// Largest ℓ (default 4).
    #[arg(long)]
    l1: Option<f64>,
    /// Equal arclength steps (default 64).
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args, Debug)]
struct CollarArgs {
    /// Comma-separated core lengths in (0, 1) (default 0.4,0.2,0.1,0.05,0.025).
    #[arg(long, value_delimiter = ',')]
    ells: Option<Vec<f64>>,
    /// Boundary value C₀ (default 1).
    #[arg(long)]
    c0: Option<f64>,
    /// Radial solver intervals (default 8192).
    #[arg(long)]
    intervals: Option<usize>,
}

#[derive(Args, Debug)]
struct ArcArgs {
    /// Comma-separated truncation lengths (default 10,15,...,40).
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
    /// Left cusp differential (default '{"kind":"cusp","c":[1,0]}').
    #[arg(long)]
    left: Option<String>,
    /// Right cusp differential (default '{"kind":"cusp","c":[0,1]}').
    #[arg(long)]
    right: Option<String>,
    /// Angle of the left cusp ray (default 0).
    #[arg(long, allow_negative_numbers = true)]
    left_theta: Option<f64>,
    /// Angle of the right cusp ray (default 0).
    #[arg(long, allow_negative_numbers = true)]
    right_theta: Option<f64>,
}

#[derive(Args, Debug)]
struct ThurstonArgs {
    /// Disk polynomial differential, e.g. '{"kind":"poly","coeffs":[[1,0]]}'.
    #[arg(long)]
    qd: Option<String>,
    /// Base point as re,im (default 0,0).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    base: Option<Vec<f64>>,
    /// Flow time cutoff (default 40).
    #[arg(long)]
    t_max: Option<f64>,
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<WphError> for Failure {
    fn from(e: WphError) -> Self {
        match e {
            WphError::Input(_) | WphError::Domain { .. } | WphError::UnsupportedGeodesic(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Failed(other.to_string()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn flags_config(cli: &Cli) -> Run<RunConfig> {
    let base = RunConfig { out: cli.out.clone(), format: cli.format, seed: cli.seed, ..RunConfig::default() };
    let s = |v: &Option<String>| v.clone().map(serde_json::Value::String);
    let own = match &cli.command {
        Command::CylHessian(a) => RunConfig {
            ell: a.ell,
            qd: s(&a.qd),
            psi: s(&a.psi),
            samples: a.samples,
            intervals: a.intervals,
            ..RunConfig::default()
        },
        Command::CylFamily(a) => RunConfig { l0: a.l0, l1: a.l1, steps: a.steps, ..RunConfig::default() },
        Command::CollarScaling(a) => {
            RunConfig { ells: a.ells.clone(), c0: a.c0, intervals: a.intervals, ..RunConfig::default() }
        }
        Command::ArcConverge(a) => RunConfig {
            ladder: a.ladder.clone(),
            left: s(&a.left),
            right: s(&a.right),
            left_theta: a.left_theta,
            right_theta: a.right_theta,
            ..RunConfig::default()
        },
        Command::Thurston(a) => RunConfig {
            qd: s(&a.qd),
            base: match a.base.as_deref() {
                None => None,
                Some(&[re, im]) => Some([re, im]),
                Some(_) => return Err(usage("--base takes two numbers, re,im")),
            },
            t_max: a.t_max,
            ..RunConfig::default()
        },
        Command::Selftest => RunConfig::default(),
    };
    Ok(base.merged(own))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::CylHessian(_) => "cyl-hessian",
        Command::CylFamily(_) => "cyl-family",
        Command::CollarScaling(_) => "collar-scaling",
        Command::ArcConverge(_) => "arc-converge",
        Command::Thurston(_) => "thurston",
        Command::Selftest => "selftest",
    }
}

fn parse_qd(
    v: &serde_json::Value,
    surface_for: impl FnOnce(ChartTag) -> wph_core::Result<ModelSurface>,
) -> Run<QuadDiff> {
    Ok(QuadDiff::from_json(&qd_text(v), surface_for)?)
}

fn radial(cfg: &RunConfig) -> RadialConfig {
    RadialConfig { intervals: cfg.intervals.unwrap_or(RadialConfig::default().intervals), ..RadialConfig::default() }
}

fn cyl_hessian(cfg: &mut RunConfig) -> Run<Emitted> {
    let ell = cfg.ell.ok_or_else(|| usage("cyl-hessian needs --ell"))?;
    let qd = cfg.qd.clone().ok_or_else(|| usage("cyl-hessian needs --qd"))?;
    let surface = |tag: ChartTag| match tag {
        ChartTag::Cylinder => ModelSurface::cylinder(ell),
        other => Err(WphError::Input(format!("cyl-hessian needs a cylinder differential, got chart {other:?}"))),
    };
    let phi = parse_qd(&qd, surface)?;
    let psi = cfg.psi.as_ref().map(|v| parse_qd(v, surface)).transpose()?;
    let hc = HessianConfig {
        samples: *cfg.samples.get_or_insert(HessianConfig::default().samples),
        radial: radial(cfg),
        ..HessianConfig::default()
    };
    cfg.intervals = Some(hc.radial.intervals);
    let report = hessian_closed(&phi, psi.as_ref(), &hc)?;
    let failures = report.violations();
    let g = &report.grid;
    let table = Table::new(
        &[
            "first_term",
            "second_term_energy",
            "second_term_kernel",
            "total",
            "lower_bound_third",
            "upper_bound",
            "first_variation",
            "grid_n",
            "grid_tol",
        ],
        vec![vec![
            report.first_term,
            report.second_term_energy,
            report.second_term_kernel,
            report.total,
            report.lower_bound_third,
            report.upper_bound,
            report.first_variation,
            g.n as f64,
            g.tol,
        ]],
    );
    Ok(Emitted { report: json!(report), table, notes: vec![], failures })
}

fn cyl_family(cfg: &mut RunConfig) -> Run<Emitted> {
    let l0 = *cfg.l0.get_or_insert(0.25);
    let l1 = *cfg.l1.get_or_insert(4.0);
    let steps = *cfg.steps.get_or_insert(64);
    if !(l0 < l1) {
        return Err(usage(format!("need --l0 < --l1, got {l0} and {l1}")));
    }
    let scan = cylinder_family_scan(l0, l1, steps, &HessianConfig::default())?;
    let mut failures = Vec::new();
    for r in &scan.rows {
        if !(r.d2_sqrt_l.abs() < 1e-6) {
            failures.push(format!("d²√ℓ/ds² = {:e} at s = {}", r.d2_sqrt_l, r.s));
        }
        if !(r.d2_l23 > 0.0) {
            failures.push(format!("d²ℓ^(2/3)/ds² = {:e} at s = {}", r.d2_l23, r.s));
        }
        let rel = ((r.d2l_ds2 - r.formula_hess) / r.formula_hess).abs();
        if !(rel < 1e-3) {
            failures.push(format!("formula and differences differ by {rel:e} at s = {}", r.s));
        }
    }
    if !(scan.kappa_r_squared > 1.0 - 1e-8) {
        failures.push(format!("ℓ = κs² fit has R² = {}", scan.kappa_r_squared));
    }
    let table = Table::new(
        &["s", "ell", "dl_ds", "d2l_ds2", "d2_sqrt_l", "d2_l23", "formula_hess"],
        scan.rows.iter().map(|r| vec![r.s, r.ell, r.dl_ds, r.d2l_ds2, r.d2_sqrt_l, r.d2_l23, r.formula_hess]).collect(),
    );
    let notes = vec![
        ("kappa".to_string(), scan.kappa.to_string()),
        ("kappa_r_squared".to_string(), scan.kappa_r_squared.to_string()),
        ("norm_sq_times_ell".to_string(), format!("{} {}", scan.norm_sq_times_ell.0, scan.norm_sq_times_ell.1)),
    ];
    Ok(Emitted { report: json!(scan), table, notes, failures })
}

fn collar_scaling(cfg: &mut RunConfig) -> Run<Emitted> {
    let ells = cfg.ells.get_or_insert_with(|| DEFAULT_COLLAR_ELLS.to_vec()).clone();
    let c0 = *cfg.c0.get_or_insert(1.0);
    let rc = radial(cfg);
    cfg.intervals = Some(rc.intervals);
    let report = flatparallel_scaling(&ells, c0, &rc)?;
    let mut failures = Vec::new();
    if !((report.slope_u0.slope - 1.0).abs() <= 0.15) {
        failures.push(format!("u(0) slope {} outside 1 ± 0.15", report.slope_u0.slope));
    }
    if !((report.slope_core_integral.slope - 2.0).abs() <= 0.15) {
        failures.push(format!("core integral slope {} outside 2 ± 0.15", report.slope_core_integral.slope));
    }
    let table = Table::new(
        &["ell", "half_width", "u0", "core_integral", "particular_ratio"],
        report.rows.iter().map(|r| vec![r.ell, r.half_width, r.u0, r.core_integral, r.particular_ratio]).collect(),
    );
    let notes = vec![
        ("slope_u0".to_string(), report.slope_u0.slope.to_string()),
        ("slope_core_integral".to_string(), report.slope_core_integral.slope.to_string()),
        ("slope_particular_ratio".to_string(), report.slope_particular_ratio.slope.to_string()),
    ];
    Ok(Emitted { report: json!(report), table, notes, failures })
}

fn arc_converge(cfg: &mut RunConfig) -> Run<Emitted> {
    let ladder = cfg.ladder.get_or_insert_with(|| DEFAULT_LADDER.to_vec()).clone();
    let left = cfg.left.get_or_insert_with(|| json!({"kind": "cusp", "c": [1.0, 0.0]})).clone();
    let right = cfg.right.get_or_insert_with(|| json!({"kind": "cusp", "c": [0.0, 1.0]})).clone();
    let lt = *cfg.left_theta.get_or_insert(0.0);
    let rt = *cfg.right_theta.get_or_insert(0.0);
    let surface = |tag: ChartTag| match tag {
        ChartTag::Cusp => Ok(cusp_surface()),
        other => Err(WphError::Input(format!("arc ends need cusp differentials, got chart {other:?}"))),
    };
    let arc =
        TwoCuspArc::new(CuspEnd::new(parse_qd(&left, surface)?, lt)?, CuspEnd::new(parse_qd(&right, surface)?, rt)?);
    let report = hessian_arc(&arc, &ladder, &ArcConfig::default())?;
    let mut failures = Vec::new();
    for (k, d) in report.cauchy.iter().enumerate() {
        if report.rungs[k].length >= 30.0 && !(*d < 1e-4) {
            failures.push(format!("Cauchy difference {d:e} beyond L = {}", report.rungs[k].length));
        }
    }
    for (name, rate) in [("a", report.rate_a), ("b", report.rate_b)] {
        if let Some(r) = rate {
            if !(r >= 0.4) {
                failures.push(format!("boundary constant {name} decays at rate {r} < 0.4"));
            }
        }
    }
    let table = Table::new(
        &["length", "alpha", "beta", "a", "b", "energy", "first_term", "total"],
        report
            .rungs
            .iter()
            .map(|r| vec![r.length, r.alpha, r.beta, r.a, r.b, r.energy, r.first_term, r.total])
            .collect(),
    );
    let rate = |r: Option<f64>| r.map_or("none".to_string(), |v| v.to_string());
    let notes = vec![
        ("line_energy".to_string(), report.line_energy.to_string()),
        ("limit_total".to_string(), report.limit_total.to_string()),
        ("rate_a".to_string(), rate(report.rate_a)),
        ("rate_b".to_string(), rate(report.rate_b)),
    ];
    Ok(Emitted { report: json!(report), table, notes, failures })
}

fn thurston(cfg: &mut RunConfig) -> Run<Emitted> {
    let qd = cfg.qd.clone().ok_or_else(|| usage("thurston needs --qd"))?;
    let base = *cfg.base.get_or_insert([0.0, 0.0]);
    let t_max = *cfg.t_max.get_or_insert(DEFAULT_T_MAX);
    let phi = parse_qd(&qd, |tag| match tag {
        ChartTag::Disk => Ok(ModelSurface::Disk(DiskChart)),
        other => Err(WphError::Input(format!("thurston needs a disk polynomial, got chart {other:?}"))),
    })?;
    let r = thurston_ratio_with(&phi, Complex64::new(base[0], base[1]), t_max)?;
    let mut failures = Vec::new();
    if r.mode != RatioMode::Zero && !((r.ratio - 4.0 / 3.0).abs() <= 1e-4) {
        failures.push(format!("ratio {} differs from 4/3 by more than 1e-4", r.ratio));
    }
    let table = Table::new(
        &["i1", "i2", "norm_sq", "ratio", "collapse_factor"],
        vec![vec![r.i1, r.i2, r.norm_sq, r.ratio, r.collapse_factor]],
    );
    let mode = serde_json::to_value(r.mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    Ok(Emitted { report: json!(r), table, notes: vec![("mode".to_string(), mode)], failures })
}

fn run_selftest(cfg: &mut RunConfig) -> Run<Emitted> {
    let seed = *cfg.seed.get_or_insert(DEFAULT_SEED);
    let report = selftest::run(seed)?;
    let failures = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {:e} (limit {:e})", c.name, c.value, c.limit))
        .collect();
    let mut table = Table::new(&["check", "pass", "value", "limit"], vec![]);
    table.text_rows = report
        .checks
        .iter()
        .map(|c| vec![c.name.to_string(), c.pass.to_string(), output::num(c.value), output::num(c.limit)])
        .collect();
    Ok(Emitted { report: json!(report), table, notes: vec![], failures })
}

fn init_threads() -> Run<()> {
    let Ok(v) = std::env::var("WPH_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| usage(format!("WPH_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Failed(e.to_string()))
}

fn real_main() -> Run<()> {
    let cli = Cli::try_parse().map_err(|e| {
        let code = e.exit_code();
        let _ = e.print();
        if code == 0 {
            std::process::exit(0);
        }
        usage("")
    })?;
    init_threads()?;
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    let mut cfg = file.merged(flags_config(&cli)?);
    let name = command_name(&cli.command);
    let format = *cfg.format.get_or_insert(if name == "cyl-family" { Format::Csv } else { Format::Json });
    let emitted = match &cli.command {
        Command::CylHessian(_) => cyl_hessian(&mut cfg),
        Command::CylFamily(_) => cyl_family(&mut cfg),
        Command::CollarScaling(_) => collar_scaling(&mut cfg),
        Command::ArcConverge(_) => arc_converge(&mut cfg),
        Command::Thurston(_) => thurston(&mut cfg),
        Command::Selftest => run_selftest(&mut cfg),
    }?;
    let text = output::render(name, &cfg, &emitted, format).map_err(|e| Failure::Failed(format!("{e:#}")))?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Failed(format!("writing {path}: {e}")))?,
        None => print!("{text}"),
    }
    if emitted.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Failed(emitted.failures.join("\n")))
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            if !msg.is_empty() {
                eprintln!("wph: {msg}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("wph: {msg}");
            ExitCode::from(1)
        }
    }
}
