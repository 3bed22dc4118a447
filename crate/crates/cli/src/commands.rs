use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use multiphase_core::constructor::construct;
use multiphase_core::dtn::{eigenvalue, jump_to_neumann, numerical_dtn};
use multiphase_core::geometry::pullback_grid;
use multiphase_core::layered::{solve, SolverConfig};
use multiphase_core::radial::{phase_collapse, radial_solution, PhaseConfig};
use multiphase_core::shape_deriv::fd_validate;
use multiphase_core::verify::{laplacian_decomposition_residual, outer_normal_derivatives, overdetermined_report};
use multiphase_core::FourierField;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{num, read_json, write_csv, write_json};
use crate::schema::{
    check_schema, ConstructConfig, DeriveCheckConfig, FieldDto, GeometryDto, GeometryFile, SolveConfig,
    SolverDto, VerifyConfig, SCHEMA_VERSION,
};

#[derive(Debug, Parser)]
#[command(name = "multiphase", version, about = "Multi-phase torsion problems on perturbed concentric domains")]
pub struct Cli {
    /// Print a machine-readable summary on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a layered transmission problem.
    Solve(SolveArgs),
    /// Closed-form and numerical DtN eigenvalues, optionally jump gains.
    Spectrum(SpectrumArgs),
    /// Finite-difference check of the linearized Neumann-tracking map.
    DeriveCheck(ConfigArgs),
    /// Build a non-radial configuration by quasi-Newton iteration.
    Construct(OutDirArgs),
    /// Re-solve a geometry and measure the overdetermined conditions.
    Verify(VerifyArgs),
    /// Collapse radial phases one at a time.
    Collapse(CollapseArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutDirArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Report file (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Inner radius.
    #[arg(long = "R")]
    pub inner_radius: f64,
    #[arg(long)]
    pub sigma1: f64,
    /// Dimension; numerical eigenvalues are planar only.
    #[arg(long = "N", default_value_t = 2)]
    pub dimension: u32,
    #[arg(long, default_value_t = 8)]
    pub kmax: usize,
    /// Eigenvalue table (CSV).
    #[arg(long)]
    pub out: PathBuf,
    /// Radii of a concentric configuration for the jump gains.
    #[arg(long, value_delimiter = ',', requires_all = ["sigmas", "gains_out"])]
    pub radii: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// Jump gains (CSV).
    #[arg(long)]
    pub gains_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Verify config with inline geometry.
    #[arg(long, conflicts_with = "geometry", required_unless_present = "geometry")]
    pub config: Option<PathBuf>,
    /// Geometry file as written by `construct`.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub orders: Vec<u32>,
    /// Series truncation when reading a geometry file.
    #[arg(long, default_value_t = 40)]
    pub truncation: usize,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CollapseArgs {
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub dimension: u32,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Profiles of every stage (CSV).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: &Cli) -> Result<Value, CliError> {
    let start = Instant::now();
    let summary = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::DeriveCheck(a) => run_derive_check(a),
        Command::Construct(a) => run_construct(a),
        Command::Verify(a) => run_verify(a),
        Command::Collapse(a) => run_collapse(a),
    }?;
    log::info!("finished in {:.3?}", start.elapsed());
    Ok(summary)
}

fn run_solve(args: &SolveArgs) -> Result<Value, CliError> {
    let config: SolveConfig = read_json(&args.config)?;
    check_schema(config.schema)?;
    let geometry = config.geometry.to_geometry()?;
    let solver = config.solver.to_config()?;
    let dirichlet = config.dirichlet.to_field(solver.truncation)?;
    let jumps = config.jumps(solver.truncation)?;
    let solution = solve(&geometry, &dirichlet, &jumps, &solver)?;
    log::info!("solve residual {:e}, condition {:e}", solution.residual(), solution.condition_estimate());

    let m = solution.nodes_per_curve();
    for curve in 0..geometry.layers() {
        let grid = pullback_grid(geometry.curve(curve), m)?;
        let values = solution.boundary_samples(curve, curve, 0, m)?;
        let normals = solution.boundary_samples(curve, curve, 1, m)?;
        let rows: Vec<Vec<String>> = grid
            .nodes()
            .iter()
            .zip(values.iter().zip(&normals))
            .map(|(p, (v, dn))| vec![num(p.theta), num(*v), num(*dn)])
            .collect();
        write_csv(&args.out_dir.join(format!("trace_{curve}.csv")), &["theta", "u", "dn_u"], &rows)?;
    }
    let (value_defect, flux_defect) = solution.jump_defects()?;
    let meta = json!({
        "schema": SCHEMA_VERSION,
        "truncation": solution.truncation(),
        "nodes_per_curve": m,
        "residual": solution.residual(),
        "condition_estimate": solution.condition_estimate(),
        "rank": solution.rank(),
        "value_jump_defect": value_defect,
        "flux_jump_defect": flux_defect,
    });
    write_json(&args.out_dir.join("solution.json"), &meta)?;
    Ok(meta)
}

fn run_spectrum(args: &SpectrumArgs) -> Result<Value, CliError> {
    let solver = SolverConfig::with_truncation(args.kmax.max(16));
    let planar = args.dimension == 2 && args.inner_radius < 1.0;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..=args.kmax {
        let exact = eigenvalue(k, args.inner_radius, args.sigma1, args.dimension)?;
        let (numerical, rel) = if planar {
            let numerical = numerical_dtn(args.inner_radius, args.sigma1, k, &solver)?;
            let rel = if k == 0 { numerical.abs() } else { (numerical - exact).abs() / exact };
            worst = worst.max(rel);
            (num(numerical), num(rel))
        } else {
            (String::new(), String::new())
        };
        rows.push(vec![k.to_string(), num(exact), numerical, rel]);
    }
    write_csv(&args.out, &["k", "mu_closed", "mu_numerical", "rel_err"], &rows)?;
    log::info!("largest relative eigenvalue error {worst:e}");
    let mut summary = json!({
        "kmax": args.kmax,
        "mu_1": if args.kmax >= 1 { Some(eigenvalue(1, args.inner_radius, args.sigma1, args.dimension)?) } else { None },
        "max_rel_err": if planar { Some(worst) } else { None },
    });

    if let (Some(radii), Some(sigmas), Some(path)) = (&args.radii, &args.sigmas, &args.gains_out) {
        let config = PhaseConfig::planar(radii.clone(), sigmas.clone())?;
        let solver = SolverConfig::with_truncation(args.kmax.max(1));
        let gains = jump_to_neumann(&config, &FourierField::zeros(0), &solver)?.gains;
        let rows: Vec<Vec<String>> = gains.iter().enumerate().map(|(k, g)| vec![k.to_string(), num(*g)]).collect();
        write_csv(path, &["k", "g_k"], &rows)?;
        let monotone = gains[1..].windows(2).all(|w| w[1].abs() < w[0].abs());
        summary["gains_monotone"] = json!(monotone);
    }
    Ok(summary)
}

fn run_derive_check(args: &ConfigArgs) -> Result<Value, CliError> {
    let config: DeriveCheckConfig = read_json(&args.config)?;
    check_schema(config.schema)?;
    let phases = PhaseConfig::planar(config.radii.clone(), config.sigmas.clone())?;
    let options = config.options.to_options()?;
    let direction = config.direction.to_field(options.truncation)?;
    let report = fd_validate(&direction, &config.epsilons, &phases, &options)?;
    let value = json!({
        "schema": SCHEMA_VERSION,
        "direction": FieldDto::from_field(&report.direction),
        "reference": FieldDto::from_field(&report.reference),
        "steps": report.steps.iter().map(|s| json!({"epsilon": s.epsilon, "error": s.error})).collect::<Vec<_>>(),
        "orders": report.orders,
        "noise_floor": report.noise_floor,
    });
    write_json(&args.out, &value)?;
    Ok(value)
}

fn run_construct(args: &OutDirArgs) -> Result<Value, CliError> {
    let config: ConstructConfig = read_json(&args.config)?;
    check_schema(config.schema)?;
    let phases = PhaseConfig::planar(config.radii.clone(), config.sigmas.clone())?;
    let options = config.options.to_options()?;
    let eta = config.eta.to_field(options.truncation)?;
    let result = construct(&eta, &phases, &options)?;
    for (i, r) in result.trace.iter().enumerate() {
        log::info!("iteration {}: residual {r:e}", i + 1);
    }
    let glued = &result.glued;
    let outer_constants: Vec<Value> = (1..=6)
        .map(|k| json!({"k": k, "c_k": glued.outer_constant(k)}))
        .collect();
    let value = json!({
        "schema": SCHEMA_VERSION,
        "eta": FieldDto::from_field(&result.eta),
        "xi": FieldDto::from_field(&result.xi),
        "iterations": result.iterations(),
        "residual_history": result.trace,
        "steps": result.steps.iter().map(|s| format!("{s:?}").to_lowercase()).collect::<Vec<_>>(),
        "final_residual": result.final_residual(),
        "value_jump_defect": glued.value_defect,
        "flux_jump_defect": glued.flux_defect,
        "outer_constants": outer_constants,
    });
    write_json(&args.out_dir.join("result.json"), &value)?;
    let geometry = GeometryFile {
        schema: SCHEMA_VERSION,
        geometry: GeometryDto::from_geometry(&glued.geometry),
    };
    write_json(&args.out_dir.join("geometry.json"), &geometry)?;

    let m = glued.inner.nodes_per_curve();
    let grid = pullback_grid(glued.geometry.curve(1), m)?;
    let values = glued.inner.boundary_samples(1, 1, 0, m)?;
    let normals = glued.inner.boundary_samples(1, 1, 1, m)?;
    let rows: Vec<Vec<String>> = grid
        .nodes()
        .iter()
        .zip(values.iter().zip(&normals))
        .map(|(p, (v, dn))| vec![num(p.theta), num(p.point.x), num(p.point.y), num(*v), num(*dn)])
        .collect();
    write_csv(&args.out_dir.join("interface_trace.csv"), &["theta", "x", "y", "v", "dn_v"], &rows)?;
    Ok(value)
}

fn run_verify(args: &VerifyArgs) -> Result<Value, CliError> {
    let (geometry, orders, solver) = match (&args.config, &args.geometry) {
        (Some(path), _) => {
            let config: VerifyConfig = read_json(path)?;
            check_schema(config.schema)?;
            (config.geometry, config.orders, config.solver.to_config()?)
        }
        (None, Some(path)) => {
            let file: GeometryFile = read_json(path)?;
            check_schema(file.schema)?;
            let solver = SolverDto {
                truncation: args.truncation,
                ..SolverDto::default()
            };
            (file.geometry, args.orders.clone(), solver.to_config()?)
        }
        (None, None) => return Err(CliError::Validation("verify needs --config or --geometry".into())),
    };
    let geometry = geometry.to_geometry()?.with_source(1.0);
    let solution = solve(&geometry, &FourierField::zeros(0), &[], &solver)?;
    let report = overdetermined_report(&solution, &orders)?;
    let decomposition = laplacian_decomposition_residual(&solution, geometry.layers() - 1)?;

    let mut columns = vec!["theta".to_string()];
    let mut traces = Vec::new();
    let mut thetas = Vec::new();
    for &k in &orders {
        let (theta, values) = outer_normal_derivatives(&solution, k)?;
        columns.push(format!("dn{k}_u"));
        traces.push(values);
        thetas = theta;
    }
    let rows: Vec<Vec<String>> = thetas
        .iter()
        .enumerate()
        .map(|(j, t)| std::iter::once(num(*t)).chain(traces.iter().map(|v| num(v[j]))).collect())
        .collect();
    let header: Vec<&str> = columns.iter().map(String::as_str).collect();
    write_csv(&args.out_dir.join("outer_traces.csv"), &header, &rows)?;

    let value = json!({
        "schema": SCHEMA_VERSION,
        "orders": report.orders.iter().map(|o| json!({"k": o.order, "c_k": o.mean, "dev_k": o.deviation})).collect::<Vec<_>>(),
        "nonradiality": report.nonradiality,
        "solver_residual": report.solver_residual,
        "decomposition_residual": decomposition,
    });
    write_json(&args.out_dir.join("report.json"), &value)?;
    Ok(value)
}

fn run_collapse(args: &CollapseArgs) -> Result<Value, CliError> {
    if args.samples < 2 {
        return Err(CliError::Validation("at least two samples are needed".into()));
    }
    let config = PhaseConfig::new(args.radii.clone(), args.sigmas.clone(), args.dimension)?;
    let mut profile = radial_solution(&config);
    let mut rows = Vec::new();
    let mut stages = Vec::new();
    let outer = config.outer_radius();
    let push_rows = |rows: &mut Vec<Vec<String>>, stage: usize, profile: &multiphase_core::RadialProfile| {
        for (r, u, du, phase) in profile.sample(args.samples) {
            rows.push(vec![stage.to_string(), num(r), num(u), num(du), phase.to_string()]);
        }
    };
    push_rows(&mut rows, 0, &profile);
    let mut stage = 0;
    while profile.config().layers() > 1 {
        let alpha = profile.value(profile.config().radii()[0]);
        profile = phase_collapse(&profile, alpha)?;
        stage += 1;
        let direct = radial_solution(profile.config());
        let error = (0..args.samples)
            .map(|j| outer * j as f64 / (args.samples - 1) as f64)
            .map(|r| (profile.value(r) - direct.value(r)).abs())
            .fold(0.0, f64::max);
        log::info!("stage {stage}: α = {alpha:e}, error {error:e}");
        stages.push(json!({"stage": stage, "alpha": alpha, "max_error": error}));
        push_rows(&mut rows, stage, &profile);
    }
    write_csv(&args.out, &["stage", "r", "u", "du", "phase"], &rows)?;
    Ok(json!({ "stages": stages }))
}

/// Human-readable one-liner for the non-JSON mode.
pub fn describe(summary: &Value) -> String {
    let mut parts = Vec::new();
    if let Value::Object(map) = summary {
        for (key, value) in map {
            if value.is_number() || value.is_boolean() {
                parts.push(format!("{key}={value}"));
            }
        }
    }
    if parts.is_empty() {
        "done".to_string()
    } else {
        parts.join(" ")
    }
}
