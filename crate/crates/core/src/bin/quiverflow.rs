use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use quiverflow::correspondence::{
    affine_project, hecke_check, hecke_to_flowline, lagrangian_check, zero_energy_flow_options, HeckeOptions, IsoOptions,
    IsoReport,
};
use quiverflow::critical::{classify_critical, negative_slice_from_profile, stratum_codim, grassmann_project, CriticalProfile, CriticalTols};
use quiverflow::error::{CorrespondenceError, CriticalError, FlowError, IoError, OracleError};
use quiverflow::flow::{flow_batch, flow_f64, Constraint, FlowOptions, FlowResult};
use quiverflow::handsaw::{handsaw_adjoint, handsaw_constraint, handsaw_hecke_check};
use quiverflow::io::{self, blocks_to_json, rep_to_json};
use quiverflow::oracles::{group_by_slope, thin_hn_type, thin_jh};
use quiverflow::quiver::{canonical_stability, handsaw_to_quiver, parse_weight, validate_quiver, QuiverSpec};
use quiverflow::{selfcheck, Quiver, Representation, StabilityParameter};

/// Moment-map flows, critical points and correspondences for quiver
/// representations.
#[derive(Parser, Debug)]
#[command(name = "quiverflow", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "QUIVERFLOW_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a quiver or representation file.
    Validate {
        /// Quiver JSON file.
        #[arg(long, conflicts_with = "rep")]
        quiver: Option<PathBuf>,
        /// Representation JSON file.
        #[arg(long)]
        rep: Option<PathBuf>,
    },
    /// Integrate the downward gradient flow.
    Flow {
        /// Representation file; repeat for a batch run.
        #[arg(long, required_unless_present = "batch")]
        rep: Vec<PathBuf>,
        /// Directory of representation files, run in file-name order.
        #[arg(long)]
        batch: Option<PathBuf>,
        #[command(flatten)]
        alpha: AlphaArg,
        #[command(flatten)]
        flow: FlowArgs,
        /// Trajectory CSV (single input only).
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Limit representation JSON (single input only).
        #[arg(long)]
        limit: Option<PathBuf>,
    },
    /// Eigenspace splitting and Hessian data at a critical point.
    Classify {
        #[arg(long)]
        rep: PathBuf,
        #[command(flatten)]
        alpha: AlphaArg,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Negative slice basis at a two-block critical point.
    Negslice {
        #[arg(long)]
        rep: PathBuf,
        #[command(flatten)]
        alpha: AlphaArg,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Critical type of the flow limit, optionally against an oracle.
    Hn {
        #[arg(long)]
        rep: PathBuf,
        #[command(flatten)]
        alpha: AlphaArg,
        #[command(flatten)]
        flow: FlowArgs,
        #[command(flatten)]
        tols: TolArgs,
        /// Exact comparison for thin representations.
        #[arg(long, value_enum)]
        oracle: Option<OracleKind>,
    },
    /// Hecke membership of a pair differing by one dimension at a vertex.
    Hecke {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        hecke: HeckeArgs,
    },
    /// Build the flow-line pair from a Hecke pair.
    HeckeConstruct {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        hecke: HeckeArgs,
        /// Starting point `(x1 ⊕ 0) + delta` as representation JSON.
        #[arg(long)]
        start: Option<PathBuf>,
    },
    /// Affine projection: the limit of the flow with zero parameter.
    Project {
        #[arg(long)]
        rep: PathBuf,
        /// Limit representation JSON.
        #[arg(long)]
        limit: Option<PathBuf>,
    },
    /// Whether two representations have isomorphic padded projections.
    Lagrangian {
        #[arg(long)]
        x1: PathBuf,
        #[arg(long)]
        x2: PathBuf,
    },
    /// Codimension of the incoming image at a vertex and the restriction to it.
    Stratum {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        vertex: String,
        /// Expected codimension; enables the restriction.
        #[arg(long)]
        codim: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        rank_tol: f64,
        /// Restricted representation JSON.
        #[arg(long, requires = "codim")]
        project: Option<PathBuf>,
    },
    /// Handsaw utilities.
    #[command(subcommand)]
    Handsaw(HandsawCommand),
    /// Run every verification suite on built-in and seeded instances.
    Selfcheck,
}

#[derive(Subcommand, Debug)]
enum HandsawCommand {
    /// Labelled quiver and dimension vector of a handsaw.
    ToQuiver {
        #[arg(long)]
        n: usize,
        /// Comma-separated dimensions of V1..V(n-1).
        #[arg(long, value_delimiter = ',')]
        v: Vec<usize>,
        /// Comma-separated dimensions of W1..Wn.
        #[arg(long, value_delimiter = ',')]
        w: Vec<usize>,
    },
    /// Adjoint transform of handsaw data.
    Adjoint {
        #[arg(long)]
        rep: PathBuf,
        /// Transformed representation JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hecke membership for handsaw data.
    Hecke {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        hecke: HeckeArgs,
    },
}

#[derive(Args, Debug)]
struct AlphaArg {
    /// `canonical`, a weights JSON file, or comma-separated weights.
    #[arg(long, default_value = "canonical", allow_hyphen_values = true)]
    alpha: String,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    #[arg(long)]
    x1: PathBuf,
    #[arg(long)]
    x2: PathBuf,
    /// Vertex id (or index) where the dimensions differ.
    #[arg(long)]
    vertex: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleKind {
    Thin,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConstraintArg {
    None,
    Doubled,
    Handsaw,
}

#[derive(Args, Debug, Clone)]
struct FlowArgs {
    #[arg(long)]
    dt_init: Option<f64>,
    #[arg(long)]
    dt_min: Option<f64>,
    #[arg(long)]
    grad_tol: Option<f64>,
    /// Also stop once the energy falls below this value.
    #[arg(long)]
    energy_tol: Option<f64>,
    #[arg(long)]
    max_time: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Allowed growth of the constraint norm per unit time.
    #[arg(long)]
    drift_tol: Option<f64>,
    #[arg(long)]
    sample_stride: Option<usize>,
    /// Step-doubling error tolerance; 0 disables it.
    #[arg(long)]
    step_tol: Option<f64>,
    /// Constraint monitored during the flow; defaults to `doubled` on
    /// doubled quivers and `none` otherwise.
    #[arg(long, value_enum)]
    constraint: Option<ConstraintArg>,
}

impl FlowArgs {
    fn options(&self, q: &Quiver) -> Result<FlowOptions, CliError> {
        let d = FlowOptions::default();
        let constraint = match self.constraint {
            Some(ConstraintArg::None) => Constraint::None,
            Some(ConstraintArg::Doubled) => Constraint::DoubledMomentC,
            Some(ConstraintArg::Handsaw) => Constraint::Handsaw,
            None if q.pairs().is_some() => Constraint::DoubledMomentC,
            None => Constraint::None,
        };
        let o = FlowOptions {
            dt_init: self.dt_init.unwrap_or(d.dt_init),
            dt_min: self.dt_min.unwrap_or(d.dt_min),
            grad_tol: self.grad_tol.unwrap_or(d.grad_tol),
            energy_tol: self.energy_tol.unwrap_or(d.energy_tol),
            max_time: self.max_time.unwrap_or(d.max_time),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            drift_tol: self.drift_tol.unwrap_or(d.drift_tol),
            sample_stride: self.sample_stride.unwrap_or(d.sample_stride),
            constraint,
            step_tol: self.step_tol.unwrap_or(d.step_tol),
        };
        o.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(o)
    }
}

#[derive(Args, Debug, Clone)]
struct TolArgs {
    #[arg(long, default_value_t = 1e-8)]
    crit_grad_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    cluster_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    block_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    crit_rank_tol: f64,
}

impl TolArgs {
    fn tols(&self) -> CriticalTols {
        CriticalTols {
            grad_tol: self.crit_grad_tol,
            cluster_tol: self.cluster_tol,
            block_tol: self.block_tol,
            rank_tol: self.crit_rank_tol,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct HeckeArgs {
    #[arg(long, default_value_t = 1e-8)]
    solve_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    null_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    inj_tol: f64,
    #[arg(long, default_value_t = 16)]
    trials: usize,
}

impl HeckeArgs {
    fn options(&self) -> HeckeOptions {
        HeckeOptions { solve_tol: self.solve_tol, null_tol: self.null_tol, inj_tol: self.inj_tol, trials: self.trials }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Options(_) => CliError::Validation(e.to_string()),
            FlowError::NaN { .. } => CliError::NotConverged(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<CriticalError> for CliError {
    fn from(e: CriticalError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<CorrespondenceError> for CliError {
    fn from(e: CorrespondenceError) -> Self {
        match e {
            CorrespondenceError::NotConverged(_) | CorrespondenceError::Flow(_) => CliError::NotConverged(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<quiverflow::RepError> for CliError {
    fn from(e: quiverflow::RepError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<quiverflow::QuiverError> for CliError {
    fn from(e: quiverflow::QuiverError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Report body plus an optional failure to signal through the exit code
/// after the report has been written.
struct Outcome {
    config: Value,
    result: Value,
    failure: Option<CliError>,
}

fn ok(config: Value, result: Value) -> Result<Outcome, CliError> {
    Ok(Outcome { config, result, failure: None })
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn load_alpha(arg: &str, x: &Representation) -> Result<StabilityParameter, CliError> {
    if arg == "canonical" {
        return Ok(canonical_stability(&x.quiver, &x.dims)?);
    }
    let path = Path::new(arg);
    if path.exists() {
        return Ok(io::weights_from_json(&x.quiver, &io::read_json(path)?)?);
    }
    let w = arg.split(',').map(|s| parse_weight(s.trim())).collect::<Result<Vec<_>, _>>()?;
    if w.len() != x.dims.len() {
        return Err(CliError::Validation(format!("{} weights given for {} vertices", w.len(), x.dims.len())));
    }
    Ok(StabilityParameter(w))
}

fn batch_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Validation(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn resolve_vertex(q: &Quiver, id: &str) -> Result<usize, CliError> {
    q.vertex_index(id)
        .or_else(|| id.parse::<usize>().ok().filter(|&i| i < q.num_vertices()))
        .ok_or_else(|| CliError::Validation(format!("unknown vertex '{id}'")))
}

fn flow_summary(r: &FlowResult) -> Value {
    json!({
        "status": r.status,
        "converged": r.converged(),
        "final_energy": r.final_energy,
        "final_grad_norm": r.final_grad_norm,
        "final_time": r.final_time,
        "accepted_steps": r.accepted_steps,
        "rejected_steps": r.rejected_steps,
        "max_constraint_norm": r.max_constraint_norm,
        "limit": rep_to_json(&r.limit),
    })
}

fn profile_json(q: &Quiver, p: &CriticalProfile) -> Value {
    json!({
        "eigenvalues": p.eigenvalues,
        "blocks": p.blocks.iter().map(|d| d.to_map(q)).collect::<Vec<_>>(),
        "slopes": p.slopes,
        "critical_type": p.critical_type.iter().map(|d| d.to_map(q)).collect::<Vec<_>>(),
        "offdiag_residual": p.offdiag_residual,
        "grad_norm": p.grad_norm,
        "negative_spectrum": p.neg_spectrum.iter().map(|(v, m)| json!({"value": v, "multiplicity": m})).collect::<Vec<_>>(),
        "negative_slice_dim": p.neg_slice_basis.as_ref().map(Vec::len),
    })
}

fn tangent_json(dir: &[quiverflow::linalg::CMat]) -> Value {
    Value::Object(dir.iter().enumerate().map(|(i, m)| (i.to_string(), io::matrix_to_json(m))).collect())
}

fn iso_json(r: &IsoReport) -> Value {
    json!({
        "isomorphic": r.isomorphic,
        "residual": r.residual,
        "hom_dim": r.hom_dim,
        "condition": r.condition,
    })
}

fn read_pair(p: &PairArgs) -> Result<(Representation, Representation, usize), CliError> {
    let x1 = io::read_rep(&p.x1)?;
    let x2 = io::read_rep(&p.x2)?;
    let k = resolve_vertex(&x1.quiver, &p.vertex)?;
    Ok((x1, x2, k))
}

fn pair_config(p: &PairArgs, seed: u64, h: &HeckeOptions) -> Value {
    json!({"x1": path_str(&p.x1), "x2": path_str(&p.x2), "vertex": p.vertex, "seed": seed, "hecke": h})
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Validate { quiver, rep } => {
            if let Some(path) = quiver {
                let spec: QuiverSpec = serde_json::from_value(io::read_json(path)?).map_err(IoError::from)?;
                return match validate_quiver(&spec) {
                    Ok((_, v)) => ok(json!({"quiver": path_str(path)}), json!({"valid": true, "summary": v})),
                    Err(errs) => Ok(Outcome {
                        config: json!({"quiver": path_str(path)}),
                        result: json!({"valid": false, "errors": errs.iter().map(|e| e.to_string()).collect::<Vec<_>>()}),
                        failure: Some(CliError::Validation(format!("{} validation errors", errs.len()))),
                    }),
                };
            }
            let Some(path) = rep else {
                return Err(CliError::Validation("pass --quiver or --rep".into()));
            };
            let x = io::read_rep(path)?;
            ok(
                json!({"rep": path_str(path)}),
                json!({"valid": true, "summary": x.quiver.validation(), "dims": x.dims.to_map(&x.quiver), "norm": x.norm()}),
            )
        }
        Command::Flow { rep, batch, alpha, flow, trajectory, limit } => {
            let mut rep = rep.clone();
            if let Some(dir) = batch {
                rep.extend(batch_files(dir)?);
            }
            if rep.is_empty() {
                return Err(CliError::Validation("no input representations".into()));
            }
            let xs = rep.iter().map(|p| io::read_rep(p)).collect::<Result<Vec<_>, _>>()?;
            if xs.len() > 1 && (trajectory.is_some() || limit.is_some()) {
                return Err(CliError::Validation("--trajectory and --limit need a single --rep".into()));
            }
            let a = load_alpha(&alpha.alpha, &xs[0])?;
            for x in &xs[1..] {
                if *x.quiver != *xs[0].quiver || x.dims != xs[0].dims {
                    return Err(CliError::Validation("batch inputs must share quiver and dimensions".into()));
                }
            }
            let opts = flow.options(&xs[0].quiver)?;
            let config = json!({
                "reps": rep.iter().map(|p| path_str(p)).collect::<Vec<_>>(),
                "alpha": io::weights_to_json(&xs[0].quiver, &a),
                "options": opts,
                "seed": seed,
            });
            let results = flow_batch(&xs, &a, &opts);
            let mut out = Vec::new();
            let mut failure = None;
            for (i, r) in results.into_iter().enumerate() {
                let r = r?;
                if !r.converged() && failure.is_none() {
                    failure = Some(CliError::NotConverged(format!("input {i} stopped with {:?}", r.status)));
                }
                if let Some(p) = trajectory {
                    io::write_atomic(p, &r.trajectory_csv())?;
                }
                if let Some(p) = limit {
                    io::write_json(p, &rep_to_json(&r.limit))?;
                }
                out.push(flow_summary(&r));
            }
            let result = if out.len() == 1 { out.pop().expect("one result") } else { Value::Array(out) };
            Ok(Outcome { config, result, failure })
        }
        Command::Classify { rep, alpha, tols } => {
            let x = io::read_rep(rep)?;
            let a = load_alpha(&alpha.alpha, &x)?;
            let t = tols.tols();
            let p = classify_critical(&x, &a.to_f64(), &t)?;
            ok(
                json!({"rep": path_str(rep), "alpha": io::weights_to_json(&x.quiver, &a), "tolerances": t}),
                profile_json(&x.quiver, &p),
            )
        }
        Command::Negslice { rep, alpha, tols } => {
            let x = io::read_rep(rep)?;
            let a = load_alpha(&alpha.alpha, &x)?;
            let t = tols.tols();
            let p = classify_critical(&x, &a.to_f64(), &t)?;
            let basis = negative_slice_from_profile(&x, &p)?;
            ok(
                json!({"rep": path_str(rep), "alpha": io::weights_to_json(&x.quiver, &a), "tolerances": t}),
                json!({
                    "dimension": basis.len(),
                    "critical_type": p.critical_type.iter().map(|d| d.to_map(&x.quiver)).collect::<Vec<_>>(),
                    "basis": basis.iter().map(|b| tangent_json(b)).collect::<Vec<_>>(),
                }),
            )
        }
        Command::Hn { rep, alpha, flow, tols, oracle } => {
            let x = io::read_rep(rep)?;
            let a = load_alpha(&alpha.alpha, &x)?;
            let opts = flow.options(&x.quiver)?;
            let t = tols.tols();
            let config = json!({
                "rep": path_str(rep),
                "alpha": io::weights_to_json(&x.quiver, &a),
                "options": opts,
                "tolerances": t,
                "oracle": oracle.map(|_| "thin"),
            });
            let r = flow_f64(&x, &a.to_f64(), &opts)?;
            if !r.converged() {
                return Ok(Outcome {
                    config,
                    result: json!({"flow": flow_summary(&r)}),
                    failure: Some(CliError::NotConverged(format!("flow stopped with {:?}", r.status))),
                });
            }
            let p = classify_critical(&r.limit, &a.to_f64(), &t)?;
            let q = &x.quiver;
            let flow_type: Vec<_> = p.critical_type.iter().map(|d| d.to_map(q)).collect();
            let mut result = json!({"flow_type": flow_type, "eigenvalues": p.eigenvalues, "final_energy": r.final_energy});
            if oracle.is_some() {
                let hn = thin_hn_type(&x, &a)?;
                let grouped = group_by_slope(&thin_jh(&x, &a)?);
                result["oracle"] = json!({
                    "hn_type": hn.factors.iter().map(|d| d.to_map(q)).collect::<Vec<_>>(),
                    "slopes": serde_json::to_value(&hn).map_err(|e| CliError::Internal(e.to_string()))?["slopes"].clone(),
                    "refined_grouped": grouped.iter().map(|d| d.to_map(q)).collect::<Vec<_>>(),
                    "warnings": hn.warnings,
                    "agrees": grouped == p.critical_type,
                });
            }
            ok(config, result)
        }
        Command::Hecke { pair, hecke } => {
            let (x1, x2, k) = read_pair(pair)?;
            let h = hecke.options();
            let r = hecke_check(&x1, &x2, k, seed, &h)?;
            ok(
                pair_config(pair, seed, &h),
                json!({
                    "member": r.member,
                    "xi": r.xi.as_ref().map(|xi| blocks_to_json(&x1.quiver, &xi.blocks)),
                    "residual": r.residual,
                    "injectivity": r.injectivity,
                    "solution_dim": r.solution_dim,
                    "diagnostic": r.diagnostic,
                }),
            )
        }
        Command::HeckeConstruct { pair, hecke, start } => {
            let (x1, x2, k) = read_pair(pair)?;
            let h = hecke.options();
            let r = hecke_check(&x1, &x2, k, seed, &h)?;
            let config = pair_config(pair, seed, &h);
            let Some(xi) = r.xi.filter(|_| r.member) else {
                return Ok(Outcome {
                    config,
                    result: json!({"member": false, "diagnostic": r.diagnostic}),
                    failure: Some(CliError::Validation("the pair is not in the Hecke correspondence".into())),
                });
            };
            let fl = hecke_to_flowline(&x1, &x2, &xi, k)?;
            if let Some(p) = start {
                let origin = quiverflow::correspondence::embed(&x1, &x2.dims)?;
                io::write_json(p, &rep_to_json(&origin.displaced(&fl.delta, 1.0)))?;
            }
            ok(
                config,
                json!({
                    "member": true,
                    "xi": blocks_to_json(&x1.quiver, &xi.blocks),
                    "delta": tangent_json(&fl.delta),
                    "g": blocks_to_json(&x1.quiver, &fl.g.blocks),
                    "residual": fl.residual,
                    "slice_defect": fl.slice_defect,
                }),
            )
        }
        Command::Project { rep, limit } => {
            let x = io::read_rep(rep)?;
            let p = affine_project(&x)?;
            if let Some(path) = limit {
                io::write_json(path, &rep_to_json(&p.limit))?;
            }
            ok(json!({"rep": path_str(rep), "options": zero_energy_flow_options(&x)}), flow_summary(&p.flow))
        }
        Command::Lagrangian { x1, x2 } => {
            let a = io::read_rep(x1)?;
            let b = io::read_rep(x2)?;
            let r = lagrangian_check(&a, &b, seed)?;
            ok(
                json!({
                    "x1": path_str(x1),
                    "x2": path_str(x2),
                    "seed": seed,
                    "projection_options": [zero_energy_flow_options(&a), zero_energy_flow_options(&b)],
                    "iso": IsoOptions::flow_limits(),
                }),
                json!({
                    "member": r.member,
                    "projection1": rep_to_json(&r.projection1),
                    "projection2": rep_to_json(&r.projection2),
                    "iso": iso_json(&r.iso),
                }),
            )
        }
        Command::Stratum { rep, vertex, codim, rank_tol, project } => {
            let x = io::read_rep(rep)?;
            let k = resolve_vertex(&x.quiver, vertex)?;
            let found = stratum_codim(&x, k, *rank_tol)?;
            let mut result = json!({"codim": found});
            if let Some(r) = codim {
                let restricted = grassmann_project(&x, k, *r, *rank_tol)?;
                result["restricted_dims"] = json!(restricted.dims.to_map(&x.quiver));
                if let Some(p) = project {
                    io::write_json(p, &rep_to_json(&restricted))?;
                }
            }
            ok(json!({"rep": path_str(rep), "vertex": vertex, "codim": codim, "rank_tol": rank_tol}), result)
        }
        Command::Handsaw(HandsawCommand::ToQuiver { n, v, w }) => {
            let (q, d) = handsaw_to_quiver(*n, v, w)?;
            ok(json!({"n": n, "v": v, "w": w}), json!({"quiver": q.to_spec(), "dims": d.to_map(&q)}))
        }
        Command::Handsaw(HandsawCommand::Adjoint { rep, output }) => {
            let x = io::read_rep(rep)?;
            let y = handsaw_adjoint(&x)?;
            if let Some(p) = output {
                io::write_json(p, &rep_to_json(&y))?;
            }
            let cx = handsaw_constraint(&x)?.norm();
            ok(json!({"rep": path_str(rep)}), json!({"adjoint": rep_to_json(&y), "constraint_norm": cx}))
        }
        Command::Handsaw(HandsawCommand::Hecke { pair, hecke }) => {
            let (x1, x2, k) = read_pair(pair)?;
            let h = hecke.options();
            let r = handsaw_hecke_check(&x1, &x2, k, seed, &h)?;
            ok(
                pair_config(pair, seed, &h),
                json!({
                    "member": r.member,
                    "xi": r.xi.as_ref().map(|xi| blocks_to_json(&x1.quiver, &xi.blocks)),
                    "residuals": r.residuals,
                    "diagnostic": r.diagnostic,
                }),
            )
        }
        Command::Selfcheck => {
            let results = selfcheck::run_all(seed);
            eprint!("{}", selfcheck::summary_table(&results));
            let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
            let failure = (!failed.is_empty()).then(|| CliError::Internal(format!("failed suites: {}", failed.join(", "))));
            Ok(Outcome { config: json!({"seed": seed}), result: json!({"suites": results, "all_passed": failed.is_empty()}), failure })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Flow { .. } => "flow",
        Command::Classify { .. } => "classify",
        Command::Negslice { .. } => "negslice",
        Command::Hn { .. } => "hn",
        Command::Hecke { .. } => "hecke",
        Command::HeckeConstruct { .. } => "hecke-construct",
        Command::Project { .. } => "project",
        Command::Lagrangian { .. } => "lagrangian",
        Command::Stratum { .. } => "stratum",
        Command::Handsaw(HandsawCommand::ToQuiver { .. }) => "handsaw to-quiver",
        Command::Handsaw(HandsawCommand::Adjoint { .. }) => "handsaw adjoint",
        Command::Handsaw(HandsawCommand::Hecke { .. }) => "handsaw hecke",
        Command::Selfcheck => "selfcheck",
    }
}

fn emit(cli: &Cli, report: &Value) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => Ok(io::write_json(p, report)?),
        None => {
            let text = serde_json::to_string_pretty(report).map_err(|e| CliError::Internal(e.to_string()))?;
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let (outcome, error) = match run(&cli) {
        Ok(o) => {
            let f = o.failure;
            (Some((o.config, o.result)), f)
        }
        Err(e) => (None, Some(e)),
    };
    let mut report = json!({
        "timestamp": format!("unix:{secs}"),
        "command": command_name(&cli.command),
        "seed": cli.seed,
    });
    if let Some((config, result)) = outcome {
        report["config"] = config;
        report["result"] = result;
    }
    if let Some(e) = &error {
        report["error"] = json!({"code": e.code(), "message": e.to_string()});
    }
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: {e}");
        return ExitCode::from(e.code());
    }
    match error {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
        None => ExitCode::SUCCESS,
    }
}
