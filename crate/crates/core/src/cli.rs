//! The `pickbody` command line.
//!
//! Every subcommand reads one JSON problem file, runs the corresponding
//! library operation and emits a report as JSON or CSV. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | solvable / member / extremal / check passed |
//! | 1 | unsolvable / non-member / counterexample / check failed |
//! | 2 | input or schema error |
//! | 3 | undecided, or theorem hypotheses not met |

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cara::{
    cara_distance, gen_cara_disc, gen_cara_lower_bound, pick_body_membership, DomainModel, DomainPoint,
    FeasibilityConfig, Membership,
};
use crate::error::Error;
use crate::extremal::{
    axis_point_check, entry_modulus_check, theorem1_check, theorem2_pipeline, theorem3_check, theorem4_pipeline,
    verify_extremal, TheoremReport, VerifyConfig, DEFAULT_LIFT_BUDGET,
};
use crate::json::{self, Cx};
use crate::kernel_ball::{boundary_scale, defect, scaled_min_eigenvalue, szego_recognition, Kernel};
use crate::numlin::{hermitian_eigen, HermitianMatrix, ToleranceConfig, C64};
use crate::pick_disc::{pick_matrix, solution_count_class, unique_solution, PickProblem, SolutionClass};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Input problem. Complex numbers are `{"re", "im"}` objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default = "disc_domain")]
    pub domain: DomainModel,
    /// One coordinate list per point.
    #[serde(default)]
    pub points: Vec<Vec<Cx>>,
    /// Row-major kernel matrix.
    #[serde(default)]
    pub kernel: Option<Vec<Vec<Cx>>>,
    #[serde(default)]
    pub targets: Option<Vec<Cx>>,
    #[serde(default)]
    pub alpha: Option<Vec<Cx>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Option<ToleranceConfig>,
}

fn disc_domain() -> DomainModel {
    DomainModel::Disc
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub instance_id: String,
    pub verdict: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub inputs: ProblemFile,
    pub verdicts: Vec<VerdictRow>,
    pub witnesses: Value,
    pub timing_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremId {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "4")]
    Four,
    #[value(name = "lemmas")]
    Lemmas,
}

#[derive(Debug, Parser)]
#[command(name = "pickbody", version, about = "Pick interpolation and kernel-ball geometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Problem file (JSON).
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Seed for randomized checks; overrides the problem file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Samples per subtuple (extremal) or per sampled comparison (verify).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Iteration or evaluation budget for searches.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Overrides the PSD tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Disc Pick interpolation: solvability class and the unique interpolant.
    Solve,
    /// Kernel-ball membership (with a kernel) or Pick-body membership (without).
    Member,
    /// Boundary scale of the targets as a direction, and the defect at the boundary.
    Boundary,
    /// Sampled extremality of the kernel.
    Extremal,
    /// Szego-form recognition of the kernel.
    Recognize,
    /// Theorem and lemma checks.
    Verify {
        #[arg(long, value_enum)]
        theorem: TheoremId,
    },
    /// Caratheodory distances and the generalized Caratheodory value.
    Distance,
}

/// Result of one command-line invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Run {
    seed: u64,
    samples: Option<usize>,
    budget: Option<usize>,
    tol: ToleranceConfig,
}

struct Partial {
    code: i32,
    verdicts: Vec<VerdictRow>,
    witnesses: Value,
}

/// Input failures map to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = std::result::Result<Partial, InputError>;

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    execute(&cli)
}

fn input_failure(msg: String) -> Outcome {
    Outcome {
        code: 2,
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let Some(path) = &cli.input else {
        return input_failure("--in FILE is required".into());
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return input_failure(format!("cannot read {}: {e}", path.display())),
    };
    let problem: ProblemFile = match serde_json::from_str(&text) {
        Ok(p) => p,
        Err(e) => return input_failure(format!("malformed problem file: {e}")),
    };
    let mut tol = problem.tolerances.unwrap_or_default();
    if let Some(t) = cli.tol {
        tol.psd_tol = t;
    }
    if let Err(e) = tol.validate() {
        return input_failure(e.to_string());
    }
    let ctx = Run {
        seed: cli.seed.or(problem.seed).unwrap_or(0),
        samples: cli.samples,
        budget: cli.budget,
        tol,
    };
    let start = Instant::now();
    let (name, result) = match &cli.command {
        Command::Solve => ("solve", cmd_solve(&problem, &ctx)),
        Command::Member => ("member", cmd_member(&problem, &ctx)),
        Command::Boundary => ("boundary", cmd_boundary(&problem, &ctx)),
        Command::Extremal => ("extremal", cmd_extremal(&problem, &ctx)),
        Command::Recognize => ("recognize", cmd_recognize(&problem, &ctx)),
        Command::Verify { theorem } => ("verify", cmd_verify(&problem, &ctx, *theorem)),
        Command::Distance => ("distance", cmd_distance(&problem, &ctx)),
    };
    let partial = match result {
        Ok(p) => p,
        Err(InputError(msg)) => return input_failure(msg),
    };
    let report = ReportFile {
        command: name.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        seed: ctx.seed,
        inputs: problem,
        verdicts: partial.verdicts,
        witnesses: partial.witnesses,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).map(|s| s + "\n").map_err(|e| e.to_string()),
        Format::Csv => render_csv(&report),
    };
    let rendered = match rendered {
        Ok(r) => r,
        Err(e) => return input_failure(format!("cannot render report: {e}")),
    };
    match &cli.out {
        Some(out) => match std::fs::write(out, &rendered) {
            Ok(()) => Outcome {
                code: partial.code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => input_failure(format!("cannot write {}: {e}", out.display())),
        },
        None => Outcome {
            code: partial.code,
            stdout: rendered,
            stderr: String::new(),
        },
    }
}

/// One row per verdict: `command, instance_id, verdict, residual, seed`.
pub fn render_csv(report: &ReportFile) -> std::result::Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| e.to_string();
    w.write_record(["command", "instance_id", "verdict", "residual", "seed"]).map_err(err)?;
    for v in &report.verdicts {
        w.write_record([
            report.command.as_str(),
            v.instance_id.as_str(),
            v.verdict.as_str(),
            &format!("{:e}", v.residual),
            &report.seed.to_string(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

fn row(p: &ProblemFile, suffix: Option<&str>, verdict: &str, residual: f64) -> VerdictRow {
    let base = p.id.clone().unwrap_or_else(|| "0".to_string());
    let instance_id = match suffix {
        Some(s) => format!("{base}/{s}"),
        None => base,
    };
    VerdictRow {
        instance_id,
        verdict: verdict.to_string(),
        residual: if residual.is_finite() { residual } else { f64::MAX },
    }
}

fn cxs(v: &[Cx]) -> Vec<C64> {
    v.iter().map(|&z| z.into()).collect()
}

fn domain_points(p: &ProblemFile) -> std::result::Result<Vec<DomainPoint>, InputError> {
    if p.points.is_empty() {
        return Err(InputError("the problem needs points".into()));
    }
    let pts: Vec<DomainPoint> = p
        .points
        .iter()
        .map(|c| DomainPoint::new(cxs(c)))
        .collect::<crate::Result<_>>()?;
    for q in &pts {
        if q.coords().len() != p.domain.dim() {
            return Err(InputError(format!(
                "point with {} coordinates in a domain of dimension {}",
                q.coords().len(),
                p.domain.dim()
            )));
        }
    }
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let same = pts[i].coords().iter().zip(pts[j].coords()).all(|(a, b)| (a - b).norm() <= 1e-12);
            if same {
                return Err(InputError(format!("points {i} and {j} coincide")));
            }
        }
    }
    Ok(pts)
}

fn disc_nodes(p: &ProblemFile) -> std::result::Result<Vec<C64>, InputError> {
    if p.domain != DomainModel::Disc {
        return Err(InputError("this command needs a disc problem".into()));
    }
    Ok(domain_points(p)?.iter().map(|q| q.coords()[0]).collect())
}

fn targets(p: &ProblemFile) -> std::result::Result<Vec<C64>, InputError> {
    match &p.targets {
        Some(t) if !t.is_empty() => Ok(cxs(t)),
        _ => Err(InputError("the problem needs targets".into())),
    }
}

fn alpha(p: &ProblemFile) -> std::result::Result<Vec<C64>, InputError> {
    match &p.alpha {
        Some(a) if !a.is_empty() => Ok(cxs(a)),
        _ => Err(InputError("the problem needs alpha".into())),
    }
}

/// The explicit kernel, or the Szego kernel of disc points when absent.
fn kernel(p: &ProblemFile, tol: &ToleranceConfig) -> std::result::Result<Kernel, InputError> {
    match &p.kernel {
        Some(rows) => {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(InputError("kernel must be a nonempty square matrix".into()));
            }
            let data: Vec<C64> = rows.iter().flat_map(|r| r.iter().map(|&z| C64::from(z))).collect();
            let scale = data.iter().fold(1.0f64, |m, z| m.max(z.norm()));
            for i in 0..n {
                for j in 0..n {
                    if (data[i * n + j] - data[j * n + i].conj()).norm() > 1e-8 * scale {
                        return Err(InputError("kernel is not Hermitian".into()));
                    }
                }
            }
            Ok(Kernel::new(HermitianMatrix::from_row_major(n, data)?, tol)?)
        }
        None => Ok(Kernel::szego(&disc_nodes(p)?)?),
    }
}

fn cmd_solve(p: &ProblemFile, ctx: &Run) -> CmdResult {
    let nodes = disc_nodes(p)?;
    let problem = PickProblem::new(nodes, targets(p)?)?;
    let class = solution_count_class(&problem, &ctx.tol);
    let lo = hermitian_eigen(&pick_matrix(&problem))?.min();
    let (verdict, code, witnesses) = match class {
        SolutionClass::None => ("None".to_string(), 1, json!({ "class": "None" })),
        SolutionClass::Many => ("Many".to_string(), 0, json!({ "class": "Many" })),
        SolutionClass::Unique(r) => {
            let b = unique_solution(&problem, &ctx.tol)?;
            (
                format!("Unique({r})"),
                0,
                json!({
                    "class": "Unique",
                    "rank": r,
                    "blaschke": {
                        "degree": b.degree(),
                        "constant": json::complex(b.unimodular_constant()),
                        "zeros": json::complexes(b.zeros()),
                    }
                }),
            )
        }
    };
    Ok(Partial {
        code,
        verdicts: vec![row(p, None, &verdict, lo)],
        witnesses,
    })
}

fn cmd_member(p: &ProblemFile, ctx: &Run) -> CmdResult {
    let w = targets(p)?;
    if p.kernel.is_some() || p.domain == DomainModel::Disc {
        let k = kernel(p, &ctx.tol)?;
        let inside = crate::kernel_ball::membership(&k, &w, &ctx.tol)?;
        let lo = scaled_min_eigenvalue(&k, &w)?;
        return Ok(Partial {
            code: if inside { 0 } else { 1 },
            verdicts: vec![row(p, None, if inside { "Member" } else { "NonMember" }, lo)],
            witnesses: json!({ "scaled_min_eigenvalue": lo }),
        });
    }
    let pts = domain_points(p)?;
    let feas = FeasibilityConfig {
        budget: ctx.budget.unwrap_or(FeasibilityConfig::default().budget),
        ..Default::default()
    };
    let verdict = pick_body_membership(&p.domain, &pts, &w, &ctx.tol, &feas)?;
    let (label, code) = match verdict {
        Membership::Member => ("Member", 0),
        Membership::NonMember => ("NonMember", 1),
        Membership::Undecided => ("Undecided", 3),
    };
    Ok(Partial {
        code,
        verdicts: vec![row(p, None, label, 0.0)],
        witnesses: Value::Null,
    })
}

fn cmd_boundary(p: &ProblemFile, ctx: &Run) -> CmdResult {
    let k = kernel(p, &ctx.tol)?;
    let w = targets(p)?;
    let r = boundary_scale(&k, &w)?;
    let point: Vec<C64> = w.iter().map(|z| z * r).collect();
    let d = defect(&k, &point, &ctx.tol)?;
    Ok(Partial {
        code: 0,
        verdicts: vec![row(p, None, "BoundaryScale", (d.operator_norm - 1.0).abs())],
        witnesses: json!({
            "boundary_scale": r,
            "boundary_point": json::complexes(&point),
            "operator_norm": d.operator_norm,
            "defect_rank": d.defect_rank,
        }),
    })
}

fn cmd_extremal(p: &ProblemFile, ctx: &Run) -> CmdResult {
    let k = kernel(p, &ctx.tol)?;
    let samples = ctx.samples.unwrap_or(50);
    let budget = ctx.budget.unwrap_or(DEFAULT_LIFT_BUDGET);
    let v = verify_extremal(&k, samples, ctx.seed, budget, &ctx.tol)?;
    let (label, code) = if v.extremal {
        ("Extremal", 0)
    } else if !v.counterexamples.is_empty() {
        ("NotExtremal", 1)
    } else {
        ("Undecided", 3)
    };
    let failure = |f: &crate::extremal::LiftFailure| {
        json!({
            "tuple": f.index.indices(),
            "boundary_point": json::complexes(&f.boundary_point),
            "best": f.best,
            "bound": f.bound,
        })
    };
    let worst = v.counterexamples.iter().chain(&v.undecided).fold(0.0f64, |m, f| m.max(-f.best));
    Ok(Partial {
        code,
        verdicts: vec![row(p, None, label, worst)],
        witnesses: json!({
            "checked_tuples": v.checked_tuples.iter().map(|t| t.indices().to_vec()).collect::<Vec<_>>(),
            "lifts": v.witnesses.len(),
            "sample_lifts": v.witnesses.iter().take(10).map(|w| json!({
                "tuple": w.index.indices(),
                "boundary_point": json::complexes(&w.boundary_point),
                "lift": json::complexes(&w.lift),
            })).collect::<Vec<_>>(),
            "counterexamples": v.counterexamples.iter().map(failure).collect::<Vec<_>>(),
            "undecided": v.undecided.iter().map(failure).collect::<Vec<_>>(),
        }),
    })
}

fn cmd_recognize(p: &ProblemFile, ctx: &Run) -> CmdResult {
    let k = kernel(p, &ctx.tol)?.normalize();
    Ok(match szego_recognition(&k, &ctx.tol)? {
        Some(form) => Partial {
            code: 0,
            verdicts: vec![row(p, None, "Szego", form.residual)],
            witnesses: json!({
                "alpha": json::complexes(&form.alpha),
                "theta": form.theta,
            }),
        },
        None => Partial {
            code: 1,
            verdicts: vec![row(p, None, "NotSzego", 0.0)],
            witnesses: Value::Null,
        },
    })
}

fn theorem_code(reports: &[TheoremReport]) -> i32 {
    if reports.iter().any(|r| r.hypotheses_hold() && r.conclusion_evaluated && !r.passed()) {
        1
    } else if reports.iter().all(|r| r.passed()) {
        0
    } else {
        3
    }
}

fn report_row(p: &ProblemFile, r: &TheoremReport, suffix: &str) -> VerdictRow {
    let label = if r.passed() {
        "Pass"
    } else if !r.hypotheses_hold() {
        "HypothesesNotMet"
    } else {
        "Fail"
    };
    let residual = if r.conclusion_evaluated {
        r.conclusion_residual()
    } else {
        r.hypotheses.iter().filter(|h| !h.pass).fold(0.0f64, |m, h| m.max(h.residual))
    };
    row(p, Some(suffix), label, residual)
}

fn cmd_verify(p: &ProblemFile, ctx: &Run, theorem: TheoremId) -> CmdResult {
    let pts = domain_points(p)?;
    let mut cfg = VerifyConfig {
        tol: ctx.tol,
        seed: ctx.seed,
        ..Default::default()
    };
    if let Some(s) = ctx.samples {
        cfg.cross_samples = s;
    }
    if let Some(b) = ctx.budget {
        cfg.lift_budget = b;
        cfg.feasibility.budget = b.max(1);
    }
    let reports: Vec<(String, TheoremReport)> = match theorem {
        TheoremId::One => vec![("theorem1".into(), theorem1_check(&p.domain, &pts, &cfg)?)],
        TheoremId::Two => {
            let k = kernel(p, &ctx.tol)?;
            vec![("theorem2".into(), theorem2_pipeline(&k, &p.domain, &pts, &alpha(p)?, &cfg)?)]
        }
        TheoremId::Three => {
            let k = kernel(p, &ctx.tol)?.normalize();
            vec![("theorem3".into(), theorem3_check(&k, &p.domain, &pts, &alpha(p)?, &cfg)?)]
        }
        TheoremId::Four => {
            let k = kernel(p, &ctx.tol)?.normalize();
            vec![("theorem4".into(), theorem4_pipeline(&k, &p.domain, &pts, &alpha(p)?, &cfg)?)]
        }
        TheoremId::Lemmas => {
            let k = kernel(p, &ctx.tol)?.normalize();
            let mut out = vec![(
                "entry-modulus".to_string(),
                entry_modulus_check(&k, &p.domain, &pts, 1e-10)?,
            )];
            for pos in 0..pts.len() {
                out.push((
                    format!("axis-point-{pos}"),
                    axis_point_check(&k, &p.domain, &pts, pos, cfg.match_tol, &cfg)?,
                ));
            }
            out
        }
    };
    let only: Vec<TheoremReport> = reports.iter().map(|(_, r)| r.clone()).collect();
    Ok(Partial {
        code: theorem_code(&only),
        verdicts: reports.iter().map(|(s, r)| report_row(p, r, s)).collect(),
        witnesses: serde_json::to_value(&only).map_err(|e| InputError(e.to_string()))?,
    })
}

fn cmd_distance(p: &ProblemFile, ctx: &Run) -> CmdResult {
    let pts = domain_points(p)?;
    let mut verdicts = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = cara_distance(&p.domain, &pts[i], &pts[j])?;
            verdicts.push(row(p, Some(&format!("c*({i},{j})")), "Distance", d));
            pairs.push(json!({ "i": i, "j": j, "distance": d }));
        }
    }
    let mut gen = Value::Null;
    if pts.len() >= 2 {
        let (value, exact) = match p.domain {
            DomainModel::Disc => (
                gen_cara_disc(
                    pts[0].coords()[0],
                    &pts[1..].iter().map(|q| q.coords()[0]).collect::<Vec<_>>(),
                ),
                true,
            ),
            DomainModel::Polydisc { .. } => (
                gen_cara_lower_bound(&p.domain, &pts[0], &pts[1..], ctx.budget.unwrap_or(256))?,
                false,
            ),
        };
        let label = if exact { "GenCara" } else { "GenCaraLowerBound" };
        verdicts.push(row(p, Some("gen"), label, value));
        gen = json!({ "value": value, "exact": exact });
    }
    Ok(Partial {
        code: 0,
        verdicts,
        witnesses: json!({ "pairs": pairs, "generalized": gen }),
    })
}
