//! Command-line front end. [`run`] parses arguments, executes one subcommand
//! and returns the process exit status:
//!
//! - 0: success
//! - 1: invalid input (arguments, group, generating set, budgets)
//! - 2: consistency failure (a suite mismatch or an internal check)

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use harmonic_core::analysis::{
    measure, random_rationals, trial_rng, BoundaryData, DirichletProblem, MeasurementConfig, MeasurementKind,
    Solution, SolveMode,
};
use harmonic_core::cayley::{ratio_to_f64, CayleyGraph};
use harmonic_core::group::{AbelianGroup, GeneratingSet, GroupElement};
use harmonic_core::io::{format_rational, function_to_json, parse_boundary, parse_generating_set};
use harmonic_core::laplace::harmonic_space_dimension;
use harmonic_core::suites::{run_suite, Suite, SuiteLimits};
use harmonic_core::Error;

#[derive(Debug, Parser)]
#[command(name = "harmonic", version, about = "Harmonic functions on Cayley graphs of abelian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    /// Free rank m.
    #[arg(long)]
    pub rank: usize,
    /// Torsion orders, comma separated (empty for none).
    #[arg(long, default_value = "")]
    pub torsion: String,
    /// `standard`, `dup_zero`, `skew`, or a path to a JSON generating set.
    #[arg(long, default_value = "standard")]
    pub gens: String,
    /// Treat the file entries as s_1..s_l and append their negatives.
    #[arg(long)]
    pub symmetrize: bool,
    /// Vertex budget for ball enumeration.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
    Auto,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the n-harmonic functions of polynomial growth order d.
    Dim {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        degree: f64,
        #[arg(long, default_value_t = 1)]
        order: u32,
        /// Include the canonical kernel basis.
        #[arg(long)]
        with_basis: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Canonical basis of the n-harmonic functions of growth order d.
    Basis {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        degree: f64,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Runs a verification suite over a grid.
    Verify {
        /// theorem1_2, theorem1_4, theorem1_5, corollary5_4, bochner or dim_recursions.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        max_rank: Option<usize>,
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long)]
        max_order: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Measures an analytic constant over a radius sweep.
    Measure {
        #[command(flatten)]
        group: GroupArgs,
        /// harnack, gradient, poincare, caccioppoli, meanvalue, onesided or all.
        #[arg(long)]
        kind: String,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        radius_sweep: Vec<u32>,
        #[arg(long, default_value_t = 4)]
        outer_factor: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solves the Dirichlet problem on a ball around the identity.
    Solve {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: u32,
        /// JSON map from element encoding to boundary value.
        #[arg(long, conflicts_with = "seed")]
        boundary: Option<PathBuf>,
        /// Draw boundary values uniformly from [-1, 1] instead.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ball volumes and doubling ratios.
    Volume {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16")]
        radius_sweep: Vec<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Consistency(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Consistency(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Consistency(_) | Error::OutsideCodomain(_) | Error::NotHarmonic(_) | Error::NoConvergence { .. } => {
                Failure::Consistency(msg)
            }
            _ => Failure::Validation(msg),
        }
    }
}

fn validation(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

/// Finished output plus whether every check passed.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, ok: true }
    }
}

pub fn parse_torsion(text: &str) -> Result<Vec<u64>, Failure> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| validation(format!("bad torsion order `{p}`")))
        })
        .collect()
}

pub fn build_graph(args: &GroupArgs) -> Result<CayleyGraph, Failure> {
    let group = AbelianGroup::new(args.rank, parse_torsion(&args.torsion)?)?;
    let named = GeneratingSet::catalogue(&group)
        .into_iter()
        .find(|(n, _)| *n == args.gens)
        .map(|(_, s)| s);
    let gens = match named {
        Some(s) => s,
        None => {
            let path = &args.gens;
            let text = fs::read_to_string(path).map_err(|e| validation(format!("{path}: {e}")))?;
            parse_generating_set(&group, &text, args.symmetrize).map_err(|e| validation(format!("{path}: {e}")))?
        }
    };
    let graph = CayleyGraph::new(group, gens)?;
    Ok(match args.budget {
        Some(b) => graph.with_budget(b),
        None => graph,
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Consistency(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Consistency(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn csv_header_only(header: &str) -> String {
    format!("{header}\n")
}

fn degree_json(d: f64) -> Value {
    if d.fract() == 0.0 && d.abs() < 1e15 {
        json!(d as i64)
    } else {
        json!(d)
    }
}

fn torsion_json(g: &AbelianGroup) -> Value {
    json!(g.torsion_orders())
}

fn cmd_dim(group: &GroupArgs, degree: f64, order: u32, with_basis: bool, format: Format) -> Result<Outcome, Failure> {
    let graph = build_graph(group)?;
    let r = harmonic_space_dimension(&graph, degree, order)?;
    let g = graph.group();
    match format {
        Format::Json => {
            let mut v = json!({
                "m": g.free_rank(),
                "torsion": torsion_json(g),
                "generators": graph.degree(),
                "degree": degree_json(degree),
                "order": order,
                "computed_dim": r.computed_dim,
                "expected_dim": r.expected_dim,
                "torsion_constant": r.torsion_constant,
                "surjective": r.surjective,
            });
            if with_basis {
                v["basis"] = Value::Array(r.kernel.functions.iter().map(function_to_json).collect());
            }
            Ok(Outcome::ok(to_json(&v)))
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                m: usize,
                torsion: String,
                generators: usize,
                degree: f64,
                order: u32,
                computed_dim: usize,
                expected_dim: usize,
                torsion_constant: bool,
                surjective: bool,
            }
            to_csv(&[Row {
                m: g.free_rank(),
                torsion: group.torsion.clone(),
                generators: graph.degree(),
                degree,
                order,
                computed_dim: r.computed_dim,
                expected_dim: r.expected_dim,
                torsion_constant: r.torsion_constant,
                surjective: r.surjective,
            }])
            .map(Outcome::ok)
        }
    }
}

fn cmd_basis(group: &GroupArgs, degree: f64, order: u32, format: Format) -> Result<Outcome, Failure> {
    let graph = build_graph(group)?;
    let r = harmonic_space_dimension(&graph, degree, order)?;
    match format {
        Format::Json => Ok(Outcome::ok(to_json(&json!({
            "dimension": r.computed_dim,
            "basis": r.kernel.functions.iter().map(function_to_json).collect::<Vec<_>>(),
        })))),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                function: usize,
                alpha: String,
                torsion: String,
                num: String,
                den: String,
            }
            let join = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            let mut rows = Vec::new();
            for (i, f) in r.kernel.functions.iter().enumerate() {
                for (m, c) in f.terms() {
                    let alpha: Vec<u64> = m.alpha.iter().map(|&a| a as u64).collect();
                    rows.push(Row {
                        function: i,
                        alpha: join(&alpha),
                        torsion: join(&m.torsion),
                        num: c.numer().to_string(),
                        den: c.denom().to_string(),
                    });
                }
            }
            if rows.is_empty() {
                return Ok(Outcome::ok(csv_header_only("function,alpha,torsion,num,den")));
            }
            to_csv(&rows).map(Outcome::ok)
        }
    }
}

fn cmd_verify(suite: &str, limits: SuiteLimits, format: Format) -> Result<Outcome, Failure> {
    let suite: Suite = suite.parse()?;
    let rows = run_suite(suite, &limits)?;
    let ok = rows.iter().all(|r| r.pass);
    let text = match format {
        Format::Json => to_json(&json!({
            "suite": suite.as_str(),
            "pass": ok,
            "rows": rows,
        })),
        Format::Csv if rows.is_empty() => csv_header_only("m,torsion,gens,k,n,check,expected,computed,pass"),
        Format::Csv => to_csv(&rows)?,
    };
    Ok(Outcome { text, ok })
}

fn cmd_measure(
    group: &GroupArgs,
    kind: &str,
    config: MeasurementConfig,
    format: Format,
) -> Result<Outcome, Failure> {
    let graph = build_graph(group)?;
    let kinds: Vec<MeasurementKind> = if kind == "all" {
        MeasurementKind::ALL.to_vec()
    } else {
        vec![kind.parse()?]
    };
    let reports = kinds
        .iter()
        .map(|&k| measure(&graph, k, &config))
        .collect::<Result<Vec<_>, _>>()?;
    match format {
        Format::Json => {
            let v: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r).expect("report serializes");
                    v["sup"] = json!(r.sup());
                    v
                })
                .collect();
            Ok(Outcome::ok(to_json(&v)))
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                kind: &'static str,
                #[serde(rename = "R")]
                radius: u32,
                trials: usize,
                seed: u64,
                constant: f64,
            }
            let rows: Vec<Row> = reports
                .iter()
                .flat_map(|r| {
                    r.rows.iter().map(move |row| Row {
                        kind: r.kind.as_str(),
                        radius: row.radius,
                        trials: row.trials,
                        seed: r.seed,
                        constant: row.constant,
                    })
                })
                .collect();
            if rows.is_empty() {
                return Ok(Outcome::ok(csv_header_only("kind,R,trials,seed,constant")));
            }
            to_csv(&rows).map(Outcome::ok)
        }
    }
}

fn cmd_solve(
    group: &GroupArgs,
    radius: u32,
    boundary: Option<&PathBuf>,
    seed: Option<u64>,
    mode: Mode,
    format: Format,
) -> Result<Outcome, Failure> {
    let graph = build_graph(group)?;
    let zero = graph.group().zero();
    let ball = Arc::new(graph.ball(&zero, radius)?);
    let problem = DirichletProblem::new(&graph, Arc::clone(&ball))?;
    let values: Vec<BigRational> = match (boundary, seed) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| validation(format!("{}: {e}", path.display())))?;
            let map: HashMap<GroupElement, BigRational> = parse_boundary(graph.group(), &text)?;
            problem.boundary_vector(&map)?
        }
        (None, Some(seed)) => {
            let mut rng = trial_rng(seed, radius, 0);
            random_rationals(&mut rng, ball.boundary().len(), BoundaryData::Signed)
        }
        (None, None) => return Err(validation("solve needs --boundary <path> or --seed <n>")),
    };
    let mode = match mode {
        Mode::Exact => SolveMode::Exact,
        Mode::Float => SolveMode::Float,
        Mode::Auto => SolveMode::Auto,
    };
    let solution = problem.solve(&values, mode)?;
    let (lo, hi) = values.iter().fold((None::<&BigRational>, None::<&BigRational>), |(lo, hi), v| {
        (Some(lo.map_or(v, |l| l.min(v))), Some(hi.map_or(v, |h| h.max(v))))
    });
    let (lo, hi) = (lo.expect("nonempty boundary"), hi.expect("nonempty boundary"));
    let cells: Vec<(String, Value)> = match &solution {
        Solution::Exact(f) => {
            if !problem.is_harmonic_exact(f) {
                return Err(Failure::Consistency("exact solution is not harmonic".into()));
            }
            if f.values()[..ball.member_count()].iter().any(|v| v < lo || v > hi) {
                return Err(Failure::Consistency("maximum principle violated".into()));
            }
            ball.closure()
                .iter()
                .zip(f.values())
                .map(|(x, v)| (x.encode(), Value::String(format_rational(v))))
                .collect()
        }
        Solution::Float(f) => {
            let (lo, hi) = (lo.to_f64().unwrap_or(f64::NAN), hi.to_f64().unwrap_or(f64::NAN));
            let slack = 1e-9 * lo.abs().max(hi.abs());
            if f.values()[..ball.member_count()].iter().any(|&v| v < lo - slack || v > hi + slack) {
                return Err(Failure::Consistency("maximum principle violated".into()));
            }
            ball.closure()
                .iter()
                .zip(f.values())
                .map(|(x, v)| (x.encode(), json!(v)))
                .collect()
        }
    };
    let mode_name = if solution.is_exact() { "exact" } else { "float" };
    match format {
        Format::Json => {
            let residual = problem.residual(&solution.to_f64());
            let values: serde_json::Map<String, Value> = cells.into_iter().collect();
            Ok(Outcome::ok(to_json(&json!({
                "mode": mode_name,
                "radius": radius,
                "members": ball.member_count(),
                "boundary": ball.boundary().len(),
                "residual": residual,
                "values": values,
            }))))
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                vertex: String,
                member: bool,
                value: String,
            }
            let rows: Vec<Row> = cells
                .into_iter()
                .enumerate()
                .map(|(i, (vertex, v))| Row {
                    vertex,
                    member: i < ball.member_count(),
                    value: match v {
                        Value::String(s) => s,
                        other => other.to_string(),
                    },
                })
                .collect();
            to_csv(&rows).map(Outcome::ok)
        }
    }
}

fn cmd_volume(group: &GroupArgs, radii: &[u32], format: Format) -> Result<Outcome, Failure> {
    let graph = build_graph(group)?;
    let rows = graph.measure_volume_doubling(radii)?;
    if rows.iter().any(|r| r.doubling_ratio < BigRational::from_integer(1.into())) {
        return Err(Failure::Consistency("doubling ratio below 1".into()));
    }
    match format {
        Format::Json => Ok(Outcome::ok(to_json(&rows))),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                r: u32,
                volume: usize,
                doubling_ratio: f64,
                normalized_volume: f64,
            }
            let out: Vec<Row> = rows
                .iter()
                .map(|v| Row {
                    r: v.radius,
                    volume: v.volume,
                    doubling_ratio: ratio_to_f64(&v.doubling_ratio),
                    normalized_volume: ratio_to_f64(&v.normalized_volume),
                })
                .collect();
            if out.is_empty() {
                return Ok(Outcome::ok(csv_header_only("r,volume,doubling_ratio,normalized_volume")));
            }
            to_csv(&out).map(Outcome::ok)
        }
    }
}

fn execute(cli: &Cli) -> Result<(Outcome, &OutputArgs), Failure> {
    Ok(match &cli.command {
        Command::Dim {
            group,
            degree,
            order,
            with_basis,
            output,
        } => (cmd_dim(group, *degree, *order, *with_basis, output.format)?, output),
        Command::Basis {
            group,
            degree,
            order,
            output,
        } => (cmd_basis(group, *degree, *order, output.format)?, output),
        Command::Verify {
            suite,
            max_rank,
            max_degree,
            max_order,
            samples,
            seed,
            output,
        } => {
            let limits = SuiteLimits {
                max_rank: *max_rank,
                max_degree: *max_degree,
                max_order: *max_order,
                samples: *samples,
                seed: *seed,
            };
            (cmd_verify(suite, limits, output.format)?, output)
        }
        Command::Measure {
            group,
            kind,
            radius_sweep,
            outer_factor,
            trials,
            seed,
            output,
        } => {
            let config = MeasurementConfig {
                radii: radius_sweep.clone(),
                outer_factor: *outer_factor,
                trials: *trials,
                seed: *seed,
            };
            (cmd_measure(group, kind, config, output.format)?, output)
        }
        Command::Solve {
            group,
            radius,
            boundary,
            seed,
            mode,
            output,
        } => (cmd_solve(group, *radius, boundary.as_ref(), *seed, *mode, output.format)?, output),
        Command::Volume {
            group,
            radius_sweep,
            output,
        } => (cmd_volume(group, radius_sweep, output.format)?, output),
    })
}

/// Runs the command line `args` (including the program name) and returns the
/// exit status. Reports go to `out` or to the `--out` file; diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok((outcome, output)) => {
            let written = match &output.out {
                Some(path) => fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
            if outcome.ok {
                0
            } else {
                let _ = writeln!(err, "error: suite has failing rows");
                2
            }
        }
        Err(f) => {
            let msg = match &f {
                Failure::Validation(m) | Failure::Consistency(m) => m,
            };
            let _ = writeln!(err, "error: {msg}");
            f.exit_code()
        }
    }
}
