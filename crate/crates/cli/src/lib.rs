//! Command-line front end. `run` parses arguments, dispatches and maps
//! failures to exit codes: 0 success, 1 usage or input error, 2 resource or
//! convergence failure, 3 negative verdict.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polyscribe::angles::{check_andreev, check_hyperideal, check_pattern_conditions, AngleWeights};
use polyscribe::circuits::{prismatic_circuits, CycleLimits, DEFAULT_CYCLE_CAP};
use polyscribe::configuration::dimension_report;
use polyscribe::derived::{rectify, truncate};
use polyscribe::export::{to_off, trace_csv};
use polyscribe::fixtures;
use polyscribe::graph::GraphFile;
use polyscribe::inscribability::{check_weights_with, rivin_feasibility_with, RivinOptions, WeightFunction};
use polyscribe::inscription::{
    default_theta, inscribe_rectified, inscribe_truncated, result_graph, verify_inscribed, InscribeOptions,
    InscriptionResult, InscriptionTarget,
};
use polyscribe::packing::{solve_pattern, solve_tangency_packing, Mark, PackingOptions};
use polyscribe::surface::{Bump, RadialSurface};
use polyscribe::PlanarGraph;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "polyscribe", version, about = "Inscribability, circle packings and inscriptions in perturbed spheres")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Packing tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    packing_tol: f64,
    /// Planarity tolerance for inscriptions.
    #[arg(long, global = true, default_value_t = 1e-8)]
    planarity_tol: f64,
    /// Degeneracy guard for inscriptions.
    #[arg(long, global = true, default_value_t = 1e-6)]
    guard_tol: f64,
    /// Cap on relaxation sweeps of the packing solver.
    #[arg(long, global = true, default_value_t = polyscribe::packing::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Cap on enumerated cycles.
    #[arg(long, global = true, default_value_t = DEFAULT_CYCLE_CAP)]
    cycle_cap: usize,
}

/// Tolerances and caps shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub packing_tol: f64,
    pub planarity_tol: f64,
    pub guard_tol: f64,
    pub max_iter: usize,
    pub cycle_cap: usize,
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        for (name, v) in [
            ("packing-tol", self.packing_tol),
            ("planarity-tol", self.planarity_tol),
            ("guard-tol", self.guard_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!(Usage(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.cycle_cap < 1 || self.max_iter < 1 {
            bail!(Usage("--cycle-cap and --max-iter must be at least 1".into()));
        }
        Ok(())
    }

    fn packing(&self) -> PackingOptions {
        PackingOptions {
            tol: self.packing_tol,
            max_iter: self.max_iter,
            ..PackingOptions::default()
        }
    }

    fn limits(&self, max_length: Option<usize>) -> CycleLimits {
        CycleLimits {
            max_length,
            cap: self.cycle_cap,
        }
    }
}

impl From<&ConfigArgs> for RunConfig {
    fn from(a: &ConfigArgs) -> Self {
        RunConfig {
            packing_tol: a.packing_tol,
            planarity_tol: a.planarity_tol,
            guard_tol: a.guard_tol,
            max_iter: a.max_iter,
            cycle_cap: a.cycle_cap,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a graph is polyhedral.
    Validate { graph: PathBuf },
    /// Dual graph.
    Dual(GraphOut),
    /// Truncated graph (one vertex per dart).
    Truncate(GraphOut),
    /// Rectified graph (one vertex per edge).
    Rectify(GraphOut),
    /// Prismatic circuits as lists of primal edge ids.
    Prismatic {
        graph: PathBuf,
        #[arg(long)]
        max_circuit_len: Option<usize>,
    },
    /// Decide inscribability by the linear conditions.
    Inscribable {
        graph: PathBuf,
        #[arg(long)]
        max_circuit_len: Option<usize>,
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// Angle condition checks.
    Angles {
        #[command(subcommand)]
        action: AnglesCommand,
    },
    /// Circle packing or pattern whose nerve is the given graph.
    Pack {
        graph: PathBuf,
        /// Pack the dual of the graph instead.
        #[arg(long)]
        dual: bool,
        /// Angle weights on the nerve edges.
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long)]
        mark: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inscribe the rectified or truncated graph in a perturbed sphere.
    Inscribe {
        graph: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Bump spec JSON; the bundled default when omitted.
        #[arg(long)]
        bump: Option<PathBuf>,
        #[arg(long, default_value_t = polyscribe::inscription::DEFAULT_STEPS)]
        steps: usize,
        /// Pattern angles on the dual edges (truncated target).
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        off: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Dimension counts and their identity.
    Dims { graph: PathBuf },
    /// Re-check an inscription result or an inscribability certificate.
    Verify { file: PathBuf },
    /// Write a built-in fixture graph.
    Fixture {
        /// Fixture name; omit to list them.
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GraphOut {
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum AnglesCommand {
    Check {
        #[arg(long, value_enum)]
        kind: AngleKind,
        graph: PathBuf,
        weights: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AngleKind {
    /// Weights on the edges of the given graph, read as a nerve.
    Pattern,
    /// Weights on the truncated graph of the given graph.
    Andreev,
    Hyperideal,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Target {
    Rectified,
    Truncated,
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A check ran and said no.
#[derive(Debug)]
struct Negative;

fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    use polyscribe::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::ResourceCap(_) | E::NoConvergence { .. } | E::Continuation { .. } | E::Degenerate(_)) => EXIT_RESOURCE,
        Some(E::NotPolyhedral(_) | E::ConditionsFailed(_)) => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let config = RunConfig::from(&cli.config);
    let outcome = config.validate().and_then(|_| dispatch(cli.command, &config));
    match outcome {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(Negative)) => EXIT_NEGATIVE,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

type Outcome = anyhow::Result<Result<(), Negative>>;

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!(polyscribe::Error::from(e))).with_context(|| format!("parsing {}", path.display()))
}

fn read_graph(path: &Path) -> anyhow::Result<PlanarGraph> {
    let v = read_json(path)?;
    let file: GraphFile = serde_json::from_value(v).map_err(polyscribe::Error::from)?;
    file.into_graph().with_context(|| format!("building graph from {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(value: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => write_text(p, &text),
        None => {
            say(&text);
            Ok(())
        }
    }
}

/// Prints a line to stdout, ignoring a closed pipe.
fn say(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn verdict(ok: bool) -> Result<(), Negative> {
    if ok {
        Ok(())
    } else {
        Err(Negative)
    }
}

fn dispatch(command: Command, config: &RunConfig) -> Outcome {
    match command {
        Command::Validate { graph } => {
            let g = read_graph(&graph)?;
            let report = g.validate();
            emit(&serde_json::to_value(&report)?, None)?;
            Ok(verdict(report.polyhedral))
        }
        Command::Dual(a) => {
            let g = read_graph(&a.graph)?;
            let d = g.dual();
            let mut file = GraphFile::from_graph(&d.graph);
            file.origin = Some(json!({"kind": "dual", "edge_map": d.edge_map}));
            emit(&serde_json::to_value(&file)?, a.out.as_deref())?;
            Ok(Ok(()))
        }
        Command::Truncate(a) => {
            let t = truncate(&read_graph(&a.graph)?)?;
            emit(&serde_json::to_value(t.to_file())?, a.out.as_deref())?;
            Ok(Ok(()))
        }
        Command::Rectify(a) => {
            let r = rectify(&read_graph(&a.graph)?)?;
            emit(&serde_json::to_value(r.to_file())?, a.out.as_deref())?;
            Ok(Ok(()))
        }
        Command::Prismatic { graph, max_circuit_len } => {
            let g = read_graph(&graph)?;
            let circuits = prismatic_circuits(&g, config.limits(max_circuit_len))?;
            let lists: Vec<&Vec<usize>> = circuits.iter().map(|c| &c.edges).collect();
            emit(&json!(lists), None)?;
            Ok(Ok(()))
        }
        Command::Inscribable {
            graph,
            max_circuit_len,
            emit_certificate,
        } => {
            let g = read_graph(&graph)?;
            let opts = RivinOptions {
                limits: config.limits(max_circuit_len),
                ..RivinOptions::default()
            };
            let v = rivin_feasibility_with(&g, &opts)?;
            let summary = json!({
                "inscribable": v.inscribable,
                "slack": v.slack.as_ref().map(|q| q.to_string()),
                "violated": v.violated,
                "circuits_used": v.circuits_used,
                "circuits_total": v.circuits_total,
                "complete": v.complete,
            });
            emit(&summary, None)?;
            if let (Some(path), Some(w)) = (emit_certificate, &v.certificate) {
                let cert = json!({
                    "graph": GraphFile::from_graph(&g),
                    "certificate": w.to_json(&g),
                    "slack": v.slack.as_ref().map(|q| q.to_string()),
                });
                emit(&cert, Some(&path))?;
            }
            Ok(verdict(v.inscribable))
        }
        Command::Angles {
            action: AnglesCommand::Check { kind, graph, weights },
        } => {
            let g = read_graph(&graph)?;
            let wv = read_json(&weights)?;
            let report = match kind {
                AngleKind::Pattern => check_pattern_conditions(&g, &AngleWeights::from_json(&g, &wv)?)?,
                AngleKind::Andreev | AngleKind::Hyperideal => {
                    let t = truncate(&g)?;
                    let w = AngleWeights::from_json(&t.graph, &wv)?;
                    if matches!(kind, AngleKind::Andreev) {
                        check_andreev(&t, &w)?
                    } else {
                        check_hyperideal(&t, &w)?
                    }
                }
            };
            emit(&report.to_json(), None)?;
            Ok(verdict(report.satisfied))
        }
        Command::Pack {
            graph,
            dual,
            theta,
            mark,
            tol,
            out,
        } => {
            let g = read_graph(&graph)?;
            let nerve = if dual { g.dual().graph } else { g };
            let mut opts = config.packing();
            if let Some(t) = tol {
                if !(t > 0.0) {
                    bail!(Usage(format!("--tol must be positive, got {t}")));
                }
                opts.tol = t;
            }
            let mark = match mark {
                Some(p) => Some(Mark::from_json(&nerve, &read_json(&p)?)?),
                None => None,
            };
            let packing = match theta {
                Some(p) => solve_pattern(&nerve, &AngleWeights::from_json(&nerve, &read_json(&p)?)?, mark.as_ref(), &opts)?,
                None => {
                    let p = solve_tangency_packing(&nerve, &opts)?;
                    match &mark {
                        Some(m) => polyscribe::packing::normalize_mark(&p, m)?,
                        None => p,
                    }
                }
            };
            emit(&packing.to_json(), out.as_deref())?;
            Ok(Ok(()))
        }
        Command::Inscribe {
            graph,
            target,
            eps,
            bump,
            steps,
            theta,
            out,
            off,
            trace,
        } => {
            let g = read_graph(&graph)?;
            let bump = match bump {
                Some(p) => Bump::from_json(&read_json(&p)?)?,
                None => Bump::default_bump(),
            };
            let k = RadialSurface::new(bump, eps)?;
            let opts = InscribeOptions {
                steps,
                planarity_tol: config.planarity_tol,
                convexity_margin: config.guard_tol,
                packing: config.packing(),
                ..InscribeOptions::default()
            };
            let result = match target {
                Target::Rectified => inscribe_rectified(&g, &k, &opts)?,
                Target::Truncated => {
                    let theta = match theta {
                        Some(p) => AngleWeights::from_json(&g.dual().graph, &read_json(&p)?)?,
                        None => default_theta(&g),
                    };
                    inscribe_truncated(&g, &k, &theta, &opts)?
                }
            };
            let report = verify_inscribed(&result, &k, &result_graph(&result)?);
            if let Some(p) = &off {
                write_text(p, &to_off(&result.surface_points, &result.faces))?;
            }
            if let Some(p) = &trace {
                write_text(p, &trace_csv(&result.steps)?)?;
            }
            match &out {
                Some(p) => {
                    emit(&result.to_json(), Some(p))?;
                    emit(&json!({"verify": report}), None)?;
                }
                None => emit(&json!({"result": result.to_json(), "verify": report}), None)?,
            }
            Ok(verdict(report.passed))
        }
        Command::Dims { graph } => {
            let d = dimension_report(&read_graph(&graph)?);
            say(&format!(
                "{} / {} / {}  ({} + {} = {}: {})",
                d.dim_zp,
                d.dim_teich,
                d.dim_z_oc,
                d.dim_teich,
                d.dim_zp,
                d.dim_z_oc,
                if d.identity_ok { "holds" } else { "fails" }
            ));
            Ok(verdict(d.identity_ok))
        }
        Command::Verify { file } => {
            let v = read_json(&file)?;
            if v.get("surface_points").is_some() {
                let r = InscriptionResult::from_json(&v)?;
                let k = r.surface()?;
                let report = verify_inscribed(&r, &k, &result_graph(&r)?);
                let kind = match r.target {
                    InscriptionTarget::Rectified => "rectified",
                    InscriptionTarget::Truncated => "truncated",
                };
                emit(&json!({"kind": kind, "report": report}), None)?;
                Ok(verdict(report.passed))
            } else if let (Some(gv), Some(cv)) = (v.get("graph"), v.get("certificate")) {
                let g = serde_json::from_value::<GraphFile>(gv.clone())
                    .map_err(polyscribe::Error::from)?
                    .into_graph()?;
                let w = WeightFunction::from_json(&g, cv)?;
                let report = check_weights_with(&g, &w, config.limits(None))?;
                emit(&report.to_json(), None)?;
                Ok(verdict(report.all_pass()))
            } else {
                bail!(Usage(format!("{} is neither an inscription result nor a certificate", file.display())))
            }
        }
        Command::Fixture { name, out } => {
            let Some(name) = name else {
                for n in fixtures::NAMES {
                    say(n);
                }
                return Ok(Ok(()));
            };
            let g = fixtures::by_name(&name).ok_or_else(|| Usage(format!("unknown fixture {name:?}")))?;
            emit(&serde_json::to_value(GraphFile::from_graph(&g))?, out.as_deref())?;
            Ok(Ok(()))
        }
    }
}
