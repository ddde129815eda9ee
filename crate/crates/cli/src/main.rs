//! `bismut-lab`: command-line frontend for the Hermitian geometry engine.
//!
//! Every command reads one JSON input document (`-` for stdin), runs the
//! requested computation, and writes a JSON or markdown report to stdout or
//! `--out`. Exit codes: 0 success, 2 computation failed, 3 malformed input.

mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use bismut_core::catalog::{self, Params};
use bismut_core::par;
use bismut_core::{check_all, identities, metric, DEFAULT_TOL};
use bismut_core::{connection::ConnectionBundle, curvature as curv};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use input::{
    compute_error, input_error, Failure, GridAxis, InputDocument, LoadedInput,
};
use render::ReportBody;

#[derive(Parser)]
#[command(name = "bismut-lab", version, about = "Hermitian non-Kähler geometry toolbox")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check integrability/Jacobi (left-invariant) or the metric axioms
    /// (coordinate) without computing anything else.
    Validate(RunArgs),
    /// Full metric-condition report with residuals.
    Check(RunArgs),
    /// Torsion-parallel threefold classification.
    Classify(RunArgs),
    /// Residuals of the curvature and torsion identity suite.
    Identities(RunArgs),
    /// Curvature tables.
    Curvature(RunArgs),
    /// Batch of check reports, optionally over a parameter grid.
    Census(CensusArgs),
    /// Built-in example catalog.
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Args)]
struct RunArgs {
    /// Input document path, or `-` for stdin.
    file: PathBuf,
    /// Zero tolerance (overrides the document and BISMUT_LAB_TOL).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Grid axis `name=start:stop:count` or `name=v1|v2|...`; repeat for a
    /// cartesian product. Catalog documents only.
    #[arg(long)]
    grid: Vec<String>,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List the built-in examples.
    List {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a catalog entry as a standalone input document.
    Emit {
        /// Entry name; see `catalog list`.
        name: String,
        /// Scalar parameter `name=value`, repeatable. Complex values like
        /// `1+2i` are accepted.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(args) => run_single(args, "validate"),
        Command::Check(args) => run_single(args, "check"),
        Command::Classify(args) => run_single(args, "classify"),
        Command::Identities(args) => run_single(args, "identities"),
        Command::Curvature(args) => run_single(args, "curvature"),
        Command::Census(args) => run_census(args),
        Command::Catalog(CatalogCmd::List { format, out }) => {
            let text = match format {
                Format::Json => pretty(&render::catalog_list_value()),
                Format::Md => render::catalog_list_md(),
            };
            write_output(out.as_deref(), &text)
        }
        Command::Catalog(CatalogCmd::Emit { name, params, out }) => {
            let mut p = Params::new();
            for spec in &params {
                let (key, value) = input::parse_assignment(spec)?;
                p.scalars.insert(key, value);
            }
            catalog::entry(&name).map_err(input_error)?;
            let built = catalog::build(&name, &p).map_err(input_error)?;
            let doc = render::emit_document(&built);
            write_output(out.as_deref(), &pretty(&doc))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report values are finite");
    s.push('\n');
    s
}

fn write_output(out: Option<&std::path::Path>, text: &str) -> Result<(), Failure> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::compute(format!("writing {}: {e}", path.display()))),
    }
}

/// Tolerance precedence: flag, then document option, then environment, then
/// the crate default.
fn resolve_tol(flag: Option<f64>, doc: Option<f64>) -> Result<f64, Failure> {
    let check = |v: f64, whence: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Failure::schema(format!("{whence}: tolerance must be positive, got {v}")))
        }
    };
    if let Some(v) = flag {
        return check(v, "--tol");
    }
    if let Some(v) = doc {
        return check(v, "options.tol");
    }
    if let Ok(raw) = std::env::var("BISMUT_LAB_TOL") {
        let v: f64 = raw
            .trim()
            .parse()
            .map_err(|_| Failure::schema(format!("BISMUT_LAB_TOL: not a number: `{raw}`")))?;
        return check(v, "BISMUT_LAB_TOL");
    }
    Ok(DEFAULT_TOL)
}

fn input_line(doc: &InputDocument) -> String {
    match (&doc.catalog, &doc.input) {
        (Some((name, _)), _) => format!("catalog `{name}` (dim {})", doc.dim),
        (None, LoadedInput::Lie(_)) => format!("left-invariant structure (dim {})", doc.dim),
        (None, LoadedInput::Metric(_)) => format!("coordinate metric (dim {})", doc.dim),
    }
}

/// Run one command on one loaded input. Returns the typed report body.
fn run_body(command: &str, loaded: &LoadedInput, tol: f64) -> Result<ReportBody, Failure> {
    match (command, loaded) {
        ("validate", LoadedInput::Lie(s)) => {
            let v = s.validate();
            if !v.ok(tol) {
                // still a report, but the process signals failure
                return Err(Failure::compute(format!(
                    "structure invalid: integrability residual {:.3e}, Jacobi residual {:.3e}",
                    v.max_integrability_residual, v.max_jacobi_residual
                )));
            }
            Ok(ReportBody::LieValidation(v))
        }
        ("validate", LoadedInput::Metric(m)) => {
            m.validate(tol).map_err(compute_error)?;
            let mj = m.jets().map_err(compute_error)?;
            Ok(ReportBody::MetricValidation {
                identity_residual: mj.identity_residual(),
                conjugation_residual: mj.conjugation_residual(),
            })
        }
        ("check", LoadedInput::Lie(s)) => Ok(ReportBody::Condition(Box::new(
            check_all(s, tol).map_err(compute_error)?,
        ))),
        ("check", LoadedInput::Metric(m)) => Ok(ReportBody::Point(Box::new(
            metric::point_report(m, tol).map_err(compute_error)?,
        ))),
        ("classify", LoadedInput::Lie(s)) => {
            let r = check_all(s, tol).map_err(compute_error)?;
            match r.classification {
                Some(c) => Ok(ReportBody::Classification(Box::new(c))),
                None => Err(Failure::compute(
                    "no classification: input is not a threefold",
                )),
            }
        }
        ("classify", LoadedInput::Metric(_)) => Err(Failure::schema(
            "classify requires a left-invariant input",
        )),
        ("identities", LoadedInput::Lie(s)) => Ok(ReportBody::Identities(
            identities::identity_suite(s, tol).map_err(compute_error)?,
        )),
        ("identities", LoadedInput::Metric(_)) => Err(Failure::schema(
            "identities requires a left-invariant input",
        )),
        ("curvature", LoadedInput::Lie(s)) => {
            s.ensure_valid(tol).map_err(compute_error)?;
            let bundle = ConnectionBundle::new(s).map_err(compute_error)?;
            let chern =
                curv::curvature(s, &bundle.theta, curv::CurvatureKind::Chern).map_err(compute_error)?;
            let bismut = curv::curvature(s, &bundle.theta_b, curv::CurvatureKind::Bismut)
                .map_err(compute_error)?;
            Ok(ReportBody::LieCurvature { n: s.n(), chern, bismut })
        }
        ("curvature", LoadedInput::Metric(m)) => {
            let r = metric::point_report(m, tol).map_err(compute_error)?;
            Ok(ReportBody::CoordCurvature {
                n: r.n,
                chern: r.chern,
                riemannian: Box::new(r.riemannian),
            })
        }
        _ => unreachable!("command dispatch"),
    }
}

fn run_single(args: RunArgs, command: &str) -> Result<(), Failure> {
    let text = input::read_source(&args.file)?;
    let doc = input::parse_document(&text)?;
    let tol = resolve_tol(args.tol, doc.tol)?;
    let body = run_body(command, &doc.input, tol)?;
    let rendered = match args.format {
        Format::Json => pretty(&render::envelope(command, tol, &doc.echo, render::json_body(&body))),
        Format::Md => render::md_page(command, tol, &input_line(&doc), &render::md_body(&body, tol)),
    };
    write_output(args.out.as_deref(), &rendered)
}

fn run_census(args: CensusArgs) -> Result<(), Failure> {
    let text = input::read_source(&args.run.file)?;
    let doc = input::parse_document(&text)?;
    let tol = resolve_tol(args.run.tol, doc.tol)?;

    let axes: Vec<GridAxis> = args
        .grid
        .iter()
        .map(|s| input::parse_grid_axis(s))
        .collect::<Result<_, _>>()?;

    let runs: Vec<(Option<Vec<(String, bismut_core::Cx)>>, Result<LoadedInput, Failure>)> =
        if axes.is_empty() {
            vec![(None, Ok(doc.input.clone()))]
        } else {
            let Some((name, base)) = &doc.catalog else {
                return Err(Failure::schema("--grid requires a catalog input document"));
            };
            let ent = catalog::entry(name).map_err(input_error)?;
            for axis in &axes {
                if !ent.params.iter().any(|(p, _)| *p == axis.name) {
                    return Err(Failure::schema(format!(
                        "catalog entry `{name}` has no parameter `{}`",
                        axis.name
                    )));
                }
                if axis.name == "Y" {
                    return Err(Failure::schema(
                        "matrix parameters cannot be swept with --grid",
                    ));
                }
            }
            input::grid_points(&axes)
                .into_iter()
                .map(|point| {
                    let mut p = base.clone();
                    for (key, value) in &point {
                        p.scalars.insert(key.clone(), *value);
                    }
                    let built = catalog::build(name, &p)
                        .map(input::build_input)
                        .map_err(input_error);
                    (Some(point), built)
                })
                .collect()
        };

    // Lie inputs go through the batch path so the parallel feature applies.
    let mut lie_inputs = Vec::new();
    for (_, loaded) in &runs {
        if let Ok(LoadedInput::Lie(s)) = loaded {
            lie_inputs.push(s.clone());
        }
    }
    let mut lie_reports = par::census(&lie_inputs, tol).into_iter();

    // One report body per run; each successful body renders exactly like a
    // standalone `check` on the same input.
    let mut bodies: Vec<(Option<Vec<(String, bismut_core::Cx)>>, Result<ReportBody, String>)> =
        Vec::with_capacity(runs.len());
    for (point, loaded) in runs {
        let body = match loaded {
            Err(f) => Err(f.message),
            Ok(LoadedInput::Lie(_)) => lie_reports
                .next()
                .expect("one report per lie input")
                .map(|r| ReportBody::Condition(Box::new(r)))
                .map_err(|e| compute_error(e).message),
            Ok(LoadedInput::Metric(m)) => metric::point_report(&m, tol)
                .map(|r| ReportBody::Point(Box::new(r)))
                .map_err(|e| compute_error(e).message),
        };
        bodies.push((point, body));
    }

    match args.run.format {
        Format::Json => {
            let run_values: Vec<Value> = bodies
                .iter()
                .map(|(point, body)| {
                    let mut m = serde_json::Map::new();
                    m.insert(
                        "params".into(),
                        point.as_ref().map_or(Value::Null, |p| {
                            let mut pm = serde_json::Map::new();
                            for (key, value) in p {
                                pm.insert(key.clone(), render::cx_value(*value));
                            }
                            Value::Object(pm)
                        }),
                    );
                    match body {
                        Ok(b) => {
                            m.insert("report".into(), render::json_body(b));
                        }
                        Err(msg) => {
                            m.insert("error".into(), json!(msg));
                        }
                    }
                    Value::Object(m)
                })
                .collect();
            let grid_value = if axes.is_empty() {
                Value::Null
            } else {
                Value::Array(
                    axes.iter()
                        .map(|a| {
                            json!({
                                "name": a.name,
                                "values": a.values.iter().map(|v| render::cx_value(*v)).collect::<Vec<_>>(),
                            })
                        })
                        .collect(),
                )
            };
            let out = json!({
                "tool": "bismut-lab",
                "command": "census",
                "tol": tol,
                "input": doc.echo,
                "grid": grid_value,
                "runs": run_values,
            });
            write_output(args.run.out.as_deref(), &pretty(&out))
        }
        Format::Md => {
            let mut body_text = format!("- runs: {}\n\n", bodies.len());
            for (idx, (point, body)) in bodies.iter().enumerate() {
                let title = match point {
                    None => format!("## run {}\n\n", idx + 1),
                    Some(p) => {
                        let parts: Vec<String> = p
                            .iter()
                            .map(|(k, v)| format!("{k} = {}", render::fmt_cx(*v)))
                            .collect();
                        format!("## run {} ({})\n\n", idx + 1, parts.join(", "))
                    }
                };
                body_text.push_str(&title);
                match body {
                    Ok(b) => body_text.push_str(&render::md_body(b, tol)),
                    Err(msg) => body_text.push_str(&format!("error: {msg}\n\n")),
                }
            }
            let page = render::md_page("census", tol, &input_line(&doc), &body_text);
            write_output(args.run.out.as_deref(), &page)
        }
    }
}
