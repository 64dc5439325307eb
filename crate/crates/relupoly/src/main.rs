use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relupoly::checks::{all_verdicts, functional_dimension_estimate, identifiability_verdict, Verdict};
use relupoly::complex::{default_box, Complex};
use relupoly::construct::{build_identifiable, build_minimal_nonidentifiable, trail_polytopes, BuildOptions};
use relupoly::depgraph::{depth_certificate, DependencyGraph};
use relupoly::exact::{format_rational, parse_rational, Polyhedron, Rational};
use relupoly::fiber::{emit_configuration_system, enumerate_configurations, fiber_data, verify_membership};
use relupoly::net::{Architecture, Parameter};
use relupoly::render::{complex_svg, dependency_dot, Slice};
use relupoly::report::analyze;
use relupoly::tropical::{breakpoint_complex, facet_weight_closed_form, weight_table};
use relupoly::Error;

#[derive(Parser)]
#[command(name = "relupoly", version, about = "Exact polyhedral analysis and construction of ReLU network parameters")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Half-width of the working box `[-R, R]^d`.
    #[arg(long = "box", global = true, value_parser = rational)]
    r#box: Option<Rational>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Initial slab closeness for constructions.
    #[arg(long, global = true, value_parser = rational)]
    eps: Option<Rational>,
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    /// Exit with status 1 when a verdict fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Plane `o;u;v` (comma-separated coordinates) for drawing networks with d > 2.
    #[arg(long, global = true)]
    slice: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Svg,
    Txt,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the network at rational points.
    Eval {
        net: PathBuf,
        /// Points as `x1,x2,…`; repeat for several.
        #[arg(long = "at", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// The canonical complex with its faces of every dimension.
    Complex { net: PathBuf },
    /// Facet weights by both routes.
    Weights { net: PathBuf },
    /// Facets and ridges of the breakpoint complex.
    Breakpoints { net: PathBuf },
    /// Dependency graph of candidate bent hyperplanes.
    Depgraph {
        net: PathBuf,
        /// Also run the depth certificate against this many hidden layers.
        #[arg(long)]
        layers: Option<usize>,
    },
    /// Property verdicts.
    Check {
        net: PathBuf,
        /// Every verdict plus the identifiability summary.
        #[arg(long)]
        all: bool,
        /// A construction trail whose polytopes join the identifiability search.
        #[arg(long, requires = "all")]
        trail: Option<PathBuf>,
    },
    /// Build a parameter for an architecture.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
        /// Widths `n0,n1,…,n_{L+1}`.
        #[arg(long, value_parser = architecture)]
        arch: Architecture,
    },
    /// Numeric rank of the parameter Jacobian.
    Funcdim { net: PathBuf },
    /// Configuration systems of the network's breakpoint data.
    Fiber {
        net: PathBuf,
        /// Target architecture; the network's own when absent.
        #[arg(long, value_parser = architecture)]
        arch: Option<Architecture>,
        /// List order-respecting candidate maps instead of emitting the ground-truth system.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        /// Check whether this parameter satisfies the ground-truth system.
        #[arg(long)]
        member: Option<PathBuf>,
    },
    /// SVG of the complex or DOT of the dependency graph.
    Render { net: PathBuf },
    /// Aggregate analysis report.
    Report {
        net: PathBuf,
        /// Record wall-clock timings, which makes the output run-dependent.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConstructKind {
    Identifiable,
    Nonidentifiable,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn architecture(s: &str) -> Result<Architecture, String> {
    let widths =
        s.split(',').map(|w| w.trim().parse::<usize>().map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
    Architecture::new(widths).map_err(|e| e.to_string())
}

enum Outcome {
    Ok,
    Failed,
}

fn load(path: &Path) -> relupoly::Result<Parameter> {
    Parameter::from_json_str(&fs::read_to_string(path)?)
}

/// Writes to a sibling temporary file, then renames it over `path`.
fn write_atomic(path: &Path, text: &str) -> relupoly::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(common: &Common, text: &str) -> relupoly::Result<()> {
    match &common.out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> relupoly::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn domain(common: &Common, theta: &Parameter) -> (Rational, Polyhedron) {
    let r = common.r#box.clone().unwrap_or_else(default_box);
    let p = Polyhedron::cube(theta.input_dim(), &r);
    (r, p)
}

fn verdict_text(v: &[Verdict]) -> String {
    v.iter()
        .map(|v| {
            let mut line = format!("{:<20} {:?}", v.property, v.status);
            for w in &v.witnesses {
                line.push_str(&format!("\n    {w}"));
            }
            line
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Serialize)]
struct CheckOutput {
    verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identifiability: Option<relupoly::checks::IdentifiabilityReport>,
}

fn run(cli: Cli) -> relupoly::Result<Outcome> {
    let c = &cli.common;
    match &cli.command {
        Command::Eval { net, points } => {
            let theta = load(net)?;
            let mut rows = Vec::new();
            for p in points {
                let x = p.split(',').map(|s| parse_rational(s.trim())).collect::<relupoly::Result<Vec<_>>>()?;
                if x.len() != theta.input_dim() {
                    return Err(Error::Shape(format!(
                        "point {p} has {} coordinates, expected {}",
                        x.len(),
                        theta.input_dim()
                    )));
                }
                rows.push(theta.eval(&x).iter().map(format_rational).collect::<Vec<_>>());
            }
            emit(c, &json(&rows)?)?;
        }
        Command::Complex { net } => {
            let theta = load(net)?;
            let (_, p) = domain(c, &theta);
            let cx = Complex::build(&theta, &p)?;
            let clipped = cx.facets.iter().filter(|f| f.box_clipped).count();
            if clipped > 0 {
                eprintln!("warning: {clipped} facets reach the box boundary; nothing outside is analyzed");
            }
            emit(c, &json(&cx.to_json())?)?;
        }
        Command::Weights { net } => {
            let theta = load(net)?;
            let (_, p) = domain(c, &theta);
            let cx = Complex::build(&theta, &p)?;
            let bp = breakpoint_complex(&cx)?;
            #[derive(Serialize)]
            struct Row {
                #[serde(flatten)]
                weight: relupoly::tropical::WeightJson,
                /// Whether the closed form agrees, when the facet lies on a single neuron.
                closed_form_agrees: Option<bool>,
            }
            let rows: Vec<Row> = weight_table(&cx, &bp.weights)
                .into_iter()
                .map(|w| {
                    let f = w.facet;
                    let agrees = facet_weight_closed_form(&cx, f).ok().map(|cf| {
                        let rd = bp.weights[f].tropical();
                        cf.same_as(&rd) || (cf.is_zero() && rd.is_zero())
                    });
                    Row { weight: w, closed_form_agrees: agrees }
                })
                .collect();
            emit(c, &json(&rows)?)?;
        }
        Command::Breakpoints { net } => {
            let theta = load(net)?;
            let (_, p) = domain(c, &theta);
            let cx = Complex::build(&theta, &p)?;
            let bp = breakpoint_complex(&cx)?;
            #[derive(Serialize)]
            struct Out {
                facets: Vec<usize>,
                ridges: Vec<usize>,
            }
            emit(c, &json(&Out { facets: bp.facets, ridges: bp.ridges })?)?;
        }
        Command::Depgraph { net, layers } => {
            let theta = load(net)?;
            let (_, p) = domain(c, &theta);
            if c.format == Some(Format::Dot) {
                emit(c, &dependency_dot(&theta, &p)?)?;
                return Ok(Outcome::Ok);
            }
            let cx = Complex::build(&theta, &p)?;
            let g = DependencyGraph::build(&cx)?;
            #[derive(Serialize)]
            struct Out {
                graph: DependencyGraph,
                #[serde(skip_serializing_if = "Option::is_none")]
                certificate: Option<relupoly::depgraph::DepthCertificate>,
            }
            let certificate = layers.map(|l| depth_certificate(&g, l));
            let rejected = matches!(certificate, Some(relupoly::depgraph::DepthCertificate::Reject { .. }));
            emit(c, &json(&Out { graph: g, certificate })?)?;
            if rejected && c.strict {
                return Ok(Outcome::Failed);
            }
        }
        Command::Check { net, all, trail } => {
            let theta = load(net)?;
            let (_, p) = domain(c, &theta);
            let verdicts = all_verdicts(&theta, &p, c.seed)?;
            let mut candidates = vec![("box".to_string(), p.clone())];
            if let Some(path) = trail {
                candidates.extend(trail_polytopes(&fs::read_to_string(path)?)?);
            }
            let identifiability = if *all { Some(identifiability_verdict(&theta, &candidates, c.seed)?) } else { None };
            let failed = verdicts.iter().any(|v| !v.passed());
            let text = if c.format == Some(Format::Txt) {
                let mut t = verdict_text(&verdicts);
                if let Some(i) = &identifiability {
                    t.push_str(&format!("\n{}", i.summary));
                }
                t + "\n"
            } else {
                json(&CheckOutput { verdicts, identifiability })?
            };
            emit(c, &text)?;
            if failed && c.strict {
                return Ok(Outcome::Failed);
            }
        }
        Command::Construct { kind, arch } => {
            let mut opts = BuildOptions { seed: c.seed, ..BuildOptions::default() };
            if let Some(r) = &c.r#box {
                opts.radius = r.clone();
            }
            if let Some(e) = &c.eps {
                opts.eps = e.clone();
            }
            let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;
            match kind {
                ConstructKind::Identifiable => {
                    let (theta, trail) = build_identifiable(arch, &opts)?;
                    write_atomic(&dir.join("net.json"), &theta.to_json_string())?;
                    write_atomic(&dir.join("trail.json"), &json(&trail.to_json(&theta)?)?)?;
                }
                ConstructKind::Nonidentifiable => {
                    let (theta, block) = build_minimal_nonidentifiable(arch, &opts)?;
                    write_atomic(&dir.join("net.json"), &theta.to_json_string())?;
                    write_atomic(&dir.join("block.json"), &json(&block.to_json(&theta))?)?;
                }
            }
            eprintln!("wrote {}", dir.display());
        }
        Command::Funcdim { net } => {
            let theta = load(net)?;
            let (_, p) = domain(c, &theta);
            emit(c, &json(&functional_dimension_estimate(&theta, &p, c.samples, c.seed)?)?)?;
        }
        Command::Fiber { net, arch, enumerate, cap, member } => {
            let theta = load(net)?;
            let (_, p) = domain(c, &theta);
            let (data, config) = fiber_data(&theta, &p)?;
            let target = arch.clone().unwrap_or_else(|| theta.arch.clone());
            if *enumerate {
                let (maps, truncated) = enumerate_configurations(&data, &target, *cap);
                #[derive(Serialize)]
                struct Out {
                    maps: Vec<Vec<String>>,
                    truncated: bool,
                }
                let maps = maps.iter().map(|m| m.iter().map(|n| n.to_string()).collect()).collect();
                emit(c, &json(&Out { maps, truncated })?)?;
            } else if let Some(m) = member {
                let eta = load(m)?;
                let ok = verify_membership(&eta, &data, &config)?;
                emit(c, &json(&serde_json::json!({ "member": ok }))?)?;
                if !ok && c.strict {
                    return Ok(Outcome::Failed);
                }
            } else {
                let sys = emit_configuration_system(&data, &target, &config)?;
                let text = if c.format == Some(Format::Txt) { sys.to_text() } else { json(&sys.to_json())? };
                emit(c, &text)?;
            }
        }
        Command::Render { net } => {
            let theta = load(net)?;
            let (r, p) = domain(c, &theta);
            let dot = c.format == Some(Format::Dot)
                || (c.format.is_none() && c.out.as_ref().is_some_and(|o| o.extension().is_some_and(|e| e == "dot")));
            if dot {
                emit(c, &dependency_dot(&theta, &p)?)?;
            } else {
                let slice = c.slice.as_deref().map(Slice::parse).transpose()?;
                emit(c, &complex_svg(&theta, &r, slice.as_ref())?)?;
            }
        }
        Command::Report { net, timings } => {
            let theta = load(net)?;
            let (r, _) = domain(c, &theta);
            let report = analyze(&theta, &r, c.seed, *timings)?;
            let clipped = report.complex.clipped_breakpoint_facets;
            if clipped > 0 {
                eprintln!("warning: {clipped} breakpoint facets reach the box boundary; nothing outside is analyzed");
            }
            let failed = report.verdicts.iter().any(|v| !v.passed());
            emit(c, &json(&report)?)?;
            if failed && c.strict {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("RELUPOLY_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
