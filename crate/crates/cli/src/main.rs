use std::collections::BTreeMap;
use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use qtw_core::decomp::{self, BallCoverCert, Decomposition};
use qtw_core::gen::{self, FattenedParams, Instance};
use qtw_core::graph::{Graph, Vertex};
use qtw_core::json::{self, DecompositionJson, GraphJson};
use qtw_core::pipeline::{FailureLocus, JGraphJson, PipelineCertificate, PipelineOptions};
use qtw_core::{dot, qi, reduce, BirthOrder};

#[derive(Parser)]
#[command(name = "qtw", version, about = "Coarse tree-width certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance (graph plus ball-cover decomposition).
    #[command(subcommand)]
    Gen(GenCommand),
    /// Build H, its decomposition and psi, and check everything.
    Pipeline(PipelineArgs),
    /// Check that a map is an (L, C)-quasi-isometry.
    VerifyQi(VerifyQiArgs),
    /// Validate a decomposition and its cover sets.
    VerifyDecomp(InputPair),
    /// Join bag-mates at distance at most r.
    Reduce(ReduceArgs),
    /// Write a graph, or the J graph of a certificate, as DOT.
    Render(RenderArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    Cycle {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: GenOut,
    },
    Grid {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        out: GenOut,
    },
    Fattened {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        nodes: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long, default_value_t = 3)]
        ball_size: usize,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Args)]
struct GenOut {
    /// Where to write the graph; with neither path, both go to stdout.
    #[arg(long)]
    graph_out: Option<PathBuf>,
    #[arg(long)]
    decomp_out: Option<PathBuf>,
}

#[derive(Args)]
struct InputPair {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    decomp: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    pair: InputPair,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    max_vertices: usize,
    #[arg(long, value_name = "SEED")]
    randomize_birth_order: Option<u64>,
    /// Record the smallest additive constant for each L up to 2k+2.
    #[arg(long)]
    explore: bool,
}

#[derive(Args)]
struct VerifyQiArgs {
    /// The source graph G.
    #[arg(long)]
    input: PathBuf,
    /// Re-check a pipeline certificate against G.
    #[arg(long, conflicts_with_all = ["target", "map"])]
    cert: Option<PathBuf>,
    /// The target graph H.
    #[arg(long, requires = "map")]
    target: Option<PathBuf>,
    /// JSON object from G vertices to H vertices.
    #[arg(long, requires = "target")]
    map: Option<PathBuf>,
    #[arg(long = "L")]
    l: Option<u64>,
    #[arg(long = "C")]
    c: Option<u64>,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    pair: InputPair,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    decomp_out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// A graph JSON or a pipeline certificate.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Colour J edges green or red.
    #[arg(long)]
    color_edges: bool,
}

enum Failure {
    Input(String),
    Check(FailureLocus),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(g) => run_gen(g),
        Command::Pipeline(a) => run_pipeline(a),
        Command::VerifyQi(a) => run_verify_qi(a),
        Command::VerifyDecomp(a) => run_verify_decomp(a),
        Command::Reduce(a) => run_reduce(a),
        Command::Render(a) => run_render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(locus)) => {
            eprintln!("{}", json::to_canonical(&locus));
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => say(text),
    }
}

/// Prints to stdout; a closed pipe is not an error.
fn say(text: &str) -> Outcome {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(Failure::Input(e.to_string())),
        _ => Ok(()),
    }
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    parse::<GraphJson>(path)?
        .to_graph()
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_pair(pair: &InputPair) -> Result<(Graph, Decomposition, Option<BallCoverCert>), Failure> {
    let g = load_graph(&pair.input)?;
    let dj: DecompositionJson = parse(&pair.decomp)?;
    let d = dj.decomposition().map_err(|e| Failure::Input(format!("{}: {e}", pair.decomp.display())))?;
    let cert = dj.cert().map_err(|e| Failure::Input(format!("{}: {e}", pair.decomp.display())))?;
    Ok((g, d, cert))
}

fn check(stage: &str, detail: String) -> Failure {
    Failure::Check(FailureLocus {
        stage: stage.into(),
        claim: None,
        detail,
    })
}

fn run_gen(cmd: GenCommand) -> Outcome {
    let (inst, out): (Instance, GenOut) = match cmd {
        GenCommand::Cycle { n, out } => (gen::gen_cycle_example(n)?, out),
        GenCommand::Grid { m, s, out } => (gen::gen_subdivided_grid(m, s)?, out),
        GenCommand::Fattened {
            seed,
            nodes,
            k,
            r,
            ball_size,
            out,
        } => (
            gen::gen_fattened(
                seed,
                FattenedParams {
                    nodes,
                    k,
                    r,
                    ball_size,
                },
            )?,
            out,
        ),
    };
    let graph = GraphJson::from(&inst.graph);
    let decomposition = DecompositionJson::new(&inst.decomposition, Some(&inst.cert));
    if out.graph_out.is_none() && out.decomp_out.is_none() {
        #[derive(Serialize)]
        struct Pair<'a> {
            graph: &'a GraphJson,
            decomposition: &'a DecompositionJson,
            provenance: &'a gen::Provenance,
        }
        let pair = Pair {
            graph: &graph,
            decomposition: &decomposition,
            provenance: &inst.provenance,
        };
        return emit(None, &json::to_pretty(&pair));
    }
    if let Some(p) = &out.graph_out {
        emit(Some(p), &json::to_pretty(&graph))?;
    }
    if let Some(p) = &out.decomp_out {
        emit(Some(p), &json::to_pretty(&decomposition))?;
    }
    Ok(())
}

fn run_pipeline(a: PipelineArgs) -> Outcome {
    let (g, d, cert) = load_pair(&a.pair)?;
    let cert = cert.ok_or_else(|| Failure::Input("decomposition has no covers".into()))?;
    let opts = PipelineOptions {
        max_vertices: a.max_vertices,
        birth_order: a.randomize_birth_order.map_or(BirthOrder::MinVertex, BirthOrder::Shuffled),
        explore: a.explore,
    };
    let out = qtw_core::pipeline(&g, &d, &cert, &opts)?;
    emit(a.out.as_deref(), &out.to_json())?;
    match out.failure {
        Some(locus) => Err(Failure::Check(locus)),
        None => Ok(()),
    }
}

fn run_verify_qi(a: VerifyQiArgs) -> Outcome {
    let g = load_graph(&a.input)?;
    let (h, map, l, c) = if let Some(path) = &a.cert {
        let text = read(path)?;
        let cert: PipelineCertificate = json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let digest = json::sha256_hex(json::to_canonical(&GraphJson::from(&g)).as_bytes());
        if digest != cert.input.graph_sha256 {
            return Err(check("input_hash", format!("graph hash {digest} does not match certificate")));
        }
        let h = cert.h_graph.to_graph()?;
        (
            h,
            cert.psi.clone(),
            a.l.unwrap_or(cert.constants.l_original),
            a.c.unwrap_or(cert.constants.c_original),
        )
    } else {
        let (Some(target), Some(map_path)) = (&a.target, &a.map) else {
            return Err(Failure::Input("give --cert, or both --target and --map".into()));
        };
        let h = load_graph(target)?;
        let map: BTreeMap<Vertex, Vertex> = parse(map_path)?;
        let (Some(l), Some(c)) = (a.l, a.c) else {
            return Err(Failure::Input("--L and --C are required with --target".into()));
        };
        (h, map, l, c)
    };
    let report = qi::verify_qi(&g, &h, &map, l, c)?;
    say(&json::to_pretty(&report.report))?;
    match report.report.first_failure() {
        Some((cond, w)) => Err(check(
            "quasi_isometry",
            format!("({l}, {c}) condition {cond} fails: {}", json::to_canonical(w)),
        )),
        None => Ok(()),
    }
}

fn run_verify_decomp(a: InputPair) -> Outcome {
    let (g, d, cert) = load_pair(&a)?;
    let report = decomp::validate(&g, &d)?;
    if let Some(v) = report.first() {
        return Err(check("decomposition", v.to_string()));
    }
    if let Some(cert) = &cert {
        let report = decomp::validate_ball_cover(&g, &d, cert)?;
        if let Some(v) = report.first() {
            return Err(check("covers", v.to_string()));
        }
    }
    let width = decomp::width(&d)?;
    say(&json::to_canonical(&serde_json::json!({
        "valid": true,
        "mode": d.mode,
        "width": width,
        "k": cert.as_ref().map(|c| c.k),
        "r": cert.as_ref().map(|c| c.r),
    })))
}

fn run_reduce(a: ReduceArgs) -> Outcome {
    let (g, d, cert) = load_pair(&a.pair)?;
    let cert = cert.ok_or_else(|| Failure::Input("decomposition has no covers".into()))?;
    let mut added = Vec::new();
    for part in reduce::split_components(&g, &d, &cert)? {
        let (rec, _) = reduce::power_reduce(&part.graph, &part.decomposition, &part.cert)?;
        added.extend(rec.added_edges);
    }
    let reduced = Graph::new(g.vertices().iter().copied(), g.edges().chain(added.iter().copied()))?;
    emit(a.out.as_deref(), &json::to_pretty(&GraphJson::from(&reduced)))?;
    if let Some(p) = &a.decomp_out {
        let out = BallCoverCert { r: 1, ..cert };
        emit(Some(p), &json::to_pretty(&DecompositionJson::new(&d, Some(&out))))?;
    }
    Ok(())
}

fn run_render(a: RenderArgs) -> Outcome {
    let value: Value = parse(&a.input)?;
    let text = if let Some(j) = value.get("j_graph") {
        let j: JGraphJson = serde_json::from_value(j.clone())?;
        dot::j_to_dot(&j, a.color_edges)
    } else {
        let g: GraphJson = serde_json::from_value(value)?;
        dot::graph_to_dot(&g.to_graph()?, "G")
    };
    emit(a.out.as_deref(), text.trim_end())
}
