use std::fmt::{Debug, Display};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use combwork::async_iter::{self, DelayMatrix, Ensemble, ExperimentConfig};
use combwork::elimination::{self, DagJson, EliminationStep, LinearizedDag, SearchCaps, SearchMode};
use combwork::expressiveness::{self, BinaryMatrix, Method, RationalJson};
use combwork::graph::{self, GraphJson, GraphSpec, LandmarkSet, WeightedGraph};
use combwork::hypergraph::{self, CutWeights, Hypergraph, HypergraphJson};
use combwork::reversal::{self, Action, ReversalSchedule};
use combwork::tda::{self, PersistenceDiagram};
use combwork::zero_forcing::{self, Variant};

/// Combinatorics workbench: metric-graph persistence, zero forcing,
/// hypergraph cuts, elimination and reversal on DAGs, delayed iterations and
/// binary-matrix match probabilities.
#[derive(Parser)]
#[command(name = "combwork", version)]
struct Cli {
    /// Master seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (output does not depend on this).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Parse and validate inputs, then stop.
    #[arg(long, global = true)]
    validate_only: bool,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph generation, geodesics and ε-nets.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Filtrations, persistence diagrams and bottleneck distances.
    #[command(subcommand)]
    Tda(TdaCmd),
    /// Contingent and leaky zero forcing.
    #[command(subcommand)]
    Zf(ZfCmd),
    /// Hypergraph minimum s-t cuts.
    #[command(subcommand)]
    Hypercut(HypercutCmd),
    /// Edge and vertex elimination on linearized DAGs.
    #[command(subcommand)]
    Elim(ElimCmd),
    /// Data-flow reversal under a memory budget.
    #[command(subcommand)]
    Reversal(ReversalCmd),
    /// Delayed block iterations.
    #[command(subcommand, name = "async")]
    Async(AsyncCmd),
    /// Expressiveness indicators and match probabilities.
    #[command(subcommand)]
    Express(ExpressCmd),
}

#[derive(Args)]
struct GraphInput {
    /// Graph JSON: {"n": .., "edges": [[u, v, w?], ..]}.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Build a graph from a generator spec ({"kind": "cycle", "m": 6, ..}).
    Generate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// All-pairs geodesic distances (null between components).
    Distances {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Greedy farthest-point ε-net from a seeded start vertex.
    Net {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        epsilon: f64,
    },
    /// Check whether a landmark list is an ε-sample, ε-sparse, ε-net.
    CheckNet {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',')]
        landmarks: Vec<usize>,
        #[arg(long)]
        epsilon: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexKind {
    Rips,
    Dowker,
    Witness,
}

#[derive(Subcommand)]
enum TdaCmd {
    /// Persistence diagram of a filtration on the graph metric.
    Diagram {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum)]
        complex: ComplexKind,
        /// Rips cutoff; defaults to the diameter.
        #[arg(long)]
        alpha_max: Option<f64>,
        /// Largest simplex dimension; the diagram covers dimensions below it.
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Landmarks for Dowker/witness; defaults to a greedy net at --epsilon.
        #[arg(long, value_delimiter = ',')]
        landmarks: Option<Vec<usize>>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Witnesses; defaults to every vertex.
        #[arg(long, value_delimiter = ',')]
        witnesses: Option<Vec<usize>>,
    },
    /// Bottleneck distance between two diagram files in one dimension.
    Bottleneck {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// Rips PD¹ count against the cyclomatic number.
    Genus {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 4)]
        subdivide: usize,
    },
    /// Dowker on a greedy ε-net against full Rips, dimension 1.
    Compare {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        epsilon: f64,
    },
}

#[derive(Subcommand)]
enum ZfCmd {
    /// Verify a candidate set.
    Check {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',')]
        set: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Use the pendant-leak formulation.
        #[arg(long)]
        leaky: bool,
    },
    /// Smallest set, by size then lexicographically.
    Min {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        leaky: bool,
        #[arg(long, default_value_t = zero_forcing::DEFAULT_SEARCH_CAP)]
        cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CutMethod {
    Brute,
    Lawler,
    Gadget,
    Noeven,
}

#[derive(Args)]
struct HyperInput {
    /// Hypergraph JSON: {"n", "s", "t", "edges": [[v, ..], ..]}.
    #[arg(long)]
    hypergraph: PathBuf,
    /// Weights JSON [w0, w1, ..] with w0 = 0; all ones when absent.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Subcommand)]
enum HypercutCmd {
    /// Minimum s-t cut.
    Solve {
        #[command(flatten)]
        input: HyperInput,
        #[arg(long, value_enum)]
        method: CutMethod,
        #[arg(long, default_value_t = hypergraph::DEFAULT_BRUTE_FORCE_CAP)]
        cap: usize,
    },
    /// Objective value of a given source side.
    Value {
        #[command(flatten)]
        input: HyperInput,
        #[arg(long, value_delimiter = ',')]
        side: Vec<usize>,
    },
    /// Hypergraph {u, v, s, t} per edge of a graph.
    Maxcut {
        #[command(flatten)]
        input: GraphInput,
    },
}

#[derive(Args)]
struct DagInput {
    /// DAG JSON: {"n", "p", "m", "arcs": [[i, j, label?], ..], "base"?: 1}.
    #[arg(long)]
    dag: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Vertex,
    Edge,
}

#[derive(Subcommand)]
enum ElimCmd {
    /// Apply a step list ([{"kind": "vertex", "j": 3}, ..]) in the DAG's numbering.
    Run {
        #[command(flatten)]
        input: DagInput,
        #[arg(long)]
        steps: PathBuf,
    },
    /// Vertex elimination by smallest Markowitz cost.
    Greedy {
        #[command(flatten)]
        input: DagInput,
    },
    /// Exhaustive optimum.
    Optimal {
        #[command(flatten)]
        input: DagInput,
        #[arg(long, value_enum, default_value = "vertex")]
        mode: ModeArg,
    },
    /// Jacobian by path sums over labels.
    Jacobian {
        #[command(flatten)]
        input: DagInput,
    },
    /// Random DAG in the JSON format.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        labeled: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    StoreAll,
    RecomputeAll,
}

#[derive(Subcommand)]
enum ReversalCmd {
    /// Replay a schedule ([{"evaluate": 2}, {"adjoin": 2}, ..]).
    Simulate {
        #[command(flatten)]
        input: DagInput,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        memory: usize,
    },
    /// Cheapest schedule within the budget, by exhaustive search.
    Optimal {
        #[command(flatten)]
        input: DagInput,
        #[arg(long)]
        memory: usize,
    },
    /// Store-all or recompute-all schedule with its cost.
    Baseline {
        #[command(flatten)]
        input: DagInput,
        #[arg(long, value_enum)]
        kind: BaselineKind,
    },
    /// Binomial checkpointing schedule for a chain of p intermediates.
    Revolve {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        c: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Iid,
    Goe,
    Wishart,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Iid => Ensemble::Iid,
            EnsembleArg::Goe => Ensemble::Goe,
            EnsembleArg::Wishart => Ensemble::Wishart,
        }
    }
}

#[derive(Subcommand)]
enum AsyncCmd {
    /// Spectral radius sweep over trials and c; writes CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Co-spectrality and uniform-delay checks on one sampled instance.
    Verify {
        #[arg(long, value_enum, default_value = "goe")]
        ensemble: EnsembleArg,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        blocks: usize,
        /// Uniform off-diagonal delay.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Use the block-Jacobi matrix (zero diagonal blocks).
        #[arg(long)]
        jacobi: bool,
        /// Conventional -M_ii⁻¹ M_ij off-diagonal blocks.
        #[arg(long, requires = "jacobi")]
        negate_offdiag: bool,
        #[arg(long, default_value_t = 3)]
        extra_history: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Identity,
    Star,
    Maximal,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Brute => Method::Brute,
            MethodArg::Identity => Method::Identity,
            MethodArg::Star => Method::Star,
            MethodArg::Maximal => Method::Maximal,
        }
    }
}

#[derive(Args)]
struct MatrixInput {
    /// Column bitstrings, e.g. ["1000", "1100"]; character i is row i.
    #[arg(long = "A", alias = "a")]
    a: PathBuf,
}

#[derive(Subcommand)]
enum ExpressCmd {
    /// P(m(x) = m(y)) as an exact fraction.
    Prob {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "brute")]
        method: MethodArg,
        #[arg(long, default_value_t = expressiveness::DEFAULT_BRUTE_FORCE_BITS)]
        max_bits: usize,
    },
    /// Indicator vector of a sample matrix (same bitstring format).
    Indicators {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long)]
        x: PathBuf,
    },
    /// Phase vector of the commutative circuit for angles θ.
    Phases {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Vec<f64>,
    },
    /// All nonzero columns of weight ≤ k.
    Weight {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

/// Failure reported on stderr as {code, message, context}.
#[derive(Debug, Serialize)]
struct CliError {
    code: &'static str,
    message: String,
    context: Value,
}

type CliResult<T> = Result<T, CliError>;

fn variant_name<E: Debug>(e: &E) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or_default().to_string()
}

/// Input rejected by a module constructor.
fn invalid<E: Display + Debug>(path: &Path) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError {
        code: "ValidationError",
        message: e.to_string(),
        context: json!({"input": path.display().to_string(), "variant": variant_name(&e)}),
    }
}

/// Failure during computation.
fn domain<E: Display + Debug>(e: E) -> CliError {
    let variant = variant_name(&e);
    let message = e.to_string();
    // nested errors put the inner variant second
    let nested = format!("{e:?}");
    let code = if variant == "InstanceTooLarge" || nested.contains("InstanceTooLarge") {
        "InstanceTooLarge"
    } else {
        "DomainError"
    };
    CliError {
        code,
        message,
        context: json!({"variant": variant}),
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: "ValidationError",
        message: message.into(),
        context: Value::Null,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError {
        code: "IoError",
        message: e.to_string(),
        context: json!({"input": path.display().to_string()}),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError {
        code: "ParseError",
        message: e.to_string(),
        context: json!({"input": path.display().to_string(), "line": e.line(), "column": e.column()}),
    })
}

fn load_graph(path: &Path) -> CliResult<WeightedGraph> {
    WeightedGraph::try_from(read_json::<GraphJson>(path)?).map_err(invalid(path))
}

fn load_hypergraph(input: &HyperInput) -> CliResult<(Hypergraph, Option<CutWeights>)> {
    let h = Hypergraph::try_from(read_json::<HypergraphJson>(&input.hypergraph)?).map_err(invalid(&input.hypergraph))?;
    let w = match &input.weights {
        Some(p) => Some(CutWeights::new(read_json::<Vec<f64>>(p)?).map_err(invalid(p))?),
        None => None,
    };
    Ok((h, w))
}

/// DAG plus the vertex numbering offset used in its file.
fn load_dag(path: &Path) -> CliResult<(LinearizedDag, usize)> {
    let j: DagJson = read_json(path)?;
    let base = j.base;
    Ok((LinearizedDag::try_from(j).map_err(invalid(path))?, base))
}

fn load_columns(path: &Path) -> CliResult<BinaryMatrix> {
    BinaryMatrix::from_bitstrings(&read_json::<Vec<String>>(path)?).map_err(invalid(path))
}

fn shift_step(step: EliminationStep, f: impl Fn(usize) -> Option<usize>) -> Option<EliminationStep> {
    Some(match step {
        EliminationStep::Front { i, j } => EliminationStep::Front { i: f(i)?, j: f(j)? },
        EliminationStep::Back { i, j } => EliminationStep::Back { i: f(i)?, j: f(j)? },
        EliminationStep::Vertex { j } => EliminationStep::Vertex { j: f(j)? },
    })
}

fn steps_out(steps: &[EliminationStep], base: usize) -> Vec<EliminationStep> {
    steps.iter().map(|&s| shift_step(s, |v| Some(v + base)).expect("shift up")).collect()
}

fn shift_action(a: Action, f: impl Fn(usize) -> Option<usize>) -> Option<Action> {
    Some(match a {
        Action::Evaluate(v) => Action::Evaluate(f(v)?),
        Action::Store(v) => Action::Store(f(v)?),
        Action::Restore(v) => Action::Restore(f(v)?),
        Action::Adjoin(v) => Action::Adjoin(f(v)?),
        Action::Free(v) => Action::Free(f(v)?),
    })
}

fn schedule_out(s: &ReversalSchedule, base: usize) -> ReversalSchedule {
    ReversalSchedule {
        actions: s.actions.iter().map(|&a| shift_action(a, |v| Some(v + base)).expect("shift up")).collect(),
    }
}

/// Insert the global seed into a JSON object that does not set one.
fn with_seed(mut v: Value, seed: u64) -> Value {
    if let Value::Object(map) = &mut v {
        map.entry("seed").or_insert(json!(seed));
    }
    v
}

fn from_value<T: DeserializeOwned>(v: Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError {
        code: "ParseError",
        message: e.to_string(),
        context: json!({"input": path.display().to_string()}),
    })
}

enum Output {
    Json(Value),
    Csv(Vec<u8>),
}

fn to_json<T: Serialize>(v: &T) -> Output {
    Output::Json(serde_json::to_value(v).expect("output is serialisable"))
}

fn valid() -> Output {
    Output::Json(json!({"valid": true}))
}

fn variant(leaky: bool) -> Variant {
    if leaky {
        Variant::Leaky
    } else {
        Variant::Contingent
    }
}

fn run(cli: &Cli) -> CliResult<Output> {
    let seed = cli.seed;
    let check_only = cli.validate_only;
    match &cli.command {
        Command::Graph(cmd) => match cmd {
            GraphCmd::Generate { spec } => {
                let raw = with_seed(read_json::<Value>(spec)?, seed);
                let spec_v: GraphSpec = from_value(raw, spec)?;
                if check_only {
                    return Ok(valid());
                }
                let g = graph::generate(&spec_v).map_err(invalid(spec))?;
                Ok(to_json(&GraphJson::from(&g)))
            }
            GraphCmd::Distances { input } => {
                let g = load_graph(&input.graph)?;
                if check_only {
                    return Ok(valid());
                }
                let d = graph::geodesic_distances(&g);
                let rows: Vec<Vec<Option<f64>>> = (0..d.len())
                    .map(|u| d.row(u).iter().map(|&x| x.is_finite().then_some(x)).collect())
                    .collect();
                Ok(to_json(&rows))
            }
            GraphCmd::Net { input, epsilon } => {
                let g = load_graph(&input.graph)?;
                if check_only {
                    return Ok(valid());
                }
                let net = graph::epsilon_net_greedy(&g, *epsilon, seed).map_err(domain)?;
                Ok(to_json(&net))
            }
            GraphCmd::CheckNet {
                input,
                landmarks,
                epsilon,
            } => {
                let g = load_graph(&input.graph)?;
                if check_only {
                    return Ok(valid());
                }
                let l = LandmarkSet::new(landmarks.clone(), *epsilon);
                Ok(to_json(&graph::is_epsilon_net(&g, &l).map_err(domain)?))
            }
        },
        Command::Tda(cmd) => run_tda(cmd, seed, check_only),
        Command::Zf(cmd) => match cmd {
            ZfCmd::Check { input, set, k, leaky } => {
                let g = load_graph(&input.graph)?;
                if check_only {
                    return Ok(valid());
                }
                Ok(to_json(&zero_forcing::check(&g, set, *k, variant(*leaky)).map_err(domain)?))
            }
            ZfCmd::Min { input, k, leaky, cap } => {
                let g = load_graph(&input.graph)?;
                if check_only {
                    return Ok(valid());
                }
                Ok(to_json(&zero_forcing::minimum(&g, *k, variant(*leaky), *cap).map_err(domain)?))
            }
        },
        Command::Hypercut(cmd) => run_hypercut(cmd, check_only),
        Command::Elim(cmd) => run_elim(cmd, seed, check_only),
        Command::Reversal(cmd) => run_reversal(cmd, check_only),
        Command::Async(cmd) => run_async(cmd, seed, check_only),
        Command::Express(cmd) => run_express(cmd, check_only),
    }
}

fn run_tda(cmd: &TdaCmd, seed: u64, check_only: bool) -> CliResult<Output> {
    match cmd {
        TdaCmd::Diagram {
            input,
            complex,
            alpha_max,
            max_dim,
            landmarks,
            epsilon,
            witnesses,
        } => {
            let g = load_graph(&input.graph)?;
            if matches!(complex, ComplexKind::Dowker | ComplexKind::Witness) && landmarks.is_none() && epsilon.is_none() {
                return Err(usage("dowker and witness complexes need --landmarks or --epsilon"));
            }
            if check_only {
                return Ok(valid());
            }
            let d = graph::finite_geodesic_distances(&g).map_err(domain)?;
            let all: Vec<usize> = (0..g.vertex_count()).collect();
            let w = witnesses.clone().unwrap_or(all);
            let l = match (landmarks, epsilon) {
                (Some(l), _) => l.clone(),
                (None, Some(eps)) => graph::epsilon_net_greedy(&g, *eps, seed).map_err(domain)?.landmarks,
                (None, None) => Vec::new(),
            };
            let fc = match complex {
                ComplexKind::Rips => tda::vietoris_rips(&d, alpha_max.unwrap_or_else(|| d.diameter()), *max_dim),
                ComplexKind::Dowker => tda::dowker_complex(&d, &w, &l, *max_dim),
                ComplexKind::Witness => tda::witness_filtration(&d, &w, &l, *max_dim),
            }
            .map_err(domain)?;
            // classes in the top dimension are truncation artifacts
            let pd = tda::persistence(&fc).map_err(domain)?;
            let kept = pd.points().iter().filter(|p| p.dim < *max_dim).copied().collect();
            Ok(to_json(&PersistenceDiagram::from_points(kept)))
        }
        TdaCmd::Bottleneck { left, right, dim } => {
            let a: PersistenceDiagram = read_json(left)?;
            let b: PersistenceDiagram = read_json(right)?;
            if check_only {
                return Ok(valid());
            }
            let value = tda::bottleneck_distance(&a, &b, *dim).map_err(domain)?;
            Ok(Output::Json(json!({"dim": dim, "bottleneck": value})))
        }
        TdaCmd::Genus { input, subdivide } => {
            let g = load_graph(&input.graph)?;
            if check_only {
                return Ok(valid());
            }
            Ok(to_json(&tda::genus_recovery(&g, *subdivide).map_err(domain)?))
        }
        TdaCmd::Compare { input, epsilon } => {
            let g = load_graph(&input.graph)?;
            if check_only {
                return Ok(valid());
            }
            Ok(to_json(&tda::landmark_comparison(&g, *epsilon, seed).map_err(domain)?))
        }
    }
}

fn run_hypercut(cmd: &HypercutCmd, check_only: bool) -> CliResult<Output> {
    match cmd {
        HypercutCmd::Solve { input, method, cap } => {
            let (h, w) = load_hypergraph(input)?;
            let w2 = match (method, &w) {
                (CutMethod::Gadget, Some(w)) => {
                    let s = w.as_slice();
                    if s.len() != 3 || s[1] != 1.0 {
                        return Err(usage("gadget method needs weights [0, 1, w2]"));
                    }
                    s[2]
                }
                (CutMethod::Gadget, None) => 1.0,
                _ => 0.0,
            };
            if check_only {
                return Ok(valid());
            }
            let sol = match method {
                CutMethod::Brute => {
                    let w = w.unwrap_or_else(|| CutWeights::all_ones(h.max_arity()));
                    hypergraph::brute_force_min_cut(&h, &w, *cap).map_err(domain)?
                }
                CutMethod::Lawler => hypergraph::lawler_min_cut(&h),
                CutMethod::Gadget => hypergraph::gadget_min_cut_4uniform(&h, w2).map_err(domain)?,
                CutMethod::Noeven => {
                    let (value, side) = hypergraph::no_even_split_min(&h, *cap).map_err(domain)?;
                    hypergraph::CutSolution {
                        value: value as f64,
                        side,
                    }
                }
            };
            Ok(to_json(&sol))
        }
        HypercutCmd::Value { input, side } => {
            let (h, w) = load_hypergraph(input)?;
            if check_only {
                return Ok(valid());
            }
            let w = w.unwrap_or_else(|| CutWeights::all_ones(h.max_arity()));
            let value = hypergraph::cut_value(&h, side, &w).map_err(domain)?;
            Ok(Output::Json(json!({"value": value})))
        }
        HypercutCmd::Maxcut { input } => {
            let g = load_graph(&input.graph)?;
            if check_only {
                return Ok(valid());
            }
            Ok(to_json(&HypergraphJson::from(&hypergraph::maxcut_reduction(&g))))
        }
    }
}

fn run_elim(cmd: &ElimCmd, seed: u64, check_only: bool) -> CliResult<Output> {
    match cmd {
        ElimCmd::Run { input, steps } => {
            let (g, base) = load_dag(&input.dag)?;
            let raw: Vec<EliminationStep> = read_json(steps)?;
            let steps_in = raw
                .into_iter()
                .map(|s| shift_step(s, |v| v.checked_sub(base)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| usage(format!("step vertex below base {base}")))?;
            if check_only {
                return Ok(valid());
            }
            let out = elimination::run_sequence(&g, &steps_in).map_err(domain)?;
            Ok(Output::Json(json!({
                "total_cost": out.total_cost,
                "is_complete": out.is_complete,
                "costs": out.costs,
                "dag": DagJson::from(&out.dag),
            })))
        }
        ElimCmd::Greedy { input } => {
            let (g, base) = load_dag(&input.dag)?;
            if check_only {
                return Ok(valid());
            }
            let (steps, cost) = elimination::greedy_vertex_sequence(&g);
            Ok(Output::Json(json!({"steps": steps_out(&steps, base), "cost": cost})))
        }
        ElimCmd::Optimal { input, mode } => {
            let (g, base) = load_dag(&input.dag)?;
            if check_only {
                return Ok(valid());
            }
            let mode = match mode {
                ModeArg::Vertex => SearchMode::Vertex,
                ModeArg::Edge => SearchMode::Edge,
            };
            let (steps, cost) = elimination::optimal_sequence(&g, mode, SearchCaps::default()).map_err(domain)?;
            Ok(Output::Json(json!({"steps": steps_out(&steps, base), "cost": cost})))
        }
        ElimCmd::Jacobian { input } => {
            let (g, _) = load_dag(&input.dag)?;
            if check_only {
                return Ok(valid());
            }
            Ok(to_json(&elimination::path_sum_jacobian(&g).map_err(domain)?))
        }
        ElimCmd::Random {
            n,
            p,
            m,
            density,
            labeled,
        } => {
            let g = LinearizedDag::random(*n, *p, *m, *density, *labeled, seed).map_err(domain)?;
            if check_only {
                return Ok(valid());
            }
            Ok(to_json(&DagJson::from(&g)))
        }
    }
}

fn run_reversal(cmd: &ReversalCmd, check_only: bool) -> CliResult<Output> {
    match cmd {
        ReversalCmd::Simulate { input, schedule, memory } => {
            let (g, base) = load_dag(&input.dag)?;
            let raw: ReversalSchedule = read_json(schedule)?;
            let actions = raw
                .actions
                .into_iter()
                .map(|a| shift_action(a, |v| v.checked_sub(base)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| usage(format!("schedule vertex below base {base}")))?;
            if check_only {
                return Ok(valid());
            }
            let report = reversal::simulate_reversal(&g, &ReversalSchedule { actions }, *memory).map_err(domain)?;
            Ok(to_json(&report))
        }
        ReversalCmd::Optimal { input, memory } => {
            let (g, base) = load_dag(&input.dag)?;
            if check_only {
                return Ok(valid());
            }
            let (schedule, cost) = reversal::optimal_reversal_bruteforce(&g, *memory).map_err(domain)?;
            Ok(Output::Json(json!({"schedule": schedule_out(&schedule, base), "cost": cost})))
        }
        ReversalCmd::Baseline { input, kind } => {
            let (g, base) = load_dag(&input.dag)?;
            if check_only {
                return Ok(valid());
            }
            let schedule = match kind {
                BaselineKind::StoreAll => reversal::store_all_schedule(&g),
                BaselineKind::RecomputeAll => reversal::recompute_all_schedule(&g),
            };
            let report = reversal::simulate_reversal(&g, &schedule, usize::MAX).map_err(domain)?;
            Ok(Output::Json(json!({"schedule": schedule_out(&schedule, base), "report": report})))
        }
        ReversalCmd::Revolve { p, c } => {
            if check_only {
                return Ok(valid());
            }
            let schedule = reversal::chain_revolve(*p, *c);
            let report = reversal::simulate_reversal(&LinearizedDag::chain(*p), &schedule, c + 1).map_err(domain)?;
            Ok(Output::Json(json!({
                "schedule": schedule_out(&schedule, 1),
                "cost": reversal::chain_revolve_cost(*p, *c),
                "report": report,
            })))
        }
    }
}

fn run_async(cmd: &AsyncCmd, seed: u64, check_only: bool) -> CliResult<Output> {
    match cmd {
        AsyncCmd::Experiment { config } => {
            let raw = with_seed(read_json::<Value>(config)?, seed);
            let cfg: ExperimentConfig = from_value(raw, config)?;
            cfg.validate().map_err(invalid(config))?;
            if check_only {
                return Ok(valid());
            }
            let rows = async_iter::run_experiment(&cfg).map_err(domain)?;
            let mut buf = Vec::new();
            async_iter::write_csv(&rows, &mut buf).map_err(domain)?;
            Ok(Output::Csv(buf))
        }
        AsyncCmd::Verify {
            ensemble,
            n,
            blocks,
            k,
            jacobi,
            negate_offdiag,
            extra_history,
            tol,
        } => {
            let partition = async_iter::BlockMatrix::equal_partition(*n, *blocks).map_err(domain)?;
            if check_only {
                return Ok(valid());
            }
            let mut m = async_iter::sample_ensemble((*ensemble).into(), &partition, seed).map_err(domain)?;
            if *jacobi {
                m = async_iter::block_jacobi_matrix(&m, *negate_offdiag).map_err(domain)?;
            }
            let delays = DelayMatrix::uniform(*blocks, *k);
            let check = async_iter::verify_delay_laws(&m, &delays, *k, k + extra_history, *tol).map_err(domain)?;
            Ok(to_json(&check))
        }
    }
}

fn run_express(cmd: &ExpressCmd, check_only: bool) -> CliResult<Output> {
    match cmd {
        ExpressCmd::Prob {
            input,
            t,
            method,
            max_bits,
        } => {
            let a = load_columns(&input.a)?;
            let a = BinaryMatrix::coefficients(a.rows(), a.columns().to_vec()).map_err(invalid(&input.a))?;
            if check_only {
                return Ok(valid());
            }
            let p = expressiveness::match_probability(&a, *t, (*method).into(), *max_bits).map_err(domain)?;
            Ok(to_json(&RationalJson::from(&p)))
        }
        ExpressCmd::Indicators { input, x } => {
            let a = load_columns(&input.a)?;
            let xm = load_columns(x)?;
            if check_only {
                return Ok(valid());
            }
            Ok(to_json(&expressiveness::indicators(&a, &xm).map_err(domain)?))
        }
        ExpressCmd::Phases { input, theta } => {
            let a = load_columns(&input.a)?;
            if check_only {
                return Ok(valid());
            }
            Ok(to_json(&expressiveness::circuit_phases(&a, theta).map_err(domain)?))
        }
        ExpressCmd::Weight { n, k } => {
            let a = expressiveness::weight_leq_k_matrix(*n, *k).map_err(domain)?;
            if check_only {
                return Ok(valid());
            }
            Ok(to_json(&a.to_bitstrings()))
        }
    }
}

fn emit(out: &Option<PathBuf>, output: Output) -> io::Result<()> {
    let bytes = match output {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("json value");
            s.push('\n');
            s.into_bytes()
        }
        Output::Csv(b) => b,
    };
    match out {
        Some(path) => fs::write(path, bytes),
        None => io::stdout().lock().write_all(&bytes),
    }
}

fn fail(err: CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&err).expect("error json"));
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            return fail(usage("--workers must be at least 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(domain(e));
        }
    }
    match run(&cli) {
        Ok(output) => match emit(&cli.out, output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(CliError {
                code: "IoError",
                message: e.to_string(),
                context: json!({"output": cli.out.as_ref().map(|p| p.display().to_string())}),
            }),
        },
        Err(e) => fail(e),
    }
}
