mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hplscape::fla::{fla_report, WalkConfig, DEFAULT_EPSILON};
use hplscape::local::{build_lon, escape_improve_rates, find_local_optima, EscapeConfig};
use hplscape::similarity::{compare_report, pairwise_long_csv, DEFAULT_GAMMA};
use hplscape::synthetic::{gen_grid_function, gen_nk, GridFunction, GridFunctionSpec, NeighborModel, NkSpec};
use hplscape::{parse_evaluations, parse_space, Direction, Landscape, Scenario, Split};

use manifest::{manifest_path_for, RunManifest};

#[derive(Parser)]
#[command(name = "hplscape", version, about = "Hyperparameter loss landscape analysis")]
struct Cli {
    /// Worker threads; outputs are identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a landscape graph from a schema and an evaluations table.
    Build(BuildArgs),
    /// Compute the landscape metric report of a graph export.
    Metrics(MetricsArgs),
    /// Basins, local optima network and escape statistics of a graph export.
    Lon(LonArgs),
    /// Rank-based similarity of two graph exports.
    Compare(CompareArgs),
    /// Pairwise similarity of several graph exports as long-format CSV.
    CompareBatch(CompareBatchArgs),
    /// Generate a synthetic landscape as schema + evaluations files.
    Synth(SynthArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    schema: PathBuf,
    #[arg(long)]
    evals: PathBuf,
    #[arg(long, default_value = "loss")]
    loss_col: String,
    #[arg(long, value_enum, default_value_t = DirectionArg::Minimize)]
    direction: DirectionArg,
    /// Fidelity label: fraction of training data.
    #[arg(long)]
    alpha: Option<f64>,
    /// Fidelity label: training epochs.
    #[arg(long)]
    epochs: Option<u32>,
    #[arg(long, default_value = "test")]
    split: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Minimize,
    Maximize,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Minimize => Direction::Minimize,
            DirectionArg::Maximize => Direction::Maximize,
        }
    }
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long, default_value_t = 100)]
    walks: usize,
    #[arg(long, default_value_t = 100)]
    walk_len: usize,
    #[arg(long, default_value_t = 1)]
    lag: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl WalkArgs {
    fn config(&self) -> WalkConfig {
        WalkConfig {
            n_walks: self.walks,
            walk_length: self.walk_len,
            lag: self.lag,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[command(flatten)]
    walk: WalkArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LonArgs {
    #[arg(long)]
    graph: PathBuf,
    /// LON JSON output.
    #[arg(long)]
    out: PathBuf,
    /// Basin CSV output (default: `<out stem>.basins.csv`).
    #[arg(long)]
    basins: Option<PathBuf>,
    /// Escape statistics JSON output (default: `<out stem>.escape.json`).
    #[arg(long)]
    escape: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    escape_limit: u64,
    #[arg(long, default_value_t = 100_000)]
    escape_samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CompareArgs {
    graph_a: PathBuf,
    graph_b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareBatchArgs {
    #[arg(required = true, num_args = 2..)]
    graphs: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Nk,
    Sphere,
    Rastrigin,
}

#[derive(Clone, Copy, ValueEnum)]
enum NeighborArg {
    Adjacent,
    Random,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(value_enum)]
    kind: SynthKind,
    /// NK: number of loci.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// NK: interaction degree.
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, value_enum, default_value_t = NeighborArg::Adjacent)]
    neighbors: NeighborArg,
    /// Grid functions: number of dimensions.
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    max: f64,
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Grid functions: seed of a random shift (no shift when absent).
    #[arg(long)]
    shift_seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Exit 2 for bad input, 3 for anything else.
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<hplscape::Error> for Failure {
    fn from(e: hplscape::Error) -> Self {
        Failure::Input(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

type CmdResult = Result<(), Failure>;

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn with_trailing_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "null".into())
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    out.with_file_name(format!("{stem}{suffix}"))
}

fn cmd_build(a: &BuildArgs) -> CmdResult {
    let space = parse_space(&a.schema)?;
    let scenario = Scenario {
        loss_column: a.loss_col.clone(),
        direction: a.direction.into(),
        fidelity_alpha: a.alpha,
        fidelity_epochs: a.epochs,
        split: Split::from(a.split.as_str()),
    };
    let l = parse_evaluations(&space, &a.evals, &scenario)?;
    write_text(&a.out, &with_trailing_newline(l.to_json()))?;
    println!("{} nodes, {} adjacencies", l.len(), l.adjacency_count());
    println!("{} edges, {} neutral pairs", l.edges().len(), l.neutral_pairs().len());

    let mut m = RunManifest::new("build", json!({ "scenario": scenario }));
    m.input(&a.schema)?;
    m.input(&a.evals)?;
    m.output(&a.out)?;
    m.write(&manifest_path_for(&a.out))?;
    Ok(())
}

fn cmd_metrics(a: &MetricsArgs) -> CmdResult {
    let l = Landscape::read_graph(&a.graph)?;
    let w = a.walk.config();
    let r = fla_report(&l, &w, a.epsilon)?;
    write_text(&a.out, &with_trailing_newline(r.to_json()))?;
    println!("autocorrelation  {}", fmt_opt(r.autocorrelation));
    println!("assortativity    {}", fmt_opt(r.assortativity));
    println!("mean_neutrality  {}", fmt_opt(r.mean_neutrality));
    println!("ndc              {}", fmt_opt(r.ndc));
    println!("n_local_optima   {}", r.n_local_optima);
    println!("mean_basin_size  {:.6}{}", r.mean_basin_size, if r.unimodal { " (unimodal)" } else { "" });

    let mut m = RunManifest::new("metrics", json!({ "epsilon": a.epsilon, "walk": w }));
    m.input(&a.graph)?;
    m.output(&a.out)?;
    m.write(&manifest_path_for(&a.out))?;
    Ok(())
}

fn cmd_lon(a: &LonArgs) -> CmdResult {
    let l = Landscape::read_graph(&a.graph)?;
    let b = find_local_optima(&l);
    let lon = build_lon(&l, &b);
    let cfg = EscapeConfig {
        enumeration_limit: a.escape_limit,
        samples: a.escape_samples,
        seed: a.seed,
    };
    let esc = escape_improve_rates(&l, &b, &cfg);

    let basins = a.basins.clone().unwrap_or_else(|| sibling(&a.out, ".basins.csv"));
    let escape = a.escape.clone().unwrap_or_else(|| sibling(&a.out, ".escape.json"));
    write_text(&a.out, &with_trailing_newline(lon.to_json()))?;
    write_text(&basins, &b.to_csv())?;
    let esc_json = serde_json::to_string_pretty(&esc).context("serializing escape stats")?;
    write_text(&escape, &with_trailing_newline(esc_json))?;
    println!(
        "{} local optima, {} LON edges, {} nodes",
        lon.vertices.len(),
        lon.edges.len(),
        l.len()
    );

    let mut m = RunManifest::new("lon", json!({ "escape": cfg }));
    m.input(&a.graph)?;
    m.output(&a.out)?;
    m.output(&basins)?;
    m.output(&escape)?;
    m.write(&manifest_path_for(&a.out))?;
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> CmdResult {
    let la = Landscape::read_graph(&a.graph_a)?;
    let lb = Landscape::read_graph(&a.graph_b)?;
    let r = compare_report(&la, &lb, a.gamma)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    write_text(&a.out, &with_trailing_newline(r.to_json()))?;
    println!("spearman   {}", fmt_opt(r.spearman));
    println!("shakeup    {}", fmt_opt(r.shakeup));
    println!("gamma_set  {}", fmt_opt(r.gamma_set));

    let mut m = RunManifest::new("compare", json!({ "gamma": a.gamma }));
    m.input(&a.graph_a)?;
    m.input(&a.graph_b)?;
    m.output(&a.out)?;
    m.write(&manifest_path_for(&a.out))?;
    Ok(())
}

fn cmd_compare_batch(a: &CompareBatchArgs) -> CmdResult {
    let mut named = Vec::with_capacity(a.graphs.len());
    for g in &a.graphs {
        let name = g.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        named.push((name, Landscape::read_graph(g)?));
    }
    let csv = pairwise_long_csv(&named, a.gamma)?;
    write_text(&a.out, &csv)?;
    println!("{} landscapes, {} pairs", named.len(), named.len() * (named.len() - 1) / 2);

    let mut m = RunManifest::new("compare-batch", json!({ "gamma": a.gamma }));
    for g in &a.graphs {
        m.input(g)?;
    }
    m.output(&a.out)?;
    m.write(&manifest_path_for(&a.out))?;
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> CmdResult {
    let (l, params) = match a.kind {
        SynthKind::Nk => {
            let spec = NkSpec {
                n: a.n,
                k: a.k,
                seed: a.seed,
                neighbor_model: match a.neighbors {
                    NeighborArg::Adjacent => NeighborModel::Adjacent,
                    NeighborArg::Random => NeighborModel::Random,
                },
            };
            (gen_nk(&spec)?, json!({ "kind": "nk", "generator": spec }))
        }
        SynthKind::Sphere | SynthKind::Rastrigin => {
            let function = match a.kind {
                SynthKind::Sphere => GridFunction::Sphere,
                _ => GridFunction::Rastrigin,
            };
            let spec = GridFunctionSpec {
                shift_seed: a.shift_seed,
                ..GridFunctionSpec::square(function, a.dims, a.min, a.max, a.points)
            };
            (gen_grid_function(&spec)?, json!({ "kind": "grid", "generator": spec }))
        }
    };
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let schema = a.out.join("schema.json");
    let evals = a.out.join("evals.csv");
    let schema_text = serde_json::to_string_pretty(&l.space().to_json_value())
        .context("serializing schema")?;
    write_text(&schema, &with_trailing_newline(schema_text))?;
    let mut buf = Vec::new();
    l.write_evaluations_csv(&mut buf)?;
    std::fs::write(&evals, buf).with_context(|| format!("writing {}", evals.display()))?;
    println!("{} rows written to {}", l.len(), evals.display());

    let mut m = RunManifest::new("synth", params);
    m.output(&schema)?;
    m.output(&evals)?;
    m.write(&a.out.join("manifest.json"))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Lon(a) => cmd_lon(a),
        Command::Compare(a) => cmd_compare(a),
        Command::CompareBatch(a) => cmd_compare_batch(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
