use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopgraph::coalescence::{
    analyze_exact, structure_coefficient, write_tau_dump, SolverMethod, SolverOptions,
};
use coopgraph::experiments::{run, ExperimentConfig, ExperimentKind, ExperimentOutput};
use coopgraph::generators::{ensure_connected, GeneratorSpec, SbmParams, DEFAULT_MAX_ATTEMPTS};
use coopgraph::kv::KvMap;
use coopgraph::meanfield;
use coopgraph::{Error, Graph, Result};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "coopgraph",
    version,
    about = "Critical benefit-to-cost ratios on networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; the JSON summary goes next to it with a `.json` suffix.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Override any configuration key, e.g. `--set n_grid=40,60`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Cg,
    GaussSeidel,
    Dense,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph drawn from a generator spec as an edge list.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Redraw until connected.
        #[arg(long)]
        connected: bool,
    },
    /// Exact and mean-field analysis of an edge-list file.
    Analyze {
        graph: PathBuf,
        /// Payoffs R,S,T,P for the selection verdict.
        #[arg(long, allow_hyphen_values = true)]
        game: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the meeting-time system and report the exact critical ratio.
    Exact {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        /// Also write the pairwise meeting times in binary form.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Mean-field quantities for a graph file or an SBM / ER parameter set.
    Meanfield {
        graph: Option<PathBuf>,
        /// `n,m,p,q`
        #[arg(long, conflicts_with_all = ["graph", "er"])]
        sbm: Option<String>,
        /// `n,p`
        #[arg(long, conflicts_with = "graph")]
        er: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo fixation estimate.
    Simulate {
        graph: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Accuracy against network size for a fixed SBM.
    SweepN(Common),
    /// Inverse critical ratio across the ER link probability.
    SweepPEr(Common),
    /// Inverse critical ratio across the SBM inter-community probability.
    SweepQSbm(Common),
    /// Mean-field to exact ratio over random networks from many families.
    Families(Common),
}

fn parse_overrides(common: &Common) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = common
        .overrides
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::param(format!("override {s:?} is not KEY=VALUE")))
        })
        .collect::<Result<_>>()?;
    if let Some(seed) = common.seed {
        out.push(("seed".into(), seed.to_string()));
    }
    if let Some(r) = common.replicates {
        out.push(("replicates".into(), r.to_string()));
    }
    Ok(out)
}

fn read_config(common: &Common) -> Result<Option<KvMap>> {
    common
        .config
        .as_ref()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            KvMap::parse(&text)
        })
        .transpose()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn emit(common: &Common, output: &ExperimentOutput) -> Result<()> {
    let summary = serde_json::to_string_pretty(&output.summary).expect("summary serializes");
    match &common.out {
        Some(path) => {
            write_file(path, &output.csv)?;
            write_file(&summary_path(path), &(summary.clone() + "\n"))?;
            println!("{summary}");
        }
        None => print!("{}", output.csv),
    }
    Ok(())
}

fn emit_json(common: &Common, value: serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(&value).expect("report serializes") + "\n";
    match &common.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn experiment(kind: ExperimentKind, common: &Common, extra: Vec<(String, String)>) -> Result<()> {
    let mut overrides = extra;
    overrides.extend(parse_overrides(common)?);
    let config = ExperimentConfig::resolve(kind, read_config(common)?.as_ref(), &overrides)?;
    emit(common, &run(&config, common.threads)?)
}

fn path_override(key: &str, path: &Option<PathBuf>) -> Vec<(String, String)> {
    path.iter()
        .map(|p| (key.to_string(), p.to_string_lossy().into_owned()))
        .collect()
}

fn parse_numbers(text: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::param(format!("{what}: expected {count} comma-separated numbers")))?;
    if v.len() != count {
        return Err(Error::param(format!(
            "{what}: expected {count} numbers, got {}",
            v.len()
        )));
    }
    Ok(v)
}

fn as_count(x: f64, what: &str) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 {
        Ok(x as usize)
    } else {
        Err(Error::param(format!(
            "{what} must be a non-negative integer"
        )))
    }
}

fn generate(common: &Common, connected: bool) -> Result<()> {
    let mut kv = read_config(common)?.unwrap_or_default();
    for (k, v) in parse_overrides(common)? {
        kv.set(&k, v);
    }
    let spec = GeneratorSpec::from_kv(&kv)?;
    let (graph, attempts) = if connected {
        let c = ensure_connected(&spec, DEFAULT_MAX_ATTEMPTS)?;
        (c.graph, c.attempts)
    } else {
        (spec.generate()?, 1)
    };
    let mut text = String::new();
    for line in spec.to_kv_string().lines() {
        text.push_str(&format!("# {line}\n"));
    }
    text.push_str(&format!("# attempts = {attempts}\n"));
    text.push_str(&graph.to_edge_list_string());
    match &common.out {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exact(
    graph: &Path,
    method: Method,
    tolerance: f64,
    dump: Option<&Path>,
    common: &Common,
) -> Result<()> {
    let g = Graph::read_edge_list_file(graph)?;
    let opts = SolverOptions {
        tolerance,
        method: match method {
            Method::Auto => SolverMethod::Auto,
            Method::Cg => SolverMethod::ConjugateGradient,
            Method::GaussSeidel => SolverMethod::GaussSeidel,
            Method::Dense => SolverMethod::Dense,
        },
        ..SolverOptions::default()
    };
    let (mt, summary, ratio) = analyze_exact(&g, &opts)?;
    if let Some(path) = dump {
        write_tau_dump(&mt, path)?;
    }
    let (pi_tau, pi_tau_p) = summary.weighted_sums();
    emit_json(
        common,
        json!({
            "n": g.n(),
            "edges": g.edge_count(),
            "bstar": ratio,
            "sigma": structure_coefficient(&ratio).ok(),
            "weighted_tau": pi_tau,
            "weighted_tau_p": pi_tau_p,
            "identity_rel_error": summary.identity_rel_error,
            "solver": {
                "method": format!("{:?}", mt.method),
                "iterations": mt.iterations,
                "residual": mt.solver_residual,
                "tolerance": mt.tolerance,
            },
        }),
    )
}

#[allow(clippy::too_many_arguments)]
fn mean_field(
    graph: Option<&Path>,
    sbm: Option<&str>,
    er: Option<&str>,
    b: f64,
    c: f64,
    delta: f64,
    common: &Common,
) -> Result<()> {
    let value = match (graph, sbm, er) {
        (Some(path), None, None) => {
            let g = Graph::read_edge_list_file(path)?;
            json!({"source": "graph", "report": meanfield::report(&g.degree_moments(), b, c, delta)})
        }
        (None, Some(text), None) => {
            let v = parse_numbers(text, 4, "--sbm")?;
            let params = SbmParams::new(as_count(v[0], "n")?, as_count(v[1], "m")?, v[2], v[3])?;
            let moments = meanfield::sbm_moments(&params);
            let q_hat = (params.m >= 2)
                .then(|| meanfield::q_hat(params.m, params.p, params.n))
                .transpose()?;
            json!({
                "source": "sbm",
                "bstar_sbm": meanfield::critical_ratio_sbm(&params),
                "q_hat": q_hat,
                "report": meanfield::report(&moments, b, c, delta),
            })
        }
        (None, None, Some(text)) => {
            let v = parse_numbers(text, 2, "--er")?;
            let n = as_count(v[0], "n")?;
            let params = SbmParams::new(n, 1, v[1], 0.0)?;
            json!({
                "source": "er",
                "bstar_er": meanfield::critical_ratio_er(n, v[1])?,
                "report": meanfield::report(&meanfield::sbm_moments(&params), b, c, delta),
            })
        }
        _ => return Err(Error::param("give one of a graph file, --sbm or --er")),
    };
    emit_json(common, value)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common, connected } => generate(&common, connected),
        Command::Analyze {
            graph,
            game,
            common,
        } => {
            let mut extra = path_override("graph", &Some(graph));
            if let Some(game) = game {
                extra.push(("game".into(), game));
            }
            experiment(ExperimentKind::AnalyzeFile, &common, extra)
        }
        Command::Exact {
            graph,
            method,
            tolerance,
            dump,
            common,
        } => exact(&graph, method, tolerance, dump.as_deref(), &common),
        Command::Meanfield {
            graph,
            sbm,
            er,
            b,
            c,
            delta,
            common,
        } => mean_field(
            graph.as_deref(),
            sbm.as_deref(),
            er.as_deref(),
            b,
            c,
            delta,
            &common,
        ),
        Command::Simulate { graph, common } => experiment(
            ExperimentKind::Simulate,
            &common,
            path_override("graph", &graph),
        ),
        Command::SweepN(common) => experiment(ExperimentKind::SweepN, &common, Vec::new()),
        Command::SweepPEr(common) => experiment(ExperimentKind::SweepPEr, &common, Vec::new()),
        Command::SweepQSbm(common) => experiment(ExperimentKind::SweepQSbm, &common, Vec::new()),
        Command::Families(common) => experiment(ExperimentKind::Families, &common, Vec::new()),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
