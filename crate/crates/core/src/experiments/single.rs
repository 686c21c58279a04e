use serde::Serialize;
use serde_json::json;

use super::*;
use crate::coalescence::structure_coefficient;
use crate::game::{selection_condition, GameMatrix};
use crate::generators::GeneratorSpec;
use crate::graph::{DegreeMoments, Graph};
use crate::meanfield;
use crate::oracle;
use crate::sim::{estimate_fixation, Placement};

#[derive(Debug, Clone, Serialize)]
pub struct ExactPart {
    pub bstar: CriticalRatio,
    pub sigma: Option<f64>,
    pub favors_c: Option<bool>,
    pub iterations: usize,
    pub residual: f64,
    pub identity_rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanFieldPart {
    pub bstar: CriticalRatio,
    pub sigma: Option<f64>,
    pub tau: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub edges: usize,
    pub moments: DegreeMoments,
    pub game: GameMatrix,
    /// Absent when the graph exceeds the exact size cap.
    pub exact: Option<ExactPart>,
    pub mean_field: MeanFieldPart,
    pub mean_field_favors_c: Option<bool>,
}

/// Exact and mean-field structure of a connected graph, with the selection
/// verdict `(R - P) σ > T - S` for `game`.
pub fn analyze_graph(
    g: &Graph,
    game: &GameMatrix,
    exact_max_nodes: usize,
) -> Result<AnalysisReport> {
    let sizes = g.component_sizes();
    if sizes.len() != 1 {
        return Err(Error::Disconnected { sizes });
    }
    let moments = g.degree_moments();
    let exact = if g.n() <= exact_max_nodes {
        let (mt, summary, bstar) = analyze_exact(g, &SolverOptions::default())?;
        let sigma = structure_coefficient(&bstar).ok();
        Some(ExactPart {
            sigma,
            favors_c: sigma.map(|s| selection_condition(game, s)),
            bstar,
            iterations: mt.iterations,
            residual: mt.solver_residual,
            identity_rel_error: summary.identity_rel_error,
        })
    } else {
        None
    };
    let mean_field = MeanFieldPart {
        bstar: meanfield::critical_ratio_mf(&moments),
        sigma: meanfield::sigma_mf(&moments).ok(),
        tau: meanfield::tau_mf(&moments),
    };
    Ok(AnalysisReport {
        n: g.n(),
        edges: g.edge_count(),
        moments,
        game: *game,
        exact,
        mean_field_favors_c: mean_field.sigma.map(|s| selection_condition(game, s)),
        mean_field,
    })
}

pub(super) fn analyze_file(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let path = config.text("graph");
    if path.is_empty() {
        return Err(Error::param("analyze needs a graph file"));
    }
    let g = Graph::read_edge_list_file(path)?;
    let p: Vec<f64> = config.list("game")?;
    let game = GameMatrix::new(p[0], p[1], p[2], p[3])?;
    let report = analyze_graph(&g, &game, config.get("exact_max_nodes")?)?;

    let mut table = Table::new(
        config,
        &[
            "n",
            "edges",
            "mu1",
            "mu2",
            "exact_num",
            "exact_den",
            "exact_bstar",
            "exact_inv",
            "exact_pole",
            "exact_sigma",
            "exact_favors_c",
            "mf_num",
            "mf_den",
            "mf_bstar",
            "mf_inv",
            "mf_pole",
            "mf_sigma",
            "mf_favors_c",
        ],
    );
    let flag = |b: Option<bool>| b.map_or(String::new(), |b| (b as u8).to_string());
    let mut row = vec![
        report.n.to_string(),
        report.edges.to_string(),
        num(report.moments.mu1),
        num(report.moments.mu2),
    ];
    row.extend(ratio_fields(report.exact.as_ref().map(|e| &e.bstar)));
    row.push(opt(report.exact.as_ref().and_then(|e| e.sigma)));
    row.push(flag(report.exact.as_ref().and_then(|e| e.favors_c)));
    row.extend(ratio_fields(Some(&report.mean_field.bstar)));
    row.push(opt(report.mean_field.sigma));
    row.push(flag(report.mean_field_favors_c));
    table.row(&row);
    Ok(ExperimentOutput {
        csv: table.finish(),
        summary: json!({
            "experiment": config.kind.name(),
            "config": config.to_json(),
            "report": report,
            "counts": {"records": 1, "failures": 0},
        }),
    })
}

fn load_graph(config: &ExperimentConfig) -> Result<(Graph, serde_json::Value)> {
    match (config.text("graph"), config.text("spec")) {
        (g, "") if !g.is_empty() => Ok((Graph::read_edge_list_file(g)?, json!({"graph": g}))),
        ("", s) if !s.is_empty() => {
            let text = std::fs::read_to_string(s).map_err(|e| Error::io(s, e))?;
            let spec = GeneratorSpec::parse(&text)?;
            let g = spec.generate()?;
            Ok((g, json!({"spec": spec})))
        }
        _ => Err(Error::param(
            "simulate needs exactly one of `graph` or `spec`",
        )),
    }
}

/// Monte Carlo fixation estimate, with the exact chain value alongside for
/// graphs small enough to enumerate.
pub fn simulate(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let (g, source) = load_graph(config)?;
    let sizes = g.component_sizes();
    if sizes.len() != 1 {
        return Err(Error::Disconnected { sizes });
    }
    let (b, c, delta): (f64, f64, f64) = (config.get("b")?, config.get("c")?, config.get("delta")?);
    let trials: u64 = config.get("trials")?;
    let game = GameMatrix::donation(b, c)?;
    let placement = match config.text("placement") {
        "uniform" => Placement::Uniform,
        x => Placement::Fixed(x.parse().map_err(|_| Error::param("bad placement"))?),
    };
    let mc = estimate_fixation(&g, &game, delta, trials, placement, config.seed())?;
    let n = g.n();
    let chain = if n <= oracle::MAX_NODES {
        let sol = oracle::exact_fixation_markov(&g, &game, delta)?;
        Some(match placement {
            Placement::Uniform => sol.uniform_single(),
            Placement::Fixed(x) => sol.single_cooperator(x),
        })
    } else {
        None
    };
    let first_order = match (placement, analyze_exact(&g, &SolverOptions::default())) {
        (Placement::Uniform, Ok((_, s, _))) => Some(
            crate::coalescence::fixation_probability_exact(&s, b, c, delta),
        ),
        _ => None,
    };
    let z = chain.map(|v| mc.z_score(v));
    let disagree = z.map(|z| z > 4.0);

    let mut table = Table::new(
        config,
        &[
            "n",
            "trials",
            "fixations_c",
            "estimate",
            "std_error",
            "neutral",
            "first_order",
            "chain",
            "z_chain",
            "disagree",
        ],
    );
    table.row(&[
        n.to_string(),
        mc.trials.to_string(),
        mc.fixations_c.to_string(),
        num(mc.estimate),
        num(mc.std_error),
        num(1.0 / n as f64),
        opt(first_order),
        opt(chain),
        opt(z),
        disagree.map_or(String::new(), |d| (d as u8).to_string()),
    ]);
    Ok(ExperimentOutput {
        csv: table.finish(),
        summary: json!({
            "experiment": config.kind.name(),
            "config": config.to_json(),
            "source": source,
            "monte_carlo": mc,
            "first_order": json_f(first_order),
            "chain": json_f(chain),
            "z_chain": json_f(z),
            "disagree": disagree,
            "counts": {"records": 1, "failures": 0},
        }),
    })
}
