use rand::Rng as _;
use serde_json::json;

use super::*;
use crate::error::Result;
use crate::generators::{ensure_connected, FamilyKind, GeneratorSpec, Model, SbmParams};
use crate::meanfield::{
    bstar_small_q, critical_ratio_er, critical_ratio_mf, critical_ratio_sbm, q_hat,
};
use crate::seed::{derive_seed, rng_from_seed};

/// One connected draw analysed exactly and by mean field.
struct Draw {
    seed: u64,
    attempts: usize,
    moments: Option<crate::graph::DegreeMoments>,
    exact: Option<CriticalRatio>,
    mf: Option<CriticalRatio>,
    outcome: Result<()>,
}

fn draw_and_solve(spec: Result<GeneratorSpec>, max_attempts: usize) -> Draw {
    let seed = spec.as_ref().map_or(0, |s| s.seed);
    let mut d = Draw {
        seed,
        attempts: 0,
        moments: None,
        exact: None,
        mf: None,
        outcome: Ok(()),
    };
    let connected = match spec.and_then(|s| ensure_connected(&s, max_attempts)) {
        Ok(c) => c,
        Err(e) => {
            d.attempts = max_attempts;
            d.outcome = Err(e);
            return d;
        }
    };
    d.attempts = connected.attempts;
    let m = connected.graph.degree_moments();
    d.moments = Some(m);
    d.mf = Some(critical_ratio_mf(&m));
    match exact_ratio(&connected.graph) {
        Ok(r) => d.exact = Some(r),
        Err(e) => d.outcome = Err(e),
    }
    d
}

fn draw_fields(d: &Draw) -> Vec<String> {
    let mut f = vec![
        d.seed.to_string(),
        d.attempts.to_string(),
        status(&d.outcome),
    ];
    f.extend(
        d.moments
            .map_or([String::new(), String::new()], |m| [num(m.mu1), num(m.mu2)]),
    );
    f.extend(ratio_fields(d.exact.as_ref()));
    f.extend(ratio_fields(d.mf.as_ref()));
    f
}

const DRAW_HEADER: [&str; 15] = [
    "seed",
    "attempts",
    "status",
    "mu1",
    "mu2",
    "exact_num",
    "exact_den",
    "exact_bstar",
    "exact_inv",
    "exact_pole",
    "mf_num",
    "mf_den",
    "mf_bstar",
    "mf_inv",
    "mf_pole",
];

/// Aggregates over the replicates of one grid point.
#[derive(Default)]
struct PointStats {
    ok: usize,
    failures: usize,
    resamples: usize,
    exact_inv: Vec<f64>,
    mf_inv: Vec<f64>,
    mf_rel_err: Vec<f64>,
    model_rel_err: Vec<f64>,
}

impl PointStats {
    fn add(&mut self, d: &Draw, model: Option<&CriticalRatio>) {
        self.resamples += d.attempts.saturating_sub(1);
        if d.outcome.is_err() {
            self.failures += 1;
            return;
        }
        self.ok += 1;
        let (exact, mf) = (d.exact.as_ref().unwrap(), d.mf.as_ref().unwrap());
        self.exact_inv.extend(plotted_inverse(exact));
        self.mf_inv.extend(plotted_inverse(mf));
        self.mf_rel_err
            .extend(mf_over_exact(mf, exact).map(|r| (r - 1.0).abs()));
        if let Some(model) = model {
            self.model_rel_err
                .extend(mf_over_exact(model, exact).map(|r| (r - 1.0).abs()));
        }
    }

    fn json(&self) -> serde_json::Value {
        json!({
            "ok": self.ok,
            "failures": self.failures,
            "resamples": self.resamples,
            "mean_exact_inv": json_f(mean(&self.exact_inv)),
            "mean_mf_inv": json_f(mean(&self.mf_inv)),
            "mean_rel_err_mf": json_f(mean(&self.mf_rel_err)),
            "mean_rel_err_model": json_f(mean(&self.model_rel_err)),
        })
    }
}

fn totals(stats: &[PointStats]) -> serde_json::Value {
    json!({
        "records": stats.iter().map(|s| s.ok + s.failures).sum::<usize>(),
        "failures": stats.iter().map(|s| s.failures).sum::<usize>(),
        "resamples": stats.iter().map(|s| s.resamples).sum::<usize>(),
    })
}

fn summary(
    config: &ExperimentConfig,
    points: Vec<serde_json::Value>,
    stats: &[PointStats],
) -> serde_json::Value {
    json!({
        "experiment": config.kind.name(),
        "config": config.to_json(),
        "points": points,
        "counts": totals(stats),
    })
}

/// Accuracy against network size for a fixed SBM.
pub fn sweep_n(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid: Vec<usize> = config.list("n_grid")?;
    let (m, p, q): (usize, f64, f64) = (config.get("m")?, config.get("p")?, config.get("q")?);
    let reps: usize = config.get("replicates")?;
    let attempts: usize = config.get("max_attempts")?;
    let master = config.seed();
    let draws = par_jobs(grid.len() * reps, |job| {
        let (point, rep) = (job / reps, job % reps);
        let seed = derive_seed(master, "sweep-n", &[point as u64, rep as u64]);
        let spec = GeneratorSpec::new(grid[point], Model::Sbm { m, p, q }, seed);
        draw_and_solve(spec, attempts)
    });

    let mut header = vec!["point", "n", "replicate"];
    header.extend(DRAW_HEADER);
    header.extend(["model_bstar", "mf_ratio", "model_ratio"]);
    let mut table = Table::new(config, &header);
    let mut stats: Vec<PointStats> = Vec::new();
    let mut points = Vec::new();
    for (point, &n) in grid.iter().enumerate() {
        let model = critical_ratio_sbm(&SbmParams::new(n, m, p, q)?);
        let mut s = PointStats::default();
        for rep in 0..reps {
            let d = &draws[point * reps + rep];
            s.add(d, Some(&model));
            let mut row = vec![point.to_string(), n.to_string(), rep.to_string()];
            row.extend(draw_fields(d));
            let pair = d.exact.as_ref().zip(d.mf.as_ref());
            row.push(opt(model.value()));
            row.push(opt(pair.and_then(|(e, mf)| mf_over_exact(mf, e))));
            row.push(opt(d.exact.as_ref().and_then(|e| mf_over_exact(&model, e))));
            table.row(&row);
        }
        let mean_exact = mean(
            &(point * reps..(point + 1) * reps)
                .filter_map(|j| draws[j].exact.as_ref().filter(|_| draws[j].outcome.is_ok()))
                .filter_map(|r| r.value())
                .collect::<Vec<_>>(),
        );
        let mut j = s.json();
        j["n"] = n.into();
        j["model_bstar"] = json_f(model.value());
        j["mean_exact_bstar"] = json_f(mean_exact);
        j["model_vs_mean_exact_rel_err"] = json_f(
            model
                .value()
                .zip(mean_exact)
                .map(|(a, b)| (a / b - 1.0).abs()),
        );
        points.push(j);
        stats.push(s);
    }
    Ok(ExperimentOutput {
        csv: table.finish(),
        summary: summary(config, points, &stats),
    })
}

/// `1/b*` across the ER link probability.
pub fn sweep_p_er(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid: Vec<f64> = config.list("p_grid")?;
    let n: usize = config.get("n")?;
    let reps: usize = config.get("replicates")?;
    let attempts: usize = config.get("max_attempts")?;
    let master = config.seed();
    let draws = par_jobs(grid.len() * reps, |job| {
        let (point, rep) = (job / reps, job % reps);
        let seed = derive_seed(master, "sweep-p-er", &[point as u64, rep as u64]);
        draw_and_solve(
            GeneratorSpec::new(n, Model::Er { p: grid[point] }, seed),
            attempts,
        )
    });

    let mut header = vec!["point", "p", "replicate"];
    header.extend(DRAW_HEADER);
    header.extend(["model_inv", "model_pole"]);
    let mut table = Table::new(config, &header);
    let mut stats = Vec::new();
    let mut points = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut sign_change = None;
    for (point, &p) in grid.iter().enumerate() {
        let model = critical_ratio_er(n, p)?;
        let mut s = PointStats::default();
        for rep in 0..reps {
            let d = &draws[point * reps + rep];
            s.add(d, Some(&model));
            let mut row = vec![point.to_string(), num(p), rep.to_string()];
            row.extend(draw_fields(d));
            row.push(opt(plotted_inverse(&model)));
            row.push((model.pole as u8).to_string());
            table.row(&row);
        }
        let mean_exact = mean(&s.exact_inv);
        if let (Some((p0, v0)), Some(v1)) = (prev, mean_exact) {
            if sign_change.is_none() && v0 * v1 < 0.0 {
                sign_change = Some((p0, p));
            }
        }
        prev = mean_exact.map(|v| (p, v));
        let mut j = s.json();
        j["p"] = p.into();
        j["model_inv"] = json_f(plotted_inverse(&model));
        j["model_pole"] = model.pole.into();
        j["abs_gap_model_vs_mean_exact"] = json_f(
            plotted_inverse(&model)
                .zip(mean_exact)
                .map(|(a, b)| (a - b).abs()),
        );
        points.push(j);
        stats.push(s);
    }
    let mut out = summary(config, points, &stats);
    out["exact_sign_change"] = sign_change.map_or(serde_json::Value::Null, |(a, b)| json!([a, b]));
    Ok(ExperimentOutput {
        csv: table.finish(),
        summary: out,
    })
}

/// Least-squares line through `(x, y)`; returns the intercept.
fn intercept(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return ys.first().copied();
    }
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| my - sxy / sxx * mx)
}

/// `1/b*` across the inter-community probability for each group count.
pub fn sweep_q_sbm(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid: Vec<f64> = config.list("q_grid")?;
    let ms: Vec<usize> = config.list("m_list")?;
    let (n, p): (usize, f64) = (config.get("n")?, config.get("p")?);
    let reps: usize = config.get("replicates")?;
    let attempts: usize = config.get("max_attempts")?;
    let fit_points: usize = config.get("intercept_points")?;
    let master = config.seed();
    let per_m = grid.len() * reps;
    let draws = par_jobs(ms.len() * per_m, |job| {
        let (mi, rest) = (job / per_m, job % per_m);
        let (qi, rep) = (rest / reps, rest % reps);
        let point = (mi * grid.len() + qi) as u64;
        let seed = derive_seed(master, "sweep-q-sbm", &[point, rep as u64]);
        let model = Model::Sbm {
            m: ms[mi],
            p,
            q: grid[qi],
        };
        draw_and_solve(GeneratorSpec::new(n, model, seed), attempts)
    });

    let mut header = vec!["point", "m", "q", "replicate"];
    header.extend(DRAW_HEADER);
    header.extend(["model_inv", "q_hat_expansion", "q_hat_exact", "small_q_inv"]);
    let mut table = Table::new(config, &header);
    let mut stats = Vec::new();
    let mut groups = Vec::new();
    for (mi, &m) in ms.iter().enumerate() {
        let qh = q_hat(m, p, n)?;
        let small = bstar_small_q(n, m, p)?;
        let mut points = Vec::new();
        let mut curve: Vec<(f64, f64)> = Vec::new();
        for (qi, &q) in grid.iter().enumerate() {
            let model = critical_ratio_sbm(&SbmParams::new(n, m, p, q)?);
            let mut s = PointStats::default();
            for rep in 0..reps {
                let d = &draws[mi * per_m + qi * reps + rep];
                s.add(d, Some(&model));
                let mut row = vec![
                    (mi * grid.len() + qi).to_string(),
                    m.to_string(),
                    num(q),
                    rep.to_string(),
                ];
                row.extend(draw_fields(d));
                row.push(opt(plotted_inverse(&model)));
                row.push(num(qh.expansion));
                row.push(opt(qh.exact_root));
                row.push(opt(small.inverse()));
                table.row(&row);
            }
            if let Some(v) = mean(&s.exact_inv) {
                curve.push((q, v));
            }
            let mut j = s.json();
            j["q"] = q.into();
            j["model_inv"] = json_f(plotted_inverse(&model));
            points.push(j);
            stats.push(s);
        }
        let bracket = curve
            .windows(2)
            .find(|w| w[0].1 > 0.0 && w[1].1 <= 0.0)
            .map(|w| (w[0].0, w[1].0));
        let (fx, fy): (Vec<f64>, Vec<f64>) = curve.iter().take(fit_points).copied().unzip();
        groups.push(json!({
            "m": m,
            "q_hat_expansion": qh.expansion,
            "q_hat_exact": json_f(qh.exact_root),
            "exact_sign_change": bracket.map_or(serde_json::Value::Null, |(a, b)| json!([a, b])),
            "small_q_inv": json_f(small.inverse()),
            "fitted_intercept_inv": json_f(intercept(&fx, &fy)),
            "intercept_fit_q": fx,
            "points": points,
        }));
    }
    let mut out = summary(config, Vec::new(), &stats);
    out.as_object_mut().unwrap().remove("points");
    out["groups"] = groups.into();
    Ok(ExperimentOutput {
        csv: table.finish(),
        summary: out,
    })
}

/// One validation network with a redrawn parameter set when the draw
/// cannot be made connected.
struct FamilyDraw {
    redraws: usize,
    spec: Option<GeneratorSpec>,
    draw: Draw,
}

fn family_draw(
    kind: FamilyKind,
    seed: u64,
    n_range: (usize, usize),
    attempts: usize,
    redraws: usize,
) -> FamilyDraw {
    let mut last = None;
    for r in 0..redraws {
        let mut rng = rng_from_seed(derive_seed(seed, "params", &[r as u64]));
        let n = rng.random_range(n_range.0..=n_range.1);
        let model = kind.sample_model(&mut rng);
        let spec = GeneratorSpec::new(n, model, derive_seed(seed, "graph", &[r as u64]));
        let kept = spec.as_ref().ok().copied();
        let draw = draw_and_solve(spec, attempts);
        let connected = draw.moments.is_some();
        let result = FamilyDraw {
            redraws: r,
            spec: kept,
            draw,
        };
        if connected {
            return result;
        }
        last = Some(result);
    }
    last.expect("redraws >= 1")
}

fn params_text(spec: Option<&GeneratorSpec>) -> String {
    spec.map(|s| {
        s.model
            .params()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    })
    .unwrap_or_default()
}

/// Mean-field versus exact ratio over random networks from each family.
pub fn families(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let kinds: Vec<FamilyKind> = config.list("families")?;
    let reps: usize = config.get("replicates")?;
    let n_range = (config.get("n_min")?, config.get("n_max")?);
    let attempts: usize = config.get("max_attempts")?;
    let redraws: usize = config.get("param_redraws")?;
    let master = config.seed();
    let draws = par_jobs(kinds.len() * reps, |job| {
        let (fi, rep) = (job / reps, job % reps);
        let seed = derive_seed(master, "families", &[fi as u64, rep as u64]);
        family_draw(kinds[fi], seed, n_range, attempts, redraws)
    });

    let mut header = vec!["family", "network", "n", "params", "redraws"];
    header.extend(DRAW_HEADER);
    header.push("ratio");
    let mut table = Table::new(config, &header);
    let mut per_family = Vec::new();
    let mut all_ratios = Vec::new();
    let (mut failures, mut redrawn, mut resamples) = (0, 0, 0);
    for (fi, kind) in kinds.iter().enumerate() {
        let mut ratios = Vec::new();
        let mut fam_fail = 0;
        let mut fam_redraws = 0;
        for rep in 0..reps {
            let fd = &draws[fi * reps + rep];
            let d = &fd.draw;
            fam_redraws += fd.redraws;
            resamples += d.attempts.saturating_sub(1);
            let ratio = d
                .exact
                .as_ref()
                .zip(d.mf.as_ref())
                .filter(|_| d.outcome.is_ok())
                .and_then(|(e, mf)| mf_over_exact(mf, e));
            if d.outcome.is_err() {
                fam_fail += 1;
            }
            ratios.extend(ratio);
            let mut row = vec![
                kind.name().to_string(),
                rep.to_string(),
                fd.spec.map_or(String::new(), |s| s.n.to_string()),
                params_text(fd.spec.as_ref()),
                fd.redraws.to_string(),
            ];
            row.extend(draw_fields(d));
            row.push(opt(ratio));
            table.row(&row);
        }
        failures += fam_fail;
        redrawn += fam_redraws;
        let within = ratios.iter().filter(|r| (0.8..=1.2).contains(*r)).count();
        per_family.push(json!({
            "family": kind.name(),
            "networks": reps,
            "with_ratio": ratios.len(),
            "failures": fam_fail,
            "parameter_redraws": fam_redraws,
            "median_ratio": json_f(median(&ratios)),
            "fraction_within_0_8_1_2": json_f((!ratios.is_empty()).then(|| within as f64 / ratios.len() as f64)),
        }));
        all_ratios.extend(ratios);
    }
    let within = all_ratios
        .iter()
        .filter(|r| (0.8..=1.2).contains(*r))
        .count();
    Ok(ExperimentOutput {
        csv: table.finish(),
        summary: json!({
            "experiment": config.kind.name(),
            "config": config.to_json(),
            "families": per_family,
            "overall": {
                "with_ratio": all_ratios.len(),
                "median_ratio": json_f(median(&all_ratios)),
                "fraction_within_0_8_1_2": json_f((!all_ratios.is_empty()).then(|| within as f64 / all_ratios.len() as f64)),
            },
            "counts": {
                "records": kinds.len() * reps,
                "failures": failures,
                "parameter_redraws": redrawn,
                "resamples": resamples,
            },
        }),
    })
}
