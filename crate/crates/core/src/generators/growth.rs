//! Growth models: shifted-linear and super-linear preferential attachment,
//! Holme–Kim, Klemm–Eguíluz and the spatial scale-free model.

use rand::Rng as _;

use super::check_probability;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::{rng_from_seed, Rng};

/// Adjacency under construction, seeded with a clique on `m + 1` nodes.
struct Growing {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Growing {
    fn with_seed_clique(n: usize, m: usize) -> Self {
        let mut g = Growing {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        };
        let n0 = (m + 1).min(n);
        for u in 0..n0 {
            for v in u + 1..n0 {
                g.link(u, v);
            }
        }
        g
    }

    fn link(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.edges.push((u, v));
    }

    fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    fn finish(self) -> Result<Graph> {
        let n = self.adj.len();
        Graph::from_edge_list(n, self.edges)
    }
}

fn gumbel(rng: &mut Rng) -> f64 {
    // U in (0, 1]
    let u = 1.0 - rng.random::<f64>();
    -(-u.ln()).ln()
}

/// Draws `count` distinct indices in `0..log_weights.len()` by sequential
/// weighted sampling without replacement (Gumbel top-k). Indices flagged in
/// `excluded` or with weight `-inf` are never drawn.
fn sample_distinct(
    rng: &mut Rng,
    log_weights: &[f64],
    excluded: &[usize],
    count: usize,
) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = log_weights
        .iter()
        .enumerate()
        .filter(|(i, w)| w.is_finite() && !excluded.contains(i))
        .map(|(i, &w)| (w + gumbel(rng), i))
        .collect();
    let count = count.min(keyed.len());
    if count == 0 {
        return Vec::new();
    }
    keyed.select_nth_unstable_by(count - 1, |a, b| b.0.total_cmp(&a.0));
    keyed.truncate(count);
    keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    keyed.into_iter().map(|(_, i)| i).collect()
}

fn check_links(name: &str, links: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&links) {
        Ok(())
    } else {
        Err(Error::param(format!(
            "{name}: links_per_node = {links} must lie in [1, {max}]"
        )))
    }
}

fn check_size(n: usize, links: usize) -> Result<()> {
    if n < links + 1 {
        Err(Error::param(format!(
            "n = {n} is smaller than the seed clique of {} nodes",
            links + 1
        )))
    } else {
        Ok(())
    }
}

/// Grows a network where each arrival links to `links` distinct earlier
/// nodes drawn with log-weight `log_kernel(degree)`.
fn kernel_growth<F>(n: usize, links: usize, seed: u64, log_kernel: F) -> Result<Graph>
where
    F: Fn(usize) -> f64,
{
    let mut rng = rng_from_seed(seed);
    let mut g = Growing::with_seed_clique(n, links);
    let mut weights = Vec::with_capacity(n);
    for v in links + 1..n {
        weights.clear();
        weights.extend((0..v).map(|x| log_kernel(g.degree(x))));
        for t in sample_distinct(&mut rng, &weights, &[], links) {
            g.link(v, t);
        }
    }
    g.finish()
}

/// Preferential attachment with kernel `k + attractiveness`.
pub fn gen_pa_shifted(
    n: usize,
    links_per_node: usize,
    attractiveness: f64,
    seed: u64,
) -> Result<Graph> {
    check_links("pa-shifted", links_per_node, 5)?;
    check_size(n, links_per_node)?;
    if !(attractiveness >= 0.0 && attractiveness.is_finite()) {
        return Err(Error::param(format!(
            "attractiveness = {attractiveness} must be finite and >= 0"
        )));
    }
    kernel_growth(n, links_per_node, seed, |k| {
        (k as f64 + attractiveness).ln()
    })
}

/// Preferential attachment with kernel `k^theta` (`k = 0` weighs 1).
pub fn gen_pa_superlinear(n: usize, links_per_node: usize, theta: f64, seed: u64) -> Result<Graph> {
    check_links("pa-superlinear", links_per_node, 4)?;
    check_size(n, links_per_node)?;
    if !(0.0..=3.0).contains(&theta) {
        return Err(Error::param(format!("theta = {theta} must lie in [0, 3]")));
    }
    kernel_growth(n, links_per_node, seed, |k| {
        if k == 0 {
            0.0
        } else {
            theta * (k as f64).ln()
        }
    })
}

fn preferential_pick(rng: &mut Rng, g: &Growing, upto: usize, excluded: &[usize]) -> Option<usize> {
    let weights: Vec<f64> = (0..upto).map(|x| (g.degree(x) as f64).ln()).collect();
    sample_distinct(rng, &weights, excluded, 1).first().copied()
}

/// Holme–Kim growth: after a preferential step, each further link closes a
/// triangle with probability `p_triad` through a neighbor of the last
/// preferential target, falling back to a preferential step when no such
/// neighbor is free.
pub fn gen_holme_kim(n: usize, links_per_node: usize, p_triad: f64, seed: u64) -> Result<Graph> {
    check_links("holme-kim", links_per_node, 5)?;
    check_size(n, links_per_node)?;
    check_probability("p_triad", p_triad)?;
    let mut rng = rng_from_seed(seed);
    let mut g = Growing::with_seed_clique(n, links_per_node);
    let mut targets = Vec::with_capacity(links_per_node);
    for v in links_per_node + 1..n {
        targets.clear();
        let mut last_pa: Option<usize> = None;
        while targets.len() < links_per_node {
            let mut chosen = None;
            if let Some(anchor) = last_pa {
                if rng.random::<f64>() < p_triad {
                    let free: Vec<usize> = g.adj[anchor]
                        .iter()
                        .copied()
                        .filter(|x| *x < v && !targets.contains(x))
                        .collect();
                    if !free.is_empty() {
                        chosen = Some(free[rng.random_range(0..free.len())]);
                    }
                }
            }
            let t = match chosen {
                Some(t) => t,
                None => {
                    let t = preferential_pick(&mut rng, &g, v, &targets)
                        .expect("seed clique leaves enough candidates");
                    last_pa = Some(t);
                    t
                }
            };
            targets.push(t);
        }
        for &t in &targets {
            g.link(v, t);
        }
    }
    g.finish()
}

/// Klemm–Eguíluz growth with `links_per_node` active nodes.
///
/// Each arrival links to every active node, except that with probability
/// `crossover` a link is redirected to a preferentially chosen node. The
/// arrival then becomes active and one previously active node is
/// deactivated with probability proportional to `1 / k`.
pub fn gen_klemm_eguiluz(
    n: usize,
    links_per_node: usize,
    crossover: f64,
    seed: u64,
) -> Result<Graph> {
    check_links("klemm-eguiluz", links_per_node, 5)?;
    check_size(n, links_per_node)?;
    check_probability("crossover", crossover)?;
    let mut rng = rng_from_seed(seed);
    let mut g = Growing::with_seed_clique(n, links_per_node);
    let mut active: Vec<usize> = (1..=links_per_node).collect();
    let mut targets = Vec::with_capacity(links_per_node);
    for v in links_per_node + 1..n {
        targets.clear();
        for &a in &active {
            let redirect = rng.random::<f64>() < crossover || targets.contains(&a);
            let t = if redirect {
                preferential_pick(&mut rng, &g, v, &targets).expect("enough candidates")
            } else {
                a
            };
            targets.push(t);
        }
        for &t in &targets {
            g.link(v, t);
        }
        let inv: Vec<f64> = active.iter().map(|&a| 1.0 / g.degree(a) as f64).collect();
        let total: f64 = inv.iter().sum();
        let mut r = rng.random::<f64>() * total;
        let mut drop = active.len() - 1;
        for (i, w) in inv.iter().enumerate() {
            if r < *w {
                drop = i;
                break;
            }
            r -= w;
        }
        active.remove(drop);
        active.push(v);
    }
    g.finish()
}

/// Spatial scale-free growth on the unit square: attachment weight
/// `k * exp(-d / r_c)` with `d` the Euclidean distance.
pub fn gen_spatial_sf(n: usize, links_per_node: usize, r_c: f64, seed: u64) -> Result<Graph> {
    Ok(gen_spatial_sf_with_positions(n, links_per_node, r_c, seed)?.0)
}

/// As [`gen_spatial_sf`], also returning node positions.
pub fn gen_spatial_sf_with_positions(
    n: usize,
    links_per_node: usize,
    r_c: f64,
    seed: u64,
) -> Result<(Graph, Vec<[f64; 2]>)> {
    if links_per_node < 1 {
        return Err(Error::param("spatial-sf: links_per_node must be >= 1"));
    }
    check_size(n, links_per_node)?;
    if !(r_c > 0.0 && r_c.is_finite()) {
        return Err(Error::param(format!(
            "r_c = {r_c} must be positive and finite"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    let mut g = Growing::with_seed_clique(n, links_per_node);
    let mut weights = Vec::with_capacity(n);
    for v in links_per_node + 1..n {
        weights.clear();
        weights.extend((0..v).map(|x| {
            let d = ((pos[v][0] - pos[x][0]).powi(2) + (pos[v][1] - pos[x][1]).powi(2)).sqrt();
            (g.degree(x) as f64).ln() - d / r_c
        }));
        for t in sample_distinct(&mut rng, &weights, &[], links_per_node) {
            g.link(v, t);
        }
    }
    Ok((g.finish()?, pos))
}
