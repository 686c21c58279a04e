//! Seeded random-graph families.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed.
//! Growth models start from a clique on `links_per_node + 1` nodes.

mod growth;
mod spec;
mod ucm;

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::{rng_from_seed, Rng};

pub use growth::{
    gen_holme_kim, gen_klemm_eguiluz, gen_pa_shifted, gen_pa_superlinear, gen_spatial_sf,
};
pub use spec::{
    ensure_connected, Connected, FamilyKind, GeneratorSpec, Model, DEFAULT_MAX_ATTEMPTS,
};
pub use ucm::{gen_ucm, truncated_power_law_mean, ucm_cutoff};

/// Stochastic block model parameters: `m` balanced groups, intra-group link
/// probability `p`, inter-group link probability `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SbmParams {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub q: f64,
}

impl SbmParams {
    pub fn new(n: usize, m: usize, p: f64, q: f64) -> Result<Self> {
        let params = Self { n, m, p, q };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("q", self.q)?;
        if self.m < 1 || self.m > self.n {
            return Err(Error::param(format!(
                "group count m = {} must satisfy 1 <= m <= n = {}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_probability(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} = {value} must lie in [0, 1]")))
    }
}

pub(crate) fn check_nodes(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::EmptyGraph)
    } else {
        Ok(())
    }
}

fn bernoulli_pairs<F>(n: usize, rng: &mut Rng, mut prob: F) -> Result<Graph>
where
    F: FnMut(usize, usize) -> f64,
{
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = prob(u, v);
            if p > 0.0 && rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edge_list(n, edges)
}

/// Node `i` belongs to group `i mod m`.
pub fn gen_sbm(params: SbmParams, seed: u64) -> Result<Graph> {
    params.validate()?;
    check_nodes(params.n)?;
    let SbmParams { n, m, p, q } = params;
    let mut rng = rng_from_seed(seed);
    bernoulli_pairs(n, &mut rng, |u, v| if u % m == v % m { p } else { q })
}

pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability("p", p)?;
    check_nodes(n)?;
    let mut rng = rng_from_seed(seed);
    bernoulli_pairs(n, &mut rng, |_, _| p)
}

/// Newman–Watts small world: a ring lattice plus random shortcuts, no rewiring.
///
/// Each non-lattice pair becomes a shortcut independently, with probability
/// chosen so the expected shortcut count is `p_add * n * lattice_degree / 2`.
pub fn gen_small_world(n: usize, lattice_degree: usize, p_add: f64, seed: u64) -> Result<Graph> {
    check_probability("p_add", p_add)?;
    if lattice_degree < 2 || !lattice_degree.is_multiple_of(2) {
        return Err(Error::param(format!(
            "lattice degree {lattice_degree} must be even and >= 2"
        )));
    }
    if lattice_degree >= n {
        return Err(Error::param(format!(
            "lattice degree {lattice_degree} must be below n = {n}"
        )));
    }
    let half = lattice_degree / 2;
    let lattice_edges = n * half;
    let free_pairs = n * (n - 1) / 2 - lattice_edges;
    let shortcut_p = if free_pairs == 0 {
        0.0
    } else {
        (p_add * lattice_edges as f64 / free_pairs as f64).min(1.0)
    };
    let mut rng = rng_from_seed(seed);
    bernoulli_pairs(n, &mut rng, |u, v| {
        let d = v - u;
        if d.min(n - d) <= half {
            1.0
        } else {
            shortcut_p
        }
    })
}

#[cfg(test)]
mod tests;
