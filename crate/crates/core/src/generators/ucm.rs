//! Uncorrelated configuration model with structural cutoff `sqrt(n)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::{rng_from_seed, Rng};

const PARITY_RETRIES: usize = 10_000;
const PAIR_RETRIES: usize = 200;
const WIRING_RESTARTS: usize = 100;

/// Largest degree allowed for `n` nodes.
pub fn ucm_cutoff(n: usize) -> usize {
    (n as f64).sqrt().floor() as usize
}

/// Mean of the truncated power law `P(k) ∝ k^-gamma` on `[k_min, k_max]`.
pub fn truncated_power_law_mean(gamma: f64, k_min: usize, k_max: usize) -> f64 {
    let (mut z, mut s) = (0.0, 0.0);
    for k in k_min..=k_max {
        let w = (k as f64).powf(-gamma);
        z += w;
        s += k as f64 * w;
    }
    s / z
}

fn sample_degrees(
    rng: &mut Rng,
    n: usize,
    gamma: f64,
    k_min: usize,
    k_max: usize,
) -> Result<Vec<usize>> {
    let support: Vec<usize> = (k_min..=k_max).collect();
    let dist = WeightedIndex::new(support.iter().map(|&k| (k as f64).powf(-gamma)))
        .map_err(|e| Error::param(format!("degree distribution: {e}")))?;
    let mut degrees: Vec<usize> = (0..n).map(|_| support[dist.sample(rng)]).collect();
    let mut sum: usize = degrees.iter().sum();
    let mut tries = 0;
    while sum % 2 == 1 {
        if tries == PARITY_RETRIES {
            return Err(Error::AttemptsExhausted {
                attempts: tries,
                detail: "could not draw an even degree sum".into(),
            });
        }
        tries += 1;
        let i = rng.random_range(0..n);
        sum -= degrees[i];
        degrees[i] = support[dist.sample(rng)];
        sum += degrees[i];
    }
    Ok(degrees)
}

/// Pairs stubs uniformly at random. An invalid pair (self-loop or duplicate)
/// is redrawn up to a retry budget, after which the wiring restarts.
fn wire(rng: &mut Rng, degrees: &[usize]) -> Option<Vec<(usize, usize)>> {
    let n = degrees.len();
    let all_stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(x, &k)| std::iter::repeat_n(x, k))
        .collect();
    'restart: for _ in 0..WIRING_RESTARTS {
        let mut stubs = all_stubs.clone();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        while !stubs.is_empty() {
            let mut fails = 0;
            loop {
                let a = rng.random_range(0..stubs.len());
                let mut b = rng.random_range(0..stubs.len() - 1);
                if b >= a {
                    b += 1;
                }
                let (u, v) = (stubs[a], stubs[b]);
                if u != v && !adj[u].contains(&v) {
                    adj[u].push(v);
                    adj[v].push(u);
                    edges.push((u.min(v), u.max(v)));
                    stubs.swap_remove(a.max(b));
                    stubs.swap_remove(a.min(b));
                    break;
                }
                fails += 1;
                if fails > PAIR_RETRIES {
                    continue 'restart;
                }
            }
        }
        return Some(edges);
    }
    None
}

/// Samples degrees from `P(k) ∝ k^-gamma` on `[k_min, floor(sqrt(n))]`,
/// forces an even sum, and wires stubs into a simple graph.
pub fn gen_ucm(n: usize, gamma: f64, k_min: usize, seed: u64) -> Result<Graph> {
    if !(1.0..=4.0).contains(&gamma) {
        return Err(Error::param(format!("gamma = {gamma} must lie in [1, 4]")));
    }
    if k_min < 1 {
        return Err(Error::param("k_min must be >= 1"));
    }
    let k_max = ucm_cutoff(n);
    if k_min > k_max {
        return Err(Error::param(format!(
            "k_min = {k_min} exceeds the structural cutoff {k_max} for n = {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..WIRING_RESTARTS {
        let degrees = sample_degrees(&mut rng, n, gamma, k_min, k_max)?;
        if let Some(edges) = wire(&mut rng, &degrees) {
            return Graph::from_edge_list(n, edges);
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: WIRING_RESTARTS,
        detail: "degree sequence could not be wired into a simple graph".into(),
    })
}
