//! Monte Carlo death-birth dynamics at weak selection.
//!
//! Each step picks a node uniformly at random and replaces its strategy by
//! that of a neighbor chosen with probability proportional to `1 + δ f`,
//! where `f` is the neighbor's degree-averaged payoff. There is no self
//! term in the copying sum.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::GameMatrix;
use crate::graph::Graph;
use crate::seed::{trial_rng, Rng};

/// Smallest copying weight accepted before the step is rejected.
pub const MIN_WEIGHT: f64 = 1e-12;

/// Default absorption cap, `10⁴ n²` steps.
pub fn default_max_steps(n: usize) -> u64 {
    10_000 * (n as u64) * (n as u64)
}

/// Binary strategy per node, `true` = cooperate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyState {
    s: Vec<bool>,
    cooperators: usize,
}

impl StrategyState {
    pub fn new(s: Vec<bool>) -> Self {
        let cooperators = s.iter().filter(|&&c| c).count();
        Self { s, cooperators }
    }

    pub fn uniform(n: usize, cooperate: bool) -> Self {
        Self::new(vec![cooperate; n])
    }

    pub fn single_cooperator(n: usize, x: usize) -> Self {
        let mut s = vec![false; n];
        s[x] = true;
        Self::new(s)
    }

    /// Bit `x` of `mask` is `s_x`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self::new((0..n).map(|x| mask >> x & 1 == 1).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.s
            .iter()
            .enumerate()
            .fold(0, |m, (x, &c)| if c { m | 1 << x } else { m })
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn get(&self, x: usize) -> bool {
        self.s[x]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.s
    }

    pub fn cooperators(&self) -> usize {
        self.cooperators
    }

    pub fn is_all_c(&self) -> bool {
        self.cooperators == self.s.len()
    }

    pub fn is_absorbing(&self) -> bool {
        self.cooperators == 0 || self.is_all_c()
    }

    fn set(&mut self, x: usize, c: bool) {
        if self.s[x] != c {
            self.s[x] = c;
            if c {
                self.cooperators += 1;
            } else {
                self.cooperators -= 1;
            }
        }
    }
}

fn check_state(g: &Graph, state: &StrategyState) -> Result<()> {
    if state.n() != g.n() {
        return Err(Error::param(format!(
            "state has {} entries but graph has {} nodes",
            state.n(),
            g.n()
        )));
    }
    if let Some(x) = (0..g.n()).find(|&x| g.degree(x) == 0) {
        return Err(Error::IsolatedNode(x));
    }
    Ok(())
}

fn averaged_payoff(game: &GameMatrix, own: bool, c_neighbors: usize, degree: usize) -> f64 {
    let d = (degree - c_neighbors) as f64;
    let c = c_neighbors as f64;
    let total = if own {
        game.R * c + game.S * d
    } else {
        game.T * c + game.P * d
    };
    total / degree as f64
}

/// Degree-averaged payoff of every node.
pub fn payoffs(g: &Graph, state: &StrategyState, game: &GameMatrix) -> Result<Vec<f64>> {
    check_state(g, state)?;
    Ok((0..g.n())
        .map(|x| {
            let c = g.neighbors(x).iter().filter(|&&y| state.get(y)).count();
            averaged_payoff(game, state.get(x), c, g.degree(x))
        })
        .collect())
}

fn copy_weight(delta: f64, f: f64) -> Result<f64> {
    let w = 1.0 + delta * f;
    if w > MIN_WEIGHT {
        Ok(w)
    } else {
        Err(Error::NonPositiveWeight { weight: w })
    }
}

/// Probability that each node changes strategy in the next step.
///
/// Entry `x` is `(1/n) Σ_{y ∈ N_x, s_y ≠ s_x} w_y / Σ_{y ∈ N_x} w_y`. The
/// chain can only move by flipping a single node, so this is the full
/// one-step transition law.
pub fn flip_probabilities(
    g: &Graph,
    state: &StrategyState,
    game: &GameMatrix,
    delta: f64,
) -> Result<Vec<f64>> {
    let f = payoffs(g, state, game)?;
    let inv_n = 1.0 / g.n() as f64;
    (0..g.n())
        .map(|x| {
            let mut total = 0.0;
            let mut other = 0.0;
            for &y in g.neighbors(x) {
                let w = copy_weight(delta, f[y])?;
                total += w;
                if state.get(y) != state.get(x) {
                    other += w;
                }
            }
            Ok(inv_n * other / total)
        })
        .collect()
}

/// Incrementally maintained dynamics: per-node counts of cooperating
/// neighbors make a step cost `O(k_x)`.
struct Dynamics<'a> {
    g: &'a Graph,
    game: &'a GameMatrix,
    delta: f64,
    state: StrategyState,
    c_neighbors: Vec<usize>,
    weights: Vec<f64>,
}

impl<'a> Dynamics<'a> {
    fn new(g: &'a Graph, game: &'a GameMatrix, delta: f64, state: StrategyState) -> Result<Self> {
        check_state(g, &state)?;
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::param(format!(
                "delta must be finite and >= 0, got {delta}"
            )));
        }
        let c_neighbors = (0..g.n())
            .map(|x| g.neighbors(x).iter().filter(|&&y| state.get(y)).count())
            .collect();
        Ok(Self {
            g,
            game,
            delta,
            state,
            c_neighbors,
            weights: Vec::with_capacity(g.max_degree()),
        })
    }

    fn payoff(&self, y: usize) -> f64 {
        averaged_payoff(
            self.game,
            self.state.get(y),
            self.c_neighbors[y],
            self.g.degree(y),
        )
    }

    fn step(&mut self, rng: &mut Rng) -> Result<()> {
        let x = rng.random_range(0..self.g.n());
        let nbrs = self.g.neighbors(x);
        let target = if self.delta == 0.0 {
            nbrs[rng.random_range(0..nbrs.len())]
        } else {
            self.weights.clear();
            let mut total = 0.0;
            for &y in nbrs {
                let w = copy_weight(self.delta, self.payoff(y))?;
                total += w;
                self.weights.push(total);
            }
            let u = rng.random::<f64>() * total;
            let i = self
                .weights
                .partition_point(|&c| c <= u)
                .min(nbrs.len() - 1);
            nbrs[i]
        };
        let new = self.state.get(target);
        if new != self.state.get(x) {
            self.state.set(x, new);
            for &y in nbrs {
                if new {
                    self.c_neighbors[y] += 1;
                } else {
                    self.c_neighbors[y] -= 1;
                }
            }
        }
        Ok(())
    }
}

/// One update of the dynamics.
pub fn step(
    g: &Graph,
    state: &StrategyState,
    game: &GameMatrix,
    delta: f64,
    rng: &mut Rng,
) -> Result<StrategyState> {
    let mut dynamics = Dynamics::new(g, game, delta, state.clone())?;
    dynamics.step(rng)?;
    Ok(dynamics.state)
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Absorption {
    pub cooperators_fixed: bool,
    pub steps: u64,
}

/// Iterate until unanimity; fails once `max_steps` is exceeded.
pub fn run_to_fixation(
    g: &Graph,
    initial: StrategyState,
    game: &GameMatrix,
    delta: f64,
    rng: &mut Rng,
    max_steps: u64,
) -> Result<Absorption> {
    let mut dynamics = Dynamics::new(g, game, delta, initial)?;
    let mut steps = 0;
    while !dynamics.state.is_absorbing() {
        if steps >= max_steps {
            return Err(Error::StepLimit { steps });
        }
        dynamics.step(rng)?;
        steps += 1;
    }
    Ok(Absorption {
        cooperators_fixed: dynamics.state.is_all_c(),
        steps,
    })
}

/// Where the initial cooperator is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    Uniform,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub fixations_c: u64,
    pub estimate: f64,
    pub std_error: f64,
}

impl TrialSummary {
    pub fn from_counts(trials: u64, fixations_c: u64) -> Self {
        let estimate = fixations_c as f64 / trials as f64;
        Self {
            trials,
            fixations_c,
            estimate,
            std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        }
    }

    /// `|estimate - value|` in units of the standard error, with a floor on
    /// the error so that zero-variance estimates still compare sensibly.
    pub fn z_score(&self, value: f64) -> f64 {
        let floor = 1.0 / self.trials as f64;
        (self.estimate - value).abs() / self.std_error.max(floor)
    }
}

/// Fixation frequency of a single cooperator over independent trials.
///
/// Trial `i` draws from `trial_rng(master_seed, i)` and trials run on the
/// current rayon pool; the result is identical for any thread count.
pub fn estimate_fixation(
    g: &Graph,
    game: &GameMatrix,
    delta: f64,
    trials: u64,
    placement: Placement,
    master_seed: u64,
) -> Result<TrialSummary> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    g.require_connected()?;
    let n = g.n();
    if let Placement::Fixed(x) = placement {
        if x >= n {
            return Err(Error::NodeOutOfRange { index: x, n });
        }
    }
    let max_steps = default_max_steps(n);
    let fixations = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, i);
            let x = match placement {
                Placement::Uniform => rng.random_range(0..n),
                Placement::Fixed(x) => x,
            };
            let initial = StrategyState::single_cooperator(n, x);
            run_to_fixation(g, initial, game, delta, &mut rng, max_steps)
                .map(|a| a.cooperators_fixed as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(TrialSummary::from_counts(trials, fixations))
}
