//! Exact fixation probabilities on tiny graphs by solving the full
//! absorbing Markov chain over all `2ⁿ` strategy states.
//!
//! States are bitmasks with bit `x` equal to `s_x`. The transition law is
//! the simulator's own [`flip_probabilities`], so the two cannot drift apart.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::GameMatrix;
use crate::graph::Graph;
use crate::sim::{flip_probabilities, StrategyState};

pub const MAX_NODES: usize = 14;
/// Up to this size the transient system is solved by dense LU.
pub const DENSE_MAX_NODES: usize = 10;
/// Step used by [`fixation_slope`].
pub const SLOPE_DELTA: f64 = 1e-4;

const GS_TOLERANCE: f64 = 1e-15;
const GS_MAX_SWEEPS: usize = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct ChainSolution {
    pub n: usize,
    pub delta: f64,
    /// Probability of reaching all-C from each state, indexed by mask.
    pub rho_by_initial: Vec<f64>,
    /// Largest violation of the hitting-probability equations.
    pub residual: f64,
}

impl ChainSolution {
    pub fn rho(&self, state: &StrategyState) -> f64 {
        self.rho_by_initial[state.to_mask() as usize]
    }

    pub fn single_cooperator(&self, x: usize) -> f64 {
        self.rho_by_initial[1 << x]
    }

    /// Average over a uniformly placed single cooperator.
    pub fn uniform_single(&self) -> f64 {
        (0..self.n).map(|x| self.single_cooperator(x)).sum::<f64>() / self.n as f64
    }
}

/// One row of the chain after eliminating the self-loop:
/// `h(s) = Σ_x q_x h(s ⊕ x)` with `Σ q_x = 1`.
struct Row {
    targets: Vec<(usize, f64)>,
}

fn build_rows(g: &Graph, game: &GameMatrix, delta: f64) -> Result<Vec<Row>> {
    let n = g.n();
    let full = (1usize << n) - 1;
    (1..full)
        .map(|mask| {
            let state = StrategyState::from_mask(n, mask as u64);
            let p = flip_probabilities(g, &state, game, delta)?;
            let stay: f64 = p.iter().sum();
            if !(stay > 0.0) {
                return Err(Error::Singular);
            }
            let targets = p
                .iter()
                .enumerate()
                .filter(|(_, &px)| px > 0.0)
                .map(|(x, &px)| (mask ^ (1 << x), px / stay))
                .collect();
            Ok(Row { targets })
        })
        .collect()
}

fn residual(rows: &[Row], h: &[f64]) -> f64 {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let s: f64 = row.targets.iter().map(|&(t, q)| q * h[t]).sum();
            (h[i + 1] - s).abs()
        })
        .fold(0.0, f64::max)
}

fn solve_dense(rows: &[Row], h: &mut [f64]) -> Result<()> {
    let m = rows.len();
    let full = m + 1;
    let mut a = DMatrix::<f64>::identity(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, row) in rows.iter().enumerate() {
        for &(t, q) in &row.targets {
            if t == full {
                rhs[i] += q;
            } else if t != 0 {
                a[(i, t - 1)] -= q;
            }
        }
    }
    let x = a.lu().solve(&rhs).ok_or(Error::Singular)?;
    h[1..full].copy_from_slice(x.as_slice());
    Ok(())
}

fn solve_gauss_seidel(rows: &[Row], h: &mut [f64]) -> Result<()> {
    // Start from the neutral-drift guess: fraction of cooperators.
    let n = (rows.len() + 2).trailing_zeros() as f64;
    for (mask, v) in h.iter_mut().enumerate().take(rows.len() + 1).skip(1) {
        *v = mask.count_ones() as f64 / n;
    }
    for _ in 0..GS_MAX_SWEEPS {
        let mut change: f64 = 0.0;
        for (i, row) in rows.iter().enumerate() {
            let v: f64 = row.targets.iter().map(|&(t, q)| q * h[t]).sum();
            change = change.max((v - h[i + 1]).abs());
            h[i + 1] = v;
        }
        if change < GS_TOLERANCE {
            return Ok(());
        }
    }
    Err(Error::NotConverged {
        iterations: GS_MAX_SWEEPS,
        residual: residual(rows, h),
        trace: Vec::new(),
    })
}

/// Hitting probability of all-C from every initial state.
pub fn exact_fixation_markov(g: &Graph, game: &GameMatrix, delta: f64) -> Result<ChainSolution> {
    let n = g.n();
    if n > MAX_NODES {
        return Err(Error::TooLarge {
            n,
            limit: MAX_NODES,
        });
    }
    if n < 2 {
        return Err(Error::param("chain needs at least two nodes"));
    }
    if !delta.is_finite() {
        return Err(Error::param("delta must be finite"));
    }
    g.require_connected()?;
    let rows = build_rows(g, game, delta)?;
    let mut h = vec![0.0; 1 << n];
    h[(1 << n) - 1] = 1.0;
    if n <= DENSE_MAX_NODES {
        solve_dense(&rows, &mut h)?;
    } else {
        solve_gauss_seidel(&rows, &mut h)?;
    }
    Ok(ChainSolution {
        n,
        delta,
        residual: residual(&rows, &h),
        rho_by_initial: h,
    })
}

/// `dρ/dδ` at zero for a uniformly placed single cooperator, by central
/// difference at `±SLOPE_DELTA`.
pub fn fixation_slope(g: &Graph, game: &GameMatrix) -> Result<f64> {
    let up = exact_fixation_markov(g, game, SLOPE_DELTA)?.uniform_single();
    let down = exact_fixation_markov(g, game, -SLOPE_DELTA)?.uniform_single();
    Ok((up - down) / (2.0 * SLOPE_DELTA))
}
