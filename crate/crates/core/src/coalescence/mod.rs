//! Exact coalescing-walk quantities: pairwise meeting times, remeeting
//! times, the first-order fixation probability, the critical ratio `b*`
//! and the structure coefficient.

mod dump;
mod solver;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::CriticalRatio;

pub use dump::{decode_tau_dump, encode_tau_dump, read_tau_dump, write_tau_dump};
pub use solver::{max_residual, SolverMethod, SolverOptions, AUTO_DENSE_NODES, DENSE_MAX_NODES};

/// Relative tolerance on `Σ k_x² τ_x = (Σ k_x)²` before a solve is rejected.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;

/// Symmetric table of expected meeting times `τ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetingTimes {
    n: usize,
    tau: Vec<f64>,
    pub tolerance: f64,
    pub solver_residual: f64,
    pub iterations: usize,
    pub method: SolverMethod,
}

impl MeetingTimes {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    /// Row-major `n × n` table.
    pub fn as_slice(&self) -> &[f64] {
        &self.tau
    }

    pub(crate) fn from_parts(n: usize, tau: Vec<f64>, tolerance: f64, residual: f64) -> Self {
        Self {
            n,
            tau,
            tolerance,
            solver_residual: residual,
            iterations: 0,
            method: SolverMethod::Auto,
        }
    }
}

/// Solves the meeting-time system on a connected graph with `n >= 2`.
pub fn meeting_times(g: &Graph, opts: &SolverOptions) -> Result<MeetingTimes> {
    if g.n() < 2 {
        return Err(Error::param("meeting times need at least two nodes"));
    }
    g.require_connected()?;
    let sol = solver::solve(g, opts)?;
    let residual = max_residual(g, &sol.tau);
    if !(residual <= opts.tolerance) {
        return Err(Error::NotConverged {
            iterations: sol.iterations,
            residual,
            trace: vec![residual],
        });
    }
    Ok(MeetingTimes {
        n: g.n(),
        tau: sol.tau,
        tolerance: opts.tolerance,
        solver_residual: residual,
        iterations: sol.iterations,
        method: sol.method,
    })
}

/// Per-node remeeting times and reciprocal-degree weights.
#[derive(Debug, Clone, Serialize)]
pub struct CoalescenceSummary {
    pub n: usize,
    pub degrees: Vec<usize>,
    /// Expected meeting time of two walkers that both start at `x`, after one step each.
    pub tau_x: Vec<f64>,
    pub p_x: Vec<f64>,
    pub mu1: f64,
    /// `|Σ k² τ_x - n² μ1²| / (n² μ1²)`.
    pub identity_rel_error: f64,
}

impl CoalescenceSummary {
    /// `Σ_x π_x τ_x` and `Σ_x π_x τ_x p_x` with `π_x = k_x / (n μ1)`.
    pub fn weighted_sums(&self) -> (f64, f64) {
        let total = self.n as f64 * self.mu1;
        self.degrees.iter().zip(&self.tau_x).zip(&self.p_x).fold(
            (0.0, 0.0),
            |(a, b), ((&k, &t), &p)| {
                let w = k as f64 / total;
                (a + w * t, b + w * t * p)
            },
        )
    }

    /// `dρ/dδ` at `δ = 0` for the donation game with benefit `b` and cost `c`.
    ///
    /// Equals `[b (Σ π τ p - 2) - c (Σ π τ - 2)] / (2n)`; its zero in `b/c`
    /// is the critical ratio.
    pub fn selection_gradient(&self, b: f64, c: f64) -> f64 {
        let (pi_tau, pi_tau_p) = self.weighted_sums();
        (b * (pi_tau_p - 2.0) - c * (pi_tau - 2.0)) / (2.0 * self.n as f64)
    }
}

/// `τ_x = 1 + (1/k_x) Σ_{y ∈ N(x)} τ_yx`, with the identity
/// `Σ_x k_x² τ_x = n² μ1²` checked to [`IDENTITY_TOLERANCE`].
pub fn remeeting_times(g: &Graph, mt: &MeetingTimes) -> Result<CoalescenceSummary> {
    if mt.n != g.n() {
        return Err(Error::param(format!(
            "meeting times are for {} nodes, graph has {}",
            mt.n,
            g.n()
        )));
    }
    let degrees = g.degrees();
    let tau_x: Vec<f64> = (0..g.n())
        .map(|x| {
            let s: f64 = g.neighbors(x).iter().map(|&y| mt.get(y, x)).sum();
            1.0 + s / degrees[x] as f64
        })
        .collect();
    let p_x = g.reciprocal_degree_weights()?;
    let moments = g.degree_moments();
    let lhs: f64 = degrees
        .iter()
        .zip(&tau_x)
        .map(|(&k, &t)| (k * k) as f64 * t)
        .sum();
    let total_degree: usize = degrees.iter().sum();
    let rhs = (total_degree as f64).powi(2);
    let identity_rel_error = (lhs - rhs).abs() / rhs;
    if !(identity_rel_error <= IDENTITY_TOLERANCE) {
        return Err(Error::IdentityViolated {
            rel_error: identity_rel_error,
        });
    }
    Ok(CoalescenceSummary {
        n: g.n(),
        degrees,
        tau_x,
        p_x,
        mu1: moments.mu1,
        identity_rel_error,
    })
}

/// Weak-selection fixation probability of a single cooperator placed
/// uniformly at random, to first order in `delta`:
/// `ρ = 1/n + δ/(2n) [b (Σ π τ p - 2) - c (Σ π τ - 2)]`.
pub fn fixation_probability_exact(summary: &CoalescenceSummary, b: f64, c: f64, delta: f64) -> f64 {
    1.0 / summary.n as f64 + delta * summary.selection_gradient(b, c)
}

/// `b* = (Σ τ_x k_x - 2nμ1) / (Σ τ_x k_x p_x - 2nμ1)`; a pole is flagged when
/// `|denominator| < 1e-9 n μ1`.
pub fn critical_ratio_exact(summary: &CoalescenceSummary) -> CriticalRatio {
    let two_e = summary.n as f64 * summary.mu1;
    let (num, den) = summary
        .degrees
        .iter()
        .zip(&summary.tau_x)
        .zip(&summary.p_x)
        .fold((0.0, 0.0), |(a, b), ((&k, &t), &p)| {
            (a + t * k as f64, b + t * k as f64 * p)
        });
    CriticalRatio::new(num - 2.0 * two_e, den - 2.0 * two_e, 1e-9 * two_e)
}

/// Meeting times, remeeting times and `b*` in one call.
pub fn analyze_exact(
    g: &Graph,
    opts: &SolverOptions,
) -> Result<(MeetingTimes, CoalescenceSummary, CriticalRatio)> {
    let mt = meeting_times(g, opts)?;
    let summary = remeeting_times(g, &mt)?;
    let ratio = critical_ratio_exact(&summary);
    Ok((mt, summary, ratio))
}

/// `σ = (b* + 1) / (b* - 1)`.
pub fn structure_coefficient(ratio: &CriticalRatio) -> Result<f64> {
    let v = ratio.value().ok_or(Error::Pole)?;
    if v == 1.0 {
        return Err(Error::UnitRatio);
    }
    Ok((v + 1.0) / (v - 1.0))
}
