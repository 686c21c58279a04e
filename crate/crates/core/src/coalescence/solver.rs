//! Solvers for the pairwise meeting-time system
//!
//! ```text
//! tau_ij = 1 + 1/(2 k_i) sum_{l in N(i)} tau_lj + 1/(2 k_j) sum_{l in N(j)} tau_li   (i != j)
//! tau_ii = 0
//! ```
//!
//! Writing `P` for the walk matrix, the off-diagonal part of `T - (P T + T P^T)/2`
//! is a symmetric positive-definite operator in the inner product weighted
//! by `pi_i pi_j` (`pi` the stationary distribution), so conjugate gradients
//! apply directly. Gauss–Seidel and a dense direct solve are kept for small
//! graphs and cross-checks.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    /// Dense direct solve for tiny graphs, conjugate gradients otherwise.
    Auto,
    ConjugateGradient,
    GaussSeidel,
    Dense,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Maximum absolute residual of any pair equation at termination.
    pub tolerance: f64,
    /// Iteration cap (sweeps for Gauss–Seidel, steps for conjugate gradients).
    pub max_sweeps: usize,
    pub method: SolverMethod,
    /// Over-relaxation factor for Gauss–Seidel; 1 is plain Gauss–Seidel.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_sweeps: 100_000,
            method: SolverMethod::Auto,
            damping: 1.0,
        }
    }
}

/// Largest graph accepted by the dense direct solver.
pub const DENSE_MAX_NODES: usize = 60;
/// `Auto` switches from dense to conjugate gradients above this size.
pub const AUTO_DENSE_NODES: usize = 24;

pub(crate) struct Solution {
    pub tau: Vec<f64>,
    pub iterations: usize,
    pub method: SolverMethod,
}

pub(crate) fn solve(g: &Graph, opts: &SolverOptions) -> Result<Solution> {
    let method = match opts.method {
        SolverMethod::Auto if g.n() <= AUTO_DENSE_NODES => SolverMethod::Dense,
        SolverMethod::Auto => SolverMethod::ConjugateGradient,
        m => m,
    };
    match method {
        SolverMethod::Dense => dense(g),
        SolverMethod::GaussSeidel => gauss_seidel(g, opts),
        _ => conjugate_gradient(g, opts),
    }
}

/// `max_{i != j} |1 + (P T)_ij / 2 + (P T)_ji / 2 - T_ij|`.
pub fn max_residual(g: &Graph, tau: &[f64]) -> f64 {
    let n = g.n();
    let pt = walk_product(g, tau);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut m = 0.0f64;
            for j in 0..n {
                if i != j {
                    let r = 1.0 + 0.5 * (pt[i * n + j] + pt[j * n + i]) - tau[i * n + j];
                    m = m.max(r.abs());
                }
            }
            m
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

/// Row-wise `(P X)_i = (1/k_i) sum_{l in N(i)} X_l`.
fn walk_product(g: &Graph, x: &[f64]) -> Vec<f64> {
    let n = g.n();
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let nb = g.neighbors(i);
        for &l in nb {
            let src = &x[l * n..(l + 1) * n];
            for (o, s) in row.iter_mut().zip(src) {
                *o += s;
            }
        }
        let inv = 1.0 / nb.len() as f64;
        for o in row.iter_mut() {
            *o *= inv;
        }
    });
    out
}

/// Off-diagonal part of `X - (P X + (P X)^T) / 2` for symmetric `X`.
fn apply_operator(g: &Graph, x: &[f64], out: &mut [f64]) {
    let n = g.n();
    let px = walk_product(g, x);
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, o) in row.iter_mut().enumerate() {
            *o = if i == j {
                0.0
            } else {
                x[i * n + j] - 0.5 * (px[i * n + j] + px[j * n + i])
            };
        }
    });
}

/// `sum_ij pi_i pi_j x_ij y_ij`, summed row by row in a fixed order so the
/// result does not depend on the thread count.
fn weighted_dot(pi: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let n = pi.len();
    let rows: Vec<f64> = x
        .par_chunks(n)
        .zip(y.par_chunks(n))
        .enumerate()
        .map(|(i, (xr, yr))| {
            let s: f64 = xr.iter().zip(yr).zip(pi).map(|((a, b), w)| a * b * w).sum();
            s * pi[i]
        })
        .collect();
    rows.iter().sum()
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn conjugate_gradient(g: &Graph, opts: &SolverOptions) -> Result<Solution> {
    let n = g.n();
    let two_m: f64 = g.degrees().iter().sum::<usize>() as f64;
    let pi: Vec<f64> = g.degrees().iter().map(|&k| k as f64 / two_m).collect();

    let rhs: Vec<f64> = (0..n * n)
        .map(|idx| if idx / n == idx % n { 0.0 } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n * n];
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut ap = vec![0.0; n * n];
    let mut rr = weighted_dot(&pi, &r, &r);
    let mut trace = Vec::new();
    let mut iterations = 0;

    loop {
        let recursive = max_abs(&r);
        if recursive <= 0.5 * opts.tolerance || rr == 0.0 {
            // Confirm against the true residual; restart from it if the
            // recursion has drifted.
            apply_operator(g, &x, &mut ap);
            r.par_iter_mut()
                .zip(rhs.par_iter())
                .zip(ap.par_iter())
                .for_each(|((r, b), a)| *r = b - a);
            let true_res = max_abs(&r);
            if true_res <= opts.tolerance {
                return Ok(Solution {
                    tau: x,
                    iterations,
                    method: SolverMethod::ConjugateGradient,
                });
            }
            p.copy_from_slice(&r);
            rr = weighted_dot(&pi, &r, &r);
        }
        if iterations >= opts.max_sweeps {
            trace.push(recursive);
            return Err(Error::NotConverged {
                iterations,
                residual: recursive,
                trace,
            });
        }
        if iterations % 100 == 0 {
            trace.push(recursive);
        }

        apply_operator(g, &p, &mut ap);
        let pap = weighted_dot(&pi, &p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Singular);
        }
        let alpha = rr / pap;
        x.par_iter_mut()
            .zip(p.par_iter())
            .for_each(|(x, p)| *x += alpha * p);
        r.par_iter_mut()
            .zip(ap.par_iter())
            .for_each(|(r, a)| *r -= alpha * a);
        let rr_next = weighted_dot(&pi, &r, &r);
        let beta = rr_next / rr;
        rr = rr_next;
        p.par_iter_mut()
            .zip(r.par_iter())
            .for_each(|(p, r)| *p = r + beta * *p);
        iterations += 1;
    }
}

fn gauss_seidel(g: &Graph, opts: &SolverOptions) -> Result<Solution> {
    let n = g.n();
    let omega = opts.damping;
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::param(format!("damping {omega} must lie in (0, 2)")));
    }
    let inv2k: Vec<f64> = g.degrees().iter().map(|&k| 0.5 / k as f64).collect();
    let mut tau = vec![0.0; n * n];
    let mut trace = Vec::new();
    for sweep in 1..=opts.max_sweeps {
        let mut change = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                // tau is kept symmetric, so column reads become row reads.
                let si: f64 = g.neighbors(i).iter().map(|&l| tau[j * n + l]).sum();
                let sj: f64 = g.neighbors(j).iter().map(|&l| tau[i * n + l]).sum();
                let target = 1.0 + inv2k[i] * si + inv2k[j] * sj;
                let old = tau[i * n + j];
                change = change.max((target - old).abs());
                let new = old + omega * (target - old);
                tau[i * n + j] = new;
                tau[j * n + i] = new;
            }
        }
        if sweep % 100 == 0 {
            trace.push(change);
        }
        if change <= opts.tolerance {
            let res = max_residual(g, &tau);
            if res <= opts.tolerance {
                return Ok(Solution {
                    tau,
                    iterations: sweep,
                    method: SolverMethod::GaussSeidel,
                });
            }
        }
    }
    let residual = max_residual(g, &tau);
    trace.push(residual);
    Err(Error::NotConverged {
        iterations: opts.max_sweeps,
        residual,
        trace,
    })
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

fn dense(g: &Graph) -> Result<Solution> {
    let n = g.n();
    if n > DENSE_MAX_NODES {
        return Err(Error::TooLarge {
            n,
            limit: DENSE_MAX_NODES,
        });
    }
    let unknowns = n * (n - 1) / 2;
    let mut a = DMatrix::<f64>::zeros(unknowns, unknowns);
    let rhs = DVector::<f64>::from_element(unknowns, 1.0);
    for i in 0..n {
        for j in i + 1..n {
            let row = pair_index(n, i, j);
            a[(row, row)] += 1.0;
            let ci = 0.5 / g.degree(i) as f64;
            for &l in g.neighbors(i) {
                if l != j {
                    a[(row, pair_index(n, l, j))] -= ci;
                }
            }
            let cj = 0.5 / g.degree(j) as f64;
            for &l in g.neighbors(j) {
                if l != i {
                    a[(row, pair_index(n, l, i))] -= cj;
                }
            }
        }
    }
    let sol = a.lu().solve(&rhs).ok_or(Error::Singular)?;
    let mut tau = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = sol[pair_index(n, i, j)];
            tau[i * n + j] = v;
            tau[j * n + i] = v;
        }
    }
    Ok(Solution {
        tau,
        iterations: 1,
        method: SolverMethod::Dense,
    })
}
