//! Mean-field closed forms: every remeeting time is replaced by its network
//! average `n μ1² / μ2`, which makes `b*`, `σ` and `ρ` functions of the
//! first two degree moments alone. SBM and ER specializations, the
//! inter-community phase threshold and the sparse-coupling limit follow.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::SbmParams;
use crate::graph::DegreeMoments;
use crate::ratio::CriticalRatio;

const REL_POLE: f64 = 1e-12;

/// Mean-field remeeting time `n μ1² / μ2`.
pub fn tau_mf(moments: &DegreeMoments) -> f64 {
    moments.n as f64 * moments.mu1 * moments.mu1 / moments.mu2
}

/// `b* ≈ (n - 2 μ2/μ1²) / (n/μ1 - 2 μ2/μ1²)`.
pub fn critical_ratio_mf(moments: &DegreeMoments) -> CriticalRatio {
    let n = moments.n as f64;
    let h = 2.0 * moments.mu2 / (moments.mu1 * moments.mu1);
    let lead = n / moments.mu1;
    CriticalRatio::new(n - h, lead - h, REL_POLE * lead.abs().max(h))
}

/// Mean-field fixation probability of a single uniformly placed cooperator:
/// `1/n + δ/(2n) [b (n μ1/μ2 - 2) - c (n μ1²/μ2 - 2)]`.
pub fn fixation_mf(moments: &DegreeMoments, b: f64, c: f64, delta: f64) -> f64 {
    let n = moments.n as f64;
    let DegreeMoments { mu1, mu2, .. } = *moments;
    let b_coef = n * mu1 / mu2 - 2.0;
    let c_coef = n * mu1 * mu1 / mu2 - 2.0;
    1.0 / n + delta / (2.0 * n) * (b * b_coef - c * c_coef)
}

/// `σ ≈ [n (μ1 + 1) - 4 μ2/μ1] / [n (μ1 - 1)]`, defined for `μ1 > 1`.
pub fn sigma_mf(moments: &DegreeMoments) -> Result<f64> {
    let DegreeMoments { mu1, mu2, .. } = *moments;
    if !(mu1 > 1.0) {
        return Err(Error::param(format!(
            "mean-field sigma needs mean degree > 1, got {mu1}"
        )));
    }
    let n = moments.n as f64;
    Ok((n * (mu1 + 1.0) - 4.0 * mu2 / mu1) / (n * (mu1 - 1.0)))
}

/// Expected degree moments of an SBM with equiprobable groups:
/// `μ1 = (N-1)(αp + βq)`, `var = (N-1)(αp(1-p) + βq(1-q))`, `α = 1/m`, `β = 1 - 1/m`.
pub fn sbm_moments(params: &SbmParams) -> DegreeMoments {
    let n1 = params.n as f64 - 1.0;
    let alpha = 1.0 / params.m as f64;
    let beta = 1.0 - alpha;
    let (p, q) = (params.p, params.q);
    let mu1 = n1 * (alpha * p + beta * q);
    let var = n1 * (alpha * p * (1.0 - p) + beta * q * (1.0 - q));
    DegreeMoments::new(params.n, mu1, var + mu1 * mu1)
}

/// SBM closed form for `b*`, term by term.
pub fn critical_ratio_sbm(params: &SbmParams) -> CriticalRatio {
    let n = params.n as f64;
    let alpha = 1.0 / params.m as f64;
    let beta = 1.0 - alpha;
    let (p, q) = (params.p, params.q);
    let a = alpha * p + beta * q;
    let spread = 2.0 / (n - 1.0) * (alpha * p * (1.0 - p) + beta * q * (1.0 - q)) / (a * a);
    let lead = (n / (n - 1.0)) / a;
    let numerator = n - 2.0 - spread;
    let denominator = lead - 2.0 - spread;
    CriticalRatio::new(
        numerator,
        denominator,
        REL_POLE * lead.abs().max(2.0 + spread),
    )
}

/// Erdős–Rényi closed form `[p(N² - 3N + 4) - 2] / [(N - 2)(1 - 2p)]`.
pub fn critical_ratio_er(n: usize, p: f64) -> Result<CriticalRatio> {
    if n < 3 || !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!(
            "ER ratio needs n >= 3 and 0 < p <= 1 (n = {n}, p = {p})"
        )));
    }
    let nf = n as f64;
    let numerator = p * (nf * nf - 3.0 * nf + 4.0) - 2.0;
    let denominator = (nf - 2.0) * (1.0 - 2.0 * p);
    Ok(CriticalRatio::new(
        numerator,
        denominator,
        REL_POLE * (nf - 2.0),
    ))
}

/// Critical inter-community link probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QHat {
    /// Two-term large-N expansion.
    pub expansion: f64,
    /// Root in `[0, 1]` of the SBM denominator where it turns from positive
    /// to negative; `None` when there is no such transition.
    pub exact_root: Option<f64>,
}

/// Threshold `q̂` above which the SBM denominator is negative (spite regime).
pub fn q_hat(m: usize, p: f64, n: usize) -> Result<QHat> {
    if m < 2 {
        return Err(Error::param("q_hat needs at least two groups"));
    }
    if !(0.0..=1.0).contains(&p) || n < 3 {
        return Err(Error::param("q_hat needs 0 <= p <= 1 and n >= 3"));
    }
    let (mf, nf) = (m as f64, n as f64);
    let expansion = (mf - 2.0 * p) / (2.0 * (mf - 1.0))
        + 2.0 * mf * (0.5 - p).powi(2) / ((mf - 1.0).powi(2) * nf);

    // Denominator × (N-1) a² = N a - 2(N-1) a² - 2v, with a and v affine and
    // quadratic in q respectively.
    let alpha = 1.0 / mf;
    let beta = 1.0 - alpha;
    let n1 = nf - 1.0;
    let c2 = -2.0 * n1 * beta * beta + 2.0 * beta;
    let c1 = nf * beta - 4.0 * n1 * alpha * p * beta - 2.0 * beta;
    let c0 = nf * alpha * p - 2.0 * n1 * alpha * alpha * p * p - 2.0 * alpha * p * (1.0 - p);
    let f = |q: f64| c0 + q * (c1 + q * c2);
    let mut roots = Vec::new();
    if c2.abs() < 1e-300 {
        if c1 != 0.0 {
            roots.push(-c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // Numerically stable pair of roots.
            let t = -0.5 * (c1 + c1.signum() * sq);
            if t != 0.0 {
                roots.push(t / c2);
                roots.push(c0 / t);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots.retain(|q| (0.0..=1.0).contains(q));
    roots.sort_by(f64::total_cmp);
    let exact_root = roots.into_iter().find(|&q| {
        let h = 1e-7;
        f((q - h).max(0.0)) > 0.0 && f((q + h).min(1.0)) < 0.0
    });
    Ok(QHat {
        expansion,
        exact_root,
    })
}

/// Sparse-coupling limit `q → 0⁺` of the SBM ratio:
/// `[n(n-2)p - 2m(1-p)] / [n(m - 2p) - 2m(1-p)]`.
pub fn bstar_small_q(n: usize, m: usize, p: f64) -> Result<CriticalRatio> {
    if m < 2 || !(p > 0.0 && p <= 1.0) {
        return Err(Error::param("small-q limit needs m >= 2 and 0 < p <= 1"));
    }
    let (nf, mf) = (n as f64, m as f64);
    let numerator = nf * (nf - 2.0) * p - 2.0 * mf * (1.0 - p);
    let denominator = nf * (mf - 2.0 * p) - 2.0 * mf * (1.0 - p);
    Ok(CriticalRatio::new(
        numerator,
        denominator,
        REL_POLE * nf * mf,
    ))
}

/// All mean-field quantities for one set of moments and a donation game.
#[derive(Debug, Clone, Serialize)]
pub struct MeanFieldReport {
    pub moments: DegreeMoments,
    pub tau_mf: f64,
    pub bstar_mf: CriticalRatio,
    pub sigma_mf: Option<f64>,
    pub rho_mf: f64,
}

pub fn report(moments: &DegreeMoments, b: f64, c: f64, delta: f64) -> MeanFieldReport {
    MeanFieldReport {
        moments: *moments,
        tau_mf: tau_mf(moments),
        bstar_mf: critical_ratio_mf(moments),
        sigma_mf: sigma_mf(moments).ok(),
        rho_mf: fixation_mf(moments, b, c, delta),
    }
}
