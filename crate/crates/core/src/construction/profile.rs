//! Per-index reliability of the synthetic channels.
//!
//! Index `i` with binary expansion `(b_1, ..., b_n)`, most significant bit first,
//! sees the composition `f_{b_1} ∘ ... ∘ f_{b_n}` applied to the channel value,
//! so the least significant bit acts first.

use crate::error::{Error, Result};

/// Largest supported stage count.
pub const MAX_STAGES: u32 = 24;

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain {
            value: x,
            domain: "[0,1]",
        })
    }
}

pub(crate) fn check_stages(n: u32) -> Result<()> {
    if n > MAX_STAGES {
        return Err(Error::Size(format!("n = {n} exceeds {MAX_STAGES}")));
    }
    Ok(())
}

/// `f0(x) = 1 - (1 - x)² = 2x - x²`.
pub fn f0(x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(f0_raw(x))
}

/// Relative accuracy near 0, exact `1 - x` (hence monotone rounding) near 1.
#[inline]
fn f0_raw(x: f64) -> f64 {
    if x < 0.5 {
        x * (2.0 - x)
    } else {
        let y = 1.0 - x;
        1.0 - y * y
    }
}

/// `f1(x) = x²`.
pub fn f1(x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(x * x)
}

/// Bhattacharyya parameter of synthetic channel `i` of a BEC(ε) polarized over `n` stages.
pub fn bhattacharyya_bec(i: usize, n: u32, epsilon: f64) -> Result<f64> {
    check_stages(n)?;
    check_unit(epsilon)?;
    let bound = 1usize << n;
    if i >= bound {
        return Err(Error::IndexOutOfRange { index: i, bound });
    }
    let mut z = epsilon;
    for k in 0..n {
        z = if i >> k & 1 == 1 { z * z } else { f0_raw(z) };
    }
    Ok(z)
}

/// `ln f0` and `ln f1` expressed on `ln x`.
#[inline]
fn log_f0(lx: f64) -> f64 {
    lx + (2.0 - lx.exp()).ln()
}

#[inline]
fn log_f1(lx: f64) -> f64 {
    2.0 * lx
}

/// Applies a per-bit map to every index, sharing work across common suffixes.
fn suffix_table(n: u32, start: f64, step: impl Fn(f64, bool) -> f64) -> Vec<f64> {
    let mut table = Vec::with_capacity(1 << n);
    table.push(start);
    for k in 0..n {
        let half = 1usize << k;
        for s in 0..half {
            table.push(step(table[s], true));
        }
        for s in 0..half {
            table[s] = step(table[s], false);
        }
    }
    table
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileSemantics {
    /// Exact Bhattacharyya parameters (BEC) or their bounding recursion.
    BhattacharyyaExact,
    /// Gaussian-approximation error probabilities.
    DensityEvolutionSurrogate,
}

/// Scores for all `N = 2^n` synthetic channels; smaller is more reliable.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityProfile {
    n: u32,
    scores: Vec<f64>,
    semantics: ProfileSemantics,
    /// Monotone transform of the score that does not underflow.
    key: Vec<f64>,
}

impl ReliabilityProfile {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn semantics(&self) -> ProfileSemantics {
        self.semantics
    }

    /// Indices from most to least reliable, ties broken by smaller index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.key[a].total_cmp(&self.key[b]).then(a.cmp(&b)));
        idx
    }

    pub(crate) fn key(&self) -> &[f64] {
        &self.key
    }
}

/// Bhattacharyya recursion started from `z0`, the parameter of the underlying channel.
pub fn bhattacharyya_profile(n: u32, z0: f64) -> Result<ReliabilityProfile> {
    check_stages(n)?;
    check_unit(z0)?;
    let scores = suffix_table(n, z0, |z, b| if b { z * z } else { f0_raw(z) });
    let key = suffix_table(n, z0.ln(), |l, b| if b { log_f1(l) } else { log_f0(l) });
    Ok(ReliabilityProfile {
        n,
        scores,
        semantics: ProfileSemantics::BhattacharyyaExact,
        key,
    })
}

/// Exact Bhattacharyya profile of a BEC(ε).
pub fn bec_profile(n: u32, epsilon: f64) -> Result<ReliabilityProfile> {
    bhattacharyya_profile(n, epsilon)
}

/// `ln φ(x)` for the mean-to-error map of a symmetric Gaussian LLR.
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        (-0.4527 * x.powf(0.86) + 0.0218).min(0.0)
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Solves `ln φ(x) = target` by bisection.
fn phi_inv_ln(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while ln_phi(hi) > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..400 {
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR after a check-node combination of two channels with mean `m`.
pub(crate) fn ga_check(m: f64) -> f64 {
    // 1 - (1 - φ)² = φ (2 - φ)
    let lp = ln_phi(m);
    phi_inv_ln(lp + (2.0 - lp.exp()).ln())
}

/// Gaussian-approximation density evolution for a BAWGN channel with noise variance σ².
///
/// Scores are `Q(√(m_i / 2))` for the mean LLR `m_i` of each synthetic channel.
pub fn gaussian_profile(n: u32, variance: f64) -> Result<ReliabilityProfile> {
    check_stages(n)?;
    if !(variance.is_finite() && variance > 0.0) {
        return Err(Error::Domain {
            value: variance,
            domain: "(0,inf)",
        });
    }
    let means = suffix_table(n, 2.0 / variance, |m, b| if b { 2.0 * m } else { ga_check(m) });
    let scores = means.iter().map(|&m| 0.5 * libm::erfc(m.sqrt() / 2.0)).collect();
    let key = means.iter().map(|&m| -m).collect();
    Ok(ReliabilityProfile {
        n,
        scores,
        semantics: ProfileSemantics::DensityEvolutionSurrogate,
        key,
    })
}
