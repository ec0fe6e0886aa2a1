//! MAP block error of the uniform random parity-check ensemble over the BEC.

use crate::error::{Error, Result};

/// Probability that `e` erased columns of a uniform random `(N - k) x N`
/// parity-check matrix are linearly dependent.
pub fn random_code_failure_probability(len: usize, k: usize, e: usize) -> f64 {
    log_success(len - k, e).map_or(1.0, |l| -l.exp_m1())
}

fn success_probability(len: usize, k: usize, e: usize) -> f64 {
    log_success(len - k, e).map_or(0.0, f64::exp)
}

fn log_success(r: usize, e: usize) -> Option<f64> {
    (e <= r).then(|| {
        (0..e)
            .map(|i| (-(2f64.powi(i as i32 - r as i32))).ln_1p())
            .sum()
    })
}

fn check(len: usize, k: usize) -> Result<()> {
    if k == 0 || k >= len {
        return Err(Error::InvalidArgument(format!(
            "dimension {k} must satisfy 0 < k < {len}"
        )));
    }
    Ok(())
}

/// `(ε, P_e)` for each ε of the grid.
pub fn random_code_reference(len: usize, k: usize, epsilons: &[f64]) -> Result<Vec<(f64, f64)>> {
    check(len, k)?;
    if epsilons.is_empty() {
        return Err(Error::InvalidArgument("empty erasure grid".into()));
    }
    let fail: Vec<f64> = (0..=len)
        .map(|e| random_code_failure_probability(len, k, e))
        .collect();
    let ok: Vec<f64> = (0..=len).map(|e| success_probability(len, k, e)).collect();
    let mut ln_binom = vec![0.0; len + 1];
    for e in 1..=len {
        ln_binom[e] = ln_binom[e - 1] + ((len - e + 1) as f64).ln() - (e as f64).ln();
    }
    epsilons
        .iter()
        .map(|&eps| {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::Domain {
                    value: eps,
                    domain: "[0, 1]",
                });
            }
            let pe = if eps == 0.0 {
                fail[0]
            } else if eps == 1.0 {
                fail[len]
            } else {
                let (le, lq) = (eps.ln(), (-eps).ln_1p());
                let weight = |e: usize| (ln_binom[e] + e as f64 * le + (len - e) as f64 * lq).exp();
                let pe: f64 = (0..=len).map(|e| weight(e) * fail[e]).sum();
                // the smaller of the two sums is the accurate one
                if pe <= 0.5 {
                    pe
                } else {
                    1.0 - (0..=len).map(|e| weight(e) * ok[e]).sum::<f64>().min(1.0)
                }
            };
            Ok((eps, pe))
        })
        .collect()
}
