//! Gauss-Hermite quadrature for expectations over Gaussian variables.

use std::f64::consts::PI;

/// Nodes and weights for `∫ f(t) e^{-t²} dt ≈ Σ w_i f(t_i)`, nodes ascending.
///
/// Golub-Welsch: nodes are the eigenvalues of the Hermite Jacobi matrix and
/// weights come from the first component of each normalized eigenvector.
/// Implicit QL only needs that first row, so the cost is O(order²).
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut diag = vec![0.0; n];
    // off[i] couples diag[i] and diag[i + 1]; the last entry is unused
    let mut off: Vec<f64> = (1..=n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    off[n - 1] = 0.0;
    let mut first_row = vec![0.0; n];
    first_row[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first_row);

    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first_row)
        .map(|(x, v)| (x, PI.sqrt() * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix,
/// rotating only the first row of the eigenvector matrix.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 100, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// `E[f(X)]` for `X ~ N(mean, std²)`.
pub fn gaussian_expectation(
    rule: &(Vec<f64>, Vec<f64>),
    mean: f64,
    std: f64,
    f: impl Fn(f64) -> f64,
) -> f64 {
    let (x, w) = rule;
    let scale = std::f64::consts::SQRT_2 * std;
    x.iter()
        .zip(w)
        .map(|(&t, &wt)| wt * f(mean + scale * t))
        .sum::<f64>()
        / PI.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders_match_closed_form() {
        let (x, w) = gauss_hermite(1);
        assert!(x[0].abs() < 1e-15);
        assert!((w[0] - PI.sqrt()).abs() < 1e-14);

        let (x, w) = gauss_hermite(2);
        let r = 0.5f64.sqrt();
        assert!((x[0] + r).abs() < 1e-14 && (x[1] - r).abs() < 1e-14);
        assert!((w[0] - PI.sqrt() / 2.0).abs() < 1e-14);

        // H_3 roots: 0, ±sqrt(3/2); weights √π/6 · (1, 4, 1)
        let (x, w) = gauss_hermite(3);
        assert!((x[2] - 1.5f64.sqrt()).abs() < 1e-14);
        assert!((w[1] - 2.0 * PI.sqrt() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for order in [5, 20, 64, 200, 256] {
            let (x, w) = gauss_hermite(order);
            let s: f64 = w.iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-12, "order {order}: {s}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn integrates_gaussian_moments() {
        let rule = gauss_hermite(40);
        let m2 = gaussian_expectation(&rule, 1.5, 2.0, |x| x * x);
        assert!((m2 - (1.5f64.powi(2) + 4.0)).abs() < 1e-11);
        let m4 = gaussian_expectation(&rule, 0.0, 1.0, |x| x.powi(4));
        assert!((m4 - 3.0).abs() < 1e-11);
        let rule = gauss_hermite(256);
        let m6 = gaussian_expectation(&rule, 0.0, 1.0, |x| x.powi(6));
        assert!((m6 - 15.0).abs() < 1e-9);
    }
}
