//! Orthonormal Legendre polynomials for the uniform probability measure on `[-1, 1]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;

/// Coefficients of `y L_n = c_upper L_{n+1} + c_lower L_{n-1}`, returned as `(c_lower, c_upper)`.
pub fn legendre_coupling(n: u32) -> (f64, f64) {
    let n = n as f64;
    let upper = (n + 1.0) / math::sqrt((2.0 * n + 1.0) * (2.0 * n + 3.0));
    let lower = if n == 0.0 { 0.0 } else { n / math::sqrt((2.0 * n - 1.0) * (2.0 * n + 1.0)) };
    (lower, upper)
}

/// `[L_0(y), ..., L_n(y)]` with `L_k = sqrt(2k + 1) P_k`.
pub fn legendre_values(n: u32, y: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n as usize + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(y);
    }
    for k in 1..n as usize {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * y * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    for (k, v) in p.iter_mut().enumerate() {
        *v *= math::sqrt(2.0 * k as f64 + 1.0);
    }
    p
}

/// `(P_n(y), P_n'(y))` for the classical Legendre polynomial.
fn legendre_with_derivative(n: usize, y: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = y;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * y * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (y * p1 - p0) / (y * y - 1.0);
    (p1, dp)
}

/// Gauss-Legendre rule with `n` nodes; weights sum to 1 (uniform probability measure).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut y = math::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, y);
            let dy = p / dp;
            y -= dy;
            if dy.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, y);
        let w = 1.0 / ((1.0 - y * y) * dp * dp);
        nodes[i] = -y;
        nodes[n - 1 - i] = y;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let total = math::neumaier_sum(weights.iter().copied());
    for w in weights.iter_mut() {
        *w /= total;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_values() {
        let (l0, u0) = legendre_coupling(0);
        assert_eq!(l0, 0.0);
        assert!((u0 - 1.0 / math::sqrt(3.0)).abs() < 1e-15);
        let (l1, u1) = legendre_coupling(1);
        assert!((l1 - 1.0 / math::sqrt(3.0)).abs() < 1e-15);
        assert!((u1 - 2.0 / math::sqrt(15.0)).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_under_gauss_rule() {
        let (y, w) = gauss_legendre(20);
        for a in 0..10u32 {
            for b in 0..10u32 {
                let s: f64 = y
                    .iter()
                    .zip(&w)
                    .map(|(&yi, &wi)| wi * legendre_values(9, yi)[a as usize] * legendre_values(9, yi)[b as usize])
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-13, "{a} {b} {s}");
            }
        }
    }

    #[test]
    fn odd_rule_has_centre_node() {
        let (y, w) = gauss_legendre(3);
        assert_eq!(y[1], 0.0);
        assert!((w[1] - 4.0 / 9.0).abs() < 1e-15);
        assert!((y[2] - math::sqrt(0.6)).abs() < 1e-15);
    }
}
