//! Floating-point helpers shared by every module.
//!
//! Transcendental functions go through `libm` so the crate stays `no_std`.
//! [`CertifiedSum`] tracks a rigorous bound on accumulated rounding error,
//! which is what lets enclosures of exactly representable sums collapse to
//! a single point.

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub(crate) fn fma(x: f64, y: f64, z: f64) -> f64 {
    libm::fma(x, y, z)
}

/// `ln(n!)`, exact up to rounding of the final logarithm for `n <= 20`.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        let mut f = 1u64;
        for i in 2..=n {
            f *= i;
        }
        ln(f as f64)
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Error-free transformation `a + b = s + e`.
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Relative bound used for single libm calls (a few ulps).
pub(crate) const LIBM_REL: f64 = 4.0 * f64::EPSILON;

/// Running sum with a rigorous upper bound on `|true - computed|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CertifiedSum {
    sum: f64,
    err: f64,
}

impl CertifiedSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a term whose own error is at most `term_err`.
    pub fn add(&mut self, term: f64, term_err: f64) {
        let (s, e) = two_sum(self.sum, term);
        self.sum = s;
        self.err += e.abs() + term_err;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }

    pub fn error(&self) -> f64 {
        self.err
    }

    pub fn interval(&self) -> crate::sequences::Interval {
        if self.err == 0.0 {
            crate::sequences::Interval::point(self.sum)
        } else {
            let pad = self.err * (1.0 + 1e-12);
            crate::sequences::Interval::new((self.sum - pad).next_down(), (self.sum + pad).next_up())
        }
    }
}

/// Compensated summation of a slice.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if libm::fabs(sum) >= libm::fabs(v) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return f64::NAN;
    }
    let mx = neumaier_sum(xs[..n].iter().copied()) / n as f64;
    let my = neumaier_sum(ys[..n].iter().copied()) / n as f64;
    let sxy = neumaier_sum((0..n).map(|i| (xs[i] - mx) * (ys[i] - my)));
    let sxx = neumaier_sum((0..n).map(|i| (xs[i] - mx) * (xs[i] - mx)));
    sxy / sxx
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: alloc::vec::Vec<f64> = xs.iter().map(|&x| ln(x)).collect();
    let ly: alloc::vec::Vec<f64> = ys.iter().map(|&y| ln(y)).collect();
    fit_slope(&lx, &ly)
}
