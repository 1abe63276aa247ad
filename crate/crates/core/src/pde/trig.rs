//! Real trigonometric polynomials on the torus `[0, 1)^m`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    pub fn scale(self, s: f64) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }

    pub fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

/// `g(x) = sum_k c_k exp(2 pi i k.x)` with `c_{-k} = conj(c_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigFunction {
    m: usize,
    modes: BTreeMap<Vec<i64>, Complex>,
}

fn negated(k: &[i64]) -> Vec<i64> {
    k.iter().map(|x| -x).collect()
}

/// Grid points used by [`TrigFunction::range_bounds`].
const RANGE_GRID_BUDGET: usize = 1 << 20;

/// Tolerance for accepting user-supplied conjugate pairs.
const HERMITIAN_TOL: f64 = 1e-12;

impl TrigFunction {
    pub fn zero(m: usize) -> Self {
        Self { m, modes: BTreeMap::new() }
    }

    /// Builds from Fourier coefficients; missing conjugate partners are filled in.
    pub fn from_modes(m: usize, modes: impl IntoIterator<Item = (Vec<i64>, Complex)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("spatial dimension must be at least 1".into()));
        }
        let mut given: BTreeMap<Vec<i64>, Complex> = BTreeMap::new();
        for (k, c) in modes {
            if k.len() != m {
                return Err(Error::InvalidParameter(alloc::format!("mode {k:?} does not have length {m}")));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidParameter("coefficients must be finite".into()));
            }
            if given.insert(k.clone(), c).is_some() {
                return Err(Error::InvalidParameter(alloc::format!("mode {k:?} given twice")));
            }
        }
        let mut modes = BTreeMap::new();
        for (k, &c) in &given {
            let nk = negated(k);
            if nk == *k {
                if c.im.abs() > HERMITIAN_TOL * (1.0 + c.re.abs()) {
                    return Err(Error::InvalidParameter("the mean must be real".into()));
                }
                modes.insert(k.clone(), Complex::new(c.re, 0.0));
                continue;
            }
            match given.get(&nk) {
                Some(&partner) => {
                    if (partner - c.conj()).abs() > HERMITIAN_TOL * (1.0 + c.abs()) {
                        return Err(Error::InvalidParameter(alloc::format!(
                            "modes {k:?} and {nk:?} are not complex conjugates"
                        )));
                    }
                    modes.insert(k.clone(), c);
                }
                None => {
                    modes.insert(k.clone(), c);
                    modes.insert(nk, c.conj());
                }
            }
        }
        modes.retain(|_, c| *c != Complex::ZERO);
        Ok(Self { m, modes })
    }

    pub fn constant(m: usize, value: f64) -> Self {
        let mut modes = BTreeMap::new();
        if value != 0.0 {
            modes.insert(alloc::vec![0; m], Complex::new(value, 0.0));
        }
        Self { m, modes }
    }

    /// `amp * cos(2 pi k.x)`.
    pub fn cosine(k: &[i64], amp: f64) -> Result<Self> {
        Self::from_modes(k.len(), [(k.to_vec(), Complex::new(0.5 * amp, 0.0))])
    }

    /// `amp * sin(2 pi k.x)`.
    pub fn sine(k: &[i64], amp: f64) -> Result<Self> {
        Self::from_modes(k.len(), [(k.to_vec(), Complex::new(0.0, -0.5 * amp))])
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn coefficient(&self, k: &[i64]) -> Complex {
        self.modes.get(k).copied().unwrap_or_default()
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Vec<i64>, Complex)> {
        self.modes.iter().map(|(k, &c)| (k, c))
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let mut modes = self.modes.clone();
        for (k, &c) in &other.modes {
            let e = modes.entry(k.clone()).or_insert(Complex::ZERO);
            *e = *e + c.scale(s);
        }
        modes.retain(|_, c| *c != Complex::ZERO);
        Self { m: self.m, modes }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::zero(self.m).axpy(s, self)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, c) in &self.modes {
            let th = 2.0 * PI * k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum::<f64>();
            acc += c.re * math::cos(th) - c.im * math::sin(th);
        }
        acc
    }

    /// Gradient at `x`.
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = alloc::vec![0.0; self.m];
        for (k, c) in &self.modes {
            let th = 2.0 * PI * k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum::<f64>();
            // d/dx_i of c e^{i th} is 2 pi i k_i c e^{i th}
            let re_part = -(c.re * math::sin(th) + c.im * math::cos(th));
            for (gi, &ki) in g.iter_mut().zip(k) {
                *gi += 2.0 * PI * ki as f64 * re_part;
            }
        }
        g
    }

    /// The mean `c_0`.
    pub fn mean(&self) -> f64 {
        self.coefficient(&alloc::vec![0; self.m]).re
    }

    /// `sum |c_k|`, an upper bound on `sup |g|`.
    pub fn sup_bound(&self) -> f64 {
        math::neumaier_sum(self.modes.values().map(|c| c.abs()))
    }

    /// `max_i sum 2 pi |k_i| |c_k|`, an upper bound on `max_i sup |d_i g|`.
    pub fn grad_sup_bound(&self) -> f64 {
        (0..self.m)
            .map(|i| {
                math::neumaier_sum(self.modes.iter().map(|(k, c)| 2.0 * PI * k[i].unsigned_abs() as f64 * c.abs()))
            })
            .fold(0.0, f64::max)
    }

    /// `||g||_{L2}`.
    pub fn l2_norm(&self) -> f64 {
        math::sqrt(math::neumaier_sum(self.modes.values().map(|c| c.norm_sqr())))
    }

    /// Dual norm `sqrt(sum_{k != 0} |c_k|^2 / ((2 pi)^2 |k|_2^2))` against the `V` norm.
    pub fn dual_v_norm(&self) -> f64 {
        let terms = self.modes.iter().filter(|(k, _)| k.iter().any(|&x| x != 0)).map(|(k, c)| {
            let k2: f64 = k.iter().map(|&x| (x * x) as f64).sum();
            c.norm_sqr() / (4.0 * PI * PI * k2)
        });
        math::sqrt(math::neumaier_sum(terms))
    }

    /// `max |k|_inf` over the modes.
    pub fn max_frequency(&self) -> u64 {
        self.modes.keys().flat_map(|k| k.iter().map(|x| x.unsigned_abs())).max().unwrap_or(0)
    }

    /// Certified enclosure `[lo, hi]` of the range of `g` from a uniform grid.
    ///
    /// Extrema on the torus are critical points, so the grid misses them by at
    /// most `m h^2 / 8` times a bound on the Hessian.
    pub fn range_bounds(&self) -> (f64, f64) {
        let want = (64 * self.max_frequency() as usize).max(256);
        let budget = libm::floor(libm::pow(RANGE_GRID_BUDGET as f64, 1.0 / self.m as f64)) as usize;
        let per_dim = want.min(budget).max(2);
        let h = 1.0 / per_dim as f64;
        let lip: f64 = (0..self.m)
            .map(|i| {
                math::neumaier_sum(self.modes.iter().map(|(k, c)| 2.0 * PI * k[i].unsigned_abs() as f64 * c.abs()))
            })
            .sum();
        let hess = math::neumaier_sum(self.modes.iter().map(|(k, c)| {
            let k2: f64 = k.iter().map(|&x| (x * x) as f64).sum();
            4.0 * PI * PI * k2 * c.abs()
        }));
        let m = self.m as f64;
        let varying = self.sup_bound() - self.mean().abs();
        let margin = (0.5 * math::sqrt(m) * h * lip).min(m * h * h * hess / 8.0) + 1e-14 * varying;
        let total = per_dim.pow(self.m as u32);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut x = alloc::vec![0.0; self.m];
        for idx in 0..total {
            let mut rest = idx;
            for xi in x.iter_mut() {
                *xi = (rest % per_dim) as f64 * h;
                rest /= per_dim;
            }
            let v = self.eval(&x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo - margin, hi + margin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn hermitian_completion() {
        let g = TrigFunction::cosine(&[2], 3.0).unwrap();
        assert_eq!(g.coefficient(&[-2]), Complex::new(1.5, 0.0));
        assert!((g.eval(&[0.125]) - 3.0 * math::cos(PI / 2.0)).abs() < 1e-14);
        let s = TrigFunction::sine(&[1], 2.0).unwrap();
        assert!((s.eval(&[0.25]) - 2.0).abs() < 1e-14);
        assert!((s.grad(&[0.0])[0] - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let bad = TrigFunction::from_modes(1, [(vec![1], Complex::new(1.0, 0.0)), (vec![-1], Complex::new(0.5, 0.0))]);
        assert!(bad.is_err());
        assert!(TrigFunction::from_modes(1, [(vec![0], Complex::new(1.0, 1.0))]).is_err());
    }

    #[test]
    fn range_of_shifted_cosine() {
        let a = TrigFunction::constant(1, 1.0).axpy(1.0, &TrigFunction::cosine(&[1], 0.4).unwrap());
        let (lo, hi) = a.range_bounds();
        assert!(lo <= 0.6 && lo > 0.55, "{lo}");
        assert!((1.4..1.45).contains(&hi), "{hi}");
        assert!((a.mean() - 1.0).abs() < 1e-15);
    }
}
