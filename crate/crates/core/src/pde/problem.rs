//! Affine parametric diffusion `-div(a(x, y) grad u) = f` on the torus.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math;

use super::trig::TrigFunction;

/// `a(x, y) = abar(x) + sum_j y_j psi_j(x)` with `r <= a <= R` for all `|y_j| <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub m: usize,
    pub abar: TrigFunction,
    pub psi: Vec<TrigFunction>,
    pub f: TrigFunction,
    pub r: f64,
    pub big_r: f64,
}

/// Certified range of the diffusion over all parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipticity {
    pub lower: f64,
    pub upper: f64,
}

impl ProblemSpec {
    /// Validates dimensions, the zero mean of `f` and the ellipticity bounds.
    pub fn new(abar: TrigFunction, psi: Vec<TrigFunction>, f: TrigFunction, r: f64, big_r: f64) -> Result<Self> {
        let m = abar.dimension();
        if f.dimension() != m || psi.iter().any(|p| p.dimension() != m) {
            return Err(Error::InvalidParameter("all functions must share the spatial dimension".into()));
        }
        if !(r > 0.0 && big_r >= r && big_r.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("need 0 < r <= R, got r = {r}, R = {big_r}")));
        }
        if f.mean().abs() > 1e-14 * (1.0 + f.sup_bound()) {
            return Err(Error::InvalidParameter("the right-hand side must have zero mean".into()));
        }
        let spec = Self { m, abar, psi, f, r, big_r };
        let e = spec.ellipticity();
        if e.lower < r {
            return Err(Error::EllipticityViolated(alloc::format!(
                "certified minimum {} of the diffusion is below r = {r}",
                e.lower
            )));
        }
        if e.upper > big_r {
            return Err(Error::EllipticityViolated(alloc::format!(
                "certified maximum {} of the diffusion exceeds R = {big_r}",
                e.upper
            )));
        }
        Ok(spec)
    }

    /// Number of parametric dimensions `J`.
    pub fn parametric_dimension(&self) -> usize {
        self.psi.len()
    }

    /// `min abar - sum sup|psi_j|` and `max abar + sum sup|psi_j|`, each widened
    /// by a Lipschitz margin.
    pub fn ellipticity(&self) -> Ellipticity {
        let (lo, hi) = self.abar.range_bounds();
        let spread: f64 = math::neumaier_sum(self.psi.iter().map(psi_sup));
        Ellipticity { lower: lo - spread, upper: hi + spread }
    }

    /// Upper bound on `|a|_{L_inf(I, W_inf)} = sup_y max_i ||d_i a(y)||_inf`.
    pub fn a_w_seminorm(&self) -> f64 {
        self.abar.grad_sup_bound() + math::neumaier_sum(self.psi.iter().map(|p| p.grad_sup_bound()))
    }

    /// The same problem at a fixed parameter `y`, with no parametric part.
    pub fn at(&self, y: &[f64]) -> Self {
        let mut a = self.abar.clone();
        for (p, &yj) in self.psi.iter().zip(y) {
            a = a.axpy(yj, p);
        }
        Self { m: self.m, abar: a, psi: Vec::new(), f: self.f.clone(), r: self.r, big_r: self.big_r }
    }

    /// `2 sqrt(pi) sqrt(m R / r) (1/r) (1 + |a|_W / r) ||f||_{L2}`.
    pub fn spatial_constant(&self) -> f64 {
        let r = self.r;
        2.0 * math::sqrt(PI) * math::sqrt(self.m as f64 * self.big_r / r) / r
            * (1.0 + self.a_w_seminorm() / r)
            * self.f.l2_norm()
    }
}

/// Upper bound on `sup|psi|`: the smaller of the coefficient sum and the sampled range.
fn psi_sup(p: &TrigFunction) -> f64 {
    let (lo, hi) = p.range_bounds();
    p.sup_bound().min(lo.abs().max(hi.abs()))
}

/// Constants of `||u_s|| <= K (|s|!/s!) d^s`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecaySequences {
    pub k: f64,
    pub d: Vec<f64>,
}

impl DecaySequences {
    /// `K = ||f||_{V'} / r`, `d_j = ||psi_j||_inf / (r ln 2)`.
    pub fn v_version(spec: &ProblemSpec) -> Self {
        let r = spec.r;
        let d = spec.psi.iter().map(|p| psi_sup(p) / (r * core::f64::consts::LN_2)).collect();
        Self { k: spec.f.dual_v_norm() / r, d }
    }

    /// The `W` bound with every norm computed from the problem data.
    pub fn w_version(spec: &ProblemSpec) -> Self {
        let sup: Vec<f64> = spec.psi.iter().map(psi_sup).collect();
        let semi: Vec<f64> = spec.psi.iter().map(|p| p.grad_sup_bound()).collect();
        Self::from_w_norms(spec.r, spec.a_w_seminorm(), spec.f.l2_norm(), &sup, &semi)
    }

    /// `K = (1/r)(1 + (1 + |a|_W / r)) ||f||_{L2}` and
    /// `d_j = ((|a|_W / r + 2) ||psi_j||_inf + |psi_j|_W) / (r sqrt 3)`.
    pub fn from_w_norms(r: f64, a_w: f64, f_l2: f64, psi_sup: &[f64], psi_w: &[f64]) -> Self {
        let k = (1.0 + (1.0 + a_w / r)) * f_l2 / r;
        let d = psi_sup.iter().zip(psi_w).map(|(&s, &w)| ((a_w / r + 2.0) * s + w) / (r * math::sqrt(3.0))).collect();
        Self { k, d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn shifted(amp: f64) -> TrigFunction {
        TrigFunction::constant(1, 1.0).axpy(1.0, &TrigFunction::cosine(&[1], amp).unwrap())
    }

    #[test]
    fn ellipticity_is_certified() {
        let f = TrigFunction::cosine(&[1], 1.0).unwrap();
        let psi = vec![TrigFunction::cosine(&[2], 0.1).unwrap()];
        assert!(ProblemSpec::new(shifted(0.4), psi.clone(), f.clone(), 0.45, 1.55).is_ok());
        let err = ProblemSpec::new(shifted(0.4), psi, f, 0.55, 1.55).unwrap_err();
        assert!(matches!(err, Error::EllipticityViolated(_)));
    }

    #[test]
    fn rejects_nonzero_mean() {
        let f = TrigFunction::constant(1, 1.0);
        assert!(ProblemSpec::new(shifted(0.0), vec![], f, 1.0, 1.0).is_err());
    }

    #[test]
    fn w_constants_from_hand_norms() {
        let d = DecaySequences::from_w_norms(0.5, 1.0, 2.0, &[0.1, 0.2], &[0.3, 0.0]);
        assert!((d.k - 16.0).abs() < 1e-14);
        let want0 = (4.0 * 0.1 + 0.3) / (0.5 * math::sqrt(3.0));
        let want1 = (4.0 * 0.2) / (0.5 * math::sqrt(3.0));
        assert!((d.d[0] - want0).abs() < 1e-15);
        assert!((d.d[1] - want1).abs() < 1e-15);
    }

    #[test]
    fn spatial_constant_value() {
        let f = TrigFunction::cosine(&[1], 1.0).unwrap();
        let spec = ProblemSpec::new(shifted(0.4), vec![], f, 0.5, 1.5).unwrap();
        let aw = 2.0 * PI * 0.4;
        let want = 2.0 * math::sqrt(PI) * math::sqrt(3.0) / 0.5 * (1.0 + aw / 0.5) * math::sqrt(0.5);
        assert!((spec.spatial_constant() - want).abs() < 1e-12 * want);
    }
}
