//! Sparse coefficient fields `v = sum v_{k,s} e_k(x) L_s(y)` and their weighted norms.
//!
//! Entries live in a `BTreeMap`, so every reduction runs in the same key
//! order and norms are reproducible bit for bit.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hypercross::MEMBERSHIP_SLACK;
use crate::math::{self, neumaier_sum};
use crate::multiindex::MultiIndex;
use crate::sequences::WeightSequence;

/// Key of a coefficient: spatial frequency `k` (no zero entries) and multi-index `s`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldIndex {
    pub k: Vec<i64>,
    pub s: MultiIndex,
}

impl FieldIndex {
    /// `|k|_inf`.
    pub fn k_sup(&self) -> u64 {
        self.k.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    /// `ln rho_{alpha,b}(k, s) = alpha ln|k|_inf - ln w(s)`, `+inf` when `w(s) = 0`.
    pub fn log_rho(&self, alpha: f64, b: &WeightSequence) -> f64 {
        match self.s.log_weight(b) {
            Ok(lw) => alpha * math::ln(self.k_sup() as f64) - lw,
            Err(_) => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CoefficientField {
    m: usize,
    coeffs: BTreeMap<FieldIndex, f64>,
}

impl CoefficientField {
    pub fn new(m: usize) -> Self {
        Self { m, coeffs: BTreeMap::new() }
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    /// Stores `v_{k,s} = value`, replacing any earlier entry.
    pub fn insert(&mut self, k: Vec<i64>, s: MultiIndex, value: f64) -> Result<()> {
        if k.len() != self.m {
            return Err(Error::InvalidField(alloc::format!("k has length {}, expected {}", k.len(), self.m)));
        }
        if k.contains(&0) {
            return Err(Error::InvalidField("k must have nonzero components".into()));
        }
        if !value.is_finite() {
            return Err(Error::InvalidField("coefficients must be finite".into()));
        }
        self.coeffs.insert(FieldIndex { k, s }, value);
        Ok(())
    }

    pub fn get(&self, k: &[i64], s: &MultiIndex) -> f64 {
        self.coeffs.get(&FieldIndex { k: k.to_vec(), s: s.clone() }).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FieldIndex, f64)> {
        self.coeffs.iter().map(|(i, &v)| (i, v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `sqrt(sum v^2)`.
    pub fn norm_l2(&self) -> f64 {
        math::sqrt(neumaier_sum(self.coeffs.values().map(|v| v * v)))
    }

    /// `sqrt(sum rho_{alpha,b}^2 v^2)`; infinite when a nonzero entry has `w(s) = 0`.
    pub fn norm_a(&self, alpha: f64, b: &WeightSequence) -> f64 {
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (idx, &v) in &self.coeffs {
            if v == 0.0 {
                continue;
            }
            let lr = idx.log_rho(alpha, b);
            if lr == f64::INFINITY {
                return f64::INFINITY;
            }
            terms.push(math::exp(2.0 * lr) * v * v);
        }
        math::sqrt(neumaier_sum(terms))
    }

    /// `sqrt(sum |k|_inf^(2 beta) v^2)`.
    pub fn norm_k(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            return self.norm_l2();
        }
        let terms = self.coeffs.iter().map(|(idx, &v)| math::powf(idx.k_sup() as f64, 2.0 * beta) * v * v);
        math::sqrt(neumaier_sum(terms))
    }

    /// Keeps the entries with `rho_{alpha-beta,b}(k, s) <= T`.
    pub fn project(&self, t: f64, alpha: f64, beta: f64, b: &WeightSequence) -> Self {
        let bound = math::ln(t) + MEMBERSHIP_SLACK;
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(idx, _)| idx.log_rho(alpha - beta, b) <= bound)
            .map(|(idx, &v)| (idx.clone(), v))
            .collect();
        Self { m: self.m, coeffs }
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (idx, &v) in &other.coeffs {
            *coeffs.entry(idx.clone()).or_insert(0.0) -= v;
        }
        Self { m: self.m, coeffs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionReport {
    /// `||v - S_T v||_{K^beta}`.
    pub lhs: f64,
    /// `T^(-1) ||v||_{A^{alpha,b}}`.
    pub rhs: f64,
    pub ok: bool,
}

/// Evaluates both sides of `||v - S_T v||_{K^beta} <= T^(-1) ||v||_{A^{alpha,b}}`.
pub fn check_projection_lemma(
    v: &CoefficientField,
    t: f64,
    alpha: f64,
    beta: f64,
    b: &WeightSequence,
) -> Result<ProjectionReport> {
    if !(t >= 1.0) {
        return Err(Error::InvalidParameter("T must be at least 1".into()));
    }
    if !(alpha > beta && beta >= 0.0) {
        return Err(Error::InvalidParameter("need alpha > beta >= 0".into()));
    }
    let rest = v.sub(&v.project(t, alpha, beta, b));
    let lhs = rest.norm_k(beta);
    let rhs = v.norm_a(alpha, b) / t;
    Ok(ProjectionReport { lhs, rhs, ok: lhs <= rhs * (1.0 + 1e-10) })
}

/// Frequency of the single entry used by [`sharpness_witness`].
pub const WITNESS_FREQUENCY: i64 = 100;

/// A near-extremal case of the truncation bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessWitness {
    pub field: CoefficientField,
    pub alpha: f64,
    /// `||v - S_T v||_{K^beta} / ||v||_{A^{alpha,b}}`.
    pub ratio: f64,
}

/// One unit entry at `k = (100, 1, .., 1)`, `s = 0`, with `alpha` chosen so that
/// `rho_{alpha-beta} = (1 + slack) T`; the entry is cut and the ratio is `1 / ((1 + slack) T)`.
pub fn sharpness_witness(m: usize, t: f64, beta: f64, slack: f64, b: &WeightSequence) -> Result<SharpnessWitness> {
    if m == 0 || !(t >= 1.0) || !(beta >= 0.0) || !(slack > 0.0) {
        return Err(Error::InvalidParameter("need m >= 1, T >= 1, beta >= 0 and slack > 0".into()));
    }
    let mut k = alloc::vec![1i64; m];
    k[0] = WITNESS_FREQUENCY;
    let alpha = beta + math::ln(t * (1.0 + slack)) / math::ln(WITNESS_FREQUENCY as f64);
    let mut field = CoefficientField::new(m);
    field.insert(k, MultiIndex::zero(), 1.0)?;
    let rest = field.sub(&field.project(t, alpha, beta, b));
    let ratio = rest.norm_k(beta) / field.norm_a(alpha, b);
    Ok(SharpnessWitness { field, alpha, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn half() -> WeightSequence {
        WeightSequence::finite(vec![0.5]).unwrap()
    }

    #[test]
    fn norms_of_single_entries() {
        let mut v = CoefficientField::new(1);
        v.insert(vec![2], MultiIndex::unit(1).unwrap(), 1.0).unwrap();
        assert!((v.norm_a(1.0, &half()) - 4.0).abs() < 1e-14);
        let mut w = CoefficientField::new(1);
        w.insert(vec![-3], MultiIndex::from_dense(&[0, 4]), 1.0).unwrap();
        assert!((w.norm_k(2.0) - 9.0).abs() < 1e-12);
        assert_eq!(w.norm_a(1.0, &half()), f64::INFINITY);
        assert_eq!(CoefficientField::new(2).norm_a(1.0, &half()), 0.0);
    }

    #[test]
    fn projection_keeps_by_ratio() {
        let mut v = CoefficientField::new(1);
        v.insert(vec![4], MultiIndex::zero(), 1.0).unwrap();
        assert_eq!(v.project(4.0, 2.0, 1.0, &half()).len(), 1);
        assert!(v.project(3.9, 2.0, 1.0, &half()).is_empty());
    }

    #[test]
    fn witness_is_nearly_extremal() {
        for t in [2.0, 10.0] {
            let w = sharpness_witness(2, t, 0.5, 1e-3, &half()).unwrap();
            assert!(w.ratio * t >= 0.99 && w.ratio * t <= 1.0);
            assert!(check_projection_lemma(&w.field, t, w.alpha, 0.5, &half()).unwrap().ok);
        }
    }

    #[test]
    fn rejects_zero_frequency() {
        let mut v = CoefficientField::new(2);
        assert!(v.insert(vec![1, 0], MultiIndex::zero(), 1.0).is_err());
        assert!(v.insert(vec![1], MultiIndex::zero(), 1.0).is_err());
    }
}
