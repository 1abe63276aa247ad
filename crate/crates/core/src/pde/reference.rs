//! Reference solutions by collocation in `y` and the error functionals built on them.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hypercross::cube;
use crate::math;
use crate::multiindex::MultiIndex;
use crate::tensorfield::CoefficientField;

use super::galerkin::{assemble, solve_vector};
use super::legendre::{gauss_legendre, legendre_values};
use super::linalg::SolveOptions;
use super::problem::{DecaySequences, ProblemSpec};

/// Quadrature nodes in `[-1, 1]^J` with weights summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct YDesign {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Gauss nodes per axis for tensor designs, `None` otherwise.
    pub nodes_per_dim: Option<usize>,
}

impl YDesign {
    /// Tensor Gauss-Legendre rule with `n` nodes per axis; the first axis varies fastest.
    pub fn tensor_gauss(j: usize, n: usize) -> Self {
        let (yn, yw) = gauss_legendre(n.max(1));
        let total = n.pow(j as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rest = idx;
            let mut p = Vec::with_capacity(j);
            let mut w = 1.0;
            for _ in 0..j {
                p.push(yn[rest % n]);
                w *= yw[rest % n];
                rest /= n;
            }
            points.push(p);
            weights.push(w);
        }
        Self { points, weights, nodes_per_dim: Some(n) }
    }

    /// Equal-weight design from given points.
    pub fn from_points(points: Vec<Vec<f64>>) -> Self {
        let w = 1.0 / points.len() as f64;
        let weights = alloc::vec![w; points.len()];
        Self { points, weights, nodes_per_dim: None }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Spatial keys `k in Z^m_*` with `|k|_inf <= modes`.
pub fn spatial_keys(m: usize, modes: u64) -> Vec<Vec<i64>> {
    cube(m as u32, modes)
}

/// Solves the deterministic problem at `y` on the given spatial keys.
pub fn solve_at(spec: &ProblemSpec, y: &[f64], keys: &[Vec<i64>], opts: &SolveOptions) -> Result<Vec<f64>> {
    let det = spec.at(y);
    let index: Vec<_> = keys.iter().map(|k| (k.clone(), MultiIndex::zero())).collect();
    let sys = assemble(&det, &index)?;
    Ok(solve_vector(&sys, opts)?.0)
}

/// Per-node spatial solutions on a shared key set.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub keys: Vec<Vec<i64>>,
    pub design: YDesign,
    pub solutions: Vec<Vec<f64>>,
}

/// `(2 pi)^2 |k|_2^2`.
pub fn v_weight(k: &[i64]) -> f64 {
    4.0 * PI * PI * k.iter().map(|&x| (x * x) as f64).sum::<f64>()
}

impl Reference {
    /// Assembles a reference from solutions computed elsewhere, in design order.
    pub fn from_solutions(keys: Vec<Vec<i64>>, design: YDesign, solutions: Vec<Vec<f64>>) -> Self {
        Self { keys, design, solutions }
    }

    /// `sqrt(sum_nodes w ||u(y)||_V^2)`.
    pub fn norm_v(&self) -> f64 {
        let weights: Vec<f64> = self.keys.iter().map(|k| v_weight(k)).collect();
        let per_node = self
            .design
            .weights
            .iter()
            .zip(&self.solutions)
            .map(|(w, u)| w * math::neumaier_sum(u.iter().zip(&weights).map(|(c, q)| q * c * c)));
        math::sqrt(math::neumaier_sum(per_node))
    }
}

/// Sequential reference over every node of `design`.
pub fn reference_solution(spec: &ProblemSpec, design: YDesign, modes: u64, opts: &SolveOptions) -> Result<Reference> {
    let keys = spatial_keys(spec.m, modes);
    let mut solutions = Vec::with_capacity(design.len());
    for y in &design.points {
        solutions.push(solve_at(spec, y, &keys, opts)?);
    }
    Ok(Reference { keys, design, solutions })
}

/// Largest Legendre degree used by any `s` in the field, per dimension.
fn max_degree(u: &CoefficientField) -> u32 {
    u.iter().flat_map(|(idx, _)| idx.s.entries().iter().map(|e| e.1)).max().unwrap_or(0)
}

/// `L_s(y)` for every `s` in `list`, from per-axis tables.
fn legendre_products(list: &[&MultiIndex], y: &[f64], deg: u32) -> Result<Vec<f64>> {
    let tables: Vec<Vec<f64>> = y.iter().map(|&yj| legendre_values(deg, yj)).collect();
    list.iter()
        .map(|s| {
            let mut v = 1.0;
            for &(d, e) in s.entries() {
                let t = tables.get(d as usize - 1).ok_or_else(|| {
                    Error::InvalidParameter(alloc::format!("multi-index {s} uses a dimension beyond the design"))
                })?;
                v *= t[e as usize];
            }
            Ok(v)
        })
        .collect()
}

/// Refuses designs that cannot integrate the polynomial part exactly.
fn check_capacity(design: &YDesign, deg: u32) -> Result<()> {
    if let Some(n) = design.nodes_per_dim {
        if deg as usize + 1 > n {
            return Err(Error::QuadratureTooCoarse(alloc::format!(
                "degree {deg} needs more than {n} Gauss nodes per axis"
            )));
        }
    }
    Ok(())
}

/// `sqrt(sum_nodes w ||u(y) - u_G(y)||_V^2)` with `u_G(y) = sum v_(k,s) phi_k L_s(y)`.
pub fn error_v(u_g: &CoefficientField, reference: &Reference) -> Result<f64> {
    let deg = max_degree(u_g);
    check_capacity(&reference.design, deg)?;
    let pos: BTreeMap<&[i64], usize> = reference.keys.iter().enumerate().map(|(i, k)| (k.as_slice(), i)).collect();
    let entries: Vec<_> = u_g.iter().collect();
    let mut distinct: Vec<&MultiIndex> = entries.iter().map(|(idx, _)| &idx.s).collect();
    distinct.sort();
    distinct.dedup();
    let s_pos: BTreeMap<&MultiIndex, usize> = distinct.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut out_keys: Vec<&[i64]> =
        entries.iter().map(|(idx, _)| idx.k.as_slice()).filter(|k| !pos.contains_key(k)).collect();
    out_keys.sort();
    out_keys.dedup();
    let outside: BTreeMap<&[i64], usize> = out_keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let inside_w: Vec<f64> = reference.keys.iter().map(|k| v_weight(k)).collect();
    let outside_w: Vec<f64> = out_keys.iter().map(|k| v_weight(k)).collect();
    let mut per_node = Vec::with_capacity(reference.design.len());
    for ((y, w), u) in reference.design.points.iter().zip(&reference.design.weights).zip(&reference.solutions) {
        let ls = legendre_products(&distinct, y, deg)?;
        let mut diff = u.clone();
        let mut extra = alloc::vec![0.0; out_keys.len()];
        for (idx, v) in &entries {
            let val = v * ls[s_pos[&idx.s]];
            match pos.get(idx.k.as_slice()) {
                Some(&i) => diff[i] -= val,
                None => extra[outside[idx.k.as_slice()]] += val,
            }
        }
        let inside = math::neumaier_sum(diff.iter().zip(&inside_w).map(|(d, q)| q * d * d));
        let out = math::neumaier_sum(extra.iter().zip(&outside_w).map(|(d, q)| q * d * d));
        per_node.push(w * (inside + out));
    }
    Ok(math::sqrt(math::neumaier_sum(per_node)))
}

/// Legendre coefficients `u_(k,s) = sum_nodes w u_k(y) L_s(y)` for the given pairs.
pub fn project_reference(reference: &Reference, index: &[(Vec<i64>, MultiIndex)]) -> Result<CoefficientField> {
    let m = reference.keys.first().map_or(0, |k| k.len());
    let deg = index.iter().flat_map(|(_, s)| s.entries().iter().map(|e| e.1)).max().unwrap_or(0);
    check_capacity(&reference.design, deg)?;
    let pos: BTreeMap<&[i64], usize> = reference.keys.iter().enumerate().map(|(i, k)| (k.as_slice(), i)).collect();
    let mut distinct: Vec<&MultiIndex> = index.iter().map(|(_, s)| s).collect();
    distinct.sort();
    distinct.dedup();
    let s_pos: BTreeMap<&MultiIndex, usize> = distinct.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut acc = alloc::vec![0.0; index.len()];
    for ((y, w), u) in reference.design.points.iter().zip(&reference.design.weights).zip(&reference.solutions) {
        let ls = legendre_products(&distinct, y, deg)?;
        for (a, (k, s)) in acc.iter_mut().zip(index) {
            if let Some(&i) = pos.get(k.as_slice()) {
                *a += w * u[i] * ls[s_pos[s]];
            }
        }
    }
    let mut field = CoefficientField::new(m);
    for ((k, s), v) in index.iter().zip(acc) {
        field.insert(k.clone(), s.clone(), v)?;
    }
    Ok(field)
}

/// One row of the coefficient-decay check.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub s: MultiIndex,
    /// Quadrature estimate of `||u_s||_V`.
    pub norm: f64,
    /// `K (|s|!/s!) d^s`.
    pub bound: f64,
    pub ratio: f64,
}

/// Compares `||u_s||_V` with `K (|s|!/s!) d^s` for each `s`.
pub fn coefficient_decay_check(
    reference: &Reference,
    decay: &DecaySequences,
    s_list: &[MultiIndex],
) -> Result<Vec<DecayRow>> {
    let index: Vec<_> =
        s_list.iter().flat_map(|s| reference.keys.iter().map(move |k| (k.clone(), s.clone()))).collect();
    let proj = project_reference(reference, &index)?;
    let mut rows = Vec::with_capacity(s_list.len());
    for s in s_list {
        let terms = reference.keys.iter().map(|k| {
            let v = proj.get(k, s);
            v_weight(k) * v * v
        });
        let norm = math::sqrt(math::neumaier_sum(terms));
        let mut ln_bound = math::ln(decay.k) + s.log_multinomial();
        for &(d, e) in s.entries() {
            let dj = decay.d.get(d as usize - 1).copied().unwrap_or(0.0);
            ln_bound += e as f64 * math::ln(dj);
        }
        let bound = math::exp(ln_bound);
        rows.push(DecayRow { s: s.clone(), norm, bound, ratio: norm / bound });
    }
    Ok(rows)
}

/// Both sides of `||u - u_G|| <= sqrt(R/r) ||u - P u||`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CeaReport {
    pub galerkin_error: f64,
    pub best_error: f64,
    pub factor: f64,
    pub ok: bool,
}

/// Checks the quasi-optimality of `u_g` against the projection of the reference onto its index set.
pub fn cea_check(spec: &ProblemSpec, u_g: &CoefficientField, reference: &Reference) -> Result<CeaReport> {
    let index: Vec<_> = u_g.iter().map(|(idx, _)| (idx.k.clone(), idx.s.clone())).collect();
    let best = project_reference(reference, &index)?;
    let galerkin_error = error_v(u_g, reference)?;
    let best_error = error_v(&best, reference)?;
    let factor = math::sqrt(spec.big_r / spec.r);
    Ok(CeaReport {
        galerkin_error,
        best_error,
        factor,
        ok: galerkin_error <= factor * best_error * (1.0 + 1e-8) + 1e-14,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::trig::TrigFunction;
    use alloc::vec;

    fn spec(psi_amp: f64) -> ProblemSpec {
        let abar = TrigFunction::constant(1, 1.0).axpy(1.0, &TrigFunction::cosine(&[1], 0.2).unwrap());
        let psi = vec![TrigFunction::cosine(&[1], psi_amp).unwrap()];
        let f = TrigFunction::cosine(&[1], 1.0).unwrap().axpy(1.0, &TrigFunction::sine(&[2], 1.0).unwrap());
        ProblemSpec::new(abar, psi, f, 0.5, 1.5).unwrap()
    }

    #[test]
    fn tensor_design_weights() {
        let d = YDesign::tensor_gauss(2, 3);
        assert_eq!(d.len(), 9);
        assert!((d.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_field_error_is_reference_norm() {
        let sp = spec(0.1);
        let opts = SolveOptions { tol: 1e-12, ..SolveOptions::default() };
        let r = reference_solution(&sp, YDesign::tensor_gauss(1, 6), 16, &opts).unwrap();
        let e = error_v(&CoefficientField::new(1), &r).unwrap();
        assert!((e - r.norm_v()).abs() < 1e-14);
    }

    #[test]
    fn first_order_perturbation() {
        let opts = SolveOptions { tol: 1e-13, ..SolveOptions::default() };
        let keys = spatial_keys(1, 24);
        let base = spec(0.0);
        let u0 = solve_at(&base, &[0.0], &keys, &opts).unwrap();
        let eps = 1e-4;
        let sp = spec(eps);
        let up = solve_at(&sp, &[1.0], &keys, &opts).unwrap();
        let um = solve_at(&sp, &[-1.0], &keys, &opts).unwrap();
        let sp2 = spec(2.0 * eps);
        let up2 = solve_at(&sp2, &[1.0], &keys, &opts).unwrap();
        let d1: f64 = up.iter().zip(&u0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let d2: f64 = up2.iter().zip(&u0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!((d2 / d1 - 2.0).abs() < 1e-3);
        let sym: f64 = up.iter().zip(&um).zip(&u0).map(|((a, b), c)| (a + b - 2.0 * c).abs()).fold(0.0, f64::max);
        assert!(sym < 1e-2 * d1);
    }

    #[test]
    fn galerkin_is_quasi_optimal() {
        let sp = spec(0.2);
        let opts = SolveOptions { tol: 1e-12, ..SolveOptions::default() };
        let r = reference_solution(&sp, YDesign::tensor_gauss(1, 12), 24, &opts).unwrap();
        let mut index = Vec::new();
        for s in 0..3u32 {
            for k in -4i64..=4 {
                if k != 0 {
                    index.push((vec![k], MultiIndex::from_dense(&[s])));
                }
            }
        }
        let sys = assemble(&sp, &index).unwrap();
        let (x, _) = solve_vector(&sys, &opts).unwrap();
        let mut u = CoefficientField::new(1);
        for ((k, s), v) in index.iter().zip(x) {
            u.insert(k.clone(), s.clone(), v).unwrap();
        }
        let cea = cea_check(&sp, &u, &r).unwrap();
        assert!(cea.ok, "{cea:?}");
        assert!(cea.galerkin_error >= cea.best_error * (1.0 - 1e-9));
    }
}
