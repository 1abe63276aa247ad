//! Convergence studies against a precomputed reference.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hypercross::{materialize, upper_constant, CrossParams};
use crate::math;
use crate::multiindex::MultiIndex;
use crate::sequences::WeightSequence;

use super::galerkin::{assemble, solve};
use super::linalg::SolveOptions;
use super::problem::{DecaySequences, ProblemSpec};
use super::reference::{error_v, spatial_keys, Reference};

/// Relative change in the reference norm accepted when doubling the node count.
pub const CALIBRATION_TOL: f64 = 1e-8;

/// Doubles `n` from `start` until `norm_at(n)` changes by less than `tol` relative.
/// Returns the smaller node count of the converged pair.
pub fn calibrate_nodes(
    start: usize,
    max: usize,
    tol: f64,
    mut norm_at: impl FnMut(usize) -> Result<f64>,
) -> Result<usize> {
    let mut n = start.max(1);
    let mut prev = norm_at(n)?;
    while 2 * n <= max {
        let next = norm_at(2 * n)?;
        if (next - prev).abs() <= tol * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(n);
        }
        n *= 2;
        prev = next;
    }
    Err(Error::QuadratureTooCoarse(alloc::format!("reference norm still moving at {n} nodes per axis")))
}

/// One row of a study table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyRow {
    pub t: f64,
    pub n: u64,
    pub error: f64,
    pub bound: f64,
    /// Log-log slope of error against `n` over the rows so far.
    pub slope_so_far: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    /// Constant in front of `n^(-1/m)`.
    pub constant: f64,
    pub slope: f64,
    /// Every error is at most its bound.
    pub bounds_hold: bool,
}

fn push_row(rows: &mut Vec<StudyRow>, t: f64, n: u64, error: f64, bound: f64) {
    let mut xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let mut ys: Vec<f64> = rows.iter().map(|r| r.error).collect();
    xs.push(n as f64);
    ys.push(error);
    let slope_so_far = math::log_log_slope(&xs, &ys);
    rows.push(StudyRow { t, n, error, bound, slope_so_far });
}

fn finish(rows: Vec<StudyRow>, constant: f64) -> StudyReport {
    let slope = rows.last().map_or(f64::NAN, |r| r.slope_so_far);
    let bounds_hold = rows.iter().all(|r| r.error <= r.bound);
    StudyReport { rows, constant, slope, bounds_hold }
}

/// Fourier Galerkin on `{k in Z^m_* : |k|_inf <= T}` for a problem without parameters.
pub fn spatial_study(
    spec: &ProblemSpec,
    ts: &[f64],
    reference: &Reference,
    opts: &SolveOptions,
) -> Result<StudyReport> {
    if spec.parametric_dimension() != 0 {
        return Err(Error::InvalidParameter("the spatial study takes a problem without parameters".into()));
    }
    let c = spec.spatial_constant();
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        if !(t >= 1.0) {
            return Err(Error::InvalidParameter("T must be at least 1".into()));
        }
        let r = math::floor(t) as u64;
        let index: Vec<_> = spatial_keys(spec.m, r).into_iter().map(|k| (k, MultiIndex::zero())).collect();
        let n = index.len() as u64;
        let (u, _) = solve(&assemble(spec, &index)?, opts)?;
        let error = error_v(&u, reference)?;
        push_row(&mut rows, t, n, error, c * math::powf(n as f64, -1.0 / spec.m as f64));
    }
    Ok(finish(rows, c))
}

/// Data of the parametric error bound `B n^(-1/m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricBound {
    pub decay: DecaySequences,
    /// `b_j = c_j d_j`.
    pub b: WeightSequence,
    /// `C` of the cardinality bound with `a = 1`, upper end.
    pub cardinality_constant: f64,
    /// `||c^(-1)||_{l2(F)} = prod_j (1 - c_j^(-2))^(-1/2)`.
    pub c_inverse_norm: f64,
    /// `4 pi C^(1/m) sqrt(m R / r) K ||c^(-1)||`.
    pub big_b: f64,
}

/// Builds `b = c d` from the `W` decay constants and evaluates `B`.
pub fn parametric_bound(spec: &ProblemSpec, c: &[f64]) -> Result<ParametricBound> {
    let decay = DecaySequences::w_version(spec);
    if c.len() != decay.d.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "need one c_j per parameter: got {}, expected {}",
            c.len(),
            decay.d.len()
        )));
    }
    if c.iter().any(|&cj| !(cj > 1.0 && cj.is_finite())) {
        return Err(Error::InvalidParameter("every c_j must exceed 1".into()));
    }
    let b = WeightSequence::finite(decay.d.iter().zip(c).map(|(d, c)| d * c).collect())?;
    let m = spec.m as u32;
    if m == 1 && !(b.ell1_norm().hi < 1.0) {
        return Err(Error::HypothesisViolated(alloc::format!("need ||b||_1 < 1 for m = 1, got {}", b.ell1_norm().hi)));
    }
    let cardinality_constant = upper_constant(1.0, m, &b, 1e-10)?.hi;
    let c_inverse_norm = math::sqrt(c.iter().map(|&cj| 1.0 / (1.0 - 1.0 / (cj * cj))).product::<f64>());
    let big_b = 4.0
        * PI
        * math::powf(cardinality_constant, 1.0 / m as f64)
        * math::sqrt(m as f64 * spec.big_r / spec.r)
        * decay.k
        * c_inverse_norm;
    Ok(ParametricBound { decay, b, cardinality_constant, c_inverse_norm, big_b })
}

/// `c_j = 1 + j^(-1.1)`.
pub fn default_c(j: usize) -> Vec<f64> {
    (1..=j).map(|i| 1.0 + math::powf(i as f64, -1.1)).collect()
}

/// Largest index set the parametric study will materialize.
pub const STUDY_CAP: u64 = 2_000_000;

/// Galerkin on `E_{1,b}(T)` for each `T`, measured against `reference`.
pub fn convergence_study(
    spec: &ProblemSpec,
    bound: &ParametricBound,
    ts: &[f64],
    reference: &Reference,
    opts: &SolveOptions,
) -> Result<StudyReport> {
    let m = spec.m as u32;
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let params = CrossParams::new(1.0, m, t, bound.b.clone());
        let set = materialize(&params, STUDY_CAP)?;
        let n = set.len() as u64;
        let (u, _) = solve(&assemble(spec, &set.pairs)?, opts)?;
        let error = error_v(&u, reference)?;
        push_row(&mut rows, t, n, error, bound.big_b * math::powf(n as f64, -1.0 / m as f64));
    }
    Ok(finish(rows, bound.big_b))
}

/// Largest Legendre degree in `E_{1,b}(T)` per axis.
pub fn max_degree_in_cross(spec: &ProblemSpec, b: &WeightSequence, t: f64) -> Result<u32> {
    let params = CrossParams::new(1.0, spec.m as u32, t, b.clone());
    let sk = crate::hypercross::skeleton(&params)?;
    Ok(sk.entries.iter().flat_map(|e| e.s.entries().iter().map(|x| x.1)).max().unwrap_or(0))
}
