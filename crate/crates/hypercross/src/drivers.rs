//! Parallel reference solves and the study pipelines.
//!
//! Work is split across rayon workers but every result is collected in input
//! order and reduced sequentially, so outputs do not depend on the thread count.

use anyhow::{Context, Result};
use hypercross_core::multiindex::MultiIndex;
use hypercross_core::pde::reference::{coefficient_decay_check, solve_at, spatial_keys, DecayRow, Reference, YDesign};
use hypercross_core::pde::study::{
    calibrate_nodes, convergence_study, max_degree_in_cross, parametric_bound, spatial_study, ParametricBound,
    StudyReport, CALIBRATION_TOL,
};
use hypercross_core::pde::{DecaySequences, Preconditioner, ProblemSpec, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Environment variable consulted when no thread count is given.
pub const THREADS_ENV: &str = "HYPERCROSS_THREADS";

/// Seed of the Monte Carlo design.
pub const MONTE_CARLO_SEED: u64 = 0xC0FFEE;

/// Largest `J` handled with a tensor Gauss design.
pub const MAX_TENSOR_DIM: usize = 4;

/// Largest Gauss node count per axis tried during calibration.
pub const MAX_NODES_PER_DIM: usize = 64;

/// Samples used by the Monte Carlo design.
pub const MONTE_CARLO_SAMPLES: usize = 4096;

/// Resolves `--threads`, falling back to the environment.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("{THREADS_ENV}={v:?} is not a count"))?)),
        Err(_) => Ok(None),
    }
}

/// Runs `f` on a pool with `threads` workers, or the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Solver settings used by the studies.
pub fn study_options() -> SolveOptions {
    SolveOptions { tol: 1e-12, max_iter: None, preconditioner: Preconditioner::Jacobi }
}

/// `count` uniform points in `[-1, 1]^j` from a seeded ChaCha stream.
pub fn monte_carlo_design(j: usize, count: usize, seed: u64) -> YDesign {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count).map(|_| (0..j).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    YDesign::from_points(points)
}

fn solve_nodes(
    spec: &ProblemSpec,
    design: YDesign,
    modes: u64,
    opts: &SolveOptions,
) -> hypercross_core::Result<Reference> {
    let keys = spatial_keys(spec.m, modes);
    let solutions = design.points.par_iter().map(|y| solve_at(spec, y, &keys, opts)).collect::<Result<Vec<_>, _>>()?;
    Ok(Reference::from_solutions(keys, design, solutions))
}

/// Reference solutions on every node, solved in parallel.
pub fn reference_solution(spec: &ProblemSpec, design: YDesign, modes: u64, opts: &SolveOptions) -> Result<Reference> {
    Ok(solve_nodes(spec, design, modes, opts)?)
}

/// Reference on a tensor Gauss design with at least `min_nodes` per axis, doubled
/// until the norm changes by less than the calibration tolerance; Monte Carlo for `J > 4`.
pub fn calibrated_reference(
    spec: &ProblemSpec,
    modes: u64,
    min_nodes: usize,
    opts: &SolveOptions,
) -> Result<Reference> {
    let j = spec.parametric_dimension();
    if j == 0 {
        return reference_solution(spec, YDesign::tensor_gauss(0, 1), modes, opts);
    }
    if j > MAX_TENSOR_DIM {
        return reference_solution(spec, monte_carlo_design(j, MONTE_CARLO_SAMPLES, MONTE_CARLO_SEED), modes, opts);
    }
    let mut latest: Option<(usize, Reference)> = None;
    let n = calibrate_nodes(min_nodes.max(2), MAX_NODES_PER_DIM, CALIBRATION_TOL, |n| {
        let r = solve_nodes(spec, YDesign::tensor_gauss(j, n), modes, opts)?;
        let norm = r.norm_v();
        latest = Some((n, r));
        Ok(norm)
    })?;
    let (finer, r) = latest.context("calibration produced no reference")?;
    debug_assert_eq!(finer, 2 * n);
    Ok(r)
}

/// Spatial study against a single fine reference.
pub fn run_spatial_study(spec: &ProblemSpec, ts: &[f64], modes: u64, opts: &SolveOptions) -> Result<StudyReport> {
    let reference = reference_solution(spec, YDesign::tensor_gauss(0, 1), modes, opts)?;
    Ok(spatial_study(spec, ts, &reference, opts)?)
}

pub struct PdeStudy {
    pub bound: ParametricBound,
    pub report: StudyReport,
    pub reference: Reference,
}

/// Parametric study with `b = c d`; the reference resolves every Legendre degree used.
pub fn run_pde_study(spec: &ProblemSpec, c: &[f64], ts: &[f64], modes: u64, opts: &SolveOptions) -> Result<PdeStudy> {
    let bound = parametric_bound(spec, c)?;
    let t_max = ts.iter().copied().fold(1.0, f64::max);
    let deg = max_degree_in_cross(spec, &bound.b, t_max)? as usize;
    let reference = calibrated_reference(spec, modes, deg + 3, opts)?;
    let report = convergence_study(spec, &bound, ts, &reference, opts)?;
    Ok(PdeStudy { bound, report, reference })
}

/// Which decay constants to compare against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DecayVersion {
    V,
    W,
}

/// Every `s` supported in `1..=j` with `|s| <= degree`, in canonical order.
pub fn multi_indices_up_to(j: usize, degree: u32) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for _ in 0..j {
        let mut next = Vec::new();
        for prefix in &out {
            let used: u32 = prefix.iter().sum();
            for e in 0..=degree - used {
                let mut p = prefix.clone();
                p.push(e);
                next.push(p);
            }
        }
        out = next;
    }
    let mut list: Vec<MultiIndex> = out.iter().map(|d| MultiIndex::from_dense(d)).collect();
    list.sort_by(|a, b| a.canonical_cmp(b));
    list
}

/// `||u_s||_V` against `K (|s|!/s!) d^s` for all `|s| <= degree`.
pub fn run_decay_check(
    spec: &ProblemSpec,
    degree: u32,
    version: DecayVersion,
    modes: u64,
    opts: &SolveOptions,
) -> Result<(DecaySequences, Vec<DecayRow>)> {
    let decay = match version {
        DecayVersion::V => DecaySequences::v_version(spec),
        DecayVersion::W => DecaySequences::w_version(spec),
    };
    let reference = calibrated_reference(spec, modes, degree as usize + 3, opts)?;
    let list = multi_indices_up_to(spec.parametric_dimension(), degree);
    let rows = coefficient_decay_check(&reference, &decay, &list)?;
    Ok((decay, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monte_carlo_is_seeded() {
        let a = monte_carlo_design(3, 10, MONTE_CARLO_SEED);
        let b = monte_carlo_design(3, 10, MONTE_CARLO_SEED);
        assert_eq!(a, b);
        assert!(a.points.iter().flatten().all(|y| (-1.0..=1.0).contains(y)));
    }

    #[test]
    fn index_list_sizes() {
        assert_eq!(multi_indices_up_to(3, 3).len(), 20);
        assert_eq!(multi_indices_up_to(0, 3), vec![MultiIndex::zero()]);
        assert!(multi_indices_up_to(2, 2)[0].is_zero());
    }
}
