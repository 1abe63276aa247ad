//! Stochastic Galerkin discretisation in the real Fourier times Legendre basis.
//!
//! For `k` in `Z^m_*` whose first component is positive the basis function is
//! `sqrt2 cos(2 pi k.x)`; for `-k` it is `sqrt2 sin(2 pi k.x)`. Both span the
//! same space as `e_k, e_{-k}` and keep the system real symmetric.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::math;
use crate::multiindex::MultiIndex;
use crate::tensorfield::CoefficientField;

use super::legendre::{gauss_legendre, legendre_coupling, legendre_values};
use super::linalg::{conjugate_gradient, CsrMatrix, DenseCholesky, Preconditioner, SolveOptions, SolveStats};
use super::problem::ProblemSpec;
use super::trig::{Complex, TrigFunction};

fn is_cosine(k: &[i64]) -> bool {
    k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn negated(k: &[i64]) -> Vec<i64> {
    k.iter().map(|x| -x).collect()
}

/// The real basis function of key `k` as a combination of complex exponentials.
pub fn real_expansion(k: &[i64]) -> [(Vec<i64>, Complex); 2] {
    if is_cosine(k) {
        [(k.to_vec(), Complex::new(FRAC_1_SQRT_2, 0.0)), (negated(k), Complex::new(FRAC_1_SQRT_2, 0.0))]
    } else {
        let kp = negated(k);
        [(kp.clone(), Complex::new(0.0, -FRAC_1_SQRT_2)), (negated(&kp), Complex::new(0.0, FRAC_1_SQRT_2))]
    }
}

/// Value of the real basis function of key `k` at `x`.
pub fn real_basis_value(k: &[i64], x: &[f64]) -> f64 {
    let th = |v: &[i64]| 2.0 * PI * v.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum::<f64>();
    if is_cosine(k) {
        SQRT_2 * math::cos(th(k))
    } else {
        SQRT_2 * math::sin(th(&negated(k)))
    }
}

/// Gradient of the real basis function of key `k` at `x`.
pub fn real_basis_grad(k: &[i64], x: &[f64]) -> Vec<f64> {
    let th = |v: &[i64]| 2.0 * PI * v.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum::<f64>();
    if is_cosine(k) {
        let s = -SQRT_2 * 2.0 * PI * math::sin(th(k));
        k.iter().map(|&ki| s * ki as f64).collect()
    } else {
        let kp = negated(k);
        let c = SQRT_2 * 2.0 * PI * math::cos(th(&kp));
        kp.iter().map(|&ki| c * ki as f64).collect()
    }
}

/// `int c grad e_k . grad conj(e_k2) dx = (2 pi)^2 (k.k2) c_hat(k2 - k)`.
pub fn stiffness_entry(c: &TrigFunction, k: &[i64], k2: &[i64]) -> Complex {
    let dot: i64 = k.iter().zip(k2).map(|(a, b)| a * b).sum();
    let diff: Vec<i64> = k2.iter().zip(k).map(|(a, b)| a - b).collect();
    c.coefficient(&diff).scale(4.0 * PI * PI * dot as f64)
}

/// `int c grad phi_ka . grad phi_kb dx` for the real basis.
pub fn real_stiffness_entry(c: &TrigFunction, ka: &[i64], kb: &[i64]) -> f64 {
    let mut acc = 0.0;
    for (a, alpha) in real_expansion(ka) {
        for (b, beta) in real_expansion(kb) {
            acc += (alpha * beta.conj() * stiffness_entry(c, &a, &b)).re;
        }
    }
    acc
}

/// `int f phi_k dx`.
pub fn real_load_entry(f: &TrigFunction, k: &[i64]) -> f64 {
    real_expansion(k).iter().map(|(a, alpha)| (*alpha * f.coefficient(&negated(a))).re).sum()
}

/// Assembled system over an ordered list of `(k, s)` pairs.
#[derive(Clone, Debug)]
pub struct GalerkinSystem {
    pub m: usize,
    pub index: Vec<(Vec<i64>, MultiIndex)>,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Keys `k'` whose basis function can couple with `k` through the modes of `c`.
fn neighbour_keys(c: &TrigFunction, k: &[i64]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for (a, _) in real_expansion(k) {
        for (mu, _) in c.modes() {
            let b: Vec<i64> = a.iter().zip(mu).map(|(x, y)| x + y).collect();
            if b.contains(&0) {
                continue;
            }
            out.push(negated(&b));
            out.push(b);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Builds `B(L_(k,s), L_(k',s'))` and `F(L_(k,s))`.
pub fn assemble(spec: &ProblemSpec, index: &[(Vec<i64>, MultiIndex)]) -> Result<GalerkinSystem> {
    let jmax = spec.parametric_dimension() as u32;
    let mut lookup: BTreeMap<(&[i64], &MultiIndex), usize> = BTreeMap::new();
    for (i, (k, s)) in index.iter().enumerate() {
        if k.len() != spec.m || k.contains(&0) {
            return Err(Error::InvalidParameter(alloc::format!("frequency {k:?} is not in Z^{}_*", spec.m)));
        }
        if s.max_dim().is_some_and(|d| d > jmax) {
            return Err(Error::InvalidParameter(alloc::format!("multi-index {s} uses a dimension beyond J = {jmax}")));
        }
        if lookup.insert((k.as_slice(), s), i).is_some() {
            return Err(Error::InvalidParameter(alloc::format!("pair ({k:?}, {s}) listed twice")));
        }
    }
    let mut upper: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs = alloc::vec![0.0; index.len()];
    for (i, (k, s)) in index.iter().enumerate() {
        if s.is_zero() {
            rhs[i] = real_load_entry(&spec.f, k);
        }
        for k2 in neighbour_keys(&spec.abar, k) {
            if let Some(&j) = lookup.get(&(k2.as_slice(), s)) {
                if j >= i {
                    upper.push((i, j, real_stiffness_entry(&spec.abar, k, &k2)));
                }
            }
        }
        for (jdim, psi) in spec.psi.iter().enumerate() {
            let dim = jdim as u32 + 1;
            let level = s.get(dim);
            let up = s.incremented(dim)?;
            let down = s.decremented(dim);
            let (c_lo, c_up) = legendre_coupling(level);
            let neigh = neighbour_keys(psi, k);
            let targets = [(Some(up), c_up), (down, c_lo)];
            for (target, coupling) in targets {
                let Some(s2) = target else { continue };
                for k2 in &neigh {
                    if let Some(&j) = lookup.get(&(k2.as_slice(), &s2)) {
                        if j > i {
                            upper.push((i, j, coupling * real_stiffness_entry(psi, k, k2)));
                        }
                    }
                }
            }
        }
    }
    upper.retain(|e| e.2 != 0.0);
    let matrix = CsrMatrix::from_upper_triplets(index.len(), upper);
    Ok(GalerkinSystem { m: spec.m, index: index.to_vec(), matrix, rhs })
}

/// `B(L_(k,s), L_(k',s'))` by tensor quadrature: `nx` uniform points per spatial
/// axis and `ny` Gauss nodes per parametric axis.
pub fn quadrature_entry(
    spec: &ProblemSpec,
    row: &(Vec<i64>, MultiIndex),
    col: &(Vec<i64>, MultiIndex),
    nx: usize,
    ny: usize,
) -> f64 {
    let m = spec.m;
    let jdim = spec.parametric_dimension();
    let (yn, yw) = gauss_legendre(ny);
    let deg = row.1.entries().iter().chain(col.1.entries()).map(|e| e.1).max().unwrap_or(0);
    let ny_total = ny.pow(jdim as u32);
    let nx_total = nx.pow(m as u32);
    let mut x = alloc::vec![0.0; m];
    let mut y = alloc::vec![0.0; jdim];
    let mut total = 0.0;
    for iy in 0..ny_total {
        let mut rest = iy;
        let mut wy = 1.0;
        for yj in y.iter_mut() {
            *yj = yn[rest % ny];
            wy *= yw[rest % ny];
            rest /= ny;
        }
        let mut ls = 1.0;
        let mut ls2 = 1.0;
        for (j, &yj) in y.iter().enumerate() {
            let vals = legendre_values(deg, yj);
            ls *= vals[row.1.get(j as u32 + 1) as usize];
            ls2 *= vals[col.1.get(j as u32 + 1) as usize];
        }
        let a = spec.at(&y).abar;
        let mut sx = 0.0;
        for ix in 0..nx_total {
            let mut rest = ix;
            for xi in x.iter_mut() {
                *xi = (rest % nx) as f64 / nx as f64;
                rest /= nx;
            }
            let g1 = real_basis_grad(&row.0, &x);
            let g2 = real_basis_grad(&col.0, &x);
            let d: f64 = g1.iter().zip(&g2).map(|(p, q)| p * q).sum();
            sx += a.eval(&x) * d;
        }
        total += wy * ls * ls2 * sx / nx_total as f64;
    }
    total
}

fn apply_jacobi(diag: &[f64], r: &[f64], z: &mut [f64]) {
    for ((zi, ri), di) in z.iter_mut().zip(r).zip(diag) {
        *zi = ri / di;
    }
}

/// Largest block factored densely by the mean preconditioner; larger blocks use the diagonal.
const MAX_DENSE_BLOCK: usize = 1024;

struct BlockPreconditioner {
    blocks: Vec<(Vec<usize>, Option<DenseCholesky>)>,
    diag: Vec<f64>,
}

impl BlockPreconditioner {
    fn new(system: &GalerkinSystem) -> Result<Self> {
        let mut groups: BTreeMap<&MultiIndex, Vec<usize>> = BTreeMap::new();
        for (i, (_, s)) in system.index.iter().enumerate() {
            groups.entry(s).or_default().push(i);
        }
        let mut blocks = Vec::with_capacity(groups.len());
        for (_, rows) in groups {
            let n = rows.len();
            let fac = if n <= MAX_DENSE_BLOCK {
                let mut dense = alloc::vec![0.0; n * n];
                for (a, &i) in rows.iter().enumerate() {
                    for (b, &j) in rows.iter().enumerate() {
                        dense[a * n + b] = system.matrix.get(i, j);
                    }
                }
                Some(DenseCholesky::factor(n, &dense)?)
            } else {
                None
            };
            blocks.push((rows, fac));
        }
        Ok(Self { blocks, diag: system.matrix.diagonal() })
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let mut buf = Vec::new();
        for (rows, fac) in &self.blocks {
            match fac {
                Some(ch) => {
                    buf.clear();
                    buf.extend(rows.iter().map(|&i| r[i]));
                    ch.solve_in_place(&mut buf);
                    for (&i, &v) in rows.iter().zip(&buf) {
                        z[i] = v;
                    }
                }
                None => {
                    for &i in rows {
                        z[i] = r[i] / self.diag[i];
                    }
                }
            }
        }
    }
}

/// Solves the system by preconditioned conjugate gradients.
pub fn solve_vector(system: &GalerkinSystem, opts: &SolveOptions) -> Result<(Vec<f64>, SolveStats)> {
    let a = &system.matrix;
    match opts.preconditioner {
        Preconditioner::None => conjugate_gradient(a, &system.rhs, opts, |r, z| z.copy_from_slice(r)),
        Preconditioner::Jacobi => {
            let diag = a.diagonal();
            if diag.iter().any(|&d| !(d > 0.0)) {
                return Err(Error::InvalidParameter("matrix has a nonpositive diagonal entry".into()));
            }
            conjugate_gradient(a, &system.rhs, opts, |r, z| apply_jacobi(&diag, r, z))
        }
        Preconditioner::MeanBlockDiagonal => {
            let pc = BlockPreconditioner::new(system)?;
            conjugate_gradient(a, &system.rhs, opts, |r, z| pc.apply(r, z))
        }
    }
}

/// Solves and returns the coefficients as a field over the index set.
pub fn solve(system: &GalerkinSystem, opts: &SolveOptions) -> Result<(CoefficientField, SolveStats)> {
    let (x, stats) = solve_vector(system, opts)?;
    let mut field = CoefficientField::new(system.m);
    for ((k, s), v) in system.index.iter().zip(x) {
        field.insert(k.clone(), s.clone(), v)?;
    }
    Ok((field, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec_with(psi: Vec<TrigFunction>) -> ProblemSpec {
        let abar = TrigFunction::constant(1, 1.0).axpy(1.0, &TrigFunction::cosine(&[1], 0.4).unwrap());
        let f = TrigFunction::cosine(&[1], 1.0).unwrap().axpy(1.0, &TrigFunction::sine(&[3], 0.5).unwrap());
        ProblemSpec::new(abar, psi, f, 0.35, 1.65).unwrap()
    }

    #[test]
    fn stiffness_of_unit_coefficient() {
        let one = TrigFunction::constant(1, 1.0);
        assert!((stiffness_entry(&one, &[1], &[1]).re - 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(stiffness_entry(&one, &[1], &[2]), Complex::ZERO);
        assert!((real_stiffness_entry(&one, &[-2], &[-2]) - 16.0 * PI * PI).abs() < 1e-11);
    }

    #[test]
    fn stiffness_matches_quadrature() {
        let c = TrigFunction::cosine(&[1], 1.0).unwrap();
        for (ka, kb) in [([1i64], [2i64]), ([-1], [-2]), ([1], [-2]), ([2], [1])] {
            let n = 256;
            let q: f64 = (0..n)
                .map(|i| {
                    let x = [i as f64 / n as f64];
                    c.eval(&x) * real_basis_grad(&ka, &x)[0] * real_basis_grad(&kb, &x)[0]
                })
                .sum::<f64>()
                / n as f64;
            assert!((q - real_stiffness_entry(&c, &ka, &kb)).abs() < 1e-9, "{ka:?} {kb:?}");
        }
    }

    #[test]
    fn poisson_solution_is_exact() {
        let f = TrigFunction::cosine(&[2], 1.0).unwrap();
        let spec = ProblemSpec::new(TrigFunction::constant(1, 1.0), vec![], f, 1.0, 1.0).unwrap();
        let index: Vec<_> = [-3i64, -2, -1, 1, 2, 3].iter().map(|&k| (vec![k], MultiIndex::zero())).collect();
        let sys = assemble(&spec, &index).unwrap();
        let (u, _) = solve(&sys, &SolveOptions::default()).unwrap();
        let want = FRAC_1_SQRT_2 / (4.0 * PI * PI * 4.0);
        assert!((u.get(&[2], &MultiIndex::zero()) - want).abs() < 1e-14);
        assert!(u.get(&[1], &MultiIndex::zero()).abs() < 1e-14);
    }

    #[test]
    fn assembly_matches_quadrature_with_coupling() {
        let spec = spec_with(vec![TrigFunction::cosine(&[2], 0.2).unwrap()]);
        let mut index = Vec::new();
        for s in [MultiIndex::zero(), MultiIndex::unit(1).unwrap(), MultiIndex::from_dense(&[2])] {
            for k in [-3i64, -1, 1, 3] {
                index.push((vec![k], s.clone()));
            }
        }
        let sys = assemble(&spec, &index).unwrap();
        assert!(sys.matrix.is_symmetric());
        for i in 0..index.len() {
            for j in 0..index.len() {
                let q = quadrature_entry(&spec, &index[i], &index[j], 32, 6);
                assert!((q - sys.matrix.get(i, j)).abs() < 1e-8, "{i} {j}");
            }
        }
    }

    #[test]
    fn preconditioners_agree() {
        let spec = spec_with(vec![TrigFunction::cosine(&[1], 0.2).unwrap()]);
        let mut index = Vec::new();
        for s in [MultiIndex::zero(), MultiIndex::unit(1).unwrap()] {
            for k in -6i64..=6 {
                if k != 0 {
                    index.push((vec![k], s.clone()));
                }
            }
        }
        let sys = assemble(&spec, &index).unwrap();
        let mut sols = Vec::new();
        for p in [Preconditioner::None, Preconditioner::Jacobi, Preconditioner::MeanBlockDiagonal] {
            let opts = SolveOptions { tol: 1e-13, preconditioner: p, ..SolveOptions::default() };
            sols.push(solve_vector(&sys, &opts).unwrap().0);
        }
        for s in &sols[1..] {
            for (a, b) in s.iter().zip(&sols[0]) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
