//! Summability of factorial weights `w(s) = (|s|!/s!) b^s` in `l_p(F)`.
//!
//! [`classify`] decides membership from certified norm enclosures of `b`.
//! [`sum_powers`] encloses `sum_s w(s)^p` by a depth-first walk over `F`
//! that prunes subtrees whose total contribution is provably small.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{self, CertifiedSum};
use crate::multiindex::MultiIndex;
use crate::sequences::{Interval, WeightSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Summable,
    NotSummable,
    /// The enclosures straddle the decision threshold.
    BoundaryUnsupported,
}

/// The criterion used to reach a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `p <= 1`: summable iff `||b||_1 < 1` and `b` in `l_p`.
    SmallExponent,
    /// `p > 1`, infinitely many positive entries: summable iff `||b||_1 <= 1`.
    LargeExponent,
    /// `p > 1`, finite support: summable if `||b||_1 < 1`, not if `||b||_1 > 1`.
    FiniteSupport,
    /// Product weights `b^s`: summable iff `||b||_inf < 1` and `b` in `l_p`.
    ProductWeights,
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::SmallExponent => "p<=1: ||b||_1<1 and b in l_p",
            Rule::LargeExponent => "p>1: ||b||_1<=1",
            Rule::FiniteSupport => "p>1, finite support: ||b||_1<1 sufficient, ||b||_1>1 divergent",
            Rule::ProductWeights => "product weights: ||b||_inf<1 and b in l_p",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub rule: Rule,
    pub p: f64,
    pub l1: Interval,
    pub lp: Interval,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("p = {p} must be positive and finite")))
    }
}

/// Decides `w in l_p(F)` for `b`.
pub fn classify(p: f64, b: &WeightSequence) -> Result<Classification> {
    check_p(p)?;
    classify_from_norms(p, b.ell1_norm(), b.ellp_norm_p(p), b.finitely_supported())
}

/// Decision table on given enclosures of `||b||_1` and `sum_j b_j^p`.
pub fn classify_from_norms(p: f64, l1: Interval, lp: Interval, finite_support: bool) -> Result<Classification> {
    check_p(p)?;
    let (verdict, rule) = if p <= 1.0 {
        let v = if lp.is_divergent() || l1.lo >= 1.0 {
            Verdict::NotSummable
        } else if l1.hi < 1.0 {
            Verdict::Summable
        } else {
            Verdict::BoundaryUnsupported
        };
        (v, Rule::SmallExponent)
    } else if finite_support {
        let v = if l1.hi < 1.0 {
            Verdict::Summable
        } else if l1.lo > 1.0 {
            Verdict::NotSummable
        } else {
            return Err(Error::HypothesisViolated(
                "p > 1 with finitely many positive b_j and ||b||_1 = 1 is not covered".into(),
            ));
        };
        (v, Rule::FiniteSupport)
    } else {
        let v = if l1.hi <= 1.0 {
            Verdict::Summable
        } else if l1.lo > 1.0 {
            Verdict::NotSummable
        } else {
            Verdict::BoundaryUnsupported
        };
        (v, Rule::LargeExponent)
    };
    Ok(Classification { verdict, rule, p, l1, lp })
}

/// Decides `(b^s)_s in l_p(F)`.
pub fn classify_tensor(p: f64, b: &WeightSequence) -> Result<Classification> {
    check_p(p)?;
    let sup = b.sup_norm();
    let l1 = b.ell1_norm();
    let lp = b.ellp_norm_p(p);
    let slack = 8.0 * f64::EPSILON;
    let verdict = if lp.is_divergent() || sup > 1.0 + slack || (b.finitely_supported() && sup == 1.0) {
        Verdict::NotSummable
    } else if sup < 1.0 - slack || (b.finitely_supported() && sup < 1.0) {
        Verdict::Summable
    } else {
        Verdict::BoundaryUnsupported
    };
    Ok(Classification { verdict, rule: Rule::ProductWeights, p, l1, lp })
}

/// Largest level handled explicitly by [`sum_powers`].
pub const MAX_LEVEL: usize = 2000;

/// Largest dimension cut used for power tails.
const MAX_CUT: u64 = 1 << 16;

/// Upper bound on `sum_{r > big_r} A_r` where `A_r = sum_{|s| = r} w(s)^p`,
/// together with the smallest `big_r` that makes it at most `target`.
fn level_remainder(p: f64, b: &WeightSequence, target: f64) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    let mut consider = |rate: f64, factor: f64| {
        // factor * rate^(R + 1) / (1 - rate) <= target
        if !(rate > 0.0 && rate < 1.0 && factor.is_finite()) {
            return;
        }
        let need = math::ln(target * (1.0 - rate) / factor) / math::ln(rate) - 1.0;
        let r = if need <= 0.0 { 0.0 } else { libm::ceil(need) };
        if r > MAX_LEVEL as f64 {
            return;
        }
        let r = r as usize;
        let rem = factor * math::powf(rate, (r + 1) as f64) / (1.0 - rate) * (1.0 + 1e-12);
        if best.is_none_or(|(br, _)| r < br) {
            best = Some((r, rem));
        }
    };
    if p >= 1.0 {
        let t = b.ell1_norm().hi;
        consider(math::powf(t, p), 1.0);
    } else {
        let tp = b.ellp_norm_p(p).hi;
        consider(tp, 1.0);
        // Hoelder with lambda_j = eta b_j^(p - 1): A_r <= sigma^(rp) * prod^(1 - p),
        // sigma = eta tau_p, ln prod <= X / (1 - x_max), X = eta^(-p/(1-p)) tau_p.
        let sup = b.sup_norm();
        let eta_lo = math::powf(sup, 1.0 - p) * (1.0 + 1e-9);
        let eta_hi = 1.0 / tp;
        if eta_lo < eta_hi {
            let ratio = eta_hi / eta_lo;
            for k in 1..64 {
                let eta = eta_lo * math::powf(ratio, k as f64 / 64.0);
                let sigma = eta * tp;
                let scale = math::powf(eta, -p / (1.0 - p));
                let x_max = scale * math::powf(sup, p);
                if !(x_max < 1.0 && sigma < 1.0) {
                    continue;
                }
                let ln_prod = scale * tp / (1.0 - x_max) * (1.0 + 1e-12);
                consider(math::powf(sigma, p), math::exp((1.0 - p) * ln_prod));
            }
        }
    }
    best.ok_or(Error::TailBoundInconclusive)
}

/// Enclosures of the level sums `sum_{|s| = r, supp s >= cut} w(s)^p` for `r <= big_r`.
fn tail_levels(p: f64, b: &WeightSequence, cut: u64, big_r: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lo = alloc::vec![0.0; big_r + 1];
    let mut hi = alloc::vec![0.0; big_r + 1];
    lo[0] = 1.0;
    hi[0] = 1.0;
    if b.support_end().is_some_and(|end| cut > end) {
        return Ok((lo, hi));
    }
    let p1 = b.tail_power_sum(cut, p);
    let p2 = b.tail_power_sum(cut, 2.0 * p);
    let rate = if p >= 1.0 { math::powf(b.tail_power_sum(cut, 1.0).hi, p) } else { p1.hi };
    if !(rate < 1.0) {
        return Err(Error::TailBoundInconclusive);
    }
    if big_r >= 1 {
        lo[1] = p1.lo;
        hi[1] = p1.hi;
    }
    if big_r >= 2 {
        // level 2: sum_j x_j^2 + 2^p sum_{j<l} x_j x_l = c P1^2 + (1 - c) P2, c = 2^(p-1)
        let c = math::powf(2.0, p - 1.0);
        let corner = |a: f64, q: f64| c * a * a + (1.0 - c) * q;
        let vals = [corner(p1.lo, p2.lo), corner(p1.lo, p2.hi), corner(p1.hi, p2.lo), corner(p1.hi, p2.hi)];
        let vmin = vals.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
        let vmax = vals.iter().copied().fold(0.0, f64::max);
        lo[2] = vmin * (1.0 - 1e-13);
        hi[2] = vmax * (1.0 + 1e-13);
    }
    let mut t = rate * rate;
    for h in hi.iter_mut().skip(3) {
        t *= rate;
        *h = t * (1.0 + 1e-13);
    }
    Ok((lo, hi))
}

/// Folds dimensions `cut - 1, ..., 1` into the level sums.
fn fold_dimensions(p: f64, b: &WeightSequence, cut: u64, lo: &mut [f64], hi: &mut [f64]) {
    let big_r = lo.len() - 1;
    let mut lf = alloc::vec![0.0; big_r + 1];
    for (r, v) in lf.iter_mut().enumerate() {
        *v = math::ln_factorial(r as u64);
    }
    // coef[r][e] = C(r, e)^p, stored row by row
    let mut coef = Vec::with_capacity((big_r + 1) * (big_r + 2) / 2);
    for r in 0..=big_r {
        for e in 0..=r {
            coef.push(if p == 1.0 && r <= 60 {
                libm::round(math::exp(lf[r] - lf[e] - lf[r - e]))
            } else {
                math::exp(p * (lf[r] - lf[e] - lf[r - e]))
            });
        }
    }
    let mut ypow = alloc::vec![0.0; big_r + 1];
    let mut next = alloc::vec![0.0; big_r + 1];
    for i in (1..cut).rev() {
        let bi = b.value(i);
        if bi == 0.0 {
            continue;
        }
        let y = if p == 1.0 { bi } else { math::powf(bi, p) };
        ypow[0] = 1.0;
        for e in 1..=big_r {
            ypow[e] = ypow[e - 1] * y;
        }
        for arr in [&mut *lo, &mut *hi] {
            for r in 0..=big_r {
                let row = &coef[r * (r + 1) / 2..r * (r + 1) / 2 + r + 1];
                let mut acc = 0.0;
                for e in 0..=r {
                    acc += row[e] * ypow[e] * arr[r - e];
                }
                next[r] = acc;
            }
            arr.copy_from_slice(&next);
        }
    }
}

/// Encloses `sum_{s in F} w(s)^p` with relative width at most `tol`.
///
/// The sum is organised by level `r = |s|`. Level sums over dimensions
/// `>= cut` are bracketed in closed form, dimensions below `cut` are folded
/// in exactly, and levels above the working maximum are bounded by a
/// geometric series.
pub fn sum_powers(p: f64, b: &WeightSequence, tol: f64) -> Result<Interval> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let c = classify(p, b)?;
    if c.verdict != Verdict::Summable {
        return Err(Error::HypothesisViolated(alloc::format!(
            "weights are not certified summable for p = {p} ({:?})",
            c.verdict
        )));
    }
    let (big_r, far) = level_remainder(p, b, 0.25 * tol)?;
    let mut cut = match b.support_end() {
        Some(end) => end + 1,
        None => (b.head_len() as u64 + 1).max(1024),
    };
    loop {
        let (mut lo, mut hi) = tail_levels(p, b, cut, big_r)?;
        fold_dimensions(p, b, cut, &mut lo, &mut hi);
        let ops = (cut as f64) * (2.0 * big_r as f64 + 8.0 + big_r as f64 * core::f64::consts::LN_2);
        let rel = 4.0 * f64::EPSILON * ops + 1e-12;
        let lo_sum = math::neumaier_sum(lo.iter().copied()) * (1.0 - rel);
        let hi_sum = (math::neumaier_sum(hi.iter().copied()) + far) * (1.0 + rel);
        let iv = Interval::new(lo_sum.next_down(), hi_sum.next_up());
        if iv.width() <= tol * iv.midpoint() {
            return Ok(iv);
        }
        if b.finitely_supported() || cut >= MAX_CUT {
            return Err(Error::ToleranceNotReached { lo: iv.lo, hi: iv.hi });
        }
        cut *= 4;
    }
}

/// A finite-support index whose weight grows with `scale` when `||b||_1 > 1`.
///
/// With `J` the shortest prefix whose sum `B` exceeds 1, the entries are
/// `floor(scale * b_j / B) + 1` for `j <= J`.
pub fn divergence_witness(b: &WeightSequence, scale: u64) -> Result<MultiIndex> {
    if scale == 0 {
        return Err(Error::InvalidParameter("scale must be positive".into()));
    }
    let l1 = b.ell1_norm();
    if !(l1.lo > 1.0) {
        return Err(Error::HypothesisViolated(alloc::format!("||b||_1 in {l1} is not certified above 1")));
    }
    let mut prefix = CertifiedSum::new();
    let mut values = Vec::new();
    let mut j = 1u64;
    loop {
        let bj = b.value(j);
        prefix.add(bj, 0.0);
        values.push(bj);
        let iv = prefix.interval();
        if iv.lo > 1.0 {
            break;
        }
        if j >= 100_000_000 {
            return Err(Error::HypothesisViolated("prefix of b does not exceed 1 within 1e8 terms".into()));
        }
        j += 1;
    }
    let big_b = prefix.value();
    let mut entries = Vec::new();
    for (idx, &bj) in values.iter().enumerate() {
        let raw = math::floor(scale as f64 * bj / big_b) + 1.0;
        if raw > u32::MAX as f64 {
            return Err(Error::Overflow);
        }
        entries.push((idx as u32 + 1, raw as u32));
    }
    MultiIndex::from_entries(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::Tail;
    use alloc::vec;

    #[test]
    fn geometric_single_dimension() {
        // w(k e_1) = b^k so the sum is 1 / (1 - b^p)
        let b = WeightSequence::finite(vec![0.5]).unwrap();
        for p in [0.5, 1.0, 2.0] {
            let iv = sum_powers(p, &b, 1e-9).unwrap();
            let truth = 1.0 / (1.0 - math::powf(0.5, p));
            assert!(iv.contains(truth), "p = {p}: {iv} vs {truth}");
        }
    }

    #[test]
    fn l1_sum_is_geometric_in_total() {
        let b = WeightSequence::finite(vec![0.3, 0.2, 0.1]).unwrap();
        let iv = sum_powers(1.0, &b, 1e-8).unwrap();
        assert!(iv.contains(1.0 / 0.4), "{iv}");
    }

    #[test]
    fn holder_bound_handles_large_small_p_norm() {
        let b = WeightSequence::new(vec![0.25, 0.125], Tail::Power { kappa: 1.0 / 16.0, q: 3.0 }).unwrap();
        assert!(b.ellp_norm_p(0.5).lo > 1.0);
        let iv = sum_powers(0.5, &b, 1e-4).unwrap();
        assert!(iv.width() <= 1e-4 * iv.midpoint());
    }

    #[test]
    fn witness_matches_hand_computation() {
        let b = WeightSequence::finite(vec![0.7, 0.6]).unwrap();
        let s = divergence_witness(&b, 10).unwrap();
        assert_eq!(s.entries(), &[(1, 6), (2, 5)]);
    }

    #[test]
    fn finite_support_at_one_is_rejected() {
        let b = WeightSequence::finite(vec![0.5, 0.5]).unwrap();
        assert!(matches!(classify(2.0, &b), Err(Error::HypothesisViolated(_))));
        assert_eq!(classify(1.0, &b).unwrap().verdict, Verdict::NotSummable);
    }
}
