//! The hyperbolic cross `E_{a,b}(T) = {(k, s) : |k|_inf^a / w(s) <= T}`.
//!
//! Only multi-indices with `w(s) >= 1/T` contribute, and each such `s`
//! carries the full cube `{k in Z^m_* : |k|_inf <= radius(s)}`. The set of
//! contributing `s` (the skeleton) is found by a depth-first walk that prunes
//! a subtree once the largest weight it could contain drops below `1/T`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, ln_binomial};
use crate::multiindex::MultiIndex;
use crate::sequences::{Interval, SuffixTable, WeightSequence};
use crate::summability::{self, Verdict};

/// Absolute slack in the log-domain membership test `a ln|k| - ln w(s) <= ln T`.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Default margin: enumeration without caps needs `||b||_1 <= 1 - margin`.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Hard limits on the skeleton walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_level: u64,
    pub max_dim: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossParams {
    pub a: f64,
    pub m: u32,
    pub t: f64,
    pub b: WeightSequence,
    pub margin: f64,
    pub caps: Option<Caps>,
}

impl CrossParams {
    pub fn new(a: f64, m: u32, t: f64, b: WeightSequence) -> Self {
        Self { a, m, t, b, margin: DEFAULT_MARGIN, caps: None }
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = Some(caps);
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("a = {} must be positive", self.a)));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("T = {} must be positive", self.t)));
        }
        if !(self.margin >= 0.0 && self.margin < 1.0) {
            return Err(Error::InvalidParameter("margin must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// `true` iff `(k, s)` belongs to `E_{a,b}(T)`.
pub fn is_member(k: &[i64], s: &MultiIndex, a: f64, b: &WeightSequence, t: f64) -> bool {
    let kmax = k.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    if kmax == 0 || k.contains(&0) {
        return false;
    }
    match s.log_weight(b) {
        Ok(lw) => a * math::ln(kmax as f64) - lw <= math::ln(t) + MEMBERSHIP_SLACK,
        Err(_) => false,
    }
}

/// Largest `r` with `a ln r - lw <= ln T + slack`, 0 if even `r = 1` fails.
pub fn radius(a: f64, lw: f64, t: f64) -> u64 {
    let rhs = math::ln(t) + MEMBERSHIP_SLACK;
    let member = |r: u64| a * math::ln(r as f64) - lw <= rhs;
    if !member(1) {
        return 0;
    }
    let x = math::exp((rhs + lw) / a);
    if !(x < 4.0e15) {
        return u64::MAX / 4;
    }
    let mut r = (math::floor(x) as u64).max(1);
    while r > 1 && !member(r) {
        r -= 1;
    }
    while member(r + 1) {
        r += 1;
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonEntry {
    pub s: MultiIndex,
    pub log_weight: f64,
    pub radius: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    /// Contributing multi-indices in canonical `(degree, s)` order.
    pub entries: Vec<SkeletonEntry>,
    /// Set when a cap stopped the walk before the pruning bound did.
    pub truncated: bool,
}

/// `ln max_{r >= e} C(d + r, r) tau^r`.
fn ln_max_completion(d: u64, tau: f64, e: u64) -> f64 {
    if tau <= 0.0 {
        return if e == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if tau >= 1.0 {
        return f64::INFINITY;
    }
    let g = |r: u64| ln_binomial(d + r, r) + r as f64 * math::ln(tau);
    let x = ((d + 1) as f64 * tau - 1.0) / (1.0 - tau);
    let peak = if x < 0.0 { 0 } else { math::floor(x) as u64 + 1 };
    let centre = peak.max(e);
    let mut best = g(centre);
    if centre > e {
        best = best.max(g(centre - 1));
    }
    best = best.max(g(centre + 1));
    best + 1e-12 * (1.0 + best.abs())
}

struct SkeletonWalk<'a> {
    params: &'a CrossParams,
    tau: SuffixTable,
    end: Option<u64>,
    threshold: f64,
    entries: Vec<SkeletonEntry>,
    truncated: bool,
}

impl SkeletonWalk<'_> {
    fn bound(&self, lw: f64, d: u64, i: u64, e: u64) -> f64 {
        lw + ln_max_completion(d, self.tau.upper(i), e)
    }

    fn explore(&mut self, s: &MultiIndex, lw: f64, d: u64, start: u64) -> Result<()> {
        if lw >= self.threshold {
            let radius = radius(self.params.a, lw, self.params.t);
            if radius > 0 {
                self.entries.push(SkeletonEntry { s: s.clone(), log_weight: lw, radius });
            }
        }
        let caps = self.params.caps;
        let mut i = start;
        loop {
            if self.end.is_some_and(|end| i > end) {
                return Ok(());
            }
            if self.bound(lw, d, i, 1) < self.threshold {
                return Ok(());
            }
            if caps.is_some_and(|c| i > c.max_dim as u64) {
                self.truncated = true;
                return Ok(());
            }
            let bi = self.params.b.value(i);
            if bi > 0.0 {
                let lb = math::ln(bi);
                let mut e = 1u64;
                loop {
                    if e > 1 && self.bound(lw, d, i, e) < self.threshold {
                        break;
                    }
                    if caps.is_some_and(|c| d + e > c.max_level) {
                        self.truncated = true;
                        break;
                    }
                    let exp = u32::try_from(e).map_err(|_| Error::Overflow)?;
                    let child = s.with_exponent(i as u32, exp)?;
                    let clw = lw + ln_binomial(d + e, e) + e as f64 * lb;
                    self.explore(&child, clw, d + e, i + 1)?;
                    e += 1;
                }
            }
            i += 1;
            if i > u32::MAX as u64 {
                return Err(Error::Overflow);
            }
        }
    }
}

/// All `s` with `w(s) >= 1/T` and their cube radii.
pub fn skeleton(params: &CrossParams) -> Result<Skeleton> {
    params.validate()?;
    let l1 = params.b.ell1_norm();
    if params.caps.is_none() && l1.hi > 1.0 - params.margin {
        return Err(Error::MarginViolated { l1_hi: l1.hi });
    }
    let mut walk = SkeletonWalk {
        params,
        tau: SuffixTable::new(&params.b, 1.0),
        end: params.b.support_end(),
        threshold: -math::ln(params.t) - MEMBERSHIP_SLACK,
        entries: Vec::new(),
        truncated: false,
    };
    walk.explore(&MultiIndex::zero(), 0.0, 0, 1)?;
    let mut entries = walk.entries;
    entries.sort_by(|x, y| x.s.canonical_cmp(&y.s));
    Ok(Skeleton { entries, truncated: walk.truncated })
}

/// `(2 r)^m`, `None` on overflow.
fn cube_size(radius: u64, m: u32) -> Option<u64> {
    radius.checked_mul(2)?.checked_pow(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cardinality {
    /// `|E_{a,b}(T)|`, `None` when it overflows `u64`.
    pub count: Option<u64>,
    pub truncated: bool,
}

/// Exact `|E_{a,b}(T)|`.
pub fn cardinality(params: &CrossParams) -> Result<Cardinality> {
    let sk = skeleton(params)?;
    let mut total = Some(0u64);
    for e in &sk.entries {
        total = total.and_then(|t| cube_size(e.radius, params.m).and_then(|c| t.checked_add(c)));
    }
    Ok(Cardinality { count: total, truncated: sk.truncated })
}

/// Materialized pairs `(k, s)` in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicCross {
    pub m: u32,
    pub pairs: Vec<(Vec<i64>, MultiIndex)>,
    pub truncated: bool,
}

impl HyperbolicCross {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Every `k in Z^m_*` with `|k|_inf <= r`, lexicographically.
pub fn cube(m: u32, r: u64) -> Vec<Vec<i64>> {
    let r = r as i64;
    let axis: Vec<i64> = (-r..=-1).chain(1..=r).collect();
    let mut out: Vec<Vec<i64>> = alloc::vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &x in &axis {
                let mut k = prefix.clone();
                k.push(x);
                next.push(k);
            }
        }
        out = next;
    }
    if r == 0 {
        out.clear();
    }
    out
}

/// Lists `E_{a,b}(T)`, refusing when it has more than `cap` elements.
pub fn materialize(params: &CrossParams, cap: u64) -> Result<HyperbolicCross> {
    let sk = skeleton(params)?;
    let mut total = Some(0u64);
    for e in &sk.entries {
        total = total.and_then(|t| cube_size(e.radius, params.m).and_then(|c| t.checked_add(c)));
    }
    match total {
        Some(n) if n <= cap => {}
        count => return Err(Error::CapExceeded { count, cap }),
    }
    let mut pairs = Vec::new();
    for e in &sk.entries {
        for k in cube(params.m, e.radius) {
            pairs.push((k, e.s.clone()));
        }
    }
    Ok(HyperbolicCross { m: params.m, pairs, truncated: sk.truncated })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CardinalityReport {
    pub count: Option<u64>,
    /// `2^m (floor(T^(1/a)) - 1)^m`.
    pub lower: f64,
    /// `(3/2)^(2m) sum_s w(s)^(m/a)`.
    pub constant: Interval,
    /// `2^m * constant.hi * T^(m/a)`.
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// `floor(T^(1/a))` under the same slack as the membership test.
pub fn root_floor(a: f64, t: f64) -> u64 {
    radius(a, 0.0, t)
}

/// Closed-form lower bound `2^m (floor(T^(1/a)) - 1)^m`.
pub fn lower_bound(a: f64, m: u32, t: f64) -> f64 {
    let r = root_floor(a, t).saturating_sub(1) as f64;
    math::powf(2.0 * r, m as f64)
}

/// The constant `C` of the upper bound `|E| <= C T^(m/a)`.
pub fn upper_constant(a: f64, m: u32, b: &WeightSequence, tol: f64) -> Result<Interval> {
    let p = m as f64 / a;
    let c = summability::classify(p, b)?;
    if c.verdict != Verdict::Summable {
        return Err(Error::HypothesisViolated(alloc::format!(
            "w must lie in l_(m/a) with m/a = {p}, verdict {:?}",
            c.verdict
        )));
    }
    let sum = summability::sum_powers(p, b, tol)?;
    let f = math::powf(1.5, 2.0 * m as f64);
    Ok(Interval::new(sum.lo * f * (1.0 - 1e-15), sum.hi * f * (1.0 + 1e-15)))
}

/// Closed-form upper bound `2^m C T^(m/a)` from the upper end of `C`.
pub fn closed_upper(m: u32, constant: &Interval, a: f64, t: f64) -> f64 {
    let v = math::powf(2.0, m as f64) * constant.hi * math::powf(t, m as f64 / a);
    v * (1.0 + 1e-15)
}

/// Checks both cardinality bounds against the exact count.
pub fn verify_bounds(params: &CrossParams, tol: f64) -> Result<CardinalityReport> {
    params.validate()?;
    let constant = upper_constant(params.a, params.m, &params.b, tol)?;
    verify_bounds_with(params, constant)
}

/// [`verify_bounds`] with a precomputed enclosure of `C`, for sweeps over `T`.
pub fn verify_bounds_with(params: &CrossParams, constant: Interval) -> Result<CardinalityReport> {
    params.validate()?;
    let count = cardinality(params)?.count;
    let lower = lower_bound(params.a, params.m, params.t);
    let upper = closed_upper(params.m, &constant, params.a, params.t);
    let (lower_holds, upper_holds) = match count {
        Some(n) => (lower <= n as f64, n as f64 <= upper),
        None => (true, false),
    };
    Ok(CardinalityReport { count, lower, constant, upper, lower_holds, upper_holds })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsDimension {
    /// `|G(1/eps)| - 1`.
    pub lower: u64,
    /// `|G(1/eps)|`.
    pub upper: u64,
    pub closed_lower: f64,
    pub closed_upper: f64,
}

/// Bracket of the eps-dimension of the embedding `A^{alpha,b} -> K^beta` in `m` spatial dimensions.
pub fn eps_dimension(alpha: f64, beta: f64, m: u32, b: &WeightSequence, eps: f64, tol: f64) -> Result<EpsDimension> {
    if !(alpha > beta) {
        return Err(Error::InvalidParameter("alpha must exceed beta".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1]".into()));
    }
    let a = alpha - beta;
    let t = 1.0 / eps;
    let params = CrossParams::new(a, m, t, b.clone());
    let count = cardinality(&params)?.count.ok_or(Error::Overflow)?;
    let constant = upper_constant(a, m, b, tol)?;
    Ok(EpsDimension {
        lower: count.saturating_sub(1),
        upper: count,
        closed_lower: lower_bound(a, m, t),
        closed_upper: closed_upper(m, &constant, a, t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn half() -> WeightSequence {
        WeightSequence::finite(vec![0.5]).unwrap()
    }

    #[test]
    fn one_dimensional_count() {
        let p = CrossParams::new(1.0, 1, 8.0, half());
        let sk = skeleton(&p).unwrap();
        let radii: Vec<u64> = sk.entries.iter().map(|e| e.radius).collect();
        assert_eq!(radii, vec![8, 4, 2, 1]);
        assert_eq!(cardinality(&p).unwrap().count, Some(30));
    }

    #[test]
    fn bounds_report() {
        let r = verify_bounds(&CrossParams::new(1.0, 1, 8.0, half()), 1e-9).unwrap();
        assert_eq!(r.count, Some(30));
        assert_eq!(r.lower, 14.0);
        assert!(r.constant.contains(4.5), "{}", r.constant);
        assert!((r.upper - 72.0).abs() < 1e-6, "{}", r.upper);
        assert!(r.lower_holds && r.upper_holds);
    }

    #[test]
    fn eps_dimension_example() {
        let d = eps_dimension(2.0, 1.0, 1, &half(), 0.125, 1e-9).unwrap();
        assert_eq!((d.lower, d.upper), (29, 30));
        assert_eq!(d.closed_lower, 14.0);
        assert!((d.closed_upper - 72.0).abs() < 1e-6);
        let one = eps_dimension(2.0, 1.0, 2, &half(), 1.0, 1e-9).unwrap();
        assert_eq!((one.lower, one.upper), (3, 4));
    }

    #[test]
    fn radius_is_exact_at_integer_powers() {
        assert_eq!(radius(2.0, 0.0, 9.0), 3);
        assert_eq!(radius(3.0, 0.0, 64.0), 4);
        assert_eq!(radius(1.0, 0.0, 0.5), 0);
    }

    #[test]
    fn margin_and_caps() {
        let b = WeightSequence::finite(vec![0.6, 0.4]).unwrap();
        let p = CrossParams::new(1.0, 1, 4.0, b);
        assert!(matches!(skeleton(&p), Err(Error::MarginViolated { .. })));
        let capped = p.with_caps(Caps { max_level: 3, max_dim: 2 });
        let sk = skeleton(&capped).unwrap();
        assert!(sk.truncated);
        assert!(sk.entries.iter().all(|e| e.s.degree() <= 3));
    }

    #[test]
    fn cube_listing() {
        assert_eq!(cube(1, 2), vec![vec![-2], vec![-1], vec![1], vec![2]]);
        assert_eq!(cube(2, 1).len(), 4);
        assert!(cube(3, 0).is_empty());
    }
}
