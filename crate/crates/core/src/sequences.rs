//! Weight sequences `b = (b_j)_{j >= 1}` and certified norm enclosures.
//!
//! A sequence is an explicit finite head followed by either zeros or the
//! power law `b_j = kappa * j^(-q)`. Norms are returned as [`Interval`]s that
//! provably contain the true value.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{self, CertifiedSum, LIBM_REL};

/// Closed interval `[lo, hi]`; `hi = +inf` encodes a divergent quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn divergent(lo: f64) -> Self {
        Self { lo, hi: f64::INFINITY }
    }

    pub fn is_divergent(&self) -> bool {
        self.hi == f64::INFINITY
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        if self.is_divergent() {
            f64::INFINITY
        } else {
            0.5 * (self.lo + self.hi)
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        if *other == Interval::point(0.0) {
            return *self;
        }
        if *self == Interval::point(0.0) {
            return *other;
        }
        Interval::new((self.lo + other.lo).next_down(), (self.hi + other.hi).next_up())
    }

    /// Widens both ends by a relative amount.
    pub fn pad_rel(&self, rel: f64) -> Interval {
        Interval::new(self.lo - rel * self.lo.abs(), self.hi + rel * self.hi.abs())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Behaviour of `b_j` beyond the explicit head.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    Zero,
    /// `b_j = kappa * j^(-q)` for every `j` past the head.
    Power {
        kappa: f64,
        q: f64,
    },
}

/// A nonnegative sequence indexed from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    head: Vec<f64>,
    tail: Tail,
    head_suffix_max: Vec<f64>,
}

/// Index from which explicit tail summation hands over to the integral bracket.
const EXPLICIT_LIMIT: u64 = 1024;

impl WeightSequence {
    pub fn new(head: Vec<f64>, tail: Tail) -> Result<Self> {
        for (i, &b) in head.iter().enumerate() {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::InvalidSequence(alloc::format!(
                    "b_{} = {b} is not a finite nonnegative number",
                    i + 1
                )));
            }
        }
        if let Tail::Power { kappa, q } = tail {
            if !(kappa.is_finite() && kappa > 0.0) {
                return Err(Error::InvalidSequence(alloc::format!("kappa = {kappa} must be positive")));
            }
            if !(q.is_finite() && q > 1.0) {
                return Err(Error::InvalidSequence(alloc::format!("q = {q} must exceed 1")));
            }
        }
        let mut head_suffix_max = alloc::vec![0.0f64; head.len() + 1];
        for i in (0..head.len()).rev() {
            head_suffix_max[i] = head_suffix_max[i + 1].max(head[i]);
        }
        Ok(Self { head, tail, head_suffix_max })
    }

    /// Finitely supported sequence.
    pub fn finite(head: Vec<f64>) -> Result<Self> {
        Self::new(head, Tail::Zero)
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn head_len(&self) -> usize {
        self.head.len()
    }

    /// `b_j` for `j >= 1`.
    pub fn value(&self, j: u64) -> f64 {
        assert!(j >= 1, "sequences are indexed from 1");
        if let Some(&b) = self.head.get((j - 1) as usize) {
            return b;
        }
        match self.tail {
            Tail::Zero => 0.0,
            Tail::Power { kappa, q } => kappa * math::powf(j as f64, -q),
        }
    }

    /// `true` when only finitely many entries are positive.
    pub fn finitely_supported(&self) -> bool {
        matches!(self.tail, Tail::Zero)
    }

    /// Index of the last positive entry, if the support is finite.
    pub fn support_end(&self) -> Option<u64> {
        match self.tail {
            Tail::Zero => Some(self.head.iter().rposition(|&b| b > 0.0).map_or(0, |i| i as u64 + 1)),
            Tail::Power { .. } => None,
        }
    }

    /// `sup_{j >= i} b_j`.
    pub fn sup_from(&self, i: u64) -> f64 {
        let i = i.max(1);
        let n = self.head.len() as u64;
        let head_part = if i <= n { self.head_suffix_max[(i - 1) as usize] } else { 0.0 };
        let tail_part = match self.tail {
            Tail::Zero => 0.0,
            Tail::Power { .. } => self.value(i.max(n + 1)),
        };
        head_part.max(tail_part)
    }

    /// `||b||_inf`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_from(1)
    }

    /// Enclosure of `||b||_1`.
    pub fn ell1_norm(&self) -> Interval {
        self.tail_power_sum(1, 1.0)
    }

    /// Enclosure of `sum_j b_j^p`.
    pub fn ellp_norm_p(&self, p: f64) -> Interval {
        self.tail_power_sum(1, p)
    }

    /// Enclosure of `sum_{j >= from} b_j^p` for `p > 0`.
    pub fn tail_power_sum(&self, from: u64, p: f64) -> Interval {
        assert!(p > 0.0 && p.is_finite(), "exponent must be positive");
        let from = from.max(1);
        let n = self.head.len() as u64;
        let mut acc = CertifiedSum::new();
        for j in from..=n {
            let (t, e) = head_power(self.head[(j - 1) as usize], p);
            acc.add(t, e);
        }
        let head = acc.interval();
        match self.tail {
            Tail::Zero => head,
            Tail::Power { kappa, q } => head.add(&power_tail_sum(kappa, q, p, from.max(n + 1))),
        }
    }

    /// Largest `j` with `b_j >= t`, or 0 when there is none.
    pub fn active_dimension(&self, t: f64) -> u64 {
        assert!(t > 0.0, "threshold must be positive");
        let mut last = self.head.iter().rposition(|&b| b >= t).map_or(0, |i| i as u64 + 1);
        if let Tail::Power { kappa, q } = self.tail {
            let n = self.head.len() as u64;
            let x = math::powf(kappa / t, 1.0 / q);
            if x.is_finite() && x >= (n + 1) as f64 {
                let mut j = math::floor(x) as u64;
                while j > n && self.value(j) < t {
                    j -= 1;
                }
                while self.value(j + 1) >= t {
                    j += 1;
                }
                if j > n {
                    last = last.max(j);
                }
            }
        }
        last
    }
}

/// `b^p` and a bound on its rounding error.
fn head_power(b: f64, p: f64) -> (f64, f64) {
    if b == 0.0 {
        (0.0, 0.0)
    } else if p == 1.0 {
        (b, 0.0)
    } else if p == 2.0 {
        let t = b * b;
        (t, math::fma(b, b, -t).abs())
    } else {
        let t = math::powf(b, p);
        (t, t * LIBM_REL)
    }
}

/// Enclosure of `sum_{j >= from} kappa^p j^(-qp)`.
fn power_tail_sum(kappa: f64, q: f64, p: f64, from: u64) -> Interval {
    let c = math::powf(kappa, p);
    let e = q * p;
    if e <= 1.0 {
        return Interval::divergent(0.0);
    }
    let mut acc = CertifiedSum::new();
    let start = from;
    let limit = from.max(EXPLICIT_LIMIT);
    for j in start..limit {
        let t = c * math::powf(j as f64, -e);
        acc.add(t, 3.0 * LIBM_REL * t);
    }
    let l = limit as f64;
    let lo = c * (math::powf(l, 1.0 - e) / (e - 1.0) + 0.5 * math::powf(l, -e));
    let hi = c * math::powf(l - 0.5, 1.0 - e) / (e - 1.0);
    let rem = Interval::new(lo * (1.0 - 8.0 * LIBM_REL), hi * (1.0 + 8.0 * LIBM_REL));
    acc.interval().add(&rem)
}

/// Suffix enclosures `sum_{j >= i} b_j^p` for a fixed `p`, cached per index.
#[derive(Clone, Debug)]
pub struct SuffixTable {
    /// `cache[i - 1]` encloses `sum_{j >= i} b_j^p` for `i` up to the cache length.
    cache: Vec<Interval>,
    seq: WeightSequence,
    p: f64,
}

impl SuffixTable {
    pub fn new(seq: &WeightSequence, p: f64) -> Self {
        let n = seq.head_len() as u64;
        let cached = match seq.tail {
            Tail::Zero => n + 1,
            Tail::Power { .. } => n.max(EXPLICIT_LIMIT) + 1,
        };
        let base = seq.tail_power_sum(cached, p);
        let mut cache = alloc::vec![base; cached as usize];
        let mut acc = CertifiedSum::new();
        for i in (1..cached).rev() {
            let b = seq.value(i);
            let (t, e) = match seq.tail {
                Tail::Power { .. } if i > n => {
                    let t = math::powf(b, p);
                    (t, 4.0 * LIBM_REL * t)
                }
                _ => head_power(b, p),
            };
            acc.add(t, e);
            cache[(i - 1) as usize] = acc.interval().add(&base);
        }
        Self { cache, seq: seq.clone(), p }
    }

    /// Enclosure of `sum_{j >= i} b_j^p`.
    pub fn get(&self, i: u64) -> Interval {
        let i = i.max(1);
        match self.cache.get((i - 1) as usize) {
            Some(&iv) => iv,
            None => self.seq.tail_power_sum(i, self.p),
        }
    }

    /// Upper bound on `sum_{j >= i} b_j^p`.
    pub fn upper(&self, i: u64) -> f64 {
        self.get(i).hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn finite_l1_is_exact() {
        let b = WeightSequence::finite(vec![0.5, 0.25]).unwrap();
        assert_eq!(b.ell1_norm(), Interval::point(0.75));
        assert_eq!(b.ellp_norm_p(2.0), Interval::point(0.3125));
    }

    #[test]
    fn zeta_tail_enclosure() {
        let b = WeightSequence::new(vec![], Tail::Power { kappa: 1.0, q: 2.0 }).unwrap();
        let iv = b.ell1_norm();
        let truth = core::f64::consts::PI * core::f64::consts::PI / 6.0;
        assert!(iv.contains(truth), "{iv}");
        assert!(iv.width() < 1e-9, "{iv}");
    }

    #[test]
    fn zeta3_from_offset() {
        let b = WeightSequence::new(vec![0.25, 0.125], Tail::Power { kappa: 1.0 / 16.0, q: 3.0 }).unwrap();
        let zeta3 = 1.202_056_903_159_594_2;
        let truth = 0.375 + (zeta3 - 1.0 - 0.125) / 16.0;
        let iv = b.ell1_norm();
        assert!(iv.contains(truth), "{iv} vs {truth}");
        assert!(iv.width() < 1e-10);
    }

    #[test]
    fn divergent_power() {
        let b = WeightSequence::new(vec![], Tail::Power { kappa: 1.0, q: 2.0 }).unwrap();
        assert!(b.ellp_norm_p(0.5).is_divergent());
        assert!(!b.ellp_norm_p(0.6).is_divergent());
    }

    #[test]
    fn active_dimension_cases() {
        let b = WeightSequence::new(vec![0.5, 0.1], Tail::Power { kappa: 1.0, q: 2.0 }).unwrap();
        assert_eq!(b.active_dimension(0.6), 0);
        assert_eq!(b.active_dimension(0.5), 1);
        assert_eq!(b.active_dimension(0.1), 3);
        assert_eq!(b.active_dimension(0.01), 10);
        let f = WeightSequence::finite(vec![0.5, 0.0, 0.2]).unwrap();
        assert_eq!(f.active_dimension(0.1), 3);
        assert_eq!(f.support_end(), Some(3));
    }

    #[test]
    fn suffix_table_bounds_tail_sums() {
        let b = WeightSequence::new(vec![0.3, 0.2], Tail::Power { kappa: 0.5, q: 2.5 }).unwrap();
        let t = SuffixTable::new(&b, 0.7);
        for i in [1u64, 2, 3, 10, 500, 1024, 1025, 5000] {
            let iv = b.tail_power_sum(i, 0.7);
            let c = t.get(i);
            assert!(c.hi >= iv.lo && c.lo <= iv.hi, "i = {i}");
            assert!(c.width() <= 1e-6 * c.hi, "i = {i}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(WeightSequence::finite(vec![-0.1]).is_err());
        assert!(WeightSequence::new(vec![], Tail::Power { kappa: 1.0, q: 1.0 }).is_err());
    }
}
