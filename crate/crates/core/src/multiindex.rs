//! Finitely supported multi-indices and factorial weights.
//!
//! `s` is stored as sorted `(dim, exponent)` pairs with dimensions counted
//! from 1 and zero exponents never stored, so equal indices are
//! structurally equal. The weight is `w(s) = (|s|! / s!) * b^s`, always
//! handled through its logarithm.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{self, ln_factorial};
use crate::sequences::WeightSequence;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: Vec<(u32, u32)>,
}

impl MultiIndex {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from `(dim, exponent)` pairs; dimensions must be strictly increasing
    /// and at least 1, exponents at least 1.
    pub fn from_entries(entries: Vec<(u32, u32)>) -> Result<Self> {
        for (i, &(d, e)) in entries.iter().enumerate() {
            if d == 0 {
                return Err(Error::InvalidMultiIndex("dimensions are counted from 1".into()));
            }
            if e == 0 {
                return Err(Error::InvalidMultiIndex(alloc::format!("zero exponent stored for dimension {d}")));
            }
            if i > 0 && entries[i - 1].0 >= d {
                return Err(Error::InvalidMultiIndex("dimensions must be strictly increasing".into()));
            }
        }
        Ok(Self { entries })
    }

    /// Builds from a dense exponent vector, `dense[0]` being dimension 1.
    pub fn from_dense(dense: &[u32]) -> Self {
        let entries = dense.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i as u32 + 1, e)).collect();
        Self { entries }
    }

    /// The unit index `e_dim`.
    pub fn unit(dim: u32) -> Result<Self> {
        Self::from_entries(alloc::vec![(dim, 1)])
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exponent in dimension `dim`.
    pub fn get(&self, dim: u32) -> u32 {
        match self.entries.binary_search_by_key(&dim, |&(d, _)| d) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    /// `|s|_1`.
    pub fn degree(&self) -> u64 {
        self.entries.iter().map(|&(_, e)| e as u64).sum()
    }

    /// Largest dimension in the support.
    pub fn max_dim(&self) -> Option<u32> {
        self.entries.last().map(|&(d, _)| d)
    }

    /// `s` with exponent `exp` in dimension `dim` (replacing any existing entry).
    pub fn with_exponent(&self, dim: u32, exp: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMultiIndex("dimensions are counted from 1".into()));
        }
        let mut entries = self.entries.clone();
        match entries.binary_search_by_key(&dim, |&(d, _)| d) {
            Ok(i) if exp == 0 => {
                entries.remove(i);
            }
            Ok(i) => entries[i].1 = exp,
            Err(_) if exp == 0 => {}
            Err(i) => entries.insert(i, (dim, exp)),
        }
        Ok(Self { entries })
    }

    /// `s + e_dim`.
    pub fn incremented(&self, dim: u32) -> Result<Self> {
        let e = self.get(dim).checked_add(1).ok_or(Error::Overflow)?;
        self.with_exponent(dim, e)
    }

    /// `s - e_dim`, or `None` when the exponent is already zero.
    pub fn decremented(&self, dim: u32) -> Option<Self> {
        let e = self.get(dim);
        if e == 0 {
            None
        } else {
            self.with_exponent(dim, e - 1).ok()
        }
    }

    /// `ln(|s|! / s!)`.
    pub fn log_multinomial(&self) -> f64 {
        ln_factorial(self.degree()) - self.entries.iter().map(|&(_, e)| ln_factorial(e as u64)).sum::<f64>()
    }

    /// `ln w(s)` for the weight sequence `b`.
    pub fn log_weight(&self, b: &WeightSequence) -> Result<f64> {
        let mut lw = self.log_multinomial();
        for &(d, e) in &self.entries {
            let bj = b.value(d as u64);
            if bj == 0.0 {
                return Err(Error::ZeroWeight { dim: d });
            }
            lw += e as f64 * math::ln(bj);
        }
        Ok(lw)
    }

    /// `w(s)`; zero when `s` touches a zero weight.
    pub fn weight(&self, b: &WeightSequence) -> f64 {
        self.log_weight(b).map_or(0.0, math::exp)
    }

    /// Order by degree first, then lexicographically.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (d, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}:{e}")?;
        }
        f.write_str("}")
    }
}
