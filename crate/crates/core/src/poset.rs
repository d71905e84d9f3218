//! Finite posets and the order-theoretic way-below relation.
//!
//! Two readings of the defining quantification are provided: the literal one
//! ranging over arbitrary nonempty subsets whose supremum exists and
//! dominates `y`, and the standard one restricted to directed subsets. In a
//! finite poset a sequence is interchangeable with its finite image, which
//! makes both readings decidable by subset enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Subset enumeration is exponential; way-below queries refuse posets larger
/// than this.
const MAX_ENUM: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPoset", into = "RawPoset")]
pub struct FinitePoset {
    n: usize,
    leq: Vec<bool>, // row-major n*n
}

#[derive(Serialize, Deserialize)]
struct RawPoset {
    n: usize,
    leq: Vec<Vec<bool>>,
}

impl TryFrom<RawPoset> for FinitePoset {
    type Error = Error;
    fn try_from(raw: RawPoset) -> Result<Self> {
        FinitePoset::new(raw.n, raw.leq)
    }
}

impl From<FinitePoset> for RawPoset {
    fn from(p: FinitePoset) -> RawPoset {
        let rows = (0..p.n)
            .map(|i| (0..p.n).map(|j| p.leq[i * p.n + j]).collect())
            .collect();
        RawPoset { n: p.n, leq: rows }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WayBelowVariant {
    /// Arbitrary nonempty subsets with an existing supremum.
    Literal,
    /// Directed subsets only: every pair has an upper bound inside the set.
    Directed,
}

impl FinitePoset {
    /// Validates reflexivity, antisymmetry, and transitivity.
    pub fn new(n: usize, rows: Vec<Vec<bool>>) -> Result<Self> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadPoset("relation matrix must be n by n".into()));
        }
        let leq: Vec<bool> = rows.into_iter().flatten().collect();
        let at = |i: usize, j: usize| leq[i * n + j];
        for i in 0..n {
            if !at(i, i) {
                return Err(Error::BadPoset(format!("not reflexive at {}", i)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && at(i, j) && at(j, i) {
                    return Err(Error::BadPoset(format!("not antisymmetric at ({}, {})", i, j)));
                }
                for k in 0..n {
                    if at(i, j) && at(j, k) && !at(i, k) {
                        return Err(Error::BadPoset(format!(
                            "not transitive at ({}, {}, {})",
                            i, j, k
                        )));
                    }
                }
            }
        }
        Ok(FinitePoset { n, leq })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leq(&self, x: usize, y: usize) -> Result<bool> {
        if x >= self.n || y >= self.n {
            return Err(Error::BadElement);
        }
        Ok(self.leq[x * self.n + y])
    }

    fn le(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.n + y]
    }

    /// Least upper bound of a nonempty set of elements, if it exists.
    pub fn sup(&self, s: &[usize]) -> Result<Option<usize>> {
        if s.is_empty() {
            return Err(Error::Empty("sup of an empty set"));
        }
        for &x in s {
            if x >= self.n {
                return Err(Error::BadElement);
            }
        }
        let mut mask = 0u64;
        for &x in s {
            mask |= 1 << x;
        }
        Ok(self.sup_mask(mask))
    }

    fn sup_mask(&self, mask: u64) -> Option<usize> {
        let ubs: Vec<usize> = (0..self.n)
            .filter(|&u| (0..self.n).all(|s| mask & (1 << s) == 0 || self.le(s, u)))
            .collect();
        ubs.iter().copied().find(|&u0| ubs.iter().all(|&u| self.le(u0, u)))
    }

    fn is_directed_mask(&self, mask: u64) -> bool {
        for i in 0..self.n {
            if mask & (1 << i) == 0 {
                continue;
            }
            for j in i + 1..self.n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let has_ub = (0..self.n)
                    .any(|u| mask & (1 << u) != 0 && self.le(i, u) && self.le(j, u));
                if !has_ub {
                    return false;
                }
            }
        }
        true
    }

    /// `x` way-below `y` under the chosen reading: every qualifying subset
    /// whose supremum dominates `y` already contains a member above `x`.
    pub fn way_below(&self, x: usize, y: usize, variant: WayBelowVariant) -> Result<bool> {
        if x >= self.n || y >= self.n {
            return Err(Error::BadElement);
        }
        if self.n > MAX_ENUM {
            return Err(Error::BadPoset(format!(
                "subset enumeration limited to {} elements",
                MAX_ENUM
            )));
        }
        for mask in 1u64..(1 << self.n) {
            if variant == WayBelowVariant::Directed && !self.is_directed_mask(mask) {
                continue;
            }
            let sup = match self.sup_mask(mask) {
                Some(s) => s,
                None => continue,
            };
            if !self.le(y, sup) {
                continue;
            }
            let dominated = (0..self.n).any(|s| mask & (1 << s) != 0 && self.le(x, s));
            if !dominated {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn way_below_literal(&self, x: usize, y: usize) -> Result<bool> {
        self.way_below(x, y, WayBelowVariant::Literal)
    }

    pub fn way_below_directed(&self, x: usize, y: usize) -> Result<bool> {
        self.way_below(x, y, WayBelowVariant::Directed)
    }

    /// Elements way-below themselves.
    pub fn compact_elements(&self, variant: WayBelowVariant) -> Result<Vec<usize>> {
        (0..self.n)
            .filter_map(|x| match self.way_below(x, x, variant) {
                Ok(true) => Some(Ok(x)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            })
            .collect()
    }
}
