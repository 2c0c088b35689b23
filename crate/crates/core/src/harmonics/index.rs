//! Multi-indices 𝐦 = (m₁,…,m_{d−1}) labelling real harmonics of degree ℓ.
//!
//! Order: lexicographic in (m₁,…,m_{d−2}, |m_{d−1}|) with a negative last
//! component placed right after its positive partner. M(ℓ) is then a prefix
//! of M(ℓ+1), so positions inside a degree do not depend on ℓ.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<i32>);

impl MultiIndex {
    /// The zonal index 𝟎 on S^d.
    pub fn zero(d: usize) -> Self {
        Self(vec![0; d - 1])
    }

    pub fn components(&self) -> &[i32] {
        &self.0
    }

    /// Order of the outermost associated Legendre factor: m₁, or |m₁| on S².
    pub fn top_order(&self) -> usize {
        match self.0.len() {
            0 => 0,
            1 => self.0[0].unsigned_abs() as usize,
            _ => self.0[0].max(0) as usize,
        }
    }

    pub fn is_zonal(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }

    /// Whether ℓ ≥ m₁ ≥ … ≥ m_{d−2} ≥ |m_{d−1}| holds on S^d.
    pub fn is_valid(&self, d: usize, l: usize) -> bool {
        if d < 2 || self.0.len() != d - 1 {
            return false;
        }
        let mut prev = l as i64;
        let last = self.0.len() - 1;
        for (i, &m) in self.0.iter().enumerate() {
            let v = if i == last { (m as i64).abs() } else { m as i64 };
            if v < 0 || v > prev {
                return false;
            }
            prev = v;
        }
        true
    }

    /// Degree chain (ℓ, m₁, …, m_{d−2}, |m_{d−1}|).
    pub fn chain(&self, l: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(l);
        out.extend(self.0.iter().map(|m| m.unsigned_abs() as usize));
        out
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of degree-ℓ harmonics on S^d: (2ℓ+d−1)(ℓ+d−2)!/(ℓ!(d−1)!).
pub fn harmonic_count(d: usize, l: usize) -> usize {
    if d == 1 {
        return if l == 0 { 1 } else { 2 };
    }
    let (d, l) = (d as u128, l as u128);
    ((2 * l + d - 1) * binomial(l + d - 2, l) / (d - 1)) as usize
}

/// Signed orders 0, 1, −1, 2, −2, … up to |m| ≤ bound.
fn circle_orders(bound: usize) -> impl Iterator<Item = i32> {
    (0..=bound as i32).flat_map(|m| if m == 0 { vec![0] } else { vec![m, -m] })
}

/// All chains (c₀ ≥ c₁ ≥ … ≥ |c_{len−1}|) with c₀ ≤ bound, the last entry
/// signed, in canonical order. `len` = 1 gives the circle orders.
pub fn chains(len: usize, bound: usize) -> Vec<Vec<i32>> {
    if len == 1 {
        return circle_orders(bound).map(|m| vec![m]).collect();
    }
    let mut out = Vec::new();
    for c0 in 0..=bound {
        for rest in chains(len - 1, c0) {
            let mut v = Vec::with_capacity(len);
            v.push(c0 as i32);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// M(ℓ) on S^d in canonical order.
pub fn multi_indices(d: usize, l: usize) -> Vec<MultiIndex> {
    assert!(d >= 2, "spheres of dimension at least 2");
    chains(d - 1, l).into_iter().map(MultiIndex).collect()
}

/// Shared index bookkeeping for fields on S^d up to degree `lmax`.
#[derive(Debug)]
pub struct IndexTable {
    pub d: usize,
    pub lmax: usize,
    /// M(lmax); M(ℓ) is the prefix of length `counts[ℓ]`.
    pub list: Vec<MultiIndex>,
    pub counts: Vec<usize>,
    position: HashMap<MultiIndex, usize>,
}

impl IndexTable {
    fn build(d: usize, lmax: usize) -> Self {
        let list = multi_indices(d, lmax);
        let counts = (0..=lmax).map(|l| harmonic_count(d, l)).collect();
        let position = list.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Self { d, lmax, list, counts, position }
    }

    /// Shared table, built once per (d, lmax).
    pub fn get(d: usize, lmax: usize) -> Arc<IndexTable> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<IndexTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("index cache poisoned");
        guard.entry((d, lmax)).or_insert_with(|| Arc::new(IndexTable::build(d, lmax))).clone()
    }

    /// Position of 𝐦 inside M(ℓ), if 𝐦 ∈ M(ℓ).
    pub fn position(&self, l: usize, m: &MultiIndex) -> Option<usize> {
        if l > self.lmax {
            return None;
        }
        self.position.get(m).copied().filter(|&p| p < self.counts[l])
    }

    pub fn indices(&self, l: usize) -> &[MultiIndex] {
        &self.list[..self.counts[l]]
    }

    /// Total number of (ℓ, 𝐦) pairs.
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_enumeration() {
        for d in 2..=6 {
            for l in 0..=6 {
                assert_eq!(multi_indices(d, l).len(), harmonic_count(d, l), "d={d} l={l}");
            }
        }
        assert_eq!(harmonic_count(3, 2), 9);
        assert_eq!(harmonic_count(2, 0), 1);
    }

    #[test]
    fn prefix_property() {
        for d in 2..=5 {
            let big = multi_indices(d, 5);
            for l in 0..5 {
                let small = multi_indices(d, l);
                assert_eq!(&big[..small.len()], &small[..]);
            }
        }
    }

    #[test]
    fn validity() {
        assert!(MultiIndex(vec![1, 1, 1, -1]).is_valid(5, 1));
        assert!(!MultiIndex(vec![1, 2, 0, 0]).is_valid(5, 3));
        assert!(!MultiIndex(vec![2, 0]).is_valid(3, 1));
        assert!(!MultiIndex(vec![0]).is_valid(3, 1));
        assert!(MultiIndex(vec![-2]).is_valid(2, 2));
    }
}
