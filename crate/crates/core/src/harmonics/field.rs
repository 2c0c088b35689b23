//! Truncated coefficient tables F̂(ℓ,𝐦) and data pairs (F₀, F₁).

use std::sync::Arc;

use crate::error::{param, Result};
use crate::harmonics::index::{IndexTable, MultiIndex};
use crate::scalar::Real;

/// Real spherical-harmonic coefficients on S^d for degrees ℓ ≤ lmax, stored
/// densely per degree in the canonical order of M(ℓ).
#[derive(Clone, Debug)]
pub struct CoeffField<T> {
    d: usize,
    lmax: usize,
    table: Arc<IndexTable>,
    data: Vec<Vec<T>>,
}

impl<T: Real> PartialEq for CoeffField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.lmax == other.lmax && self.data == other.data
    }
}

impl<T: Real> CoeffField<T> {
    pub fn zeros(d: usize, lmax: usize) -> Self {
        assert!(d >= 2, "spheres of dimension at least 2");
        let table = IndexTable::get(d, lmax);
        let data = (0..=lmax).map(|l| vec![T::zero(); table.counts[l]]).collect();
        Self { d, lmax, table, data }
    }

    /// Field with F̂(ℓ,𝐦) = f(ℓ, 𝐦).
    pub fn from_fn<F: FnMut(usize, &MultiIndex) -> T>(d: usize, lmax: usize, mut f: F) -> Self {
        let mut out = Self::zeros(d, lmax);
        for l in 0..=lmax {
            let table = out.table.clone();
            for (slot, m) in out.data[l].iter_mut().zip(table.indices(l)) {
                *slot = f(l, m);
            }
        }
        out
    }

    /// Single mode with value `v`.
    pub fn mode(d: usize, lmax: usize, l: usize, m: &MultiIndex, v: T) -> Result<Self> {
        let mut out = Self::zeros(d, lmax);
        out.set(l, m, v)?;
        Ok(out)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn table(&self) -> &Arc<IndexTable> {
        &self.table
    }

    pub fn indices(&self, l: usize) -> &[MultiIndex] {
        self.table.indices(l)
    }

    /// Coefficients of degree ℓ (empty beyond lmax).
    pub fn degree(&self, l: usize) -> &[T] {
        self.data.get(l).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn degree_mut(&mut self, l: usize) -> &mut [T] {
        &mut self.data[l]
    }

    /// F̂(ℓ,𝐦); zero outside the stored range.
    pub fn get(&self, l: usize, m: &MultiIndex) -> T {
        self.table.position(l, m).map(|p| self.data[l][p]).unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, l: usize, m: &MultiIndex, v: T) -> Result<()> {
        if !m.is_valid(self.d, l) {
            return param(format!("index {:?} is not in M({l}) on S^{}", m.0, self.d));
        }
        match self.table.position(l, m) {
            Some(p) => {
                self.data[l][p] = v;
                Ok(())
            }
            None => param(format!("degree {l} exceeds lmax = {}", self.lmax)),
        }
    }

    /// Iterates (ℓ, 𝐦, F̂(ℓ,𝐦)).
    pub fn iter(&self) -> impl Iterator<Item = (usize, &MultiIndex, T)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(move |(l, row)| row.iter().zip(self.table.indices(l)).map(move |(&v, m)| (l, m, v)))
    }

    /// Copy truncated or zero-padded to `lmax`.
    pub fn resized(&self, lmax: usize) -> Self {
        let mut out = Self::zeros(self.d, lmax);
        for l in 0..=lmax.min(self.lmax) {
            out.data[l].copy_from_slice(&self.data[l]);
        }
        out
    }

    pub fn map_degrees<F: FnMut(usize, T) -> T>(&self, mut f: F) -> Self {
        let mut out = self.clone();
        for (l, row) in out.data.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v = f(l, *v);
            }
        }
        out
    }

    pub fn scaled(&self, c: T) -> Self {
        self.map_degrees(|_, v| v * c)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.lmax != other.lmax {
            return param(format!(
                "shape mismatch: (d, lmax) = ({}, {}) vs ({}, {})",
                self.d, self.lmax, other.d, other.lmax
            ));
        }
        Ok(())
    }

    /// self + c·other.
    pub fn axpy(&self, c: T, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (row, orow) in out.data.iter_mut().zip(&other.data) {
            for (v, &w) in row.iter_mut().zip(orow) {
                *v += c * w;
            }
        }
        Ok(out)
    }

    /// Σ F̂Ĝ, the L²(S^d) product.
    pub fn dot(&self, other: &Self) -> Result<T> {
        if self.d != other.d {
            return param("dimension mismatch");
        }
        let mut acc = T::zero();
        for l in 0..=self.lmax.min(other.lmax) {
            for (&a, &b) in self.data[l].iter().zip(&other.data[l]) {
                acc += a * b;
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> T {
        self.iter().map(|(_, _, v)| v * v).sum()
    }

    pub fn max_abs(&self) -> T {
        self.iter().fold(T::zero(), |acc, (_, _, v)| acc.max(v.abs()))
    }

    /// Σ over degrees above `l` of F̂².
    pub fn tail_norm_sq(&self, l: usize) -> T {
        self.iter().filter(|(k, _, _)| *k > l).map(|(_, _, v)| v * v).sum()
    }

    pub fn cast<U: Real>(&self) -> CoeffField<U> {
        CoeffField {
            d: self.d,
            lmax: self.lmax,
            table: self.table.clone(),
            data: self.data.iter().map(|row| row.iter().map(|v| U::lit(v.f64())).collect()).collect(),
        }
    }
}

/// Sphere-side initial data (F₀, F₁) sharing d and lmax.
#[derive(Clone, Debug)]
pub struct DataPair<T> {
    pub f0: CoeffField<T>,
    pub f1: CoeffField<T>,
}

impl<T: Real> PartialEq for DataPair<T> {
    fn eq(&self, other: &Self) -> bool {
        self.f0 == other.f0 && self.f1 == other.f1
    }
}

impl<T: Real> DataPair<T> {
    pub fn new(f0: CoeffField<T>, f1: CoeffField<T>) -> Result<Self> {
        f0.check_shape(&f1)?;
        Ok(Self { f0, f1 })
    }

    pub fn zeros(d: usize, lmax: usize) -> Self {
        Self { f0: CoeffField::zeros(d, lmax), f1: CoeffField::zeros(d, lmax) }
    }

    pub fn d(&self) -> usize {
        self.f0.d()
    }

    pub fn lmax(&self) -> usize {
        self.f0.lmax()
    }

    pub fn resized(&self, lmax: usize) -> Self {
        Self { f0: self.f0.resized(lmax), f1: self.f1.resized(lmax) }
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { f0: self.f0.scaled(c), f1: self.f1.scaled(c) }
    }

    /// self + c·other.
    pub fn axpy(&self, c: T, other: &Self) -> Result<Self> {
        Ok(Self { f0: self.f0.axpy(c, &other.f0)?, f1: self.f1.axpy(c, &other.f1)? })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(T::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    pub fn max_abs(&self) -> T {
        self.f0.max_abs().max(self.f1.max_abs())
    }

    pub fn cast<U: Real>(&self) -> DataPair<U> {
        DataPair { f0: self.f0.cast(), f1: self.f1.cast() }
    }
}
