//! Tensor-product quadrature grids on S^d with fast synthesis and analysis.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonics::eval::{circle_harmonic, NestedCoords};
use crate::harmonics::field::CoeffField;
use crate::harmonics::plan::Plan;
use crate::legendre::assoc_legendre_table;
use crate::quadrature::{gauss_jacobi_symmetric, periodic_trapezoid, Rule};
use crate::scalar::Real;

#[derive(Clone, Debug)]
struct Level<T> {
    rule: Rule<T>,
    /// Per node: flat table A_n^m(k+1; t) at index n·(lmax+1)+m.
    tables: Vec<Vec<T>>,
}

/// Gauss–Jacobi latitudes on every nesting level (weight (1−t²)^{(k−2)/2} on
/// S^k) and uniform nodes on the final circle. Point order is row-major in
/// (level 0, …, level d−2, circle).
#[derive(Clone, Debug)]
pub struct SphereGrid<T> {
    d: usize,
    lmax: usize,
    plan: Arc<Plan>,
    levels: Vec<Level<T>>,
    circle: Rule<T>,
    theta: Vec<Vec<T>>,
    weights: Vec<T>,
}

impl<T: Real> SphereGrid<T> {
    /// `n_lat` latitude nodes per level and `n_circle` circle nodes, with
    /// Legendre tables up to degree `lmax`.
    pub fn new(d: usize, lmax: usize, n_lat: usize, n_circle: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Parameter("sphere dimension must be at least 2".into()));
        }
        if n_lat == 0 || n_circle == 0 {
            return Err(Error::Configuration("grid sizes must be positive".into()));
        }
        let plan = Plan::get(d, lmax);
        let mut levels = Vec::with_capacity(d - 1);
        for s in 0..d - 1 {
            let k = d - s;
            let rule = gauss_jacobi_symmetric::<T>(n_lat, k as i32 - 2)?;
            let tables = rule
                .nodes
                .iter()
                .map(|&t| {
                    let tab = assoc_legendre_table(k + 1, lmax, t);
                    let mut flat = vec![T::zero(); (lmax + 1) * (lmax + 1)];
                    for (l, row) in tab.iter().enumerate() {
                        for (m, &v) in row.iter().enumerate() {
                            flat[l * (lmax + 1) + m] = v;
                        }
                    }
                    flat
                })
                .collect();
            levels.push(Level { rule, tables });
        }
        let circle = periodic_trapezoid::<T>(n_circle);
        let theta = circle
            .nodes
            .iter()
            .map(|&phi| plan.circle.iter().map(|&m| circle_harmonic(m, phi)).collect())
            .collect();
        let mut weights = vec![T::one()];
        for lvl in &levels {
            weights = weights.iter().flat_map(|&w| lvl.rule.weights.iter().map(move |&v| w * v)).collect();
        }
        weights = weights.iter().flat_map(|&w| circle.weights.iter().map(move |&v| w * v)).collect();
        Ok(Self { d, lmax, plan, levels, circle, theta, weights })
    }

    /// Default grid for fields of degree ≤ lmax: lmax+2 latitudes, 2·lmax+3
    /// circle nodes (exact for polynomial integrands of degree ≤ 2·lmax+2).
    pub fn for_lmax(d: usize, lmax: usize) -> Result<Self> {
        Self::new(d, lmax, lmax + 2, 2 * lmax + 3)
    }

    /// Grid exact for polynomial integrands of degree ≤ `degree`, with tables
    /// for fields up to `lmax`.
    pub fn with_degree(d: usize, lmax: usize, degree: usize) -> Result<Self> {
        let degree = degree.max(2 * lmax);
        Self::new(d, lmax, degree / 2 + 1, degree + 1)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness(&self) -> usize {
        let n = self.levels[0].rule.len();
        (2 * n - 1).min(self.circle.len() - 1)
    }

    /// Nested coordinates of point `idx`.
    pub fn coords(&self, idx: usize) -> NestedCoords<T> {
        let m = self.circle.len();
        let mut rest = idx / m;
        let phi = self.circle.nodes[idx % m];
        let mut t = vec![T::zero(); self.d - 1];
        for s in (0..self.d - 1).rev() {
            let n = self.levels[s].rule.len();
            t[s] = self.levels[s].rule.nodes[rest % n];
            rest /= n;
        }
        NestedCoords { t, phi }
    }

    /// Cartesian coordinates of every grid point, flattened with stride d+1.
    pub fn points(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len() * (self.d + 1));
        for i in 0..self.len() {
            out.extend(self.coords(i).point());
        }
        out
    }

    /// Σ w_i v_i.
    pub fn integrate(&self, values: &[T]) -> T {
        values.iter().zip(&self.weights).map(|(&v, &w)| v * w).sum()
    }

    fn check_field(&self, f: &CoeffField<T>) -> Result<()> {
        if f.d() != self.d || f.lmax() > self.lmax {
            return Err(Error::Configuration(format!(
                "grid for (d, lmax) = ({}, {}) cannot handle a field with ({}, {})",
                self.d,
                self.lmax,
                f.d(),
                f.lmax()
            )));
        }
        Ok(())
    }

    fn contract_down(&self, mut cur: Vec<T>) -> Vec<T> {
        let mut p = 1;
        for s in 0..self.d - 1 {
            let lvl = &self.levels[s];
            let nn = lvl.rule.len();
            let rs = self.plan.sizes[s];
            let rn = self.plan.sizes[s + 1];
            let entries = &self.plan.entries[s];
            let mut next = vec![T::zero(); p * nn * rn];
            for q in 0..p {
                let src = &cur[q * rs..(q + 1) * rs];
                if src.iter().all(|v| v.is_zero()) {
                    continue;
                }
                for (i, table) in lvl.tables.iter().enumerate() {
                    let dst = &mut next[(q * nn + i) * rn..(q * nn + i + 1) * rn];
                    for e in entries {
                        dst[e.dst as usize] += src[e.src as usize] * table[e.nm as usize];
                    }
                }
            }
            cur = next;
            p *= nn;
        }
        let rc = self.plan.sizes[self.d - 1];
        let m = self.circle.len();
        let mut out = vec![T::zero(); p * m];
        for q in 0..p {
            let src = &cur[q * rc..(q + 1) * rc];
            for (j, th) in self.theta.iter().enumerate() {
                out[q * m + j] = src.iter().zip(th).map(|(&a, &b)| a * b).sum();
            }
        }
        out
    }

    fn contract_up(&self, values: &[T]) -> Vec<T> {
        let m = self.circle.len();
        let rc = self.plan.sizes[self.d - 1];
        let mut p = values.len() / m;
        let mut cur = vec![T::zero(); p * rc];
        for q in 0..p {
            for (j, th) in self.theta.iter().enumerate() {
                let v = values[q * m + j] * self.circle.weights[j];
                for (c, &b) in cur[q * rc..(q + 1) * rc].iter_mut().zip(th) {
                    *c += v * b;
                }
            }
        }
        for s in (0..self.d - 1).rev() {
            let lvl = &self.levels[s];
            let nn = lvl.rule.len();
            let rs = self.plan.sizes[s];
            let rn = self.plan.sizes[s + 1];
            let entries = &self.plan.entries[s];
            p /= nn;
            let mut prev = vec![T::zero(); p * rs];
            for q in 0..p {
                let dst = &mut prev[q * rs..(q + 1) * rs];
                for (i, table) in lvl.tables.iter().enumerate() {
                    let w = lvl.rule.weights[i];
                    let src = &cur[(q * nn + i) * rn..(q * nn + i + 1) * rn];
                    for e in entries {
                        dst[e.src as usize] += w * table[e.nm as usize] * src[e.dst as usize];
                    }
                }
            }
            cur = prev;
        }
        cur
    }

    /// Values of F at every grid point.
    pub fn synthesize(&self, f: &CoeffField<T>) -> Result<Vec<T>> {
        self.check_field(f)?;
        let mut r0 = vec![T::zero(); self.plan.sizes[0]];
        for (slot, &(l, p)) in r0.iter_mut().zip(&self.plan.to_field) {
            if l <= f.lmax() {
                *slot = f.degree(l)[p];
            }
        }
        Ok(self.contract_down(r0))
    }

    /// Per-degree values: entry ℓ holds Σ_𝐦 F̂(ℓ,𝐦)Y_{ℓ,𝐦} on the grid.
    pub fn synthesize_degrees(&self, f: &CoeffField<T>) -> Result<Vec<Vec<T>>> {
        self.check_field(f)?;
        let mut out = Vec::with_capacity(f.lmax() + 1);
        for l in 0..=f.lmax() {
            if f.degree(l).iter().all(|v| v.is_zero()) {
                out.push(vec![T::zero(); self.len()]);
                continue;
            }
            let mut r0 = vec![T::zero(); self.plan.sizes[0]];
            for (slot, &(k, p)) in r0.iter_mut().zip(&self.plan.to_field) {
                if k == l {
                    *slot = f.degree(l)[p];
                }
            }
            out.push(self.contract_down(r0));
        }
        Ok(out)
    }

    /// Quadrature projection of grid values onto degrees ≤ lmax.
    pub fn analyze(&self, values: &[T], lmax: usize) -> Result<CoeffField<T>> {
        if values.len() != self.len() {
            return Err(Error::Parameter("value count does not match the grid".into()));
        }
        if lmax > self.lmax || self.levels[0].rule.len() < lmax + 1 || self.circle.len() < 2 * lmax + 1 {
            return Err(Error::Configuration(format!(
                "grid with exactness {} cannot project onto degree {lmax}",
                self.exactness()
            )));
        }
        let r0 = self.contract_up(values);
        let mut out = CoeffField::zeros(self.d, lmax);
        for (&v, &(l, p)) in r0.iter().zip(&self.plan.to_field) {
            if l <= lmax {
                out.degree_mut(l)[p] = v;
            }
        }
        Ok(out)
    }

    /// Projection of a sampled function onto degrees ≤ lmax.
    pub fn project<F: FnMut(&[T]) -> T>(&self, mut sampler: F, lmax: usize) -> Result<CoeffField<T>> {
        let values: Vec<T> = (0..self.len()).map(|i| sampler(&self.coords(i).point())).collect();
        self.analyze(&values, lmax)
    }
}

/// F̂(ℓ,𝐦) = ∫ F·Y_{ℓ,𝐦} dS for ℓ ≤ lmax using the default grid.
pub fn project<T: Real, F: FnMut(&[T]) -> T>(d: usize, lmax: usize, sampler: F) -> Result<CoeffField<T>> {
    SphereGrid::for_lmax(d, lmax)?.project(sampler, lmax)
}
