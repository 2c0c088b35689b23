//! Pointwise evaluation of real spherical harmonics.

use crate::error::{Error, Result};
use crate::harmonics::field::CoeffField;
use crate::harmonics::index::MultiIndex;
use crate::harmonics::plan::Plan;
use crate::legendre::{
    assoc_legendre, assoc_legendre_polar, assoc_legendre_polar_table, assoc_legendre_table,
};
use crate::quadrature::gauss_jacobi_symmetric;
use crate::scalar::{sphere_area, Real};

/// Nested polar coordinates of a point on S^d: latitudes t₀ = X₀, t₁, …,
/// t_{d−2} and the final circle angle φ.
#[derive(Clone, Debug, PartialEq)]
pub struct NestedCoords<T> {
    pub t: Vec<T>,
    pub phi: T,
}

impl<T: Real> NestedCoords<T> {
    /// Coordinates of X ∈ S^d; fails when |X| deviates from 1 by more than 1e−12.
    pub fn from_point(x: &[T]) -> Result<Self> {
        let norm: T = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        if x.len() < 3 || (norm - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) {
            return Err(Error::Domain(format!(
                "point of length {} with norm {} is not on a sphere of dimension ≥ 2",
                x.len(),
                norm
            )));
        }
        Ok(Self::from_point_unchecked(x))
    }

    pub(crate) fn from_point_unchecked(x: &[T]) -> Self {
        let d = x.len() - 1;
        let mut t = Vec::with_capacity(d - 1);
        for j in 0..d - 1 {
            let tail: T = x[j..].iter().map(|&v| v * v).sum::<T>().sqrt();
            let tj = if tail > T::zero() { (x[j] / tail).max(-T::one()).min(T::one()) } else { T::one() };
            t.push(tj);
        }
        let phi = x[d].atan2(x[d - 1]);
        Self { t, phi }
    }

    /// Coordinates of (cos R, sin R·ω) with ω ∈ S^{d−1} given as a vector.
    pub fn polar(r: T, omega: &[T]) -> Self {
        let inner = if omega.len() >= 3 {
            Self::from_point_unchecked(omega)
        } else {
            Self { t: Vec::new(), phi: omega[1].atan2(omega[0]) }
        };
        let mut t = vec![r.cos()];
        t.extend(inner.t);
        Self { t, phi: inner.phi }
    }

    /// Cartesian point.
    pub fn point(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.t.len() + 2);
        let mut scale = T::one();
        for &tj in &self.t {
            out.push(scale * tj);
            scale *= ((T::one() - tj) * (T::one() + tj)).max(T::zero()).sqrt();
        }
        out.push(scale * self.phi.cos());
        out.push(scale * self.phi.sin());
        out
    }
}

/// Circle factor Θ_m(φ): 1/√(2π), cos(mφ)/√π (m > 0), sin(|m|φ)/√π (m < 0).
pub fn circle_harmonic<T: Real>(m: i32, phi: T) -> T {
    if m == 0 {
        T::one() / (T::lit(2.0) * T::PI()).sqrt()
    } else if m > 0 {
        (T::of_i(m as i64) * phi).cos() / T::PI().sqrt()
    } else {
        (T::of_i(-(m as i64)) * phi).sin() / T::PI().sqrt()
    }
}

/// Y_{ℓ,𝐦}(X) on S^d.
pub fn eval_y<T: Real>(d: usize, l: usize, m: &MultiIndex, x: &[T]) -> Result<T> {
    if x.len() != d + 1 {
        return Err(Error::Domain(format!("point has {} coordinates, S^{d} needs {}", x.len(), d + 1)));
    }
    if !m.is_valid(d, l) {
        return Err(Error::Parameter(format!("index {:?} is not in M({l}) on S^{d}", m.0)));
    }
    let c = NestedCoords::from_point(x)?;
    Ok(eval_y_nested(l, m, &c))
}

pub(crate) fn eval_y_nested<T: Real>(l: usize, m: &MultiIndex, c: &NestedCoords<T>) -> T {
    let d = c.t.len() + 1;
    let chain = m.chain(l);
    let mut v = circle_harmonic(*m.0.last().expect("d ≥ 2"), c.phi);
    for s in 0..d - 1 {
        v *= assoc_legendre(d - s + 1, chain[s], chain[s + 1], c.t[s]).expect("n ≥ 3");
    }
    v
}

fn level_table<T: Real>(n: usize, lmax: usize, t: T) -> Vec<T> {
    let tab = assoc_legendre_table(n, lmax, t);
    let mut flat = vec![T::zero(); (lmax + 1) * (lmax + 1)];
    for (l, row) in tab.iter().enumerate() {
        for (m, &v) in row.iter().enumerate() {
            flat[l * (lmax + 1) + m] = v;
        }
    }
    flat
}

/// Values of every Y_{ℓ,𝐦} with ℓ ≤ plan.lmax, indexed like stage-0 chains.
/// When `polar_derivative` is set the outermost factor is replaced by its
/// derivative in R where t₀ = cos R.
pub(crate) fn basis_at<T: Real>(plan: &Plan, c: &NestedCoords<T>, polar_derivative: bool) -> Vec<T> {
    let d = plan.d;
    let lmax = plan.lmax;
    let mut vals: Vec<T> = plan.circle.iter().map(|&m| circle_harmonic(m, c.phi)).collect();
    for s in (0..d - 1).rev() {
        let table = if s == 0 && polar_derivative {
            let r = c.t[0].max(-T::one()).min(T::one()).acos();
            let mut flat = vec![T::zero(); (lmax + 1) * (lmax + 1)];
            for l in 0..=lmax {
                for m in 0..=l {
                    flat[l * (lmax + 1) + m] = assoc_legendre_polar(d + 1, l, m, r).expect("n ≥ 3").1;
                }
            }
            flat
        } else {
            level_table(d - s + 1, lmax, c.t[s])
        };
        let mut next = vec![T::zero(); plan.sizes[s]];
        for e in &plan.entries[s] {
            next[e.src as usize] = table[e.nm as usize] * vals[e.dst as usize];
        }
        vals = next;
    }
    vals
}

/// Σ_𝐦 F̂(ℓ,𝐦)Y_{ℓ,𝐦} at the given coordinates, for every ℓ ≤ F.lmax.
pub(crate) fn degree_components_nested<T: Real>(
    f: &CoeffField<T>,
    c: &NestedCoords<T>,
    polar_derivative: bool,
) -> Vec<T> {
    let plan = Plan::get(f.d(), f.lmax());
    let basis = basis_at(&plan, c, polar_derivative);
    let mut out = vec![T::zero(); f.lmax() + 1];
    for (b, &(l, p)) in basis.iter().zip(&plan.to_field) {
        out[l] += *b * f.degree(l)[p];
    }
    out
}

/// Per-degree components of both fields of a pair and their derivatives in
/// the polar angle R (t₀ = cos R), sharing the inner nesting levels.
pub(crate) struct PairComponents<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub da: Vec<T>,
    pub db: Vec<T>,
}

pub(crate) fn pair_components<T: Real>(
    f0: &CoeffField<T>,
    f1: &CoeffField<T>,
    c: &NestedCoords<T>,
) -> PairComponents<T> {
    let plan = Plan::get(f0.d(), f0.lmax());
    let (d, lmax) = (plan.d, plan.lmax);
    let mut vals: Vec<T> = plan.circle.iter().map(|&m| circle_harmonic(m, c.phi)).collect();
    for s in (1..d - 1).rev() {
        let table = level_table(d - s + 1, lmax, c.t[s]);
        let mut next = vec![T::zero(); plan.sizes[s]];
        for e in &plan.entries[s] {
            next[e.src as usize] = table[e.nm as usize] * vals[e.dst as usize];
        }
        vals = next;
    }
    let r = c.t[0].max(-T::one()).min(T::one()).acos();
    let (value, deriv) = assoc_legendre_polar_table(d + 1, lmax, r);
    let z = || vec![T::zero(); lmax + 1];
    let mut out = PairComponents { a: z(), b: z(), da: z(), db: z() };
    for (e, &(l, p)) in plan.entries[0].iter().zip(&plan.to_field) {
        let inner = vals[e.dst as usize];
        let (x0, x1) = (f0.degree(l)[p] * inner, f1.degree(l)[p] * inner);
        let (v, dv) = (value[e.nm as usize], deriv[e.nm as usize]);
        out.a[l] += v * x0;
        out.b[l] += v * x1;
        out.da[l] += dv * x0;
        out.db[l] += dv * x1;
    }
    out
}

/// Per-degree components of F at X.
pub fn degree_components<T: Real>(f: &CoeffField<T>, x: &[T]) -> Result<Vec<T>> {
    if x.len() != f.d() + 1 {
        return Err(Error::Domain("point dimension does not match the field".into()));
    }
    let c = NestedCoords::from_point(x)?;
    Ok(degree_components_nested(f, &c, false))
}

/// Partial sum Σ F̂(ℓ,𝐦)Y_{ℓ,𝐦}(X) over ℓ ≤ lmax.
pub fn synthesize<T: Real>(f: &CoeffField<T>, x: &[T]) -> Result<T> {
    Ok(degree_components(f, x)?.into_iter().sum())
}

/// Y_{2,𝟎}(X₀) from the Rodrigues formula
/// R·(1−t²)^{−(d−2)/2}·(d/dt)²(1−t²)^{(d+2)/2} with R > 0 fixed by unit norm.
pub fn zonal_rodrigues<T: Real>(d: usize, x0: T) -> T {
    let q = T::of(d + 2) / T::lit(2.0);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let g = |t: T| -two * q * (T::one() - t * t) + four * q * (q - T::one()) * t * t;
    let rule = gauss_jacobi_symmetric::<T>(4, d as i32 - 2).expect("valid rule");
    let mass = rule.integrate(|t| g(t) * g(t)) * sphere_area::<T>(d - 1);
    g(x0) / mass.sqrt()
}
