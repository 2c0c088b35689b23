//! The symmetry group Γ_α acting on lifted data, and its generators at f⋆.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::harmonics::{CoeffField, DataPair, NormFamily, SphereGrid};
use crate::penrose::solution::{Boosted, Dilated, ExtremizerSolution, Solution, SpectralSolution};
use crate::penrose::{fstar, lift_exponent, lift_values, stereographic_inverse};
use crate::scalar::{omega, Real};

/// Parameters of c·Γ_α with α = (t₀, θ, ζ, σ, x₀).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupParams<T> {
    pub c: T,
    pub t0: T,
    pub theta: T,
    /// Boost rapidities, one per axis; empty for the energy group.
    pub zeta: Vec<T>,
    pub sigma: T,
    pub x0: Vec<T>,
}

impl<T: Real> GroupParams<T> {
    pub fn identity(d: usize, family: NormFamily) -> Self {
        let nz = match family {
            NormFamily::HalfWave => d,
            NormFamily::Energy => 0,
        };
        Self {
            c: T::one(),
            t0: T::zero(),
            theta: T::zero(),
            zeta: vec![T::zero(); nz],
            sigma: T::zero(),
            x0: vec![T::zero(); d],
        }
    }

    /// Number of group coordinates (c excluded).
    pub fn dof(d: usize, family: NormFamily) -> usize {
        Self::identity(d, family).to_vec().len()
    }

    /// (t₀, θ, ζ, σ, x₀) flattened.
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = vec![self.t0, self.theta];
        v.extend(&self.zeta);
        v.push(self.sigma);
        v.extend(&self.x0);
        v
    }

    pub fn from_vec(c: T, v: &[T], d: usize, family: NormFamily) -> Result<Self> {
        let nz = Self::identity(d, family).zeta.len();
        if v.len() != 3 + nz + d {
            return param(format!("expected {} group coordinates, got {}", 3 + nz + d, v.len()));
        }
        Ok(Self {
            c,
            t0: v[0],
            theta: v[1],
            zeta: v[2..2 + nz].to_vec(),
            sigma: v[2 + nz],
            x0: v[3 + nz..].to_vec(),
        })
    }

    pub fn validate(&self, d: usize, family: NormFamily) -> Result<()> {
        if family == NormFamily::Energy && !self.zeta.is_empty() {
            return param("the energy-space group has no Lorentz boosts");
        }
        if !self.zeta.is_empty() && self.zeta.len() != d {
            return param(format!("boost vector has length {}, expected {}", self.zeta.len(), d));
        }
        if self.x0.len() != d {
            return param(format!("translation has length {}, expected {}", self.x0.len(), d));
        }
        if !self.to_vec().iter().all(|v| v.is_finite()) || !self.c.is_finite() {
            return param("group parameters must be finite");
        }
        Ok(())
    }

    fn moves_space(&self) -> bool {
        self.sigma != T::zero() || self.x0.iter().chain(&self.zeta).any(|&v| v != T::zero())
    }
}

/// Resampling configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryOptions {
    /// Extra degrees kept while resampling; the tail is measured over them.
    pub pad: usize,
    /// Relative tail energy above which a warning is attached.
    pub tail_threshold: f64,
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        Self { pad: 8, tail_threshold: 1e-8 }
    }
}

/// Projected data together with the relative norm² discarded by truncation.
#[derive(Clone, Debug)]
pub struct Lifted<T> {
    pub data: DataPair<T>,
    pub tail: T,
    pub warning: Option<String>,
}

fn sample_lift<T: Real, S: Solution<T> + ?Sized>(
    sol: &S,
    t: T,
    grid: &SphereGrid<T>,
    level: usize,
) -> Result<DataPair<T>> {
    let d = grid.d();
    let mut v0 = Vec::with_capacity(grid.len());
    let mut v1 = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let xs = grid.coords(i).point();
        let x = stereographic_inverse(&xs)?;
        let (u, ut) = sol.value(t, &x);
        let (a, b) = lift_values(d, xs[0], u, ut);
        v0.push(a);
        v1.push(b);
    }
    DataPair::new(grid.analyze(&v0, level)?, grid.analyze(&v1, level)?)
}

fn truncate<T: Real>(
    full: DataPair<T>,
    lmax: usize,
    family: NormFamily,
    opts: &SymmetryOptions,
) -> Result<Lifted<T>> {
    let data = full.resized(lmax);
    let total = family.norm_sq(&full)?;
    let lost = family.norm_sq(&full.sub(&data.resized(full.lmax()))?)?;
    let tail = if total > T::zero() { lost / total } else { T::zero() };
    let warning = (tail.f64() > opts.tail_threshold)
        .then(|| format!("projection onto degree ≤ {} discarded relative norm² {:e}", lmax, tail.f64()));
    Ok(Lifted { data, tail, warning })
}

/// Lift the data of a physical solution at time t, projected to degree ≤ lmax.
pub fn lift_solution<T: Real, S: Solution<T> + ?Sized>(
    sol: &S,
    t: T,
    lmax: usize,
    family: NormFamily,
    opts: &SymmetryOptions,
) -> Result<Lifted<T>> {
    let level = lmax + opts.pad;
    let grid = SphereGrid::for_lmax(sol.dim(), level)?;
    truncate(sample_lift(sol, t, &grid, level)?, lmax, family, opts)
}

/// Ph_θ in coefficient space.
pub fn phase_shift<T: Real>(data: &DataPair<T>, theta: T) -> DataPair<T> {
    let d = data.d();
    let (s, c) = theta.sin_cos();
    let mut out = data.clone();
    for l in 0..=data.lmax() {
        let w = omega::<T>(d, l);
        let (a, b) = (data.f0.degree(l), data.f1.degree(l));
        for i in 0..a.len() {
            out.f0.degree_mut(l)[i] = c * a[i] + s * b[i] / w;
            out.f1.degree_mut(l)[i] = -s * w * a[i] + c * b[i];
        }
    }
    out
}

fn transform<T: Real>(
    alpha: &GroupParams<T>,
    base: &dyn Solution<T>,
    start: DataPair<T>,
    lmax: usize,
    family: NormFamily,
    opts: &SymmetryOptions,
) -> Result<Lifted<T>> {
    let d = start.d();
    alpha.validate(d, family)?;
    let level = lmax + opts.pad;
    let grid = SphereGrid::for_lmax(d, level)?;
    let dil = Dilated { inner: base, s: family.scaling(d), sigma: alpha.sigma, x0: alpha.x0.clone() };
    let boosted;
    let moved: &dyn Solution<T> = if alpha.zeta.iter().any(|&z| z != T::zero()) {
        boosted = Boosted::new(&dil, &alpha.zeta);
        &boosted
    } else if alpha.moves_space() {
        &dil
    } else {
        base
    };
    // S_{t₀} and Ph_θ are both functions of √−Δ and commute, so the time
    // translation is sampled pointwise and the phase applied in coefficient space.
    let sampled = if alpha.moves_space() || alpha.t0 != T::zero() {
        sample_lift(moved, alpha.t0, &grid, level)?
    } else {
        start.resized(level)
    };
    let cur = if alpha.theta == T::zero() { sampled } else { phase_shift(&sampled, alpha.theta) };
    let mut out = truncate(cur, lmax, family, opts)?;
    out.data = out.data.scaled(alpha.c);
    Ok(out)
}

/// c·Γ_α applied to lifted data, for the group belonging to `family`.
pub fn apply_symmetry_with<T: Real>(
    alpha: &GroupParams<T>,
    data: &DataPair<T>,
    family: NormFamily,
    opts: &SymmetryOptions,
) -> Result<Lifted<T>> {
    let base = SpectralSolution::new(data.clone());
    transform(alpha, &base, data.clone(), data.lmax(), family, opts)
}

/// c·Γ_α with the group of `NormFamily::for_dim(d)` and default options.
pub fn apply_symmetry<T: Real>(alpha: &GroupParams<T>, data: &DataPair<T>) -> Result<Lifted<T>> {
    apply_symmetry_with(alpha, data, NormFamily::for_dim(data.d()), &SymmetryOptions::default())
}

/// c·Γ_α f⋆ using the closed-form extremizer solution.
pub fn fstar_orbit<T: Real>(
    alpha: &GroupParams<T>,
    d: usize,
    lmax: usize,
    family: NormFamily,
    opts: &SymmetryOptions,
) -> Result<Lifted<T>> {
    let base = ExtremizerSolution { d };
    transform(alpha, &base, fstar(d, lmax), lmax, family, opts)
}

/// Lifted values (F₀, F₁) of Γ_α f⋆ at the points of `grid`, without
/// projection. The phase acts in coefficient space, so θ must be zero.
pub fn fstar_orbit_values<T: Real>(
    alpha: &GroupParams<T>,
    family: NormFamily,
    grid: &SphereGrid<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let d = grid.d();
    alpha.validate(d, family)?;
    if alpha.theta != T::zero() {
        return param("the phase rotation has no pointwise form; apply it to the coefficients");
    }
    let base = ExtremizerSolution { d };
    let dil = Dilated { inner: base, s: family.scaling(d), sigma: alpha.sigma, x0: alpha.x0.clone() };
    let boosted;
    let moved: &dyn Solution<T> = if alpha.zeta.iter().any(|&z| z != T::zero()) {
        boosted = Boosted::new(&dil, &alpha.zeta);
        &boosted
    } else {
        &dil
    };
    let mut v0 = Vec::with_capacity(grid.len());
    let mut v1 = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let xs = grid.coords(i).point();
        let x = stereographic_inverse(&xs)?;
        let (u, ut) = moved.value(alpha.t0, &x);
        let (a, b) = lift_values(d, xs[0], u, ut);
        v0.push(alpha.c * a);
        v1.push(alpha.c * b);
    }
    Ok((v0, v1))
}

/// Images of f⋆ under the group generators, in table order: f⋆, time
/// translation, phase, boosts (Ḣ^{1/2} group only), scaling, translations.
pub fn tangent_basis<T: Real>(d: usize, lmax: usize) -> Result<Vec<DataPair<T>>> {
    let family = match d {
        3 => NormFamily::HalfWave,
        5 => NormFamily::Energy,
        _ => return param(format!("tangent space is available for d = 3 and d = 5, not d = {}", d)),
    };
    if lmax < 1 {
        return param("tangent vectors need lmax ≥ 1");
    }
    let k = lift_exponent::<T>(d);
    let half = T::lit(0.5);
    let grid = SphereGrid::<T>::for_lmax(d, 1)?;
    let field = |f: &dyn Fn(&[T]) -> T| -> Result<CoeffField<T>> { Ok(grid.project(f, 1)?.resized(lmax)) };
    let zero = CoeffField::zeros(d, lmax);
    let mut out = vec![fstar(d, lmax)];
    out.push(DataPair::new(zero.clone(), field(&|x| -k * (k + (k + T::one()) * x[0]))?)?);
    out.push(DataPair::new(zero.clone(), field(&|_| -k)?)?);
    if family == NormFamily::HalfWave {
        let dd = T::of(d);
        let c0 = (dd - T::one()) * (dd + T::one()) / T::lit(4.0);
        let c1 = (dd + T::one()) * half;
        for j in 1..=d {
            let f1 = field(&|x| -k * (c0 + c1 * x[0]) * x[j] / (T::one() + x[0]))?;
            out.push(DataPair::new(zero.clone(), f1)?);
        }
    }
    // (s + x·∇)Ω₀^k = Ω₀^k(s − k + kX₀)
    let s = family.scaling::<T>(d);
    out.push(DataPair::new(field(&|x| s - k + k * x[0])?, zero.clone())?);
    for j in 1..=d {
        out.push(DataPair::new(field(&|x| -k * x[j])?, zero.clone())?);
    }
    Ok(out)
}
