//! Conformal compactification of Minkowski space into the Einstein cylinder.
//!
//! A point (t, x) ∈ ℝ^{1+d} maps to (T, X) ∈ ℝ×S^d with X = (cos R, sin R·ω).
//! Fields are related by u = Ω^k·(U∘𝒫), k = (d−1)/2, and U solves the
//! shifted wave equation U_TT = Δ_S U − k²U on the cylinder.

mod solution;
mod symmetry;

pub use solution::{Boosted, Dilated, ExtremizerSolution, Scaled, Solution, SpectralSolution};
pub use symmetry::{
    apply_symmetry, apply_symmetry_with, fstar_orbit, fstar_orbit_values, lift_solution, phase_shift,
    tangent_basis, GroupParams, Lifted, SymmetryOptions,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::eval::{pair_components, PairComponents};
use crate::harmonics::{CoeffField, DataPair, NestedCoords};
use crate::scalar::{omega, sphere_area, Real};

/// Cylinder coordinates (T, R, ω): time, polar angle from the north pole, and direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint<T> {
    pub time: T,
    pub polar: T,
    pub omega: Vec<T>,
}

impl<T: Real> CylinderPoint<T> {
    /// Whether the point lies in the image −π < T < π, 0 ≤ R ≤ π − |T|.
    pub fn in_image(&self) -> bool {
        let pi = T::PI();
        self.time.abs() < pi && self.polar >= T::zero() && self.polar <= pi - self.time.abs()
    }

    /// Embedding X = (cos R, sin R·ω) ∈ S^d.
    pub fn sphere_point(&self) -> Vec<T> {
        let (s, c) = self.polar.sin_cos();
        let mut x = Vec::with_capacity(self.omega.len() + 1);
        x.push(c);
        x.extend(self.omega.iter().map(|&w| s * w));
        x
    }

    pub(crate) fn nested(&self) -> NestedCoords<T> {
        NestedCoords::polar(self.polar, &self.omega)
    }
}

fn norm<T: Real>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum::<T>().sqrt()
}

fn direction<T: Real>(x: &[T], r: T) -> Vec<T> {
    if r > T::zero() {
        x.iter().map(|&v| v / r).collect()
    } else {
        let mut e = vec![T::zero(); x.len()];
        e[0] = T::one();
        e
    }
}

/// Penrose map (t, x) ↦ (T, R, ω).
pub fn forward<T: Real>(t: T, x: &[T]) -> CylinderPoint<T> {
    let r = norm(x);
    // atan(t+r) ± atan(t−r) as arguments of (1+i(t+r))(1±i(t−r)); no cancellation for large t.
    let two = T::lit(2.0);
    let time = (two * t).atan2(T::one() - (t - r) * (t + r));
    let polar = (two * r).atan2(T::one() + (t - r) * (t + r));
    CylinderPoint { time, polar, omega: direction(x, r) }
}

/// Inverse map from t ± r = tan((T ± R)/2).
pub fn inverse<T: Real>(p: &CylinderPoint<T>) -> Result<(T, Vec<T>)> {
    let pi = T::PI();
    if !(p.polar >= T::zero()) || p.time.abs() + p.polar >= pi {
        return Err(Error::Infinity(format!(
            "cylinder point (T={}, R={}) is not strictly inside the image",
            p.time, p.polar
        )));
    }
    let half = T::lit(0.5);
    let a = ((p.time + p.polar) * half).tan();
    let b = ((p.time - p.polar) * half).tan();
    let t = (a + b) * half;
    let r = (a - b) * half;
    if !t.is_finite() || !r.is_finite() {
        return Err(Error::Infinity("inverse Penrose map overflowed".into()));
    }
    Ok((t, p.omega.iter().map(|&w| r * w).collect()))
}

/// Ω = 2(1+(t+r)²)^{−1/2}(1+(t−r)²)^{−1/2}.
pub fn conformal_factor<T: Real>(t: T, x: &[T]) -> T {
    let r = norm(x);
    let two = T::lit(2.0);
    two / ((T::one() + (t + r) * (t + r)) * (T::one() + (t - r) * (t - r))).sqrt()
}

/// Ω = cos T + cos R in cylinder coordinates.
pub fn conformal_factor_cylinder<T: Real>(p: &CylinderPoint<T>) -> T {
    p.time.cos() + p.polar.cos()
}

/// Ω₀(x) = 2/(1+|x|²), the conformal factor at t = 0.
pub fn omega0<T: Real>(x: &[T]) -> T {
    T::lit(2.0) / (T::one() + x.iter().map(|&v| v * v).sum::<T>())
}

/// Inverse stereographic projection x ↦ X = (Ω₀ − 1, Ω₀x).
pub fn stereographic<T: Real>(x: &[T]) -> Vec<T> {
    let w = omega0(x);
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(w - T::one());
    out.extend(x.iter().map(|&v| w * v));
    out
}

/// Stereographic projection from the south pole, X ↦ X⃗/(1+X₀).
pub fn stereographic_inverse<T: Real>(x: &[T]) -> Result<Vec<T>> {
    let den = T::one() + x[0];
    if den <= T::zero() {
        return Err(Error::Infinity("south pole has no stereographic image".into()));
    }
    Ok(x[1..].iter().map(|&v| v / den).collect())
}

/// Lift exponent k = (d−1)/2.
pub fn lift_exponent<T: Real>(d: usize) -> T {
    T::of(d - 1) / T::lit(2.0)
}

/// The extremizer lifted to the sphere: F₀ = 1, F₁ = 0.
pub fn fstar<T: Real>(d: usize, lmax: usize) -> DataPair<T> {
    let mut f0 = CoeffField::zeros(d, lmax);
    f0.degree_mut(0)[0] = sphere_area::<T>(d).sqrt();
    DataPair { f0, f1: CoeffField::zeros(d, lmax) }
}

/// Spherical propagator: coefficients of U(T) and U_T(T).
pub fn propagate<T: Real>(data: &DataPair<T>, time: T) -> (CoeffField<T>, CoeffField<T>) {
    let d = data.d();
    let mut u = data.f0.clone();
    let mut ut = data.f1.clone();
    for l in 0..=data.lmax() {
        let w = omega::<T>(d, l);
        let (s, c) = (time * w).sin_cos();
        let a = data.f0.degree(l);
        let b = data.f1.degree(l);
        for (i, (du, dut)) in u.degree_mut(l).iter_mut().zip(ut.degree_mut(l)).enumerate() {
            *du = c * a[i] + s / w * b[i];
            *dut = -w * s * a[i] + c * b[i];
        }
    }
    (u, ut)
}

/// U, U_T and U_R of the cylinder solution at (T, R, ω).
pub fn eval_cylinder<T: Real>(data: &DataPair<T>, p: &CylinderPoint<T>) -> (T, T, T) {
    let d = data.d();
    let c = p.nested();
    let PairComponents { a, b, da, db } = pair_components(&data.f0, &data.f1, &c);
    let (mut u, mut u_t, mut u_r) = (T::zero(), T::zero(), T::zero());
    for l in 0..=data.lmax() {
        let w = omega::<T>(d, l);
        let (s, co) = (p.time * w).sin_cos();
        u += co * a[l] + s / w * b[l];
        u_t += -w * s * a[l] + co * b[l];
        u_r += co * da[l] + s / w * db[l];
    }
    (u, u_t, u_r)
}

/// Physical solution u and u_t at (t, x) for lifted initial data.
pub fn eval_solution<T: Real>(data: &DataPair<T>, t: T, x: &[T]) -> Result<(T, T)> {
    if x.len() != data.d() {
        return Err(Error::Parameter(format!(
            "point has {} coordinates, data live in dimension {}",
            x.len(),
            data.d()
        )));
    }
    Ok(eval_solution_unchecked(data, t, x))
}

pub(crate) fn eval_solution_unchecked<T: Real>(data: &DataPair<T>, t: T, x: &[T]) -> (T, T) {
    let k = lift_exponent::<T>(data.d());
    let r = norm(x);
    let p = forward(t, x);
    let a = T::one() + (t + r) * (t + r);
    let b = T::one() + (t - r) * (t - r);
    let om = T::lit(2.0) / (a * b).sqrt();
    let time_t = a.recip() + b.recip();
    let polar_t = a.recip() - b.recip();
    let om_t = -om * ((t + r) / a + (t - r) / b);
    let (u, u_time, u_polar) = eval_cylinder(data, &p);
    let omk = om.powf(k);
    let val = omk * u;
    let dt = k * omk / om * om_t * u + omk * (u_time * time_t + u_polar * polar_t);
    (val, dt)
}

/// Physical data (f₀(x), f₁(x)) of lifted data.
pub fn push_physical<T: Real>(data: &DataPair<T>, x: &[T]) -> Result<(T, T)> {
    eval_solution(data, T::zero(), x)
}

/// Lifted values (F₀, F₁) at X from physical values (f₀, f₁) at x = 𝒫₀⁻¹(X).
pub fn lift_values<T: Real>(d: usize, x0: T, f0: T, f1: T) -> (T, T) {
    let k = lift_exponent::<T>(d);
    let w = T::one() + x0;
    (f0 * w.powf(-k), f1 * w.powf(-k - T::one()))
}
