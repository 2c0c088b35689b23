//! Free-wave solutions on ℝ^{1+d} that can be evaluated pointwise together
//! with their first derivatives.

use num_complex::Complex;

use crate::harmonics::DataPair;
use crate::penrose::{eval_solution_unchecked, lift_exponent};
use crate::scalar::Real;

/// A solution of u_tt = Δu on ℝ^{1+d}.
pub trait Solution<T: Real> {
    fn dim(&self) -> usize;

    /// u and u_t at (t, x).
    fn value(&self, t: T, x: &[T]) -> (T, T);

    /// u and the spacetime gradient (u_t, ∂₁u, …, ∂_d u).
    ///
    /// The default differentiates `value` in x by Richardson-extrapolated
    /// central differences.
    fn jet(&self, t: T, x: &[T]) -> (T, Vec<T>) {
        let (u, ut) = self.value(t, x);
        let mut grad = Vec::with_capacity(x.len() + 1);
        grad.push(ut);
        let scale = T::one() + t.abs() + x.iter().map(|&v| v * v).sum::<T>().sqrt();
        let h = T::lit(1e-3) * scale;
        let mut y = x.to_vec();
        for j in 0..x.len() {
            let mut central = |h: T| {
                y[j] = x[j] + h;
                let up = self.value(t, &y).0;
                y[j] = x[j] - h;
                let dn = self.value(t, &y).0;
                y[j] = x[j];
                (up - dn) / (h + h)
            };
            let two = T::lit(2.0);
            let (d0, d1, d2) = (central(h), central(h / two), central(h / (two * two)));
            let three = T::lit(3.0);
            let r11 = d1 + (d1 - d0) / three;
            let r21 = d2 + (d2 - d1) / three;
            grad.push(r21 + (r21 - r11) / T::lit(15.0));
        }
        (u, grad)
    }
}

impl<T: Real, S: Solution<T> + ?Sized> Solution<T> for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, t: T, x: &[T]) -> (T, T) {
        (**self).value(t, x)
    }
    fn jet(&self, t: T, x: &[T]) -> (T, Vec<T>) {
        (**self).jet(t, x)
    }
}

/// Solution with lifted initial data, evaluated through the cylinder propagator.
#[derive(Clone, Debug)]
pub struct SpectralSolution<T> {
    pub data: DataPair<T>,
}

impl<T: Real> SpectralSolution<T> {
    pub fn new(data: DataPair<T>) -> Self {
        Self { data }
    }
}

impl<T: Real> Solution<T> for SpectralSolution<T> {
    fn dim(&self) -> usize {
        self.data.d()
    }
    fn value(&self, t: T, x: &[T]) -> (T, T) {
        eval_solution_unchecked(&self.data, t, x)
    }
}

/// u⋆ = 2^k Re[(1 − t² + |x|² + 2it)^{−k}], the solution with data f⋆.
#[derive(Clone, Copy, Debug)]
pub struct ExtremizerSolution {
    pub d: usize,
}

impl ExtremizerSolution {
    fn parts<T: Real>(&self, t: T, x: &[T]) -> (T, Complex<T>, Complex<T>) {
        let k = lift_exponent::<T>(self.d);
        let r2: T = x.iter().map(|&v| v * v).sum();
        let two = T::lit(2.0);
        let z = Complex::new(T::one() - t * t + r2, two * t);
        let c = two.powf(k);
        let (zk, zk1) = if self.d % 2 == 1 {
            let zi = z.inv().powi(((self.d - 1) / 2) as i32);
            (zi, zi / z)
        } else {
            (z.powf(-k), z.powf(-k - T::one()))
        };
        (zk.re * c, z, zk1 * (-k * c))
    }
}

impl<T: Real> Solution<T> for ExtremizerSolution {
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, t: T, x: &[T]) -> (T, T) {
        let (u, _, dz) = self.parts(t, x);
        let two = T::lit(2.0);
        (u, (dz * Complex::new(-two * t, two)).re)
    }
    fn jet(&self, t: T, x: &[T]) -> (T, Vec<T>) {
        let (u, _, dz) = self.parts(t, x);
        let two = T::lit(2.0);
        let mut grad = vec![(dz * Complex::new(-two * t, two)).re];
        grad.extend(x.iter().map(|&v| dz.re * two * v));
        (u, grad)
    }
}

/// c·u.
#[derive(Clone, Debug)]
pub struct Scaled<S, T> {
    pub inner: S,
    pub c: T,
}

impl<T: Real, S: Solution<T>> Solution<T> for Scaled<S, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, t: T, x: &[T]) -> (T, T) {
        let (u, ut) = self.inner.value(t, x);
        (self.c * u, self.c * ut)
    }
    fn jet(&self, t: T, x: &[T]) -> (T, Vec<T>) {
        let (u, g) = self.inner.jet(t, x);
        (self.c * u, g.into_iter().map(|v| self.c * v).collect())
    }
}

/// e^{sσ}u(e^σ t, e^σ(x + x₀)).
#[derive(Clone, Debug)]
pub struct Dilated<S, T> {
    pub inner: S,
    pub s: T,
    pub sigma: T,
    pub x0: Vec<T>,
}

impl<S, T: Real> Dilated<S, T> {
    fn map(&self, t: T, x: &[T]) -> (T, Vec<T>, T, T) {
        let e = self.sigma.exp();
        let y = x.iter().zip(&self.x0).map(|(&a, &b)| e * (a + b)).collect();
        let amp = (self.s * self.sigma).exp();
        (e * t, y, amp, amp * e)
    }
}

impl<T: Real, S: Solution<T>> Solution<T> for Dilated<S, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, t: T, x: &[T]) -> (T, T) {
        let (s, y, a0, a1) = self.map(t, x);
        let (u, ut) = self.inner.value(s, &y);
        (a0 * u, a1 * ut)
    }
    fn jet(&self, t: T, x: &[T]) -> (T, Vec<T>) {
        let (s, y, a0, a1) = self.map(t, x);
        let (u, g) = self.inner.jet(s, &y);
        (a0 * u, g.into_iter().map(|v| a1 * v).collect())
    }
}

/// u(M(t, x)) for a Lorentz matrix M acting on (t, x₁, …, x_d).
#[derive(Clone, Debug)]
pub struct Boosted<S, T> {
    pub inner: S,
    /// Row-major (d+1)×(d+1).
    pub matrix: Vec<T>,
}

impl<S: Solution<T>, T: Real> Boosted<S, T> {
    /// Composite of the boosts along each axis: u(Λ_d ⋯ Λ₁(t, x)).
    pub fn new(inner: S, zeta: &[T]) -> Self {
        let n = zeta.len() + 1;
        let mut m = vec![T::zero(); n * n];
        for i in 0..n {
            m[i * n + i] = T::one();
        }
        for (j, &z) in zeta.iter().enumerate() {
            let j = j + 1;
            let (ch, sh) = (z.cosh(), z.sinh());
            // rows 0 and j of Λ_j·M
            for c in 0..n {
                let (a, b) = (m[c], m[j * n + c]);
                m[c] = ch * a + sh * b;
                m[j * n + c] = sh * a + ch * b;
            }
        }
        Self { inner, matrix: m }
    }

    fn apply(&self, t: T, x: &[T]) -> Vec<T> {
        let n = x.len() + 1;
        (0..n)
            .map(|i| {
                let row = &self.matrix[i * n..(i + 1) * n];
                row[0] * t + row[1..].iter().zip(x).map(|(&a, &b)| a * b).sum::<T>()
            })
            .collect()
    }
}

impl<T: Real, S: Solution<T>> Solution<T> for Boosted<S, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, t: T, x: &[T]) -> (T, T) {
        let (u, g) = self.jet(t, x);
        (u, g[0])
    }
    fn jet(&self, t: T, x: &[T]) -> (T, Vec<T>) {
        let y = self.apply(t, x);
        let (u, g) = self.inner.jet(y[0], &y[1..]);
        let n = y.len();
        let out = (0..n).map(|c| (0..n).map(|r| self.matrix[r * n + c] * g[r]).sum()).collect();
        (u, out)
    }
}
