//! Legendre polynomials P_ℓ(n;t) in dimension n, normalized associated
//! Legendre functions A_ℓ^m(n;t) and the coupling coefficient S_d(ℓ,m₁).
//!
//! Conventions: P_ℓ(n;1) = 1 and
//! (ℓ+n−2)P_{ℓ+1} = (2ℓ+n−2) t P_ℓ − ℓ P_{ℓ−1},
//! A_ℓ^m(n;t) = C (1−t²)^{m/2} P_{ℓ−m}(2m+n;t), orthonormal for the weight
//! (1−t²)^{(n−3)/2} on [−1, 1].

use num_bigint::BigInt;
use num_rational::BigRational;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{param, Result};
use crate::scalar::{sphere_area, Real};

/// Parameters (n, ℓ, m) of A_ℓ^m(n; ·).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LegendreSpec {
    pub n: usize,
    pub l: usize,
    pub m: usize,
}

impl LegendreSpec {
    pub fn new(n: usize, l: usize, m: usize) -> Result<Self> {
        if n < 3 {
            return param(format!("dimension parameter n = {n} must be at least 3"));
        }
        if m > l {
            return param(format!("order m = {m} exceeds degree ℓ = {l}"));
        }
        Ok(Self { n, l, m })
    }

    pub fn eval<T: Real>(&self, t: T) -> T {
        assoc_legendre_unchecked(self.n, self.l, self.m, t)
    }
}

/// P_ℓ(n; t) by the three-term recurrence.
pub fn legendre_poly<T: Real>(n: usize, l: usize, t: T) -> Result<T> {
    if n < 2 {
        return param(format!("dimension parameter n = {n} must be at least 2"));
    }
    Ok(legendre_with_derivative(n, l, t).0)
}

/// (P_ℓ(n;t), P'_ℓ(n;t)), differentiating the recurrence alongside.
pub fn legendre_with_derivative<T: Real>(n: usize, l: usize, t: T) -> (T, T) {
    if l == 0 {
        return (T::one(), T::zero());
    }
    let (mut p0, mut p1) = (T::one(), t);
    let (mut d0, mut d1) = (T::zero(), T::one());
    for k in 1..l {
        let a = T::of(2 * k + n - 2);
        let b = T::of(k);
        let c = T::of(k + n - 2);
        let p2 = (a * t).mul_add(p1, -b * p0) / c;
        let d2 = (a * (p1 + t * d1) - b * d0) / c;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// Values P_k(n; t) for k = 0..=kmax.
pub fn legendre_sequence<T: Real>(n: usize, kmax: usize, t: T) -> Vec<T> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(T::one());
    if kmax == 0 {
        return out;
    }
    out.push(t);
    for k in 1..kmax {
        let a = T::of(2 * k + n - 2);
        let b = T::of(k);
        let c = T::of(k + n - 2);
        let next = (a * t).mul_add(out[k], -b * out[k - 1]) / c;
        out.push(next);
    }
    out
}

/// Dimension N(n,k)+… of degree-k harmonics on S^{n−1}:
/// (2k+n−2)(k+n−3)!/(k!(n−2)!).
pub fn harmonic_dimension<T: Real>(n: usize, k: usize) -> T {
    let mut binom = T::one();
    for i in 1..=k {
        binom = binom * T::of(n - 3 + i) / T::of(i);
    }
    T::of(2 * k + n - 2) / T::of(n - 2) * binom
}

/// Normalization constant C(ℓ, m, n) of A_ℓ^m(n; ·):
/// C² = N(2m+n, ℓ−m)·|S^{2m+n−2}|/|S^{2m+n−1}|.
pub fn norm_const<T: Real>(n: usize, l: usize, m: usize) -> T {
    let nn = 2 * m + n;
    let dim = harmonic_dimension::<T>(nn, l - m);
    (dim * sphere_area::<T>(nn - 2) / sphere_area::<T>(nn - 1)).sqrt()
}

#[inline]
fn sin_power<T: Real>(t: T, m: usize) -> T {
    if m == 0 {
        return T::one();
    }
    let s2 = ((T::one() - t) * (T::one() + t)).max(T::zero());
    if m.is_multiple_of(2) {
        s2.powi((m / 2) as i32)
    } else {
        s2.sqrt().powi(m as i32)
    }
}

fn assoc_legendre_unchecked<T: Real>(n: usize, l: usize, m: usize, t: T) -> T {
    if m > l {
        return T::zero();
    }
    let p = legendre_with_derivative(2 * m + n, l - m, t).0;
    norm_const::<T>(n, l, m) * sin_power(t, m) * p
}

/// A_ℓ^m(n; t); zero when m > ℓ.
pub fn assoc_legendre<T: Real>(n: usize, l: usize, m: usize, t: T) -> Result<T> {
    if n < 3 {
        return param(format!("dimension parameter n = {n} must be at least 3"));
    }
    Ok(assoc_legendre_unchecked(n, l, m, t))
}

/// A_ℓ^m(n; cos R) and its derivative in R.
pub fn assoc_legendre_polar<T: Real>(n: usize, l: usize, m: usize, r: T) -> Result<(T, T)> {
    if n < 3 {
        return param(format!("dimension parameter n = {n} must be at least 3"));
    }
    if m > l {
        return Ok((T::zero(), T::zero()));
    }
    let (c, s) = (r.cos(), r.sin());
    let (p, dp) = legendre_with_derivative(2 * m + n, l - m, c);
    let k = norm_const::<T>(n, l, m);
    let value = k * s.powi(m as i32) * p;
    let mut deriv = -k * s.powi(m as i32 + 1) * dp;
    if m > 0 {
        deriv += k * T::of(m) * s.powi(m as i32 - 1) * c * p;
    }
    Ok((value, deriv))
}

/// Normalization constants C(ℓ, m, n) for ℓ ≤ lmax, flat at ℓ·(lmax+1)+m, cached.
fn norm_table(n: usize, lmax: usize) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("normalization cache poisoned");
    guard
        .entry((n, lmax))
        .or_insert_with(|| {
            let w = lmax + 1;
            let mut flat = vec![0.0; w * w];
            for l in 0..=lmax {
                for m in 0..=l {
                    flat[l * w + m] = norm_const::<f64>(n, l, m);
                }
            }
            Arc::new(flat)
        })
        .clone()
}

/// Table `a[l][m] = A_l^m(n; t)` for m ≤ l ≤ lmax.
pub fn assoc_legendre_table<T: Real>(n: usize, lmax: usize, t: T) -> Vec<Vec<T>> {
    let norms = norm_table(n, lmax);
    let mut table: Vec<Vec<T>> = (0..=lmax).map(|l| vec![T::zero(); l + 1]).collect();
    for m in 0..=lmax {
        let seq = legendre_sequence(2 * m + n, lmax - m, t);
        let sp = sin_power(t, m);
        for (k, p) in seq.into_iter().enumerate() {
            let l = m + k;
            table[l][m] = T::lit(norms[l * (lmax + 1) + m]) * sp * p;
        }
    }
    table
}

/// Flat tables of A_l^m(n; cos R) and its R-derivative at ℓ·(lmax+1)+m.
pub fn assoc_legendre_polar_table<T: Real>(n: usize, lmax: usize, r: T) -> (Vec<T>, Vec<T>) {
    let norms = norm_table(n, lmax);
    let w = lmax + 1;
    let (s, c) = r.sin_cos();
    let mut value = vec![T::zero(); w * w];
    let mut deriv = vec![T::zero(); w * w];
    for m in 0..=lmax {
        let nn = 2 * m + n;
        let (mut p0, mut p1) = (T::one(), c);
        let (mut d0, mut d1) = (T::zero(), T::one());
        let sm = s.powi(m as i32);
        let sm1 = if m > 0 { T::of(m) * s.powi(m as i32 - 1) * c } else { T::zero() };
        for k in 0..=lmax - m {
            let (p, dp) = if k == 0 { (p0, d0) } else { (p1, d1) };
            let l = m + k;
            let norm = T::lit(norms[l * w + m]);
            value[l * w + m] = norm * sm * p;
            deriv[l * w + m] = norm * (sm1 * p - sm * s * dp);
            if k >= 1 {
                let a = T::of(2 * k + nn - 2);
                let b = T::of(k);
                let cc = T::of(k + nn - 2);
                let p2 = (a * c).mul_add(p1, -b * p0) / cc;
                let d2 = (a * (p1 + c * d1) - b * d0) / cc;
                p0 = p1;
                p1 = p2;
                d0 = d1;
                d1 = d2;
            }
        }
    }
    (value, deriv)
}

/// Coefficients (a, b, c) of 0 = a·A_ℓ^{m₁} − b·t·A_{ℓ−1}^{m₁} + c·A_{ℓ−2}^{m₁}.
///
/// For ℓ = m₁ the terms with lower degree vanish and a = c = 0.
pub fn recurrence_coeffs<T: Real>(n: usize, l: usize, m1: usize) -> Result<(T, T, T)> {
    if n < 3 || l == 0 || m1 > l || l + m1 + n <= 4 {
        return param(format!("(n, ℓ, m₁) = ({n}, {l}, {m1}) is outside the range of the recurrence"));
    }
    let f = |x: i64| T::of_i(x);
    let (n, l, m1) = (n as i64, l as i64, m1 as i64);
    let a = (f((l - m1) * (l + m1 + n - 3)) / f((2 * l + n - 2) * (l + m1 + n - 4))).sqrt();
    let b = (f(2 * l + n - 4) / f(l + m1 + n - 4)).sqrt();
    let c = if l - m1 - 1 <= 0 { T::zero() } else { (f(l - m1 - 1) / f(2 * l + n - 6)).sqrt() };
    Ok((a, b, c))
}

/// S_d(ℓ, m₁) = √((ℓ−m₁+1)(ℓ+m₁+d−1)/((2ℓ+d+1)(2ℓ+d−1))) for 0 ≤ m₁ ≤ ℓ, else 0.
pub fn sfact<T: Real>(d: usize, l: usize, m1: usize) -> T {
    if m1 > l {
        return T::zero();
    }
    let num = T::of((l - m1 + 1) * (l + m1 + d - 1));
    let den = T::of((2 * l + d + 1) * (2 * l + d - 1));
    (num / den).sqrt()
}

/// S_d(ℓ, m₁)² as an exact rational.
pub fn sfact_sq_exact(d: usize, l: usize, m1: usize) -> BigRational {
    if m1 > l {
        return BigRational::from_integer(BigInt::from(0));
    }
    BigRational::new(
        BigInt::from((l - m1 + 1) * (l + m1 + d - 1)),
        BigInt::from((2 * l + d + 1) * (2 * l + d - 1)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_case() {
        // n = 2 gives Chebyshev polynomials of the first kind
        let t = 0.37f64;
        let p = legendre_poly(2, 5, t).unwrap();
        assert!((p - (5.0 * t.acos()).cos()).abs() < 1e-14);
    }

    #[test]
    fn classical_legendre_case() {
        let t = -0.61f64;
        let p = legendre_poly(3, 3, t).unwrap();
        assert!((p - 0.5 * (5.0 * t * t * t - 3.0 * t)).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_difference() {
        let (t, h) = (0.3f64, 1e-6);
        let (_, d) = legendre_with_derivative(6, 7, t);
        let fd = (legendre_poly(6, 7, t + h).unwrap() - legendre_poly(6, 7, t - h).unwrap()) / (2.0 * h);
        assert!((d - fd).abs() < 1e-8);
    }

    #[test]
    fn polar_derivative_matches_difference() {
        let (r, h) = (0.9f64, 1e-6);
        for m in 0..4 {
            let (_, d) = assoc_legendre_polar(5, 5, m, r).unwrap();
            let a = |x: f64| assoc_legendre(5, 5, m, x.cos()).unwrap();
            assert!((d - (a(r + h) - a(r - h)) / (2.0 * h)).abs() < 1e-7);
        }
    }

    #[test]
    fn table_matches_pointwise() {
        let t = 0.2f64;
        let tab = assoc_legendre_table(4, 6, t);
        for l in 0..=6 {
            for m in 0..=l {
                let v = assoc_legendre(4, l, m, t).unwrap();
                assert!((tab[l][m] - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn invalid_arguments() {
        assert!(legendre_poly::<f64>(1, 2, 0.0).is_err());
        assert!(assoc_legendre::<f64>(2, 2, 0, 0.0).is_err());
        assert!(LegendreSpec::new(4, 1, 2).is_err());
        assert!(recurrence_coeffs::<f64>(3, 1, 0).is_err());
    }
}
