//! Trigonometric polynomials with rational coefficients on frequencies in ½ℤ,
//! and the Fourier coefficients of h_d(T) = |cos((d−1)T/2)|^{p−2}.
//!
//! Fourier coefficients follow f̂(k) = (1/π)∫_{−π}^{π} f(T) cos(kT) dT, so a
//! polynomial a₀/2 + Σ a_k cos(kT) has f̂(k) = a_k.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::quadrature::{adaptive, AdaptiveOptions, Estimate};
use crate::scalar::Real;

/// A frequency in ½ℤ≥0, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Freq(pub u32);

impl Freq {
    pub fn int(k: u32) -> Self {
        Freq(2 * k)
    }

    /// n/2.
    pub fn half(n: u32) -> Self {
        Freq(n)
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Σ_k c_k cos(kT) + s_k sin(kT) over finitely many k ∈ ½ℤ≥0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigPoly {
    terms: BTreeMap<Freq, (BigRational, BigRational)>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Freq(0), c, BigRational::zero());
        p
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn cos(k: Freq) -> Self {
        let mut p = Self::zero();
        p.add_term(k, BigRational::one(), BigRational::zero());
        p
    }

    /// sin(kT); zero when k = 0.
    pub fn sin(k: Freq) -> Self {
        let mut p = Self::zero();
        p.add_term(k, BigRational::zero(), BigRational::one());
        p
    }

    fn add_term(&mut self, k: Freq, c: BigRational, s: BigRational) {
        let s = if k.0 == 0 { BigRational::zero() } else { s };
        if c.is_zero() && s.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(|| (BigRational::zero(), BigRational::zero()));
        e.0 += c;
        e.1 += s;
        if e.0.is_zero() && e.1.is_zero() {
            self.terms.remove(&k);
        }
    }

    /// (cos, sin) coefficients at frequency k.
    pub fn coeff(&self, k: Freq) -> (BigRational, BigRational) {
        self.terms.get(&k).cloned().unwrap_or_else(|| (BigRational::zero(), BigRational::zero()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (Freq, &BigRational, &BigRational)> {
        self.terms.iter().map(|(k, (c, s))| (*k, c, s))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_freq(&self) -> Option<Freq> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, (c, s)) in &other.terms {
            out.add_term(*k, c.clone(), s.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, a: &BigRational) -> Self {
        let mut out = Self::zero();
        for (k, (c, s)) in &self.terms {
            out.add_term(*k, c * a, s * a);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        tp_mul(self, other)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = tp_mul(&out, self);
        }
        out
    }

    /// ∫_{−π}^{π} p dT = aπ + b, returned as (a, b). Half-odd frequencies
    /// contribute to the rational part b.
    pub fn integral(&self) -> (BigRational, BigRational) {
        let mut a = BigRational::zero();
        let mut b = BigRational::zero();
        for (k, (c, _)) in &self.terms {
            if k.0 == 0 {
                a += c * rat(2);
            } else if !k.is_integer() {
                // 2 sin(kπ)/k with k = n/2, n odd
                let sign = if (k.0 / 2) % 2 == 0 { 1 } else { -1 };
                b += c * rat(4 * sign) / rat(k.0 as i64);
            }
        }
        (a, b)
    }

    /// Value at T in floating point.
    pub fn eval<T: Real>(&self, t: T) -> T {
        let mut acc = T::zero();
        for (k, (c, s)) in &self.terms {
            let (sn, cs) = (t * T::lit(k.value())).sin_cos();
            acc += T::lit(c.to_f64().unwrap_or(f64::NAN)) * cs + T::lit(s.to_f64().unwrap_or(f64::NAN)) * sn;
        }
        acc
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, (c, s)) in &self.terms {
            for (v, name) in [(c, "cos"), (s, "sin")] {
                if v.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                if k.0 == 0 {
                    write!(f, "{}", v)?;
                } else {
                    write!(f, "({})·{}({}T)", v, name, k)?;
                }
            }
        }
        Ok(())
    }
}

/// Exact product by the product-to-sum identities.
pub fn tp_mul(p: &TrigPoly, q: &TrigPoly) -> TrigPoly {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut out = TrigPoly::zero();
    for (a, (ca, sa)) in &p.terms {
        for (b, (cb, sb)) in &q.terms {
            let sum = Freq(a.0 + b.0);
            let (diff, flip) = if a.0 >= b.0 { (Freq(a.0 - b.0), false) } else { (Freq(b.0 - a.0), true) };
            // sin(a−b) = ∓sin|a−b|
            let sd = if flip { -half.clone() } else { half.clone() };
            // cos a cos b = ½cos(a−b) + ½cos(a+b)
            let cc = ca * cb;
            out.add_term(diff, &cc * &half, BigRational::zero());
            out.add_term(sum, &cc * &half, BigRational::zero());
            // sin a sin b = ½cos(a−b) − ½cos(a+b)
            let ss = sa * sb;
            out.add_term(diff, &ss * &half, BigRational::zero());
            out.add_term(sum, -(&ss * &half), BigRational::zero());
            // sin a cos b = ½sin(a+b) + ½sin(a−b)
            let sc = sa * cb;
            out.add_term(sum, BigRational::zero(), &sc * &half);
            out.add_term(diff, BigRational::zero(), &sc * &sd);
            // cos a sin b = ½sin(a+b) − ½sin(a−b)
            let cs = ca * sb;
            out.add_term(sum, BigRational::zero(), &cs * &half);
            out.add_term(diff, BigRational::zero(), -(&cs * &sd));
        }
    }
    out
}

/// p̂(k) = (1/π)∫p cos(kT): twice the constant term at k = 0, the cos
/// coefficient otherwise. This is the integral when all frequencies of p are
/// integers.
pub fn tp_fourier(p: &TrigPoly, k: Freq) -> BigRational {
    let c = p.coeff(k).0;
    if k.0 == 0 {
        c * rat(2)
    } else {
        c
    }
}

/// P_d(T) = cos((d−1)T/2)·cos((d+3)T/2)·cos T·sin^d T for even d ≥ 2.
#[allow(non_snake_case)]
pub fn build_Pd(d: usize) -> Result<TrigPoly> {
    if d < 2 || d % 2 == 1 {
        return param(format!("P_d is defined for even d ≥ 2, not d = {}", d));
    }
    let d = d as u32;
    Ok(TrigPoly::cos(Freq::half(d - 1))
        .mul(&TrigPoly::cos(Freq::half(d + 3)))
        .mul(&TrigPoly::cos(Freq::int(1)))
        .mul(&TrigPoly::sin(Freq::int(1)).pow(d)))
}

/// h_d as an exact polynomial when p − 2 = 4/(d−1) is an even integer (d = 2, 3).
pub fn h_exact(d: usize) -> Option<TrigPoly> {
    let c = TrigPoly::cos(Freq::half(d.checked_sub(1)? as u32));
    match d {
        2 => Some(c.pow(4)),
        3 => Some(c.pow(2)),
        _ => None,
    }
}

/// How [`h_fourier`] evaluates ĥ_d(k).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HMethod {
    Quadrature,
    /// Binomial series of (1 − sin²)^{(p−2)/2}, truncated once the tail bound
    /// drops below `tol` or after `max_terms` terms.
    Series {
        max_terms: usize,
        tol: f64,
    },
}

impl HMethod {
    pub fn series() -> Self {
        HMethod::Series { max_terms: 1_000_000, tol: 1e-3 }
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return param(format!("h_d needs d ≥ 2, got {}", d));
    }
    Ok(())
}

/// ĥ_d(k) = (1/π)∫_{−π}^{π} |cos((d−1)T/2)|^{4/(d−1)} cos(kT) dT.
pub fn h_fourier<T: Real>(d: usize, k: usize, method: HMethod) -> Result<Estimate<T>> {
    check_d(d)?;
    match method {
        HMethod::Quadrature => h_quadrature(d, k),
        HMethod::Series { max_terms, tol } => {
            let e = h_series::<T>(d, k, max_terms)?;
            if e.error.f64() > tol {
                return Err(Error::Accuracy {
                    what: format!("binomial series for ĥ_{}({}) after {} terms", d, k, max_terms),
                    achieved: e.error.f64(),
                });
            }
            Ok(e)
        }
    }
}

fn exponent<T: Real>(d: usize) -> T {
    T::lit(4.0) / T::of(d - 1)
}

fn h_quadrature<T: Real>(d: usize, k: usize) -> Result<Estimate<T>> {
    let q = exponent::<T>(d);
    let a = T::of(d - 1) / T::lit(2.0);
    let kk = T::of(k);
    let pi = T::PI();
    let mut breaks = vec![T::zero()];
    let mut j = 0;
    loop {
        let z = T::of(2 * j + 1) * pi / T::of(d - 1);
        if z >= pi {
            break;
        }
        breaks.push(z);
        j += 1;
    }
    breaks.push(pi);
    let e =
        adaptive(|t: T| (a * t).cos().abs().powf(q) * (kk * t).cos(), &breaks, AdaptiveOptions::default())?;
    let s = T::lit(2.0) / pi;
    Ok(Estimate { value: s * e.value, error: s * e.error })
}

/// ĥ_d(d−1) + ĥ_d(2(d−1)) through the single integral
/// (8/π)∫₀^{π/2} |cos T|^{p−2} cos T cos 3T dT.
pub fn h_combined<T: Real>(d: usize) -> Result<Estimate<T>> {
    check_d(d)?;
    let q = exponent::<T>(d);
    let half_pi = T::PI() / T::lit(2.0);
    let e = adaptive(
        |t: T| t.cos().abs().powf(q) * t.cos() * (T::lit(3.0) * t).cos(),
        &[T::zero(), half_pi],
        AdaptiveOptions::default(),
    )?;
    let s = T::lit(8.0) / T::PI();
    Ok(Estimate { value: s * e.value, error: s * e.error })
}

/// Series route; never fails on accuracy, the tail bound is the error.
pub fn h_series<T: Real>(d: usize, k: usize, max_terms: usize) -> Result<Estimate<T>> {
    check_d(d)?;
    let step = d - 1;
    if !k.is_multiple_of(step) {
        return Ok(Estimate { value: T::zero(), error: T::zero() });
    }
    let m = k / step;
    let q = exponent::<T>(d);
    let hq = q / T::lit(2.0);
    let mf = T::of(m);
    // t_m = (−1)^{2m} C(q/2, m) 2^{1−2m}
    let mut t = T::lit(2.0);
    for i in 0..m {
        t = t * (hq - T::of(i)) / T::of(i + 1) / T::lit(4.0);
    }
    let mut sum = crate::scalar::CompensatedSum::new();
    let mut j = m;
    loop {
        sum.add(t);
        let jf = T::of(j);
        let r = (jf - hq) * (T::lit(2.0) * jf + T::one())
            / (T::lit(2.0) * (jf + T::one() - mf) * (jf + T::one() + mf));
        let next = t * r;
        j += 1;
        if next == T::zero() {
            return Ok(Estimate { value: sum.value(), error: T::zero() });
        }
        if j >= m + max_terms || (j.is_multiple_of(1024) && j > 16) {
            if let Some(bound) = raabe_tail(j, next, hq, mf) {
                if j >= m + max_terms || bound < T::lit(1e-15) {
                    let half = bound / T::lit(2.0);
                    let sgn = if next < T::zero() { -T::one() } else { T::one() };
                    return Ok(Estimate { value: sum.value() + sgn * (half + next.abs()), error: half });
                }
            } else if j >= m + max_terms {
                return Err(Error::Accuracy {
                    what: "binomial series did not reach its monotone regime".into(),
                    achieved: f64::INFINITY,
                });
            }
        }
        t = next;
    }
}

/// Bound on Σ_{i>J}|t_i| from i(1 − r_i) ≥ γ > 1 for i ≥ J, where the
/// next unsummed term is t_J. Returns the bound on the terms after t_J.
fn raabe_tail<T: Real>(jj: usize, tj: T, hq: T, m: T) -> Option<T> {
    let j = T::of(jj);
    let two = T::lit(2.0);
    if j <= hq || two * j + T::one() < m * m {
        return None;
    }
    let q = two * hq;
    let lim = (T::lit(3.0) + q) / two;
    let c = two - two * m * m + hq;
    // i(1 − r_i) = L + (A i + B)/(2((i+1)² − m²))
    let a = c - two * (T::lit(3.0) + q);
    let b = -(T::lit(3.0) + q) * (T::one() - m * m);
    let gamma = lim - (a.abs() / j + b.abs() / (j * j)) / two;
    if gamma <= T::one() {
        return None;
    }
    Some(j * tj.abs() / (gamma - T::one()))
}
