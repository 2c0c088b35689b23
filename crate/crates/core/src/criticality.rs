//! First variation of the Strichartz deficit at f⋆ and the integral
//! I(d) = (1/π)∫_{−π}^{π} h_d(T)P_d(T) dT deciding its sign in even d.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::harmonics::{CoeffField, DataPair, MultiIndex, NormFamily};
use crate::penrose::{fstar, lift_exponent};
use crate::quadrature::{adaptive, gauss_legendre, AdaptiveOptions, Estimate};
use crate::scalar::{sphere_area, Real};
use crate::spacetime::{graded_time_rule, lift_zeros, region_sum, sphere_profile};
use crate::trigpoly::{build_Pd, h_exact, h_fourier, tp_fourier, Freq, HMethod};

fn check_even(d: usize, min: usize) -> Result<()> {
    if d % 2 == 1 || d < min {
        return param(format!("expected an even dimension ≥ {}, got {}", min, d));
    }
    Ok(())
}

fn hp_exponent<T: Real>(d: usize) -> T {
    T::lit(4.0) / T::of(d - 1)
}

/// I(2) = (1/π)∫cos⁴(T/2)P₂(T) dT in exact rationals.
pub fn i_exact_d2() -> BigRational {
    let p = h_exact(2).expect("h₂ is a polynomial").mul(&build_Pd(2).expect("d = 2 is even"));
    let (a, b) = p.integral();
    debug_assert!(b.is_zero());
    a
}

/// Adaptive quadrature of (1/π)∫h_d P_d over [−π, π], split at the kinks of h_d.
pub fn i_quadrature<T: Real>(d: usize) -> Result<Estimate<T>> {
    check_even(d, 2)?;
    let q = hp_exponent::<T>(d);
    let a = lift_exponent::<T>(d);
    let b = a + T::lit(2.0);
    let mut breaks = vec![T::zero()];
    breaks.extend(lift_zeros::<T>(d).into_iter().filter(|&z| z > T::zero()));
    breaks.push(T::PI());
    let f = |t: T| {
        let c = (a * t).cos();
        c.abs().powf(q) * c * (b * t).cos() * t.cos() * t.sin().powi(d as i32)
    };
    let e = adaptive(f, &breaks, AdaptiveOptions::default())?;
    let s = T::lit(2.0) / T::PI();
    Ok(Estimate { value: s * e.value, error: s * e.error })
}

/// I(d): exact for d = 2, adaptive quadrature otherwise.
pub fn i_direct<T: Real>(d: usize) -> Result<Estimate<T>> {
    check_even(d, 2)?;
    if d == 2 {
        let v = i_exact_d2().to_f64().expect("finite rational");
        return Ok(Estimate { value: T::lit(v), error: T::zero() });
    }
    i_quadrature(d)
}

/// One term ĥ(k)P̂(k) (halved at k = 0) of the Parseval sum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: usize,
    /// Exact P̂_d(k) as a reduced fraction.
    pub p_hat: String,
    pub h_hat: f64,
    pub h_error: f64,
    pub contribution: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierResult {
    pub d: usize,
    pub value: f64,
    pub error: f64,
    /// (−1)^{d/2}2^{d+2}I(d) = ĥ(0) − ĥ(2(d−1)) + ((d−1)(d−2)/2)(ĥ(d−1) + ĥ(2(d−1))).
    pub normalized: f64,
    pub terms: Vec<FourierTerm>,
}

/// I(d) through Parseval: exact P̂_d against numerical ĥ_d. Only k ∈ (d−1)ℤ
/// contribute since ĥ_d vanishes elsewhere.
pub fn i_fourier(d: usize) -> Result<FourierResult> {
    check_even(d, 4)?;
    let p = build_Pd(d)?;
    let top = p.max_freq().map(|f| f.0 as usize / 2).unwrap_or(0);
    let mut terms = Vec::new();
    let (mut value, mut error) = (0.0, 0.0);
    for k in (0..=top).step_by(d - 1) {
        let ph = tp_fourier(&p, Freq::int(k as u32));
        if ph.is_zero() {
            continue;
        }
        let h = h_fourier::<f64>(d, k, HMethod::Quadrature)?;
        let w = if k == 0 { 0.5 } else { 1.0 };
        let pf = ph.to_f64().expect("finite rational");
        let c = w * pf * h.value;
        value += c;
        error += (w * pf * h.error).abs();
        terms.push(FourierTerm {
            k,
            p_hat: ph.to_string(),
            h_hat: h.value,
            h_error: h.error,
            contribution: c,
        });
    }
    let h = |k| -> Result<f64> { Ok(h_fourier::<f64>(d, k, HMethod::Quadrature)?.value) };
    let c = ((d - 1) * (d - 2) / 2) as f64;
    let normalized = h(0)? - h(2 * (d - 1))? + c * (h(d - 1)? + h(2 * (d - 1))?);
    Ok(FourierResult { d, value, error, normalized, terms })
}

/// ∫|cos kT|^{p−2}cos(kT) sin(kT) dT over [−π, π]; zero since the integrand is odd.
pub fn odd_cancellation_integral<T: Real>(d: usize) -> Result<Estimate<T>> {
    if d < 2 {
        return param("need d ≥ 2");
    }
    let q = hp_exponent::<T>(d);
    let a = lift_exponent::<T>(d);
    let mut breaks = vec![-T::PI()];
    breaks.extend(lift_zeros::<T>(d));
    breaks.push(T::zero());
    breaks.push(T::PI());
    breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    breaks.dedup();
    adaptive(
        |t: T| {
            let c = (a * t).cos();
            c.abs().powf(q) * c * (a * t).sin()
        },
        &breaks,
        AdaptiveOptions::default(),
    )
}

/// F₀ = Y_{2,𝟎}, F₁ = 0.
pub fn critical_direction_even<T: Real>(d: usize, lmax: usize) -> Result<DataPair<T>> {
    check_even(d, 2)?;
    if lmax < 2 {
        return param("the critical direction has degree 2; lmax must be ≥ 2");
    }
    let f0 = CoeffField::mode(d, lmax, 2, &MultiIndex::zero(d), T::one())?;
    DataPair::new(f0, CoeffField::zeros(d, lmax))
}

/// C_d with ∫₀^{π−|T|} Y_{2,𝟎}(cos R) sin^{d−1}R dR = C_d cos T sin^d T,
/// read off at T = `t`. The integral is taken in X₀ = cos R, where the
/// integrand is a polynomial of degree d.
pub fn region_constant<T: Real>(d: usize, t: T) -> Result<T> {
    check_even(d, 2)?;
    let rule = gauss_legendre::<T>(d / 2 + 2)?.mapped(-t.cos(), T::one());
    let inner = rule
        .integrate(|x| crate::harmonics::zonal_rodrigues(d, x) * (T::one() - x * x).powi((d as i32 - 2) / 2));
    Ok(inner / (t.cos() * t.sin().powi(d as i32)))
}

fn check_orthogonal<T: Real>(d: usize, f: &DataPair<T>, family: NormFamily) -> Result<()> {
    let star = fstar::<T>(d, f.lmax());
    let ip = family.inner(f, &star)?;
    let scale = (family.norm_sq(f)? * family.norm_sq(&star)?).sqrt();
    if ip.abs() > T::lit(1e-12) * scale.max(T::min_positive_value()) {
        return param(format!("direction is not orthogonal to f⋆ (inner product {:e})", ip.f64()));
    }
    Ok(())
}

/// d/dε of −‖S_t(f⋆ + εf⊥)‖_p^p at ε = 0 for the Ḣ^{1/2} family:
/// −p∬|u⋆|^{p−2}u⋆u⊥, computed on the cylinder.
pub fn first_variation<T: Real>(d: usize, f: &DataPair<T>) -> Result<Estimate<T>> {
    first_variation_with(d, f, NormFamily::HalfWave)
}

/// As [`first_variation`], for either norm family (energy: d = 5, p = 4, weight Ω²).
pub fn first_variation_with<T: Real>(d: usize, f: &DataPair<T>, family: NormFamily) -> Result<Estimate<T>> {
    if f.d() != d || d < 2 {
        return param(format!("data live in dimension {}, expected {}", f.d(), d));
    }
    if family == NormFamily::Energy && d != 5 {
        return param("the energy family is only used in d = 5");
    }
    check_orthogonal(d, f, family)?;
    let p = family.exponent::<T>(d);
    let k = lift_exponent::<T>(d);
    // |Ω|^w with w = p(d−1)/2 − (d+1)
    let w = if family == NormFamily::Energy { 2 } else { 0 };
    let q = p - T::lit(2.0);
    let star = move |t: T| {
        let c = (k * t).cos();
        c.abs().powf(q) * c
    };
    if d % 2 == 1 {
        // S(T) = ∫_{S^d}|Ω|^w U⊥ dS is a trigonometric polynomial of degree ≤ m.
        let m = f.lmax() + (d - 1) / 2 + w;
        let n = 2 * m + 2;
        let times: Vec<T> = (0..n).map(|i| T::lit(2.0) * T::PI() * T::of(i) / T::of(n) - T::PI()).collect();
        let prof = sphere_profile(f, &times, f.lmax() + w, |t, x0| (t.cos() + x0).powi(w as i32))?;
        let mut kinks = vec![-T::PI()];
        kinks.extend(lift_zeros::<T>(d));
        kinks.push(T::PI());
        let mut total = T::zero();
        let mut err = T::zero();
        for j in 0..=m {
            let jf = T::of(j);
            let norm = if j == 0 { T::of(n) } else { T::of(n) / T::lit(2.0) };
            let a: T = prof.iter().zip(&times).map(|(&s, &t)| s * (jf * t).cos()).sum::<T>() / norm;
            // the sin(jT) parts integrate to zero against the even weight
            let e = adaptive(|t: T| star(t) * (jf * t).cos(), &kinks, AdaptiveOptions::default())?;
            total += a * e.value;
            err += (a * e.error).abs();
        }
        let half = T::lit(0.5);
        return Ok(Estimate { value: -p * half * total, error: p * half * err });
    }
    let mut kinks = vec![T::zero()];
    kinks.extend(lift_zeros::<T>(d));
    let times = graded_time_rule::<T>(16, &kinks, 18)?;
    let r_nodes = f.lmax() + d + 16;
    let total = region_sum(&[f], &times, r_nodes, f.lmax(), |t, _, u| star(t) * u[0])?;
    let coarse_times = graded_time_rule::<T>(12, &kinks, 14)?;
    let coarse = region_sum(&[f], &coarse_times, r_nodes, f.lmax(), |t, _, u| star(t) * u[0])?;
    Ok(Estimate { value: -p * total, error: p * (total - coarse).abs() })
}

/// −p|S^{d−1}|C_d·π·I(d): the first variation along the critical direction.
pub fn predicted_variation<T: Real>(d: usize) -> Result<T> {
    let p = NormFamily::HalfWave.exponent::<T>(d);
    let c = region_constant::<T>(d, T::PI() / T::lit(4.0))?;
    let i = i_direct::<T>(d)?.value;
    Ok(-p * sphere_area::<T>(d - 1) * c * T::PI() * i)
}

/// Both evaluations of I(d) and their comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub d: usize,
    pub i_direct: f64,
    pub i_direct_error: f64,
    /// Exact value as a fraction when available (d = 2).
    pub i_exact: Option<String>,
    pub i_fourier: Option<FourierResult>,
    pub sign_expected: i32,
    pub sign_observed: i32,
    pub methods_agree: bool,
    pub tolerance: f64,
}

pub fn criticality_report(d: usize, tolerance: f64) -> Result<CriticalityReport> {
    check_even(d, 2)?;
    let direct = i_direct::<f64>(d)?;
    let fourier = if d >= 4 { Some(i_fourier(d)?) } else { None };
    let exact = (d == 2).then(|| i_exact_d2().to_string());
    let sign_expected = if (d / 2).is_multiple_of(2) { 1 } else { -1 };
    let sign_observed = if direct.value.abs() <= direct.error {
        0
    } else if direct.value > 0.0 {
        1
    } else {
        -1
    };
    let methods_agree = match &fourier {
        Some(f) => (f.value - direct.value).abs() <= tolerance + f.error + direct.error,
        None => d == 2 && (i_quadrature::<f64>(2)?.value - direct.value).abs() <= tolerance,
    };
    Ok(CriticalityReport {
        d,
        i_direct: direct.value,
        i_direct_error: direct.error,
        i_exact: exact,
        i_fourier: fourier,
        sign_expected,
        sign_observed,
        methods_agree,
        tolerance,
    })
}

impl CriticalityReport {
    pub fn passed(&self) -> bool {
        self.methods_agree && self.sign_observed == self.sign_expected
    }
}
