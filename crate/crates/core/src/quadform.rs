//! Second variation of the Strichartz deficit at the extremizer for d = 3
//! (Ḣ^{1/2}×Ḣ^{−1/2}, p = 4) and d = 5 (Ḣ¹×L², p = 4), tangent projections
//! and diagonal-dominance certificates for tridiagonal forms.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{param, Result};
use crate::harmonics::{CoeffField, DataPair, NormFamily};
use crate::legendre::sfact;
use crate::penrose::fstar;
use crate::scalar::Real;
use crate::spacetime::{cylinder_sum, periodic_time_rule};

fn require_dim<T: Real>(f: &DataPair<T>, d: usize) -> Result<()> {
    if f.d() != d {
        return param(format!("this form lives in dimension {d}, data have d = {}", f.d()));
    }
    Ok(())
}

/// 𝒮⁴ for the two forms: 3/(16π) for d = 3 and 1/(64π²) for d = 5.
fn sharp_fourth<T: Real>(d: usize) -> T {
    let pi = T::PI();
    if d == 3 {
        T::lit(3.0) / (T::lit(16.0) * pi)
    } else {
        T::one() / (T::lit(64.0) * pi * pi)
    }
}

/// Q(f) = (3π/4) Σ_{ℓ≥2} (ℓ−1)[Σ_𝐦 F̂₀(ℓ,𝐦)² + F̂₁(ℓ,𝐦)²/(ℓ+1)²] on S³.
#[allow(non_snake_case)]
pub fn Q3<T: Real>(f: &DataPair<T>) -> Result<T> {
    require_dim(f, 3)?;
    let mut acc = T::zero();
    for l in 2..=f.lmax() {
        let s0: T = f.f0.degree(l).iter().map(|&v| v * v).sum();
        let s1: T = f.f1.degree(l).iter().map(|&v| v * v).sum();
        let w = T::of(l + 1);
        acc += T::of(l - 1) * (s0 + s1 / (w * w));
    }
    Ok(T::lit(0.75) * T::PI() * acc)
}

/// α_{ℓ,𝐦} of the d = 5 form.
pub fn alpha5<T: Real>(l: usize, m1: usize) -> T {
    let (l, m) = (l as i64, m1 as i64);
    let num = l.pow(4) + 8 * l.pow(3) + 11 * l * l - 20 * l - 12 + 6 * m * m + 18 * m;
    T::of_i(num) / T::of_i((l + 1) * (l + 3))
}

/// β_{ℓ,𝐦} = 2(ℓ−1)(ℓ+6)S₅(ℓ,m₁).
pub fn beta5<T: Real>(l: usize, m1: usize) -> T {
    T::lit(2.0) * T::of_i((l as i64 - 1) * (l as i64 + 6)) * sfact::<T>(5, l, m1)
}

/// Σ_{ℓ≥2} Σ_𝐦 c_ℓ[α F̂(ℓ)² ] + e_ℓ β F̂(ℓ)F̂(ℓ+1), with per-degree weights.
fn q5_band<T: Real>(f: &CoeffField<T>, diag_w: impl Fn(usize) -> T, off_w: impl Fn(usize) -> T) -> T {
    let mut acc = T::zero();
    for l in 2..=f.lmax() {
        let lo = f.degree(l);
        let hi = (l < f.lmax()).then(|| f.degree(l + 1));
        let (dw, ow) = (diag_w(l), off_w(l));
        for (p, m) in f.indices(l).iter().enumerate() {
            let m1 = m.top_order();
            acc += dw * alpha5::<T>(l, m1) * lo[p] * lo[p];
            if let Some(hi) = hi {
                acc += ow * beta5::<T>(l, m1) * lo[p] * hi[p];
            }
        }
    }
    acc
}

/// Q₅(f) = Q₅(f₀,0) + Q₅(0,f₁) on S⁵ in closed form.
#[allow(non_snake_case)]
pub fn Q5<T: Real>(f: &DataPair<T>) -> Result<T> {
    require_dim(f, 5)?;
    let zero = q5_band(&f.f0, |_| T::one(), |_| T::one());
    let mut one =
        q5_band(&f.f1, |l| T::one() / T::of((l + 2) * (l + 2)), |l| T::one() / T::of((l + 2) * (l + 3)));
    if f.lmax() >= 1 {
        let a1 = alpha5::<T>(1, 1) * T::lit(2.0) / T::lit(9.0);
        for (p, m) in f.f1.indices(1).iter().enumerate() {
            if m.top_order() == 1 {
                let v = f.f1.degree(1)[p];
                one += a1 * v * v;
            }
        }
    }
    Ok(T::PI() / T::lit(8.0) * (zero + one))
}

/// The closed form for d = 3 or 5.
pub fn q_closed<T: Real>(f: &DataPair<T>) -> Result<T> {
    match f.d() {
        3 => Q3(f),
        5 => Q5(f),
        d => param(format!("closed-form second variation exists for d = 3, 5, not {d}")),
    }
}

/// 𝒮⁴(4⟨f⋆|f⟩² + 2‖f⋆‖²‖f‖²) − 6∬(S_t f⋆)²(S_t f)² dt dx, with the
/// space-time integral evaluated on the cylinder: dt dx = Ω^{−(d+1)}dT dS,
/// so the integrand is |Ω|^{d−3}U⋆²U², and half of S¹×S^d covers the image.
#[allow(non_snake_case)]
pub fn Q_oracle<T: Real>(f: &DataPair<T>) -> Result<T> {
    let d = f.d();
    if d != 3 && d != 5 {
        return param(format!("the second variation is available for d = 3, 5, not {d}"));
    }
    let family = NormFamily::for_dim(d);
    let star = fstar::<T>(d, f.lmax());
    let ip = family.inner(&star, f)?;
    let ns = family.norm_sq(&star)?;
    let nf = family.norm_sq(f)?;
    let w = d - 3;
    let k = (d - 1) / 2;
    let times = periodic_time_rule::<T>(4 * k + 2 * f.lmax() + w + 2);
    let deg = 2 * f.lmax() + w;
    let st = cylinder_sum(&[&star, f], &times, deg, |t, x0, u| {
        (t.cos() + x0).powi(w as i32) * u[0] * u[0] * u[1] * u[1]
    })?;
    let space_time = T::lit(0.5) * st;
    Ok(sharp_fourth::<T>(d) * (T::lit(4.0) * ip * ip + T::lit(2.0) * ns * nf) - T::lit(6.0) * space_time)
}

/// Bilinear form B(f, g) = (Q(f+g) − Q(f−g))/4 of the closed form.
pub fn bilinear<T: Real>(f: &DataPair<T>, g: &DataPair<T>) -> Result<T> {
    let p = q_closed(&f.add(g)?)?;
    let m = q_closed(&f.sub(g)?)?;
    Ok((p - m) / T::lit(4.0))
}

/// Orthogonality used before applying a gap bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthoMode {
    /// d = 3: F̂₀ = F̂₁ = 0 for ℓ ≤ 1 (the Ḣ^{1/2}-orthogonal complement).
    HHalfPerp,
    /// d = 5: F̂₀ = 0 for ℓ ≤ 1 and F̂₁(ℓ,𝟎) = 0 for ℓ ≤ 1.
    TildePerp,
}

impl OrthoMode {
    pub fn for_dim(d: usize) -> Result<Self> {
        match d {
            3 => Ok(OrthoMode::HHalfPerp),
            5 => Ok(OrthoMode::TildePerp),
            _ => param(format!("no orthogonality mode for d = {d}")),
        }
    }

    fn dim(self) -> usize {
        match self {
            OrthoMode::HHalfPerp => 3,
            OrthoMode::TildePerp => 5,
        }
    }
}

/// Zeroes the low-degree coefficients removed by `mode`.
pub fn project_ortho<T: Real>(f: &DataPair<T>, mode: OrthoMode) -> Result<DataPair<T>> {
    require_dim(f, mode.dim())?;
    let mut out = f.clone();
    for l in 0..=f.lmax().min(1) {
        out.f0.degree_mut(l).iter_mut().for_each(|v| *v = T::zero());
        let idx = out.f1.indices(l).to_vec();
        for (v, m) in out.f1.degree_mut(l).iter_mut().zip(&idx) {
            if mode == OrthoMode::HHalfPerp || m.is_zonal() {
                *v = T::zero();
            }
        }
    }
    Ok(out)
}

/// Rayleigh data of the gap inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapSample<T> {
    pub q: T,
    pub norm_sq: T,
    pub ratio: T,
    /// π/4 for d = 3, 9π/340 for d = 5.
    pub bound: T,
}

/// Gap constant of the form in dimension d.
pub fn gap_constant<T: Real>(d: usize) -> Result<T> {
    match d {
        3 => Ok(T::PI() / T::lit(4.0)),
        5 => Ok(T::lit(9.0) * T::PI() / T::lit(340.0)),
        _ => param(format!("no gap constant for d = {d}")),
    }
}

/// Q(f)/‖f‖² for f already projected with the matching mode.
pub fn gap_lower_bound<T: Real>(f: &DataPair<T>) -> Result<GapSample<T>> {
    let mode = OrthoMode::for_dim(f.d())?;
    if project_ortho(f, mode)? != *f {
        return param("data carry components that the orthogonality mode removes");
    }
    let q = q_closed(f)?;
    let norm_sq = NormFamily::for_dim(f.d()).norm_sq(f)?;
    if norm_sq <= T::zero() {
        return param("zero data have no Rayleigh quotient");
    }
    Ok(GapSample { q, norm_sq, ratio: q / norm_sq, bound: gap_constant(f.d())? })
}

// ---------------------------------------------------------------------------
// Exact band entries

/// π·coef·√radicand, radicand ≥ 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiSurd {
    pub coef: BigRational,
    pub radicand: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

impl PiSurd {
    pub fn rational(coef: BigRational) -> Self {
        PiSurd { coef, radicand: BigRational::one() }
    }

    pub fn to_f64(&self) -> f64 {
        std::f64::consts::PI
            * self.coef.to_f64().unwrap_or(f64::NAN)
            * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// |value/π|².
    pub fn abs_sq(&self) -> BigRational {
        &self.coef * &self.coef * &self.radicand
    }

    /// value/π as a rational when the radicand is a perfect square.
    pub fn as_rational(&self) -> Option<BigRational> {
        rational_sqrt(&self.radicand).map(|s| &self.coef * s)
    }
}

impl std::fmt::Display for PiSurd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "({r})π"),
            None => write!(f, "({})π√({})", self.coef, self.radicand),
        }
    }
}

/// Decides 2x ≥ √u + √v for x rational, u, v ≥ 0 rational.
fn dominates(x: &BigRational, u: &BigRational, v: &BigRational) -> bool {
    let y = x * BigRational::from_integer(2.into());
    if y.is_negative() {
        return false;
    }
    let w = &y * &y - u - v;
    if w.is_negative() {
        return false;
    }
    &w * &w >= BigRational::from_integer(4.into()) * u * v
}

// ---------------------------------------------------------------------------
// Banded forms

/// One 𝐦-chain of a tridiagonal form: entries for ℓ = l_first, l_first+1, …
/// with b[i] coupling ℓ and ℓ+1. Couplings below l_first count as zero.
#[derive(Clone, Debug)]
pub struct BandRow {
    pub m1: usize,
    pub l_first: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub exact: Option<(Vec<PiSurd>, Vec<PiSurd>)>,
}

/// Tridiagonal form T(F) = Σ a F̂(ℓ,𝐦)² + b F̂(ℓ,𝐦)F̂(ℓ+1,𝐦) on ℓ ≥ L, with
/// coefficients depending on 𝐦 only through m₁, truncated at ℓ ≤ l_scan.
#[derive(Clone, Debug)]
pub struct BandedQuadForm {
    pub l_start: usize,
    pub l_scan: usize,
    pub rows: Vec<BandRow>,
    pub tail: Option<TailBound>,
}

impl BandedQuadForm {
    /// A floating-point form from (m₁, l_first, a, b) chains.
    pub fn from_rows(l_start: usize, rows: Vec<(usize, usize, Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let mut out = Vec::new();
        let mut l_scan = l_start;
        for (m1, l_first, a, b) in rows {
            if a.len() != b.len() || a.is_empty() {
                return param("each chain needs equally many a and b entries");
            }
            if l_first < l_start || l_first < m1 {
                return param("a chain cannot start below L or below m₁");
            }
            l_scan = l_scan.max(l_first + a.len() - 1);
            out.push(BandRow { m1, l_first, a, b, exact: None });
        }
        Ok(BandedQuadForm { l_start, l_scan, rows: out, tail: None })
    }
}

/// Polynomial in ℓ with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    fn from_ints(c: &[i64]) -> Self {
        Poly(c.iter().map(|&v| rat(v, 1)).collect())
    }

    fn scale(&self, s: &BigRational) -> Self {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        Poly((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        let mut c = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly(c)
    }

    fn prod(factors: &[&[i64]]) -> Self {
        factors.iter().fold(Poly::from_ints(&[1]), |acc, f| acc.mul(&Poly::from_ints(f)))
    }

    /// p(x + s).
    pub fn shifted(&self, s: i64) -> Self {
        let lin = Poly::from_ints(&[s, 1]);
        let mut out = Poly(vec![BigRational::zero()]);
        for c in self.0.iter().rev() {
            out = out.mul(&lin).add(&Poly(vec![c.clone()]));
        }
        out
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})ℓ")?,
                _ => write!(f, "({c})ℓ^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Polynomial facts covering every ℓ beyond the scanned range:
/// the 𝐦 = 𝟎 slack a_ℓ − ½(b_ℓ + b_{ℓ−1}) equals π·numerator/denominator
/// with a positive denominator, and b_{ℓ,𝟎} = π·coupling/((ℓ+2)(ℓ+3)) ≥ 0.
/// Since a_{ℓ,𝐦} ≥ a_{ℓ,𝟎} and 0 ≤ b_{ℓ,𝐦} ≤ b_{ℓ,𝟎}, positivity of both
/// numerators for ℓ > l_scan certifies the tail.
#[derive(Clone, Debug)]
pub struct TailBound {
    pub slack_numerator: Poly,
    pub coupling_numerator: Poly,
}

impl TailBound {
    /// Both polynomials have only nonnegative coefficients (and a positive
    /// constant) after the shift ℓ = l_scan + 1 + x.
    pub fn holds_beyond(&self, l_scan: usize) -> bool {
        let s = l_scan as i64 + 1;
        [&self.slack_numerator, &self.coupling_numerator].iter().all(|p| {
            let q = p.shifted(s);
            q.0.iter().all(|c| !c.is_negative()) && q.0[0].is_positive()
        })
    }
}

/// Which half of Q₅ a T-form comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T5Kind {
    Zero,
    One,
}

/// 9/340, the d = 5 gap constant divided by π.
fn gap5() -> BigRational {
    rat(9, 340)
}

/// a_{ℓ,𝐦}/π for ℓ ≥ 2 (both kinds).
fn t5_a(l: i64, m: i64) -> BigRational {
    let alpha =
        rat(l.pow(4) + 8 * l.pow(3) + 11 * l * l - 20 * l - 12 + 6 * m * m + 18 * m, (l + 1) * (l + 3));
    let diag = alpha / rat(8, 1) - gap5() * rat((l + 2) * (l + 2), 1);
    diag / rat((l + 1) * (l + 3), 1)
}

/// b_{ℓ,𝐦} for ℓ ≥ 2 (both kinds), derived from the Ĝ-space couplings
/// (π/8)β − 2c·S₅(ℓ,m₁)(ℓ+2)(ℓ+3) and the rescaling Ĝ_ℓ = Ĥ_ℓ/√((ℓ+1)(ℓ+3)).
fn t5_b(l: i64, m: i64) -> PiSurd {
    let k = rat(2 * (l - 1) * (l + 6), 8) - rat(2, 1) * gap5() * rat((l + 2) * (l + 3), 1);
    let s_sq = rat((l + 1 - m) * (l + 4 + m), 4 * (l + 2) * (l + 3));
    let scale_sq = rat(1, (l + 1) * (l + 3) * (l + 2) * (l + 4));
    PiSurd { coef: k, radicand: s_sq * scale_sq }
}

/// T = Q₅ − (9π/340)‖·‖² on the ⊥̃ subspace in the Ĥ variables, for ℓ ≤ l_scan.
pub fn build_t5(kind: T5Kind, l_scan: usize) -> Result<BandedQuadForm> {
    if l_scan < 2 {
        return param("the T-forms start at ℓ = 2; scan bound must be ≥ 2");
    }
    let mut rows = Vec::new();
    for m1 in 0..=l_scan {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let l_first = if kind == T5Kind::One && m1 == 1 { 1 } else { m1.max(2) };
        for l in l_first..=l_scan {
            let (li, mi) = (l as i64, m1 as i64);
            if l == 1 {
                // Ĝ₁ = 3Ĥ/√8; Q₅ carries (π/8)(2α_{1}/9)Ĝ², the L² norm Ĝ² + 2S₅(1,1)Ĝ(1)Ĝ(2).
                let diag = rat(2, 9) * rat(3, 2) / rat(8, 1) - gap5();
                a.push(PiSurd::rational(diag * rat(9, 8)));
                let s_sq = rat(6, 12 * 4) * rat(4, 1);
                let scale_sq = rat(9, 8) * rat(16, 15);
                b.push(PiSurd { coef: -gap5(), radicand: s_sq * scale_sq });
            } else {
                a.push(PiSurd::rational(t5_a(li, mi)));
                b.push(t5_b(li, mi));
            }
        }
        rows.push(BandRow {
            m1,
            l_first,
            a: a.iter().map(PiSurd::to_f64).collect(),
            b: b.iter().map(PiSurd::to_f64).collect(),
            exact: Some((a, b)),
        });
    }
    Ok(BandedQuadForm {
        l_start: if kind == T5Kind::One { 1 } else { 2 },
        l_scan,
        rows,
        tail: Some(t5_tail()),
    })
}

/// Numerators over (ℓ+1)²(ℓ+2)(ℓ+3)² of the 𝐦 = 𝟎 slack, and over
/// 8·340·(ℓ+2)(ℓ+3) of b_{ℓ,𝟎}.
fn t5_tail() -> TailBound {
    let c = gap5();
    let eighth = rat(1, 8);
    let alpha0 = Poly::from_ints(&[-12, -20, 11, 8, 1]);
    // a_ℓ = [α/8 − c(ℓ+2)²(ℓ+1)(ℓ+3)] / ((ℓ+1)²(ℓ+3)²)
    let a_num =
        alpha0.scale(&eighth).add(&Poly::prod(&[&[2, 1], &[2, 1], &[1, 1], &[3, 1]]).scale(&-c.clone()));
    // b_ℓ = (ℓ−1)(ℓ+6)/(8(ℓ+2)(ℓ+3)) − c, and b_{ℓ−1} = (ℓ−2)(ℓ+5)/(8(ℓ+1)(ℓ+2)) − c
    let b_num = Poly::prod(&[&[-1, 1], &[6, 1]])
        .scale(&eighth)
        .add(&Poly::prod(&[&[2, 1], &[3, 1]]).scale(&-c.clone()));
    let bm_num = Poly::prod(&[&[-2, 1], &[5, 1]])
        .scale(&eighth)
        .add(&Poly::prod(&[&[1, 1], &[2, 1]]).scale(&-c.clone()));
    let half = rat(-1, 2);
    let slack = a_num
        .mul(&Poly::from_ints(&[2, 1]))
        .add(&b_num.mul(&Poly::prod(&[&[1, 1], &[1, 1], &[3, 1]])).scale(&half))
        .add(&bm_num.mul(&Poly::prod(&[&[1, 1], &[3, 1], &[3, 1]])).scale(&half));
    let coupling = b_num.scale(&rat(8 * 340, 1));
    TailBound { slack_numerator: slack, coupling_numerator: coupling }
}

/// One scanned condition of the dominance criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub l: usize,
    pub m1: usize,
    pub a: f64,
    pub b: f64,
    /// a − ½(|b_ℓ| + |b_{ℓ−1}|).
    pub slack: f64,
    pub holds: bool,
}

/// Outcome of [`gap_certificate`].
#[derive(Clone, Debug, Serialize)]
pub struct GapCertificate {
    pub holds: bool,
    /// Whether every row was decided in exact arithmetic.
    pub exact: bool,
    pub first_violation: Option<(usize, usize)>,
    /// None when the tail was not checked.
    pub tail_holds: Option<bool>,
    pub rows: Vec<GapRow>,
}

impl GapCertificate {
    /// CSV with columns l, m1, a, b, slack.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["l", "m1", "a", "b", "slack"]).expect("in-memory CSV");
        for r in &self.rows {
            w.write_record([
                r.l.to_string(),
                r.m1.to_string(),
                format!("{:.17e}", r.a),
                format!("{:.17e}", r.b),
                format!("{:.17e}", r.slack),
            ])
            .expect("in-memory CSV");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{} rows, {}", self.rows.len(), if self.holds { "dominant" } else { "violated" });
        if let Some((l, m1)) = self.first_violation {
            let _ = write!(s, " first at (ℓ={l}, m₁={m1})");
        }
        if let Some(t) = self.tail_holds {
            let _ = write!(s, ", tail {}", if t { "certified" } else { "not certified" });
        }
        s
    }
}

/// Checks a_{L,𝐦} ≥ ½|b_{L,𝐦}| and a_{ℓ,𝐦} ≥ ½(|b_{ℓ,𝐦}| + |b_{ℓ−1,𝐦}|) on the
/// scanned range, exactly when the form carries exact entries; with
/// `check_tail`, also the polynomial tail facts.
pub fn gap_certificate(form: &BandedQuadForm, check_tail: bool) -> GapCertificate {
    let mut rows = Vec::new();
    let mut exact = true;
    for row in &form.rows {
        for i in 0..row.a.len() {
            let prev_b = if i > 0 { row.b[i - 1].abs() } else { 0.0 };
            let slack = row.a[i] - 0.5 * (row.b[i].abs() + prev_b);
            let holds = match &row.exact {
                Some((a, b)) => {
                    let prev = if i > 0 { b[i - 1].abs_sq() } else { BigRational::zero() };
                    dominates(
                        &a[i].as_rational().expect("diagonal entries are rational"),
                        &b[i].abs_sq(),
                        &prev,
                    )
                }
                None => {
                    exact = false;
                    slack >= 0.0
                }
            };
            rows.push(GapRow { l: row.l_first + i, m1: row.m1, a: row.a[i], b: row.b[i], slack, holds });
        }
    }
    rows.sort_by_key(|r| (r.l, r.m1));
    let first_violation = rows.iter().find(|r| !r.holds).map(|r| (r.l, r.m1));
    let tail_holds =
        if check_tail { Some(form.tail.as_ref().is_some_and(|t| t.holds_beyond(form.l_scan))) } else { None };
    GapCertificate {
        holds: first_violation.is_none() && tail_holds != Some(false),
        exact,
        first_violation,
        tail_holds,
        rows,
    }
}
