//! Coefficient-space operators: A_{±1}, multiplication by X₀ and the
//! Ḣ^{1/2}×Ḣ^{−1/2} and Ḣ¹×L² products of the underlying physical data.

use crate::error::{param, Result};
use crate::harmonics::field::{CoeffField, DataPair};
use crate::legendre::sfact;
use crate::scalar::{omega, Real};

/// A_s F: multiplies degree-ℓ coefficients by (ℓ+(d−1)/2)^s, s = ±1.
pub fn apply_a<T: Real>(f: &CoeffField<T>, s: i32) -> CoeffField<T> {
    let d = f.d();
    f.map_degrees(|l, v| {
        let w = omega::<T>(d, l);
        if s >= 0 {
            v * w.powi(s)
        } else {
            v / w.powi(-s)
        }
    })
}

/// X₀·F, raising lmax by one:
/// (X₀F)^(ℓ,𝐦) = S_d(ℓ−1,m₁)F̂(ℓ−1,𝐦) + S_d(ℓ,m₁)F̂(ℓ+1,𝐦).
pub fn mult_by_x0<T: Real>(f: &CoeffField<T>) -> CoeffField<T> {
    let d = f.d();
    let lmax = f.lmax();
    let mut out = CoeffField::zeros(d, lmax + 1);
    for l in 0..=lmax + 1 {
        let table = out.table().clone();
        let row = out.degree_mut(l);
        for (p, m) in table.indices(l).iter().enumerate() {
            let m1 = m.top_order();
            let mut v = T::zero();
            if l >= 1 && m1 < l {
                // index p lies in M(ℓ−1) because positions are prefix-stable
                v += sfact::<T>(d, l - 1, m1) * f.degree(l - 1)[p];
            }
            if l < lmax {
                v += sfact::<T>(d, l, m1) * f.degree(l + 1)[p];
            }
            row[p] = v;
        }
    }
    out
}

/// ⟨X₀F, G⟩_{L²(S^d)} without materializing X₀F.
pub fn x0_form<T: Real>(f: &CoeffField<T>, g: &CoeffField<T>) -> T {
    let d = f.d();
    let top = f.lmax().min(g.lmax());
    let mut acc = T::zero();
    for l in 0..top {
        let lo_f = f.degree(l);
        let lo_g = g.degree(l);
        let hi_f = f.degree(l + 1);
        let hi_g = g.degree(l + 1);
        for (p, m) in f.indices(l).iter().enumerate() {
            let s = sfact::<T>(d, l, m.top_order());
            acc += s * (lo_f[p] * hi_g[p] + hi_f[p] * lo_g[p]);
        }
    }
    acc
}

fn check<T: Real>(f: &DataPair<T>, g: &DataPair<T>) -> Result<()> {
    if f.d() != g.d() {
        return param(format!("dimension mismatch: {} vs {}", f.d(), g.d()));
    }
    Ok(())
}

/// Σ ω_ℓ F̂₀Ĝ₀ + ω_ℓ^{−1} F̂₁Ĝ₁ with ω_ℓ = ℓ+(d−1)/2.
pub fn inner_h_half<T: Real>(f: &DataPair<T>, g: &DataPair<T>) -> Result<T> {
    check(f, g)?;
    let d = f.d();
    let mut acc = T::zero();
    for l in 0..=f.lmax().min(g.lmax()) {
        let w = omega::<T>(d, l);
        let a: T = f.f0.degree(l).iter().zip(g.f0.degree(l)).map(|(&x, &y)| x * y).sum();
        let b: T = f.f1.degree(l).iter().zip(g.f1.degree(l)).map(|(&x, &y)| x * y).sum();
        acc += w * a + b / w;
    }
    Ok(acc)
}

/// ∫∇f₀·∇g₀ + ∫f₁g₁ = ∫A₁F₀·A₁G₀·Ω₀ dS + ∫F₁G₁Ω₀ dS with Ω₀ = 1+X₀.
pub fn inner_h_one<T: Real>(f: &DataPair<T>, g: &DataPair<T>) -> Result<T> {
    check(f, g)?;
    let af = apply_a(&f.f0, 1);
    let ag = apply_a(&g.f0, 1);
    Ok(af.dot(&ag)? + x0_form(&af, &ag) + f.f1.dot(&g.f1)? + x0_form(&f.f1, &g.f1))
}

/// Norm family of the data space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormFamily {
    /// Ḣ^{1/2}×Ḣ^{−1/2}(ℝ^d), exponent p = 2(d+1)/(d−1).
    HalfWave,
    /// Ḣ¹×L²(ℝ⁵), exponent p = 4.
    Energy,
}

impl NormFamily {
    /// Family used by the paper for dimension d: energy for d = 5, else Ḣ^{1/2}.
    pub fn for_dim(d: usize) -> Self {
        if d == 5 {
            NormFamily::Energy
        } else {
            NormFamily::HalfWave
        }
    }

    pub fn inner<T: Real>(self, f: &DataPair<T>, g: &DataPair<T>) -> Result<T> {
        match self {
            NormFamily::HalfWave => inner_h_half(f, g),
            NormFamily::Energy => inner_h_one(f, g),
        }
    }

    pub fn norm_sq<T: Real>(self, f: &DataPair<T>) -> Result<T> {
        self.inner(f, f)
    }

    /// Lebesgue exponent paired with the family in dimension d.
    pub fn exponent<T: Real>(self, d: usize) -> T {
        match self {
            NormFamily::HalfWave => T::of(2 * (d + 1)) / T::of(d - 1),
            NormFamily::Energy => T::lit(4.0),
        }
    }

    /// Exponent s of the dilation e^{sσ}f₀(e^σ·) preserving the norm.
    pub fn scaling<T: Real>(self, d: usize) -> T {
        match self {
            NormFamily::HalfWave => T::of(d - 1) / T::lit(2.0),
            NormFamily::Energy => T::of(d - 2) / T::lit(2.0),
        }
    }

    /// Riesz representers (R₀, R₁) on S^d with ⟨f, g⟩ = ∫R₀G₀ + R₁G₁ dS.
    pub fn representers<T: Real>(self, f: &DataPair<T>) -> (CoeffField<T>, CoeffField<T>) {
        match self {
            NormFamily::HalfWave => (apply_a(&f.f0, 1), apply_a(&f.f1, -1)),
            NormFamily::Energy => {
                let a = apply_a(&f.f0.resized(f.lmax() + 1), 1);
                let r0 = a
                    .axpy(T::one(), &mult_by_x0(&apply_a(&f.f0, 1)).resized(f.lmax() + 1))
                    .expect("same shape");
                let r0 = apply_a(&r0, 1);
                let r1 = f.f1.resized(f.lmax() + 1).axpy(T::one(), &mult_by_x0(&f.f1)).expect("same shape");
                (r0, r1)
            }
        }
    }
}
