//! Gauss rules for symmetric Jacobi weights, periodic trapezoid rules and
//! adaptive Gauss–Kronrod integration.

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

/// Nodes and weights of a one-dimensional quadrature rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to `f`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// Affine image of a rule on [−1, 1] onto [a, b].
    pub fn mapped(&self, a: T, b: T) -> Rule<T> {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        Rule {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }
}

/// ∫₋₁¹ (1−t²)^{a} dt for a = a2/2, a2 ≥ −1.
///
/// Uses μ(a) = μ(a−1)·2a/(2a+1) from μ(0) = 2 and μ(−½) = π.
pub fn jacobi_mass<T: Real>(a2: i32) -> Result<T> {
    if a2 < -1 {
        return Err(Error::Parameter(format!("weight exponent {}/2 is not integrable", a2)));
    }
    let (mut mass, mut cur) = if a2 % 2 == 0 { (T::lit(2.0), 0) } else { (T::PI(), -1) };
    while cur < a2 {
        cur += 2;
        mass = mass * T::of_i(cur as i64) / T::of_i(cur as i64 + 1);
    }
    Ok(mass)
}

/// n-point Gauss rule for the weight (1−t²)^{a2/2} on [−1, 1].
///
/// Golub–Welsch: the Jacobi matrix of the Gegenbauer family has zero diagonal
/// and off-diagonal √(k(k+2a)/((2k+2a+1)(2k+2a−1))).
pub fn gauss_jacobi_symmetric<T: Real>(n: usize, a2: i32) -> Result<Rule<T>> {
    if n == 0 {
        return Err(Error::Parameter("a Gauss rule needs at least one node".into()));
    }
    let mass = jacobi_mass::<T>(a2)?;
    let a = T::of_i(a2 as i64) / T::lit(2.0);
    let two = T::lit(2.0);
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n];
    for k in 1..n {
        let kf = T::of(k);
        let num = kf * (kf + two * a);
        let den = (two * kf + two * a + T::one()) * (two * kf + two * a - T::one());
        off[k - 1] = (num / den).sqrt();
    }
    let mut first = vec![T::zero(); n];
    first[0] = T::one();
    tridiagonal_eigen(&mut diag, &mut off, &mut first)?;
    let mut pairs: Vec<(T, T)> = diag.into_iter().zip(first).map(|(x, z)| (x, mass * z * z)).collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite nodes"));
    // The spectrum is symmetric; enforce it exactly.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = (pairs[j].0 - pairs[i].0) / two;
        let w = (pairs[j].1 + pairs[i].1) / two;
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = T::zero();
    }
    Ok(Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

/// n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre<T: Real>(n: usize) -> Result<Rule<T>> {
    gauss_jacobi_symmetric(n, 0)
}

/// n-point trapezoid rule on the circle [−π, π), exact for trigonometric
/// polynomials of degree < n.
pub fn periodic_trapezoid<T: Real>(n: usize) -> Rule<T> {
    let h = T::lit(2.0) * T::PI() / T::of(n);
    Rule { nodes: (0..n).map(|j| -T::PI() + h * T::of(j)).collect(), weights: vec![h; n] }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson
/// shifts. `off[i]` couples rows i and i+1; `first` is rotated along so that on
/// return it holds the first components of the normalized eigenvectors when it
/// starts as e₁.
pub fn tridiagonal_eigen<T: Real>(diag: &mut [T], off: &mut [T], first: &mut [T]) -> Result<()> {
    let n = diag.len();
    if off.len() != n || first.len() != n {
        return Err(Error::Parameter("tridiagonal arrays must share a length".into()));
    }
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = T::zero();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Accuracy {
                    what: "tridiagonal QL iteration did not converge".into(),
                    achieved: off[l].abs().f64(),
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * off[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = diag[m] - diag[l] + off[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] -= p;
                    off[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let z = first[i + 1];
                first[i + 1] = s * first[i] + c * z;
                first[i] = c * first[i] - s * z;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
    Ok(())
}

/// Value of an integral with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn kronrod15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Estimate<T> {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let fc = f(mid);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx) + f(mid + dx);
        k += T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            g += T::lit(WG[j / 2]) * pair;
        }
    }
    Estimate { value: k * half, error: ((k - g) * half).abs() }
}

/// Tolerances for [`adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-13, max_panels: 20_000 }
    }
}

/// Globally adaptive G7–K15 integration over the intervals delimited by
/// `breaks` (sorted, at least two entries). Panels never straddle a break, so
/// kinks of the integrand should be listed there.
pub fn adaptive<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    breaks: &[T],
    opts: AdaptiveOptions,
) -> Result<Estimate<T>> {
    if breaks.len() < 2 {
        return Err(Error::Parameter("need at least two break points".into()));
    }
    let mut panels: Vec<(T, T, Estimate<T>)> = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            panels.push((w[0], w[1], kronrod15(&mut f, w[0], w[1])));
        }
    }
    loop {
        let mut value = CompensatedSum::new();
        let mut error = T::zero();
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            value.add(p.2.value);
            error += p.2.error;
            if p.2.error > panels[worst].2.error {
                worst = i;
            }
        }
        let value = value.value();
        let target = T::lit(opts.abs_tol).max(T::lit(opts.rel_tol) * value.abs());
        if error <= target {
            return Ok(Estimate { value, error });
        }
        let (a, b, _) = panels[worst];
        let mid = (a + b) / T::lit(2.0);
        if panels.len() >= opts.max_panels || !(mid > a && mid < b) {
            return Err(Error::Accuracy {
                what: "adaptive quadrature exhausted its panel budget".into(),
                achieved: error.f64(),
            });
        }
        panels[worst] = (a, mid, kronrod15(&mut f, a, mid));
        panels.push((mid, b, kronrod15(&mut f, mid, b)));
    }
}

/// Composite Gauss–Legendre rule on [a, b] whose panels are geometrically
/// graded towards every point of `kinks` lying in (a, b) and towards the
/// endpoints when `grade_ends` is set.
pub fn graded_rule<T: Real>(
    a: T,
    b: T,
    kinks: &[T],
    levels: usize,
    base: &Rule<T>,
    grade_ends: bool,
) -> Rule<T> {
    let mut cuts = vec![a];
    let mut inner: Vec<T> = kinks.iter().copied().filter(|&k| k > a && k < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).expect("finite kinks"));
    cuts.extend(inner);
    cuts.push(b);
    let mut edges = Vec::new();
    let last = cuts.len() - 1;
    for (idx, w) in cuts.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        let grade_lo = idx > 0 || grade_ends;
        let grade_hi = idx + 1 < last || grade_ends;
        let mut pts = vec![lo, hi];
        let half = T::lit(0.5);
        let mut h = len * half;
        for _ in 0..levels {
            h *= half;
            if grade_lo {
                pts.push(lo + h);
            }
            if grade_hi {
                pts.push(hi - h);
            }
        }
        if grade_lo || grade_hi {
            pts.push(lo + len * half);
        }
        pts.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        pts.dedup();
        for p in pts.windows(2) {
            edges.push((p[0], p[1]));
        }
    }
    let mut rule = Rule { nodes: Vec::new(), weights: Vec::new() };
    for (lo, hi) in edges {
        let m = base.mapped(lo, hi);
        rule.nodes.extend(m.nodes);
        rule.weights.extend(m.weights);
    }
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_matches_known_nodes() {
        let r = gauss_legendre::<f64>(3).unwrap();
        let x = (0.6f64).sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15);
        assert!((r.nodes[2] - x).abs() < 1e-15);
        assert!((r.weights[0] - 5.0 / 9.0).abs() < 1e-15);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_rules_integrate_moments() {
        // ∫(1−t²)^{1/2} t² dt = π/8
        let r = gauss_jacobi_symmetric::<f64>(4, 1).unwrap();
        let m2 = r.integrate(|t| t * t);
        assert!((m2 - std::f64::consts::PI / 8.0).abs() < 1e-15);
        // ∫(1−t²) t⁴ dt = 2/5 − 2/7
        let r = gauss_jacobi_symmetric::<f64>(5, 2).unwrap();
        assert!((r.integrate(|t| t.powi(4)) - (0.4 - 2.0 / 7.0)).abs() < 1e-15);
    }

    #[test]
    fn masses() {
        let pi = std::f64::consts::PI;
        assert_eq!(jacobi_mass::<f64>(0).unwrap(), 2.0);
        assert!((jacobi_mass::<f64>(1).unwrap() - pi / 2.0).abs() < 1e-15);
        assert!((jacobi_mass::<f64>(2).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((jacobi_mass::<f64>(-1).unwrap() - pi).abs() < 1e-15);
        assert!(jacobi_mass::<f64>(-2).is_err());
    }

    #[test]
    fn adaptive_handles_kinks() {
        let est =
            adaptive(|x: f64| x.abs().powf(1.5), &[-1.0, 0.0, 1.0], AdaptiveOptions::default()).unwrap();
        assert!((est.value - 0.8).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_exact_for_trig_polynomials() {
        let r = periodic_trapezoid::<f64>(9);
        let v = r.integrate(|t| (4.0 * t).cos().powi(2));
        assert!((v - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_integrates_singular_endpoint() {
        let base = gauss_legendre::<f64>(12).unwrap();
        let r = graded_rule(0.0, 2.0, &[1.0], 30, &base, false);
        let v = r.integrate(|x| (x - 1.0).abs().powf(4.0 / 3.0));
        assert!((v - 2.0 * 3.0 / 7.0).abs() < 1e-13);
    }
}
