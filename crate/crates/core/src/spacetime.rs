//! Integrals over the Penrose image of ℝ^{1+d} in the Einstein cylinder.
//!
//! Odd d: integrands invariant under (T, X) ↦ (T+π, −X) integrate to half of
//! their integral over S¹×S^d. Even d: the region {|T| < π, R ≤ π − |T|} is
//! covered by T-panels split at 0, R = s(π − |T|) with Gauss nodes in s, and
//! a quadrature grid on the latitude spheres S^{d−1}.

use crate::error::{param, Result};
use crate::harmonics::{circle_harmonic, CoeffField, DataPair, IndexTable, MultiIndex, SphereGrid};
use crate::legendre::assoc_legendre_table;
use crate::penrose::propagate;
use crate::quadrature::{gauss_legendre, graded_rule, periodic_trapezoid, Rule};
use crate::scalar::Real;

/// Uniform nodes on [−π, π) with weights 2π/n.
pub fn periodic_time_rule<T: Real>(n: usize) -> Rule<T> {
    let r = periodic_trapezoid::<T>(n);
    let pi = T::PI();
    Rule { nodes: r.nodes.iter().map(|&t| t - pi).collect(), weights: r.weights }
}

/// Composite Gauss rule on [−π, π] split at `kinks` and graded towards them.
pub fn graded_time_rule<T: Real>(n: usize, kinks: &[T], levels: usize) -> Result<Rule<T>> {
    let base = gauss_legendre::<T>(n)?;
    Ok(graded_rule(-T::PI(), T::PI(), kinks, levels, &base, false))
}

/// Zeros of cos(kT) in (−π, π) for k = (d−1)/2.
pub fn lift_zeros<T: Real>(d: usize) -> Vec<T> {
    let pi = T::PI();
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let z = T::of(2 * j + 1) * pi / T::of(d - 1);
        if z >= pi {
            break;
        }
        out.push(-z);
        out.push(z);
        j += 1;
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    out
}

fn same_shape<T: Real>(fields: &[&DataPair<T>]) -> Result<(usize, usize)> {
    let first = match fields.first() {
        Some(f) => f,
        None => return param("at least one field is required"),
    };
    let (d, l) = (first.d(), first.lmax());
    if fields.iter().any(|f| f.d() != d || f.lmax() != l) {
        return param("fields must share dimension and degree");
    }
    Ok((d, l))
}

/// Grid on S^d exact for polynomial integrands of degree ≤ `degree`, able to
/// synthesize fields up to `lmax`.
fn exact_grid<T: Real>(d: usize, lmax: usize, degree: usize) -> Result<SphereGrid<T>> {
    SphereGrid::new(d, lmax, degree / 2 + 1, degree + 1)
}

/// ∫_{S^d} weight(T, X₀)·U(T, X) dS for each time in `times`, with a grid
/// exact to `degree`.
pub fn sphere_profile<T: Real, W: Fn(T, T) -> T>(
    data: &DataPair<T>,
    times: &[T],
    degree: usize,
    weight: W,
) -> Result<Vec<T>> {
    let grid = exact_grid::<T>(data.d(), data.lmax(), degree)?;
    let x0: Vec<T> = (0..grid.len()).map(|i| grid.coords(i).t[0]).collect();
    times
        .iter()
        .map(|&t| {
            let v = grid.synthesize(&propagate(data, t).0)?;
            Ok(v.iter().zip(grid.weights()).zip(&x0).map(|((&u, &w), &x)| w * weight(t, x) * u).sum())
        })
        .collect()
}

/// Σ over `times` × grid(S^d) of g(T, X₀, [U_i(T, X)]). The grid integrates
/// polynomials of degree ≤ `degree` exactly.
pub fn cylinder_sum<T: Real, G: FnMut(T, T, &[T]) -> T>(
    fields: &[&DataPair<T>],
    times: &Rule<T>,
    degree: usize,
    mut g: G,
) -> Result<T> {
    let (d, lmax) = same_shape(fields)?;
    let grid = exact_grid::<T>(d, lmax, degree)?;
    let x0: Vec<T> = (0..grid.len()).map(|i| grid.coords(i).t[0]).collect();
    let w = grid.weights();
    let mut vals = vec![T::zero(); fields.len()];
    let mut total = T::zero();
    for (&t, &wt) in times.nodes.iter().zip(&times.weights) {
        let grids = fields.iter().map(|f| grid.synthesize(&propagate(f, t).0)).collect::<Result<Vec<_>>>()?;
        let mut acc = T::zero();
        for i in 0..grid.len() {
            for (v, gv) in vals.iter_mut().zip(&grids) {
                *v = gv[i];
            }
            acc += w[i] * g(t, x0[i], &vals);
        }
        total += wt * acc;
    }
    Ok(total)
}

/// Restriction of fields on S^d to the latitude sphere {X₀ = cos R}.
enum Latitude<T> {
    /// d ≥ 3: the latitude is S^{d−1}; chain (ℓ, m₁, tail) maps to (m₁, tail).
    Sphere { grid: SphereGrid<T>, map: Vec<Vec<(usize, usize)>> },
    /// d = 2: the latitude is a circle sampled at uniform nodes.
    Circle { rule: Rule<T>, orders: Vec<Vec<i32>> },
}

impl<T: Real> Latitude<T> {
    fn new(d: usize, lmax: usize, degree: usize) -> Result<Self> {
        let table = IndexTable::get(d, lmax);
        if d == 2 {
            let rule = periodic_trapezoid::<T>(degree.max(2 * lmax) + 1);
            let orders = (0..=lmax).map(|l| table.indices(l).iter().map(|m| m.0[0]).collect()).collect();
            return Ok(Latitude::Circle { rule, orders });
        }
        let sub = IndexTable::get(d - 1, lmax);
        let map = (0..=lmax)
            .map(|l| {
                table
                    .indices(l)
                    .iter()
                    .map(|m| {
                        let m1 = m.0[0] as usize;
                        let tail = MultiIndex(m.0[1..].to_vec());
                        (m1, sub.position(m1, &tail).expect("tail is a harmonic of degree m₁"))
                    })
                    .collect()
            })
            .collect();
        Ok(Latitude::Sphere { grid: exact_grid(d - 1, lmax, degree)?, map })
    }

    fn weights(&self) -> &[T] {
        match self {
            Latitude::Sphere { grid, .. } => grid.weights(),
            Latitude::Circle { rule, .. } => &rule.weights,
        }
    }

    /// Values of f(cos R, sin R·ω) at the latitude nodes ω.
    fn values(&self, f: &CoeffField<T>, r: T) -> Result<Vec<T>> {
        let d = f.d();
        let lmax = f.lmax();
        let a = assoc_legendre_table(d + 1, lmax, r.cos());
        match self {
            Latitude::Sphere { grid, map } => {
                let mut g = CoeffField::zeros(d - 1, lmax);
                for l in 0..=lmax {
                    for (&v, &(m1, pos)) in f.degree(l).iter().zip(&map[l]) {
                        g.degree_mut(m1)[pos] += v * a[l][m1];
                    }
                }
                grid.synthesize(&g)
            }
            Latitude::Circle { rule, orders } => Ok(rule
                .nodes
                .iter()
                .map(|&phi| {
                    let mut acc = T::zero();
                    for l in 0..=lmax {
                        for (&v, &m) in f.degree(l).iter().zip(&orders[l]) {
                            acc += v * a[l][m.unsigned_abs() as usize] * circle_harmonic(m, phi);
                        }
                    }
                    acc
                })
                .collect()),
        }
    }
}

/// ∬ over the Penrose image of g(T, R, [U_i]) dT dS, using `times` on
/// [−π, π] (which should have a panel edge at T = 0), `r_nodes` Gauss nodes
/// in R and latitude grids exact to `degree`.
pub fn region_sum<T: Real, G: FnMut(T, T, &[T]) -> T>(
    fields: &[&DataPair<T>],
    times: &Rule<T>,
    r_nodes: usize,
    degree: usize,
    mut g: G,
) -> Result<T> {
    let (d, lmax) = same_shape(fields)?;
    let lat = Latitude::<T>::new(d, lmax, degree)?;
    let s_rule = gauss_legendre::<T>(r_nodes)?.mapped(T::zero(), T::one());
    let pi = T::PI();
    let mut vals = vec![T::zero(); fields.len()];
    let mut total = T::zero();
    for (&t, &wt) in times.nodes.iter().zip(&times.weights) {
        let span = pi - t.abs();
        if span <= T::zero() {
            continue;
        }
        let coeffs: Vec<CoeffField<T>> = fields.iter().map(|f| propagate(f, t).0).collect();
        let mut acc_t = T::zero();
        for (&s, &ws) in s_rule.nodes.iter().zip(&s_rule.weights) {
            let r = s * span;
            let jac = ws * span * r.sin().powi(d as i32 - 1);
            let lv = coeffs.iter().map(|c| lat.values(c, r)).collect::<Result<Vec<_>>>()?;
            let mut acc = T::zero();
            for (j, &w) in lat.weights().iter().enumerate() {
                for (v, l) in vals.iter_mut().zip(&lv) {
                    *v = l[j];
                }
                acc += w * g(t, r, &vals);
            }
            acc_t += jac * acc;
        }
        total += wt * acc_t;
    }
    Ok(total)
}
