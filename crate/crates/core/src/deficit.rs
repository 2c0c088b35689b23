//! Strichartz norms, sharp constants, the deficit functionals ψ and φ, their
//! Taylor expansion at f⋆, and the distance to the extremizer manifold.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::harmonics::{DataPair, NormFamily, SphereGrid};
use crate::optim::{nelder_mead, SimplexOptions};
use crate::penrose::{fstar, fstar_orbit, fstar_orbit_values, GroupParams, SymmetryOptions};
use crate::quadform::q_closed;
use crate::quadrature::Estimate;
use crate::random::rng;
use crate::scalar::{omega, Real};
use crate::spacetime::{cylinder_sum, graded_time_rule, lift_zeros, periodic_time_rule, region_sum};

/// How ∬|Ω|^w|U|^p over the Penrose image is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// Cylinder for odd d, region otherwise.
    Auto,
    /// Half the integral over S¹×S^d (odd d only).
    Cylinder,
    /// The image region {|T| < π, R ≤ π − |T|} directly.
    Region,
}

fn check_family(d: usize, family: NormFamily) -> Result<()> {
    if d < 2 {
        return param(format!("need d ≥ 2, got {d}"));
    }
    if family == NormFamily::Energy && d != 5 {
        return param("the energy family is only used in d = 5");
    }
    Ok(())
}

/// w = p(d−1)/2 − (d+1) in the weight |Ω|^w.
pub fn weight_exponent(family: NormFamily) -> i32 {
    match family {
        NormFamily::HalfWave => 0,
        NormFamily::Energy => 2,
    }
}

fn even_integer<T: Real>(p: T) -> Option<usize> {
    let r = p.round();
    (r == p && (r.f64() as usize).is_multiple_of(2)).then(|| r.f64() as usize)
}

/// ‖u‖_{L^p}^p for the solution with data f, p the exponent of `family`.
pub fn strichartz_norm<T: Real>(f: &DataPair<T>, family: NormFamily) -> Result<Estimate<T>> {
    strichartz_norm_with(f, family, NormMethod::Auto)
}

pub fn strichartz_norm_with<T: Real>(
    f: &DataPair<T>,
    family: NormFamily,
    method: NormMethod,
) -> Result<Estimate<T>> {
    let d = f.d();
    check_family(d, family)?;
    let p = family.exponent::<T>(d);
    let w = weight_exponent(family);
    let odd = d % 2 == 1;
    let method = match method {
        NormMethod::Auto if odd => NormMethod::Cylinder,
        NormMethod::Auto => NormMethod::Region,
        m => m,
    };
    if method == NormMethod::Cylinder && !odd {
        return param("the halved-cylinder identity holds for odd d only");
    }
    let l = f.lmax();
    let half = T::lit(0.5);
    let weight = move |t: T, x0: T| (t.cos() + x0).abs().powi(w);
    let exact = even_integer(p);
    let pc = p.ceil().f64() as usize;
    let degree = pc * l + w as usize;
    // |U|^p is not polynomial once the zero set of U depends on X
    let pad = (4 + 4 * l).min(16);
    match method {
        NormMethod::Cylinder => {
            if let Some(pi) = exact {
                // trigonometric polynomial of degree p(L+k)+w in T
                let n = pi * (l + (d - 1) / 2) + w as usize + 1;
                let pi_ = pi as i32;
                let v = cylinder_sum(&[f], &periodic_time_rule(n), degree, |t, x0, u| {
                    weight(t, x0) * u[0].powi(pi_)
                })? * half;
                let error = v.abs() * T::epsilon() * T::of(64);
                return Ok(Estimate { value: v, error });
            }
            let kinks = lift_zeros::<T>(d);
            let g = |t: T, x0: T, u: &[T]| weight(t, x0) * u[0].abs().powf(p);
            let fine = cylinder_sum(&[f], &graded_time_rule(16, &kinks, 18)?, degree + pad, g)? * half;
            let coarse = cylinder_sum(&[f], &graded_time_rule(12, &kinks, 14)?, degree + pad / 2, g)? * half;
            Ok(Estimate { value: fine, error: (fine - coarse).abs() })
        }
        _ => {
            let mut kinks = vec![T::zero()];
            let (nt, levels) = if exact.is_some() {
                (degree + d + 16, 0)
            } else {
                kinks.extend(lift_zeros::<T>(d));
                (12, 12)
            };
            let g = |t: T, r: T, u: &[T]| weight(t, r.cos()) * u[0].abs().powf(p);
            let r_nodes = degree + d + 16;
            let fine = region_sum(&[f], &graded_time_rule(nt, &kinks, levels)?, r_nodes, degree + 16, g)?;
            let coarse = region_sum(
                &[f],
                &graded_time_rule(nt - 4, &kinks, levels.saturating_sub(4))?,
                r_nodes - 6,
                degree + pad / 2,
                g,
            )?;
            Ok(Estimate { value: fine, error: (fine - coarse).abs() })
        }
    }
}

/// 𝒮 = ‖S_t f⋆‖_{L^p}/‖f⋆‖ by quadrature.
pub fn sharp_constant<T: Real>(d: usize, family: NormFamily) -> Result<Estimate<T>> {
    check_family(d, family)?;
    let star = fstar::<T>(d, 0);
    let n = strichartz_norm(&star, family)?;
    let p = family.exponent::<T>(d);
    let s = n.value.powf(p.recip()) / family.norm_sq(&star)?.sqrt();
    Ok(Estimate { value: s, error: s * n.error / (p * n.value) })
}

/// Closed forms: (3/(16π))^{1/4} for d = 3 and (8π)^{−1/2} for the d = 5 energy case.
pub fn sharp_constant_closed(d: usize, family: NormFamily) -> Option<f64> {
    let pi = std::f64::consts::PI;
    match (d, family) {
        (3, NormFamily::HalfWave) => Some((3.0 / (16.0 * pi)).powf(0.25)),
        (5, NormFamily::Energy) => Some((8.0 * pi).powf(-0.5)),
        _ => None,
    }
}

/// ‖f⋆‖²: 2π² for d = 3 (Ḣ^{1/2}) and 4π³ for d = 5 (Ḣ¹).
pub fn fstar_norm_sq_closed(d: usize, family: NormFamily) -> Option<f64> {
    let pi = std::f64::consts::PI;
    match (d, family) {
        (3, NormFamily::HalfWave) => Some(2.0 * pi * pi),
        (5, NormFamily::Energy) => Some(4.0 * pi.powi(3)),
        _ => None,
    }
}

/// Whether 𝒮 is the sharp constant, i.e. f⋆ is an extremizer (odd d).
pub fn is_sharp(d: usize) -> bool {
    d % 2 == 1
}

struct Pieces<T> {
    p: T,
    s: Estimate<T>,
    norm: T,
    strichartz: Estimate<T>,
}

fn pieces<T: Real>(f: &DataPair<T>, family: NormFamily) -> Result<Pieces<T>> {
    Ok(Pieces {
        p: family.exponent(f.d()),
        s: sharp_constant(f.d(), family)?,
        norm: family.norm_sq(f)?.sqrt(),
        strichartz: strichartz_norm(f, family)?,
    })
}

impl<T: Real> Pieces<T> {
    fn psi(&self) -> Estimate<T> {
        let Pieces { p, s, norm, strichartz } = *self;
        let sp = (s.value * norm).powf(p);
        let ds = p * sp / s.value * s.error;
        Estimate { value: sp - strichartz.value, error: strichartz.error + ds }
    }

    fn phi(&self) -> Estimate<T> {
        let Pieces { p, s, norm, strichartz } = *self;
        let two = T::lit(2.0);
        let n2 = strichartz.value.powf(two / p);
        let dn = if strichartz.value > T::zero() {
            two / p * n2 / strichartz.value * strichartz.error
        } else {
            T::zero()
        };
        let s2 = (s.value * norm).powi(2);
        Estimate { value: s2 - n2, error: dn + two * s2 / s.value * s.error }
    }
}

/// ψ(f) = 𝒮^p‖f‖^p − ‖S_t f‖_{L^p}^p.
pub fn psi<T: Real>(f: &DataPair<T>, family: NormFamily) -> Result<Estimate<T>> {
    Ok(pieces(f, family)?.psi())
}

/// φ(f) = 𝒮²‖f‖² − ‖S_t f‖_{L^p}².
pub fn phi<T: Real>(f: &DataPair<T>, family: NormFamily) -> Result<Estimate<T>> {
    Ok(pieces(f, family)?.phi())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeficitReport {
    pub d: usize,
    pub family: NormFamily,
    pub p: f64,
    pub sharp_constant: f64,
    pub sobolev_norm: f64,
    pub strichartz_norm: f64,
    pub psi: f64,
    pub phi: f64,
    /// Error bound on ψ.
    pub quadrature_error: f64,
    pub sharp: bool,
    pub label: String,
}

pub fn deficit_report<T: Real>(f: &DataPair<T>, family: NormFamily) -> Result<DeficitReport> {
    let pc = pieces(f, family)?;
    let psi = pc.psi();
    let sharp = is_sharp(f.d());
    Ok(DeficitReport {
        d: f.d(),
        family,
        p: pc.p.f64(),
        sharp_constant: pc.s.value.f64(),
        sobolev_norm: pc.norm.f64(),
        strichartz_norm: pc.strichartz.value.f64().powf(1.0 / pc.p.f64()),
        psi: psi.value.f64(),
        phi: pc.phi().value.f64(),
        quadrature_error: psi.error.f64(),
        sharp,
        label: if sharp { "sharp deficit" } else { "f⋆-normalized deficit" }.into(),
    })
}

impl DeficitReport {
    /// ψ ≥ −error; only meaningful where 𝒮 is sharp.
    pub fn nonnegative(&self) -> bool {
        self.psi >= -self.quadrature_error
    }
}

// ---------------------------------------------------------------------------
// Taylor expansion at f⋆

/// Default ε grid of the Taylor check.
pub const TAYLOR_EPS: [f64; 3] = [0.1, 0.05, 0.025];

/// The default grid continued by two halvings, for judging the order of the remainder.
pub const TAYLOR_EPS_EXTENDED: [f64; 5] = [0.1, 0.05, 0.025, 0.0125, 0.00625];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaylorReport {
    pub d: usize,
    pub eps: Vec<f64>,
    /// ψ(f⋆+εf)/ε².
    pub psi_ratios: Vec<f64>,
    /// φ(f⋆+εf)/ε².
    pub phi_ratios: Vec<f64>,
    /// Q(f).
    pub q: f64,
    /// Q(f)/(2𝒮²‖f⋆‖²).
    pub phi_target: f64,
    /// Value at ε = 0 of the polynomial through the ψ ratios.
    pub limit: f64,
    pub phi_limit: f64,
    /// Coefficient of ε in that polynomial.
    pub slope: f64,
    /// Observed orders of |ratio − Q| between consecutive ε.
    pub orders: Vec<f64>,
}

impl TaylorReport {
    pub fn rel_error(&self) -> f64 {
        (self.limit - self.q).abs() / self.q.abs()
    }

    pub fn phi_rel_error(&self) -> f64 {
        (self.phi_limit - self.phi_target).abs() / self.phi_target.abs()
    }

    /// First-order decay of |ratio − Q|: the order observed on the finest pair
    /// lies near 1 and is closer to 1 than on the coarsest pair.
    pub fn linear_decay(&self) -> bool {
        match (self.orders.first(), self.orders.last()) {
            (Some(&a), Some(&b)) => (0.7..=1.4).contains(&b) && (b - 1.0).abs() <= (a - 1.0).abs() + 1e-12,
            _ => false,
        }
    }

    /// (ε, ψ ratio, φ ratio) rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(["eps", "psi_ratio", "phi_ratio"]).map_err(io)?;
        for i in 0..self.eps.len() {
            w.write_record(&[
                format!("{:.17e}", self.eps[i]),
                format!("{:.17e}", self.psi_ratios[i]),
                format!("{:.17e}", self.phi_ratios[i]),
            ])
            .map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Format(e.to_string()))?)
            .map_err(|e| Error::Format(e.to_string()))
    }
}

/// Interpolating polynomial through (x_i, y_i) in Newton form; returns its
/// value and first derivative at 0.
fn extrapolate(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    let mut c = y.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - j]);
        }
    }
    let (mut v, mut dv) = (c[n - 1], 0.0);
    for i in (0..n - 1).rev() {
        dv = dv * (0.0 - x[i]) + v;
        v = v * (0.0 - x[i]) + c[i];
    }
    (v, dv)
}

fn orthogonality_defect<T: Real>(f: &DataPair<T>, family: NormFamily) -> Result<T> {
    let star = fstar::<T>(f.d(), f.lmax());
    let ip = family.inner(f, &star)?;
    let scale = (family.norm_sq(f)? * family.norm_sq(&star)?).sqrt();
    Ok(if scale > T::zero() { ip.abs() / scale } else { T::zero() })
}

/// ψ(f⋆+εf)/ε² and φ(f⋆+εf)/ε² over `eps`, extrapolated to ε = 0 and compared
/// with Q(f). f must be orthogonal to f⋆ (d = 3 or 5).
pub fn taylor_check<T: Real>(f: &DataPair<T>, eps: &[f64]) -> Result<TaylorReport> {
    let d = f.d();
    if d != 3 && d != 5 {
        return param(format!("the quadratic form is known for d = 3 and 5, not d = {d}"));
    }
    let family = NormFamily::for_dim(d);
    if orthogonality_defect(f, family)? > T::lit(1e-12) {
        return param("direction is not orthogonal to f⋆");
    }
    if eps.len() < 2 || eps.iter().any(|&e| !(e > 0.0)) {
        return param("need at least two positive ε values");
    }
    let mut sorted = eps.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    sorted.dedup();
    if sorted.len() != eps.len() {
        return param("ε values must be distinct");
    }
    let largest = sorted[0];
    if largest > 0.5 {
        return Err(Error::Accuracy {
            what: "ε grid too coarse for a quadratic expansion".into(),
            achieved: largest,
        });
    }
    let star = fstar::<T>(d, f.lmax());
    let s = sharp_constant::<T>(d, family)?;
    let star_sq = family.norm_sq(&star)?;
    let mut psi_ratios = Vec::new();
    let mut phi_ratios = Vec::new();
    for &e in &sorted {
        let g = star.axpy(T::lit(e), f)?;
        let pc = Pieces {
            p: family.exponent(d),
            s,
            norm: family.norm_sq(&g)?.sqrt(),
            strichartz: strichartz_norm(&g, family)?,
        };
        psi_ratios.push(pc.psi().value.f64() / (e * e));
        phi_ratios.push(pc.phi().value.f64() / (e * e));
    }
    let q = q_closed(f)?.f64();
    let phi_target = q / (2.0 * s.value.f64().powi(2) * star_sq.f64());
    let (limit, slope) = extrapolate(&sorted, &psi_ratios);
    let (phi_limit, _) = extrapolate(&sorted, &phi_ratios);
    let orders = (1..sorted.len())
        .map(|i| {
            let a = (psi_ratios[i - 1] - q).abs();
            let b = (psi_ratios[i] - q).abs();
            (a / b).ln() / (sorted[i - 1] / sorted[i]).ln()
        })
        .collect();
    Ok(TaylorReport {
        d,
        eps: sorted,
        psi_ratios,
        phi_ratios,
        q,
        phi_target,
        limit,
        phi_limit,
        slope,
        orders,
    })
}

// ---------------------------------------------------------------------------
// Distance to the manifold

#[derive(Clone, Copy, Debug)]
pub struct DistOptions {
    /// Jittered restarts besides the one from the identity.
    pub restarts: usize,
    pub seed: u64,
    /// Half-width of the parameter box; outside it the objective is penalized.
    pub box_bound: f64,
    /// Restart points are drawn uniformly from [−jitter, jitter]^n.
    pub jitter: f64,
    /// Extra polynomial degree of the search quadrature.
    pub extra_degree: usize,
    /// Degrees kept beyond L+1 when the final distance is evaluated.
    pub pad: usize,
    /// Coarse search from every start; `sd_tolerance` is relative to ‖f‖².
    pub scout: SimplexOptions,
    /// Refinement of the best coarse point; `sd_tolerance` is relative to ‖f‖².
    pub simplex: SimplexOptions,
}

impl Default for DistOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            box_bound: 3.0,
            jitter: 1.0,
            extra_degree: 6,
            pad: 6,
            scout: SimplexOptions { step: 0.25, sd_tolerance: 1e-7, max_iters: 300 },
            simplex: SimplexOptions { step: 0.05, sd_tolerance: 1e-12, max_iters: 1000 },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistResult {
    pub dist_upper: f64,
    /// Best c·Γ_α; θ and c are the closed-form optima.
    pub params: GroupParams<f64>,
    pub converged: bool,
    /// Objective evaluations over all restarts.
    pub history_len: usize,
    /// Relative norm² of Γ_α f⋆ beyond the evaluation degree.
    pub tail: f64,
}

/// (F₁/ω, −ωF₀): Ph_θ = cos θ + sin θ·J.
fn quarter_turn(f: &DataPair<f64>) -> DataPair<f64> {
    let d = f.d();
    DataPair {
        f0: f.f1.map_degrees(|l, v| v / omega::<f64>(d, l)),
        f1: f.f0.map_degrees(|l, v| -v * omega::<f64>(d, l)),
    }
}

/// ⟨f, Γ_α f⋆⟩ and ⟨Jf, Γ_α f⋆⟩ by sphere quadrature of Riesz representers
/// against pointwise orbit values.
struct Pairing {
    family: NormFamily,
    grid: SphereGrid<f64>,
    wf: [Vec<f64>; 2],
    wj: [Vec<f64>; 2],
}

impl Pairing {
    fn new(f: &DataPair<f64>, family: NormFamily, extra: usize) -> Result<Self> {
        let l = f.lmax() + 1;
        // R·G is integrated exactly up to the degree-(extra) part of G
        let degree = l + extra;
        let grid = SphereGrid::new(f.d(), l, degree / 2 + 1, degree + 1)?;
        let weighted = |g: &DataPair<f64>| -> Result<[Vec<f64>; 2]> {
            let (r0, r1) = family.representers(g);
            let w = grid.weights();
            let v0 = grid.synthesize(&r0.resized(l))?;
            let v1 = grid.synthesize(&r1.resized(l))?;
            Ok([
                v0.iter().zip(w).map(|(a, b)| a * b).collect(),
                v1.iter().zip(w).map(|(a, b)| a * b).collect(),
            ])
        };
        let wf = weighted(f)?;
        let wj = weighted(&quarter_turn(f))?;
        Ok(Self { family, grid, wf, wj })
    }

    fn pair(&self, alpha: &GroupParams<f64>) -> Result<(f64, f64)> {
        let (g0, g1) = fstar_orbit_values(alpha, self.family, &self.grid)?;
        let dot = |w: &[Vec<f64>; 2]| -> f64 {
            w[0].iter().zip(&g0).map(|(a, b)| a * b).sum::<f64>()
                + w[1].iter().zip(&g1).map(|(a, b)| a * b).sum::<f64>()
        };
        Ok((dot(&self.wf), dot(&self.wj)))
    }
}

/// Group coordinates without θ ↔ GroupParams with θ = 0.
fn params_from(v: &[f64], d: usize, family: NormFamily) -> Result<GroupParams<f64>> {
    let mut full = vec![v[0], 0.0];
    full.extend(&v[1..]);
    GroupParams::from_vec(1.0, &full, d, family)
}

/// ‖f − c·Γ_α f⋆‖ with the optimal c, evaluated on projected coefficients.
fn final_distance(
    f: &DataPair<f64>,
    alpha: &GroupParams<f64>,
    family: NormFamily,
    star_sq: f64,
    pad: usize,
) -> Result<(f64, GroupParams<f64>, f64)> {
    let lg = f.lmax() + 1 + pad;
    let opts = SymmetryOptions { pad, tail_threshold: f64::INFINITY };
    let lifted = fstar_orbit(alpha, f.d(), lg, family, &opts)?;
    let g = lifted.data;
    let fx = f.resized(lg);
    let c = family.inner(&fx, &g)? / star_sq;
    let resid = family.norm_sq(&fx.axpy(-c, &g)?)?.max(0.0);
    let dist_sq = resid + c * c * lifted.tail * star_sq;
    let mut params = alpha.clone();
    params.c = c;
    Ok((dist_sq, params, lifted.tail))
}

/// Upper bound on dist(f, 𝐌) = inf ‖f − cΓ_α f⋆‖ for d = 3 (Ḣ^{1/2} group)
/// or d = 5 (energy group).
pub fn dist_to_m<T: Real>(f: &DataPair<T>, opts: &DistOptions) -> Result<DistResult> {
    let d = f.d();
    if d != 3 && d != 5 {
        return param(format!("the extremizer manifold is used for d = 3 and 5, not d = {d}"));
    }
    let family = NormFamily::for_dim(d);
    let f = f.cast::<f64>();
    let f_sq = family.norm_sq(&f)?;
    let star_sq = family.norm_sq(&fstar::<f64>(d, 0))?;
    let identity = GroupParams::<f64>::identity(d, family);
    if f_sq == 0.0 {
        let mut params = identity;
        params.c = 0.0;
        return Ok(DistResult { dist_upper: 0.0, params, converged: true, history_len: 0, tail: 0.0 });
    }
    let pairing = Pairing::new(&f, family, opts.extra_degree)?;
    let n = GroupParams::<f64>::dof(d, family) - 1;
    let bound = opts.box_bound;
    let objective = |v: &[f64]| -> f64 {
        let excess: f64 = v.iter().map(|&x| (x.abs() - bound).max(0.0).powi(2)).sum();
        let Ok(alpha) = params_from(v, d, family) else {
            return f64::INFINITY;
        };
        match pairing.pair(&alpha) {
            Ok((x, y)) => f_sq - (x * x + y * y) / star_sq + 100.0 * f_sq * excess,
            Err(_) => f64::INFINITY,
        }
    };
    let mut r = rng(opts.seed);
    let mut starts = vec![vec![0.0; n]];
    for _ in 0..opts.restarts {
        starts.push((0..n).map(|_| r.gen_range(-opts.jitter..=opts.jitter)).collect());
    }
    // every start gets a coarse search; only the best one is polished
    let scout = SimplexOptions { sd_tolerance: opts.scout.sd_tolerance * f_sq, ..opts.scout };
    let mut best: Option<crate::optim::Minimum> = None;
    let mut history_len = 0;
    for x0 in &starts {
        let m = nelder_mead(objective, x0, &scout)?;
        history_len += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let coarse = best.expect("at least one start");
    let polish = SimplexOptions { sd_tolerance: opts.simplex.sd_tolerance * f_sq, ..opts.simplex };
    let m = nelder_mead(objective, &coarse.x, &polish)?;
    history_len += m.evaluations;
    let best =
        if m.value <= coarse.value { m } else { crate::optim::Minimum { converged: m.converged, ..coarse } };
    let mut alpha = params_from(&best.x, d, family)?;
    let (x, y) = pairing.pair(&alpha)?;
    alpha.theta = (-y).atan2(x);

    // The identity is kept as a candidate so that points of 𝐌 near it are not
    // lost to the flat objective.
    let mut candidates = vec![final_distance(&f, &alpha, family, star_sq, opts.pad)?];
    let mut id = identity.clone();
    let (x, y) = pairing.pair(&id)?;
    id.theta = (-y).atan2(x);
    candidates.push(final_distance(&f, &id, family, star_sq, opts.pad)?);
    let (dist_sq, mut params, tail) = candidates
        .into_iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"))
        .expect("two candidates");
    let mut dist_upper = dist_sq.sqrt();
    if !(dist_upper < f_sq.sqrt()) {
        dist_upper = f_sq.sqrt();
        params.c = 0.0;
    }
    Ok(DistResult { dist_upper, params, converged: best.converged, history_len, tail })
}

// ---------------------------------------------------------------------------
// Upper and lower bounds

/// One failed inequality lhs ≤ rhs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundsReport {
    pub d: usize,
    pub phi: f64,
    pub phi_error: f64,
    pub dist_upper: f64,
    /// 𝒮²·dist_upper².
    pub upper_bound: f64,
    pub violations: Vec<Violation>,
}

impl BoundsReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// φ(f) ≤ 𝒮²·dist(f, 𝐌)², with dist replaced by the optimizer's upper bound.
pub fn bounds_check<T: Real>(f: &DataPair<T>, opts: &DistOptions) -> Result<BoundsReport> {
    let d = f.d();
    let family = NormFamily::for_dim(d);
    let dist = dist_to_m(f, opts)?;
    let fx = f.cast::<f64>();
    let ph = phi(&fx, family)?;
    let s = sharp_constant::<f64>(d, family)?.value;
    let upper_bound = s * s * dist.dist_upper.powi(2);
    let slack = ph.error + 1e-12 * s * s * family.norm_sq(&fx)?;
    let mut violations = Vec::new();
    if ph.value > upper_bound + slack {
        violations.push(Violation { check: "phi <= S^2 dist^2".into(), lhs: ph.value, rhs: upper_bound });
    }
    Ok(BoundsReport {
        d,
        phi: ph.value,
        phi_error: ph.error,
        dist_upper: dist.dist_upper,
        upper_bound,
        violations,
    })
}

/// 𝒮²/3 (d = 3) or (18/85)𝒮₅² (d = 5).
pub fn lower_bound_constant(d: usize) -> Result<f64> {
    match d {
        3 => Ok(sharp_constant_closed(3, NormFamily::HalfWave).expect("closed form").powi(2) / 3.0),
        5 => Ok(18.0 / 85.0 * sharp_constant_closed(5, NormFamily::Energy).expect("closed form").powi(2)),
        _ => param(format!("no local lower bound for d = {d}")),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NearManifoldReport {
    pub d: usize,
    pub eps: f64,
    pub phi: f64,
    /// ε‖f⊥‖, an upper bound for dist(f⋆+εf⊥, 𝐌).
    pub dist_est: f64,
    pub ratio: f64,
    pub constant: f64,
    /// constant·(1 − 10ε).
    pub threshold: f64,
    pub holds: bool,
}

/// φ(f⋆+εf⊥)/(ε‖f⊥‖)² against the local lower-bound constant.
pub fn near_manifold_check<T: Real>(f_perp: &DataPair<T>, eps: f64) -> Result<NearManifoldReport> {
    let d = f_perp.d();
    let constant = lower_bound_constant(d)?;
    let family = NormFamily::for_dim(d);
    let f = f_perp.cast::<f64>();
    if orthogonality_defect(&f, family)? > 1e-12 {
        return param("direction is not orthogonal to f⋆");
    }
    if !(eps > 0.0) {
        return param("ε must be positive");
    }
    let g = fstar::<f64>(d, f.lmax()).axpy(eps, &f)?;
    let ph = phi(&g, family)?.value;
    let dist_est = eps * family.norm_sq(&f)?.sqrt();
    if dist_est == 0.0 {
        return param("zero direction");
    }
    let ratio = ph / (dist_est * dist_est);
    let threshold = constant * (1.0 - 10.0 * eps);
    Ok(NearManifoldReport {
        d,
        eps,
        phi: ph,
        dist_est,
        ratio,
        constant,
        threshold,
        holds: ratio >= threshold,
    })
}

// ---------------------------------------------------------------------------
// Exact constant identities

/// coef·π^pi·(𝒮²)^s.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Monomial {
    coef: BigRational,
    pi: i32,
    s: i32,
}

impl Monomial {
    fn new(n: i64, d: i64, pi: i32, s: i32) -> Self {
        Monomial { coef: BigRational::new(BigInt::from(n), BigInt::from(d)), pi, s }
    }

    fn mul(&self, o: &Self) -> Self {
        Monomial { coef: &self.coef * &o.coef, pi: self.pi + o.pi, s: self.s + o.s }
    }

    fn div(&self, o: &Self) -> Self {
        Monomial { coef: &self.coef / &o.coef, pi: self.pi - o.pi, s: self.s - o.s }
    }

    /// Rewrites (𝒮²)^s with (𝒮²)^e = value, leaving an exponent in [0, e).
    fn reduce(mut self, e: i32, value: &Monomial) -> Self {
        while self.s >= e {
            self = Monomial { s: self.s - e, ..self }.mul(value);
        }
        while self.s < 0 {
            self = Monomial { s: self.s + e, ..self }.div(value);
        }
        self
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.coef)?;
        if self.pi != 0 {
            write!(f, "·π^{}", self.pi)?;
        }
        if self.s != 0 {
            write!(f, "·S²^{}", self.s)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantIdentity {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// gap/(2𝒮²‖f⋆‖²) equals the local lower-bound constant, in exact arithmetic
/// with π kept symbolic.
pub fn constant_identities() -> Vec<ConstantIdentity> {
    let s2 = Monomial::new(1, 1, 0, 1);
    let two = Monomial::new(2, 1, 0, 0);
    // d = 3: 𝒮⁴ = 3/(16π), ‖f⋆‖² = 2π², gap π/4
    let s4_3 = Monomial::new(3, 16, -1, 0);
    let lhs3 = Monomial::new(1, 4, 1, 0).div(&two.mul(&s2).mul(&Monomial::new(2, 1, 2, 0))).reduce(2, &s4_3);
    let rhs3 = Monomial::new(1, 3, 0, 1).reduce(2, &s4_3);
    // d = 5: 𝒮₅² = 1/(8π), ‖f⋆‖² = 4π³, gap 9π/340
    let s2_5 = Monomial::new(1, 8, -1, 0);
    let lhs5 =
        Monomial::new(9, 340, 1, 0).div(&two.mul(&s2).mul(&Monomial::new(4, 1, 3, 0))).reduce(1, &s2_5);
    let rhs5 = Monomial::new(18, 85, 0, 1).reduce(1, &s2_5);
    let closed5 = Monomial::new(9, 340, -1, 0);
    vec![
        ConstantIdentity {
            name: "(pi/4)/(2 S^2 2pi^2) = S^2/3, S^4 = 3/(16 pi)".into(),
            lhs: lhs3.to_string(),
            rhs: rhs3.to_string(),
            holds: lhs3 == rhs3 && lhs3.coef.is_positive(),
        },
        ConstantIdentity {
            name: "(9pi/340)/(2 S5^2 4pi^3) = 9/(340 pi) = (18/85) S5^2, S5^2 = 1/(8 pi)".into(),
            lhs: lhs5.to_string(),
            rhs: rhs5.to_string(),
            holds: lhs5 == rhs5 && lhs5 == closed5 && !lhs5.coef.is_one(),
        },
    ]
}
