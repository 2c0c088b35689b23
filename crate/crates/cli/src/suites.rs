//! Invariant suites behind `verify`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use penrose_strichartz::criticality::{criticality_report, first_variation, i_direct, i_exact_d2};
use penrose_strichartz::deficit::{
    bounds_check, constant_identities, deficit_report, fstar_norm_sq_closed, near_manifold_check,
    sharp_constant, sharp_constant_closed, strichartz_norm_with, taylor_check, DistOptions, NormMethod,
    TAYLOR_EPS, TAYLOR_EPS_EXTENDED,
};
use penrose_strichartz::legendre::{assoc_legendre, recurrence_coeffs};
use penrose_strichartz::penrose::{
    conformal_factor, conformal_factor_cylinder, forward, fstar, inverse, CylinderPoint,
};
use penrose_strichartz::quadform::{build_t5, gap_certificate, gap_lower_bound, Q_oracle, T5Kind, Q3, Q5};
use penrose_strichartz::quadrature::gauss_jacobi_symmetric;
use penrose_strichartz::random::{random_orthogonal, random_pair, rng, DEFAULT_DECAY};
use penrose_strichartz::trigpoly::{Freq, TrigPoly};
use penrose_strichartz::{CoeffField, DataPair, MultiIndex, NormFamily, Result};
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Legendre,
    Penrose,
    Trig,
    Criticality,
    Quadform,
    Gap3,
    Gap5,
    Constants,
    Dual,
    Deficit,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Legendre,
        Suite::Penrose,
        Suite::Trig,
        Suite::Criticality,
        Suite::Quadform,
        Suite::Gap3,
        Suite::Gap5,
        Suite::Constants,
        Suite::Dual,
        Suite::Deficit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Legendre => "legendre",
            Suite::Penrose => "penrose",
            Suite::Trig => "trig",
            Suite::Criticality => "criticality",
            Suite::Quadform => "quadform",
            Suite::Gap3 => "gap3",
            Suite::Gap5 => "gap5",
            Suite::Constants => "constants",
            Suite::Dual => "dual",
            Suite::Deficit => "deficit",
        }
    }
}

/// Deliberate corruption used to confirm that `verify` notices it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Scale the closed-form Q₃ by 1 + 10⁻⁶.
    Q3,
    /// Shift one T₅ diagonal entry below the dominance threshold.
    T5,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub lscan: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { lscan: 200, seed: 0, tolerances: BTreeMap::new(), fault: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    /// Measured quantity; absent for exact yes/no checks.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    #[serde(skip)]
    pub seconds: f64,
}

struct Recorder<'a> {
    suite: &'static str,
    cfg: &'a VerifyConfig,
    checks: Vec<Check>,
    clock: Instant,
}

impl<'a> Recorder<'a> {
    fn new(suite: Suite, cfg: &'a VerifyConfig) -> Self {
        Recorder { suite: suite.name(), cfg, checks: Vec::new(), clock: Instant::now() }
    }

    fn tol(&self, name: &str, default: f64) -> f64 {
        self.cfg.tolerances.get(&format!("{}.{}", self.suite, name)).copied().unwrap_or(default)
    }

    fn push(&mut self, name: &str, value: Option<f64>, tolerance: Option<f64>, passed: bool) {
        let seconds = self.clock.elapsed().as_secs_f64();
        self.clock = Instant::now();
        self.checks.push(Check { suite: self.suite, name: name.into(), value, tolerance, passed, seconds });
    }

    /// value ≤ tolerance.
    fn at_most(&mut self, name: &str, value: f64, default_tol: f64) {
        let t = self.tol(name, default_tol);
        self.push(name, Some(value), Some(t), value <= t);
    }

    /// value ≥ bound, with the bound recorded as the tolerance.
    fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, Some(value), Some(bound), value >= bound);
    }

    fn exact(&mut self, name: &str, holds: bool) {
        self.push(name, None, None, holds);
    }

    fn error(&mut self, name: &str, e: penrose_strichartz::Error) {
        eprintln!("{}.{name}: {e}", self.suite);
        self.push(name, None, None, false);
    }

    /// Runs `f`; an error becomes a failed check named `name`.
    fn guard(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = f(self) {
            self.error(name, e);
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn run(suites: &[Suite], cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &s in suites {
        let mut r = Recorder::new(s, cfg);
        match s {
            Suite::Legendre => legendre(&mut r),
            Suite::Penrose => penrose(&mut r),
            Suite::Trig => trig(&mut r),
            Suite::Criticality => criticality(&mut r),
            Suite::Quadform => quadform(&mut r),
            Suite::Gap3 => gap3(&mut r),
            Suite::Gap5 => gap5(&mut r),
            Suite::Constants => constants(&mut r),
            Suite::Dual => dual(&mut r),
            Suite::Deficit => deficit(&mut r),
        }
        out.extend(r.checks);
    }
    out
}

fn legendre(r: &mut Recorder) {
    r.guard("orthonormality", |r| {
        let mut worst = 0.0f64;
        for n in 3..=8usize {
            let rule = gauss_jacobi_symmetric::<f64>(20, n as i32 - 3)?;
            for m in 0..=12 {
                let table: Vec<Vec<f64>> = (m..=12)
                    .map(|l| rule.nodes.iter().map(|&t| assoc_legendre(n, l, m, t)).collect())
                    .collect::<Result<_>>()?;
                for (i, a) in table.iter().enumerate() {
                    for (j, b) in table.iter().enumerate() {
                        let v: f64 = rule.weights.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum();
                        worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
                    }
                }
            }
        }
        r.at_most("orthonormality", worst, 1e-12);
        Ok(())
    });
    r.guard("recurrence", |r| {
        let mut worst = 0.0f64;
        for n in 3..=8usize {
            for l in 1..=12usize {
                for m1 in 0..=l {
                    let Ok((a, b, c)) = recurrence_coeffs::<f64>(n, l, m1) else { continue };
                    for i in 0..=100 {
                        let t = -1.0 + i as f64 / 50.0;
                        let am = |k: usize| if k < m1 { Ok(0.0) } else { assoc_legendre(n, k, m1, t) };
                        let lower = if l >= 2 { am(l - 2)? } else { 0.0 };
                        worst = worst.max((a * am(l)? - b * t * am(l - 1)? + c * lower).abs());
                    }
                }
            }
        }
        r.at_most("recurrence", worst, 1e-12);
        Ok(())
    });
}

fn unit_vector(dim: usize, g: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..=dim).map(|_| g.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n < 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

fn penrose(r: &mut Recorder) {
    let mut g = rng(r.cfg.seed ^ 0x5eed);
    r.guard("roundtrip", |r| {
        let mut worst = 0.0f64;
        for _ in 0..4000 {
            let time = g.gen_range(-PI + 1e-2..PI - 1e-2);
            let polar = g.gen_range(0.0..PI - time.abs() - 1e-2);
            let p = CylinderPoint { time, polar, omega: unit_vector(2, &mut g) };
            let (t, x) = inverse(&p)?;
            let q = forward(t, &x);
            worst = worst.max((q.time - time).abs()).max((q.polar - polar).abs());
            if polar > 1e-6 {
                for (a, b) in q.omega.iter().zip(&p.omega) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        r.at_most("roundtrip", worst, 1e-12);
        Ok(())
    });
    let mut worst = 0.0f64;
    for i in 0..4000 {
        let s = [0.3, 3.0, 30.0][i % 3];
        let t = g.gen_range(-s..s);
        let x: Vec<f64> = (0..4).map(|_| g.gen_range(-s..s)).collect();
        worst = worst.max((conformal_factor(t, &x) - conformal_factor_cylinder(&forward(t, &x))).abs());
    }
    r.at_most("omega_identity", worst, 1e-12);
}

fn trig(r: &mut Recorder) {
    let c1 = TrigPoly::cos(Freq::int(1));
    let three = BigRational::from_integer(3.into());
    let want = (BigRational::new(3.into(), 2.into()), BigRational::zero());
    let ok =
        (1..=10u32).all(|l| c1.mul(&TrigPoly::cos(Freq::int(l + 1))).pow(2).scale(&three).integral() == want);
    r.exact("time_identity_3pi_over_2", ok);
}

fn criticality(r: &mut Recorder) {
    r.guard("i2_exact", |r| {
        r.exact("i2_exact", i_exact_d2() == BigRational::new((-5).into(), 128.into()));
        let direct = i_direct::<f64>(2)?.value;
        r.at_most("i2_direct", (direct + 5.0 / 128.0).abs(), 1e-10);
        Ok(())
    });
    for d in (2..=10).step_by(2) {
        let name = format!("sign_d{d}");
        r.guard(&name, |r| {
            let rep = criticality_report(d, r.tol("fourier_agreement", 1e-8))?;
            r.exact(&name, rep.sign_observed == rep.sign_expected);
            if let Some(f) = &rep.i_fourier {
                r.at_most(&format!("fourier_agreement_d{d}"), (f.value - rep.i_direct).abs(), 1e-8);
            }
            Ok(())
        });
    }
    for d in [3usize, 5] {
        let name = format!("first_variation_d{d}");
        r.guard(&name, |r| {
            let mut worst = 0.0f64;
            for k in 0..20 {
                let f = random_orthogonal::<f64>(d, 8, DEFAULT_DECAY, r.cfg.seed + 100 + k)?;
                let norm = NormFamily::HalfWave.norm_sq(&f)?.sqrt();
                worst = worst.max(first_variation(d, &f)?.value.abs() / norm);
            }
            r.at_most(&name, worst, 1e-10);
            Ok(())
        });
    }
}

fn quadform(r: &mut Recorder) {
    let scale = if r.cfg.fault == Some(Fault::Q3) { 1.0 + 1e-6 } else { 1.0 };
    for (d, tol) in [(3usize, 1e-10), (5, 1e-9)] {
        let name = format!("q{d}_vs_oracle");
        r.guard(&name, |r| {
            let mut worst = 0.0f64;
            for k in 0..20 {
                let f = random_pair::<f64>(d, 8, 2.0, r.cfg.seed + 200 + k)?;
                let closed = if d == 3 { Q3(&f)? * scale } else { Q5(&f)? };
                worst = worst.max(rel(closed, Q_oracle(&f)?));
            }
            r.at_most(&name, worst, tol);
            Ok(())
        });
    }
}

fn gap3(r: &mut Recorder) {
    let bound = PI / 4.0;
    r.guard("rayleigh_min", |r| {
        let mut lowest = f64::INFINITY;
        for k in 0..50 {
            let f = random_orthogonal::<f64>(3, 10, 2.0, r.cfg.seed + 300 + k)?;
            lowest = lowest.min(gap_lower_bound(&f)?.ratio);
        }
        r.at_least("rayleigh_min", lowest, bound * (1.0 - r.tol("rayleigh_slack", 1e-12)));
        Ok(())
    });
    r.guard("l2_mode_equality", |r| {
        let mode = CoeffField::mode(3, 4, 2, &MultiIndex(vec![0, 0]), 1.0)?;
        let f = DataPair::new(CoeffField::zeros(3, 4), mode)?;
        r.at_most("l2_mode_equality", rel(gap_lower_bound(&f)?.ratio, bound), 1e-14);
        Ok(())
    });
}

fn gap5(r: &mut Recorder) {
    let lscan = r.cfg.lscan;
    r.guard("dominance_zero", |r| {
        let mut form = build_t5(T5Kind::Zero, lscan)?;
        if r.cfg.fault == Some(Fault::T5) {
            let row = &mut form.rows[0];
            row.exact = None;
            row.a[1] = -1.0;
        }
        let cert = gap_certificate(&form, true);
        r.exact("dominance_zero", cert.holds);
        let (a, b) = form.rows[0].exact.clone().unwrap_or_default();
        let identity =
            match (a.first().and_then(|x| x.as_rational()), b.first().and_then(|x| x.as_rational())) {
                (Some(a), Some(b)) => (a - b / BigRational::from_integer(2.into())).is_zero(),
                _ => false,
            };
        r.exact("slack_l2_zero_exact", identity);
        Ok(())
    });
    r.guard("dominance_one", |r| {
        let cert = gap_certificate(&build_t5(T5Kind::One, lscan)?, true);
        r.exact("dominance_one", cert.holds);
        let slack = |l, m1| cert.rows.iter().find(|x| x.l == l && x.m1 == m1).map_or(f64::NAN, |x| x.slack);
        let want1 = 93.0 / 5440.0 * PI - 9.0 / 3400.0 * PI * 15f64.sqrt();
        let want2 = (32.0 / 1275.0 - 7f64.sqrt() / 255.0 - 9.0 / 3400.0 * 15f64.sqrt()) * PI;
        r.at_most("f1_block_l1", (slack(1, 1) - want1).abs(), 1e-15);
        r.at_most("f1_block_l2", (slack(2, 1) - want2).abs(), 1e-15);
        r.exact("f1_blocks_positive", want1 > 0.0 && want2 > 0.0);
        Ok(())
    });
    let bound = 9.0 * PI / 340.0;
    r.guard("rayleigh_min", |r| {
        let mut lowest = f64::INFINITY;
        for k in 0..30 {
            let f = random_orthogonal::<f64>(5, 6, 2.0, r.cfg.seed + 400 + k)?;
            lowest = lowest.min(gap_lower_bound(&f)?.ratio);
        }
        r.at_least("rayleigh_min", lowest, bound * (1.0 - r.tol("rayleigh_slack", 1e-10)));
        Ok(())
    });
}

fn constants(r: &mut Recorder) {
    for c in constant_identities() {
        r.exact(&format!("identity: {}", c.name), c.holds);
    }
    for (d, family) in [(3usize, NormFamily::HalfWave), (5, NormFamily::Energy)] {
        let name = format!("sharp_constant_d{d}");
        r.guard(&name, |r| {
            let s = sharp_constant::<f64>(d, family)?.value;
            r.at_most(&name, (s - sharp_constant_closed(d, family).unwrap_or(f64::NAN)).abs(), 1e-10);
            let n = family.norm_sq(&fstar::<f64>(d, 0))?;
            let want = fstar_norm_sq_closed(d, family).unwrap_or(f64::NAN);
            r.at_most(&format!("fstar_norm_sq_d{d}"), (n - want).abs(), 1e-12);
            Ok(())
        });
    }
}

fn dual(r: &mut Recorder) {
    let cases = [
        (3usize, 3usize, NormFamily::HalfWave, 0u64),
        (3, 3, NormFamily::HalfWave, 1),
        (5, 2, NormFamily::Energy, 2),
    ];
    r.guard("cylinder_vs_region", |r| {
        let mut worst = 0.0f64;
        for (d, l, family, k) in cases {
            let f = random_pair::<f64>(d, l, 2.0, r.cfg.seed + 500 + k)?;
            let a = strichartz_norm_with(&f, family, NormMethod::Cylinder)?.value;
            let b = strichartz_norm_with(&f, family, NormMethod::Region)?.value;
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
        r.at_most("cylinder_vs_region", worst, 1e-8);
        Ok(())
    });
}

fn deficit(r: &mut Recorder) {
    r.guard("psi_at_fstar", |r| {
        let mut worst = 0.0f64;
        for d in [3usize, 5] {
            worst = worst.max(deficit_report(&fstar::<f64>(d, 4), NormFamily::for_dim(d))?.psi.abs());
        }
        r.at_most("psi_at_fstar", worst, 1e-9);
        Ok(())
    });
    for (d, l, seeds) in [(3usize, 6usize, 3u64), (5, 4, 1)] {
        let name = format!("taylor_d{d}");
        r.guard(&name, |r| {
            let (mut worst, mut decay) = (0.0f64, true);
            for k in 0..seeds {
                let f = random_orthogonal::<f64>(d, l, DEFAULT_DECAY, r.cfg.seed + 600 + k)?;
                let rep = taylor_check(&f, &TAYLOR_EPS)?;
                worst = worst.max(rep.rel_error()).max(rep.phi_rel_error());
                let ext = if d == 5 { taylor_check(&f, &TAYLOR_EPS_EXTENDED)? } else { rep };
                decay &= ext.linear_decay();
            }
            r.at_most(&name, worst, 0.02);
            r.exact(&format!("taylor_linear_decay_d{d}"), decay);
            Ok(())
        });
    }
    r.guard("near_manifold", |r| {
        let mut margin = f64::INFINITY;
        for (d, l) in [(3usize, 6usize), (5, 4)] {
            for k in 0..2 {
                let f = random_orthogonal::<f64>(d, l, DEFAULT_DECAY, r.cfg.seed + 700 + k)?;
                let rep = near_manifold_check(&f, 0.05)?;
                margin = margin.min(rep.ratio / rep.threshold - 1.0);
            }
        }
        r.at_least("near_manifold", margin, 0.0);
        Ok(())
    });
    r.guard("upper_bound", |r| {
        let opts = DistOptions { restarts: 2, seed: r.cfg.seed, ..Default::default() };
        let mut ok = true;
        for k in 0..3 {
            let f = random_pair::<f64>(3, 3, 2.0, r.cfg.seed + 800 + k)?;
            ok &= bounds_check(&f, &opts)?.holds();
        }
        r.exact("upper_bound", ok);
        Ok(())
    });
}
