//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use penrose_strichartz::criticality::{criticality_report, first_variation, i_direct, i_exact_d2};
use penrose_strichartz::deficit::{
    bounds_check, constant_identities, near_manifold_check, sharp_constant, sharp_constant_closed,
    strichartz_norm_with, taylor_check, DistOptions, NormMethod, TAYLOR_EPS, TAYLOR_EPS_EXTENDED,
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

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1() -> Result<Outcome> {
    let t0 = Instant::now();
    let exact = i_exact_d2() == BigRational::new((-5).into(), 128.into());
    let gap = (i_direct::<f64>(2)?.value + 5.0 / 128.0).abs();
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        exact && gap <= 1e-10 && secs < 1.0,
        format!("exact={exact} |direct+5/128|={gap:.1e} in {secs:.2}s"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let t0 = Instant::now();
    let (mut signs, mut worst) = (true, 0.0f64);
    for d in [2usize, 4, 6, 8, 10] {
        let rep = criticality_report(d, 1e-8)?;
        signs &= rep.sign_observed == rep.sign_expected;
        if let Some(f) = &rep.i_fourier {
            worst = worst.max((f.value - rep.i_direct).abs());
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        signs && worst <= 1e-8 && secs < 30.0,
        format!("signs={signs} max|direct−fourier|={worst:.1e} in {secs:.2}s"),
    )
}

fn criterion_3() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for d in [3usize, 5] {
        for seed in 0..20 {
            let f = random_orthogonal::<f64>(d, 8, DEFAULT_DECAY, 1000 + seed)?;
            let norm = NormFamily::HalfWave.norm_sq(&f)?.sqrt();
            worst = worst.max(first_variation(d, &f)?.value.abs() / norm);
        }
    }
    outcome(worst <= 1e-10, format!("max |δ|/‖f⊥‖ = {worst:.1e} over 40 directions"))
}

fn criterion_4() -> Result<Outcome> {
    let mut worst = [0.0f64; 2];
    for (i, d) in [3usize, 5].into_iter().enumerate() {
        for seed in 0..20 {
            let f = random_pair::<f64>(d, 8, 2.0, 2000 + seed)?;
            let closed = if d == 3 { Q3(&f)? } else { Q5(&f)? };
            worst[i] = worst[i].max(rel(closed, Q_oracle(&f)?));
        }
    }
    outcome(worst[0] <= 1e-10 && worst[1] <= 1e-9, format!("Q3 {:.1e}, Q5 {:.1e}", worst[0], worst[1]))
}

fn criterion_5() -> Result<Outcome> {
    let bound = PI / 4.0;
    let mut lowest = f64::INFINITY;
    for seed in 0..50 {
        let f = random_orthogonal::<f64>(3, 8, 2.0, 3000 + seed)?;
        lowest = lowest.min(gap_lower_bound(&f)?.ratio);
    }
    let mode = CoeffField::mode(3, 4, 2, &MultiIndex(vec![0, 0]), 1.0)?;
    let pure = gap_lower_bound(&DataPair::new(CoeffField::zeros(3, 4), mode)?)?.ratio;
    let eq = rel(pure, bound);
    outcome(lowest >= bound && eq <= 1e-14, format!("min ratio {lowest:.6} ≥ π/4; ℓ=2 mode off by {eq:.1e}"))
}

fn criterion_6() -> Result<Outcome> {
    let zero = build_t5(T5Kind::Zero, 200)?;
    let (a, b) = zero.rows[0].exact.clone().expect("exact entries");
    let identity = match (a[0].as_rational(), b[0].as_rational()) {
        (Some(a), Some(b)) => (a - b / BigRational::from_integer(2.into())).is_zero(),
        _ => false,
    };
    let c0 = gap_certificate(&zero, true);
    let c1 = gap_certificate(&build_t5(T5Kind::One, 200)?, true);
    let slack = |l, m1| c1.rows.iter().find(|r| r.l == l && r.m1 == m1).map_or(f64::NAN, |r| r.slack);
    let want1 = 93.0 / 5440.0 * PI - 9.0 / 3400.0 * PI * 15f64.sqrt();
    let want2 = (32.0 / 1275.0 - 7f64.sqrt() / 255.0 - 9.0 / 3400.0 * 15f64.sqrt()) * PI;
    let blocks = (slack(1, 1) - want1).abs() <= 1e-15
        && (slack(2, 1) - want2).abs() <= 1e-15
        && want1 > 0.0
        && want2 > 0.0;
    let bound = 9.0 * PI / 340.0;
    let mut lowest = f64::INFINITY;
    for seed in 0..50 {
        let f = random_orthogonal::<f64>(5, 6, 2.0, 4000 + seed)?;
        lowest = lowest.min(gap_lower_bound(&f)?.ratio);
    }
    let scan = c0.holds && c1.holds && c0.tail_holds == Some(true) && c1.tail_holds == Some(true);
    outcome(
        identity && scan && blocks && lowest >= bound * (1.0 - 1e-10),
        format!("identity={identity} dominance(ℓ≤200, tail)={scan} f₁ blocks={blocks} min ratio {lowest:.6}"),
    )
}

fn criterion_7() -> Result<Outcome> {
    let ids = constant_identities();
    let all = ids.iter().all(|c| c.holds);
    outcome(
        all && ids.len() == 2,
        ids.iter().map(|c| format!("{} = {}", c.lhs, c.rhs)).collect::<Vec<_>>().join("; "),
    )
}

fn criterion_8() -> Result<Outcome> {
    let t0 = Instant::now();
    let s3 = sharp_constant::<f64>(3, NormFamily::HalfWave)?.value;
    let s5 = sharp_constant::<f64>(5, NormFamily::Energy)?.value;
    let e3 = (s3 - sharp_constant_closed(3, NormFamily::HalfWave).unwrap_or(f64::NAN)).abs();
    let e5 = (s5 - sharp_constant_closed(5, NormFamily::Energy).unwrap_or(f64::NAN)).abs();
    let n3 = (NormFamily::HalfWave.norm_sq(&fstar::<f64>(3, 0))? - 2.0 * PI * PI).abs();
    let n5 = (NormFamily::Energy.norm_sq(&fstar::<f64>(5, 0))? - 4.0 * PI.powi(3)).abs();
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        e3 <= 1e-10 && e5 <= 1e-10 && n3 <= 1e-12 && n5 <= 1e-12 && secs < 5.0,
        format!("𝒮 errors {e3:.1e}, {e5:.1e}; ‖f⋆‖² errors {n3:.1e}, {n5:.1e} in {secs:.2}s"),
    )
}

fn criterion_9() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut off = Vec::new();
    for (d, lmax) in [(3usize, 6usize), (5, 4)] {
        for seed in 5000..5010 {
            let f = random_orthogonal::<f64>(d, lmax, DEFAULT_DECAY, seed)?;
            worst = worst.max(taylor_check(&f, &TAYLOR_EPS)?.rel_error());
            let ext = taylor_check(&f, &TAYLOR_EPS_EXTENDED)?;
            if !ext.linear_decay() {
                let orders: Vec<String> = ext.orders.iter().map(|o| format!("{o:.2}")).collect();
                off.push(format!("d={d} seed {seed} orders [{}]", orders.join(", ")));
            }
        }
    }
    let mut detail = format!("max relative error {worst:.1e}; linear decay in {}/20", 20 - off.len());
    if !off.is_empty() {
        detail += &format!(" (not linear: {})", off.join("; "));
    }
    outcome(worst <= 0.02 && off.is_empty(), detail)
}

fn criterion_10() -> Result<Outcome> {
    let mut upper = 0;
    for seed in 0..10 {
        let f = random_pair::<f64>(3, 3, 2.0, 6000 + seed)?;
        upper += bounds_check(&f, &DistOptions { restarts: 2, ..Default::default() })?.holds() as usize;
        let g = random_pair::<f64>(5, 2, 2.0, 6100 + seed)?;
        upper += bounds_check(&g, &DistOptions { restarts: 1, ..Default::default() })?.holds() as usize;
    }
    let mut near = 0;
    let mut worst = f64::INFINITY;
    for (d, lmax) in [(3usize, 6usize), (5, 4)] {
        for seed in 0..5 {
            let r =
                near_manifold_check(&random_orthogonal::<f64>(d, lmax, DEFAULT_DECAY, 7000 + seed)?, 0.05)?;
            near += r.holds as usize;
            worst = worst.min(r.ratio / r.threshold);
        }
    }
    outcome(
        upper == 20 && near == 10,
        format!("upper bound {upper}/20; near-manifold {near}/10, min ratio/threshold {worst:.3}"),
    )
}

fn criterion_11() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in 3..=8usize {
        let rule = gauss_jacobi_symmetric::<f64>(20, n as i32 - 3)?;
        for m in 0..=12 {
            for l in m..=12 {
                for lp in m..=12 {
                    let v: f64 = rule
                        .nodes
                        .iter()
                        .zip(&rule.weights)
                        .map(|(&t, w)| {
                            w * assoc_legendre(n, l, m, t).unwrap() * assoc_legendre(n, lp, m, t).unwrap()
                        })
                        .sum();
                    worst = worst.max((v - if l == lp { 1.0 } else { 0.0 }).abs());
                }
            }
        }
    }
    let mut rec = 0.0f64;
    for n in 3..=8usize {
        for l in 1..=12usize {
            for m1 in 0..=l {
                let Ok((a, b, c)) = recurrence_coeffs::<f64>(n, l, m1) else { continue };
                for i in 0..=40 {
                    let t = -1.0 + i as f64 / 20.0;
                    let am = |k: usize| if k < m1 { 0.0 } else { assoc_legendre(n, k, m1, t).unwrap() };
                    let lower = if l >= 2 { am(l - 2) } else { 0.0 };
                    rec = rec.max((a * am(l) - b * t * am(l - 1) + c * lower).abs());
                }
            }
        }
    }
    ok &= worst <= 1e-12 && rec <= 1e-12;
    notes.push(format!("legendre {worst:.1e}/{rec:.1e}"));

    let mut g = rng(11);
    let (mut round, mut omega) = (0.0f64, 0.0f64);
    for _ in 0..2000 {
        let time = g.gen_range(-PI + 1e-2..PI - 1e-2);
        let polar = g.gen_range(0.0..PI - time.abs() - 1e-2);
        let (s, c) = g.gen_range(0.0..2.0 * PI).sin_cos();
        let z: f64 = g.gen_range(-1.0..1.0);
        let w = (1.0 - z * z).sqrt();
        let p = CylinderPoint { time, polar, omega: vec![z, w * c, w * s] };
        let (t, x) = inverse(&p)?;
        let q = forward(t, &x);
        round = round.max((q.time - time).abs()).max((q.polar - polar).abs());
        let (t, x): (f64, Vec<f64>) =
            (g.gen_range(-5.0..5.0), (0..4).map(|_| g.gen_range(-5.0..5.0)).collect());
        omega = omega.max((conformal_factor(t, &x) - conformal_factor_cylinder(&forward(t, &x))).abs());
    }
    ok &= round <= 1e-12 && omega <= 1e-12;
    notes.push(format!("roundtrip {round:.1e}, Ω {omega:.1e}"));

    let mut dual = 0.0f64;
    for (d, l, family, seed) in [(3usize, 3usize, NormFamily::HalfWave, 1u64), (5, 2, NormFamily::Energy, 2)]
    {
        let f = random_pair::<f64>(d, l, 2.0, 8000 + seed)?;
        let a = strichartz_norm_with(&f, family, NormMethod::Cylinder)?.value;
        let b = strichartz_norm_with(&f, family, NormMethod::Region)?.value;
        dual = dual.max((a - b).abs() / a.abs().max(1.0));
    }
    ok &= dual <= 1e-8;
    notes.push(format!("dual {dual:.1e}"));

    let c1 = TrigPoly::cos(Freq::int(1));
    let three = BigRational::from_integer(3.into());
    let want = (BigRational::new(3.into(), 2.into()), BigRational::zero());
    let trig =
        (1..=10u32).all(|l| c1.mul(&TrigPoly::cos(Freq::int(l + 1))).pow(2).scale(&three).integral() == want);
    ok &= trig;
    notes.push(format!("trig identity {trig}"));

    let t0 = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_strichartz"))
        .args(["verify", "--format", "json"])
        .output()
        .expect("verify runs");
    let secs = t0.elapsed();
    let verify = out.status.success() && secs < Duration::from_secs(60);
    ok &= verify;
    notes.push(format!("verify exit {:?} in {:.1}s", out.status.code(), secs.as_secs_f64()));
    outcome(ok, notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("I(2) = -5/128 exactly", criterion_1),
        ("sign of I(d) for even d", criterion_2),
        ("odd-d criticality", criterion_3),
        ("closed-form Q against oracle", criterion_4),
        ("d=3 spectral gap", criterion_5),
        ("d=5 dominance", criterion_6),
        ("constant identities", criterion_7),
        ("sharp-constant quadrature", criterion_8),
        ("Taylor expansion at f⋆", criterion_9),
        ("upper and local lower bounds", criterion_10),
        ("infrastructure invariants", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = run().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        failed += !o.passed as usize;
        println!(
            "{} criterion {:>2} {name}: {} [{:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
