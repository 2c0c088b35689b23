mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use penrose_strichartz::criticality::*;
use penrose_strichartz::harmonics::{synthesize, zonal_rodrigues, DataPair, NormFamily};
use penrose_strichartz::penrose::fstar;
use penrose_strichartz::quadrature::gauss_legendre;
use std::f64::consts::PI;
use std::time::Instant;

/// Composite 4-point Gauss on uniform panels whose edges include every kink.
fn brute_force_i(d: usize, panels: usize) -> f64 {
    let g = gauss_legendre::<f64>(4).unwrap();
    let k = (d as f64 - 1.0) / 2.0;
    let q = 4.0 / (d as f64 - 1.0);
    let f = |t: f64| {
        let c = (k * t).cos();
        c.abs().powf(q) * c * ((k + 2.0) * t).cos() * t.cos() * t.sin().powi(d as i32)
    };
    let n = panels / (d - 1) * (d - 1);
    let h = 2.0 * PI / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let a = -PI + i as f64 * h;
        for (x, w) in g.nodes.iter().zip(&g.weights) {
            s += w * h / 2.0 * f(a + h / 2.0 * (x + 1.0));
        }
    }
    s / PI
}

fn orthogonal_pair(d: usize, lmax: usize, seed: u64, family: NormFamily) -> DataPair<f64> {
    let f = random_pair(d, lmax, seed);
    let star = fstar::<f64>(d, lmax);
    let c = family.inner(&f, &star).unwrap() / family.norm_sq(&star).unwrap();
    f.axpy(-c, &star).unwrap()
}

#[test]
fn i2_is_exactly_minus_five_over_128() {
    let t0 = Instant::now();
    assert_eq!(i_exact_d2(), BigRational::new(BigInt::from(-5), BigInt::from(128)));
    let direct = i_direct::<f64>(2).unwrap();
    assert_eq!(direct.value, -5.0 / 128.0);
    assert_eq!(direct.error, 0.0);
    assert!((i_quadrature::<f64>(2).unwrap().value + 5.0 / 128.0).abs() <= 1e-10);
    assert!(t0.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn i_direct_matches_brute_force_and_sign() {
    for d in [4usize, 6, 8, 10] {
        let q = i_direct::<f64>(d).unwrap();
        let oracle = brute_force_i(d, 1_000_000);
        assert!((q.value - oracle).abs() <= 1e-12, "d={} {} vs {}", d, q.value, oracle);
        let sign = if (d / 2) % 2 == 0 { 1.0 } else { -1.0 };
        assert!(sign * q.value > q.error, "d={}", d);
    }
}

#[test]
fn fourier_route_agrees() {
    for d in [4usize, 6, 8, 10] {
        let direct = i_direct::<f64>(d).unwrap();
        let f = i_fourier(d).unwrap();
        assert!((f.value - direct.value).abs() <= 1e-8, "d={}", d);
        let sign = if (d / 2) % 2 == 0 { 1.0 } else { -1.0 };
        assert!(f.normalized > 0.0);
        assert!((sign * 2f64.powi(d as i32 + 2) * f.value - f.normalized).abs() < 1e-12);
        let sum: f64 = f.terms.iter().map(|t| t.contribution).sum();
        assert!((sum - f.value).abs() < 1e-15);
        assert!(f.terms.iter().all(|t| t.k % (d - 1) == 0));
    }
    assert!(i_fourier(2).is_err());
    assert!(i_fourier(5).is_err());
}

#[test]
fn report_flags_signs() {
    for d in [2usize, 4, 6] {
        let r = criticality_report(d, 1e-8).unwrap();
        assert!(r.passed(), "{:?}", r);
    }
    assert_eq!(criticality_report(2, 1e-8).unwrap().i_exact.as_deref(), Some("-5/128"));
    assert!(criticality_report(3, 1e-8).is_err());
}

#[test]
fn odd_dimensions_are_critical() {
    for d in [3usize, 5] {
        let t0 = Instant::now();
        let mut worst = 0.0f64;
        for seed in 0..20 {
            let f = orthogonal_pair(d, 8, 100 + seed, NormFamily::HalfWave);
            let norm = NormFamily::HalfWave.norm_sq(&f).unwrap().sqrt();
            let v = first_variation(d, &f).unwrap();
            worst = worst.max(v.value.abs() / norm);
        }
        eprintln!("d={} worst {:e} in {:?}", d, worst, t0.elapsed());
        assert!(worst <= 1e-10, "d={} {:e}", d, worst);
    }
}

#[test]
fn energy_family_is_critical_in_d5() {
    for seed in 0..5 {
        let f = orthogonal_pair(5, 4, 300 + seed, NormFamily::Energy);
        let norm = NormFamily::Energy.norm_sq(&f).unwrap().sqrt();
        let v = first_variation_with(5, &f, NormFamily::Energy).unwrap();
        assert!(v.value.abs() <= 1e-10 * norm, "{:e}", v.value);
    }
}

#[test]
fn non_orthogonal_direction_is_rejected() {
    let f = random_pair(3, 3, 1);
    assert!(matches!(first_variation(3, &f), Err(penrose_strichartz::Error::Parameter(_))));
}

#[test]
fn odd_cancellation() {
    for d in 2..=10 {
        let e = odd_cancellation_integral::<f64>(d).unwrap();
        assert!(e.value.abs() < 1e-14, "d={} {:e}", d, e.value);
    }
}

#[test]
fn critical_direction_properties() {
    for d in [2usize, 4, 6] {
        let f = critical_direction_even::<f64>(d, 4).unwrap();
        let star = fstar::<f64>(d, 4);
        assert!(NormFamily::HalfWave.inner(&f, &star).unwrap().abs() < 1e-15);
        let want = 2.0 + (d as f64 - 1.0) / 2.0;
        assert!((NormFamily::HalfWave.norm_sq(&f).unwrap() - want).abs() < 1e-13);
        let mut r = rng(d as u64);
        for _ in 0..10 {
            let x = random_unit_point(d, &mut r);
            let a = synthesize(&f.f0, &x).unwrap();
            let b = zonal_rodrigues(d, x[0]);
            assert!((a.abs() - b.abs()).abs() < 1e-12 && (a - b).abs() < 1e-12 || (a + b).abs() < 1e-12);
        }
    }
    assert!(critical_direction_even::<f64>(3, 4).is_err());
    assert!(critical_direction_even::<f64>(4, 1).is_err());
}

#[test]
fn region_constant_is_constant_and_negative() {
    for d in [2usize, 4, 6, 8] {
        let c = region_constant::<f64>(d, PI / 4.0).unwrap();
        for t in [0.3f64, 0.7, 1.2, 2.0, -0.5, 2.9] {
            // cancellation in the ratio grows like 1/(cos T sin^d T)
            let cond = 1.0 / (t.cos() * t.sin().powi(d as i32)).abs();
            let tol = 1e-13 + 1e-15 * cond;
            assert!((region_constant::<f64>(d, t).unwrap() - c).abs() < tol, "d={} T={}", d, t);
        }
        // Rodrigues: Y = R(1−t²)^{−(d−2)/2}(d/dt)²(1−t²)^{q}, q = (d+2)/2, so Y(1) = 4q(q−1)R and
        // ∫_{−cos T}^{1}(1−t²)^{(d−2)/2}Y dt = −R·g'(−cos T) = −2qR cos T sin^d T.
        let q = (d as f64 + 2.0) / 2.0;
        let r = zonal_rodrigues(d, 1.0) / (4.0 * q * (q - 1.0));
        assert!((c + 2.0 * q * r).abs() < 1e-12, "d={} {} vs {}", d, c, -2.0 * q * r);
        assert!(c < 0.0);
    }
}

#[test]
fn even_first_variation_along_critical_direction() {
    for d in [2usize, 4, 6, 8] {
        let f = critical_direction_even::<f64>(d, 2).unwrap();
        let v = first_variation(d, &f).unwrap();
        let want = predicted_variation::<f64>(d).unwrap();
        assert!((v.value - want).abs() <= 1e-10 * want.abs(), "d={} {} vs {}", d, v.value, want);
        // −p|S^{d−1}|C_dπI(d) with C_d < 0: the sign is that of I(d), (−1)^{d/2}
        let sign = if (d / 2) % 2 == 0 { 1.0 } else { -1.0 };
        assert!(sign * v.value > 0.0, "d={}", d);
    }
}

#[test]
fn first_variation_is_linear() {
    for d in [3usize, 4] {
        let f = orthogonal_pair(d, 4, 11, NormFamily::HalfWave);
        let g = orthogonal_pair(d, 4, 12, NormFamily::HalfWave);
        let (a, b) = (0.7, -1.3);
        let comb = f.scaled(a).axpy(b, &g).unwrap();
        let lhs = first_variation(d, &comb).unwrap().value;
        let rhs = a * first_variation(d, &f).unwrap().value + b * first_variation(d, &g).unwrap().value;
        let scale = 1.0 + lhs.abs();
        assert!((lhs - rhs).abs() <= 1e-10 * scale, "d={} {} {}", d, lhs, rhs);
    }
}
