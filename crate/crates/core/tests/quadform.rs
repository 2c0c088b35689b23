mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use penrose_strichartz::harmonics::{CoeffField, DataPair, MultiIndex, NormFamily};
use penrose_strichartz::penrose::tangent_basis;
use penrose_strichartz::quadform::*;
use penrose_strichartz::trigpoly::{Freq, TrigPoly};
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn mode_pair(d: usize, lmax: usize, which: usize, l: usize, m: &[i32], v: f64) -> DataPair<f64> {
    let f = CoeffField::mode(d, lmax, l, &MultiIndex(m.to_vec()), v).unwrap();
    let z = CoeffField::zeros(d, lmax);
    if which == 0 {
        DataPair::new(f, z).unwrap()
    } else {
        DataPair::new(z, f).unwrap()
    }
}

fn split(f: &DataPair<f64>) -> (DataPair<f64>, DataPair<f64>) {
    let z = CoeffField::zeros(f.d(), f.lmax());
    (DataPair::new(f.f0.clone(), z.clone()).unwrap(), DataPair::new(z, f.f1.clone()).unwrap())
}

#[test]
fn q3_examples() {
    let f = mode_pair(3, 4, 0, 2, &[1, 0], 1.0);
    assert!(rel(Q3(&f).unwrap(), 3.0 * PI / 4.0) < 1e-15);
    let mut low = random_pair(3, 4, 5);
    for l in 2..=4 {
        low.f0.degree_mut(l).iter_mut().for_each(|v| *v = 0.0);
        low.f1.degree_mut(l).iter_mut().for_each(|v| *v = 0.0);
    }
    assert_eq!(Q3(&low).unwrap(), 0.0);
    assert!(Q3(&random_pair(5, 3, 1)).is_err());
    assert!(Q5(&random_pair(3, 3, 1)).is_err());
}

#[test]
fn closed_forms_match_oracle() {
    for (d, lmax, tol) in [(3usize, 6usize, 1e-10), (5, 4, 1e-9)] {
        let mut worst: f64 = 0.0;
        for seed in 0..20 {
            let f = random_pair(d, lmax, 100 + seed);
            let closed = q_closed(&f).unwrap();
            let oracle = Q_oracle(&f).unwrap();
            worst = worst.max(rel(closed, oracle));
        }
        eprintln!("d={d} worst relative gap {worst:e}");
        assert!(worst < tol, "d={d}: {worst:e}");
    }
}

#[test]
fn oracle_vanishes_on_tangent_basis() {
    for d in [3usize, 5] {
        let basis = tangent_basis::<f64>(d, 3).unwrap();
        for (i, b) in basis.iter().enumerate() {
            let n = NormFamily::for_dim(d).norm_sq(b).unwrap();
            let o = Q_oracle(b).unwrap();
            let c = q_closed(b).unwrap();
            assert!(o.abs() < 1e-9 * n.max(1.0), "d={d} #{i}: oracle {o:e}");
            assert!(c.abs() < 1e-10 * n.max(1.0), "d={d} #{i}: closed {c:e}");
        }
    }
}

#[test]
fn q5_examples() {
    let a1 = alpha5::<f64>(1, 1);
    assert!((a1 - 1.5).abs() < 1e-15);
    let f = mode_pair(5, 3, 1, 1, &[1, 0, 0, 0], 3.0);
    assert!(rel(Q5(&f).unwrap(), PI / 4.0 * a1) < 1e-14);
    assert!(rel(Q_oracle(&f).unwrap(), PI / 4.0 * a1) < 1e-9);

    let zero = MultiIndex::zero(5);
    let mut g = mode_pair(5, 4, 0, 2, &zero.0, 1.0);
    g.f0.set(3, &zero, 1.0).unwrap();
    let want = PI / 8.0 * (alpha5::<f64>(2, 0) + alpha5::<f64>(3, 0) + beta5::<f64>(2, 0));
    assert!(rel(Q5(&g).unwrap(), want) < 1e-14);
    assert!(rel(Q_oracle(&g).unwrap(), want) < 1e-9);
}

#[test]
fn splitting_and_nonnegativity() {
    for d in [3usize, 5] {
        for seed in 0..10 {
            let f = random_pair(d, 5, 300 + seed);
            let (a, b) = split(&f);
            let q = q_closed(&f).unwrap();
            let s = q_closed(&a).unwrap() + q_closed(&b).unwrap();
            assert!((q - s).abs() <= 1e-12 * q.abs().max(1.0));
            assert!(q >= 0.0);
            if seed < 3 {
                let qo = Q_oracle(&f).unwrap();
                let so = Q_oracle(&a).unwrap() + Q_oracle(&b).unwrap();
                assert!((qo - so).abs() <= 1e-10 * qo.abs().max(1.0), "oracle split d={d}");
            }
        }
    }
}

#[test]
fn tangent_bilinear_degeneracy() {
    for d in [3usize, 5] {
        let basis = tangent_basis::<f64>(d, 4).unwrap();
        let mut r = rng(9);
        for seed in 0..5 {
            let mut h = DataPair::zeros(d, 4);
            for b in &basis {
                h = h.axpy(r.gen_range(-1.0..1.0), b).unwrap();
            }
            assert!(q_closed(&h).unwrap().abs() < 1e-10);
            let g = random_pair(d, 4, 500 + seed);
            assert!(bilinear(&g, &h).unwrap().abs() < 1e-9, "d={d}");
        }
    }
}

#[test]
fn projection_properties() {
    let f = random_pair(3, 5, 11);
    let p = project_ortho(&f, OrthoMode::HHalfPerp).unwrap();
    assert_eq!(project_ortho(&p, OrthoMode::HHalfPerp).unwrap(), p);
    for b in tangent_basis::<f64>(3, 5).unwrap() {
        assert!(NormFamily::HalfWave.inner(&p, &b).unwrap().abs() <= 1e-12);
    }
    let g = random_pair(5, 3, 12);
    let t = project_ortho(&g, OrthoMode::TildePerp).unwrap();
    assert_eq!(project_ortho(&t, OrthoMode::TildePerp).unwrap(), t);
    for (p, m) in g.f1.indices(1).iter().enumerate() {
        let kept = t.f1.degree(1)[p];
        if m.top_order() == 1 {
            assert_eq!(kept, g.f1.degree(1)[p]);
        } else {
            assert_eq!(kept, 0.0);
        }
    }
    assert!(t.f0.degree(1).iter().all(|&v| v == 0.0));
    assert!(project_ortho(&g, OrthoMode::HHalfPerp).is_err());
}

#[test]
fn gap_rayleigh_quotients() {
    let b3 = PI / 4.0;
    for seed in 0..50 {
        let f = project_ortho(&random_pair(3, 10, 700 + seed), OrthoMode::HHalfPerp).unwrap();
        let s = gap_lower_bound(&f).unwrap();
        assert!(s.ratio >= b3 * (1.0 - 1e-12), "seed {seed}: {}", s.ratio);
    }
    let s = gap_lower_bound(&mode_pair(3, 4, 1, 2, &[0, 0], 1.0)).unwrap();
    assert!(rel(s.ratio, b3) < 1e-14);
    let b5 = 9.0 * PI / 340.0;
    for seed in 0..50 {
        let f = project_ortho(&random_pair(5, 6, 800 + seed), OrthoMode::TildePerp).unwrap();
        let s = gap_lower_bound(&f).unwrap();
        assert!(s.ratio >= b5 * (1.0 - 1e-10), "seed {seed}: {}", s.ratio);
    }
    assert!(gap_lower_bound(&random_pair(3, 4, 1)).is_err());
}

#[test]
fn gap_rayleigh_extremes_d5() {
    // zonal f₀ with alternating signs, where the positive couplings lower Q₅
    let b5 = 9.0 * PI / 340.0;
    let mut r = rng(77);
    for _ in 0..50 {
        let mut g = DataPair::<f64>::zeros(5, 8);
        let zero = MultiIndex::zero(5);
        let mut sign = 1.0;
        for l in 2..=8 {
            let h: f64 = sign * r.gen_range(0.1..1.0) / ((l + 1) * (l + 3)) as f64;
            g.f0.set(l, &zero, h).unwrap();
            sign = -sign;
        }
        let s = gap_lower_bound(&g).unwrap();
        assert!(s.ratio >= b5 * (1.0 - 1e-10));
    }
}

#[test]
fn t5_zero_is_certified() {
    let form = build_t5(T5Kind::Zero, 200).unwrap();
    let cert = gap_certificate(&form, true);
    assert!(cert.holds, "{}", cert.summary());
    assert!(cert.exact);
    assert_eq!(cert.tail_holds, Some(true));
    let row = &form.rows[0];
    let (a, b) = row.exact.as_ref().unwrap();
    assert_eq!(row.l_first, 2);
    assert_eq!(rat(3, 200) - rat(17, 30) * rat(9, 340), rat(0, 1));
    let slack = a[0].as_rational().unwrap() - b[0].as_rational().unwrap() / rat(2, 1);
    assert_eq!(slack, rat(0, 1));
    let r = cert.rows.iter().find(|r| r.l == 2 && r.m1 == 0).unwrap();
    assert!(r.holds && r.slack.abs() < 1e-15);
}

#[test]
fn t5_entries_match_closed_forms() {
    let c = 9.0 * PI / 340.0;
    for kind in [T5Kind::Zero, T5Kind::One] {
        let form = build_t5(kind, 30).unwrap();
        for row in &form.rows {
            for (i, (&a, &b)) in row.a.iter().zip(&row.b).enumerate() {
                let l = (row.l_first + i) as f64;
                let m = row.m1 as f64;
                let (wa, wb) = if row.l_first + i == 1 {
                    (3.0 * PI / 64.0 - c * 9.0 / 8.0, -c * (0.6f64).sqrt())
                } else {
                    let poly =
                        l.powi(4) + 8.0 * l.powi(3) + 11.0 * l * l - 20.0 * l - 12.0 + 6.0 * m * m + 18.0 * m;
                    let wa = PI / 8.0 * poly / ((l + 1.0) * (l + 3.0)).powi(2)
                        - c * (l + 2.0).powi(2) / ((l + 1.0) * (l + 3.0));
                    let root = ((l + 1.0 - m) * (l + 4.0 + m) / ((l + 1.0) * (l + 4.0))).sqrt();
                    let wb = root * (PI / 8.0 * (l - 1.0) * (l + 6.0) / ((l + 2.0) * (l + 3.0)) - c);
                    (wa, wb)
                };
                assert!((a - wa).abs() < 1e-14, "{kind:?} a at ({l},{m})");
                assert!((b - wb).abs() < 1e-14, "{kind:?} b at ({l},{m})");
            }
            if row.m1 == 0 {
                let (_, b) = row.exact.as_ref().unwrap();
                assert!(
                    b.iter().all(|v| v.as_rational().is_some()),
                    "b_{{ℓ,0}} must be rational multiples of π"
                );
            }
        }
    }
}

#[test]
fn t5_one_special_rows() {
    let form = build_t5(T5Kind::One, 200).unwrap();
    let cert = gap_certificate(&form, true);
    assert!(cert.holds, "{}", cert.summary());
    let r1 = cert.rows.iter().find(|r| r.l == 1 && r.m1 == 1).unwrap();
    let want1 = 93.0 / 5440.0 * PI - 9.0 / 3400.0 * PI * 15f64.sqrt();
    assert!((r1.slack - want1).abs() < 1e-15 && want1 > 0.0);
    let r2 = cert.rows.iter().find(|r| r.l == 2 && r.m1 == 1).unwrap();
    let want2 = (32.0 / 1275.0 - 7f64.sqrt() / 255.0 - 9.0 / 3400.0 * 15f64.sqrt()) * PI;
    assert!((r2.slack - want2).abs() < 1e-15 && want2 > 0.0);
    let r22 = cert.rows.iter().find(|r| r.l == 2 && r.m1 == 2).unwrap();
    assert!(r22.holds);
}

#[test]
fn tail_polynomial_is_the_paper_expression() {
    // slack numerator over (ℓ+1)²(ℓ+2)(ℓ+3)² must equal
    // (ℓ+2)[(ℓ²+4ℓ+15)/8 − (9/340)(ℓ+1)(ℓ+3)]
    let tail = build_t5(T5Kind::Zero, 2).unwrap().tail.unwrap();
    for l in 3..40i64 {
        let x = rat(l, 1);
        let want = rat(l + 2, 1) * (rat(l * l + 4 * l + 15, 8) - rat(9, 340) * rat((l + 1) * (l + 3), 1));
        assert_eq!(tail.slack_numerator.eval(&x), want);
    }
    assert!(tail.holds_beyond(2));
}

#[test]
fn adversarial_forms() {
    // a = 1, |b| = 3/2: the first row holds, the first interior row misses by ½
    let f = BandedQuadForm::from_rows(0, vec![(0, 0, vec![1.0; 5], vec![1.5; 5])]).unwrap();
    let c = gap_certificate(&f, false);
    assert!(!c.holds && !c.exact);
    assert_eq!(c.first_violation, Some((1, 0)));
    assert!((c.rows[1].slack + 0.5).abs() < 1e-15);
    // a = |b| = 1 sits exactly on the boundary
    let f = BandedQuadForm::from_rows(0, vec![(0, 0, vec![1.0; 5], vec![-1.0; 5])]).unwrap();
    assert!(gap_certificate(&f, false).holds);
    // a tail check on a form without tail facts fails
    assert!(!gap_certificate(&f, true).holds);
}

#[test]
fn csv_report() {
    let cert = gap_certificate(&build_t5(T5Kind::Zero, 4).unwrap(), true);
    let text = cert.to_csv();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("l,m1,a,b,slack"));
    assert_eq!(lines.count(), cert.rows.len());
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    for (rec, row) in rd.records().zip(&cert.rows) {
        let rec = rec.unwrap();
        assert_eq!(rec[0].parse::<usize>().unwrap(), row.l);
        assert_eq!(rec[4].parse::<f64>().unwrap(), row.slack);
    }
}

#[test]
fn d3_time_identity() {
    let two = TrigPoly::cos(Freq::int(1));
    for l in 1..12u32 {
        let p = two.mul(&TrigPoly::cos(Freq::int(l + 1))).pow(2).scale(&rat(3, 1));
        assert_eq!(p.integral(), (rat(3, 2), rat(0, 1)), "ℓ={l}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_forms_are_quadratic(seed in 0u64..10_000, t in -3.0f64..3.0) {
        for d in [3usize, 5] {
            let f = random_pair(d, 4, seed);
            let q = q_closed(&f).unwrap();
            let qs = q_closed(&f.scaled(t)).unwrap();
            prop_assert!((qs - t * t * q).abs() <= 1e-12 * q.abs().max(1.0) * t * t + 1e-15);
        }
    }
}
