mod common;

use common::*;
use penrose_strichartz::criticality::{critical_direction_even, first_variation_with};
use penrose_strichartz::deficit::*;
use penrose_strichartz::harmonics::{DataPair, NormFamily};
use penrose_strichartz::penrose::{
    apply_symmetry_with, fstar, fstar_orbit, tangent_basis, GroupParams, SymmetryOptions,
};
use penrose_strichartz::quadform::{gap_constant, project_ortho, OrthoMode};
use penrose_strichartz::random::{random_orthogonal, random_pair};
use penrose_strichartz::Error;
use rand::Rng;
use std::f64::consts::PI;

const EPS: [f64; 3] = TAYLOR_EPS;

fn quick(restarts: usize) -> DistOptions {
    DistOptions { restarts, ..Default::default() }
}

fn random_params(d: usize, family: NormFamily, scale: f64, seed: u64) -> GroupParams<f64> {
    let mut r = rng(seed);
    let n = GroupParams::<f64>::dof(d, family);
    let v: Vec<f64> = (0..n).map(|_| r.gen_range(-scale..scale)).collect();
    GroupParams::from_vec(r.gen_range(0.5..1.5), &v, d, family).unwrap()
}

#[test]
fn sharp_constants_match_closed_forms() {
    for (d, family) in [(3, NormFamily::HalfWave), (5, NormFamily::Energy)] {
        let s = sharp_constant::<f64>(d, family).unwrap();
        let closed = sharp_constant_closed(d, family).unwrap();
        assert!(close(s.value, closed, 1e-10), "d={d}: {} vs {closed}", s.value);
        let n = family.norm_sq(&fstar::<f64>(d, 3)).unwrap();
        assert!(close(n, fstar_norm_sq_closed(d, family).unwrap(), 1e-12 * n));
    }
    assert!(close(sharp_constant_closed(3, NormFamily::HalfWave).unwrap().powi(4), 3.0 / (16.0 * PI), 1e-15));
}

#[test]
fn sharp_constants_without_closed_form() {
    for d in [2, 4, 5] {
        let s = sharp_constant::<f64>(d, NormFamily::HalfWave).unwrap();
        assert!(s.value > 0.0 && s.value.is_finite());
        assert!(s.error < 1e-9, "d={d}: error {:e}", s.error);
        assert!(sharp_constant_closed(d, NormFamily::HalfWave).is_none());
    }
    assert!(sharp_constant::<f64>(3, NormFamily::Energy).is_err());
}

#[test]
fn fstar_norm_representation_d3() {
    // ½∫cos⁴T dT·|S³| by a periodic sum, which is exact for this trigonometric polynomial
    let n = 64;
    let c4: f64 =
        (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos().powi(4)).sum::<f64>() * 2.0 * PI / n as f64;
    let area = 2.0 * PI * PI;
    let oracle = c4 / (2.0 * area) * (2.0 * PI * PI).powi(2);
    let v = strichartz_norm(&fstar::<f64>(3, 4), NormFamily::HalfWave).unwrap().value;
    assert!(close(v, oracle, 1e-12 * oracle), "{v} vs {oracle}");
    let s4 = sharp_constant_closed(3, NormFamily::HalfWave).unwrap().powi(4);
    assert!(close(v, s4 * (2.0 * PI * PI).powi(2), 1e-12 * v));
}

#[test]
fn zero_data_have_zero_norm() {
    for (d, family) in [(2, NormFamily::HalfWave), (3, NormFamily::HalfWave), (5, NormFamily::Energy)] {
        let z = DataPair::<f64>::zeros(d, 2);
        assert_eq!(strichartz_norm(&z, family).unwrap().value, 0.0);
    }
}

#[test]
fn halved_cylinder_matches_region() {
    for seed in 0..3 {
        let f = random_pair::<f64>(3, 3, 2.0, seed).unwrap();
        let a = strichartz_norm_with(&f, NormFamily::HalfWave, NormMethod::Cylinder).unwrap();
        let b = strichartz_norm_with(&f, NormFamily::HalfWave, NormMethod::Region).unwrap();
        assert!(close(a.value, b.value, 1e-8 * a.value.abs().max(1.0)), "{} vs {}", a.value, b.value);
    }
    let f = random_pair::<f64>(5, 2, 2.0, 9).unwrap();
    let a = strichartz_norm_with(&f, NormFamily::Energy, NormMethod::Cylinder).unwrap();
    let b = strichartz_norm_with(&f, NormFamily::Energy, NormMethod::Region).unwrap();
    assert!(close(a.value, b.value, 1e-8 * a.value.abs().max(1.0)), "{} vs {}", a.value, b.value);
    let even = random_pair::<f64>(4, 2, 2.0, 1).unwrap();
    assert!(strichartz_norm_with(&even, NormFamily::HalfWave, NormMethod::Cylinder).is_err());
}

#[test]
fn psi_vanishes_at_fstar() {
    for (d, family) in [(3, NormFamily::HalfWave), (5, NormFamily::Energy)] {
        let r = deficit_report(&fstar::<f64>(d, 4), family).unwrap();
        assert!(r.psi.abs() <= 1e-9, "d={d}: ψ = {:e}", r.psi);
        assert!(r.phi.abs() <= 1e-9, "d={d}: φ = {:e}", r.phi);
        assert!(r.sharp && r.nonnegative());
    }
    let r = deficit_report(&fstar::<f64>(4, 2), NormFamily::HalfWave).unwrap();
    assert!(!r.sharp);
    assert_eq!(r.label, "f⋆-normalized deficit");
    assert!(r.psi.abs() <= 1e-9);
}

#[test]
fn psi_is_p_homogeneous() {
    for (d, family) in [(3, NormFamily::HalfWave), (5, NormFamily::Energy)] {
        let f = random_pair::<f64>(d, 3, 2.0, 4).unwrap();
        let p = family.exponent::<f64>(d);
        let a = psi(&f, family).unwrap().value;
        let b = psi(&f.scaled(2.0), family).unwrap().value;
        assert!(close(b, 2f64.powf(p) * a, 1e-10 * b.abs()), "{b} vs {}", 2f64.powf(p) * a);
        let pa = phi(&f, family).unwrap().value;
        let pb = phi(&f.scaled(2.0), family).unwrap().value;
        assert!(close(pb, 4.0 * pa, 1e-10 * pb.abs()));
    }
}

#[test]
fn psi_is_nonnegative_in_odd_dimensions() {
    for seed in 0..10 {
        for (d, family) in [(3, NormFamily::HalfWave), (5, NormFamily::Energy)] {
            let r = deficit_report(&random_pair::<f64>(d, 3, 2.0, seed).unwrap(), family).unwrap();
            assert!(r.nonnegative(), "d={d} seed={seed}: ψ = {:e}", r.psi);
        }
    }
}

#[test]
fn psi_vanishes_on_the_manifold() {
    let opts = SymmetryOptions::default();
    for seed in 0..3 {
        let alpha = random_params(3, NormFamily::HalfWave, 0.3, seed);
        let g = fstar_orbit(&alpha, 3, 10, NormFamily::HalfWave, &opts).unwrap();
        let r = deficit_report(&g.data, NormFamily::HalfWave).unwrap();
        // truncation removes relative norm² `tail`; ψ is of the same order
        let scale = (r.sharp_constant * r.sobolev_norm).powi(4);
        assert!(r.psi.abs() <= 10.0 * g.tail * scale + 1e-9, "ψ = {:e}, tail {:e}", r.psi, g.tail);
    }
    let alpha = random_params(5, NormFamily::Energy, 0.3, 11);
    let g = fstar_orbit(&alpha, 5, 5, NormFamily::Energy, &SymmetryOptions { pad: 4, ..opts }).unwrap();
    let r = deficit_report(&g.data, NormFamily::Energy).unwrap();
    let scale = (r.sharp_constant * r.sobolev_norm).powi(4);
    assert!(r.psi.abs() <= 10.0 * g.tail * scale + 1e-9, "ψ = {:e}, tail {:e}", r.psi, g.tail);
}

#[test]
fn psi_is_invariant_under_the_group() {
    let opts = SymmetryOptions::default();
    for seed in 0..3 {
        let f = random_pair::<f64>(3, 3, 3.0, seed).unwrap().resized(12);
        let alpha = random_params(3, NormFamily::HalfWave, 0.25, 100 + seed);
        let alpha = GroupParams { c: 1.0, ..alpha };
        let g = apply_symmetry_with(&alpha, &f, NormFamily::HalfWave, &opts).unwrap();
        let a = psi(&f, NormFamily::HalfWave).unwrap().value;
        let b = psi(&g.data, NormFamily::HalfWave).unwrap().value;
        let scale = (sharp_constant_closed(3, NormFamily::HalfWave).unwrap().powi(2)
            * NormFamily::HalfWave.norm_sq(&f).unwrap())
        .powi(2);
        assert!((a - b).abs() <= 10.0 * g.tail * scale + 1e-10 * scale, "{a} vs {b}, tail {:e}", g.tail);
    }
}

#[test]
fn even_first_variation_by_finite_differences() {
    let d = 4;
    let f = critical_direction_even::<f64>(d, 2).unwrap();
    let star = fstar::<f64>(d, 2);
    let h = 1e-3;
    let up = psi(&star.axpy(h, &f).unwrap(), NormFamily::HalfWave).unwrap().value;
    let dn = psi(&star.axpy(-h, &f).unwrap(), NormFamily::HalfWave).unwrap().value;
    let fd = (up - dn) / (2.0 * h);
    let fv = first_variation_with(d, &f, NormFamily::HalfWave).unwrap().value;
    assert!(fd.signum() == fv.signum() && fv != 0.0, "{fd} vs {fv}");
    assert!(close(fd, fv, 1e-5 * fv.abs()), "{fd} vs {fv}");
}

#[test]
fn taylor_expansion_d3() {
    for seed in 0..10 {
        let f = random_orthogonal::<f64>(3, 6, 3.0, seed).unwrap();
        let r = taylor_check(&f, &EPS).unwrap();
        assert!(r.rel_error() < 0.02, "{:?}", r);
        assert!(r.phi_rel_error() < 0.02, "{:?}", r);
        let star_sq = 2.0 * PI * PI;
        let s2 = sharp_constant_closed(3, NormFamily::HalfWave).unwrap().powi(2);
        assert!(close(r.phi_target, r.q / (2.0 * s2 * star_sq), 1e-12 * r.phi_target));
        assert!(r.linear_decay(), "orders {:?}", r.orders);
    }
}

#[test]
fn taylor_expansion_d5() {
    for seed in 0..3 {
        let f = random_orthogonal::<f64>(5, 4, 3.0, seed).unwrap();
        let r = taylor_check(&f, &EPS).unwrap();
        assert!(r.rel_error() < 0.02 && r.phi_rel_error() < 0.02, "{:?}", r);
        // ε and ε² remainder terms are comparable on the coarse grid in d = 5
        let ext = taylor_check(&f, &TAYLOR_EPS_EXTENDED).unwrap();
        assert!(ext.linear_decay(), "orders {:?}", ext.orders);
    }
}

#[test]
fn taylor_ratio_vanishes_on_tangent_directions() {
    let basis = tangent_basis::<f64>(3, 4).unwrap();
    for t in &basis[1..] {
        let r = taylor_check(t, &EPS).unwrap();
        let n = NormFamily::HalfWave.norm_sq(t).unwrap();
        assert!(r.q.abs() <= 1e-12 * n);
        // the ratio is O(ε), so its limit is far below the gap π/4·‖t‖²
        assert!(r.limit.abs() <= 1e-6 * n, "limit {:e}", r.limit);
        assert!(r.psi_ratios[0].abs() < gap_constant::<f64>(3).unwrap() * n * 0.2);
    }
}

#[test]
fn taylor_input_validation() {
    let f = random_orthogonal::<f64>(3, 4, 3.0, 1).unwrap();
    assert!(matches!(taylor_check(&f, &[0.8, 0.4]), Err(Error::Accuracy { .. })));
    assert!(matches!(taylor_check(&f, &[0.1]), Err(Error::Parameter(_))));
    let g = random_pair::<f64>(3, 4, 3.0, 1).unwrap();
    assert!(matches!(taylor_check(&g, &EPS), Err(Error::Parameter(_))));
    let csv = taylor_check(&f, &EPS).unwrap().to_csv().unwrap();
    assert!(csv.starts_with("eps,psi_ratio,phi_ratio\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn distance_of_points_on_the_manifold() {
    assert!(dist_to_m(&fstar::<f64>(3, 4), &DistOptions::default()).unwrap().dist_upper <= 1e-8);
    assert!(dist_to_m(&fstar::<f64>(5, 3), &quick(1)).unwrap().dist_upper <= 1e-8);
    let z = dist_to_m(&DataPair::<f64>::zeros(3, 2), &quick(0)).unwrap();
    assert_eq!(z.dist_upper, 0.0);
}

#[test]
fn distance_recovers_orbit_points() {
    let opts = SymmetryOptions::default();
    for (d, l, seed, restarts) in [(3, 6, 1, 8), (3, 6, 2, 8), (5, 4, 3, 1)] {
        let family = NormFamily::for_dim(d);
        let beta = random_params(d, family, 0.4, seed);
        let g = fstar_orbit(&beta, d, l, family, &opts).unwrap();
        let r = dist_to_m(&g.data, &quick(restarts)).unwrap();
        // ‖g − Γ_β f⋆‖ is the truncation loss
        let n = family.norm_sq(&g.data).unwrap();
        let tol = (g.tail / (1.0 - g.tail) * n).sqrt() + 1e-6 * n.sqrt();
        assert!(r.dist_upper <= tol, "d={d}: dist {:e} vs tolerance {:e}", r.dist_upper, tol);
        assert!(close(r.params.c, beta.c, 1e-2), "{:?} vs {:?}", r.params, beta);
    }
}

#[test]
fn distance_is_at_most_the_norm() {
    for seed in 0..4 {
        let f = random_pair::<f64>(3, 3, 1.0, seed).unwrap();
        let n = NormFamily::HalfWave.norm_sq(&f).unwrap().sqrt();
        let r = dist_to_m(&f, &quick(1)).unwrap();
        assert!(r.dist_upper <= n * (1.0 + 1e-12));
        assert!(r.history_len > 0);
        let json = penrose_strichartz::report::to_json_string(&r);
        assert!(json.contains("dist_upper"));
    }
}

#[test]
fn upper_bound_holds() {
    for seed in 0..5 {
        let f = random_pair::<f64>(3, 3, 2.0, 50 + seed).unwrap();
        let r = bounds_check(&f, &quick(2)).unwrap();
        assert!(r.holds(), "{:?}", r);
        assert!(r.phi <= r.upper_bound + r.phi_error);
    }
}

#[test]
fn local_lower_bound_near_the_manifold() {
    for seed in 0..3 {
        for (d, l) in [(3, 6), (5, 4)] {
            let f = random_orthogonal::<f64>(d, l, 3.0, 70 + seed).unwrap();
            let r = near_manifold_check(&f, 0.05).unwrap();
            assert!(r.holds, "{:?}", r);
        }
    }
    // pure ℓ = 2 mode: the gap is attained, so the ratio approaches the constant from above
    let f = project_ortho(&random_pair::<f64>(3, 2, 0.0, 3).unwrap(), OrthoMode::HHalfPerp).unwrap();
    let r = near_manifold_check(&f, 0.05).unwrap();
    assert!(r.holds && r.ratio < r.constant * 1.5, "{:?}", r);
}

#[test]
fn lower_bound_constants() {
    for c in constant_identities() {
        assert!(c.holds, "{:?}", c);
    }
    for (d, family) in [(3, NormFamily::HalfWave), (5, NormFamily::Energy)] {
        let s2 = sharp_constant_closed(d, family).unwrap().powi(2);
        let via_gap = gap_constant::<f64>(d).unwrap() / (2.0 * s2 * fstar_norm_sq_closed(d, family).unwrap());
        assert!(close(via_gap, lower_bound_constant(d).unwrap(), 1e-15));
    }
    assert!(close(lower_bound_constant(5).unwrap(), 9.0 / (340.0 * PI), 1e-16));
}
