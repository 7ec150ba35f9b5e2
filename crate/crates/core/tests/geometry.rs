mod common;

use common::c;
use num_complex::Complex64;
use proptest::prelude::*;
use rzl_core::geometry::*;
use std::f64::consts::PI;

fn jet_at(profile: &RadialProfile, z: &[Complex64]) -> GeometryJet {
    geometry_jet(profile, &BoundaryPoint::new(profile, z).unwrap()).unwrap()
}

#[test]
fn jet_examples() {
    let s = RadialProfile::sphere(1);
    let j = jet_at(&s, &[c(1.0, 0.0), c(0.0, 0.0)]);
    assert_eq!(j.d_rho, vec![c(1.0, 0.0), c(0.0, 0.0)]);
    assert_eq!(j.p, vec![c(1.0, 0.0), c(0.0, 0.0)]);
    assert_eq!(j.t0, c(1.0, 0.0));
    assert_eq!(j.p_norm_sq, 1.0);

    let th = 0.8;
    let j = jet_at(&RadialProfile::circle(), &[Complex64::from_polar(1.0, th)]);
    assert!((j.d_rho[0] - Complex64::from_polar(1.0, -th)).norm() < 1e-15);
    assert!((j.t0 - c(1.0, 0.0)).norm() < 1e-15);
    assert!((j.p_norm_sq - 1.0).abs() < 1e-15);

    let e = RadialProfile::ellipsoid(vec![2.0, 1.0]).unwrap();
    let p = BoundaryPoint::project(&e, &[c(0.4, 0.3), c(-0.2, 0.5)]).unwrap();
    let j = geometry_jet(&e, &p).unwrap();
    let dz: Complex64 = j.d_rho.iter().zip(p.z()).map(|(a, b)| a * b).sum();
    assert!((j.t0 * dz - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn beta_examples() {
    let s = RadialProfile::sphere(1);
    let z = [c(1.0, 0.0), c(0.0, 0.0)];
    let j = jet_at(&s, &z);
    assert_eq!(beta(&j, &[c(1.0, 0.0), c(0.0, 0.0)]), c(1.0, 0.0));
    assert_eq!(beta(&j, &[c(0.0, 0.0), c(0.0, 1.0)]), c(0.0, 0.0));
    assert_eq!(beta(&j, &z), c(1.0, 0.0));
}

#[test]
fn levi_examples() {
    let s = RadialProfile::sphere(1);
    for th in [0.1f64, 0.7, 1.3] {
        let p = BoundaryPoint::new(&s, &[c(th.cos(), 0.0), Complex64::from_polar(th.sin(), 0.4)]).unwrap();
        assert!((levi_min_eig(&s, &p) - 1.0).abs() < 1e-12);
    }
    let e = RadialProfile::ellipsoid(vec![0.5, 3.0]).unwrap();
    for k in 0..20 {
        let th = 0.05 + 1.4 * k as f64 / 19.0;
        let p = BoundaryPoint::project(&e, &[c(th.cos(), 0.1), c(th.sin(), -0.2)]).unwrap();
        assert!(levi_min_eig(&e, &p) >= 0.5 - 1e-9);
    }
    let pe = RadialProfile::power_ellipsoid(vec![2.0, 1.0]).unwrap();
    for k in 0..20 {
        let th = 0.05 + 1.4 * k as f64 / 19.0;
        let p = BoundaryPoint::project(&pe, &[c(th.cos(), 0.0), c(0.0, th.sin())]).unwrap();
        assert!(levi_min_eig(&pe, &p) > 0.0);
    }
    assert_eq!(
        levi_min_eig(
            &RadialProfile::circle(),
            &BoundaryPoint::new(&RadialProfile::circle(), &[c(1.0, 0.0)]).unwrap()
        ),
        f64::INFINITY
    );
}

#[test]
fn boundary_checks() {
    let s = RadialProfile::sphere(1);
    assert!(BoundaryPoint::new(&s, &[c(1.1, 0.0), c(0.0, 0.0)]).is_err());
    let p = BoundaryPoint::project(&s, &[c(2.0, 0.0), c(0.0, 2.0)]).unwrap();
    assert!(s.rho(p.z()).abs() <= 1e-10);
    let e = RadialProfile::ellipsoid(vec![1.0, 2.0]).unwrap();
    let err = BoundaryPoint::project(&e, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap_err();
    assert!(matches!(err, rzl_core::Error::DegeneratePoint(_)));
    assert!(BoundaryPoint::project(&s, &[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
}

#[test]
fn profile_grammar() {
    assert!(RadialProfile::parse("circle").unwrap().is_circle());
    assert_eq!(RadialProfile::parse("sphere").unwrap().dim(), 2);
    assert_eq!(RadialProfile::parse("sphere:3").unwrap().m(), 2);
    assert_eq!(RadialProfile::parse("ellipsoid:1,2.5").unwrap().m(), 1);
    assert_eq!(RadialProfile::parse("pellipsoid:2,1").unwrap().m(), 1);
    for bad in ["", "torus", "ellipsoid:", "ellipsoid:1,-2", "pellipsoid:0.5,1", "sphere:0", "ellipsoid:a"] {
        assert!(RadialProfile::parse(bad).is_err(), "{bad}");
    }
}

fn boundary_point(profile: &RadialProfile, raw: &[(f64, f64)]) -> BoundaryPoint {
    let z: Vec<Complex64> = raw.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
    BoundaryPoint::project(profile, &z).unwrap()
}

fn profiles() -> Vec<RadialProfile> {
    vec![
        RadialProfile::sphere(1),
        RadialProfile::ellipsoid(vec![1.0, 2.5]).unwrap(),
        RadialProfile::power_ellipsoid(vec![2.0, 1.0]).unwrap(),
        RadialProfile::power_ellipsoid(vec![1.5, 3.0]).unwrap(),
        RadialProfile::sphere(2),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn torus_equivariance(
        which in 0usize..4,
        r in prop::collection::vec(0.2f64..1.0, 2),
        th in prop::collection::vec(0.0f64..(2.0 * PI), 2),
        phase in prop::collection::vec(0.0f64..(2.0 * PI), 2),
        u in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2),
    ) {
        let prof = &profiles()[which];
        let p = boundary_point(prof, &[(r[0], th[0]), (r[1], th[1])]);
        let rot: Vec<Complex64> = phase.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
        let zr: Vec<Complex64> = p.z().iter().zip(&rot).map(|(a, b)| a * b).collect();
        let j = geometry_jet(prof, &p).unwrap();
        let jr = geometry_jet(prof, &BoundaryPoint::new(prof, &zr).unwrap()).unwrap();
        for ((a, b), r) in jr.d_rho.iter().zip(&j.d_rho).zip(&rot) {
            prop_assert!((a - b * r.conj()).norm() < 1e-13);
        }
        prop_assert!((jr.t0 - j.t0).norm() < 1e-13 * j.t0.norm());
        prop_assert!((jr.p_norm_sq - j.p_norm_sq).abs() < 1e-13 * j.p_norm_sq);
        let uv: Vec<Complex64> = u.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let ur: Vec<Complex64> = uv.iter().zip(&rot).map(|(a, b)| a * b).collect();
        prop_assert!((beta(&jr, &ur) - beta(&j, &uv)).norm() < 1e-12);
    }

    #[test]
    fn beta_decomposition(
        which in 0usize..4,
        r in prop::collection::vec(0.2f64..1.0, 2),
        th in prop::collection::vec(0.0f64..(2.0 * PI), 2),
        u in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2),
    ) {
        let prof = &profiles()[which];
        let p = boundary_point(prof, &[(r[0], th[0]), (r[1], th[1])]);
        let j = geometry_jet(prof, &p).unwrap();
        prop_assert!((beta(&j, p.z()) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let uv: Vec<Complex64> = u.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let b = beta(&j, &uv);
        let h: Vec<Complex64> = uv.iter().zip(p.z()).map(|(ui, zi)| ui - b * zi).collect();
        prop_assert!(beta(&j, &h).norm() < 1e-12 * (1.0 + b.norm()));
        // P_i = conj(d′ρ_i) and d′ρ·z is real positive.
        for i in 0..2 {
            prop_assert!((j.p[i] - j.d_rho[i].conj()).norm() < 1e-15);
        }
        prop_assert!(j.t0.im.abs() < 1e-15 && j.t0.re > 0.0);
    }

    #[test]
    fn strict_pseudoconvexity(
        which in 0usize..5,
        r in prop::collection::vec(0.2f64..1.0, 3),
        th in prop::collection::vec(0.0f64..(2.0 * PI), 3),
    ) {
        let prof = &profiles()[which];
        let raw: Vec<(f64, f64)> = (0..prof.dim()).map(|i| (r[i], th[i])).collect();
        let p = boundary_point(prof, &raw);
        prop_assert!(levi_min_eig(prof, &p) > 0.0);
    }
}
