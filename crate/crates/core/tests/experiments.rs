use num_complex::Complex64;

use lap_lab::discretization::{build_grid, Grid, GridFunction};
use lap_lab::experiments::{
    eig_scan, uniqueness_probe, ScanFlag, ScanSettings, UniquenessOutcome, UniquenessSettings,
};
use lap_lab::geometry::LayeredPartition;
use lap_lab::medium::MediumProfile;
use lap_lab::solver::{Method, SolveOptions};
use lap_lab::Error;

fn homogeneous(dim: usize) -> MediumProfile {
    let p = LayeredPartition::planar_stack(dim, vec![-1.0, 1.0], None, None).unwrap();
    MediumProfile::new(p, vec![1.0; 3], None).unwrap()
}

fn grid3() -> Grid {
    build_grid(3, 4.0, 0.25, None).unwrap()
}

fn settings(lambda: f64) -> UniquenessSettings {
    UniquenessSettings {
        lambda,
        radii: vec![1.5, 2.5, 3.5],
        exponent: 0.0,
        hom_tol: 1e-6,
        exclude_radius: 0.0,
        flux_tol: 1e-3,
    }
}

#[test]
fn zero_field_is_trivial() {
    let g = grid3();
    let v = uniqueness_probe(&GridFunction::zeros(&g), &homogeneous(3), &settings(1.0)).unwrap();
    assert_eq!(v.outcome, UniquenessOutcome::TrivialByFluxDecay);
    assert_eq!(v.norm_u, 0.0);
}

#[test]
fn discrete_plane_wave_gives_no_conclusion() {
    let g = grid3();
    let (lambda, h) = (1.0, g.h);
    // exact discrete dispersion: (2 - 2 cos(theta h)) / h^2 = lambda
    let theta = (1.0 - lambda * h * h / 2.0).acos() / h;
    let u = GridFunction::from_fn(&g, |x| Complex64::from_polar(1.0, theta * x[0]));
    let v = uniqueness_probe(&u, &homogeneous(3), &settings(lambda)).unwrap();
    assert!(v.residual < 1e-10, "{}", v.residual);
    assert_eq!(v.outcome, UniquenessOutcome::NoConclusion);
    assert!(v.flux.slope > 0.0);
}

#[test]
fn non_solution_is_rejected() {
    let g = grid3();
    let u = GridFunction::from_fn(&g, |x| {
        Complex64::new((-x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0)
    });
    match uniqueness_probe(&u, &homogeneous(3), &settings(1.0)) {
        Err(Error::NotHomogeneous { residual, .. }) => assert!(residual > 1e-6),
        other => panic!("expected NotHomogeneous, got {other:?}"),
    }
}

#[test]
fn scan_below_spectrum_is_clean() {
    let g = build_grid(2, 4.0, 0.25, None).unwrap();
    let mut s = ScanSettings::new(vec![-1.0, -0.5]);
    s.samples = 2;
    s.solve = SolveOptions::with_method(Method::BandedDirect);
    let rep = eig_scan(&g, &homogeneous(2), &s).unwrap();
    assert!(rep.points.iter().all(|p| p.flag == ScanFlag::Clean));
    assert!(rep.suspected.is_empty());
    for p in &rep.points {
        // m(eta) = eta ||R f|| with ||R|| <= 1 / (|lambda| + ...) falls linearly
        let q: Vec<_> = p.curve.points.iter().filter(|q| q.sample == 0).collect();
        let (a, b) = (q[q.len() - 2], q[q.len() - 1]);
        assert!((a.m / b.m - a.eta / b.eta).abs() < 1e-2 * a.eta / b.eta);
    }
}
