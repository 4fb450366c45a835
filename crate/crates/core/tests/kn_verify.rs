//! Chart-level numerics for real oriented blow-ups and circle bundles:
//! Hopf fibration charts, circle splittings, sphere actions, Cartesian
//! squares of strict morphisms, and the global invariants.

use fmlog::kn::{self, bu_membership, ChartSection, Fiber, SplitCase, TorusChartMap};
use fmlog::verify::{verify_kn_all, KnScale};

const TOL: f64 = 1e-9;
const SEED: u64 = 424242;

#[test]
fn full_chart_campaign_passes() {
    for rep in verify_kn_all(KnScale::full(), TOL, SEED) {
        assert!(
            rep.passed(),
            "{}: max_error={} {:?}",
            rep.name,
            rep.max_error,
            rep.failures()
        );
        if rep.name.starts_with("kn/hopf") {
            assert!(rep.max_error < TOL, "{}: {}", rep.name, rep.max_error);
        }
    }
}

#[test]
fn membership_on_a_disk_blowup() {
    // Blow up the unit disk at the origin using the identity section.
    let cs = ChartSection::new(2, 2, |x: &[f64]| x.to_vec()).unwrap();
    // Away from the zero locus the direction must match the section.
    let x = [0.6, 0.0];
    assert!(bu_membership(&cs, &x, &[1.0, 0.0], TOL).unwrap());
    assert!(!bu_membership(&cs, &x, &[0.0, 1.0], TOL).unwrap());
    // Over the zero locus every unit direction belongs to the fiber.
    let o = [0.0, 0.0];
    assert!(bu_membership(&cs, &o, &[1.0, 0.0], TOL).unwrap());
    assert!(bu_membership(&cs, &o, &[0.0, -1.0], TOL).unwrap());
}

#[test]
fn fibers_are_points_off_the_zero_locus_and_spheres_over_it() {
    let cs = ChartSection::new(2, 2, |x: &[f64]| x.to_vec()).unwrap();
    match kn::bu_fiber(&cs, &[0.3, 0.4], 16, TOL, SEED).unwrap() {
        Fiber::Point(u) => {
            assert!((u[0] - 0.6).abs() < 1e-12 && (u[1] - 0.8).abs() < 1e-12);
        }
        Fiber::Sphere(_) => panic!("expected a point fiber"),
    }
    match kn::bu_fiber(&cs, &[0.0, 0.0], 16, TOL, SEED).unwrap() {
        Fiber::Sphere(points) => {
            assert!(!points.is_empty());
            for p in points {
                let n: f64 = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-9);
            }
        }
        Fiber::Point(_) => panic!("expected a sphere fiber"),
    }
}

#[test]
fn torus_chart_maps_compose_by_exponent_multiplication() {
    let one = |_: &[f64]| vec![num_complex::Complex64::new(1.0, 0.0); 2];
    let outer = TorusChartMap::new(vec![vec![1, -2], vec![0, 3]], one).unwrap();
    let inner = TorusChartMap::new(vec![vec![2], vec![1]], one).unwrap();
    let composite = outer.compose(&inner).unwrap();
    assert_eq!(composite.exponents(), &[vec![0], vec![3]]);
}

#[test]
fn split_cases_parse_and_list() {
    for case in SplitCase::all() {
        let parsed = SplitCase::parse(case.name()).unwrap();
        assert_eq!(parsed.name(), case.name());
    }
    assert!(SplitCase::parse("no-such-case").is_err());
}

#[test]
fn reports_are_deterministic_across_runs() {
    let a = kn::hopf_verify(1, 500, TOL, 7).unwrap();
    let b = kn::hopf_verify(1, 500, TOL, 7).unwrap();
    assert_eq!(a.checked, b.checked);
    assert_eq!(a.max_error.to_bits(), b.max_error.to_bits());
    assert_eq!(a.failures, b.failures);
}
