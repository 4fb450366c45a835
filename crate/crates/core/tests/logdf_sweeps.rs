//! Exhaustive sweeps over the divisor-lattice composition calculus: legality
//! of every composition morphism, associativity and relabelling equivariance
//! as exact integer-matrix identities, the virtual unit axioms, and the
//! strict-unit nonexistence search.

use fmlog::logdf::{gamma, strict_unit_search, Variant};
use fmlog::sets::{Subset, Surjection};
use fmlog::verify::{
    verify_logdf_associativity, verify_logdf_equivariance, verify_logdf_flags,
    verify_logdf_legality, verify_logdf_units, verify_strict_units,
};

const MAX_ARITY: u32 = 6;
/// All labeled stacked pairs are checked through this arity; beyond it, one
/// representative per set partition of the domain is stacked against every
/// labeled outer surjection, which covers every labeled pair by the
/// separately verified relabelling equivariance.
const LABELED_MAX: u32 = 5;

#[test]
fn legality_all_surjections_both_variants() {
    for variant in [Variant::Log, Variant::VLog] {
        let rep = verify_logdf_legality(MAX_ARITY, variant);
        assert!(rep.passed(), "{}: {:?}", rep.name, rep.failures());
        assert!(rep.checked > 5_000, "sweep too small: {}", rep.checked);
    }
}

#[test]
fn associativity_exact_matrix_identities() {
    for variant in [Variant::Log, Variant::VLog] {
        let rep = verify_logdf_associativity(MAX_ARITY, LABELED_MAX, variant);
        assert!(rep.passed(), "{}: {:?}", rep.name, rep.failures());
        assert!(rep.checked > 20_000, "sweep too small: {}", rep.checked);
    }
}

#[test]
fn equivariance_exact_matrix_identities() {
    for variant in [Variant::Log, Variant::VLog] {
        let rep = verify_logdf_equivariance(MAX_ARITY, variant);
        assert!(rep.passed(), "{}: {:?}", rep.name, rep.failures());
        assert!(rep.checked > 4_000, "sweep too small: {}", rep.checked);
    }
}

#[test]
fn virtual_unit_laws_all_arities() {
    let rep = verify_logdf_units(MAX_ARITY);
    assert!(rep.passed(), "{:?}", rep.failures());
}

#[test]
fn section_flag_bookkeeping() {
    let rep = verify_logdf_flags(4);
    assert!(rep.passed(), "{:?}", rep.failures());
}

#[test]
fn no_strict_unit_within_bounds() {
    let rep = verify_strict_units(3, 3);
    assert!(rep.passed(), "{:?}", rep.failures());
    let search = strict_unit_search(3, 3).unwrap();
    assert!(search.candidates >= 400, "search space: {}", search.candidates);
    assert_eq!(search.df_legal_found, 0);
}

/// The zero-section bookkeeping: exactly the full set, the fibers, and the
/// singletons (in the full inventory) pull back with zero section.
#[test]
fn zero_section_rows_are_exactly_the_predicted_ones() {
    for m in 2..=5u32 {
        let dom = Subset::range(m).unwrap();
        for n in 1..=m {
            for q in Surjection::enumerate(dom, Subset::range(n).unwrap()) {
                for variant in [Variant::Log, Variant::VLog] {
                    let g = gamma(&q, variant).unwrap();
                    for (bundle, row) in g.target.bundles.iter().zip(&g.rows) {
                        let index = match &bundle.tag.kind {
                            fmlog::logdf::BundleKind::Div(i) => *i,
                            fmlog::logdf::BundleKind::Single(i) => {
                                Subset::singleton(*i).unwrap()
                            }
                            fmlog::logdf::BundleKind::Point => dom,
                            other => panic!("unexpected bundle {other:?}"),
                        };
                        let is_fiber_or_full = index == dom
                            || (q.image_of(index).len() == 1
                                && index == q.fiber(q.image_of(index).min().unwrap()));
                        let expected_zero = is_fiber_or_full || index.len() == 1;
                        assert_eq!(
                            row.section == fmlog::logdf::SectionKind::Zero,
                            expected_zero,
                            "q={q:?} index={index:?} {variant:?}"
                        );
                    }
                }
            }
        }
    }
}
