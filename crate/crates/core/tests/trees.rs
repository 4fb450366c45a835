//! Strata combinatorics: enumeration counts against two independent oracles,
//! the tree/collection bijection, and the closure partial order.

use fmlog::nested::{
    closure_covers, enumerate_nested_collections, enumerate_stable_trees, is_nested,
    nested_to_tree, strata_closure_leq, tree_to_nested, NestedCollection, StableTree,
    DEFAULT_MAX_ARITY,
};
use fmlog::sets::Subset;
use fmlog::verify::verify_strata;

const EXPECTED: [u64; 6] = [1, 1, 4, 26, 236, 2752];

#[test]
fn counts_match_frozen_sequence() {
    for n in 1..=6u32 {
        let cols = enumerate_nested_collections(Subset::range(n).unwrap(), DEFAULT_MAX_ARITY)
            .unwrap();
        assert_eq!(cols.len() as u64, EXPECTED[(n - 1) as usize], "n={n}");
        let trees = enumerate_stable_trees(n, DEFAULT_MAX_ARITY).unwrap();
        assert_eq!(trees.len(), cols.len(), "n={n}");
    }
}

#[test]
fn full_strata_campaign_passes() {
    for rep in verify_strata(6) {
        assert!(rep.passed(), "{}: {:?}", rep.name, rep.failures());
    }
}

#[test]
fn enumeration_is_sorted_and_duplicate_free() {
    for n in 2..=5u32 {
        let cols = enumerate_nested_collections(Subset::range(n).unwrap(), DEFAULT_MAX_ARITY)
            .unwrap();
        for w in cols.windows(2) {
            assert_eq!(
                w[0].enumeration_cmp(&w[1]),
                std::cmp::Ordering::Less,
                "n={n}: enumeration not strictly increasing"
            );
        }
    }
}

#[test]
fn every_enumerated_family_is_nested_and_proper() {
    let ambient = Subset::range(5).unwrap();
    for c in enumerate_nested_collections(ambient, DEFAULT_MAX_ARITY).unwrap() {
        assert!(is_nested(c.members()));
        for m in c.members() {
            assert!(m.len() >= 2);
            assert!(m.is_proper_subset_of(ambient));
        }
    }
}

#[test]
fn tree_round_trip_is_identity() {
    for n in 1..=6u32 {
        let cols = enumerate_nested_collections(Subset::range(n).unwrap(), DEFAULT_MAX_ARITY)
            .unwrap();
        for c in &cols {
            let t = nested_to_tree(c).unwrap();
            t.validate().unwrap();
            assert_eq!(&tree_to_nested(&t).unwrap(), c);
        }
    }
}

#[test]
fn corolla_is_the_generic_stratum() {
    let ambient = Subset::range(4).unwrap();
    let open = NestedCollection::new(ambient, Vec::new()).unwrap();
    let t = nested_to_tree(&open).unwrap();
    match &t {
        StableTree::Node(children) => assert_eq!(children.len(), 4),
        StableTree::Leaf(_) => panic!("corolla expected"),
    }
}

#[test]
fn closure_order_has_the_open_stratum_on_top() {
    let ambient = Subset::range(4).unwrap();
    let cols = enumerate_nested_collections(ambient, DEFAULT_MAX_ARITY).unwrap();
    let open = NestedCollection::new(ambient, Vec::new()).unwrap();
    for c in &cols {
        // Every stratum lies in the closure of the open one.
        assert!(strata_closure_leq(c, &open).unwrap());
        // And deeper strata have at least as many members.
        if strata_closure_leq(c, &open).unwrap() && c != &open {
            assert!(!c.members().is_empty());
        }
    }
}

#[test]
fn covering_relations_add_exactly_one_member() {
    let ambient = Subset::range(4).unwrap();
    let cols = enumerate_nested_collections(ambient, DEFAULT_MAX_ARITY).unwrap();
    let covers = closure_covers(&cols);
    assert!(!covers.is_empty());
    for (i, j) in &covers {
        let a = &cols[*i];
        let b = &cols[*j];
        assert_eq!(a.members().len(), b.members().len() + 1);
        assert!(strata_closure_leq(a, b).unwrap());
        for m in b.members() {
            assert!(a.contains_member(*m));
        }
    }
}
