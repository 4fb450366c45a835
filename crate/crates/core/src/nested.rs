//! Nested collections of subsets and the stable rooted trees they encode.
//!
//! A *nested collection* over an ambient label set `N` is a set of proper
//! subsets of `N`, each with at least two elements, in which any two members
//! are either disjoint or comparable by inclusion.  These collections are in
//! canonical bijection with *stable trees*: rooted trees whose leaves are
//! labelled bijectively by `N` and whose internal vertices all have at least
//! two children.  The bijection sends a tree to the family of leaf sets of its
//! internal non-root vertices.
//!
//! Collections double as strata indices: a stratum lies in the closure of
//! another exactly when its collection contains the other's.

use crate::sets::Subset;
use crate::{Error, Result};

/// Default cap on the ambient arity for the exhaustive enumerations (the
/// collection count grows super-exponentially: 1, 1, 4, 26, 236, 2752, …).
pub const DEFAULT_MAX_ARITY: u32 = 8;

/// Pairwise inclusion-or-disjointness of a family of subsets.
pub fn is_nested(members: &[Subset]) -> bool {
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if !a.nested_with(*b) {
                return false;
            }
        }
    }
    true
}

/// A nested collection of proper subsets of an ambient set, each member with
/// at least two elements.  Members are kept sorted by (size, lexicographic
/// label list), so equal collections compare equal structurally.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NestedCollection {
    ambient: Subset,
    members: Vec<Subset>,
}

impl NestedCollection {
    pub fn new<I: IntoIterator<Item = Subset>>(ambient: Subset, members: I) -> Result<NestedCollection> {
        let mut ms: Vec<Subset> = members.into_iter().collect();
        ms.sort_by(|a, b| a.size_lex_cmp(*b));
        ms.dedup();
        for m in &ms {
            if m.len() < 2 {
                return Err(Error::invalid_input(format!(
                    "collection member {m} has fewer than two elements"
                )));
            }
            if !m.is_proper_subset_of(ambient) {
                return Err(Error::invalid_input(format!(
                    "collection member {m} is not a proper subset of the ambient set {ambient}"
                )));
            }
        }
        if !is_nested(&ms) {
            return Err(Error::invalid_input("collection members are not nested"));
        }
        Ok(NestedCollection { ambient, members: ms })
    }

    pub fn empty(ambient: Subset) -> NestedCollection {
        NestedCollection {
            ambient,
            members: Vec::new(),
        }
    }

    pub fn ambient(&self) -> Subset {
        self.ambient
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn contains_member(&self, s: Subset) -> bool {
        self.members.contains(&s)
    }

    /// Order collections by (size, lexicographic member list); the
    /// enumeration below emits collections in exactly this order.
    pub fn enumeration_cmp(&self, other: &NestedCollection) -> std::cmp::Ordering {
        let key = |c: &NestedCollection| (c.members.len(), c.members.clone());
        key(self).cmp(&key(other))
    }
}

/// Closure order on strata: the stratum indexed by `c1` lies at least as deep
/// as the one indexed by `c2` (i.e. inside its closure) iff `c2 ⊆ c1`.
pub fn strata_closure_leq(c1: &NestedCollection, c2: &NestedCollection) -> Result<bool> {
    if c1.ambient != c2.ambient {
        return Err(Error::invalid_input(format!(
            "strata over different ambient sets: {} vs {}",
            c1.ambient, c2.ambient
        )));
    }
    Ok(c2.members.iter().all(|m| c1.contains_member(*m)))
}

/// A rooted tree with leaves labelled by a finite label set; every internal
/// vertex has at least two children.  Children are kept sorted by their
/// minimum leaf label, making the representation canonical.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum StableTree {
    Leaf(u32),
    Node(Vec<StableTree>),
}

impl StableTree {
    pub fn leaf_set(&self) -> Subset {
        match self {
            StableTree::Leaf(l) => Subset::singleton(*l).expect("leaf label in range"),
            StableTree::Node(children) => children
                .iter()
                .fold(Subset::EMPTY, |acc, c| acc.union(c.leaf_set())),
        }
    }

    /// Validate stability (≥ 2 children per internal vertex), distinctness of
    /// leaf labels, and canonical child order.
    pub fn validate(&self) -> Result<()> {
        match self {
            StableTree::Leaf(_) => {
                self.leaf_set(); // label range check
                Ok(())
            }
            StableTree::Node(children) => {
                if children.len() < 2 {
                    return Err(Error::invalid_input(
                        "internal vertex with fewer than two children",
                    ));
                }
                let mut seen = Subset::EMPTY;
                let mut last_min = 0u32;
                for c in children {
                    c.validate()?;
                    let ls = c.leaf_set();
                    if !seen.is_disjoint_from(ls) {
                        return Err(Error::invalid_input("repeated leaf label"));
                    }
                    seen = seen.union(ls);
                    let m = ls.min().expect("nonempty leaf set");
                    if m <= last_min {
                        return Err(Error::invalid_input(
                            "children not sorted by minimum leaf label",
                        ));
                    }
                    last_min = m;
                }
                Ok(())
            }
        }
    }

    /// Leaf sets of all internal non-root vertices.
    fn internal_leaf_sets(&self, out: &mut Vec<Subset>, is_root: bool) {
        if let StableTree::Node(children) = self {
            if !is_root {
                out.push(self.leaf_set());
            }
            for c in children {
                c.internal_leaf_sets(out, false);
            }
        }
    }
}

/// The nested collection encoded by a stable tree: the leaf sets of its
/// internal non-root vertices.
pub fn tree_to_nested(t: &StableTree) -> Result<NestedCollection> {
    t.validate()?;
    let mut sets = Vec::new();
    t.internal_leaf_sets(&mut sets, true);
    NestedCollection::new(t.leaf_set(), sets)
}

/// The stable tree encoded by a nested collection; the empty collection gives
/// the corolla (all leaves directly under the root).
pub fn nested_to_tree(c: &NestedCollection) -> Result<StableTree> {
    build_cluster(c.ambient(), c.members())
}

/// Build the subtree for `cluster`, whose strictly-contained members of the
/// collection are listed in `inside`.
fn build_cluster(cluster: Subset, inside: &[Subset]) -> Result<StableTree> {
    if cluster.len() == 1 {
        return Ok(StableTree::Leaf(cluster.min().expect("nonempty")));
    }
    // Maximal members strictly inside the cluster become child clusters;
    // uncovered labels become leaf children.
    let strict: Vec<Subset> = inside
        .iter()
        .copied()
        .filter(|m| m.is_proper_subset_of(cluster))
        .collect();
    let maximal: Vec<Subset> = strict
        .iter()
        .copied()
        .filter(|m| !strict.iter().any(|o| m.is_proper_subset_of(*o)))
        .collect();
    let mut children: Vec<StableTree> = Vec::new();
    let mut covered = Subset::EMPTY;
    for m in &maximal {
        if !covered.is_disjoint_from(*m) {
            return Err(Error::internal(
                "maximal members of a nested collection must be disjoint",
            ));
        }
        covered = covered.union(*m);
        let sub: Vec<Subset> = strict
            .iter()
            .copied()
            .filter(|s| s.is_subset_of(*m))
            .collect();
        children.push(build_cluster(*m, &sub)?);
    }
    for l in cluster.minus(covered).labels() {
        children.push(StableTree::Leaf(l));
    }
    children.sort_by_key(|c| c.leaf_set().min().expect("nonempty"));
    if children.len() < 2 {
        return Err(Error::internal(
            "cluster of a proper nested collection must split into at least two children",
        ));
    }
    Ok(StableTree::Node(children))
}

/// All nested collections over `ambient`, ordered by (size, lexicographic
/// member list).
pub fn enumerate_nested_collections(ambient: Subset, max_arity: u32) -> Result<Vec<NestedCollection>> {
    if ambient.is_empty() {
        return Err(Error::invalid_input("empty ambient set"));
    }
    if ambient.len() as u32 > max_arity {
        return Err(Error::resource_limit(format!(
            "arity {} exceeds the configured bound {max_arity}",
            ambient.len()
        )));
    }
    // Candidates in (size, lex) order; a DFS over increasing candidate indices
    // with a pairwise-nestedness filter yields each collection exactly once.
    let candidates: Vec<Subset> = ambient
        .subsets_with_at_least(2)
        .into_iter()
        .filter(|s| *s != ambient)
        .collect();
    let compatible: Vec<u64> = candidates
        .iter()
        .map(|a| {
            let mut mask = 0u64;
            for (j, b) in candidates.iter().enumerate() {
                if a.nested_with(*b) {
                    mask |= 1u64 << j;
                }
            }
            mask
        })
        .collect();
    let mut out: Vec<NestedCollection> = Vec::new();
    let mut stack: Vec<(usize, u64, Vec<Subset>)> = vec![(0, u64::MAX, Vec::new())];
    while let Some((start, allowed, chosen)) = stack.pop() {
        out.push(NestedCollection {
            ambient,
            members: {
                let mut ms = chosen.clone();
                ms.sort_by(|a, b| a.size_lex_cmp(*b));
                ms
            },
        });
        for i in (start..candidates.len()).rev() {
            if allowed & (1u64 << i) != 0 {
                let mut next = chosen.clone();
                next.push(candidates[i]);
                stack.push((i + 1, allowed & compatible[i], next));
            }
        }
    }
    out.sort_by(|a, b| a.enumeration_cmp(b));
    Ok(out)
}

/// One stable tree per isomorphism class with leaves labelled by `1..=n`,
/// listed in the enumeration order of their nested collections.
pub fn enumerate_stable_trees(n: u32, max_arity: u32) -> Result<Vec<StableTree>> {
    let ambient = Subset::range(n)?;
    if n == 1 {
        return Ok(vec![StableTree::Leaf(1)]);
    }
    enumerate_nested_collections(ambient, max_arity)?
        .iter()
        .map(nested_to_tree)
        .collect()
}

/// Covering relations of the closure order among the enumerated collections.
/// A pair `(i, j)` means collection `i` equals collection `j` plus one extra
/// member: the stratum indexed by `i` is a codimension-one degeneration lying
/// in the closure of the stratum indexed by `j`.
pub fn closure_covers(collections: &[NestedCollection]) -> Vec<(usize, usize)> {
    let mut covers = Vec::new();
    for (i, a) in collections.iter().enumerate() {
        for (j, b) in collections.iter().enumerate() {
            if a.members.len() == b.members.len() + 1
                && b.members.iter().all(|m| a.contains_member(*m))
            {
                covers.push((i, j));
            }
        }
    }
    covers
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(labels: &[u32]) -> Subset {
        Subset::from_labels(labels.iter().copied()).unwrap()
    }

    #[test]
    fn nestedness_examples() {
        assert!(is_nested(&[sub(&[1, 2]), sub(&[1, 2, 3])]));
        assert!(!is_nested(&[sub(&[1, 2]), sub(&[2, 3])]));
        assert!(is_nested(&[]));
        assert!(is_nested(&[sub(&[1, 2]), sub(&[3, 4])]));
    }

    #[test]
    fn collection_validation() {
        let amb = Subset::range(3).unwrap();
        assert!(NestedCollection::new(amb, [sub(&[1, 2])]).is_ok());
        // Full set is not a proper subset.
        assert!(NestedCollection::new(amb, [sub(&[1, 2, 3])]).is_err());
        // Too small.
        assert!(NestedCollection::new(amb, [sub(&[1])]).is_err());
        // Not nested.
        assert!(NestedCollection::new(Subset::range(4).unwrap(), [sub(&[1, 2]), sub(&[2, 3])]).is_err());
    }

    #[test]
    fn corolla_round_trip() {
        let c = NestedCollection::empty(Subset::range(3).unwrap());
        let t = nested_to_tree(&c).unwrap();
        assert_eq!(
            t,
            StableTree::Node(vec![
                StableTree::Leaf(1),
                StableTree::Leaf(2),
                StableTree::Leaf(3)
            ])
        );
        assert_eq!(tree_to_nested(&t).unwrap(), c);
    }

    #[test]
    fn caterpillar_round_trip() {
        let c = NestedCollection::new(
            Subset::range(4).unwrap(),
            [sub(&[1, 2]), sub(&[1, 2, 3])],
        )
        .unwrap();
        let t = nested_to_tree(&c).unwrap();
        let expected = StableTree::Node(vec![
            StableTree::Node(vec![
                StableTree::Node(vec![StableTree::Leaf(1), StableTree::Leaf(2)]),
                StableTree::Leaf(3),
            ]),
            StableTree::Leaf(4),
        ]);
        assert_eq!(t, expected);
        assert_eq!(tree_to_nested(&t).unwrap(), c);
    }

    #[test]
    fn tree_validation_rejects_unary() {
        let bad = StableTree::Node(vec![StableTree::Leaf(1)]);
        assert!(bad.validate().is_err());
        let dup = StableTree::Node(vec![StableTree::Leaf(1), StableTree::Leaf(1)]);
        assert!(dup.validate().is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_stable_trees(1, 8).unwrap().len(), 1);
        assert_eq!(enumerate_stable_trees(2, 8).unwrap().len(), 1);
        assert_eq!(enumerate_stable_trees(3, 8).unwrap().len(), 4);
        assert_eq!(enumerate_stable_trees(4, 8).unwrap().len(), 26);
    }

    #[test]
    fn enumeration_order_n3() {
        let cs = enumerate_nested_collections(Subset::range(3).unwrap(), 8).unwrap();
        let keys: Vec<Vec<String>> = cs
            .iter()
            .map(|c| c.members().iter().map(|m| m.key()).collect())
            .collect();
        assert_eq!(
            keys,
            vec![
                Vec::<String>::new(),
                vec!["1,2".to_string()],
                vec!["1,3".to_string()],
                vec!["2,3".to_string()],
            ]
        );
    }

    #[test]
    fn arity_bound_enforced() {
        assert!(matches!(
            enumerate_nested_collections(Subset::range(6).unwrap(), 5),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn closure_order_examples() {
        let amb = Subset::range(3).unwrap();
        let open = NestedCollection::empty(amb);
        let deep = NestedCollection::new(amb, [sub(&[1, 2])]).unwrap();
        assert!(strata_closure_leq(&deep, &open).unwrap());
        assert!(!strata_closure_leq(&open, &deep).unwrap());
        assert!(strata_closure_leq(&deep, &deep).unwrap());
    }
}
