//! Rational points of compactified configuration spaces, presented as stable
//! trees of exact configurations, together with operadic composition.
//!
//! A point is a stable rooted tree whose leaves carry the configuration
//! labels; every internal vertex stores one offset vector per child, in
//! canonical direction form (pairwise distinct, summing to zero, flattened
//! L1 norm one).  The tree records which clusters of points have collided and
//! at what relative "infinitesimal scale layer" each configuration lives.
//!
//! The sphere coordinate of a point at an index subset `I` reads off the
//! offsets at the deepest vertex separating `I`; composition grafts trees.
//! The two interact through a piecewise law — the coordinate of a composite
//! at `I` is the inner point's coordinate when `I` sits inside one fiber, and
//! otherwise the pullback [`g_map`] of an outer coordinate — which the test
//! suite checks on both routes.

use std::collections::BTreeMap;

use crate::circle::{embed_circle, CirclePoint};
use crate::direction::DirectionClass;
use crate::qmat::QMat;
use crate::ratio::Q;
use crate::sets::{Subset, Surjection};
use crate::{Error, Result};

/// A stable tree with per-child offset vectors at each internal vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConfigTree {
    Leaf(u32),
    /// Children paired with their offset vectors; kept sorted by minimum
    /// leaf label.
    Node(Vec<(ConfigTree, Vec<Q>)>),
}

impl ConfigTree {
    pub fn leaf_set(&self) -> Subset {
        match self {
            ConfigTree::Leaf(l) => Subset::singleton(*l).expect("label validated"),
            ConfigTree::Node(children) => children
                .iter()
                .fold(Subset::EMPTY, |acc, (c, _)| acc.union(c.leaf_set())),
        }
    }
}

/// A point of the compactified configuration space of `dim`-dimensional
/// configurations indexed by a finite label set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FMPoint {
    dim: usize,
    root: ConfigTree,
}

impl FMPoint {
    /// The arity-one unit: a bare leaf.
    pub fn unit(dim: usize, label: u32) -> Result<FMPoint> {
        Subset::singleton(label)?;
        Ok(FMPoint {
            dim,
            root: ConfigTree::Leaf(label),
        })
    }

    /// A corolla: one configuration of pairwise distinct labelled vectors,
    /// canonicalized by centering and L1 normalization.
    pub fn from_config(dim: usize, points: Vec<(u32, Vec<Q>)>) -> Result<FMPoint> {
        if points.len() < 2 {
            return Err(Error::invalid_input(
                "a configuration needs at least two points; use the unit for arity one",
            ));
        }
        let mut map = BTreeMap::new();
        for (l, v) in points {
            if map.insert(l, v).is_some() {
                return Err(Error::invalid_input(format!("label {l} repeated")));
            }
        }
        let dir = DirectionClass::canonical(dim, map)?;
        let labels: Vec<u32> = dir.index_set().labels().collect();
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                if dir.vector(*a) == dir.vector(*b) {
                    return Err(Error::invalid_input(format!(
                        "points {a} and {b} coincide"
                    )));
                }
            }
        }
        let children = labels
            .iter()
            .map(|l| {
                (
                    ConfigTree::Leaf(*l),
                    dir.vector(*l).expect("present").to_vec(),
                )
            })
            .collect();
        Ok(FMPoint {
            dim,
            root: ConfigTree::Node(children),
        })
    }

    /// Wrap an explicit tree after validating every invariant; used by the
    /// JSON decoder and by tests that build trees by hand.
    pub fn from_tree(dim: usize, root: ConfigTree) -> Result<FMPoint> {
        validate_node(dim, &root)?;
        Ok(FMPoint { dim, root })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root(&self) -> &ConfigTree {
        &self.root
    }

    pub fn leaf_set(&self) -> Subset {
        self.root.leaf_set()
    }

    pub fn arity(&self) -> usize {
        self.leaf_set().len()
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.root, ConfigTree::Leaf(_))
    }

    /// The nested collection recorded by the underlying tree: leaf sets of
    /// internal non-root vertices.
    pub fn nested_sets(&self) -> Vec<Subset> {
        let mut out = Vec::new();
        fn walk(node: &ConfigTree, is_root: bool, out: &mut Vec<Subset>) {
            if let ConfigTree::Node(children) = node {
                if !is_root {
                    out.push(node.leaf_set());
                }
                for (c, _) in children {
                    walk(c, false, out);
                }
            }
        }
        walk(&self.root, true, &mut out);
        out.sort_by(|a, b| a.size_lex_cmp(*b));
        out
    }

    /// The sphere coordinate at an index subset `I` (at least two labels):
    /// the direction of the offsets at the deepest vertex whose leaf set
    /// still contains `I`.
    pub fn coordinates(&self, index: Subset) -> Result<DirectionClass> {
        if index.len() < 2 {
            return Err(Error::invalid_input(
                "coordinates are indexed by subsets with at least two elements",
            ));
        }
        if !index.is_subset_of(self.leaf_set()) {
            return Err(Error::invalid_input(format!(
                "index {index} is not contained in the leaf set {}",
                self.leaf_set()
            )));
        }
        let mut node = &self.root;
        'descend: loop {
            let children = match node {
                ConfigTree::Leaf(_) => {
                    return Err(Error::internal("descended into a leaf while |I| >= 2"))
                }
                ConfigTree::Node(children) => children,
            };
            for (child, _) in children {
                if index.is_subset_of(child.leaf_set()) {
                    node = child;
                    continue 'descend;
                }
            }
            // `node` is the deepest vertex containing `I`; read the offsets
            // of the children that meet `I`.
            let mut vectors = BTreeMap::new();
            for i in index.labels() {
                let (_, offset) = children
                    .iter()
                    .find(|(c, _)| c.leaf_set().contains(i))
                    .expect("index inside leaf set");
                vectors.insert(i, offset.clone());
            }
            return match DirectionClass::canonical(self.dim, vectors) {
                Err(Error::Degenerate(_)) => Err(Error::internal(
                    "coordinate degenerated at the separating vertex",
                )),
                other => other,
            };
        }
    }

    /// Exact extensional equality: same leaf set and equal coordinates at
    /// every index subset with at least two elements.
    pub fn point_eq(&self, other: &FMPoint) -> Result<bool> {
        if self.dim != other.dim {
            return Err(Error::invalid_input("points of different dimensions"));
        }
        if self.leaf_set() != other.leaf_set() {
            return Ok(false);
        }
        for index in self.leaf_set().subsets_with_at_least(2) {
            if self.coordinates(index)? != other.coordinates(index)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Relabel leaves along a bijection.
    pub fn relabel(&self, b: &Surjection) -> Result<FMPoint> {
        if !b.is_bijective() || b.domain() != self.leaf_set() {
            return Err(Error::invalid_input(format!(
                "relabelling must be a bijection defined on the leaf set {}",
                self.leaf_set()
            )));
        }
        fn walk(node: &ConfigTree, b: &Surjection) -> ConfigTree {
            match node {
                ConfigTree::Leaf(l) => ConfigTree::Leaf(b.apply(*l)),
                ConfigTree::Node(children) => {
                    let mut out: Vec<(ConfigTree, Vec<Q>)> = children
                        .iter()
                        .map(|(c, off)| (walk(c, b), off.clone()))
                        .collect();
                    out.sort_by_key(|(c, _)| c.leaf_set().min().expect("nonempty"));
                    ConfigTree::Node(out)
                }
            }
        }
        Ok(FMPoint {
            dim: self.dim,
            root: walk(&self.root, b),
        })
    }

    /// The symmetric-group action: relabel a point with leaf set `1..=n`
    /// so that input label `i` becomes `σ(i)`.
    pub fn sigma_act(&self, sigma: &Surjection) -> Result<FMPoint> {
        self.relabel(sigma)
    }

    /// Apply an exact orthogonal matrix to every configuration in the tree
    /// (each vertex re-normalizes independently; vertices are pinned only up
    /// to positive scale).
    pub fn rotate(&self, r: &QMat) -> Result<FMPoint> {
        if r.rows != self.dim || r.cols != self.dim {
            return Err(Error::invalid_input(format!(
                "rotation shape {}x{} does not match dimension {}",
                r.rows, r.cols, self.dim
            )));
        }
        if !r.is_orthogonal() {
            return Err(Error::invalid_input(
                "rotation matrix is not exactly orthogonal",
            ));
        }
        fn walk(dim: usize, node: &ConfigTree, r: &QMat) -> Result<ConfigTree> {
            match node {
                ConfigTree::Leaf(l) => Ok(ConfigTree::Leaf(*l)),
                ConfigTree::Node(children) => {
                    // Rotate offsets, then re-canonicalize this vertex's
                    // configuration (indexed by child minimum labels).
                    let mut vectors = BTreeMap::new();
                    for (c, off) in children {
                        vectors.insert(c.leaf_set().min().expect("nonempty"), r.apply(off)?);
                    }
                    let dir = DirectionClass::canonical(dim, vectors)?;
                    let mut out = Vec::new();
                    for (c, _) in children {
                        let key = c.leaf_set().min().expect("nonempty");
                        out.push((
                            walk(dim, c, r)?,
                            dir.vector(key).expect("present").to_vec(),
                        ));
                    }
                    Ok(ConfigTree::Node(out))
                }
            }
        }
        Ok(FMPoint {
            dim: self.dim,
            root: walk(self.dim, &self.root, r)?,
        })
    }
}

fn validate_node(dim: usize, node: &ConfigTree) -> Result<()> {
    match node {
        ConfigTree::Leaf(l) => {
            Subset::singleton(*l)?;
            Ok(())
        }
        ConfigTree::Node(children) => {
            if children.len() < 2 {
                return Err(Error::invalid_input(
                    "internal vertex with fewer than two children",
                ));
            }
            let mut vectors = BTreeMap::new();
            let mut seen = Subset::EMPTY;
            let mut last_min = 0;
            for (c, off) in children {
                validate_node(dim, c)?;
                if off.len() != dim {
                    return Err(Error::invalid_input(format!(
                        "offset length {} does not match dimension {dim}",
                        off.len()
                    )));
                }
                let ls = c.leaf_set();
                if !seen.is_disjoint_from(ls) {
                    return Err(Error::invalid_input("repeated leaf label"));
                }
                seen = seen.union(ls);
                let m = ls.min().expect("nonempty");
                if m <= last_min {
                    return Err(Error::invalid_input(
                        "children not sorted by minimum leaf label",
                    ));
                }
                last_min = m;
                vectors.insert(m, off.clone());
            }
            // Canonical form: the stored offsets must already be centered and
            // L1-normalized, and pairwise distinct.
            let canon = DirectionClass::canonical(dim, vectors.clone())?;
            for (key, off) in &vectors {
                if canon.vector(*key) != Some(off.as_slice()) {
                    return Err(Error::invalid_input(
                        "vertex configuration is not in canonical (centered, L1 = 1) form",
                    ));
                }
            }
            let offs: Vec<&Vec<Q>> = vectors.values().collect();
            for i in 0..offs.len() {
                for j in i + 1..offs.len() {
                    if offs[i] == offs[j] {
                        return Err(Error::invalid_input(
                            "two children share the same offset vector",
                        ));
                    }
                }
            }
            Ok(())
        }
    }
}

/// Operadic composition along a surjection `q` from the composite label set
/// onto `x`'s leaf set: graft `ys[k]` (whose leaf set must be the fiber of
/// the `k`-th codomain label) onto the corresponding leaf of `x`.  Arity-one
/// inputs must be units (bare leaves).
pub fn compose(q: &Surjection, x: &FMPoint, ys: &[FMPoint]) -> Result<FMPoint> {
    if q.codomain() != x.leaf_set() {
        return Err(Error::invalid_input(format!(
            "surjection codomain {} does not match outer leaf set {}",
            q.codomain(),
            x.leaf_set()
        )));
    }
    let fibers = q.fibers();
    if ys.len() != fibers.len() {
        return Err(Error::invalid_input(format!(
            "expected {} inner points, got {}",
            fibers.len(),
            ys.len()
        )));
    }
    let mut by_label: BTreeMap<u32, &FMPoint> = BTreeMap::new();
    for ((r, fiber), y) in fibers.iter().zip(ys) {
        if y.dim() != x.dim() {
            return Err(Error::invalid_input("dimension mismatch in composition"));
        }
        if y.leaf_set() != *fiber {
            return Err(Error::invalid_input(format!(
                "inner point for label {r} has leaf set {} but the fiber is {fiber}",
                y.leaf_set()
            )));
        }
        by_label.insert(*r, y);
    }
    fn graft(node: &ConfigTree, by_label: &BTreeMap<u32, &FMPoint>) -> ConfigTree {
        match node {
            ConfigTree::Leaf(r) => by_label[r].root.clone(),
            ConfigTree::Node(children) => {
                let mut out: Vec<(ConfigTree, Vec<Q>)> = children
                    .iter()
                    .map(|(c, off)| (graft(c, by_label), off.clone()))
                    .collect();
                out.sort_by_key(|(c, _)| c.leaf_set().min().expect("nonempty"));
                ConfigTree::Node(out)
            }
        }
    }
    Ok(FMPoint {
        dim: x.dim,
        root: graft(&x.root, &by_label),
    })
}

/// Single-slot composition `x ∘_i y` with the classical label bookkeeping:
/// `x` has leaves `1..=n`, `y` has leaves `1..=m`, and the result has leaves
/// `1..=n+m-1` with `y` inserted at slot `i`.
pub fn circ_i(x: &FMPoint, y: &FMPoint, i: u32) -> Result<FMPoint> {
    let n = x.arity() as u32;
    let m = y.arity() as u32;
    if x.leaf_set() != Subset::range(n)? || y.leaf_set() != Subset::range(m)? {
        return Err(Error::invalid_input(
            "single-slot composition expects leaves labelled 1..=n and 1..=m",
        ));
    }
    if i == 0 || i > n {
        return Err(Error::invalid_input(format!(
            "slot {i} out of range 1..={n}"
        )));
    }
    let q = Surjection::new((1..=n + m - 1).map(|j| {
        let target = if j < i {
            j
        } else if j < i + m {
            i
        } else {
            j - m + 1
        };
        (j, target)
    }))?;
    let shift = Surjection::new((1..=m).map(|j| (j, i - 1 + j)))?;
    let mut ys = Vec::new();
    for (r, fiber) in q.fibers() {
        if r == i {
            ys.push(y.relabel(&shift)?);
        } else {
            ys.push(FMPoint::unit(x.dim(), fiber.min().expect("singleton"))?);
        }
    }
    compose(&q, x, &ys)
}

/// A framed point: an underlying even-dimensional point plus one circle
/// frame per leaf.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FramedPoint {
    pub point: FMPoint,
    pub frames: BTreeMap<u32, CirclePoint>,
}

impl FramedPoint {
    pub fn new(point: FMPoint, frames: BTreeMap<u32, CirclePoint>) -> Result<FramedPoint> {
        if point.dim() % 2 != 0 {
            return Err(Error::invalid_input(
                "framed points need an even ambient dimension",
            ));
        }
        let keys = Subset::from_labels(frames.keys().copied())?;
        if keys != point.leaf_set() {
            return Err(Error::invalid_input(format!(
                "frames indexed by {keys} but leaves are {}",
                point.leaf_set()
            )));
        }
        Ok(FramedPoint { point, frames })
    }

    pub fn unit(dim: usize, label: u32, frame: CirclePoint) -> Result<FramedPoint> {
        FramedPoint::new(
            FMPoint::unit(dim, label)?,
            BTreeMap::from([(label, frame)]),
        )
    }

    pub fn half_dim(&self) -> usize {
        self.point.dim() / 2
    }

    pub fn leaf_set(&self) -> Subset {
        self.point.leaf_set()
    }

    pub fn point(&self) -> &FMPoint {
        &self.point
    }

    pub fn frames(&self) -> &BTreeMap<u32, CirclePoint> {
        &self.frames
    }

    pub fn framed_eq(&self, other: &FramedPoint) -> Result<bool> {
        Ok(self.frames == other.frames && self.point.point_eq(&other.point)?)
    }

    pub fn relabel(&self, b: &Surjection) -> Result<FramedPoint> {
        let mut frames = BTreeMap::new();
        for (l, f) in &self.frames {
            frames.insert(b.apply(*l), f.clone());
        }
        FramedPoint::new(self.point.relabel(b)?, frames)
    }

    /// Rotate the whole framed point by a circle element: the underlying
    /// point by the block rotation, every frame by multiplication.
    pub fn rotate(&self, theta: &CirclePoint) -> Result<FramedPoint> {
        let r = embed_circle(theta, self.half_dim());
        let point = if self.point.is_unit() {
            self.point.clone()
        } else {
            self.point.rotate(&r)?
        };
        FramedPoint::new(
            point,
            self.frames
                .iter()
                .map(|(l, f)| (*l, theta.mul(f)))
                .collect(),
        )
    }
}

/// Framed composition: each inner point is rotated by the outer frame at its
/// slot, and its frames are multiplied by that same outer frame.
pub fn framed_compose(
    q: &Surjection,
    x: &FramedPoint,
    ys: &[FramedPoint],
) -> Result<FramedPoint> {
    let fibers = q.fibers();
    if ys.len() != fibers.len() {
        return Err(Error::invalid_input(format!(
            "expected {} inner framed points, got {}",
            fibers.len(),
            ys.len()
        )));
    }
    let mut rotated = Vec::new();
    let mut frames = BTreeMap::new();
    for ((r, _), y) in fibers.iter().zip(ys) {
        let outer = x
            .frames
            .get(r)
            .ok_or_else(|| Error::invalid_input(format!("missing outer frame at {r}")))?;
        let ry = y.rotate(outer)?;
        for (l, f) in &ry.frames {
            frames.insert(*l, f.clone());
        }
        rotated.push(ry.point);
    }
    let point = compose(q, &x.point, &rotated)?;
    FramedPoint::new(point, frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::g_map;
    use crate::ratio::{qi, qr};

    fn line_point(labels: &[(u32, i64)]) -> FMPoint {
        FMPoint::from_config(
            1,
            labels.iter().map(|(l, x)| (*l, vec![qi(*x)])).collect(),
        )
        .unwrap()
    }

    fn sub(labels: &[u32]) -> Subset {
        Subset::from_labels(labels.iter().copied()).unwrap()
    }

    #[test]
    fn corolla_coordinates() {
        let p = line_point(&[(1, 0), (2, 1), (3, 3)]);
        let full = p.coordinates(sub(&[1, 2, 3])).unwrap();
        assert_eq!(full.vector(1).unwrap(), &[qr(-2, 5)]);
        assert_eq!(full.vector(3).unwrap(), &[qr(1, 2)]);
        // Proper subset: centered restriction of the configuration.
        let pair = p.coordinates(sub(&[1, 3])).unwrap();
        assert_eq!(pair.vector(1).unwrap(), &[qr(-1, 2)]);
        assert_eq!(pair.vector(3).unwrap(), &[qr(1, 2)]);
    }

    #[test]
    fn coincident_points_rejected() {
        let e = FMPoint::from_config(1, vec![(1, vec![qi(2)]), (2, vec![qi(2)])]);
        assert!(e.is_err());
    }

    #[test]
    fn compose_grafts_and_coordinates_follow_the_piecewise_law() {
        // Outer: two points on the line.  Inner at slot 1: two points.
        let x = line_point(&[(1, 0), (2, 1)]);
        let q = Surjection::parse("1,1,2").unwrap();
        let y1 = line_point(&[(1, 0), (2, 5)]);
        let y2 = FMPoint::unit(1, 3).unwrap();
        let w = compose(&q, &x, &[y1.clone(), y2]).unwrap();
        assert_eq!(w.leaf_set(), sub(&[1, 2, 3]));
        // Inside the fiber: the inner coordinate survives unchanged.
        assert_eq!(
            w.coordinates(sub(&[1, 2])).unwrap(),
            y1.coordinates(sub(&[1, 2])).unwrap()
        );
        // Straddling: pull back the outer coordinate along q.
        let outer = x.coordinates(sub(&[1, 2])).unwrap();
        let expected = g_map(&q.restrict(sub(&[1, 3])).unwrap(), &outer).unwrap();
        assert_eq!(w.coordinates(sub(&[1, 3])).unwrap(), expected);
        // The tree records the collided cluster {1,2}.
        assert_eq!(w.nested_sets(), vec![sub(&[1, 2])]);
    }

    #[test]
    fn unit_laws() {
        let x = line_point(&[(1, 0), (2, 1), (3, 3)]);
        // Right units: compose along the identity with unit inners.
        let id = Surjection::identity(x.leaf_set());
        let units: Vec<FMPoint> = (1..=3).map(|l| FMPoint::unit(1, l).unwrap()).collect();
        let w = compose(&id, &x, &units).unwrap();
        assert!(w.point_eq(&x).unwrap());
        // Left unit: compose the unit with x along the collapse map.
        let collapse = Surjection::new([(1, 1), (2, 1), (3, 1)]).unwrap();
        let u = FMPoint::unit(1, 1).unwrap();
        let w2 = compose(&collapse, &u, &[x.clone()]).unwrap();
        assert!(w2.point_eq(&x).unwrap());
    }

    #[test]
    fn circ_i_matches_classical_bookkeeping() {
        let x = line_point(&[(1, 0), (2, 1)]);
        let y = line_point(&[(1, 0), (2, 2)]);
        let w = circ_i(&x, &y, 1).unwrap();
        assert_eq!(w.leaf_set(), sub(&[1, 2, 3]));
        // Leaves 1,2 are the grafted copy of y; leaf 3 is x's old leaf 2.
        assert_eq!(w.nested_sets(), vec![sub(&[1, 2])]);
        let inner = w.coordinates(sub(&[1, 2])).unwrap();
        assert_eq!(inner.vector(1).unwrap(), &[qr(-1, 2)]);
    }

    #[test]
    fn point_eq_distinguishes_trees() {
        let deep = compose(
            &Surjection::parse("1,1,2").unwrap(),
            &line_point(&[(1, 0), (2, 1)]),
            &[
                line_point(&[(1, 0), (2, 5)]),
                FMPoint::unit(1, 3).unwrap(),
            ],
        )
        .unwrap();
        let flat = line_point(&[(1, 0), (2, 1), (3, 7)]);
        assert!(!deep.point_eq(&flat).unwrap());
        assert!(deep.point_eq(&deep).unwrap());
    }

    #[test]
    fn from_tree_validates_canonical_form() {
        // Offsets not L1-normalized: rejected.
        let bad = ConfigTree::Node(vec![
            (ConfigTree::Leaf(1), vec![qi(-1)]),
            (ConfigTree::Leaf(2), vec![qi(1)]),
        ]);
        assert!(FMPoint::from_tree(1, bad).is_err());
        let good = ConfigTree::Node(vec![
            (ConfigTree::Leaf(1), vec![qr(-1, 2)]),
            (ConfigTree::Leaf(2), vec![qr(1, 2)]),
        ]);
        assert!(FMPoint::from_tree(1, good).is_ok());
    }

    #[test]
    fn framed_compose_twists_frames() {
        let i = CirclePoint::new(qi(0), qi(1)).unwrap();
        let one = CirclePoint::one();
        let x = FramedPoint::new(
            FMPoint::from_config(2, vec![
                (1, vec![qi(-1), qi(0)]),
                (2, vec![qi(1), qi(0)]),
            ])
            .unwrap(),
            BTreeMap::from([(1, i.clone()), (2, one.clone())]),
        )
        .unwrap();
        let y1 = FramedPoint::unit(2, 1, i.clone()).unwrap();
        let y2 = FramedPoint::unit(2, 2, one.clone()).unwrap();
        let q = Surjection::identity(sub(&[1, 2]));
        let w = framed_compose(&q, &x, &[y1, y2]).unwrap();
        // Frame at 1: i * i = -1; frame at 2: 1.
        assert_eq!(w.frames[&1], i.mul(&i));
        assert_eq!(w.frames[&2], one);
        assert!(w.point.point_eq(&x.point).unwrap());
    }
}
