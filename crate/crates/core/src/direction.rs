//! Direction classes: exact rational points of the spheres that coordinatize
//! compactified configuration spaces.
//!
//! A sphere coordinate records a tuple of vectors indexed by a finite label
//! set, considered up to simultaneous translation and positive rescaling.
//! The canonical representative is centered (the vectors sum to zero) and
//! scaled so the sum of the absolute values of all entries — the L1 norm of
//! the flattened tuple — equals one.  Positive rescaling preserves rationality,
//! so the quotient has honest rational points and equality is decidable
//! exactly.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::qmat::QMat;
use crate::ratio::{l1_norm, Q};
use crate::sets::{Subset, Surjection};
use crate::{Error, Result};

/// A canonical direction: centered, L1-normalized tuple of rational vectors
/// indexed by a label set with at least two elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DirectionClass {
    dim: usize,
    /// Keyed by label; every vector has length `dim`.
    vectors: BTreeMap<u32, Vec<Q>>,
}

impl DirectionClass {
    /// Center and L1-normalize a tuple of vectors.  Fails with a degeneracy
    /// error when all vectors are equal (the direction is undefined there).
    pub fn canonical(dim: usize, vectors: BTreeMap<u32, Vec<Q>>) -> Result<DirectionClass> {
        if vectors.len() < 2 {
            return Err(Error::invalid_input(
                "a direction needs at least two indexed vectors",
            ));
        }
        for v in vectors.values() {
            if v.len() != dim {
                return Err(Error::invalid_input(format!(
                    "vector length {} does not match dimension {dim}",
                    v.len()
                )));
            }
        }
        let n = vectors.len();
        let mut mean = vec![Q::zero(); dim];
        for v in vectors.values() {
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x;
            }
        }
        let count = crate::ratio::qi(n as i64);
        for m in mean.iter_mut() {
            *m /= &count;
        }
        let mut centered: BTreeMap<u32, Vec<Q>> = BTreeMap::new();
        for (l, v) in &vectors {
            centered.insert(
                *l,
                v.iter().zip(&mean).map(|(x, m)| x - m).collect::<Vec<Q>>(),
            );
        }
        let norm = l1_norm(centered.values().flatten());
        if norm.is_zero() {
            return Err(Error::degenerate(
                "all vectors coincide; no direction is defined",
            ));
        }
        for v in centered.values_mut() {
            for x in v.iter_mut() {
                *x /= &norm;
            }
        }
        Ok(DirectionClass {
            dim,
            vectors: centered,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index_set(&self) -> Subset {
        Subset::from_labels(self.vectors.keys().copied()).expect("labels validated")
    }

    pub fn vector(&self, label: u32) -> Option<&[Q]> {
        self.vectors.get(&label).map(|v| v.as_slice())
    }

    pub fn vectors(&self) -> &BTreeMap<u32, Vec<Q>> {
        &self.vectors
    }

    /// Check the canonical-form invariants (used by tests and validators).
    pub fn check_invariants(&self) -> Result<()> {
        let mut sum = vec![Q::zero(); self.dim];
        for v in self.vectors.values() {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
        if sum.iter().any(|s| !s.is_zero()) {
            return Err(Error::internal("direction not centered"));
        }
        let norm = l1_norm(self.vectors.values().flatten());
        if norm != crate::ratio::qi(1) {
            return Err(Error::internal("direction not L1-normalized"));
        }
        Ok(())
    }

    /// Apply an exact orthogonal matrix entrywise and re-canonicalize
    /// (rotation maps rays to rays; the L1 representative changes).
    pub fn rotate(&self, r: &QMat) -> Result<DirectionClass> {
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
        let mut rotated = BTreeMap::new();
        for (l, v) in &self.vectors {
            rotated.insert(*l, r.apply(v)?);
        }
        DirectionClass::canonical(self.dim, rotated)
    }

    /// Relabel the index set along a bijection.
    pub fn relabel(&self, b: &Surjection) -> Result<DirectionClass> {
        if !b.is_bijective() {
            return Err(Error::invalid_input("relabelling must be bijective"));
        }
        let mut out = BTreeMap::new();
        for (l, v) in &self.vectors {
            if !b.domain().contains(*l) {
                return Err(Error::invalid_input(format!(
                    "relabelling does not cover label {l}"
                )));
            }
            out.insert(b.apply(*l), v.clone());
        }
        DirectionClass::canonical(self.dim, out)
    }
}

/// The sphere map induced by a surjection of index sets `q: I ↠ J`: pull a
/// `J`-indexed direction back to the `I`-indexed one with `u_i = w_{q(i)}`,
/// then center and normalize.  For surjective `q` and a non-degenerate input
/// the result is never degenerate.
pub fn g_map(q: &Surjection, w: &DirectionClass) -> Result<DirectionClass> {
    if q.codomain() != w.index_set() {
        return Err(Error::invalid_input(format!(
            "index mismatch: surjection targets {} but direction is indexed by {}",
            q.codomain(),
            w.index_set()
        )));
    }
    let mut pulled = BTreeMap::new();
    for i in q.domain().labels() {
        let v = w
            .vector(q.apply(i))
            .expect("codomain checked above")
            .to_vec();
        pulled.insert(i, v);
    }
    match DirectionClass::canonical(w.dim(), pulled) {
        Ok(d) => Ok(d),
        Err(Error::Degenerate(_)) => Err(Error::internal(
            "pullback along a surjection degenerated; the input direction must have been invalid",
        )),
        Err(e) => Err(e),
    }
}

/// Convenience constructor from `(label, vector)` pairs.
pub fn direction_canonical(dim: usize, entries: Vec<(u32, Vec<Q>)>) -> Result<DirectionClass> {
    let mut map = BTreeMap::new();
    for (l, v) in entries {
        if map.insert(l, v).is_some() {
            return Err(Error::invalid_input(format!("label {l} repeated")));
        }
    }
    DirectionClass::canonical(dim, map)
}
