//! Simple screens: one exact covector per index subset, compatible under
//! restriction — the linear-algebra model of a tree of projective-space
//! configurations.
//!
//! For an index set `I` of size at least two, the difference module `F_I` is
//! the free module on symbols `t^k_{ij}` (`i ≠ j` in `I`, `k < dim`) modulo
//! the cocycle relations `t_{ij} + t_{jl} = t_{il}` and `t_{ii} = 0`; it has
//! the canonical basis `t^k_{i,min I}` and rank `dim · (|I| − 1)`.  A screen
//! assigns every `I` a nonzero covector `φ_I` on `F_I`, scaled so that its
//! first nonzero basis value is one, such that restricting `φ_J` along
//! `F_I → F_J` always lands on a scalar multiple `λ_{I,J} · φ_I`.
//!
//! Screens compose along a surjection (inner screens fill the fibers, the
//! outer screen pulls back to every straddling subset) and, when the fiber
//! vanishing conditions hold, the composition can be reversed exactly.

use std::collections::BTreeMap;

use crate::direction::DirectionClass;
use crate::ratio::Q;
use crate::sets::{Subset, Surjection};
use crate::{Error, Result};
use num_traits::Zero;

/// Rank of the difference module `F_I`.
pub fn module_rank(dim: usize, index: Subset) -> usize {
    dim * index.len().saturating_sub(1)
}

/// Sparse covector on `F_I` in the canonical basis `t^k_{i,min I}`; keys are
/// `(i, k)` with `i ≠ min I`, zero entries omitted.
pub type Covector = BTreeMap<(u32, usize), Q>;

/// Value of a covector on the reduced symbol `t^k_{ab}`, i.e.
/// `φ(t^k_{a,min}) − φ(t^k_{b,min})` with the anchor valued at zero.
fn symbol_value(values: &Covector, a: u32, b: u32, k: usize) -> Q {
    let get = |i: u32| values.get(&(i, k)).cloned().unwrap_or_else(Q::zero);
    get(a) - get(b)
}

/// Normalize so the first nonzero basis value (in `(i, k)` order) is one;
/// drops explicit zeros.  Returns `None` for the zero covector.
pub fn canonicalize(values: Covector) -> Option<Covector> {
    let pivot = values.values().find(|v| !v.is_zero())?.clone();
    Some(
        values
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(key, v)| (key, v / pivot.clone()))
            .collect(),
    )
}

/// Pull a covector on `F_J` back along the symbol map `F_I → F_J`,
/// `t_{ij} ↦ t_{f(i) f(j)}`.
fn pull_back(values: &Covector, source: Subset, dim: usize, f: impl Fn(u32) -> u32) -> Covector {
    let m = source.min().expect("source index set nonempty");
    let mut out = Covector::new();
    for i in source.labels().filter(|i| *i != m) {
        for k in 0..dim {
            let v = symbol_value(values, f(i), f(m), k);
            if !v.is_zero() {
                out.insert((i, k), v);
            }
        }
    }
    out
}

/// A screen: canonical nonzero covectors indexed by every subset of the
/// ambient label set with at least two elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Screen {
    dim: usize,
    index_set: Subset,
    components: BTreeMap<Subset, Covector>,
}

impl Screen {
    /// Build and canonicalize a screen from raw covectors.  Requires exactly
    /// one nonzero covector per subset with at least two elements, with keys
    /// inside the subset; compatibility is *not* checked here (see
    /// [`Screen::validate`]), so perturbed families can be represented.
    pub fn new(
        dim: usize,
        index_set: Subset,
        components: BTreeMap<Subset, Covector>,
    ) -> Result<Screen> {
        let expected: Vec<Subset> = index_set.subsets_with_at_least(2);
        if components.len() != expected.len() {
            return Err(Error::invalid_input(format!(
                "expected {} covectors (one per subset of {index_set} with at least two elements), got {}",
                expected.len(),
                components.len()
            )));
        }
        let mut canonical = BTreeMap::new();
        for index in expected {
            let raw = components
                .get(&index)
                .ok_or_else(|| Error::invalid_input(format!("missing covector at {index}")))?;
            let m = index.min().expect("nonempty");
            for ((i, k), _) in raw {
                if !index.contains(*i) || *i == m || *k >= dim {
                    return Err(Error::invalid_input(format!(
                        "covector at {index} uses basis key ({i}, {k}) outside t^k_(i,min)"
                    )));
                }
            }
            let canon = canonicalize(raw.clone()).ok_or_else(|| {
                Error::invalid_input(format!("covector at {index} is zero"))
            })?;
            canonical.insert(index, canon);
        }
        Ok(Screen {
            dim,
            index_set,
            components: canonical,
        })
    }

    /// The screen of an arity-one (or arity-zero) index set: no components.
    pub fn unit(dim: usize, index_set: Subset) -> Result<Screen> {
        if index_set.len() > 1 {
            return Err(Error::invalid_input(
                "unit screens exist only for index sets with at most one element",
            ));
        }
        Ok(Screen {
            dim,
            index_set,
            components: BTreeMap::new(),
        })
    }

    /// The screen of an honest configuration: `φ_I(t^k_{ij}) = w_i^k − w_j^k`.
    /// Requires pairwise distinct points so every component is nonzero.
    pub fn from_config(dim: usize, points: Vec<(u32, Vec<Q>)>) -> Result<Screen> {
        let mut w: BTreeMap<u32, Vec<Q>> = BTreeMap::new();
        for (l, v) in points {
            if v.len() != dim {
                return Err(Error::invalid_input(format!(
                    "point {l} has length {}, expected {dim}",
                    v.len()
                )));
            }
            if w.insert(l, v).is_some() {
                return Err(Error::invalid_input(format!("label {l} repeated")));
            }
        }
        let index_set = Subset::from_labels(w.keys().copied())?;
        if index_set.len() < 2 {
            return Screen::unit(dim, index_set);
        }
        let mut components = BTreeMap::new();
        for index in index_set.subsets_with_at_least(2) {
            let m = index.min().expect("nonempty");
            let mut values = Covector::new();
            for i in index.labels().filter(|i| *i != m) {
                for k in 0..dim {
                    let v = w[&i][k].clone() - w[&m][k].clone();
                    if !v.is_zero() {
                        values.insert((i, k), v);
                    }
                }
            }
            let canon = canonicalize(values).ok_or_else(|| {
                Error::degenerate(format!(
                    "configuration points coincide on {index}; screen component vanishes"
                ))
            })?;
            components.insert(index, canon);
        }
        Ok(Screen {
            dim,
            index_set,
            components,
        })
    }

    /// The screen induced by a sphere coordinate (a centered configuration):
    /// same formula as [`Screen::from_config`] on a single index set's worth
    /// of data, restricted to subsets of that index set.
    pub fn from_direction(dir: &DirectionClass) -> Result<Screen> {
        let points = dir
            .vectors()
            .iter()
            .map(|(l, v)| (*l, v.clone()))
            .collect::<Vec<_>>();
        Screen::from_config(dir.dim(), points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index_set(&self) -> Subset {
        self.index_set
    }

    pub fn component(&self, index: Subset) -> Option<&Covector> {
        self.components.get(&index)
    }

    pub fn components(&self) -> impl Iterator<Item = (Subset, &Covector)> {
        self.components.iter().map(|(s, c)| (*s, c))
    }

    /// The scalar `λ_{I,J}` with `φ_J ∘ F_{I⊆J} = λ_{I,J} φ_I`; errors if the
    /// restriction is not proportional to `φ_I` (an invalid family).
    pub fn lambda(&self, inner: Subset, outer: Subset) -> Result<Q> {
        if !inner.is_subset_of(outer) || inner.len() < 2 {
            return Err(Error::invalid_input(
                "lambda is defined for nested index subsets with at least two elements",
            ));
        }
        let phi_outer = self
            .components
            .get(&outer)
            .ok_or_else(|| Error::invalid_input(format!("{outer} is not an index subset")))?;
        let phi_inner = self
            .components
            .get(&inner)
            .ok_or_else(|| Error::invalid_input(format!("{inner} is not an index subset")))?;
        let pulled = pull_back(phi_outer, inner, self.dim, |i| i);
        // phi_inner is canonical, so its first stored entry has value one and
        // the factor can be read off directly.
        let pivot_key = phi_inner.keys().next().expect("canonical covector nonzero");
        let lambda = pulled.get(pivot_key).cloned().unwrap_or_else(Q::zero);
        let mut scaled = phi_inner.clone();
        for v in scaled.values_mut() {
            *v = v.clone() * lambda.clone();
        }
        let scaled: Covector = scaled.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if scaled != pulled {
            return Err(Error::degenerate(format!(
                "restriction of the covector at {outer} to {inner} is not proportional to the stored covector"
            )));
        }
        Ok(lambda)
    }

    /// Check every compatibility `φ_J ∘ F_{I⊆J} ∝ φ_I`; returns the first
    /// failing pair, or `None` when the screen is valid.
    pub fn validate(&self) -> Result<Option<(Subset, Subset)>> {
        for outer in self.index_set.subsets_with_at_least(2) {
            for inner in outer.subsets_with_at_least(2) {
                if inner != outer && self.lambda(inner, outer).is_err() {
                    return Ok(Some((inner, outer)));
                }
            }
        }
        Ok(None)
    }

    /// Relabel along a bijection `σ`: the new component at `I` is the old
    /// component at `σ⁻¹(I)` pulled back along `t_{ij} ↦ t_{σ⁻¹(i)σ⁻¹(j)}`.
    pub fn sigma_act(&self, sigma: &Surjection) -> Result<Screen> {
        if !sigma.is_bijective() || sigma.domain() != self.index_set {
            return Err(Error::invalid_input(
                "screen relabelling needs a bijection on the index set",
            ));
        }
        let inv = sigma.inverse()?;
        let new_index = sigma.codomain();
        let mut components = BTreeMap::new();
        for index in new_index.subsets_with_at_least(2) {
            let old_index = inv.image_of(index);
            let phi = self
                .components
                .get(&old_index)
                .ok_or_else(|| Error::internal("missing component under relabelling"))?;
            let pulled = pull_back(phi, index, self.dim, |i| inv.apply(i));
            let canon = canonicalize(pulled)
                .ok_or_else(|| Error::internal("relabelling produced a zero covector"))?;
            components.insert(index, canon);
        }
        Ok(Screen {
            dim: self.dim,
            index_set: new_index,
            components,
        })
    }

    /// The fiber vanishing conditions along `q`: for every straddling subset
    /// `K` (not inside one fiber) and every fiber meeting `K` in at least two
    /// labels, the restriction of `φ_K` to that intersection must vanish.
    /// These are exactly the constraints cutting out composite screens.
    pub fn vanishing_satisfied(&self, q: &Surjection) -> Result<bool> {
        if q.domain() != self.index_set {
            return Err(Error::invalid_input(
                "surjection domain must be the screen's index set",
            ));
        }
        for (index, phi) in &self.components {
            if q.image_of(*index).len() < 2 {
                continue; // inside one fiber: no condition
            }
            for (_, fiber) in q.fibers() {
                let meet = index.inter(fiber);
                if meet.len() >= 2 {
                    let pulled = pull_back(phi, meet, self.dim, |i| i);
                    if !pulled.is_empty() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Compose screens along `q`: subsets inside the fiber of `r` take the inner
/// screen's covector, all straddling subsets pull the outer covector back
/// along `q`.
pub fn screen_compose(q: &Surjection, outer: &Screen, inners: &[Screen]) -> Result<Screen> {
    if outer.index_set != q.codomain() {
        return Err(Error::invalid_input(format!(
            "outer screen indexed by {} but the surjection codomain is {}",
            outer.index_set,
            q.codomain()
        )));
    }
    let fibers = q.fibers();
    if inners.len() != fibers.len() {
        return Err(Error::invalid_input(format!(
            "expected {} inner screens, got {}",
            fibers.len(),
            inners.len()
        )));
    }
    let mut inner_by_target: BTreeMap<u32, &Screen> = BTreeMap::new();
    for ((r, fiber), inner) in fibers.iter().zip(inners) {
        if inner.dim != outer.dim {
            return Err(Error::invalid_input("dimension mismatch between screens"));
        }
        if inner.index_set != *fiber {
            return Err(Error::invalid_input(format!(
                "inner screen for target {r} indexed by {} but the fiber is {fiber}",
                inner.index_set
            )));
        }
        inner_by_target.insert(*r, inner);
    }
    let domain = q.domain();
    let mut components = BTreeMap::new();
    for index in domain.subsets_with_at_least(2) {
        let image = q.image_of(index);
        let covector = if image.len() == 1 {
            let r = image.min().expect("singleton");
            inner_by_target[&r]
                .components
                .get(&index)
                .cloned()
                .ok_or_else(|| Error::internal("inner screen missing a fiber subset"))?
        } else {
            let phi = outer
                .components
                .get(&image)
                .ok_or_else(|| Error::internal("outer screen missing an image subset"))?;
            let pulled = pull_back(phi, index, outer.dim, |i| q.apply(i));
            canonicalize(pulled).ok_or_else(|| {
                Error::degenerate(format!("composite covector at {index} vanished"))
            })?
        };
        components.insert(index, covector);
    }
    Ok(Screen {
        dim: outer.dim,
        index_set: domain,
        components,
    })
}

/// Reverse a composition along `q`.  Defined when the fiber vanishing
/// conditions hold; the outer screen is recovered through the minimal-label
/// fiber representatives, the inner screens by restriction.  For screens in
/// the image of [`screen_compose`] this is an exact inverse.
pub fn screen_decompose(q: &Surjection, screen: &Screen) -> Result<(Screen, Vec<Screen>)> {
    if q.domain() != screen.index_set {
        return Err(Error::invalid_input(
            "surjection domain must be the screen's index set",
        ));
    }
    if !screen.vanishing_satisfied(q)? {
        return Err(Error::degenerate(
            "fiber vanishing conditions fail; the screen does not decompose along this surjection",
        ));
    }
    let rep = |b: u32| -> u32 { q.fiber(b).min().expect("fiber nonempty") };
    // Outer screen on the codomain.
    let codomain = q.codomain();
    let outer = if codomain.len() < 2 {
        Screen::unit(screen.dim, codomain)?
    } else {
        let mut components = BTreeMap::new();
        for index in codomain.subsets_with_at_least(2) {
            let preimage = q.preimage_of(index);
            let rho = screen
                .components
                .get(&preimage)
                .ok_or_else(|| Error::internal("missing component at a fiber preimage"))?;
            let pulled = pull_back(rho, index, screen.dim, rep);
            let canon = canonicalize(pulled).ok_or_else(|| {
                Error::degenerate(format!(
                    "outer covector at {index} vanished; the screen is degenerate along this surjection"
                ))
            })?;
            components.insert(index, canon);
        }
        Screen {
            dim: screen.dim,
            index_set: codomain,
            components,
        }
    };
    // Inner screens by restriction to each fiber.
    let mut inners = Vec::new();
    for (_, fiber) in q.fibers() {
        if fiber.len() < 2 {
            inners.push(Screen::unit(screen.dim, fiber)?);
            continue;
        }
        let mut components = BTreeMap::new();
        for index in fiber.subsets_with_at_least(2) {
            let rho = screen
                .components
                .get(&index)
                .ok_or_else(|| Error::internal("missing component inside a fiber"))?;
            components.insert(index, rho.clone());
        }
        inners.push(Screen {
            dim: screen.dim,
            index_set: fiber,
            components,
        });
    }
    Ok((outer, inners))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{qi, qr};

    fn sub(labels: &[u32]) -> Subset {
        Subset::from_labels(labels.iter().copied()).unwrap()
    }

    fn line_screen(points: &[(u32, i64)]) -> Screen {
        Screen::from_config(
            1,
            points.iter().map(|(l, x)| (*l, vec![qi(*x)])).collect(),
        )
        .unwrap()
    }

    #[test]
    fn config_screen_components_and_lambdas() {
        let s = line_screen(&[(1, 0), (2, 1), (3, 3)]);
        assert_eq!(module_rank(1, sub(&[1, 2, 3])), 2);
        assert_eq!(
            s.component(sub(&[1, 2, 3])).unwrap(),
            &Covector::from([((2, 0), qi(1)), ((3, 0), qi(3))])
        );
        assert_eq!(
            s.component(sub(&[2, 3])).unwrap(),
            &Covector::from([((3, 0), qi(1))])
        );
        assert_eq!(s.lambda(sub(&[1, 2]), sub(&[1, 2, 3])).unwrap(), qi(1));
        // Restriction to {2,3}: value t_{3,2} = 3 - 1 = 2 against the
        // canonical unit covector.
        assert_eq!(s.lambda(sub(&[2, 3]), sub(&[1, 2, 3])).unwrap(), qi(2));
        assert_eq!(s.validate().unwrap(), None);
    }

    #[test]
    fn lambda_transitivity_on_configs() {
        let s = Screen::from_config(
            2,
            vec![
                (1, vec![qi(0), qi(0)]),
                (2, vec![qi(2), qi(1)]),
                (3, vec![qi(1), qi(5)]),
                (4, vec![qi(-3), qi(2)]),
            ],
        )
        .unwrap();
        let i = sub(&[1, 2]);
        let j = sub(&[1, 2, 4]);
        let k = sub(&[1, 2, 3, 4]);
        let lik = s.lambda(i, k).unwrap();
        let lij = s.lambda(i, j).unwrap();
        let ljk = s.lambda(j, k).unwrap();
        assert_eq!(lik, lij * ljk);
    }

    #[test]
    fn invalid_family_detected() {
        // Planar: component on {1,2} points along x, but the full component
        // points along y — restriction is not proportional.
        let mut components = BTreeMap::new();
        components.insert(sub(&[1, 2]), Covector::from([((2, 0), qi(1))]));
        components.insert(sub(&[1, 3]), Covector::from([((3, 0), qi(1))]));
        components.insert(sub(&[2, 3]), Covector::from([((3, 0), qi(1))]));
        components.insert(sub(&[1, 2, 3]), Covector::from([((2, 1), qi(1))]));
        let s = Screen::new(2, sub(&[1, 2, 3]), components).unwrap();
        assert_eq!(s.validate().unwrap(), Some((sub(&[1, 2]), sub(&[1, 2, 3]))));
    }

    #[test]
    fn line_families_on_three_labels_are_always_valid() {
        // All difference modules involved have rank one for subsets of size
        // two, so any nonzero covectors are compatible.
        let mut components = BTreeMap::new();
        components.insert(sub(&[1, 2]), Covector::from([((2, 0), qi(7))]));
        components.insert(sub(&[1, 3]), Covector::from([((3, 0), qi(-2))]));
        components.insert(sub(&[2, 3]), Covector::from([((3, 0), qr(1, 3))]));
        components.insert(
            sub(&[1, 2, 3]),
            Covector::from([((2, 0), qi(4)), ((3, 0), qi(-5))]),
        );
        let s = Screen::new(1, sub(&[1, 2, 3]), components).unwrap();
        assert_eq!(s.validate().unwrap(), None);
    }

    #[test]
    fn compose_decompose_round_trip() {
        let q = Surjection::parse("1,1,2").unwrap();
        let outer = line_screen(&[(1, 0), (2, 1)]);
        let inner1 = line_screen(&[(1, 0), (2, 5)]);
        let inner2 = Screen::unit(1, sub(&[3])).unwrap();
        let rho = screen_compose(&q, &outer, &[inner1.clone(), inner2.clone()]).unwrap();
        // Fiber subset keeps the inner covector; straddling subsets pull the
        // outer covector back; the full component kills the fiber direction.
        assert_eq!(
            rho.component(sub(&[1, 2])).unwrap(),
            inner1.component(sub(&[1, 2])).unwrap()
        );
        assert_eq!(
            rho.component(sub(&[1, 3])).unwrap(),
            &Covector::from([((3, 0), qi(1))])
        );
        assert_eq!(
            rho.component(sub(&[1, 2, 3])).unwrap(),
            &Covector::from([((3, 0), qi(1))])
        );
        assert!(rho.vanishing_satisfied(&q).unwrap());
        let (outer2, inners2) = screen_decompose(&q, &rho).unwrap();
        assert_eq!(outer2, outer);
        assert_eq!(inners2, vec![inner1, inner2]);
    }

    #[test]
    fn vanishing_fails_for_generic_screens() {
        let q = Surjection::parse("1,1,2").unwrap();
        let s = line_screen(&[(1, 0), (2, 1), (3, 3)]);
        // A generic configuration does not lie on the boundary stratum.
        assert!(!s.vanishing_satisfied(&q).unwrap());
        assert!(screen_decompose(&q, &s).is_err());
    }

    #[test]
    fn sigma_action_matches_relabelled_configs() {
        // sigma: 1->2, 2->3, 3->1.
        let sigma = Surjection::new([(1, 2), (2, 3), (3, 1)]).unwrap();
        let s = line_screen(&[(1, 0), (2, 1), (3, 3)]);
        let acted = s.sigma_act(&sigma).unwrap();
        // Relabelled configuration: new label sigma(i) carries w_i.
        let expected = line_screen(&[(2, 0), (3, 1), (1, 3)]);
        assert_eq!(acted, expected);
    }
}
