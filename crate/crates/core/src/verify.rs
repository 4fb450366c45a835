//! Verification campaigns shared by the command line and the test suites.
//!
//! Every campaign is deterministic in its arguments: a fixed seed produces
//! the same sampled instances, the same check order, and byte-identical
//! reports.  A campaign returns [`CaseReport`]s — counted checks plus witness
//! strings for any failures — and never panics on a failed identity; failures
//! are recorded so callers can render them.

use crate::direction::{direction_canonical, g_map};
use crate::kn::{self, CartesianCase, KnReport, SplitCase};
use crate::logdf::{
    associativity_routes, compose_morphisms, gamma, sigma_log, strict_unit_search,
    structure_of, structure_vlog, tensor_morphisms, unit_vlog, unit_vlog_for, LogMorphism,
    MorphRow, Variant,
};
use crate::nested::{
    enumerate_nested_collections, enumerate_stable_trees, is_nested, nested_to_tree,
    strata_closure_leq, tree_to_nested, NestedCollection, DEFAULT_MAX_ARITY,
};
use crate::points::{compose, framed_compose, FMPoint, FramedPoint};
use crate::ratio::Q;
use crate::sample::Sampler;
use crate::screen::{canonicalize, screen_compose, screen_decompose, Covector, Screen};
use crate::sets::{Subset, Surjection};
use crate::Result;
use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Cap on stored failure witnesses per case; the count of suppressed ones is
/// appended so reports stay bounded but still deterministic.
const FAILURE_CAP: usize = 6;

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CaseReport {
    pub name: String,
    pub checked: u64,
    pub max_error: f64,
    failures: Vec<String>,
    suppressed: u64,
}

impl CaseReport {
    pub fn new(name: impl Into<String>) -> CaseReport {
        CaseReport {
            name: name.into(),
            checked: 0,
            max_error: 0.0,
            failures: Vec::new(),
            suppressed: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.suppressed == 0
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = self.failures.clone();
        if self.suppressed > 0 {
            out.push(format!("... and {} more failures", self.suppressed));
        }
        out
    }

    fn push_failure(&mut self, witness: String) {
        if self.failures.len() < FAILURE_CAP {
            self.failures.push(witness);
        } else {
            self.suppressed += 1;
        }
    }

    fn require(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.push_failure(witness());
        }
    }

    /// Runs a fallible step; an error is itself a failed check.
    fn guard<T>(&mut self, what: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checked += 1;
                self.push_failure(format!("{what}: {e}"));
                None
            }
        }
    }

    fn from_kn(r: KnReport) -> CaseReport {
        let mut out = CaseReport::new(format!("kn/{}", r.name));
        out.checked = r.checked;
        out.max_error = r.max_error;
        for f in r.failures {
            out.push_failure(f);
        }
        out
    }

    pub fn summary_line(&self) -> String {
        if self.passed() {
            format!("PASS {} ({} checks)", self.name, self.checked)
        } else {
            format!(
                "FAIL {} ({} checks, {} failures)",
                self.name,
                self.checked,
                self.failures.len() as u64 + self.suppressed
            )
        }
    }
}

fn surj_str(q: &Surjection) -> String {
    let parts: Vec<String> = q
        .domain()
        .labels()
        .map(|l| format!("{}>{}", l, q.apply(l)))
        .collect();
    parts.join(",")
}

fn pos_of(set: Subset, label: u32) -> usize {
    set.labels().position(|l| l == label).expect("label in set")
}

// ---------------------------------------------------------------------------
// Operad axioms for configuration-space points
// ---------------------------------------------------------------------------

struct Stack {
    q: Surjection,
    p: Surjection,
    x: FMPoint,
    ys: Vec<FMPoint>,
    zs: Vec<FMPoint>,
}

/// A two-level composition instance `[m] -q-> [k] -p-> [j]` with points on
/// every level.
fn sample_stack(s: &mut Sampler, max_n: usize, dim: usize) -> Stack {
    let m = s.gen_range(2, max_n);
    let dom = Subset::range(m as u32).expect("small range");
    let q = s.surjection(dom);
    let p = s.surjection(q.codomain());
    let x = s.fm_point(p.codomain(), dim);
    let ys = p
        .fibers()
        .into_iter()
        .map(|(_, f)| s.fm_point(f, dim))
        .collect();
    let zs = q
        .fibers()
        .into_iter()
        .map(|(_, f)| s.fm_point(f, dim))
        .collect();
    Stack { q, p, x, ys, zs }
}

/// Both ways of evaluating the stacked composition; used by the axioms and
/// the coordinate-law campaigns.
fn stacked_routes(stack: &Stack) -> Result<(FMPoint, FMPoint, FMPoint)> {
    let Stack { q, p, x, ys, zs } = stack;
    let w = compose(p, x, ys)?;
    let left = compose(q, &w, zs)?;

    let pq = p.compose(q)?;
    let zmap: BTreeMap<u32, &FMPoint> = q
        .fibers()
        .into_iter()
        .map(|(r, _)| r)
        .zip(zs.iter())
        .collect();
    let mut inners = Vec::new();
    for (s_lab, s_fiber) in p.fibers() {
        let pre = q.preimage_of(s_fiber);
        let q_s = q.restrict(pre)?;
        let zs_s: Vec<FMPoint> = q_s
            .fibers()
            .into_iter()
            .map(|(t, _)| (*zmap[&t]).clone())
            .collect();
        inners.push(compose(&q_s, &ys[pos_of(p.codomain(), s_lab)], &zs_s)?);
    }
    let right = compose(&pq, x, &inners)?;
    Ok((w, left, right))
}

/// Operad axioms for points: associativity of stacked composition, both unit
/// laws, relabelling equivariance on either side, and compatibility with
/// exact rotations.
pub fn verify_fm_axioms(dim: usize, max_n: usize, trials: usize, seed: u64) -> CaseReport {
    let mut rep = CaseReport::new(format!("fm/axioms/D{dim}"));
    for t in 0..trials {
        let mut s = Sampler::derive(seed, &format!("fm/D{dim}/t{t}"));
        let stack = sample_stack(&mut s, max_n, dim);
        let Some((w, left, right)) = rep.guard("stacked composition", stacked_routes(&stack))
        else {
            continue;
        };
        let q = &stack.q;

        rep.require(
            left.point_eq(&right).unwrap_or(false),
            || format!("trial {t}: associativity failed for q={} p={}", surj_str(q), surj_str(&stack.p)),
        );

        // Unit laws on the outer point.
        let x = &stack.x;
        let id_q = Surjection::identity(x.leaf_set());
        let units: Vec<FMPoint> = x
            .leaf_set()
            .labels()
            .map(|l| FMPoint::unit(dim, l).expect("valid label"))
            .collect();
        if let Some(c) = rep.guard("unit insertion", compose(&id_q, x, &units)) {
            rep.require(c.point_eq(x).unwrap_or(false), || {
                format!("trial {t}: inserting units changed the point")
            });
        }
        let collapse = Surjection::new(x.leaf_set().labels().map(|l| (l, 1)))
            .expect("collapse is a valid surjection");
        let unit1 = FMPoint::unit(dim, 1).expect("label 1");
        if let Some(c) = rep.guard("unit outer", compose(&collapse, &unit1, &[x.clone()])) {
            rep.require(c.point_eq(x).unwrap_or(false), || {
                format!("trial {t}: composing into the unit changed the point")
            });
        }

        // Inner relabelling equivariance on the (q, w, zs) level.
        let sigma = s.permutation(q.domain());
        let sigma_inv = sigma.inverse().expect("permutation");
        let equi = (|| -> Result<bool> {
            let qs = q.compose(&sigma)?;
            let mut zs2 = Vec::new();
            for (r, fiber) in q.fibers() {
                zs2.push(stack.zs[pos_of(q.codomain(), r)].relabel(&sigma_inv.restrict(fiber)?)?);
            }
            // Fibers of q.sigma are listed in ascending target order, same as zs2.
            let lhs = compose(&qs, &w, &zs2)?;
            let rhs = left.relabel(&sigma_inv)?;
            lhs.point_eq(&rhs)
        })();
        match equi {
            Ok(ok) => rep.require(ok, || {
                format!("trial {t}: inner relabelling equivariance failed for q={}", surj_str(q))
            }),
            Err(e) => rep.require(false, || format!("trial {t}: inner equivariance errored: {e}")),
        }

        // Outer relabelling equivariance.
        let tau = s.permutation(q.codomain());
        let tau_inv = tau.inverse().expect("permutation");
        let equi_out = (|| -> Result<bool> {
            let tq = tau.compose(q)?;
            let zmap: BTreeMap<u32, &FMPoint> = q
                .fibers()
                .into_iter()
                .map(|(r, _)| r)
                .zip(stack.zs.iter())
                .collect();
            let zs2: Vec<FMPoint> = tq
                .codomain()
                .labels()
                .map(|r| (*zmap[&tau_inv.apply(r)]).clone())
                .collect();
            let lhs = compose(&tq, &w.relabel(&tau)?, &zs2)?;
            lhs.point_eq(&left)
        })();
        match equi_out {
            Ok(ok) => rep.require(ok, || {
                format!("trial {t}: outer relabelling equivariance failed for q={}", surj_str(q))
            }),
            Err(e) => rep.require(false, || format!("trial {t}: outer equivariance errored: {e}")),
        }

        // Rotation compatibility.
        let r = s.rotation(dim);
        let rot = (|| -> Result<bool> {
            let zs_r: Vec<FMPoint> = stack
                .zs
                .iter()
                .map(|z| z.rotate(&r))
                .collect::<Result<_>>()?;
            let lhs = compose(q, &w.rotate(&r)?, &zs_r)?;
            lhs.point_eq(&left.rotate(&r)?)
        })();
        match rot {
            Ok(ok) => rep.require(ok, || format!("trial {t}: rotation compatibility failed")),
            Err(e) => rep.require(false, || format!("trial {t}: rotation check errored: {e}")),
        }
    }
    rep
}

/// The piecewise law for the coordinates of a composed point: inside one
/// fiber the inner point's coordinates survive unchanged; across fibers the
/// coordinates are the degeneration image of the outer coordinates.  Runs on
/// the same sampled instances as [`verify_fm_axioms`].
pub fn verify_fm_coordinates(dim: usize, max_n: usize, trials: usize, seed: u64) -> CaseReport {
    let mut rep = CaseReport::new(format!("fm/coordinates/D{dim}"));
    for t in 0..trials {
        let mut s = Sampler::derive(seed, &format!("fm/D{dim}/t{t}"));
        let stack = sample_stack(&mut s, max_n, dim);
        let q = &stack.q;
        let Some(w) = rep.guard("outer composition", compose(&stack.p, &stack.x, &stack.ys))
        else {
            continue;
        };
        let Some(composite) = rep.guard("composition", compose(q, &w, &stack.zs)) else {
            continue;
        };
        for index in q.domain().subsets_with_at_least(2) {
            let image = q.image_of(index);
            let law = (|| -> Result<bool> {
                let actual = composite.coordinates(index)?;
                if image.len() == 1 {
                    let r = image.min().expect("nonempty");
                    let expected = stack.zs[pos_of(q.codomain(), r)].coordinates(index)?;
                    Ok(actual == expected)
                } else {
                    let expected = g_map(&q.restrict(index)?, &w.coordinates(image)?)?;
                    Ok(actual == expected)
                }
            })();
            match law {
                Ok(ok) => rep.require(ok, || {
                    format!(
                        "trial {t}: coordinate law failed at {} for q={}",
                        index.key(),
                        surj_str(q)
                    )
                }),
                Err(e) => rep.require(false, || {
                    format!("trial {t}: coordinate law errored at {}: {e}", index.key())
                }),
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Framed axioms
// ---------------------------------------------------------------------------

/// Axioms of the circle-framed semidirect composition: associativity of the
/// frame-twisted composition, unit laws with trivial frames, inner
/// relabelling equivariance, and global circle equivariance.
pub fn verify_framed_axioms(half_dim: usize, trials: usize, seed: u64) -> CaseReport {
    let mut rep = CaseReport::new(format!("framed/axioms/d{half_dim}"));
    let dim = 2 * half_dim;
    for t in 0..trials {
        let mut s = Sampler::derive(seed, &format!("framed/d{half_dim}/t{t}"));
        let m = s.gen_range(2, 4);
        let dom = Subset::range(m as u32).expect("small range");
        let q = s.surjection(dom);
        let p = s.surjection(q.codomain());
        let x = s.framed_point(p.codomain(), half_dim);
        let ys: Vec<FramedPoint> = p
            .fibers()
            .into_iter()
            .map(|(_, f)| s.framed_point(f, half_dim))
            .collect();
        let zs: Vec<FramedPoint> = q
            .fibers()
            .into_iter()
            .map(|(_, f)| s.framed_point(f, half_dim))
            .collect();

        // Associativity through both routes.
        let assoc = (|| -> Result<(FramedPoint, FramedPoint, FramedPoint)> {
            let w = framed_compose(&p, &x, &ys)?;
            let left = framed_compose(&q, &w, &zs)?;
            let pq = p.compose(&q)?;
            let zmap: BTreeMap<u32, &FramedPoint> = q
                .fibers()
                .into_iter()
                .map(|(r, _)| r)
                .zip(zs.iter())
                .collect();
            let mut inners = Vec::new();
            for (s_lab, s_fiber) in p.fibers() {
                let pre = q.preimage_of(s_fiber);
                let q_s = q.restrict(pre)?;
                let zs_s: Vec<FramedPoint> = q_s
                    .fibers()
                    .into_iter()
                    .map(|(r, _)| (*zmap[&r]).clone())
                    .collect();
                inners.push(framed_compose(&q_s, &ys[pos_of(p.codomain(), s_lab)], &zs_s)?);
            }
            let right = framed_compose(&pq, &x, &inners)?;
            Ok((w, left, right))
        })();
        let Some((w, left, _)) = (match assoc {
            Ok((w, left, right)) => {
                rep.require(left.framed_eq(&right).unwrap_or(false), || {
                    format!("trial {t}: framed associativity failed for q={} p={}", surj_str(&q), surj_str(&p))
                });
                Some((w, left, ()))
            }
            Err(e) => {
                rep.require(false, || format!("trial {t}: framed associativity errored: {e}"));
                None
            }
        }) else {
            continue;
        };

        // Unit laws: trivial frames on each side.
        let one = crate::circle::CirclePoint::one();
        let unit_law = (|| -> Result<(bool, bool)> {
            let id_q = Surjection::identity(x.leaf_set());
            let units: Vec<FramedPoint> = x
                .leaf_set()
                .labels()
                .map(|l| FramedPoint::unit(dim, l, one.clone()))
                .collect::<Result<_>>()?;
            let a = framed_compose(&id_q, &x, &units)?.framed_eq(&x)?;
            let collapse = Surjection::new(x.leaf_set().labels().map(|l| (l, 1)))?;
            let u1 = FramedPoint::unit(dim, 1, one.clone())?;
            let b = framed_compose(&collapse, &u1, &[x.clone()])?.framed_eq(&x)?;
            Ok((a, b))
        })();
        match unit_law {
            Ok((a, b)) => {
                rep.require(a, || format!("trial {t}: framed unit insertion failed"));
                rep.require(b, || format!("trial {t}: framed outer unit failed"));
            }
            Err(e) => rep.require(false, || format!("trial {t}: framed unit laws errored: {e}")),
        }

        // Global circle equivariance: rotating the outer point twists into
        // rotating the whole composite.
        let theta = s.circle_point();
        let circ = (|| -> Result<bool> {
            let lhs = framed_compose(&q, &w.rotate(&theta)?, &zs)?;
            let rhs = framed_compose(&q, &w, &zs)?.rotate(&theta)?;
            lhs.framed_eq(&rhs)
        })();
        match circ {
            Ok(ok) => rep.require(ok, || format!("trial {t}: circle equivariance failed")),
            Err(e) => rep.require(false, || format!("trial {t}: circle equivariance errored: {e}")),
        }

        // Inner relabelling equivariance.
        let sigma = s.permutation(q.domain());
        let sigma_inv = sigma.inverse().expect("permutation");
        let equi = (|| -> Result<bool> {
            let qs = q.compose(&sigma)?;
            let mut zs2 = Vec::new();
            for (r, fiber) in q.fibers() {
                zs2.push(zs[pos_of(q.codomain(), r)].relabel(&sigma_inv.restrict(fiber)?)?);
            }
            let lhs = framed_compose(&qs, &w, &zs2)?;
            let rhs = left.relabel(&sigma_inv)?;
            lhs.framed_eq(&rhs)
        })();
        match equi {
            Ok(ok) => rep.require(ok, || format!("trial {t}: framed relabelling equivariance failed")),
            Err(e) => rep.require(false, || format!("trial {t}: framed equivariance errored: {e}")),
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Strata combinatorics
// ---------------------------------------------------------------------------

/// Independent count of stable trees by the partition recurrence
/// `a(n) = sum over set partitions with at least two blocks of prod a(|B|)`.
fn tree_count_recurrence(n: usize) -> u64 {
    let mut a = vec![0u64; n + 1];
    if n >= 1 {
        a[1] = 1;
    }
    for s in 2..=n {
        let dom = Subset::range(s as u32).expect("small range");
        let mut total = 0u64;
        for part in Surjection::enumerate_partition_representatives(dom) {
            if part.codomain().len() < 2 {
                continue;
            }
            let mut prod = 1u64;
            for (_, fiber) in part.fibers() {
                prod *= a[fiber.len()];
            }
            total += prod;
        }
        a[s] = total;
    }
    a[n]
}

/// Brute force: every family of proper subsets of size at least two that is
/// pairwise nested-or-disjoint, found by scanning all subsets of the
/// candidate list.
fn brute_force_collections(n: u32) -> Vec<Vec<Subset>> {
    let ambient = Subset::range(n).expect("small range");
    let candidates: Vec<Subset> = ambient
        .subsets_with_at_least(2)
        .into_iter()
        .filter(|s| *s != ambient)
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << candidates.len()) {
        let members: Vec<Subset> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, s)| *s)
            .collect();
        if is_nested(&members) {
            out.push(members);
        }
    }
    out
}

/// Strata combinatorics: the enumeration counts, an independent brute-force
/// oracle for small arities and the partition recurrence beyond, the
/// tree/collection bijection, and the closure partial order.
pub fn verify_strata(max_bijection_n: u32) -> Vec<CaseReport> {
    let mut counts = CaseReport::new("strata/counts");
    let expected = [1u64, 1, 4, 26, 236, 2752];
    for n in 1..=max_bijection_n.min(6) {
        let ambient = Subset::range(n).expect("small range");
        match enumerate_nested_collections(ambient, DEFAULT_MAX_ARITY) {
            Ok(cols) => {
                counts.require(cols.len() as u64 == expected[(n - 1) as usize], || {
                    format!("n={n}: enumerated {} collections, expected {}", cols.len(), expected[(n - 1) as usize])
                });
                let rec = tree_count_recurrence(n as usize);
                counts.require(cols.len() as u64 == rec, || {
                    format!("n={n}: enumeration {} disagrees with recurrence {rec}", cols.len())
                });
            }
            Err(e) => counts.require(false, || format!("n={n}: enumeration errored: {e}")),
        }
    }

    let mut brute = CaseReport::new("strata/bruteforce");
    for n in 2..=max_bijection_n.min(4) {
        let ambient = Subset::range(n).expect("small range");
        let mut forced: Vec<Vec<Subset>> = brute_force_collections(n);
        forced.sort();
        match enumerate_nested_collections(ambient, DEFAULT_MAX_ARITY) {
            Ok(cols) => {
                let mut listed: Vec<Vec<Subset>> =
                    cols.iter().map(|c| c.members().to_vec()).collect();
                listed.sort();
                brute.require(listed == forced, || {
                    format!("n={n}: enumerated families differ from the brute-force scan")
                });
            }
            Err(e) => brute.require(false, || format!("n={n}: enumeration errored: {e}")),
        }
    }

    let mut bij = CaseReport::new("strata/bijection");
    for n in 1..=max_bijection_n {
        let ambient = Subset::range(n).expect("small range");
        let cols = match enumerate_nested_collections(ambient, DEFAULT_MAX_ARITY) {
            Ok(c) => c,
            Err(e) => {
                bij.require(false, || format!("n={n}: enumeration errored: {e}"));
                continue;
            }
        };
        match enumerate_stable_trees(n, DEFAULT_MAX_ARITY) {
            Ok(trees) => bij.require(trees.len() == cols.len(), || {
                format!("n={n}: {} trees vs {} collections", trees.len(), cols.len())
            }),
            Err(e) => bij.require(false, || format!("n={n}: tree enumeration errored: {e}")),
        }
        for c in &cols {
            let round = (|| -> Result<bool> {
                let t = nested_to_tree(c)?;
                t.validate()?;
                Ok(&tree_to_nested(&t)? == c)
            })();
            match round {
                Ok(ok) => bij.require(ok, || {
                    format!("n={n}: bijection round trip failed for {:?}", c.members())
                }),
                Err(e) => bij.require(false, || format!("n={n}: bijection errored: {e}")),
            }
        }
    }

    let mut poset = CaseReport::new("strata/poset");
    let ambient = Subset::range(4).expect("small range");
    if let Ok(cols) = enumerate_nested_collections(ambient, DEFAULT_MAX_ARITY) {
        let leq = |a: &NestedCollection, b: &NestedCollection| {
            strata_closure_leq(a, b).unwrap_or(false)
        };
        for a in &cols {
            poset.require(leq(a, a), || format!("closure order is not reflexive at {:?}", a.members()));
        }
        for a in &cols {
            for b in &cols {
                if leq(a, b) && leq(b, a) {
                    poset.require(a == b, || {
                        format!("antisymmetry fails for {:?} and {:?}", a.members(), b.members())
                    });
                }
                for c in &cols {
                    if leq(a, b) && leq(b, c) {
                        poset.require(leq(a, c), || {
                            format!(
                                "transitivity fails through {:?}, {:?}, {:?}",
                                a.members(),
                                b.members(),
                                c.members()
                            )
                        });
                    }
                }
            }
        }
    } else {
        poset.require(false, || "enumeration for the poset checks errored".to_string());
    }

    vec![counts, brute, bij, poset]
}

// ---------------------------------------------------------------------------
// Screens
// ---------------------------------------------------------------------------

/// Screen calculus: composition followed by decomposition and vice versa are
/// exact inverses; composed screens satisfy every vanishing constraint; the
/// compatibility scalars are transitive; the symmetric-group action matches
/// relabelled configurations.
pub fn verify_screens(trials: usize, max_n: usize, max_dim: usize, seed: u64) -> Vec<CaseReport> {
    let mut round = CaseReport::new("screens/roundtrip");
    let mut vanish = CaseReport::new("screens/vanishing");
    let mut lambda = CaseReport::new("screens/lambda");
    let mut sigma_case = CaseReport::new("screens/sigma");

    for t in 0..trials {
        let mut s = Sampler::derive(seed, &format!("screens/t{t}"));
        let n = s.gen_range(2, max_n);
        let d = s.gen_range(1, max_dim);
        let dom = Subset::range(n as u32).expect("small range");
        let q = s.surjection(dom);
        let outer = s.screen(q.codomain(), d);
        let inners: Vec<Screen> = q
            .fibers()
            .into_iter()
            .map(|(_, f)| s.screen(f, d))
            .collect();

        let run = (|| -> Result<(Screen, bool, bool, bool)> {
            let composed = screen_compose(&q, &outer, &inners)?;
            let valid = composed.validate()?.is_none();
            let vanishing = composed.vanishing_satisfied(&q)?;
            let (outer2, inners2) = screen_decompose(&q, &composed)?;
            let outer_eq = outer2.components().collect::<Vec<_>>()
                == outer.components().collect::<Vec<_>>();
            let inners_eq = inners2.len() == inners.len()
                && inners2.iter().zip(&inners).all(|(a, b)| {
                    a.components().collect::<Vec<_>>() == b.components().collect::<Vec<_>>()
                });
            let recomposed = screen_compose(&q, &outer2, &inners2)?;
            let recomposed_eq = recomposed.components().collect::<Vec<_>>()
                == composed.components().collect::<Vec<_>>();
            Ok((composed, valid && vanishing, outer_eq && inners_eq, recomposed_eq))
        })();
        match run {
            Ok((composed, vanish_ok, decomp_ok, recomp_ok)) => {
                vanish.require(vanish_ok, || {
                    format!("trial {t}: composed screen invalid or fails vanishing for q={}", surj_str(&q))
                });
                round.require(decomp_ok, || {
                    format!("trial {t}: decompose after compose is not the identity for q={}", surj_str(&q))
                });
                round.require(recomp_ok, || {
                    format!("trial {t}: compose after decompose is not the identity for q={}", surj_str(&q))
                });

                // Compatibility scalars multiply along chains of nested subsets.
                let index = composed.index_set();
                if index.len() >= 3 {
                    let chain = (|| -> Result<bool> {
                        for mid in index.subsets_with_at_least(2) {
                            if mid == index {
                                continue;
                            }
                            for inner in mid.subsets_with_at_least(2) {
                                if inner == mid {
                                    continue;
                                }
                                let l_im = composed.lambda(inner, mid)?;
                                let l_mo = composed.lambda(mid, index)?;
                                let l_io = composed.lambda(inner, index)?;
                                if l_io != l_im * l_mo {
                                    return Ok(false);
                                }
                            }
                        }
                        Ok(true)
                    })();
                    match chain {
                        Ok(ok) => lambda.require(ok, || {
                            format!("trial {t}: compatibility scalars are not transitive")
                        }),
                        Err(e) => lambda.require(false, || format!("trial {t}: lambda chain errored: {e}")),
                    }
                }
            }
            Err(e) => round.require(false, || format!("trial {t}: screen round trip errored: {e}")),
        }

        // Symmetric-group action versus relabelled configurations.
        let act = (|| -> Result<bool> {
            let set = Subset::range(s.gen_range(2, max_n) as u32)?;
            let config = s.distinct_config(set, d);
            let screen = Screen::from_config(d, config.clone())?;
            let sigma = s.permutation(set);
            let relabelled: Vec<(u32, Vec<Q>)> = config
                .iter()
                .map(|(l, v)| (sigma.apply(*l), v.clone()))
                .collect();
            let direct = Screen::from_config(d, relabelled)?;
            let acted = screen.sigma_act(&sigma)?;
            Ok(acted.components().collect::<Vec<_>>() == direct.components().collect::<Vec<_>>())
        })();
        match act {
            Ok(ok) => sigma_case.require(ok, || {
                format!("trial {t}: group action disagrees with relabelled configuration")
            }),
            Err(e) => sigma_case.require(false, || format!("trial {t}: group action errored: {e}")),
        }
    }
    vec![lambda, round, sigma_case, vanish]
}

// ---------------------------------------------------------------------------
// Divisor-lattice morphism sweeps
// ---------------------------------------------------------------------------

fn all_labeled_surjections(m: u32) -> Vec<Surjection> {
    let dom = Subset::range(m).expect("small range");
    let mut out = Vec::new();
    for n in 1..=m {
        out.extend(Surjection::enumerate(dom, Subset::range(n).expect("small range")));
    }
    out
}

fn all_permutations(set: Subset) -> Vec<Surjection> {
    let labels: Vec<u32> = set.labels().collect();
    let mut out = Vec::new();
    let mut images: Vec<u32> = Vec::with_capacity(labels.len());
    let mut used = vec![false; labels.len()];
    fn rec(
        labels: &[u32],
        used: &mut Vec<bool>,
        images: &mut Vec<u32>,
        out: &mut Vec<Surjection>,
    ) {
        if images.len() == labels.len() {
            out.push(
                Surjection::new(labels.iter().copied().zip(images.iter().copied()))
                    .expect("bijection"),
            );
            return;
        }
        for i in 0..labels.len() {
            if !used[i] {
                used[i] = true;
                images.push(labels[i]);
                rec(labels, used, images, out);
                images.pop();
                used[i] = false;
            }
        }
    }
    rec(&labels, &mut used, &mut images, &mut out);
    out
}

/// Every composition morphism up to the given arity is legal in its variant:
/// strict divisorial legality for the log structures, virtual legality for
/// the virtual ones (strictness fails there only on the pulled-back zero
/// sections, which is the point of the virtual calculus).
pub fn verify_logdf_legality(max_arity: u32, variant: Variant) -> CaseReport {
    let mut rep = CaseReport::new(format!("logdf/legality/{}", variant.name()));
    for m in 1..=max_arity {
        for q in all_labeled_surjections(m) {
            match gamma(&q, variant) {
                Ok(g) => {
                    let witness = match variant {
                        Variant::Log => g.legality_df(),
                        Variant::VLog => g.legality_virtual(),
                    };
                    rep.require(witness.is_none(), || {
                        format!("q={}: illegal composition morphism: {:?}", surj_str(&q), witness)
                    });
                }
                Err(e) => rep.require(false, || format!("q={}: gamma errored: {e}", surj_str(&q))),
            }
        }
    }
    rep
}

/// Associativity of the composition morphisms as exact integer-matrix
/// identities.  All labeled stacked pairs are checked through arity
/// `labeled_max`; beyond that, one representative per set partition is
/// checked against every outer surjection, which covers all labeled pairs at
/// that scale because relabelling equivariance is verified separately.
pub fn verify_logdf_associativity(max_arity: u32, labeled_max: u32, variant: Variant) -> CaseReport {
    let mut rep = CaseReport::new(format!("logdf/associativity/{}", variant.name()));
    for m in 1..=max_arity {
        let qs = if m <= labeled_max {
            all_labeled_surjections(m)
        } else {
            Surjection::enumerate_partition_representatives(Subset::range(m).expect("small range"))
        };
        for q in qs {
            let k = q.codomain();
            for j in 1..=k.len() as u32 {
                for p in Surjection::enumerate(k, Subset::range(j).expect("small range")) {
                    match associativity_routes(&p, &q, variant) {
                        Ok((a, b)) => rep.require(a == b, || {
                            format!(
                                "routes differ for q={} p={}",
                                surj_str(&q),
                                surj_str(&p)
                            )
                        }),
                        Err(e) => rep.require(false, || {
                            format!("routes errored for q={} p={}: {e}", surj_str(&q), surj_str(&p))
                        }),
                    }
                }
            }
        }
    }
    rep
}

/// Relabelling equivariance of the composition morphisms: composing with the
/// outer relabelling morphism and permuting the inner factors reproduces the
/// morphism of the relabelled surjection, for every partition representative
/// and every permutation of its codomain.
pub fn verify_logdf_equivariance(max_arity: u32, variant: Variant) -> CaseReport {
    let mut rep = CaseReport::new(format!("logdf/equivariance/{}", variant.name()));
    for m in 1..=max_arity {
        let dom = Subset::range(m).expect("small range");
        for q in Surjection::enumerate_partition_representatives(dom) {
            for sigma in all_permutations(q.codomain()) {
                let check = (|| -> Result<bool> {
                    let sq = sigma.compose(&q)?;
                    let lhs = gamma(&sq, variant)?.canonical_source_sort();
                    let gq = gamma(&q, variant)?;
                    let outer = sigma_log(&sigma, variant)?;
                    let mut parts: Vec<(u32, &LogMorphism)> = vec![(0, &outer)];
                    let ids: Vec<(u32, LogMorphism)> = q
                        .fibers()
                        .into_iter()
                        .map(|(r, fiber)| {
                            Ok((r, LogMorphism::identity(&structure_of(variant, fiber)?)))
                        })
                        .collect::<Result<_>>()?;
                    for (r, mmor) in &ids {
                        parts.push((*r, mmor));
                    }
                    let block = tensor_morphisms(&parts)?;
                    let composed = compose_morphisms(&gq, &block)?;
                    let mut path_map = BTreeMap::from([(vec![0u32], vec![0u32])]);
                    for (r, _) in q.fibers() {
                        path_map.insert(vec![r], vec![sigma.apply(r)]);
                    }
                    let rhs = composed.relabel_source_paths(&path_map)?.canonical_source_sort();
                    Ok(lhs == rhs)
                })();
                match check {
                    Ok(ok) => rep.require(ok, || {
                        format!("equivariance failed for q={} sigma={}", surj_str(&q), surj_str(&sigma))
                    }),
                    Err(e) => rep.require(false, || {
                        format!("equivariance errored for q={} sigma={}: {e}", surj_str(&q), surj_str(&sigma))
                    }),
                }
            }
        }
    }
    rep
}

/// Both unit axioms of the virtual calculus, at every arity up to the bound:
/// inserting the virtual unit in every inner slot of the identity
/// composition, or composing into the one-point outer space, reproduces the
/// identity morphism.  Also checks that the virtual unit itself is virtually
/// legal but not strictly legal.
pub fn verify_logdf_units(max_arity: u32) -> CaseReport {
    let mut rep = CaseReport::new("logdf/units");

    let u = unit_vlog();
    rep.require(u.legality_df().is_some(), || {
        "the virtual unit should fail strict legality".to_string()
    });
    rep.require(u.legality_virtual().is_none(), || {
        "the virtual unit should be virtually legal".to_string()
    });

    for n in 1..=max_arity {
        let set = Subset::range(n).expect("small range");
        let right = (|| -> Result<bool> {
            let q = Surjection::identity(set);
            let g = gamma(&q, Variant::VLog)?;
            let id = LogMorphism::identity(&structure_vlog(set)?);
            let units: Vec<LogMorphism> =
                set.labels().map(unit_vlog_for).collect::<Result<_>>()?;
            let mut parts: Vec<(u32, &LogMorphism)> = vec![(0, &id)];
            for (l, um) in set.labels().zip(&units) {
                parts.push((l, um));
            }
            let insert = tensor_morphisms(&parts)?;
            let composite = compose_morphisms(&g, &insert)?;
            let translated =
                composite.relabel_source_paths(&BTreeMap::from([(vec![0], vec![])]))?;
            Ok(translated.eq_as_matrices(&id))
        })();
        match right {
            Ok(ok) => rep.require(ok, || format!("n={n}: unit insertion law failed")),
            Err(e) => rep.require(false, || format!("n={n}: unit insertion errored: {e}")),
        }

        let left = (|| -> Result<bool> {
            let collapse = Surjection::new(set.labels().map(|l| (l, 1)))?;
            let g = gamma(&collapse, Variant::VLog)?;
            let id = LogMorphism::identity(&structure_vlog(set)?);
            let unit = unit_vlog();
            let insert = tensor_morphisms(&[(0, &unit), (1, &id)])?;
            let composite = compose_morphisms(&g, &insert)?;
            let translated =
                composite.relabel_source_paths(&BTreeMap::from([(vec![1], vec![])]))?;
            Ok(translated.eq_as_matrices(&id))
        })();
        match left {
            Ok(ok) => rep.require(ok, || format!("n={n}: outer unit law failed")),
            Err(e) => rep.require(false, || format!("n={n}: outer unit errored: {e}")),
        }
    }
    rep
}

/// Exhaustive search for a strictly legal unit morphism within the stated
/// bounds; the campaign passes exactly when none exists.
pub fn verify_strict_units(max_aux: u32, max_exp: i64) -> CaseReport {
    let mut rep = CaseReport::new("logdf/strict-unit-search");
    match strict_unit_search(max_aux, max_exp) {
        Ok(report) => {
            rep.require(report.candidates > 0, || {
                "the search space was empty".to_string()
            });
            rep.require(report.df_legal_found == 0, || {
                format!(
                    "{} strictly legal unit candidates found within bounds ({}, {})",
                    report.df_legal_found, report.max_aux, report.max_exp
                )
            });
        }
        Err(e) => rep.require(false, || format!("strict unit search errored: {e}")),
    }
    rep
}

/// Sanity property of the composed-morphism sections: the inner rows of a
/// tensor insertion propagate unit and zero flags the way composition
/// demands.  Exercised as a spot check over small surjections.
pub fn verify_logdf_flags(max_arity: u32) -> CaseReport {
    let mut rep = CaseReport::new("logdf/flags");
    for m in 2..=max_arity.min(4) {
        for q in all_labeled_surjections(m) {
            for variant in [Variant::Log, Variant::VLog] {
                match gamma(&q, variant) {
                    Ok(g) => {
                        for (j, row) in g.rows.iter().enumerate() {
                            let expected = expected_flag(&g, row);
                            rep.require(row.section == expected || row.section == crate::logdf::SectionKind::Zero, || {
                                format!(
                                    "q={} {}: row {j} stores {:?} but the product gives {:?}",
                                    surj_str(&q),
                                    variant.name(),
                                    row.section,
                                    expected
                                )
                            });
                        }
                    }
                    Err(e) => rep.require(false, || format!("q={}: gamma errored: {e}", surj_str(&q))),
                }
            }
        }
    }
    rep
}

fn expected_flag(m: &LogMorphism, row: &MorphRow) -> crate::logdf::SectionKind {
    m.product_section(row)
}

// ---------------------------------------------------------------------------
// Chart-level numerics
// ---------------------------------------------------------------------------

/// Sample sizes for the chart-level campaigns.
#[derive(Debug, Clone, Copy)]
pub struct KnScale {
    pub hopf_samples: usize,
    pub split_samples: usize,
    pub s1_samples: usize,
    pub cartesian_samples: usize,
    pub invariant_samples: usize,
}

impl KnScale {
    pub fn full() -> KnScale {
        KnScale {
            hopf_samples: 10_000,
            split_samples: 1_000,
            s1_samples: 200,
            cartesian_samples: 150,
            invariant_samples: 150,
        }
    }

    pub fn quick() -> KnScale {
        KnScale {
            hopf_samples: 1_200,
            split_samples: 250,
            s1_samples: 80,
            cartesian_samples: 60,
            invariant_samples: 60,
        }
    }
}

/// All chart-level verifications: Hopf charts, circle splittings, the sphere
/// action, Cartesian squares, and the global invariants.
pub fn verify_kn_all(scale: KnScale, tol: f64, seed: u64) -> Vec<CaseReport> {
    let mut out = Vec::new();
    for m in 0..=2 {
        out.push(wrap_kn(kn::hopf_verify(m, scale.hopf_samples, tol, seed)));
    }
    for case in SplitCase::all() {
        out.push(wrap_kn(kn::circle_split_verify(case, scale.split_samples, tol, seed)));
    }
    for n in 1..=3 {
        out.push(wrap_kn(kn::s1_action_verify(n, scale.s1_samples, tol, seed)));
    }
    for case in CartesianCase::all() {
        out.push(wrap_kn(kn::strict_cartesian_verify(case, scale.cartesian_samples, tol, seed)));
    }
    out.push(wrap_kn(kn::order_independence_verify(scale.invariant_samples, tol, seed)));
    out.push(wrap_kn(kn::wedge_sphere_verify(scale.invariant_samples, tol, seed)));
    out.push(wrap_kn(kn::functoriality_verify(scale.invariant_samples, seed)));
    out
}

fn wrap_kn(r: Result<KnReport>) -> CaseReport {
    match r {
        Ok(rep) => CaseReport::from_kn(rep),
        Err(e) => {
            let mut c = CaseReport::new("kn/error");
            c.require(false, || format!("campaign errored: {e}"));
            c
        }
    }
}

// ---------------------------------------------------------------------------
// Bridge between screens and direction coordinates
// ---------------------------------------------------------------------------

/// A configuration's screen covectors and its direction classes determine
/// each other exactly: differencing the direction class against its anchor
/// reproduces the canonical covector, and reading the covector back as a
/// configuration reproduces the direction class up to overall sign (the
/// covector is a projective datum).
pub fn verify_bridge(trials: usize, seed: u64) -> CaseReport {
    let mut rep = CaseReport::new("bridge/screen-direction");
    for t in 0..trials {
        let mut s = Sampler::derive(seed, &format!("bridge/t{t}"));
        let n = s.gen_range(2, 5);
        let d = s.gen_range(1, 3);
        let set = Subset::range(n as u32).expect("small range");
        let config = s.distinct_config(set, d);
        let run = (|| -> Result<()> {
            let point = FMPoint::from_config(d, config.clone())?;
            let screen = Screen::from_config(d, config.clone())?;
            for index in set.subsets_with_at_least(2) {
                let dir = point.coordinates(index)?;
                let cov = screen
                    .component(index)
                    .expect("screens carry every component")
                    .clone();

                // Direction to covector: difference against the anchor label.
                let min = index.min().expect("nonempty");
                let vmin = dir.vector(min).expect("anchor recorded").to_vec();
                let mut from_dir = Covector::new();
                for i in index.labels().filter(|i| *i != min) {
                    let vi = dir.vector(i).expect("label recorded");
                    for (k, item) in vmin.iter().enumerate() {
                        let v = &vi[k] - item;
                        if !v.is_zero() {
                            from_dir.insert((i, k), v);
                        }
                    }
                }
                let canon = canonicalize(from_dir)
                    .expect("distinct points give a nonzero covector");
                rep.require(canon == cov, || {
                    format!("trial {t}: direction does not reproduce the covector at {}", index.key())
                });

                // Covector to direction: read the values as a configuration
                // anchored at zero; agreement holds up to overall sign.
                let entries: Vec<(u32, Vec<Q>)> = index
                    .labels()
                    .map(|i| {
                        let v: Vec<Q> = (0..d)
                            .map(|k| cov.get(&(i, k)).cloned().unwrap_or_else(Q::zero))
                            .collect();
                        (i, v)
                    })
                    .collect();
                let negated: Vec<(u32, Vec<Q>)> = entries
                    .iter()
                    .map(|(i, v)| (*i, v.iter().map(|x| -x.clone()).collect()))
                    .collect();
                let rec = direction_canonical(d, entries)?;
                let neg = direction_canonical(d, negated)?;
                rep.require(rec == dir || neg == dir, || {
                    format!("trial {t}: covector does not reproduce the direction at {}", index.key())
                });
            }
            Ok(())
        })();
        if let Err(e) = run {
            rep.require(false, || format!("trial {t}: bridge errored: {e}"));
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Full campaign
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tol: f64,
    pub quick: bool,
}

impl VerifyConfig {
    pub fn new(seed: u64, tol: f64, quick: bool) -> VerifyConfig {
        VerifyConfig { seed, tol, quick }
    }
}

/// Runs every campaign at its standard scale (or the reduced quick scale)
/// and returns the reports sorted by case name.
pub fn verify_all(cfg: &VerifyConfig) -> Vec<CaseReport> {
    let mut cases = Vec::new();
    let (fm_trials, framed_trials, screen_trials, bridge_trials) = if cfg.quick {
        (60, 40, 50, 30)
    } else {
        (500, 200, 200, 100)
    };
    let (arity, labeled_max) = if cfg.quick { (5, 3) } else { (6, 5) };
    let strata_n = if cfg.quick { 5 } else { 6 };
    let scale = if cfg.quick { KnScale::quick() } else { KnScale::full() };

    for dim in [1usize, 2, 3, 4] {
        cases.push(verify_fm_axioms(dim, 5, fm_trials, cfg.seed));
        cases.push(verify_fm_coordinates(dim, 5, fm_trials, cfg.seed));
    }
    for half_dim in [1usize, 2] {
        cases.push(verify_framed_axioms(half_dim, framed_trials, cfg.seed));
    }
    cases.extend(verify_strata(strata_n));
    cases.extend(verify_screens(screen_trials, 4, 3, cfg.seed));
    for variant in [Variant::Log, Variant::VLog] {
        cases.push(verify_logdf_legality(arity, variant));
        cases.push(verify_logdf_associativity(arity, labeled_max, variant));
        cases.push(verify_logdf_equivariance(arity, variant));
    }
    cases.push(verify_logdf_units(arity.min(5)));
    cases.push(verify_logdf_flags(4));
    cases.push(verify_strict_units(3, 3));
    cases.extend(verify_kn_all(scale, cfg.tol, cfg.seed));
    cases.push(verify_bridge(bridge_trials, cfg.seed));

    cases.sort_by(|a, b| a.name.cmp(&b.name));
    cases
}

pub fn campaign_passed(cases: &[CaseReport]) -> bool {
    cases.iter().all(|c| c.passed())
}

/// The campaign report as a stable JSON value: configuration echo, one entry
/// per case, no timestamps — identical configurations produce identical
/// bytes.
pub fn campaign_value(cfg: &VerifyConfig, cases: &[CaseReport]) -> Value {
    let case_values: Vec<Value> = cases
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "passed": c.passed(),
                "checked": c.checked,
                "max_error": c.max_error,
                "failures": c.failures(),
            })
        })
        .collect();
    json!({
        "config": { "seed": cfg.seed, "tol": cfg.tol, "quick": cfg.quick },
        "passed": campaign_passed(cases),
        "cases": case_values,
    })
}
