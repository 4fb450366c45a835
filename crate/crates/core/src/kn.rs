//! Chart-level numerics for real oriented blow-ups and Kato--Nakayama spaces.
//!
//! Everything here works in local charts with `f64` coordinates; this is the
//! only module of the crate that uses floating point.  A chart carries a
//! vector-bundle section in trivialized form, and the real oriented blow-up in
//! that section is described by a membership predicate on unit fiber vectors:
//! over a zero of the section the fiber is a whole unit sphere, elsewhere it is
//! the single positive direction of the section value.
//!
//! On top of the membership predicate the module verifies, numerically and
//! deterministically, the chart-level statements used elsewhere:
//!
//! * torus maps between phase coordinates (`kn_map_chart`) and their
//!   functoriality under matrix products of exponent data,
//! * the Hopf fibration as the blow-down of the unit circle bundle of the
//!   tautological line bundle on projective space,
//! * the splitting of the blow-up in the zero section of a tensor product of
//!   already blown-up line bundles as a trivial circle factor,
//! * the circle action on odd spheres induced by phase rotation,
//! * Cartesian squares of blow-ups along strict chart maps,
//! * order independence of iterated blow-ups and the wedge `S^1 v S^2`
//!   example of a non-transverse section on the two-sphere.
//!
//! All sampling is quasi-uniform (additive Weyl/Kronecker sequences seeded by
//! hashing) so that a fixed seed reproduces results bit for bit.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

/// Default absolute tolerance for chart-level comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance used when comparing composed torus maps against their
/// matrix-product data.
pub const FUNCTORIALITY_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Deterministic quasi-uniform sampling
// ---------------------------------------------------------------------------

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_from_u64(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 53) as f64
}

/// Irrational step vector of the `R_d` additive recurrence: powers of the
/// inverse of the positive root of `x^(d+1) = x + 1`.
fn rd_alphas(dim: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim)
        .map(|i| (1.0 / phi).powi(i as i32).fract())
        .collect()
}

/// Low-discrepancy sequence in the unit cube `[0,1)^dim`, offset by a hash of
/// the seed so that different seeds give shifted lattices.
pub fn sample_unit_cube(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let alphas = rd_alphas(dim.max(1));
    let mut state = seed ^ 0xA076_1D64_78BD_642F;
    let offsets: Vec<f64> = (0..dim.max(1))
        .map(|_| unit_from_u64(splitmix64(&mut state)))
        .collect();
    (0..count)
        .map(|k| {
            (0..dim)
                .map(|i| (offsets[i] + (k as f64 + 1.0) * alphas[i]).fract())
                .collect()
        })
        .collect()
}

/// Quasi-uniform samples of the axis-aligned box with the given corners.
pub fn sample_box(lo: &[f64], hi: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert_eq!(lo.len(), hi.len());
    sample_unit_cube(lo.len(), count, seed)
        .into_iter()
        .map(|u| {
            u.iter()
                .enumerate()
                .map(|(i, t)| lo[i] + (hi[i] - lo[i]) * t)
                .collect()
        })
        .collect()
}

/// Quasi-uniform unit vectors in `R^dim` (points of the sphere `S^(dim-1)`).
///
/// Dimension 1 alternates the two points of `S^0`; dimension 2 walks the
/// circle by an irrational rotation; higher dimensions push the cube sequence
/// through the Box--Muller map and normalize.
pub fn sample_unit_sphere(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(dim >= 1);
    match dim {
        1 => (0..count)
            .map(|k| vec![if (k + (seed as usize % 2)) % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => sample_unit_cube(1, count, seed)
            .into_iter()
            .map(|u| {
                let theta = 2.0 * PI * u[0];
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        _ => {
            let pairs = dim.div_ceil(2);
            sample_unit_cube(2 * pairs, count, seed)
                .into_iter()
                .map(|u| {
                    let mut v = Vec::with_capacity(2 * pairs);
                    for p in 0..pairs {
                        let r = (-2.0 * u[2 * p].max(1e-12).ln()).sqrt();
                        let theta = 2.0 * PI * u[2 * p + 1];
                        v.push(r * theta.cos());
                        v.push(r * theta.sin());
                    }
                    v.truncate(dim);
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm < 1e-12 {
                        let mut e = vec![0.0; dim];
                        e[0] = 1.0;
                        e
                    } else {
                        v.iter().map(|x| x / norm).collect()
                    }
                })
                .collect()
        }
    }
}

/// Quasi-uniform points of the unit sphere `S^(2n-1)` inside `C^n`.
pub fn sample_complex_sphere(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    sample_unit_sphere(2 * n, count, seed)
        .into_iter()
        .map(|v| {
            (0..n)
                .map(|i| Complex64::new(v[2 * i], v[2 * i + 1]))
                .collect()
        })
        .collect()
}

/// `count` equally spaced points of the unit circle, starting at 1.
pub fn unit_circle_points(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / count as f64))
        .collect()
}

// ---------------------------------------------------------------------------
// Chart sections and blow-up membership
// ---------------------------------------------------------------------------

type SectionFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A trivialized vector-bundle section over a chart: a map from a domain in
/// `R^dim` to fiber vectors in `R^rank`.
#[derive(Clone)]
pub struct ChartSection {
    dim: usize,
    rank: usize,
    section: SectionFn,
}

impl ChartSection {
    pub fn new<F>(dim: usize, rank: usize, section: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if rank == 0 {
            return Err(Error::invalid_input("chart section needs rank at least 1"));
        }
        Ok(ChartSection {
            dim,
            rank,
            section: Arc::new(section),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Evaluates the section, checking the dimensions of input and output.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::invalid_input(format!(
                "chart point has dimension {}, expected {}",
                x.len(),
                self.dim
            )));
        }
        let s = (self.section)(x);
        if s.len() != self.rank {
            return Err(Error::internal(format!(
                "section value has rank {}, expected {}",
                s.len(),
                self.rank
            )));
        }
        Ok(s)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Membership predicate of the real oriented blow-up in a section.
///
/// A unit fiber vector `u` over `x` lies in the blow-up exactly when the
/// section vanishes at `x` (the fiber is the whole unit sphere there) or `u`
/// is the positive direction of the section value.
pub fn bu_membership(cs: &ChartSection, x: &[f64], u: &[f64], tol: f64) -> Result<bool> {
    if u.len() != cs.rank {
        return Err(Error::invalid_input(format!(
            "fiber vector has rank {}, expected {}",
            u.len(),
            cs.rank
        )));
    }
    if (norm(u) - 1.0).abs() > tol.max(1e-12) {
        return Err(Error::invalid_input(format!(
            "fiber vector has norm {:.3e}, expected a unit vector",
            norm(u)
        )));
    }
    let s = cs.eval(x)?;
    let n = norm(&s);
    if n <= tol {
        return Ok(true);
    }
    let dir: Vec<f64> = s.iter().map(|v| v / n).collect();
    Ok(dist(u, &dir) <= tol)
}

/// The fiber of the blow-down map over a chart point.
#[derive(Debug, Clone, PartialEq)]
pub enum Fiber {
    /// The section is nonzero: a single positive direction.
    Point(Vec<f64>),
    /// The section vanishes: a sample of the unit sphere in the fiber
    /// (both points for rank 1, `k` quasi-uniform vectors otherwise).
    Sphere(Vec<Vec<f64>>),
}

/// Enumerates (a sample of) the blow-down fiber over `x`.
pub fn bu_fiber(cs: &ChartSection, x: &[f64], k: usize, tol: f64, seed: u64) -> Result<Fiber> {
    let s = cs.eval(x)?;
    let n = norm(&s);
    if n > tol {
        return Ok(Fiber::Point(s.iter().map(|v| v / n).collect()));
    }
    if cs.rank == 1 {
        return Ok(Fiber::Sphere(vec![vec![1.0], vec![-1.0]]));
    }
    if cs.rank == 2 {
        let pts = (0..k.max(1))
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / k.max(1) as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect();
        return Ok(Fiber::Sphere(pts));
    }
    Ok(Fiber::Sphere(sample_unit_sphere(cs.rank, k.max(1), seed)))
}

// ---------------------------------------------------------------------------
// Torus maps between phase coordinates
// ---------------------------------------------------------------------------

type LambdaFn = Arc<dyn Fn(&[f64]) -> Vec<Complex64> + Send + Sync>;

/// Chart data of a map between Kato--Nakayama spaces that is the identity on
/// the base: an integer exponent matrix together with nowhere-vanishing
/// coefficient functions, acting on phase coordinates by
/// `w_i = lambda_i(x) * prod_j z_j^(e_ij)`.
#[derive(Clone)]
pub struct TorusChartMap {
    exponents: Vec<Vec<i64>>,
    lambda: LambdaFn,
}

impl TorusChartMap {
    pub fn new<F>(exponents: Vec<Vec<i64>>, lambda: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        let cols = exponents.first().map(|r| r.len());
        if let Some(c) = cols {
            if exponents.iter().any(|r| r.len() != c) {
                return Err(Error::invalid_input("exponent matrix rows have unequal length"));
            }
        }
        Ok(TorusChartMap {
            exponents,
            lambda: Arc::new(lambda),
        })
    }

    pub fn exponents(&self) -> &[Vec<i64>] {
        &self.exponents
    }

    pub fn outputs(&self) -> usize {
        self.exponents.len()
    }

    /// Chart data of the composite `self` after `inner`: exponent matrices
    /// multiply and coefficients combine as
    /// `mu_i(x) = lambda_i(x) * prod_j (lambda_inner_j(x))^(e_ij)`.
    pub fn compose(&self, inner: &TorusChartMap) -> Result<TorusChartMap> {
        let mid = inner.exponents.len();
        if self.exponents.iter().any(|r| r.len() != mid) {
            return Err(Error::invalid_input(
                "exponent matrices are not composable: inner output count differs from outer input count",
            ));
        }
        let cols = inner.exponents.first().map_or(0, |r| r.len());
        let exps: Vec<Vec<i64>> = self
            .exponents
            .iter()
            .map(|row| {
                (0..cols)
                    .map(|j| row.iter().zip(&inner.exponents).map(|(e, ir)| e * ir[j]).sum())
                    .collect()
            })
            .collect();
        let outer_rows = self.exponents.clone();
        let outer_lambda = Arc::clone(&self.lambda);
        let inner_lambda = Arc::clone(&inner.lambda);
        TorusChartMap::new(exps, move |x: &[f64]| {
            let lo = outer_lambda(x);
            let li = inner_lambda(x);
            outer_rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut acc = lo[i];
                    for (e, l) in row.iter().zip(&li) {
                        acc *= l.powi(*e as i32);
                    }
                    acc
                })
                .collect()
        })
    }
}

/// Evaluates a torus chart map on phase coordinates.
///
/// Fails with an invalid-input error when a coefficient function vanishes at
/// the base point (within `tol`): such data does not define a map of
/// Kato--Nakayama charts there.
pub fn kn_map_chart(
    map: &TorusChartMap,
    x: &[f64],
    z: &[Complex64],
    tol: f64,
) -> Result<Vec<Complex64>> {
    let lambdas = (map.lambda)(x);
    if lambdas.len() != map.exponents.len() {
        return Err(Error::internal("coefficient count differs from exponent row count"));
    }
    for (i, l) in lambdas.iter().enumerate() {
        if l.norm() <= tol {
            return Err(Error::invalid_input(format!(
                "coefficient {} vanishes at the sampled base point (|lambda| = {:.3e})",
                i,
                l.norm()
            )));
        }
    }
    if let Some(row) = map.exponents.first() {
        if z.len() != row.len() {
            return Err(Error::invalid_input(format!(
                "phase vector has length {}, expected {}",
                z.len(),
                row.len()
            )));
        }
    }
    Ok(map
        .exponents
        .iter()
        .zip(&lambdas)
        .map(|(row, l)| {
            let mut acc = *l;
            for (e, zj) in row.iter().zip(z) {
                acc *= zj.powi(*e as i32);
            }
            acc
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Outcome of one numerical verification campaign: how many individual
/// identities were checked, the largest deviation seen, and a witness string
/// for every check that exceeded its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct KnReport {
    pub name: String,
    pub checked: u64,
    pub max_error: f64,
    pub failures: Vec<String>,
}

impl KnReport {
    pub fn new(name: impl Into<String>) -> Self {
        KnReport {
            name: name.into(),
            checked: 0,
            max_error: 0.0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records one comparison with deviation `err`; a deviation above `tol`
    /// appends a formatted witness.
    fn record(&mut self, err: f64, tol: f64, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if err > self.max_error {
            self.max_error = err;
        }
        if err > tol {
            self.failures.push(format!("{} (error {:.3e})", witness(), err));
        }
    }

    /// Records a boolean check that carries no numeric deviation.
    fn require(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(witness());
        }
    }
}

fn phase(z: Complex64) -> Complex64 {
    let n = z.norm();
    if n == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / n
    }
}

/// Largest cross-term deviation between two complex vectors seen as
/// projective points: zero exactly when they span the same complex line.
fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for p in 0..a.len() {
        for q in (p + 1)..a.len() {
            let cross = (a[p] * b[q] - a[q] * b[p]).norm();
            if cross > worst {
                worst = cross;
            }
        }
    }
    worst
}

fn cdist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// Hopf fibration
// ---------------------------------------------------------------------------

/// The point of `S^(2m+1)` determined by chart data on projective space: the
/// chart index `j`, the affine coordinates of the other homogeneous slots, and
/// the phase of slot `j`.  This is the unit vector of the tautological line
/// with `j`-th phase `v`.
fn hopf_chart_point(m: usize, j: usize, a: &[Complex64], v: Complex64) -> Vec<Complex64> {
    let mut sigma = Vec::with_capacity(m + 1);
    let mut ai = a.iter();
    for slot in 0..=m {
        if slot == j {
            sigma.push(Complex64::new(1.0, 0.0));
        } else {
            sigma.push(*ai.next().expect("affine coordinate"));
        }
    }
    let n = sigma.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    sigma.into_iter().map(|z| z * v / n).collect()
}

/// Verifies, on quasi-uniform samples, that the unit circle bundle of the
/// tautological line bundle on `P^m` -- the Kato--Nakayama space of projective
/// space with the zero section of that bundle as log structure -- is the
/// sphere `S^(2m+1)` with the Hopf fibration as blow-down map.
///
/// Checks per sample: the chart coordinates (affine slots plus one phase)
/// reconstruct the sphere point exactly; chart transitions act on the phase by
/// the torus map with exponent 1 and coefficient the crossing affine
/// coordinate; sweeping the fiber circle moves the point inside one Hopf fiber
/// and closes up after a full turn.  For `m = 0` the blow-down is constant and
/// the space is a single circle.
pub fn hopf_verify(m: usize, samples: usize, tol: f64, seed: u64) -> Result<KnReport> {
    if m > 4 {
        return Err(Error::resource_limit(
            "projective dimension above 4 is not supported by the chart sweep",
        ));
    }
    let mut report = KnReport::new(format!("hopf/m{}", m));

    if m == 0 {
        // P^0 is a point; the space is the unit circle of C and the blow-down
        // is constant.
        for v in unit_circle_points(samples.clamp(8, 256)) {
            report.record((v.norm() - 1.0).abs(), tol, || {
                format!("circle point {} is not unit", v)
            });
        }
        return Ok(report);
    }

    let points = sample_complex_sphere(m + 1, samples, seed);
    for (idx, z) in points.iter().enumerate() {
        // Chart of the largest homogeneous coordinate.
        let j = (0..=m)
            .max_by(|p, q| z[*p].norm().partial_cmp(&z[*q].norm()).expect("finite"))
            .expect("nonempty");
        let a: Vec<Complex64> = (0..=m).filter(|s| *s != j).map(|s| z[s] / z[j]).collect();
        let v = phase(z[j]);

        // Round trip through the chart description.
        let back = hopf_chart_point(m, j, &a, v);
        report.record(cdist(&back, z), tol, || {
            format!("sample {}: chart {} does not reconstruct the sphere point", idx, j)
        });

        // Transition to every other usable chart: the phase changes by the
        // phase of the crossing coordinate, which is the torus chart map with
        // exponent matrix [1] and coefficient the crossing coordinate itself.
        for k in (0..=m).filter(|k| *k != j && z[*k].norm() > 0.1) {
            let crossing = z[k] / z[j];
            let map = TorusChartMap::new(vec![vec![1]], move |_x: &[f64]| vec![crossing])?;
            let w = kn_map_chart(&map, &[], &[v], tol)?;
            let predicted = phase(w[0]);
            report.record((predicted - phase(z[k])).norm(), tol, || {
                format!("sample {}: transition {} -> {} disagrees on the phase", idx, j, k)
            });
        }

        // Fiber sweep on a thinned subset: rotating the phase stays in one
        // Hopf fiber and a full turn closes up.
        if idx < 16 {
            let steps = 12;
            let start = hopf_chart_point(m, j, &a, v);
            for t in 1..=steps {
                let theta = 2.0 * PI * t as f64 / steps as f64;
                let rotated = hopf_chart_point(m, j, &a, v * Complex64::from_polar(1.0, theta));
                report.record(projective_distance(&rotated, z), tol, || {
                    format!("sample {}: fiber sweep left the Hopf fiber at step {}", idx, t)
                });
                let n = norm(
                    &rotated
                        .iter()
                        .flat_map(|c| [c.re, c.im])
                        .collect::<Vec<f64>>(),
                );
                report.record((n - 1.0).abs(), tol, || {
                    format!("sample {}: fiber sweep left the unit sphere at step {}", idx, t)
                });
                if t == steps {
                    report.record(cdist(&rotated, &start), tol, || {
                        format!("sample {}: fiber sweep did not close up", idx)
                    });
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Circle splitting of a tensor-product blow-up
// ---------------------------------------------------------------------------

/// Catalog of chart models for the circle-splitting statement: blowing up the
/// zero section of a tensor product of line bundles, after blowing up chosen
/// sections of the factors, adds a trivial circle factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitCase {
    /// One factor with the constant unit section.
    Trivial,
    /// One factor whose section has an isolated zero inside the chart.
    DiskZero,
    /// The same zero but tensor square: the trivialization winds twice.
    DoubleWind,
    /// Two factors with different zeros and exponents of both signs.
    TwoBundle,
}

impl SplitCase {
    pub fn all() -> [SplitCase; 4] {
        [
            SplitCase::Trivial,
            SplitCase::DiskZero,
            SplitCase::DoubleWind,
            SplitCase::TwoBundle,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            SplitCase::Trivial => "trivial",
            SplitCase::DiskZero => "disk-zero",
            SplitCase::DoubleWind => "double-wind",
            SplitCase::TwoBundle => "two-bundle",
        }
    }

    pub fn parse(name: &str) -> Result<SplitCase> {
        let bare = name.strip_prefix("catalog:").unwrap_or(name);
        SplitCase::all()
            .into_iter()
            .find(|c| c.name() == bare)
            .ok_or_else(|| {
                Error::invalid_input(format!(
                    "unknown split case '{}' (expected one of trivial, disk-zero, double-wind, two-bundle)",
                    name
                ))
            })
    }

    /// Chart data: base dimension, complex-valued factor sections, exponents.
    #[allow(clippy::type_complexity)]
    fn data(&self) -> (usize, Vec<Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>>, Vec<i64>) {
        let disk: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync> =
            Arc::new(|x: &[f64]| Complex64::new(x[0], x[1]));
        match self {
            SplitCase::Trivial => (
                1,
                vec![Arc::new(|_x: &[f64]| Complex64::new(1.0, 0.0))],
                vec![1],
            ),
            SplitCase::DiskZero => (2, vec![disk], vec![1]),
            SplitCase::DoubleWind => (2, vec![disk], vec![2]),
            SplitCase::TwoBundle => (
                2,
                vec![
                    disk,
                    Arc::new(|x: &[f64]| Complex64::new(x[0] - 0.5, x[1])),
                ],
                vec![1, -1],
            ),
        }
    }
}

/// Phases admissible over a base point for one complex factor section: the
/// single phase of the value where it is nonzero, a sample of the whole circle
/// over a zero.
fn factor_phases(value: Complex64, tol: f64, k: usize) -> Vec<Complex64> {
    if value.norm() > tol {
        vec![phase(value)]
    } else {
        unit_circle_points(k)
    }
}

/// Verifies the circle splitting of the blow-up in the zero section of
/// `L = (X) L_i^(e_i)` over the blow-up of the factor sections.
///
/// Chart model: a point of the iterated blow-up is a base point, one
/// admissible phase per factor, and a free phase `v` for the zero section of
/// `L`.  The splitting sends `v` to `w = v * prod u_i^(-e_i)` using the
/// trivialization `u_L = prod u_i^(e_i)` of `L` carried by the factor blow-up.
/// The check confirms the trivialization agrees with the phase of the tensor
/// product section where that is nonzero, and that the splitting and its
/// inverse compose to the identity in both orders.
pub fn circle_split_verify(case: SplitCase, samples: usize, tol: f64, seed: u64) -> Result<KnReport> {
    let mut report = KnReport::new(format!("split/{}", case.name()));
    let (dim, sections, exps) = case.data();
    let lo = vec![-1.0; dim];
    let hi = vec![1.0; dim];
    let mut base = sample_box(&lo, &hi, samples, seed);
    // Make sure the zero loci are hit exactly.
    base.push(vec![0.0; dim]);
    if matches!(case, SplitCase::TwoBundle) {
        let mut z2 = vec![0.0; dim];
        z2[0] = 0.5;
        base.push(z2);
    }

    let fiber_k = 8;
    let v_sweep = unit_circle_points(6);
    for (idx, x) in base.iter().enumerate() {
        let values: Vec<Complex64> = sections.iter().map(|s| s(x)).collect();
        let phase_choices: Vec<Vec<Complex64>> = values
            .iter()
            .map(|v| factor_phases(*v, tol, fiber_k))
            .collect();

        // Iterate over the product of phase choices.
        let mut stack = vec![0usize; phase_choices.len()];
        loop {
            let us: Vec<Complex64> = stack
                .iter()
                .enumerate()
                .map(|(i, c)| phase_choices[i][*c])
                .collect();

            // Trivialization of L over this blow-up point.
            let mut u_l = Complex64::new(1.0, 0.0);
            for (u, e) in us.iter().zip(&exps) {
                u_l *= u.powi(*e as i32);
            }
            // Where no factor vanishes the trivialization is the phase of the
            // tensor-product section.
            if values.iter().all(|v| v.norm() > tol) {
                let mut tensor = Complex64::new(1.0, 0.0);
                for (v, e) in values.iter().zip(&exps) {
                    tensor *= v.powi(*e as i32);
                }
                report.record((u_l - phase(tensor)).norm(), tol, || {
                    format!(
                        "{}: sample {}: trivialization disagrees with the tensor section phase",
                        case.name(),
                        idx
                    )
                });
            }

            for v in &v_sweep {
                // Split and unsplit.
                let w = v * u_l.conj();
                let v_back = w * u_l;
                report.record((v_back - v).norm(), tol, || {
                    format!("{}: sample {}: splitting round trip failed", case.name(), idx)
                });
                // Unsplit and split, starting from the circle coordinate.
                let v2 = v * u_l;
                let w_back = v2 * u_l.conj();
                report.record((w_back - v).norm(), tol, || {
                    format!(
                        "{}: sample {}: inverse splitting round trip failed",
                        case.name(),
                        idx
                    )
                });
            }

            // Advance the product iterator.
            let mut pos = 0;
            loop {
                if pos == stack.len() {
                    break;
                }
                stack[pos] += 1;
                if stack[pos] < phase_choices[pos].len() {
                    break;
                }
                stack[pos] = 0;
                pos += 1;
            }
            if pos == stack.len() {
                break;
            }
        }
    }

    // The double-wind trivialization really has winding number two: antipodal
    // phases over the zero give the same trivialization value.
    if matches!(case, SplitCase::DoubleWind) {
        for u in unit_circle_points(16) {
            let w1 = u.powi(2);
            let w2 = (-u).powi(2);
            report.record((w1 - w2).norm(), tol, || {
                "double-wind trivialization is not antipodally symmetric".to_string()
            });
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Circle action on odd spheres
// ---------------------------------------------------------------------------

/// Verifies that the chart-level phase action on the Kato--Nakayama model of
/// `S^(2n-1)` agrees with the diagonal rotation action `(theta, z) -> e^(i
/// theta) z` of the circle on the sphere, and that it is a group action.
pub fn s1_action_verify(n: usize, samples: usize, tol: f64, seed: u64) -> Result<KnReport> {
    if n == 0 || n > 4 {
        return Err(Error::resource_limit("sphere factor count must be between 1 and 4"));
    }
    let mut report = KnReport::new(format!("s1/n{}", n));
    let m = n - 1;
    let points = sample_complex_sphere(n, samples, seed);
    let angles = sample_unit_cube(2, samples, seed ^ 0x5bd1_e995);
    for (idx, (z, ang)) in points.iter().zip(&angles).enumerate() {
        let theta = 2.0 * PI * ang[0];
        let u = Complex64::from_polar(1.0, theta);

        // Chart of the largest coordinate; the action is the torus map
        // multiplying the chart phase by the acting phase.
        let j = (0..n)
            .max_by(|p, q| z[*p].norm().partial_cmp(&z[*q].norm()).expect("finite"))
            .expect("nonempty");
        let a: Vec<Complex64> = (0..n).filter(|s| *s != j).map(|s| z[s] / z[j]).collect();
        let v = phase(z[j]);
        let map = TorusChartMap::new(vec![vec![1, 1]], |_x: &[f64]| {
            vec![Complex64::new(1.0, 0.0)]
        })?;
        let w = kn_map_chart(&map, &[], &[u, v], tol)?;
        let acted = hopf_chart_point(m, j, &a, w[0]);
        let expected: Vec<Complex64> = z.iter().map(|c| c * u).collect();
        report.record(cdist(&acted, &expected), tol, || {
            format!("sample {}: chart action disagrees with diagonal rotation", idx)
        });

        // The action is fiberwise over projective space.
        report.record(projective_distance(&acted, z), tol, || {
            format!("sample {}: action moved the blow-down image", idx)
        });

        // Group law on the sphere model.
        let theta2 = 2.0 * PI * ang[1];
        let u2 = Complex64::from_polar(1.0, theta2);
        let one_step: Vec<Complex64> = z.iter().map(|c| c * (u * u2)).collect();
        let two_step: Vec<Complex64> = z.iter().map(|c| c * u2 * u).collect();
        report.record(cdist(&one_step, &two_step), tol, || {
            format!("sample {}: group law failed", idx)
        });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Cartesian squares along strict chart maps
// ---------------------------------------------------------------------------

/// Catalog of strict chart maps: the bundle and section on the source are the
/// pullbacks of those on the target, so the blow-up square must be Cartesian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CartesianCase {
    /// Identity chart with a nonvanishing section.
    Trivial,
    /// A point mapped into a point carrying the zero section of a line
    /// bundle: circle fibers on both sides.
    PointCircle,
    /// An affine line embedded in the plane, log structure the coordinate
    /// hyperplane: the blow-up of the line in the origin against the blow-up
    /// of the plane in the divisor.
    LineInPlane,
}

impl CartesianCase {
    pub fn all() -> [CartesianCase; 3] {
        [
            CartesianCase::Trivial,
            CartesianCase::PointCircle,
            CartesianCase::LineInPlane,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            CartesianCase::Trivial => "trivial",
            CartesianCase::PointCircle => "point-circle",
            CartesianCase::LineInPlane => "line-in-plane",
        }
    }

    pub fn parse(name: &str) -> Result<CartesianCase> {
        let bare = name.strip_prefix("catalog:").unwrap_or(name);
        CartesianCase::all()
            .into_iter()
            .find(|c| c.name() == bare)
            .ok_or_else(|| {
                Error::invalid_input(format!(
                    "unknown cartesian case '{}' (expected one of trivial, point-circle, line-in-plane)",
                    name
                ))
            })
    }
}

/// Verifies that the blow-up square of a strict chart map is Cartesian: a
/// fiber vector is admissible over a source point exactly when it is
/// admissible over the image point, and the blow-down fibers agree.  Also
/// confirms the blow-down is bijective away from the zero locus.
pub fn strict_cartesian_verify(
    case: CartesianCase,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<KnReport> {
    let mut report = KnReport::new(format!("cartesian/{}", case.name()));

    // Source dimension, target dimension, chart map, shared section rank, and
    // the target section; the source section is its pullback by strictness.
    let (sdim, f, target): (usize, Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>, ChartSection) =
        match case {
            CartesianCase::Trivial => (
                2,
                Arc::new(|x: &[f64]| x.to_vec()),
                ChartSection::new(2, 2, |x: &[f64]| vec![x[0] + 1.5, x[1]])?,
            ),
            CartesianCase::PointCircle => (
                0,
                Arc::new(|_x: &[f64]| Vec::new()),
                ChartSection::new(0, 2, |_x: &[f64]| vec![0.0, 0.0])?,
            ),
            CartesianCase::LineInPlane => (
                2,
                Arc::new(|x: &[f64]| vec![x[0], x[1], 0.0, 0.0]),
                ChartSection::new(4, 2, |y: &[f64]| vec![y[0], y[1]])?,
            ),
        };
    let f_for_source = Arc::clone(&f);
    let target_for_source = target.clone();
    let source = ChartSection::new(sdim, target.rank(), move |x: &[f64]| {
        target_for_source
            .eval(&f_for_source(x))
            .expect("pullback section evaluation")
    })?;

    let mut base = if sdim == 0 {
        vec![Vec::new()]
    } else {
        sample_box(&vec![-1.0; sdim], &vec![1.0; sdim], samples, seed)
    };
    if sdim > 0 {
        base.push(vec![0.0; sdim]);
    }

    let sphere_probe = sample_unit_sphere(target.rank(), 6, seed ^ 0x1234_5678);
    for (idx, x) in base.iter().enumerate() {
        let y = f(x);

        // Membership biconditional over probe vectors and the actual fiber.
        let mut probes: Vec<Vec<f64>> = sphere_probe.clone();
        match bu_fiber(&source, x, 8, tol, seed)? {
            Fiber::Point(u) => probes.push(u),
            Fiber::Sphere(us) => probes.extend(us),
        }
        for u in &probes {
            let in_src = bu_membership(&source, x, u, tol)?;
            let in_tgt = bu_membership(&target, &y, u, tol)?;
            report.require(in_src == in_tgt, || {
                format!(
                    "{}: sample {}: membership differs between source and target",
                    case.name(),
                    idx
                )
            });
        }

        // Fibers agree as sampled sets.
        let fs = bu_fiber(&source, x, 8, tol, seed)?;
        let ft = bu_fiber(&target, &y, 8, tol, seed)?;
        let agree = match (&fs, &ft) {
            (Fiber::Point(a), Fiber::Point(b)) => dist(a, b) <= tol,
            (Fiber::Sphere(a), Fiber::Sphere(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(p, q)| dist(p, q) <= tol)
            }
            _ => false,
        };
        report.require(agree, || {
            format!(
                "{}: sample {}: blow-down fibers differ between source and target",
                case.name(),
                idx
            )
        });

        // Away from the zero locus the blow-down is bijective: the fiber is a
        // single point.
        let s = source.eval(x)?;
        if norm(&s) > tol {
            report.require(matches!(fs, Fiber::Point(_)), || {
                format!(
                    "{}: sample {}: fiber over a nonzero section value is not a point",
                    case.name(),
                    idx
                )
            });
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Global invariants: order independence, the wedge example, functoriality
// ---------------------------------------------------------------------------

/// Verifies that iterated blow-up membership does not depend on the order of
/// the blow-ups: the sections are pulled back totally, so each membership
/// constraint only sees the base point.  Checks all pairwise orders of a
/// two-section chart on sampled points including both zero loci.
pub fn order_independence_verify(samples: usize, tol: f64, seed: u64) -> Result<KnReport> {
    let mut report = KnReport::new("invariants/order".to_string());
    let s1 = ChartSection::new(2, 2, |x: &[f64]| vec![x[0], x[1]])?;
    let s2 = ChartSection::new(2, 2, |x: &[f64]| vec![x[0] - 0.5, x[1]])?;

    let mut base = sample_box(&[-1.0, -1.0], &[1.0, 1.0], samples, seed);
    base.push(vec![0.0, 0.0]);
    base.push(vec![0.5, 0.0]);

    let probes = sample_unit_sphere(2, 5, seed ^ 0x9e37);
    for (idx, x) in base.iter().enumerate() {
        for u1 in &probes {
            for u2 in &probes {
                let first_then_second =
                    bu_membership(&s1, x, u1, tol)? && bu_membership(&s2, x, u2, tol)?;
                let second_then_first =
                    bu_membership(&s2, x, u2, tol)? && bu_membership(&s1, x, u1, tol)?;
                report.require(first_then_second == second_then_first, || {
                    format!("sample {}: membership depended on blow-up order", idx)
                });
            }
        }
        // Fiber enumerations agree as ordered tuples regardless of which
        // factor is enumerated first.
        let f1 = bu_fiber(&s1, x, 8, tol, seed)?;
        let f2 = bu_fiber(&s2, x, 8, tol, seed)?;
        let f1_again = bu_fiber(&s1, x, 8, tol, seed)?;
        let f2_again = bu_fiber(&s2, x, 8, tol, seed)?;
        report.require(f1 == f1_again && f2 == f2_again, || {
            format!("sample {}: fiber enumeration is not reproducible", idx)
        });
    }
    Ok(report)
}

/// Verifies the wedge example: the real oriented blow-up of the two-sphere in
/// the section `s(x, y, z) = (x - 1, 0)` has a full circle fiber over the
/// point `(1, 0, 0)` and the constant direction `(-1, 0)` elsewhere, so the
/// blow-up is the wedge of a circle and a sphere.
pub fn wedge_sphere_verify(samples: usize, tol: f64, seed: u64) -> Result<KnReport> {
    let mut report = KnReport::new("invariants/wedge".to_string());
    let section = ChartSection::new(3, 2, |p: &[f64]| vec![p[0] - 1.0, 0.0])?;

    match bu_fiber(&section, &[1.0, 0.0, 0.0], 16, tol, seed)? {
        Fiber::Sphere(pts) => {
            report.require(pts.len() == 16, || {
                "fiber over (1,0,0) did not enumerate the requested circle sample".to_string()
            });
            for u in &pts {
                report.require(
                    bu_membership(&section, &[1.0, 0.0, 0.0], u, tol)?,
                    || format!("circle direction {:?} rejected over the zero", u),
                );
            }
        }
        Fiber::Point(_) => report.require(false, || {
            "fiber over (1,0,0) collapsed to a point".to_string()
        }),
    }

    for (idx, p) in sample_unit_sphere(3, samples, seed).into_iter().enumerate() {
        if (p[0] - 1.0).abs() <= tol {
            continue;
        }
        match bu_fiber(&section, &p, 16, tol, seed)? {
            Fiber::Point(u) => {
                report.record(dist(&u, &[-1.0, 0.0]), tol, || {
                    format!("sample {}: direction off the wedge point is not (-1, 0)", idx)
                });
            }
            Fiber::Sphere(_) => report.require(false, || {
                format!("sample {}: sphere fiber away from the zero locus", idx)
            }),
        }
    }
    Ok(report)
}

/// Verifies functoriality of torus chart maps: evaluating two maps in
/// sequence agrees with the single map built from the matrix product of the
/// exponent data, to within [`FUNCTORIALITY_TOL`].
pub fn functoriality_verify(samples: usize, seed: u64) -> Result<KnReport> {
    let mut report = KnReport::new("invariants/functoriality".to_string());

    // Nowhere-vanishing coefficient functions on the plane.
    let lam_outer = |x: &[f64]| {
        vec![
            Complex64::from_polar(1.2 + 0.5 * x[0].cos(), 0.7 * x[1]),
            Complex64::from_polar(0.8 + 0.3 * (x[0] + x[1]).sin().abs(), -1.3 * x[0]),
        ]
    };
    let lam_inner = |x: &[f64]| {
        vec![
            Complex64::from_polar(1.0 + 0.4 * x[1].sin().abs(), 0.9 * x[0]),
            Complex64::from_polar(2.0 - 0.6 * x[0].cos(), 0.2 * (x[0] - x[1])),
            Complex64::from_polar(1.5, 1.1 * x[1]),
        ]
    };
    let outer = TorusChartMap::new(vec![vec![1, -2, 0], vec![0, 1, 3]], lam_outer)?;
    let inner = TorusChartMap::new(vec![vec![2, -1], vec![1, 1], vec![0, 2]], lam_inner)?;
    let composite = outer.compose(&inner)?;
    report.require(
        composite.exponents() == [vec![0, -3], vec![1, 7]],
        || "composite exponent matrix is not the matrix product".to_string(),
    );

    let bases = sample_box(&[-1.0, -1.0], &[1.0, 1.0], samples, seed);
    let phases = sample_complex_sphere(1, 2 * samples, seed ^ 0xfeed);
    for (idx, x) in bases.iter().enumerate() {
        let z = [phases[2 * idx][0], phases[2 * idx + 1][0]];
        let mid = kn_map_chart(&inner, x, &z, FUNCTORIALITY_TOL)?;
        let two_step = kn_map_chart(&outer, x, &mid, FUNCTORIALITY_TOL)?;
        let one_step = kn_map_chart(&composite, x, &z, FUNCTORIALITY_TOL)?;
        report.record(cdist(&two_step, &one_step), FUNCTORIALITY_TOL, || {
            format!("sample {}: composite disagrees with matrix-product data", idx)
        });
    }

    // Identity data acts as the identity; exponent -1 with unit coefficient
    // conjugates unit phases (the circle inverse map).
    let identity = TorusChartMap::new(vec![vec![1, 0], vec![0, 1]], |_x: &[f64]| {
        vec![Complex64::new(1.0, 0.0); 2]
    })?;
    let invert = TorusChartMap::new(vec![vec![-1]], |_x: &[f64]| vec![Complex64::new(1.0, 0.0)])?;
    for (idx, x) in bases.iter().enumerate().take(32) {
        let z = [phases[2 * idx][0], phases[2 * idx + 1][0]];
        let same = kn_map_chart(&identity, x, &z, FUNCTORIALITY_TOL)?;
        report.record(cdist(&same, &z), FUNCTORIALITY_TOL, || {
            format!("sample {}: identity data moved the phases", idx)
        });
        let inv = kn_map_chart(&invert, x, &z[..1], FUNCTORIALITY_TOL)?;
        report.record((inv[0] - z[0].conj()).norm(), FUNCTORIALITY_TOL, || {
            format!("sample {}: exponent -1 did not conjugate the unit phase", idx)
        });
    }
    Ok(report)
}

/// Formats a report as a single human-readable line.
pub fn report_line(report: &KnReport) -> String {
    let mut line = String::new();
    let _ = write!(
        line,
        "{}: checked {} identities, max error {:.3e}",
        report.name, report.checked, report.max_error
    );
    if report.passed() {
        let _ = write!(line, ", ok");
    } else {
        let _ = write!(line, ", {} failures", report.failures.len());
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_matches_section_direction() {
        let cs = ChartSection::new(2, 2, |x: &[f64]| vec![x[0], x[1]]).unwrap();
        // Nonzero section: only the positive direction is admitted.
        assert!(bu_membership(&cs, &[1.0, 0.0], &[1.0, 0.0], 1e-9).unwrap());
        assert!(!bu_membership(&cs, &[1.0, 0.0], &[-1.0, 0.0], 1e-9).unwrap());
        assert!(!bu_membership(&cs, &[1.0, 0.0], &[0.0, 1.0], 1e-9).unwrap());
        // Zero of the section: the whole circle is admitted.
        assert!(bu_membership(&cs, &[0.0, 0.0], &[0.0, 1.0], 1e-9).unwrap());
        assert!(bu_membership(&cs, &[0.0, 0.0], &[-1.0, 0.0], 1e-9).unwrap());
        // Non-unit fiber vectors are rejected as input.
        assert!(bu_membership(&cs, &[0.0, 0.0], &[2.0, 0.0], 1e-9).is_err());
    }

    #[test]
    fn fiber_enumeration_shapes() {
        let rank1 = ChartSection::new(1, 1, |x: &[f64]| vec![x[0]]).unwrap();
        match bu_fiber(&rank1, &[0.0], 5, 1e-9, 1).unwrap() {
            Fiber::Sphere(pts) => assert_eq!(pts, vec![vec![1.0], vec![-1.0]]),
            other => panic!("unexpected fiber {:?}", other),
        }
        match bu_fiber(&rank1, &[2.0], 5, 1e-9, 1).unwrap() {
            Fiber::Point(u) => assert_eq!(u, vec![1.0]),
            other => panic!("unexpected fiber {:?}", other),
        }
        let rank3 = ChartSection::new(1, 3, |_x: &[f64]| vec![0.0, 0.0, 0.0]).unwrap();
        match bu_fiber(&rank3, &[0.0], 7, 1e-9, 1).unwrap() {
            Fiber::Sphere(pts) => {
                assert_eq!(pts.len(), 7);
                for p in pts {
                    assert!((norm(&p) - 1.0).abs() < 1e-12);
                }
            }
            other => panic!("unexpected fiber {:?}", other),
        }
    }

    #[test]
    fn torus_map_rejects_vanishing_coefficients() {
        let map = TorusChartMap::new(vec![vec![1]], |x: &[f64]| {
            vec![Complex64::new(x[0], x[1])]
        })
        .unwrap();
        let z = [Complex64::new(1.0, 0.0)];
        assert!(kn_map_chart(&map, &[1.0, 0.0], &z, 1e-9).is_ok());
        assert!(kn_map_chart(&map, &[0.0, 0.0], &z, 1e-9).is_err());
    }

    #[test]
    fn hopf_charts_reconstruct_sphere_points() {
        for m in 0..=2 {
            let report = hopf_verify(m, 200, 1e-9, 42).unwrap();
            assert!(report.passed(), "failures: {:?}", report.failures);
            assert!(report.max_error < 1e-9);
            assert!(report.checked > 0);
        }
    }

    #[test]
    fn circle_splitting_catalog_passes() {
        for case in SplitCase::all() {
            let report = circle_split_verify(case, 200, 1e-9, 7).unwrap();
            assert!(report.passed(), "{}: {:?}", case.name(), report.failures);
        }
    }

    #[test]
    fn split_case_parsing() {
        assert_eq!(SplitCase::parse("catalog:disk-zero").unwrap(), SplitCase::DiskZero);
        assert_eq!(SplitCase::parse("two-bundle").unwrap(), SplitCase::TwoBundle);
        assert!(SplitCase::parse("no-such-case").is_err());
    }

    #[test]
    fn circle_action_matches_diagonal_rotation() {
        for n in 1..=3 {
            let report = s1_action_verify(n, 150, 1e-9, 11).unwrap();
            assert!(report.passed(), "n={}: {:?}", n, report.failures);
        }
    }

    #[test]
    fn cartesian_catalog_passes() {
        for case in CartesianCase::all() {
            let report = strict_cartesian_verify(case, 120, 1e-9, 5).unwrap();
            assert!(report.passed(), "{}: {:?}", case.name(), report.failures);
        }
    }

    #[test]
    fn order_independence_and_wedge() {
        let order = order_independence_verify(80, 1e-9, 3).unwrap();
        assert!(order.passed(), "{:?}", order.failures);
        let wedge = wedge_sphere_verify(120, 1e-9, 3).unwrap();
        assert!(wedge.passed(), "{:?}", wedge.failures);
    }

    #[test]
    fn functoriality_within_tight_tolerance() {
        let report = functoriality_verify(100, 9).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.max_error < FUNCTORIALITY_TOL);
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_unit_cube(3, 10, 99), sample_unit_cube(3, 10, 99));
        assert_ne!(sample_unit_cube(3, 10, 99), sample_unit_cube(3, 10, 100));
        for v in sample_unit_sphere(4, 50, 1) {
            assert!((norm(&v) - 1.0).abs() < 1e-12);
        }
    }
}
