//! Strongly exposed points of a polyhedral dual ball.
//!
//! For a norm `||x|| = max |b(x)|` the dual ball is `conv(±B)` and its
//! strongly exposed points are its vertices. A vertex `f` is exposed by a
//! witness `x_f` with `f(x_f) = 1`, and the norm agrees with `f` on the ball
//! of radius
//!
//! ```text
//! r_f = min_{g != f} (1 - g(x_f)) / ||f - g||_*
//! ```
//!
//! around it. Witnesses are chosen to maximize this radius; the support size
//! and quantized quality of the best witnesses sort the points into classes
//! `D_{n,m}`, each of which is uniformly separated by `2^-m`.
//!
//! Everything here is expressed in the standard basis; a different basis
//! can move points between classes.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Outcome, Relation};
use crate::normspec::{Combinations, NormSpec};
use crate::vector::{Functional, Vector};

/// Radii at or below this count as zero.
pub const RADIUS_TOL: f64 = 1e-9;

/// Tolerance for the geometric checks.
pub const GEOMETRY_TOL: f64 = 1e-9;

/// Largest dimension for the support-subset search.
pub const SUBSET_DIM_CAP: usize = 8;

/// Largest class index tried when quantizing witness quality.
pub const MAX_CLASS: u32 = 60;

/// Seed for the sampled local-agreement check.
pub const SAMPLE_SEED: u64 = 0x5eed;

const RANDOM_DIRECTIONS: usize = 16;

/// Slack on the threshold `2^-m` when assigning classes.
const CLASS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExposedPoint {
    pub f: Functional,
    /// Index of the boundary representative `f` comes from, and whether it is negated.
    pub source_index: usize,
    pub negated: bool,
    pub witness: Vector,
    pub radius: f64,
    /// Smallest support of a positive-radius witness.
    pub n_f: usize,
    pub support_witness: Vector,
    pub support_radius: f64,
    /// Smallest `m` with a witness on `n_f` coordinates of radius at least
    /// `2^-m` and coefficients bounded by `m`.
    pub m_f: u32,
    pub class_witness: Vector,
    pub class_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    /// A convex combination of the other boundary elements.
    NotVertex,
    /// A vertex whose best witness radius is zero.
    ZeroRadius,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectedElement {
    pub f: Functional,
    pub source_index: usize,
    pub negated: bool,
    pub reason: Rejection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExposureAnalysis {
    /// Exposed points of both signs, in lexicographic order of `f`.
    pub points: Vec<ExposedPoint>,
    pub rejected: Vec<RejectedElement>,
}

impl ExposureAnalysis {
    /// Number of `±` pairs among the exposed points.
    pub fn pair_count(&self) -> usize {
        self.points.iter().filter(|p| !p.negated).count()
    }
}

/// The signed boundary `±B`, together with dual distances between vertices.
struct DualBall<'a> {
    spec: &'a NormSpec,
    candidates: Vec<(Functional, usize, bool)>,
}

impl<'a> DualBall<'a> {
    fn new(spec: &'a NormSpec) -> Self {
        let candidates = spec
            .boundary()
            .iter()
            .enumerate()
            .flat_map(|(i, b)| [(b.clone(), i, false), (b.neg(), i, true)])
            .collect();
        Self { spec, candidates }
    }

    /// `f` is a vertex iff it is not a convex combination of the other
    /// signed boundary elements.
    fn is_vertex(&self, index: usize) -> Result<bool> {
        let dim = self.spec.dim();
        let target = self.candidates[index].0.to_dense();
        let others: Vec<Vec<f64>> = self
            .candidates
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, (g, _, _))| g.to_dense())
            .collect();
        let mut lp = LinearProgram::new(others.len()).all_nonnegative();
        for i in 0..dim {
            lp.constrain(others.iter().map(|g| g[i]).collect(), Relation::Eq, target[i]);
        }
        lp.constrain(vec![1.0; others.len()], Relation::Eq, 1.0);
        Ok(matches!(lp.solve()?, Outcome::Infeasible))
    }

    fn vertices(&self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..self.candidates.len() {
            if self.is_vertex(i)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// The other vertices `g` with `||f - g||_*`.
    fn rivals(&self, vertex: usize, vertices: &[usize]) -> Result<Vec<(Functional, f64)>> {
        let f = &self.candidates[vertex].0;
        vertices
            .iter()
            .filter(|&&g| g != vertex)
            .map(|&g| {
                let g = &self.candidates[g].0;
                Ok((g.clone(), self.spec.dual_norm(&f.sub(g)?)?))
            })
            .collect()
    }
}

/// `min_g (1 - g(x)) / ||f - g||_*` over the given rivals.
fn agreement_radius(rivals: &[(Functional, f64)], x: &[f64]) -> f64 {
    rivals
        .iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|(g, d)| (1.0 - g.apply(x)) / d)
        .fold(f64::INFINITY, f64::min)
}

/// Best witness for `f` using only the coordinates in `support`, optionally
/// with `|x_i| <= bound`. Returns the witness and its exact radius.
fn best_witness(
    spec: &NormSpec,
    f: &Functional,
    rivals: &[(Functional, f64)],
    support: &[usize],
    bound: Option<f64>,
) -> Result<Option<(Vector, f64)>> {
    let vars = support.len() + 1;
    let t = support.len();
    let restrict = |g: &Functional| -> Vec<f64> { support.iter().map(|&i| g.coeff(i)).collect() };

    let mut lp = LinearProgram::new(vars);
    let mut row = restrict(f);
    if row.iter().all(|&c| c == 0.0) {
        return Ok(None);
    }
    row.push(0.0);
    lp.constrain(row, Relation::Eq, 1.0);
    for (g, d) in rivals {
        let mut row = restrict(g);
        row.push(*d);
        lp.constrain(row, Relation::Le, 1.0);
    }
    for b in spec.boundary() {
        let row = restrict(b);
        let mut plus = row.clone();
        plus.push(0.0);
        let mut minus: Vec<f64> = row.iter().map(|c| -c).collect();
        minus.push(0.0);
        lp.constrain(plus, Relation::Le, 1.0);
        lp.constrain(minus, Relation::Le, 1.0);
    }
    if let Some(m) = bound {
        for k in 0..t {
            let mut up = vec![0.0; vars];
            up[k] = 1.0;
            let mut down = vec![0.0; vars];
            down[k] = -1.0;
            lp.constrain(up, Relation::Le, m);
            lp.constrain(down, Relation::Le, m);
        }
    }

    let mut objective = vec![0.0; vars];
    objective[t] = 1.0;
    let best_t = match lp.clone().maximize(objective).solve()? {
        Outcome::Optimal { value, .. } => value,
        Outcome::Infeasible => return Ok(None),
        Outcome::Unbounded => return Err(Error::Solver("witness radius unbounded".into())),
    };

    // lexicographically smallest witness among the optimal ones; phase one
    // absorbs the rounding in the pinned values
    let mut floor = vec![0.0; vars];
    floor[t] = 1.0;
    lp.constrain(floor, Relation::Ge, best_t);
    let mut x = vec![0.0; t];
    for k in 0..t {
        let mut objective = vec![0.0; vars];
        objective[k] = -1.0;
        let Outcome::Optimal { x: sol, .. } = lp.clone().maximize(objective).solve()? else {
            return Err(Error::Solver("tie-break lost feasibility".into()));
        };
        x = sol[..t].to_vec();
        let mut cap = vec![0.0; vars];
        cap[k] = 1.0;
        lp.constrain(cap, Relation::Le, sol[k]);
    }

    let mut full = vec![0.0; spec.dim()];
    for (&i, v) in support.iter().zip(&x) {
        full[i] = *v + 0.0;
    }
    let radius = agreement_radius(rivals, &full);
    Ok(Some((Vector::new(full)?, radius)))
}

fn check_subset_cap(spec: &NormSpec) -> Result<()> {
    if spec.dim() > SUBSET_DIM_CAP {
        return Err(Error::CapExceeded {
            dim: spec.dim(),
            cap: SUBSET_DIM_CAP,
        });
    }
    Ok(())
}

/// Smallest support size admitting a positive-radius witness, scanning
/// subsets in lexicographic order and keeping the best radius per size.
fn support_search(spec: &NormSpec, f: &Functional, rivals: &[(Functional, f64)]) -> Result<(usize, Vector, f64)> {
    for n in 1..=spec.dim() {
        let mut best: Option<(Vector, f64)> = None;
        for subset in Combinations::new(spec.dim(), n) {
            if let Some((x, r)) = best_witness(spec, f, rivals, &subset, None)? {
                if r > RADIUS_TOL && best.as_ref().is_none_or(|(_, b)| r > *b + RADIUS_TOL) {
                    best = Some((x, r));
                }
            }
        }
        if let Some((x, r)) = best {
            return Ok((n, x, r));
        }
    }
    Err(Error::Solver(format!("no positive-radius witness for {f}")))
}

/// Smallest `m` such that some `n`-coordinate witness with `|x_i| <= m` has
/// radius at least `2^-m`.
fn class_search(spec: &NormSpec, f: &Functional, rivals: &[(Functional, f64)], n: usize) -> Result<(u32, Vector, f64)> {
    for m in 1..=MAX_CLASS {
        let threshold = 2f64.powi(-(m as i32));
        for subset in Combinations::new(spec.dim(), n) {
            if let Some((x, r)) = best_witness(spec, f, rivals, &subset, Some(m as f64))? {
                if r >= threshold - CLASS_SLACK {
                    return Ok((m, x, r));
                }
            }
        }
    }
    Err(Error::Solver(format!("no witness class up to {MAX_CLASS} for {f}")))
}

/// Strongly exposed points of the dual ball of `spec`, both signs included.
pub fn exposed_points(spec: &NormSpec) -> Result<ExposureAnalysis> {
    check_subset_cap(spec)?;
    let ball = DualBall::new(spec);
    let vertices = ball.vertices()?;
    let mut points = Vec::new();
    let mut rejected = Vec::new();
    for (i, (f, source_index, negated)) in ball.candidates.iter().enumerate() {
        let reject = |reason| RejectedElement {
            f: f.clone(),
            source_index: *source_index,
            negated: *negated,
            reason,
        };
        if !vertices.contains(&i) {
            rejected.push(reject(Rejection::NotVertex));
            continue;
        }
        let rivals = ball.rivals(i, &vertices)?;
        let all: Vec<usize> = (0..spec.dim()).collect();
        let best = best_witness(spec, f, &rivals, &all, None)?;
        let Some((witness, radius)) = best.filter(|(_, r)| *r > RADIUS_TOL) else {
            rejected.push(reject(Rejection::ZeroRadius));
            continue;
        };
        let (n_f, support_witness, support_radius) = support_search(spec, f, &rivals)?;
        let (m_f, class_witness, class_radius) = class_search(spec, f, &rivals, n_f)?;
        points.push(ExposedPoint {
            f: f.clone(),
            source_index: *source_index,
            negated: *negated,
            witness,
            radius,
            n_f,
            support_witness,
            support_radius,
            m_f,
            class_witness,
            class_radius,
        });
    }
    points.sort_by(|a, b| a.f.lex_cmp(&b.f));
    rejected.sort_by(|a, b| a.f.lex_cmp(&b.f));
    Ok(ExposureAnalysis { points, rejected })
}

/// `(n_f, witness, radius)` for a strongly exposed `f`.
pub fn minimal_support_witness(spec: &NormSpec, f: &Functional) -> Result<(usize, Vector, f64)> {
    check_subset_cap(spec)?;
    let ball = DualBall::new(spec);
    let vertices = ball.vertices()?;
    let index = vertices
        .iter()
        .copied()
        .find(|&i| ball.candidates[i].0 == *f)
        .ok_or_else(|| Error::InvalidParameter(format!("{f} is not a vertex of the dual ball")))?;
    let rivals = ball.rivals(index, &vertices)?;
    support_search(spec, f, &rivals)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    /// `||x_f|| = 1`.
    WitnessNorm,
    /// `f(x_f) = 1`.
    WitnessValue,
    /// `r_f <= ||x_f||`.
    RadiusBound,
    /// `r_f` equals the closed-form agreement radius at `x_f`.
    RadiusExact,
    /// `||x_g - x_f|| >= r_f`.
    Separation,
    /// `g(x_f + z) < ||x_f + z|| = f(x_f + z)` for sampled `||z|| = 0.9 r_f`.
    LocalAgreement,
    /// `||f - g||_* > 0` within a class.
    DualDistance,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::WitnessNorm => "witness_norm",
            CheckKind::WitnessValue => "witness_value",
            CheckKind::RadiusBound => "radius_bound",
            CheckKind::RadiusExact => "radius_exact",
            CheckKind::Separation => "separation",
            CheckKind::LocalAgreement => "local_agreement",
            CheckKind::DualDistance => "dual_distance",
        }
    }
}

/// One geometric check. `margin >= 0` (or `> 0` for strict checks) iff it passes.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryCheck {
    pub kind: CheckKind,
    pub first: usize,
    pub second: Option<usize>,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeometryReport {
    pub checks: Vec<GeometryCheck>,
}

impl GeometryReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GeometryCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, kind: CheckKind, first: usize, second: Option<usize>, margin: f64) {
        let pass = margin >= 0.0;
        self.checks.push(GeometryCheck {
            kind,
            first,
            second,
            margin,
            pass,
        });
    }

    fn push_strict(&mut self, kind: CheckKind, first: usize, second: Option<usize>, margin: f64) {
        let pass = margin > 0.0;
        self.checks.push(GeometryCheck {
            kind,
            first,
            second,
            margin,
            pass,
        });
    }
}

fn sample_directions(spec: &NormSpec) -> Result<Vec<Vector>> {
    let dim = spec.dim();
    let mut raw = Vec::new();
    for i in 0..dim {
        raw.push(Vector::basis(dim, i)?);
        raw.push(Vector::basis(dim, i)?.scaled(-1.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    while raw.len() < 2 * dim + RANDOM_DIRECTIONS {
        let v = Vector::new((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        if !v.is_zero() {
            raw.push(v);
        }
    }
    raw.into_iter()
        .map(|v| {
            let n = spec.eval(&v)?;
            Ok(v.scaled(1.0 / n))
        })
        .collect()
}

/// Checks the separation and local-agreement properties of exposure
/// witnesses. Indices in the report refer to positions in `points`.
pub fn verify_lemma_geometry(points: &[ExposedPoint], spec: &NormSpec) -> Result<GeometryReport> {
    let mut report = GeometryReport::default();
    let directions = sample_directions(spec)?;
    // Non-vertex elements never lower the minimum, so the whole signed
    // boundary can stand in for the other dual vertices.
    let signed: Vec<Functional> = spec.boundary().iter().flat_map(|b| [b.clone(), b.neg()]).collect();

    for (i, p) in points.iter().enumerate() {
        let x = &p.witness;
        let norm = spec.eval(x)?;
        report.push(CheckKind::WitnessNorm, i, None, GEOMETRY_TOL - (norm - 1.0).abs());
        report.push(
            CheckKind::WitnessValue,
            i,
            None,
            GEOMETRY_TOL - (p.f.evaluate(x)? - 1.0).abs(),
        );
        report.push(CheckKind::RadiusBound, i, None, norm + GEOMETRY_TOL - p.radius);

        let mut rivals = Vec::new();
        for g in signed.iter().filter(|g| **g != p.f) {
            rivals.push((g.clone(), spec.dual_norm(&p.f.sub(g)?)?));
        }
        let exact = agreement_radius(&rivals, x.coords());
        report.push(CheckKind::RadiusExact, i, None, GEOMETRY_TOL - (p.radius - exact).abs());

        for (j, q) in points.iter().enumerate() {
            if i != j {
                let dist = spec.eval(&q.witness.sub(x)?)?;
                report.push(CheckKind::Separation, i, Some(j), dist - (p.radius - GEOMETRY_TOL));
            }
        }

        let mut worst = f64::INFINITY;
        for dir in &directions {
            let y = x.add(&dir.scaled(0.9 * p.radius))?;
            let ny = spec.eval(&y)?;
            let agree = GEOMETRY_TOL - (ny - p.f.evaluate(&y)?).abs();
            worst = worst.min(agree);
            for (j, q) in points.iter().enumerate() {
                if j != i {
                    worst = worst.min(ny - q.f.evaluate(&y)?);
                }
            }
        }
        if worst.is_finite() {
            report.push_strict(CheckKind::LocalAgreement, i, None, worst);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DnmDecomposition {
    /// `(n, m)` to indices into the point list.
    pub classes: BTreeMap<(usize, u32), Vec<usize>>,
    pub report: GeometryReport,
}

/// Groups points by `(n_f, m_f)` and checks that each class is separated:
/// class witnesses at least `2^-m` apart and distinct functionals.
pub fn decompose_dnm(points: &[ExposedPoint], spec: &NormSpec) -> Result<DnmDecomposition> {
    let mut classes: BTreeMap<(usize, u32), Vec<usize>> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        classes.entry((p.n_f, p.m_f)).or_default().push(i);
    }
    let mut report = GeometryReport::default();
    for (&(_, m), members) in &classes {
        let threshold = 2f64.powi(-(m as i32));
        for &i in members {
            for &j in members {
                if i == j {
                    continue;
                }
                let (a, b) = (&points[i], &points[j]);
                let dist = spec.eval(&b.class_witness.sub(&a.class_witness)?)?;
                report.push(CheckKind::Separation, i, Some(j), dist - (threshold - GEOMETRY_TOL));
                let dual = spec.dual_norm(&a.f.sub(&b.f)?)?;
                report.push_strict(CheckKind::DualDistance, i, Some(j), dual);
            }
        }
    }
    Ok(DnmDecomposition { classes, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;
    use nalgebra::{DMatrix, DVector};
    use rand::Rng;

    fn spec(dim: usize, rows: &[&[f64]]) -> NormSpec {
        let boundary = rows.iter().map(|r| Functional::from_dense(r).unwrap()).collect();
        NormSpec::new("t", dim, boundary).unwrap()
    }

    fn random_spec(rng: &mut ChaCha8Rng, dim: usize, extra: usize) -> NormSpec {
        let mut gens: Vec<Functional> = (0..dim).map(|i| Functional::coordinate(dim, i).unwrap()).collect();
        for _ in 0..extra {
            let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            gens.push(Functional::from_dense(&c).unwrap());
        }
        NormSpec::from_generators("rand", dim, &gens, Default::default())
            .unwrap()
            .0
    }

    /// Vertex oracle: `f` is a dual vertex iff the primal vertices it
    /// attains span the whole space (its face is a facet).
    fn facet_vertices(spec: &NormSpec) -> usize {
        let mut count = 0;
        for b in spec.boundary() {
            let on_face: Vec<Vec<f64>> = spec
                .unit_ball_vertices()
                .iter()
                .filter(|v| b.evaluate(v).unwrap() >= 1.0 - 1e-9)
                .map(|v| v.coords().to_vec())
                .collect();
            if rank(&on_face, 1e-9) == spec.dim() {
                count += 1;
            }
        }
        count
    }

    /// Radius oracle: enumerate basic solutions of the `(x, t)` program
    /// `f(x) = 1`, `g(x) + t ||f-g|| <= 1` for every other signed element.
    fn brute_force_radius(spec: &NormSpec, f: &Functional) -> f64 {
        let d = spec.dim();
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for b in spec.boundary() {
            for g in [b.clone(), b.neg()] {
                if g != *f {
                    let mut row = g.to_dense();
                    row.push(spec.dual_norm(&f.sub(&g).unwrap()).unwrap());
                    rows.push((row, 1.0));
                }
            }
        }
        let mut eq = f.to_dense();
        eq.push(0.0);
        let mut best = f64::NEG_INFINITY;
        for subset in Combinations::new(rows.len(), d) {
            let mut m = DMatrix::zeros(d + 1, d + 1);
            let mut rhs = DVector::zeros(d + 1);
            for c in 0..=d {
                m[(0, c)] = eq[c];
            }
            rhs[0] = 1.0;
            for (r, &k) in subset.iter().enumerate() {
                for c in 0..=d {
                    m[(r + 1, c)] = rows[k].0[c];
                }
                rhs[r + 1] = rows[k].1;
            }
            let Some(sol) = m.lu().solve(&rhs) else { continue };
            if sol.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let feasible = rows
                .iter()
                .all(|(row, b)| row.iter().zip(sol.iter()).map(|(a, x)| a * x).sum::<f64>() <= b + 1e-9);
            if feasible {
                best = best.max(sol[d]);
            }
        }
        best
    }

    #[test]
    fn canonical_three() {
        // Hand maximization for f = e*_0: x_0 = 1 and |x_i| + 2t <= 1 for i > 0
        // (rivals ±e*_i at dual distance 2), while -x_0 + 2t <= 1 gives t <= 1.
        // So t = 1/2 with x = e_0, attained on a single coordinate.
        let spec = NormSpec::canonical(3).unwrap();
        let analysis = exposed_points(&spec).unwrap();
        assert_eq!(analysis.points.len(), 6);
        assert!(analysis.rejected.is_empty());
        for p in &analysis.points {
            let i = p.source_index;
            let sign = if p.negated { -1.0 } else { 1.0 };
            assert_eq!(p.witness, Vector::basis(3, i).unwrap().scaled(sign));
            assert!((p.radius - 0.5).abs() < 1e-9);
            assert_eq!((p.n_f, p.m_f), (1, 1));
            assert_eq!(p.class_witness, p.witness);
        }
        // -e*_2 < -e*_1 < -e*_0 < e*_2 < e*_1 < e*_0 lexicographically
        let order: Vec<(usize, bool)> = analysis.points.iter().map(|p| (p.source_index, p.negated)).collect();
        assert_eq!(
            order,
            vec![(0, true), (1, true), (2, true), (2, false), (1, false), (0, false)]
        );

        let report = verify_lemma_geometry(&analysis.points, &spec).unwrap();
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        for c in report.checks.iter().filter(|c| c.kind == CheckKind::Separation) {
            // distances are 1 or 2, against r_f = 1/2
            let d = c.margin + 0.5 - GEOMETRY_TOL;
            assert!((d - 1.0).abs() < 1e-12 || (d - 2.0).abs() < 1e-12);
        }

        let dnm = decompose_dnm(&analysis.points, &spec).unwrap();
        assert_eq!(dnm.classes.len(), 1);
        assert_eq!(dnm.classes[&(1, 1)], (0..6).collect::<Vec<_>>());
        assert!(dnm.report.passed());

        let (n, x, r) = minimal_support_witness(&spec, &Functional::coordinate(3, 0).unwrap()).unwrap();
        assert_eq!((n, x), (1, Vector::basis(3, 0).unwrap()));
        assert!((r - 0.5).abs() < 1e-9);
    }

    #[test]
    fn one_dimensional() {
        let spec = NormSpec::canonical(1).unwrap();
        let analysis = exposed_points(&spec).unwrap();
        assert_eq!(analysis.points.len(), 2);
        for p in &analysis.points {
            assert!((p.radius - 1.0).abs() < 1e-9);
        }
        let report = verify_lemma_geometry(&analysis.points[1..], &spec).unwrap();
        assert!(report.passed());
        assert!(!report.checks.iter().any(|c| c.kind == CheckKind::Separation));
    }

    #[test]
    fn dual_square() {
        // ||x|| = |x0| + |x1|, dual ball the square with vertices (±1,±1).
        // For f = (1,1), e_0 is normed by f but also by (1,-1), so its radius
        // is 0. On the face {x0 + x1 = 1, x0, x1 >= 0} the rivals give
        // min(2 x1, 2 x0, 1)/2 ... maximized at (1/2, 1/2) with radius 1/2.
        let spec = spec(2, &[&[1.0, 1.0], &[1.0, -1.0]]);
        let analysis = exposed_points(&spec).unwrap();
        assert_eq!(analysis.points.len(), 4);
        let f = Functional::from_dense(&[1.0, 1.0]).unwrap();
        let p = analysis.points.iter().find(|p| p.f == f).unwrap();
        assert_eq!(p.witness.coords(), &[0.5, 0.5]);
        assert!((p.radius - 0.5).abs() < 1e-9);
        assert!((brute_force_radius(&spec, &f) - 0.5).abs() < 1e-9);
        // every single coordinate witness lies on an edge shared with a rival
        assert_eq!(p.n_f, 2);
        assert_eq!(p.m_f, 1);
        assert_eq!(minimal_support_witness(&spec, &f).unwrap().0, 2);
        let dnm = decompose_dnm(&analysis.points, &spec).unwrap();
        assert_eq!(dnm.classes.keys().copied().collect::<Vec<_>>(), vec![(2, 1)]);
        assert!(dnm.report.passed());
        assert!(verify_lemma_geometry(&analysis.points, &spec).unwrap().passed());
    }

    #[test]
    fn non_vertex_representative_is_reported() {
        // (1,0) is the midpoint of (1,1) and (1,-1)
        let spec = spec(2, &[&[1.0, 1.0], &[1.0, -1.0], &[1.0, 0.0]]);
        let analysis = exposed_points(&spec).unwrap();
        assert_eq!(analysis.pair_count(), 2);
        assert_eq!(analysis.rejected.len(), 2);
        assert!(analysis
            .rejected
            .iter()
            .all(|r| r.reason == Rejection::NotVertex && r.source_index == 2));
        let err = minimal_support_witness(&spec, &Functional::from_dense(&[1.0, 0.0]).unwrap());
        assert!(err.is_err());
    }

    #[test]
    fn inflated_radius_fails() {
        let spec = NormSpec::canonical(3).unwrap();
        let mut points = exposed_points(&spec).unwrap().points;
        points[2].radius *= 1.1;
        let report = verify_lemma_geometry(&points, &spec).unwrap();
        let failed: Vec<CheckKind> = report.failures().map(|c| c.kind).collect();
        assert!(failed.contains(&CheckKind::RadiusExact));
        assert!(report.failures().all(|c| c.first == 2));
    }

    #[test]
    fn empty_and_cap() {
        let spec = NormSpec::canonical(2).unwrap();
        let dnm = decompose_dnm(&[], &spec).unwrap();
        assert!(dnm.classes.is_empty() && dnm.report.checks.is_empty());

        let config = crate::normspec::VertexConfig {
            dim_cap: 9,
            ..Default::default()
        };
        let boundary = (0..9).map(|i| Functional::coordinate(9, i).unwrap()).collect();
        let big = NormSpec::with_config("big", 9, boundary, config).unwrap();
        assert_eq!(exposed_points(&big).unwrap_err(), Error::CapExceeded { dim: 9, cap: 8 });
    }

    #[test]
    fn random_specs_against_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for case in 0..40 {
            let dim = 2 + case % 2;
            let spec = random_spec(&mut rng, dim, 1 + case % 5);
            let analysis = exposed_points(&spec).unwrap();
            assert_eq!(analysis.pair_count(), facet_vertices(&spec), "case {case}");
            assert!(analysis.pair_count() <= spec.boundary().len());
            assert_eq!(
                analysis.points.len() + analysis.rejected.len(),
                2 * spec.boundary().len()
            );

            for p in &analysis.points {
                let oracle = brute_force_radius(&spec, &p.f);
                assert!(
                    (p.radius - oracle).abs() < 1e-9,
                    "case {case}: {} vs {oracle}",
                    p.radius
                );
                assert!(p.support_radius > RADIUS_TOL && p.support_witness.support_size() <= p.n_f);
                assert!(p.class_radius >= 2f64.powi(-(p.m_f as i32)) - 1e-9);
                assert!(p.class_witness.sup_norm() <= p.m_f as f64 + 1e-9);
            }

            // the exposed points form a boundary
            for v in spec.unit_ball_vertices().iter() {
                assert!(analysis.points.iter().any(|p| p.f.evaluate(v).unwrap() >= 1.0 - 1e-9));
            }

            let report = verify_lemma_geometry(&analysis.points, &spec).unwrap();
            assert!(
                report.passed(),
                "case {case}: {:?}",
                report.failures().collect::<Vec<_>>()
            );
            let dnm = decompose_dnm(&analysis.points, &spec).unwrap();
            assert!(dnm.report.passed());
            assert_eq!(dnm.classes.values().map(Vec::len).sum::<usize>(), analysis.points.len());
        }
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = random_spec(&mut rng, 3, 4);
        assert_eq!(exposed_points(&spec).unwrap(), exposed_points(&spec).unwrap());
    }
}
