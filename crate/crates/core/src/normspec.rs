//! Norms given by a finite symmetric boundary.
//!
//! A [`NormSpec`] stores one representative `b` per pair `±b`, and its norm is
//! `||x|| = max_b |b(x)|`. The unit ball is the polytope `{x : |b(x)| <= 1}`;
//! its vertices are enumerated once at construction and reused for dual norms,
//! attainment checks and norm-ratio extremes.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{self, Lu};
use crate::vector::{check_dim, Functional, Vector};

pub const DEFAULT_DIM_CAP: usize = 6;
pub const DEFAULT_DEDUP_TOL: f64 = 1e-9;

/// Feasibility slack for vertex candidates and the attainment test.
pub const VERTEX_TOL: f64 = 1e-9;

const RANK_TOL: f64 = 1e-12;

/// Limits for unit-ball vertex enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexConfig {
    pub dim_cap: usize,
    /// Max-coordinate distance under which two vertices are merged.
    pub dedup_tol: f64,
}

impl Default for VertexConfig {
    fn default() -> Self {
        Self {
            dim_cap: DEFAULT_DIM_CAP,
            dedup_tol: DEFAULT_DEDUP_TOL,
        }
    }
}

/// Vertices of a unit ball, closed under negation, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    vertices: Vec<Vector>,
}

impl VertexSet {
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector> {
        self.vertices.iter()
    }
}

#[derive(Debug, Clone)]
pub struct NormSpec {
    name: String,
    dim: usize,
    boundary: Vec<Functional>,
    config: VertexConfig,
    vertices: VertexSet,
}

impl NormSpec {
    pub fn new(name: impl Into<String>, dim: usize, boundary: Vec<Functional>) -> Result<Self> {
        Self::with_config(name, dim, boundary, VertexConfig::default())
    }

    /// Validates the boundary and enumerates the unit-ball vertices.
    ///
    /// Rejects empty or rank-deficient boundaries, repeated representatives
    /// (including `b` next to `-b`), and any element that never reaches the
    /// norm on the unit sphere.
    pub fn with_config(
        name: impl Into<String>,
        dim: usize,
        boundary: Vec<Functional>,
        config: VertexConfig,
    ) -> Result<Self> {
        let spec = Self::unvalidated(name.into(), dim, boundary, config)?;
        for (index, b) in spec.boundary.iter().enumerate() {
            let best = spec.max_over_vertices(b);
            if best < 1.0 - VERTEX_TOL {
                return Err(Error::Dominated { index, best });
            }
        }
        Ok(spec)
    }

    /// Builds the norm `max_g |g(x)|` over arbitrary generators, keeping only
    /// the generators that attain it. Zero and repeated generators are dropped.
    ///
    /// Returns the spec together with the indices of the kept generators.
    pub fn from_generators(
        name: impl Into<String>,
        dim: usize,
        generators: &[Functional],
        config: VertexConfig,
    ) -> Result<(Self, Vec<usize>)> {
        let mut distinct: Vec<usize> = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            check_dim(dim, g.dim())?;
            if g.is_zero() {
                continue;
            }
            let neg = g.neg();
            if distinct.iter().any(|&j| generators[j] == *g || generators[j] == neg) {
                continue;
            }
            distinct.push(i);
        }
        let all: Vec<Functional> = distinct.iter().map(|&i| generators[i].clone()).collect();
        let full = Self::unvalidated(name.into(), dim, all, config)?;
        let kept: Vec<usize> = distinct
            .iter()
            .zip(full.boundary.iter())
            .filter(|(_, b)| full.max_over_vertices(b) >= 1.0 - VERTEX_TOL)
            .map(|(&i, _)| i)
            .collect();
        let boundary = kept.iter().map(|&i| generators[i].clone()).collect();
        let spec = Self::with_config(full.name, dim, boundary, config)?;
        Ok((spec, kept))
    }

    fn unvalidated(name: String, dim: usize, boundary: Vec<Functional>, config: VertexConfig) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        for b in &boundary {
            check_dim(dim, b.dim())?;
        }
        for i in 0..boundary.len() {
            let neg = boundary[i].neg();
            for j in i + 1..boundary.len() {
                if boundary[j] == boundary[i] || boundary[j] == neg {
                    return Err(Error::DuplicateBoundary { first: i, second: j });
                }
            }
        }
        let rows: Vec<Vec<f64>> = boundary.iter().map(Functional::to_dense).collect();
        let rank = linalg::rank(&rows, RANK_TOL);
        if rank < dim {
            return Err(Error::RankDeficient { rank, dim });
        }
        if dim > config.dim_cap {
            return Err(Error::CapExceeded {
                dim,
                cap: config.dim_cap,
            });
        }
        let vertices = enumerate_vertices(dim, &rows, config.dedup_tol);
        Ok(Self {
            name,
            dim,
            boundary,
            config,
            vertices,
        })
    }

    /// The sup-norm on `R^dim`, with boundary `{e*_0, ..., e*_{dim-1}}`.
    pub fn canonical(dim: usize) -> Result<Self> {
        let boundary = (0..dim)
            .map(|i| Functional::coordinate(dim, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(format!("canonical{dim}"), dim, boundary)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boundary(&self) -> &[Functional] {
        &self.boundary
    }

    pub fn config(&self) -> VertexConfig {
        self.config
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(self.eval_coords(x.coords()))
    }

    pub(crate) fn eval_coords(&self, coords: &[f64]) -> f64 {
        self.boundary.iter().fold(0.0, |m, b| m.max(b.apply(coords).abs()))
    }

    pub fn unit_ball_vertices(&self) -> &VertexSet {
        &self.vertices
    }

    /// `sup { f(x) : ||x|| <= 1 }`, attained at a unit-ball vertex.
    pub fn dual_norm(&self, f: &Functional) -> Result<f64> {
        check_dim(self.dim, f.dim())?;
        Ok(self.max_over_vertices(f).max(0.0))
    }

    fn max_over_vertices(&self, f: &Functional) -> f64 {
        self.vertices
            .iter()
            .map(|v| f.apply(v.coords()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `L = max_i ||e*_i||`, so that `||f|| <= L ||f||_1` for every `f`.
    pub fn basis_constant(&self) -> f64 {
        self.vertices.iter().map(Vector::sup_norm).fold(0.0, f64::max)
    }

    /// Indices of boundary representatives `b` with `|b(x)| >= ||x|| (1 - tol)`.
    pub fn attaining(&self, x: &Vector, tol: f64) -> Result<Vec<usize>> {
        let norm = self.eval(x)?;
        Ok(self
            .boundary
            .iter()
            .enumerate()
            .filter(|(_, b)| b.apply(x.coords()).abs() >= norm * (1.0 - tol))
            .map(|(i, _)| i)
            .collect())
    }
}

pub fn eval_norm(spec: &NormSpec, x: &Vector) -> Result<f64> {
    spec.eval(x)
}

pub fn unit_ball_vertices(spec: &NormSpec) -> &VertexSet {
    spec.unit_ball_vertices()
}

pub fn dual_norm(spec: &NormSpec, f: &Functional) -> Result<f64> {
    spec.dual_norm(f)
}

pub fn basis_constant_l(spec: &NormSpec) -> f64 {
    spec.basis_constant()
}

/// Extremes of `||x||_a / ||x||_b` over nonzero `x`.
///
/// Both norms are polyhedral, so the ratio is extremal on the vertices of
/// one of the two unit balls.
pub fn equivalence_ratio(a: &NormSpec, b: &NormSpec) -> Result<(f64, f64)> {
    check_dim(a.dim(), b.dim())?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in a.vertices.iter().chain(b.vertices.iter()) {
        let ratio = a.eval_coords(v.coords()) / b.eval_coords(v.coords());
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}

/// Solves every square subsystem `b_S(x) = s` over representative subsets
/// `S` and sign patterns `s`, keeping the feasible solutions.
fn enumerate_vertices(dim: usize, rows: &[Vec<f64>], dedup_tol: f64) -> VertexSet {
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut rhs = vec![0.0; dim];
    for subset in Combinations::new(rows.len(), dim) {
        let square: Vec<Vec<f64>> = subset.iter().map(|&i| rows[i].clone()).collect();
        let Some(lu) = Lu::factor(&square) else {
            continue;
        };
        for pattern in 0u32..(1u32 << dim) {
            for (k, r) in rhs.iter_mut().enumerate() {
                *r = if pattern >> k & 1 == 1 { -1.0 } else { 1.0 };
            }
            let x: Vec<f64> = lu.solve(&rhs).into_iter().map(|c| c + 0.0).collect();
            let feasible = rows.iter().all(|row| dot(row, &x).abs() <= 1.0 + VERTEX_TOL);
            if feasible && !found.iter().any(|v| max_abs_diff(v, &x) <= dedup_tol) {
                found.push(x);
            }
        }
    }
    found.sort_by(|a, b| lex_cmp(a, b));
    VertexSet {
        vertices: found
            .into_iter()
            .map(|c| Vector::new(c).expect("finite solution of nonsingular system"))
            .collect(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Lexicographic k-subsets of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dense(rows: &[&[f64]]) -> Vec<Functional> {
        rows.iter().map(|r| Functional::from_dense(r).unwrap()).collect()
    }

    fn three_functional() -> NormSpec {
        NormSpec::new("three", 2, dense(&[&[1.0, 0.0], &[0.0, 1.0], &[0.8, 0.6]])).unwrap()
    }

    fn coords(set: &VertexSet) -> Vec<Vec<f64>> {
        set.iter().map(|v| v.coords().to_vec()).collect()
    }

    fn contains(set: &VertexSet, p: &[f64]) -> bool {
        set.iter().any(|v| max_abs_diff(v.coords(), p) < 1e-12)
    }

    /// All `dim`-subsets of the `2k` half-space constraints, no pairing of signs.
    fn brute_force_vertices(spec: &NormSpec) -> Vec<Vec<f64>> {
        let d = spec.dim();
        let mut constraints = Vec::new();
        for b in spec.boundary() {
            constraints.push(b.to_dense());
            constraints.push(b.neg().to_dense());
        }
        let mut out: Vec<Vec<f64>> = Vec::new();
        for subset in Combinations::new(constraints.len(), d) {
            let m = nalgebra::DMatrix::from_fn(d, d, |r, c| constraints[subset[r]][c]);
            let Some(x) = m.lu().solve(&nalgebra::DVector::from_element(d, 1.0)) else {
                continue;
            };
            let x: Vec<f64> = x.iter().copied().collect();
            if x.iter().any(|v| !v.is_finite()) {
                continue;
            }
            if constraints.iter().all(|c| dot(c, &x) <= 1.0 + 1e-9) && !out.iter().any(|v| max_abs_diff(v, &x) <= 1e-9)
            {
                out.push(x);
            }
        }
        out
    }

    fn same_points(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
        a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| max_abs_diff(p, q) < 1e-9))
    }

    #[test]
    fn eval_examples() {
        let cube = NormSpec::canonical(3).unwrap();
        assert_eq!(cube.eval(&Vector::new(vec![1.0, -2.0, 0.5]).unwrap()).unwrap(), 2.0);
        assert_eq!(cube.eval(&Vector::zeros(3).unwrap()).unwrap(), 0.0);
        let n = three_functional();
        assert_relative_eq!(
            n.eval(&Vector::new(vec![1.0, 1.0]).unwrap()).unwrap(),
            1.4,
            epsilon = 1e-15
        );
        assert!(n.eval(&Vector::zeros(3).unwrap()).is_err());
    }

    #[test]
    fn cube_vertices() {
        let v = NormSpec::canonical(2).unwrap();
        assert_eq!(
            coords(v.unit_ball_vertices()),
            vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]]
        );
    }

    #[test]
    fn hexagon_vertices() {
        let n = NormSpec::new("hex", 2, dense(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])).unwrap();
        let set = n.unit_ball_vertices();
        assert_eq!(set.len(), 6);
        for p in [
            [1.0, 0.0],
            [0.0, 1.0],
            [-1.0, 0.0],
            [0.0, -1.0],
            [1.0, -1.0],
            [-1.0, 1.0],
        ] {
            assert!(contains(set, &p), "missing {p:?}");
        }

        let set = three_functional().unit_ball_vertices().clone();
        assert_eq!(set.len(), 6);
        assert!(contains(&set, &[0.5, 1.0]));
        assert!(contains(&set, &[1.0, 1.0 / 3.0]));
        assert!(contains(&set, &[-1.0, 1.0]));
    }

    #[test]
    fn dual_norm_examples() {
        let cube = NormSpec::canonical(3).unwrap();
        let f = Functional::from_dense(&[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(cube.dual_norm(&f).unwrap(), 2.0);
        let g = Functional::from_dense(&[0.5, 0.5, 0.25]).unwrap();
        assert_eq!(cube.dual_norm(&g).unwrap(), 1.25);
        assert_eq!(cube.dual_norm(&Functional::zero(3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn basis_constant_examples() {
        assert_eq!(NormSpec::canonical(4).unwrap().basis_constant(), 1.0);
        assert_eq!(three_functional().basis_constant(), 1.0);
        let stretched = NormSpec::new("stretched", 2, dense(&[&[0.5, 0.0], &[0.0, 1.0]])).unwrap();
        assert_eq!(stretched.basis_constant(), 2.0);
        assert!(contains(stretched.unit_ball_vertices(), &[2.0, 1.0]));
    }

    #[test]
    fn ratio_examples() {
        let cube = NormSpec::canonical(2).unwrap();
        assert_eq!(equivalence_ratio(&cube, &cube).unwrap(), (1.0, 1.0));

        let grown = NormSpec::new("grown", 2, dense(&[&[1.05, 0.0], &[0.0, 1.05]])).unwrap();
        let (lo, hi) = equivalence_ratio(&cube, &grown).unwrap();
        assert_relative_eq!(lo, 1.0 / 1.05, max_relative = 1e-15);
        assert_relative_eq!(hi, 1.0 / 1.05, max_relative = 1e-15);

        let shrunk = NormSpec::new("shrunk", 2, dense(&[&[1.0 / 1.05, 0.0], &[0.0, 1.0 / 1.05]])).unwrap();
        let (lo, hi) = equivalence_ratio(&cube, &shrunk).unwrap();
        assert_relative_eq!(lo, 1.05, max_relative = 1e-15);
        assert_relative_eq!(hi, 1.05, max_relative = 1e-15);

        let l1 = NormSpec::new("l1", 2, dense(&[&[1.0, 1.0], &[1.0, -1.0]])).unwrap();
        assert_eq!(equivalence_ratio(&cube, &l1).unwrap(), (0.5, 1.0));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(NormSpec::new("e", 2, vec![]).unwrap_err(), Error::EmptyBoundary);
        assert!(matches!(
            NormSpec::new("r", 2, dense(&[&[1.0, 1.0], &[2.0, 2.0]])),
            Err(Error::RankDeficient { rank: 1, dim: 2 })
        ));
        assert!(matches!(
            NormSpec::new("d", 2, dense(&[&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.0]])),
            Err(Error::Dominated { index: 2, .. })
        ));
        assert!(matches!(
            NormSpec::new("dup", 2, dense(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0]])),
            Err(Error::DuplicateBoundary { first: 0, second: 2 })
        ));
        assert!(matches!(
            NormSpec::canonical(7),
            Err(Error::CapExceeded { dim: 7, cap: 6 })
        ));
        let config = VertexConfig {
            dim_cap: 7,
            ..VertexConfig::default()
        };
        let boundary = (0..7).map(|i| Functional::coordinate(7, i).unwrap()).collect();
        assert!(NormSpec::with_config("c7", 7, boundary, config).is_ok());
    }

    #[test]
    fn from_generators_prunes_dominated() {
        let gens = dense(&[&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.0], &[0.0, -1.0], &[0.8, 0.6]]);
        let (spec, kept) = NormSpec::from_generators("g", 2, &gens, VertexConfig::default()).unwrap();
        assert_eq!(kept, vec![0, 1, 4]);
        assert_eq!(spec.boundary().len(), 3);
    }

    #[test]
    fn matches_brute_force_on_fixtures() {
        for spec in [
            NormSpec::canonical(3).unwrap(),
            three_functional(),
            NormSpec::new(
                "oct",
                3,
                dense(&[
                    &[1.0, 1.0, 1.0],
                    &[1.0, -1.0, 1.0],
                    &[1.0, 1.0, -1.0],
                    &[1.0, -1.0, -1.0],
                ]),
            )
            .unwrap(),
        ] {
            assert!(
                same_points(&coords(spec.unit_ball_vertices()), &brute_force_vertices(&spec)),
                "{}",
                spec.name()
            );
        }
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(Combinations::new(3, 0).count(), 1);
    }

    fn random_spec() -> impl Strategy<Value = NormSpec> {
        (1usize..=3, 0usize..5).prop_flat_map(|(dim, extra)| {
            proptest::collection::vec(proptest::collection::vec(-4i32..=4, dim), dim + extra).prop_map(move |rows| {
                let mut gens: Vec<Functional> = (0..dim).map(|i| Functional::coordinate(dim, i).unwrap()).collect();
                gens.extend(rows.iter().map(|r| {
                    let c: Vec<f64> = r.iter().map(|&k| k as f64 / 4.0).collect();
                    Functional::from_dense(&c).unwrap()
                }));
                NormSpec::from_generators("rand", dim, &gens, VertexConfig::default())
                    .unwrap()
                    .0
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn vertices_match_brute_force(spec in random_spec()) {
            prop_assert!(same_points(&coords(spec.unit_ball_vertices()), &brute_force_vertices(&spec)));
        }

        #[test]
        fn vertices_are_unit_and_symmetric(spec in random_spec()) {
            let set = spec.unit_ball_vertices();
            for v in set.iter() {
                prop_assert!((spec.eval(v).unwrap() - 1.0).abs() <= 1e-9);
                let neg = v.scaled(-1.0);
                prop_assert!(set.iter().any(|w| max_abs_diff(w.coords(), neg.coords()) <= 1e-9));
            }
        }

        #[test]
        fn boundary_elements_have_unit_dual_norm(spec in random_spec()) {
            for b in spec.boundary() {
                prop_assert!((spec.dual_norm(b).unwrap() - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn dual_norm_bounded_by_basis_constant(
            spec in random_spec(),
            c in proptest::collection::vec(-3.0f64..3.0, 3),
        ) {
            let f = Functional::from_dense(&c[..spec.dim()]).unwrap();
            let l = spec.basis_constant();
            prop_assert!(spec.dual_norm(&f).unwrap() <= l * f.l1_norm() + 1e-9);
        }

        #[test]
        fn norm_axioms(
            spec in random_spec(),
            x in proptest::collection::vec(-5.0f64..5.0, 3),
            y in proptest::collection::vec(-5.0f64..5.0, 3),
            a in -4.0f64..4.0,
        ) {
            let d = spec.dim();
            let xv = Vector::new(x[..d].to_vec()).unwrap();
            let yv = Vector::new(y[..d].to_vec()).unwrap();
            let nx = spec.eval(&xv).unwrap();
            let ny = spec.eval(&yv).unwrap();
            let scaled = spec.eval(&xv.scaled(a)).unwrap();
            prop_assert!((scaled - a.abs() * nx).abs() <= 1e-10 * (a.abs() * nx).max(1e-300));
            let sum = spec.eval(&xv.add(&yv).unwrap()).unwrap();
            prop_assert!(sum <= nx + ny + 1e-10 * (nx + ny).max(1.0));
        }
    }
}
