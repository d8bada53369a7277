//! ε-approximation of a boundary norm by a norm whose boundary functionals
//! are leveled (and therefore sparser) versions of the original ones.
//!
//! Each source boundary element `f` lands in the smallest ℓ1 class
//! `r = ceil(||f||_1)`. We pick the smallest level `n` with
//! `||f - j(f,n,m)|| < 2^-(r+2) ε` for every `m > n`, and add the scaled
//! functionals `(1 + 2^-r ε) j(f,n,m)` to the new boundary. The resulting
//! norm `|||x||| = max |s(x)|` then satisfies
//!
//! ```text
//! (1 + 2^-r ε)(1 - 2^-(r+2) ε) ||x||  <=  |||x|||  <=  (1 + ε) ||x||
//! ```
//!
//! where `r` is the class of a source element attaining the norm at `x`.

use crate::error::{Error, Result};
use crate::leveling::LevelingDecomposition;
use crate::normspec::{NormSpec, VERTEX_TOL};
use crate::vector::{linear_combine, Functional, Vector};

/// Tolerance on `||f|| = 1` for inputs of [`minimal_n`].
pub const UNIT_DUAL_TOL: f64 = 1e-9;

/// Relative slack when rounding `||f||_1` up to its integer class.
const CLASS_SLACK: f64 = 1e-12;

/// Absolute slack for the sandwich inequalities.
pub const SANDWICH_TOL: f64 = 1e-9;

/// Smallest positive integer `r` with `l1 <= r`, up to a relative `1e-12`.
pub fn r_class(l1: f64) -> u32 {
    let r = (l1 * (1.0 - CLASS_SLACK)).ceil();
    r.max(1.0) as u32
}

/// `2^-(r+2) ε`, the admissible dual distance between `f` and `j(f,n,m)`.
pub fn membership_bound(r: u32, epsilon: f64) -> f64 {
    epsilon * 2f64.powi(-(r as i32 + 2))
}

/// `1 + 2^-r ε`.
pub fn class_scale(r: u32, epsilon: f64) -> f64 {
    1.0 + epsilon * 2f64.powi(-(r as i32))
}

/// `(1 + 2^-r ε)(1 - 2^-(r+2) ε)`, the guaranteed lower ratio for class `r`.
pub fn lower_factor(r: u32, epsilon: f64) -> f64 {
    class_scale(r, epsilon) * (1.0 - membership_bound(r, epsilon))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimalLevel {
    pub r: u32,
    pub n: usize,
    /// Termination index `M` of the leveling; `n == depth` means `h(f,n) == f`.
    pub depth: usize,
}

/// Class `r` and smallest admissible level `n` for a unit-dual-norm `f`.
pub fn minimal_n(spec: &NormSpec, f: &Functional, epsilon: f64) -> Result<MinimalLevel> {
    check_epsilon(epsilon)?;
    let dual = spec.dual_norm(f)?;
    if (dual - 1.0).abs() > UNIT_DUAL_TOL {
        return Err(Error::InvalidParameter(format!(
            "functional must have unit dual norm, got {dual}"
        )));
    }
    let r = r_class(f.l1_norm());
    let bound = membership_bound(r, epsilon);
    let levels = LevelingDecomposition::new(f)?;
    let depth = levels.depth();
    'level: for n in 1..depth {
        for m in n + 1..=depth {
            if spec.dual_norm(&f.sub(&levels.j(n, m)?)?)? >= bound {
                continue 'level;
            }
        }
        return Ok(MinimalLevel { r, n, depth });
    }
    if levels.residual_l1(depth)? != 0.0 {
        return Err(Error::NoAdmissibleLevel(format!(
            "{f} keeps a residual at its last level"
        )));
    }
    Ok(MinimalLevel { r, n: depth, depth })
}

/// One functional of the approximating boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxElement {
    /// Index of the source boundary representative.
    pub source_index: usize,
    pub f_source: Functional,
    pub r: u32,
    pub n: usize,
    /// `m` of `j(f,n,m)`; equals `n` when the element is `f` itself.
    pub m: usize,
    pub scale: f64,
    /// `scale * j(f,n,m)`.
    pub scaled: Functional,
}

impl ApproxElement {
    /// `j(f,n,m)` recovered from the stored scaled functional.
    pub fn unscaled(&self) -> Functional {
        self.scaled.scaled(1.0 / self.scale)
    }
}

#[derive(Debug, Clone)]
pub struct ApproxNorm {
    source: NormSpec,
    epsilon: f64,
    elements: Vec<ApproxElement>,
    induced: NormSpec,
    /// Element indices whose scaled functionals survive in `induced`.
    kept: Vec<usize>,
}

impl ApproxNorm {
    /// Assembles an approximation from explicit elements; the induced norm is
    /// the max over their scaled functionals, with dominated ones pruned.
    pub fn from_parts(source: NormSpec, epsilon: f64, elements: Vec<ApproxElement>) -> Result<Self> {
        check_epsilon(epsilon)?;
        let generators: Vec<Functional> = elements.iter().map(|e| e.scaled.clone()).collect();
        let name = format!("{}-approx", source.name());
        let (induced, kept) = NormSpec::from_generators(name, source.dim(), &generators, source.config())?;
        Ok(Self {
            source,
            epsilon,
            elements,
            induced,
            kept,
        })
    }

    pub fn source(&self) -> &NormSpec {
        &self.source
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn elements(&self) -> &[ApproxElement] {
        &self.elements
    }

    pub fn induced(&self) -> &NormSpec {
        &self.induced
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn into_elements(self) -> Vec<ApproxElement> {
        self.elements
    }
}

/// Builds the approximating norm, keeping `j(f,n,m)` for
/// `m = n+1..=min(n+m_extra, M)` per source representative.
pub fn build_approx_norm(spec: &NormSpec, epsilon: f64, m_extra: usize) -> Result<ApproxNorm> {
    check_epsilon(epsilon)?;
    if m_extra == 0 {
        return Err(Error::InvalidParameter("m_extra must be at least 1".into()));
    }
    let mut elements = Vec::new();
    for (source_index, f) in spec.boundary().iter().enumerate() {
        let level = minimal_n(spec, f, epsilon)?;
        let scale = class_scale(level.r, epsilon);
        let bound = membership_bound(level.r, epsilon);
        let element = |m: usize, j: &Functional| ApproxElement {
            source_index,
            f_source: f.clone(),
            r: level.r,
            n: level.n,
            m,
            scale,
            scaled: j.scaled(scale),
        };
        if level.n == level.depth {
            elements.push(element(level.n, f));
            continue;
        }
        let levels = LevelingDecomposition::new(f)?;
        for m in level.n + 1..=(level.n + m_extra).min(level.depth) {
            let j = levels.j(level.n, m)?;
            let distance = spec.dual_norm(&f.sub(&j)?)?;
            if distance >= bound {
                return Err(Error::NoAdmissibleLevel(format!(
                    "element {source_index}: ||f - j(f,{},{m})|| = {distance} >= {bound}",
                    level.n
                )));
            }
            elements.push(element(m, &j));
        }
    }
    ApproxNorm::from_parts(spec.clone(), epsilon, elements)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexOrigin {
    /// Vertex of the source unit ball.
    Source,
    /// Vertex of the approximating unit ball.
    Induced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexCheck {
    pub origin: VertexOrigin,
    pub vertex: Vector,
    pub source_norm: f64,
    pub approx_norm: f64,
    pub ratio: f64,
    /// Smallest class among source elements attaining at the vertex.
    pub r: u32,
    /// `approx - lower_factor(r) * source`.
    pub lower_margin: f64,
    /// `(1 + ε) * source - approx`.
    pub upper_margin: f64,
    /// `approx - source`.
    pub strict_margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub epsilon: f64,
    pub checks: Vec<VertexCheck>,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VertexCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn ratio_range(&self) -> (f64, f64) {
        self.checks
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                (lo.min(c.ratio), hi.max(c.ratio))
            })
    }
}

/// Checks `lower_factor(r) ||x|| <= |||x||| <= (1+ε) ||x||` and
/// `|||x||| > ||x||` on the vertices of both unit balls.
///
/// The upper bound is maximal on source vertices; the global ratio minimum
/// sits on an approximating-ball vertex, so both vertex sets are covered.
pub fn verify_sandwich(approx: &ApproxNorm) -> Result<SandwichReport> {
    let source = approx.source();
    let induced = approx.induced();
    let epsilon = approx.epsilon();
    let classes: Vec<u32> = source.boundary().iter().map(|b| r_class(b.l1_norm())).collect();
    let mut checks = Vec::new();
    let origins = source
        .unit_ball_vertices()
        .iter()
        .map(|v| (VertexOrigin::Source, v))
        .chain(induced.unit_ball_vertices().iter().map(|v| (VertexOrigin::Induced, v)));
    for (origin, v) in origins {
        let source_norm = source.eval(v)?;
        let approx_norm = induced.eval(v)?;
        let r = source
            .attaining(v, VERTEX_TOL)?
            .into_iter()
            .map(|i| classes[i])
            .min()
            .expect("some boundary element attains the norm");
        let lower_margin = approx_norm - lower_factor(r, epsilon) * source_norm;
        let upper_margin = (1.0 + epsilon) * source_norm - approx_norm;
        let strict_margin = approx_norm - source_norm;
        checks.push(VertexCheck {
            origin,
            vertex: v.clone(),
            source_norm,
            approx_norm,
            ratio: approx_norm / source_norm,
            r,
            lower_margin,
            upper_margin,
            strict_margin,
            pass: lower_margin >= -SANDWICH_TOL && upper_margin >= -SANDWICH_TOL && strict_margin > 0.0,
        });
    }
    Ok(SandwichReport { epsilon, checks })
}

/// Per-element membership and upper-chain checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementCheck {
    pub index: usize,
    pub source_index: usize,
    pub r: u32,
    /// `||f - j(f,n,m)||` in the source dual norm.
    pub distance: f64,
    pub bound: f64,
    /// `||scaled||` against `(1 + 2^-r ε)(1 + 2^-(r+2) ε)`.
    pub scaled_dual: f64,
    pub scaled_cap: f64,
    pub class_ok: bool,
    pub pass: bool,
}

pub fn verify_elements(approx: &ApproxNorm) -> Result<Vec<ElementCheck>> {
    let source = approx.source();
    let epsilon = approx.epsilon();
    approx
        .elements()
        .iter()
        .enumerate()
        .map(|(index, e)| {
            let bound = membership_bound(e.r, epsilon);
            let distance = source.dual_norm(&linear_combine(&[(1.0, &e.f_source), (-1.0 / e.scale, &e.scaled)])?)?;
            let scaled_dual = source.dual_norm(&e.scaled)?;
            let scaled_cap = class_scale(e.r, epsilon) * (1.0 + bound);
            let class_ok = e.r == r_class(e.f_source.l1_norm()) && e.scale == class_scale(e.r, epsilon);
            Ok(ElementCheck {
                index,
                source_index: e.source_index,
                r: e.r,
                distance,
                bound,
                scaled_dual,
                scaled_cap,
                class_ok,
                pass: class_ok && distance < bound && scaled_dual <= scaled_cap + SANDWICH_TOL,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportRow {
    pub index: usize,
    pub source_index: usize,
    pub source_support: usize,
    pub scaled_support: usize,
    /// `|G(f_source, m)|`.
    pub level_set_size: usize,
    pub within_level_set: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportProfile {
    pub rows: Vec<SupportRow>,
    pub source_max: usize,
    pub source_mean: f64,
    /// Over the functionals kept in the approximating boundary.
    pub approx_max: usize,
    pub approx_mean: f64,
}

impl SupportProfile {
    pub fn all_within(&self) -> bool {
        self.rows.iter().all(|r| r.within_level_set)
    }
}

pub fn support_profile(approx: &ApproxNorm) -> Result<SupportProfile> {
    let mut rows = Vec::with_capacity(approx.elements().len());
    for (index, e) in approx.elements().iter().enumerate() {
        let levels = LevelingDecomposition::new(&e.f_source)?;
        let set = if e.m == 0 || e.m > levels.depth() {
            &[][..]
        } else {
            levels.g_set(e.m)?
        };
        rows.push(SupportRow {
            index,
            source_index: e.source_index,
            source_support: e.f_source.support_size(),
            scaled_support: e.scaled.support_size(),
            level_set_size: set.len(),
            within_level_set: e.scaled.support().iter().all(|i| set.contains(i)),
        });
    }
    let (source_max, source_mean) = stats(approx.source().boundary());
    let (approx_max, approx_mean) = stats(approx.induced().boundary());
    Ok(SupportProfile {
        rows,
        source_max,
        source_mean,
        approx_max,
        approx_mean,
    })
}

fn stats(functionals: &[Functional]) -> (usize, f64) {
    let max = functionals.iter().map(Functional::support_size).max().unwrap_or(0);
    let total: usize = functionals.iter().map(Functional::support_size).sum();
    (max, total as f64 / functionals.len().max(1) as f64)
}
