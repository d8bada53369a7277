//! Polyhedral norms on `R^d` given by finite boundaries, and the
//! constructions built on them: leveling decompositions of sparse
//! functionals, ε-approximating norms whose boundaries have small support,
//! smooth p-power norms, and strongly exposed points of polyhedral dual balls.

pub mod approx;
pub mod error;
pub mod exposed;
pub mod leveling;
pub mod linalg;
pub mod lp;
pub mod normspec;
pub mod smooth;
pub mod vector;

pub use approx::{
    build_approx_norm, minimal_n, support_profile, verify_elements, verify_sandwich, ApproxElement, ApproxNorm,
    SandwichReport, SupportProfile,
};
pub use error::{Error, Result};
pub use exposed::{
    decompose_dnm, exposed_points, minimal_support_witness, verify_lemma_geometry, CheckKind, DnmDecomposition,
    ExposedPoint, ExposureAnalysis, GeometryCheck, GeometryReport,
};
pub use leveling::{
    convex_reconstruct, h_approx, j_approx, lambda_weights, level_sequence, Level, LevelingDecomposition,
};
pub use normspec::{
    basis_constant_l, dual_norm, equivalence_ratio, eval_norm, unit_ball_vertices, NormSpec, VertexConfig, VertexSet,
};
pub use smooth::{choose_p, smooth_value_and_gradient, SmoothNorm};
pub use vector::{evaluate, l1_norm, linear_combine, Functional, Vector};
