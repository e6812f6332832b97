//! Rotationally symmetric hypersurfaces and their curvature.

mod body;
mod curvature;
mod profile;

pub use body::ConvexBody;
pub(crate) use body::segment_distance;
pub use curvature::{
    compute_curvatures, gauss_integrals, laplace_beltrami, pinching_constant, trace_free_norm, CurvatureField,
    CurvatureNode, GaussIntegrals, Pinching,
};
pub use profile::{uniform_grid, Profile, ProfileKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile needs at least 5 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("non-finite value in profile or its differences")]
    NonFinite,
    #[error("radius vanishes away from a cap")]
    DegenerateRadius,
    #[error("profile does not cover the full polar range [0, pi]")]
    NotClosed,
    #[error("mean curvature is not positive everywhere")]
    NonPositiveH,
    #[error("profile is not convex (min kappa_1 = {0})")]
    NotConvex(f64),
}
