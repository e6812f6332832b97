//! Numerical laboratory for mean curvature flow of rotationally symmetric
//! convex hypersurfaces in `R^{n+1}`.
//!
//! * [`geometry`]: profiles, principal curvatures, convex bodies, total
//!   curvature integrals.
//! * [`flow`]: explicit evolution by mean curvature, mollification,
//!   truncation of unbounded bodies and the approximation pipeline built
//!   from them.
//! * [`spacetime`]: parabolic cylinders, point selection, parabolic rescaling
//!   and singularity-type evidence on recorded flows.
//! * [`soliton`]: rotationally symmetric translators and expanders by
//!   shooting, with identity and decay audits.
//! * [`verify`]: measured audits of curvature estimates on recorded flows.

pub mod flow;
pub mod geometry;
pub mod numerics;
pub mod soliton;
pub mod spacetime;
pub mod verify;

pub use flow::{FlowConfig, FlowHistory, Snapshot, Termination};
pub use geometry::{compute_curvatures, ConvexBody, CurvatureField, CurvatureNode, Profile, ProfileKind};
