use serde::{Deserialize, Serialize};

use super::{compute_curvatures, GeometryError, Profile, ProfileKind};
use crate::numerics::Pchip;

/// Slack on `kappa_1 >= 0`, relative to the largest `|H|` of the profile.
const CONVEXITY_SLACK: f64 = 1e-6;

/// The region bounded by a convex profile.
///
/// Closed polar profiles bound compact bodies. An axis graph whose first node
/// is a cap (`r = 0`) and whose radius increases bounds the unbounded body
/// `{x >= u(r)}` to the right of the cap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexBody {
    pub profile: Profile,
    pub inradius: f64,
}

impl ConvexBody {
    pub fn new(profile: Profile) -> Result<Self, GeometryError> {
        match profile.kind {
            ProfileKind::PolarGraph if !profile.is_closed() => return Err(GeometryError::NotClosed),
            ProfileKind::AxisGraph => {
                let increasing = profile.values.windows(2).all(|w| w[1] > w[0]);
                if profile.values[0] != 0.0 || !increasing {
                    return Err(GeometryError::InvalidProfile(
                        "axis-graph body needs a cap at its first node and increasing radius".into(),
                    ));
                }
            }
            _ => {}
        }
        let cf = compute_curvatures(&profile)?;
        let scale = cf.nodes.iter().map(|c| c.mean.abs()).filter(|v| v.is_finite()).fold(0.0, f64::max);
        // the cap node of a cone carries no meaningful curvature
        let skip_cap = profile.kind == ProfileKind::AxisGraph;
        let worst = cf
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| !(skip_cap && *i == 0))
            .map(|(_, c)| c.kappa_min)
            .fold(f64::INFINITY, f64::min);
        if worst < -CONVEXITY_SLACK * scale.max(1.0) {
            return Err(GeometryError::NotConvex(worst));
        }
        let mut body = Self {
            profile,
            inradius: f64::INFINITY,
        };
        if body.is_bounded() {
            body.inradius = body.inball().1;
        }
        Ok(body)
    }

    pub fn is_bounded(&self) -> bool {
        self.profile.kind == ProfileKind::PolarGraph
    }

    /// Lowest axis coordinate of the body (the tip of an unbounded body).
    pub fn tip(&self) -> f64 {
        match self.profile.kind {
            ProfileKind::AxisGraph => self.profile.params[0],
            ProfileKind::PolarGraph => self.profile.center - self.profile.values[self.profile.len() - 1],
        }
    }

    /// Whether `(axis, radius)` (radius >= 0) lies in the closed body.
    pub fn contains(&self, axis: f64, radius: f64) -> bool {
        let p = &self.profile;
        match p.kind {
            ProfileKind::PolarGraph => {
                let dz = axis - p.center;
                let d = dz.hypot(radius);
                if d == 0.0 {
                    return true;
                }
                let theta = radius.atan2(dz);
                d <= p.interpolate(theta)
            }
            ProfileKind::AxisGraph => {
                if axis < p.params[0] {
                    return false;
                }
                radius <= p.interpolate(axis)
            }
        }
    }

    /// Height function `u(r)` of an unbounded body (inverse of `r(x)`).
    pub fn height_function(&self) -> Option<Pchip> {
        (self.profile.kind == ProfileKind::AxisGraph).then(|| Pchip::new(&self.profile.values, &self.profile.params))
    }

    /// Distance from the axis point `(axis, 0)` to the boundary curve.
    pub fn boundary_distance(&self, axis: f64) -> f64 {
        let pos = self.profile.positions();
        pos.windows(2)
            .map(|w| segment_distance((axis, 0.0), w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest inscribed ball, `(center on axis, radius)`.
    ///
    /// By rotational symmetry and convexity an inball can be centred on the
    /// axis, where the boundary distance is concave; golden-section search.
    pub fn inball(&self) -> (f64, f64) {
        if !self.is_bounded() {
            return (f64::NAN, f64::INFINITY);
        }
        let p = &self.profile;
        let mut a = p.center - p.values[p.len() - 1];
        let mut b = p.center + p.values[0];
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let mut f1 = self.boundary_distance(x1);
        let mut f2 = self.boundary_distance(x2);
        for _ in 0..100 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = self.boundary_distance(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = self.boundary_distance(x1);
            }
            if (b - a).abs() < 1e-12 {
                break;
            }
        }
        let c = 0.5 * (a + b);
        (c, self.boundary_distance(c))
    }
}

pub(crate) fn segment_distance(q: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((q.0 - a.0) * dx + (q.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (q.0 - a.0 - t * dx).hypot(q.1 - a.1 - t * dy)
}
