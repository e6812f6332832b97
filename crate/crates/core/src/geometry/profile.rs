use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::numerics;

/// How the generating curve of a hypersurface of revolution is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// Radius `r(x) >= 0` as a function of the axis coordinate `x`.
    AxisGraph,
    /// Distance `rho(theta) > 0` from a center on the axis, `theta` measured
    /// from the positive axis direction, `theta` in `[0, pi]`.
    PolarGraph,
}

/// A rotationally symmetric hypersurface `M^n` in `R^{n+1}`, stored as its
/// generating curve in the (axis, radius) half-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub kind: ProfileKind,
    pub n: usize,
    pub params: Vec<f64>,
    pub values: Vec<f64>,
    /// Axis coordinate of the polar center. Always zero for axis graphs.
    pub center: f64,
}

const POLE_TOL: f64 = 1e-12;

impl Profile {
    pub fn new(
        kind: ProfileKind,
        n: usize,
        params: Vec<f64>,
        values: Vec<f64>,
        center: f64,
    ) -> Result<Self, GeometryError> {
        let p = Self {
            kind,
            n,
            params,
            values,
            center,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn polar(n: usize, center: f64, thetas: Vec<f64>, rhos: Vec<f64>) -> Result<Self, GeometryError> {
        Self::new(ProfileKind::PolarGraph, n, thetas, rhos, center)
    }

    pub fn axis(n: usize, xs: Vec<f64>, radii: Vec<f64>) -> Result<Self, GeometryError> {
        Self::new(ProfileKind::AxisGraph, n, xs, radii, 0.0)
    }

    /// Closed polar profile sampled on a uniform grid over `[0, pi]`.
    pub fn polar_from_fn(
        n: usize,
        center: f64,
        nodes: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, GeometryError> {
        let thetas = uniform_grid(0.0, PI, nodes);
        let rhos = thetas.iter().map(|&t| f(t)).collect();
        Self::polar(n, center, thetas, rhos)
    }

    pub fn axis_from_fn(
        n: usize,
        a: f64,
        b: f64,
        nodes: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, GeometryError> {
        let xs = uniform_grid(a, b, nodes);
        let rs = xs.iter().map(|&x| f(x)).collect();
        Self::axis(n, xs, rs)
    }

    /// Round sphere of radius `radius` centered at the origin.
    pub fn sphere(n: usize, radius: f64, nodes: usize) -> Result<Self, GeometryError> {
        Self::polar_from_fn(n, 0.0, nodes, |_| radius)
    }

    /// Ellipsoid of revolution with equatorial semi-axis `equatorial` and
    /// semi-axis `axial` along the symmetry axis, centered at the origin.
    pub fn ellipsoid(n: usize, equatorial: f64, axial: f64, nodes: usize) -> Result<Self, GeometryError> {
        Self::polar_from_fn(n, 0.0, nodes, |t| {
            let (s, c) = t.sin_cos();
            1.0 / ((s / equatorial).powi(2) + (c / axial).powi(2)).sqrt()
        })
    }

    /// Cylinder of radius `radius` and length `2 * half_length` closed by two
    /// hemispherical caps, centered at the origin.
    pub fn capsule(n: usize, radius: f64, half_length: f64, nodes: usize) -> Result<Self, GeometryError> {
        Self::polar_from_fn(n, 0.0, nodes, |t| {
            let (s, c) = t.sin_cos();
            // ray (c, s) meets either the side wall r = radius or a cap
            let side = if s > 0.0 { radius / s } else { f64::INFINITY };
            let z_side = side * c.abs();
            if z_side <= half_length {
                side
            } else {
                // |X - (L,0)| = radius along the ray
                let b = half_length * c.abs();
                b + (b * b - half_length * half_length + radius * radius).sqrt()
            }
        })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.n == 0 {
            return Err(GeometryError::InvalidProfile("dimension n must be at least 1".into()));
        }
        if self.params.len() != self.values.len() {
            return Err(GeometryError::InvalidProfile("params and values differ in length".into()));
        }
        if self.params.len() < 5 {
            return Err(GeometryError::TooFewNodes(self.params.len()));
        }
        if self.params.iter().chain(&self.values).any(|v| !v.is_finite()) || !self.center.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if self.params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeometryError::InvalidProfile("parameters must be strictly increasing".into()));
        }
        match self.kind {
            ProfileKind::AxisGraph => {
                if self.values.iter().any(|&r| r < 0.0) {
                    return Err(GeometryError::InvalidProfile("axis graph radius must be >= 0".into()));
                }
            }
            ProfileKind::PolarGraph => {
                if self.values.iter().any(|&r| r <= 0.0) {
                    return Err(GeometryError::InvalidProfile("polar radius must be > 0".into()));
                }
                if self.params[0] < -POLE_TOL || *self.params.last().unwrap() > PI + POLE_TOL {
                    return Err(GeometryError::InvalidProfile("polar angle outside [0, pi]".into()));
                }
            }
        }
        Ok(())
    }

    /// True for a polar profile covering the whole range `[0, pi]`.
    pub fn is_closed(&self) -> bool {
        self.kind == ProfileKind::PolarGraph && self.starts_at_pole() && self.ends_at_pole()
    }

    pub(crate) fn starts_at_pole(&self) -> bool {
        self.kind == ProfileKind::PolarGraph && self.params[0].abs() <= POLE_TOL
    }

    pub(crate) fn ends_at_pole(&self) -> bool {
        self.kind == ProfileKind::PolarGraph && (self.params[self.len() - 1] - PI).abs() <= POLE_TOL
    }

    /// Position of node `i` in the (axis, radius) half-plane.
    pub fn position(&self, i: usize) -> (f64, f64) {
        match self.kind {
            ProfileKind::AxisGraph => (self.params[i], self.values[i]),
            ProfileKind::PolarGraph => {
                let (s, c) = self.params[i].sin_cos();
                let rho = self.values[i];
                // exact zeros at the poles keep node radii non-negative
                let r = if self.params[i] == 0.0 || self.params[i] == PI { 0.0 } else { rho * s };
                (self.center + rho * c, r)
            }
        }
    }

    pub fn positions(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|i| self.position(i)).collect()
    }

    /// Distance in `R^{n+1}` from the axis point `(p_axis, 0)` to node `i`.
    ///
    /// Every point of a node's orbit sphere has the same distance to an axis
    /// point. When `p_axis` is the polar center the distance is `rho` exactly.
    pub fn distance_from_axis_point(&self, i: usize, p_axis: f64) -> f64 {
        if self.kind == ProfileKind::PolarGraph && p_axis == self.center {
            return self.values[i];
        }
        let (z, r) = self.position(i);
        (z - p_axis).hypot(r)
    }

    /// True when the parameter grid is uniform to relative precision `1e-9`.
    pub fn is_uniform(&self) -> bool {
        let h0 = self.params[1] - self.params[0];
        self.params
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h0).abs() <= 1e-9 * h0.abs().max(1e-300))
    }

    /// Resamples onto a uniform parameter grid with the same end points using
    /// monotone cubic interpolation.
    pub fn remesh_uniform(&self, nodes: usize) -> Result<Self, GeometryError> {
        let interp = numerics::Pchip::new(&self.params, &self.values);
        let a = self.params[0];
        let b = self.params[self.len() - 1];
        let params = uniform_grid(a, b, nodes);
        let values = params.iter().map(|&x| interp.eval(x)).collect();
        Self::new(self.kind, self.n, params, values, self.center)
    }

    /// Interpolated generating value at parameter `x` (monotone cubic).
    pub fn interpolate(&self, x: f64) -> f64 {
        numerics::Pchip::new(&self.params, &self.values).eval(x)
    }
}

/// `nodes` equally spaced points from `a` to `b`, end points exact.
pub fn uniform_grid(a: f64, b: f64, nodes: usize) -> Vec<f64> {
    let h = (b - a) / (nodes as f64 - 1.0);
    (0..nodes)
        .map(|i| if i + 1 == nodes { b } else { a + h * i as f64 })
        .collect()
}
