use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{GeometryError, Profile, ProfileKind};
use crate::numerics::{self, fd_weights};

/// Curvature data at one node of a profile.
///
/// A hypersurface of revolution has two principal curvatures: the meridian
/// curvature `kappa_axial` (multiplicity one) and the rotational curvature
/// `kappa_rot` (multiplicity `n - 1`). The outward normal makes a round
/// sphere of radius `R` have `H = n / R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureNode {
    pub param: f64,
    pub axis: f64,
    pub radius: f64,
    /// Outward unit normal, (axis, radial) components.
    pub normal: [f64; 2],
    /// `|dX/dparam|` of the generating curve.
    pub speed: f64,
    pub kappa_axial: f64,
    pub kappa_rot: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub mean: f64,
    pub norm_a2: f64,
    pub norm_aring2: f64,
    /// `kappa_min / H`; NaN where `H <= 0`.
    pub ratio: f64,
}

impl CurvatureNode {
    /// Fills in the derived quantities from the two principal curvatures.
    pub fn from_principal(
        n: usize,
        param: f64,
        position: (f64, f64),
        normal: [f64; 2],
        speed: f64,
        kappa_axial: f64,
        kappa_rot: f64,
    ) -> Self {
        let nf = n as f64;
        let (kappa_min, kappa_max) = if n == 1 {
            (kappa_axial, kappa_axial)
        } else if kappa_axial <= kappa_rot {
            (kappa_axial, kappa_rot)
        } else {
            (kappa_rot, kappa_axial)
        };
        let rot_mult = (n - 1) as f64;
        let mean = kappa_axial + rot_mult * kappa_rot;
        let norm_a2 = kappa_axial * kappa_axial + rot_mult * kappa_rot * kappa_rot;
        let norm_aring2 = (norm_a2 - mean * mean / nf).max(0.0);
        let ratio = if mean > 0.0 { kappa_min / mean } else { f64::NAN };
        Self {
            param,
            axis: position.0,
            radius: position.1,
            normal,
            speed,
            kappa_axial,
            kappa_rot,
            kappa_min,
            kappa_max,
            mean,
            norm_a2,
            norm_aring2,
            ratio,
        }
    }

    pub fn norm_aring(&self) -> f64 {
        self.norm_aring2.sqrt()
    }
}

/// Per-node curvature quantities of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureField {
    pub n: usize,
    pub nodes: Vec<CurvatureNode>,
}

impl CurvatureField {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_mean(&self) -> f64 {
        self.nodes.iter().map(|c| c.mean).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_mean(&self) -> f64 {
        self.nodes.iter().map(|c| c.mean).fold(f64::INFINITY, f64::min)
    }

    pub fn max_norm_a2(&self) -> f64 {
        self.nodes.iter().map(|c| c.norm_a2).fold(0.0, f64::max)
    }

    pub fn min_kappa(&self) -> f64 {
        self.nodes.iter().map(|c| c.kappa_min).fold(f64::INFINITY, f64::min)
    }

    /// `max |Å| / H` over nodes with `H > 0`.
    pub fn max_umbilic_ratio(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|c| c.mean > 0.0)
            .map(|c| c.norm_aring() / c.mean)
            .fold(0.0, f64::max)
    }

    /// Writes the field as CSV with columns
    /// `node_index,param,axis_coord,radius,kappa1,kappan,H,normAring,ratio`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "node_index",
            "param",
            "axis_coord",
            "radius",
            "kappa1",
            "kappan",
            "H",
            "normAring",
            "ratio",
        ])?;
        for (i, c) in self.nodes.iter().enumerate() {
            w.write_record(&[
                i.to_string(),
                fmt(c.param),
                fmt(c.axis),
                fmt(c.radius),
                fmt(c.kappa_min),
                fmt(c.kappa_max),
                fmt(c.mean),
                fmt(c.norm_aring()),
                fmt(c.ratio),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

// shortest round-trip representation
fn fmt(v: f64) -> String {
    format!("{v:?}")
}

/// Derivatives of the generating function with respect to its parameter,
/// using even reflection across poles of a polar profile.
pub(crate) fn value_derivatives(p: &Profile) -> (Vec<f64>, Vec<f64>) {
    let m = p.len();
    let (mut d1, mut d2) = numerics::derivatives(&p.params, &p.values);
    if p.kind == ProfileKind::PolarGraph {
        if p.starts_at_pole() {
            let h = p.params[1] - p.params[0];
            d1[0] = 0.0;
            d2[0] = 2.0 * (p.values[1] - p.values[0]) / (h * h);
        }
        if p.ends_at_pole() {
            let h = p.params[m - 1] - p.params[m - 2];
            d1[m - 1] = 0.0;
            d2[m - 1] = 2.0 * (p.values[m - 2] - p.values[m - 1]) / (h * h);
        }
    }
    (d1, d2)
}

/// Principal curvatures at every node.
pub fn compute_curvatures(p: &Profile) -> Result<CurvatureField, GeometryError> {
    p.validate()?;
    let m = p.len();
    let (d1, d2) = value_derivatives(p);
    if d1.iter().chain(&d2).any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let mut nodes = Vec::with_capacity(m);
    match p.kind {
        ProfileKind::PolarGraph => {
            for i in 0..m {
                let theta = p.params[i];
                let rho = p.values[i];
                let (s, c) = theta.sin_cos();
                // generating curve (z, r) = (center + rho cos, rho sin)
                let z1 = d1[i] * c - rho * s;
                let r1 = d1[i] * s + rho * c;
                let z2 = d2[i] * c - 2.0 * d1[i] * s - rho * c;
                let r2 = d2[i] * s + 2.0 * d1[i] * c - rho * s;
                let speed = z1.hypot(r1);
                let kappa_axial = (z1 * r2 - r1 * z2) / speed.powi(3);
                let normal = [r1 / speed, -z1 / speed];
                let pos = p.position(i);
                let pole = (i == 0 && p.starts_at_pole()) || (i == m - 1 && p.ends_at_pole());
                let kappa_rot = if pole { kappa_axial } else { normal[1] / pos.1 };
                nodes.push(CurvatureNode::from_principal(p.n, theta, pos, normal, speed, kappa_axial, kappa_rot));
            }
        }
        ProfileKind::AxisGraph => {
            let caps = (p.values[0] == 0.0, p.values[m - 1] == 0.0);
            if p.values[1..m - 1].iter().any(|&r| r == 0.0) {
                return Err(GeometryError::DegenerateRadius);
            }
            for i in 0..m {
                let pos = p.position(i);
                let cap_left = i == 0 && caps.0;
                let cap_right = i == m - 1 && caps.1;
                if cap_left || cap_right {
                    let kappa = cap_curvature(p, cap_left);
                    let normal = if cap_left { [-1.0, 0.0] } else { [1.0, 0.0] };
                    nodes.push(CurvatureNode::from_principal(p.n, p.params[i], pos, normal, f64::INFINITY, kappa, kappa));
                    continue;
                }
                // curve (z, r) = (x, r(x)); outward normal (-r', 1)/|T|
                let slope = d1[i];
                let speed = (1.0 + slope * slope).sqrt();
                let kappa_axial = -d2[i] / speed.powi(3);
                let kappa_rot = 1.0 / (pos.1 * speed);
                let normal = [-slope / speed, 1.0 / speed];
                nodes.push(CurvatureNode::from_principal(p.n, p.params[i], pos, normal, speed, kappa_axial, kappa_rot));
            }
        }
    }
    if nodes.iter().any(|c| !c.mean.is_finite() || !c.norm_a2.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    Ok(CurvatureField { n: p.n, nodes })
}

/// Umbilic curvature at a cap `r = 0` of an axis graph.
///
/// Near the cap the curve is a graph over the radius, `x = x0 +- a r^2 + ...`;
/// the coefficient is fitted through the two nearest neighbours with the
/// quartic term eliminated.
fn cap_curvature(p: &Profile, left: bool) -> f64 {
    let m = p.len();
    let (i0, i1, i2) = if left { (0, 1, 2) } else { (m - 1, m - 2, m - 3) };
    let x0 = p.params[i0];
    let (r1, r2) = (p.values[i1], p.values[i2]);
    let (e1, e2) = ((p.params[i1] - x0).abs(), (p.params[i2] - x0).abs());
    // e = a r^2 + b r^4
    let det = r1 * r1 * r2.powi(4) - r2 * r2 * r1.powi(4);
    let a = if det.abs() > 0.0 {
        (e1 * r2.powi(4) - e2 * r1.powi(4)) / det
    } else {
        e1 / (r1 * r1)
    };
    2.0 * a
}

/// `|Å|` per node, `sqrt(|A|^2 - H^2 / n)` with round-off clamped at zero.
pub fn trace_free_norm(cf: &CurvatureField) -> Vec<f64> {
    cf.nodes.iter().map(|c| c.norm_aring()).collect()
}

/// The two pinching ratios of a curvature field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pinching {
    /// `min kappa_1 / H`.
    pub mean_normalized: f64,
    /// `min kappa_1 / kappa_n`.
    pub max_normalized: f64,
}

pub fn pinching_constant(cf: &CurvatureField) -> Result<Pinching, GeometryError> {
    if cf.nodes.iter().any(|c| c.mean <= 0.0) {
        return Err(GeometryError::NonPositiveH);
    }
    let mean_normalized = cf.nodes.iter().map(|c| c.kappa_min / c.mean).fold(f64::INFINITY, f64::min);
    let max_normalized = cf
        .nodes
        .iter()
        .map(|c| c.kappa_min / c.kappa_max)
        .fold(f64::INFINITY, f64::min);
    Ok(Pinching {
        mean_normalized,
        max_normalized,
    })
}

/// Total Gauss curvature and total `H^n` of a closed polar profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussIntegrals {
    pub int_k: f64,
    pub int_hn: f64,
}

pub fn gauss_integrals(p: &Profile) -> Result<GaussIntegrals, GeometryError> {
    if !p.is_closed() {
        return Err(GeometryError::NotClosed);
    }
    let cf = compute_curvatures(p)?;
    let orbit = numerics::sphere_area(p.n - 1);
    let rot = (p.n - 1) as i32;
    let mut k = Vec::with_capacity(cf.len());
    let mut hn = Vec::with_capacity(cf.len());
    for c in &cf.nodes {
        let measure = c.radius.powi(rot) * c.speed;
        k.push(c.kappa_axial * c.kappa_rot.powi(rot) * measure);
        hn.push(c.mean.powi(p.n as i32) * measure);
    }
    Ok(GaussIntegrals {
        int_k: orbit * numerics::trapezoid(&p.params, &k),
        int_hn: orbit * numerics::trapezoid(&p.params, &hn),
    })
}

/// Weights of the meridian Laplace–Beltrami operator applied to a function of
/// the node index (rotationally symmetric functions only).
///
/// `Δf = f_ss + (n-1) (r_s / r) f_s` with `s` the meridian arclength; at a
/// pole the rotational term tends to `(n-1) f_ss`.
pub fn laplace_beltrami(p: &Profile, f: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let cf = compute_curvatures(p)?;
    let m = p.len();
    let pos = p.positions();
    let zs: Vec<f64> = pos.iter().map(|q| q.0).collect();
    let rs: Vec<f64> = pos.iter().map(|q| q.1).collect();
    let (z1, z2) = numerics::derivatives(&p.params, &zs);
    let (r1, r2) = numerics::derivatives(&p.params, &rs);
    let (f1, f2) = numerics::derivatives(&p.params, f);
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let pole = p.kind == ProfileKind::PolarGraph
            && ((i == 0 && p.starts_at_pole()) || (i == m - 1 && p.ends_at_pole()));
        if pole {
            // reflection: f even in the pole angle, the curve speed is rho
            let j = if i == 0 { 1 } else { m - 2 };
            let h = (p.params[j] - p.params[i]).abs();
            let w = fd_weights(0.0, &[-h, 0.0, h], 2);
            let f_pp = w[2][0] * f[j] + w[2][1] * f[i] + w[2][2] * f[j];
            let speed = cf.nodes[i].speed;
            out.push(p.n as f64 * f_pp / (speed * speed));
            continue;
        }
        let (zp, rp, zpp, rpp) = match p.kind {
            ProfileKind::AxisGraph => (1.0, r1[i], 0.0, r2[i]),
            ProfileKind::PolarGraph => (z1[i], r1[i], z2[i], r2[i]),
        };
        let speed2 = zp * zp + rp * rp;
        let speed = speed2.sqrt();
        let speed_p = (zp * zpp + rp * rpp) / speed;
        let f_s = f1[i] / speed;
        let f_ss = f2[i] / speed2 - f1[i] * speed_p / (speed2 * speed);
        let r_s = rp / speed;
        out.push(f_ss + (p.n - 1) as f64 * r_s / rs[i] * f_s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_is_umbilic() {
        let p = Profile::sphere(2, 2.0, 101).unwrap();
        let cf = compute_curvatures(&p).unwrap();
        for c in &cf.nodes {
            assert!((c.kappa_min - 0.5).abs() < 1e-12);
            assert!((c.kappa_max - 0.5).abs() < 1e-12);
            assert!((c.mean - 1.0).abs() < 1e-12);
            assert!(c.norm_aring2 < 1e-14);
            assert!((c.ratio - 0.5).abs() < 1e-12);
        }
        assert!(trace_free_norm(&cf).iter().all(|&v| v < 1e-7));
        let pin = pinching_constant(&cf).unwrap();
        assert!((pin.mean_normalized - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cylinder_has_flat_direction() {
        let p = Profile::axis_from_fn(2, -1.0, 1.0, 41, |_| 1.0).unwrap();
        let cf = compute_curvatures(&p).unwrap();
        for c in &cf.nodes {
            assert!(c.kappa_min.abs() < 1e-12);
            assert!((c.kappa_max - 1.0).abs() < 1e-12);
            assert!((c.mean - 1.0).abs() < 1e-12);
            assert!(c.ratio.abs() < 1e-12);
        }
        assert!(pinching_constant(&cf).unwrap().mean_normalized.abs() < 1e-12);
    }

    #[test]
    fn paraboloid_at_unit_radius() {
        // u = r^2 / 2 seen as r(x) = sqrt(2x); r = 1 at x = 1/2
        let xs: Vec<f64> = (0..201).map(|i| 0.4 + 0.001 * i as f64).collect();
        let rs = xs.iter().map(|x| (2.0 * x).sqrt()).collect();
        let p = Profile::axis(2, xs, rs).unwrap();
        let cf = compute_curvatures(&p).unwrap();
        let c = &cf.nodes[100];
        assert!((c.radius - 1.0).abs() < 1e-12);
        assert!((c.kappa_axial - 0.353553390593).abs() < 1e-6);
        assert!((c.kappa_rot - 0.707106781187).abs() < 1e-6);
    }

    #[test]
    fn trace_free_identity_for_given_principal_values() {
        let c = CurvatureNode::from_principal(2, 0.0, (0.0, 1.0), [0.0, 1.0], 1.0, 1.0, 2.0);
        assert_eq!(c.norm_a2, 5.0);
        assert_eq!(c.mean, 3.0);
        assert!((c.norm_aring2 - 0.5).abs() < 1e-15);
        assert!((c.norm_aring() - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn interior_zero_radius_is_degenerate() {
        let p = Profile::axis(2, vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![1.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(compute_curvatures(&p), Err(GeometryError::DegenerateRadius)));
    }

    #[test]
    fn cap_of_sphere_written_as_axis_graph() {
        let xs: Vec<f64> = (0..2001).map(|i| -1.0 + 0.001 * i as f64).collect();
        let rs = xs.iter().map(|x: &f64| (1.0 - x * x).max(0.0).sqrt()).collect();
        let p = Profile::axis(2, xs, rs).unwrap();
        let cf = compute_curvatures(&p).unwrap();
        assert!((cf.nodes[0].mean - 2.0).abs() < 1e-3);
        assert!((cf.nodes[2000].mean - 2.0).abs() < 1e-3);
        assert!((cf.nodes[1000].mean - 2.0).abs() < 1e-5);
    }

    #[test]
    fn unit_sphere_integrals() {
        let p = Profile::sphere(2, 1.0, 401).unwrap();
        let g = gauss_integrals(&p).unwrap();
        assert!((g.int_k - 4.0 * PI).abs() / (4.0 * PI) < 1e-4);
        assert!((g.int_hn - 16.0 * PI).abs() / (16.0 * PI) < 1e-4);
    }

    #[test]
    fn open_profile_is_not_closed() {
        let p = Profile::axis_from_fn(2, 0.0, 1.0, 11, |_| 1.0).unwrap();
        assert!(matches!(gauss_integrals(&p), Err(GeometryError::NotClosed)));
    }

    #[test]
    fn laplacian_of_height_on_sphere() {
        // on the unit sphere Δz = -n z
        let p = Profile::sphere(3, 1.0, 401).unwrap();
        let z: Vec<f64> = p.positions().iter().map(|q| q.0).collect();
        let lap = laplace_beltrami(&p, &z).unwrap();
        for (l, z) in lap.iter().zip(&z) {
            assert!((l + 3.0 * z).abs() < 1e-4, "{l} vs {}", -3.0 * z);
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let p = Profile::sphere(2, 1.0, 5).unwrap();
        let cf = compute_curvatures(&p).unwrap();
        let mut buf = Vec::new();
        cf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "node_index,param,axis_coord,radius,kappa1,kappan,H,normAring,ratio"
        );
        assert_eq!(lines.count(), 5);
    }
}
