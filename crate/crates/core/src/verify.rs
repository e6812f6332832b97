//! Measured audits of curvature estimates on recorded flows.
//!
//! Every audit is a deterministic function of the history and its
//! parameters. Suprema run over recorded nodes only; reports carry the node
//! counts they were taken over.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::flow::FlowHistory;
use crate::geometry::{laplace_beltrami, segment_distance, GeometryError, Profile, ProfileKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("flow is not {alpha}-pinched in the audit ball: kappa_1 / H = {ratio} at t = {t}")]
    NotPinched { alpha: f64, ratio: f64, t: f64 },
    #[error("audit region contains no recorded nodes")]
    EmptyRegion,
    #[error("ball is not contained in the body at t = {t}")]
    BallNotContained { t: f64 },
    #[error("initial data violates the pinching: normalized min {m0}")]
    InitialPinchFails { m0: f64 },
    #[error("barrier constant beta = {beta} is not positive")]
    BetaNonPositive { beta: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Outcome of one audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: String,
    /// Measured suprema and other recorded numbers.
    pub measured: BTreeMap<String, f64>,
    /// Fitted constants; these are compared across refinements.
    pub constants: BTreeMap<String, f64>,
    /// Per-snapshot series (times under `"t"`).
    pub series: BTreeMap<String, Vec<f64>>,
    pub pass: bool,
    pub tolerance: f64,
    pub grid: GridInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub nodes: usize,
    pub snapshots: usize,
    /// Node-snapshot pairs the main supremum was taken over.
    pub samples: usize,
}

impl GridInfo {
    fn of(hist: &FlowHistory, samples: usize) -> Self {
        Self {
            nodes: hist.first().profile.len(),
            snapshots: hist.snapshots.len(),
            samples,
        }
    }
}

impl EstimateReport {
    /// One-line summary.
    pub fn summary(&self) -> String {
        let consts: Vec<String> = self.constants.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        format!(
            "{} {} [{}]",
            self.estimate,
            if self.pass { "PASS" } else { "FAIL" },
            consts.join(", ")
        )
    }
}

/// Largest relative change of the fitted constants between two reports of
/// the same audit at different resolutions. Constants below `1e-12` in both
/// count as equal.
pub fn constant_drift(coarse: &EstimateReport, fine: &EstimateReport) -> f64 {
    coarse
        .constants
        .iter()
        .map(|(k, &a)| {
            let b = fine.constants.get(k).copied().unwrap_or(f64::NAN);
            if a.abs() < 1e-12 && b.abs() < 1e-12 {
                0.0
            } else {
                (a - b).abs() / b.abs().max(a.abs())
            }
        })
        .fold(0.0, |acc, d| if d.is_nan() { f64::INFINITY } else { acc.max(d) })
}

/// Constants stable within `rel_tol` (0.1 is the default threshold).
pub fn refinement_stable(coarse: &EstimateReport, fine: &EstimateReport, rel_tol: f64) -> bool {
    constant_drift(coarse, fine) < rel_tol
}

/// Slack on `kappa_1 >= alpha H` when checking the pinching hypothesis.
const PINCH_SLACK: f64 = 1e-3;

/// `|Å| <= eps H + C_eps Theta` in `B_{L/2}` over the whole flow.
///
/// Balls are centered at the axis point `center`. `Theta` is the sup of `H`
/// over `B_{2L}` at the initial time and over `B_{2L} \ B_L` afterwards;
/// `C_eps` is measured as `sup (|Å| - eps H)_+ / Theta` over `B_{L/2}`.
pub fn audit_umbilic(
    hist: &FlowHistory,
    center: f64,
    l: f64,
    alpha: f64,
    eps_list: &[f64],
) -> Result<EstimateReport, VerifyError> {
    if !(l > 0.0) || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(VerifyError::InvalidInput("L and every eps must be positive".into()));
    }
    let mut theta: f64 = 0.0;
    let mut inner = Vec::new();
    let t0 = hist.first().t;
    for s in &hist.snapshots {
        for (i, c) in s.curvature.nodes.iter().enumerate() {
            let dist = s.profile.distance_from_axis_point(i, center);
            if dist > 2.0 * l {
                continue;
            }
            if c.mean > 0.0 && c.kappa_min < (alpha - PINCH_SLACK) * c.mean || c.mean <= 0.0 && alpha > 0.0 {
                return Err(VerifyError::NotPinched {
                    alpha,
                    ratio: c.ratio,
                    t: s.t,
                });
            }
            if s.t == t0 || dist > l {
                theta = theta.max(c.mean);
            }
            if dist <= l / 2.0 {
                inner.push((c.norm_aring(), c.mean));
            }
        }
    }
    if inner.is_empty() || !(theta > 0.0) {
        return Err(VerifyError::EmptyRegion);
    }
    let mut measured = BTreeMap::new();
    let mut constants = BTreeMap::new();
    measured.insert("theta".into(), theta);
    measured.insert(
        "sup_aring_over_h".into(),
        inner.iter().map(|(a, h)| a / h).fold(0.0, f64::max),
    );
    let mut finite = true;
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    let mut sorted: Vec<f64> = eps_list.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &eps in &sorted {
        let c = inner.iter().map(|(a, h)| (a - eps * h).max(0.0)).fold(0.0, f64::max) / theta;
        finite &= c.is_finite();
        monotone &= c <= prev;
        prev = c;
        constants.insert(format!("C_eps={eps}"), c);
    }
    Ok(EstimateReport {
        estimate: "umbilic".into(),
        measured,
        constants,
        series: BTreeMap::new(),
        pass: finite && monotone,
        tolerance: 0.1,
        grid: GridInfo::of(hist, inner.len()),
    })
}

/// Whether the ball `B_r(p)`, `p` on the axis, lies inside the region
/// bounded by the profile.
pub fn ball_contained(profile: &Profile, p: f64, r: f64) -> bool {
    let pos = profile.positions();
    let inside = match profile.kind {
        ProfileKind::PolarGraph => {
            let end = if p >= profile.center { pos[0].0 } else { pos[pos.len() - 1].0 };
            (p - profile.center).abs() < (end - profile.center).abs()
        }
        ProfileKind::AxisGraph => p > profile.params[0] && p < profile.params[profile.len() - 1],
    };
    inside && pos.windows(2).all(|w| segment_distance((p, 0.0), w[0], w[1]) >= r)
}

/// Interior estimate
/// `sup_{B_{Lr}(p)} (1 - |X - p|^2 / L^2 r^2) H <= C L^3 Theta / r`.
///
/// `Theta = max(1, r sup_{B_{2Lr}(p)} H(., 0))`. Snapshots are audited until
/// the ball first leaves the body; a failure at the initial time is an
/// error.
pub fn audit_interior(hist: &FlowHistory, p: f64, r: f64, l: f64) -> Result<EstimateReport, VerifyError> {
    if !(r > 0.0 && l > 1.0) {
        return Err(VerifyError::InvalidInput(format!("need r > 0 and L > 1, got r = {r}, L = {l}")));
    }
    let first = hist.first();
    if !ball_contained(&first.profile, p, r) {
        return Err(VerifyError::BallNotContained { t: first.t });
    }
    let sup_h0 = first
        .curvature
        .nodes
        .iter()
        .enumerate()
        .filter(|(i, _)| first.profile.distance_from_axis_point(*i, p) <= 2.0 * l * r)
        .map(|(_, c)| c.mean)
        .fold(0.0, f64::max);
    let theta = (r * sup_h0).max(1.0);
    let lr = l * r;
    let mut sup: f64 = 0.0;
    let mut samples = 0;
    let mut contained_until = first.t;
    let mut exit_time = f64::NAN;
    let mut times = Vec::new();
    let mut per_snapshot = Vec::new();
    for s in &hist.snapshots {
        if !ball_contained(&s.profile, p, r) {
            exit_time = s.t;
            break;
        }
        contained_until = s.t;
        let mut local: f64 = 0.0;
        for (i, c) in s.curvature.nodes.iter().enumerate() {
            let dist = s.profile.distance_from_axis_point(i, p);
            if dist <= lr {
                samples += 1;
                local = local.max((1.0 - dist * dist / (lr * lr)) * c.mean);
            }
        }
        sup = sup.max(local);
        times.push(s.t);
        per_snapshot.push(local);
    }
    let c_meas = sup * r / (l.powi(3) * theta);
    let mut measured = BTreeMap::new();
    measured.insert("theta".into(), theta);
    measured.insert("sup_weighted_h".into(), sup);
    measured.insert("contained_until".into(), contained_until);
    measured.insert("ball_exit_time".into(), exit_time);
    let mut constants = BTreeMap::new();
    constants.insert("C_meas".into(), c_meas);
    let mut series = BTreeMap::new();
    series.insert("t".into(), times);
    series.insert("weighted_h".into(), per_snapshot);
    Ok(EstimateReport {
        estimate: "interior".into(),
        measured,
        constants,
        series,
        pass: c_meas.is_finite(),
        tolerance: 0.1,
        grid: GridInfo::of(hist, samples),
    })
}

/// `kappa_1 >= alpha H` along the flow, tracked as
/// `m(t) = min (kappa_1 - alpha H) / max H`; passes iff `m(t) >= -tol`.
pub fn audit_pinching_preservation(hist: &FlowHistory, alpha: f64, tol: f64) -> Result<EstimateReport, VerifyError> {
    let m: Vec<f64> = hist
        .snapshots
        .iter()
        .map(|s| {
            let max_h = s.curvature.max_mean();
            s.curvature
                .nodes
                .iter()
                .map(|c| (c.kappa_min - alpha * c.mean) / max_h)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    if m[0] < -1e-12 {
        return Err(VerifyError::InitialPinchFails { m0: m[0] });
    }
    let min_m = m.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut measured = BTreeMap::new();
    measured.insert("alpha".into(), alpha);
    measured.insert("min_m".into(), min_m);
    measured.insert("final_t".into(), hist.final_time());
    let mut constants = BTreeMap::new();
    constants.insert("min_m".into(), min_m);
    let mut series = BTreeMap::new();
    series.insert("t".into(), hist.times());
    series.insert("m".into(), m);
    Ok(EstimateReport {
        estimate: "pinching".into(),
        measured,
        constants,
        series,
        pass: min_m >= -tol,
        tolerance: tol,
        grid: GridInfo::of(hist, hist.snapshots.len() * hist.first().profile.len()),
    })
}

/// Barrier `psi = <X - p, e> e^{(C + 1) t}` with `e` the axis direction and
/// `p` on the axis.
///
/// Along the flow `(d_t - Δ) <X - p, e> = 0`, so the audit measures
/// `e^{(C+1) t} |v_n nu_e - Δ <X, e>|` between consecutive snapshots with
/// `t <= t_max`, with the normal speed `v_n` from node displacements and
/// everything else averaged over the pair. `C` defaults to `sup |A|^2` over
/// the audited window. The exponential weight cancels in the relative
/// residual (per pair, divided by `e^{(C+1) t} max H`), which must be at most
/// `tol`; `beta`, the minimum of `<X - p, e> / |X - p|` on the initial
/// snapshot, must be positive.
pub fn audit_barrier(
    hist: &FlowHistory,
    p: f64,
    c: Option<f64>,
    t_max: Option<f64>,
    tol: f64,
) -> Result<EstimateReport, VerifyError> {
    let t_max = t_max.unwrap_or(f64::INFINITY);
    let window: Vec<&crate::flow::Snapshot> = hist.snapshots.iter().filter(|s| s.t <= t_max).collect();
    if window.len() < 2 {
        return Err(VerifyError::EmptyRegion);
    }
    let c = c.unwrap_or_else(|| window.iter().map(|s| s.curvature.max_norm_a2()).fold(0.0, f64::max));
    let first = window[0];
    let beta = first
        .curvature
        .nodes
        .iter()
        .map(|q| (q.axis - p) / (q.axis - p).hypot(q.radius))
        .fold(f64::INFINITY, f64::min);
    if !(beta > 0.0) {
        return Err(VerifyError::BetaNonPositive { beta });
    }
    let lap: Vec<Vec<f64>> = window
        .iter()
        .map(|s| {
            let z: Vec<f64> = s.curvature.nodes.iter().map(|q| q.axis).collect();
            laplace_beltrami(&s.profile, &z)
        })
        .collect::<Result<_, _>>()?;
    let mut sup: f64 = 0.0;
    let mut relative: f64 = 0.0;
    let mut times = Vec::new();
    let mut per_pair = Vec::new();
    let mut samples = 0;
    for k in 0..window.len() - 1 {
        let (a, b) = (window[k], window[k + 1]);
        if a.profile.params != b.profile.params || a.profile.kind != b.profile.kind {
            return Err(VerifyError::InvalidInput(format!(
                "snapshots {k} and {} are sampled on different grids",
                k + 1
            )));
        }
        let dt = b.t - a.t;
        let tm = 0.5 * (a.t + b.t);
        let mut local: f64 = 0.0;
        for i in 0..a.profile.len() {
            let (qa, qb) = (&a.curvature.nodes[i], &b.curvature.nodes[i]);
            let nu = [0.5 * (qa.normal[0] + qb.normal[0]), 0.5 * (qa.normal[1] + qb.normal[1])];
            let len = nu[0].hypot(nu[1]);
            let nu = [nu[0] / len, nu[1] / len];
            // nodes move along fixed parameter lines
            let disp = [(qb.axis - qa.axis) / dt, (qb.radius - qa.radius) / dt];
            let v_n = disp[0] * nu[0] + disp[1] * nu[1];
            let lap_z = 0.5 * (lap[k][i] + lap[k + 1][i]);
            local = local.max((v_n * nu[0] - lap_z).abs());
            samples += 1;
        }
        let max_h = a.curvature.max_mean().max(b.curvature.max_mean());
        relative = relative.max(local / max_h);
        let weighted = ((c + 1.0) * tm).exp() * local;
        sup = sup.max(weighted);
        times.push(tm);
        per_pair.push(weighted);
    }
    let mut measured = BTreeMap::new();
    measured.insert("C".into(), c);
    measured.insert("beta".into(), beta);
    measured.insert("sup_residual".into(), sup);
    measured.insert("relative_residual".into(), relative);
    measured.insert("t_max".into(), window[window.len() - 1].t);
    let mut constants = BTreeMap::new();
    constants.insert("beta".into(), beta);
    let mut series = BTreeMap::new();
    series.insert("t".into(), times);
    series.insert("residual".into(), per_pair);
    Ok(EstimateReport {
        estimate: "barrier".into(),
        measured,
        constants,
        series,
        pass: relative <= tol,
        tolerance: tol,
        grid: GridInfo::of(hist, samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{FlowConfig, Snapshot, Termination};
    use crate::geometry::compute_curvatures;

    fn history(profiles: Vec<(f64, Profile)>) -> FlowHistory {
        let n = profiles[0].1.n;
        let snaps = profiles
            .into_iter()
            .map(|(t, p)| Snapshot {
                t,
                curvature: compute_curvatures(&p).unwrap(),
                profile: p,
            })
            .collect();
        FlowHistory::from_snapshots(n, snaps, Termination::ReachedTEnd, FlowConfig::new(n)).unwrap()
    }

    fn exact_spheres(n: usize, times: &[f64]) -> FlowHistory {
        history(
            times
                .iter()
                .map(|&t| (t, Profile::sphere(n, (1.0 - 2.0 * n as f64 * t).sqrt(), 201).unwrap()))
                .collect(),
        )
    }

    #[test]
    fn sphere_umbilic_constant_is_zero() {
        let h = exact_spheres(2, &[0.0, 0.05, 0.1]);
        let rep = audit_umbilic(&h, 0.0, 2.5, 0.4, &[0.1]).unwrap();
        assert!(rep.constants["C_eps=0.1"] < 1e-6);
        assert!(rep.pass);
    }

    #[test]
    fn interior_cutoff_vanishes_on_boundary() {
        let h = exact_spheres(2, &[0.0, 1e-9]);
        let mut h = h;
        h.snapshots.truncate(1);
        let rep = audit_interior(&h, 0.0, 0.5, 2.0).unwrap();
        assert_eq!(rep.constants["C_meas"], 0.0);
    }

    #[test]
    fn ball_outside_is_reported() {
        let h = exact_spheres(2, &[0.0]);
        assert!(matches!(audit_interior(&h, 0.0, 1.5, 2.0), Err(VerifyError::BallNotContained { .. })));
    }

    #[test]
    fn sphere_pinching_is_equality() {
        let h = exact_spheres(3, &[0.0, 0.02, 0.04]);
        let rep = audit_pinching_preservation(&h, 1.0 / 3.0, 1e-3).unwrap();
        assert!(rep.measured["min_m"].abs() < 1e-6);
        assert!(rep.pass);
        assert!(matches!(
            audit_pinching_preservation(&h, 0.5, 1e-3),
            Err(VerifyError::InitialPinchFails { .. })
        ));
    }

    #[test]
    fn shrinking_cylinder_barrier_residual_vanishes() {
        let n = 2;
        let snaps = [0.0, 0.01, 0.02]
            .iter()
            .map(|&t| {
                let r = (1.0 - 2.0 * (n as f64 - 1.0) * t).sqrt();
                (t, Profile::axis_from_fn(n, 1.0, 3.0, 41, move |_| r).unwrap())
            })
            .collect();
        let h = history(snaps);
        let rep = audit_barrier(&h, 0.0, None, None, 1e-2).unwrap();
        assert!(rep.measured["sup_residual"] < 1e-12);
        assert!(rep.measured["beta"] > 0.0);
        assert!(matches!(audit_barrier(&h, 2.0, None, None, 1e-2), Err(VerifyError::BetaNonPositive { .. })));
    }
}
