//! Discrete spacetime of a recorded flow: parabolic cylinders, the doubling
//! point selection, parabolic rescaling and singularity-type evidence.
//!
//! Points live in the (axis, radius) half-plane. For two orbits of the
//! rotation group the closest pair of points lies in a common half-plane, so
//! the planar distance is the ambient distance.
//!
//! Cylinders use recorded snapshots only, with no interpolation in time.

use serde::{Deserialize, Serialize};

use crate::flow::{FlowError, FlowHistory, Snapshot, Termination};
use crate::geometry::{compute_curvatures, GeometryError, Profile, ProfileKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpacetimeError {
    #[error("no recorded snapshot in the time window ({0}, {1}]")]
    EmptyWindow(f64, f64),
    #[error("cylinder of radius {radius} about the seed leaves the recorded spacetime")]
    SeedNotCovered { radius: f64 },
    #[error("reference (snapshot {snapshot}, node {node}) does not resolve")]
    BadReference { snapshot: usize, node: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    /// (axis, radius).
    pub position: (f64, f64),
    pub t: f64,
    pub snapshot: usize,
    pub node: usize,
}

impl SpacetimePoint {
    pub fn at(hist: &FlowHistory, snapshot: usize, node: usize) -> Result<Self, SpacetimeError> {
        let c = hist
            .snapshots
            .get(snapshot)
            .and_then(|s| s.curvature.nodes.get(node))
            .ok_or(SpacetimeError::BadReference { snapshot, node })?;
        Ok(Self {
            position: (c.axis, c.radius),
            t: hist.snapshots[snapshot].t,
            snapshot,
            node,
        })
    }

    /// Mean curvature at the referenced node.
    pub fn mean(&self, hist: &FlowHistory) -> f64 {
        hist.snapshots[self.snapshot].curvature.nodes[self.node].mean
    }
}

/// `P_r(X, t) = B_r(X) x (t - r^2 / 2n, t]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCylinder {
    pub center: SpacetimePoint,
    pub r: f64,
}

impl ParabolicCylinder {
    pub fn new(center: SpacetimePoint, r: f64) -> Self {
        Self { center, r }
    }

    pub fn t_min(&self, n: usize) -> f64 {
        self.center.t - self.r * self.r / (2.0 * n as f64)
    }

    pub fn contains_time(&self, n: usize, t: f64) -> bool {
        t > self.t_min(n) && t <= self.center.t
    }

    pub fn contains(&self, n: usize, position: (f64, f64), t: f64) -> bool {
        self.contains_time(n, t) && distance(position, self.center.position) <= self.r
    }
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// All recorded nodes inside the cylinder.
pub fn cylinder_nodes(hist: &FlowHistory, cyl: &ParabolicCylinder) -> Result<Vec<SpacetimePoint>, SpacetimeError> {
    let n = hist.n;
    let mut any = false;
    let mut out = Vec::new();
    for (k, s) in hist.snapshots.iter().enumerate() {
        if !cyl.contains_time(n, s.t) {
            continue;
        }
        any = true;
        for (i, c) in s.curvature.nodes.iter().enumerate() {
            if distance((c.axis, c.radius), cyl.center.position) <= cyl.r {
                out.push(SpacetimePoint {
                    position: (c.axis, c.radius),
                    t: s.t,
                    snapshot: k,
                    node: i,
                });
            }
        }
    }
    if !any {
        return Err(SpacetimeError::EmptyWindow(cyl.t_min(n), cyl.center.t));
    }
    Ok(out)
}

/// History on a static unit sphere with a prescribed mean-curvature field
/// `field(snapshot, node)` (synthetic data for the point selection and the
/// classifier). Only `mean` is overridden; the other curvature entries stay
/// those of the sphere.
pub fn synthetic_history(
    n: usize,
    nodes: usize,
    times: &[f64],
    mut field: impl FnMut(usize, usize) -> f64,
) -> Result<FlowHistory, SpacetimeError> {
    let profile = Profile::sphere(n, 1.0, nodes)?;
    let base = compute_curvatures(&profile)?;
    let mut snapshots = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let mut curvature = base.clone();
        for (i, c) in curvature.nodes.iter_mut().enumerate() {
            c.mean = field(k, i);
        }
        snapshots.push(Snapshot {
            t,
            profile: profile.clone(),
            curvature,
        });
    }
    Ok(FlowHistory::from_snapshots(
        n,
        snapshots,
        Termination::ReachedTEnd,
        crate::flow::FlowConfig::new(n),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub point: SpacetimePoint,
    pub mean: f64,
    /// Radius of the cylinder searched from this point, `delta / (4 H)`.
    pub search_radius: f64,
}

/// Doubling chain from the seed to the selected point. The last link is the
/// selected point; the chain length is `links.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickCertificate {
    pub delta: f64,
    pub links: Vec<ChainLink>,
    /// Nodes inspected in the final search cylinder (coverage judgment).
    pub final_cylinder_nodes: usize,
}

impl PickCertificate {
    pub fn chain_len(&self) -> usize {
        self.links.len() - 1
    }

    pub fn selected(&self) -> SpacetimePoint {
        self.links[self.links.len() - 1].point
    }

    /// Each link at least doubles the mean curvature of its predecessor.
    pub fn doubles(&self) -> bool {
        self.links.windows(2).all(|w| w[1].mean >= 2.0 * w[0].mean)
    }
}

/// Selects `(Y, s)` with
/// 1. `(Y, s)` in `P_{delta / 2H(seed)}(seed)`,
/// 2. `H(Y, s) >= H(seed)`,
/// 3. `H <= 2 H(Y, s)` in `P_{delta / 4H(Y, s)}(Y, s)`,
///
/// by repeatedly jumping to a node with at least twice the curvature inside
/// the current quarter cylinder. Ties go to the smallest snapshot index,
/// then the smallest node index.
pub fn pick_point(hist: &FlowHistory, seed: SpacetimePoint, delta: f64) -> Result<PickCertificate, SpacetimeError> {
    if !(delta > 0.0) {
        return Err(SpacetimeError::InvalidInput(format!("delta {delta} must be positive")));
    }
    let seed = SpacetimePoint::at(hist, seed.snapshot, seed.node)?;
    let h0 = seed.mean(hist);
    if !(h0 > 0.0) {
        return Err(SpacetimeError::InvalidInput(format!("seed mean curvature {h0} must be positive")));
    }
    let outer = delta / (2.0 * h0);
    if !covered(hist, &ParabolicCylinder::new(seed, outer)) {
        return Err(SpacetimeError::SeedNotCovered { radius: outer });
    }
    let mut links = vec![ChainLink {
        point: seed,
        mean: h0,
        search_radius: delta / (4.0 * h0),
    }];
    loop {
        let cur = &links[links.len() - 1];
        let cyl = ParabolicCylinder::new(cur.point, cur.search_radius);
        let nodes = cylinder_nodes(hist, &cyl)?;
        // cylinder_nodes enumerates by snapshot then node, matching the tie-break
        let next = nodes.iter().find(|p| p.mean(hist) >= 2.0 * cur.mean).copied();
        match next {
            Some(p) => {
                let h = p.mean(hist);
                links.push(ChainLink {
                    point: p,
                    mean: h,
                    search_radius: delta / (4.0 * h),
                });
            }
            None => {
                return Ok(PickCertificate {
                    delta,
                    links,
                    final_cylinder_nodes: nodes.len(),
                })
            }
        }
    }
}

/// Whether the spatial ball of `cyl` stays inside the sampled part of every
/// snapshot in its window. Open ends of axis graphs must lie outside the
/// ball; times before the first snapshot are outside the flow and ignored.
fn covered(hist: &FlowHistory, cyl: &ParabolicCylinder) -> bool {
    if cyl.center.t > hist.final_time() {
        return false;
    }
    hist.snapshots
        .iter()
        .filter(|s| cyl.contains_time(hist.n, s.t))
        .all(|s| open_ends(s).iter().all(|&e| distance(e, cyl.center.position) > cyl.r))
}

fn open_ends(s: &Snapshot) -> Vec<(f64, f64)> {
    let p = &s.profile;
    let nodes = &s.curvature.nodes;
    if p.kind == ProfileKind::PolarGraph && p.is_closed() {
        return Vec::new();
    }
    let mut ends = Vec::new();
    for &i in &[0, nodes.len() - 1] {
        let c = &nodes[i];
        let at_cap = match p.kind {
            ProfileKind::AxisGraph => p.values[i] == 0.0,
            ProfileKind::PolarGraph => c.radius == 0.0,
        };
        if !at_cap {
            ends.push((c.axis, c.radius));
        }
    }
    ends
}

/// Exhaustive check of properties (1)-(3) and of the doubling chain, by a
/// scan over every recorded (snapshot, node) pair.
pub fn check_pick(hist: &FlowHistory, seed: SpacetimePoint, cert: &PickCertificate) -> Result<(), String> {
    let n = hist.n;
    let h0 = seed.mean(hist);
    let y = cert.selected();
    let hy = y.mean(hist);
    if cert.links[0].point.snapshot != seed.snapshot || cert.links[0].point.node != seed.node {
        return Err("chain does not start at the seed".into());
    }
    if !ParabolicCylinder::new(seed, cert.delta / (2.0 * h0)).contains(n, y.position, y.t) {
        return Err("property (1): selected point outside the outer cylinder".into());
    }
    if hy < h0 {
        return Err(format!("property (2): H(Y) = {hy} < H(seed) = {h0}"));
    }
    let inner = ParabolicCylinder::new(y, cert.delta / (4.0 * hy));
    for (k, s) in hist.snapshots.iter().enumerate() {
        for (i, c) in s.curvature.nodes.iter().enumerate() {
            if inner.contains(n, (c.axis, c.radius), s.t) && c.mean > 2.0 * hy {
                return Err(format!("property (3): H = {} at ({k}, {i}) exceeds 2 H(Y) = {}", c.mean, 2.0 * hy));
            }
        }
    }
    if !cert.doubles() {
        return Err("chain does not double".into());
    }
    for w in cert.links.windows(2) {
        let cyl = ParabolicCylinder::new(w[0].point, w[0].search_radius);
        if !cyl.contains(n, w[1].point.position, w[1].point.t) {
            return Err("chain link leaves its search cylinder".into());
        }
    }
    Ok(())
}

/// Parabolic rescaling `(X, t) -> (lambda (X - Y), lambda^2 (t - s))`.
///
/// Only the axial component of `Y` is subtracted: translating off the axis
/// would break the rotational symmetry the profiles encode. Curvatures are
/// recomputed, so `H` scales by `1 / lambda`.
pub fn rescale(hist: &FlowHistory, center: &SpacetimePoint, lambda: f64) -> Result<FlowHistory, SpacetimeError> {
    if !(lambda > 0.0) {
        return Err(SpacetimeError::InvalidInput(format!("lambda {lambda} must be positive")));
    }
    let y = center.position.0;
    let s0 = center.t;
    let mut snapshots = Vec::with_capacity(hist.snapshots.len());
    for s in &hist.snapshots {
        let p = &s.profile;
        let profile = match p.kind {
            ProfileKind::PolarGraph => Profile::polar(
                p.n,
                lambda * (p.center - y),
                p.params.clone(),
                p.values.iter().map(|v| lambda * v).collect(),
            )?,
            ProfileKind::AxisGraph => Profile::axis(
                p.n,
                p.params.iter().map(|x| lambda * (x - y)).collect(),
                p.values.iter().map(|v| lambda * v).collect(),
            )?,
        };
        let curvature = compute_curvatures(&profile)?;
        snapshots.push(Snapshot {
            t: lambda * lambda * (s.t - s0),
            profile,
            curvature,
        });
    }
    let mut config = hist.config.clone();
    config.t_end = config.t_end.map(|t| lambda * lambda * (t - s0));
    config.snapshot_dt = config.snapshot_dt.map(|dt| lambda * lambda * dt);
    config.max_h_blowup = config.max_h_blowup.map(|h| h / lambda);
    let mut out = FlowHistory::from_snapshots(hist.n, snapshots, hist.termination, config)?;
    out.steps = hist.steps;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeVerdict {
    /// The flow hit the curvature cutoff.
    FiniteTime,
    /// `sqrt(t) max H` peaked early and stayed below its peak.
    TypeIIIEvidence,
    /// `sqrt(t) max H` was still near its sup late in the record.
    TypeIIbEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonMax {
    pub horizon: f64,
    pub snapshot: usize,
    pub node: usize,
    pub t: f64,
    /// `t (j - t) H^2` at the maximizer.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeReport {
    pub times: Vec<f64>,
    pub sqrt_t_max_h: Vec<f64>,
    pub sup: f64,
    pub sup_time: f64,
    /// One entry per horizon that has recorded snapshots in `[0, j]`.
    pub horizons: Vec<HorizonMax>,
    pub verdict: TypeVerdict,
    /// Finite data cannot prove a sup finite; the verdict is evidence only.
    pub evidence_only: bool,
}

/// Tracks `sqrt(t) max H` and, for each horizon `j`, the maximizer of
/// `t (j - t) H^2` over recorded nodes with `0 <= t <= j`.
pub fn classify_type(hist: &FlowHistory, horizons: &[f64]) -> TypeReport {
    let times = hist.times();
    let sqrt_t_max_h: Vec<f64> = hist
        .snapshots
        .iter()
        .map(|s| s.t.max(0.0).sqrt() * s.curvature.max_mean().max(0.0))
        .collect();
    let (mut sup, mut sup_idx) = (f64::NEG_INFINITY, 0);
    for (k, &v) in sqrt_t_max_h.iter().enumerate() {
        if v > sup {
            sup = v;
            sup_idx = k;
        }
    }
    let mut maxima = Vec::new();
    for &j in horizons {
        let mut best: Option<HorizonMax> = None;
        for (k, s) in hist.snapshots.iter().enumerate() {
            if s.t < 0.0 || s.t > j {
                continue;
            }
            for (i, c) in s.curvature.nodes.iter().enumerate() {
                let v = s.t * (j - s.t) * c.mean * c.mean;
                if best.as_ref().map_or(true, |b| v > b.value) {
                    best = Some(HorizonMax {
                        horizon: j,
                        snapshot: k,
                        node: i,
                        t: s.t,
                        value: v,
                    });
                }
            }
        }
        maxima.extend(best);
    }
    let t_first = times[0];
    let t_last = hist.final_time();
    let verdict = if hist.termination == Termination::CurvatureBlowup {
        TypeVerdict::FiniteTime
    } else if times[sup_idx] < t_first + 2.0 / 3.0 * (t_last - t_first) {
        TypeVerdict::TypeIIIEvidence
    } else {
        TypeVerdict::TypeIIbEvidence
    };
    TypeReport {
        sup_time: times[sup_idx],
        times,
        sqrt_t_max_h,
        sup,
        horizons: maxima,
        verdict,
        evidence_only: true,
    }
}
