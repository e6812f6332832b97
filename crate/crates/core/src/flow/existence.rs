use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mollify_polar, run_flow, FlowConfig, FlowError, FlowHistory, Termination};
use crate::geometry::{uniform_grid, ConvexBody, Profile};

/// Intersects an unbounded axis-graph body with its reflection across the
/// hyperplane `{x = height}`.
///
/// The result is a closed polar profile with `nodes` samples about the
/// midpoint of the axis segment inside the truncated body, i.e. about
/// `x = height`. Bounded bodies are returned unchanged.
pub fn reflect_truncate(body: &ConvexBody, height: f64, nodes: usize) -> Result<ConvexBody, FlowError> {
    if body.is_bounded() {
        return Ok(body.clone());
    }
    let tip = body.tip();
    if !(height > tip) {
        return Err(FlowError::HeightTooSmall { height, tip });
    }
    let p = &body.profile;
    if height > p.params[p.len() - 1] {
        return Err(FlowError::HeightOutOfRange(height));
    }
    let u = body.height_function().expect("unbounded bodies are axis graphs");
    let center = height;
    let thetas = uniform_grid(0.0, PI, nodes);
    let mut rhos = Vec::with_capacity(nodes);
    for &theta in &thetas {
        let (s, c) = theta.sin_cos();
        // boundary where u(rho sin) + rho |cos| = height; g increases in rho
        let g = |rho: f64| u.eval((rho * s).max(0.0)) + rho * c.abs() - height;
        let mut lo = 0.0;
        let mut hi = (height - tip).max(1e-12);
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        rhos.push(0.5 * (lo + hi));
    }
    let profile = Profile::polar(p.n, center, thetas, rhos)?;
    Ok(ConvexBody::new(profile)?)
}

/// Settings of the truncate–mollify–flow matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExistenceConfig {
    pub nodes: usize,
    /// Flow time at which the approximations are compared.
    pub delta: f64,
    /// Radius of the comparison ball about the tip of the body.
    pub ball_radius: f64,
    pub flow: FlowConfig,
    /// Snapshots recorded per run (evenly spaced up to `delta`).
    pub snapshots: usize,
}

impl ExistenceConfig {
    pub fn new(n: usize) -> Self {
        Self {
            nodes: 801,
            delta: 0.05,
            ball_radius: 1.0,
            flow: FlowConfig::new(n),
            snapshots: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    /// `None` for a bounded body (no truncation).
    pub height: Option<f64>,
    pub eps: f64,
    /// Heat time on the unit sphere actually used (`eps / inradius^2`).
    pub heat_time: f64,
    pub inradius: f64,
    pub termination: Termination,
    /// `sup_{t <= delta} sup |A|` over nodes within the comparison ball.
    pub sup_a_ball: f64,
    /// `max H` within the comparison ball at `t = delta`.
    pub max_h_ball: f64,
    /// Height of the flowed surface over the radius grid near the tip.
    pub tip_graph: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExistenceReport {
    pub bounded: bool,
    pub delta: f64,
    pub ball_radius: f64,
    pub radius_grid: Vec<f64>,
    pub runs: Vec<RunSummary>,
    /// Sup distances of tip graphs between consecutive heights at the
    /// smallest eps.
    pub height_spreads: Vec<f64>,
    /// Sup distances between consecutive eps at the largest height.
    pub eps_spreads: Vec<f64>,
    /// Distance between the two finest settings: the largest two heights at
    /// the smallest eps (consecutive eps for bounded bodies).
    pub finest_spread: f64,
    /// Observed convergence orders `log2(d_k / d_{k+1})` along the height
    /// sequence.
    pub height_rates: Vec<f64>,
    /// `max / min` of `sup_a_ball` over the matrix.
    pub sup_a_spread: f64,
    pub sup_a_max: f64,
}

pub struct ExistenceOutcome {
    pub histories: Vec<FlowHistory>,
    pub report: ExistenceReport,
}

/// Runs every (height, eps) combination: truncate, mollify on the inball
/// sphere, flow to `delta`, and compare the results near the tip.
pub fn existence_pipeline(
    body: &ConvexBody,
    heights: &[f64],
    epss: &[f64],
    cfg: &ExistenceConfig,
) -> Result<ExistenceOutcome, FlowError> {
    if heights.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FlowError::InvalidConfig("heights must increase".into()));
    }
    if epss.windows(2).any(|w| w[1] >= w[0]) {
        return Err(FlowError::InvalidConfig("eps values must decrease".into()));
    }
    if epss.is_empty() {
        return Err(FlowError::InvalidConfig("need at least one eps".into()));
    }
    let bounded = body.is_bounded();
    let hs: Vec<Option<f64>> = if bounded {
        vec![None]
    } else {
        if heights.is_empty() {
            return Err(FlowError::InvalidConfig("unbounded body needs truncation heights".into()));
        }
        heights.iter().map(|&h| Some(h)).collect()
    };
    let tip = body.tip();
    let r_max = 0.9 * cfg.ball_radius;
    let radius_grid: Vec<f64> = (0..=100).map(|k| r_max * k as f64 / 100.0).collect();
    let mut flow_cfg = cfg.flow.clone();
    flow_cfg.t_end = Some(cfg.delta);
    flow_cfg.snapshot_dt = Some(cfg.delta / cfg.snapshots.max(1) as f64);

    let matrix: Vec<(usize, usize)> = (0..hs.len()).flat_map(|i| (0..epss.len()).map(move |j| (i, j))).collect();
    let results: Vec<Result<(FlowHistory, RunSummary), FlowError>> = matrix
        .par_iter()
        .map(|&(i, j)| {
            let truncated = match hs[i] {
                Some(h) => reflect_truncate(body, h, cfg.nodes)?,
                None => {
                    let p = body.profile.remesh_uniform(cfg.nodes)?;
                    ConvexBody::new(p)?
                }
            };
            let inradius = truncated.inradius;
            let heat_time = epss[j] / (inradius * inradius);
            let smooth = mollify_polar(&truncated.profile, heat_time)?;
            let hist = run_flow(&smooth, &flow_cfg)?;
            let mut sup_a_ball: f64 = 0.0;
            for s in &hist.snapshots {
                for c in &s.curvature.nodes {
                    if (c.axis - tip).hypot(c.radius) <= cfg.ball_radius {
                        sup_a_ball = sup_a_ball.max(c.norm_a2.sqrt());
                    }
                }
            }
            let last = hist.last();
            let max_h_ball = last
                .curvature
                .nodes
                .iter()
                .filter(|c| (c.axis - tip).hypot(c.radius) <= cfg.ball_radius)
                .map(|c| c.mean)
                .fold(f64::NEG_INFINITY, f64::max);
            let tip_graph = lower_graph(&last.profile, &radius_grid);
            let summary = RunSummary {
                height: hs[i],
                eps: epss[j],
                heat_time,
                inradius,
                termination: hist.termination,
                sup_a_ball,
                max_h_ball,
                tip_graph,
            };
            Ok((hist, summary))
        })
        .collect();
    let mut histories = Vec::with_capacity(results.len());
    let mut runs = Vec::with_capacity(results.len());
    for r in results {
        let (h, s) = r?;
        histories.push(h);
        runs.push(s);
    }
    let run = |i: usize, j: usize| &runs[i * epss.len() + j];
    let last_eps = epss.len() - 1;
    let height_spreads: Vec<f64> = (1..hs.len())
        .map(|i| sup_distance(&run(i - 1, last_eps).tip_graph, &run(i, last_eps).tip_graph))
        .collect();
    let last_h = hs.len() - 1;
    let eps_spreads: Vec<f64> = (1..epss.len())
        .map(|j| sup_distance(&run(last_h, j - 1).tip_graph, &run(last_h, j).tip_graph))
        .collect();
    let finest_spread = if bounded {
        eps_spreads.last().copied().unwrap_or(0.0)
    } else {
        height_spreads.last().copied().unwrap_or(0.0)
    };
    let height_rates = height_spreads.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let sup_a_max = runs.iter().map(|r| r.sup_a_ball).fold(0.0, f64::max);
    let sup_a_min = runs.iter().map(|r| r.sup_a_ball).fold(f64::INFINITY, f64::min);
    let report = ExistenceReport {
        bounded,
        delta: cfg.delta,
        ball_radius: cfg.ball_radius,
        radius_grid,
        runs,
        height_spreads,
        eps_spreads,
        finest_spread,
        height_rates,
        sup_a_spread: sup_a_max / sup_a_min,
        sup_a_max,
    };
    Ok(ExistenceOutcome { histories, report })
}

/// Axis coordinate of the lower sheet of a closed polar profile (the branch
/// ending at `theta = pi`) as a function of the radius; NaN beyond the sheet.
pub(crate) fn lower_graph(p: &Profile, radii: &[f64]) -> Vec<f64> {
    let pos = p.positions();
    let mut branch: Vec<(f64, f64)> = Vec::new();
    for &(z, r) in pos.iter().rev() {
        if let Some(&(r_prev, _)) = branch.last() {
            if r <= r_prev {
                break;
            }
        }
        branch.push((r, z));
    }
    radii
        .iter()
        .map(|&r| {
            let k = branch.partition_point(|b| b.0 < r);
            if k == 0 {
                if branch[0].0 == r { branch[0].1 } else { f64::NAN }
            } else if k >= branch.len() {
                f64::NAN
            } else {
                let (r0, z0) = branch[k - 1];
                let (r1, z1) = branch[k];
                z0 + (z1 - z0) * (r - r0) / (r1 - r0)
            }
        })
        .collect()
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, |acc, d| if d.is_nan() { f64::INFINITY } else { acc.max(d) })
}
