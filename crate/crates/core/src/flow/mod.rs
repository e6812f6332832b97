//! Evolution by mean curvature and the approximation pipeline for convex
//! bodies.

mod existence;
mod mollify;
mod persist;
mod step;

pub use existence::{existence_pipeline, reflect_truncate, ExistenceConfig, ExistenceOutcome, ExistenceReport, RunSummary};
pub use mollify::mollify_polar;
pub use step::{mcf_residual, run_flow, step_mcf, stable_dt};

use serde::{Deserialize, Serialize};

use crate::geometry::{CurvatureField, GeometryError, Profile, ProfileKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("time step {dt} exceeds the stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("radius collapsed at node {node}")]
    RadiusCollapse { node: usize },
    #[error("truncation height {height} is not above the tip {tip}")]
    HeightTooSmall { height: f64, tip: f64 },
    #[error("truncation height {0} exceeds the sampled part of the body")]
    HeightOutOfRange(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("history i/o: {0}")]
    Io(String),
}

/// Settings of one flow run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub n: usize,
    /// Fraction of the explicit stability limit used as time step.
    pub dt_safety: f64,
    /// Stop once `max H` reaches this value; `None` means 1000 times the
    /// initial `max H`.
    pub max_h_blowup: Option<f64>,
    pub t_end: Option<f64>,
    /// Resample to a uniform grid every this many steps (0 = never).
    pub remesh_interval: usize,
    /// Record a snapshot at every multiple of this time; `None` records
    /// every step.
    pub snapshot_dt: Option<f64>,
    pub max_steps: usize,
}

impl FlowConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            dt_safety: 0.9,
            max_h_blowup: None,
            t_end: None,
            remesh_interval: 1000,
            snapshot_dt: None,
            max_steps: 50_000_000,
        }
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = Some(t_end);
        self
    }

    pub fn with_snapshot_dt(mut self, dt: f64) -> Self {
        self.snapshot_dt = Some(dt);
        self
    }

    pub fn with_dt_safety(mut self, s: f64) -> Self {
        self.dt_safety = s;
        self
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(FlowError::InvalidConfig(format!("dt_safety {} not in (0, 1]", self.dt_safety)));
        }
        if let Some(h) = self.max_h_blowup {
            if !(h > 0.0) {
                return Err(FlowError::InvalidConfig(format!("max_h_blowup {h} must be positive")));
            }
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0) {
                return Err(FlowError::InvalidConfig(format!("t_end {t} must be positive")));
            }
        }
        if let Some(dt) = self.snapshot_dt {
            if !(dt > 0.0) {
                return Err(FlowError::InvalidConfig(format!("snapshot_dt {dt} must be positive")));
            }
        }
        if self.n == 0 {
            return Err(FlowError::InvalidConfig("n must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ReachedTEnd,
    CurvatureBlowup,
    Degenerate,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub profile: Profile,
    pub curvature: CurvatureField,
}

/// Time-ordered record of a flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowHistory {
    pub n: usize,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    pub config: FlowConfig,
    pub steps: usize,
}

impl FlowHistory {
    /// Assembles a history from existing snapshots (synthetic data, rescaled
    /// copies, loaded runs).
    pub fn from_snapshots(
        n: usize,
        snapshots: Vec<Snapshot>,
        termination: Termination,
        config: FlowConfig,
    ) -> Result<Self, FlowError> {
        if snapshots.is_empty() {
            return Err(FlowError::InvalidConfig("history needs at least one snapshot".into()));
        }
        if snapshots.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(FlowError::InvalidConfig("snapshot times must increase strictly".into()));
        }
        Ok(Self {
            n,
            snapshots,
            termination,
            config,
            steps: 0,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn first(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        &self.snapshots[self.snapshots.len() - 1]
    }

    /// Time of the last snapshot; for a blowup this is the measured
    /// extinction time.
    pub fn final_time(&self) -> f64 {
        self.last().t
    }

    /// Radius of a polar profile at the node nearest `theta` (sphere runs).
    pub fn polar_radius_at(&self, snapshot: usize, node: usize) -> Option<f64> {
        let s = self.snapshots.get(snapshot)?;
        (s.profile.kind == ProfileKind::PolarGraph).then(|| s.profile.values[node])
    }

    /// Index of the snapshot recorded at time `t` (within `1e-12`).
    pub fn snapshot_at(&self, t: f64) -> Option<usize> {
        self.snapshots.iter().position(|s| (s.t - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}
