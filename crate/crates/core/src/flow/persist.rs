use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FlowConfig, FlowError, FlowHistory, Snapshot, Termination};
use crate::geometry::{compute_curvatures, Profile, ProfileKind};

#[derive(Serialize, Deserialize)]
struct Manifest {
    n: usize,
    kind: ProfileKind,
    center: f64,
    config: FlowConfig,
    termination: Termination,
    steps: usize,
    times: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    #[allow(dead_code)]
    node_index: usize,
    param: f64,
    axis_coord: f64,
    radius: f64,
}

fn io<E: std::fmt::Display>(e: E) -> FlowError {
    FlowError::Io(e.to_string())
}

impl FlowHistory {
    /// Writes `manifest.json` plus one `snapshot_XXXX.csv` per snapshot.
    pub fn save(&self, dir: &Path) -> Result<(), FlowError> {
        fs::create_dir_all(dir).map_err(io)?;
        let first = &self.first().profile;
        let manifest = Manifest {
            n: self.n,
            kind: first.kind,
            center: first.center,
            config: self.config.clone(),
            termination: self.termination,
            steps: self.steps,
            times: self.times(),
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(io)?;
        fs::write(dir.join("manifest.json"), json).map_err(io)?;
        for (k, s) in self.snapshots.iter().enumerate() {
            let f = fs::File::create(dir.join(format!("snapshot_{k:04}.csv"))).map_err(io)?;
            s.curvature.write_csv(f).map_err(io)?;
        }
        Ok(())
    }

    /// Reads a history written by [`FlowHistory::save`]; curvatures are
    /// recomputed from the stored positions.
    pub fn load(dir: &Path) -> Result<Self, FlowError> {
        let text = fs::read_to_string(dir.join("manifest.json")).map_err(io)?;
        let m: Manifest = serde_json::from_str(&text).map_err(io)?;
        let mut snapshots = Vec::with_capacity(m.times.len());
        for (k, &t) in m.times.iter().enumerate() {
            let mut rdr = csv::Reader::from_path(dir.join(format!("snapshot_{k:04}.csv"))).map_err(io)?;
            let mut params = Vec::new();
            let mut values = Vec::new();
            for row in rdr.deserialize() {
                let row: Row = row.map_err(io)?;
                params.push(row.param);
                values.push(match m.kind {
                    ProfileKind::PolarGraph => (row.axis_coord - m.center).hypot(row.radius),
                    ProfileKind::AxisGraph => row.radius,
                });
            }
            let profile = Profile::new(m.kind, m.n, params, values, m.center)?;
            let curvature = compute_curvatures(&profile)?;
            snapshots.push(Snapshot { t, profile, curvature });
        }
        let mut hist = FlowHistory::from_snapshots(m.n, snapshots, m.termination, m.config)?;
        hist.steps = m.steps;
        Ok(hist)
    }
}
