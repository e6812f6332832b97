use super::{FlowConfig, FlowError, FlowHistory, Snapshot, Termination};
use crate::geometry::{compute_curvatures, GeometryError, Profile, ProfileKind};
use crate::numerics::fd_weights;

/// Precomputed difference stencils for one parameter grid.
///
/// Polar poles use even reflection; open ends use one-sided four-point
/// stencils.
pub(crate) struct Stencil {
    idx: Vec<[usize; 4]>,
    w1: Vec<[f64; 4]>,
    w2: Vec<[f64; 4]>,
    spacing: Vec<f64>,
    pole: Vec<bool>,
}

impl Stencil {
    pub(crate) fn new(p: &Profile) -> Self {
        let m = p.len();
        let x = &p.params;
        let mut idx = Vec::with_capacity(m);
        let mut w1 = Vec::with_capacity(m);
        let mut w2 = Vec::with_capacity(m);
        let mut pole = vec![false; m];
        let mut spacing = Vec::with_capacity(m);
        for i in 0..m {
            let h_left = if i > 0 { x[i] - x[i - 1] } else { f64::INFINITY };
            let h_right = if i + 1 < m { x[i + 1] - x[i] } else { f64::INFINITY };
            spacing.push(h_left.min(h_right));
            let at_pole = (i == 0 && p.starts_at_pole()) || (i == m - 1 && p.ends_at_pole());
            if at_pole {
                pole[i] = true;
                let j = if i == 0 { 1 } else { m - 2 };
                let h = (x[j] - x[i]).abs();
                idx.push([j, i, j, i]);
                w1.push([0.0; 4]);
                w2.push([1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h), 0.0]);
                continue;
            }
            let (lo, len) = if i == 0 {
                (0, 4)
            } else if i == m - 1 {
                (m - 4, 4)
            } else {
                (i - 1, 3)
            };
            let w = fd_weights(x[i], &x[lo..lo + len], 2);
            let mut ids = [i; 4];
            let mut a = [0.0; 4];
            let mut b = [0.0; 4];
            for k in 0..len {
                ids[k] = lo + k;
                a[k] = w[1][k];
                b[k] = w[2][k];
            }
            idx.push(ids);
            w1.push(a);
            w2.push(b);
        }
        Self {
            idx,
            w1,
            w2,
            spacing,
            pole,
        }
    }

    #[inline]
    pub(crate) fn d1(&self, i: usize, v: &[f64]) -> f64 {
        let ids = &self.idx[i];
        let w = &self.w1[i];
        w[0] * v[ids[0]] + w[1] * v[ids[1]] + w[2] * v[ids[2]] + w[3] * v[ids[3]]
    }

    #[inline]
    pub(crate) fn d2(&self, i: usize, v: &[f64]) -> f64 {
        let ids = &self.idx[i];
        let w = &self.w2[i];
        w[0] * v[ids[0]] + w[1] * v[ids[1]] + w[2] * v[ids[2]] + w[3] * v[ids[3]]
    }

    pub(crate) fn is_pole(&self, i: usize) -> bool {
        self.pole[i]
    }

    pub(crate) fn spacing(&self, i: usize) -> f64 {
        self.spacing[i]
    }
}

/// Normal-speed evaluation for the reduced flow equations.
pub(crate) struct Stepper {
    kind: ProfileKind,
    n: usize,
    stencil: Stencil,
    cot: Vec<f64>,
}

/// Result of one evaluation of the reduced right-hand side.
pub(crate) struct Rates {
    pub velocity: Vec<f64>,
    pub max_mean: f64,
    pub dt_limit: f64,
}

impl Stepper {
    pub(crate) fn new(p: &Profile) -> Result<Self, FlowError> {
        if p.kind == ProfileKind::AxisGraph && (p.values[0] == 0.0 || p.values[p.len() - 1] == 0.0) {
            // closed bodies are flowed as polar graphs
            return Err(GeometryError::DegenerateRadius.into());
        }
        let cot = p.params.iter().map(|t| t.cos() / t.sin()).collect();
        Ok(Self {
            kind: p.kind,
            n: p.n,
            stencil: Stencil::new(p),
            cot,
        })
    }

    /// Parameter-space velocity of the generating function and the explicit
    /// stability limit.
    ///
    /// Polar graph: `d rho/dt = -H |T| / rho` with `|T|^2 = rho^2 + rho'^2`.
    /// Axis graph: `d r/dt = r'' / (1 + r'^2) - (n - 1) / r`.
    pub(crate) fn rates(&self, values: &[f64]) -> Rates {
        let m = values.len();
        let n1 = (self.n - 1) as f64;
        let nf = self.n as f64;
        let mut velocity = vec![0.0; m];
        let mut max_mean = f64::NEG_INFINITY;
        let mut dt_limit = f64::INFINITY;
        match self.kind {
            ProfileKind::PolarGraph => {
                for i in 0..m {
                    let rho = values[i];
                    let d1 = self.stencil.d1(i, values);
                    let d2 = self.stencil.d2(i, values);
                    let t2 = rho * rho + d1 * d1;
                    // -kappa_axial |T| and -(n-1) kappa_rot |T|
                    let axial = (rho * d2 - rho * rho - 2.0 * d1 * d1) / t2;
                    let q = if self.stencil.is_pole(i) { d2 / rho } else { d1 / rho * self.cot[i] };
                    let rot = -n1 * (1.0 - q);
                    velocity[i] = (axial + rot) / rho;
                    let mean = -(axial + rot) / t2.sqrt();
                    max_mean = max_mean.max(mean);
                    let h = self.stencil.spacing(i);
                    dt_limit = dt_limit.min(h * h * t2 / (2.0 * nf));
                }
            }
            ProfileKind::AxisGraph => {
                for i in 0..m {
                    let r = values[i];
                    let d1 = self.stencil.d1(i, values);
                    let d2 = self.stencil.d2(i, values);
                    let g = 1.0 + d1 * d1;
                    velocity[i] = d2 / g - n1 / r;
                    max_mean = max_mean.max(-velocity[i] / g.sqrt());
                    let h = self.stencil.spacing(i);
                    dt_limit = dt_limit.min(h * h * g / 2.0);
                }
                // open ends follow the linear extrapolation of their neighbours
                velocity[0] = 2.0 * velocity[1] - velocity[2];
                velocity[m - 1] = 2.0 * velocity[m - 2] - velocity[m - 3];
            }
        }
        Rates {
            velocity,
            max_mean,
            dt_limit,
        }
    }

    pub(crate) fn advance(&self, values: &mut [f64], velocity: &[f64], dt: f64) -> Result<(), FlowError> {
        for (v, rate) in values.iter_mut().zip(velocity) {
            *v += dt * rate;
        }
        if let Some(node) = values.iter().position(|&v| !(v > 0.0)) {
            return Err(FlowError::RadiusCollapse { node });
        }
        Ok(())
    }
}

/// Largest stable explicit time step for `p` (before the safety factor).
pub fn stable_dt(p: &Profile) -> Result<f64, FlowError> {
    let s = Stepper::new(p)?;
    Ok(s.rates(&p.values).dt_limit)
}

/// One explicit Euler step of mean curvature flow.
pub fn step_mcf(p: &Profile, dt: f64, n: usize) -> Result<Profile, FlowError> {
    if n != p.n {
        return Err(FlowError::InvalidConfig(format!("dimension {n} does not match profile dimension {}", p.n)));
    }
    p.validate()?;
    let stepper = Stepper::new(p)?;
    let rates = stepper.rates(&p.values);
    if dt > rates.dt_limit {
        return Err(FlowError::CflViolation {
            dt,
            limit: rates.dt_limit,
        });
    }
    let mut values = p.values.clone();
    stepper.advance(&mut values, &rates.velocity, dt)?;
    Ok(Profile {
        values,
        ..p.clone()
    })
}

fn snapshot(t: f64, profile: &Profile) -> Result<Snapshot, FlowError> {
    Ok(Snapshot {
        t,
        curvature: compute_curvatures(profile)?,
        profile: profile.clone(),
    })
}

/// Evolves `p0` with adaptive explicit steps until `t_end`, curvature blowup
/// or degeneration.
pub fn run_flow(p0: &Profile, cfg: &FlowConfig) -> Result<FlowHistory, FlowError> {
    cfg.validate()?;
    if cfg.n != p0.n {
        return Err(FlowError::InvalidConfig(format!(
            "config dimension {} does not match profile dimension {}",
            cfg.n, p0.n
        )));
    }
    p0.validate()?;
    let mut profile = p0.clone();
    if !profile.is_uniform() {
        profile = profile.remesh_uniform(profile.len())?;
    }
    let first = snapshot(0.0, &profile)?;
    let threshold = cfg.max_h_blowup.unwrap_or(1e3 * first.curvature.max_mean());
    let mut snapshots = vec![first];
    let stepper = Stepper::new(&profile)?;
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut next_snap = cfg.snapshot_dt.map(|d| d);
    let mut snap_count = 1usize;
    let termination = loop {
        let rates = stepper.rates(&profile.values);
        if rates.max_mean >= threshold || !rates.max_mean.is_finite() {
            let s = snapshot(t, &profile)?;
            if s.curvature.max_mean() >= threshold {
                if s.t > snapshots.last().unwrap().t {
                    snapshots.push(s);
                } else {
                    *snapshots.last_mut().unwrap() = s;
                }
                break Termination::CurvatureBlowup;
            }
        }
        if steps >= cfg.max_steps {
            break Termination::StepLimit;
        }
        let mut dt = cfg.dt_safety * rates.dt_limit;
        let mut record = cfg.snapshot_dt.is_none();
        let mut finish = false;
        if let Some(end) = cfg.t_end {
            if t + dt >= end * (1.0 - 1e-14) {
                dt = end - t;
                record = true;
                finish = true;
            }
        }
        if let Some(ns) = next_snap {
            if t + dt >= ns * (1.0 - 1e-14) {
                dt = dt.min(ns - t);
                record = true;
                if (t + dt - ns).abs() <= 1e-14 * ns.max(1.0) {
                    snap_count += 1;
                    next_snap = Some(cfg.snapshot_dt.unwrap() * snap_count as f64);
                }
            }
        }
        if !(dt > 0.0) {
            break Termination::Degenerate;
        }
        if let Err(FlowError::RadiusCollapse { .. }) = stepper.advance(&mut profile.values, &rates.velocity, dt) {
            break Termination::Degenerate;
        }
        t += dt;
        steps += 1;
        if cfg.remesh_interval > 0 && steps % cfg.remesh_interval == 0 {
            profile = profile.remesh_uniform(profile.len())?;
        }
        if record || finish {
            match snapshot(t, &profile) {
                Ok(s) => snapshots.push(s),
                Err(_) => break Termination::Degenerate,
            }
        }
        if finish {
            break Termination::ReachedTEnd;
        }
    };
    Ok(FlowHistory {
        n: cfg.n,
        snapshots,
        termination,
        config: cfg.clone(),
        steps,
    })
}

/// Sup over snapshot pairs and nodes of `|v_normal + H|`, relative to the
/// largest `H` of the pair.
///
/// The normal velocity is the time difference of the generating function
/// projected on the normal; `H` is averaged over the pair (centred in time).
pub fn mcf_residual(hist: &FlowHistory) -> f64 {
    let mut worst: f64 = 0.0;
    for w in hist.snapshots.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.profile.params != b.profile.params || a.profile.kind != b.profile.kind {
            continue;
        }
        let dt = b.t - a.t;
        let scale = a.curvature.max_mean().max(b.curvature.max_mean());
        for i in 0..a.profile.len() {
            let (ca, cb) = (&a.curvature.nodes[i], &b.curvature.nodes[i]);
            let dv = (b.profile.values[i] - a.profile.values[i]) / dt;
            // projection of the parameter-space velocity direction on the normal
            let proj = |p: &Profile, c: &crate::geometry::CurvatureNode| match p.kind {
                ProfileKind::PolarGraph => {
                    let (s, co) = c.param.sin_cos();
                    co * c.normal[0] + s * c.normal[1]
                }
                ProfileKind::AxisGraph => c.normal[1],
            };
            let v_n = dv * 0.5 * (proj(&a.profile, ca) + proj(&b.profile, cb));
            let h = 0.5 * (ca.mean + cb.mean);
            worst = worst.max((v_n + h).abs() / scale);
        }
    }
    worst
}
