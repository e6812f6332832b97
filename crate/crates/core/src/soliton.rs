//! Rotationally symmetric translators and expanders.
//!
//! A soliton is the graph of `u(rho)` over `R^n`, `rho = |x|`, written in the
//! (axis, radius) half-plane as `(u(rho), rho)`. It is convex with
//! `u'(0) = 0` and opens towards the positive axis. The outward normal of
//! the convex region above the graph is `nu = (u' e_r - e) / sqrt(1 + u'^2)`,
//! which makes `H > 0`.
//!
//! * Translator: `H = -<e, nu>`, reduced to
//!   `u'' / (1 + u'^2) + (n - 1) u' / rho = 1`.
//! * Expander: `H = -<X, nu> / 2`, reduced to
//!   `u'' / (1 + u'^2) + (n - 1) u' / rho = (u - rho u') / 2`.
//!
//! Both are integrated for `(u, w = u')` by RK4 after a series start that
//! clears the removable singularity at `rho = 0`. Accepted profiles are
//! checked against the defining equation evaluated from the sampled height
//! alone, not through the reduced ODE.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::numerics::{cumulative_trapezoid, dot, fd_weights};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolitonError {
    #[error("step {h} misses the residual target: sup residual {residual:e} > {target:e}")]
    StepTooLarge { h: f64, residual: f64, target: f64 },
    #[error("profile loses convexity at rho = {rho}")]
    NonConvex { rho: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolitonKind {
    Translator,
    Expander,
}

/// Sup-norm target for the geometric residual of accepted profiles.
pub const RESIDUAL_TARGET: f64 = 1e-6;

/// Per-node geometry of a soliton along its meridian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonNode {
    pub rho: f64,
    pub u: f64,
    /// Meridian arclength from the tip.
    pub d: f64,
    /// `u'` from the samples.
    pub slope: f64,
    pub kappa_axial: f64,
    pub kappa_rot: f64,
    pub kappa1: f64,
    pub kappan: f64,
    pub mean: f64,
    pub ratio: f64,
    /// `|V|`, with `V = e^T` (translator) or `X^T / 2` (expander).
    pub v_norm: f64,
    /// Defining-equation residual `H + <e, nu>` or `H + <X, nu> / 2`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonProfile {
    pub kind: SolitonKind,
    pub n: usize,
    pub h: f64,
    /// `u(0)`; zero for translators.
    pub tip_height: f64,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    /// `u'` carried by the integrator.
    pub w: Vec<f64>,
    pub nodes: Vec<SolitonNode>,
}

impl SolitonProfile {
    pub fn max_residual(&self) -> f64 {
        self.nodes.iter().map(|c| c.residual.abs()).fold(0.0, f64::max)
    }

    pub fn tip(&self) -> &SolitonNode {
        &self.nodes[0]
    }

    /// `u'` at the outer end; for an expander the slope of the asymptotic
    /// cone.
    pub fn cone_slope(&self) -> f64 {
        self.w[self.w.len() - 1]
    }

    /// Distance of the blown-down profile `lambda M`, `lambda = 1 / rho_max`,
    /// from the cone of slope [`Self::cone_slope`] at the outer end.
    pub fn blowdown_defect(&self) -> f64 {
        let k = self.rho.len() - 1;
        (self.u[k] / self.rho[k] - self.w[k]).abs()
    }

    /// Largest increase of `H` along the meridian; zero when `H` is
    /// non-increasing in `d`.
    pub fn max_h_increase(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|p| p[1].mean - p[0].mean)
            .fold(0.0, f64::max)
    }

    /// Writes `d,u,H,kappa1,kappan,ratio,normV,residual`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["d", "u", "H", "kappa1", "kappan", "ratio", "normV", "residual"])?;
        for c in &self.nodes {
            w.write_record(
                [c.d, c.u, c.mean, c.kappa1, c.kappan, c.ratio, c.v_norm, c.residual].map(|v| format!("{v:?}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shoots the bowl soliton out to `rho_max` with step `h`.
pub fn shoot_translator(n: usize, rho_max: f64, h: f64) -> Result<SolitonProfile, SolitonError> {
    let s = integrate(SolitonKind::Translator, n, 0.0, rho_max, h)?;
    accept(s)
}

/// Shoots the expander with `u(0) = tip_height > 0` out to `rho_max`.
pub fn shoot_expander(n: usize, tip_height: f64, rho_max: f64, h: f64) -> Result<SolitonProfile, SolitonError> {
    let s = integrate(SolitonKind::Expander, n, tip_height, rho_max, h)?;
    accept(s)
}

fn accept(s: SolitonProfile) -> Result<SolitonProfile, SolitonError> {
    let residual = s.max_residual();
    if !(residual <= RESIDUAL_TARGET) {
        return Err(SolitonError::StepTooLarge {
            h: s.h,
            residual,
            target: RESIDUAL_TARGET,
        });
    }
    Ok(s)
}

fn rhs(kind: SolitonKind, nf: f64, r: f64, u: f64, w: f64) -> f64 {
    let drive = match kind {
        SolitonKind::Translator => 1.0,
        SolitonKind::Expander => 0.5 * (u - r * w),
    };
    (1.0 + w * w) * (drive - (nf - 1.0) * w / r)
}

/// Two-term series `(u, w)` about the tip.
fn series(kind: SolitonKind, nf: f64, u0: f64, r: f64) -> (f64, f64) {
    let (a, b) = match kind {
        SolitonKind::Translator => {
            let a = 1.0 / nf;
            (a, a.powi(3) / (nf + 2.0))
        }
        SolitonKind::Expander => {
            let c = u0 / (2.0 * nf);
            (c, (c.powi(3) - c / 4.0) / (nf + 2.0))
        }
    };
    let r2 = r * r;
    (u0 + a * r2 / 2.0 + b * r2 * r2 / 4.0, a * r + b * r2 * r)
}

fn rk4(kind: SolitonKind, nf: f64, r: f64, y: (f64, f64), dr: f64) -> (f64, f64) {
    let f = |r: f64, (u, w): (f64, f64)| (w, rhs(kind, nf, r, u, w));
    let k1 = f(r, y);
    let k2 = f(r + dr / 2.0, (y.0 + dr / 2.0 * k1.0, y.1 + dr / 2.0 * k1.1));
    let k3 = f(r + dr / 2.0, (y.0 + dr / 2.0 * k2.0, y.1 + dr / 2.0 * k2.1));
    let k4 = f(r + dr, (y.0 + dr * k3.0, y.1 + dr * k3.1));
    (
        y.0 + dr / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y.1 + dr / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

/// Substeps per interval while `rho < START_RHO`, where `(n - 1) / rho`
/// dominates the local error of a full step.
const START_SUB: usize = 16;
const START_RHO: f64 = 1.0;

/// Integrates without the residual check (refinement studies need coarse
/// runs too).
pub fn integrate(kind: SolitonKind, n: usize, u0: f64, rho_max: f64, h: f64) -> Result<SolitonProfile, SolitonError> {
    if n < 2 {
        return Err(SolitonError::InvalidInput(format!("n = {n}; solitons need n >= 2")));
    }
    if !(h > 0.0 && rho_max > 0.0 && rho_max.is_finite()) {
        return Err(SolitonError::InvalidInput(format!("need h > 0 and rho_max > 0, got {h}, {rho_max}")));
    }
    if kind == SolitonKind::Expander && !(u0 > 0.0) {
        // tip curvature u0 / 2n: a non-positive tip height is not strictly convex
        return Err(SolitonError::NonConvex { rho: 0.0 });
    }
    let steps = (rho_max / h).round().max(6.0) as usize;
    let h = rho_max / steps as f64;
    let nf = n as f64;
    let rho: Vec<f64> = (0..=steps).map(|k| rho_max * k as f64 / steps as f64).collect();
    let mut u = vec![u0; steps + 1];
    let mut w = vec![0.0; steps + 1];

    let sub = h / START_SUB as f64;
    let mut y = series(kind, nf, u0, sub);
    let start = ((START_RHO / h).ceil() as usize).max(8).min(steps);
    for k in 1..=start {
        let first = if k == 1 { 1 } else { 0 };
        for j in first..START_SUB {
            let r = (k - 1) as f64 * h + j as f64 * sub;
            y = rk4(kind, nf, r, y, sub);
        }
        u[k] = y.0;
        w[k] = y.1;
    }
    for k in start + 1..=steps {
        y = rk4(kind, nf, rho[k - 1], y, h);
        u[k] = y.0;
        w[k] = y.1;
    }
    for k in 0..=steps {
        if !(u[k].is_finite() && w[k].is_finite()) {
            return Err(SolitonError::StepTooLarge {
                h,
                residual: f64::INFINITY,
                target: RESIDUAL_TARGET,
            });
        }
        let dw = if k == 0 { 0.0 } else { rhs(kind, nf, rho[k], u[k], w[k]) };
        // convex data stays convex; a sign change here is integration error
        if w[k] < 0.0 || dw < -1e-12 * (1.0 + w[k] * w[k]) {
            return Err(SolitonError::StepTooLarge {
                h,
                residual: f64::INFINITY,
                target: RESIDUAL_TARGET,
            });
        }
    }
    let nodes = geometry(kind, n, &rho, &u, h);
    Ok(SolitonProfile {
        kind,
        n,
        h,
        tip_height: u0,
        rho,
        u,
        w,
        nodes,
    })
}

/// Fourth-order first and second derivatives of an even function sampled
/// at `k h`, `k = 0..m`.
fn fd4_even(y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let m = y.len();
    let at = |k: isize| y[k.unsigned_abs()];
    let mut d1 = vec![0.0; m];
    let mut d2 = vec![0.0; m];
    for i in 0..m {
        if i + 2 < m {
            let k = i as isize;
            let (ym2, ym1, y0, y1, y2) = (at(k - 2), at(k - 1), at(k), at(k + 1), at(k + 2));
            d1[i] = (ym2 - 8.0 * ym1 + 8.0 * y1 - y2) / (12.0 * h);
            d2[i] = (-ym2 + 16.0 * ym1 - 30.0 * y0 + 16.0 * y1 - y2) / (12.0 * h * h);
        } else {
            let lo = m - 6;
            let xs: Vec<f64> = (lo..m).map(|k| k as f64 * h).collect();
            let wts = fd_weights(i as f64 * h, &xs, 2);
            d1[i] = dot(&wts[1], &y[lo..m]);
            d2[i] = dot(&wts[2], &y[lo..m]);
        }
    }
    (d1, d2)
}

fn geometry(kind: SolitonKind, n: usize, rho: &[f64], u: &[f64], h: f64) -> Vec<SolitonNode> {
    let (u1, u2) = fd4_even(u, h);
    let q: Vec<f64> = u1.iter().map(|s| (1.0 + s * s).sqrt()).collect();
    let d = cumulative_trapezoid(rho, &q);
    let rot = (n - 1) as f64;
    (0..rho.len())
        .map(|i| {
            let (r, s, qi) = (rho[i], u1[i], q[i]);
            let kappa_axial = u2[i] / qi.powi(3);
            let kappa_rot = if i == 0 { u2[0] } else { s / (r * qi) };
            let mean = kappa_axial + rot * kappa_rot;
            // nu = (u' e_r - e) / q
            let (residual, v_norm) = match kind {
                SolitonKind::Translator => (mean - 1.0 / qi, s / qi),
                SolitonKind::Expander => (mean + 0.5 * (r * s - u[i]) / qi, 0.5 * (r + u[i] * s) / qi),
            };
            let (kappa1, kappan) = if kappa_axial <= kappa_rot {
                (kappa_axial, kappa_rot)
            } else {
                (kappa_rot, kappa_axial)
            };
            SolitonNode {
                rho: r,
                u: u[i],
                d: d[i],
                slope: s,
                kappa_axial,
                kappa_rot,
                kappa1,
                kappan,
                mean,
                ratio: kappa1 / mean,
                v_norm,
                residual,
            }
        })
        .collect()
}

/// Sup residuals of the soliton identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub kind: SolitonKind,
    pub h: f64,
    /// `kappa_ax |V| + dH/ds`, the meridian component of `L(V) + grad H`.
    pub gradient_meridian: f64,
    /// Meridian component of `grad V - H L` (minus `I / 2` for expanders):
    /// `d|V|/ds - H kappa_ax`.
    pub dv_meridian: f64,
    /// Rotational component: `|V| r_s / r - H kappa_rot`.
    pub dv_rotational: f64,
    /// Same quantities at the tip node.
    pub gradient_tip: f64,
    /// `max | |V|^2 + H^2 - 1 |` (translators only).
    pub unit_defect: Option<f64>,
}

/// Evaluates both sides of the identities by centered second-order
/// differences in `rho` converted to arclength.
pub fn verify_identities(s: &SolitonProfile) -> IdentityReport {
    let m = s.nodes.len();
    let h = s.h;
    let half = match s.kind {
        SolitonKind::Translator => 0.0,
        SolitonKind::Expander => 0.5,
    };
    let mean: Vec<f64> = s.nodes.iter().map(|c| c.mean).collect();
    let vn: Vec<f64> = s.nodes.iter().map(|c| c.v_norm).collect();
    // H is even and |V| odd across the tip
    let deriv = |y: &[f64], odd: bool, i: usize| -> f64 {
        if i == 0 {
            if odd {
                y[1] / h
            } else {
                0.0
            }
        } else if i == m - 1 {
            (3.0 * y[i] - 4.0 * y[i - 1] + y[i - 2]) / (2.0 * h)
        } else {
            (y[i + 1] - y[i - 1]) / (2.0 * h)
        }
    };
    let (mut g, mut dv, mut rotv) = (0.0f64, 0.0f64, 0.0f64);
    let mut gradient_tip = 0.0;
    for i in 0..m {
        let c = &s.nodes[i];
        let q = (1.0 + c.slope * c.slope).sqrt();
        let dh = deriv(&mean, false, i) / q;
        let dvn = deriv(&vn, true, i) / q;
        let gi = c.kappa_axial * c.v_norm + dh;
        if i == 0 {
            gradient_tip = gi.abs();
        }
        g = g.max(gi.abs());
        dv = dv.max((dvn - c.mean * c.kappa_axial - half).abs());
        if i > 0 {
            rotv = rotv.max((c.v_norm / (c.rho * q) - c.mean * c.kappa_rot - half).abs());
        }
    }
    let unit_defect = (s.kind == SolitonKind::Translator).then(|| {
        s.nodes
            .iter()
            .map(|c| (c.v_norm * c.v_norm + c.mean * c.mean - 1.0).abs())
            .fold(0.0, f64::max)
    });
    IdentityReport {
        kind: s.kind,
        h,
        gradient_meridian: g,
        dv_meridian: dv,
        dv_rotational: rotv,
        gradient_tip,
        unit_defect,
    }
}

/// Residuals at step `h` and `h / 2` with their reduction factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub coarse: IdentityReport,
    pub fine: IdentityReport,
    pub residual_coarse: f64,
    pub residual_fine: f64,
    pub gradient_factor: f64,
    pub dv_meridian_factor: f64,
    pub dv_rotational_factor: f64,
    pub residual_factor: f64,
}

impl RefinementStudy {
    /// Every residual shrinks by at least `factor`, or already sits below
    /// `floor` on the coarse mesh (round-off level, no room to shrink).
    pub fn shrinks(&self, factor: f64, floor: f64) -> bool {
        let ok = |coarse: f64, f: f64| coarse < floor || f >= factor;
        ok(self.coarse.gradient_meridian, self.gradient_factor)
            && ok(self.coarse.dv_meridian, self.dv_meridian_factor)
            && ok(self.coarse.dv_rotational, self.dv_rotational_factor)
            && ok(self.residual_coarse, self.residual_factor)
    }
}

pub fn refinement_study(
    kind: SolitonKind,
    n: usize,
    tip_height: f64,
    rho_max: f64,
    h: f64,
) -> Result<RefinementStudy, SolitonError> {
    let u0 = match kind {
        SolitonKind::Translator => 0.0,
        SolitonKind::Expander => tip_height,
    };
    let a = integrate(kind, n, u0, rho_max, h)?;
    let b = integrate(kind, n, u0, rho_max, h / 2.0)?;
    let (ra, rb) = (verify_identities(&a), verify_identities(&b));
    Ok(RefinementStudy {
        gradient_factor: ra.gradient_meridian / rb.gradient_meridian,
        dv_meridian_factor: ra.dv_meridian / rb.dv_meridian,
        dv_rotational_factor: ra.dv_rotational / rb.dv_rotational,
        residual_factor: a.max_residual() / b.max_residual(),
        residual_coarse: a.max_residual(),
        residual_fine: b.max_residual(),
        coarse: ra,
        fine: rb,
    })
}

/// Decay audit for one pinching constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayAudit {
    pub alpha: f64,
    /// Largest `d` with `alpha_max(d) >= alpha`.
    pub d_star: f64,
    /// Whether `alpha_max` drops below `alpha` within the profile.
    pub crosses: bool,
    /// `min (-log(H / H(o)) - alpha int_0^d |V| dl)` over the pinched
    /// region; the chain asserts it is `>= 0`.
    pub log_decay_margin: f64,
    /// Translator: `min (|V| - alpha int_0^d H^2 dl)`, with `|V| <= 1`
    /// checked separately. Expander: `min (|V| - alpha d / 2)`.
    pub speed_margin: f64,
    /// `max |V|` (translator: must not exceed 1).
    pub max_v: f64,
    /// `min (bound(d) - H(d)) / H(o)` over the pinched region, for
    /// `H(o) e^{1 - alpha d}` or `H(o) e^{-alpha d^2 / 4}`.
    pub bound_margin: f64,
    /// Quadrature slack allowed on the margins.
    pub slack: f64,
    pub pass: bool,
}

/// Pinching and decay diagnostics along the meridian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub kind: SolitonKind,
    pub tip_ratio: f64,
    pub tip_mean: f64,
    pub d: Vec<f64>,
    /// `min_{d' <= d} kappa_1 / H`.
    pub alpha_max: Vec<f64>,
    /// `-d log H / ds` along the meridian (first differences).
    pub log_h_slope: Vec<f64>,
    /// `kappa_1 / H` strictly decreases beyond the tip.
    pub ratio_strictly_decreasing: bool,
    pub audits: Vec<DecayAudit>,
}

impl DecayReport {
    /// `alpha_max` at the first node where `H < fraction H(o)`.
    pub fn alpha_max_where_h_below(&self, s: &SolitonProfile, fraction: f64) -> Option<f64> {
        let h0 = s.nodes[0].mean;
        s.nodes.iter().position(|c| c.mean < fraction * h0).map(|i| self.alpha_max[i])
    }

    pub fn pass(&self) -> bool {
        self.audits.iter().all(|a| a.pass)
    }
}

pub fn decay_audit(s: &SolitonProfile, alphas: &[f64]) -> Result<DecayReport, SolitonError> {
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0)) {
        return Err(SolitonError::InvalidInput(format!("alpha {a} must be positive")));
    }
    let nodes = &s.nodes;
    let m = nodes.len();
    let d: Vec<f64> = nodes.iter().map(|c| c.d).collect();
    let mut alpha_max = Vec::with_capacity(m);
    let mut run = f64::INFINITY;
    for c in nodes {
        run = run.min(c.ratio);
        alpha_max.push(run);
    }
    let mut log_h_slope = vec![0.0; m];
    for i in 1..m {
        log_h_slope[i] = -(nodes[i].mean.ln() - nodes[i - 1].mean.ln()) / (d[i] - d[i - 1]);
    }
    let ratio_strictly_decreasing = nodes[1..].windows(2).all(|w| w[1].ratio < w[0].ratio);
    let v: Vec<f64> = nodes.iter().map(|c| c.v_norm).collect();
    let h2: Vec<f64> = nodes.iter().map(|c| c.mean * c.mean).collect();
    let int_v = cumulative_trapezoid(&d, &v);
    let int_h2 = cumulative_trapezoid(&d, &h2);
    let h0 = nodes[0].mean;
    let slack = s.h;
    let max_v = v.iter().cloned().fold(0.0, f64::max);
    let audits = alphas
        .iter()
        .map(|&alpha| {
            let last = alpha_max.iter().rposition(|&a| a >= alpha);
            let region = last.map_or(0, |k| k + 1);
            let mut log_decay_margin = f64::INFINITY;
            let mut speed_margin = f64::INFINITY;
            let mut bound_margin = f64::INFINITY;
            for i in 1..region {
                let c = &nodes[i];
                log_decay_margin = log_decay_margin.min(-(c.mean / h0).ln() - alpha * int_v[i]);
                let (sm, bound) = match s.kind {
                    SolitonKind::Translator => (c.v_norm - alpha * int_h2[i], h0 * (1.0 - alpha * d[i]).exp()),
                    SolitonKind::Expander => {
                        (c.v_norm - alpha * d[i] / 2.0, h0 * (-alpha * d[i] * d[i] / 4.0).exp())
                    }
                };
                speed_margin = speed_margin.min(sm);
                bound_margin = bound_margin.min((bound - c.mean) / h0);
            }
            let v_ok = s.kind == SolitonKind::Expander || max_v <= 1.0 + slack;
            let pass = log_decay_margin >= -slack && speed_margin >= -slack && bound_margin >= -slack && v_ok;
            DecayAudit {
                alpha,
                d_star: last.map_or(0.0, |k| d[k]),
                crosses: region < m,
                log_decay_margin,
                speed_margin,
                max_v,
                bound_margin,
                slack,
                pass,
            }
        })
        .collect();
    Ok(DecayReport {
        kind: s.kind,
        tip_ratio: nodes[0].ratio,
        tip_mean: h0,
        d,
        alpha_max,
        log_h_slope,
        ratio_strictly_decreasing,
        audits,
    })
}
