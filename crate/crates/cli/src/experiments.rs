//! Experiment pipelines shared by the subcommands and the presets.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use mcflab::flow::{existence_pipeline, run_flow, ExistenceConfig};
use mcflab::soliton::{
    decay_audit, refinement_study, shoot_expander, shoot_translator, verify_identities, SolitonKind,
};
use mcflab::spacetime::{
    check_pick, classify_type, pick_point, synthetic_history, SpacetimePoint, TypeVerdict,
};
use mcflab::verify::{
    audit_barrier, audit_interior, audit_pinching_preservation, audit_umbilic, constant_drift, EstimateReport,
};
use mcflab::{ConvexBody, FlowHistory, Profile, Termination};

use crate::config::Config;

/// Named pass/fail line of an experiment.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Everything an experiment produced besides the files it wrote.
#[derive(Debug, Default, Serialize)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub report: serde_json::Map<String, Value>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn record(&mut self, key: &str, v: impl Serialize) -> Result<()> {
        self.report.insert(key.into(), serde_json::to_value(v)?);
        Ok(())
    }
}

/// Inputs common to every experiment.
pub struct Ctx<'a> {
    pub cfg: &'a Config,
    pub out: PathBuf,
    pub seed: u64,
    /// Recorded flow to audit instead of running one from `[geometry]`.
    pub history: Option<PathBuf>,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn flow(&self, nodes: usize) -> Result<FlowHistory> {
        if let Some(dir) = &self.history {
            return FlowHistory::load(dir).with_context(|| format!("loading history from {}", dir.display()));
        }
        let p0 = self.cfg.initial_profile(nodes).context("building the initial profile")?;
        run_flow(&p0, &self.cfg.flow_config()).context("running the flow")
    }

    /// Base and doubled resolution, unless refinement is off or a history
    /// was supplied.
    fn resolutions(&self) -> Vec<usize> {
        let n = self.cfg.geometry.nodes;
        if self.cfg.audit.refine && self.history.is_none() {
            vec![n, 2 * n - 1]
        } else {
            vec![n]
        }
    }

    fn flows(&self) -> Result<Vec<FlowHistory>> {
        let res = self.resolutions();
        let runs: Vec<Result<FlowHistory>> = rayon_map(&res, |&nodes| self.flow(nodes));
        runs.into_iter().collect()
    }
}

fn rayon_map<T: Sync, U: Send>(xs: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    xs.par_iter().map(f).collect()
}

/// Writes a numeric table with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)?).with_context(|| format!("writing {}", path.display()))
}

fn flow_table(ctx: &Ctx, name: &str, hist: &FlowHistory) -> Result<()> {
    write_table(
        &ctx.path(name),
        &["t", "max_H", "min_H", "max_normA2", "max_umbilic_ratio", "min_kappa1"],
        hist.snapshots.iter().map(|s| {
            let c = &s.curvature;
            vec![s.t, c.max_mean(), c.min_mean(), c.max_norm_a2(), c.max_umbilic_ratio(), c.min_kappa()]
        }),
    )
}

fn initial_min_ratio(hist: &FlowHistory) -> f64 {
    hist.first()
        .curvature
        .nodes
        .iter()
        .map(|c| c.ratio)
        .fold(f64::INFINITY, f64::min)
}

fn save_report(ctx: &Ctx, name: &str, r: &EstimateReport) -> Result<()> {
    write_json(&ctx.path(name), r)
}

/// Plain flow run; records the history and a per-snapshot table.
pub fn flow(ctx: &Ctx) -> Result<Outcome> {
    let hist = ctx.flow(ctx.cfg.geometry.nodes)?;
    hist.save(&ctx.path("history"))?;
    flow_table(ctx, "flow.csv", &hist)?;
    let mut o = Outcome::default();
    let ok = matches!(hist.termination, Termination::ReachedTEnd | Termination::CurvatureBlowup);
    o.check(
        "flow terminated cleanly",
        ok,
        format!("{:?} at t = {:.6e} after {} steps", hist.termination, hist.final_time(), hist.steps),
    );
    o.record("termination", hist.termination)?;
    o.record("final_time", hist.final_time())?;
    o.record("steps", hist.steps)?;
    o.record("snapshots", hist.snapshots.len())?;
    Ok(o)
}

/// Round sphere against `R(t)^2 = R0^2 - 2 n t`.
pub fn sphere_shrink(ctx: &Ctx) -> Result<Outcome> {
    let cfg = ctx.cfg;
    let (n, r0) = (cfg.n as f64, cfg.geometry.radius);
    let exact_t = r0 * r0 / (2.0 * n);
    let hist = ctx.flow(cfg.geometry.nodes)?;
    flow_table(ctx, "flow.csv", &hist)?;
    let radius = |k: usize| {
        let v = &hist.snapshots[k].profile.values;
        v.iter().sum::<f64>() / v.len() as f64
    };
    let last = hist.last();
    let r_last = radius(hist.snapshots.len() - 1);
    let extinction = last.t + r_last * r_last / (2.0 * n);
    let rel_t = (extinction - exact_t).abs() / exact_t;
    let mut o = Outcome::default();
    o.check(
        "curvature blowup reached",
        hist.termination == Termination::CurvatureBlowup,
        format!("{:?}", hist.termination),
    );
    o.check("extinction time", rel_t < 1e-3, format!("T = {extinction:.8}, exact {exact_t:.8}, rel err {rel_t:.2e}"));
    let mut radii = Vec::new();
    // Nearest recorded snapshots to 0.4 T and 0.8 T (t = 0.1, 0.2 for n = 2).
    for frac in [0.4, 0.8] {
        let target = frac * exact_t;
        let k = (0..hist.snapshots.len())
            .min_by(|&a, &b| {
                let da = (hist.snapshots[a].t - target).abs();
                da.total_cmp(&(hist.snapshots[b].t - target).abs())
            })
            .unwrap_or(0);
        let t = hist.snapshots[k].t;
        let exact_r = (r0 * r0 - 2.0 * n * t).sqrt();
        let rel = (radius(k) - exact_r).abs() / exact_r;
        o.check(
            format!("radius at t = {t:.4}"),
            rel < 1e-3,
            format!("R = {:.8}, exact {exact_r:.8}, rel err {rel:.2e}", radius(k)),
        );
        radii.push(json!({"t": t, "radius": radius(k), "exact": exact_r, "rel_err": rel}));
    }
    write_table(
        &ctx.path("radius.csv"),
        &["t", "radius", "exact"],
        hist.snapshots.iter().enumerate().map(|(k, s)| {
            vec![s.t, radius(k), (r0 * r0 - 2.0 * n * s.t).max(0.0).sqrt()]
        }),
    )?;
    o.record("extinction_time", extinction)?;
    o.record("exact_extinction_time", exact_t)?;
    o.record("extinction_rel_err", rel_t)?;
    o.record("radius_checks", radii)?;
    Ok(o)
}

/// Pinching preservation at the initial pinching constant and at zero.
pub fn pinching(ctx: &Ctx) -> Result<Outcome> {
    let hist = ctx.flow(ctx.cfg.geometry.nodes)?;
    flow_table(ctx, "flow.csv", &hist)?;
    let alpha = ctx.cfg.audit.alpha.unwrap_or_else(|| initial_min_ratio(&hist));
    let mut o = Outcome::default();
    for (label, a) in [("alpha", alpha), ("convexity", 0.0)] {
        let r = audit_pinching_preservation(&hist, a, ctx.cfg.audit.tol)?;
        save_report(ctx, &format!("pinching_{label}.json"), &r)?;
        o.check(format!("pinching preserved ({label} = {a:.6})"), r.pass, r.summary());
        o.record(&format!("pinching_{label}"), &r.measured)?;
        write_table(
            &ctx.path(&format!("pinching_{label}.csv")),
            &["t", "m"],
            r.series["t"].iter().zip(&r.series["m"]).map(|(t, m)| vec![*t, *m]),
        )?;
    }
    Ok(o)
}

/// Umbilic estimate, with the shape converging towards a round point.
pub fn umbilic(ctx: &Ctx) -> Result<Outcome> {
    let a = &ctx.cfg.audit;
    let hists = ctx.flows()?;
    let mut o = Outcome::default();
    let mut reports = Vec::new();
    for hist in &hists {
        let alpha = a.alpha.unwrap_or_else(|| initial_min_ratio(hist));
        let r = audit_umbilic(hist, a.center, a.l, alpha, &a.eps_list)?;
        let nodes = hist.first().profile.len();
        save_report(ctx, &format!("umbilic_{nodes}.json"), &r)?;
        o.check(format!("umbilic audit, {nodes} nodes"), r.pass, r.summary());
        reports.push(r);
    }
    let hist = &hists[0];
    flow_table(ctx, "flow.csv", hist)?;
    let (u0, u1) = (hist.first().curvature.max_umbilic_ratio(), hist.last().curvature.max_umbilic_ratio());
    o.check(
        "umbilic ratio decays",
        u1 < 0.2 * u0,
        format!("max |Å|/H {u0:.4e} -> {u1:.4e} (factor {:.3e})", u1 / u0),
    );
    if reports.len() == 2 {
        let drift = constant_drift(&reports[0], &reports[1]);
        o.check("C_eps stable under refinement", drift < a.stability, format!("max relative drift {drift:.3e}"));
        o.record("drift", drift)?;
    }
    o.record("constants", reports.iter().map(|r| &r.constants).collect::<Vec<_>>())?;
    Ok(o)
}

/// Interior estimate on the configured flow for every `(r, L)` pair, plus
/// the static sphere whose cutoff vanishes on the surface.
pub fn interior(ctx: &Ctx) -> Result<Outcome> {
    let a = &ctx.cfg.audit;
    let hists = ctx.flows()?;
    flow_table(ctx, "flow.csv", &hists[0])?;
    let mut o = Outcome::default();
    let mut rows = Vec::new();
    for &r in &a.r_list {
        for &l in &a.interior_l {
            let mut reps = Vec::new();
            for hist in &hists {
                let rep = audit_interior(hist, a.center, r, l)?;
                let nodes = hist.first().profile.len();
                save_report(ctx, &format!("interior_r{r}_l{l}_{nodes}.json"), &rep)?;
                o.check(format!("interior audit r = {r}, L = {l}, {nodes} nodes"), rep.pass, rep.summary());
                reps.push(rep);
            }
            let c = reps[0].constants["C_meas"];
            let drift = if reps.len() == 2 { constant_drift(&reps[0], &reps[1]) } else { 0.0 };
            if reps.len() == 2 {
                o.check(
                    format!("C_meas stable, r = {r}, L = {l}"),
                    drift < a.stability,
                    format!("C_meas {c:.6e}, drift {drift:.3e}"),
                );
            }
            rows.push(vec![r, l, c, drift]);
        }
    }
    write_table(&ctx.path("interior.csv"), &["r", "L", "C_meas", "drift"], rows)?;
    let n = ctx.cfg.n;
    let still = synthetic_history(n, 101, &[0.0, 0.1], |_, _| n as f64)?;
    let rep = audit_interior(&still, 0.0, 0.5, 2.0)?;
    let c = rep.constants["C_meas"];
    o.check("cutoff vanishes on the boundary", c == 0.0, format!("C_meas = {c:e}"));
    Ok(o)
}

/// Barrier identity for `<X - p, e>` along the axis.
pub fn barrier(ctx: &Ctx) -> Result<Outcome> {
    let a = &ctx.cfg.audit;
    let hists = ctx.flows()?;
    flow_table(ctx, "flow.csv", &hists[0])?;
    let mut o = Outcome::default();
    let mut residuals = Vec::new();
    for hist in &hists {
        let r = audit_barrier(hist, a.barrier_p, a.barrier_c, a.barrier_t_max, a.barrier_tol)?;
        let nodes = hist.first().profile.len();
        save_report(ctx, &format!("barrier_{nodes}.json"), &r)?;
        o.check(format!("barrier audit, {nodes} nodes"), r.pass, r.summary());
        residuals.push(r.measured["relative_residual"]);
    }
    if residuals.len() == 2 {
        let order = residuals[0] / residuals[1];
        o.record("refinement_factor", order)?;
        o.check("barrier residual shrinks under refinement", order > 1.0, format!("factor {order:.3}"));
    }
    o.record("relative_residuals", residuals)?;
    Ok(o)
}

/// Dispatches on `audit.estimate`.
pub fn verify(ctx: &Ctx) -> Result<Outcome> {
    match ctx.cfg.audit.estimate.as_str() {
        "umbilic" => umbilic(ctx),
        "interior" => interior(ctx),
        "barrier" => barrier(ctx),
        _ => pinching(ctx),
    }
}

/// Soliton shooting with residual, identity, refinement and decay audits.
pub fn soliton(ctx: &Ctx) -> Result<Outcome> {
    let s = &ctx.cfg.soliton;
    let n = ctx.cfg.n;
    let kind = match s.kind.as_str() {
        "expander" => SolitonKind::Expander,
        _ => SolitonKind::Translator,
    };
    let prof = match kind {
        SolitonKind::Translator => shoot_translator(n, s.rho_max, s.step)?,
        SolitonKind::Expander => shoot_expander(n, s.tip_height, s.rho_max, s.step)?,
    };
    prof.write_csv(fs::File::create(ctx.path("soliton.csv"))?)?;
    let mut o = Outcome::default();
    let res = prof.max_residual();
    o.check("defining equation residual", res < mcflab::soliton::RESIDUAL_TARGET, format!("sup {res:.3e}"));
    let tip = prof.tip();
    if kind == SolitonKind::Translator {
        let ok = (tip.mean - 1.0).abs() < 1e-6 && (tip.ratio - 1.0 / n as f64).abs() < 1e-6;
        o.check("tip values", ok, format!("H = {:.10}, ratio = {:.10}", tip.mean, tip.ratio));
    }
    let ids = verify_identities(&prof);
    if let Some(defect) = ids.unit_defect {
        o.check("|V|^2 + H^2 = 1", defect < 1e-8, format!("sup defect {defect:.3e}"));
    }
    let study = refinement_study(kind, n, s.tip_height, s.rho_max, 2.0 * s.step)?;
    o.check(
        "identity residuals shrink 3x per halving",
        study.shrinks(3.0, 1e-9),
        format!(
            "factors gradient {:.2}, dV meridian {:.2}, dV rotational {:.2}, residual {:.2}",
            study.gradient_factor, study.dv_meridian_factor, study.dv_rotational_factor, study.residual_factor
        ),
    );
    let decay = decay_audit(&prof, &s.alpha_list)?;
    o.check(
        "pinching ratio strictly decreasing",
        decay.ratio_strictly_decreasing,
        format!("tip ratio {:.6}", decay.tip_ratio),
    );
    for a in &decay.audits {
        o.check(
            format!("alpha = {} crossed and decay bounds hold", a.alpha),
            a.crosses && a.pass,
            format!(
                "d* = {:.4}, log margin {:.3e}, speed margin {:.3e}, bound margin {:.3e}",
                a.d_star, a.log_decay_margin, a.speed_margin, a.bound_margin
            ),
        );
    }
    if let Some(am) = decay.alpha_max_where_h_below(&prof, 0.1) {
        o.record("alpha_max_where_h_below_tenth", am)?;
        if kind == SolitonKind::Translator {
            o.check("alpha_max below 0.05 where H < 0.1", am < 0.05, format!("alpha_max {am:.4e}"));
        }
    }
    write_table(
        &ctx.path("decay.csv"),
        &["d", "alpha_max", "log_H_slope"],
        (0..decay.d.len()).map(|i| vec![decay.d[i], decay.alpha_max[i], decay.log_h_slope[i]]),
    )?;
    write_json(&ctx.path("identities.json"), &ids)?;
    write_json(&ctx.path("refinement.json"), &study)?;
    write_json(&ctx.path("decay.json"), &decay)?;
    o.record("max_residual", res)?;
    o.record("cone_slope", prof.cone_slope())?;
    o.record("blowdown_defect", prof.blowdown_defect())?;
    Ok(o)
}

/// Random positive mean-curvature field with a few spikes.
fn random_field(rng: &mut ChaCha8Rng, snapshots: usize, nodes: usize) -> Vec<Vec<f64>> {
    let mut field: Vec<Vec<f64>> = (0..snapshots)
        .map(|_| (0..nodes).map(|_| rng.gen_range(0.5..2.0)).collect())
        .collect();
    for _ in 0..rng.gen_range(0..6) {
        let (k, i) = (rng.gen_range(0..snapshots), rng.gen_range(0..nodes));
        field[k][i] *= rng.gen_range(2.0..10.0);
    }
    field
}

/// Point selection on a recorded flow, or on seeded random fields.
pub fn pick(ctx: &Ctx) -> Result<Outcome> {
    let st = &ctx.cfg.spacetime;
    let mut o = Outcome::default();
    if ctx.history.is_some() {
        let hist = ctx.flow(ctx.cfg.geometry.nodes)?;
        let nodes = hist.first().profile.len();
        let seed = SpacetimePoint::at(&hist, st.seed_snapshot, st.seed_node.unwrap_or(nodes / 2))?;
        let cert = pick_point(&hist, seed, st.delta)?;
        let verdict = check_pick(&hist, seed, &cert);
        write_json(&ctx.path("certificate.json"), &cert)?;
        o.check("certificate passes the exhaustive checker", verdict.is_ok(), verdict.err().unwrap_or_default());
        o.record("chain_len", cert.chain_len())?;
        return Ok(o);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let (ns, nn) = (st.field_snapshots, st.field_nodes);
    let times: Vec<f64> = (0..ns).map(|k| 1e-3 * k as f64).collect();
    let mut failures = Vec::new();
    let mut chains = Vec::new();
    let mut certs = Vec::new();
    for f in 0..st.random_fields {
        let field = random_field(&mut rng, ns, nn);
        let hist = synthetic_history(ctx.cfg.n, nn, &times, |k, i| field[k][i])?;
        let seed = SpacetimePoint::at(&hist, ns - 1, rng.gen_range(0..nn))?;
        let cert = pick_point(&hist, seed, st.delta)?;
        if let Err(e) = check_pick(&hist, seed, &cert) {
            failures.push(format!("field {f}: {e}"));
        }
        chains.push(cert.chain_len() as f64);
        certs.push(cert);
    }
    write_json(&ctx.path("certificates.json"), &certs)?;
    let passed = st.random_fields - failures.len();
    o.check(
        "random fields pass the exhaustive checker",
        failures.is_empty(),
        format!("{passed}/{} passed{}", st.random_fields, failures.first().map(|e| format!("; {e}")).unwrap_or_default()),
    );
    o.record("chain_lengths", chains)?;
    o.record("failures", failures)?;
    Ok(o)
}

/// Singularity-type evidence on the configured flow, plus a synthetic
/// expander-like field with a known supremum.
pub fn classify(ctx: &Ctx) -> Result<Outcome> {
    let st = &ctx.cfg.spacetime;
    let hist = ctx.flow(ctx.cfg.geometry.nodes)?;
    flow_table(ctx, "flow.csv", &hist)?;
    let report = classify_type(&hist, &st.horizons);
    write_json(&ctx.path("classification.json"), &report)?;
    write_table(
        &ctx.path("sqrt_t_max_h.csv"),
        &["t", "sqrt_t_max_H"],
        report.times.iter().zip(&report.sqrt_t_max_h).map(|(t, v)| vec![*t, *v]),
    )?;
    let mut o = Outcome::default();
    let blew_up = hist.termination == Termination::CurvatureBlowup;
    o.check(
        "verdict matches the termination",
        (report.verdict == TypeVerdict::FiniteTime) == blew_up,
        format!("{:?} (termination {:?}, sup {:.4e})", report.verdict, hist.termination, report.sup),
    );
    let c = 3.0;
    let times: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
    let synth = synthetic_history(ctx.cfg.n, 41, &times, |k, _| c / (times[k] + 1.0).sqrt())?;
    let sr = classify_type(&synth, &[2.0, 5.0]);
    let t_end = *times.last().unwrap();
    let expected = c * (t_end / (t_end + 1.0)).sqrt();
    o.check(
        "synthetic sup of sqrt(t) max H",
        (sr.sup - expected).abs() < 1e-12 && sr.verdict != TypeVerdict::FiniteTime,
        format!("sup {:.12}, expected {expected:.12}, {:?}", sr.sup, sr.verdict),
    );
    o.record("verdict", report.verdict)?;
    o.record("sup", report.sup)?;
    o.record("sup_time", report.sup_time)?;
    o.record("horizons", &report.horizons)?;
    Ok(o)
}

fn existence_body(ctx: &Ctx) -> Result<ConvexBody> {
    let e = &ctx.cfg.existence;
    let xs: Vec<f64> = (0..e.samples).map(|i| e.x_max * i as f64 / (e.samples - 1) as f64).collect();
    let rs: Vec<f64> = match e.shape.as_str() {
        "cone" => xs.clone(),
        _ => xs.iter().map(|x| (2.0 * x).sqrt()).collect(),
    };
    Ok(ConvexBody::new(Profile::axis(ctx.cfg.n, xs, rs)?)?)
}

/// Truncate, mollify and flow across the (height, eps) matrix.
pub fn existence(ctx: &Ctx) -> Result<Outcome> {
    let e = &ctx.cfg.existence;
    let body = existence_body(ctx)?;
    let mut ecfg = ExistenceConfig::new(ctx.cfg.n);
    ecfg.nodes = e.nodes;
    ecfg.delta = e.delta;
    ecfg.ball_radius = e.ball_radius;
    ecfg.flow.dt_safety = ctx.cfg.flow.dt_safety;
    let outcome = existence_pipeline(&body, &e.heights, &e.epss, &ecfg)?;
    let r = &outcome.report;
    write_json(&ctx.path("existence.json"), r)?;
    write_table(
        &ctx.path("runs.csv"),
        &["height", "eps", "heat_time", "inradius", "sup_A_ball", "max_H_ball"],
        r.runs.iter().map(|s| {
            vec![s.height.unwrap_or(f64::INFINITY), s.eps, s.heat_time, s.inradius, s.sup_a_ball, s.max_h_ball]
        }),
    )?;
    let mut header = vec!["radius".to_string()];
    header.extend(r.runs.iter().map(|s| format!("h{}_eps{}", s.height.unwrap_or(f64::INFINITY), s.eps)));
    let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_table(
        &ctx.path("tip_graphs.csv"),
        &header,
        r.radius_grid.iter().enumerate().map(|(i, x)| {
            let mut row = vec![*x];
            row.extend(r.runs.iter().map(|s| s.tip_graph[i]));
            row
        }),
    )?;
    let mut o = Outcome::default();
    o.check(
        "finest settings agree in the ball",
        r.finest_spread < e.tol,
        format!("spread {:.3e} (tolerance {:.1e})", r.finest_spread, e.tol),
    );
    o.check(
        "curvature bounded across the matrix",
        r.sup_a_max.is_finite(),
        format!("max sup |A| {:.4e}, spread {:.3e}", r.sup_a_max, r.sup_a_spread),
    );
    o.record("finest_spread", r.finest_spread)?;
    o.record("height_spreads", &r.height_spreads)?;
    o.record("eps_spreads", &r.eps_spreads)?;
    o.record("sup_a_max", r.sup_a_max)?;
    Ok(o)
}
