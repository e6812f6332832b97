//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Built with `harness = false` so the lines always show.

use std::f64::consts::PI;
use std::time::Instant;

use mcflab::flow::{existence_pipeline, mcf_residual, run_flow, ExistenceConfig};
use mcflab::geometry::gauss_integrals;
use mcflab::soliton::{
    decay_audit, refinement_study, shoot_expander, shoot_translator, verify_identities, SolitonKind, SolitonProfile,
    RESIDUAL_TARGET,
};
use mcflab::spacetime::{pick_point, rescale, synthetic_history, SpacetimePoint};
use mcflab::verify::{audit_interior, audit_pinching_preservation, audit_umbilic, constant_drift};
use mcflab::{ConvexBody, FlowConfig, FlowHistory, Profile, Termination};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn require(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn mean_radius(hist: &FlowHistory, k: usize) -> f64 {
    let v = &hist.snapshots[k].profile.values;
    v.iter().sum::<f64>() / v.len() as f64
}

fn ellipsoid_flow(nodes: usize) -> FlowHistory {
    let p = Profile::ellipsoid(2, 1.0, 1.5, nodes).unwrap();
    run_flow(&p, &FlowConfig::new(2).with_snapshot_dt(0.002)).unwrap()
}

fn min_ratio(hist: &FlowHistory) -> f64 {
    hist.first().curvature.nodes.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min)
}

fn c1_sphere() -> Outcome {
    let start = Instant::now();
    let p = Profile::sphere(2, 1.0, 400).map_err(|e| e.to_string())?;
    let hist = run_flow(&p, &FlowConfig::new(2).with_snapshot_dt(0.01)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    require(hist.termination == Termination::CurvatureBlowup, format!("{:?}", hist.termination))?;
    let r_last = mean_radius(&hist, hist.snapshots.len() - 1);
    let t_ext = hist.final_time() + r_last * r_last / 4.0;
    let t_err = (t_ext - 0.25).abs() / 0.25;
    let mut worst: f64 = 0.0;
    for t in [0.1, 0.2] {
        let k = hist.snapshot_at(t).ok_or(format!("no snapshot at t = {t}"))?;
        let exact = (1.0 - 4.0 * t).sqrt();
        worst = worst.max((mean_radius(&hist, k) - exact).abs() / exact);
    }
    let msg = format!("T rel err {t_err:.2e}, R(t) rel err {worst:.2e}, {secs:.2} s");
    require(t_err < 1e-3 && worst < 1e-3 && secs < 10.0, msg.clone())?;
    Ok(msg)
}

fn c2_pinching(hist: &FlowHistory, secs: f64) -> Outcome {
    let alpha = min_ratio(hist);
    let r = audit_pinching_preservation(hist, alpha, 1e-3).map_err(|e| e.to_string())?;
    let min_m = r.constants["min_m"];
    let msg = format!(
        "alpha {alpha:.4}, min m(t) {min_m:.3e} until {:?} at t = {:.4}, {secs:.2} s",
        hist.termination,
        hist.final_time()
    );
    require(
        r.pass && hist.termination == Termination::CurvatureBlowup && min_m >= -1e-3 && secs < 60.0,
        msg.clone(),
    )?;
    Ok(msg)
}

fn c3_umbilic(coarse: &FlowHistory, fine: &FlowHistory) -> Outcome {
    let (u0, u1) = (coarse.first().curvature.max_umbilic_ratio(), coarse.last().curvature.max_umbilic_ratio());
    let eps = [0.05, 0.1, 0.2];
    let a = audit_umbilic(coarse, 0.0, 4.0, min_ratio(coarse), &eps).map_err(|e| e.to_string())?;
    let b = audit_umbilic(fine, 0.0, 4.0, min_ratio(fine), &eps).map_err(|e| e.to_string())?;
    let drift = constant_drift(&a, &b);
    let msg = format!("|Å|/H {u0:.3} -> {u1:.2e}, C_eps drift {drift:.2e}");
    require(u1 < 0.2 * u0 && a.pass && b.pass && drift < 0.1, msg.clone())?;
    Ok(msg)
}

fn soliton_suite(kind: SolitonKind, s: &SolitonProfile) -> Result<Vec<String>, String> {
    let mut notes = Vec::new();
    let res = s.max_residual();
    require(res < RESIDUAL_TARGET, format!("residual {res:.2e}"))?;
    notes.push(format!("residual {res:.1e}"));
    let study = refinement_study(kind, s.n, s.tip_height, 20.0, 0.02).map_err(|e| e.to_string())?;
    require(
        study.shrinks(3.0, 1e-9),
        format!(
            "identity factors {:.2}, {:.2}, {:.2}",
            study.gradient_factor, study.dv_meridian_factor, study.dv_rotational_factor
        ),
    )?;
    notes.push(format!(
        "identity factors {:.1}/{:.1}/{:.1}",
        study.gradient_factor, study.dv_meridian_factor, study.dv_rotational_factor
    ));
    let inc = s.max_h_increase();
    require(inc <= 1e-10, format!("H increases by {inc:.2e}"))?;
    Ok(notes)
}

fn c4_bowl() -> Outcome {
    let s = shoot_translator(2, 20.0, 0.01).map_err(|e| e.to_string())?;
    let mut notes = soliton_suite(SolitonKind::Translator, &s)?;
    let tip = s.tip();
    require(
        (tip.mean - 1.0).abs() < 1e-6 && (tip.ratio - 0.5).abs() < 1e-6,
        format!("tip H {:.9}, ratio {:.9}", tip.mean, tip.ratio),
    )?;
    let unit = verify_identities(&s).unit_defect.unwrap_or(f64::INFINITY);
    require(unit < 1e-8, format!("|V|^2 + H^2 - 1 = {unit:.2e}"))?;
    let decay = decay_audit(&s, &[0.3, 0.1, 0.03]).map_err(|e| e.to_string())?;
    require(decay.ratio_strictly_decreasing, "kappa1/H not strictly decreasing".into())?;
    let low = s
        .nodes
        .iter()
        .zip(&decay.alpha_max)
        .filter(|(c, _)| c.mean < 0.1)
        .map(|(_, a)| *a)
        .fold(f64::NEG_INFINITY, f64::max);
    require(low < 0.05, format!("alpha_max {low:.3e} where H < 0.1"))?;
    notes.push(format!("unit defect {unit:.1e}, alpha_max {low:.3} where H < 0.1"));
    Ok(notes.join(", "))
}

fn c5_expander() -> Outcome {
    let s = shoot_expander(2, 1.0, 20.0, 0.01).map_err(|e| e.to_string())?;
    let mut notes = soliton_suite(SolitonKind::Expander, &s)?;
    let alphas = [0.3, 0.1, 0.03];
    let decay = decay_audit(&s, &alphas).map_err(|e| e.to_string())?;
    // -(d/ds) log H >= alpha |V|^2 along the integral curve sigma' = V, i.e.
    // -(d/dl) log H * |V| >= alpha |V|^2 in meridian arclength l.
    let mut worst = f64::INFINITY;
    for &alpha in &alphas {
        for i in 1..s.nodes.len() {
            let (a, b) = (&s.nodes[i - 1], &s.nodes[i]);
            if a.ratio < alpha || b.ratio < alpha {
                continue;
            }
            let v = 0.5 * (a.v_norm + b.v_norm);
            worst = worst.min(decay.log_h_slope[i] * v - alpha * v * v);
        }
        let audit = decay.audits.iter().find(|x| x.alpha == alpha).unwrap();
        require(audit.pass && audit.crosses, format!("decay audit alpha = {alpha} failed: {audit:?}"))?;
    }
    require(worst >= -s.h, format!("pointwise log-decay margin {worst:.3e} below -h"))?;
    notes.push(format!("log-decay margin {worst:.1e} (slack h = {})", s.h));
    Ok(notes.join(", "))
}

/// Smooth random bumps over a noisy positive floor.
fn random_field(rng: &mut ChaCha20Rng, snapshots: usize, nodes: usize) -> Vec<Vec<f64>> {
    let bumps: Vec<(f64, f64, f64, f64)> = (0..rng.gen_range(1..8))
        .map(|_| {
            (
                rng.gen_range(0.0..snapshots as f64),
                rng.gen_range(0.0..nodes as f64),
                rng.gen_range(0.5..30.0),
                rng.gen_range(0.5..6.0),
            )
        })
        .collect();
    (0..snapshots)
        .map(|k| {
            (0..nodes)
                .map(|i| {
                    let floor = 1.0 + 0.3 * rng.gen::<f64>();
                    floor
                        + bumps
                            .iter()
                            .map(|&(bk, bi, a, w)| {
                                let d2 = (k as f64 - bk).powi(2) + (i as f64 - bi).powi(2);
                                a * (-d2 / (w * w)).exp()
                            })
                            .sum::<f64>()
                })
                .collect()
        })
        .collect()
}

/// `B_r(X) x (t - r^2 / 2n, t]` written out directly.
fn in_cylinder(n: usize, centre: ((f64, f64), f64), r: f64, x: (f64, f64), t: f64) -> bool {
    let ((cx, cz), ct) = centre;
    let dx = (x.0 - cx).hypot(x.1 - cz);
    dx <= r && t <= ct && t > ct - r * r / (2.0 * n as f64)
}

fn brute_check(hist: &FlowHistory, seed: (usize, usize), delta: f64, pick: (usize, usize)) -> Result<(), String> {
    let n = hist.n;
    let at = |(k, i): (usize, usize)| {
        let c = &hist.snapshots[k].curvature.nodes[i];
        ((c.axis, c.radius), hist.snapshots[k].t, c.mean)
    };
    let (xs, ts, hs) = at(seed);
    let (xy, ty, hy) = at(pick);
    if !in_cylinder(n, (xs, ts), delta / (2.0 * hs), xy, ty) {
        return Err("(1) violated".into());
    }
    if hy < hs {
        return Err("(2) violated".into());
    }
    for (k, s) in hist.snapshots.iter().enumerate() {
        for (i, c) in s.curvature.nodes.iter().enumerate() {
            if in_cylinder(n, (xy, ty), delta / (4.0 * hy), (c.axis, c.radius), s.t) && c.mean > 2.0 * hy {
                return Err(format!("(3) violated at ({k}, {i})"));
            }
        }
    }
    Ok(())
}

fn c6_point_pick() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(20_240_601);
    let (snaps, nodes) = (40, 61);
    let times: Vec<f64> = (0..snaps).map(|k| 2e-3 * k as f64).collect();
    let (mut passed, mut longest, mut doubled) = (0, 0, 0);
    for f in 0..100 {
        let field = random_field(&mut rng, snaps, nodes);
        let hist = synthetic_history(2, nodes, &times, |k, i| field[k][i]).map_err(|e| e.to_string())?;
        let seed = (rng.gen_range(snaps / 2..snaps), rng.gen_range(0..nodes));
        let delta = [0.5, 1.0, 2.0][f % 3];
        let point = SpacetimePoint::at(&hist, seed.0, seed.1).map_err(|e| e.to_string())?;
        let cert = pick_point(&hist, point, delta).map_err(|e| format!("field {f}: {e}"))?;
        let y = cert.selected();
        let chain_ok = cert.links.windows(2).all(|w| {
            let h = |p: &SpacetimePoint| field[p.snapshot][p.node];
            h(&w[1].point) >= 2.0 * h(&w[0].point) && w[1].mean == h(&w[1].point)
        });
        if brute_check(&hist, seed, delta, (y.snapshot, y.node)).is_ok() && chain_ok {
            passed += 1;
        }
        longest = longest.max(cert.chain_len());
        doubled += usize::from(cert.chain_len() > 0);
    }
    let msg = format!("{passed}/100 certificates verified, {doubled} with a doubling chain, longest {longest}");
    require(passed == 100, msg.clone())?;
    Ok(msg)
}

fn c7_interior() -> Outcome {
    let flows: Vec<FlowHistory> = [201, 401]
        .iter()
        .map(|&m| run_flow(&Profile::sphere(2, 1.0, m).unwrap(), &FlowConfig::new(2).with_snapshot_dt(0.005)).unwrap())
        .collect();
    let mut worst: f64 = 0.0;
    for r in [0.3, 0.5] {
        for l in [2.0, 4.0] {
            let a = audit_interior(&flows[0], 0.0, r, l).map_err(|e| e.to_string())?;
            let b = audit_interior(&flows[1], 0.0, r, l).map_err(|e| e.to_string())?;
            require(a.constants["C_meas"].is_finite() && a.pass && b.pass, format!("r = {r}, L = {l} failed"))?;
            worst = worst.max(constant_drift(&a, &b));
        }
    }
    let still = synthetic_history(2, 101, &[0.0, 0.1], |_, _| 2.0).map_err(|e| e.to_string())?;
    let zero = audit_interior(&still, 0.0, 0.5, 2.0).map_err(|e| e.to_string())?.constants["C_meas"];
    let msg = format!("max drift {worst:.2e}, boundary cutoff case {zero:e}");
    require(worst < 0.1 && zero == 0.0, msg.clone())?;
    Ok(msg)
}

fn c8_gauss() -> Outcome {
    let mut notes = Vec::new();
    for (name, p) in [
        ("sphere", Profile::sphere(2, 1.0, 401)),
        ("ellipsoid 1:1.5", Profile::ellipsoid(2, 1.0, 1.5, 401)),
        ("ellipsoid 1:3", Profile::ellipsoid(2, 1.0, 3.0, 401)),
    ] {
        let p = p.map_err(|e| e.to_string())?;
        let g = gauss_integrals(&p).map_err(|e| e.to_string())?;
        let cf = mcflab::compute_curvatures(&p).map_err(|e| e.to_string())?;
        let alpha = cf.nodes.iter().map(|c| c.kappa_min / c.kappa_max).fold(f64::INFINITY, f64::min);
        let k_err = (g.int_k - 4.0 * PI).abs() / (4.0 * PI);
        let bound = (2.0 / alpha).powi(2) * 4.0 * PI;
        require(k_err < 1e-3, format!("{name}: int K rel err {k_err:.2e}"))?;
        require(g.int_hn <= bound, format!("{name}: int H^2 {:.4} > {bound:.4}", g.int_hn))?;
        notes.push(format!("{name} {k_err:.1e}"));
    }
    Ok(format!("int K rel err: {}; int H^2 bounds hold", notes.join(", ")))
}

fn c9_existence() -> Outcome {
    let samples = 4001;
    let xs: Vec<f64> = (0..samples).map(|i| 12.5 * i as f64 / (samples - 1) as f64).collect();
    let rs: Vec<f64> = xs.iter().map(|x| (2.0 * x).sqrt()).collect();
    let body = ConvexBody::new(Profile::axis(2, xs, rs).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let out = existence_pipeline(&body, &[2.0, 4.0, 8.0], &[0.1, 0.01, 0.001], &ExistenceConfig::new(2))
        .map_err(|e| e.to_string())?;
    let r = &out.report;
    let msg = format!(
        "finest spread {:.2e}, sup |A| over matrix {:.3} (spread {:.3})",
        r.finest_spread, r.sup_a_max, r.sup_a_spread
    );
    require(r.runs.len() == 9 && r.finest_spread < 1e-2 && r.sup_a_max.is_finite(), msg.clone())?;
    Ok(msg)
}

fn c10_rescale() -> Outcome {
    let unit = run_flow(&Profile::sphere(2, 1.0, 201).unwrap(), &FlowConfig::new(2).with_snapshot_dt(0.01))
        .map_err(|e| e.to_string())?;
    let big = run_flow(&Profile::sphere(2, 2.0, 201).unwrap(), &FlowConfig::new(2).with_snapshot_dt(0.04))
        .map_err(|e| e.to_string())?;
    let origin = SpacetimePoint::at(&unit, 0, 0).map_err(|e| e.to_string())?;
    let origin = SpacetimePoint {
        position: (0.0, 0.0),
        t: 0.0,
        ..origin
    };
    let scaled = rescale(&unit, &origin, 2.0).map_err(|e| e.to_string())?;
    require(scaled.snapshots.len() == big.snapshots.len(), "snapshot counts differ".into())?;
    let mut pos_err: f64 = 0.0;
    let mut time_err: f64 = 0.0;
    for (a, b) in scaled.snapshots.iter().zip(&big.snapshots) {
        time_err = time_err.max((a.t - b.t).abs());
        for (x, y) in a.profile.values.iter().zip(&b.profile.values) {
            pos_err = pos_err.max((x - y).abs());
        }
    }
    let early = run_flow(
        &Profile::ellipsoid(2, 1.0, 1.5, 201).unwrap(),
        &FlowConfig::new(2).with_t_end(0.2).with_snapshot_dt(0.01),
    )
    .map_err(|e| e.to_string())?;
    let centre = SpacetimePoint::at(&early, 0, 0).map_err(|e| e.to_string())?;
    let res0 = mcf_residual(&early);
    let res1 = mcf_residual(&rescale(&early, &centre, 2.0).map_err(|e| e.to_string())?);
    let rel = (res1 - res0).abs() / res0;
    let msg = format!("positions {pos_err:.1e}, times {time_err:.1e}, residual {res0:.3e} -> {res1:.3e}");
    require(pos_err < 1e-10 && time_err < 1e-12 && rel < 1e-6, msg.clone())?;
    Ok(msg)
}

fn main() {
    let mut lines: Vec<(usize, &str, Outcome)> = Vec::new();
    lines.push((1, "shrinking sphere", c1_sphere()));
    let start = Instant::now();
    let coarse = ellipsoid_flow(201);
    let secs = start.elapsed().as_secs_f64();
    lines.push((2, "pinching preservation", c2_pinching(&coarse, secs)));
    let fine = ellipsoid_flow(401);
    lines.push((3, "umbilic convergence", c3_umbilic(&coarse, &fine)));
    lines.push((4, "bowl translator", c4_bowl()));
    lines.push((5, "expander", c5_expander()));
    lines.push((6, "point picking", c6_point_pick()));
    lines.push((7, "interior estimate", c7_interior()));
    lines.push((8, "gauss integral", c8_gauss()));
    lines.push((9, "existence pipeline", c9_existence()));
    lines.push((10, "rescaling covariance", c10_rescale()));
    let mut failed = 0;
    for (id, name, outcome) in &lines {
        match outcome {
            Ok(msg) => println!("PASS criterion {id:>2} {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id:>2} {name}: {msg}");
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
