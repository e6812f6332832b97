//! Invariants over randomized inputs.

use std::sync::OnceLock;

use proptest::prelude::*;

use mcflab::flow::run_flow;
use mcflab::spacetime::{
    check_pick, cylinder_nodes, pick_point, rescale, synthetic_history, ParabolicCylinder, SpacetimePoint,
};
use mcflab::verify::{audit_pinching_preservation, audit_umbilic};
use mcflab::{compute_curvatures, FlowConfig, FlowHistory, Profile};

fn ellipsoid_flow() -> &'static FlowHistory {
    static HIST: OnceLock<FlowHistory> = OnceLock::new();
    HIST.get_or_init(|| {
        let p = Profile::ellipsoid(2, 1.0, 1.5, 81).unwrap();
        run_flow(&p, &FlowConfig::new(2).with_t_end(0.15).with_snapshot_dt(0.01)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_free_norm_identity(n in 2usize..6, a in 0.3f64..3.0, c in 0.3f64..3.0) {
        let cf = compute_curvatures(&Profile::ellipsoid(n, a, c, 61).unwrap()).unwrap();
        let nf = n as f64;
        for k in &cf.nodes {
            let want = (nf - 1.0) / nf * (k.kappa_axial - k.kappa_rot).powi(2);
            prop_assert!((k.norm_aring2 - want).abs() <= 1e-12 * k.norm_a2.max(1.0));
        }
    }

    #[test]
    fn rescales_compose(l1 in 0.3f64..4.0, l2 in 0.3f64..4.0, snap in 0usize..16, node in 0usize..81) {
        let hist = ellipsoid_flow();
        let snap = snap.min(hist.snapshots.len() - 1);
        let c = SpacetimePoint::at(hist, snap, node).unwrap();
        let once = rescale(hist, &c, l1 * l2).unwrap();
        let first = rescale(hist, &c, l1).unwrap();
        let c1 = SpacetimePoint::at(&first, snap, node).unwrap();
        let twice = rescale(&first, &c1, l2).unwrap();
        for (a, b) in once.snapshots.iter().zip(&twice.snapshots) {
            prop_assert!((a.t - b.t).abs() <= 1e-10 * a.t.abs().max(1.0));
            for (p, q) in a.curvature.nodes.iter().zip(&b.curvature.nodes) {
                prop_assert!((p.mean - q.mean).abs() <= 1e-8 * p.mean.abs().max(1.0));
                prop_assert!((p.axis - q.axis).abs() <= 1e-10 * p.axis.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pinching_series_is_scale_invariant(lambda in 0.2f64..5.0, snap in 0usize..16) {
        let hist = ellipsoid_flow();
        let snap = snap.min(hist.snapshots.len() - 1);
        let c = SpacetimePoint::at(hist, snap, 40).unwrap();
        let scaled = rescale(hist, &c, lambda).unwrap();
        let a = audit_pinching_preservation(hist, 0.2, 1e-3).unwrap();
        let b = audit_pinching_preservation(&scaled, 0.2, 1e-3).unwrap();
        for (x, y) in a.series["m"].iter().zip(&b.series["m"]) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn umbilic_constants_are_monotone(mut eps in proptest::collection::vec(0.001f64..1.0, 1..6), l in 2.2f64..4.0) {
        let rep = audit_umbilic(ellipsoid_flow(), 0.0, l, 0.0, &eps).unwrap();
        prop_assert!(rep.pass);
        eps.sort_by(f64::total_cmp);
        let cs: Vec<f64> = eps.iter().map(|e| rep.constants[&format!("C_eps={e}")]).collect();
        prop_assert!(cs.windows(2).all(|w| w[1] <= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cylinder_nodes_match_exhaustive_scan(
        n in 2usize..4,
        snap in 0usize..12,
        node in 0usize..25,
        r in 0.01f64..1.5,
    ) {
        let times: Vec<f64> = (0..12).map(|k| 0.01 * k as f64).collect();
        let hist = synthetic_history(n, 25, &times, |_, _| 1.0).unwrap();
        let c = SpacetimePoint::at(&hist, snap, node).unwrap();
        let got = cylinder_nodes(&hist, &ParabolicCylinder::new(c, r)).unwrap();
        let mut want = Vec::new();
        for k in 0..times.len() {
            for i in 0..25 {
                let q = SpacetimePoint::at(&hist, k, i).unwrap();
                let d = (q.position.0 - c.position.0).hypot(q.position.1 - c.position.1);
                if q.t > c.t - r * r / (2.0 * n as f64) && q.t <= c.t && d <= r {
                    want.push((k, i));
                }
            }
        }
        let got: Vec<(usize, usize)> = got.iter().map(|p| (p.snapshot, p.node)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn picked_points_satisfy_the_certificate(
        values in proptest::collection::vec(0.5f64..6.0, 20 * 21),
        snap in 0usize..20,
        node in 0usize..21,
        delta in 0.3f64..3.0,
    ) {
        let times: Vec<f64> = (0..20).map(|k| 0.005 * k as f64).collect();
        let hist = synthetic_history(2, 21, &times, |k, i| values[k * 21 + i]).unwrap();
        let seed = SpacetimePoint::at(&hist, snap, node).unwrap();
        let cert = pick_point(&hist, seed, delta).unwrap();
        prop_assert!(check_pick(&hist, seed, &cert).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn convex_flows_stay_convex(a in 0.6f64..1.5, c in 0.6f64..1.5) {
        let p = Profile::ellipsoid(2, a, c, 61).unwrap();
        let hist = run_flow(&p, &FlowConfig::new(2).with_t_end(0.05).with_snapshot_dt(0.01)).unwrap();
        prop_assert!(audit_pinching_preservation(&hist, 0.0, 1e-3).unwrap().pass);
    }
}
