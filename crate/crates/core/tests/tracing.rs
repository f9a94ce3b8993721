mod common;

use common::{brute_chain_distance, brute_clearance, p};
use proptest::prelude::*;
use waterway::scenarios;
use waterway::{trace_pathway, Map, Point, ShipState, Trace, TraceConfig, TraceEventKind, WaterwayMap};

fn trace(map: &Map, start: Point, goal: Point, cfg: &TraceConfig<f64>) -> Trace<f64> {
    let cfg = cfg.clone().with_goal(goal);
    trace_pathway(map, ShipState::new(start, 0.0, cfg.speed), &cfg).expect("trace")
}

#[test]
fn bend_trace_keeps_the_pair_balanced() {
    let s = scenarios::bend::<f64>();
    let t = trace(&s.map, p(100.0, 30.0), p(550.0, 600.0), &s.trace);
    assert!(t.polyline.len() > 600);
    for q in &t.polyline {
        let d1 = brute_chain_distance(&s.map, 1, *q);
        let d2 = brute_chain_distance(&s.map, 2, *q);
        assert!((d1 - d2).abs() <= s.trace.eq_tol, "{q:?}: {d1} vs {d2}");
    }
}

#[test]
fn steps_have_the_nominal_length() {
    let s = scenarios::bend::<f64>();
    let t = trace(&s.map, p(100.0, 30.0), p(550.0, 600.0), &s.trace);
    let h = s.trace.step_length();
    let n = t.polyline.len();
    // The final step may be clipped at the map edge or the goal.
    for (k, w) in t.polyline[..n - 1].windows(2).enumerate() {
        let d = w[0].distance(w[1]);
        assert!((d - h).abs() < 1e-9, "step {k} has length {d}");
    }
    let s_vals: Vec<f64> = t.profile.samples().iter().map(|x| x.s).collect();
    assert!(s_vals.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn recorded_width_is_the_global_clearance() {
    for s in [scenarios::bend::<f64>(), scenarios::parabola(), scenarios::wedge()] {
        let t = trace(&s.map, s.start, s.goal, &s.trace);
        for x in t.profile.samples() {
            let oracle = brute_clearance(&s.map, x.position);
            assert!((x.width - oracle).abs() < 1e-9, "{}: {} vs {oracle}", s.name, x.width);
        }
    }
}

#[test]
fn bend_is_the_same_in_both_directions() {
    let s = scenarios::bend::<f64>();
    let fwd = trace(&s.map, p(2.0, 40.0), p(550.0, 600.0), &s.trace);
    let back = trace(&s.map, p(560.0, 598.0), p(0.0, 50.0), &s.trace);
    let (lf, lb) = (fwd.profile.total_length(), back.profile.total_length());
    assert!((lf - lb).abs() <= 2.0 * s.trace.step_length(), "{lf} vs {lb}");
    let tol = s.trace.eq_tol.max(s.trace.step_length());
    let rev = back.profile.reversed();
    let mut s_at = 5.0;
    while s_at < lf.min(lb) - 5.0 {
        let a = fwd.profile.width_at(s_at).unwrap();
        let b = rev.width_at(s_at + (lb - lf)).unwrap();
        assert!((a - b).abs() <= tol, "s = {s_at}: {a} vs {b}");
        s_at += 1.0;
    }
}

#[test]
fn corridor_trace_reports_the_goal() {
    let s = scenarios::corridor::<f64>();
    let t = trace(&s.map, s.start, p(300.0, 50.0), &s.trace);
    assert_eq!(t.terminal().kind, TraceEventKind::GoalReached);
    assert!(t.polyline.last().unwrap().distance(p(300.0, 50.0)) <= s.trace.step_length());
}

fn rotated_corridor(angle: f64, shift: Point) -> Map {
    let r = |x: f64, y: f64| p(x, y).rotated(angle) + shift;
    WaterwayMap::builder()
        .chain(1, false, vec![r(0.0, 0.0), r(300.0, 0.0)])
        .chain(2, false, vec![r(0.0, 80.0), r(300.0, 80.0)])
        .build()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn corridor_width_is_frame_independent(angle in 0.0..std::f64::consts::TAU, dx in -500.0..500.0f64, dy in -500.0..500.0f64, off in 5.0..75.0f64) {
        let shift = p(dx, dy);
        let map = rotated_corridor(angle, shift);
        let cfg = TraceConfig::default();
        let start = p(20.0, off).rotated(angle) + shift;
        let goal = p(290.0, 40.0).rotated(angle) + shift;
        let t = trace(&map, start, goal, &cfg);
        prop_assert!(t.profile.len() > 200);
        for x in t.profile.samples() {
            prop_assert!((x.width - 40.0).abs() <= cfg.eq_tol);
            let local = (x.position - shift).rotated(-angle);
            prop_assert!((local.y - 40.0).abs() <= cfg.step_length());
        }
    }
}
