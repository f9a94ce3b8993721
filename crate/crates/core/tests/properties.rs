mod common;

use common::{p, seg_dist};
use proptest::prelude::*;
use waterway::dwa::advance;
use waterway::{
    distance_to_element, dynamic_window, rollout, select_waypoints, spi, GeometricElement, KinematicLimits,
    KinematicState, Profile, SafetyConfig,
};

fn profile_strategy() -> impl Strategy<Value = Profile> {
    prop::collection::vec((0.1..20.0f64, 1.0..200.0f64), 2..40).prop_map(|steps| {
        let mut s = 0.0;
        let pairs: Vec<(f64, f64)> = steps
            .iter()
            .map(|&(ds, w)| {
                let here = s;
                s += ds;
                (here, w)
            })
            .collect();
        Profile::from_pairs(&pairs).unwrap()
    })
}

proptest! {
    #[test]
    fn segment_distance_is_rigid_motion_invariant(
        a in (-100.0..100.0f64, -100.0..100.0f64),
        b in (-100.0..100.0f64, -100.0..100.0f64),
        q in (-100.0..100.0f64, -100.0..100.0f64),
        angle in 0.0..std::f64::consts::TAU,
        shift in (-1e3..1e3f64, -1e3..1e3f64),
    ) {
        prop_assume!((a.0 - b.0).hypot(a.1 - b.1) > 1e-3);
        let e = GeometricElement::segment(0, 0, p(a.0, a.1), p(b.0, b.1));
        let d = distance_to_element(p(q.0, q.1), &e).distance;
        prop_assert!((d - seg_dist(q, a, b)).abs() < 1e-9);
        let t = |x: (f64, f64)| p(x.0, x.1).rotated(angle) + p(shift.0, shift.1);
        let moved = GeometricElement::segment(0, 0, t(a), t(b));
        let dm = distance_to_element(t(q), &moved).distance;
        prop_assert!((d - dm).abs() < 1e-9);
    }

    #[test]
    fn resampling_is_idempotent(prof in profile_strategy(), spacing in 0.5..5.0f64) {
        let once = prof.resample(spacing).unwrap();
        let twice = once.resample(spacing).unwrap();
        prop_assert_eq!(once.len(), twice.len());
        for (x, y) in once.samples().iter().zip(twice.samples()) {
            prop_assert!((x.s - y.s).abs() < 1e-9);
            prop_assert!((x.width - y.width).abs() < 1e-9);
        }
        prop_assert_eq!(once.total_length(), prof.total_length());
    }

    #[test]
    fn spi_ignores_direction_on_uneven_profiles(prof in profile_strategy()) {
        let cfg = SafetyConfig::default();
        let a = spi(&prof, &cfg).unwrap();
        let b = spi(&prof.reversed(), &cfg).unwrap();
        prop_assert_eq!(a.spi, b.spi);
        prop_assert_eq!(a.min_width, b.min_width);
    }

    #[test]
    fn window_commands_respect_the_limits(
        v in 0.5..3.0f64,
        omega in -0.2..0.2f64,
        fv in 0.0..=1.0f64,
        fw in 0.0..=1.0f64,
        heading in 0.0..std::f64::consts::TAU,
    ) {
        let l = KinematicLimits::default();
        let s = KinematicState { position: p(0.0, 0.0), heading, v, omega };
        let ((v0, v1), (w0, w1)) = dynamic_window(&s, &l, 1.0);
        prop_assert!(v0 <= v1 && w0 <= w1);
        let vc = v0 + (v1 - v0) * fv;
        let wc = w0 + (w1 - w0) * fw;
        prop_assert!(vc >= l.v_min && vc <= l.v_max && wc.abs() <= l.omega_max);
        prop_assert!((vc - v).abs() <= l.a_max + 1e-12);
        prop_assert!((wc - omega).abs() <= l.omega_dot_max + 1e-12);

        // A constant-command arc: chord no longer than the arc, exact chord length.
        let n = advance(&s, vc, wc, 1.0);
        let chord = n.position.norm();
        prop_assert!(chord <= vc + 1e-9);
        let expect = if wc.abs() < 1e-9 { vc } else { 2.0 * (vc / wc).abs() * (wc / 2.0).sin().abs() };
        prop_assert!((chord - expect).abs() < 1e-9);

        let traj = rollout(&s, vc, wc, 5.0, 1.0);
        prop_assert_eq!(traj.len(), 6);
    }

    #[test]
    fn waypoints_are_evenly_spaced(
        pts in prop::collection::vec((-500.0..500.0f64, -500.0..500.0f64), 2..10),
        spacing in 5.0..50.0f64,
    ) {
        let line: Vec<_> = pts.iter().map(|&(x, y)| p(x, y)).collect();
        let total: f64 = line.windows(2).map(|w| w[0].distance(w[1])).sum();
        prop_assume!(total > 1.0);
        let wps = select_waypoints(&line, spacing).unwrap();
        prop_assert_eq!(wps[0], line[0]);
        prop_assert_eq!(*wps.last().unwrap(), *line.last().unwrap());
        // Consecutive waypoints are at most one spacing apart along the line.
        for w in wps.windows(2) {
            prop_assert!(w[0].distance(w[1]) <= spacing + 1e-9);
        }
    }
}
