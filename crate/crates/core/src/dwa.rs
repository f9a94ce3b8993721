//! Smoothing of a selected route into a kinematically feasible path with a
//! dynamic window controller that chases waypoints placed along the route.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{segment_distance_to_element, Point2};
use crate::map::WaterwayMap;
use crate::num::{wrap_pi, wrap_two_pi, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicLimits<T> {
    pub v_max: T,
    pub v_min: T,
    pub a_max: T,
    pub omega_max: T,
    pub omega_dot_max: T,
}

impl<T: Real> Default for KinematicLimits<T> {
    fn default() -> Self {
        Self {
            v_max: T::lit(3.0),
            v_min: T::lit(0.5),
            a_max: T::lit(0.5),
            omega_max: T::lit(0.2),
            omega_dot_max: T::lit(0.1),
        }
    }
}

impl<T: Real> KinematicLimits<T> {
    /// A zero turn-rate limit is accepted so that infeasible turns can be exercised.
    pub fn validate(&self) -> Result<(), DwaError> {
        let z = T::zero();
        let ok = self.v_max > z
            && self.v_min >= z
            && self.v_min <= self.v_max
            && self.a_max > z
            && self.omega_max >= z
            && self.omega_dot_max > z;
        if ok {
            Ok(())
        } else {
            Err(DwaError::InvalidLimits)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights<T> {
    pub heading: T,
    pub clearance: T,
    pub velocity: T,
}

impl<T: Real> Default for Weights<T> {
    fn default() -> Self {
        Self {
            heading: T::lit(0.4),
            clearance: T::lit(0.4),
            velocity: T::lit(0.2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwaConfig<T> {
    pub dt: T,
    pub horizon: T,
    pub samples_v: usize,
    pub samples_omega: usize,
    pub weights: Weights<T>,
    /// Waypoint spacing; defaults to `10·v_max·dt`.
    pub spacing: Option<T>,
    /// Waypoint acceptance radius; defaults to `2·v_max·dt`.
    pub accept_radius: Option<T>,
    pub clearance_cap: T,
    pub max_steps: usize,
}

impl<T: Real> Default for DwaConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::one(),
            horizon: T::lit(10.0),
            samples_v: 11,
            samples_omega: 21,
            weights: Weights::default(),
            spacing: None,
            accept_radius: None,
            clearance_cap: T::lit(50.0),
            max_steps: 20_000,
        }
    }
}

impl<T: Real> DwaConfig<T> {
    pub fn spacing(&self, limits: &KinematicLimits<T>) -> T {
        self.spacing.unwrap_or(T::lit(10.0) * limits.v_max * self.dt)
    }

    pub fn accept_radius(&self, limits: &KinematicLimits<T>) -> T {
        self.accept_radius.unwrap_or(T::lit(2.0) * limits.v_max * self.dt)
    }

    pub fn validate(&self) -> Result<(), DwaError> {
        let z = T::zero();
        let w = self.weights;
        let ok = self.dt > z
            && self.horizon >= self.dt
            && self.samples_v >= 2
            && self.samples_omega >= 2
            && w.heading >= z
            && w.clearance >= z
            && w.velocity >= z
            && (w.heading + w.clearance + w.velocity - T::one()).abs() <= T::lit(1e-6)
            && self.clearance_cap > z
            && self.spacing.is_none_or(|s| s > z)
            && self.accept_radius.is_none_or(|r| r > z)
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(DwaError::InvalidConfig)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicState<T> {
    pub position: Point2<T>,
    pub heading: T,
    pub v: T,
    pub omega: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DwaOutcome<T> {
    Completed,
    /// No admissible command in the window.
    Stalled { at: Point2<T> },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedPath<T> {
    pub dt: T,
    pub states: Vec<KinematicState<T>>,
    pub waypoints: Vec<Point2<T>>,
    /// Indices into `waypoints`, in the order they were reached.
    pub reached: Vec<usize>,
    pub min_clearance: T,
    pub outcome: DwaOutcome<T>,
}

impl<T: Real> ModifiedPath<T> {
    pub fn all_reached(&self) -> bool {
        self.outcome == DwaOutcome::Completed
    }

    pub fn length(&self) -> T {
        self.states
            .windows(2)
            .fold(T::zero(), |acc, w| acc + w[0].position.distance(w[1].position))
    }

    pub fn polyline(&self) -> Vec<Point2<T>> {
        self.states.iter().map(|s| s.position).collect()
    }

    /// CSV with header `t_s,x,y,heading_rad,v_mps,omega_radps`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,x,y,heading_rad,v_mps,omega_radps\n");
        for (i, s) in self.states.iter().enumerate() {
            let t = self.dt * T::from_usize(i).unwrap();
            let _ = writeln!(
                out,
                "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                t, s.position.x, s.position.y, s.heading, s.v, s.omega
            );
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DwaError {
    #[error("route has no points")]
    EmptyRoute,
    #[error("waypoint spacing must be positive")]
    BadSpacing,
    #[error("invalid kinematic limits")]
    InvalidLimits,
    #[error("invalid controller configuration")]
    InvalidConfig,
}

/// Points along `polyline` at arc lengths `0, Δ, 2Δ, …` plus the final point.
pub fn select_waypoints<T: Real>(polyline: &[Point2<T>], spacing: T) -> Result<Vec<Point2<T>>, DwaError> {
    if !(spacing > T::zero()) {
        return Err(DwaError::BadSpacing);
    }
    let (&first, &last) = match (polyline.first(), polyline.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(DwaError::EmptyRoute),
    };
    let mut cumulative = Vec::with_capacity(polyline.len());
    let mut s = T::zero();
    cumulative.push(s);
    for w in polyline.windows(2) {
        s = s + w[0].distance(w[1]);
        cumulative.push(s);
    }
    let total = s;
    if total == T::zero() {
        return Ok(vec![first]);
    }
    let guard = spacing * T::lit(1e-9);
    let mut out = Vec::new();
    let mut seg = 0usize;
    let mut k = 0usize;
    loop {
        let target = spacing * T::from_usize(k).unwrap();
        if target >= total - guard {
            break;
        }
        while seg + 1 < polyline.len() - 1 && cumulative[seg + 1] < target {
            seg += 1;
        }
        let len = cumulative[seg + 1] - cumulative[seg];
        let t = if len > T::zero() {
            ((target - cumulative[seg]) / len).min(T::one())
        } else {
            T::zero()
        };
        out.push(polyline[seg].lerp(polyline[seg + 1], t));
        k += 1;
    }
    out.push(last);
    Ok(out)
}

/// Admissible `(v, ω)` intervals reachable within one control step.
pub fn dynamic_window<T: Real>(state: &KinematicState<T>, limits: &KinematicLimits<T>, dt: T) -> ((T, T), (T, T)) {
    let v = (
        limits.v_min.max(state.v - limits.a_max * dt),
        limits.v_max.min(state.v + limits.a_max * dt),
    );
    let w = (
        (-limits.omega_max).max(state.omega - limits.omega_dot_max * dt),
        limits.omega_max.min(state.omega + limits.omega_dot_max * dt),
    );
    (v, w)
}

/// One exact constant-command arc of duration `dt`.
pub fn advance<T: Real>(state: &KinematicState<T>, v: T, omega: T, dt: T) -> KinematicState<T> {
    let th = state.heading;
    let (dx, dy) = if omega.abs() < T::lit(1e-9) {
        (v * dt * th.cos(), v * dt * th.sin())
    } else {
        let r = v / omega;
        let th1 = th + omega * dt;
        (r * (th1.sin() - th.sin()), r * (th.cos() - th1.cos()))
    };
    KinematicState {
        position: state.position + Point2::new(dx, dy),
        heading: wrap_two_pi(th + omega * dt),
        v,
        omega,
    }
}

/// States at `0, dt, 2dt, …, horizon` under a constant command.
pub fn rollout<T: Real>(state: &KinematicState<T>, v: T, omega: T, horizon: T, dt: T) -> Vec<KinematicState<T>> {
    let mut out = vec![*state];
    if !(horizon > T::zero()) || !(dt > T::zero()) {
        return out;
    }
    let n = (horizon / dt).round().to_usize().unwrap_or(0);
    let mut s = *state;
    for _ in 0..n {
        s = advance(&s, v, omega, dt);
        out.push(s);
    }
    out
}

/// Smallest boundary distance along the trajectory's chords.
pub fn trajectory_clearance<T: Real>(trajectory: &[KinematicState<T>], map: &WaterwayMap<T>) -> T {
    let chord_min = |a: Point2<T>, b: Point2<T>| {
        map.elements()
            .iter()
            .map(|e| segment_distance_to_element(a, b, e))
            .fold(T::infinity(), T::min)
    };
    match trajectory {
        [] => T::infinity(),
        [only] => map.clearance(only.position),
        _ => trajectory
            .windows(2)
            .map(|w| chord_min(w[0].position, w[1].position))
            .fold(T::infinity(), T::min),
    }
}

/// Weighted score in `[0, 1]`, or `-∞` for a trajectory that touches a boundary.
pub fn evaluate<T: Real>(
    trajectory: &[KinematicState<T>],
    v_cmd: T,
    waypoint: Point2<T>,
    map: &WaterwayMap<T>,
    limits: &KinematicLimits<T>,
    cfg: &DwaConfig<T>,
) -> T {
    let Some(end) = trajectory.last() else {
        return T::neg_infinity();
    };
    let clearance = trajectory_clearance(trajectory, map);
    if !(clearance > T::zero()) {
        return T::neg_infinity();
    }
    let heading_term = match (waypoint - end.position).normalized() {
        Some(d) => T::one() - wrap_pi(d.angle() - end.heading).abs() / T::PI(),
        None => T::one(),
    };
    let clearance_term = clearance.min(cfg.clearance_cap) / cfg.clearance_cap;
    let velocity_term = v_cmd / limits.v_max;
    cfg.weights.heading * heading_term + cfg.weights.clearance * clearance_term + cfg.weights.velocity * velocity_term
}

/// Nudges `cand` toward `prev` until the step fits `max_delta` in floating point.
fn within_step<T: Real>(prev: T, cand: T, max_delta: T) -> T {
    let nudge = |x: T| (x.abs() * T::epsilon()).max(T::min_positive_value());
    let mut c = cand;
    while c - prev > max_delta {
        c = c - nudge(c);
    }
    while prev - c > max_delta {
        c = c + nudge(c);
    }
    c
}

fn grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let last = T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| (lo + (hi - lo) * T::from_usize(i).unwrap() / last).max(lo).min(hi))
        .collect()
}

/// Drives the controller through waypoints sampled along `route`.
pub fn modify_path<T: Real>(
    route: &[Point2<T>],
    map: &WaterwayMap<T>,
    limits: &KinematicLimits<T>,
    cfg: &DwaConfig<T>,
) -> Result<ModifiedPath<T>, DwaError> {
    limits.validate()?;
    cfg.validate()?;
    let waypoints = select_waypoints(route, cfg.spacing(limits))?;
    let accept = cfg.accept_radius(limits);
    let start = waypoints[0];
    let heading = waypoints
        .get(1)
        .and_then(|w| (*w - start).normalized())
        .map_or(T::zero(), |d| d.angle());
    let mut state = KinematicState {
        position: start,
        heading,
        v: limits.v_min,
        omega: T::zero(),
    };
    let mut states = vec![state];
    let mut reached = vec![0usize];
    let mut target = 1usize;
    let mut min_clearance = map.clearance(start);

    let finish = |states, reached, min_clearance, outcome| ModifiedPath {
        dt: cfg.dt,
        states,
        waypoints: waypoints.clone(),
        reached,
        min_clearance,
        outcome,
    };

    for _ in 0..cfg.max_steps {
        while target < waypoints.len() && state.position.distance(waypoints[target]) <= accept {
            reached.push(target);
            target += 1;
        }
        if target >= waypoints.len() {
            return Ok(finish(states, reached, min_clearance, DwaOutcome::Completed));
        }
        let ((vl, vh), (wl, wh)) = dynamic_window(&state, limits, cfg.dt);
        let mut best: Option<(T, T, T)> = None;
        for &v in grid(vl, vh, cfg.samples_v).iter().rev() {
            for &w in &grid(wl, wh, cfg.samples_omega) {
                let v = within_step(state.v, v, limits.a_max * cfg.dt);
                let w = within_step(state.omega, w, limits.omega_dot_max * cfg.dt);
                if v < limits.v_min || v > limits.v_max || w.abs() > limits.omega_max {
                    continue;
                }
                let traj = rollout(&state, v, w, cfg.horizon, cfg.dt);
                let score = evaluate(&traj, v, waypoints[target], map, limits, cfg);
                if score > T::neg_infinity() && best.is_none_or(|b| score > b.0) {
                    best = Some((score, v, w));
                }
            }
        }
        let Some((_, v, w)) = best else {
            let at = state.position;
            return Ok(finish(states, reached, min_clearance, DwaOutcome::Stalled { at }));
        };
        let next = advance(&state, v, w, cfg.dt);
        min_clearance = min_clearance.min(trajectory_clearance(&[state, next], map));
        state = next;
        states.push(state);
    }
    Ok(finish(states, reached, min_clearance, DwaOutcome::BudgetExhausted))
}
