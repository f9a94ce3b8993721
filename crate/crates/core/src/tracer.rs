//! Virtual-ship tracing of the equidistant locus between two boundary
//! chains, recording the clearance along the way.
//!
//! A trace has two phases. Centering moves the ship at full speed straight
//! away from its nearest boundary until it is equidistant from the two
//! nearest chains. Tracing then advances in fixed steps of `v·Δt`, choosing
//! each heading so that the step lands back on the equidistant locus; the
//! local tangent of the locus (where both distance rates agree) brackets
//! that choice. The trace ends at the goal, at an opening of the map, at a
//! branching point where a third chain becomes as near as the pair, on
//! re-entering an explored node, or at the step limit.

use thiserror::Error;

use crate::geometry::{
    distance_rate, distance_to_element, ChainId, ElementId, GeometricElement, Point2, VirtualShipState,
};
use crate::map::{ChainHit, WaterwayMap};
use crate::num::{wrap_pi, wrap_two_pi, Real};
use crate::profile::{WidthProfile, WidthSample};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Goal<T> {
    pub point: Point2<T>,
    pub radius: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceConfig<T> {
    /// Time step Δt, seconds.
    pub dt: T,
    /// Virtual ship speed v, m/s.
    pub speed: T,
    /// Equidistance tolerance ε_eq, meters.
    pub eq_tol: T,
    /// Tolerance for treating a chain as equally near, meters.
    pub tie_tol: T,
    pub max_steps: usize,
    pub goal: Option<Goal<T>>,
    /// Arc-length spacing Δs used when a profile is resampled, meters.
    pub sample_spacing: T,
    /// Clearance below which a trace is considered to have run into a dead end.
    pub min_width: T,
    /// Radius for recognising an already explored node; defaults to `2·v·Δt`.
    pub merge_radius: Option<T>,
}

impl<T: Real> Default for TraceConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::one(),
            speed: T::one(),
            eq_tol: T::lit(0.5),
            tie_tol: T::lit(1e-3),
            max_steps: 200_000,
            goal: None,
            sample_spacing: T::one(),
            min_width: T::lit(0.5),
            merge_radius: None,
        }
    }
}

impl<T: Real> TraceConfig<T> {
    /// `ε_eq = 0.5·v·Δt`, `min_width = ε_eq`.
    pub fn with_step(dt: T, speed: T) -> Self {
        let half = T::lit(0.5) * dt * speed;
        Self {
            dt,
            speed,
            eq_tol: half,
            min_width: half,
            ..Self::default()
        }
    }

    pub fn with_goal(mut self, point: Point2<T>) -> Self {
        self.goal = Some(Goal {
            point,
            radius: self.step_length(),
        });
        self
    }

    pub fn step_length(&self) -> T {
        self.speed * self.dt
    }

    pub fn merge_radius(&self) -> T {
        self.merge_radius.unwrap_or(T::lit(2.0) * self.step_length())
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        let z = T::zero();
        if !(self.dt > z && self.speed > z && self.eq_tol > z && self.tie_tol >= z && self.sample_spacing > z)
            || self.max_steps == 0
        {
            return Err(TraceError::InvalidConfig);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminusReason {
    /// Left the map's extent through an open end.
    Opening,
    /// Clearance fell below the dead-end threshold.
    DeadEnd,
    /// No admissible step along the locus.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEventKind<T> {
    Handoff { old: ElementId, new: ElementId },
    Intersection { node: Point2<T>, chains: Vec<ChainId> },
    Terminus(TerminusReason),
    GoalReached,
    StepLimit,
    /// Entered an explored node (`Some(index)` into the known nodes) or the trace's own path (`None`).
    Revisit { node: Option<usize> },
}

impl<T> TraceEventKind<T> {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, TraceEventKind::Handoff { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent<T> {
    pub kind: TraceEventKind<T>,
    pub at: WidthSample<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    /// Positions visited while centering, including start and end.
    pub centering: Vec<Point2<T>>,
    pub polyline: Vec<Point2<T>>,
    pub profile: WidthProfile<T>,
    pub events: Vec<TraceEvent<T>>,
    /// Chain pair that was active when the trace ended.
    pub pair: (ChainId, ChainId),
}

impl<T: Real> Trace<T> {
    pub fn terminal(&self) -> &TraceEvent<T> {
        self.events.last().expect("every trace ends with a terminal event")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("invalid trace configuration")]
    InvalidConfig,
    #[error("start point has zero clearance")]
    ZeroClearance,
    #[error("fewer than two boundary chains near the start")]
    NoPair,
    #[error("equidistance not reached within {0} steps")]
    StepLimit(usize),
    #[error("no forward direction along the locus")]
    AmbiguousDirection,
    #[error("boundary pair gives no defined medial direction")]
    Degenerate,
}

/// Result of the centering phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Centering<T> {
    pub state: VirtualShipState<T>,
    pub path: Vec<Point2<T>>,
    /// Recession rate from the nearer element at each centering step.
    pub rates: Vec<T>,
}

/// Centers between two fixed elements: at every step the ship moves at full
/// speed directly away from the nearer one until the two distances agree
/// within `ε_eq`. A step that would overshoot equality is shortened.
pub fn center_on_pair<T: Real>(
    state: VirtualShipState<T>,
    h1: &GeometricElement<T>,
    h2: &GeometricElement<T>,
    cfg: &TraceConfig<T>,
) -> Result<Centering<T>, TraceError> {
    cfg.validate()?;
    let elems = [*h1, *h2];
    center_with(
        state,
        cfg,
        |p| {
            let c = elems.map(|e| distance_to_element(p, &e));
            let probe = |i: usize| Probe {
                key: i,
                distance: c[i].distance,
                nearest: c[i].nearest_point,
                element: elems[i],
            };
            Some([probe(0), probe(1)])
        },
        |p, &i| Some(distance_to_element(p, &elems[i]).distance),
    )
}

/// Centers between the two nearest chains of the map, re-evaluated at each step.
pub fn center<T: Real>(
    map: &WaterwayMap<T>,
    state: VirtualShipState<T>,
    cfg: &TraceConfig<T>,
) -> Result<Centering<T>, TraceError> {
    cfg.validate()?;
    if map.clearance(state.position) <= T::zero() {
        return Err(TraceError::ZeroClearance);
    }
    center_with(
        state,
        cfg,
        |p| {
            let hits = map.chain_hits(p);
            if hits.len() < 2 {
                return None;
            }
            let probe = |h: &ChainHit<T>| Probe {
                key: h.chain,
                distance: h.distance(),
                nearest: h.clearance.nearest_point,
                element: *map.element(h.element).unwrap(),
            };
            Some([probe(&hits[0]), probe(&hits[1])])
        },
        |p, &c| map.chain_hit(p, c).map(|h| h.distance()),
    )
}

struct Probe<K, T> {
    key: K,
    distance: T,
    nearest: Point2<T>,
    element: GeometricElement<T>,
}

fn center_with<T: Real, K, P, M>(
    mut state: VirtualShipState<T>,
    cfg: &TraceConfig<T>,
    probe: P,
    measure: M,
) -> Result<Centering<T>, TraceError>
where
    P: Fn(Point2<T>) -> Option<[Probe<K, T>; 2]>,
    M: Fn(Point2<T>, &K) -> Option<T>,
{
    let mut path = vec![state.position];
    let mut rates = Vec::new();
    for _ in 0..cfg.max_steps {
        let [a, b] = probe(state.position).ok_or(TraceError::NoPair)?;
        if (a.distance - b.distance).abs() <= cfg.eq_tol {
            return Ok(Centering { state, path, rates });
        }
        let (near, far) = if a.distance < b.distance { (a, b) } else { (b, a) };
        let away = (state.position - near.nearest).normalized().ok_or(TraceError::ZeroClearance)?;
        state.set_heading(away.angle());
        rates.push(distance_rate(&state, &near.element).map_err(|_| TraceError::ZeroClearance)?);

        // positive once the ship has passed the equidistant point
        let gap_at = |r: T| -> Option<T> {
            let q = state.position + away * r;
            Some(measure(q, &near.key)? - measure(q, &far.key)?)
        };
        let h = cfg.step_length();
        let mut r = h;
        if gap_at(h).ok_or(TraceError::NoPair)? > cfg.eq_tol {
            let (mut lo, mut hi) = (T::zero(), h);
            for _ in 0..60 {
                let mid = T::lit(0.5) * (lo + hi);
                let g = gap_at(mid).ok_or(TraceError::NoPair)?;
                if g.abs() <= cfg.eq_tol * T::lit(0.25) {
                    hi = mid;
                    break;
                }
                if g > T::zero() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            r = hi;
        }
        state.position = state.position + away * r;
        state.elapsed = state.elapsed + r / state.speed;
        path.push(state.position);
    }
    Err(TraceError::StepLimit(cfg.max_steps))
}

/// The two headings along which the distances to boundaries with nearest
/// points `q1` and `q2` change at the same rate, i.e. the directions
/// orthogonal to the difference of the two unit recession vectors.
pub fn medial_roots<T: Real>(p: Point2<T>, q1: Point2<T>, q2: Point2<T>) -> Option<(T, T)> {
    let u1 = (p - q1).normalized()?;
    let u2 = (p - q2).normalized()?;
    let diff = u1 - u2;
    if diff.norm() < T::lit(1e-12) {
        return None;
    }
    let a = diff.perp().angle();
    Some((a, wrap_two_pi(a + T::PI())))
}

/// Heading satisfying equal distance rates to `h1` and `h2` that continues
/// forward from `prev_heading`; the goal bearing breaks an exact tie.
pub fn medial_direction<T: Real>(
    p: Point2<T>,
    h1: &GeometricElement<T>,
    h2: &GeometricElement<T>,
    prev_heading: T,
    goal: Option<Point2<T>>,
) -> Result<T, TraceError> {
    let q1 = distance_to_element(p, h1).nearest_point;
    let q2 = distance_to_element(p, h2).nearest_point;
    let roots = match medial_roots(p, q1, q2) {
        Some((a, b)) => vec![a, b],
        None => numeric_medial_roots(p, h1, h2),
    };
    if roots.is_empty() {
        return Err(TraceError::Degenerate);
    }
    pick_forward(&roots, prev_heading, goal.map(|g| (g - p).angle()))
}

fn pick_forward<T: Real>(roots: &[T], prev: T, goal_bearing: Option<T>) -> Result<T, TraceError> {
    let tol = T::lit(1e-9);
    let best = |reference: T| {
        roots
            .iter()
            .copied()
            .map(|r| (r, (r - reference).cos()))
            .filter(|&(_, c)| c > tol)
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(r, _)| r)
    };
    if let Some(r) = best(prev) {
        return Ok(r);
    }
    goal_bearing.and_then(best).ok_or(TraceError::AmbiguousDirection)
}

/// Bracketed root search of `rate(φ, h1) - rate(φ, h2)` over `[0, 2π)`.
fn numeric_medial_roots<T: Real>(p: Point2<T>, h1: &GeometricElement<T>, h2: &GeometricElement<T>) -> Vec<T> {
    let g = |phi: T| -> Option<T> {
        let s = VirtualShipState::new(p, phi, T::one());
        Some(distance_rate(&s, h1).ok()? - distance_rate(&s, h2).ok()?)
    };
    let n = 720;
    let step = T::two_pi() / T::from_usize(n).unwrap();
    let mut roots = Vec::new();
    for k in 0..n {
        let a = step * T::from_usize(k).unwrap();
        let b = a + step;
        let (Some(ga), Some(gb)) = (g(a), g(b)) else { continue };
        if ga == T::zero() {
            roots.push(a);
        } else if ga * gb < T::zero() {
            let (mut lo, mut hi, mut glo) = (a, b, ga);
            for _ in 0..60 {
                let mid = T::lit(0.5) * (lo + hi);
                let Some(gm) = g(mid) else { break };
                if gm * glo <= T::zero() {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            roots.push(T::lit(0.5) * (lo + hi));
        }
    }
    roots
}

/// Center on the nearest two chains, then trace their equidistant locus.
pub fn trace_pathway<T: Real>(
    map: &WaterwayMap<T>,
    start: VirtualShipState<T>,
    cfg: &TraceConfig<T>,
) -> Result<Trace<T>, TraceError> {
    cfg.validate()?;
    let centering = center(map, start, cfg)?;
    let p = centering.state.position;
    let hits = map.chain_hits(p);
    if hits.len() < 2 {
        return Err(TraceError::NoPair);
    }
    let (r1, r2) = medial_roots(p, hits[0].clearance.nearest_point, hits[1].clearance.nearest_point)
        .ok_or(TraceError::Degenerate)?;
    let heading = pick_forward(
        &[r1, r2],
        centering.state.heading(),
        cfg.goal.map(|g| (g.point - p).angle()),
    )?;
    let tracer = LocusTracer::new(map, cfg, &[], None);
    let mut trace = tracer.follow(p, heading, (hits[0].chain, hits[1].chain));
    trace.centering = centering.path;
    Ok(trace)
}

/// Follows one equidistant locus from a point already on it.
pub(crate) struct LocusTracer<'a, T> {
    map: &'a WaterwayMap<T>,
    cfg: &'a TraceConfig<T>,
    known_nodes: &'a [Point2<T>],
    depart_node: Option<usize>,
}

impl<'a, T: Real> LocusTracer<'a, T> {
    pub(crate) fn new(
        map: &'a WaterwayMap<T>,
        cfg: &'a TraceConfig<T>,
        known_nodes: &'a [Point2<T>],
        depart_node: Option<usize>,
    ) -> Self {
        Self {
            map,
            cfg,
            known_nodes,
            depart_node,
        }
    }

    fn pair_hits(&self, p: Point2<T>, pair: (ChainId, ChainId)) -> Option<(ChainHit<T>, ChainHit<T>)> {
        Some((self.map.chain_hit(p, pair.0)?, self.map.chain_hit(p, pair.1)?))
    }

    fn gap(&self, p: Point2<T>, pair: (ChainId, ChainId)) -> Option<T> {
        let (a, b) = self.pair_hits(p, pair)?;
        Some(a.distance() - b.distance())
    }

    /// One step of length `h` that ends on the locus, heading within a
    /// quarter turn of both the local tangent and the previous heading.
    fn step(&self, p: Point2<T>, heading: T, pair: (ChainId, ChainId), h: T) -> Option<(Point2<T>, T)> {
        let (a, b) = self.pair_hits(p, pair)?;
        let (r1, r2) = medial_roots(p, a.clearance.nearest_point, b.clearance.nearest_point)?;
        let tangent = if (r1 - heading).cos() >= (r2 - heading).cos() { r1 } else { r2 };
        let g = |phi: T| self.gap(p + Point2::from_angle(phi) * h, pair);

        let half = T::FRAC_PI_2() - T::lit(1e-3);
        let n = 8usize;
        let nt = T::from_usize(n).unwrap();
        let angles: Vec<T> = (0..=n)
            .map(|k| tangent - half + (half + half) * T::from_usize(k).unwrap() / nt)
            .collect();
        let values: Vec<Option<T>> = angles.iter().map(|&phi| g(phi)).collect();
        let centre = n / 2;
        let mut bracket: Option<(usize, usize)> = None;
        let mut best_offset = usize::MAX;
        for k in 0..n {
            let (Some(va), Some(vb)) = (values[k], values[k + 1]) else { continue };
            if va * vb <= T::zero() {
                let offset = (2 * k + 1).abs_diff(2 * centre);
                if offset < best_offset {
                    best_offset = offset;
                    bracket = Some((k, k + 1));
                }
            }
        }
        let (ka, kb) = bracket?;
        let (mut lo, mut hi) = (angles[ka], angles[kb]);
        let mut glo = values[ka]?;
        if glo == T::zero() {
            hi = lo;
        } else if values[kb]? == T::zero() {
            lo = hi;
        }
        let eps = T::lit(1e-13);
        while hi - lo > eps {
            let mid = T::lit(0.5) * (lo + hi);
            let gm = g(mid)?;
            if gm == T::zero() {
                lo = mid;
                hi = mid;
                break;
            }
            if gm * glo < T::zero() {
                hi = mid;
            } else {
                lo = mid;
                glo = gm;
            }
        }
        let phi = wrap_two_pi(T::lit(0.5) * (lo + hi));
        if wrap_pi(phi - heading).abs() > T::FRAC_PI_2() {
            return None;
        }
        Some((p + Point2::from_angle(phi) * h, phi))
    }

    /// Newton solve for the point equidistant from three chains, near `guess`.
    fn locate_vertex(&self, guess: Point2<T>, chains: [ChainId; 3]) -> Option<Point2<T>> {
        let mut x = guess;
        for _ in 0..60 {
            let h: Vec<ChainHit<T>> = chains
                .iter()
                .map(|&c| self.map.chain_hit(x, c))
                .collect::<Option<_>>()?;
            let f0 = h[0].distance() - h[1].distance();
            let f1 = h[0].distance() - h[2].distance();
            let scale = T::one().max(h[0].distance());
            if f0.abs().max(f1.abs()) < T::lit(1e-11) * scale {
                return Some(x);
            }
            let u: Vec<Point2<T>> = h
                .iter()
                .map(|hit| (x - hit.clearance.nearest_point).normalized())
                .collect::<Option<_>>()?;
            let j0 = u[0] - u[1];
            let j1 = u[0] - u[2];
            let det = j0.cross(j1);
            if det.abs() < T::lit(1e-14) {
                return None;
            }
            let dx = (f0 * j1.y - f1 * j0.y) / det;
            let dy = (j0.x * f1 - j1.x * f0) / det;
            x = x - Point2::new(dx, dy);
            if !x.is_finite() {
                return None;
            }
        }
        None
    }

    fn sample(&self, s: T, p: Point2<T>, pair: (ChainId, ChainId)) -> WidthSample<T> {
        let active = self.pair_hits(p, pair).map(|(a, b)| [a.element, b.element]);
        WidthSample {
            s,
            width: self.map.clearance(p),
            position: p,
            active,
        }
    }

    pub(crate) fn follow(&self, start: Point2<T>, heading: T, pair: (ChainId, ChainId)) -> Trace<T> {
        let cfg = self.cfg;
        let h_full = cfg.step_length();
        let merge = cfg.merge_radius();
        let bounds = self.map.bounds();
        let mut p = start;
        let mut heading = wrap_two_pi(heading);
        let mut s = T::zero();
        let mut samples = vec![self.sample(s, p, pair)];
        let mut events: Vec<TraceEvent<T>> = Vec::new();
        let mut last_active = samples[0].active;
        let mut departed = self.depart_node.is_none();

        let finish = |mut samples: Vec<WidthSample<T>>, mut events: Vec<TraceEvent<T>>, kind: TraceEventKind<T>| {
            let at = *samples.last().unwrap();
            events.push(TraceEvent { kind, at });
            samples.dedup_by(|b, a| a.s == b.s && a.position == b.position);
            let polyline = samples.iter().map(|x| x.position).collect();
            Trace {
                centering: Vec::new(),
                polyline,
                profile: WidthProfile::from_samples_unchecked(samples),
                events,
                pair,
            }
        };

        for _ in 0..cfg.max_steps {
            if let Some(goal) = cfg.goal {
                if p.distance(goal.point) <= goal.radius {
                    return finish(samples, events, TraceEventKind::GoalReached);
                }
            }

            let mut h = h_full;
            let min_h = h_full / T::lit(256.0);
            let next = loop {
                if let Some(r) = self.step(p, heading, pair, h) {
                    break Some(r);
                }
                h = h * T::lit(0.5);
                if h < min_h {
                    break None;
                }
            };
            let Some((q, phi)) = next else {
                return finish(samples, events, TraceEventKind::Terminus(TerminusReason::Stalled));
            };

            let hits = self.map.chain_hits(q);
            let dist_of = |c: ChainId| hits.iter().find(|x| x.chain == c).map(|x| x.distance());
            let (Some(da), Some(db)) = (dist_of(pair.0), dist_of(pair.1)) else {
                return finish(samples, events, TraceEventKind::Terminus(TerminusReason::Stalled));
            };
            let d_pair = da.min(db);

            // a third chain nearer than the pair: a branching point was crossed
            let intruder = hits
                .iter()
                .filter(|x| x.chain != pair.0 && x.chain != pair.1)
                .filter(|x| x.distance() < d_pair - cfg.tie_tol)
                .min_by(|x, y| x.distance().partial_cmp(&y.distance()).unwrap());
            if let Some(c) = intruder {
                let v = self
                    .locate_vertex(p.lerp(q, T::lit(0.5)), [pair.0, pair.1, c.chain])
                    .filter(|v| v.distance(p) <= h_full * T::lit(4.0))
                    .unwrap_or_else(|| self.bisect_crossing(p, q, pair, c.chain));
                if let Some(k) = self.nearby_node(v, merge, departed) {
                    let node = self.known_nodes[k];
                    s = s + p.distance(node);
                    samples.push(self.sample(s, node, pair));
                    return finish(samples, events, TraceEventKind::Revisit { node: Some(k) });
                }
                s = s + p.distance(v);
                samples.push(self.sample(s, v, pair));
                let chains = equidistant_chains(self.map, v, cfg.tie_tol);
                return finish(samples, events, TraceEventKind::Intersection { node: v, chains });
            }

            if let Some(k) = self.nearby_node(q, merge, departed) {
                let node = self.known_nodes[k];
                s = s + p.distance(node);
                samples.push(self.sample(s, node, pair));
                return finish(samples, events, TraceEventKind::Revisit { node: Some(k) });
            }

            if let Some(tau) = bounds.and_then(|b| b.exit_parameter(p, q)) {
                let exit = p.lerp(q, tau);
                s = s + p.distance(exit);
                samples.push(self.sample(s, exit, pair));
                return finish(samples, events, TraceEventKind::Terminus(TerminusReason::Opening));
            }

            s = s + h;
            let sample = self.sample(s, q, pair);
            if let (Some([oa, ob]), Some([na, nb])) = (last_active, sample.active) {
                for (old, new) in [(oa, na), (ob, nb)] {
                    if old != new {
                        events.push(TraceEvent {
                            kind: TraceEventKind::Handoff { old, new },
                            at: sample,
                        });
                    }
                }
            }
            last_active = sample.active;
            samples.push(sample);
            p = q;
            heading = phi;

            if d_pair < cfg.min_width {
                return finish(samples, events, TraceEventKind::Terminus(TerminusReason::DeadEnd));
            }
            if !departed {
                if let Some(k) = self.depart_node {
                    departed = p.distance(self.known_nodes[k]) > merge * T::lit(2.0);
                }
            }
            let horizon = s - merge * T::lit(4.0);
            if samples
                .iter()
                .take_while(|x| x.s < horizon)
                .any(|x| x.position.distance(p) <= merge)
            {
                return finish(samples, events, TraceEventKind::Revisit { node: None });
            }
        }
        finish(samples, events, TraceEventKind::StepLimit)
    }

    fn nearby_node(&self, p: Point2<T>, radius: T, departed: bool) -> Option<usize> {
        self.known_nodes
            .iter()
            .enumerate()
            .filter(|&(k, _)| departed || Some(k) != self.depart_node)
            .map(|(k, n)| (k, n.distance(p)))
            .filter(|&(_, d)| d <= radius)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(k, _)| k)
    }

    /// Fallback vertex estimate: where the intruding chain's distance meets the pair's along the chord.
    fn bisect_crossing(&self, p: Point2<T>, q: Point2<T>, pair: (ChainId, ChainId), intruder: ChainId) -> Point2<T> {
        let f = |x: Point2<T>| -> T {
            let d = |c| self.map.chain_hit(x, c).map_or(T::infinity(), |h| h.distance());
            d(intruder) - d(pair.0).min(d(pair.1))
        };
        let (mut lo, mut hi) = (T::zero(), T::one());
        for _ in 0..60 {
            let mid = T::lit(0.5) * (lo + hi);
            if f(p.lerp(q, mid)) < T::zero() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        p.lerp(q, hi)
    }
}

/// Chains whose distance from `p` is within `tie_tol` of the nearest one.
pub fn equidistant_chains<T: Real>(map: &WaterwayMap<T>, p: Point2<T>, tie_tol: T) -> Vec<ChainId> {
    let hits = map.chain_hits(p);
    let Some(min) = hits.first().map(|h| h.distance()) else {
        return Vec::new();
    };
    hits.iter()
        .take_while(|h| h.distance() - min <= tie_tol)
        .map(|h| h.chain)
        .collect()
}

/// Locate the point equidistant from three chains near `guess` (Newton iteration).
pub fn locate_triple_point<T: Real>(
    map: &WaterwayMap<T>,
    cfg: &TraceConfig<T>,
    guess: Point2<T>,
    chains: [ChainId; 3],
) -> Option<Point2<T>> {
    LocusTracer::new(map, cfg, &[], None).locate_vertex(guess, chains)
}

/// Trace along a known chain pair from a point on its locus with a given
/// initial heading; used when continuing from a branching point.
pub fn trace_from<T: Real>(
    map: &WaterwayMap<T>,
    cfg: &TraceConfig<T>,
    start: Point2<T>,
    heading: T,
    pair: (ChainId, ChainId),
) -> Trace<T> {
    LocusTracer::new(map, cfg, &[], None).follow(start, heading, pair)
}
