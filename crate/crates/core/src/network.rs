//! Route network built by tracing every branch of the waterway, and
//! enumeration of candidate routes across it.

use std::collections::VecDeque;
use std::fmt::Write as _;

use log::warn;
use thiserror::Error;

use crate::geometry::{project_onto_segment, segment_distance_to_element, ChainId, Point2, VirtualShipState};
use crate::map::WaterwayMap;
use crate::num::{cmp_real, wrap_pi, wrap_two_pi, Real};
use crate::profile::WidthProfile;
use crate::tracer::{center, medial_roots, LocusTracer, TerminusReason, Trace, TraceConfig, TraceError, TraceEventKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Intersection,
    Terminus,
    Endpoint,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Intersection => "intersection",
            NodeKind::Terminus => "terminus",
            NodeKind::Endpoint => "endpoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkNode<T> {
    pub id: NodeId,
    pub position: Point2<T>,
    pub kind: NodeKind,
    /// Distance to the nearest boundary at the node.
    pub clearance: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkEdge<T> {
    pub id: EdgeId,
    pub endpoints: (NodeId, NodeId),
    pub polyline: Vec<Point2<T>>,
    pub profile: WidthProfile<T>,
    /// Set when the trace hit the step limit before reaching a node.
    pub truncated: bool,
}

impl<T: Real> NetworkEdge<T> {
    pub fn length(&self) -> T {
        self.profile.total_length()
    }

    pub fn min_width(&self) -> T {
        self.profile.min_width().unwrap_or(T::zero())
    }

    /// Mean of the reversal-exact width samples at unit spacing.
    pub fn mean_width(&self) -> T {
        mean(&self.profile.symmetric_widths(T::one()).unwrap_or_default())
    }

    pub fn other_end(&self, n: NodeId) -> NodeId {
        if self.endpoints.0 == n {
            self.endpoints.1
        } else {
            self.endpoints.0
        }
    }
}

pub(crate) fn mean<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(cmp_real);
    let sum = sorted.iter().fold(T::zero(), |a, &b| a + b);
    sum / T::from_usize(xs.len()).unwrap()
}

/// Outgoing waterway at an intersection: the locus between two chains that
/// are adjacent around the node.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Port<T> {
    pair: (ChainId, ChainId),
    heading: T,
    consumed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteNetwork<T> {
    nodes: Vec<NetworkNode<T>>,
    edges: Vec<NetworkEdge<T>>,
    ports: Vec<Vec<Port<T>>>,
    merge_radius: T,
}

/// An unexplored branch waiting in the exploration frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendingBranch<T> {
    pub node: NodeId,
    pub position: Point2<T>,
    pub heading: T,
    pub pair: (ChainId, ChainId),
    port: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("point has no positive clearance")]
    NotNavigable,
    #[error("network has no edges to attach to")]
    EmptyNetwork,
    #[error("unknown node {0}")]
    UnknownNode(usize),
    /// No explored edge can be reached from the point without crossing a boundary.
    #[error("point is not connected to the explored network")]
    Unreachable,
    #[error(transparent)]
    Trace(#[from] TraceError),
}

impl<T: Real> RouteNetwork<T> {
    pub fn new(merge_radius: T) -> Self {
        Self {
            nodes: Vec::new(),
            edges: Vec::new(),
            ports: Vec::new(),
            merge_radius,
        }
    }

    pub fn nodes(&self) -> &[NetworkNode<T>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[NetworkEdge<T>] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> Option<&NetworkNode<T>> {
        self.nodes.get(id.0)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&NetworkEdge<T>> {
        self.edges.get(id.0)
    }

    pub fn merge_radius(&self) -> T {
        self.merge_radius
    }

    /// Incident edges of `n` as `(edge, neighbour)`, in edge id order.
    pub fn neighbors(&self, n: NodeId) -> Vec<(EdgeId, NodeId)> {
        self.edges
            .iter()
            .filter(|e| e.endpoints.0 == n || e.endpoints.1 == n)
            .map(|e| (e.id, e.other_end(n)))
            .collect()
    }

    /// Number of edge ends at `n`; a loop counts twice.
    pub fn degree(&self, n: NodeId) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.endpoints.0 == n) + usize::from(e.endpoints.1 == n))
            .sum()
    }

    pub fn intersection_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Intersection).count()
    }

    fn add_node(&mut self, map: &WaterwayMap<T>, position: Point2<T>, kind: NodeKind) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(NetworkNode {
            id,
            position,
            kind,
            clearance: map.clearance(position),
        });
        self.ports.push(Vec::new());
        id
    }

    fn add_edge(&mut self, a: NodeId, b: NodeId, trace: Trace<T>, truncated: bool) -> EdgeId {
        let id = EdgeId(self.edges.len());
        self.edges.push(NetworkEdge {
            id,
            endpoints: (a, b),
            polyline: trace.polyline,
            profile: trace.profile,
            truncated,
        });
        id
    }

    fn positions(&self) -> Vec<Point2<T>> {
        self.nodes.iter().map(|n| n.position).collect()
    }

    /// Creates the ports of a new intersection: one per pair of chains that
    /// are neighbours in angular order around the node.
    fn open_ports(&mut self, map: &WaterwayMap<T>, node: NodeId, chains: &[ChainId]) {
        let v = self.nodes[node.0].position;
        let mut contacts: Vec<(T, ChainId)> = chains
            .iter()
            .filter_map(|&c| {
                let hit = map.chain_hit(v, c)?;
                Some(((hit.clearance.nearest_point - v).angle(), c))
            })
            .collect();
        contacts.sort_by(|a, b| cmp_real(&a.0, &b.0).then(a.1.cmp(&b.1)));
        let k = contacts.len();
        if k < 2 {
            return;
        }
        for i in 0..k {
            let (a0, c0) = contacts[i];
            let (a1, c1) = contacts[(i + 1) % k];
            if c0 == c1 {
                continue;
            }
            let mut gap = wrap_two_pi(a1 - a0);
            if gap == T::zero() {
                gap = T::two_pi();
            }
            self.ports[node.0].push(Port {
                pair: ordered(c0, c1),
                heading: wrap_two_pi(a0 + gap * T::lit(0.5)),
                consumed: false,
            });
        }
    }

    /// Marks the port through which a trace entered `node` as consumed.
    fn consume_arrival(&mut self, node: NodeId, pair: (ChainId, ChainId), arrival_heading: T) {
        let back = wrap_two_pi(arrival_heading + T::PI());
        let pair = ordered(pair.0, pair.1);
        let best = self.ports[node.0]
            .iter()
            .enumerate()
            .filter(|(_, p)| p.pair == pair && !p.consumed)
            .map(|(i, p)| (i, wrap_pi(p.heading - back).abs()))
            .min_by(|a, b| cmp_real(&a.1, &b.1))
            .map(|(i, _)| i);
        if let Some(i) = best {
            self.ports[node.0][i].consumed = true;
        }
    }

    fn pending_of(&self, node: NodeId) -> Vec<PendingBranch<T>> {
        self.ports[node.0]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.consumed)
            .map(|(i, p)| PendingBranch {
                node,
                position: self.nodes[node.0].position,
                heading: p.heading,
                pair: p.pair,
                port: i,
            })
            .collect()
    }

    /// Registers the node a trace ended at and returns its id together with
    /// any newly opened branches.
    fn settle(&mut self, map: &WaterwayMap<T>, trace: &Trace<T>) -> (NodeId, Vec<PendingBranch<T>>, bool) {
        let end = *trace.polyline.last().unwrap();
        let arrival = arrival_heading(&trace.polyline);
        match &trace.terminal().kind {
            TraceEventKind::Revisit { node: Some(k) } => {
                let id = NodeId(*k);
                self.consume_arrival(id, trace.pair, arrival);
                (id, Vec::new(), false)
            }
            TraceEventKind::Intersection { node, chains } => {
                let id = self.add_node(map, *node, NodeKind::Intersection);
                self.open_ports(map, id, chains);
                self.consume_arrival(id, trace.pair, arrival);
                let pending = self.pending_of(id);
                (id, pending, false)
            }
            TraceEventKind::StepLimit => {
                warn!("branch hit the step limit at ({}, {}); edge truncated", end.x, end.y);
                (self.add_node(map, end, NodeKind::Terminus), Vec::new(), true)
            }
            TraceEventKind::Terminus(reason) => {
                if *reason == TerminusReason::Stalled {
                    warn!("branch stalled at ({}, {})", end.x, end.y);
                }
                (self.add_node(map, end, NodeKind::Terminus), Vec::new(), false)
            }
            _ => (self.add_node(map, end, NodeKind::Terminus), Vec::new(), false),
        }
    }

    /// Anchors `p` on the network: returns an existing node within the merge
    /// radius, or centers `p` onto the nearest edge and splits that edge with
    /// a new endpoint node.
    pub fn attach_endpoint(
        &mut self,
        map: &WaterwayMap<T>,
        p: Point2<T>,
        cfg: &TraceConfig<T>,
    ) -> Result<NodeId, NetworkError> {
        if !(map.clearance(p) > T::zero()) {
            return Err(NetworkError::NotNavigable);
        }
        if let Some(n) = self.nearest_node_within(p, self.merge_radius) {
            return Ok(n);
        }
        if self.edges.is_empty() {
            return Err(NetworkError::EmptyNetwork);
        }
        let centered = center(map, VirtualShipState::new(p, T::zero(), cfg.speed), cfg)?.state.position;
        if let Some(n) = self.nearest_node_within(centered, self.merge_radius) {
            return Ok(n);
        }

        // nearest point over every edge polyline that can be reached in a straight line
        let mut candidates: Vec<(T, usize, T, Point2<T>)> = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            let samples = e.profile.samples();
            for pair in samples.windows(2) {
                let (foot, t) = project_onto_segment(centered, pair[0].position, pair[1].position);
                let d = foot.distance(centered);
                let s = pair[0].s + (pair[1].s - pair[0].s) * t;
                candidates.push((d, ei, s, foot));
            }
        }
        if candidates.is_empty() {
            return Err(NetworkError::EmptyNetwork);
        }
        candidates.sort_by(|a, b| cmp_real(&a.0, &b.0).then(a.1.cmp(&b.1)));
        let visible = |q: Point2<T>| {
            map.elements()
                .iter()
                .all(|e| segment_distance_to_element(centered, q, e) > T::zero())
        };
        let (_, ei, s, foot) = *candidates
            .iter()
            .find(|c| visible(c.3))
            .ok_or(NetworkError::Unreachable)?;
        let edge = self.edges[ei].clone();
        if s <= self.merge_radius {
            return Ok(edge.endpoints.0);
        }
        if edge.length() - s <= self.merge_radius {
            return Ok(edge.endpoints.1);
        }
        let (head, tail) = edge.profile.split_at(s).ok_or(NetworkError::EmptyNetwork)?;
        let node = self.add_node(map, foot, NodeKind::Endpoint);
        let mut head = head;
        let mut tail = tail;
        pin_end(&mut head, foot, true);
        pin_end(&mut tail, foot, false);
        self.edges[ei] = NetworkEdge {
            id: edge.id,
            endpoints: (edge.endpoints.0, node),
            polyline: head.positions(),
            profile: head,
            truncated: false,
        };
        let id = EdgeId(self.edges.len());
        self.edges.push(NetworkEdge {
            id,
            endpoints: (node, edge.endpoints.1),
            polyline: tail.positions(),
            profile: tail,
            truncated: edge.truncated,
        });
        Ok(node)
    }

    fn nearest_node_within(&self, p: Point2<T>, radius: T) -> Option<NodeId> {
        self.nodes
            .iter()
            .map(|n| (n.id, n.position.distance(p)))
            .filter(|&(_, d)| d <= radius)
            .min_by(|a, b| cmp_real(&a.1, &b.1).then(a.0.cmp(&b.0)))
            .map(|(id, _)| id)
    }

    /// Graphviz rendering with node and edge attributes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph route_network {\n");
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "  n{} [x={:.3}, y={:.3}, kind={}, clearance={:.3}];",
                n.id.0,
                n.position.x,
                n.position.y,
                n.kind.as_str(),
                n.clearance
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  n{} -- n{} [id={}, length_m={:.3}, min_width_m={:.3}, mean_width_m={:.3}];",
                e.endpoints.0 .0,
                e.endpoints.1 .0,
                e.id.0,
                e.length(),
                e.min_width(),
                e.mean_width()
            );
        }
        out.push_str("}\n");
        out
    }
}

fn pin_end<T: Real>(profile: &mut WidthProfile<T>, at: Point2<T>, last: bool) {
    let mut samples = profile.samples().to_vec();
    let target = if last { samples.last_mut() } else { samples.first_mut() };
    if let Some(s) = target {
        s.position = at;
    }
    *profile = WidthProfile::from_samples_unchecked(samples);
}

fn ordered(a: ChainId, b: ChainId) -> (ChainId, ChainId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn arrival_heading<T: Real>(polyline: &[Point2<T>]) -> T {
    match polyline {
        [.., a, b] => (*b - *a).angle(),
        _ => T::zero(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreConfig<T> {
    pub trace: TraceConfig<T>,
}

impl<T: Real> Default for ExploreConfig<T> {
    fn default() -> Self {
        Self {
            trace: TraceConfig::default(),
        }
    }
}

impl<T: Real> ExploreConfig<T> {
    pub fn merge_radius(&self) -> T {
        self.trace.merge_radius()
    }
}

/// Breadth-first exploration from `origin`.
pub fn explore<T: Real>(
    map: &WaterwayMap<T>,
    origin: Point2<T>,
    cfg: &ExploreConfig<T>,
) -> Result<RouteNetwork<T>, NetworkError> {
    explore_with(map, origin, cfg, |_| 0)
}

/// Exploration where `scheduler` picks which pending branch to trace next
/// (index into the frontier slice).
pub fn explore_with<T: Real, F>(
    map: &WaterwayMap<T>,
    origin: Point2<T>,
    cfg: &ExploreConfig<T>,
    mut scheduler: F,
) -> Result<RouteNetwork<T>, NetworkError>
where
    F: FnMut(&[PendingBranch<T>]) -> usize,
{
    let mut tcfg = cfg.trace.clone();
    tcfg.goal = None;
    tcfg.validate()?;
    if !(map.clearance(origin) > T::zero()) {
        return Err(NetworkError::NotNavigable);
    }
    let mut net = RouteNetwork::new(tcfg.merge_radius());
    let c = center(map, VirtualShipState::new(origin, T::zero(), tcfg.speed), &tcfg)?;
    let p0 = c.state.position;
    let hits = map.chain_hits(p0);
    if hits.len() < 2 {
        return Err(TraceError::NoPair.into());
    }
    let pair = (hits[0].chain, hits[1].chain);
    let (r1, r2) = medial_roots(p0, hits[0].clearance.nearest_point, hits[1].clearance.nearest_point)
        .ok_or(TraceError::Degenerate)?;

    let mut frontier: VecDeque<PendingBranch<T>> = VecDeque::new();

    let known = net.positions();
    let first = LocusTracer::new(map, &tcfg, &known, None).follow(p0, r1, pair);
    let (end1, pend1, trunc1) = net.settle(map, &first);
    frontier.extend(pend1);

    let known = net.positions();
    let second = LocusTracer::new(map, &tcfg, &known, None).follow(p0, r2, pair);
    let (end2, pend2, trunc2) = net.settle(map, &second);
    frontier.extend(pend2);

    let joined = Trace {
        centering: Vec::new(),
        polyline: second
            .polyline
            .iter()
            .rev()
            .chain(first.polyline.iter().skip(1))
            .copied()
            .collect(),
        profile: second.profile.reversed().concat(&first.profile),
        events: Vec::new(),
        pair,
    };
    net.add_edge(end2, end1, joined, trunc1 || trunc2);

    while !frontier.is_empty() {
        let slice: Vec<PendingBranch<T>> = frontier.iter().copied().collect();
        let pick = scheduler(&slice).min(slice.len() - 1);
        let branch = frontier.remove(pick).unwrap();
        let port = &mut net.ports[branch.node.0][branch.port];
        if port.consumed {
            continue;
        }
        port.consumed = true;
        let known = net.positions();
        let trace = LocusTracer::new(map, &tcfg, &known, Some(branch.node.0)).follow(
            branch.position,
            branch.heading,
            branch.pair,
        );
        let (end, pending, truncated) = net.settle(map, &trace);
        frontier.extend(pending);
        net.add_edge(branch.node, end, trace, truncated);
    }
    Ok(net)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route<T> {
    pub id: usize,
    pub nodes: Vec<NodeId>,
    /// Edges in travel order; `true` when traversed from its first to its second endpoint.
    pub edges: Vec<(EdgeId, bool)>,
    pub profile: WidthProfile<T>,
}

impl<T: Real> Route<T> {
    pub fn length(&self) -> T {
        self.profile.total_length()
    }

    pub fn node_sequence(&self) -> String {
        self.nodes.iter().map(|n| n.0.to_string()).collect::<Vec<_>>().join("-")
    }

    pub fn polyline(&self) -> Vec<Point2<T>> {
        self.profile.positions()
    }
}

pub const DEFAULT_ROUTE_LIMIT: usize = 256;

/// Node sequence and oriented edges of one simple path.
type FoundPath = (Vec<NodeId>, Vec<(EdgeId, bool)>);

/// All simple paths from `start` to `goal`, up to `limit`. Route ids are
/// assigned by sorted edge set so that the same route gets the same id in
/// either travel direction.
pub fn enumerate_routes<T: Real>(
    net: &RouteNetwork<T>,
    start: NodeId,
    goal: NodeId,
    limit: usize,
) -> Result<Vec<Route<T>>, NetworkError> {
    for n in [start, goal] {
        if net.node(n).is_none() {
            return Err(NetworkError::UnknownNode(n.0));
        }
    }
    let mut found: Vec<FoundPath> = Vec::new();
    let mut visited = vec![false; net.nodes().len()];
    let mut nodes = vec![start];
    let mut edges = Vec::new();
    visited[start.0] = true;
    let mut capped = false;
    dfs(net, goal, limit, &mut visited, &mut nodes, &mut edges, &mut found, &mut capped);
    if capped {
        warn!("route enumeration capped at {limit} routes");
    }

    let mut routes: Vec<Route<T>> = found
        .into_iter()
        .map(|(nodes, edges)| {
            let mut profile = WidthProfile::from_samples_unchecked(Vec::new());
            for &(e, fwd) in &edges {
                let ep = &net.edges[e.0].profile;
                let part = if fwd { ep.rebased(T::zero()) } else { ep.reversed() };
                profile = profile.concat(&part);
            }
            Route {
                id: 0,
                nodes,
                edges,
                profile,
            }
        })
        .collect();
    routes.sort_by_cached_key(|r| {
        let mut ids: Vec<usize> = r.edges.iter().map(|e| e.0 .0).collect();
        ids.sort_unstable();
        ids
    });
    for (i, r) in routes.iter_mut().enumerate() {
        r.id = i + 1;
    }
    Ok(routes)
}

#[allow(clippy::too_many_arguments)]
fn dfs<T: Real>(
    net: &RouteNetwork<T>,
    goal: NodeId,
    limit: usize,
    visited: &mut [bool],
    nodes: &mut Vec<NodeId>,
    edges: &mut Vec<(EdgeId, bool)>,
    found: &mut Vec<FoundPath>,
    capped: &mut bool,
) {
    let here = *nodes.last().unwrap();
    if here == goal {
        found.push((nodes.clone(), edges.clone()));
        return;
    }
    for (e, next) in net.neighbors(here) {
        if found.len() >= limit {
            *capped = true;
            return;
        }
        if visited[next.0] {
            continue;
        }
        let fwd = net.edges[e.0].endpoints.0 == here;
        visited[next.0] = true;
        nodes.push(next);
        edges.push((e, fwd));
        dfs(net, goal, limit, visited, nodes, edges, found, capped);
        edges.pop();
        nodes.pop();
        visited[next.0] = false;
    }
}
