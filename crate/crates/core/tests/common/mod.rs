//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use waterway::astar::{Cell, OccupancyGrid};
use waterway::geometry::Feature;
use waterway::{Map, Network, NodeKind, Point};

pub fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Distance from `q` to the segment `[a, b]`, written out from scratch.
pub fn seg_dist(q: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((q.0 - a.0) * dx + (q.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (fx, fy) = (a.0 + t * dx, a.1 + t * dy);
    ((q.0 - fx).powi(2) + (q.1 - fy).powi(2)).sqrt()
}

/// Global clearance by brute force over the raw chain vertices and points.
pub fn brute_clearance(map: &Map, q: Point) -> f64 {
    let q = (q.x, q.y);
    let mut best = f64::INFINITY;
    for c in map.chains() {
        let n = c.vertices.len();
        let segs = if c.closed { n } else { n - 1 };
        for i in 0..segs {
            let a = c.vertices[i];
            let b = c.vertices[(i + 1) % n];
            best = best.min(seg_dist(q, (a.x, a.y), (b.x, b.y)));
        }
    }
    for pt in map.points() {
        best = best.min(((q.0 - pt.location.x).powi(2) + (q.1 - pt.location.y).powi(2)).sqrt());
    }
    best
}

/// Distance from `q` to one chain (or point feature) by id.
pub fn brute_chain_distance(map: &Map, id: u32, q: Point) -> f64 {
    if let Some(c) = map.chains().iter().find(|c| c.id.0 == id) {
        let n = c.vertices.len();
        let segs = if c.closed { n } else { n - 1 };
        return (0..segs)
            .map(|i| {
                let a = c.vertices[i];
                let b = c.vertices[(i + 1) % n];
                seg_dist((q.x, q.y), (a.x, a.y), (b.x, b.y))
            })
            .fold(f64::INFINITY, f64::min);
    }
    if let Some(pt) = map.points().iter().find(|pt| pt.id.0 == id) {
        return pt.location.distance(q);
    }
    f64::INFINITY
}

/// Distance between two segments; zero when they properly cross.
pub fn seg_seg_dist(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> f64 {
    if proper_cross(a, b, c, d) {
        return 0.0;
    }
    seg_dist(a, c, d)
        .min(seg_dist(b, c, d))
        .min(seg_dist(c, a, b))
        .min(seg_dist(d, a, b))
}

fn proper_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Minimum distance from the chord `[a, b]` to every map boundary.
pub fn chord_clearance(map: &Map, a: Point, b: Point) -> f64 {
    let (a, b) = ((a.x, a.y), (b.x, b.y));
    let mut best = f64::INFINITY;
    for e in map.elements() {
        let d = match e.feature {
            Feature::Segment { a: c, b: d } => seg_seg_dist(a, b, (c.x, c.y), (d.x, d.y)),
            Feature::Point(c) => seg_dist((c.x, c.y), a, b),
        };
        best = best.min(d);
    }
    best
}

/// Node kinds and edge multiset of two networks agree, with nodes matched by
/// position within `tol`.
pub fn same_topology(a: &Network, b: &Network, tol: f64) -> Result<(), String> {
    if a.nodes().len() != b.nodes().len() || a.edges().len() != b.edges().len() {
        return Err(format!(
            "sizes differ: {}/{} vs {}/{}",
            a.nodes().len(),
            a.edges().len(),
            b.nodes().len(),
            b.edges().len()
        ));
    }
    let mut map_ab = vec![usize::MAX; a.nodes().len()];
    for n in a.nodes() {
        let m = b
            .nodes()
            .iter()
            .find(|m| m.position.distance(n.position) <= tol && m.kind == n.kind)
            .ok_or_else(|| format!("node {:?} at {:?} has no counterpart", n.kind, n.position))?;
        map_ab[n.id.0] = m.id.0;
    }
    let key = |x: usize, y: usize| if x <= y { (x, y) } else { (y, x) };
    let mut ea: Vec<((usize, usize), f64)> = a
        .edges()
        .iter()
        .map(|e| (key(map_ab[e.endpoints.0 .0], map_ab[e.endpoints.1 .0]), e.length()))
        .collect();
    let mut eb: Vec<((usize, usize), f64)> = b
        .edges()
        .iter()
        .map(|e| (key(e.endpoints.0 .0, e.endpoints.1 .0), e.length()))
        .collect();
    ea.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for (x, y) in ea.iter().zip(&eb) {
        if x.0 != y.0 || (x.1 - y.1).abs() > tol {
            return Err(format!("edge mismatch {x:?} vs {y:?}"));
        }
    }
    Ok(())
}

pub fn count_kind(net: &Network, kind: NodeKind) -> usize {
    net.nodes().iter().filter(|n| n.kind == kind).count()
}

/// Uniform-cost search over the same move rules as the planner: 8-connected,
/// no diagonal step past an occupied orthogonal neighbour.
pub fn dijkstra(grid: &OccupancyGrid<f64>, source: Cell) -> Vec<f64> {
    let (w, h) = (grid.width, grid.height);
    let mut dist = vec![f64::INFINITY; w * h];
    let mut done = vec![false; w * h];
    if grid.is_occupied(source) {
        return dist;
    }
    dist[source.y * w + source.x] = 0.0;
    loop {
        let mut best = None;
        for i in 0..w * h {
            if !done[i] && dist[i].is_finite() && best.is_none_or(|b: usize| dist[i] < dist[b]) {
                best = Some(i);
            }
        }
        let Some(i) = best else { break };
        done[i] = true;
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let free = |cx: i64, cy: i64| !grid.is_occupied(Cell::new(cx as usize, cy as usize));
                if !free(nx, ny) {
                    continue;
                }
                if dx != 0 && dy != 0 && !(free(nx, y) && free(x, ny)) {
                    continue;
                }
                let step = if dx != 0 && dy != 0 { 2f64.sqrt() } else { 1.0 } * grid.cell_size;
                let j = (ny as usize) * w + nx as usize;
                if dist[i] + step < dist[j] {
                    dist[j] = dist[i] + step;
                }
            }
        }
    }
    dist
}
