//! Point/line feature maps of a waterway.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::geometry::{
    distance_to_element, nearest_elements, ChainId, ClearanceResult, ElementId, Feature, GeometricElement,
    NearestSet, Point2,
};
use crate::num::{cmp_real, Real};

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    pub min: Point2<T>,
    pub max: Point2<T>,
}

impl<T: Real> Bounds<T> {
    pub fn new(min: Point2<T>, max: Point2<T>) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Point2<T>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }

    fn include(&mut self, p: Point2<T>) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    /// Parameter `τ ∈ [0, 1]` at which the segment from an inside point `a`
    /// to `b` leaves the box, or `None` if `b` is inside.
    pub fn exit_parameter(&self, a: Point2<T>, b: Point2<T>) -> Option<T> {
        if self.contains(b) {
            return None;
        }
        let mut tau = T::one();
        let d = b - a;
        let mut clip = |num: T, den: T| {
            if den != T::zero() {
                let t = num / den;
                if t >= T::zero() && t < tau {
                    tau = t;
                }
            }
        };
        if b.x < self.min.x {
            clip(self.min.x - a.x, d.x);
        }
        if b.x > self.max.x {
            clip(self.max.x - a.x, d.x);
        }
        if b.y < self.min.y {
            clip(self.min.y - a.y, d.y);
        }
        if b.y > self.max.y {
            clip(self.max.y - a.y, d.y);
        }
        Some(tau)
    }
}

/// One shore or obstacle contour.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain<T> {
    pub id: ChainId,
    pub closed: bool,
    pub vertices: Vec<Point2<T>>,
}

/// Isolated point feature; forms its own singleton chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFeature<T> {
    pub id: ChainId,
    pub location: Point2<T>,
}

/// Nearest element of one chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainHit<T> {
    pub chain: ChainId,
    pub element: ElementId,
    pub clearance: ClearanceResult<T>,
}

impl<T: Real> ChainHit<T> {
    pub fn distance(&self) -> T {
        self.clearance.distance
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("duplicate chain id {0}")]
    DuplicateChain(ChainId),
    #[error("chain {chain}: zero-length segment at vertex {index}")]
    DegenerateSegment { chain: ChainId, index: usize },
    #[error("chain {chain}: needs at least {needed} vertices, got {got}")]
    TooFewVertices { chain: ChainId, needed: usize, got: usize },
    #[error("non-finite coordinate in chain {0}")]
    NonFinite(ChainId),
    #[error("reference point {0} has non-positive clearance")]
    ReferenceOnBoundary(String),
}

/// Boundary chains plus isolated point features, decomposed into geometric elements.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterwayMap<T> {
    name: Option<String>,
    chains: Vec<Chain<T>>,
    points: Vec<PointFeature<T>>,
    reference: Option<Point2<T>>,
    elements: Vec<GeometricElement<T>>,
    /// Dense chain slot per element, parallel to `elements`.
    slots: Vec<usize>,
    slot_ids: Vec<ChainId>,
    bounds: Option<Bounds<T>>,
}

impl<T: Real> WaterwayMap<T> {
    pub fn builder() -> MapBuilder<T> {
        MapBuilder::default()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn chains(&self) -> &[Chain<T>] {
        &self.chains
    }

    pub fn points(&self) -> &[PointFeature<T>] {
        &self.points
    }

    pub fn reference(&self) -> Option<Point2<T>> {
        self.reference
    }

    pub fn elements(&self) -> &[GeometricElement<T>] {
        &self.elements
    }

    pub fn element(&self, id: ElementId) -> Option<&GeometricElement<T>> {
        self.elements.get(id.0 as usize)
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e.feature, Feature::Segment { .. }))
            .count()
    }

    pub fn chain_count(&self) -> usize {
        self.slot_ids.len()
    }

    /// Bounding box of all elements.
    pub fn bounds(&self) -> Option<Bounds<T>> {
        self.bounds
    }

    /// Global minimum distance to every element (`+∞` on an empty map).
    pub fn clearance(&self, p: Point2<T>) -> T {
        self.elements
            .iter()
            .map(|e| distance_to_element(p, e).distance)
            .fold(T::infinity(), T::min)
    }

    pub fn nearest_elements(&self, p: Point2<T>, tie_tol: T) -> NearestSet<T> {
        nearest_elements(p, &self.elements, tie_tol)
    }

    /// Nearest element of every chain, ascending by distance (ties by chain id).
    pub fn chain_hits(&self, p: Point2<T>) -> Vec<ChainHit<T>> {
        let mut best: Vec<Option<ChainHit<T>>> = vec![None; self.slot_ids.len()];
        for (e, &slot) in self.elements.iter().zip(&self.slots) {
            let c = distance_to_element(p, e);
            let better = match &best[slot] {
                Some(h) => c.distance < h.clearance.distance,
                None => true,
            };
            if better {
                best[slot] = Some(ChainHit {
                    chain: e.chain,
                    element: e.id,
                    clearance: c,
                });
            }
        }
        let mut hits: Vec<ChainHit<T>> = best.into_iter().flatten().collect();
        hits.sort_by(|a, b| cmp_real(&a.distance(), &b.distance()).then(a.chain.cmp(&b.chain)));
        hits
    }

    /// Nearest element of a single chain.
    pub fn chain_hit(&self, p: Point2<T>, chain: ChainId) -> Option<ChainHit<T>> {
        let mut best: Option<ChainHit<T>> = None;
        for e in self.elements.iter().filter(|e| e.chain == chain) {
            let c = distance_to_element(p, e);
            if best.is_none_or(|b| c.distance < b.clearance.distance) {
                best = Some(ChainHit {
                    chain,
                    element: e.id,
                    clearance: c,
                });
            }
        }
        best
    }
}

/// Incremental constructor; `build` validates the result.
#[derive(Debug, Clone, Default)]
pub struct MapBuilder<T> {
    name: Option<String>,
    chains: Vec<Chain<T>>,
    points: Vec<PointFeature<T>>,
    reference: Option<Point2<T>>,
}

impl<T: Real> MapBuilder<T> {
    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn chain(mut self, id: u32, closed: bool, vertices: Vec<Point2<T>>) -> Self {
        self.chains.push(Chain {
            id: ChainId(id),
            closed,
            vertices,
        });
        self
    }

    pub fn point(mut self, id: u32, location: Point2<T>) -> Self {
        self.points.push(PointFeature {
            id: ChainId(id),
            location,
        });
        self
    }

    pub fn reference(mut self, p: Point2<T>) -> Self {
        self.reference = Some(p);
        self
    }

    pub fn build(self) -> Result<WaterwayMap<T>, MapError> {
        let mut seen = BTreeSet::new();
        for id in self.chains.iter().map(|c| c.id).chain(self.points.iter().map(|p| p.id)) {
            if !seen.insert(id) {
                return Err(MapError::DuplicateChain(id));
            }
        }
        let mut chains = self.chains;
        let mut points = self.points;
        chains.sort_by_key(|c| c.id);
        points.sort_by_key(|p| p.id);

        let mut elements = Vec::new();
        let mut slots = Vec::new();
        let mut slot_ids = Vec::new();
        let mut bounds: Option<Bounds<T>> = None;
        let mut grow = |p: Point2<T>| match bounds.as_mut() {
            Some(b) => b.include(p),
            None => bounds = Some(Bounds::new(p, p)),
        };

        for c in &chains {
            let needed = if c.closed { 3 } else { 2 };
            if c.vertices.len() < needed {
                return Err(MapError::TooFewVertices {
                    chain: c.id,
                    needed,
                    got: c.vertices.len(),
                });
            }
            if c.vertices.iter().any(|v| !v.is_finite()) {
                return Err(MapError::NonFinite(c.id));
            }
            let slot = slot_ids.len();
            slot_ids.push(c.id);
            let n = c.vertices.len();
            let seg_count = if c.closed { n } else { n - 1 };
            for i in 0..seg_count {
                let a = c.vertices[i];
                let b = c.vertices[(i + 1) % n];
                if a == b {
                    return Err(MapError::DegenerateSegment { chain: c.id, index: i + 1 });
                }
                elements.push(GeometricElement::segment(elements.len() as u32, c.id.0, a, b));
                slots.push(slot);
            }
            for &v in &c.vertices {
                grow(v);
            }
        }
        for p in &points {
            if !p.location.is_finite() {
                return Err(MapError::NonFinite(p.id));
            }
            slots.push(slot_ids.len());
            slot_ids.push(p.id);
            elements.push(GeometricElement::point(elements.len() as u32, p.id.0, p.location));
            grow(p.location);
        }

        let map = WaterwayMap {
            name: self.name,
            chains,
            points,
            reference: self.reference,
            elements,
            slots,
            slot_ids,
            bounds,
        };
        if let Some(r) = map.reference {
            if !r.is_finite() || map.clearance(r) <= T::zero() {
                return Err(MapError::ReferenceOnBoundary(format!("{r}")));
            }
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn corridor() -> WaterwayMap<f64> {
        WaterwayMap::builder()
            .chain(1, false, vec![p(0.0, 0.0), p(500.0, 0.0)])
            .chain(2, false, vec![p(0.0, 100.0), p(250.0, 100.0), p(500.0, 100.0)])
            .reference(p(250.0, 30.0))
            .build()
            .unwrap()
    }

    #[test]
    fn decomposes_chains_into_segments() {
        let m = corridor();
        assert_eq!(m.segment_count(), 3);
        assert_eq!(m.chain_count(), 2);
        let b = m.bounds().unwrap();
        assert_eq!(b.min, p(0.0, 0.0));
        assert_eq!(b.max, p(500.0, 100.0));
    }

    #[test]
    fn chain_hits_group_by_chain() {
        let m = corridor();
        let hits = m.chain_hits(p(300.0, 30.0));
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].chain, ChainId(1));
        assert_eq!(hits[0].distance(), 30.0);
        assert_eq!(hits[1].chain, ChainId(2));
        assert_eq!(hits[1].distance(), 70.0);
        assert_eq!(m.clearance(p(300.0, 30.0)), 30.0);
    }

    #[test]
    fn closed_chain_wraps() {
        let m: WaterwayMap<f64> = WaterwayMap::builder()
            .chain(3, true, vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)])
            .build()
            .unwrap();
        assert_eq!(m.segment_count(), 3);
    }

    #[test]
    fn rejects_invalid_maps() {
        let dup = WaterwayMap::<f64>::builder()
            .chain(1, false, vec![p(0.0, 0.0), p(1.0, 0.0)])
            .point(1, p(5.0, 5.0))
            .build();
        assert_eq!(dup, Err(MapError::DuplicateChain(ChainId(1))));
        let degenerate = WaterwayMap::<f64>::builder()
            .chain(1, false, vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0)])
            .build();
        assert!(matches!(degenerate, Err(MapError::DegenerateSegment { index: 2, .. })));
        let on_shore = WaterwayMap::<f64>::builder()
            .chain(1, false, vec![p(0.0, 0.0), p(1.0, 0.0)])
            .reference(p(0.5, 0.0))
            .build();
        assert!(matches!(on_shore, Err(MapError::ReferenceOnBoundary(_))));
    }

    #[test]
    fn exit_parameter_clips_to_box() {
        let b = Bounds::new(p(0.0, 0.0), p(10.0, 10.0));
        assert_eq!(b.exit_parameter(p(9.0, 5.0), p(11.0, 5.0)), Some(0.5));
        assert_eq!(b.exit_parameter(p(9.0, 5.0), p(10.0, 5.0)), None);
    }
}
