//! Exact point/segment clearance queries and the analytic distance and
//! azimuth rates of a point moving at constant speed relative to point and
//! line boundary features.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::num::{cmp_real, wrap_two_pi, Real};

/// Planar Cartesian position in meters (east, north).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Unit vector at `angle` radians from the +x axis.
    pub fn from_angle(angle: T) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    /// Direction angle in `[0, 2π)`.
    pub fn angle(self) -> T {
        wrap_two_pi(self.y.atan2(self.x))
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self * (T::one() / n))
        } else {
            None
        }
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates about the origin by `angle` radians.
    pub fn rotated(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl<T: Real> Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<T: Real> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> fmt::Display for Point2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Identifier of a single boundary element within a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

/// Identifier of a boundary chain; isolated point features are singleton chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainId(pub u32);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for ChainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shape of a boundary element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feature<T> {
    Point(Point2<T>),
    Segment { a: Point2<T>, b: Point2<T> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricElement<T> {
    pub id: ElementId,
    pub chain: ChainId,
    pub feature: Feature<T>,
}

impl<T: Real> GeometricElement<T> {
    pub fn point(id: u32, chain: u32, at: Point2<T>) -> Self {
        Self {
            id: ElementId(id),
            chain: ChainId(chain),
            feature: Feature::Point(at),
        }
    }

    pub fn segment(id: u32, chain: u32, a: Point2<T>, b: Point2<T>) -> Self {
        Self {
            id: ElementId(id),
            chain: ChainId(chain),
            feature: Feature::Segment { a, b },
        }
    }

    /// A segment with coincident endpoints is not a valid element.
    pub fn is_well_formed(&self) -> bool {
        match self.feature {
            Feature::Point(p) => p.is_finite(),
            Feature::Segment { a, b } => a.is_finite() && b.is_finite() && a != b,
        }
    }
}

/// Where on an element the nearest point lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contact {
    /// Orthogonal foot strictly inside a segment.
    Interior,
    EndpointA,
    EndpointB,
    /// The element is a point feature.
    Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceResult<T> {
    pub distance: T,
    pub nearest_point: Point2<T>,
    pub contact: Contact,
}

/// Distance and azimuth of a query point as seen from a point feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGeometry<T> {
    pub distance: T,
    /// Azimuth in `[0, 2π)` of the vector from the feature to the query point.
    pub azimuth: T,
}

/// Position, heading and speed of the virtual tracing ship.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualShipState<T> {
    pub position: Point2<T>,
    heading: T,
    pub speed: T,
    pub elapsed: T,
}

impl<T: Real> VirtualShipState<T> {
    pub fn new(position: Point2<T>, heading: T, speed: T) -> Self {
        Self {
            position,
            heading: wrap_two_pi(heading),
            speed,
            elapsed: T::zero(),
        }
    }

    /// Heading in `[0, 2π)`.
    pub fn heading(&self) -> T {
        self.heading
    }

    pub fn set_heading(&mut self, heading: T) {
        self.heading = wrap_two_pi(heading);
    }

    pub fn with_heading(mut self, heading: T) -> Self {
        self.set_heading(heading);
        self
    }

    pub fn velocity(&self) -> Point2<T> {
        Point2::from_angle(self.heading) * self.speed
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("query point coincides with point feature; azimuth undefined")]
    CoincidentPoint,
    #[error("query point lies on the line feature; distance rate sign undefined")]
    OnLine,
}

/// Rate of change of the orthogonal distance to a line, with a flag when the
/// ship lies exactly on the line (rate reported as 0 by convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineRate<T> {
    pub rate: T,
    pub degenerate: bool,
}

/// Nearest point on segment `[a, b]` to `p` and the clamped projection parameter.
pub fn project_onto_segment<T: Real>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> (Point2<T>, T) {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= T::zero() {
        return (a, T::zero());
    }
    let t = (p - a).dot(ab) / len2;
    if t <= T::zero() {
        (a, t)
    } else if t >= T::one() {
        (b, t)
    } else {
        (a + ab * t, t)
    }
}

pub fn distance_to_element<T: Real>(p: Point2<T>, e: &GeometricElement<T>) -> ClearanceResult<T> {
    match e.feature {
        Feature::Point(q) => ClearanceResult {
            distance: p.distance(q),
            nearest_point: q,
            contact: Contact::Point,
        },
        Feature::Segment { a, b } => {
            let (q, t) = project_onto_segment(p, a, b);
            let contact = if t <= T::zero() {
                Contact::EndpointA
            } else if t >= T::one() {
                Contact::EndpointB
            } else {
                Contact::Interior
            };
            ClearanceResult {
                distance: p.distance(q),
                nearest_point: q,
                contact,
            }
        }
    }
}

/// Inclination of the carrier line through `a` and `b`, reduced to `[0, π)`.
pub fn inclination<T: Real>(a: Point2<T>, b: Point2<T>) -> T {
    let d = b - a;
    let mut theta = d.y.atan2(d.x);
    let pi = T::PI();
    while theta < T::zero() {
        theta = theta + pi;
    }
    while theta >= pi {
        theta = theta - pi;
    }
    theta
}

/// Rate of change of the orthogonal distance from the ship to the infinite
/// line through `a` and `b`:
///
/// `sign((x - x')·csc θ)·sin(θ - φ)·v` for `θ ≠ 0`, and
/// `sign(y - y')·sin φ·v` for a horizontal line, with `(x', y')` the
/// orthogonal projection of the ship onto the line.
pub fn distance_rate_line<T: Real>(state: &VirtualShipState<T>, a: Point2<T>, b: Point2<T>) -> LineRate<T> {
    let theta = inclination(a, b);
    let p = state.position;
    let dir = Point2::from_angle(theta);
    let foot = a + dir * (p - a).dot(dir);
    let phi = state.heading();
    let v = state.speed;
    let sin_theta = theta.sin();
    // Below this the csc factor is numerically meaningless; use the horizontal branch.
    let horizontal = sin_theta.abs() < T::lit(1e-12);
    let factor = if horizontal {
        p.y - foot.y
    } else {
        (p.x - foot.x) / sin_theta
    };
    let offset = dir.cross(p - a);
    let scale = T::one().max(p.norm()).max(a.norm());
    if factor == T::zero() || offset.abs() <= T::epsilon() * T::lit(16.0) * scale {
        return LineRate {
            rate: T::zero(),
            degenerate: true,
        };
    }
    let sign = factor.signum();
    let rate = if horizontal {
        sign * phi.sin() * v
    } else {
        sign * (theta - phi).sin() * v
    };
    LineRate {
        rate,
        degenerate: false,
    }
}

pub fn radial_geometry<T: Real>(p: Point2<T>, feature: Point2<T>) -> Result<RadialGeometry<T>, GeometryError> {
    let d = p - feature;
    let distance = d.norm();
    if distance <= T::zero() {
        return Err(GeometryError::CoincidentPoint);
    }
    Ok(RadialGeometry {
        distance,
        azimuth: d.angle(),
    })
}

/// `cos(φ - α)·v`, the recession rate from a point feature.
pub fn distance_rate_point<T: Real>(state: &VirtualShipState<T>, feature: Point2<T>) -> Result<T, GeometryError> {
    let r = radial_geometry(state.position, feature)?;
    Ok((state.heading() - r.azimuth).cos() * state.speed)
}

/// `sin(φ - α)·v / D`, the rate of change of the azimuth seen from a point feature.
pub fn azimuth_rate<T: Real>(state: &VirtualShipState<T>, feature: Point2<T>) -> Result<T, GeometryError> {
    let r = radial_geometry(state.position, feature)?;
    Ok((state.heading() - r.azimuth).sin() * state.speed / r.distance)
}

/// Distance rate against a finite element: the line formula while the
/// orthogonal foot is interior, the point formula at endpoints and point features.
pub fn distance_rate<T: Real>(state: &VirtualShipState<T>, e: &GeometricElement<T>) -> Result<T, GeometryError> {
    let c = distance_to_element(state.position, e);
    match (e.feature, c.contact) {
        (Feature::Segment { a, b }, Contact::Interior) => {
            let r = distance_rate_line(state, a, b);
            if r.degenerate {
                Err(GeometryError::OnLine)
            } else {
                Ok(r.rate)
            }
        }
        _ => distance_rate_point(state, c.nearest_point),
    }
}

/// Elements ordered by distance from a query point.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestSet<T> {
    /// `(element, distance)` ascending by distance, ties by element id.
    pub ordered: Vec<(ElementId, T)>,
    pub tie_tol: T,
}

impl<T: Real> NearestSet<T> {
    pub fn min_distance(&self) -> Option<T> {
        self.ordered.first().map(|&(_, d)| d)
    }

    /// Elements within `tie_tol` of the minimum distance.
    pub fn active(&self) -> &[(ElementId, T)] {
        let Some(min) = self.min_distance() else {
            return &[];
        };
        let n = self
            .ordered
            .iter()
            .take_while(|&&(_, d)| d - min <= self.tie_tol)
            .count();
        &self.ordered[..n]
    }
}

pub fn nearest_elements<T: Real>(p: Point2<T>, elements: &[GeometricElement<T>], tie_tol: T) -> NearestSet<T> {
    let mut ordered: Vec<(ElementId, T)> = elements
        .iter()
        .map(|e| (e.id, distance_to_element(p, e).distance))
        .collect();
    ordered.sort_by(|a, b| cmp_real(&a.1, &b.1).then(a.0.cmp(&b.0)));
    NearestSet { ordered, tie_tol }
}

fn segments_intersect<T: Real>(p1: Point2<T>, p2: Point2<T>, q1: Point2<T>, q2: Point2<T>) -> bool {
    let d1 = (q2 - q1).cross(p1 - q1);
    let d2 = (q2 - q1).cross(p2 - q1);
    let d3 = (p2 - p1).cross(q1 - p1);
    let d4 = (p2 - p1).cross(q2 - p1);
    let z = T::zero();
    ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z))
}

/// Minimum distance between the segment `[p, q]` and an element (0 on crossing).
pub fn segment_distance_to_element<T: Real>(p: Point2<T>, q: Point2<T>, e: &GeometricElement<T>) -> T {
    let seg = GeometricElement {
        id: ElementId(u32::MAX),
        chain: ChainId(u32::MAX),
        feature: Feature::Segment { a: p, b: q },
    };
    match e.feature {
        Feature::Point(c) => {
            if p == q {
                p.distance(c)
            } else {
                distance_to_element(c, &seg).distance
            }
        }
        Feature::Segment { a, b } => {
            if p != q && segments_intersect(p, q, a, b) {
                return T::zero();
            }
            let mut best = distance_to_element(p, e).distance.min(distance_to_element(q, e).distance);
            if p != q {
                best = best
                    .min(distance_to_element(a, &seg).distance)
                    .min(distance_to_element(b, &seg).distance);
            }
            best
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn seg(a: Point2<f64>, b: Point2<f64>) -> GeometricElement<f64> {
        GeometricElement::segment(0, 0, a, b)
    }

    #[test]
    fn perpendicular_foot_is_interior() {
        let r = distance_to_element(p(0.0, 5.0), &seg(p(-10.0, 0.0), p(10.0, 0.0)));
        assert_eq!(r.distance, 5.0);
        assert_eq!(r.contact, Contact::Interior);
        assert_eq!(r.nearest_point, p(0.0, 0.0));
    }

    #[test]
    fn beyond_segment_end_contacts_endpoint_b() {
        let r = distance_to_element(p(15.0, 0.0), &seg(p(-10.0, 0.0), p(10.0, 0.0)));
        assert_eq!(r.distance, 5.0);
        assert_eq!(r.contact, Contact::EndpointB);
        assert_eq!(r.nearest_point, p(10.0, 0.0));
        let r = distance_to_element(p(-13.0, 4.0), &seg(p(-10.0, 0.0), p(10.0, 0.0)));
        assert_eq!(r.contact, Contact::EndpointA);
        assert_eq!(r.distance, 5.0);
    }

    #[test]
    fn point_feature_distance() {
        let r = distance_to_element(p(3.0, 4.0), &GeometricElement::point(0, 0, p(0.0, 0.0)));
        assert_eq!(r.distance, 5.0);
        assert_eq!(r.contact, Contact::Point);
    }

    #[test]
    fn zero_distance_iff_on_element() {
        let e = seg(p(0.0, 0.0), p(4.0, 2.0));
        assert_eq!(distance_to_element(p(2.0, 1.0), &e).distance, 0.0);
        assert!(distance_to_element(p(2.0, 1.1), &e).distance > 0.0);
        assert!(distance_to_element(p(6.0, 3.0), &e).distance > 0.0);
    }

    #[test]
    fn horizontal_line_rate_uses_sine_branch() {
        let s = VirtualShipState::new(p(0.0, 5.0), FRAC_PI_2, 1.0);
        let r = distance_rate_line(&s, p(-10.0, 0.0), p(10.0, 0.0));
        assert!(!r.degenerate);
        assert!((r.rate - 1.0).abs() < 1e-15);
        let s = VirtualShipState::new(p(0.0, 5.0), 0.0, 1.0);
        assert_eq!(distance_rate_line(&s, p(-10.0, 0.0), p(10.0, 0.0)).rate, 0.0);
        // below the line the sign flips
        let s = VirtualShipState::new(p(0.0, -5.0), FRAC_PI_2, 1.0);
        assert!((distance_rate_line(&s, p(-10.0, 0.0), p(10.0, 0.0)).rate + 1.0).abs() < 1e-15);
    }

    #[test]
    fn ship_on_line_is_flagged() {
        let s = VirtualShipState::new(p(3.0, 3.0), 0.3, 1.0);
        let r = distance_rate_line(&s, p(0.0, 0.0), p(1.0, 1.0));
        assert!(r.degenerate);
        assert_eq!(r.rate, 0.0);
        let e = seg(p(0.0, 0.0), p(10.0, 10.0));
        assert_eq!(distance_rate(&s, &e), Err(GeometryError::OnLine));
    }

    #[test]
    fn point_rate_examples() {
        let origin = p(0.0, 0.0);
        let s = VirtualShipState::new(p(10.0, 0.0), 0.0, 1.0);
        assert!((distance_rate_point(&s, origin).unwrap() - 1.0).abs() < 1e-15);
        let s = VirtualShipState::new(p(10.0, 0.0), FRAC_PI_2, 1.0);
        assert!(distance_rate_point(&s, origin).unwrap().abs() < 1e-15);
        let s = VirtualShipState::new(p(0.0, 10.0), PI, 2.0);
        assert!(distance_rate_point(&s, origin).unwrap().abs() < 1e-15);
        let s = VirtualShipState::new(origin, 0.0, 1.0);
        assert_eq!(distance_rate_point(&s, origin), Err(GeometryError::CoincidentPoint));
    }

    #[test]
    fn azimuth_rate_examples() {
        let origin = p(0.0, 0.0);
        let s = VirtualShipState::new(p(10.0, 0.0), FRAC_PI_2, 1.0);
        assert!((azimuth_rate(&s, origin).unwrap() - 0.1).abs() < 1e-15);
        let s = VirtualShipState::new(p(10.0, 0.0), 0.0, 1.0);
        assert!(azimuth_rate(&s, origin).unwrap().abs() < 1e-15);
        let s = VirtualShipState::new(origin, 0.0, 1.0);
        assert!(azimuth_rate(&s, origin).is_err());
    }

    #[test]
    fn dispatch_selects_regime() {
        let e = seg(p(-10.0, 0.0), p(10.0, 0.0));
        let s = VirtualShipState::new(p(0.0, 5.0), FRAC_PI_2, 2.0);
        assert!((distance_rate(&s, &e).unwrap() - 2.0).abs() < 1e-15);
        let s = VirtualShipState::new(p(15.0, 0.0), 0.0, 2.0);
        assert!((distance_rate(&s, &e).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn inclination_reduced_to_half_turn() {
        assert_eq!(inclination(p(0.0, 0.0), p(-1.0, 0.0)), 0.0);
        assert!((inclination(p(0.0, 0.0), p(-1.0, -1.0)) - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn nearest_active_set_parallel_lines() {
        let els = vec![
            GeometricElement::segment(0, 0, p(-100.0, 0.0), p(100.0, 0.0)),
            GeometricElement::segment(1, 1, p(-100.0, 100.0), p(100.0, 100.0)),
        ];
        let n = nearest_elements(p(0.0, 50.0), &els, 1e-6);
        assert_eq!(n.active().len(), 2);
        assert_eq!(n.min_distance(), Some(50.0));
        let n = nearest_elements(p(0.0, 20.0), &els, 1e-6);
        assert_eq!(n.active(), &[(ElementId(0), 20.0)]);
    }

    #[test]
    fn segment_distance_detects_crossing() {
        let e = seg(p(0.0, -1.0), p(0.0, 1.0));
        assert_eq!(segment_distance_to_element(p(-1.0, 0.0), p(1.0, 0.0), &e), 0.0);
        assert!((segment_distance_to_element(p(1.0, 0.0), p(2.0, 0.0), &e) - 1.0).abs() < 1e-15);
        assert!((segment_distance_to_element(p(-1.0, 3.0), p(1.0, 3.0), &e) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn works_for_f32() {
        let e = GeometricElement::segment(0, 0, Point2::new(-10.0f32, 0.0), Point2::new(10.0, 0.0));
        let r = distance_to_element(Point2::new(0.0f32, 5.0), &e);
        assert_eq!(r.distance, 5.0f32);
        let s = VirtualShipState::new(Point2::new(0.0f32, 5.0), std::f32::consts::FRAC_PI_2, 1.0);
        assert!((distance_rate(&s, &e).unwrap() - 1.0).abs() < 1e-6);
    }
}
