//! Experiment bundles and the builtin synthetic corpus.

use crate::dwa::{DwaConfig, KinematicLimits};
use crate::geometry::Point2;
use crate::map::WaterwayMap;
use crate::num::Real;
use crate::safety::SafetyConfig;
use crate::tracer::TraceConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub name: String,
    pub map: WaterwayMap<T>,
    pub start: Point2<T>,
    pub goal: Point2<T>,
    pub safety: SafetyConfig<T>,
    pub trace: TraceConfig<T>,
    pub limits: KinematicLimits<T>,
    pub dwa: DwaConfig<T>,
    /// Occupancy grid resolution for the grid baseline, meters.
    pub cell_size: T,
}

impl<T: Real> Scenario<T> {
    pub fn new(name: impl Into<String>, map: WaterwayMap<T>, start: Point2<T>, goal: Point2<T>) -> Self {
        Self {
            name: name.into(),
            map,
            start,
            goal,
            safety: SafetyConfig::default(),
            trace: TraceConfig::default(),
            limits: KinematicLimits::default(),
            dwa: DwaConfig::default(),
            cell_size: T::lit(5.0),
        }
    }

    /// Same scenario travelled in the opposite direction.
    pub fn swapped(&self) -> Self {
        Self {
            start: self.goal,
            goal: self.start,
            ..self.clone()
        }
    }

    /// Exploration origin: the map reference, or the start when none is declared.
    pub fn origin(&self) -> Point2<T> {
        self.map.reference().unwrap_or(self.start)
    }
}

fn p<T: Real>(x: f64, y: f64) -> Point2<T> {
    Point2::new(T::lit(x), T::lit(y))
}

fn pts<T: Real>(xy: &[(f64, f64)]) -> Vec<Point2<T>> {
    xy.iter().map(|&(x, y)| p(x, y)).collect()
}

/// Straight channel 100 m wide and 500 m long.
pub fn corridor<T: Real>() -> Scenario<T> {
    let map = WaterwayMap::builder()
        .name("corridor")
        .chain(1, false, pts(&[(0.0, 0.0), (500.0, 0.0)]))
        .chain(2, false, pts(&[(0.0, 100.0), (500.0, 100.0)]))
        .reference(p(250.0, 30.0))
        .build()
        .expect("corridor map");
    Scenario::new("corridor", map, p(20.0, 30.0), p(480.0, 70.0))
}

/// Two shores meeting at the origin with a 60 degree opening.
pub fn wedge<T: Real>() -> Scenario<T> {
    let s60 = 3f64.sqrt() / 2.0;
    let map = WaterwayMap::builder()
        .name("wedge")
        .chain(1, false, pts(&[(0.0, 0.0), (600.0, 0.0)]))
        .chain(2, false, pts(&[(0.0, 0.0), (600.0 * 0.5, 600.0 * s60)]))
        .reference(p(200.0, 60.0))
        .build()
        .expect("wedge map");
    let goal = (500.0, 500.0 * (std::f64::consts::PI / 6.0).tan());
    Scenario::new("wedge", map, p(100.0, 30.0), p(goal.0, goal.1))
}

/// A shoreline and an isolated point feature 100 m off it.
pub fn parabola<T: Real>() -> Scenario<T> {
    let map = WaterwayMap::builder()
        .name("parabola")
        .chain(1, false, pts(&[(-300.0, 0.0), (300.0, 0.0)]))
        .point(2, p(0.0, 100.0))
        .reference(p(0.0, 30.0))
        .build()
        .expect("parabola map");
    Scenario::new("parabola", map, p(-80.0, 20.0), p(80.0, 20.0))
}

/// Three channels meeting at one branching point.
pub fn tjunction<T: Real>() -> Scenario<T> {
    let map = WaterwayMap::builder()
        .name("tjunction")
        .chain(1, false, pts(&[(-400.0, 0.0), (400.0, 0.0)]))
        .chain(2, false, pts(&[(-400.0, 100.0), (-50.0, 100.0), (-50.0, 400.0)]))
        .chain(3, false, pts(&[(400.0, 100.0), (50.0, 100.0), (50.0, 400.0)]))
        .reference(p(-300.0, 30.0))
        .build()
        .expect("tjunction map");
    Scenario::new("tjunction", map, p(-300.0, 30.0), p(0.0, 350.0))
}

/// An island splitting the waterway: a uniform 160 m channel above and a
/// channel below that is 400 m wide for half its length and 60 m for the rest.
pub fn ring<T: Real>() -> Scenario<T> {
    let map = WaterwayMap::builder()
        .name("ring")
        .chain(1, false, pts(&[(-800.0, 360.0), (1800.0, 360.0)]))
        .chain(
            2,
            false,
            pts(&[
                (-800.0, -400.0),
                (500.0, -400.0),
                (500.0, -60.0),
                (1000.0, -60.0),
                (1000.0, -400.0),
                (1800.0, -400.0),
            ]),
        )
        .chain(3, true, pts(&[(0.0, 0.0), (1000.0, 0.0), (1000.0, 200.0), (0.0, 200.0)]))
        .reference(p(-600.0, -20.0))
        .build()
        .expect("ring map");
    Scenario::new("ring", map, p(-700.0, 0.0), p(1700.0, 0.0))
}

/// An island with a 30 m by 100 m passage on one side and a 200 m wide detour on the other.
pub fn shortcut<T: Real>() -> Scenario<T> {
    let map = WaterwayMap::builder()
        .name("shortcut")
        .chain(1, false, pts(&[(-600.0, 415.0), (700.0, 415.0)]))
        .chain(
            2,
            false,
            pts(&[
                (-600.0, -100.0),
                (0.0, -100.0),
                (0.0, -15.0),
                (100.0, -15.0),
                (100.0, -100.0),
                (700.0, -100.0),
            ]),
        )
        .chain(3, true, pts(&[(0.0, 15.0), (100.0, 15.0), (100.0, 215.0), (0.0, 215.0)]))
        .reference(p(-500.0, 0.0))
        .build()
        .expect("shortcut map");
    Scenario::new("shortcut", map, p(-500.0, 0.0), p(600.0, 0.0))
}

/// A 100 m channel with a right-angle bend.
pub fn bend<T: Real>() -> Scenario<T> {
    let map = WaterwayMap::builder()
        .name("bend")
        .chain(1, false, pts(&[(0.0, 0.0), (600.0, 0.0), (600.0, 600.0)]))
        .chain(2, false, pts(&[(0.0, 100.0), (500.0, 100.0), (500.0, 600.0)]))
        .reference(p(100.0, 50.0))
        .build()
        .expect("bend map");
    Scenario::new("bend", map, p(50.0, 50.0), p(550.0, 550.0))
}

pub fn builtin_scenarios<T: Real>() -> Vec<Scenario<T>> {
    vec![
        corridor(),
        wedge(),
        parabola(),
        tjunction(),
        ring(),
        shortcut(),
        bend(),
    ]
}

pub fn builtin<T: Real>(name: &str) -> Option<Scenario<T>> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_valid() {
        let all = builtin_scenarios::<f64>();
        assert!(all.len() >= 6);
        for s in &all {
            assert!(s.map.clearance(s.start) > 0.0, "{}", s.name);
            assert!(s.map.clearance(s.goal) > 0.0, "{}", s.name);
            assert!(s.map.clearance(s.origin()) > 0.0, "{}", s.name);
        }
    }

    #[test]
    fn shortcut_passage_is_30m() {
        let s = shortcut::<f64>();
        assert!((s.map.clearance(Point2::new(50.0, 0.0)) - 15.0).abs() < 1e-12);
    }
}
