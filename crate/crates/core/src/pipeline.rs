//! End-to-end runs over a scenario: explore, anchor the query points,
//! enumerate and rank routes, and compare against the grid baseline.

use thiserror::Error;

use crate::astar::{astar, clearance_profile, rasterize, GridError, GridPath, OccupancyGrid};
use crate::dwa::{modify_path, DwaError, ModifiedPath};
use crate::network::{enumerate_routes, explore, ExploreConfig, NetworkError, NodeId, Route, RouteNetwork, DEFAULT_ROUTE_LIMIT};
use crate::num::Real;
use crate::profile::WidthProfile;
use crate::safety::{assess_route, rank_routes, summarize, Assessment, SafetyError};
use crate::scenarios::Scenario;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Safety(#[from] SafetyError),
    #[error(transparent)]
    Dwa(#[from] DwaError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("no route between start and goal")]
    NoRoute,
    #[error("unknown route {0}")]
    UnknownRoute(usize),
}

#[derive(Debug, Clone)]
pub struct Assessed<T> {
    pub network: RouteNetwork<T>,
    pub start: NodeId,
    pub goal: NodeId,
    pub routes: Vec<Route<T>>,
    /// Safest first.
    pub ranked: Vec<Assessment<T>>,
}

impl<T: Real> Assessed<T> {
    pub fn route(&self, id: usize) -> Option<&Route<T>> {
        self.routes.iter().find(|r| r.id == id)
    }

    pub fn best(&self) -> Option<&Route<T>> {
        self.ranked.first().and_then(|a| self.route(a.route))
    }
}

/// Route network of the scenario's map, explored from its origin.
pub fn explore_scenario<T: Real>(s: &Scenario<T>) -> Result<RouteNetwork<T>, PipelineError> {
    let cfg = ExploreConfig { trace: s.trace.clone() };
    Ok(explore(&s.map, s.origin(), &cfg)?)
}

/// Explores, anchors start and goal, enumerates and ranks all routes.
///
/// Start and goal are anchored in coordinate order rather than role order, so
/// swapping them produces the identical network. A start or goal in water the
/// exploration never reached yields [`PipelineError::NoRoute`].
pub fn assess_scenario<T: Real>(s: &Scenario<T>) -> Result<Assessed<T>, PipelineError> {
    let mut network = explore_scenario(s)?;
    let first_is_start = (s.start.x, s.start.y) <= (s.goal.x, s.goal.y);
    let (a, b) = if first_is_start { (s.start, s.goal) } else { (s.goal, s.start) };
    let anchor = |net: &mut RouteNetwork<T>, p| match net.attach_endpoint(&s.map, p, &s.trace) {
        Err(NetworkError::Unreachable) => Err(PipelineError::NoRoute),
        r => r.map_err(PipelineError::from),
    };
    let na = anchor(&mut network, a)?;
    let nb = anchor(&mut network, b)?;
    let (start, goal) = if first_is_start { (na, nb) } else { (nb, na) };
    let routes = enumerate_routes(&network, start, goal, DEFAULT_ROUTE_LIMIT)?;
    let assessments = routes
        .iter()
        .map(|r| assess_route(r, &s.safety))
        .collect::<Result<Vec<_>, _>>()?;
    let ranked = rank_routes(assessments)?;
    Ok(Assessed {
        network,
        start,
        goal,
        routes,
        ranked,
    })
}

/// Summary row of one method in a comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSummary<T> {
    pub length: T,
    pub min_clearance: T,
    pub mean_clearance: T,
}

impl<T: Real> PathSummary<T> {
    pub fn of(profile: &WidthProfile<T>, spacing: T) -> Option<Self> {
        let (mean, min, length) = summarize(profile, spacing).ok()?;
        Some(Self {
            length,
            min_clearance: min,
            mean_clearance: mean,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Comparison<T> {
    pub assessed: Assessed<T>,
    pub grid: OccupancyGrid<T>,
    /// `None` when the grid search found no path.
    pub astar: Option<GridPath<T>>,
    pub astar_profile: Option<WidthProfile<T>>,
    pub astar_summary: Option<PathSummary<T>>,
    pub garsa_summary: PathSummary<T>,
    pub modified: ModifiedPath<T>,
}

/// Ranks the scenario's routes and runs the grid baseline and the path
/// modifier on the rank-1 route.
pub fn compare_scenario<T: Real>(s: &Scenario<T>) -> Result<Comparison<T>, PipelineError> {
    let assessed = assess_scenario(s)?;
    let best = assessed.best().ok_or(PipelineError::NoRoute)?.clone();
    let garsa_summary = PathSummary::of(&best.profile, s.safety.spacing).ok_or(PipelineError::NoRoute)?;
    let modified = modify_path(&best.polyline(), &s.map, &s.limits, &s.dwa)?;

    let bounds = s.map.bounds().ok_or(GridError::EmptyBounds)?;
    let grid = rasterize(&s.map, s.cell_size, bounds, Some(s.origin()))?;
    let path = match (grid.cell_of(s.start), grid.cell_of(s.goal)) {
        (Some(a), Some(b)) => astar(&grid, a, b).ok(),
        _ => None,
    };
    let astar_profile = path.as_ref().map(|p| clearance_profile(p, &s.map));
    let astar_summary = astar_profile
        .as_ref()
        .and_then(|p| PathSummary::of(p, s.safety.spacing));
    Ok(Comparison {
        assessed,
        grid,
        astar: path,
        astar_profile,
        astar_summary,
        garsa_summary,
        modified,
    })
}

/// Runs the path modifier on a chosen route of an assessed scenario.
pub fn modify_route<T: Real>(s: &Scenario<T>, assessed: &Assessed<T>, route: usize) -> Result<ModifiedPath<T>, PipelineError> {
    let r = assessed.route(route).ok_or(PipelineError::UnknownRoute(route))?;
    Ok(modify_path(&r.polyline(), &s.map, &s.limits, &s.dwa)?)
}
