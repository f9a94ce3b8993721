//! Route safety toolkit for waterways bounded by shorelines and islands.
//!
//! The pipeline traces the equidistant locus between boundary chains to
//! measure how wide the water is along every branch, assembles the branches
//! into a route network, scores candidate routes by how much of their length
//! is narrow, and smooths the chosen route into a kinematically feasible
//! path. A grid A* planner is included as a shortest-path baseline.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix it to `f64`.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod astar;
pub mod dwa;
pub mod geometry;
pub mod map;
pub mod map_io;
pub mod network;
pub mod num;
pub mod pipeline;
pub mod profile;
pub mod safety;
pub mod scenarios;
pub mod tracer;

pub use astar::{astar, clearance_profile, rasterize, Cell, GridError, GridPath, OccupancyGrid};
pub use dwa::{
    dynamic_window, modify_path, rollout, select_waypoints, DwaConfig, DwaError, DwaOutcome, KinematicLimits,
    KinematicState, ModifiedPath, Weights,
};
pub use geometry::{
    distance_rate, distance_to_element, ChainId, ClearanceResult, Contact, ElementId, Feature, GeometricElement,
    GeometryError, Point2, VirtualShipState,
};
pub use map::{Bounds, MapBuilder, MapError, WaterwayMap};
pub use map_io::{load_map, load_scenario, load_scenario_file, save_map, save_scenario, ParseErrors};
pub use network::{
    enumerate_routes, explore, explore_with, EdgeId, ExploreConfig, NetworkEdge, NetworkError, NetworkNode, NodeId,
    NodeKind, PendingBranch, Route, RouteNetwork,
};
pub use num::Real;
pub use pipeline::{assess_scenario, compare_scenario, Assessed, Comparison, PipelineError};
pub use profile::{ProfileError, WidthProfile, WidthSample};
pub use safety::{rank_routes, spi, summarize, Assessment, SafetyConfig, SafetyError, Spi};
pub use scenarios::{builtin_scenarios, Scenario};
pub use tracer::{
    center, center_on_pair, medial_direction, trace_pathway, TerminusReason, Trace, TraceConfig, TraceError,
    TraceEvent, TraceEventKind,
};

pub type Point = Point2<f64>;
pub type Map = WaterwayMap<f64>;
pub type Profile = WidthProfile<f64>;
pub type Network = RouteNetwork<f64>;
pub type ShipState = VirtualShipState<f64>;
