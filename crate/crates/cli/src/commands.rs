use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use anyhow::Result;
use waterway::network::DEFAULT_ROUTE_LIMIT;
use waterway::pipeline::{assess_scenario, compare_scenario, modify_route, PathSummary};
use waterway::safety::{assessments_csv, routes_csv};
use waterway::{
    enumerate_routes, explore, Assessed, DwaOutcome, ExploreConfig, ModifiedPath, Network, PipelineError, Point,
    Scenario,
};

use crate::output::{Artifacts, Format};
use crate::svg::{rank_color, Svg};

/// What a command did: its findings, staged artifacts and stage timings.
#[derive(Debug, Default)]
pub struct RunReport {
    pub scenario: String,
    pub lines: Vec<String>,
    pub chosen_route: Option<usize>,
    pub timings: Vec<(&'static str, Duration)>,
    pub artifacts: Artifacts,
    /// Set when the controller did not complete the route.
    pub stalled: Option<String>,
}

impl RunReport {
    fn new(s: &Scenario<f64>) -> Self {
        Self {
            scenario: s.name.clone(),
            ..Self::default()
        }
    }

    fn time<R>(&mut self, stage: &'static str, f: impl FnOnce() -> R) -> R {
        let t = Instant::now();
        let r = f();
        let el = t.elapsed();
        log::info!("{stage}: {el:.2?}");
        self.timings.push((stage, el));
        r
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {}", self.scenario)?;
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        if let Some(r) = self.chosen_route {
            writeln!(f, "chosen route: {r}")?;
        }
        if let Some(s) = &self.stalled {
            writeln!(f, "controller failure: {s}")?;
        }
        for (stage, el) in &self.timings {
            writeln!(f, "time {stage}: {:.3} s", el.as_secs_f64())?;
        }
        Ok(())
    }
}

fn edges_csv(net: &Network) -> String {
    let mut out = String::from("edge_id,from,to,length_m,min_width_m,mean_width_m,truncated\n");
    for e in net.edges() {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{}",
            e.id.0,
            e.endpoints.0 .0,
            e.endpoints.1 .0,
            e.length(),
            e.min_width(),
            e.mean_width(),
            e.truncated
        );
    }
    out
}

fn network_svg(s: &Scenario<f64>, net: &Network, marks: &[(Point, &str)]) -> Option<Svg> {
    let mut svg = Svg::new(s.map.bounds()?);
    svg.map(&s.map);
    svg.heat_network(net, s.safety.spacing);
    for (p, label) in marks {
        svg.circle(*p, 5.0, "black");
        svg.label(*p, label);
    }
    Some(svg)
}

pub fn explore_cmd(s: &Scenario<f64>, origin: Point) -> Result<RunReport> {
    let mut rep = RunReport::new(s);
    let cfg = ExploreConfig { trace: s.trace.clone() };
    let net = rep.time("explore", || explore(&s.map, origin, &cfg))?;
    rep.line(format!(
        "nodes: {} ({} intersections), edges: {}",
        net.nodes().len(),
        net.intersection_count(),
        net.edges().len()
    ));
    rep.artifacts.add(format!("{}_network.dot", s.name), Format::Dot, net.to_dot());
    rep.artifacts.add(format!("{}_edges.csv", s.name), Format::Csv, edges_csv(&net));
    if let Some(svg) = network_svg(s, &net, &[(origin, "origin")]) {
        rep.artifacts.add(format!("{}_network.svg", s.name), Format::Svg, svg.finish());
    }
    Ok(rep)
}

fn assessed(rep: &mut RunReport, s: &Scenario<f64>) -> Result<Assessed<f64>> {
    let a = rep.time("assess", || assess_scenario(s))?;
    if a.routes.is_empty() {
        return Err(PipelineError::NoRoute.into());
    }
    Ok(a)
}

fn route_rows(rep: &mut RunReport, a: &Assessed<f64>) {
    for (rank, x) in a.ranked.iter().enumerate() {
        rep.line(format!(
            "rank {}: route {} spi {} mean {:.2} m min {:.2} m length {:.1} m",
            rank + 1,
            x.route,
            x.spi,
            x.mean_width,
            x.min_width,
            x.length
        ));
    }
    rep.chosen_route = a.ranked.first().map(|x| x.route);
}

pub fn assess_cmd(s: &Scenario<f64>) -> Result<RunReport> {
    let mut rep = RunReport::new(s);
    let a = assessed(&mut rep, s)?;
    route_rows(&mut rep, &a);
    // Re-enumerate to report when the cap hid routes.
    if enumerate_routes(&a.network, a.start, a.goal, DEFAULT_ROUTE_LIMIT + 1)?.len() > DEFAULT_ROUTE_LIMIT {
        rep.line(format!("warning: only the first {DEFAULT_ROUTE_LIMIT} routes were assessed"));
    }
    let n = &s.name;
    rep.artifacts.add(format!("{n}_assessment.csv"), Format::Csv, assessments_csv(&a.ranked));
    rep.artifacts.add(format!("{n}_routes.csv"), Format::Csv, routes_csv(&a.routes, &a.ranked));
    for r in &a.routes {
        rep.artifacts.add(format!("{n}_route{}_profile.csv", r.id), Format::Csv, r.profile.to_csv());
    }
    rep.artifacts.add(format!("{n}_network.dot"), Format::Dot, a.network.to_dot());
    if let Some(mut svg) = network_svg(s, &a.network, &[(s.start, "start"), (s.goal, "goal")]) {
        // Draw the safest route last so it stays on top.
        for (rank, x) in a.ranked.iter().enumerate().rev() {
            if let Some(r) = a.route(x.route) {
                svg.polyline(&r.polyline(), rank_color(rank), 6.0, r#" stroke-opacity="0.6""#);
            }
        }
        rep.artifacts.add(format!("{n}_routes.svg"), Format::Svg, svg.finish());
    }
    Ok(rep)
}

fn note_outcome(rep: &mut RunReport, m: &ModifiedPath<f64>) {
    rep.line(format!(
        "modified path: {} states, {:.1} m, {}/{} waypoints, min clearance {:.2} m",
        m.states.len(),
        m.length(),
        m.reached.len(),
        m.waypoints.len(),
        m.min_clearance
    ));
    match m.outcome {
        DwaOutcome::Completed => {}
        DwaOutcome::Stalled { at } => rep.stalled = Some(format!("stalled at ({:.3}, {:.3})", at.x, at.y)),
        DwaOutcome::BudgetExhausted => rep.stalled = Some("step budget exhausted".into()),
    }
}

fn limits_note(s: &Scenario<f64>) -> String {
    let l = &s.limits;
    format!(
        "kinematic limits: v {}..{} m/s, a_max {} m/s2, omega_max {} rad/s, omega_dot_max {} rad/s2",
        l.v_min, l.v_max, l.a_max, l.omega_max, l.omega_dot_max
    )
}

pub fn modify_cmd(s: &Scenario<f64>, route: Option<usize>) -> Result<RunReport> {
    let mut rep = RunReport::new(s);
    let a = assessed(&mut rep, s)?;
    let id = match route {
        Some(id) => id,
        None => a.best().ok_or(PipelineError::NoRoute)?.id,
    };
    let m = rep.time("modify", || modify_route(s, &a, id))?;
    rep.chosen_route = Some(id);
    rep.line(limits_note(s));
    note_outcome(&mut rep, &m);
    let n = &s.name;
    rep.artifacts.add(format!("{n}_route{id}_modified.csv"), Format::Csv, m.to_csv());
    if let (Some(b), Some(r)) = (s.map.bounds(), a.route(id)) {
        let mut svg = Svg::new(b);
        svg.map(&s.map);
        svg.polyline(&r.polyline(), "#888888", 3.0, r#" stroke-dasharray="8 6""#);
        svg.polyline(&m.polyline(), rank_color(0), 3.0, "");
        for w in &m.waypoints {
            svg.circle(*w, 2.0, "#444444");
        }
        if let DwaOutcome::Stalled { at } = m.outcome {
            svg.circle(at, 8.0, "red");
        }
        rep.artifacts.add(format!("{n}_route{id}_modified.svg"), Format::Svg, svg.finish());
    }
    Ok(rep)
}

fn summary_row(method: &str, sum: Option<&PathSummary<f64>>) -> String {
    match sum {
        Some(x) => format!(
            "{method},ok,{:.6},{:.6},{:.6}\n",
            x.length, x.min_clearance, x.mean_clearance
        ),
        None => format!("{method},no_path,,,\n"),
    }
}

pub fn compare_cmd(s: &Scenario<f64>) -> Result<RunReport> {
    let mut rep = RunReport::new(s);
    let c = rep.time("compare", || compare_scenario(s))?;
    route_rows(&mut rep, &c.assessed);
    let g = &c.garsa_summary;
    rep.line(format!(
        "safest route: {:.1} m, min clearance {:.2} m, mean {:.2} m",
        g.length, g.min_clearance, g.mean_clearance
    ));
    match &c.astar_summary {
        Some(x) => rep.line(format!(
            "grid A*: {:.1} m, min clearance {:.2} m, mean {:.2} m",
            x.length, x.min_clearance, x.mean_clearance
        )),
        None => rep.line("grid A*: no path"),
    }
    rep.line(limits_note(s));
    note_outcome(&mut rep, &c.modified);

    let n = &s.name;
    let mut csv = String::from("method,status,length_m,min_clearance_m,mean_clearance_m\n");
    csv.push_str(&summary_row("safest_route", Some(g)));
    csv.push_str(&summary_row("astar", c.astar_summary.as_ref()));
    rep.artifacts.add(format!("{n}_compare.csv"), Format::Csv, csv);
    rep.artifacts.add(format!("{n}_modified.csv"), Format::Csv, c.modified.to_csv());
    if let Some(p) = &c.astar {
        rep.artifacts.add(format!("{n}_astar.csv"), Format::Csv, p.to_csv(s.limits.v_max));
    }
    rep.artifacts.add_always(format!("{n}_grid.pgm"), c.grid.to_pgm());

    if let Some(b) = s.map.bounds() {
        let mut svg = Svg::new(b);
        svg.map(&s.map);
        if let Some(best) = c.assessed.best() {
            svg.polyline(&best.polyline(), "#888888", 3.0, r#" stroke-dasharray="8 6""#);
        }
        svg.polyline(&c.modified.polyline(), rank_color(0), 3.0, "");
        if let (Some(p), Some(prof), Some(sum)) = (&c.astar, &c.astar_profile, &c.astar_summary) {
            svg.polyline(&p.polyline, "#2166ac", 3.0, "");
            let half = 0.5 * s.safety.threshold;
            if sum.min_clearance < half {
                for w in prof.samples().windows(2) {
                    if w[0].width < half || w[1].width < half {
                        svg.polyline(&[w[0].position, w[1].position], "#d73027", 8.0, r#" stroke-opacity="0.7""#);
                    }
                }
            }
        }
        svg.circle(s.start, 5.0, "black");
        svg.label(s.start, "start");
        svg.circle(s.goal, 5.0, "black");
        svg.label(s.goal, "goal");
        rep.artifacts.add(format!("{n}_compare.svg"), Format::Svg, svg.finish());
    }
    Ok(rep)
}
