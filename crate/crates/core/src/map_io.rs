//! Line-oriented text formats for maps and scenarios.
//!
//! Map records:
//!
//! ```text
//! # comment
//! name <text>
//! ref <x> <y>
//! chain <id> open|closed
//! v <x> <y>
//! point <id> <x> <y>
//! ```
//!
//! `v` lines attach to the most recent `chain`. Scenario files use the same
//! record style and either embed map records or name a map file with
//! `map <path>`. In a scenario, `v <speed>` with a single number sets the
//! tracing speed.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use crate::geometry::Point2;
use crate::map::{MapError, WaterwayMap};
use crate::num::Real;
use crate::scenarios::Scenario;

pub const MAP_HEADER: &str = "# waterway map v1";
pub const SCENARIO_HEADER: &str = "# waterway scenario v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedError {
    /// 1-based line number; 0 when the error concerns the file as a whole.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LocatedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<LocatedError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

fn err(line: usize, message: impl Into<String>) -> LocatedError {
    LocatedError {
        line,
        message: message.into(),
    }
}

fn number<T: Real>(tok: Option<&str>, line: usize, what: &str) -> Result<T, LocatedError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("invalid {what} '{tok}'")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite {what}")));
    }
    T::from_f64(v).ok_or_else(|| err(line, format!("{what} out of range")))
}

fn integer<N: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<N, LocatedError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| err(line, format!("invalid {what} '{tok}'")))
}

fn point<T: Real>(toks: &mut std::str::SplitWhitespace<'_>, line: usize) -> Result<Point2<T>, LocatedError> {
    let x = number(toks.next(), line, "x coordinate")?;
    let y = number(toks.next(), line, "y coordinate")?;
    Ok(Point2::new(x, y))
}

fn no_trailing(toks: &mut std::str::SplitWhitespace<'_>, line: usize) -> Result<(), LocatedError> {
    match toks.next() {
        Some(t) => Err(err(line, format!("unexpected trailing token '{t}'"))),
        None => Ok(()),
    }
}

struct ChainRec<T> {
    id: u32,
    closed: bool,
    line: usize,
    vertices: Vec<(Point2<T>, usize)>,
}

/// Accumulates map records and validates them with line numbers.
struct MapRecords<T> {
    name: Option<String>,
    reference: Option<(Point2<T>, usize)>,
    chains: Vec<ChainRec<T>>,
    points: Vec<(u32, Point2<T>, usize)>,
    in_chain: bool,
}

impl<T: Real> MapRecords<T> {
    fn new() -> Self {
        Self {
            name: None,
            reference: None,
            chains: Vec::new(),
            points: Vec::new(),
            in_chain: false,
        }
    }

    fn is_empty(&self) -> bool {
        self.name.is_none() && self.reference.is_none() && self.chains.is_empty() && self.points.is_empty()
    }

    /// Handles a map record; returns `Ok(false)` if `key` is not a map record.
    fn record(&mut self, key: &str, rest: &str, line: usize) -> Result<bool, LocatedError> {
        let mut toks = rest.split_whitespace();
        match key {
            "name" => {
                let name = rest.trim();
                if name.is_empty() {
                    return Err(err(line, "missing name"));
                }
                self.name = Some(name.to_string());
                self.in_chain = false;
            }
            "ref" => {
                let p = point(&mut toks, line)?;
                no_trailing(&mut toks, line)?;
                if self.reference.is_some() {
                    return Err(err(line, "duplicate ref record"));
                }
                self.reference = Some((p, line));
                self.in_chain = false;
            }
            "chain" => {
                self.in_chain = false;
                let id: u32 = integer(toks.next(), line, "chain id")?;
                let closed = match toks.next() {
                    Some("open") => false,
                    Some("closed") => true,
                    Some(t) => return Err(err(line, format!("expected open|closed, got '{t}'"))),
                    None => return Err(err(line, "missing open|closed")),
                };
                no_trailing(&mut toks, line)?;
                self.chains.push(ChainRec {
                    id,
                    closed,
                    line,
                    vertices: Vec::new(),
                });
                self.in_chain = true;
            }
            "v" => {
                let p = point(&mut toks, line)?;
                no_trailing(&mut toks, line)?;
                match self.chains.last_mut() {
                    Some(c) if self.in_chain => c.vertices.push((p, line)),
                    _ => return Err(err(line, "vertex outside a chain")),
                }
            }
            "point" => {
                self.in_chain = false;
                let id: u32 = integer(toks.next(), line, "point id")?;
                let p = point(&mut toks, line)?;
                no_trailing(&mut toks, line)?;
                self.points.push((id, p, line));
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn build(self, errors: &mut Vec<LocatedError>) -> Option<WaterwayMap<T>> {
        let mut seen = std::collections::BTreeMap::new();
        let ids = self
            .chains
            .iter()
            .map(|c| (c.id, c.line))
            .chain(self.points.iter().map(|&(id, _, l)| (id, l)));
        for (id, line) in ids {
            if let Some(first) = seen.insert(id, line) {
                errors.push(err(line, format!("duplicate feature id {id} (first used on line {first})")));
            }
        }
        for c in &self.chains {
            let n = c.vertices.len();
            let needed = if c.closed { 3 } else { 2 };
            if n < needed {
                errors.push(err(c.line, format!("chain {} needs at least {needed} vertices, got {n}", c.id)));
                continue;
            }
            let segs = if c.closed { n } else { n - 1 };
            for i in 0..segs {
                let (a, _) = c.vertices[i];
                let (b, lb) = c.vertices[(i + 1) % n];
                if a == b {
                    errors.push(err(lb, format!("zero-length segment in chain {}", c.id)));
                }
            }
        }
        if !errors.is_empty() {
            return None;
        }
        let mut b = WaterwayMap::builder();
        if let Some(n) = self.name {
            b = b.name(n);
        }
        for c in self.chains {
            b = b.chain(c.id, c.closed, c.vertices.into_iter().map(|(p, _)| p).collect());
        }
        for (id, p, _) in self.points {
            b = b.point(id, p);
        }
        let ref_line = self.reference.map_or(0, |r| r.1);
        if let Some((r, _)) = self.reference {
            b = b.reference(r);
        }
        match b.build() {
            Ok(m) => Some(m),
            Err(e @ MapError::ReferenceOnBoundary(_)) => {
                errors.push(err(ref_line, e.to_string()));
                None
            }
            Err(e) => {
                errors.push(err(0, e.to_string()));
                None
            }
        }
    }
}

fn split_record(raw: &str) -> Option<(&str, &str)> {
    let line = raw.trim();
    if line.is_empty() || line.starts_with('#') {
        return None;
    }
    Some(match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], &line[i..]),
        None => (line, ""),
    })
}

/// Parses and validates a map; every located error is reported.
pub fn load_map<T: Real>(text: &str) -> Result<WaterwayMap<T>, ParseErrors> {
    let mut recs = MapRecords::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some((key, rest)) = split_record(raw) else { continue };
        match recs.record(key, rest, line) {
            Ok(true) => {}
            Ok(false) => errors.push(err(line, format!("unknown record '{key}'"))),
            Err(e) => errors.push(e),
        }
    }
    let map = recs.build(&mut errors);
    match map {
        Some(m) if errors.is_empty() => Ok(m),
        _ => Err(ParseErrors(errors)),
    }
}

fn write_map_records<T: Real>(out: &mut String, map: &WaterwayMap<T>) {
    if let Some(n) = map.name() {
        let _ = writeln!(out, "name {n}");
    }
    if let Some(r) = map.reference() {
        let _ = writeln!(out, "ref {:.6} {:.6}", r.x, r.y);
    }
    for c in map.chains() {
        let _ = writeln!(out, "chain {} {}", c.id.0, if c.closed { "closed" } else { "open" });
        for v in &c.vertices {
            let _ = writeln!(out, "v {:.6} {:.6}", v.x, v.y);
        }
    }
    for p in map.points() {
        let _ = writeln!(out, "point {} {:.6} {:.6}", p.id.0, p.location.x, p.location.y);
    }
}

/// Canonical text: chains and points in id order, six fractional digits.
pub fn save_map<T: Real>(map: &WaterwayMap<T>) -> String {
    let mut out = String::from(MAP_HEADER);
    out.push('\n');
    write_map_records(&mut out, map);
    out
}

/// Parses a scenario. `resolve` reads the file named by a `map` record.
pub fn load_scenario<T: Real, F>(text: &str, mut resolve: F) -> Result<Scenario<T>, ParseErrors>
where
    F: FnMut(&str) -> Result<String, String>,
{
    let mut recs = MapRecords::new();
    let mut errors = Vec::new();
    let mut external: Option<(WaterwayMap<T>, usize)> = None;
    let mut name: Option<String> = None;
    let mut start: Option<Point2<T>> = None;
    let mut goal: Option<Point2<T>> = None;
    let mut start_line = 0;
    let mut goal_line = 0;
    let defaults: Scenario<T> = crate::scenarios::corridor();
    let mut safety = defaults.safety;
    let mut trace = defaults.trace.clone();
    let mut limits = defaults.limits;
    let mut dwa = defaults.dwa.clone();
    let mut cell_size = defaults.cell_size;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some((key, rest)) = split_record(raw) else { continue };
        // `v <speed>` sets the ship speed; `v <x> <y>` is a chain vertex
        let is_speed = key == "v" && rest.split_whitespace().count() == 1;
        match if is_speed { Ok(false) } else { recs.record(key, rest, line) } {
            Ok(true) => continue,
            Ok(false) => {}
            Err(e) => {
                errors.push(e);
                continue;
            }
        }
        let mut toks = rest.split_whitespace();
        let res: Result<(), LocatedError> = (|| {
            macro_rules! num {
                () => {{
                    let v = number::<T>(toks.next(), line, key)?;
                    no_trailing(&mut toks, line)?;
                    v
                }};
            }
            macro_rules! count {
                () => {{
                    let v: usize = integer(toks.next(), line, key)?;
                    no_trailing(&mut toks, line)?;
                    v
                }};
            }
            match key {
                "scenario" => {
                    let n = rest.trim();
                    if n.is_empty() {
                        return Err(err(line, "missing scenario name"));
                    }
                    name = Some(n.to_string());
                }
                "map" => {
                    let path = rest.trim();
                    let text = resolve(path).map_err(|e| err(line, format!("cannot read map '{path}': {e}")))?;
                    let m = load_map(&text).map_err(|e| err(line, format!("in map '{path}': {e}")))?;
                    external = Some((m, line));
                }
                "start" => {
                    start = Some(point(&mut toks, line)?);
                    no_trailing(&mut toks, line)?;
                    start_line = line;
                }
                "goal" => {
                    goal = Some(point(&mut toks, line)?);
                    no_trailing(&mut toks, line)?;
                    goal_line = line;
                }
                "xi" => safety.threshold = num!(),
                "ds" => {
                    let v = num!();
                    safety.spacing = v;
                    trace.sample_spacing = v;
                }
                "dt" => trace.dt = num!(),
                "v" => trace.speed = num!(),
                "eq_tol" => trace.eq_tol = num!(),
                "max_steps" => trace.max_steps = count!(),
                "cell_size" => cell_size = num!(),
                "v_max" => limits.v_max = num!(),
                "v_min" => limits.v_min = num!(),
                "a_max" => limits.a_max = num!(),
                "omega_max" => limits.omega_max = num!(),
                "omega_dot_max" => limits.omega_dot_max = num!(),
                "dwa_dt" => dwa.dt = num!(),
                "horizon" => dwa.horizon = num!(),
                "samples_v" => dwa.samples_v = count!(),
                "samples_omega" => dwa.samples_omega = count!(),
                "weights" => {
                    dwa.weights.heading = number(toks.next(), line, "heading weight")?;
                    dwa.weights.clearance = number(toks.next(), line, "clearance weight")?;
                    dwa.weights.velocity = number(toks.next(), line, "velocity weight")?;
                    no_trailing(&mut toks, line)?;
                }
                "spacing" => dwa.spacing = Some(num!()),
                "accept_radius" => dwa.accept_radius = Some(num!()),
                "clearance_cap" => dwa.clearance_cap = num!(),
                "dwa_max_steps" => dwa.max_steps = count!(),
                _ => return Err(err(line, format!("unknown record '{key}'"))),
            }
            Ok(())
        })();
        if let Err(e) = res {
            errors.push(e);
        }
    }

    let map = match external {
        Some((m, line)) => {
            if !recs.is_empty() {
                errors.push(err(line, "scenario has both a map file and inline map records"));
            }
            Some(m)
        }
        None => {
            if recs.chains.is_empty() && recs.points.is_empty() {
                errors.push(err(0, "scenario has no map"));
                None
            } else {
                recs.build(&mut errors)
            }
        }
    };
    if start.is_none() {
        errors.push(err(0, "missing start"));
    }
    if goal.is_none() {
        errors.push(err(0, "missing goal"));
    }
    if trace.validate().is_err() {
        errors.push(err(0, "invalid tracing parameters"));
    }
    if !(safety.threshold > T::zero() && safety.spacing > T::zero()) {
        errors.push(err(0, "xi and ds must be positive"));
    }
    if !(cell_size > T::zero()) {
        errors.push(err(0, "cell_size must be positive"));
    }
    if limits.validate().is_err() {
        errors.push(err(0, "invalid kinematic limits"));
    }
    if dwa.validate().is_err() {
        errors.push(err(0, "invalid controller parameters"));
    }
    if let (Some(m), Some(s), Some(g)) = (&map, start, goal) {
        if !(m.clearance(s) > T::zero()) {
            errors.push(err(start_line, "start has no positive clearance"));
        }
        if !(m.clearance(g) > T::zero()) {
            errors.push(err(goal_line, "goal has no positive clearance"));
        }
    }
    if !errors.is_empty() {
        return Err(ParseErrors(errors));
    }
    let map = map.unwrap();
    let name = name.or_else(|| map.name().map(str::to_string)).unwrap_or_else(|| "scenario".into());
    Ok(Scenario {
        name,
        map,
        start: start.unwrap(),
        goal: goal.unwrap(),
        safety,
        trace,
        limits,
        dwa,
        cell_size,
    })
}

/// Reads a scenario file; `map` records resolve relative to its directory.
pub fn load_scenario_file<T: Real>(path: &Path) -> Result<Scenario<T>, ParseErrors> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseErrors(vec![err(0, format!("{}: {e}", path.display()))]))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    load_scenario(&text, |rel| std::fs::read_to_string(dir.join(rel)).map_err(|e| e.to_string()))
}

/// Canonical scenario text with the map embedded.
pub fn save_scenario<T: Real>(s: &Scenario<T>) -> String {
    let mut out = String::from(SCENARIO_HEADER);
    out.push('\n');
    let f = |v: T| format!("{:.6}", v);
    let _ = writeln!(out, "scenario {}", s.name);
    let _ = writeln!(out, "start {} {}", f(s.start.x), f(s.start.y));
    let _ = writeln!(out, "goal {} {}", f(s.goal.x), f(s.goal.y));
    let _ = writeln!(out, "xi {}", f(s.safety.threshold));
    let _ = writeln!(out, "ds {}", f(s.safety.spacing));
    let _ = writeln!(out, "dt {}", f(s.trace.dt));
    let _ = writeln!(out, "v {}", f(s.trace.speed));
    let _ = writeln!(out, "eq_tol {}", f(s.trace.eq_tol));
    let _ = writeln!(out, "max_steps {}", s.trace.max_steps);
    let _ = writeln!(out, "cell_size {}", f(s.cell_size));
    let l = &s.limits;
    let _ = writeln!(out, "v_max {}", f(l.v_max));
    let _ = writeln!(out, "v_min {}", f(l.v_min));
    let _ = writeln!(out, "a_max {}", f(l.a_max));
    let _ = writeln!(out, "omega_max {}", f(l.omega_max));
    let _ = writeln!(out, "omega_dot_max {}", f(l.omega_dot_max));
    let d = &s.dwa;
    let _ = writeln!(out, "dwa_dt {}", f(d.dt));
    let _ = writeln!(out, "horizon {}", f(d.horizon));
    let _ = writeln!(out, "samples_v {}", d.samples_v);
    let _ = writeln!(out, "samples_omega {}", d.samples_omega);
    let _ = writeln!(
        out,
        "weights {} {} {}",
        f(d.weights.heading),
        f(d.weights.clearance),
        f(d.weights.velocity)
    );
    if let Some(v) = d.spacing {
        let _ = writeln!(out, "spacing {}", f(v));
    }
    if let Some(v) = d.accept_radius {
        let _ = writeln!(out, "accept_radius {}", f(v));
    }
    let _ = writeln!(out, "clearance_cap {}", f(d.clearance_cap));
    let _ = writeln!(out, "dwa_max_steps {}", d.max_steps);
    write_map_records(&mut out, &s.map);
    out
}
