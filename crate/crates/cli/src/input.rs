//! Loading maps and scenarios from disk or the builtin corpus, and applying
//! command-line overrides.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use waterway::map_io::{load_map, load_scenario_file, SCENARIO_HEADER};
use waterway::scenarios::builtin;
use waterway::{Point, Scenario, Weights};

const BUILTIN_PREFIX: &str = "builtin:";

/// Parameter overrides shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Width threshold below which samples are penalised, meters.
    #[arg(long, global = true)]
    pub xi: Option<f64>,
    /// Width sampling and resampling spacing, meters.
    #[arg(long, global = true)]
    pub ds: Option<f64>,
    /// Tracing time step, seconds.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Tracing speed, meters per second.
    #[arg(long, global = true)]
    pub v: Option<f64>,
    /// Occupancy grid cell size for the grid baseline, meters.
    #[arg(long = "cell-size", global = true)]
    pub cell_size: Option<f64>,
    /// Waypoint spacing for path modification, meters.
    #[arg(long, global = true)]
    pub spacing: Option<f64>,
    /// Controller weights for heading, clearance and speed, e.g. `0.4,0.4,0.2`.
    #[arg(long, global = true, value_parser = parse_weights)]
    pub weights: Option<Weights<f64>>,
}

fn parse_weights(s: &str) -> Result<Weights<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [heading, clearance, velocity] => Ok(Weights {
            heading,
            clearance,
            velocity,
        }),
        _ => Err(format!("expected three comma-separated weights, got {}", parts.len())),
    }
}

pub fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{x:?}: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{y:?}: {e}"))?;
    Ok(Point::new(x, y))
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario<f64>) -> Result<()> {
        if let Some(xi) = self.xi {
            s.safety.threshold = xi;
        }
        if let Some(ds) = self.ds {
            s.safety.spacing = ds;
            s.trace.sample_spacing = ds;
        }
        if let Some(dt) = self.dt {
            s.trace.dt = dt;
        }
        if let Some(v) = self.v {
            s.trace.speed = v;
        }
        if let Some(c) = self.cell_size {
            s.cell_size = c;
        }
        if let Some(sp) = self.spacing {
            s.dwa.spacing = Some(sp);
        }
        if let Some(w) = self.weights {
            s.dwa.weights = w;
        }
        s.trace.validate().context("tracing parameters")?;
        s.dwa.validate().context("controller parameters")?;
        if [s.safety.threshold, s.safety.spacing].iter().any(|x| x.is_nan() || *x <= 0.0) {
            bail!("--xi and --ds must be positive");
        }
        if s.cell_size.is_nan() || s.cell_size <= 0.0 {
            bail!("--cell-size must be positive");
        }
        Ok(())
    }
}

fn is_scenario_text(text: &str) -> bool {
    text.lines().map(str::trim).any(|l| {
        l == SCENARIO_HEADER || l.split_whitespace().next().is_some_and(|k| matches!(k, "scenario" | "start" | "goal"))
    })
}

/// A scenario from `builtin:<name>` or a scenario file.
pub fn scenario(input: &str, overrides: &Overrides) -> Result<Scenario<f64>> {
    let mut s = if let Some(name) = input.strip_prefix(BUILTIN_PREFIX) {
        builtin(name).with_context(|| format!("no builtin scenario named {name:?}"))?
    } else {
        load_scenario_file(Path::new(input)).map_err(|e| anyhow::anyhow!("{input}:\n{e}"))?
    };
    overrides.apply(&mut s)?;
    Ok(s)
}

/// A scenario for exploration: scenario inputs load as usual; a bare map file
/// becomes a scenario whose start is `origin` or the map reference.
pub fn explorable(input: &str, origin: Option<Point>, overrides: &Overrides) -> Result<Scenario<f64>> {
    if input.starts_with(BUILTIN_PREFIX) {
        return scenario(input, overrides);
    }
    let text = fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
    if is_scenario_text(&text) {
        return scenario(input, overrides);
    }
    let map = load_map(&text).map_err(|e| anyhow::anyhow!("{input}:\n{e}"))?;
    let start = origin
        .or(map.reference())
        .with_context(|| format!("{input} has no `ref` record; pass --origin x,y"))?;
    let name = Path::new(input)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "map".into());
    let mut s = Scenario::new(name, map, start, start);
    overrides.apply(&mut s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_need_three_numbers() {
        let w = parse_weights("0.5, 0.3,0.2").unwrap();
        assert_eq!((w.heading, w.clearance, w.velocity), (0.5, 0.3, 0.2));
        assert!(parse_weights("1,0").is_err());
        assert!(parse_weights("a,b,c").is_err());
    }

    #[test]
    fn overrides_reach_every_config() {
        let mut s = builtin::<f64>("corridor").unwrap();
        let o = Overrides {
            xi: Some(40.0),
            ds: Some(2.0),
            cell_size: Some(2.5),
            ..Default::default()
        };
        o.apply(&mut s).unwrap();
        assert_eq!(s.safety.threshold, 40.0);
        assert_eq!(s.safety.spacing, 2.0);
        assert_eq!(s.trace.sample_spacing, 2.0);
        assert_eq!(s.cell_size, 2.5);
    }

    #[test]
    fn bad_weights_are_rejected_on_apply() {
        let mut s = builtin::<f64>("corridor").unwrap();
        let o = Overrides {
            weights: Some(Weights {
                heading: 1.0,
                clearance: 1.0,
                velocity: 1.0,
            }),
            ..Default::default()
        };
        assert!(o.apply(&mut s).is_err());
    }
}
