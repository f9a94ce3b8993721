//! Minimal SVG renderer. One user unit is one meter; y points up in the map
//! and down in SVG, so every y is mirrored about the map's top edge.

use std::fmt::Write as _;

use waterway::{Bounds, Map, Network, Point, Profile};

const MARGIN: f64 = 20.0;

/// Route colors by rank, safest first; repeats past the end.
const RANK_COLORS: [&str; 6] = ["#1a9850", "#f46d43", "#7b3294", "#d6604d", "#4575b4", "#878787"];

pub fn rank_color(rank: usize) -> &'static str {
    RANK_COLORS[rank % RANK_COLORS.len()]
}

/// Blue for wide water, red for narrow; `t` is 0 at the narrowest width.
pub fn heat(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (215.0 * (1.0 - t) + 44.0 * t).round() as u8;
    let g = (48.0 * (1.0 - t) + 123.0 * t).round() as u8;
    let b = (39.0 * (1.0 - t) + 182.0 * t).round() as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

pub struct Svg {
    min: Point,
    max: Point,
    body: String,
}

impl Svg {
    pub fn new(bounds: Bounds<f64>) -> Self {
        let pad = Point::new(MARGIN, MARGIN);
        Self {
            min: bounds.min - pad,
            max: bounds.max + pad,
            body: String::new(),
        }
    }

    fn xy(&self, p: Point) -> (f64, f64) {
        (p.x, self.max.y - p.y + self.min.y)
    }

    fn points_attr(&self, pts: &[Point]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.xy(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn polyline(&mut self, pts: &[Point], stroke: &str, width: f64, extra: &str) {
        if pts.len() < 2 {
            return;
        }
        let attr = self.points_attr(pts);
        let _ = writeln!(
            self.body,
            r#"<polyline points="{attr}" fill="none" stroke="{stroke}" stroke-width="{width}" stroke-linejoin="round"{extra}/>"#
        );
    }

    pub fn polygon(&mut self, pts: &[Point], stroke: &str, width: f64) {
        let attr = self.points_attr(pts);
        let _ = writeln!(
            self.body,
            r##"<polygon points="{attr}" fill="#d9d9d9" stroke="{stroke}" stroke-width="{width}"/>"##
        );
    }

    pub fn circle(&mut self, p: Point, r: f64, fill: &str) {
        let (x, y) = self.xy(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn label(&mut self, p: Point, text: &str) {
        let (x, y) = self.xy(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{}</text>"#,
            x + 4.0,
            y - 4.0,
            escape(text)
        );
    }

    pub fn map(&mut self, map: &Map) {
        for c in map.chains() {
            if c.closed {
                self.polygon(&c.vertices, "black", 2.0);
            } else {
                self.polyline(&c.vertices, "black", 2.0, "");
            }
        }
        for p in map.points() {
            self.circle(p.location, 3.0, "black");
        }
    }

    /// Edge centerlines colored by local width, sampled every `spacing` meters.
    pub fn heat_network(&mut self, net: &Network, spacing: f64) {
        let sampled: Vec<Profile> = net
            .edges()
            .iter()
            .filter_map(|e| e.profile.resample(spacing).ok())
            .collect();
        let (lo, hi) = sampled
            .iter()
            .flat_map(|p| p.widths())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| (lo.min(w), hi.max(w)));
        let span = (hi - lo).max(1e-9);
        for p in &sampled {
            for w in p.samples().windows(2) {
                let mid = 0.5 * (w[0].width + w[1].width);
                let color = heat((mid - lo) / span);
                self.polyline(&[w[0].position, w[1].position], &color, 3.0, "");
            }
        }
        for n in net.nodes() {
            self.circle(n.position, 4.0, "#333333");
            self.label(n.position, &format!("n{}", n.id.0));
        }
    }

    pub fn finish(self) -> String {
        let w = self.max.x - self.min.x;
        let h = self.max.y - self.min.y;
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="{x:.2} {y:.2} {w:.2} {h:.2}">"#,
                "\n",
                r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="white"/>"#,
                "\n{body}</svg>\n"
            ),
            x = self.min.x,
            y = self.min.y,
            w = w,
            h = h,
            body = self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use waterway::scenarios;

    #[test]
    fn heat_runs_red_to_blue() {
        assert_eq!(heat(0.0), "#d73027");
        assert_eq!(heat(1.0), "#2c7bb6");
        assert_eq!(heat(-3.0), heat(0.0));
    }

    #[test]
    fn viewbox_is_fitted_and_y_is_flipped() {
        let s = scenarios::corridor::<f64>();
        let mut svg = Svg::new(s.map.bounds().unwrap());
        svg.circle(Point::new(0.0, 100.0), 1.0, "red");
        let out = svg.finish();
        assert!(out.contains(r#"width="540" height="140""#), "{out}");
        assert!(out.contains(r#"viewBox="-20.00 -20.00 540.00 140.00""#));
        // The top shore sits at the top of the picture.
        assert!(out.contains(r#"cx="0.00" cy="0.00""#));
    }
}
